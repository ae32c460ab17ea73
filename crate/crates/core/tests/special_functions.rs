//! Distribution functions against 40-digit reference tables.

use modelkit::confidence::special::{normal_cdf, student_t_cdf};

fn table(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn normal_cdf_reference_table() {
    let rows = table(include_str!("data/normal_cdf.csv"));
    assert_eq!(rows.len(), 321);
    for row in rows {
        let (x, expected) = (row[0], row[1]);
        let got = normal_cdf(x);
        assert!((got - expected).abs() <= 1e-15, "Φ({x}) = {got:e}, want {expected:e}");
        if expected < 1e-3 {
            assert!((got / expected - 1.0).abs() <= 1e-12, "relative error at {x}");
        }
    }
}

#[test]
fn student_t_cdf_reference_table() {
    let rows = table(include_str!("data/student_t_cdf.csv"));
    for row in rows {
        let (t, dof, expected) = (row[0], row[1], row[2]);
        let got = student_t_cdf(t, dof);
        assert!((got - expected).abs() <= 1e-12, "T_{dof}({t}) = {got:e}, want {expected:e}");
    }
}
