use nalgebra::{DMatrix, DVector};

use modelkit::confidence::{invert, regression_coef_confidence, uniformity_check, RegressionScenario};
use modelkit::data_model::Dataset;
use modelkit::linalg::standard_normal_matrix;
use modelkit::rng::replicate;

fn fixed_regression() -> Dataset {
    let x = DMatrix::from_row_slice(
        8,
        2,
        &[1.0, 2.0, 2.0, 1.5, 3.0, 3.5, 4.0, 2.0, 5.0, 4.5, 6.0, 3.0, 7.0, 6.0, 8.0, 4.0],
    );
    let y = DVector::from_column_slice(&[3.1, 3.9, 7.2, 6.8, 10.9, 9.1, 14.2, 11.8]);
    Dataset::new(x, y).unwrap()
}

/// Reference intervals `β̂ⱼ ± t₀.₉₇₅,₅ · seⱼ` computed independently.
#[test]
fn t_interval_matches_reference() {
    let d = fixed_regression();
    let expected = [
        (0.563_650_830_300_024_3, 1.125_460_019_680_392_3),
        (0.911_299_952_137_444_4, 1.822_425_077_239_756_8),
    ];
    for (j, (lo, hi)) in expected.into_iter().enumerate() {
        let curve = regression_coef_confidence(&d, j).unwrap();
        assert!((invert(&curve, 0.025).unwrap() - lo).abs() < 1e-8);
        assert!((invert(&curve, 0.975).unwrap() - hi).abs() < 1e-8);
    }
}

#[test]
fn central_interval_covers_at_nominal_rate() {
    let truth = DVector::from_column_slice(&[0.8, -1.2, 0.3]);
    let reps = 2000;
    let covered = (0..reps)
        .filter(|&r| {
            let mut rng = replicate(77, r);
            let x = standard_normal_matrix(15, 3, &mut rng);
            let noise = standard_normal_matrix(15, 1, &mut rng);
            let y = &x * &truth + noise.column(0) * 1.5;
            let curve = regression_coef_confidence(&Dataset::new(x, y).unwrap(), 1).unwrap();
            let (lo, hi) = (invert(&curve, 0.025).unwrap(), invert(&curve, 0.975).unwrap());
            lo <= truth[1] && truth[1] <= hi
        })
        .count();
    let rate = covered as f64 / reps as f64;
    // Three binomial standard errors around 0.95.
    assert!((rate - 0.95).abs() < 3.0 * (0.95 * 0.05 / reps as f64).sqrt(), "coverage {rate}");
}

/// Under exact uniformity a 2000-draw KS distance exceeds 0.04 with
/// probability around 0.3%, so the seeds are fixed.
#[test]
fn t_pivot_is_uniform_for_each_coefficient() {
    for coef_index in 0..2 {
        let scenario = RegressionScenario {
            beta: DVector::from_column_slice(&[2.0, -0.3]),
            intercept: -1.0,
            noise_sd: 0.5,
            n: 9,
            coef_index,
        };
        let ks = uniformity_check(2000, 21 + coef_index as u64, |rng| scenario.pit(rng)).unwrap();
        assert!(ks < 0.04, "coefficient {coef_index}: KS {ks}");
    }
}

#[test]
fn uniformity_is_reproducible() {
    let scenario = RegressionScenario {
        beta: DVector::from_column_slice(&[1.0]),
        intercept: 0.0,
        noise_sd: 1.0,
        n: 6,
        coef_index: 0,
    };
    let a = uniformity_check(300, 9, |rng| scenario.pit(rng)).unwrap();
    let b = uniformity_check(300, 9, |rng| scenario.pit(rng)).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
}
