use rand::Rng as _;

use modelkit::quantum_conceptual::{
    born_probability, cmax_abs, decision_variable, fourier_basis, is_maximal, leq, measurement_distribution,
    mixed_state, operator_from_values, projector_defect, qdt_probabilities, question_answer_state, CMatrix,
    MixedState, Operator, Prospect,
};
use modelkit::rng::{derive_seed, seeded, Rng};

use crate::report::{Relation, Report, Table};
use crate::{Demo, RunResult};

/// Tolerance for projector-family invariants and normalization.
const ALGEBRA_TOL: f64 = 1e-10;

pub fn run(demo: Demo, d: usize, seed: u64, attraction: f64) -> RunResult<Report> {
    let mut rng = seeded(derive_seed(seed, "quantum"));
    let mut report = Report::new("quantum", Some(seed));
    report.param("d", d);
    match demo {
        Demo::Spin => {
            report.param("demo", "spin");
            spin(&mut report, d, &mut rng)?;
        }
        Demo::Decision => {
            report.param("demo", "decision").param("attraction", attraction);
            decision(&mut report, d, attraction, &mut rng)?;
        }
    }
    Ok(report)
}

/// Values `d−1, d−3, ..., −(d−1)`.
fn spin_values(d: usize) -> Vec<f64> {
    (0..d).map(|i| (d - 1) as f64 - 2.0 * i as f64).collect()
}

/// Two spin components: `z` diagonal in the standard basis and `x` diagonal
/// in the Fourier basis (Hadamard for `d = 2`). The state answering
/// "`z` = top value" is measured in `x`, and a random Eq.-style mixture of
/// `z` eigenstates is measured in both.
fn spin(report: &mut Report, d: usize, rng: &mut Rng) -> RunResult<()> {
    let values = spin_values(d);
    let z = operator_from_values(&values, &CMatrix::identity(d, d))?;
    let x = operator_from_values(&values, &fourier_basis(d))?;

    let answer = question_answer_state(&z, values[0])?;
    let pure = MixedState::new(answer.clone())?;
    let certainty = born_probability(&pure, &answer)?;
    let in_x = measurement_distribution(&pure, &x)?;
    let x_answer = question_answer_state(&x, values[0])?;

    let weights: Vec<f64> = (0..d).map(|_| -rng.random::<f64>().ln()).collect();
    let total: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let rho = mixed_state(&probs, z.spectral())?;
    let mixed_z = measurement_distribution(&rho, &z)?;
    let mixed_x = measurement_distribution(&rho, &x)?;

    let mut dist = Table::new(values.iter().map(|v| format!("{v}")));
    dist.row("answer_state_x", in_x.iter().copied());
    dist.row("mixture_weights", probs.iter().copied());
    dist.row("mixture_z", mixed_z.iter().copied());
    dist.row("mixture_x", mixed_x.iter().copied());
    report
        .table("operator_x_re", complex_table(x.matrix(), |z| z.re))
        .table("operator_x_im", complex_table(x.matrix(), |z| z.im))
        .table("answer_projector_re", complex_table(&answer, |z| z.re))
        .table("x_answer_projector_re", complex_table(&x_answer, |z| z.re))
        .table("x_answer_projector_im", complex_table(&x_answer, |z| z.im))
        .table("distributions", dist)
        .scalar("answer_certainty", certainty)
        .count("z_leq_x", usize::from(leq(&z, &x, 1e-9)))
        .check("family_defect", family_defect(&[&z, &x]), Relation::AtMost, ALGEBRA_TOL)
        .check("certainty_deficit", 1.0 - certainty, Relation::AtMost, ALGEBRA_TOL)
        .check("mixture_recovery", max_diff(&mixed_z, &probs), Relation::AtMost, ALGEBRA_TOL)
        .check("normalization_error", normalization(&[&in_x, &mixed_z, &mixed_x]), Relation::AtMost, ALGEBRA_TOL)
        .check("maximal", f64::from(u8::from(is_maximal(&z) && is_maximal(&x))), Relation::AtLeast, 1.0);
    Ok(())
}

/// `d` prospects with random utility factors and attraction factors
/// `q = a·(f − 1/d)`, which sum to zero.
fn decision(report: &mut Report, r: usize, attraction: f64, rng: &mut Rng) -> RunResult<()> {
    let xi = decision_variable(r)?;
    let op = xi.diagonal_operator()?;
    let weights: Vec<f64> = (0..r).map(|_| -rng.random::<f64>().ln()).collect();
    let total: f64 = weights.iter().sum();
    let prospects: Vec<Prospect> = weights
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let f = w / total;
            Prospect::new(format!("pi{}", i + 1), f, attraction * (f - 1.0 / r as f64))
        })
        .collect();
    let probs = qdt_probabilities(&prospects)?;
    let mut table = Table::new(["utility", "attraction", "probability"]);
    for (pi, p) in prospects.iter().zip(&probs) {
        table.row(pi.label.clone(), [pi.utility, pi.attraction, *p]);
    }
    let rho = mixed_state(&probs, op.spectral())?;
    let realized = measurement_distribution(&rho, &op)?;
    report
        .table("prospects", table)
        .check("family_defect", family_defect(&[&op]), Relation::AtMost, ALGEBRA_TOL)
        .check("normalization_error", normalization(&[&probs]), Relation::AtMost, 1e-12)
        .check("born_recovery", max_diff(&realized, &probs), Relation::AtMost, ALGEBRA_TOL)
        .check("maximal", f64::from(u8::from(is_maximal(&op))), Relation::AtLeast, 1.0);
    Ok(())
}

fn complex_table(m: &CMatrix, part: impl Fn(&modelkit::quantum_conceptual::C64) -> f64) -> Table {
    let mut table = Table::new((1..=m.ncols()).map(|j| format!("col{j}")));
    for (i, row) in m.row_iter().enumerate() {
        table.row(format!("row{}", i + 1), row.iter().map(&part).collect::<Vec<_>>());
    }
    table
}

/// Largest violation of idempotence, self-adjointness, orthogonality or
/// completeness over the spectral families of `ops`.
fn family_defect(ops: &[&Operator]) -> f64 {
    ops.iter()
        .map(|op| {
            let ps = op.spectral().projectors();
            let d = op.dim();
            let mut worst = ps.iter().map(projector_defect).fold(0.0, f64::max);
            for i in 0..ps.len() {
                for j in 0..i {
                    worst = worst.max(cmax_abs(&(&ps[i] * &ps[j])));
                }
            }
            let sum = ps.iter().fold(CMatrix::zeros(d, d), |acc, p| acc + p);
            worst.max(cmax_abs(&(sum - CMatrix::identity(d, d))))
        })
        .fold(0.0, f64::max)
}

fn normalization(dists: &[&Vec<f64>]) -> f64 {
    dists.iter().map(|v| (v.iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
