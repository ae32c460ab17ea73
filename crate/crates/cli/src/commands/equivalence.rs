use modelkit::pls_population::{check_equivalence, population_pls, PopulationRegression, KRYLOV_TOL};
use modelkit::rng::{derive_seed, replicate};

use crate::report::{Relation, Report, Table};
use crate::{usage, RunResult};

/// Relative tolerance for `β_m = β` at the stopping step.
const RECOVERY_TOL: f64 = 1e-9;

pub fn run(p: usize, relevant: usize, reps: usize, seed: u64) -> RunResult<Report> {
    if p == 0 {
        return Err(usage("--p must be at least 1"));
    }
    if relevant > p {
        return Err(usage(format!("--relevant must not exceed p = {p}")));
    }
    if reps == 0 {
        return Err(usage("--reps must be at least 1"));
    }
    let base = derive_seed(seed, "equivalence");
    let mut table = Table::new(["krylov_dim", "relevant_group_count", "pls_stop", "beta_error"]);
    let mut agreed = 0;
    let mut worst_error = 0.0_f64;
    for r in 0..reps {
        let model = PopulationRegression::random(p, relevant, &mut replicate(base, r as u64))?;
        let eq = check_equivalence(&model, KRYLOV_TOL)?;
        agreed += usize::from(eq.agree);
        let beta_error = population_pls(&model, p).ok().map(|fit| {
            let norm = model.beta().norm();
            let diff = (fit.final_beta(p) - model.beta()).norm();
            if norm > 0.0 {
                diff / norm
            } else {
                diff
            }
        });
        worst_error = worst_error.max(beta_error.unwrap_or(f64::INFINITY));
        table.row_opt(
            format!("rep{r}"),
            [
                Some(eq.krylov_dim as f64),
                Some(eq.relevant_group_count as f64),
                eq.pls_stop.map(|s| s as f64),
                beta_error,
            ],
        );
    }
    let agree_rate = agreed as f64 / reps as f64;
    let mut report = Report::new("equivalence", Some(seed));
    report
        .param("p", p)
        .param("relevant", relevant)
        .param("reps", reps)
        .table("replicates", table)
        .scalar("agree_rate", agree_rate)
        .scalar("max_beta_error", worst_error)
        .check("agree_rate", agree_rate, Relation::AtLeast, 1.0)
        .check("max_beta_error", worst_error, Relation::AtMost, RECOVERY_TOL);
    Ok(report)
}
