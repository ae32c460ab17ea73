use std::path::Path;

use modelkit::causal::{conditional_r_given_c, divergence, intervention_r_given_c, joint, DiscreteCausalModel, OutcomeTable};

use crate::report::{Relation, Report, Table};
use crate::RunResult;

pub fn run(model_path: &Path) -> RunResult<Report> {
    let model = DiscreteCausalModel::load(model_path)?;
    let tv = divergence(&model)?;
    let total = joint(&model).total();

    let mut tv_table = Table::new(["tv"]);
    for (c, v) in tv.per_c.iter().enumerate() {
        tv_table.row(format!("c={c}"), [*v]);
    }
    let mut report = Report::new("causal", None);
    report
        .param("model", model_path.display().to_string())
        .table("conditional", outcome_table(&conditional_r_given_c(&model), model.c_card()))
        .table("intervention", outcome_table(&intervention_r_given_c(&model), model.c_card()))
        .table("total_variation", tv_table)
        .scalar("max_tv", tv.max)
        .check("joint_total_error", (total - 1.0).abs(), Relation::AtMost, 1e-12);
    Ok(report)
}

/// Rows `r`, columns `c`; columns with `f_C(c) = 0` are `null`.
fn outcome_table(t: &OutcomeTable, c_card: usize) -> Table {
    let mut table = Table::new((0..c_card).map(|c| format!("c={c}")));
    for r in 0..t.r_card {
        table.row_opt(format!("r={r}"), (0..c_card).map(|c| t.get(r, c)));
    }
    table
}
