use std::path::Path;

use anyhow::Context;
use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use serde_json::{Map, Value};

use modelkit::envelope::{build_envelope, envelope_from_krylov, sample_population};
use modelkit::linalg::random_orthogonal;
use modelkit::pls_population::{krylov_space, KrylovGenerator, PopulationRegression, KRYLOV_TOL};
use modelkit::rng::{derive_seed, seeded, Rng};

use super::{dvector_value, matrix_value, sidecar_path};
use crate::report::{render, Relation, Report};
use crate::{usage, GenModel, RunResult};

pub fn run(model: GenModel, p: usize, m: usize, n: usize, noise: f64, seed: u64, out: &Path) -> RunResult<Report> {
    if p == 0 {
        return Err(usage("--p must be at least 1"));
    }
    if m == 0 || m > p {
        return Err(usage(format!("--m must satisfy 1 ≤ m ≤ p = {p}, got {m}")));
    }
    if n < 2 {
        return Err(usage("--n must be at least 2"));
    }
    if !(noise > 0.0 && noise.is_finite()) {
        return Err(usage("--noise must be a positive variance"));
    }
    let base = derive_seed(seed, "gen");
    let mut rng = seeded(base);
    let (population, phi) = match model {
        GenModel::Envelope => envelope_model(p, m, noise, &mut rng)?,
        GenModel::Population => {
            let random = PopulationRegression::random(p, m, &mut rng)?;
            let model = PopulationRegression::new(random.sigma_x().clone(), random.beta().clone(), noise)?;
            let phi = envelope_from_krylov(&model, KRYLOV_TOL)?.phi;
            (model, phi)
        }
    };
    let data = sample_population(&population, n, derive_seed(base, "sample"))?;

    data.write_csv(out)?;
    let mut truth = Map::new();
    truth.insert("model".into(), Value::from(model_name(model)));
    truth.insert("sigma_x".into(), matrix_value(population.sigma_x()));
    truth.insert("beta".into(), dvector_value(population.beta()));
    truth.insert("phi".into(), matrix_value(&phi));
    truth.insert("noise".into(), Value::from(noise));
    truth.insert("m".into(), Value::from(m));
    let sidecar = sidecar_path(out);
    std::fs::write(&sidecar, render(&Value::Object(truth)))
        .with_context(|| format!("cannot write {}", sidecar.display()))?;

    let krylov_dim = krylov_space(&population, KrylovGenerator::Covariance, KRYLOV_TOL)?.dim;
    let mut report = Report::new("gen", Some(seed));
    report
        .param("model", model_name(model))
        .param("p", p)
        .param("m", m)
        .param("n", n)
        .param("noise", noise)
        .param("out", out.display().to_string())
        .param("sidecar", sidecar.display().to_string())
        .count("krylov_dim", krylov_dim)
        .check(
            "krylov_dim_deviation",
            krylov_dim.abs_diff(m) as f64,
            Relation::AtMost,
            0.0,
        );
    Ok(report)
}

fn model_name(model: GenModel) -> &'static str {
    match model {
        GenModel::Envelope => "envelope",
        GenModel::Population => "population",
    }
}

/// Material eigenvalues spread over `[1, 4]`, immaterial ones in
/// `[0.05, 0.2]`, and a coefficient vector loading on every material
/// direction with magnitude in `[0.5, 1]`.
fn envelope_model(p: usize, m: usize, noise: f64, rng: &mut Rng) -> modelkit::Result<(PopulationRegression, DMatrix<f64>)> {
    let q = random_orthogonal(p, rng);
    let phi = q.columns(0, m).into_owned();
    let rotation = random_orthogonal(m, rng);
    let levels = DVector::from_fn(m, |i, _| 1.0 + 3.0 * (i as f64 + 0.25 + 0.5 * rng.random::<f64>()) / m as f64);
    let delta = &rotation * DMatrix::from_diagonal(&levels) * rotation.transpose();
    let delta0 = DMatrix::from_diagonal(&DVector::from_fn(p - m, |_, _| 0.05 + 0.15 * rng.random::<f64>()));
    let loadings = DVector::from_fn(m, |_, _| {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        sign * (0.5 + 0.5 * rng.random::<f64>())
    });
    let eta = DMatrix::from_column_slice(m, 1, (&rotation * loadings).as_slice());
    let spec = build_envelope(phi, delta, delta0, eta)?;
    let beta = DVector::from_column_slice(spec.b().as_slice());
    let model = PopulationRegression::new(spec.sigma_x(), beta, noise)?;
    Ok((model, spec.phi))
}
