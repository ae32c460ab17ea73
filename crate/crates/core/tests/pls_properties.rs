use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use modelkit::data_model::{ols_fit, Dataset, Denominator};
use modelkit::linalg::standard_normal_matrix;
use modelkit::pls_sample::{cross_validate, pls_fit, pls_fit_with, PlsOptions};
use modelkit::rng::seeded;

fn regression(n: usize, p: usize, seed: u64) -> Dataset {
    let mut rng = seeded(seed);
    let x = standard_normal_matrix(n, p, &mut rng);
    let beta = standard_normal_matrix(p, 1, &mut rng);
    let noise = standard_normal_matrix(n, 1, &mut rng);
    let y = &x * beta.column(0) + noise.column(0) * 0.7;
    Dataset::new(x, y).unwrap()
}

fn rel(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn full_rank_pls_is_ols(seed in any::<u64>(), p in 2usize..=6) {
        let d = regression(50, p, seed);
        let pls = pls_fit(&d, p).unwrap();
        let ols = ols_fit(&d).unwrap();
        prop_assert!(rel(&pls.implied_beta, &ols.beta) <= 1e-8);
    }

    #[test]
    fn predictions_do_not_depend_on_denominator(seed in any::<u64>(), m in 1usize..=4) {
        let d = regression(30, 4, seed);
        let unbiased = pls_fit_with(&d, m, PlsOptions { denominator: Denominator::Unbiased }).unwrap();
        let population = pls_fit_with(&d, m, PlsOptions { denominator: Denominator::Population }).unwrap();
        for i in 0..d.n() {
            let x0 = d.x().row(i).transpose();
            prop_assert!((unbiased.predict(&x0) - population.predict(&x0)).abs() <= 1e-10);
        }
    }

    #[test]
    fn scaling_response_scales_coefficients(seed in any::<u64>(), c in prop_oneof![-50.0..-0.01, 0.01..50.0f64]) {
        let d = regression(25, 5, seed);
        let scaled = Dataset::new(d.x().clone(), d.y() * c).unwrap();
        let base = pls_fit(&d, 2).unwrap().implied_beta;
        let fit = pls_fit(&scaled, 2).unwrap().implied_beta;
        prop_assert!(rel(&fit, &(&base * c)) <= 1e-10);
    }

    #[test]
    fn translating_predictors_keeps_coefficients(seed in any::<u64>(), shift in prop::collection::vec(-100.0..100.0f64, 5)) {
        let d = regression(25, 5, seed);
        let mut x = d.x().clone();
        for (j, mut col) in x.column_iter_mut().enumerate() {
            col.add_scalar_mut(shift[j]);
        }
        let moved = Dataset::new(x, d.y().clone()).unwrap();
        let base = pls_fit(&d, 3).unwrap().implied_beta;
        let fit = pls_fit(&moved, 3).unwrap().implied_beta;
        prop_assert!(rel(&fit, &base) <= 1e-8);
    }
}

#[test]
fn cv_prefers_one_component_for_noiseless_rank_one_design() {
    // Every row is a multiple of u, and y is exactly linear in that multiple.
    let u = [1.0, 2.0, -1.0];
    let mut rng = seeded(4);
    let a = standard_normal_matrix(30, 1, &mut rng);
    let x = DMatrix::from_fn(30, 3, |i, j| a[(i, 0)] * u[j]);
    let y = a.column(0) * 2.0;
    let cv = cross_validate(&Dataset::new(x, y.into_owned()).unwrap(), 3, 5, 1).unwrap();
    assert_eq!(cv.m_star, 1);
    assert!(cv.press[0] < 1e-20);
}

#[test]
fn cv_stays_small_on_pure_noise() {
    let small = (0..20)
        .filter(|&seed| {
            let mut rng = seeded(1000 + seed);
            let x = standard_normal_matrix(40, 5, &mut rng);
            let y = standard_normal_matrix(40, 1, &mut rng).column(0).into_owned();
            cross_validate(&Dataset::new(x, y).unwrap(), 5, 10, seed).unwrap().m_star <= 2
        })
        .count();
    assert!(small >= 18, "m_star ≤ 2 in {small}/20 replicates");
}
