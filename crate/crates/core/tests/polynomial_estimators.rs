use proptest::prelude::*;
use vnentropy::densmat::{generate_linear_plus_uniform, generate_low_rank_density, generate_tridiagonal_poisson, Decay};
use vnentropy::linalg::DenseMatrix;
use vnentropy::rng::gaussian_vector;
use vnentropy::taylor::taylor_series_trace;
use vnentropy::{
    cheb_coefficients, cheb_quadratic_form, cheb_scalar_eval, chebyshev_entropy_with_model, default_m_cheb,
    default_m_taylor, taylor_entropy_with_model, taylor_quadratic_form, EstimatorConfig, RngStream, SparseSymMatrix,
    UMode,
};

fn nte_cfg(u: f64, m: usize) -> EstimatorConfig {
    EstimatorConfig { u_mode: UMode::Manual(u), m_override: Some(m), nte: true, ..Default::default() }
}

fn h(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

#[test]
fn taylor_terms_are_nonnegative() {
    let (r, model) = generate_linear_plus_uniform(24, 6, &RngStream::new(2, 0)).unwrap();
    let u = (model.p_max() * 1.5).min(1.0);
    for probe in 0..5 {
        let g = gaussian_vector(&RngStream::new(40, probe), 24).unwrap();
        let mut prev = 0.0;
        for m in 1..=30 {
            let cur = taylor_quadratic_form(&r, u, m, &g).unwrap();
            assert!(cur - prev >= -1e-10, "m={m}: term {}", cur - prev);
            prev = cur;
        }
    }
}

#[test]
fn taylor_nte_on_diagonal_matches_series() {
    let p = [0.35, 0.25, 0.2, 0.12, 0.08];
    let r = SparseSymMatrix::from_dense(&DenseMatrix::diagonal(&p)).unwrap();
    for m in [1usize, 3, 17, 60] {
        let rep = taylor_entropy_with_model(&r, &nte_cfg(0.5, m), None).unwrap();
        let series = 0.5f64.recip().ln()
            + p.iter().map(|&pj| (1..=m).map(|k| pj * (1.0 - pj / 0.5).powi(k as i32) / k as f64).sum::<f64>()).sum::<f64>();
        assert!((rep.estimate - series).abs() <= 1e-10 * series, "m={m}");
    }
}

#[test]
fn taylor_series_converges_from_below() {
    let (_, model) = generate_tridiagonal_poisson(64).unwrap();
    let (_, lin) = generate_linear_plus_uniform(50, 5, &RngStream::new(1, 0)).unwrap();
    for model in [model, lin] {
        let exact = model.entropy();
        let u = (6.0 * model.p_max()).min(1.0);
        let ell = model.p_min();
        let eps = 0.1;
        let mut prev = f64::NEG_INFINITY;
        for k in [1usize, 2, 5, 10, 50, 200] {
            let v = (1.0 / u).ln() + taylor_series_trace(model.probs(), u, k);
            assert!(v >= prev && v <= exact + 1e-12);
            prev = v;
        }
        let m = default_m_taylor(u, ell, eps).unwrap();
        let v = (1.0 / u).ln() + taylor_series_trace(model.probs(), u, m);
        assert!(exact - v <= eps * exact, "gap {} at m={m}", exact - v);
    }
}

#[test]
fn chebyshev_grid_bound() {
    for u in [0.06, 0.5, 1.0] {
        for m in [2usize, 5, 10, 30] {
            let c = cheb_coefficients(u, m).unwrap();
            let worst = (0..10_000)
                .map(|i| u * i as f64 / 9_999.0)
                .map(|x| (h(x) - cheb_scalar_eval(&c, x).unwrap()).abs())
                .fold(0.0, f64::max);
            assert!(worst <= u / (2.0 * (m * (m + 1)) as f64) + 1e-12, "u={u} m={m}: {worst}");
        }
    }
}

#[test]
fn chebyshev_nte_matches_scalar_sum() {
    let (r, model) = generate_low_rank_density(30, 4, Decay::Exponential, &RngStream::new(8, 0)).unwrap();
    for m in [3usize, 12, 40] {
        let rep = chebyshev_entropy_with_model(&r, &nte_cfg(1.0, m), Some(&model)).unwrap();
        let c = cheb_coefficients(1.0, m).unwrap();
        let mut probs = model.probs().to_vec();
        probs.resize(30, 0.0);
        let want: f64 = -probs.iter().map(|&p| cheb_scalar_eval(&c, p).unwrap()).sum::<f64>();
        assert!((rep.estimate - want).abs() <= 1e-10 * want.abs());
        // zero eigenvalues still obey the scalar bound
        assert!((rep.estimate - model.entropy()).abs() <= 30.0 / (2.0 * (m * m) as f64));
    }
}

#[test]
fn chebyshev_is_negative_on_interior() {
    for (u, ell, eps) in [(1.0, 0.05, 0.1), (0.5, 0.02, 0.2), (1.0, 0.2, 0.5)] {
        let m = default_m_cheb(u, ell, eps).unwrap();
        let c = cheb_coefficients(u, m).unwrap();
        let hi = (1.0f64 - ell).min(u);
        let floor = (1.0 - eps) * ell * (1.0 / (1.0 - ell)).ln();
        for i in 0..=2000 {
            let x = ell + (hi - ell) * i as f64 / 2000.0;
            assert!(-cheb_scalar_eval(&c, x).unwrap() >= floor, "u={u} ell={ell} x={x}");
        }
    }
}

#[test]
fn probe_estimators_track_exact_entropy() {
    let (r, model) = generate_linear_plus_uniform(64, 4, &RngStream::new(12, 0)).unwrap();
    let cfg = EstimatorConfig { ell: Some(model.p_min()), m_override: Some(60), s_override: Some(400), seed: 5, ..Default::default() };
    let t = taylor_entropy_with_model(&r, &cfg, Some(&model)).unwrap();
    let c = chebyshev_entropy_with_model(&r, &cfg, Some(&model)).unwrap();
    assert!(t.rel_err.unwrap() < 0.1, "taylor {:?}", t.rel_err);
    assert!(c.rel_err.unwrap() < 0.1, "chebyshev {:?}", c.rel_err);
    assert_eq!(t.s_used, Some(400));
    assert!(t.p1_tilde.unwrap() <= model.p_max() + 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn cheb_matrix_form_matches_scalar_on_diagonals(
        p in prop::collection::vec(0.0f64..1.0, 1..12),
        m in 1usize..25,
        u in 0.05f64..1.0,
        seed in 0u64..1000,
    ) {
        let p: Vec<f64> = p.iter().map(|x| x * u).collect();
        let r = SparseSymMatrix::from_dense(&DenseMatrix::diagonal(&p)).unwrap();
        let g = gaussian_vector(&RngStream::new(seed, 0), p.len()).unwrap();
        let c = cheb_coefficients(u, m).unwrap();
        let got = cheb_quadratic_form(&r, &c, &g).unwrap();
        let want: f64 = p.iter().zip(&g).map(|(&pj, gj)| gj * gj * cheb_scalar_eval(&c, pj).unwrap()).sum();
        let scale: f64 = p.iter().zip(&g).map(|(&pj, gj)| gj * gj * cheb_scalar_eval(&c, pj).unwrap().abs()).sum();
        prop_assert!((got - want).abs() <= 1e-10 * scale.max(1e-12));
    }

    #[test]
    fn taylor_estimate_monotone_in_m(seed in 0u64..500, m in 1usize..40) {
        let (r, model) = generate_low_rank_density(12, 3, Decay::Linear, &RngStream::new(seed, 1)).unwrap();
        let u = model.p_max();
        let g = gaussian_vector(&RngStream::new(seed, 2), 12).unwrap();
        let a = taylor_quadratic_form(&r, u, m, &g).unwrap();
        let b = taylor_quadratic_form(&r, u, m + 1, &g).unwrap();
        prop_assert!(b - a >= -1e-10);
    }
}
