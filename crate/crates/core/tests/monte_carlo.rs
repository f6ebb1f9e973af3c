mod common;

use rand::Rng;
use ssmp::mellin::{MellinLaw, TimeChange};
use ssmp::monte_carlo::{
    path_rng, sample_chi, sample_exponential_functional, sample_extinction, sample_inverse_subordinator,
    sample_inverse_subordinator_path, sample_positive_stable, EmpiricalLaw, SimConfig,
};
use ssmp::special::gamma_real;
use ssmp::{Error, WienerHopfPair};

fn cfg(n: usize) -> SimConfig {
    SimConfig::default().with_paths(n)
}

/// Configuration for infinite-activity models: coarse cutoff with Gaussian small jumps.
fn jump_cfg(n: usize) -> SimConfig {
    SimConfig {
        jump_cutoff: 0.05,
        gaussian_small_jumps: true,
        ..SimConfig::default().with_paths(n).with_dt(0.002)
    }
}

fn within(est: ssmp::monte_carlo::MellinEstimate, exact: f64, k: f64) -> bool {
    (est.value - exact).abs() <= k * est.se
}

#[test]
fn positive_stable_quarter_moment() {
    let law = sample_positive_stable(0.5, &cfg(100_000)).unwrap();
    let m = law.mellin(0.25).unwrap();
    let exact = gamma_real(0.5).unwrap() / gamma_real(0.75).unwrap();
    assert!((exact - 1.446_40).abs() < 1e-5);
    assert!(within(m, exact, 3.0), "{m:?} vs {exact}");
}

#[test]
fn positive_stable_near_one_is_near_a_point_mass() {
    let law = sample_positive_stable(0.999, &cfg(20_000)).unwrap();
    assert!(law.samples().iter().all(|s| s.is_finite() && *s > 0.0));
    assert!((law.quantile(0.5) - 1.0).abs() < 0.01, "median {}", law.quantile(0.5));
}

#[test]
fn fixed_seed_fixes_samples_across_workers() {
    let pair = WienerHopfPair::brownian();
    let tc = TimeChange::stable(0.5).unwrap();
    let base = cfg(400).with_seed(11);
    let one = SimConfig { workers: Some(1), ..base.clone() };
    let four = SimConfig { workers: Some(4), ..base.clone() };
    let a = sample_extinction(&pair, &tc, 1.0, &one).unwrap().law;
    let b = sample_extinction(&pair, &tc, 1.0, &four).unwrap().law;
    let c = sample_extinction(&pair, &tc, 1.0, &base).unwrap().law;
    let (mut wa, mut wb) = (Vec::new(), Vec::new());
    a.write_csv(&mut wa, &one).unwrap();
    b.write_csv(&mut wb, &four).unwrap();
    assert_eq!(wa, wb);
    assert_eq!(a.samples()[..10], c.samples()[..10]);
    let other = sample_extinction(&pair, &tc, 1.0, &base.clone().with_seed(12)).unwrap().law;
    assert_ne!(other, c);
}

#[test]
fn brownian_self_similarity() {
    let pair = WienerHopfPair::brownian();
    let n = 20_000;
    let t1 = sample_exponential_functional(&pair, 1.0, &cfg(n).with_seed(1)).unwrap().law;
    let t2 = sample_exponential_functional(&pair, 2.0, &cfg(n).with_seed(2)).unwrap().law;
    let scaled = EmpiricalLaw::new(t1.samples().iter().map(|t| 4.0 * t).collect()).unwrap();
    // two-sample KS at the 1% level
    let critical = 1.63 * (2.0 / n as f64).sqrt();
    let d = scaled.ks_two_sample(&t2);
    assert!(d <= critical, "KS {d} > {critical}");
}

#[test]
fn brownian_hitting_time_moment() {
    let law = sample_exponential_functional(&WienerHopfPair::brownian(), 1.0, &cfg(100_000)).unwrap().law;
    let exact = MellinLaw::markov_t(&WienerHopfPair::brownian(), 1.0).unwrap().eval_real(0.25).unwrap();
    // 2^{-1/4} Γ(1/4)/√π, mpmath 30 digits
    assert!((exact - 1.720_079_974_649_039).abs() < 1e-13, "{exact}");
    let m = law.mellin(0.25).unwrap();
    assert!(within(m, exact, 3.0), "{m:?} vs {exact}");
    assert_eq!(law.mellin(0.0).unwrap().value, 1.0);
}

#[test]
fn stable_example_functional_moment() {
    let pair = WienerHopfPair::stable_example(1.5, 0.4, 0.6).unwrap();
    let law = sample_exponential_functional(&pair, 1.0, &jump_cfg(20_000)).unwrap().law;
    let exact = MellinLaw::markov_t(&pair, 1.0).unwrap().eval_real(0.3).unwrap();
    let m = law.mellin(0.3).unwrap();
    assert!(within(m, exact, 3.0), "{m:?} vs {exact}");
}

#[test]
fn deterministic_time_change_leaves_t_unchanged() {
    let pair = WienerHopfPair::brownian();
    let c = cfg(500);
    let t = sample_exponential_functional(&pair, 1.5, &c).unwrap().law;
    let ext = sample_extinction(&pair, &TimeChange::identity(), 1.5, &c).unwrap().law;
    assert_eq!(t, ext);
}

#[test]
fn extinction_moment_and_product_identity() {
    let pair = WienerHopfPair::brownian();
    let tc = TimeChange::stable(0.5).unwrap();
    let c = cfg(40_000);
    let ext = sample_extinction(&pair, &tc, 1.0, &c).unwrap().law;
    let law = MellinLaw::extinction(&pair, &tc, 1.0).unwrap();
    let m = ext.mellin(0.2).unwrap();
    assert!(within(m, law.eval_real(0.2).unwrap(), 3.0), "{m:?}");

    let chi = sample_chi(&tc, &c).unwrap();
    let t = sample_exponential_functional(&pair, 1.0, &c).unwrap().law;
    for z in [0.1, 0.2] {
        let a = ext.mellin(z).unwrap();
        let b = chi.mellin(z).unwrap();
        let f = t.mellin(z / tc.beta).unwrap();
        let se = a.se.hypot(b.value * f.se).hypot(f.value * b.se);
        assert!((a.value - b.value * f.value).abs() <= 3.0 * se, "z={z}: {a:?} vs {b:?}·{f:?}");
    }
}

#[test]
fn inverse_stable_integer_moments() {
    let tc = TimeChange::stable(0.5).unwrap();
    let law = sample_inverse_subordinator(&tc, 1.0, &cfg(100_000)).unwrap();
    let analytic = MellinLaw::lambda(&tc, 1.0).unwrap();
    for n in 1..=3 {
        // E[λ₁ⁿ] = n!/Γ(1 + n/2)
        let exact = gamma_real(n as f64 + 1.0).unwrap() / gamma_real(1.0 + 0.5 * n as f64).unwrap();
        assert!((analytic.eval_real(n as f64).unwrap() - exact).abs() <= 1e-10 * exact);
        let m = law.mellin(n as f64).unwrap();
        assert!(within(m, exact, 3.0), "n={n}: {m:?} vs {exact}");
    }
    let mean = law.mean().unwrap();
    assert!(within(mean, 1.0 / gamma_real(1.5).unwrap(), 3.0));
}

#[test]
fn inverse_subordinator_scaling() {
    let tc = TimeChange::stable(0.5).unwrap();
    let c = cfg(1000);
    let one = sample_inverse_subordinator(&tc, 1.0, &c).unwrap();
    let four = sample_inverse_subordinator(&tc, 4.0, &c).unwrap();
    for (a, b) in one.samples().iter().zip(four.samples()) {
        assert!((2.0 * a - b).abs() <= 1e-14 * b);
    }
}

#[test]
fn inverse_subordinator_path_route_agrees() {
    let tc = TimeChange::stable(0.5).unwrap();
    let c = cfg(10_000).with_dt(1e-3);
    let exact = sample_inverse_subordinator(&tc, 1.0, &c).unwrap();
    let path = sample_inverse_subordinator_path(0.5, 1.0, &c).unwrap();
    let d = exact.ks_two_sample(&path);
    assert!(d <= 0.05, "KS {d}");
}

#[test]
fn frechet_synthetic_tail_slope() {
    let mut rng = path_rng(5, 99, 0);
    let samples: Vec<f64> = (0..100_000).map(|_| -1.0 / rng.random::<f64>().ln()).collect();
    let fit = EmpiricalLaw::new(samples).unwrap().tail_fit(0.1, None).unwrap();
    assert!((fit.slope + 1.0).abs() <= 0.05, "{fit:?}");
}

#[test]
fn estimators_need_enough_samples() {
    let law = EmpiricalLaw::new(vec![1.0; 50]).unwrap();
    assert!(matches!(law.mellin(0.5), Err(Error::InsufficientSamples { needed: 100, have: 50 })));
    assert!(EmpiricalLaw::new(vec![1.0, -2.0]).is_err());
}
