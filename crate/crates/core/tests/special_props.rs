mod common;

use std::f64::consts::PI;

use common::c;
use proptest::prelude::*;
use ssmp::special::{barnes_ratio, ln_barnes_ratio_depth, ln_gamma};

fn near_pole(re: f64, im: f64) -> bool {
    im.abs() < 0.05 && re < 0.05 && (re - re.round()).abs() < 0.05
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn log_gamma_recurrence(re in -5.0..15.0f64, im in -10.0..10.0f64) {
        prop_assume!(!near_pole(re, im) && !near_pole(re + 1.0, im));
        let z = c(re, im);
        let d = ln_gamma(z + 1.0).unwrap() - ln_gamma(z).unwrap() - z.ln();
        // compare modulo the branch 2πi
        let wrapped = d.im - 2.0 * PI * (d.im / (2.0 * PI)).round();
        prop_assert!(d.re.abs() <= 1e-12 && wrapped.abs() <= 1e-12, "{z}: {d}");
    }

    #[test]
    fn barnes_ratio_ignores_ladder_depth(
        re in -1.5..2.0f64, im in -4.0..4.0f64, a in 0.0..2.0f64, b in 0.0..2.0f64, tau in 0.3..2.5f64,
    ) {
        let z = c(re, im);
        let depth = 30.0 * tau.max(1.0);
        let (Ok(x), Ok(y)) = (
            ln_barnes_ratio_depth(z, a, b, tau, depth),
            ln_barnes_ratio_depth(z, a, b, tau, 1.7 * depth),
        ) else {
            return Ok(());
        };
        prop_assert!((x.exp() - y.exp()).norm() <= 1e-8 * x.exp().norm(), "{x} vs {y}");
    }
}

#[test]
fn barnes_ladder_step_is_gamma() {
    for (z, tau) in [(c(0.3, 0.0), 1.0), (c(-0.7, 1.2), 0.6), (c(2.1, -3.0), 1.8)] {
        let step = barnes_ratio(z, 1.0, 0.0, tau).unwrap();
        let want = ln_gamma(z / tau).unwrap().exp();
        assert!((step - want).norm() <= 1e-12 * want.norm());
    }
}
