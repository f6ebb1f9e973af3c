//! Identities in law for 𝕋 under the S-transform time change φ_β = S_{φ⁺}.

use num_complex::Complex64;
use serde::Serialize;

use super::{MellinLaw, TimeChange};
use crate::bernstein::{membership, BernsteinFunction, WienerHopfPair};
use crate::error::{BernsteinClass, Error, Result};
use crate::special::gamma;
use crate::wphi::WPhi;

pub const IDENTITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem3Check {
    pub name: String,
    pub max_rel_discrepancy: f64,
    pub tolerance: f64,
    pub points: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem3Report {
    pub beta: f64,
    pub x: f64,
    pub checks: Vec<Theorem3Check>,
    pub notes: Vec<String>,
}

impl Theorem3Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// n points spread over the strip (lower, upper), clipped to [−2, 2] and kept
/// 5% away from the ends, with imaginary parts cycling through 0, ±0.7, ±2.
pub fn strip_grid(lower: f64, upper: f64, n: usize) -> Vec<Complex64> {
    let (lo, hi) = crate::mellin::clipped_strip(lower, upper);
    let (lo, hi) = (lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo));
    let ims = [0.0, 0.7, -0.7, 2.0, -2.0];
    (0..n)
        .map(|j| {
            let frac = if n > 1 { j as f64 / (n - 1) as f64 } else { 0.5 };
            Complex64::new(lo + frac * (hi - lo), ims[j % ims.len()])
        })
        .collect()
}

fn compare<F, G>(name: &str, grid: &[Complex64], tol: f64, lhs: F, rhs: G) -> Result<Theorem3Check>
where
    F: Fn(Complex64) -> Result<Complex64>,
    G: Fn(Complex64) -> Result<Complex64>,
{
    let mut worst: f64 = 0.0;
    for &z in grid {
        let (l, r) = (lhs(z)?, rhs(z)?);
        worst = worst.max((l - r).norm() / r.norm());
    }
    Ok(Theorem3Check {
        name: name.into(),
        max_rel_discrepancy: worst,
        tolerance: tol,
        points: grid.len(),
        pass: worst <= tol,
    })
}

fn is_linear(phi: &BernsteinFunction, alpha: f64) -> bool {
    phi.at_zero() == 0.0
        && [0.5, 1.0, 3.0]
            .iter()
            .all(|&u| phi.eval_real(u).is_ok_and(|v| (v - alpha * u).abs() <= 1e-12 * (1.0 + alpha * u)))
}

/// Checks, on `grid` (or 20 default strip points when empty):
/// (1) 𝕋(S_{φ⁺}) against x^{α/β} F_β(φ⁻);
/// (2) for β = 1 and φ⁻ ∈ B_−, against T of the pair (φ⁻, 1 + u), and W_{S_φ⁺}(u)·u = W_φ⁺(u);
/// (3) for φ⁻(u) = αu, against a constant times the Fréchet law F_β, with both the
///     constant (αx^α)^{1/β} and (x^α/α)^{1/β}.
pub fn verify_theorem3(pair: &WienerHopfPair, beta: f64, x: f64, grid: &[Complex64]) -> Result<Theorem3Report> {
    let m = membership(&pair.plus, BernsteinClass::One)?;
    if !m.member {
        return Err(Error::Membership {
            class: BernsteinClass::One,
            reason: format!("φ⁺ ∉ B_1: {}", m.reason),
        });
    }
    pair.require_class_n()?;
    let alpha = pair.alpha;
    let tc = TimeChange::from_phi_beta(pair.plus.s_transform()?, beta)?;
    let extinction = MellinLaw::extinction(pair, &tc, x)?;
    let frechet = MellinLaw::gen_frechet_scaled(&pair.minus, beta, x.powf(alpha / beta))?;
    let (l1, u1) = extinction.strip();
    let (l2, u2) = frechet.strip();
    let owned;
    let grid = if grid.is_empty() {
        owned = strip_grid(l1.max(l2), u1.min(u2), 20);
        &owned[..]
    } else {
        grid
    };
    let mut checks = vec![compare(
        "identity1_frechet_phi_minus",
        grid,
        IDENTITY_TOL,
        |z| extinction.eval(z),
        |z| frechet.eval(z),
    )?];
    let mut notes = Vec::new();

    let minus_ok = membership(&pair.minus, BernsteinClass::Minus).map(|m| m.member).unwrap_or(false);
    if (beta - 1.0).abs() < 1e-15 && minus_ok {
        let dual = WienerHopfPair::new(pair.minus.clone(), BernsteinFunction::affine(1.0, 1.0)?, alpha)?;
        let t_psi = MellinLaw::markov_t(&dual, x)?;
        checks.push(compare(
            "identity2_spectrally_negative_T",
            grid,
            IDENTITY_TOL,
            |z| extinction.eval(z),
            |z| t_psi.eval(z),
        )?);
        let s = pair.plus.s_transform()?;
        let w_s = WPhi::euler(&s, 1e-10);
        let w_plus = WPhi::new(&pair.plus);
        let reals: Vec<Complex64> = [0.5, 1.5, 2.5].iter().map(|&u| Complex64::new(u, 0.0)).collect();
        checks.push(compare(
            "identity2_w_s_transform",
            &reals,
            1e-7,
            |u| Ok(w_s.eval(u)? * u),
            |u| w_plus.eval(u),
        )?);
    } else {
        notes.push("identity (2) skipped: needs β = 1 and φ⁻ ∈ B_−".into());
    }

    if is_linear(&pair.minus, alpha) {
        let frechet_mellin = |k: f64| {
            move |z: Complex64| -> Result<Complex64> { Ok((z * (k.ln() / beta)).exp() * gamma(1.0 - z / beta)?) }
        };
        let xa = x.powf(alpha);
        checks.push(compare(
            "identity3_constant_alpha_x_alpha",
            grid,
            IDENTITY_TOL,
            |z| extinction.eval(z),
            frechet_mellin(alpha * xa),
        )?);
        checks.push(compare(
            "identity3_constant_x_alpha_over_alpha",
            grid,
            IDENTITY_TOL,
            |z| extinction.eval(z),
            frechet_mellin(xa / alpha),
        )?);
        notes.push(format!(
            "Fréchet(1) requires x^α/α = 1, i.e. x = α^(1/α) = {}",
            alpha.powf(1.0 / alpha)
        ));
    } else {
        notes.push("identity (3) skipped: φ⁻ is not αu".into());
    }
    Ok(Theorem3Report {
        beta,
        x,
        checks,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrally_positive_stable_example() {
        let pair = WienerHopfPair::stable_example(1.5, 1.0 / 3.0, 0.6).unwrap();
        let r = verify_theorem3(&pair, 1.0, 1.3, &[]).unwrap();
        let get = |n: &str| r.checks.iter().find(|c| c.name == n).unwrap();
        assert!(get("identity1_frechet_phi_minus").pass, "{r:?}");
        assert!(get("identity2_spectrally_negative_T").pass, "{r:?}");
        assert!(get("identity2_w_s_transform").pass, "{r:?}");
        assert!(get("identity3_constant_x_alpha_over_alpha").pass, "{r:?}");
        assert!(!get("identity3_constant_alpha_x_alpha").pass);
    }

    #[test]
    fn two_sided_stable_example() {
        let pair = WienerHopfPair::stable_example(1.5, 0.4, 0.6).unwrap();
        for beta in [0.5, 1.0] {
            let r = verify_theorem3(&pair, beta, 1.0, &[]).unwrap();
            assert!(r.checks[0].pass, "{r:?}");
            assert_eq!(r.checks[0].points, 20);
        }
    }

    #[test]
    fn brownian_plus_factor_is_not_b1() {
        let err = verify_theorem3(&WienerHopfPair::brownian(), 1.0, 1.0, &[]).unwrap_err();
        assert!(matches!(err, Error::Membership { .. }));
    }
}
