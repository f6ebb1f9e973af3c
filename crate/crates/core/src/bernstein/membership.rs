//! Membership in B_ϱ, B_1 and B_−.

use serde::Serialize;

use super::BernsteinFunction;
use crate::error::{BernsteinClass, Error, Result};

/// Outcome of a membership test with the failing condition, if any.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Membership {
    pub class: BernsteinClass,
    pub member: bool,
    pub reason: String,
}

const GRID_POINTS: usize = 1 << 14;
const GRID_LO: f64 = 1e-6;
const GRID_HI: f64 = 1e6;

fn verdict(class: BernsteinClass, member: bool, reason: impl Into<String>) -> Membership {
    Membership {
        class,
        member,
        reason: reason.into(),
    }
}

/// Tests φ against one class.
pub fn membership(phi: &BernsteinFunction, class: BernsteinClass) -> Result<Membership> {
    match class {
        BernsteinClass::Rho => {
            if phi.at_zero() != 0.0 {
                return Ok(verdict(class, false, format!("φ(0) = {} ≠ 0", phi.at_zero())));
            }
            if !phi.phi_prime_at_zero().is_finite() {
                return Ok(verdict(class, false, "φ′(0⁺) = ∞"));
            }
            if phi.drift() > 0.0 {
                return Ok(verdict(class, true, format!("d = {} > 0", phi.drift())));
            }
            let triple = phi.triple().ok_or_else(|| {
                Error::Indeterminate(format!("no Lévy triple for {phi}; cannot decide ϑ(0,1) = ∞"))
            })?;
            if triple.total_mass().is_infinite() {
                Ok(verdict(class, true, "ϑ(0,1) = ∞"))
            } else {
                Ok(verdict(class, false, "d = 0 and ϑ(0,1) < ∞"))
            }
        }
        BernsteinClass::One => {
            if phi.abscissa_a() <= 1.0 {
                return Ok(verdict(
                    class,
                    false,
                    format!("φ(−u) infinite beyond u = a_φ = {}", phi.abscissa_a()),
                ));
            }
            let check = |u: f64| -> Result<Option<String>> {
                let v = phi.eval_real(-u)?;
                if !(v.is_finite() && v >= -1e-12) {
                    return Ok(Some(format!("φ(−{u}) = {v} < 0")));
                }
                Ok(None)
            };
            if let Some(r) = check(1.0)? {
                return Ok(verdict(class, false, r));
            }
            for i in 0..=1000 {
                if let Some(r) = check(i as f64 / 1000.0)? {
                    return Ok(verdict(class, false, r));
                }
            }
            Ok(verdict(class, true, "0 ≤ φ(−u) < ∞ on [0, 1]"))
        }
        BernsteinClass::Minus => {
            if let Some(v) = phi.minus_asserted() {
                return Ok(verdict(class, v, "asserted by configuration"));
            }
            let triple = phi
                .triple()
                .ok_or_else(|| Error::Indeterminate(format!("no Lévy triple for {phi}")))?;
            if !triple.measure.atoms.is_empty() {
                return Ok(verdict(class, false, "Lévy measure has atoms"));
            }
            let Some(v) = triple.measure.positive else {
                return Ok(verdict(class, true, "no jumps"));
            };
            let ratio = (GRID_HI / GRID_LO).powf(1.0 / (GRID_POINTS - 1) as f64);
            let mut y = GRID_LO;
            let mut prev = v.density(y);
            for _ in 1..GRID_POINTS {
                y *= ratio;
                let cur = v.density(y);
                if cur - prev > 1e-12 * prev.abs().max(1.0) {
                    return Ok(verdict(class, false, format!("density increases near y = {y:e}")));
                }
                prev = cur;
            }
            Ok(verdict(class, true, "density non-increasing on the grid"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_in_b_rho() {
        let m = membership(&BernsteinFunction::identity(), BernsteinClass::Rho).unwrap();
        assert!(m.member);
    }

    #[test]
    fn affine_fails_b_one_at_u_one() {
        let m = membership(&BernsteinFunction::affine(2.0, 0.5).unwrap(), BernsteinClass::One).unwrap();
        assert!(!m.member);
        assert!(m.reason.contains("φ(−1)"), "{}", m.reason);
    }

    #[test]
    fn stable_subordinator_is_in_b_rho() {
        let phi = BernsteinFunction::stable_subordinator(0.5).unwrap();
        let m = membership(&phi, BernsteinClass::Rho).unwrap();
        assert!(m.member, "{}", m.reason);
        // the tail mass near zero really diverges
        let t = phi.triple().unwrap();
        let v = t.measure.positive.unwrap();
        assert!(v.tail(1e-4).unwrap() > 10.0 * v.tail(1e-2).unwrap() / 2.0);
    }

    #[test]
    fn gamma_ratio_densities_are_non_increasing() {
        let phi = BernsteinFunction::gamma_ratio(0.9, 1.0, 0.1).unwrap();
        assert!(membership(&phi, BernsteinClass::Minus).unwrap().member);
        let cp = BernsteinFunction::compound_poisson(0.0, 1.0, 2.0, 3.0).unwrap();
        assert!(membership(&cp, BernsteinClass::Minus).unwrap().member);
    }

    #[test]
    fn stable_plus_factor_is_in_b_one() {
        let plus = BernsteinFunction::gamma_ratio(0.9, 1.5, 0.9).unwrap();
        assert!(membership(&plus, BernsteinClass::One).unwrap().member);
    }
}
