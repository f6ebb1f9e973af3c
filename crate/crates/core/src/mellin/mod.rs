//! Mellin transforms of T, χ₁, λ_t, 𝕋 and F_β(φ), their inversion, and the
//! persistence and smoothness statements built on them.

pub mod inversion;
pub mod persistence;
pub mod theorem3;

use num_complex::Complex64;
use serde::Serialize;

use crate::bernstein::{membership, BernsteinFunction, WienerHopfPair};
use crate::error::{BernsteinClass, Error, Result};
use crate::wphi::{gamma_over_w, WPhi};

pub use inversion::{
    density, density_mellin_barnes, density_series_gen_frechet, numeric_moment, sector_angle, survival, DensityMethod,
    DensityValue, MellinBarnes, SectorAngle,
};
pub use persistence::{persistence_report, smoothness_index, PersistenceReport, SmoothnessIndex};
pub use theorem3::{verify_theorem3, Theorem3Check, Theorem3Report};

/// Evaluations closer than this to a strip endpoint are refused.
pub const STRIP_GUARD: f64 = 1e-8;

/// The part of a strip used for sample points: at most 4 wide, inside [−2, 2]
/// where possible, and pushed right when the strip ends beyond 2.
pub fn clipped_strip(lower: f64, upper: f64) -> (f64, f64) {
    let right_reach = if upper.is_finite() { upper - 4.0 } else { f64::NEG_INFINITY };
    let lo = lower.max(-2.0).max(right_reach);
    (lo, upper.min(2.0).min(lo + 4.0))
}

/// The increasing self-similar process χ, given through φ_β(u) = φ(βu) and β.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeChange {
    pub phi_beta: BernsteinFunction,
    pub beta: f64,
}

impl TimeChange {
    /// From φ ∈ B_ϱ and β > 0.
    pub fn new(phi: &BernsteinFunction, beta: f64) -> Result<Self> {
        let m = membership(phi, BernsteinClass::Rho)?;
        if !m.member {
            return Err(Error::Membership {
                class: BernsteinClass::Rho,
                reason: m.reason,
            });
        }
        Self::from_phi_beta(phi.rescale(beta)?, beta)
    }

    /// From φ_β directly, e.g. φ_β = S_{φ⁺}.
    pub fn from_phi_beta(phi_beta: BernsteinFunction, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Invalid(format!("β must be positive, got {beta}")));
        }
        if phi_beta.at_zero() != 0.0 {
            return Err(Error::Membership {
                class: BernsteinClass::Rho,
                reason: format!("φ_β(0) = {} ≠ 0", phi_beta.at_zero()),
            });
        }
        if !phi_beta.phi_prime_at_zero().is_finite() {
            return Err(Error::Membership {
                class: BernsteinClass::Rho,
                reason: "φ′(0⁺) = ∞".into(),
            });
        }
        Ok(TimeChange { phi_beta, beta })
    }

    /// χ_t = t: φ(u) = u, β = 1.
    pub fn identity() -> Self {
        TimeChange {
            phi_beta: BernsteinFunction::identity(),
            beta: 1.0,
        }
    }

    /// The β-stable subordinator, φ(u) = Γ(u + β)/Γ(u).
    pub fn stable(beta: f64) -> Result<Self> {
        Self::new(&BernsteinFunction::stable_subordinator(beta)?, beta)
    }

    /// φ_β′(0⁺) = βφ′(0⁺).
    pub fn phi_beta_prime(&self) -> f64 {
        self.phi_beta.phi_prime_at_zero()
    }

    /// Whether χ is deterministic (φ_β proportional to u with β = 1).
    pub fn is_deterministic(&self) -> bool {
        matches!(self.phi_beta.form(), crate::bernstein::Form::Rational { zeros, poles, .. }
            if zeros.len() == 1 && zeros[0] == 0.0 && poles.is_empty())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LawKind {
    MarkovT,
    Chi,
    Lambda,
    Extinction,
    GenFrechet,
}

#[derive(Debug, Clone, PartialEq)]
enum Model {
    MarkovT { pair: WienerHopfPair, x: f64 },
    Chi { tc: TimeChange },
    Lambda { tc: TimeChange, t: f64 },
    Extinction { pair: WienerHopfPair, tc: TimeChange, x: f64 },
    GenFrechet { phi: BernsteinFunction, beta: f64, scale: f64 },
}

/// A law on (0, ∞) given by M(z) = E[V^z] on the open strip (lower, upper).
#[derive(Debug, Clone, PartialEq)]
pub struct MellinLaw {
    kind: LawKind,
    model: Model,
    lower: f64,
    upper: f64,
}

fn lower_bound(minus: &BernsteinFunction) -> f64 {
    let a = if minus.at_zero() == 0.0 { minus.abscissa_a() } else { 0.0 };
    -(a + 1.0)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Invalid(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

impl MellinLaw {
    /// T = x^α ∫_0^∞ e^{αY_t} dt.
    pub fn markov_t(pair: &WienerHopfPair, x: f64) -> Result<Self> {
        check_positive("x", x)?;
        pair.require_class_n()?;
        Ok(MellinLaw {
            kind: LawKind::MarkovT,
            lower: lower_bound(&pair.minus),
            upper: pair.plus.abscissa_a_star(),
            model: Model::MarkovT { pair: pair.clone(), x },
        })
    }

    /// χ₁.
    pub fn chi(tc: &TimeChange) -> Self {
        MellinLaw {
            kind: LawKind::Chi,
            lower: f64::NEG_INFINITY,
            upper: tc.beta * tc.phi_beta.abscissa_a(),
            model: Model::Chi { tc: tc.clone() },
        }
    }

    /// λ_t, the inverse of χ at level t.
    pub fn lambda(tc: &TimeChange, t: f64) -> Result<Self> {
        check_positive("t", t)?;
        Ok(MellinLaw {
            kind: LawKind::Lambda,
            lower: -tc.phi_beta.abscissa_a(),
            upper: f64::INFINITY,
            model: Model::Lambda { tc: tc.clone(), t },
        })
    }

    /// 𝕋 = χ₁ · T^{1/β}, the extinction time of the time-changed process.
    pub fn extinction(pair: &WienerHopfPair, tc: &TimeChange, x: f64) -> Result<Self> {
        check_positive("x", x)?;
        pair.require_class_n()?;
        let beta = tc.beta;
        Ok(MellinLaw {
            kind: LawKind::Extinction,
            lower: beta * lower_bound(&pair.minus),
            upper: beta * tc.phi_beta.abscissa_a().min(pair.plus.abscissa_a_star()),
            model: Model::Extinction {
                pair: pair.clone(),
                tc: tc.clone(),
                x,
            },
        })
    }

    /// F_β(φ).
    pub fn gen_frechet(phi: &BernsteinFunction, beta: f64) -> Result<Self> {
        Self::gen_frechet_scaled(phi, beta, 1.0)
    }

    /// k · F_β(φ).
    pub fn gen_frechet_scaled(phi: &BernsteinFunction, beta: f64, scale: f64) -> Result<Self> {
        check_positive("β", beta)?;
        check_positive("scale", scale)?;
        Ok(MellinLaw {
            kind: LawKind::GenFrechet,
            lower: beta * lower_bound(phi),
            upper: beta,
            model: Model::GenFrechet {
                phi: phi.clone(),
                beta,
                scale,
            },
        })
    }

    pub fn kind(&self) -> LawKind {
        self.kind
    }

    /// Open strip (lower, upper) of analyticity.
    pub fn strip(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    /// Location of the right strip endpoint when it is a simple pole driving a power tail.
    pub fn dominant_pole(&self) -> Option<f64> {
        self.upper.is_finite().then_some(self.upper)
    }

    /// The (φ, β) of a generalized Fréchet law.
    pub fn gen_frechet_parts(&self) -> Option<(&BernsteinFunction, f64, f64)> {
        match &self.model {
            Model::GenFrechet { phi, beta, scale } => Some((phi, *beta, *scale)),
            _ => None,
        }
    }

    /// The pair and time change behind T or 𝕋.
    pub fn pair_parts(&self) -> Option<(&WienerHopfPair, TimeChange, f64)> {
        match &self.model {
            Model::MarkovT { pair, x } => Some((pair, TimeChange::identity(), *x)),
            Model::Extinction { pair, tc, x } => Some((pair, tc.clone(), *x)),
            _ => None,
        }
    }

    pub fn check_strip(&self, z: Complex64) -> Result<()> {
        if z.re <= self.lower + STRIP_GUARD || z.re >= self.upper - STRIP_GUARD {
            return Err(Error::Strip {
                law: format!("{:?}", self.kind),
                z,
                lower: self.lower,
                upper: self.upper,
            });
        }
        Ok(())
    }

    /// M(z) = E[V^z].
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.check_strip(z)?;
        if z == Complex64::new(0.0, 0.0) {
            return Ok(Complex64::new(1.0, 0.0));
        }
        match &self.model {
            Model::MarkovT { pair, x } => mellin_markov_t_unchecked(pair, *x, z),
            Model::Chi { tc } => mellin_chi_unchecked(tc, z),
            Model::Lambda { tc, t } => {
                let prefactor = (z * (tc.beta * t.ln())).exp();
                Ok(prefactor * gamma_over_w(&tc.phi_beta, z)? / tc.phi_beta_prime())
            }
            Model::Extinction { pair, tc, x } => {
                Ok(mellin_chi_unchecked(tc, z)? * mellin_markov_t_unchecked(pair, *x, z / tc.beta)?)
            }
            Model::GenFrechet { phi, beta, scale } => {
                let w = z / *beta;
                let g = crate::special::ln_gamma(1.0 - w)?.exp();
                Ok((z * scale.ln()).exp() * g * gamma_over_w(phi, w + 1.0)?)
            }
        }
    }

    /// M(s) for real s.
    pub fn eval_real(&self, s: f64) -> Result<f64> {
        Ok(self.eval(Complex64::new(s, 0.0))?.re)
    }
}

fn mellin_markov_t_unchecked(pair: &WienerHopfPair, x: f64, z: Complex64) -> Result<Complex64> {
    let w_plus = WPhi::new(&pair.plus).eval(-z)?;
    let ratio = gamma_over_w(&pair.minus, z + 1.0)?;
    Ok((z * (pair.alpha * x.ln())).exp() * pair.plus.at_zero() * w_plus * ratio)
}

fn mellin_chi_unchecked(tc: &TimeChange, z: Complex64) -> Result<Complex64> {
    Ok(gamma_over_w(&tc.phi_beta, -z / tc.beta)? / tc.phi_beta_prime())
}

/// E[T^z] for the pair started at x.
pub fn mellin_markov_t(pair: &WienerHopfPair, x: f64, z: Complex64) -> Result<Complex64> {
    MellinLaw::markov_t(pair, x)?.eval(z)
}

/// E[λ_t^z] = t^{βz} Γ(z)/(βφ′(0⁺) W_{φ_β}(z)).
pub fn mellin_lambda(tc: &TimeChange, t: f64, z: Complex64) -> Result<Complex64> {
    MellinLaw::lambda(tc, t)?.eval(z)
}

/// E_x[𝕋^z].
pub fn mellin_extinction(pair: &WienerHopfPair, tc: &TimeChange, x: f64, z: Complex64) -> Result<Complex64> {
    MellinLaw::extinction(pair, tc, x)?.eval(z)
}

/// E[F_β(φ)^z] = Γ(1 − z/β) Γ(z/β + 1)/W_φ(z/β + 1).
pub fn mellin_gen_frechet(phi: &BernsteinFunction, beta: f64, z: Complex64) -> Result<Complex64> {
    MellinLaw::gen_frechet(phi, beta)?.eval(z)
}

/// E[e^{qλ_t}] = 1 + (1/φ_β′(0⁺)) Σ_{n≥1} (q t^β)^n/(n W_{φ_β}(n)).
pub fn laplace_lambda(tc: &TimeChange, t: f64, q: Complex64) -> Result<Complex64> {
    check_positive("t", t)?;
    let y = q * t.powf(tc.beta);
    let radius = tc.phi_beta.at_infinity();
    if radius.is_finite() && y.norm() >= radius {
        return Err(Error::Radius {
            modulus: y.norm(),
            radius,
        });
    }
    if y.norm() == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    // term_n = y^n/(n W(n)), W(n) = ∏_{k<n} φ_β(k)
    let mut sum = Complex64::new(0.0, 0.0);
    let mut power_over_w = y; // y^n / W(n) at n = 1
    let mut peaked = false;
    let mut prev_mag = 0.0;
    for n in 1..200_000u64 {
        let term = power_over_w / n as f64;
        sum += term;
        let mag = term.norm();
        if mag < prev_mag {
            peaked = true;
        }
        if peaked && mag <= 1e-17 * sum.norm().max(1e-300) {
            return Ok(1.0 + sum / tc.phi_beta_prime());
        }
        prev_mag = mag;
        power_over_w *= y / tc.phi_beta.eval_real(n as f64)?;
        if !power_over_w.norm().is_finite() {
            break;
        }
    }
    Err(Error::NonConvergence {
        what: "Laplace series of λ_t".into(),
        last: sum,
        previous: sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma_real;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn brownian_hitting_law() {
        let pair = WienerHopfPair::brownian();
        let law = MellinLaw::markov_t(&pair, 1.0).unwrap();
        let got = law.eval_real(0.25).unwrap();
        assert!((got - 1.720_079_974_649_039_1).abs() < 1e-13, "{got}");
        assert_eq!(law.eval_real(0.0).unwrap(), 1.0);
        let (lo, hi) = law.strip();
        assert_eq!(lo, f64::NEG_INFINITY);
        assert_eq!(hi, 0.5);
        assert!(law.eval(c(0.5, 0.0)).is_err());
    }

    #[test]
    fn stable_chi_moments() {
        let tc = TimeChange::stable(0.5).unwrap();
        let chi = MellinLaw::chi(&tc);
        // E[χ₁^s] = Γ(1 − s/β)/Γ(1 − s)
        let got = chi.eval_real(0.25).unwrap();
        let want = gamma_real(0.5).unwrap() / gamma_real(0.75).unwrap();
        assert!((got - want).abs() < 1e-13);
        assert_eq!(chi.strip().1, 0.5);
    }

    #[test]
    fn lambda_mean_and_scaling() {
        let tc = TimeChange::stable(0.5).unwrap();
        let m = mellin_lambda(&tc, 1.0, c(1.0, 0.0)).unwrap();
        assert!((m.re - 1.128_379_167_095_512_6).abs() < 1e-13);
        let z = c(1.3, 0.0);
        let a = mellin_lambda(&tc, 2.7, z).unwrap();
        let b = mellin_lambda(&tc, 1.0, z).unwrap() * 2.7f64.powf(0.5 * 1.3);
        assert!((a - b).norm() < 1e-13 * a.norm());
        // deterministic time change: λ_t = t
        let id = TimeChange::identity();
        let v = mellin_lambda(&id, 3.0, c(0.7, 0.0)).unwrap();
        assert!((v.re - 3f64.powf(0.7)).abs() < 1e-13);
    }

    #[test]
    fn extinction_brownian_stable_half() {
        let pair = WienerHopfPair::brownian();
        let tc = TimeChange::stable(0.5).unwrap();
        let got = mellin_extinction(&pair, &tc, 1.0, c(0.2, 0.0)).unwrap();
        assert!((got.re - 5.203_143_781_411_599_8).abs() < 1e-12, "{got}");
        let law = MellinLaw::extinction(&pair, &tc, 1.0).unwrap();
        assert_eq!(law.strip(), (f64::NEG_INFINITY, 0.25));
    }

    #[test]
    fn frechet_reduction() {
        let id = BernsteinFunction::identity();
        for z in [c(0.3, 0.0), c(-0.7, 2.0)] {
            let got = mellin_gen_frechet(&id, 1.0, z).unwrap();
            let want = crate::special::gamma(1.0 - z).unwrap();
            assert!((got - want).norm() < 1e-13 * want.norm());
        }
        let aff = BernsteinFunction::affine(1.0, 1.0).unwrap();
        let got = mellin_gen_frechet(&aff, 1.0, c(0.5, 0.0)).unwrap();
        assert!((got.re - 1.181_635_900_603_677_4).abs() < 1e-13);
    }

    #[test]
    fn mittag_leffler_oracle() {
        let tc = TimeChange::stable(0.5).unwrap();
        let got = laplace_lambda(&tc, 1.0, c(-1.0, 0.0)).unwrap();
        assert!((got.re - 0.427_583_576_155_807_004).abs() < 1e-13, "{got}");
        let id = TimeChange::identity();
        let got = laplace_lambda(&id, 2.0, c(0.3, 0.4)).unwrap();
        let want = (c(0.3, 0.4) * 2.0).exp();
        assert!((got - want).norm() < 1e-13);
        assert_eq!(laplace_lambda(&tc, 1.0, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    }
}
