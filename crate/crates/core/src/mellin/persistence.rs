//! Smoothness index of 𝕋 and the persistence tail P_x(𝕋 > t) ~ K t^{−βc}.

use num_complex::Complex64;
use serde::Serialize;

use super::TimeChange;
use crate::bernstein::{BernsteinFunction, WienerHopfPair};
use crate::error::{Error, Result};
use crate::special::{gamma_real, pochhammer, rgamma_real};
use crate::wphi::{gamma_over_w, WPhi};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothnessIndex {
    pub n_phi_beta: f64,
    pub n_psi: f64,
    pub n: f64,
}

impl SmoothnessIndex {
    /// k such that the density is predicted to be C^k; None for N ≤ 1.
    pub fn density_class(&self) -> Option<f64> {
        (self.n > 1.0).then(|| if self.n.is_finite() { self.n.ceil() - 2.0 } else { f64::INFINITY })
    }
}

/// a/b with a/0 = ∞ and ∞/∞ = ∞.
fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 || num.is_infinite() {
        f64::INFINITY
    } else {
        num / den
    }
}

fn triple_of(phi: &BernsteinFunction) -> Result<crate::bernstein::LevyTriple> {
    phi.triple()
        .ok_or_else(|| Error::Indeterminate(format!("no Lévy triple for {phi}")))
}

/// N = N_{φ_β} + N_Ψ with N_{φ_β} = ϑ_β(0,∞)/d_β and
/// N_Ψ = (φ⁻(0) + ϑ⁻(0,∞))/d⁻ + v⁺(0⁺)/(φ⁺(0) + ϑ⁺(0,∞)) + ∞·1{d⁺ > 0}.
pub fn smoothness_index(pair: &WienerHopfPair, tc: &TimeChange) -> Result<SmoothnessIndex> {
    let tb = triple_of(&tc.phi_beta)?;
    let n_phi_beta = ratio(tb.total_mass(), tb.drift);
    let n_psi = if pair.plus.drift() > 0.0 {
        f64::INFINITY
    } else {
        let tm = triple_of(&pair.minus)?;
        let tp = triple_of(&pair.plus)?;
        let first = ratio(pair.minus.at_zero() + tm.total_mass(), tm.drift);
        let second = ratio(tp.density_at_zero(), pair.plus.at_zero() + tp.total_mass());
        first + second
    };
    Ok(SmoothnessIndex {
        n_phi_beta,
        n_psi,
        n: n_phi_beta + n_psi,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistenceReport {
    pub c_alpha: f64,
    pub beta: f64,
    /// βc_α.
    pub tail_exponent: f64,
    /// lim t^{βc_α} P_x(𝕋 > t).
    pub limit_constant: f64,
    /// φ⁺′(−c_α⁺).
    pub plus_derivative: f64,
    pub smoothness: Option<SmoothnessIndex>,
    /// N̄ = ⌈N_Ψ⌉ − 2 when finite.
    pub n_bar: Option<i64>,
    /// (n, C_{c_α}(n)).
    pub derivative_constants: Vec<(i64, f64)>,
    pub notes: Vec<String>,
    /// Assumed, not verified: unique zero on the critical line, finite Ψ′(−c_α⁺), non-lattice.
    pub assumptions: Vec<String>,
}

/// C_c(n) = (1 + c)_{n−N̄} Σ_{k=0}^{N̄} C(N̄, k) Γ(N̄ − n + 1)/Γ(k − n + 1) (−1)^k (1 + c)_k,
/// with 1/Γ at non-positive integers equal to 0.
pub fn derivative_constant(c: f64, n_bar: i64, n: i64) -> Result<f64> {
    if n_bar < 0 || n < 0 {
        return Err(Error::Invalid(format!("C_c(n) needs N̄, n ≥ 0, got N̄={n_bar}, n={n}")));
    }
    let mut sum = 0.0;
    let mut binom = 1.0;
    for k in 0..=n_bar {
        if k > 0 {
            binom *= (n_bar - k + 1) as f64 / k as f64;
        }
        let den_arg = (k - n + 1) as f64;
        if den_arg <= 0.0 {
            continue;
        }
        // here n ≤ k ≤ N̄ so Γ(N̄ − n + 1) is finite
        let ratio = gamma_real((n_bar - n + 1) as f64)? * rgamma_real(den_arg);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += binom * ratio * sign * pochhammer(1.0 + c, k)?;
    }
    Ok(pochhammer(1.0 + c, n - n_bar)? * sum)
}

/// Tail constant and derivative constants for 𝕋 = 𝕋_{Ψ_α}(φ_β) started at x.
pub fn persistence_report(pair: &WienerHopfPair, tc: &TimeChange, x: f64) -> Result<PersistenceReport> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Invalid(format!("x must be positive, got {x}")));
    }
    pair.require_class_n()?;
    let c = pair.plus.abscissa_a_star();
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Precondition(format!("c_α = a*_φ⁺ = {c} is not a positive finite number")));
    }
    let a_beta = tc.phi_beta.abscissa_a();
    if c >= a_beta {
        return Err(Error::Precondition(format!("c_α = {c} ≥ a_φβ = {a_beta}")));
    }
    let at_pole = pair.plus.eval_real(-c)?;
    if at_pole.abs() > 1e-9 {
        return Err(Error::Precondition(format!("φ⁺(−c_α) = {at_pole} ≠ 0")));
    }
    let beta = tc.beta;
    let derivative = pair.plus.derivative_right(-c, 1e-5 * c.max(1.0))?;
    if !(derivative.is_finite() && derivative > 0.0) {
        return Err(Error::Precondition(format!("φ⁺′(−c_α⁺) = {derivative} is not finite and positive")));
    }
    // E_x[𝕋^{βc}] with the vanishing factor φ⁺(−c) divided out: W_{φ⁺}(−c)φ⁺(−c) = W_{φ⁺}(1 − c)
    let zc = Complex64::new(c, 0.0);
    let chi = gamma_over_w(&tc.phi_beta, -zc)?.re / tc.phi_beta_prime();
    let w_plus = WPhi::new(&pair.plus).eval(Complex64::new(1.0 - c, 0.0))?.re;
    let markov = (pair.alpha * c * x.ln()).exp() * pair.plus.at_zero() * w_plus * gamma_over_w(&pair.minus, zc + 1.0)?.re;
    let limit_constant = chi * markov / (c * derivative);

    let mut notes = Vec::new();
    let smoothness = match smoothness_index(pair, tc) {
        Ok(s) => Some(s),
        Err(e) => {
            notes.push(format!("smoothness index unavailable: {e}"));
            None
        }
    };
    let mut n_bar = None;
    let mut derivative_constants = Vec::new();
    if let Some(s) = smoothness {
        if !s.n_psi.is_finite() {
            notes.push("N_Ψ = ∞: derivative constants are not defined by a finite N̄".into());
        } else {
            let nb = s.n_psi.ceil() as i64 - 2;
            if nb < 0 {
                notes.push(format!("N̄ = {nb} < 0: no derivative constants"));
            } else {
                n_bar = Some(nb);
                let extra = if s.n_phi_beta.is_finite() {
                    let k = s.n_phi_beta.ceil() as i64 - 2;
                    if k >= 2 { k } else { 0 }
                } else {
                    4
                };
                for n in 0..=nb + extra.min(4) {
                    derivative_constants.push((n, derivative_constant(c, nb, n)?));
                }
            }
        }
    }
    Ok(PersistenceReport {
        c_alpha: c,
        beta,
        tail_exponent: beta * c,
        limit_constant,
        plus_derivative: derivative,
        smoothness,
        n_bar,
        derivative_constants,
        notes,
        assumptions: vec![
            "c_α is the unique zero of Ψ_α on its critical line".into(),
            "|Ψ_α′(−c_α⁺)| < ∞".into(),
            "non-lattice condition for the derivative asymptotics".into(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brownian_limits() {
        let pair = WienerHopfPair::brownian();
        let r = persistence_report(&pair, &TimeChange::identity(), 1.0).unwrap();
        assert!((r.c_alpha - 0.5).abs() < 1e-12);
        assert!((r.limit_constant - 0.797_884_560_802_865_4).abs() < 1e-8, "{}", r.limit_constant);
        let r = persistence_report(&pair, &TimeChange::stable(0.5).unwrap(), 1.0).unwrap();
        assert!((r.tail_exponent - 0.25).abs() < 1e-12);
        assert!((r.limit_constant - 1.154_067_477_232_939_4).abs() < 1e-8, "{}", r.limit_constant);
        assert!(r.derivative_constants.is_empty());
        assert_eq!(r.smoothness.unwrap().n_psi, f64::INFINITY);
    }

    #[test]
    fn derivative_constants_small_cases() {
        assert_eq!(derivative_constant(0.5, 0, 0).unwrap(), 1.0);
        assert_eq!(derivative_constant(0.5, 0, 1).unwrap(), 0.0);
        // N̄ = 1, n = 0: (1+c)_{−1} [Γ(2)/Γ(1) − Γ(2)/Γ(2)(1+c)] = −c/c = −1
        let v = derivative_constant(0.5, 1, 0).unwrap();
        assert!((v + 1.0).abs() < 1e-14, "{v}");
    }

    #[test]
    fn smoothness_rules() {
        let pair = WienerHopfPair::brownian();
        let s = smoothness_index(&pair, &TimeChange::stable(0.5).unwrap()).unwrap();
        assert_eq!(s.n_phi_beta, f64::INFINITY);
        let cp = BernsteinFunction::compound_poisson(0.0, 1.0, 3.0, 1.0).unwrap();
        let tc = TimeChange::new(&cp, 1.0).unwrap();
        let s = smoothness_index(&pair, &tc).unwrap();
        assert!((s.n_phi_beta - 3.0).abs() < 1e-12);
        let poisson = WienerHopfPair::poisson_pair(1.0, 0.0, 1.0, 1.0, 0.5).unwrap();
        let tc = TimeChange::new(&BernsteinFunction::compound_poisson(0.0, 1.0, 0.5, 1.0).unwrap(), 1.0).unwrap();
        let s = smoothness_index(&poisson, &tc).unwrap();
        assert!((s.n_psi - 0.25).abs() < 1e-12, "{s:?}");
        assert!((s.n - 0.75).abs() < 1e-12);
        assert_eq!(s.density_class(), None);
    }

    #[test]
    fn preconditions() {
        // c_α = ¼ lies beyond a_φβ = 0.2
        let pair = WienerHopfPair::poisson_pair(1.0, 0.0, 1.0, 1.0, 0.5).unwrap();
        let phi = BernsteinFunction::compound_poisson(0.0, 1.0, 0.5, 0.2).unwrap();
        let tc = TimeChange::new(&phi, 1.0).unwrap();
        let err = persistence_report(&pair, &tc, 1.0).unwrap_err();
        assert!(err.is_precondition(), "{err}");
    }
}
