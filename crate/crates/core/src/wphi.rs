//! W_φ: the positive-definite solution of W(z + 1) = φ(z) W(z), W(1) = 1.
//!
//! Closed forms are used where φ has one (rational, gamma-ratio, power and
//! S-transform forms); anything else goes through the Euler-type product
//! log W(z) ≈ (z − 1) ln φ(n) + Σ_{k<n} [ln φ(k) − ln φ(k + z − 1)]
//! with Romberg extrapolation over dyadic n.

use num_complex::Complex64;

use crate::bernstein::{BernsteinFunction, Form};
use crate::error::{Error, Result};
use crate::special::{gamma, ln_barnes_ratio, ln_gamma, ln_gamma_ratio, ln_gamma_real};

/// Default relative target for the product route.
pub const DEFAULT_TOL: f64 = 1e-8;
const FIRST_CUTOFF: usize = 16;
const MAX_CUTOFF: usize = 1 << 20;

/// Evaluation route for W_φ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Strategy {
    ClosedForm,
    EulerProduct,
}

/// W_φ bound to a Bernstein function, with its evaluation route.
#[derive(Debug, Clone)]
pub struct WPhi<'a> {
    phi: &'a BernsteinFunction,
    strategy: Strategy,
    tol: f64,
}

/// Whether φ has a registered closed form for W_φ.
pub fn has_closed_form(phi: &BernsteinFunction) -> bool {
    match phi.form() {
        Form::Rational { .. } | Form::GammaRatio { .. } | Form::Power { .. } => true,
        Form::STransform(inner) => has_closed_form(inner),
        Form::Rescaled { .. } | Form::Triple(_) => false,
    }
}

impl<'a> WPhi<'a> {
    /// Closed form when registered, Euler product otherwise.
    pub fn new(phi: &'a BernsteinFunction) -> Self {
        let strategy = if has_closed_form(phi) {
            Strategy::ClosedForm
        } else {
            Strategy::EulerProduct
        };
        WPhi {
            phi,
            strategy,
            tol: DEFAULT_TOL,
        }
    }

    /// Always the Euler product.
    pub fn euler(phi: &'a BernsteinFunction, tol: f64) -> Self {
        WPhi {
            phi,
            strategy: Strategy::EulerProduct,
            tol,
        }
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    fn check_domain(&self, z: Complex64) -> Result<()> {
        let a_star = self.phi.abscissa_a_star();
        if !(z.re > -a_star) {
            return Err(Error::Domain(format!(
                "W_φ for φ = {} needs Re z > −a*_φ = {}, got {z}",
                self.phi,
                -a_star
            )));
        }
        Ok(())
    }

    /// ln W_φ(z) on some branch (exponentiates to W).
    pub fn ln_eval(&self, z: Complex64) -> Result<Complex64> {
        self.check_domain(z)?;
        match self.strategy {
            Strategy::ClosedForm => ln_closed_form(self.phi, z),
            Strategy::EulerProduct => ln_euler(self.phi, z, self.tol),
        }
    }

    /// W_φ(z) for Re z > −a*_φ.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.ln_eval(z)?.exp())
    }

    /// |W(z + 1) − φ(z) W(z)| / max(|W(z + 1)|, ε).
    pub fn residual(&self, z: Complex64) -> Result<f64> {
        let next = self.eval(z + 1.0)?;
        let here = self.eval(z)?;
        let phi = self.phi.eval(z)?;
        Ok((next - phi * here).norm() / next.norm().max(f64::MIN_POSITIVE))
    }
}

/// W_φ(z) with the default route.
pub fn w_phi(phi: &BernsteinFunction, z: Complex64) -> Result<Complex64> {
    WPhi::new(phi).eval(z)
}

/// ln W_φ(z) with the default route.
pub fn ln_w_phi(phi: &BernsteinFunction, z: Complex64) -> Result<Complex64> {
    WPhi::new(phi).ln_eval(z)
}

/// ln W_φ(n + 1) = Σ_{k=1}^n ln φ(k).
pub fn ln_w_phi_integer(phi: &BernsteinFunction, n: u64) -> Result<f64> {
    let mut acc = 0.0;
    for k in 1..=n {
        let v = phi.eval_real(k as f64)?;
        if !(v > 0.0) {
            return Err(Error::Domain(format!("φ({k}) = {v} is not positive")));
        }
        acc += v.ln();
    }
    Ok(acc)
}

/// W_φ(n + 1) = ∏_{k=1}^n φ(k); overflow is reported, use [`ln_w_phi_integer`] then.
pub fn w_phi_integer(phi: &BernsteinFunction, n: u64) -> Result<f64> {
    let mut acc = 1.0;
    for k in 1..=n {
        acc *= phi.eval_real(k as f64)?;
    }
    if !acc.is_finite() {
        return Err(Error::Domain(format!(
            "W_φ({}) overflows (ln W = {}); use the log form",
            n + 1,
            ln_w_phi_integer(phi, n)?
        )));
    }
    Ok(acc)
}

/// Functional-equation residual with the default route.
pub fn residual(phi: &BernsteinFunction, z: Complex64) -> Result<f64> {
    WPhi::new(phi).residual(z)
}

/// Γ(s)/W_φ(s), shifting with Γ(s)/W(s) = (φ(s)/s) Γ(s + 1)/W(s + 1) until Re s ≥ ½;
/// the removable singularity at s = 0 when φ(0) = 0 is handled by φ(s)/s → φ′(0⁺).
pub fn gamma_over_w(phi: &BernsteinFunction, s: Complex64) -> Result<Complex64> {
    let w = WPhi::new(phi);
    let mut factor = Complex64::new(1.0, 0.0);
    let mut s = s;
    while s.re < 0.5 {
        factor *= phi.phi_over_u(s)?;
        s += 1.0;
    }
    Ok(factor * (ln_gamma(s)? - w.ln_eval(s)?).exp())
}

fn ln_closed_form(phi: &BernsteinFunction, z: Complex64) -> Result<Complex64> {
    match phi.form() {
        Form::Rational { c, zeros, poles } => {
            // c^{z−1} ∏ Γ(z + p)/Γ(1 + p) ∏ Γ(1 + q)/Γ(z + q)
            let mut acc = (z - 1.0) * c.ln();
            for p in zeros {
                acc += ln_gamma(z + p)? - ln_gamma_real(1.0 + p)?.0;
            }
            for q in poles {
                acc += ln_gamma_real(1.0 + q)?.0 - ln_gamma(z + q)?;
            }
            Ok(acc)
        }
        Form::GammaRatio { scale, num, den } => {
            let tau = 1.0 / scale;
            let (a, b) = (num / scale, den / scale);
            if *den == 0.0 && (num - scale).abs() < 1e-15 {
                // Γ(z)Γ(1 + sz)/(Γ(1 + s)Γ(1 + z))
                return Ok(ln_gamma(z)? + ln_gamma(z * *scale + 1.0)?
                    - ln_gamma_real(1.0 + scale)?.0
                    - ln_gamma(z + 1.0)?);
            }
            Ok(ln_barnes_ratio(z, a, b, tau)? - ln_barnes_ratio(Complex64::new(1.0, 0.0), a, b, tau)?)
        }
        Form::Power { c, gamma } => Ok((z - 1.0) * c.ln() + ln_gamma(z)? * *gamma),
        Form::STransform(inner) => Ok(ln_closed_form(inner, z)? - z.ln()),
        Form::Rescaled { .. } | Form::Triple(_) => Err(Error::Invalid(format!(
            "no closed form registered for W_φ with φ = {phi}"
        ))),
    }
}

/// W_φ(z) by the stable-subordinator Barnes route even when a simpler closed
/// form exists; kept for dual-route checks.
pub fn ln_w_gamma_ratio_barnes(phi: &BernsteinFunction, z: Complex64) -> Result<Complex64> {
    match phi.form() {
        Form::GammaRatio { scale, num, den } => {
            let tau = 1.0 / scale;
            let (a, b) = (num / scale, den / scale);
            Ok(ln_barnes_ratio(z, a, b, tau)? - ln_barnes_ratio(Complex64::new(1.0, 0.0), a, b, tau)?)
        }
        _ => Err(Error::Invalid("Barnes route needs a gamma-ratio φ".into())),
    }
}

fn ln_phi(phi: &BernsteinFunction, u: Complex64) -> Result<Complex64> {
    // forms whose logarithm cancels badly at large u
    match phi.form() {
        Form::GammaRatio { scale, num, den } if u.norm() * scale >= 30.0 && u.re > 0.0 => {
            return ln_gamma_ratio(u * *scale, *num, *den);
        }
        Form::STransform(inner) if u.re > 0.0 && u.norm() > 1.0 => {
            return Ok(ln_phi(inner, u)? - (1.0 / u).ln_1p_complex());
        }
        Form::Rescaled { inner, factor } => return ln_phi(inner, u * *factor),
        _ => {}
    }
    let v = phi.eval(u)?;
    if v.norm() == 0.0 {
        return Err(Error::Pole { what: "W_φ (zero of φ)", z: u });
    }
    Ok(v.ln())
}

trait Ln1p {
    fn ln_1p_complex(self) -> Complex64;
}

impl Ln1p for Complex64 {
    /// ln(1 + w) without cancellation for small |w|.
    fn ln_1p_complex(self) -> Complex64 {
        if self.norm() > 0.5 {
            return (self + 1.0).ln();
        }
        let re = (self.re.ln_1p() * 2.0 + (self.im * self.im / ((1.0 + self.re) * (1.0 + self.re))).ln_1p()) * 0.5;
        Complex64::new(re, self.im.atan2(1.0 + self.re))
    }
}

fn ln_euler(phi: &BernsteinFunction, z: Complex64, tol: f64) -> Result<Complex64> {
    let zm1 = z - 1.0;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut k = 1usize;
    let mut n = FIRST_CUTOFF;
    // smallest n at which the 1/n expansion is trusted
    let settled = (4.0 * z.norm()).max(FIRST_CUTOFF as f64);
    let mut prev_row: Vec<Complex64> = Vec::new();
    let mut prev_best: Option<Complex64> = None;
    loop {
        while k < n {
            let kf = k as f64;
            sum += ln_phi(phi, Complex64::new(kf, 0.0))? - ln_phi(phi, zm1 + kf)?;
            k += 1;
        }
        let est = zm1 * ln_phi(phi, Complex64::new(n as f64, 0.0))? + sum;
        let mut row = vec![est];
        for j in 1..=prev_row.len() {
            let denom = (1u64 << j) as f64 - 1.0;
            let r = row[j - 1] + (row[j - 1] - prev_row[j - 1]) / denom;
            row.push(r);
        }
        let best = *row.last().expect("row");
        if let Some(pb) = prev_best {
            if (n as f64) >= settled && (best - pb).norm() <= tol {
                return Ok(best);
            }
        }
        if n >= MAX_CUTOFF {
            return Err(Error::NonConvergence {
                what: format!("Euler product for W_φ, φ = {phi}, z = {z}"),
                last: best.exp(),
                previous: prev_best.unwrap_or(best).exp(),
            });
        }
        prev_best = Some(best);
        prev_row = row;
        n *= 2;
    }
}

/// Γ(z), re-exported for callers that compare against φ(u) = u.
pub fn gamma_reference(z: Complex64) -> Result<Complex64> {
    gamma(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::WienerHopfPair;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn integer_products() {
        assert_eq!(w_phi_integer(&BernsteinFunction::identity(), 4).unwrap(), 24.0);
        let aff = BernsteinFunction::affine(2.0, 0.5).unwrap();
        assert_eq!(w_phi_integer(&aff, 2).unwrap(), 15.0);
        assert!(w_phi_integer(&BernsteinFunction::identity(), 400).is_err());
        assert!(ln_w_phi_integer(&BernsteinFunction::identity(), 400).unwrap().is_finite());
    }

    #[test]
    fn euler_product_reproduces_gamma() {
        let id = BernsteinFunction::identity();
        let w = WPhi::euler(&id, 1e-10);
        let got = w.eval(c(1.5, 0.0)).unwrap();
        assert!((got.re - 0.886_226_925_452_758).abs() < 1e-9);
        for z in [c(0.5, 5.0), c(3.0, -4.0), c(1.2, 0.3)] {
            let want = gamma(z).unwrap();
            let got = w.eval(z).unwrap();
            assert!((got - want).norm() <= 1e-8 * want.norm(), "{z}: {got} vs {want}");
        }
    }

    #[test]
    fn affine_closed_form() {
        let phi = BernsteinFunction::affine(1.0, 1.0).unwrap();
        let got = w_phi(&phi, c(2.5, 0.0)).unwrap();
        assert!((got.re - 3.323_350_970_447_843).abs() < 1e-13);
    }

    #[test]
    fn stable_subordinator_closed_form_against_barnes() {
        for beta in [0.3, 0.5, 0.8] {
            let phi = BernsteinFunction::stable_subordinator(beta).unwrap().rescale(beta).unwrap();
            for z in [c(0.4, 0.0), c(1.7, 2.0), c(2.2, -0.5)] {
                let closed = w_phi(&phi, z).unwrap();
                let barnes = ln_w_gamma_ratio_barnes(&phi, z).unwrap().exp();
                assert!((closed - barnes).norm() < 1e-10 * closed.norm(), "{closed} vs {barnes}");
                assert!(residual(&phi, z).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn stable_example_minus_factor() {
        let p = WienerHopfPair::stable_example(1.5, 0.4, 0.6).unwrap();
        let w = WPhi::new(&p.minus);
        assert_eq!(w.strategy(), Strategy::ClosedForm);
        // W(2) = φ⁻(1) = Γ(1.9)/Γ(1)
        let got = w.eval(c(2.0, 0.0)).unwrap();
        let want = crate::special::gamma_real(1.9).unwrap();
        assert!((got.re - want).abs() < 1e-12, "{got}");
        assert!(w.residual(c(0.7, 0.0)).unwrap() < 1e-8);
        let euler = WPhi::euler(&p.minus, 1e-11).eval(c(0.7, 0.4)).unwrap();
        let closed = w.eval(c(0.7, 0.4)).unwrap();
        assert!((euler - closed).norm() < 1e-9 * closed.norm());
    }

    #[test]
    fn s_transform_identity() {
        // W_S(u) · u = W_φ(u) for φ(u) = 1 + u
        let phi = BernsteinFunction::affine(1.0, 1.0).unwrap();
        let s = phi.s_transform().unwrap();
        let euler = WPhi::euler(&s, 1e-11).eval(c(2.5, 0.0)).unwrap();
        let want = 3.323_350_970_447_843;
        assert!((euler.re * 2.5 - want).abs() < 1e-9);
    }

    #[test]
    fn domain_rejected() {
        let phi = BernsteinFunction::affine(1.0, 0.5).unwrap();
        assert!(w_phi(&phi, c(-0.6, 0.0)).is_err());
        assert!(w_phi(&phi, c(-0.4, 0.0)).is_ok());
    }

    #[test]
    fn gamma_over_w_near_zero() {
        // φ(u) = u: Γ(s)/W(s) = 1
        let id = BernsteinFunction::identity();
        for s in [c(0.0, 0.0), c(-0.7, 0.0), c(0.2, 1.0)] {
            let v = gamma_over_w(&id, s).unwrap();
            assert!((v - 1.0).norm() < 1e-13, "{s}: {v}");
        }
    }

    #[test]
    fn triple_form_uses_euler_product() {
        let cp = BernsteinFunction::compound_poisson(0.5, 1.0, 1.0, 2.0).unwrap();
        let t = BernsteinFunction::from_triple(cp.triple().unwrap()).unwrap();
        let w = WPhi::new(&t);
        assert_eq!(w.strategy(), Strategy::EulerProduct);
        let z = c(1.6, 0.8);
        let got = w.eval(z).unwrap();
        let want = w_phi(&cp, z).unwrap();
        assert!((got - want).norm() < 1e-7 * want.norm(), "{got} vs {want}");
    }
}
