//! Wiener–Hopf pairs Ψ_α(z) = −φ⁻(z) φ⁺(−z) and the Lévy process αY behind them.

use num_complex::Complex64;

use super::triple::{LevyDensity, LevyMeasure, LevyTriple};
use super::BernsteinFunction;
use crate::error::{Error, Result};
use crate::special::gamma_real;

/// Ascending and descending ladder exponents of αY, with the index α.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerHopfPair {
    pub minus: BernsteinFunction,
    pub plus: BernsteinFunction,
    pub alpha: f64,
    pub label: String,
    /// Lévy triple of L = αY, when known; used by the path simulator.
    pub levy: Option<LevyTriple>,
}

impl WienerHopfPair {
    pub fn new(minus: BernsteinFunction, plus: BernsteinFunction, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Invalid(format!("α must be positive, got {alpha}")));
        }
        let label = format!("φ⁻ = {minus}, φ⁺ = {plus}");
        Ok(WienerHopfPair {
            minus,
            plus,
            alpha,
            label,
            levy: None,
        })
    }

    pub fn with_levy(mut self, levy: LevyTriple) -> Self {
        self.levy = Some(levy);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Ψ_α(z) = −φ⁻(z) φ⁺(−z).
    pub fn psi(&self, z: Complex64) -> Result<Complex64> {
        Ok(-self.minus.eval(z)? * self.plus.eval(-z)?)
    }

    /// Class 𝒩: φ⁺(0) > 0, so that T is a.s. finite.
    pub fn in_class_n(&self) -> bool {
        self.plus.at_zero() > 0.0
    }

    pub fn require_class_n(&self) -> Result<()> {
        if self.in_class_n() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "pair not in class N: φ⁺(0) = {} (T is infinite)",
                self.plus.at_zero()
            )))
        }
    }

    /// Brownian motion absorbed at 0: φ⁻(u) = u, φ⁺(u) = 1 + 2u, α = 2, L = 2B − t.
    pub fn brownian() -> Self {
        let minus = BernsteinFunction::identity();
        let plus = BernsteinFunction::affine(2.0, 0.5).expect("affine");
        let levy = LevyTriple {
            sigma2: 2.0,
            linear: -1.0,
            ..Default::default()
        };
        WienerHopfPair::new(minus, plus, 2.0)
            .expect("pair")
            .with_levy(levy)
            .with_label("brownian")
    }

    /// |Z|^{1/b} for an 𝔞-stable Z with positivity ρ killed below 0; α = 𝔞b.
    pub fn stable_example(a: f64, rho: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 2.0) || !(rho > 0.0 && rho < 1.0) || !(b > 0.0) {
            return Err(Error::Invalid(format!(
                "stable example needs 0 < 𝔞 ≤ 2, 0 < ρ < 1, b > 0; got 𝔞={a}, ρ={rho}, b={b}"
            )));
        }
        if b > 1.0 - rho + 1e-12 {
            return Err(Error::Invalid(format!("stable example needs b ≤ 1 − ρ, got b={b}, ρ={rho}")));
        }
        let rho_hat = 1.0 - rho;
        if a * rho > 1.0 + 1e-12 || a * rho_hat > 1.0 + 1e-12 {
            return Err(Error::Invalid(format!(
                "inadmissible (𝔞, ρ) = ({a}, {rho}): need 𝔞ρ ≤ 1 and 𝔞(1−ρ) ≤ 1"
            )));
        }
        let alpha = a * b;
        let minus = BernsteinFunction::gamma_ratio(alpha, 1.0, (1.0 - a * rho_hat).max(0.0))?
            .assert_minus(true);
        let plus = BernsteinFunction::gamma_ratio(alpha, a, a * rho_hat)?;
        let pair = WienerHopfPair::new(minus, plus, alpha)?
            .with_label(format!("stable_example(a={a}, rho={rho}, b={b})"));
        let levy = stable_example_levy(&pair, a, rho)?;
        Ok(pair.with_levy(levy))
    }

    /// φ⁻(u) = d(u + b), φ⁺(u) = κ + λu/(u + θ): compound Poisson upward jumps.
    pub fn poisson_pair(d: f64, b: f64, killing: f64, rate: f64, decay: f64) -> Result<Self> {
        if !(killing > 0.0) {
            return Err(Error::Invalid("poisson pair needs κ = φ⁺(0) > 0".into()));
        }
        let minus = BernsteinFunction::affine(d, b)?;
        let plus = BernsteinFunction::compound_poisson(killing, 0.0, rate, decay)?;
        let jump_rate = d * rate * (decay + b);
        let density = LevyDensity::ExpMixture(vec![(jump_rate, decay)]);
        let small = density.moment_between(1, 0.0, 1.0)?;
        let levy = LevyTriple {
            killing: d * b * killing,
            linear: -d * (killing + rate) + small,
            measure: LevyMeasure {
                positive: Some(density),
                ..Default::default()
            },
            ..Default::default()
        };
        Ok(WienerHopfPair::new(minus, plus, 1.0)?
            .with_levy(levy)
            .with_label(format!("poisson_pair(d={d}, b={b}, kappa={killing}, lambda={rate}, theta={decay})")))
    }

    /// Lévy triple of L, required for simulation.
    pub fn levy_triple(&self) -> Result<&LevyTriple> {
        self.levy
            .as_ref()
            .ok_or_else(|| Error::Precondition(format!("no Lévy triple known for {}", self.label)))
    }
}

/// Lévy–Khintchine triple of the process with exponent Ψ_α: α times a
/// Lamperti-stable process killed at rate c₋/𝔞.
fn stable_example_levy(pair: &WienerHopfPair, a: f64, rho: f64) -> Result<LevyTriple> {
    use std::f64::consts::PI;
    let alpha = pair.alpha;
    let g = gamma_real(1.0 + a)?;
    let c_up = g * (PI * a * rho).sin() / PI;
    let c_down = (g * (PI * a * (1.0 - rho)).sin() / PI).max(0.0);
    let killing = c_down / a;
    let up = LevyDensity::Scaled {
        base: Box::new(LevyDensity::LampertiUp { c: c_up, index: a }),
        factor: alpha,
    };
    let down = (c_down > 1e-15).then(|| LevyDensity::Scaled {
        base: Box::new(LevyDensity::LampertiDown { c: c_down, index: a }),
        factor: alpha,
    });
    let mut levy = LevyTriple {
        killing,
        measure: LevyMeasure {
            positive: Some(up),
            negative: down,
            atoms: vec![],
        },
        ..Default::default()
    };
    // match Ψ_α at one interior point to fix the linear coefficient
    let z0 = Complex64::new(0.5 / alpha.max(1.0), 0.0);
    let target = pair.psi(z0)?;
    let rest = levy.levy_khintchine(z0)?;
    levy.linear = ((target - rest) / z0).re;
    Ok(levy)
}
