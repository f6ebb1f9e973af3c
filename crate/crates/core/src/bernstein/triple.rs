//! Lévy characteristics of subordinators and of two-sided Lévy processes.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_complex, integrate_complex_to_infinity, integrate_to_infinity};
use crate::special::{gamma_real, rgamma_real};

const QUAD_TOL: f64 = 1e-12;

/// A Lévy density on (0, ∞). Negative jumps are stored by magnitude.
#[derive(Debug, Clone, PartialEq)]
pub enum LevyDensity {
    /// Σ w_j q_j e^{−q_j y}, pairs are (mass w_j, rate q_j).
    ExpMixture(Vec<(f64, f64)>),
    /// δ/(s Γ(1−δ)) · e^{−A y/s} (1 − e^{−y/s})^{−δ−1}, the jumps of Γ(su+A)/Γ(su+A−δ).
    GammaRatio { scale: f64, num: f64, delta: f64 },
    /// c γ/Γ(1−γ) · y^{−1−γ}, the jumps of c u^γ.
    Power { c: f64, gamma: f64 },
    /// c e^y/(e^y − 1)^{a+1}: upward jumps of a Lamperti-stable process.
    LampertiUp { c: f64, index: f64 },
    /// c e^{−y}/(1 − e^{−y})^{a+1}: downward jump magnitudes of a Lamperti-stable process.
    LampertiDown { c: f64, index: f64 },
    /// v(y/k)/k, the image of `base` under y ↦ k y.
    Scaled { base: Box<LevyDensity>, factor: f64 },
    /// Jumps of S_φ(u) = u φ(u)/(u + 1) given the density of φ and φ(0) − d.
    STransform {
        base: Option<Box<LevyDensity>>,
        killing_minus_drift: f64,
    },
}

fn tail_numeric(v: &LevyDensity, y: f64) -> Result<f64> {
    integrate_to_infinity(|r| v.density(r), y, QUAD_TOL)
}

impl LevyDensity {
    /// v(y) for y > 0.
    pub fn density(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match self {
            LevyDensity::ExpMixture(terms) => terms.iter().map(|(w, q)| w * q * (-q * y).exp()).sum(),
            LevyDensity::GammaRatio { scale, num, delta } => {
                let x = y / scale;
                delta * rgamma_real(1.0 - delta) / scale
                    * (-num * x).exp()
                    * (-(-x).exp_m1()).powf(-delta - 1.0)
            }
            LevyDensity::Power { c, gamma } => {
                c * gamma * rgamma_real(1.0 - gamma) * y.powf(-1.0 - gamma)
            }
            LevyDensity::LampertiUp { c, index } => {
                // e^y/(e^y−1)^{a+1} = e^{−a y}/(1 − e^{−y})^{a+1}
                c * (-index * y).exp() * (-(-y).exp_m1()).powf(-index - 1.0)
            }
            LevyDensity::LampertiDown { c, index } => {
                c * (-y).exp() * (-(-y).exp_m1()).powf(-index - 1.0)
            }
            LevyDensity::Scaled { base, factor } => base.density(y / factor) / factor,
            LevyDensity::STransform { base, .. } => {
                // −d/dy of the tail: tail + v
                let tail = self.tail(y).unwrap_or(f64::NAN);
                tail + base.as_ref().map_or(0.0, |b| b.density(y))
            }
        }
    }

    /// Tail mass ϑ(y, ∞).
    pub fn tail(&self, y: f64) -> Result<f64> {
        if y <= 0.0 {
            return Ok(self.total_mass());
        }
        match self {
            LevyDensity::ExpMixture(terms) => Ok(terms.iter().map(|(w, q)| w * (-q * y).exp()).sum()),
            LevyDensity::Power { c, gamma } => Ok(c * rgamma_real(1.0 - gamma) * y.powf(-gamma)),
            LevyDensity::LampertiUp { c, index } => Ok(c * y.exp_m1().powf(-index) / index),
            LevyDensity::LampertiDown { c, index } => {
                Ok(c * ((-(-y).exp_m1()).powf(-index) - 1.0) / index)
            }
            LevyDensity::Scaled { base, factor } => base.tail(y / factor),
            LevyDensity::STransform {
                base,
                killing_minus_drift,
            } => {
                let bracket = match base {
                    Some(b) => s_bracket(b, y)?,
                    None => 0.0,
                };
                Ok((-y).exp() * (killing_minus_drift + bracket))
            }
            LevyDensity::GammaRatio { .. } => tail_numeric(self, y),
        }
    }

    /// ϑ(0, ∞), possibly infinite.
    pub fn total_mass(&self) -> f64 {
        match self {
            LevyDensity::ExpMixture(terms) => terms.iter().map(|(w, _)| w).sum(),
            LevyDensity::GammaRatio { .. }
            | LevyDensity::Power { .. }
            | LevyDensity::LampertiUp { .. } => f64::INFINITY,
            LevyDensity::LampertiDown { .. } => f64::INFINITY,
            LevyDensity::Scaled { base, .. } => base.total_mass(),
            LevyDensity::STransform {
                base,
                killing_minus_drift,
            } => killing_minus_drift + base.as_ref().map_or(0.0, |b| b.total_mass()),
        }
    }

    /// v(0⁺), possibly infinite.
    pub fn density_at_zero(&self) -> f64 {
        match self {
            LevyDensity::ExpMixture(terms) => terms.iter().map(|(w, q)| w * q).sum(),
            LevyDensity::Scaled { base, factor } => base.density_at_zero() / factor,
            LevyDensity::STransform {
                base,
                killing_minus_drift,
            } => {
                killing_minus_drift
                    + base
                        .as_ref()
                        .map_or(0.0, |b| b.density_at_zero() + b.total_mass())
            }
            _ => f64::INFINITY,
        }
    }

    /// sup{u ≥ 0 : ∫_1^∞ e^{u y} v(y) dy < ∞}.
    pub fn exponential_abscissa(&self) -> f64 {
        match self {
            LevyDensity::ExpMixture(terms) => terms
                .iter()
                .filter(|(w, _)| *w != 0.0)
                .map(|(_, q)| *q)
                .fold(f64::INFINITY, f64::min),
            LevyDensity::GammaRatio { scale, num, .. } => num / scale,
            LevyDensity::Power { .. } => 0.0,
            LevyDensity::LampertiUp { index, .. } => *index,
            LevyDensity::LampertiDown { .. } => f64::INFINITY,
            LevyDensity::Scaled { base, factor } => base.exponential_abscissa() / factor,
            LevyDensity::STransform { base, .. } => {
                base.as_ref().map_or(1.0, |b| b.exponential_abscissa().min(1.0))
            }
        }
    }

    /// ∫ y v(y) dy, possibly infinite.
    pub fn first_moment(&self) -> Result<f64> {
        match self {
            LevyDensity::ExpMixture(terms) => Ok(terms.iter().map(|(w, q)| w / q).sum()),
            LevyDensity::Power { .. } => Ok(f64::INFINITY),
            LevyDensity::Scaled { base, factor } => Ok(base.first_moment()? * factor),
            _ => {
                if self.exponential_abscissa() <= 0.0 {
                    return Ok(f64::INFINITY);
                }
                let head = self.moment_between(1, 0.0, 1.0)?;
                let tail = integrate_to_infinity(|y| y * self.density(y), 1.0, QUAD_TOL)?;
                Ok(head + tail)
            }
        }
    }

    /// ∫_lo^hi y^k v(y) dy.
    pub fn moment_between(&self, k: i32, lo: f64, hi: f64) -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        if let LevyDensity::Scaled { base, factor } = self {
            return Ok(base.moment_between(k, lo / factor, hi / factor)? * factor.powi(k));
        }
        integrate(|y| y.powi(k) * self.density(y), lo, hi, QUAD_TOL)
    }
}

/// ϑ(y, ∞) − ∫_0^y v(r)(e^r − 1) dr; the S-transform tail is e^{−y}((κ − d) + this).
fn s_bracket(base: &LevyDensity, y: f64) -> Result<f64> {
    let spent = match base {
        LevyDensity::ExpMixture(terms) => terms
            .iter()
            .map(|(w, q)| {
                let grow = if (q - 1.0).abs() < 1e-12 {
                    y
                } else {
                    ((1.0 - q) * y).exp_m1() / (1.0 - q)
                };
                w * q * (grow + (-q * y).exp_m1() / q)
            })
            .sum(),
        _ => integrate(|r| base.density(r) * r.exp_m1(), 0.0, y, QUAD_TOL)?,
    };
    Ok(base.tail(y)? - spent)
}

/// Positive, negative and atomic parts of a Lévy measure.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LevyMeasure {
    pub positive: Option<LevyDensity>,
    pub negative: Option<LevyDensity>,
    /// Signed jump locations with their masses.
    pub atoms: Vec<(f64, f64)>,
}

/// Drift, killing and jump structure of a subordinator (Lévy–Khintchine for
/// Laplace exponents) or of a two-sided Lévy process.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LevyTriple {
    /// Linear coefficient d of a subordinator.
    pub drift: f64,
    /// Killing rate: φ(0), or −Ψ(0) for a two-sided process.
    pub killing: f64,
    pub measure: LevyMeasure,
    /// Gaussian coefficient in Ψ(z) = σ² z² + a z + …
    pub sigma2: f64,
    /// Linear coefficient a of a two-sided exponent.
    pub linear: f64,
}

fn one_minus_exp(w: Complex64) -> Complex64 {
    if w.norm() < 1e-3 {
        // 1 − e^{−w}
        w * (1.0 - w * (0.5 - w / 6.0 * (1.0 - w * 0.25)))
    } else {
        1.0 - (-w).exp()
    }
}

fn complex_integral<F: Fn(f64) -> Complex64>(f: F, lo: f64, hi: Option<f64>) -> Result<Complex64> {
    match hi {
        Some(h) => integrate_complex(f, lo, h, QUAD_TOL),
        None => integrate_complex_to_infinity(f, lo, QUAD_TOL),
    }
}

impl LevyTriple {
    /// Subordinator triple.
    pub fn subordinator(drift: f64, killing: f64, density: Option<LevyDensity>) -> Self {
        LevyTriple {
            drift,
            killing,
            measure: LevyMeasure {
                positive: density,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    pub fn is_subordinator(&self) -> bool {
        self.measure.negative.is_none()
            && self.sigma2 == 0.0
            && self.linear == 0.0
            && self.measure.atoms.iter().all(|(y, _)| *y > 0.0)
    }

    /// ϑ(x, ∞) for the upward part.
    pub fn tail_mass(&self, x: f64) -> Result<f64> {
        let dens = match &self.measure.positive {
            Some(v) => v.tail(x)?,
            None => 0.0,
        };
        let atoms: f64 = self
            .measure
            .atoms
            .iter()
            .filter(|(y, _)| *y > x)
            .map(|(_, m)| m)
            .sum();
        Ok(dens + atoms)
    }

    /// ϑ(0, ∞) for the upward part.
    pub fn total_mass(&self) -> f64 {
        self.measure.positive.as_ref().map_or(0.0, |v| v.total_mass())
            + self
                .measure
                .atoms
                .iter()
                .filter(|(y, _)| *y > 0.0)
                .map(|(_, m)| m)
                .sum::<f64>()
    }

    /// v(0⁺) for the upward part.
    pub fn density_at_zero(&self) -> f64 {
        self.measure.positive.as_ref().map_or(0.0, |v| v.density_at_zero())
    }

    /// d + ∫ y ϑ(dy).
    pub fn mean(&self) -> Result<f64> {
        let jumps = match &self.measure.positive {
            Some(v) => v.first_moment()?,
            None => 0.0,
        };
        let atoms: f64 = self.measure.atoms.iter().map(|(y, m)| y * m).sum();
        Ok(self.drift + jumps + atoms)
    }

    /// Checks sign constraints and ∫(1 ∧ y) ϑ(dy) < ∞ (∫(1 ∧ y²) Π(dy) for two-sided triples).
    pub fn validate(&self) -> Result<()> {
        if self.drift < 0.0 || self.killing < 0.0 || self.sigma2 < 0.0 {
            return Err(Error::Invalid(
                "drift, killing and sigma2 must be nonnegative".into(),
            ));
        }
        let power = if self.is_subordinator() { 1 } else { 2 };
        for v in [&self.measure.positive, &self.measure.negative].into_iter().flatten() {
            // dyadic scan of the small-jump integral
            let mut acc = 0.0;
            let mut hi = 1.0;
            for _ in 0..40 {
                let lo = hi / 2.0;
                let piece = v.moment_between(power, lo, hi)?;
                if !piece.is_finite() || piece < 0.0 {
                    return Err(Error::Invalid("Lévy density is not integrable near 0".into()));
                }
                acc += piece;
                hi = lo;
            }
            let last = v.moment_between(power, hi / 2.0, hi)?;
            if last > 1e-6 * acc.max(1e-300) && last > 1e-12 {
                return Err(Error::Invalid(format!(
                    "∫(1 ∧ y^{power}) of the Lévy density diverges at 0"
                )));
            }
            let big = v.tail(1.0)?;
            if !big.is_finite() {
                return Err(Error::Invalid("Lévy density has infinite mass away from 0".into()));
            }
        }
        Ok(())
    }

    /// d u + φ(0) + ∫(1 − e^{−u y}) ϑ(dy), by quadrature.
    pub fn laplace_exponent(&self, u: Complex64) -> Result<Complex64> {
        let mut acc = u * self.drift + self.killing;
        for (y, m) in &self.measure.atoms {
            acc += one_minus_exp(u * *y) * *m;
        }
        if let Some(v) = &self.measure.positive {
            let f = |y: f64| one_minus_exp(u * y) * v.density(y);
            acc += complex_integral(f, 0.0, Some(1.0))?;
            acc += complex_integral(f, 1.0, None)?;
        }
        Ok(acc)
    }

    /// Jump part ∫(e^{zy} − 1 − z y 1_{|y|<1}) Π(dy) of a two-sided exponent.
    pub fn jump_part(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (sign, side) in [(1.0, &self.measure.positive), (-1.0, &self.measure.negative)] {
            if let Some(v) = side {
                let near = |y: f64| {
                    let w = z * (sign * y);
                    // e^w − 1 − w
                    let g = if w.norm() < 1e-3 {
                        w * w * (0.5 + w / 6.0 * (1.0 + w * 0.25))
                    } else {
                        w.exp() - 1.0 - w
                    };
                    g * v.density(y)
                };
                acc += complex_integral(near, 0.0, Some(1.0))?;
                let far = |y: f64| ((z * (sign * y)).exp() - 1.0) * v.density(y);
                acc += complex_integral(far, 1.0, None)?;
            }
        }
        for (y, m) in &self.measure.atoms {
            let w = z * *y;
            let comp = if y.abs() < 1.0 { w } else { Complex64::new(0.0, 0.0) };
            acc += (w.exp() - 1.0 - comp) * *m;
        }
        Ok(acc)
    }

    /// Ψ(z) = σ² z² + a z + ∫(e^{zy} − 1 − z y 1_{|y|<1}) Π(dy) − q.
    pub fn levy_khintchine(&self, z: Complex64) -> Result<Complex64> {
        Ok(z * z * self.sigma2 + z * self.linear + self.jump_part(z)? - self.killing)
    }
}

/// Γ(A)/Γ(B), zero when B is a pole of Γ.
pub fn gamma_ratio_killing(num: f64, den: f64) -> f64 {
    gamma_real(num).unwrap_or(f64::INFINITY) * rgamma_real(den)
}
