//! Bernstein functions, their Lévy triples, and Wiener–Hopf pairs.

pub mod membership;
pub mod pair;
pub mod triple;

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{digamma, gamma_real, ln_gamma, ln_gamma_real, rgamma_real};

pub use membership::{membership, Membership};
pub use pair::WienerHopfPair;
pub use triple::{LevyDensity, LevyMeasure, LevyTriple};

const POLE_EPS: f64 = 1e-12;

fn near_pole(x: f64) -> bool {
    x <= POLE_EPS && (x - x.round()).abs() < POLE_EPS
}

/// How φ is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum Form {
    /// c ∏(u + p_i) / ∏(u + q_j) with interlacing 0 ≤ p_1 < q_1 < p_2 < …
    Rational {
        c: f64,
        zeros: Vec<f64>,
        poles: Vec<f64>,
    },
    /// Γ(s u + A)/Γ(s u + B) with 0 < A − B < 1, B ≥ 0.
    GammaRatio { scale: f64, num: f64, den: f64 },
    /// c u^γ, 0 < γ < 1.
    Power { c: f64, gamma: f64 },
    /// u φ(u)/(u + 1).
    STransform(Box<BernsteinFunction>),
    /// φ(k u).
    Rescaled {
        inner: Box<BernsteinFunction>,
        factor: f64,
    },
    /// Lévy–Khintchine integral of a triple.
    Triple(LevyTriple),
}

/// An evaluable Bernstein function with its abscissas and characteristics.
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinFunction {
    form: Form,
    label: String,
    a: f64,
    a_star: f64,
    at_zero: f64,
    at_infinity: f64,
    derivative_at_zero: f64,
    drift: f64,
    minus_asserted: Option<bool>,
}

impl fmt::Display for BernsteinFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

impl BernsteinFunction {
    /// c ∏(u + p_i)/∏(u + q_j); zeros and poles must interlace starting with a zero.
    pub fn rational(c: f64, mut zeros: Vec<f64>, mut poles: Vec<f64>) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Invalid(format!("rational Bernstein function needs c > 0, got {c}")));
        }
        zeros.sort_by(f64::total_cmp);
        poles.sort_by(f64::total_cmp);
        if zeros.is_empty() && poles.is_empty() {
            return Err(Error::Invalid("constant Bernstein function rejected".into()));
        }
        if zeros.len() != poles.len() && zeros.len() != poles.len() + 1 {
            return Err(Error::Invalid("zeros and poles do not interlace".into()));
        }
        if zeros.iter().any(|p| !(*p >= 0.0 && p.is_finite())) || poles.iter().any(|q| !(*q > 0.0)) {
            return Err(Error::Invalid("zeros must be ≥ 0 and poles > 0".into()));
        }
        for (j, q) in poles.iter().enumerate() {
            let below = zeros[j] < *q;
            let above = zeros.get(j + 1).is_none_or(|p| q < p);
            if !(below && above) {
                return Err(Error::Invalid("zeros and poles do not interlace".into()));
            }
        }
        let has_drift = zeros.len() > poles.len();
        let at_zero = c * zeros.iter().product::<f64>() / poles.iter().product::<f64>();
        let derivative_at_zero = if zeros[0] == 0.0 {
            c * zeros[1..].iter().product::<f64>() / poles.iter().product::<f64>()
        } else {
            at_zero
                * (zeros.iter().map(|p| 1.0 / p).sum::<f64>() - poles.iter().map(|q| 1.0 / q).sum::<f64>())
        };
        let label = match (zeros.as_slice(), poles.as_slice()) {
            ([z], []) if *z == 0.0 && c == 1.0 => "u".to_string(),
            ([z], []) if *z == 0.0 => format!("{}u", fmt_num(c)),
            ([z], []) => format!("{}(u+{})", fmt_num(c), fmt_num(*z)),
            _ => {
                let num: Vec<String> = zeros.iter().map(|p| format!("(u+{})", fmt_num(*p))).collect();
                let den: Vec<String> = poles.iter().map(|q| format!("(u+{})", fmt_num(*q))).collect();
                format!("{}{}/{}", fmt_num(c), num.join(""), den.join(""))
            }
        };
        Ok(BernsteinFunction {
            a: poles.first().copied().unwrap_or(f64::INFINITY),
            a_star: zeros[0],
            at_zero,
            at_infinity: if has_drift { f64::INFINITY } else { c },
            derivative_at_zero,
            drift: if has_drift { c } else { 0.0 },
            form: Form::Rational { c, zeros, poles },
            label,
            minus_asserted: None,
        })
    }

    /// φ(u) = u.
    pub fn identity() -> Self {
        Self::rational(1.0, vec![0.0], vec![]).expect("identity")
    }

    /// φ(u) = c(u + b).
    pub fn affine(c: f64, b: f64) -> Result<Self> {
        Self::rational(c, vec![b], vec![])
    }

    /// φ(u) = κ + d u + λ u/(u + θ).
    pub fn compound_poisson(killing: f64, drift: f64, rate: f64, decay: f64) -> Result<Self> {
        if killing < 0.0 || drift < 0.0 || rate < 0.0 || !(decay > 0.0) {
            return Err(Error::Invalid(
                "compound Poisson needs killing, drift, rate ≥ 0 and decay > 0".into(),
            ));
        }
        if rate == 0.0 {
            return Self::rational(drift, vec![killing / drift], vec![]);
        }
        let mut phi = if drift == 0.0 {
            Self::rational(killing + rate, vec![killing * decay / (killing + rate)], vec![decay])?
        } else {
            // d u² + (dθ + κ + λ) u + κθ
            let b = drift * decay + killing + rate;
            let disc = (b * b - 4.0 * drift * killing * decay).max(0.0).sqrt();
            let big = (b + disc) / (2.0 * drift);
            let small = if big > 0.0 { killing * decay / (drift * big) } else { 0.0 };
            Self::rational(drift, vec![small, big], vec![decay])?
        };
        phi.label = format!(
            "{}+{}u+{}u/(u+{})",
            fmt_num(killing),
            fmt_num(drift),
            fmt_num(rate),
            fmt_num(decay)
        );
        Ok(phi)
    }

    /// φ(u) = Γ(s u + A)/Γ(s u + B).
    pub fn gamma_ratio(scale: f64, num: f64, den: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) || !(den >= 0.0) {
            return Err(Error::Invalid(format!(
                "gamma ratio needs scale > 0 and B ≥ 0, got s={scale}, B={den}"
            )));
        }
        let delta = num - den;
        if delta.abs() < 1e-14 {
            return Err(Error::Invalid("constant Bernstein function rejected".into()));
        }
        if (delta - 1.0).abs() < 1e-14 {
            // Γ(x + 1)/Γ(x) = x
            let mut phi = Self::rational(scale, vec![den / scale], vec![])?;
            phi.label = format!("Γ({}u+{})/Γ({}u+{})", fmt_num(scale), fmt_num(num), fmt_num(scale), fmt_num(den));
            return Ok(phi);
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Invalid(format!(
                "gamma ratio needs 0 < A − B ≤ 1, got {delta}"
            )));
        }
        let at_zero = gamma_real(num)? * rgamma_real(den);
        let derivative_at_zero = if den == 0.0 {
            scale * gamma_real(num)?
        } else {
            scale * at_zero * (digamma(Complex64::new(num, 0.0))?.re - digamma(Complex64::new(den, 0.0))?.re)
        };
        Ok(BernsteinFunction {
            form: Form::GammaRatio { scale, num, den },
            label: format!("Γ({}u+{})/Γ({}u+{})", fmt_num(scale), fmt_num(num), fmt_num(scale), fmt_num(den)),
            a: num / scale,
            a_star: den / scale,
            at_zero,
            at_infinity: f64::INFINITY,
            derivative_at_zero,
            drift: 0.0,
            minus_asserted: None,
        })
    }

    /// Lamperti exponent Γ(u + β)/Γ(u) of the β-stable subordinator.
    pub fn stable_subordinator(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Invalid(format!("stable subordinator needs 0 < β < 1, got {beta}")));
        }
        Self::gamma_ratio(1.0, beta, 0.0)
    }

    /// φ(u) = c u^γ.
    pub fn power(c: f64, gamma: f64) -> Result<Self> {
        if (gamma - 1.0).abs() < 1e-15 {
            return Self::rational(c, vec![0.0], vec![]);
        }
        if !(c > 0.0 && gamma > 0.0 && gamma < 1.0) {
            return Err(Error::Invalid(format!("power needs c > 0 and 0 < γ ≤ 1, got c={c}, γ={gamma}")));
        }
        Ok(BernsteinFunction {
            form: Form::Power { c, gamma },
            label: format!("{}u^{}", fmt_num(c), fmt_num(gamma)),
            a: 0.0,
            a_star: 0.0,
            at_zero: 0.0,
            at_infinity: f64::INFINITY,
            derivative_at_zero: f64::INFINITY,
            drift: 0.0,
            minus_asserted: None,
        })
    }

    /// φ given only by its Lévy triple; abscissas are located numerically.
    pub fn from_triple(triple: LevyTriple) -> Result<Self> {
        if !triple.is_subordinator() {
            return Err(Error::Invalid("triple is not a subordinator".into()));
        }
        triple.validate()?;
        let mass = triple.total_mass();
        if triple.drift == 0.0 && mass == 0.0 {
            return Err(Error::Invalid("constant Bernstein function rejected".into()));
        }
        let a = triple
            .measure
            .positive
            .as_ref()
            .map_or(f64::INFINITY, |v| v.exponential_abscissa());
        let mut phi = BernsteinFunction {
            label: "triple".into(),
            a,
            a_star: 0.0,
            at_zero: triple.killing,
            at_infinity: if triple.drift > 0.0 { f64::INFINITY } else { triple.killing + mass },
            derivative_at_zero: triple.mean()?,
            drift: triple.drift,
            minus_asserted: None,
            form: Form::Triple(triple),
        };
        phi.a_star = phi.locate_a_star()?;
        Ok(phi)
    }

    /// First u ≥ 0 where φ(−u) changes sign, by bisection to 1e−9.
    fn locate_a_star(&self) -> Result<f64> {
        if self.at_zero == 0.0 {
            return Ok(0.0);
        }
        let reach = if self.derivative_at_zero > 0.0 && self.derivative_at_zero.is_finite() {
            (1.01 * self.at_zero / self.derivative_at_zero).min(self.a)
        } else {
            self.a
        };
        if !reach.is_finite() {
            return Err(Error::Indeterminate("cannot bracket a*".into()));
        }
        let f = |u: f64| self.eval_real(-u);
        let mut lo = 0.0;
        let mut hi = reach;
        if hi >= self.a {
            hi = self.a * (1.0 - 1e-12);
        }
        match f(hi) {
            Ok(v) if v > 0.0 => return Ok(self.a),
            Ok(_) => {}
            Err(_) => return Ok(self.a),
        }
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if f(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// a_φ = sup{u ≥ 0 : |φ(−u)| < ∞}.
    pub fn abscissa_a(&self) -> f64 {
        self.a
    }

    /// a*_φ: first sign change of φ(−u) (or a_φ).
    pub fn abscissa_a_star(&self) -> f64 {
        self.a_star
    }

    /// (a_φ, a*_φ).
    pub fn abscissas(&self) -> (f64, f64) {
        (self.a, self.a_star)
    }

    /// φ(0), the killing rate.
    pub fn at_zero(&self) -> f64 {
        self.at_zero
    }

    /// φ(∞).
    pub fn at_infinity(&self) -> f64 {
        self.at_infinity
    }

    /// φ′(0⁺) = d + ∫ y ϑ(dy), possibly infinite.
    pub fn phi_prime_at_zero(&self) -> f64 {
        self.derivative_at_zero
    }

    /// Linear coefficient d = lim φ(u)/u.
    pub fn drift(&self) -> f64 {
        self.drift
    }

    /// Configured B_− membership, when the density is not checked numerically.
    pub fn minus_asserted(&self) -> Option<bool> {
        self.minus_asserted
    }

    pub fn assert_minus(mut self, value: bool) -> Self {
        self.minus_asserted = Some(value);
        self
    }

    fn in_domain(&self, re: f64) -> bool {
        re > -self.a || (re == 0.0 && self.a == 0.0)
    }

    /// φ(u) for Re u > −a_φ.
    pub fn eval(&self, u: Complex64) -> Result<Complex64> {
        if !self.in_domain(u.re) {
            return Err(Error::Domain(format!(
                "φ = {} evaluated at {u}, left of −a_φ = {}",
                self.label, -self.a
            )));
        }
        if u.im == 0.0 {
            return Ok(Complex64::new(self.eval_real(u.re)?, 0.0));
        }
        match &self.form {
            Form::Rational { c, zeros, poles } => {
                let mut v = Complex64::new(*c, 0.0);
                for p in zeros {
                    v *= u + p;
                }
                for q in poles {
                    v /= u + q;
                }
                Ok(v)
            }
            Form::GammaRatio { scale, num, den } => {
                let w2 = u * scale + den;
                Ok((ln_gamma(u * scale + num)? - ln_gamma(w2)?).exp())
            }
            Form::Power { c, gamma } => Ok((u.ln() * gamma).exp() * c),
            Form::STransform(phi) => Ok(u * phi.eval(u)? / (u + 1.0)),
            Form::Rescaled { inner, factor } => inner.eval(u * factor),
            Form::Triple(t) => t.laplace_exponent(u),
        }
    }

    /// φ(u) for real u > −a_φ.
    pub fn eval_real(&self, u: f64) -> Result<f64> {
        if !self.in_domain(u) {
            return Err(Error::Domain(format!(
                "φ = {} evaluated at {u}, left of −a_φ = {}",
                self.label, -self.a
            )));
        }
        match &self.form {
            Form::Rational { c, zeros, poles } => {
                let mut v = *c;
                for p in zeros {
                    v *= u + p;
                }
                for q in poles {
                    v /= u + q;
                }
                Ok(v)
            }
            Form::GammaRatio { scale, num, den } => {
                let w1 = scale * u + num;
                let w2 = scale * u + den;
                if near_pole(w2) {
                    return Ok(0.0);
                }
                let (l1, s1) = ln_gamma_real(w1)?;
                let (l2, s2) = ln_gamma_real(w2)?;
                Ok(s1 * s2 * (l1 - l2).exp())
            }
            Form::Power { c, gamma } => {
                if u < 0.0 {
                    return Err(Error::Domain("power function at negative argument".into()));
                }
                Ok(c * u.powf(*gamma))
            }
            Form::STransform(phi) => {
                if (u + 1.0).abs() < 1e-14 {
                    return Err(Error::Domain("S-transform at its removable point −1".into()));
                }
                Ok(u * phi.eval_real(u)? / (u + 1.0))
            }
            Form::Rescaled { inner, factor } => inner.eval_real(u * factor),
            Form::Triple(t) => Ok(t.laplace_exponent(Complex64::new(u, 0.0))?.re),
        }
    }

    /// φ(s)/s, equal to φ′(0⁺) at s = 0 when φ(0) = 0.
    pub fn phi_over_u(&self, s: Complex64) -> Result<Complex64> {
        if s.norm() < 1e-300 {
            if self.at_zero != 0.0 {
                return Err(Error::Pole { what: "φ(u)/u", z: s });
            }
            return Ok(Complex64::new(self.derivative_at_zero, 0.0));
        }
        match &self.form {
            // Γ(ks + A)/(s Γ(ks)) = k Γ(ks + A)/Γ(ks + 1), no pole at s = 0
            Form::GammaRatio { scale, num, den } if *den == 0.0 => {
                Ok((ln_gamma(s * *scale + *num)? - ln_gamma(s * *scale + 1.0)?).exp() * *scale)
            }
            Form::Rescaled { inner, factor } => Ok(inner.phi_over_u(s * *factor)? * *factor),
            Form::STransform(phi) => Ok(phi.eval(s)? / (s + 1.0)),
            _ => Ok(self.eval(s)? / s),
        }
    }

    /// One-sided three-point difference at u⁺ with one Richardson step.
    pub fn derivative_right(&self, u: f64, h: f64) -> Result<f64> {
        let d = |h: f64| -> Result<f64> {
            let f0 = self.eval_real(u)?;
            let f1 = self.eval_real(u + h)?;
            let f2 = self.eval_real(u + 2.0 * h)?;
            Ok((-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h))
        };
        let coarse = d(h)?;
        let fine = d(h / 2.0)?;
        Ok((4.0 * fine - coarse) / 3.0)
    }

    /// φ′(0⁺) by extrapolated one-sided differences; used to cross-check the
    /// closed-form value.
    pub fn phi_prime_numeric(&self) -> Result<f64> {
        let mut prev = self.derivative_right(0.0, 1e-2)?;
        let mut h = 5e-3;
        for _ in 0..20 {
            let cur = self.derivative_right(0.0, h)?;
            if (cur - prev).abs() <= 1e-7 * cur.abs().max(1.0) {
                return Ok(cur);
            }
            if cur > 1e8 {
                return Ok(f64::INFINITY);
            }
            prev = cur;
            h /= 4.0;
        }
        if prev > 1e3 {
            Ok(f64::INFINITY)
        } else {
            Ok(prev)
        }
    }

    /// The Lévy triple, when one is known in closed form.
    pub fn triple(&self) -> Option<LevyTriple> {
        match &self.form {
            Form::Rational { c, zeros, poles } => {
                let density = if poles.is_empty() {
                    None
                } else {
                    let mut terms = Vec::with_capacity(poles.len());
                    for (j, q) in poles.iter().enumerate() {
                        // residue of φ at −q_j
                        let mut r = *c;
                        for p in zeros {
                            r *= p - q;
                        }
                        for (k, qk) in poles.iter().enumerate() {
                            if k != j {
                                r /= qk - q;
                            }
                        }
                        terms.push((-r / q, *q));
                    }
                    Some(LevyDensity::ExpMixture(terms))
                };
                Some(LevyTriple::subordinator(self.drift, self.at_zero, density))
            }
            Form::GammaRatio { scale, num, den } => Some(LevyTriple::subordinator(
                0.0,
                self.at_zero,
                Some(LevyDensity::GammaRatio {
                    scale: *scale,
                    num: *num,
                    delta: num - den,
                }),
            )),
            Form::Power { c, gamma } => Some(LevyTriple::subordinator(
                0.0,
                0.0,
                Some(LevyDensity::Power { c: *c, gamma: *gamma }),
            )),
            Form::STransform(phi) => {
                let base = phi.triple()?;
                if !base.measure.atoms.is_empty() {
                    return None;
                }
                Some(LevyTriple::subordinator(
                    base.drift,
                    0.0,
                    Some(LevyDensity::STransform {
                        base: base.measure.positive.map(Box::new),
                        killing_minus_drift: base.killing - base.drift,
                    }),
                ))
            }
            Form::Rescaled { inner, factor } => {
                let t = inner.triple()?;
                Some(LevyTriple {
                    drift: t.drift * factor,
                    killing: t.killing,
                    measure: LevyMeasure {
                        positive: t.measure.positive.map(|v| LevyDensity::Scaled {
                            base: Box::new(v),
                            factor: *factor,
                        }),
                        negative: None,
                        atoms: t.measure.atoms.iter().map(|(y, m)| (y * factor, *m)).collect(),
                    },
                    ..Default::default()
                })
            }
            Form::Triple(t) => Some(t.clone()),
        }
    }

    /// φ_β(u) = φ(β u).
    pub fn rescale(&self, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Invalid(format!("rescale needs β > 0, got {beta}")));
        }
        if beta == 1.0 {
            return Ok(self.clone());
        }
        let mut out = match &self.form {
            Form::Rational { c, zeros, poles } => {
                let k = beta.powi(zeros.len() as i32 - poles.len() as i32);
                Self::rational(
                    c * k,
                    zeros.iter().map(|p| p / beta).collect(),
                    poles.iter().map(|q| q / beta).collect(),
                )?
            }
            Form::GammaRatio { scale, num, den } => Self::gamma_ratio(scale * beta, *num, *den)?,
            Form::Power { c, gamma } => Self::power(c * beta.powf(*gamma), *gamma)?,
            Form::Rescaled { inner, factor } if (factor * beta - 1.0).abs() < 1e-14 => {
                return Ok((**inner).clone());
            }
            Form::Rescaled { inner, factor } => return inner.rescale(factor * beta),
            _ => BernsteinFunction {
                form: Form::Rescaled {
                    inner: Box::new(self.clone()),
                    factor: beta,
                },
                label: format!("{}(({})u)", self.label, fmt_num(beta)),
                a: self.a / beta,
                a_star: self.a_star / beta,
                at_zero: self.at_zero,
                at_infinity: self.at_infinity,
                derivative_at_zero: self.derivative_at_zero * beta,
                drift: self.drift * beta,
                minus_asserted: self.minus_asserted,
            },
        };
        if !matches!(out.form, Form::Rescaled { .. }) {
            out.label = format!("{} at ({})u", self.label, fmt_num(beta));
        }
        Ok(out)
    }

    /// S_φ(u) = u φ(u)/(u + 1); requires φ ∈ B_1.
    pub fn s_transform(&self) -> Result<Self> {
        let m = membership(self, crate::error::BernsteinClass::One)?;
        if !m.member {
            return Err(Error::Membership {
                class: crate::error::BernsteinClass::One,
                reason: m.reason,
            });
        }
        let vanishes_at_minus_one = self.a > 1.0 && self.eval_real(-1.0).map(|v| v.abs() < 1e-12).unwrap_or(false);
        Ok(BernsteinFunction {
            label: format!("S[{}]", self.label),
            a: if vanishes_at_minus_one { self.a } else { self.a.min(1.0) },
            a_star: 0.0,
            at_zero: 0.0,
            at_infinity: self.at_infinity,
            derivative_at_zero: self.at_zero,
            drift: self.drift,
            minus_asserted: None,
            form: Form::STransform(Box::new(self.clone())),
        })
    }
}
