//! Densities and survival functions from Mellin transforms.
//!
//! The Mellin–Barnes integrals are truncated trapezoid sums on nested dyadic
//! grids. Samples of M are independent of t, so one workspace serves many t.

use num_complex::Complex64;
use serde::Serialize;

use super::{persistence::smoothness_index, LawKind, MellinLaw};
use crate::bernstein::BernsteinFunction;
use crate::error::{Error, Result};

const H0: f64 = 0.25;
const MAX_LEVEL: usize = 12;
const MAX_CUTOFF: f64 = 16_777_216.0;
const MAX_SAMPLES: usize = 4_000_000;
const TRUNCATION_TOL: f64 = 1e-13;
const LEVEL_TOL: f64 = 1e-11;
const NEGATIVITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMethod {
    Series,
    MellinBarnes,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityValue {
    pub t: f64,
    pub value: f64,
    pub error: f64,
    pub method: DensityMethod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Integrand {
    Density,
    Survival,
    Cdf,
}

/// Cached Mellin–Barnes workspace for one law, one contour and one integrand.
#[derive(Debug, Clone)]
pub struct MellinBarnes<'a> {
    law: &'a MellinLaw,
    integrand: Integrand,
    /// Re of the contour in the t^{−s} factor.
    c: f64,
    cutoff: f64,
    truncation: f64,
    /// levels[0] holds b = j h0 for j = 0..=n; levels[k] the odd multiples of h0/2^k.
    levels: Vec<Vec<Complex64>>,
}

fn density_shift(law: &MellinLaw) -> f64 {
    let (lower, upper) = law.strip();
    let (lo, hi) = crate::mellin::clipped_strip(lower, upper);
    if lo < hi {
        0.5 * (lo + hi)
    } else {
        0.5 * (lower + upper)
    }
}

impl<'a> MellinBarnes<'a> {
    /// f(t) = (1/π) ∫_0^∞ Re[t^{−(s+1+ib)} M(s + ib)] db with s inside the strip.
    pub fn density(law: &'a MellinLaw, shift: Option<f64>) -> Result<Self> {
        let s = shift.unwrap_or_else(|| density_shift(law));
        law.check_strip(Complex64::new(s, 0.0))?;
        Self::build(law, Integrand::Density, s + 1.0)
    }

    /// P(V > t) = (1/π) ∫_0^∞ Re[t^{−(c+ib)} M(c + ib)/(c + ib)] db with 0 < c < upper.
    pub fn survival(law: &'a MellinLaw) -> Result<Self> {
        let (_, hi) = law.strip();
        let c = if hi.is_finite() { (0.5 * hi).min(1.0) } else { 1.0 };
        Self::build(law, Integrand::Survival, c)
    }

    /// P(V ≤ t) through a contour with lower < c < 0.
    pub fn cdf(law: &'a MellinLaw) -> Result<Self> {
        let (lo, _) = law.strip();
        if lo >= 0.0 {
            return Err(Error::Domain("no contour left of 0 in the strip".into()));
        }
        let c = if lo.is_finite() { (0.5 * lo).max(-1.0) } else { -1.0 };
        Self::build(law, Integrand::Cdf, c)
    }

    fn build(law: &'a MellinLaw, integrand: Integrand, c: f64) -> Result<Self> {
        let mut mb = MellinBarnes {
            law,
            integrand,
            c,
            cutoff: 0.0,
            truncation: 0.0,
            levels: Vec::new(),
        };
        let start = match law.gen_frechet_parts() {
            Some((phi, beta, _)) => {
                let theta = sector_angle(phi, 1e3).map(|s| s.angle).unwrap_or(0.0).max(0.05);
                (0.5 * beta * (1.0 / TRUNCATION_TOL).ln() / theta).clamp(1.0, 1e4)
            }
            None => 2.0,
        };
        let (cutoff, truncation) = mb.find_cutoff(start)?;
        mb.cutoff = cutoff;
        mb.truncation = truncation;
        let n = (cutoff / H0).ceil() as usize;
        if n > MAX_SAMPLES {
            return Err(Error::Truncation {
                what: "Mellin–Barnes grid".into(),
                bound: cutoff,
            });
        }
        let level0 = (0..=n).map(|j| mb.sample(j as f64 * H0)).collect::<Result<Vec<_>>>()?;
        mb.levels.push(level0);
        Ok(mb)
    }

    /// Value of the t-free part of the integrand at height b.
    fn sample(&self, b: f64) -> Result<Complex64> {
        match self.integrand {
            Integrand::Density => self.law.eval(Complex64::new(self.c - 1.0, b)),
            Integrand::Survival | Integrand::Cdf => {
                let s = Complex64::new(self.c, b);
                Ok(self.law.eval(s)? / s)
            }
        }
    }

    /// Doubling search for B with the tail beyond B below the tolerance,
    /// extrapolating from the envelope decay on [B, 2B] and [2B, 4B].
    fn find_cutoff(&self, start: f64) -> Result<(f64, f64)> {
        let envelope = |b: f64| -> Result<f64> {
            let mut m: f64 = 0.0;
            for j in 0..8 {
                m = m.max(self.sample(b * (1.0 + j as f64 / 8.0))?.norm());
            }
            Ok(m)
        };
        let mut b = start;
        let mut e1 = envelope(b)?;
        loop {
            let e2 = envelope(2.0 * b)?;
            if e2 < 1e-300 {
                return Ok((2.0 * b, 0.0));
            }
            let p = (e1 / e2).log2();
            if p > 1.2 {
                let remainder = e2 * 2.0 * b / (p - 1.0);
                if remainder < TRUNCATION_TOL {
                    return Ok((2.0 * b, remainder));
                }
            }
            b *= 2.0;
            if b > MAX_CUTOFF {
                let bound = if p > 1.0 { e2 * b / (p - 1.0) } else { f64::INFINITY };
                return Err(Error::Truncation {
                    what: format!("Mellin–Barnes integrand of {:?} decays too slowly", self.law.kind()),
                    bound,
                });
            }
            e1 = e2;
        }
    }

    fn ensure_level(&mut self, k: usize) -> Result<()> {
        while self.levels.len() <= k {
            let level = self.levels.len();
            let h = H0 / (1u64 << level) as f64;
            let n = (self.cutoff / H0).ceil() as usize * (1usize << (level - 1));
            if n > MAX_SAMPLES {
                return Err(Error::Integration {
                    what: "Mellin–Barnes refinement exceeded the sample budget".into(),
                    residual: f64::NAN,
                });
            }
            let pts = (0..n)
                .map(|j| self.sample((2 * j + 1) as f64 * h))
                .collect::<Result<Vec<_>>>()?;
            self.levels.push(pts);
        }
        Ok(())
    }

    /// Trapezoid value of (1/π) ∫ Re[e^{−ib ln t} g(b)] db using levels 0..=k.
    fn partial(&self, k: usize, ln_t: f64) -> f64 {
        let mut sum = 0.0;
        for (level, pts) in self.levels.iter().take(k + 1).enumerate() {
            let h = H0 / (1u64 << level) as f64;
            for (j, g) in pts.iter().enumerate() {
                let (b, weight) = if level == 0 {
                    (j as f64 * H0, if j == 0 { 0.5 } else { 1.0 })
                } else {
                    ((2 * j + 1) as f64 * h, 1.0)
                };
                let phase = Complex64::from_polar(1.0, -b * ln_t);
                sum += weight * (phase * g).re;
            }
        }
        sum * H0 / (1u64 << k) as f64 / std::f64::consts::PI
    }

    /// Value at t with an error estimate (refinement difference plus truncation).
    pub fn value(&mut self, t: f64) -> Result<(f64, f64)> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("inversion needs t > 0, got {t}")));
        }
        let ln_t = t.ln();
        let scale = (-self.c * ln_t).exp();
        let mut prev = self.partial(0, ln_t);
        let mut diff = f64::INFINITY;
        for k in 1..=MAX_LEVEL {
            self.ensure_level(k)?;
            let cur = self.partial(k, ln_t);
            diff = (cur - prev).abs();
            prev = cur;
            if diff <= LEVEL_TOL * cur.abs().max(1.0) && k >= 2 {
                break;
            }
        }
        if diff > 1e3 * LEVEL_TOL * prev.abs().max(1.0) {
            return Err(Error::Integration {
                what: format!("Mellin–Barnes trapezoid at t = {t}"),
                residual: diff * scale,
            });
        }
        let value = match self.integrand {
            Integrand::Cdf => -prev * scale,
            _ => prev * scale,
        };
        Ok((value, (diff + self.truncation) * scale))
    }

    pub fn contour(&self) -> f64 {
        self.c
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }
}

fn check_density_available(law: &MellinLaw) -> Result<()> {
    if matches!(law.kind(), LawKind::MarkovT | LawKind::Extinction) {
        if let Some((pair, tc, _)) = law.pair_parts() {
            if let Ok(idx) = smoothness_index(pair, &tc) {
                if idx.n <= 1.0 {
                    return Err(Error::DensityNotAvailable { index: idx.n });
                }
            }
        }
    }
    Ok(())
}

fn clip(t: f64, value: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value > -NEGATIVITY_TOL {
        Ok(0.0)
    } else {
        Err(Error::Negativity { t, value })
    }
}

/// Density by Mellin–Barnes inversion at each t, sharing one workspace.
pub fn density_mellin_barnes(law: &MellinLaw, ts: &[f64]) -> Result<Vec<DensityValue>> {
    check_density_available(law)?;
    let mut mb = MellinBarnes::density(law, None)?;
    ts.iter()
        .map(|&t| {
            let (v, err) = mb.value(t)?;
            Ok(DensityValue {
                t,
                value: clip(t, v)?,
                error: err,
                method: DensityMethod::MellinBarnes,
            })
        })
        .collect()
}

/// Density of k·F_β(φ) from f(t) = β t^{−β−1} Σ_{n≥0} (n + 1) x^n / W_φ(n + 2), x = −t^{−β}.
pub fn density_series_gen_frechet(phi: &BernsteinFunction, beta: f64, scale: f64, t: f64) -> Result<DensityValue> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("density needs t > 0, got {t}")));
    }
    let u = t / scale;
    let y = u.powf(-beta);
    let radius = phi.at_infinity();
    if y >= radius {
        return Err(Error::Radius { modulus: y, radius });
    }
    // term_n = (n + 1) y^n / W(n + 2), W(2) = φ(1)
    let mut term = 1.0 / phi.eval_real(1.0)?;
    let mut sum = 0.0;
    let mut biggest: f64 = 0.0;
    let mut n = 0u64;
    loop {
        let signed = if n % 2 == 0 { term } else { -term };
        sum += signed;
        biggest = biggest.max(term);
        let ratio = (n + 2) as f64 / (n + 1) as f64 * y / phi.eval_real((n + 2) as f64)?;
        if ratio < 1.0 && term <= 1e-17 * sum.abs().max(1e-300) {
            break;
        }
        term *= ratio;
        n += 1;
        if n > 100_000 || !term.is_finite() {
            return Err(Error::NonConvergence {
                what: "generalized Fréchet density series".into(),
                last: Complex64::new(sum, 0.0),
                previous: Complex64::new(sum - signed, 0.0),
            });
        }
    }
    let pre = beta * u.powf(-beta - 1.0) / scale;
    let value = pre * sum;
    let error = pre * biggest * 1e-16 * (n as f64 + 1.0);
    Ok(DensityValue {
        t,
        value: clip(t, value)?,
        error,
        method: DensityMethod::Series,
    })
}

/// Density with a method choice; `Auto` uses the series for F_β when
/// t^{−β} ≤ 5 and well inside the radius φ(∞), else Mellin–Barnes.
pub fn density(law: &MellinLaw, ts: &[f64], method: DensityMethod) -> Result<Vec<DensityValue>> {
    let frechet = law.gen_frechet_parts();
    match (method, frechet) {
        (DensityMethod::Series, None) => Err(Error::Invalid(format!(
            "series density is only available for generalized Fréchet laws, not {:?}",
            law.kind()
        ))),
        (DensityMethod::Series, Some((phi, beta, scale))) => ts
            .iter()
            .map(|&t| density_series_gen_frechet(phi, beta, scale, t))
            .collect(),
        (DensityMethod::MellinBarnes, _) | (DensityMethod::Auto, None) => density_mellin_barnes(law, ts),
        (DensityMethod::Auto, Some((phi, beta, scale))) => {
            let series_ok = |t: f64| {
                let y = (t / scale).powf(-beta);
                y <= 5.0 && y < 0.5 * phi.at_infinity()
            };
            let mut mb: Option<MellinBarnes> = None;
            ts.iter()
                .map(|&t| {
                    if series_ok(t) {
                        return density_series_gen_frechet(phi, beta, scale, t);
                    }
                    if mb.is_none() {
                        mb = Some(MellinBarnes::density(law, None)?);
                    }
                    let (v, err) = mb.as_mut().expect("workspace").value(t)?;
                    Ok(DensityValue {
                        t,
                        value: clip(t, v)?,
                        error: err,
                        method: DensityMethod::MellinBarnes,
                    })
                })
                .collect()
        }
    }
}

/// P(V > t) for each t: the survival contour above t_ref = exp E[ln V],
/// one minus the CDF contour below it.
pub fn survival(law: &MellinLaw, ts: &[f64]) -> Result<Vec<f64>> {
    let h = 1e-4;
    let ln_ref = (law.eval_real(h)? - law.eval_real(-h)?) / (2.0 * h);
    let t_ref = ln_ref.exp();
    let mut upper: Option<MellinBarnes> = None;
    let mut lower: Option<MellinBarnes> = None;
    let has_cdf_contour = law.strip().0 < 0.0;
    ts.iter()
        .map(|&t| {
            let v = if t >= t_ref || !has_cdf_contour {
                if upper.is_none() {
                    upper = Some(MellinBarnes::survival(law)?);
                }
                upper.as_mut().expect("workspace").value(t)?.0
            } else {
                if lower.is_none() {
                    lower = Some(MellinBarnes::cdf(law)?);
                }
                1.0 - lower.as_mut().expect("workspace").value(t)?.0
            };
            if v < -NEGATIVITY_TOL || v > 1.0 + NEGATIVITY_TOL {
                return Err(Error::Negativity { t, value: v });
            }
            Ok(v.clamp(0.0, 1.0))
        })
        .collect()
}

/// ∫₀^∞ t^s f(t) dt by the trapezoid rule in u = ln t.
///
/// Mellin–Barnes values use a contour right of s above the centre and left of s
/// below it, so inversion errors stay small against t^s in both tails. `Auto`
/// takes the series where it is used by [`density`].
pub fn numeric_moment(law: &MellinLaw, s: f64, method: DensityMethod) -> Result<f64> {
    const STEP: f64 = 0.02;
    const CHUNK: usize = 100;
    const MAX_CHUNKS: usize = 150;
    law.check_strip(Complex64::new(s, 0.0))?;
    let (lo, hi) = law.strip();
    let h = 1e-4;
    let centre = (law.eval_real(h)? - law.eval_real(-h)?) / (2.0 * h);
    let frechet = law.gen_frechet_parts();
    let series_at = |t: f64| -> Option<Result<f64>> {
        let (phi, beta, scale) = frechet?;
        let y = (t / scale).powf(-beta);
        let wanted = match method {
            DensityMethod::Series => true,
            DensityMethod::Auto => y <= 5.0 && y < 0.5 * phi.at_infinity(),
            DensityMethod::MellinBarnes => false,
        };
        wanted.then(|| density_series_gen_frechet(phi, beta, scale, t).map(|d| d.value))
    };
    if method == DensityMethod::Series && frechet.is_none() {
        return Err(Error::Invalid(format!(
            "series density is only available for generalized Fréchet laws, not {:?}",
            law.kind()
        )));
    }
    check_density_available(law)?;
    let mut sides: [Option<MellinBarnes>; 2] = [None, None];
    let contour = [
        if hi.is_finite() { 0.5 * (s + hi) } else { s + 1.0 },
        if lo.is_finite() { 0.5 * (s + lo) } else { s - 1.0 },
    ];
    let mut integrand = |u: f64, side: usize| -> Result<f64> {
        let t = u.exp();
        let f = match series_at(t) {
            Some(v) => v?,
            None => {
                if sides[side].is_none() {
                    sides[side] = Some(MellinBarnes::density(law, Some(contour[side]))?);
                }
                sides[side].as_mut().expect("workspace").value(t)?.0
            }
        };
        Ok(((s + 1.0) * u).exp() * f)
    };
    let mut total = integrand(centre, 0)?;
    let mut biggest = total.abs();
    for (side, dir) in [(0usize, 1.0), (1, -1.0)] {
        let mut k = 1usize;
        for chunk in 0..MAX_CHUNKS {
            let mut tail: f64 = 0.0;
            for j in k..k + CHUNK {
                let v = integrand(centre + dir * STEP * j as f64, side)?;
                total += v;
                biggest = biggest.max(v.abs());
                if j >= k + CHUNK - 20 {
                    tail = tail.max(v.abs());
                }
            }
            k += CHUNK;
            if tail < 1e-14 * biggest {
                break;
            }
            if chunk + 1 == MAX_CHUNKS {
                return Err(Error::Truncation {
                    what: format!("moment of order {s}: integrand not negligible at ln t = {}", centre + dir * STEP * k as f64),
                    bound: tail / biggest,
                });
            }
        }
    }
    Ok(total * STEP)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorAngle {
    pub angle: f64,
    pub error: f64,
}

/// Θ_φ ≈ (1/B) ∫_0^B arg φ(1 + iu) du with the spread of the running average
/// over the last decade as the error bar.
pub fn sector_angle(phi: &BernsteinFunction, b_max: f64) -> Result<SectorAngle> {
    if !(b_max > 0.0 && b_max.is_finite()) {
        return Err(Error::Invalid(format!("sector angle needs B > 0, got {b_max}")));
    }
    let n = ((8.0 * b_max) as usize).clamp(1024, 1 << 20);
    let h = b_max / n as f64;
    let arg = |u: f64| -> Result<f64> { Ok(phi.eval(Complex64::new(1.0, u))?.arg()) };
    let mut integral = 0.0;
    let mut prev = arg(0.0)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 1..=n {
        let u = j as f64 * h;
        let cur = arg(u)?;
        integral += 0.5 * h * (prev + cur);
        prev = cur;
        if j * 10 >= n {
            let avg = integral / u;
            lo = lo.min(avg);
            hi = hi.max(avg);
        }
    }
    Ok(SectorAngle {
        angle: integral / b_max,
        error: hi - lo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frechet_density(beta: f64, t: f64) -> f64 {
        beta * t.powf(-beta - 1.0) * (-t.powf(-beta)).exp()
    }

    #[test]
    fn frechet_series_and_mellin_barnes() {
        let id = BernsteinFunction::identity();
        for beta in [1.0, 0.7] {
            let law = MellinLaw::gen_frechet(&id, beta).unwrap();
            let ts = [0.4, 1.0, 2.5, 10.0];
            let mb = density(&law, &ts, DensityMethod::MellinBarnes).unwrap();
            for d in &mb {
                let want = frechet_density(beta, d.t);
                assert!((d.value - want).abs() < 1e-9, "β={beta} t={}: {} vs {want}", d.t, d.value);
            }
            for &t in &ts[1..] {
                let s = density_series_gen_frechet(&id, beta, 1.0, t).unwrap();
                assert!((s.value - frechet_density(beta, t)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn scaled_frechet_density() {
        let id = BernsteinFunction::identity();
        let law = MellinLaw::gen_frechet_scaled(&id, 1.0, 2.0).unwrap();
        let got = density(&law, &[3.0], DensityMethod::Auto).unwrap()[0].value;
        assert!((got - frechet_density(1.0, 1.5) / 2.0).abs() < 1e-12);
        let mb = density(&law, &[3.0], DensityMethod::MellinBarnes).unwrap()[0].value;
        assert!((mb - got).abs() < 1e-9);
    }

    #[test]
    fn brownian_hitting_survival() {
        // T = 1/(2G), G ~ Gamma(1/2): P(T > t) = erf(1/√(2t))
        let law = MellinLaw::markov_t(&crate::WienerHopfPair::brownian(), 1.0).unwrap();
        let ts = [0.05, 0.3, 1.0, 7.0, 100.0];
        let s = survival(&law, &ts).unwrap();
        let want = [
            0.999_992_255_783_568_96,
            0.932_110_845_138_170_98,
            0.682_689_492_137_085_90,
            0.294_543_013_888_726_59,
            0.079_655_674_554_057_963,
        ];
        for (got, w) in s.iter().zip(want) {
            assert!((got - w).abs() < 1e-9, "{got} vs {w}");
        }
    }

    #[test]
    fn identity_sector_angle() {
        let s = sector_angle(&BernsteinFunction::identity(), 1e3).unwrap();
        assert!(s.angle > 1.5 && s.angle < std::f64::consts::FRAC_PI_2);
        assert!(s.error < 0.05);
    }

    #[test]
    fn series_outside_radius_is_refused() {
        let phi = BernsteinFunction::compound_poisson(0.0, 0.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            density_series_gen_frechet(&phi, 1.0, 1.0, 0.5),
            Err(Error::Radius { .. })
        ));
    }
}
