//! Monte Carlo samplers for χ₁, T, 𝕋 and λ_t, and the estimators used to
//! confront them with the Mellin formulas.

pub mod jumps;
pub mod samplers;

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::output::format_sig17;

pub use samplers::{
    kanter, sample_chi, sample_exponential_functional, sample_extinction, sample_inverse_subordinator,
    sample_inverse_subordinator_path, sample_positive_stable, FunctionalSample,
};

/// Minimum sample count for confidence statements.
pub const MIN_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub seed: u64,
    pub n_paths: usize,
    /// Euler step for Lévy paths.
    pub dt: f64,
    /// Time truncation of ∫e^{L_t}dt; None picks 50/|φ⁺(0)α|.
    pub horizon: Option<f64>,
    /// Jumps smaller than this are compensated, not simulated.
    pub jump_cutoff: f64,
    /// Replace removed small jumps by a Brownian term with their variance.
    pub gaussian_small_jumps: bool,
    /// Thread count; results do not depend on it.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            seed: 20_240_601,
            n_paths: 10_000,
            dt: 0.01,
            horizon: None,
            jump_cutoff: 1e-4,
            gaussian_small_jumps: false,
            workers: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::Invalid("n_paths must be at least 1".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.jump_cutoff > 0.0 && self.jump_cutoff.is_finite()) {
            return Err(Error::Invalid(format!("jump cutoff must be positive, got {}", self.jump_cutoff)));
        }
        if let Some(h) = self.horizon {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Invalid(format!("horizon must be positive, got {h}")));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::Invalid("workers must be at least 1".into()));
        }
        Ok(())
    }

    /// Key=value echo of everything that determines the output.
    pub fn describe(&self) -> String {
        let horizon = self.horizon.map_or("auto".to_string(), format_sig17);
        format!(
            "seed={}\nn_paths={}\ndt={}\nhorizon={}\njump_cutoff={}\ngaussian_small_jumps={}\n",
            self.seed,
            self.n_paths,
            format_sig17(self.dt),
            horizon,
            format_sig17(self.jump_cutoff),
            self.gaussian_small_jumps
        )
    }

    /// SHA-256 of `describe()` in hex.
    pub fn hash(&self) -> String {
        Sha256::digest(self.describe().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_paths(mut self, n: usize) -> Self {
        self.n_paths = n;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }
}

/// Independent generator streams keyed by (seed, domain, index).
pub fn path_rng(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ domain.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(index);
    rng
}

/// Runs `f` once per path index with that path's generator, in index order.
pub(crate) fn run_paths<T, F>(cfg: &SimConfig, domain: u64, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<T> + Sync,
{
    cfg.validate()?;
    let job = || {
        (0..n)
            .into_par_iter()
            .map(|i| f(&mut path_rng(cfg.seed, domain, i as u64)))
            .collect::<Result<Vec<T>>>()
    };
    match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?
            .install(job),
        None => job(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MellinEstimate {
    pub value: f64,
    pub se: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailFit {
    /// Least-squares slope of ln P(V > t) against ln t.
    pub slope: f64,
    pub intercept: f64,
    /// Mean of t^κ P(V > t) over the window, when κ is given.
    pub plateau: Option<f64>,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

/// Sorted nonnegative samples.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalLaw {
    samples: Vec<f64>,
}

impl EmpiricalLaw {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if let Some(bad) = samples.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(Error::Invalid(format!("sample {bad} is not a finite nonnegative number")));
        }
        samples.sort_by(f64::total_cmp);
        Ok(EmpiricalLaw { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn require(&self, needed: usize) -> Result<()> {
        if self.samples.len() < needed {
            return Err(Error::InsufficientSamples {
                needed,
                have: self.samples.len(),
            });
        }
        Ok(())
    }

    /// Mean of V^z with the standard error of the mean.
    pub fn mellin(&self, z: f64) -> Result<MellinEstimate> {
        self.require(MIN_SAMPLES)?;
        if z == 0.0 {
            return Ok(MellinEstimate { value: 1.0, se: 0.0 });
        }
        let n = self.samples.len() as f64;
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for (i, s) in self.samples.iter().enumerate() {
            let v = s.powf(z);
            if !v.is_finite() {
                return Err(Error::Domain(format!("sample {s} raised to {z} is not finite")));
            }
            let d = v - mean;
            mean += d / (i + 1) as f64;
            m2 += d * (v - mean);
        }
        let var = m2 / (n - 1.0);
        Ok(MellinEstimate {
            value: mean,
            se: (var / n).sqrt(),
        })
    }

    pub fn mean(&self) -> Result<MellinEstimate> {
        self.mellin(1.0)
    }

    /// P̂(V ≤ t).
    pub fn ecdf(&self, t: f64) -> f64 {
        self.samples.partition_point(|&s| s <= t) as f64 / self.samples.len().max(1) as f64
    }

    /// P̂(V > t).
    pub fn survival(&self, t: f64) -> f64 {
        1.0 - self.ecdf(t)
    }

    /// Empirical p-quantile.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.samples.len();
        let idx = ((p.clamp(0.0, 1.0) * n as f64).ceil() as usize).clamp(1, n.max(1)) - 1;
        self.samples[idx]
    }

    /// sup_t |F̂(t) − F(t)|.
    pub fn ks_distance<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        let n = self.samples.len() as f64;
        self.samples
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let f = cdf(s);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Two-sample sup distance between empirical CDFs.
    pub fn ks_two_sample(&self, other: &EmpiricalLaw) -> f64 {
        let (a, b) = (&self.samples, &other.samples);
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let (mut i, mut j) = (0, 0);
        let mut d: f64 = 0.0;
        while i < a.len() && j < b.len() {
            let t = a[i].min(b[j]);
            while i < a.len() && a[i] <= t {
                i += 1;
            }
            while j < b.len() && b[j] <= t {
                j += 1;
            }
            d = d.max((i as f64 / na - j as f64 / nb).abs());
        }
        d
    }

    /// Log–log fit of the empirical tail over the top `fraction` of the
    /// samples, leaving out the last ten order statistics.
    pub fn tail_fit(&self, fraction: f64, kappa: Option<f64>) -> Result<TailFit> {
        self.require(MIN_SAMPLES)?;
        let n = self.samples.len();
        let start = ((1.0 - fraction.clamp(0.0, 1.0)) * n as f64).floor() as usize;
        let stop = n.saturating_sub(10);
        if stop <= start + 2 {
            return Err(Error::InsufficientSamples {
                needed: start + 13,
                have: n,
            });
        }
        let pts: Vec<(f64, f64, f64)> = (start..stop)
            .filter(|&i| self.samples[i] > 0.0)
            .map(|i| {
                let t = self.samples[i];
                let s = (n - i) as f64 / n as f64;
                (t.ln(), s.ln(), t.powf(kappa.unwrap_or(0.0)) * s)
            })
            .collect();
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let (mx, my) = (sx / m, sy / m);
        let (mut sxx, mut sxy) = (0.0, 0.0);
        for p in &pts {
            sxx += (p.0 - mx) * (p.0 - mx);
            sxy += (p.0 - mx) * (p.1 - my);
        }
        let slope = sxy / sxx;
        Ok(TailFit {
            slope,
            intercept: my - slope * mx,
            plateau: kappa.map(|_| pts.iter().map(|p| p.2).sum::<f64>() / m),
            t_min: self.samples[start],
            t_max: self.samples[stop - 1],
            points: pts.len(),
        })
    }

    /// One-column CSV with the configuration hash in the header.
    pub fn write_csv<W: Write>(&self, mut w: W, cfg: &SimConfig) -> std::io::Result<()> {
        writeln!(w, "# config_sha256={}", cfg.hash())?;
        for line in cfg.describe().lines() {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "sample")?;
        for s in &self.samples {
            writeln!(w, "{}", format_sig17(*s))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_hash_ignores_workers() {
        let a = SimConfig::default();
        let b = SimConfig {
            workers: Some(3),
            ..SimConfig::default()
        };
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), a.clone().with_seed(1).hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn estimators_on_known_samples() {
        let law = EmpiricalLaw::new((1..=1000).map(|i| i as f64 / 1000.0).collect()).unwrap();
        assert_eq!(law.mellin(0.0).unwrap().value, 1.0);
        let m = law.mean().unwrap();
        assert!((m.value - 0.5005).abs() < 1e-12);
        assert!((law.ecdf(0.25) - 0.25).abs() < 1e-12);
        assert!(law.ks_distance(|t| t.clamp(0.0, 1.0)) <= 1e-3 + 1e-12);
        assert_eq!(law.ks_two_sample(&law), 0.0);
        assert!(EmpiricalLaw::new(vec![1.0, f64::NAN]).is_err());
        assert!(EmpiricalLaw::new(vec![1.0; 10]).unwrap().mellin(0.5).is_err());
    }

    #[test]
    fn csv_dump_has_hash_header() {
        let law = EmpiricalLaw::new(vec![0.5, 0.25]).unwrap();
        let mut out = Vec::new();
        law.write_csv(&mut out, &SimConfig::default()).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("# config_sha256="));
        assert!(text.contains("\nsample\n2.5000000000000000e-1\n"));
    }
}
