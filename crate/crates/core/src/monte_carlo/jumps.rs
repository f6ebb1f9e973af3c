//! Path stepping for Lévy processes from their triples: Gaussian part, jumps
//! above a cutoff from tabulated tails, compensated (or Gaussian) small jumps.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::bernstein::{LevyDensity, LevyTriple};
use crate::error::{Error, Result};
use crate::quad::integrate_to_infinity;

const TABLE_POINTS: usize = 600;
const NEGLIGIBLE_TAIL: f64 = 1e-13;

/// Inverse-tail table for jumps of one sign with size ≥ ε.
#[derive(Debug, Clone)]
struct JumpTable {
    sign: f64,
    rate: f64,
    /// (ln y, ln N(y)) with N decreasing.
    nodes: Vec<(f64, f64)>,
}

impl JumpTable {
    fn new(v: &LevyDensity, sign: f64, eps: f64) -> Result<Option<Self>> {
        let rate = v.tail(eps)?;
        if !(rate > 0.0) {
            return Ok(None);
        }
        if !rate.is_finite() {
            return Err(Error::Invalid(format!("jump rate above ε = {eps} is infinite")));
        }
        // find y_max with N(y_max) below the negligible fraction
        let mut y_max = eps.max(1e-300) * 2.0;
        while v.tail(y_max)? > NEGLIGIBLE_TAIL * rate {
            y_max *= 2.0;
            if y_max > 1e8 {
                break;
            }
        }
        let (l0, l1) = (eps.ln(), y_max.ln());
        let mut nodes = Vec::with_capacity(TABLE_POINTS);
        for j in 0..TABLE_POINTS {
            let ly = l0 + (l1 - l0) * j as f64 / (TABLE_POINTS - 1) as f64;
            let n = v.tail(ly.exp())?.max(1e-300);
            nodes.push((ly, n.ln()));
        }
        Ok(Some(JumpTable { sign, rate, nodes }))
    }

    /// Jump size with law v(y)dy/N(ε) on [ε, ∞), by inverting the tail.
    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random::<f64>();
        let target = self.nodes[0].1 + (1.0 - u).max(1e-300).ln();
        // nodes[j].1 decreasing in j
        let idx = self.nodes.partition_point(|&(_, ln_n)| ln_n > target);
        let y = if idx == 0 {
            self.nodes[0].0
        } else if idx >= self.nodes.len() {
            self.nodes[self.nodes.len() - 1].0
        } else {
            let (x0, n0) = self.nodes[idx - 1];
            let (x1, n1) = self.nodes[idx];
            if n0 == n1 {
                x0
            } else {
                x0 + (x1 - x0) * (target - n0) / (n1 - n0)
            }
        };
        self.sign * y.exp()
    }
}

/// A Lévy process ready for Euler stepping.
#[derive(Debug, Clone)]
pub struct LevyStepper {
    /// Drift after compensating the removed small jumps.
    pub drift: f64,
    /// Standard deviation per unit time of the Gaussian part (including the small-jump proxy).
    pub sd: f64,
    pub killing: f64,
    /// E[L_1] without killing, when finite.
    pub mean: f64,
    tables: Vec<JumpTable>,
    atoms: Vec<(f64, f64)>,
    total_rate: f64,
}

fn side_mean_far(v: &LevyDensity) -> Result<f64> {
    // ∫_1^∞ y v(y) dy
    integrate_to_infinity(|y| y * v.density(y), 1.0, 1e-10)
}

impl LevyStepper {
    /// Two-sided process with exponent Ψ(z) = σ²z² + az + ∫(e^{zy} − 1 − zy1_{|y|<1})Π(dy) − q.
    pub fn two_sided(triple: &LevyTriple, eps: f64, gaussian_small_jumps: bool) -> Result<Self> {
        let mut drift = triple.linear;
        let mut variance = 2.0 * triple.sigma2;
        let mut mean = triple.linear;
        let mut tables = Vec::new();
        for (sign, side) in [(1.0, &triple.measure.positive), (-1.0, &triple.measure.negative)] {
            if let Some(v) = side {
                // compensator of the jumps in [ε, 1) that are now simulated
                drift -= sign * v.moment_between(1, eps, 1.0)?;
                mean += sign * side_mean_far(v)?;
                if gaussian_small_jumps {
                    variance += v.moment_between(2, 0.0, eps)?;
                }
                if let Some(t) = JumpTable::new(v, sign, eps)? {
                    tables.push(t);
                }
            }
        }
        let mut atoms = Vec::new();
        for &(y, m) in &triple.measure.atoms {
            if y.abs() >= 1.0 {
                mean += y * m;
            } else if y.abs() >= eps {
                drift -= y * m;
            }
            if y.abs() >= eps {
                atoms.push((y, m));
            }
        }
        Self::assemble(drift, variance.max(0.0).sqrt(), triple.killing, mean, tables, atoms)
    }

    /// Subordinator with Laplace exponent d u + ∫(1 − e^{−uy})ϑ(dy); small jumps are
    /// replaced by their mean.
    pub fn subordinator(triple: &LevyTriple, eps: f64) -> Result<Self> {
        let mut drift = triple.drift;
        let mut tables = Vec::new();
        if let Some(v) = &triple.measure.positive {
            drift += v.moment_between(1, 0.0, eps)?;
            if let Some(t) = JumpTable::new(v, 1.0, eps)? {
                tables.push(t);
            }
        }
        let mut atoms = Vec::new();
        for &(y, m) in &triple.measure.atoms {
            if y >= eps {
                atoms.push((y, m));
            } else {
                drift += y * m;
            }
        }
        let mean = triple.mean()?;
        Self::assemble(drift, 0.0, triple.killing, mean, tables, atoms)
    }

    fn assemble(
        drift: f64,
        sd: f64,
        killing: f64,
        mean: f64,
        tables: Vec<JumpTable>,
        atoms: Vec<(f64, f64)>,
    ) -> Result<Self> {
        let total_rate = tables.iter().map(|t| t.rate).sum::<f64>() + atoms.iter().map(|a| a.1).sum::<f64>();
        if !total_rate.is_finite() {
            return Err(Error::Invalid("infinite jump rate above the cutoff".into()));
        }
        Ok(LevyStepper {
            drift,
            sd,
            killing,
            mean,
            tables,
            atoms,
            total_rate,
        })
    }

    /// Rate of simulated jumps.
    pub fn jump_rate(&self) -> f64 {
        self.total_rate
    }

    fn jump<R: Rng>(&self, rng: &mut R) -> f64 {
        let mut u = rng.random::<f64>() * self.total_rate;
        for t in &self.tables {
            if u < t.rate {
                return t.sample(rng);
            }
            u -= t.rate;
        }
        for &(y, m) in &self.atoms {
            if u < m {
                return y;
            }
            u -= m;
        }
        self.atoms.last().map_or_else(|| self.tables[0].sample(rng), |a| a.0)
    }

    /// Time to the next simulated jump from now.
    pub fn next_jump_in<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.total_rate > 0.0 {
            rng.sample::<f64, _>(Exp1) / self.total_rate
        } else {
            f64::INFINITY
        }
    }

    /// Time of killing from now.
    pub fn killing_time<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.killing > 0.0 {
            rng.sample::<f64, _>(Exp1) / self.killing
        } else {
            f64::INFINITY
        }
    }

    /// Increment over a step of length h; `until_jump` is the running time to the
    /// next jump and is advanced in place.
    pub fn increment<R: Rng>(&self, rng: &mut R, h: f64, until_jump: &mut f64) -> f64 {
        let mut dx = self.drift * h;
        if self.sd > 0.0 {
            let n: f64 = rng.sample(StandardNormal);
            dx += self.sd * h.sqrt() * n;
        }
        let mut left = h;
        while *until_jump <= left {
            left -= *until_jump;
            dx += self.jump(rng);
            *until_jump = self.next_jump_in(rng);
        }
        *until_jump -= left;
        dx
    }
}
