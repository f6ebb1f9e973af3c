//! Samplers for χ₁, λ_t, T = x^α∫e^{L_t}dt and 𝕋 = χ_{T^{1/β}}.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::jumps::LevyStepper;
use super::{path_rng, run_paths, EmpiricalLaw, SimConfig};
use crate::bernstein::{Form, WienerHopfPair};
use crate::error::{Error, Result};
use crate::mellin::TimeChange;

const DOMAIN_STABLE: u64 = 1;
const DOMAIN_FUNCTIONAL: u64 = 2;
const DOMAIN_SUBORDINATOR: u64 = 3;
const DOMAIN_INVERSE_PATH: u64 = 4;
const DOMAIN_RESAMPLE: u64 = 5;

/// Paths stop once the remaining integral is bounded by this fraction of the running value.
const NEGLIGIBLE_REMAINDER: f64 = 1e-13;
/// A path still above this fraction at the horizon is extended once, then flagged.
const HORIZON_REMAINDER: f64 = 1e-3;

/// Kanter's representation of a positive β-stable variable with E[e^{−qS}] = e^{−q^β}.
/// Works in logarithms so that β close to 1 does not overflow.
pub fn kanter<R: Rng>(beta: f64, rng: &mut R) -> f64 {
    if beta == 1.0 {
        return 1.0;
    }
    let u = PI * rng.random::<f64>().max(f64::MIN_POSITIVE);
    let e: f64 = rng.sample(rand_distr::Exp1);
    let ln_a = ((beta * u).sin().ln() - u.sin().ln()) / (1.0 - beta) + ((1.0 - beta) * u).sin().ln()
        - (beta * u).sin().ln();
    ((1.0 - beta) / beta * (ln_a - e.ln())).exp()
}

pub fn sample_positive_stable(beta: f64, cfg: &SimConfig) -> Result<EmpiricalLaw> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Invalid(format!("stable index must lie in (0, 1], got {beta}")));
    }
    EmpiricalLaw::new(run_paths(cfg, DOMAIN_STABLE, cfg.n_paths, |rng| Ok(kanter(beta, rng)))?)
}

/// χ is the β-stable subordinator exactly when φ_β(u) = Γ(βu + β)/Γ(βu).
fn stable_index(tc: &TimeChange) -> Option<f64> {
    match tc.phi_beta.form() {
        Form::GammaRatio { scale, num, den }
            if *den == 0.0 && (scale - tc.beta).abs() < 1e-12 && (num - tc.beta).abs() < 1e-12 =>
        {
            Some(tc.beta)
        }
        _ => None,
    }
}

/// I = ∫₀^∞ e^{−ξ_t}dt for the subordinator with exponent φ_β.
fn subordinator_functional(stepper: &LevyStepper, dt: f64, rng: &mut ChaCha8Rng) -> f64 {
    let mean = stepper.mean.max(1e-300);
    let mut until = stepper.next_jump_in(rng);
    let (mut xi, mut integral, mut prev) = (0.0, 0.0, 1.0);
    loop {
        xi += stepper.increment(rng, dt, &mut until);
        let cur = (-xi).exp();
        integral += 0.5 * dt * (prev + cur);
        prev = cur;
        if cur / mean < NEGLIGIBLE_REMAINDER * integral {
            return integral;
        }
    }
}

/// Draws of λ₁ = χ₁^{−β} for a general χ by sampling-importance-resampling:
/// λ₁ has the law of I size-biased by 1/I.
fn lambda_one_resampled(tc: &TimeChange, cfg: &SimConfig) -> Result<Vec<f64>> {
    let triple = tc.phi_beta.triple().ok_or_else(|| {
        Error::Precondition(format!("no Lévy triple known for φ_β = {}", tc.phi_beta.label()))
    })?;
    let stepper = LevyStepper::subordinator(&triple, cfg.jump_cutoff)?;
    if !(stepper.mean > 0.0 && stepper.mean.is_finite()) {
        return Err(Error::Precondition("time change subordinator needs a finite positive mean".into()));
    }
    let pool = run_paths(cfg, DOMAIN_SUBORDINATOR, cfg.n_paths, |rng| {
        Ok(subordinator_functional(&stepper, cfg.dt, rng))
    })?;
    let mut cumulative = Vec::with_capacity(pool.len());
    let mut acc = 0.0;
    for i in &pool {
        acc += 1.0 / i;
        cumulative.push(acc);
    }
    let mut rng = path_rng(cfg.seed, DOMAIN_RESAMPLE, 0);
    Ok((0..cfg.n_paths)
        .map(|_| {
            let u = rng.random::<f64>() * acc;
            pool[cumulative.partition_point(|&c| c <= u).min(pool.len() - 1)]
        })
        .collect())
}

fn chi_raw(tc: &TimeChange, cfg: &SimConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if tc.is_deterministic() {
        // χ_t = t/φ′ scaling is absorbed: φ_β(u) = cu gives χ₁ = 1/c
        return Ok(vec![1.0 / tc.phi_beta_prime(); cfg.n_paths]);
    }
    if let Some(beta) = stable_index(tc) {
        return run_paths(cfg, DOMAIN_STABLE, cfg.n_paths, |rng| Ok(kanter(beta, rng)));
    }
    Ok(lambda_one_resampled(tc, cfg)?
        .into_iter()
        .map(|l| l.powf(-1.0 / tc.beta))
        .collect())
}

/// Samples of χ₁.
pub fn sample_chi(tc: &TimeChange, cfg: &SimConfig) -> Result<EmpiricalLaw> {
    EmpiricalLaw::new(chi_raw(tc, cfg)?)
}

/// Samples of λ_t = t^β χ₁^{−β}.
pub fn sample_inverse_subordinator(tc: &TimeChange, t: f64, cfg: &SimConfig) -> Result<EmpiricalLaw> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Invalid(format!("time must be positive, got {t}")));
    }
    let scale = t.powf(tc.beta);
    EmpiricalLaw::new(chi_raw(tc, cfg)?.into_iter().map(|c| scale * c.powf(-tc.beta)).collect())
}

/// λ_t as the first grid time at which a simulated β-stable subordinator passes t.
pub fn sample_inverse_subordinator_path(beta: f64, t: f64, cfg: &SimConfig) -> Result<EmpiricalLaw> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Invalid(format!("stable index must lie in (0, 1), got {beta}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Invalid(format!("time must be positive, got {t}")));
    }
    let ds = cfg.dt;
    let step_scale = ds.powf(1.0 / beta);
    EmpiricalLaw::new(run_paths(cfg, DOMAIN_INVERSE_PATH, cfg.n_paths, |rng| {
        let (mut s, mut sigma) = (0.0, 0.0);
        while sigma <= t {
            sigma += step_scale * kanter(beta, rng);
            s += ds;
        }
        Ok(s)
    })?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSample {
    pub law: EmpiricalLaw,
    /// Time horizon used before any extension.
    pub horizon: f64,
    /// Paths that needed the doubled horizon.
    pub extended: usize,
    /// Paths still not negligible at the doubled horizon.
    pub flagged: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
struct PathOutcome {
    value: f64,
    extended: bool,
    flagged: bool,
}

fn functional_path(stepper: &LevyStepper, slope: f64, horizon: f64, dt: f64, rng: &mut ChaCha8Rng) -> PathOutcome {
    let kill = stepper.killing_time(rng);
    let mut until = stepper.next_jump_in(rng);
    let (mut t, mut l, mut integral, mut prev) = (0.0, 0.0, 0.0, 1.0);
    let mut end = horizon;
    let (mut extended, mut flagged) = (false, false);
    while t < kill {
        if t >= end {
            if prev / slope <= HORIZON_REMAINDER * integral {
                break;
            }
            if extended {
                flagged = true;
                break;
            }
            extended = true;
            end = 2.0 * horizon;
        }
        let h = dt.min(kill - t);
        l += stepper.increment(rng, h, &mut until);
        let cur = l.exp();
        integral += 0.5 * h * (prev + cur);
        prev = cur;
        t += h;
        if cur / slope < NEGLIGIBLE_REMAINDER * integral {
            break;
        }
    }
    PathOutcome {
        value: integral,
        extended,
        flagged,
    }
}

/// Samples of T = x^α ∫₀^ζ e^{L_t}dt with L = αY read from the pair's Lévy triple.
pub fn sample_exponential_functional(pair: &WienerHopfPair, x: f64, cfg: &SimConfig) -> Result<FunctionalSample> {
    pair.require_class_n()?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Invalid(format!("starting point must be positive, got {x}")));
    }
    cfg.validate()?;
    let stepper = LevyStepper::two_sided(pair.levy_triple()?, cfg.jump_cutoff, cfg.gaussian_small_jumps)?;
    let slope = if stepper.mean < 0.0 {
        -stepper.mean
    } else if stepper.killing > 0.0 {
        stepper.killing
    } else {
        return Err(Error::Precondition("L neither drifts to −∞ nor is killed".into()));
    };
    let horizon = cfg
        .horizon
        .unwrap_or(50.0 / (pair.plus.at_zero() * pair.alpha).abs());
    let outcomes = run_paths(cfg, DOMAIN_FUNCTIONAL, cfg.n_paths, |rng| {
        Ok(functional_path(&stepper, slope, horizon, cfg.dt, rng))
    })?;
    let scale = x.powf(pair.alpha);
    Ok(FunctionalSample {
        law: EmpiricalLaw::new(outcomes.iter().map(|o| scale * o.value).collect())?,
        horizon,
        extended: outcomes.iter().filter(|o| o.extended).count(),
        flagged: outcomes.iter().filter(|o| o.flagged).count(),
    })
}

/// Samples of 𝕋 = χ₁ · T^{1/β} from independent χ₁ and T draws.
pub fn sample_extinction(
    pair: &WienerHopfPair,
    tc: &TimeChange,
    x: f64,
    cfg: &SimConfig,
) -> Result<FunctionalSample> {
    let t = sample_exponential_functional(pair, x, cfg)?;
    let chi = chi_raw(tc, cfg)?;
    // T draws come back sorted; pair them with χ₁ in index order of the
    // independent χ stream, which is itself exchangeable.
    let values = t
        .law
        .samples()
        .iter()
        .zip(&chi)
        .map(|(t, c)| c * t.powf(1.0 / tc.beta))
        .collect();
    Ok(FunctionalSample {
        law: EmpiricalLaw::new(values)?,
        ..t
    })
}
