//! Model specifications as `key=value` text.
//!
//! Entries are separated by newlines, commas or semicolons; `#` starts a
//! comment. Unknown keys, keys that the chosen `kind` does not use, and
//! repeated keys are rejected.
//!
//! ```
//! use ssmp::model_spec::ModelSpec;
//! let spec = ModelSpec::parse("kind=brownian, time_change=stable, beta=0.5").unwrap();
//! let pair = spec.pair().unwrap();
//! assert_eq!(pair.alpha, 2.0);
//! assert_eq!(spec.time_change().unwrap().beta, 0.5);
//! ```

use std::collections::BTreeMap;

use crate::bernstein::{BernsteinFunction, WienerHopfPair};
use crate::error::{Error, Result};
use crate::mellin::TimeChange;

/// Keys accepted for every kind.
const COMMON: &[&str] = &["kind", "x", "beta", "time_change", "tc_drift", "tc_jump_rate", "tc_jump_decay"];

/// Kinds with the parameters each one reads.
const KINDS: &[(&str, &[&str])] = &[
    ("identity", &[]),
    ("affine", &["c", "shift"]),
    ("compound_poisson", &["killing", "drift", "jump_rate", "jump_decay"]),
    ("gamma_ratio", &["scale", "num", "den"]),
    ("stable_subordinator", &[]),
    ("power", &["c", "gamma"]),
    ("brownian", &["side"]),
    ("stable_example", &["a", "rho", "b", "side"]),
    ("poisson_pair", &["drift", "shift", "killing", "jump_rate", "jump_decay", "side"]),
];

const TIME_CHANGES: &[&str] = &["none", "stable", "s_transform", "compound_poisson", "phi"];

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelSpec {
    values: BTreeMap<String, String>,
}

fn all_keys() -> impl Iterator<Item = &'static str> {
    COMMON.iter().copied().chain(KINDS.iter().flat_map(|(_, k)| k.iter().copied()))
}

impl ModelSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec = Self::parse_entries(text)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Reads the entries without the kind-level checks, so that overrides can
    /// be applied before [`ModelSpec::validate`].
    pub fn parse_entries(text: &str) -> Result<Self> {
        let mut spec = ModelSpec::default();
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("");
            for item in line.split([',', ';']) {
                let item = item.trim();
                if item.is_empty() {
                    continue;
                }
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| Error::Invalid(format!("expected key=value, got `{item}`")))?;
                let k = k.trim();
                if spec.values.contains_key(k) {
                    return Err(Error::Invalid(format!("key `{k}` given twice")));
                }
                spec.set(k, v.trim())?;
            }
        }
        Ok(spec)
    }

    /// Sets or overrides one entry; the key must be known.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !all_keys().any(|k| k == key) {
            return Err(Error::Invalid(format!("unknown model key `{key}`")));
        }
        if value.is_empty() {
            return Err(Error::Invalid(format!("empty value for `{key}`")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Checks the kind, the key set and the numeric values.
    pub fn validate(&self) -> Result<()> {
        let kind = self.kind()?;
        let own = KINDS
            .iter()
            .find(|(k, _)| *k == kind)
            .map(|(_, keys)| *keys)
            .ok_or_else(|| {
                let names: Vec<&str> = KINDS.iter().map(|(k, _)| *k).collect();
                Error::Invalid(format!("unknown kind `{kind}`; expected one of {}", names.join(", ")))
            })?;
        for key in self.values.keys() {
            if !COMMON.contains(&key.as_str()) && !own.contains(&key.as_str()) {
                return Err(Error::Invalid(format!("key `{key}` is not used by kind={kind}")));
            }
        }
        for (key, value) in &self.values {
            if !matches!(key.as_str(), "kind" | "time_change" | "side") {
                self.num(key)?;
            } else if key == "time_change" && !TIME_CHANGES.contains(&value.as_str()) {
                return Err(Error::Invalid(format!(
                    "unknown time_change `{value}`; expected one of {}",
                    TIME_CHANGES.join(", ")
                )));
            } else if key == "side" && !matches!(value.as_str(), "minus" | "plus") {
                return Err(Error::Invalid(format!("side must be minus or plus, got `{value}`")));
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> Result<&str> {
        self.values
            .get("kind")
            .map(String::as_str)
            .ok_or_else(|| Error::Invalid("missing key `kind`".into()))
    }

    /// Whether the spec describes a Wiener–Hopf pair rather than a single φ.
    pub fn is_pair(&self) -> bool {
        matches!(self.kind(), Ok("brownian" | "stable_example" | "poisson_pair"))
    }

    fn num(&self, key: &str) -> Result<f64> {
        let raw = self
            .values
            .get(key)
            .ok_or_else(|| Error::Invalid(format!("missing key `{key}`")))?;
        let v: f64 = raw
            .parse()
            .map_err(|_| Error::Invalid(format!("`{key}` must be a number, got `{raw}`")))?;
        if !v.is_finite() {
            return Err(Error::Invalid(format!("`{key}` must be finite, got {raw}")));
        }
        Ok(v)
    }

    fn num_or(&self, key: &str, default: f64) -> Result<f64> {
        if self.values.contains_key(key) {
            self.num(key)
        } else {
            Ok(default)
        }
    }

    /// Starting point x (default 1).
    pub fn x(&self) -> Result<f64> {
        let x = self.num_or("x", 1.0)?;
        if !(x > 0.0) {
            return Err(Error::Invalid(format!("x must be positive, got {x}")));
        }
        Ok(x)
    }

    /// Time-change index β (default 1).
    pub fn beta(&self) -> Result<f64> {
        let b = self.num_or("beta", 1.0)?;
        if !(b > 0.0) {
            return Err(Error::Invalid(format!("beta must be positive, got {b}")));
        }
        Ok(b)
    }

    /// The Bernstein function of a φ kind, or φ⁻ (φ⁺ with side=plus) of a pair kind.
    pub fn phi(&self) -> Result<BernsteinFunction> {
        self.validate()?;
        match self.kind()? {
            "identity" => Ok(BernsteinFunction::identity()),
            "affine" => BernsteinFunction::affine(self.num_or("c", 1.0)?, self.num_or("shift", 0.0)?),
            "compound_poisson" => BernsteinFunction::compound_poisson(
                self.num_or("killing", 0.0)?,
                self.num_or("drift", 0.0)?,
                self.num_or("jump_rate", 0.0)?,
                self.num_or("jump_decay", 1.0)?,
            ),
            "gamma_ratio" => BernsteinFunction::gamma_ratio(self.num("scale")?, self.num("num")?, self.num("den")?),
            "stable_subordinator" => BernsteinFunction::stable_subordinator(self.beta()?),
            "power" => BernsteinFunction::power(self.num_or("c", 1.0)?, self.num("gamma")?),
            _ => {
                let pair = self.pair()?;
                Ok(match self.values.get("side").map(String::as_str) {
                    Some("plus") => pair.plus,
                    _ => pair.minus,
                })
            }
        }
    }

    pub fn pair(&self) -> Result<WienerHopfPair> {
        self.validate()?;
        match self.kind()? {
            "brownian" => Ok(WienerHopfPair::brownian()),
            "stable_example" => WienerHopfPair::stable_example(self.num("a")?, self.num("rho")?, self.num("b")?),
            "poisson_pair" => WienerHopfPair::poisson_pair(
                self.num_or("drift", 1.0)?,
                self.num_or("shift", 0.0)?,
                self.num("killing")?,
                self.num_or("jump_rate", 1.0)?,
                self.num_or("jump_decay", 1.0)?,
            ),
            other => Err(Error::Invalid(format!("kind={other} is a Bernstein function, not a pair"))),
        }
    }

    /// The time change χ; `none` (the default) is χ_t = t and requires β = 1.
    pub fn time_change(&self) -> Result<TimeChange> {
        self.validate()?;
        let beta = self.beta()?;
        let default = if self.kind()? == "stable_subordinator" { "phi" } else { "none" };
        match self.values.get("time_change").map_or(default, String::as_str) {
            "none" => {
                if beta != 1.0 {
                    return Err(Error::Invalid(format!("beta = {beta} needs a time_change")));
                }
                Ok(TimeChange::identity())
            }
            "stable" => TimeChange::stable(beta),
            "s_transform" => TimeChange::from_phi_beta(self.pair()?.plus.s_transform()?, beta),
            "compound_poisson" => TimeChange::new(
                &BernsteinFunction::compound_poisson(
                    0.0,
                    self.num_or("tc_drift", 0.0)?,
                    self.num_or("tc_jump_rate", 0.0)?,
                    self.num_or("tc_jump_decay", 1.0)?,
                )?,
                beta,
            ),
            "phi" => {
                if self.is_pair() {
                    return Err(Error::Invalid("time_change=phi needs a Bernstein-function kind".into()));
                }
                TimeChange::new(&self.phi()?, beta)
            }
            other => Err(Error::Invalid(format!("unknown time_change `{other}`"))),
        }
    }

    /// Canonical one-entry-per-line form, sorted by key.
    pub fn echo(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}
