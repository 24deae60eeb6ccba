use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

/// Propagator construction path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Diagonalized unless the coupling sits within 1e-6·g of the exceptional point.
    #[default]
    Auto,
    /// Similarity transform to the diagonal generator.
    Diagonalized,
    /// Scaling-and-squaring exponential of `−i H_eff t`.
    Direct,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Method::Auto),
            "diagonalized" => Ok(Method::Diagonalized),
            "direct" => Ok(Method::Direct),
            other => Err(Error::Config(format!(
                "unknown method '{other}' (expected auto, diagonalized or direct)"
            ))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Auto => "auto",
            Method::Diagonalized => "diagonalized",
            Method::Direct => "direct",
        })
    }
}

/// Physical and numerical parameters of a simulation.
///
/// Rates are absolute (the CLI defaults `g` to 1 so that all rates read in
/// units of `g`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Mode coupling `g > 0`.
    pub g: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Mean thermal occupation of the reservoir.
    pub nbar: f64,
    /// Per-mode cutoff of the output space (the working space may be larger,
    /// see [`SimConfig::pad_tolerance`]).
    pub cutoff: usize,
    pub method: Method,
    /// Target truncation error used to extend the working space beyond
    /// `cutoff` at finite temperature. `None` keeps the working space at
    /// `cutoff` exactly.
    pub pad_tolerance: Option<f64>,
}

pub const DEFAULT_PAD_TOLERANCE: f64 = 1e-8;

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            g: 1.0,
            gamma1: 0.0,
            gamma2: 0.0,
            nbar: 0.0,
            cutoff: 6,
            method: Method::Auto,
            pad_tolerance: Some(DEFAULT_PAD_TOLERANCE),
        }
    }
}

impl SimConfig {
    pub fn new(g: f64, gamma1: f64, gamma2: f64, nbar: f64, cutoff: usize) -> Result<Self> {
        let c = Self { g, gamma1, gamma2, nbar, cutoff, ..Self::default() };
        c.validate()?;
        Ok(c)
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_padding(mut self, tol: Option<f64>) -> Self {
        self.pad_tolerance = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(Error::Config(format!("coupling g must be > 0, got {}", self.g)));
        }
        for (name, v) in [("gamma1", self.gamma1), ("gamma2", self.gamma2), ("nbar", self.nbar)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be ≥ 0, got {v}")));
            }
        }
        if let Some(tol) = self.pad_tolerance {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(Error::Config(format!("pad tolerance must lie in (0, 1), got {tol}")));
            }
        }
        Ok(())
    }

    /// `γ = γ₁ + γ₂`.
    pub fn gamma(&self) -> f64 {
        self.gamma1 + self.gamma2
    }

    /// `Δ = γ₂ − γ₁`.
    pub fn delta(&self) -> f64 {
        self.gamma2 - self.gamma1
    }
}
