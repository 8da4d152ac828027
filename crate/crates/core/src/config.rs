//! Run configuration and tolerance policy.
//!
//! Every threshold the library uses lives here and is echoed into each
//! report, so a run can be reproduced from its record alone.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Human,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed `|‖ψ‖ − 1|` for states handed to the statistics routines.
    pub norm_tol: f64,
    /// Imaginary residual of `⟨ψ, Aψ⟩` above which a warning is recorded,
    /// relative to the operator scale.
    pub herm_tol: f64,
    /// Boundary tolerance on a circle is `boundary_tol_factor · h`.
    pub boundary_tol_factor: f64,
    /// Successive increments of `‖Aψ‖²` must shrink at least this much.
    pub divergence_ratio: f64,
    /// Increments below `divergence_floor · max(1, ‖Aψ‖²)` count as converged.
    pub divergence_floor: f64,
    /// Number of grid doublings in a domain check.
    pub refinements: usize,
    /// `c` in `tol(h) = c·h² + relation_abs`. Measured discretization
    /// coefficients for circle packets with `|m| ≤ 3` stay below 4.
    pub relation_c: f64,
    pub relation_abs: f64,
    /// Largest acceptable `|x||ψ|²` at a truncated line edge.
    pub edge_tol: f64,
    /// Widenings tried before flagging a line state as truncation-suspect.
    pub max_widenings: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            norm_tol: 1e-9,
            herm_tol: 1e-8,
            boundary_tol_factor: 10.0,
            divergence_ratio: 0.9,
            divergence_floor: 1e-9,
            refinements: 4,
            relation_c: 10.0,
            relation_abs: 1e-10,
            edge_tol: 1e-12,
            max_widenings: 3,
        }
    }
}

impl Tolerances {
    /// `tol(h) = (c·h² + abs) · scale`.
    pub fn relation_tol(&self, h: f64, scale: f64) -> f64 {
        (self.relation_c * h * h + self.relation_abs) * scale
    }

    pub fn boundary_tol(&self, h: f64) -> f64 {
        self.boundary_tol_factor * h
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("norm_tol", self.norm_tol),
            ("herm_tol", self.herm_tol),
            ("boundary_tol_factor", self.boundary_tol_factor),
            ("divergence_ratio", self.divergence_ratio),
            ("divergence_floor", self.divergence_floor),
            ("relation_c", self.relation_c),
            ("relation_abs", self.relation_abs),
            ("edge_tol", self.edge_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("tolerance {name} must be > 0 (got {v})")));
            }
        }
        if self.divergence_ratio >= 1.0 {
            return Err(Error::InvalidInput("divergence_ratio must be < 1".into()));
        }
        if self.refinements < 2 {
            return Err(Error::InvalidInput("refinements must be >= 2".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridDefaults {
    pub circle_n: usize,
    pub line_n: usize,
}

impl Default for GridDefaults {
    fn default() -> Self {
        GridDefaults { circle_n: 4097, line_n: 4097 }
    }
}

/// Parameters of the `(λ, θ)` grid used by the quadratic-form check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadraticFormGrid {
    pub lambda_points: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub theta_points: usize,
}

impl Default for QuadraticFormGrid {
    fn default() -> Self {
        QuadraticFormGrid { lambda_points: 41, lambda_min: 1e-3, lambda_max: 1e3, theta_points: 16 }
    }
}

impl QuadraticFormGrid {
    /// Geometric positive grid plus its mirror image.
    pub fn lambdas(&self) -> Vec<f64> {
        let k = self.lambda_points.max(2);
        let (l0, l1) = (self.lambda_min.ln(), self.lambda_max.ln());
        let pos: Vec<f64> = (0..k).map(|i| (l0 + (l1 - l0) * i as f64 / (k - 1) as f64).exp()).collect();
        pos.iter().map(|v| -v).rev().chain(pos.iter().copied()).collect()
    }

    pub fn thetas(&self) -> Vec<f64> {
        let k = self.theta_points.max(1);
        (0..k).map(|i| crate::grid::TWO_PI * i as f64 / k as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub hbar: f64,
    pub grid: GridDefaults,
    pub tolerances: Tolerances,
    pub oracle_cap: usize,
    pub output: OutputFormat,
    pub quadratic_form: QuadraticFormGrid,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            hbar: 1.0,
            grid: GridDefaults::default(),
            tolerances: Tolerances::default(),
            oracle_cap: 2049,
            output: OutputFormat::Json,
            quadratic_form: QuadraticFormGrid::default(),
        }
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::InvalidInput(format!("hbar must be > 0 (got {})", self.hbar)));
        }
        if self.grid.circle_n < 3 || self.grid.line_n < 3 {
            return Err(Error::InvalidInput("grid sizes must be >= 3".into()));
        }
        if self.oracle_cap < 3 {
            return Err(Error::InvalidInput("oracle_cap must be >= 3".into()));
        }
        let q = &self.quadratic_form;
        if !(q.lambda_min > 0.0 && q.lambda_max > q.lambda_min) || q.theta_points == 0 {
            return Err(Error::InvalidInput("invalid quadratic_form grid".into()));
        }
        self.tolerances.validate()
    }
}
