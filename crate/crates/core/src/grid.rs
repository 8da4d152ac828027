//! Uniform one-dimensional grids, sampled wave functions and the trapezoid
//! inner product.
//!
//! Circle grids keep both `φ = 0` and `φ = 2π` as separate samples. Periodic
//! storage would make `ψ(0)` and `ψ(2π)` the same number, and the boundary
//! diagnostics in [`crate::operators`] depend on telling them apart.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// Discretization of the configuration space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridTopology {
    /// Segment `[x_min, x_max]` sampled at both ends.
    Line { x_min: f64, x_max: f64, n_points: usize },
    /// Polar angle, `φ_k = 2πk/(n−1)` for `k = 0..n`.
    Circle { n_points: usize },
}

impl GridTopology {
    pub fn line(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::InvalidGrid(format!("line needs finite x_min < x_max (got {x_min}, {x_max})")));
        }
        if n_points < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 points (got {n_points})")));
        }
        Ok(GridTopology::Line { x_min, x_max, n_points })
    }

    pub fn circle(n_points: usize) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 points (got {n_points})")));
        }
        Ok(GridTopology::Circle { n_points })
    }

    pub fn n_points(&self) -> usize {
        match *self {
            GridTopology::Line { n_points, .. } | GridTopology::Circle { n_points } => n_points,
        }
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, GridTopology::Circle { .. })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            GridTopology::Line { .. } => "line",
            GridTopology::Circle { .. } => "circle",
        }
    }

    pub fn start(&self) -> f64 {
        match *self {
            GridTopology::Line { x_min, .. } => x_min,
            GridTopology::Circle { .. } => 0.0,
        }
    }

    pub fn end(&self) -> f64 {
        match *self {
            GridTopology::Line { x_max, .. } => x_max,
            GridTopology::Circle { .. } => TWO_PI,
        }
    }

    pub fn step(&self) -> f64 {
        (self.end() - self.start()) / (self.n_points() - 1) as f64
    }

    /// Coordinate of node `k`; the last node is pinned to the right endpoint.
    pub fn coordinate(&self, k: usize) -> f64 {
        let n = self.n_points();
        if k + 1 == n {
            self.end()
        } else {
            self.start() + k as f64 * self.step()
        }
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n_points()).map(|k| self.coordinate(k)).collect()
    }

    /// Composite trapezoid weights.
    pub fn weights(&self) -> Vec<f64> {
        let n = self.n_points();
        let h = self.step();
        let mut w = vec![h; n];
        w[0] = 0.5 * h;
        w[n - 1] = 0.5 * h;
        w
    }

    /// Same extent with `(n−1)·factor + 1` points.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        if factor < 1 {
            return Err(Error::InvalidInput("refinement factor must be positive".into()));
        }
        let n = (self.n_points() - 1) * factor + 1;
        Ok(match *self {
            GridTopology::Line { x_min, x_max, .. } => GridTopology::Line { x_min, x_max, n_points: n },
            GridTopology::Circle { .. } => GridTopology::Circle { n_points: n },
        })
    }

    /// If `finer` is an integer refinement of `self`, the factor.
    pub fn refinement_factor(&self, finer: &GridTopology) -> Option<usize> {
        let same_extent = match (self, finer) {
            (GridTopology::Circle { .. }, GridTopology::Circle { .. }) => true,
            (GridTopology::Line { x_min: a0, x_max: a1, .. }, GridTopology::Line { x_min: b0, x_max: b1, .. }) => {
                a0 == b0 && a1 == b1
            }
            _ => false,
        };
        let (n, m) = (self.n_points() - 1, finer.n_points() - 1);
        (same_extent && m >= n && m % n == 0).then_some(m / n)
    }

    pub fn ensure_same(&self, other: &GridTopology) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::TopologyMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// Something that can sample the same physical state on any grid. Analytic
/// recipes implement this so refinement is exact rather than interpolated.
pub trait StateSource: Send + Sync + fmt::Debug {
    fn realize_on(&self, topology: &GridTopology) -> Result<WaveFunction>;
}

/// Complex amplitudes on a [`GridTopology`].
#[derive(Clone)]
pub struct WaveFunction {
    topology: GridTopology,
    amplitudes: Vec<Complex64>,
    source: Option<Arc<dyn StateSource>>,
}

impl fmt::Debug for WaveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WaveFunction")
            .field("topology", &self.topology)
            .field("n", &self.amplitudes.len())
            .field("source", &self.source)
            .finish()
    }
}

impl WaveFunction {
    pub fn new(topology: GridTopology, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != topology.n_points() {
            return Err(Error::TopologyMismatch(format!(
                "{} amplitudes for a grid of {} points",
                amplitudes.len(),
                topology.n_points()
            )));
        }
        if let Some(k) = amplitudes.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidInput(format!("non-finite amplitude at node {k}")));
        }
        Ok(WaveFunction { topology, amplitudes, source: None })
    }

    pub fn from_fn(topology: GridTopology, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let amps = topology.coordinates().into_iter().map(f).collect();
        Self::new(topology, amps)
    }

    pub fn zeros(topology: GridTopology) -> Self {
        let n = topology.n_points();
        WaveFunction { topology, amplitudes: vec![Complex64::new(0.0, 0.0); n], source: None }
    }

    /// Attach a resampling source (consumed by [`refine`]).
    pub fn with_source(mut self, source: Arc<dyn StateSource>) -> Self {
        self.source = Some(source);
        self
    }

    pub fn topology(&self) -> &GridTopology {
        &self.topology
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn source(&self) -> Option<&Arc<dyn StateSource>> {
        self.source.as_ref()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Amplitude at the left endpoint (`φ = 0` on a circle).
    pub fn first(&self) -> Complex64 {
        self.amplitudes[0]
    }

    /// Amplitude at the right endpoint (`φ = 2π` on a circle).
    pub fn last(&self) -> Complex64 {
        self.amplitudes[self.amplitudes.len() - 1]
    }

    pub fn scaled(&self, c: Complex64) -> WaveFunction {
        WaveFunction {
            topology: self.topology.clone(),
            amplitudes: self.amplitudes.iter().map(|z| z * c).collect(),
            source: None,
        }
    }

    /// `self + c·other`; the result has no resampling source.
    pub fn add_scaled(&self, c: Complex64, other: &WaveFunction) -> Result<WaveFunction> {
        self.topology.ensure_same(&other.topology)?;
        let amps = self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a + c * b).collect();
        Ok(WaveFunction { topology: self.topology.clone(), amplitudes: amps, source: None })
    }

    pub(crate) fn with_amplitudes(&self, amplitudes: Vec<Complex64>) -> WaveFunction {
        debug_assert_eq!(amplitudes.len(), self.amplitudes.len());
        WaveFunction { topology: self.topology.clone(), amplitudes, source: None }
    }

    /// Probability density `|ψ|²` at each node.
    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// `⟨χ, ψ⟩`, conjugate-linear in `χ`, by the composite trapezoid rule.
pub fn inner_product(chi: &WaveFunction, psi: &WaveFunction) -> Result<Complex64> {
    chi.topology.ensure_same(&psi.topology)?;
    Ok(weighted_dot(&chi.topology.weights(), &chi.amplitudes, &psi.amplitudes))
}

pub(crate) fn weighted_dot(w: &[f64], a: &[Complex64], b: &[Complex64]) -> Complex64 {
    w.iter().zip(a).zip(b).map(|((w, a), b)| a.conj() * b * *w).sum()
}

pub(crate) fn weighted_norm_sqr(w: &[f64], a: &[Complex64]) -> f64 {
    w.iter().zip(a).map(|(w, a)| w * a.norm_sqr()).sum()
}

pub fn norm(psi: &WaveFunction) -> f64 {
    weighted_norm_sqr(&psi.topology.weights(), &psi.amplitudes).sqrt()
}

pub fn normalize(psi: &WaveFunction) -> Result<WaveFunction> {
    let nrm = norm(psi);
    if nrm == 0.0 || !nrm.is_finite() {
        return Err(Error::DegenerateState);
    }
    let inv = 1.0 / nrm;
    Ok(WaveFunction {
        topology: psi.topology.clone(),
        amplitudes: psi.amplitudes.iter().map(|z| z * inv).collect(),
        source: psi.source.clone(),
    })
}

/// Same state on a grid with `(n−1)·factor + 1` points. Source-backed states
/// are re-sampled exactly; bare samples are interpolated with local cubics.
pub fn refine(psi: &WaveFunction, factor: usize) -> Result<WaveFunction> {
    if factor < 2 {
        return Err(Error::InvalidInput(format!("refinement factor must be >= 2 (got {factor})")));
    }
    let topology = psi.topology.refined(factor)?;
    match &psi.source {
        Some(src) => src.realize_on(&topology),
        None => {
            let amps = interpolate_refined(&psi.amplitudes, factor);
            WaveFunction::new(topology, amps)
        }
    }
}

/// Four-point Lagrange interpolation onto a grid refined by `factor`.
pub(crate) fn interpolate_refined<T>(values: &[T], factor: usize) -> Vec<T>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
{
    let n = values.len();
    if factor == 1 {
        return values.to_vec();
    }
    let m = (n - 1) * factor + 1;
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let k = j / factor;
        let r = j % factor;
        if r == 0 {
            out.push(values[k]);
            continue;
        }
        let t = k as f64 + r as f64 / factor as f64;
        if n < 4 {
            let (a, b) = (values[k], values[k + 1]);
            let s = t - k as f64;
            out.push(a * (1.0 - s) + b * s);
            continue;
        }
        let base = k.saturating_sub(1).min(n - 4);
        let nodes = [base, base + 1, base + 2, base + 3];
        let mut acc: Option<T> = None;
        for (i, &ni) in nodes.iter().enumerate() {
            let mut l = 1.0;
            for (jj, &nj) in nodes.iter().enumerate() {
                if i != jj {
                    l *= (t - nj as f64) / (ni as f64 - nj as f64);
                }
            }
            let term = values[ni] * l;
            acc = Some(match acc {
                Some(a) => a + term,
                None => term,
            });
        }
        out.push(acc.expect("four nodes"));
    }
    out
}
