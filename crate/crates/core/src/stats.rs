//! Means, uncertainties, covariances and cross terms that only require
//! `ψ ∈ D(A)` (and `D(B)`), never `D(A²)` or `D(AB)`.
//!
//! `ΔA` is computed as the norm `‖Aψ − ⟨A⟩ψ‖`; the second-moment form
//! `⟨A²⟩ − ⟨A⟩²` is available only as [`second_moment_variance`] for
//! cross-checking on states where both exist.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::grid::{self, WaveFunction};
use crate::operators::{self, apply, DomainReport, OperatorSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub operator_a: String,
    pub operator_b: String,
    pub mean_a: f64,
    pub mean_b: f64,
    pub delta_a: f64,
    pub delta_b: f64,
    /// `Re⟨Aψ, Bψ⟩ − ⟨A⟩⟨B⟩`.
    pub covariance: f64,
    /// `Im⟨Aψ, Bψ⟩`.
    pub imag_cross: f64,
    /// `i⟨ψ, [A, B]ψ⟩`, present only when `ψ ∈ D(AB) ∩ D(BA)`.
    pub commutator_expectation: Option<f64>,
    /// `Im⟨ψ, Aψ⟩`; nonzero values measure the discrete Hermiticity defect.
    pub mean_residual_a: f64,
    pub mean_residual_b: f64,
    pub warnings: Vec<String>,
}

/// `⟨A⟩` with the imaginary part that was discarded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mean {
    pub value: f64,
    pub imag_residual: f64,
}

fn require_normalized(psi: &WaveFunction, tol: &Tolerances) -> Result<()> {
    let n = grid::norm(psi);
    if (n - 1.0).abs() > tol.norm_tol {
        return Err(Error::NotNormalized { norm: n });
    }
    Ok(())
}

fn gate(a: &OperatorSpec, psi: &WaveFunction, tol: &Tolerances) -> Result<DomainReport> {
    operators::domain_check(a, psi, tol)?.require()
}

/// Everything computable from `Aψ` and `Bψ` without further checks.
#[derive(Clone, Debug)]
pub(crate) struct Moments {
    pub mean_a: Mean,
    pub mean_b: Mean,
    pub delta_a: f64,
    pub delta_b: f64,
    pub cross: Complex64,
    /// `Āψ` and `B̄ψ`.
    pub centered_a: Vec<Complex64>,
    pub centered_b: Vec<Complex64>,
}

impl Moments {
    pub fn covariance(&self) -> f64 {
        self.cross.re - self.mean_a.value * self.mean_b.value
    }

    pub fn imag_cross(&self) -> f64 {
        self.cross.im
    }
}

pub(crate) fn centered(a_psi: &[Complex64], psi: &[Complex64], mean: f64) -> Vec<Complex64> {
    a_psi.iter().zip(psi).map(|(a, p)| a - p * mean).collect()
}

pub(crate) fn moments_from(w: &[f64], psi: &[Complex64], a_psi: &[Complex64], b_psi: &[Complex64]) -> Moments {
    let ma = grid::weighted_dot(w, psi, a_psi);
    let mb = grid::weighted_dot(w, psi, b_psi);
    let mean_a = Mean { value: ma.re, imag_residual: ma.im };
    let mean_b = Mean { value: mb.re, imag_residual: mb.im };
    let centered_a = centered(a_psi, psi, mean_a.value);
    let centered_b = centered(b_psi, psi, mean_b.value);
    Moments {
        mean_a,
        mean_b,
        delta_a: grid::weighted_norm_sqr(w, &centered_a).sqrt(),
        delta_b: grid::weighted_norm_sqr(w, &centered_b).sqrt(),
        cross: grid::weighted_dot(w, a_psi, b_psi),
        centered_a,
        centered_b,
    }
}

/// Unchecked moments for a pair; callers are responsible for domain gating.
pub(crate) fn pair_moments(a: &OperatorSpec, b: &OperatorSpec, psi: &WaveFunction) -> Result<Moments> {
    let a_psi = apply(a, psi)?;
    let b_psi = apply(b, psi)?;
    let w = psi.topology().weights();
    Ok(moments_from(&w, psi.amplitudes(), a_psi.amplitudes(), b_psi.amplitudes()))
}

/// `i⟨ψ, (AB − BA)ψ⟩` without domain checks.
pub(crate) fn raw_commutator(a: &OperatorSpec, b: &OperatorSpec, psi: &WaveFunction) -> Result<Complex64> {
    let ab = apply(a, &apply(b, psi)?)?;
    let ba = apply(b, &apply(a, psi)?)?;
    let diff = ab.add_scaled(Complex64::new(-1.0, 0.0), &ba)?;
    Ok(Complex64::new(0.0, 1.0) * grid::inner_product(psi, &diff)?)
}

/// `⟨A⟩ = Re⟨ψ, Aψ⟩`, refusing states outside `D(A)`.
pub fn expectation(a: &OperatorSpec, psi: &WaveFunction, tol: &Tolerances) -> Result<Mean> {
    require_normalized(psi, tol)?;
    gate(a, psi, tol)?;
    let z = grid::inner_product(psi, &apply(a, psi)?)?;
    Ok(Mean { value: z.re, imag_residual: z.im })
}

/// `ΔA = ‖(A − ⟨A⟩)ψ‖`; defined on all of `D(A)`.
pub fn uncertainty(a: &OperatorSpec, psi: &WaveFunction, tol: &Tolerances) -> Result<f64> {
    require_normalized(psi, tol)?;
    gate(a, psi, tol)?;
    let m = pair_moments(a, a, psi)?;
    Ok(m.delta_a)
}

/// `σ_AB = Re⟨Aψ, Bψ⟩ − ⟨A⟩⟨B⟩`; symmetric in `A` and `B`.
pub fn covariance(a: &OperatorSpec, b: &OperatorSpec, psi: &WaveFunction, tol: &Tolerances) -> Result<f64> {
    require_normalized(psi, tol)?;
    gate(a, psi, tol)?;
    gate(b, psi, tol)?;
    Ok(pair_moments(a, b, psi)?.covariance())
}

/// `Im⟨Aψ, Bψ⟩`; antisymmetric in `A` and `B`.
pub fn imag_cross(a: &OperatorSpec, b: &OperatorSpec, psi: &WaveFunction, tol: &Tolerances) -> Result<f64> {
    require_normalized(psi, tol)?;
    gate(a, psi, tol)?;
    gate(b, psi, tol)?;
    Ok(pair_moments(a, b, psi)?.imag_cross())
}

/// `i⟨[A, B]⟩`, which is real for observables. Requires both `ψ ∈ D(AB)`
/// and `ψ ∈ D(BA)`; otherwise the failing report comes back as
/// [`Error::Inapplicable`].
pub fn commutator_expectation(a: &OperatorSpec, b: &OperatorSpec, psi: &WaveFunction, tol: &Tolerances) -> Result<f64> {
    require_normalized(psi, tol)?;
    let (ab, ba) = operators::composite_domain_check(a, b, psi, tol)?;
    ab.require()?;
    ba.require()?;
    Ok(raw_commutator(a, b, psi)?.re)
}

/// `⟨ψ, A²ψ⟩ − ⟨A⟩²`. Only meaningful for `ψ ∈ D(A²)`; no check is made.
pub fn second_moment_variance(a: &OperatorSpec, psi: &WaveFunction) -> Result<f64> {
    let a_psi = apply(a, psi)?;
    let a2_psi = apply(a, &a_psi)?;
    let mean = grid::inner_product(psi, &a_psi)?.re;
    Ok(grid::inner_product(psi, &a2_psi)?.re - mean * mean)
}

/// All statistics for a pair in one pass, with the commutator term filled
/// in only when the composite domains check out.
pub fn stat_report(a: &OperatorSpec, b: &OperatorSpec, psi: &WaveFunction, tol: &Tolerances) -> Result<StatReport> {
    let (report, _) = stat_report_with_domains(a, b, psi, tol)?;
    Ok(report)
}

/// As [`stat_report`], also returning the domain reports for `A`, `B`,
/// `AB` and `BA` (in that order).
pub fn stat_report_with_domains(
    a: &OperatorSpec,
    b: &OperatorSpec,
    psi: &WaveFunction,
    tol: &Tolerances,
) -> Result<(StatReport, Vec<DomainReport>)> {
    require_normalized(psi, tol)?;
    let ra = gate(a, psi, tol)?;
    let rb = gate(b, psi, tol)?;
    let (ab, ba) = operators::composite_domain_check(a, b, psi, tol)?;
    let m = pair_moments(a, b, psi)?;
    let commutator = if ab.is_member() && ba.is_member() { Some(raw_commutator(a, b, psi)?.re) } else { None };
    let report = build_report(a, b, &m, commutator, tol);
    Ok((report, vec![ra, rb, ab, ba]))
}

pub(crate) fn build_report(
    a: &OperatorSpec,
    b: &OperatorSpec,
    m: &Moments,
    commutator: Option<f64>,
    tol: &Tolerances,
) -> StatReport {
    let mut warnings = Vec::new();
    for (op, mean) in [(a, &m.mean_a), (b, &m.mean_b)] {
        let limit = tol.herm_tol * op.scale().max(mean.value.abs());
        if mean.imag_residual.abs() > limit {
            warnings.push(format!(
                "<{}> has imaginary residual {:.3e} (> {:.1e}): discrete Hermiticity defect",
                op.label(),
                mean.imag_residual,
                limit
            ));
        }
    }
    StatReport {
        operator_a: a.label(),
        operator_b: b.label(),
        mean_a: m.mean_a.value,
        mean_b: m.mean_b.value,
        delta_a: m.delta_a,
        delta_b: m.delta_b,
        covariance: m.covariance(),
        imag_cross: m.imag_cross(),
        commutator_expectation: commutator,
        mean_residual_a: m.mean_a.imag_residual,
        mean_residual_b: m.mean_b.imag_residual,
        warnings,
    }
}
