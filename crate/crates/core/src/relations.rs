//! Uncertainty inequalities with explicit applicability gating.
//!
//! Three bounds on `ΔA ΔB` are evaluated:
//!
//! | bound        | right-hand side                        | needs                |
//! |--------------|----------------------------------------|----------------------|
//! | modified     | `√(σ_AB² + (Im⟨Aψ, Bψ⟩)²)`             | `ψ ∈ D(A) ∩ D(B)`    |
//! | commutator   | `√(σ_AB² + ¼(i⟨[A, B]⟩)²)`             | `ψ ∈ D(AB) ∩ D(BA)`  |
//! | standard     | `½ |i⟨[A, B]⟩|`                         | `ψ ∈ D(AB) ∩ D(BA)`  |
//!
//! A bound whose requirement fails is reported as inapplicable together with
//! the domain report that failed; no number is produced for it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::grid::{self, GridTopology, WaveFunction, TWO_PI};
use crate::operators::{self, DomainReason, DomainReport, OperatorSpec};
use crate::stats::{self, StatReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Applicability {
    Applies,
    InapplicableDomain { reason: DomainReason, evidence: Box<DomainReport> },
    NotEvaluated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub bound: Option<f64>,
    pub applicability: Applicability,
    pub satisfied: Option<bool>,
    /// `lhs − bound`.
    pub margin: Option<f64>,
}

impl BoundCheck {
    fn evaluated(lhs: f64, bound: f64, tol: f64) -> Self {
        let margin = lhs - bound;
        BoundCheck {
            bound: Some(bound),
            applicability: Applicability::Applies,
            satisfied: Some(margin >= -tol),
            margin: Some(margin),
        }
    }

    fn inapplicable(evidence: DomainReport) -> Self {
        BoundCheck {
            bound: None,
            applicability: Applicability::InapplicableDomain { reason: evidence.reason, evidence: Box::new(evidence) },
            satisfied: None,
            margin: None,
        }
    }

    fn not_evaluated() -> Self {
        BoundCheck { bound: None, applicability: Applicability::NotEvaluated, satisfied: None, margin: None }
    }

    pub fn applies(&self) -> bool {
        self.applicability == Applicability::Applies
    }
}

/// Schwarz-equality evidence: how far `Āψ` and `B̄ψ` are from collinear.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualityCertificate {
    /// `√(2(1 − |⟨Āψ, B̄ψ⟩| / (ΔA ΔB)))`, zero for exactly proportional vectors.
    pub collinearity_residual: f64,
    pub collinear: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub stats: StatReport,
    /// `ΔA · ΔB`.
    pub lhs: f64,
    pub modified: BoundCheck,
    pub commutator: BoundCheck,
    pub standard: BoundCheck,
    pub tolerance_used: f64,
    /// Domain reports for `A`, `B`, and (when evaluated) `AB`, `BA`.
    pub domain_reports: Vec<DomainReport>,
    pub equality: Option<EqualityCertificate>,
    pub notes: Vec<String>,
}

impl RelationReport {
    pub fn modified_bound(&self) -> f64 {
        self.modified.bound.expect("modified bound is always evaluated")
    }

    /// True when at least one bound applies and none is violated.
    pub fn all_applicable_satisfied(&self) -> bool {
        [&self.modified, &self.commutator, &self.standard].iter().all(|b| b.satisfied != Some(false))
    }

    pub fn any_applicable(&self) -> bool {
        [&self.modified, &self.commutator, &self.standard].iter().any(|b| b.applies())
    }
}

const ROTATION_NOTE: &str = "the phi-Lz bound depends on the choice of the phi = 0 direction; \
it is not rotation invariant";

fn pair_tolerance(a: &OperatorSpec, b: &OperatorSpec, topo: &GridTopology, tol: &Tolerances) -> f64 {
    tol.relation_tol(topo.step(), a.scale() * b.scale())
}

fn collinearity(m: &stats::Moments, w: &[f64]) -> f64 {
    let (da, db) = (m.delta_a, m.delta_b);
    if da * db <= f64::EPSILON {
        return 0.0;
    }
    let overlap = grid::weighted_dot(w, &m.centered_a, &m.centered_b).norm();
    (2.0 * (1.0 - overlap / (da * db)).max(0.0)).sqrt()
}

fn modified_report(
    a: &OperatorSpec,
    b: &OperatorSpec,
    psi: &WaveFunction,
    tol: &Tolerances,
) -> Result<(RelationReport, stats::Moments)> {
    if (grid::norm(psi) - 1.0).abs() > tol.norm_tol {
        return Err(Error::NotNormalized { norm: grid::norm(psi) });
    }
    let ra = operators::domain_check(a, psi, tol)?.require()?;
    let rb = operators::domain_check(b, psi, tol)?.require()?;
    let m = stats::pair_moments(a, b, psi)?;
    let st = stats::build_report(a, b, &m, None, tol);
    let lhs = m.delta_a * m.delta_b;
    let bound = st.covariance.hypot(st.imag_cross);
    let t = pair_tolerance(a, b, psi.topology(), tol);
    let modified = BoundCheck::evaluated(lhs, bound, t);

    let equality = modified.margin.filter(|mg| mg.abs() <= t).map(|_| {
        let r = collinearity(&m, &psi.topology().weights());
        let limit = if lhs > 0.0 { (2.0 * t / lhs).sqrt() } else { 0.0 } + 1e-8;
        EqualityCertificate { collinearity_residual: r, collinear: r <= limit }
    });

    let mut notes = Vec::new();
    if matches!(a.kind, operators::OperatorKind::Angle) || matches!(b.kind, operators::OperatorKind::Angle) {
        notes.push(ROTATION_NOTE.to_string());
    }
    Ok((
        RelationReport {
            stats: st,
            lhs,
            modified,
            commutator: BoundCheck::not_evaluated(),
            standard: BoundCheck::not_evaluated(),
            tolerance_used: t,
            domain_reports: vec![ra, rb],
            equality,
            notes,
        },
        m,
    ))
}

/// `ΔA ΔB ≥ √(σ_AB² + (Im⟨Aψ, Bψ⟩)²)`. Fails with
/// [`Error::Inapplicable`] only when `ψ ∉ D(A)` or `ψ ∉ D(B)`.
pub fn evaluate_modified(
    a: &OperatorSpec,
    b: &OperatorSpec,
    psi: &WaveFunction,
    tol: &Tolerances,
) -> Result<RelationReport> {
    Ok(modified_report(a, b, psi, tol)?.0)
}

/// Adds the commutator and standard bounds when `ψ ∈ D(AB) ∩ D(BA)`;
/// otherwise both are marked inapplicable with the failing report.
pub fn evaluate_commutator_form(
    a: &OperatorSpec,
    b: &OperatorSpec,
    psi: &WaveFunction,
    tol: &Tolerances,
) -> Result<RelationReport> {
    let (mut report, m) = modified_report(a, b, psi, tol)?;
    let (ab, ba) = operators::composite_domain_check(a, b, psi, tol)?;
    report.domain_reports.push(ab.clone());
    report.domain_reports.push(ba.clone());
    let failing = if !ab.is_member() {
        Some(ab)
    } else if !ba.is_member() {
        Some(ba)
    } else {
        None
    };
    match failing {
        Some(r) => {
            report.commutator = BoundCheck::inapplicable(r.clone());
            report.standard = BoundCheck::inapplicable(r);
        }
        None => {
            let c = stats::raw_commutator(a, b, psi)?.re;
            report.stats.commutator_expectation = Some(c);
            let t = report.tolerance_used;
            report.commutator = BoundCheck::evaluated(report.lhs, m.covariance().hypot(0.5 * c), t);
            report.standard = BoundCheck::evaluated(report.lhs, 0.5 * c.abs(), t);
        }
    }
    Ok(report)
}

/// Closed-form `φ`–`L_z` bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiLzBound {
    /// `√(σ_φL² + (ħ/2)²(1 − 2π|ψ(2π)|²)²)`.
    pub bound: f64,
    pub covariance: f64,
    /// `1 − 2π|ψ(2π)|²`.
    pub boundary_factor: f64,
}

/// The `φ`–`L_z` bound with `Im⟨φψ, L_zψ⟩` replaced by its boundary
/// expression `(ħ/2)(1 − 2π|ψ(2π)|²)`, read off the endpoint sample.
pub fn phi_lz_bound(psi: &WaveFunction, hbar: f64, tol: &Tolerances) -> Result<PhiLzBound> {
    if !psi.topology().is_circle() {
        return Err(Error::TopologyMismatch("phi-Lz bound needs a circle state".into()));
    }
    let phi = OperatorSpec::angle();
    let lz = OperatorSpec::angular_momentum(hbar);
    let covariance = stats::covariance(&phi, &lz, psi, tol)?;
    let boundary_factor = 1.0 - TWO_PI * psi.last().norm_sqr();
    let bound = covariance.hypot(0.5 * hbar * boundary_factor);
    Ok(PhiLzBound { bound, covariance, boundary_factor })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XpBoundaryReport {
    /// `(ħ/2)(1 − [x|ψ|²]_{x_min}^{x_max})`.
    pub value: f64,
    /// `x_max|ψ(x_max)|² − x_min|ψ(x_min)|²`.
    pub edge_term: f64,
    /// Largest of `|x||ψ|²` at the two edges.
    pub edge_magnitude: f64,
    /// `Im⟨xψ, pψ⟩` by quadrature on the same grid.
    pub imag_cross: f64,
    pub agreement: f64,
    pub agrees: bool,
    pub truncation_suspect: bool,
    pub widenings: usize,
    pub topology: GridTopology,
}

fn edge_terms(psi: &WaveFunction) -> (f64, f64) {
    let t = psi.topology();
    let left = t.start() * psi.first().norm_sqr();
    let right = t.end() * psi.last().norm_sqr();
    (right - left, left.abs().max(right.abs()))
}

/// `Im⟨xψ, pψ⟩ = (ħ/2)(1 − [x|ψ|²])` on a truncated line. Source-backed
/// states are re-sampled on wider boxes (same step) until the edge term
/// drops below `edge_tol`; if it never does the result is flagged.
pub fn xp_boundary_term(psi: &WaveFunction, hbar: f64, tol: &Tolerances) -> Result<XpBoundaryReport> {
    if psi.topology().is_circle() {
        return Err(Error::TopologyMismatch("x-p boundary term needs a line state".into()));
    }
    let mut current = psi.clone();
    let mut widenings = 0;
    while edge_terms(&current).1 >= tol.edge_tol && widenings < tol.max_widenings {
        let Some(src) = current.source().cloned() else { break };
        let t = current.topology();
        let (a, b) = (t.start(), t.end());
        let (c, half) = (0.5 * (a + b), b - a);
        let wider = GridTopology::line(c - half, c + half, 2 * (t.n_points() - 1) + 1)?;
        current = src.realize_on(&wider)?;
        widenings += 1;
    }
    let x = OperatorSpec::position();
    let p = OperatorSpec::momentum(hbar);
    let imag = stats::imag_cross(&x, &p, &current, tol)?;
    let (edge_term, edge_magnitude) = edge_terms(&current);
    let value = 0.5 * hbar * (1.0 - edge_term);
    let agreement = (value - imag).abs();
    let t = tol.relation_tol(current.topology().step(), hbar);
    Ok(XpBoundaryReport {
        value,
        edge_term,
        edge_magnitude,
        imag_cross: imag,
        agreement,
        agrees: agreement <= t,
        truncation_suspect: edge_magnitude >= tol.edge_tol,
        widenings,
        topology: current.topology().clone(),
    })
}

/// Stationary point of a quadratic form along some direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormOptimum {
    pub re: f64,
    pub im: f64,
    /// Closed-form minimum.
    pub formula: f64,
    /// The form evaluated numerically at the minimizer.
    pub numeric: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFormReport {
    /// Smallest `‖(Ā + λe^{iθ}B̄)ψ‖²` over the grid; never below `−tol`.
    pub worst_margin: f64,
    pub grid_argmin: (f64, f64),
    pub delta_a_sq: f64,
    pub delta_b_sq: f64,
    /// `θ = π/2`: minimum `(ΔA)² − (Im⟨Āψ, B̄ψ⟩)²/(ΔB)²`.
    pub imaginary_axis: Option<FormOptimum>,
    /// Any `θ`: minimum `(ΔA)² − |⟨Āψ, B̄ψ⟩|²/(ΔB)²`.
    pub complex_plane: Option<FormOptimum>,
    /// When `ΔB = 0`, the largest deviation of the form from `(ΔA)²`.
    pub constant_deviation: Option<f64>,
    pub consistent: bool,
}

/// Checks `‖(Ā + λe^{iθ}B̄)ψ‖² ≥ 0` over the `(λ, θ)` grid and compares
/// its minima with the closed forms.
pub fn quadratic_form_check(
    a: &OperatorSpec,
    b: &OperatorSpec,
    psi: &WaveFunction,
    lambdas: &[f64],
    thetas: &[f64],
    tol: &Tolerances,
) -> Result<QuadraticFormReport> {
    operators::domain_check(a, psi, tol)?.require()?;
    operators::domain_check(b, psi, tol)?.require()?;
    let m = stats::pair_moments(a, b, psi)?;
    let w = psi.topology().weights();
    let (u, v) = (&m.centered_a, &m.centered_b);
    let form = |mu: Complex64| -> f64 { w.iter().zip(u).zip(v).map(|((w, u), v)| w * (u + mu * v).norm_sqr()).sum() };

    let mut worst = f64::INFINITY;
    let mut argmin = (0.0, 0.0);
    for &l in lambdas {
        for &th in thetas {
            let val = form(Complex64::from_polar(l, th));
            if val < worst {
                worst = val;
                argmin = (l, th);
            }
        }
    }

    let da2 = m.delta_a * m.delta_a;
    let db2 = m.delta_b * m.delta_b;
    let uv = grid::weighted_dot(&w, u, v);
    let scale = da2.max(1.0);
    let agree = |x: f64, y: f64| (x - y).abs() <= 1e-10 * scale;

    let degenerate = db2 <= 1e-28 * scale;
    let (imaginary_axis, complex_plane, constant_deviation, consistent) = if degenerate {
        let dev = lambdas
            .iter()
            .flat_map(|&l| thetas.iter().map(move |&th| (l, th)))
            .map(|(l, th)| (form(Complex64::from_polar(l, th)) - da2).abs())
            .fold(0.0, f64::max);
        (None, None, Some(dev), dev <= 1e-10 * scale)
    } else {
        let lam = uv.im / db2;
        let imag = FormOptimum {
            re: 0.0,
            im: lam,
            formula: da2 - uv.im * uv.im / db2,
            numeric: form(Complex64::new(0.0, lam)),
        };
        let mu = -uv.conj() / db2;
        let cplx = FormOptimum { re: mu.re, im: mu.im, formula: da2 - uv.norm_sqr() / db2, numeric: form(mu) };
        let ok = agree(imag.formula, imag.numeric)
            && agree(cplx.formula, cplx.numeric)
            && worst >= cplx.numeric - 1e-10 * scale;
        (Some(imag), Some(cplx), None, ok)
    };

    Ok(QuadraticFormReport {
        worst_margin: worst,
        grid_argmin: argmin,
        delta_a_sq: da2,
        delta_b_sq: db2,
        imaginary_axis,
        complex_plane,
        constant_deviation,
        consistent: consistent && worst >= -1e-12,
    })
}
