//! Observables acting on grid states, and executable domain diagnostics.
//!
//! [`apply`] is purely mechanical: it evaluates the operating prescription on
//! whatever samples it is given. Whether the result represents a member of the
//! Hilbert space is decided separately by [`domain_check`], which looks for
//! the two failure modes that show up on a grid:
//!
//! * a derivative operator on the circle applied to a state whose endpoint
//!   magnitudes differ, `|ψ(2π)| ≠ |ψ(0)|` (only the magnitude is constrained;
//!   the phase `α` in `ψ(2π) = e^{iα}ψ(0)` is free);
//! * `‖Aψ‖` that keeps growing under grid refinement instead of settling.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::expr::{Expression, Variable};
use crate::grid::{self, GridTopology, WaveFunction};

/// Real function used by [`OperatorKind::MultiplyByFunction`].
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarFunction {
    /// Samples on some grid; interpolated when asked for a refinement of it.
    Sampled { label: String, values: Vec<f64> },
    /// Closed form, evaluated at the grid coordinates (real part).
    Expression(Expression),
}

impl ScalarFunction {
    pub fn from_fn(label: &str, topology: &GridTopology, f: impl Fn(f64) -> f64) -> Self {
        ScalarFunction::Sampled {
            label: label.to_string(),
            values: topology.coordinates().into_iter().map(f).collect(),
        }
    }

    pub fn constant(topology: &GridTopology, c: f64) -> Self {
        Self::from_fn(&format!("{c}"), topology, |_| c)
    }

    pub fn expression(src: &str) -> Result<Self> {
        Ok(ScalarFunction::Expression(Expression::parse(src)?))
    }

    pub fn label(&self) -> String {
        match self {
            ScalarFunction::Sampled { label, .. } => label.clone(),
            ScalarFunction::Expression(e) => e.source().to_string(),
        }
    }

    pub fn values_on(&self, topology: &GridTopology) -> Result<Vec<f64>> {
        let n = topology.n_points();
        match self {
            ScalarFunction::Sampled { values, .. } => {
                let m = values.len();
                if m == n {
                    Ok(values.clone())
                } else if m >= 2 && n > m && (n - 1).is_multiple_of(m - 1) {
                    Ok(grid::interpolate_refined(values, (n - 1) / (m - 1)))
                } else {
                    Err(Error::TopologyMismatch(format!("multiplier has {m} samples, grid has {n} points")))
                }
            }
            ScalarFunction::Expression(e) => {
                match (e.variable(), topology.is_circle()) {
                    (Some(Variable::X), true) | (Some(Variable::Phi), false) => {
                        return Err(Error::TopologyMismatch(format!(
                            "expression '{e}' uses the wrong coordinate for a {} grid",
                            topology.kind_name()
                        )));
                    }
                    _ => {}
                }
                Ok(topology.coordinates().into_iter().map(|v| e.eval(v).re).collect())
            }
        }
    }
}

/// Row-major square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        ComplexMatrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidInput(format!("matrix data has {} entries, expected {}", data.len(), n * n)));
        }
        Ok(ComplexMatrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n, "matrix/vector size mismatch");
        (0..self.n).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OperatorKind {
    Position,
    Momentum,
    Angle,
    AngularMomentum,
    MultiplyByFunction(ScalarFunction),
    DenseMatrix(ComplexMatrix),
}

/// An observable together with the value of ħ it uses.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub hbar: f64,
}

impl OperatorSpec {
    pub fn position() -> Self {
        OperatorSpec { kind: OperatorKind::Position, hbar: 1.0 }
    }

    pub fn momentum(hbar: f64) -> Self {
        OperatorSpec { kind: OperatorKind::Momentum, hbar }
    }

    pub fn angle() -> Self {
        OperatorSpec { kind: OperatorKind::Angle, hbar: 1.0 }
    }

    pub fn angular_momentum(hbar: f64) -> Self {
        OperatorSpec { kind: OperatorKind::AngularMomentum, hbar }
    }

    pub fn multiply(f: ScalarFunction) -> Self {
        OperatorSpec { kind: OperatorKind::MultiplyByFunction(f), hbar: 1.0 }
    }

    pub fn dense(m: ComplexMatrix) -> Self {
        OperatorSpec { kind: OperatorKind::DenseMatrix(m), hbar: 1.0 }
    }

    /// Parses `x`, `p`, `phi`, `Lz`, or `f(<expression>)` for a multiplier.
    pub fn parse(name: &str, hbar: f64) -> Result<Self> {
        let name = name.trim();
        match name {
            "x" => Ok(Self::position()),
            "p" => Ok(Self::momentum(hbar)),
            "phi" => Ok(Self::angle()),
            "Lz" | "lz" | "L_z" => Ok(Self::angular_momentum(hbar)),
            _ => {
                if let Some(inner) = name.strip_prefix("f(").and_then(|s| s.strip_suffix(')')) {
                    Ok(Self::multiply(ScalarFunction::expression(inner)?))
                } else {
                    Err(Error::Parse(format!("unknown operator '{name}' (expected x, p, phi, Lz or f(<expr>))")))
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            OperatorKind::Position => "x".into(),
            OperatorKind::Momentum => "p".into(),
            OperatorKind::Angle => "phi".into(),
            OperatorKind::AngularMomentum => "Lz".into(),
            OperatorKind::MultiplyByFunction(f) => format!("f({})", f.label()),
            OperatorKind::DenseMatrix(m) => format!("M[{}]", m.dim()),
        }
    }

    pub fn is_derivative(&self) -> bool {
        matches!(self.kind, OperatorKind::Momentum | OperatorKind::AngularMomentum)
    }

    /// Natural magnitude of the operator's output, used to scale tolerances.
    pub fn scale(&self) -> f64 {
        if self.is_derivative() {
            self.hbar
        } else {
            1.0
        }
    }

    pub fn check_topology(&self, topology: &GridTopology) -> Result<()> {
        let ok = match &self.kind {
            OperatorKind::Position | OperatorKind::Momentum => !topology.is_circle(),
            OperatorKind::Angle | OperatorKind::AngularMomentum => topology.is_circle(),
            OperatorKind::MultiplyByFunction(_) => true,
            OperatorKind::DenseMatrix(m) => m.dim() == topology.n_points(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::IncompatibleOperator {
                operator: self.label(),
                topology: format!("{} ({} points)", topology.kind_name(), topology.n_points()),
            })
        }
    }
}

/// Second-order finite-difference derivative: central in the interior,
/// one-sided second-order at both endpoints.
pub(crate) fn fd_derivative(f: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = f.len();
    debug_assert!(n >= 3);
    let inv = 1.0 / (2.0 * h);
    let mut d = Vec::with_capacity(n);
    d.push((f[0] * -3.0 + f[1] * 4.0 - f[2]) * inv);
    for k in 1..n - 1 {
        d.push((f[k + 1] - f[k - 1]) * inv);
    }
    d.push((f[n - 1] * 3.0 - f[n - 2] * 4.0 + f[n - 3]) * inv);
    d
}

/// `Aψ`. No domain check is made here.
pub fn apply(a: &OperatorSpec, psi: &WaveFunction) -> Result<WaveFunction> {
    let topo = psi.topology();
    a.check_topology(topo)?;
    let amps = psi.amplitudes();
    let out: Vec<Complex64> = match &a.kind {
        OperatorKind::Position | OperatorKind::Angle => {
            topo.coordinates().iter().zip(amps).map(|(x, z)| z * *x).collect()
        }
        OperatorKind::Momentum | OperatorKind::AngularMomentum => {
            // (ħ/i) d/dx = −iħ d/dx
            let factor = Complex64::new(0.0, -a.hbar);
            fd_derivative(amps, topo.step()).into_iter().map(|d| d * factor).collect()
        }
        OperatorKind::MultiplyByFunction(f) => f.values_on(topo)?.iter().zip(amps).map(|(v, z)| z * *v).collect(),
        OperatorKind::DenseMatrix(m) => m.mul_vec(amps),
    };
    Ok(psi.with_amplitudes(out))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    Yes,
    No,
    Marginal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainReason {
    BoundaryConditionViolated,
    DerivativeNotSquareIntegrable,
    NotDifferentiable,
    #[serde(rename = "OK")]
    Ok,
}

/// Verdict on `ψ ∈ D(A)` together with the evidence behind it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainReport {
    /// Operator (or operator product, rightmost factor applied first).
    pub operator: String,
    pub in_domain: Membership,
    /// `| |ψ(2π)| − |ψ(0)| |` of the input to a circle derivative.
    pub boundary_magnitude_mismatch: Option<f64>,
    pub boundary_tol: Option<f64>,
    /// `(n_points, ‖Aψ‖)` across the refinement ladder.
    pub derivative_norm_sequence: Vec<(usize, f64)>,
    pub divergence_flag: bool,
    pub reason: DomainReason,
}

impl DomainReport {
    pub fn is_member(&self) -> bool {
        self.in_domain == Membership::Yes
    }

    /// Err(Inapplicable) unless the verdict is Yes.
    pub fn require(self) -> Result<DomainReport> {
        if self.is_member() {
            Ok(self)
        } else {
            Err(Error::Inapplicable(Box::new(self)))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Trend {
    Converging,
    Diverging,
    Unclear,
}

/// Cauchy-style test on the squared norms from successive refinements.
fn classify_sequence(norms: &[f64], tol: &Tolerances) -> Trend {
    let sq: Vec<f64> = norms.iter().map(|v| v * v).collect();
    if sq.len() < 3 {
        return Trend::Converging;
    }
    let last = *sq.last().expect("non-empty");
    let floor = tol.divergence_floor * last.abs().max(1.0);
    let incs: Vec<f64> = sq.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let mut shrinking = 0;
    let mut growing = 0;
    for w in incs.windows(2) {
        let (prev, next) = (w[0], w[1]);
        if next <= floor || next <= tol.divergence_ratio * prev {
            shrinking += 1;
        } else {
            growing += 1;
        }
    }
    match (shrinking, growing) {
        (_, 0) => Trend::Converging,
        (0, _) => Trend::Diverging,
        _ => Trend::Unclear,
    }
}

fn has_non_finite(psi: &WaveFunction) -> bool {
    psi.amplitudes().iter().any(|z| !(z.re.is_finite() && z.im.is_finite()))
}

fn chain_label(ops: &[&OperatorSpec]) -> String {
    ops.iter().rev().map(|o| o.label()).collect::<Vec<_>>().join("*")
}

/// Domain check for the product `ops[n−1] ⋯ ops[1] ops[0]` (`ops[0]` acts
/// first). Every intermediate product must itself be in the next factor's
/// domain; the first failing stage determines the report.
pub fn domain_check_chain(ops: &[&OperatorSpec], psi: &WaveFunction, tol: &Tolerances) -> Result<DomainReport> {
    if ops.is_empty() {
        return Err(Error::InvalidInput("empty operator chain".into()));
    }
    for op in ops {
        op.check_topology(psi.topology())?;
    }
    let label = chain_label(ops);
    let finite_dim = ops.iter().any(|o| matches!(o.kind, OperatorKind::DenseMatrix(_)));

    // Refinement ladder: factors 1, 2, 4, ... from the base grid.
    let mut ladder = vec![psi.clone()];
    if !finite_dim {
        for k in 1..=tol.refinements {
            ladder.push(grid::refine(psi, 1 << k)?);
        }
    }

    // norms[stage][level]
    let mut norms = vec![Vec::with_capacity(ladder.len()); ops.len()];
    let mut mismatch: Option<(usize, f64, f64)> = None;
    let mut non_finite_stage: Option<usize> = None;
    for (level, state) in ladder.iter().enumerate() {
        let mut current = state.clone();
        for (stage, op) in ops.iter().enumerate() {
            if level == 0 && op.is_derivative() && current.topology().is_circle() {
                let m = (current.last().norm() - current.first().norm()).abs();
                let btol = tol.boundary_tol(current.topology().step());
                // Keep the first violating stage, otherwise the largest mismatch.
                let replace = match mismatch {
                    None => true,
                    Some((_, pm, pt)) => pm <= pt && (m > btol || m > pm),
                };
                if replace {
                    mismatch = Some((stage, m, btol));
                }
            }
            current = apply(op, &current)?;
            if has_non_finite(&current) {
                non_finite_stage.get_or_insert(stage);
                break;
            }
            norms[stage].push((current.topology().n_points(), grid::norm(&current)));
        }
    }

    let boundary_violation = mismatch.filter(|(_, m, t)| m > t);
    let (boundary_magnitude_mismatch, boundary_tol) = match mismatch {
        Some((_, m, t)) => (Some(m), Some(t)),
        None => (None, None),
    };

    let build = |in_domain, seq: &Vec<(usize, f64)>, divergence_flag, reason| DomainReport {
        operator: label.clone(),
        in_domain,
        boundary_magnitude_mismatch,
        boundary_tol,
        derivative_norm_sequence: seq.clone(),
        divergence_flag,
        reason,
    };

    if let Some(stage) = non_finite_stage {
        return Ok(build(Membership::No, &norms[stage], false, DomainReason::NotDifferentiable));
    }
    if let Some((stage, _, _)) = boundary_violation {
        return Ok(build(Membership::No, &norms[stage], false, DomainReason::BoundaryConditionViolated));
    }
    let mut unclear: Option<usize> = None;
    for (stage, seq) in norms.iter().enumerate() {
        let values: Vec<f64> = seq.iter().map(|(_, v)| *v).collect();
        match classify_sequence(&values, tol) {
            Trend::Converging => {}
            Trend::Diverging => {
                let reason = if ops[stage].is_derivative() {
                    DomainReason::DerivativeNotSquareIntegrable
                } else {
                    DomainReason::NotDifferentiable
                };
                return Ok(build(Membership::No, seq, true, reason));
            }
            Trend::Unclear => {
                unclear.get_or_insert(stage);
            }
        }
    }
    let last = norms.last().expect("non-empty chain");
    match unclear {
        Some(stage) => Ok(build(Membership::Marginal, &norms[stage], false, DomainReason::Ok)),
        None => Ok(build(Membership::Yes, last, false, DomainReason::Ok)),
    }
}

/// Is `ψ ∈ D(A)`? Always returns a diagnostic; structural problems
/// (operator not defined on this topology) are errors.
pub fn domain_check(a: &OperatorSpec, psi: &WaveFunction, tol: &Tolerances) -> Result<DomainReport> {
    domain_check_chain(&[a], psi, tol)
}

/// Reports for `D(AB)` and `D(BA)`, in that order.
pub fn composite_domain_check(
    a: &OperatorSpec,
    b: &OperatorSpec,
    psi: &WaveFunction,
    tol: &Tolerances,
) -> Result<(DomainReport, DomainReport)> {
    let ab = domain_check_chain(&[b, a], psi, tol)?;
    let ba = domain_check_chain(&[a, b], psi, tol)?;
    Ok((ab, ba))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{inner_product, TWO_PI};

    fn lz_state(m: i64, n: usize) -> WaveFunction {
        let t = GridTopology::circle(n).unwrap();
        WaveFunction::from_fn(t, |phi| Complex64::from_polar(1.0 / TWO_PI.sqrt(), m as f64 * phi)).unwrap()
    }

    #[test]
    fn derivative_stencil_is_exact_for_quadratics() {
        let t = GridTopology::line(-1.0, 2.0, 7).unwrap();
        let h = t.step();
        let f: Vec<Complex64> = t.coordinates().iter().map(|x| Complex64::new(x * x - 3.0 * x, 2.0 * x)).collect();
        let d = fd_derivative(&f, h);
        for (x, v) in t.coordinates().iter().zip(d) {
            assert!((v - Complex64::new(2.0 * x - 3.0, 2.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn lz_on_eigenstate() {
        let psi = lz_state(3, 4097);
        let out = apply(&OperatorSpec::angular_momentum(1.0), &psi).unwrap();
        let h = psi.topology().step();
        for (a, b) in out.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a - b * 3.0).norm() < 30.0 * h * h);
        }
    }

    #[test]
    fn angle_endpoints() {
        let psi = lz_state(1, 65);
        let out = apply(&OperatorSpec::angle(), &psi).unwrap();
        assert_eq!(out.first().norm(), 0.0);
        assert!((out.last() - psi.last() * TWO_PI).norm() < 1e-14);
        assert!(out.last().norm() > 1.0);
    }

    #[test]
    fn topology_gates() {
        let circle = lz_state(1, 17);
        assert!(matches!(apply(&OperatorSpec::momentum(1.0), &circle), Err(Error::IncompatibleOperator { .. })));
        assert!(apply(&OperatorSpec::position(), &circle).is_err());
        let line = WaveFunction::zeros(GridTopology::line(0.0, 1.0, 5).unwrap());
        assert!(apply(&OperatorSpec::angle(), &line).is_err());
        assert!(apply(&OperatorSpec::dense(ComplexMatrix::zeros(4)), &line).is_err());
    }

    #[test]
    fn operator_names() {
        for (s, l) in [("x", "x"), ("p", "p"), ("phi", "phi"), ("Lz", "Lz"), ("f(cos(phi))", "f(cos(phi))")] {
            assert_eq!(OperatorSpec::parse(s, 1.0).unwrap().label(), l);
        }
        assert!(OperatorSpec::parse("q", 1.0).is_err());
        assert!(OperatorSpec::parse("f(cos(phi)", 1.0).is_err());
    }

    #[test]
    fn dense_position_matches_stencil() {
        let t = GridTopology::line(-2.0, 2.0, 33).unwrap();
        let mut m = ComplexMatrix::zeros(33);
        for (k, x) in t.coordinates().iter().enumerate() {
            m.set(k, k, Complex64::new(*x, 0.0));
        }
        let psi = WaveFunction::from_fn(t, |x| Complex64::new((-x * x).exp(), x.sin())).unwrap();
        let a = apply(&OperatorSpec::dense(m), &psi).unwrap();
        let b = apply(&OperatorSpec::position(), &psi).unwrap();
        for (u, v) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn lz_hermiticity_defect_is_the_boundary_term() {
        // Neither state satisfies the boundary condition.
        let t = GridTopology::circle(4097).unwrap();
        let chi = WaveFunction::from_fn(t.clone(), |p| Complex64::new(1.0 + 0.3 * p, 0.2 * p.sin())).unwrap();
        let psi = WaveFunction::from_fn(t, |p| Complex64::from_polar(0.5 + 0.1 * p, 1.5 * p)).unwrap();
        let lz = OperatorSpec::angular_momentum(1.0);
        let lhs = inner_product(&chi, &apply(&lz, &psi).unwrap()).unwrap();
        let rhs = inner_product(&apply(&lz, &chi).unwrap(), &psi).unwrap();
        let term = Complex64::new(0.0, -1.0) * (chi.last().conj() * psi.last() - chi.first().conj() * psi.first());
        let defect = lhs - rhs;
        assert!(term.norm() > 0.1);
        assert!((defect - term).norm() < 1e-5, "{defect} vs {term}");
    }

    #[test]
    fn lz_hermitian_on_domain() {
        let t = GridTopology::circle(2049).unwrap();
        let chi = WaveFunction::from_fn(t.clone(), |p| Complex64::new(p.cos(), 0.5 * (2.0 * p).sin())).unwrap();
        let psi = WaveFunction::from_fn(t.clone(), |p| Complex64::from_polar(1.0 + 0.2 * p.cos(), -p)).unwrap();
        let lz = OperatorSpec::angular_momentum(1.0);
        let lhs = inner_product(&chi, &apply(&lz, &psi).unwrap()).unwrap();
        let rhs = inner_product(&apply(&lz, &chi).unwrap(), &psi).unwrap();
        let h = t.step();
        assert!((lhs - rhs).norm() < 10.0 * h * h);
    }

    #[test]
    fn eigenstate_is_in_lz_domain() {
        let tol = Tolerances::default();
        let psi = lz_state(2, 1025);
        let r = domain_check(&OperatorSpec::angular_momentum(1.0), &psi, &tol).unwrap();
        assert_eq!(r.in_domain, Membership::Yes, "{r:?}");
        assert_eq!(r.reason, DomainReason::Ok);
        assert!(r.boundary_magnitude_mismatch.unwrap() < 1e-12);
        assert_eq!(r.derivative_norm_sequence.len(), tol.refinements + 1);
    }

    #[test]
    fn angle_times_eigenstate_violates_boundary() {
        let tol = Tolerances::default();
        let psi = lz_state(1, 1025);
        let phi_psi = apply(&OperatorSpec::angle(), &psi).unwrap();
        let r = domain_check(&OperatorSpec::angular_momentum(1.0), &phi_psi, &tol).unwrap();
        assert_eq!(r.in_domain, Membership::No);
        assert_eq!(r.reason, DomainReason::BoundaryConditionViolated);
        let expected = TWO_PI / TWO_PI.sqrt();
        assert!((r.boundary_magnitude_mismatch.unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn composite_for_angle_and_lz() {
        let tol = Tolerances::default();
        let psi = lz_state(1, 1025);
        let (ab, ba) =
            composite_domain_check(&OperatorSpec::angle(), &OperatorSpec::angular_momentum(1.0), &psi, &tol).unwrap();
        assert!(ab.is_member(), "{ab:?}");
        assert_eq!(ba.reason, DomainReason::BoundaryConditionViolated);
        assert_eq!(ba.operator, "Lz*phi");
    }

    #[test]
    fn composite_with_itself_is_symmetric() {
        let tol = Tolerances::default();
        let psi = lz_state(1, 257);
        let lz = OperatorSpec::angular_momentum(1.0);
        let (ab, ba) = composite_domain_check(&lz, &lz, &psi, &tol).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn domain_check_is_deterministic() {
        let tol = Tolerances::default();
        let psi = lz_state(1, 257);
        let a = domain_check(&OperatorSpec::angular_momentum(1.0), &psi, &tol).unwrap();
        let b = domain_check(&OperatorSpec::angular_momentum(1.0), &psi, &tol).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dense_operators_skip_refinement() {
        let tol = Tolerances::default();
        let psi = lz_state(1, 9);
        let r = domain_check(&OperatorSpec::dense(ComplexMatrix::zeros(9)), &psi, &tol).unwrap();
        assert!(r.is_member());
        assert_eq!(r.derivative_norm_sequence.len(), 1);
    }

    #[test]
    fn sequence_classifier() {
        let tol = Tolerances::default();
        let conv: Vec<f64> = [1.0, 1.1, 1.125, 1.13125].iter().map(|v: &f64| v.sqrt()).collect();
        assert_eq!(classify_sequence(&conv, &tol), Trend::Converging);
        let div: Vec<f64> = (0..5).map(|k| (2.0 + 0.69 * k as f64).sqrt()).collect();
        assert_eq!(classify_sequence(&div, &tol), Trend::Diverging);
        let mixed: Vec<f64> = [1.0, 1.1, 1.12, 1.2, 1.21].iter().map(|v: &f64| v.sqrt()).collect();
        assert_eq!(classify_sequence(&mixed, &tol), Trend::Unclear);
        assert_eq!(classify_sequence(&[0.0; 5], &tol), Trend::Converging);
    }
}
