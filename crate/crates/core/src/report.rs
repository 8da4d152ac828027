//! Serializable run records, plus CSV and plain-text renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::classical::ClassicalReport;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::operators::DomainReport;
use crate::relations::{Applicability, BoundCheck, PhiLzBound, QuadraticFormReport, RelationReport, XpBoundaryReport};
use crate::states::StateRecipe;

pub const ARTIFACT_VERSION: &str = "1";

/// One evaluated state in a sweep or analysis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateResult {
    pub state: String,
    pub recipe: Option<StateRecipe>,
    pub n_points: usize,
    pub relation: Option<RelationReport>,
    pub quadratic_form: Option<QuadraticFormReport>,
    /// Present for the `(phi, Lz)` pair.
    pub phi_lz_closed_form: Option<PhiLzBound>,
    /// Present for the `(x, p)` pair.
    pub xp_boundary: Option<XpBoundaryReport>,
    /// Set when the pair could not be evaluated at all.
    pub error: Option<String>,
}

impl StateResult {
    pub fn failed(state: String, n_points: usize, error: String) -> Self {
        StateResult {
            state,
            recipe: None,
            n_points,
            relation: None,
            quadratic_form: None,
            phi_lz_closed_form: None,
            xp_boundary: None,
            error: Some(error),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub artifact_version: String,
    pub command: String,
    pub config: Config,
    pub pair: Option<(String, String)>,
    pub results: Vec<StateResult>,
    pub domain_reports: Vec<DomainReport>,
    pub classical_reports: Vec<ClassicalReport>,
    pub started_at: Option<String>,
    pub finished_at: Option<String>,
    pub exit_code: i32,
    pub messages: Vec<String>,
}

impl RunRecord {
    pub fn new(command: &str, config: Config) -> Self {
        RunRecord {
            artifact_version: ARTIFACT_VERSION.into(),
            command: command.into(),
            config,
            pair: None,
            results: Vec::new(),
            domain_reports: Vec::new(),
            classical_reports: Vec::new(),
            started_at: None,
            finished_at: None,
            exit_code: 0,
            messages: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.results {
            out.push_str(&csv_row(r));
            out.push('\n');
        }
        out
    }

    pub fn to_human(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} (artifact v{})", self.command, self.artifact_version);
        if let Some((a, b)) = &self.pair {
            let _ = writeln!(s, "pair: A = {a}, B = {b}, hbar = {}", self.config.hbar);
        }
        for r in &self.results {
            let _ = writeln!(s, "\nstate {} on {} points", r.state, r.n_points);
            if let Some(e) = &r.error {
                let _ = writeln!(s, "  error: {e}");
            }
            if let Some(rel) = &r.relation {
                human_relation(&mut s, rel);
            }
            if let Some(c) = &r.phi_lz_closed_form {
                let _ = writeln!(
                    s,
                    "  closed-form phi-Lz bound {:.10} (boundary factor {:.10})",
                    c.bound, c.boundary_factor
                );
            }
            if let Some(x) = &r.xp_boundary {
                let _ = writeln!(
                    s,
                    "  boundary form of Im<x psi, p psi> = {:.10}, edge term {:.3e}{}",
                    x.value,
                    x.edge_term,
                    if x.truncation_suspect { " (truncation suspect)" } else { "" }
                );
            }
            if let Some(q) = &r.quadratic_form {
                let _ = writeln!(
                    s,
                    "  quadratic form: smallest grid value {:.3e}, consistent {}",
                    q.worst_margin, q.consistent
                );
            }
        }
        for d in &self.domain_reports {
            let _ = writeln!(
                s,
                "\ndomain of {}: {:?} ({:?}), boundary mismatch {}, divergence {}",
                d.operator,
                d.in_domain,
                d.reason,
                d.boundary_magnitude_mismatch.map_or("-".into(), |m| format!("{m:.3e}")),
                d.divergence_flag
            );
            for (n, v) in &d.derivative_norm_sequence {
                let _ = writeln!(s, "  n = {n:>7}  |A psi| = {v:.9e}");
            }
        }
        for c in &self.classical_reports {
            let _ = writeln!(
                s,
                "\nclassical: da*db = {:.12e}, |cov| = {:.12e}, holds = {}, equality = {}",
                c.lhs, c.rhs, c.holds, c.equality
            );
        }
        for m in &self.messages {
            let _ = writeln!(s, "note: {m}");
        }
        let _ = writeln!(s, "exit code {}", self.exit_code);
        s
    }
}

fn human_relation(s: &mut String, r: &RelationReport) {
    let st = &r.stats;
    let _ = writeln!(s, "  <A> = {:.10}  <B> = {:.10}", st.mean_a, st.mean_b);
    let _ = writeln!(s, "  dA = {:.10}  dB = {:.10}  dA*dB = {:.10}", st.delta_a, st.delta_b, r.lhs);
    let _ = writeln!(s, "  cov = {:.10}  Im<Apsi,Bpsi> = {:.10}", st.covariance, st.imag_cross);
    for (name, b) in [("modified", &r.modified), ("commutator", &r.commutator), ("standard", &r.standard)] {
        let _ = writeln!(s, "  {name:<10} {}", describe_bound(b));
    }
    for w in st.warnings.iter().chain(&r.notes) {
        let _ = writeln!(s, "  note: {w}");
    }
}

fn describe_bound(b: &BoundCheck) -> String {
    match (&b.applicability, b.bound, b.margin) {
        (Applicability::Applies, Some(v), Some(m)) => {
            let verdict = if b.satisfied == Some(true) { "holds" } else { "VIOLATED" };
            format!("bound {v:.10}  margin {m:+.3e}  {verdict}")
        }
        (Applicability::InapplicableDomain { reason, evidence }, _, _) => {
            format!("inapplicable: {reason:?} for {}", evidence.operator)
        }
        _ => "not evaluated".into(),
    }
}

const CSV_HEADER: &str = "state,n_points,mean_a,mean_b,delta_a,delta_b,covariance,imag_cross,commutator,lhs,\
modified_bound,modified_margin,commutator_status,commutator_bound,standard_status,standard_bound,closed_form_bound,\
error";

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn status(b: &BoundCheck) -> &'static str {
    match (&b.applicability, b.satisfied) {
        (Applicability::Applies, Some(true)) => "holds",
        (Applicability::Applies, _) => "violated",
        (Applicability::InapplicableDomain { .. }, _) => "inapplicable",
        (Applicability::NotEvaluated, _) => "not_evaluated",
    }
}

fn closed_form(r: &StateResult) -> Option<f64> {
    r.phi_lz_closed_form.as_ref().map(|c| c.bound).or(r.xp_boundary.as_ref().map(|x| x.value))
}

fn csv_row(r: &StateResult) -> String {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let fields: Vec<String> = match &r.relation {
        Some(rel) => {
            let st = &rel.stats;
            vec![
                r.state.clone(),
                r.n_points.to_string(),
                format!("{:e}", st.mean_a),
                format!("{:e}", st.mean_b),
                format!("{:e}", st.delta_a),
                format!("{:e}", st.delta_b),
                format!("{:e}", st.covariance),
                format!("{:e}", st.imag_cross),
                opt(st.commutator_expectation),
                format!("{:e}", rel.lhs),
                opt(rel.modified.bound),
                opt(rel.modified.margin),
                status(&rel.commutator).into(),
                opt(rel.commutator.bound),
                status(&rel.standard).into(),
                opt(rel.standard.bound),
                opt(closed_form(r)),
                String::new(),
            ]
        }
        None => {
            let mut v = vec![r.state.clone(), r.n_points.to_string()];
            v.extend(std::iter::repeat_n(String::new(), 15));
            v.push(r.error.clone().unwrap_or_default());
            v
        }
    };
    wtr.write_record(&fields).expect("write to memory");
    let bytes = wtr.into_inner().expect("flush to memory");
    String::from_utf8(bytes).expect("utf8").trim_end().to_string()
}
