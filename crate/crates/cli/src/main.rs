use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use uncertainty_core::classical::{classical_relation, SampleSet};
use uncertainty_core::config::OutputFormat;
use uncertainty_core::relations::{self, evaluate_commutator_form, RelationReport};
use uncertainty_core::report::{RunRecord, StateResult, ARTIFACT_VERSION};
use uncertainty_core::states::{self, SweepAxis};
use uncertainty_core::{
    domain_check, realize, Config, DomainReport, Error, Membership, OperatorKind, OperatorSpec, StateRecipe,
};

const EXIT_VIOLATED: u8 = 2;
const EXIT_INAPPLICABLE: u8 = 3;

/// Domain-aware uncertainty relations on discretized 1-D Hilbert spaces.
#[derive(Debug, Parser)]
#[command(name = "uncertainty", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate every applicable bound for one state and one operator pair.
    Analyze {
        /// State spec, e.g. `gaussian:sigma=1,c=0.5` or `lz-eigenstate:m=1`.
        #[arg(long)]
        state: String,
        /// Operator pair `A,B` (x, p, phi, Lz, f(<expr>)).
        #[arg(long, default_value = "x,p")]
        pair: String,
        #[command(flatten)]
        common: Common,
    },
    /// Decide whether a state lies in the domain of one operator.
    DomainCheck {
        #[arg(long)]
        state: String,
        #[arg(long)]
        operator: String,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a pair over a grid of recipe parameters.
    Sweep {
        /// State family, e.g. `gaussian` or `wave-packet`.
        #[arg(long)]
        family: String,
        /// `key=start:stop:step`, `key=a;b;c` or `key=value`; repeatable.
        #[arg(long = "param")]
        params: Vec<String>,
        #[arg(long, default_value = "x,p")]
        pair: String,
        #[command(flatten)]
        common: Common,
    },
    /// Check the classical covariance inequality on paired samples.
    Classical {
        /// CSV with columns a,b[,weight]; header optional.
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Print the tool and report-format versions.
    Version,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    hbar: Option<f64>,
    /// Grid points for both line and circle states.
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long, value_enum)]
    output: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave timestamps out so identical inputs give identical reports.
    #[arg(long)]
    deterministic: bool,
}

impl Common {
    fn config(&self) -> anyhow::Result<Config> {
        let mut cfg = match &self.config {
            Some(p) => Config::load(p).with_context(|| format!("loading config {}", p.display()))?,
            None => Config::default(),
        };
        if let Some(h) = self.hbar {
            cfg.hbar = h;
        }
        if let Some(n) = self.grid_n {
            cfg.grid.circle_n = n;
            cfg.grid.line_n = n;
        }
        if let Some(f) = self.output {
            cfg.output = match f {
                Format::Json => OutputFormat::Json,
                Format::Csv => OutputFormat::Csv,
                Format::Human => OutputFormat::Human,
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn timestamp(deterministic: bool) -> Option<String> {
    (!deterministic).then(|| chrono::Utc::now().to_rfc3339())
}

fn parse_pair(text: &str, hbar: f64) -> anyhow::Result<(OperatorSpec, OperatorSpec)> {
    let Some((a, b)) = text.split_once(',') else {
        bail!("--pair expects two operators separated by a comma, got '{text}'");
    };
    Ok((OperatorSpec::parse(a, hbar)?, OperatorSpec::parse(b, hbar)?))
}

fn grid_size(recipe: &StateRecipe, cfg: &Config) -> usize {
    if recipe.is_circle_state() {
        cfg.grid.circle_n
    } else {
        cfg.grid.line_n
    }
}

/// What one state contributed to the overall exit status.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Outcome {
    Satisfied,
    Inapplicable,
    Violated,
    Failed,
}

fn outcome_of(rel: &RelationReport) -> Outcome {
    if rel.all_applicable_satisfied() {
        Outcome::Satisfied
    } else {
        Outcome::Violated
    }
}

fn exit_code(outcomes: &[Outcome]) -> u8 {
    if outcomes.contains(&Outcome::Failed) {
        1
    } else if outcomes.contains(&Outcome::Violated) {
        EXIT_VIOLATED
    } else if outcomes.contains(&Outcome::Satisfied) {
        0
    } else {
        EXIT_INAPPLICABLE
    }
}

struct Evaluated {
    result: StateResult,
    domain_reports: Vec<DomainReport>,
    outcome: Outcome,
}

fn evaluate(recipe: &StateRecipe, a: &OperatorSpec, b: &OperatorSpec, cfg: &Config) -> Evaluated {
    let n = grid_size(recipe, cfg);
    let label = recipe.spec_string();
    let mut ev = match evaluate_inner(recipe, a, b, cfg, n) {
        Ok(result) => {
            let outcome = result.relation.as_ref().map_or(Outcome::Failed, outcome_of);
            Evaluated { result, domain_reports: Vec::new(), outcome }
        }
        Err(Error::Inapplicable(rep)) => Evaluated {
            result: StateResult::failed(label, n, format!("{:?} for {}", rep.reason, rep.operator)),
            domain_reports: vec![*rep],
            outcome: Outcome::Inapplicable,
        },
        Err(e) => Evaluated {
            result: StateResult::failed(label, n, e.to_string()),
            domain_reports: Vec::new(),
            outcome: Outcome::Failed,
        },
    };
    ev.result.recipe = Some(recipe.clone());
    ev
}

fn evaluate_inner(
    recipe: &StateRecipe,
    a: &OperatorSpec,
    b: &OperatorSpec,
    cfg: &Config,
    n: usize,
) -> uncertainty_core::Result<StateResult> {
    let tol = &cfg.tolerances;
    let psi = realize(recipe, &recipe.default_topology(n)?)?;
    a.check_topology(psi.topology())?;
    b.check_topology(psi.topology())?;
    let rel = evaluate_commutator_form(a, b, &psi, tol)?;
    let q = &cfg.quadratic_form;
    let quadratic_form = Some(relations::quadratic_form_check(a, b, &psi, &q.lambdas(), &q.thetas(), tol)?);
    let (phi_lz_closed_form, xp_boundary) = match (&a.kind, &b.kind) {
        (OperatorKind::Angle, OperatorKind::AngularMomentum) => {
            (Some(relations::phi_lz_bound(&psi, b.hbar, tol)?), None)
        }
        (OperatorKind::Position, OperatorKind::Momentum) => {
            (None, Some(relations::xp_boundary_term(&psi, b.hbar, tol)?))
        }
        _ => (None, None),
    };
    Ok(StateResult {
        state: recipe.spec_string(),
        recipe: None,
        n_points: psi.len(),
        relation: Some(rel),
        quadratic_form,
        phi_lz_closed_form,
        xp_boundary,
        error: None,
    })
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Version => {
            println!("uncertainty {} (report format v{ARTIFACT_VERSION})", env!("CARGO_PKG_VERSION"));
            Ok(0)
        }
        Command::Analyze { state, pair, common } => {
            let cfg = common.config()?;
            let started = timestamp(common.deterministic);
            let recipe = StateRecipe::parse_spec(&state, cfg.hbar)?;
            let (a, b) = parse_pair(&pair, cfg.hbar)?;
            let ev = evaluate(&recipe, &a, &b, &cfg);
            if ev.outcome == Outcome::Failed {
                bail!("{}", ev.result.error.unwrap_or_default());
            }
            let mut rec = RunRecord::new("analyze", cfg);
            rec.pair = Some((a.label(), b.label()));
            rec.started_at = started;
            rec.results.push(ev.result);
            rec.domain_reports = ev.domain_reports;
            finish(rec, exit_code(&[ev.outcome]), &common)
        }
        Command::DomainCheck { state, operator, common } => {
            let cfg = common.config()?;
            if matches!(cfg.output, OutputFormat::Csv) {
                bail!("csv output is only available for analyze and sweep");
            }
            let started = timestamp(common.deterministic);
            let recipe = StateRecipe::parse_spec(&state, cfg.hbar)?;
            let op = OperatorSpec::parse(&operator, cfg.hbar)?;
            let psi = realize(&recipe, &recipe.default_topology(grid_size(&recipe, &cfg))?)?;
            let report = domain_check(&op, &psi, &cfg.tolerances)?;
            let code = if report.in_domain == Membership::Yes { 0 } else { EXIT_INAPPLICABLE };
            let mut rec = RunRecord::new("domain-check", cfg);
            rec.started_at = started;
            rec.messages.push(format!("state {}", recipe.spec_string()));
            rec.domain_reports.push(report);
            finish(rec, code, &common)
        }
        Command::Sweep { family, params, pair, common } => {
            let cfg = common.config()?;
            let started = timestamp(common.deterministic);
            let axes = params.iter().map(|p| SweepAxis::parse(p)).collect::<Result<Vec<_>, _>>()?;
            let recipes = states::sweep(&family, &axes, cfg.hbar)?;
            if recipes.is_empty() {
                bail!("sweep produced no states");
            }
            let (a, b) = parse_pair(&pair, cfg.hbar)?;
            let evaluated: Vec<Evaluated> = recipes.par_iter().map(|r| evaluate(r, &a, &b, &cfg)).collect();
            let outcomes: Vec<Outcome> = evaluated.iter().map(|e| e.outcome).collect();
            let mut rec = RunRecord::new("sweep", cfg);
            rec.pair = Some((a.label(), b.label()));
            rec.started_at = started;
            for ev in evaluated {
                rec.results.push(ev.result);
                rec.domain_reports.extend(ev.domain_reports);
            }
            finish(rec, exit_code(&outcomes), &common)
        }
        Command::Classical { file, common } => {
            let cfg = common.config()?;
            if matches!(cfg.output, OutputFormat::Csv) {
                bail!("csv output is only available for analyze and sweep");
            }
            let started = timestamp(common.deterministic);
            let samples = SampleSet::load(&file).with_context(|| format!("reading {}", file.display()))?;
            let report = classical_relation(&samples);
            let code = if report.holds { 0 } else { EXIT_VIOLATED };
            let mut rec = RunRecord::new("classical", cfg);
            rec.started_at = started;
            rec.messages.push(format!("{} samples from {}", samples.len(), file.display()));
            rec.classical_reports.push(report);
            finish(rec, code, &common)
        }
    }
}

fn finish(mut rec: RunRecord, code: u8, common: &Common) -> anyhow::Result<u8> {
    rec.exit_code = code.into();
    rec.finished_at = timestamp(common.deterministic);
    let text = match rec.config.output {
        OutputFormat::Json => rec.to_json()?,
        OutputFormat::Csv => rec.to_csv(),
        OutputFormat::Human => rec.to_human(),
    };
    match &common.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
