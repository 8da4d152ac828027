//! Analytic state constructors and parameter sweeps.
//!
//! Every recipe can sample itself on any grid, so domain checks refine the
//! actual state rather than an interpolant of it.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Expression, Variable};
use crate::grid::{self, GridTopology, StateSource, WaveFunction, TWO_PI};

/// One Fourier component `amplitude · e^{imφ}` of a circle wave packet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub m: i64,
    pub amplitude: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum StateRecipe {
    /// `e^{imφ}/√(2π)`.
    LzEigenstate { m: i64 },
    /// `exp(−(1 − ic)(x − x0)²/(2σ²) + i p0 x/ħ)`, so that `Δx = σ/√2`,
    /// `⟨p⟩ = p0` and `σ_xp = cħ/2`.
    Gaussian { x0: f64, p0: f64, sigma: f64, chirp: f64, hbar: f64 },
    /// `√(2|x|) e^{−|x|}`: normalized, but its derivative is not square integrable.
    Cusp,
    /// `Σ a_m e^{i(m + α/2π)φ}`, which satisfies `ψ(2π) = e^{iα} ψ(0)`.
    CircleWavePacket { modes: Vec<Mode>, boundary_phase: f64 },
    /// `(1 + x²)^{−power}` on `[−half_width, half_width]`.
    SlowDecay { power: f64, half_width: f64 },
    /// `Σ c_k h_k(x)` with normalized Hermite functions `h_k`.
    HermiteSuperposition { coefficients: Vec<Complex64> },
    /// Closed-form expression in `x` (on `[x_min, x_max]`) or `phi`.
    CustomExpression { expr: Expression, x_min: f64, x_max: f64 },
    /// Samples loaded from a `coordinate re im` text file.
    CustomSamples { path: String },
}

const CUSP_HALF_WIDTH: f64 = 20.0;
const HERMITE_HALF_WIDTH: f64 = 12.0;
const GAUSSIAN_WIDTHS: f64 = 12.0;

impl StateRecipe {
    pub fn lz_eigenstate(m: i64) -> Self {
        StateRecipe::LzEigenstate { m }
    }

    pub fn gaussian(sigma: f64) -> Self {
        StateRecipe::Gaussian { x0: 0.0, p0: 0.0, sigma, chirp: 0.0, hbar: 1.0 }
    }

    pub fn chirped_gaussian(sigma: f64, chirp: f64, hbar: f64) -> Self {
        StateRecipe::Gaussian { x0: 0.0, p0: 0.0, sigma, chirp, hbar }
    }

    pub fn wave_packet(modes: &[(i64, Complex64)], boundary_phase: f64) -> Self {
        StateRecipe::CircleWavePacket {
            modes: modes.iter().map(|&(m, amplitude)| Mode { m, amplitude }).collect(),
            boundary_phase,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            StateRecipe::LzEigenstate { .. } => "lz-eigenstate",
            StateRecipe::Gaussian { .. } => "gaussian",
            StateRecipe::Cusp => "cusp",
            StateRecipe::CircleWavePacket { .. } => "wave-packet",
            StateRecipe::SlowDecay { .. } => "slow-decay",
            StateRecipe::HermiteSuperposition { .. } => "hermite",
            StateRecipe::CustomExpression { .. } | StateRecipe::CustomSamples { .. } => "custom",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            StateRecipe::Gaussian { sigma, hbar, x0, p0, chirp } => {
                if !(*sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::InvalidInput(format!("gaussian sigma must be > 0 (got {sigma})")));
                }
                if hbar.is_nan() || *hbar <= 0.0 || !x0.is_finite() || !p0.is_finite() || !chirp.is_finite() {
                    return Err(Error::InvalidInput("gaussian parameters must be finite, hbar > 0".into()));
                }
            }
            StateRecipe::CircleWavePacket { modes, boundary_phase } => {
                if modes.is_empty() {
                    return Err(Error::InvalidInput("wave packet needs at least one mode".into()));
                }
                if !boundary_phase.is_finite() {
                    return Err(Error::InvalidInput("boundary phase must be finite".into()));
                }
            }
            StateRecipe::SlowDecay { power, half_width } => {
                if !(power.is_finite() && *half_width > 0.0 && half_width.is_finite()) {
                    return Err(Error::InvalidInput("slow-decay needs finite power and half_width > 0".into()));
                }
            }
            StateRecipe::HermiteSuperposition { coefficients } => {
                if coefficients.is_empty() {
                    return Err(Error::InvalidInput("hermite superposition needs coefficients".into()));
                }
            }
            StateRecipe::CustomExpression { x_min, x_max, .. }
                if x_min.is_nan() || x_max.is_nan() || x_min >= x_max =>
            {
                return Err(Error::InvalidInput("custom expression needs xmin < xmax".into()));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn is_circle_state(&self) -> bool {
        match self {
            StateRecipe::LzEigenstate { .. } | StateRecipe::CircleWavePacket { .. } => true,
            StateRecipe::CustomExpression { expr, .. } => expr.variable() == Some(Variable::Phi),
            _ => false,
        }
    }

    /// The grid this state is normally realized on, with `n` points.
    pub fn default_topology(&self, n: usize) -> Result<GridTopology> {
        match self {
            StateRecipe::LzEigenstate { .. } | StateRecipe::CircleWavePacket { .. } => GridTopology::circle(n),
            StateRecipe::Gaussian { x0, sigma, .. } => {
                GridTopology::line(x0 - GAUSSIAN_WIDTHS * sigma, x0 + GAUSSIAN_WIDTHS * sigma, n)
            }
            StateRecipe::Cusp => GridTopology::line(-CUSP_HALF_WIDTH, CUSP_HALF_WIDTH, n),
            StateRecipe::SlowDecay { half_width, .. } => GridTopology::line(-half_width, *half_width, n),
            StateRecipe::HermiteSuperposition { .. } => GridTopology::line(-HERMITE_HALF_WIDTH, HERMITE_HALF_WIDTH, n),
            StateRecipe::CustomExpression { expr, x_min, x_max } => {
                if expr.variable() == Some(Variable::Phi) {
                    GridTopology::circle(n)
                } else {
                    GridTopology::line(*x_min, *x_max, n)
                }
            }
            StateRecipe::CustomSamples { path } => Ok(load_samples(Path::new(path))?.topology().clone()),
        }
    }

    fn check_topology(&self, topology: &GridTopology) -> Result<()> {
        let wants_circle = self.is_circle_state();
        let ok = match self {
            StateRecipe::CustomSamples { .. } => true,
            StateRecipe::CustomExpression { expr, .. } if expr.variable().is_none() => true,
            _ => wants_circle == topology.is_circle(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::TopologyMismatch(format!(
                "{} states cannot be realized on a {} grid",
                self.family_name(),
                topology.kind_name()
            )))
        }
    }

    fn sample(&self, topology: &GridTopology) -> Result<Vec<Complex64>> {
        let xs = topology.coordinates();
        let amps = match self {
            StateRecipe::LzEigenstate { m } => {
                let a = 1.0 / TWO_PI.sqrt();
                xs.iter().map(|phi| Complex64::from_polar(a, *m as f64 * phi)).collect()
            }
            StateRecipe::Gaussian { x0, p0, sigma, chirp, hbar } => xs
                .iter()
                .map(|x| {
                    let d = x - x0;
                    let q = d * d / (2.0 * sigma * sigma);
                    Complex64::new(-q, chirp * q + p0 * x / hbar).exp()
                })
                .collect(),
            StateRecipe::Cusp => {
                // Keep the cusp off the nodes: shift by half a step if a node sits on it.
                let h = topology.step();
                let on_node = xs.iter().any(|x| x.abs() < 1e-9 * h);
                let c = if on_node { 0.5 * h } else { 0.0 };
                xs.iter()
                    .map(|x| {
                        let r = (x - c).abs();
                        Complex64::new((2.0 * r).sqrt() * (-r).exp(), 0.0)
                    })
                    .collect()
            }
            StateRecipe::CircleWavePacket { modes, boundary_phase } => {
                let shift = boundary_phase / TWO_PI;
                let m_min = modes.iter().map(|md| md.m).min().unwrap_or(0);
                let m_max = modes.iter().map(|md| md.m).max().unwrap_or(0);
                let mut coeffs = vec![Complex64::new(0.0, 0.0); (m_max - m_min + 1) as usize];
                for md in modes {
                    coeffs[(md.m - m_min) as usize] += md.amplitude;
                }
                // Horner in e^{iφ}, then one overall phase e^{i(m_min + α/2π)φ}.
                xs.iter()
                    .map(|phi| {
                        let step = Complex64::from_polar(1.0, *phi);
                        let poly = coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * step + c);
                        poly * Complex64::from_polar(1.0, (m_min as f64 + shift) * phi)
                    })
                    .collect()
            }
            StateRecipe::SlowDecay { power, .. } => {
                xs.iter().map(|x| Complex64::new((1.0 + x * x).powf(-power), 0.0)).collect()
            }
            StateRecipe::HermiteSuperposition { coefficients } => xs
                .iter()
                .map(|&x| hermite_functions(x, coefficients.len()).iter().zip(coefficients).map(|(h, c)| c * *h).sum())
                .collect(),
            StateRecipe::CustomExpression { expr, .. } => xs.iter().map(|v| expr.eval(*v)).collect(),
            StateRecipe::CustomSamples { .. } => unreachable!("handled in realize"),
        };
        Ok(amps)
    }

    /// Canonical mini-language form, e.g. `gaussian:sigma=1,x0=0,p0=0,c=0.5`.
    pub fn spec_string(&self) -> String {
        match self {
            StateRecipe::LzEigenstate { m } => format!("lz-eigenstate:m={m}"),
            StateRecipe::Gaussian { x0, p0, sigma, chirp, .. } => {
                format!("gaussian:sigma={sigma},x0={x0},p0={p0},c={chirp}")
            }
            StateRecipe::Cusp => "cusp".into(),
            StateRecipe::CircleWavePacket { modes, boundary_phase } => {
                let ms: Vec<String> =
                    modes.iter().map(|md| format!("{}:{}", md.m, fmt_complex(md.amplitude))).collect();
                format!("wave-packet:modes={},alpha={boundary_phase}", ms.join(";"))
            }
            StateRecipe::SlowDecay { power, half_width } => {
                format!("slow-decay:power={power},half_width={half_width}")
            }
            StateRecipe::HermiteSuperposition { coefficients } => {
                let cs: Vec<String> = coefficients.iter().map(|c| fmt_complex(*c)).collect();
                format!("hermite:coeffs={}", cs.join(";"))
            }
            StateRecipe::CustomExpression { expr, x_min, x_max } => {
                if expr.variable() == Some(Variable::Phi) {
                    format!("custom:expr={expr}")
                } else {
                    format!("custom:expr={expr},xmin={x_min},xmax={x_max}")
                }
            }
            StateRecipe::CustomSamples { path } => format!("custom:file={path}"),
        }
    }

    /// Parse the mini-language `family:key=value,key=value`. `hbar` is used
    /// by families whose parameters carry momentum units.
    pub fn parse_spec(spec: &str, hbar: f64) -> Result<Self> {
        let spec = spec.trim();
        let (family, rest) = match spec.split_once(':') {
            Some((f, r)) => (f.trim(), r.trim()),
            None => (spec, ""),
        };
        let mut kv = KeyValues::parse(rest)?;
        let recipe = match family {
            "lz-eigenstate" | "lz" => StateRecipe::LzEigenstate { m: kv.required_int("m")? },
            "gaussian" => StateRecipe::Gaussian {
                sigma: kv.float("sigma", 1.0)?,
                x0: kv.float("x0", 0.0)?,
                p0: kv.float("p0", 0.0)?,
                chirp: match kv.take("chirp") {
                    Some(v) => parse_f64("chirp", &v)?,
                    None => kv.float("c", 0.0)?,
                },
                hbar,
            },
            "cusp" => StateRecipe::Cusp,
            "wave-packet" => {
                let modes = match kv.take("modes") {
                    Some(text) => parse_modes(&text)?,
                    None => return Err(Error::Parse("wave-packet needs modes=m:amp;m:amp".into())),
                };
                StateRecipe::CircleWavePacket { modes, boundary_phase: kv.float("alpha", 0.0)? }
            }
            "slow-decay" => {
                StateRecipe::SlowDecay { power: kv.float("power", 0.25)?, half_width: kv.float("half_width", 50.0)? }
            }
            "hermite" => {
                let text = kv.take("coeffs").ok_or_else(|| Error::Parse("hermite needs coeffs=c0;c1;...".into()))?;
                StateRecipe::HermiteSuperposition {
                    coefficients: text.split(';').map(parse_complex).collect::<Result<_>>()?,
                }
            }
            "custom" => {
                if let Some(path) = kv.take("file") {
                    StateRecipe::CustomSamples { path }
                } else if let Some(text) = kv.take("expr") {
                    StateRecipe::CustomExpression {
                        expr: Expression::parse(&text)?,
                        x_min: kv.float("xmin", -10.0)?,
                        x_max: kv.float("xmax", 10.0)?,
                    }
                } else {
                    return Err(Error::Parse("custom needs expr=<expression> or file=<path>".into()));
                }
            }
            other => return Err(Error::Parse(format!("unknown state family '{other}'"))),
        };
        kv.finish()?;
        recipe.validate()?;
        Ok(recipe)
    }
}

impl FromStr for StateRecipe {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        StateRecipe::parse_spec(s, 1.0)
    }
}

impl fmt::Display for StateRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_string())
    }
}

impl StateSource for StateRecipe {
    fn realize_on(&self, topology: &GridTopology) -> Result<WaveFunction> {
        realize(self, topology)
    }
}

fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

fn parse_complex(text: &str) -> Result<Complex64> {
    Complex64::from_str(text.trim()).map_err(|_| Error::Parse(format!("bad complex number '{text}'")))
}

fn parse_f64(key: &str, text: &str) -> Result<f64> {
    text.trim().parse().map_err(|_| Error::Parse(format!("bad value for {key}: '{text}'")))
}

fn parse_modes(text: &str) -> Result<Vec<Mode>> {
    text.split(';')
        .map(|item| {
            let (m, a) =
                item.split_once(':').ok_or_else(|| Error::Parse(format!("mode '{item}' must be m:amplitude")))?;
            let m: i64 = m.trim().parse().map_err(|_| Error::Parse(format!("bad mode index '{m}'")))?;
            Ok(Mode { m, amplitude: parse_complex(a)? })
        })
        .collect()
}

struct KeyValues(Vec<(String, String)>);

impl KeyValues {
    fn parse(text: &str) -> Result<Self> {
        let mut out = Vec::new();
        if text.is_empty() {
            return Ok(KeyValues(out));
        }
        for part in text.split(',') {
            let (k, v) =
                part.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got '{part}'")))?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(KeyValues(out))
    }

    fn take(&mut self, key: &str) -> Option<String> {
        let i = self.0.iter().position(|(k, _)| k == key)?;
        Some(self.0.remove(i).1)
    }

    fn float(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.take(key) {
            Some(v) => parse_f64(key, &v),
            None => Ok(default),
        }
    }

    fn required_int(&mut self, key: &str) -> Result<i64> {
        let v = self.take(key).ok_or_else(|| Error::Parse(format!("missing required key '{key}'")))?;
        v.parse().map_err(|_| Error::Parse(format!("bad integer for {key}: '{v}'")))
    }

    fn finish(self) -> Result<()> {
        match self.0.first() {
            Some((k, _)) => Err(Error::Parse(format!("unknown key '{k}'"))),
            None => Ok(()),
        }
    }
}

/// Normalized Hermite functions `h_0(x) … h_{count−1}(x)`.
pub fn hermite_functions(x: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let h0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(h0);
    if count > 1 {
        out.push(std::f64::consts::SQRT_2 * x * h0);
    }
    for k in 1..count.saturating_sub(1) {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Samples `recipe` on `topology` and normalizes with the grid norm. The
/// result carries the recipe so refinement re-samples exactly.
pub fn realize(recipe: &StateRecipe, topology: &GridTopology) -> Result<WaveFunction> {
    recipe.validate()?;
    if let StateRecipe::CustomSamples { path } = recipe {
        let base = load_samples(Path::new(path))?;
        let psi = if base.topology() == topology {
            base
        } else if let Some(f) = base.topology().refinement_factor(topology) {
            grid::refine(&base, f)?
        } else {
            return Err(Error::TopologyMismatch(format!(
                "sample file {path} is on {:?}, requested {topology:?}",
                base.topology()
            )));
        };
        return grid::normalize(&psi);
    }
    recipe.check_topology(topology)?;
    let psi = WaveFunction::new(topology.clone(), recipe.sample(topology)?)?;
    Ok(grid::normalize(&psi)?.with_source(Arc::new(recipe.clone())))
}

/// Reads `coordinate re im` rows (whitespace or comma separated, `#`
/// comments). The coordinates must be uniform; a grid running from 0 to 2π
/// is taken to be the circle.
pub fn load_samples(path: &Path) -> Result<WaveFunction> {
    let text = std::fs::read_to_string(path)?;
    parse_samples(&text)
}

pub fn parse_samples(text: &str) -> Result<WaveFunction> {
    let mut coords = Vec::new();
    let mut amps = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let nums: Option<Vec<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
        match nums.as_deref() {
            Some([x, re, im]) => {
                coords.push(*x);
                amps.push(Complex64::new(*re, *im));
            }
            Some([x, re]) => {
                coords.push(*x);
                amps.push(Complex64::new(*re, 0.0));
            }
            _ => return Err(Error::Parse(format!("line {}: expected 'coordinate re im'", lineno + 1))),
        }
    }
    let n = coords.len();
    if n < 3 {
        return Err(Error::Parse("sample file needs at least 3 rows".into()));
    }
    let (a, b) = (coords[0], coords[n - 1]);
    let h = (b - a) / (n - 1) as f64;
    if h.is_nan() || h <= 0.0 || coords.iter().enumerate().any(|(k, x)| (x - (a + k as f64 * h)).abs() > 1e-9 * (b - a))
    {
        return Err(Error::Parse("sample coordinates must be uniform and increasing".into()));
    }
    let topology = if a.abs() < 1e-9 && (b - TWO_PI).abs() < 1e-9 {
        GridTopology::circle(n)?
    } else {
        GridTopology::line(a, b, n)?
    };
    WaveFunction::new(topology, amps)
}

/// Values for one swept parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepAxis {
    pub key: String,
    pub values: Vec<String>,
}

impl SweepAxis {
    /// `key=start:stop:step` (inclusive), `key=a;b;c`, or `key=value`.
    pub fn parse(text: &str) -> Result<Self> {
        let (key, spec) =
            text.split_once('=').ok_or_else(|| Error::Parse(format!("sweep parameter '{text}' must be key=range")))?;
        let key = key.trim().to_string();
        let spec = spec.trim();
        let nums: Option<Vec<f64>> = spec.split(':').map(|s| s.trim().parse().ok()).collect();
        let values = match nums.as_deref() {
            Some([start, stop, step]) => {
                if step.is_nan() || *step <= 0.0 || stop < start {
                    return Err(Error::Parse(format!("bad range '{spec}' for {key}")));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                (0..count).map(|k| fmt_value(start + k as f64 * step)).collect()
            }
            _ if spec.contains(';') && !key.eq("modes") && !key.eq("coeffs") => {
                spec.split(';').map(|s| s.trim().to_string()).collect()
            }
            _ => vec![spec.to_string()],
        };
        if values.is_empty() || values.iter().any(|v| v.is_empty()) {
            return Err(Error::Parse(format!("empty range for {key}")));
        }
        Ok(SweepAxis { key, values })
    }
}

fn fmt_value(v: f64) -> String {
    let r = (v * 1e12).round() / 1e12;
    format!("{}", if r == 0.0 { 0.0 } else { r })
}

/// Cartesian product of the axes, as recipes of one family.
pub fn sweep(family: &str, axes: &[SweepAxis], hbar: f64) -> Result<Vec<StateRecipe>> {
    if let Some(a) = axes.iter().find(|a| a.values.is_empty()) {
        return Err(Error::InvalidInput(format!("empty range for {}", a.key)));
    }
    let mut combos: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for axis in axes {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                axis.values.iter().map(move |v| {
                    let mut c = c.clone();
                    c.push((axis.key.clone(), v.clone()));
                    c
                })
            })
            .collect();
    }
    combos
        .into_iter()
        .map(|c| {
            let body: Vec<String> = c.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let spec = if body.is_empty() { family.to_string() } else { format!("{family}:{}", body.join(",")) };
            StateRecipe::parse_spec(&spec, hbar)
        })
        .collect()
}
