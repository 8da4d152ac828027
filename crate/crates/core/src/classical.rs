//! Cauchy–Schwarz for pairs of real random variables: `Δa Δb ≥ |σ_ab|`,
//! with equality exactly when `b` is an affine function of `a` on the
//! support of the weights.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Paired samples with optional probability weights (uniform when absent).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    a: Vec<f64>,
    b: Vec<f64>,
    weights: Option<Vec<f64>>,
}

impl SampleSet {
    pub fn new(a: Vec<f64>, b: Vec<f64>, weights: Option<Vec<f64>>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidSampleSet(format!("length mismatch: {} vs {}", a.len(), b.len())));
        }
        if a.len() < 2 {
            return Err(Error::InvalidSampleSet("at least two samples are needed".into()));
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSampleSet("non-finite sample".into()));
        }
        if let Some(w) = &weights {
            if w.len() != a.len() {
                return Err(Error::InvalidSampleSet(format!("{} weights for {} samples", w.len(), a.len())));
            }
            if w.iter().any(|&x| !x.is_finite() || x < 0.0) {
                return Err(Error::InvalidSampleSet("weights must be finite and nonnegative".into()));
            }
            let total: f64 = w.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidSampleSet(format!("weights sum to {total}, not 1")));
            }
        }
        Ok(SampleSet { a, b, weights })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    fn weight(&self, k: usize) -> f64 {
        match &self.weights {
            Some(w) => w[k],
            None => 1.0 / self.a.len() as f64,
        }
    }

    fn expect(&self, f: impl Fn(usize) -> f64) -> f64 {
        (0..self.len()).map(|k| self.weight(k) * f(k)).sum()
    }

    /// Reads `a,b[,w]` rows. A first row that does not parse as numbers is
    /// taken as a header; `#` starts a comment line.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let (mut a, mut b, mut w) = (Vec::new(), Vec::new(), Vec::new());
        let mut width = None;
        for (idx, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(format!("csv: {e}")))?;
            let line = rec.position().map(|p| p.line()).unwrap_or(idx as u64 + 1);
            if rec.iter().all(str::is_empty) {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            let values = match parsed {
                Ok(v) => v,
                Err(_) if idx == 0 => continue,
                Err(_) => return Err(Error::Parse(format!("line {line}: non-numeric field"))),
            };
            if !(2..=3).contains(&values.len()) {
                return Err(Error::Parse(format!("line {line}: expected 2 or 3 columns, found {}", values.len())));
            }
            if *width.get_or_insert(values.len()) != values.len() {
                return Err(Error::Parse(format!("line {line}: inconsistent column count")));
            }
            a.push(values[0]);
            b.push(values[1]);
            if values.len() == 3 {
                w.push(values[2]);
            }
        }
        SampleSet::new(a, b, (width == Some(3)).then_some(w))
    }

    pub fn load(path: &Path) -> Result<Self> {
        SampleSet::from_csv_str(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalMoments {
    pub mean_a: f64,
    pub mean_b: f64,
    pub delta_a: f64,
    pub delta_b: f64,
    pub covariance: f64,
}

/// Population moments, computed in two passes.
pub fn classical_moments(s: &SampleSet) -> ClassicalMoments {
    let mean_a = s.expect(|k| s.a[k]);
    let mean_b = s.expect(|k| s.b[k]);
    let var_a = s.expect(|k| (s.a[k] - mean_a).powi(2));
    let var_b = s.expect(|k| (s.b[k] - mean_b).powi(2));
    let covariance = s.expect(|k| (s.a[k] - mean_a) * (s.b[k] - mean_b));
    ClassicalMoments { mean_a, mean_b, delta_a: var_a.sqrt(), delta_b: var_b.sqrt(), covariance }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalReport {
    pub moments: ClassicalMoments,
    /// `Δa Δb`.
    pub lhs: f64,
    /// `|σ_ab|`.
    pub rhs: f64,
    pub holds: bool,
    pub equality: bool,
    /// `λ = −σ_ab / Δb²`, the multiplier minimizing `⟨(ā + λb̄)²⟩`.
    pub lambda: Option<f64>,
    /// `rms(ā + λb̄) / Δa`; zero when `b` is an affine function of `a`.
    pub linearity_residual: Option<f64>,
    pub degenerate: bool,
}

const EQUALITY_REL: f64 = 1e-10;

pub fn classical_relation(s: &SampleSet) -> ClassicalReport {
    let m = classical_moments(s);
    let lhs = m.delta_a * m.delta_b;
    let rhs = m.covariance.abs();
    let degenerate = m.delta_a == 0.0 || m.delta_b == 0.0;
    let holds = lhs - rhs >= -1e-12 * lhs.max(f64::MIN_POSITIVE);
    let (lambda, linearity_residual) = if degenerate {
        (None, None)
    } else {
        let lambda = -m.covariance / (m.delta_b * m.delta_b);
        let ms = s.expect(|k| ((s.a[k] - m.mean_a) + lambda * (s.b[k] - m.mean_b)).powi(2));
        (Some(lambda), Some(ms.max(0.0).sqrt() / m.delta_a))
    };
    let equality = (lhs == 0.0 && rhs == 0.0) || (lhs - rhs).abs() <= EQUALITY_REL * lhs;
    ClassicalReport { moments: m, lhs, rhs, holds, equality, lambda, linearity_residual, degenerate }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantReport {
    /// Smallest `⟨(ā + λb̄)²⟩` over the supplied multipliers.
    pub min_value: f64,
    pub argmin: f64,
    /// `4σ_ab² − 4Δa²Δb²`, never positive.
    pub discriminant: f64,
}

/// Evaluates `⟨(ā + λb̄)²⟩` directly from the samples for each `λ`.
pub fn quadratic_discriminant_check(s: &SampleSet, lambdas: &[f64]) -> DiscriminantReport {
    let m = classical_moments(s);
    let mut min_value = f64::INFINITY;
    let mut argmin = f64::NAN;
    for &l in lambdas {
        let v = s.expect(|k| ((s.a[k] - m.mean_a) + l * (s.b[k] - m.mean_b)).powi(2));
        if v < min_value {
            min_value = v;
            argmin = l;
        }
    }
    let discriminant = 4.0 * m.covariance.powi(2) - 4.0 * (m.delta_a * m.delta_b).powi(2);
    DiscriminantReport { min_value, argmin, discriminant }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(SampleSet::new(vec![1.0], vec![2.0], None).is_err());
        assert!(SampleSet::new(vec![1.0, 2.0], vec![2.0], None).is_err());
        assert!(SampleSet::new(vec![1.0, 2.0], vec![2.0, 3.0], Some(vec![0.5, 0.6])).is_err());
        assert!(SampleSet::new(vec![1.0, 2.0], vec![2.0, 3.0], Some(vec![1.5, -0.5])).is_err());
        assert!(SampleSet::new(vec![1.0, f64::NAN], vec![2.0, 3.0], None).is_err());
        assert!(SampleSet::new(vec![1.0, 2.0], vec![2.0, 3.0], Some(vec![0.25, 0.75])).is_ok());
    }

    #[test]
    fn affine_is_equality() {
        let a: Vec<f64> = (0..50).map(|k| (k as f64 * 0.37).sin() * 3.0).collect();
        let b: Vec<f64> = a.iter().map(|x| -2.5 * x + 7.0).collect();
        let r = classical_relation(&SampleSet::new(a, b, None).unwrap());
        assert!(r.equality && r.holds);
        assert!(r.linearity_residual.unwrap() < 1e-10);
        assert!((r.lambda.unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn independent_is_strict() {
        let s = SampleSet::new(vec![1.0, -1.0, 1.0, -1.0], vec![1.0, 1.0, -1.0, -1.0], None).unwrap();
        let r = classical_relation(&s);
        assert_eq!(r.rhs, 0.0);
        assert!((r.lhs - 1.0).abs() < 1e-15);
        assert!(!r.equality && r.holds);
    }

    #[test]
    fn constant_is_degenerate() {
        let s = SampleSet::new(vec![2.0, 2.0, 2.0], vec![1.0, 5.0, 3.0], None).unwrap();
        let r = classical_relation(&s);
        assert!(r.degenerate && r.equality && r.holds);
        assert!(r.lambda.is_none());
    }

    #[test]
    fn weights_respected() {
        // all mass on the first two points: affine there, so equality
        let s = SampleSet::new(vec![0.0, 1.0, 5.0], vec![0.0, 2.0, -9.0], Some(vec![0.5, 0.5, 0.0])).unwrap();
        let r = classical_relation(&s);
        assert!(r.equality, "{r:?}");
        assert!((r.moments.mean_a - 0.5).abs() < 1e-15);
    }

    #[test]
    fn discriminant_matches() {
        let s = SampleSet::new(vec![0.0, 1.0, 2.0, 4.0], vec![1.0, 0.0, 3.0, 2.0], None).unwrap();
        let lambdas: Vec<f64> = (-400..=400).map(|k| k as f64 * 0.005).collect();
        let d = quadratic_discriminant_check(&s, &lambdas);
        assert!(d.discriminant < 0.0);
        let r = classical_relation(&s);
        let m = r.moments;
        let exact = m.delta_a.powi(2) - m.covariance.powi(2) / m.delta_b.powi(2);
        assert!(d.min_value >= exact - 1e-12);
        assert!((d.min_value - exact).abs() < 1e-4);
    }

    #[test]
    fn csv_parsing() {
        let s = SampleSet::from_csv_str("a,b\n1,2\n2, 4\n# note\n3,6\n").unwrap();
        assert_eq!(s.len(), 3);
        assert!(classical_relation(&s).equality);
        let s = SampleSet::from_csv_str("1,2,0.5\n2,1,0.5\n").unwrap();
        assert_eq!(s.len(), 2);
        let err = SampleSet::from_csv_str("a,b\n1,2\n2,x\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        assert!(SampleSet::from_csv_str("1,2\n1,2,3\n").is_err());
    }
}
