//! Reference path: operators materialized as explicit `n × n` matrices and
//! inner products written as `χ† W ψ` with `W` the diagonal weight matrix.
//! Slow and capped in size, used to cross-check the fast stencil path.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridTopology, WaveFunction};
use crate::operators::{ComplexMatrix, OperatorKind, OperatorSpec};
use crate::stats::StatReport;

#[derive(Clone, Debug)]
pub struct DenseOperator {
    pub matrix: ComplexMatrix,
    pub topology: GridTopology,
}

fn derivative_matrix(n: usize, h: f64, factor: Complex64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n);
    let c = factor / (2.0 * h);
    m.set(0, 0, c * -3.0);
    m.set(0, 1, c * 4.0);
    m.set(0, 2, -c);
    for k in 1..n - 1 {
        m.set(k, k - 1, -c);
        m.set(k, k + 1, c);
    }
    m.set(n - 1, n - 1, c * 3.0);
    m.set(n - 1, n - 2, c * -4.0);
    m.set(n - 1, n - 3, c);
    m
}

fn diagonal(values: &[f64]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(values.len());
    for (k, v) in values.iter().enumerate() {
        m.set(k, k, Complex64::new(*v, 0.0));
    }
    m
}

/// Builds the matrix of `op` on `topology`; refuses `n > cap`.
pub fn materialize(op: &OperatorSpec, topology: &GridTopology, cap: usize) -> Result<DenseOperator> {
    let n = topology.n_points();
    if n > cap {
        return Err(Error::OracleCapExceeded { n, cap });
    }
    op.check_topology(topology)?;
    let matrix = match &op.kind {
        OperatorKind::Position | OperatorKind::Angle => diagonal(&topology.coordinates()),
        OperatorKind::Momentum | OperatorKind::AngularMomentum => {
            derivative_matrix(n, topology.step(), Complex64::new(0.0, -op.hbar))
        }
        OperatorKind::MultiplyByFunction(f) => diagonal(&f.values_on(topology)?),
        OperatorKind::DenseMatrix(m) => m.clone(),
    };
    Ok(DenseOperator { matrix, topology: topology.clone() })
}

impl DenseOperator {
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.matrix.mul_vec(v)
    }

    /// `W M − (W M)†`: zero exactly when `M` is symmetric in the discrete
    /// inner product.
    pub fn hermiticity_defect(&self) -> ComplexMatrix {
        let w = self.topology.weights();
        let n = w.len();
        let mut d = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let wm = w[i] * self.matrix.get(i, j);
                let wm_t = (w[j] * self.matrix.get(j, i)).conj();
                d.set(i, j, wm - wm_t);
            }
        }
        d
    }
}

fn braket(w: &[f64], chi: &[Complex64], psi: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..w.len() {
        acc += chi[k].conj() * (w[k] * psi[k]);
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub mean_a: f64,
    pub mean_b: f64,
    pub delta_a: f64,
    pub delta_b: f64,
    pub covariance: f64,
    pub imag_cross: f64,
    /// `i⟨ψ, (M_A M_B − M_B M_A)ψ⟩`, evaluated without any domain gate.
    pub commutator: f64,
}

impl OracleReport {
    /// Largest absolute difference to the fast path over the shared fields
    /// (commutator included only when the fast path produced one).
    pub fn max_deviation(&self, fast: &StatReport) -> f64 {
        let mut d = [
            self.mean_a - fast.mean_a,
            self.mean_b - fast.mean_b,
            self.delta_a - fast.delta_a,
            self.delta_b - fast.delta_b,
            self.covariance - fast.covariance,
            self.imag_cross - fast.imag_cross,
        ]
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
        if let Some(c) = fast.commutator_expectation {
            d = d.max((self.commutator - c).abs());
        }
        d
    }
}

pub fn oracle_stat_report(a: &OperatorSpec, b: &OperatorSpec, psi: &WaveFunction, cap: usize) -> Result<OracleReport> {
    let topo = psi.topology();
    let ma = materialize(a, topo, cap)?;
    let mb = materialize(b, topo, cap)?;
    let w = topo.weights();
    let v = psi.amplitudes();
    let av = ma.apply(v);
    let bv = mb.apply(v);
    let mean_a = braket(&w, v, &av).re;
    let mean_b = braket(&w, v, &bv).re;
    let ca: Vec<Complex64> = av.iter().zip(v).map(|(x, y)| x - y * mean_a).collect();
    let cb: Vec<Complex64> = bv.iter().zip(v).map(|(x, y)| x - y * mean_b).collect();
    let cross = braket(&w, &av, &bv);
    let abv = ma.apply(&bv);
    let bav = mb.apply(&av);
    let diff: Vec<Complex64> = abv.iter().zip(&bav).map(|(x, y)| x - y).collect();
    let commutator = (Complex64::new(0.0, 1.0) * braket(&w, v, &diff)).re;
    Ok(OracleReport {
        mean_a,
        mean_b,
        delta_a: braket(&w, &ca, &ca).re.max(0.0).sqrt(),
        delta_b: braket(&w, &cb, &cb).re.max(0.0).sqrt(),
        covariance: cross.re - mean_a * mean_b,
        imag_cross: cross.im,
        commutator,
    })
}
