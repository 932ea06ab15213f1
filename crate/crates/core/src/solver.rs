//! Sketch-and-solve for `min ||A x - b||`, the exact QR oracle, relative
//! residuals, and an empirical subspace-embedding check.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{residual_norm, solve_least_squares, DenseMatrix, Vector};
use crate::rng;
use crate::sketch::{CostMeter, SketchKind, SketchOperator};
use crate::stats::CompensatedSum;

/// Below `CONSISTENT_TOL * ||b||` an exact residual is treated as zero.
pub const CONSISTENT_TOL: f64 = 1e-12;

/// An overdetermined problem `A x ~ b` with its augmented matrix `M = (A | b)`.
#[derive(Clone, Debug)]
pub struct LlspProblem {
    a: DenseMatrix,
    b: Vector,
    augmented: DenseMatrix,
}

impl LlspProblem {
    pub fn new(a: DenseMatrix, b: Vector) -> Result<Self> {
        let (m, d) = a.shape();
        if d >= m {
            return Err(Error::dim(format!("need more rows than columns, got {m}x{d}")));
        }
        let augmented = a.augment(&b)?;
        Ok(LlspProblem { a, b, augmented })
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &Vector {
        &self.b
    }

    pub fn augmented(&self) -> &DenseMatrix {
        &self.augmented
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn d(&self) -> usize {
        self.a.cols()
    }

    pub fn residual(&self, x: &Vector) -> Result<f64> {
        residual_norm(&self.a, x, &self.b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SketchMeta {
    pub kind: SketchKind,
    pub s: usize,
    pub seed: u64,
    pub cost: CostMeter,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub x: Vector,
    /// `||A x - b||` on the original problem.
    pub residual: f64,
    /// `residual / min_u ||A u - b||`, when the optimum was supplied.
    pub relative_residual: Option<f64>,
    pub sketch: Option<SketchMeta>,
}

/// Full QR solve of the original problem.
pub fn solve_exact(p: &LlspProblem) -> Result<Solution> {
    let x = solve_least_squares(&p.a, &p.b)?;
    let residual = p.residual(&x)?;
    Ok(Solution {
        x,
        residual,
        relative_residual: Some(1.0),
        sketch: None,
    })
}

/// Solves the reduced problem `min ||(F A) u - F b||` and evaluates the
/// result on the original `A`, `b`.
pub fn sketch_and_solve(p: &LlspProblem, op: &SketchOperator, exact: Option<&Solution>) -> Result<Solution> {
    if op.m() != p.m() {
        return Err(Error::dim(format!(
            "sketch built for {} rows applied to a {}-row problem",
            op.m(),
            p.m()
        )));
    }
    let d = p.d();
    if op.s() < d + 1 {
        warn!(
            "sketch size s = {} is below d + 1 = {}; the reduced problem is underdetermined",
            op.s(),
            d + 1
        );
    }
    let mut cost = CostMeter::default();
    let fm = op.apply(&p.augmented, &mut cost)?;
    let fa = fm.columns(0..d);
    let fb = fm.column(d);
    let x = solve_least_squares(&fa, &fb).map_err(|e| Error::SketchDegenerate {
        kind: op.kind().name(),
        s: op.s(),
        seed: op.seed(),
        source: Box::new(e),
    })?;
    let residual = p.residual(&x)?;
    let relative_residual = exact.map(|e| ratio(residual, e.residual, p.b.norm()));
    Ok(Solution {
        x,
        residual,
        relative_residual,
        sketch: Some(SketchMeta {
            kind: op.kind(),
            s: op.s(),
            seed: op.seed(),
            cost,
        }),
    })
}

fn ratio(residual: f64, optimum: f64, b_norm: f64) -> f64 {
    let floor = CONSISTENT_TOL * b_norm;
    if optimum <= floor {
        if residual <= floor {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        residual / optimum
    }
}

/// `||A x - b|| / min_u ||A u - b||`.
///
/// For a consistent system (optimal residual below `CONSISTENT_TOL * ||b||`)
/// the ratio is 1 when `x` is also a solution and `f64::INFINITY` otherwise.
pub fn relative_residual(p: &LlspProblem, x: &Vector, exact: &Solution) -> Result<f64> {
    Ok(ratio(p.residual(x)?, exact.residual, p.b.norm()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub kind: SketchKind,
    pub s: usize,
    pub m: usize,
    pub cols: usize,
    pub epsilon_target: f64,
    /// Failure probability the caller is checking against, if any.
    pub gamma_target: Option<f64>,
    pub probes: usize,
    /// Probes redrawn because `M y` vanished.
    pub resamples: usize,
    /// The divisor `kappa` in `||F M y|| / (kappa ||M y||)`.
    pub normalization: f64,
    pub min_ratio: f64,
    pub mean_ratio: f64,
    pub max_ratio: f64,
    pub violation_fraction: f64,
}

impl EmbeddingReport {
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma_target = Some(gamma);
        self
    }

    /// Whether the observed violation rate is within the target failure
    /// probability.
    pub fn meets_gamma(&self) -> Option<bool> {
        self.gamma_target.map(|g| self.violation_fraction <= g)
    }
}

/// Expected `||F x|| / ||x||` for the operator, used to normalize embedding
/// ratios: `scale * sqrt(s)` for Gaussian operators (entries of `F / scale`
/// are standard normal) and `scale * sqrt(s / m_padded)` for the scaled
/// unitary kinds, which equals `scale` when `F` is square.
pub fn embedding_normalization(op: &SketchOperator) -> f64 {
    let s = op.s() as f64;
    match op.kind() {
        SketchKind::Gaussian => op.scale() * s.sqrt(),
        _ => op.scale() * (s / op.m_padded() as f64).sqrt(),
    }
}

/// Draws Gaussian probe vectors `y` and records `||F M y|| / (kappa ||M y||)`.
pub fn check_embedding(
    op: &SketchOperator,
    m_in: &DenseMatrix,
    epsilon: f64,
    probes: usize,
    seed: u64,
) -> Result<EmbeddingReport> {
    if probes == 0 {
        return Err(Error::param("probes must be at least 1"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if m_in.max_abs() == 0.0 {
        return Err(Error::param("embedding check needs a nonzero matrix"));
    }
    let fm = op.apply(m_in, &mut CostMeter::default())?;
    let kappa = embedding_normalization(op);
    let mut rng = rng::stream(seed);
    let cols = m_in.cols();

    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut sum = CompensatedSum::default();
    let (mut violations, mut resamples, mut done) = (0usize, 0usize, 0usize);
    while done < probes {
        let y = Vector::from_raw(rng::gaussian_vec(&mut rng, cols));
        let my = m_in.mul_vec(&y)?.norm();
        if my == 0.0 {
            resamples += 1;
            if resamples > 1000 * probes {
                return Err(Error::param("M y vanished for every probe drawn"));
            }
            continue;
        }
        let r = fm.mul_vec(&y)?.norm() / (kappa * my);
        min = min.min(r);
        max = max.max(r);
        sum.add(r);
        if r < 1.0 - epsilon || r > 1.0 + epsilon {
            violations += 1;
        }
        done += 1;
    }
    Ok(EmbeddingReport {
        kind: op.kind(),
        s: op.s(),
        m: op.m(),
        cols,
        epsilon_target: epsilon,
        gamma_target: None,
        probes,
        resamples,
        normalization: kappa,
        min_ratio: min,
        mean_ratio: (sum.value() / probes as f64).clamp(min, max),
        max_ratio: max,
        violation_fraction: violations as f64 / probes as f64,
    })
}
