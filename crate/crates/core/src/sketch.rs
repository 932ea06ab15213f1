//! Sketch operators `F` of shape `s x m`.
//!
//! Four families are supported: dense Gaussian, row-sampled permutation,
//! block permutation and the abridged scaled permuted Hadamard (ASPH)
//! multiplier. The three structured kinds are scaled unitary, `F = a Q` with
//! `Q` having orthonormal rows; `scale()` reports `a`, which defaults to 1.
//!
//! When the input height `m` is not a multiple of the block size (`s` for
//! block permutation, 8 for ASPH) the operator acts on `m_padded` rows and the
//! input is implicitly padded with zero rows, which leaves `||M y||` intact.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::rng;

/// Largest operator `as_dense` will materialize.
pub const DENSE_LIMIT: usize = 1_000_000;

/// Number of Hadamard recursion levels kept by the ASPH multiplier.
pub const ASPH_LEVELS: u32 = 3;
const ASPH_BLOCK: usize = 1 << ASPH_LEVELS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SketchKind {
    #[serde(rename = "gaussian")]
    Gaussian,
    #[serde(rename = "perm")]
    PermSubmatrix,
    #[serde(rename = "block-perm")]
    BlockPerm,
    #[serde(rename = "asph")]
    Asph,
}

impl SketchKind {
    pub const ALL: [SketchKind; 4] = [
        SketchKind::Gaussian,
        SketchKind::PermSubmatrix,
        SketchKind::BlockPerm,
        SketchKind::Asph,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SketchKind::Gaussian => "gaussian",
            SketchKind::PermSubmatrix => "perm",
            SketchKind::BlockPerm => "block-perm",
            SketchKind::Asph => "asph",
        }
    }

    pub fn is_unitary(self) -> bool {
        self != SketchKind::Gaussian
    }

    /// Height the operator acts on for an `m`-row input.
    pub fn padded_height(self, s: usize, m: usize) -> usize {
        match self {
            SketchKind::Gaussian | SketchKind::PermSubmatrix => m,
            SketchKind::BlockPerm => m.div_ceil(s) * s,
            SketchKind::Asph => m.div_ceil(ASPH_BLOCK) * ASPH_BLOCK,
        }
    }
}

impl fmt::Display for SketchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SketchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SketchKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::param(format!(
                    "unknown multiplier {s:?} (expected gaussian, perm, block-perm or asph)"
                ))
            })
    }
}

/// Operation counts for one `apply` call.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostMeter {
    pub multiplies: u64,
    pub adds: u64,
    /// Distinct entries of the input matrix that were read.
    pub entries_read: u64,
}

impl CostMeter {
    pub fn reset(&mut self) {
        *self = CostMeter::default();
    }

    pub fn scalar_ops(&self) -> u64 {
        self.multiplies + self.adds
    }
}

#[derive(Clone, Debug)]
enum Structure {
    /// Unscaled standard normal `s x m` matrix.
    Gaussian(DenseMatrix),
    /// Input row feeding each output row.
    PermSubmatrix(Vec<usize>),
    /// Output row each input row (of `m_padded`) is summed into.
    BlockPerm(Vec<usize>),
    /// Sign diagonal over `m_padded` rows and the sampled Hadamard rows.
    Asph { signs: Vec<f64>, rows: Vec<usize> },
}

#[derive(Clone, Debug)]
pub struct SketchOperator {
    kind: SketchKind,
    s: usize,
    m: usize,
    m_padded: usize,
    /// Normalization making the rows of the unscaled operator orthonormal
    /// (`1/sqrt(c)` for block permutation, `1/sqrt(8)` for ASPH, 1 otherwise).
    unit: f64,
    /// The scalar `a` in `F = a Q`.
    scale: f64,
    seed: u64,
    structure: Structure,
}

fn check_dims(s: usize, m: usize) -> Result<()> {
    if s == 0 || m == 0 {
        return Err(Error::param(format!(
            "sketch dimensions must be positive (s = {s}, m = {m})"
        )));
    }
    if s > m {
        return Err(Error::param(format!(
            "sketch size s = {s} exceeds input height m = {m}"
        )));
    }
    Ok(())
}

/// Entry `(a, b)` of the Sylvester-ordered Hadamard matrix.
#[inline]
fn hadamard_sign(a: usize, b: usize) -> f64 {
    if (a & b).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Builds a seeded operator of the requested kind.
pub fn make_sketch(kind: SketchKind, s: usize, m: usize, seed: u64) -> Result<SketchOperator> {
    check_dims(s, m)?;
    let mut r = rng::stream(seed);
    let m_padded = kind.padded_height(s, m);
    let mut op = match kind {
        SketchKind::Gaussian => {
            let g = DenseMatrix::from_raw(s, m, rng::gaussian_vec(&mut r, s * m));
            SketchOperator::gaussian_from(g)?
        }
        SketchKind::PermSubmatrix => {
            SketchOperator::perm_submatrix(rng::sample_without_replacement(&mut r, m, s), m)?
        }
        SketchKind::BlockPerm => SketchOperator::block_perm(s, m, rng::permutation(&mut r, m_padded))?,
        SketchKind::Asph => {
            let signs = rng::signs(&mut r, m_padded);
            let rows = rng::sample_without_replacement(&mut r, m_padded, s);
            SketchOperator::asph(m, signs, rows)?
        }
    };
    op.seed = seed;
    Ok(op)
}

impl SketchOperator {
    /// Gaussian operator `F = G / sqrt(s)` from an unscaled standard normal `G`.
    pub fn gaussian_from(g: DenseMatrix) -> Result<Self> {
        let (s, m) = g.shape();
        check_dims(s, m)?;
        Ok(SketchOperator {
            kind: SketchKind::Gaussian,
            s,
            m,
            m_padded: m,
            unit: 1.0,
            scale: 1.0 / (s as f64).sqrt(),
            seed: 0,
            structure: Structure::Gaussian(g),
        })
    }

    /// Rows `rows` of the `m x m` identity.
    pub fn perm_submatrix(rows: Vec<usize>, m: usize) -> Result<Self> {
        let s = rows.len();
        check_dims(s, m)?;
        let mut seen = vec![false; m];
        for &r in &rows {
            if r >= m || std::mem::replace(&mut seen[r], true) {
                return Err(Error::param(format!("row index {r} out of range or repeated")));
            }
        }
        Ok(SketchOperator {
            kind: SketchKind::PermSubmatrix,
            s,
            m,
            m_padded: m,
            unit: 1.0,
            scale: 1.0,
            seed: 0,
            structure: Structure::PermSubmatrix(rows),
        })
    }

    /// `[I_s | I_s | ... | I_s] P / sqrt(c)` where `P` permutes columns by
    /// `perm` (a permutation of `0..m_padded`): column `j` of the result is
    /// column `perm[j]` of the stacked identities.
    pub fn block_perm(s: usize, m: usize, perm: Vec<usize>) -> Result<Self> {
        check_dims(s, m)?;
        let m_padded = SketchKind::BlockPerm.padded_height(s, m);
        if perm.len() != m_padded || !is_permutation(&perm) {
            return Err(Error::param(format!("expected a permutation of 0..{m_padded}")));
        }
        let c = m_padded / s;
        Ok(SketchOperator {
            kind: SketchKind::BlockPerm,
            s,
            m,
            m_padded,
            unit: 1.0 / (c as f64).sqrt(),
            scale: 1.0,
            seed: 0,
            structure: Structure::BlockPerm(perm.into_iter().map(|p| p % s).collect()),
        })
    }

    /// `R (H_8 (x) I_{m_padded/8}) D / sqrt(8)`: `signs` is the diagonal of `D`
    /// and `rows` the sampled rows of the abridged Hadamard factor.
    pub fn asph(m: usize, signs: Vec<f64>, rows: Vec<usize>) -> Result<Self> {
        let s = rows.len();
        check_dims(s, m)?;
        let m_padded = SketchKind::Asph.padded_height(s, m);
        if signs.len() != m_padded || signs.iter().any(|&v| v != 1.0 && v != -1.0) {
            return Err(Error::param(format!("expected {m_padded} signs of +-1")));
        }
        let mut seen = vec![false; m_padded];
        for &r in &rows {
            if r >= m_padded || std::mem::replace(&mut seen[r], true) {
                return Err(Error::param(format!("row index {r} out of range or repeated")));
            }
        }
        Ok(SketchOperator {
            kind: SketchKind::Asph,
            s,
            m,
            m_padded,
            unit: 1.0 / (ASPH_BLOCK as f64).sqrt(),
            scale: 1.0,
            seed: 0,
            structure: Structure::Asph { signs, rows },
        })
    }

    /// Same operator with the scalar `a` of `F = a Q` replaced. For the
    /// unitary kinds the default is 1; for Gaussian operators `1/sqrt(s)`.
    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::param(format!("scale must be positive, got {scale}")));
        }
        self.scale = scale;
        Ok(self)
    }

    pub fn kind(&self) -> SketchKind {
        self.kind
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn m_padded(&self) -> usize {
        self.m_padded
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Stored nonzeros of the unscaled operator (the ASPH sign diagonal is
    /// kept separately and not counted).
    pub fn nnz(&self) -> usize {
        match &self.structure {
            Structure::Gaussian(_) => self.s * self.m,
            Structure::PermSubmatrix(_) => self.s,
            Structure::BlockPerm(_) => self.m_padded,
            Structure::Asph { .. } => ASPH_BLOCK * self.s,
        }
    }

    /// `F M`. Accepts `M` with `m` rows (zero padding implied) or with
    /// `m_padded` rows. The meter is reset before counting.
    pub fn apply(&self, input: &DenseMatrix, meter: &mut CostMeter) -> Result<DenseMatrix> {
        let (rows_in, cols) = input.shape();
        if rows_in != self.m && rows_in != self.m_padded {
            return Err(Error::dim(format!(
                "{} sketch expects {} rows, got {rows_in}",
                self.kind, self.m
            )));
        }
        meter.reset();
        let s = self.s;
        let mut out = vec![0.0; s * cols];
        let c = cols as u64;
        match &self.structure {
            Structure::Gaussian(g) => {
                for (i, dst) in out.chunks_exact_mut(cols).enumerate() {
                    for (k, &gik) in g.row(i).iter().enumerate() {
                        for (d, &x) in dst.iter_mut().zip(input.row(k)) {
                            *d += gik * x;
                        }
                    }
                }
                let work = (s * rows_in) as u64 * c;
                meter.multiplies += work;
                meter.adds += work;
                meter.entries_read += rows_in as u64 * c;
            }
            Structure::PermSubmatrix(rows) => {
                for (dst, &r) in out.chunks_exact_mut(cols).zip(rows) {
                    dst.copy_from_slice(input.row(r));
                }
                meter.entries_read += s as u64 * c;
            }
            Structure::BlockPerm(target) => {
                for (j, &t) in target.iter().enumerate().take(rows_in) {
                    let dst = &mut out[t * cols..(t + 1) * cols];
                    for (d, &x) in dst.iter_mut().zip(input.row(j)) {
                        *d += x;
                    }
                }
                meter.adds += rows_in as u64 * c;
                meter.entries_read += rows_in as u64 * c;
            }
            Structure::Asph { signs, rows } => {
                let k = self.m_padded / ASPH_BLOCK;
                let mut touched = vec![false; rows_in];
                let mut touched_count = 0u64;
                for (dst, &r) in out.chunks_exact_mut(cols).zip(rows) {
                    let (a, t) = (r / k, r % k);
                    let mut terms = 0u64;
                    for b in 0..ASPH_BLOCK {
                        let j = b * k + t;
                        if j >= rows_in {
                            continue;
                        }
                        if !std::mem::replace(&mut touched[j], true) {
                            touched_count += 1;
                        }
                        terms += 1;
                        let sign = hadamard_sign(a, b) * signs[j];
                        if sign > 0.0 {
                            for (d, &x) in dst.iter_mut().zip(input.row(j)) {
                                *d += x;
                            }
                        } else {
                            for (d, &x) in dst.iter_mut().zip(input.row(j)) {
                                *d -= x;
                            }
                        }
                    }
                    meter.adds += terms.saturating_sub(1) * c;
                }
                meter.entries_read += touched_count * c;
            }
        }
        let factor = self.scale * self.unit;
        if factor != 1.0 {
            for v in &mut out {
                *v *= factor;
            }
            meter.multiplies += s as u64 * c;
        }
        Ok(DenseMatrix::from_raw(s, cols, out))
    }

    /// The operator as a dense `s x m_padded` matrix.
    pub fn as_dense(&self) -> Result<DenseMatrix> {
        let (s, n) = (self.s, self.m_padded);
        if s.saturating_mul(n) > DENSE_LIMIT {
            return Err(Error::SizeGuard {
                rows: s,
                cols: n,
                limit: DENSE_LIMIT,
            });
        }
        let mut f = DenseMatrix::zeros(s, n);
        let data = f.data_mut();
        match &self.structure {
            Structure::Gaussian(g) => data.copy_from_slice(g.as_slice()),
            Structure::PermSubmatrix(rows) => {
                for (i, &r) in rows.iter().enumerate() {
                    data[i * n + r] = 1.0;
                }
            }
            Structure::BlockPerm(target) => {
                for (j, &t) in target.iter().enumerate() {
                    data[t * n + j] = 1.0;
                }
            }
            Structure::Asph { signs, rows } => {
                let k = n / ASPH_BLOCK;
                for (i, &r) in rows.iter().enumerate() {
                    let (a, t) = (r / k, r % k);
                    for b in 0..ASPH_BLOCK {
                        let j = b * k + t;
                        data[i * n + j] = hadamard_sign(a, b) * signs[j];
                    }
                }
            }
        }
        Ok(f.scaled(self.scale * self.unit))
    }
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter()
        .all(|&i| i < p.len() && !std::mem::replace(&mut seen[i], true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{gaussian_vec, stream};

    fn random_matrix(m: usize, n: usize, seed: u64) -> DenseMatrix {
        DenseMatrix::new(m, n, gaussian_vec(&mut stream(seed), m * n)).unwrap()
    }

    /// Sylvester recursion, built without the closed-form sign rule.
    fn sylvester(n: usize) -> DenseMatrix {
        let mut h = DenseMatrix::identity(1);
        while h.rows() < n {
            let k = h.rows();
            h = DenseMatrix::from_fn(2 * k, 2 * k, |i, j| {
                let v = h.get(i % k, j % k);
                if i >= k && j >= k {
                    -v
                } else {
                    v
                }
            });
        }
        h
    }

    fn unitarity_error(op: &SketchOperator) -> f64 {
        let f = op.as_dense().unwrap();
        let gram = f
            .matmul(&f.transpose())
            .unwrap()
            .scaled(1.0 / (op.scale() * op.scale()));
        gram.max_abs_diff(&DenseMatrix::identity(op.s()))
    }

    #[test]
    fn kind_names_round_trip() {
        for k in SketchKind::ALL {
            assert_eq!(k.name().parse::<SketchKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
        assert!("srht".parse::<SketchKind>().is_err());
    }

    #[test]
    fn perm_identity_example() {
        let op = SketchOperator::perm_submatrix(vec![0, 1], 4).unwrap();
        let expected = DenseMatrix::from_fn(2, 4, |i, j| if i == j { 1.0 } else { 0.0 });
        assert_eq!(op.as_dense().unwrap(), expected);

        let m = random_matrix(4, 3, 1);
        let mut meter = CostMeter::default();
        let out = op.apply(&m, &mut meter).unwrap();
        assert_eq!(out.row(0), m.row(0));
        assert_eq!(out.row(1), m.row(1));
        assert_eq!(meter.entries_read, 6);
        assert_eq!(meter.scalar_ops(), 0);
    }

    #[test]
    fn block_perm_identity_example() {
        let op = SketchOperator::block_perm(2, 4, vec![0, 1, 2, 3]).unwrap();
        let r = 1.0 / 2f64.sqrt();
        let expected = DenseMatrix::from_rows(&[vec![r, 0.0, r, 0.0], vec![0.0, r, 0.0, r]]).unwrap();
        assert!(op.as_dense().unwrap().max_abs_diff(&expected) < 1e-16);

        let out = op
            .apply(
                &DenseMatrix::new(4, 1, vec![1.0; 4]).unwrap(),
                &mut CostMeter::default(),
            )
            .unwrap();
        assert!((out.get(0, 0) - 2f64.sqrt()).abs() < 1e-15);
        assert!((out.get(1, 0) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn asph_full_sample_is_scaled_hadamard() {
        let op = SketchOperator::asph(8, vec![1.0; 8], (0..8).collect()).unwrap();
        let expected = sylvester(8).scaled(1.0 / 8f64.sqrt());
        assert!(op.as_dense().unwrap().max_abs_diff(&expected) < 1e-16);

        let f = op.as_dense().unwrap();
        let gram = f.matmul(&f.transpose()).unwrap();
        assert!(gram.max_abs_diff(&DenseMatrix::identity(8)) < 1e-15);

        let e1 = DenseMatrix::from_fn(8, 1, |i, _| if i == 0 { 1.0 } else { 0.0 });
        let out = op.apply(&e1, &mut CostMeter::default()).unwrap();
        let brute = f.matmul(&e1).unwrap();
        assert!(out.max_abs_diff(&brute) < 1e-16);
        for i in 0..8 {
            assert!((out.get(i, 0).abs() - 1.0 / 8f64.sqrt()).abs() < 1e-16);
        }
        assert!((out.frobenius_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn asph_rows_have_eight_entries() {
        let op = make_sketch(SketchKind::Asph, 16, 128, 9).unwrap();
        let f = op.as_dense().unwrap();
        for i in 0..16 {
            assert_eq!(f.row(i).iter().filter(|v| **v != 0.0).count(), 8);
        }
        assert_eq!(op.nnz(), 8 * 16);
    }

    #[test]
    fn construction_errors() {
        assert!(make_sketch(SketchKind::PermSubmatrix, 5, 4, 0).is_err());
        assert!(make_sketch(SketchKind::Gaussian, 0, 4, 0).is_err());
        assert!(make_sketch(SketchKind::Asph, 1, 0, 0).is_err());
        assert!(SketchOperator::perm_submatrix(vec![1, 1], 4).is_err());
        assert!(SketchOperator::block_perm(2, 4, vec![0, 1, 2, 2]).is_err());
        assert!(SketchOperator::asph(8, vec![0.5; 8], vec![0]).is_err());
    }

    #[test]
    fn apply_rejects_wrong_height() {
        let op = make_sketch(SketchKind::BlockPerm, 3, 10, 0).unwrap();
        assert_eq!(op.m_padded(), 12);
        assert!(op
            .apply(&DenseMatrix::zeros(11, 2), &mut CostMeter::default())
            .is_err());
        assert!(op
            .apply(&DenseMatrix::zeros(10, 2), &mut CostMeter::default())
            .is_ok());
        assert!(op
            .apply(&DenseMatrix::zeros(12, 2), &mut CostMeter::default())
            .is_ok());
    }

    #[test]
    fn padding_rules() {
        let bp = make_sketch(SketchKind::BlockPerm, 7, 50, 1).unwrap();
        assert_eq!(bp.m_padded(), 56);
        assert_eq!(bp.scale(), 1.0);
        let f = bp.as_dense().unwrap();
        assert!((f.max_abs() - 1.0 / 8f64.sqrt()).abs() < 1e-16);
        let asph = make_sketch(SketchKind::Asph, 7, 50, 1).unwrap();
        assert_eq!(asph.m_padded(), 56);
    }

    #[test]
    fn scaled_unitarity_over_seeds() {
        for kind in [SketchKind::PermSubmatrix, SketchKind::BlockPerm, SketchKind::Asph] {
            for (s, m) in [(8, 64), (16, 128), (5, 37)] {
                for seed in 0..100 {
                    let op = make_sketch(kind, s, m, seed).unwrap();
                    let err = unitarity_error(&op);
                    assert!(err <= 1e-12, "{kind} s={s} m={m} seed={seed}: {err}");
                }
            }
        }
    }

    #[test]
    fn apply_matches_dense_product() {
        for kind in SketchKind::ALL {
            for (s, m, cols, seed) in [(8, 64, 3, 1), (10, 45, 4, 2), (33, 100, 1, 3)] {
                let op = make_sketch(kind, s, m, seed).unwrap();
                let input = random_matrix(m, cols, seed + 10);
                let sparse = op.apply(&input, &mut CostMeter::default()).unwrap();
                let f = op.as_dense().unwrap();
                let padded =
                    DenseMatrix::from_fn(
                        op.m_padded(),
                        cols,
                        |i, j| {
                            if i < m {
                                input.get(i, j)
                            } else {
                                0.0
                            }
                        },
                    );
                let dense = f.matmul(&padded).unwrap();
                let err = sparse.max_abs_diff(&dense);
                assert!(err <= 1e-12, "{kind} ({s},{m}): {err}");
            }
        }
    }

    #[test]
    fn cost_contracts() {
        for seed in 0..20u64 {
            let s = 4 + (seed as usize % 9);
            let m = s * (2 + seed as usize % 11) + seed as usize % 5;
            let cols = 1 + seed as usize % 6;
            let input = random_matrix(m, cols, seed);
            for kind in SketchKind::ALL {
                let op = make_sketch(kind, s, m, seed).unwrap();
                let mut meter = CostMeter::default();
                op.apply(&input, &mut meter).unwrap();
                let budget = 9 * (s + op.m_padded()) as u64 * cols as u64;
                match kind {
                    SketchKind::PermSubmatrix => {
                        assert_eq!(meter.entries_read, (s * cols) as u64)
                    }
                    SketchKind::Gaussian => {
                        assert!(meter.multiplies > (s * m * cols) as u64)
                    }
                    _ => assert!(meter.scalar_ops() <= budget, "{kind}: {meter:?}"),
                }
                if kind == SketchKind::Asph {
                    let k = (8 * s + op.m_padded()) as u64 * cols as u64;
                    assert!(meter.scalar_ops() <= k);
                }
            }
        }
    }

    #[test]
    fn meter_resets_between_applies() {
        let op = make_sketch(SketchKind::BlockPerm, 4, 32, 0).unwrap();
        let input = random_matrix(32, 2, 0);
        let mut meter = CostMeter::default();
        op.apply(&input, &mut meter).unwrap();
        let first = meter;
        op.apply(&input, &mut meter).unwrap();
        assert_eq!(first, meter);
    }

    #[test]
    fn gaussian_entry_variance() {
        let s = 100;
        let op = make_sketch(SketchKind::Gaussian, s, 1000, 5).unwrap();
        let f = op.as_dense().unwrap();
        let n = f.as_slice().len() as f64;
        let mean = f.as_slice().iter().sum::<f64>() / n;
        let var = f.as_slice().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let target = 1.0 / s as f64;
        assert!((var - target).abs() <= 0.1 * target, "variance {var}");
    }

    #[test]
    fn sampled_gaussian_stays_gaussian() {
        let m = random_matrix(4096, 4, 2024);
        let op = make_sketch(SketchKind::PermSubmatrix, 512, 4096, 77).unwrap();
        let fm = op.apply(&m, &mut CostMeter::default()).unwrap();
        let xs = fm.as_slice();
        let n = xs.len() as f64;
        assert_eq!(xs.len(), 2048);
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() <= 4.0 / n.sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() <= 0.15, "variance {var}");
    }

    #[test]
    fn same_seed_same_operator() {
        for kind in SketchKind::ALL {
            let a = make_sketch(kind, 6, 48, 3).unwrap().as_dense().unwrap();
            let b = make_sketch(kind, 6, 48, 3).unwrap().as_dense().unwrap();
            let c = make_sketch(kind, 6, 48, 4).unwrap().as_dense().unwrap();
            assert_eq!(a, b);
            assert_ne!(a, c);
        }
    }
}
