//! Dense real linear algebra: row-major matrices, Euclidean norms, Householder
//! QR and the full-rank least-squares solve built on it.
//!
//! The least-squares path never forms normal equations. The synthetic
//! ill-conditioned inputs reach condition numbers near 1e14, which would square
//! past the range of double precision.

use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};

/// Relative threshold on the diagonal of `R` below which a matrix is declared
/// rank deficient: `|R_ii| <= RANK_TOLERANCE * max_j |R_jj|`.
///
/// The synthetic ill-conditioned family has `|R_ii| / max |R_jj|` around
/// 1e-14 and must still be solved, so this sits a few ulps above roundoff.
pub const RANK_TOLERANCE: f64 = 1e-15;

/// A real vector with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(data: Vec<f64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::dim("vector must have at least one entry"));
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Vector(data))
    }

    pub fn zeros(len: usize) -> Self {
        Vector(vec![0.0; len])
    }

    pub(crate) fn from_raw(data: Vec<f64>) -> Self {
        Vector(data)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        euclidean_norm(self)
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, alpha: f64) -> Vector {
        Vector(self.0.iter().map(|v| v * alpha).collect())
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &Vector) -> Result<Vector> {
        if self.len() != other.len() {
            return Err(Error::dim(format!(
                "vector lengths {} and {} differ",
                self.len(),
                other.len()
            )));
        }
        Ok(Vector(
            self.0.iter().zip(&other.0).map(|(a, b)| a + alpha * b).collect(),
        ))
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.axpy(-1.0, other)
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Euclidean norm, scaled to avoid overflow and underflow.
pub fn euclidean_norm(v: &Vector) -> f64 {
    norm2(v.as_slice())
}

pub(crate) fn norm2(xs: &[f64]) -> f64 {
    let scale = xs.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let inv = 1.0 / scale;
    let sum: f64 = xs.iter().map(|x| (x * inv) * (x * inv)).sum();
    scale * sum.sqrt()
}

/// Row-major dense matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            writeln!(f, "  {:?}", &self.row(i)[..self.cols.min(8)])?;
        }
        write!(f, "]")
    }
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dim(format!("empty matrix shape {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::dim(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        DenseMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::dim("ragged rows"));
        }
        DenseMatrix::new(rows.len(), ncols, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector((0..self.rows).map(|i| self.get(i, j)).collect())
    }

    /// Columns `range` as a new matrix.
    pub fn columns(&self, range: Range<usize>) -> DenseMatrix {
        let width = range.len();
        let mut data = Vec::with_capacity(self.rows * width);
        for i in 0..self.rows {
            data.extend_from_slice(&self.row(i)[range.clone()]);
        }
        DenseMatrix::from_raw(self.rows, width, data)
    }

    /// `(self | v)`.
    pub fn augment(&self, v: &Vector) -> Result<DenseMatrix> {
        if v.len() != self.rows {
            return Err(Error::dim(format!(
                "cannot append a length-{} column to {} rows",
                v.len(),
                self.rows
            )));
        }
        let mut data = Vec::with_capacity(self.rows * (self.cols + 1));
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.push(v[i]);
        }
        Ok(DenseMatrix::from_raw(self.rows, self.cols + 1, data))
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scaled(&self, alpha: f64) -> DenseMatrix {
        DenseMatrix::from_raw(
            self.rows,
            self.cols,
            self.data.iter().map(|v| v * alpha).collect(),
        )
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            let dst = &mut out[i * other.cols..(i + 1) * other.cols];
            for (k, &aik) in self.row(i).iter().enumerate() {
                if aik == 0.0 {
                    continue;
                }
                for (d, &bkj) in dst.iter_mut().zip(other.row(k)) {
                    *d += aik * bkj;
                }
            }
        }
        Ok(DenseMatrix::from_raw(self.rows, other.cols, out))
    }

    pub fn mul_vec(&self, x: &Vector) -> Result<Vector> {
        if x.len() != self.cols {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by a length-{} vector",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok(Vector(
            (0..self.rows)
                .map(|i| self.row(i).iter().zip(x.as_slice()).map(|(a, b)| a * b).sum())
                .collect(),
        ))
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Largest entrywise absolute difference; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::dim("shape mismatch in subtraction"));
        }
        Ok(DenseMatrix::from_raw(
            self.rows,
            self.cols,
            self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        ))
    }

    /// A new matrix with rows taken from `order` (`out[i] = self[order[i]]`).
    pub fn permute_rows(&self, order: &[usize]) -> DenseMatrix {
        let mut data = Vec::with_capacity(order.len() * self.cols);
        for &i in order {
            data.extend_from_slice(self.row(i));
        }
        DenseMatrix::from_raw(order.len(), self.cols, data)
    }
}

/// Householder QR in compact form: `R` on and above the diagonal, reflector
/// tails below it, one `tau` per column.
#[derive(Clone, Debug)]
pub struct QrFactors {
    packed: DenseMatrix,
    tau: Vec<f64>,
}

pub fn householder_qr(a: &DenseMatrix) -> Result<QrFactors> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::dim(format!("QR needs rows >= cols, got {m}x{n}")));
    }
    let mut qr = a.clone();
    let mut tau = vec![0.0; n];
    let mut w = vec![0.0; n];
    let data = qr.data_mut();

    for k in 0..n {
        let alpha = data[k * n + k];
        let tail: Vec<f64> = ((k + 1)..m).map(|i| data[i * n + k]).collect();
        let xnorm = norm2(&tail);
        if xnorm == 0.0 {
            // H = I; R_kk stays as is.
            tau[k] = 0.0;
            continue;
        }
        let beta = -alpha.signum() * alpha.hypot(xnorm);
        let beta = if alpha == 0.0 { -alpha.hypot(xnorm) } else { beta };
        tau[k] = (beta - alpha) / beta;
        let inv = 1.0 / (alpha - beta);
        for i in (k + 1)..m {
            data[i * n + k] *= inv;
        }
        data[k * n + k] = beta;

        // Apply H_k = I - tau v v^T to the trailing columns, streaming rows.
        if k + 1 < n {
            let t = tau[k];
            let w = &mut w[(k + 1)..n];
            w.copy_from_slice(&data[k * n + k + 1..(k + 1) * n]);
            for i in (k + 1)..m {
                let vi = data[i * n + k];
                if vi != 0.0 {
                    for (wj, aij) in w.iter_mut().zip(&data[i * n + k + 1..(i + 1) * n]) {
                        *wj += vi * aij;
                    }
                }
            }
            for (akj, wj) in data[k * n + k + 1..(k + 1) * n].iter_mut().zip(w.iter()) {
                *akj -= t * wj;
            }
            for i in (k + 1)..m {
                let f = t * data[i * n + k];
                if f != 0.0 {
                    for (aij, wj) in data[i * n + k + 1..(i + 1) * n].iter_mut().zip(w.iter()) {
                        *aij -= f * wj;
                    }
                }
            }
        }
    }
    Ok(QrFactors { packed: qr, tau })
}

impl QrFactors {
    pub fn rows(&self) -> usize {
        self.packed.rows()
    }

    pub fn cols(&self) -> usize {
        self.packed.cols()
    }

    pub fn r_diag(&self) -> Vec<f64> {
        (0..self.cols()).map(|i| self.packed.get(i, i)).collect()
    }

    pub fn r(&self) -> DenseMatrix {
        let n = self.cols();
        DenseMatrix::from_fn(n, n, |i, j| if j >= i { self.packed.get(i, j) } else { 0.0 })
    }

    /// Overwrites `b` (length `rows`) with `Q^T b`.
    pub fn apply_qt(&self, b: &mut [f64]) {
        let (m, n) = self.packed.shape();
        assert_eq!(b.len(), m, "apply_qt: length mismatch");
        for k in 0..n {
            let t = self.tau[k];
            if t == 0.0 {
                continue;
            }
            let mut w = b[k];
            for (i, bi) in b.iter().enumerate().skip(k + 1) {
                w += self.packed.get(i, k) * bi;
            }
            b[k] -= t * w;
            for (i, bi) in b.iter_mut().enumerate().skip(k + 1) {
                *bi -= t * self.packed.get(i, k) * w;
            }
        }
    }

    /// The thin orthogonal factor, `rows x cols`.
    pub fn q_thin(&self) -> DenseMatrix {
        let (m, n) = self.packed.shape();
        let mut q = DenseMatrix::from_fn(m, n, |i, j| if i == j { 1.0 } else { 0.0 });
        let mut w = vec![0.0; n];
        for k in (0..n).rev() {
            let t = self.tau[k];
            if t == 0.0 {
                continue;
            }
            let qd = q.data_mut();
            w.copy_from_slice(&qd[k * n..(k + 1) * n]);
            for i in (k + 1)..m {
                let vi = self.packed.get(i, k);
                for (wj, qij) in w.iter_mut().zip(&qd[i * n..(i + 1) * n]) {
                    *wj += vi * qij;
                }
            }
            for (qkj, wj) in qd[k * n..(k + 1) * n].iter_mut().zip(&w) {
                *qkj -= t * wj;
            }
            for i in (k + 1)..m {
                let f = t * self.packed.get(i, k);
                for (qij, wj) in qd[i * n..(i + 1) * n].iter_mut().zip(&w) {
                    *qij -= f * wj;
                }
            }
        }
        q
    }

    /// Fails with the first column whose `|R_ii|` is at or below
    /// `tol * max_j |R_jj|`.
    pub fn check_rank(&self, tol: f64) -> Result<()> {
        let diag = self.r_diag();
        let max_diag = diag.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        match diag.iter().position(|d| d.abs() <= tol * max_diag) {
            Some(index) => Err(Error::RankDeficient {
                index,
                diag: diag[index].abs(),
                max_diag,
            }),
            None => Ok(()),
        }
    }

    /// Least-squares solve `min ||A x - b||` using these factors.
    pub fn solve(&self, b: &Vector, tol: f64) -> Result<Vector> {
        let (m, n) = self.packed.shape();
        if b.len() != m {
            return Err(Error::dim(format!(
                "right-hand side has length {} but the matrix has {m} rows",
                b.len()
            )));
        }
        self.check_rank(tol)?;
        let mut y = b.as_slice().to_vec();
        self.apply_qt(&mut y);
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let row = self.packed.row(i);
            let mut acc = y[i];
            for j in (i + 1)..n {
                acc -= row[j] * x[j];
            }
            x[i] = acc / row[i];
        }
        Ok(Vector(x))
    }
}

/// `argmin_x ||A x - b||_2` for full-column-rank `A`, via Householder QR.
pub fn solve_least_squares(a: &DenseMatrix, b: &Vector) -> Result<Vector> {
    solve_least_squares_with_tol(a, b, RANK_TOLERANCE)
}

pub fn solve_least_squares_with_tol(a: &DenseMatrix, b: &Vector, tol: f64) -> Result<Vector> {
    if b.len() != a.rows() {
        return Err(Error::dim(format!(
            "right-hand side has length {} but the matrix has {} rows",
            b.len(),
            a.rows()
        )));
    }
    householder_qr(a)?.solve(b, tol)
}

/// `||A x - b||_2`.
pub fn residual_norm(a: &DenseMatrix, x: &Vector, b: &Vector) -> Result<f64> {
    Ok(a.mul_vec(x)?.sub(b)?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian(m: usize, n: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(m, n, |_, _| StandardNormal.sample(&mut rng))
    }

    fn orthonormality_error(q: &DenseMatrix) -> f64 {
        q.transpose()
            .matmul(q)
            .unwrap()
            .max_abs_diff(&DenseMatrix::identity(q.cols()))
    }

    #[test]
    fn norm_examples() {
        assert_eq!(euclidean_norm(&Vector::new(vec![0.0, 0.0, 0.0]).unwrap()), 0.0);
        assert_eq!(euclidean_norm(&Vector::new(vec![3.0, 4.0]).unwrap()), 5.0);
        assert!((euclidean_norm(&Vector::new(vec![1.0; 100]).unwrap()) - 10.0).abs() < 1e-14);
    }

    #[test]
    fn norm_does_not_overflow() {
        let v = Vector::new(vec![1e200, 1e200]).unwrap();
        assert!((v.norm() / (1e200 * 2f64.sqrt()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            DenseMatrix::new(2, 2, vec![1.0, f64::NAN, 0.0, 1.0]),
            Err(Error::NonFinite { index: 1 })
        ));
        assert!(DenseMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::new(0, 2, vec![]).is_err());
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
        assert!(Vector::new(vec![]).is_err());
    }

    #[test]
    fn qr_of_identity() {
        let qr = householder_qr(&DenseMatrix::identity(2)).unwrap();
        assert_eq!(qr.q_thin(), DenseMatrix::identity(2));
        assert_eq!(qr.r(), DenseMatrix::identity(2));
    }

    #[test]
    fn qr_single_reflector() {
        let a = DenseMatrix::new(2, 1, vec![3.0, 4.0]).unwrap();
        let qr = householder_qr(&a).unwrap();
        let r = qr.r_diag()[0];
        assert!((r.abs() - 5.0).abs() < 1e-15);
        let q = qr.q_thin();
        let sign = r.signum();
        assert!((q.get(0, 0) - sign * 0.6).abs() < 1e-15);
        assert!((q.get(1, 0) - sign * 0.8).abs() < 1e-15);
    }

    #[test]
    fn qr_rejects_wide() {
        assert!(matches!(
            householder_qr(&DenseMatrix::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn qr_reconstruction_64x8() {
        let a = gaussian(64, 8, 11);
        let qr = householder_qr(&a).unwrap();
        let rec = qr.q_thin().matmul(&qr.r()).unwrap();
        let err = rec.sub(&a).unwrap().frobenius_norm() / a.frobenius_norm();
        assert!(err <= 1e-13, "reconstruction error {err}");
    }

    #[test]
    fn qr_invariants_on_random_shapes() {
        for t in 0..50u64 {
            let n = 1 + (t as usize * 7) % 12;
            let m = n + (t as usize * 13) % 40;
            let a = gaussian(m, n, 100 + t);
            let qr = householder_qr(&a).unwrap();
            let q = qr.q_thin();
            assert!(orthonormality_error(&q) <= 1e-12 * n as f64, "shape {m}x{n}");
            let rec = q.matmul(&qr.r()).unwrap();
            assert!(rec.sub(&a).unwrap().frobenius_norm() <= 1e-12 * a.frobenius_norm());
        }
    }

    #[test]
    fn qt_matches_explicit_q() {
        let a = gaussian(20, 5, 3);
        let qr = householder_qr(&a).unwrap();
        let b: Vec<f64> = (0..20).map(|i| (i as f64).sin()).collect();
        let mut qtb = b.clone();
        qr.apply_qt(&mut qtb);
        let explicit = qr.q_thin().transpose().mul_vec(&Vector::new(b).unwrap()).unwrap();
        for i in 0..5 {
            assert!((qtb[i] - explicit[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn solve_mean_of_two_points() {
        let a = DenseMatrix::new(2, 1, vec![1.0, 1.0]).unwrap();
        let b = Vector::new(vec![1.0, 3.0]).unwrap();
        let x = solve_least_squares(&a, &b).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-15);
        assert!((residual_norm(&a, &x, &b).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn solve_identity() {
        let b = Vector::new(vec![1.0, 2.0, 3.0]).unwrap();
        let x = solve_least_squares(&DenseMatrix::identity(3), &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn solve_consistent_system() {
        let a = gaussian(128, 4, 5);
        let b = a.mul_vec(&Vector::new(vec![1.0; 4]).unwrap()).unwrap();
        let x = solve_least_squares(&a, &b).unwrap();
        for i in 0..4 {
            assert!((x[i] - 1.0).abs() < 1e-10);
        }
        assert!(residual_norm(&a, &x, &b).unwrap() <= 1e-10 * b.norm());
    }

    #[test]
    fn rank_deficiency_reports_index() {
        // Third column duplicates the first.
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ])
        .unwrap();
        let b = Vector::new(vec![1.0; 4]).unwrap();
        match solve_least_squares(&a, &b) {
            Err(Error::RankDeficient { index, .. }) => assert_eq!(index, 2),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
        let zero = DenseMatrix::zeros(3, 1);
        assert!(matches!(
            solve_least_squares(&zero, &Vector::zeros(3)),
            Err(Error::RankDeficient { index: 0, .. })
        ));
    }

    #[test]
    fn solve_length_mismatch() {
        let a = DenseMatrix::identity(3);
        assert!(matches!(
            solve_least_squares(&a, &Vector::zeros(2)),
            Err(Error::Dimension(_))
        ));
    }
}
