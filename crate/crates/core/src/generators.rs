//! Synthetic inputs: Gaussian matrices, ill-conditioned matrices with a
//! prescribed spectrum, and the noisy in-range right-hand side.

use crate::error::{Error, Result};
use crate::linalg::{householder_qr, DenseMatrix, Vector};
use crate::rng;

/// Singular values for `gen_illcond_input`, nonincreasing and positive.
#[derive(Clone, Debug, PartialEq)]
pub struct IllCondSpectrum {
    sigma: Vec<f64>,
}

impl IllCondSpectrum {
    pub fn new(sigma: Vec<f64>) -> Result<Self> {
        if sigma.is_empty() || sigma.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::param("spectrum entries must be positive and finite"));
        }
        if sigma.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::param("spectrum must be nonincreasing"));
        }
        Ok(IllCondSpectrum { sigma })
    }

    /// `10^(5 - j)` for `j = 1..=14`, then `1e-10`.
    pub fn standard(d: usize) -> Self {
        let sigma = (1..=d)
            .map(|j| if j <= 14 { 10f64.powi(5 - j as i32) } else { 1e-10 })
            .collect();
        IllCondSpectrum { sigma }
    }

    pub fn values(&self) -> &[f64] {
        &self.sigma
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RhsRecipe {
    pub noise_scale: f64,
}

impl Default for RhsRecipe {
    fn default() -> Self {
        RhsRecipe { noise_scale: 0.001 }
    }
}

impl RhsRecipe {
    pub fn new(noise_scale: f64) -> Result<Self> {
        if !(noise_scale.is_finite() && noise_scale > 0.0) {
            return Err(Error::param(format!(
                "noise scale must be positive, got {noise_scale}"
            )));
        }
        Ok(RhsRecipe { noise_scale })
    }
}

/// `m x d` matrix of i.i.d. standard normals.
pub fn gen_gaussian_input(m: usize, d: usize, seed: u64) -> Result<DenseMatrix> {
    if d == 0 || d >= m {
        return Err(Error::dim(format!("need 0 < d < m, got {m}x{d}")));
    }
    DenseMatrix::new(m, d, rng::gaussian_vec(&mut rng::stream(seed), m * d))
}

/// `m x d` matrix with orthonormal columns: the Q factor of a Gaussian matrix.
pub fn random_orthonormal(m: usize, d: usize, seed: u64) -> Result<DenseMatrix> {
    if d == 0 || d > m {
        return Err(Error::dim(format!("need 0 < d <= m, got {m}x{d}")));
    }
    let g = DenseMatrix::new(m, d, rng::gaussian_vec(&mut rng::stream(seed), m * d))?;
    Ok(householder_qr(&g)?.q_thin())
}

/// `A = U diag(sigma) V^T` with thin random orthonormal `U` (`m x d`) and
/// random orthogonal `V` (`d x d`). Returns `A` and `V`.
pub fn gen_illcond_with_factors(
    m: usize,
    d: usize,
    spectrum: &IllCondSpectrum,
    seed: u64,
) -> Result<(DenseMatrix, DenseMatrix)> {
    if spectrum.len() != d {
        return Err(Error::dim(format!(
            "spectrum has {} values for {d} columns",
            spectrum.len()
        )));
    }
    if d >= m {
        return Err(Error::dim(format!("need d < m, got {m}x{d}")));
    }
    let u = random_orthonormal(m, d, rng::derive_seed(seed, &[1]))?;
    let v = random_orthonormal(d, d, rng::derive_seed(seed, &[2]))?;
    let sigma = spectrum.values();
    let u_sigma = DenseMatrix::from_fn(m, d, |i, j| u.get(i, j) * sigma[j]);
    let a = u_sigma.matmul(&v.transpose())?;
    Ok((a, v))
}

pub fn gen_illcond_input(m: usize, d: usize, spectrum: &IllCondSpectrum, seed: u64) -> Result<DenseMatrix> {
    gen_illcond_with_factors(m, d, spectrum, seed).map(|(a, _)| a)
}

/// The two pieces of a generated right-hand side.
#[derive(Clone, Debug)]
pub struct RhsParts {
    /// `A w / ||A w||`.
    pub in_range: Vector,
    /// `noise_scale * v / ||v||`.
    pub noise: Vector,
    /// Draws of `w` rejected because `A w` vanished.
    pub rejected: usize,
}

impl RhsParts {
    pub fn rhs(&self) -> Vector {
        self.in_range
            .axpy(1.0, &self.noise)
            .expect("parts share a length")
    }
}

/// Right-hand side `b = A w / ||A w|| + noise_scale * v / ||v||` for Gaussian
/// `w` and `v`.
pub fn gen_rhs(a: &DenseMatrix, recipe: &RhsRecipe, seed: u64) -> Result<Vector> {
    gen_rhs_parts(a, recipe, seed).map(|p| p.rhs())
}

pub fn gen_rhs_parts(a: &DenseMatrix, recipe: &RhsRecipe, seed: u64) -> Result<RhsParts> {
    if a.max_abs() == 0.0 {
        return Err(Error::param("right-hand side recipe needs a nonzero matrix"));
    }
    let (m, d) = a.shape();
    let mut r = rng::stream(seed);
    let mut rejected = 0;
    let aw = loop {
        let w = Vector::from_raw(rng::gaussian_vec(&mut r, d));
        let aw = a.mul_vec(&w)?;
        if aw.norm() > 0.0 {
            break aw;
        }
        rejected += 1;
        if rejected > 1000 {
            return Err(Error::param("A w vanished for every draw"));
        }
    };
    let v = loop {
        let v = Vector::from_raw(rng::gaussian_vec(&mut r, m));
        if v.norm() > 0.0 {
            break v;
        }
    };
    Ok(RhsParts {
        in_range: aw.scaled(1.0 / aw.norm()),
        noise: v.scaled(recipe.noise_scale / v.norm()),
        rejected,
    })
}
