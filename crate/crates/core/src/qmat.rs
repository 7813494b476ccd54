//! Dense complex-matrix kernel.
//!
//! [`CMatrix`] wraps a column-major `nalgebra` matrix but exposes a row-major
//! construction and serialization view. Decompositions ([`herm_eig`], [`svd`])
//! return results in a fixed, reproducible order so downstream code can rely
//! on index positions.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default ceiling on any row or column count produced by [`kron`].
pub const MAX_DIM: usize = 4096;

/// Default Hermiticity tolerance accepted by [`herm_eig`].
pub const HERM_TOL: f64 = 1e-9;

/// Eigenvalues closer than this are treated as tied when ordering eigenpairs.
const TIE_TOL: f64 = 1e-12;

/// Column vector of complex amplitudes.
pub type CVector = nalgebra::DVector<Complex64>;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix(DMatrix<Complex64>);

impl CMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("{rows}x{cols} matrix has a zero dimension")));
        }
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries cannot fill a {rows}x{cols} matrix", entries.len())));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Argument("matrix entries must be finite".into()));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { c64(diag[i], 0.0) } else { c64(0.0, 0.0) })
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &CVector, v: &CVector) -> Self {
        Self(u * v.adjoint())
    }

    /// Projector `|v⟩⟨v|`.
    pub fn projector(v: &CVector) -> Self {
        Self::outer(v, v)
    }

    pub fn from_inner(m: DMatrix<Complex64>) -> Self {
        Self(m)
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.0[(i, j)] = z;
    }

    pub fn column(&self, j: usize) -> CVector {
        self.0.column(j).into_owned()
    }

    /// Leading `n` columns.
    pub fn leading_columns(&self, n: usize) -> CMatrix {
        Self(self.0.columns(0, n).into_owned())
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> CMatrix {
        Self(self.0.map(|z| z * s))
    }

    pub fn mul_vec(&self, v: &CVector) -> CVector {
        &self.0 * v
    }

    /// Frobenius norm of `A - A†`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.0 - self.0.adjoint()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(A + A†) / 2`.
    pub fn hermitized(&self) -> CMatrix {
        Self((&self.0 + self.0.adjoint()).map(|z| z * 0.5))
    }

    /// Frobenius norm of `A†A - I`.
    pub fn isometry_defect(&self) -> f64 {
        let gram = self.0.adjoint() * &self.0;
        let n = gram.nrows();
        (gram - DMatrix::<Complex64>::identity(n, n)).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 - &rhs.0)
    }
}

/// Conjugate transpose.
pub fn dagger(a: &CMatrix) -> CMatrix {
    CMatrix(a.0.adjoint())
}

/// Kronecker product with the default [`MAX_DIM`] ceiling.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    kron_with_limit(a, b, MAX_DIM)
}

/// Kronecker product: entry `(i·b.rows + k, j·b.cols + l)` is `a(i,j)·b(k,l)`.
pub fn kron_with_limit(a: &CMatrix, b: &CMatrix, max_dim: usize) -> Result<CMatrix> {
    let rows = a.rows().saturating_mul(b.rows());
    let cols = a.cols().saturating_mul(b.cols());
    let dim = rows.max(cols);
    if dim > max_dim {
        return Err(Error::Size { dim, max: max_dim });
    }
    Ok(CMatrix(a.0.kronecker(&b.0)))
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermEig {
    /// Non-increasing.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

impl HermEig {
    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k)
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> CMatrix {
        let v = &self.vectors.0;
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&x| c64(x, 0.0)),
        ));
        CMatrix(v * d * v.adjoint())
    }
}

/// Hermitian eigendecomposition.
///
/// The input is Hermitized as `(A + A†)/2` after the symmetry check.
/// Eigenpairs come out in non-increasing eigenvalue order; tied eigenvalues
/// are ordered by descending argument of the eigenvector's first nonzero
/// component, then by the position of that component.
pub fn herm_eig(a: &CMatrix, tol: f64) -> Result<HermEig> {
    if !a.is_square() {
        return Err(Error::Shape(format!("eigendecomposition needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    let defect = a.hermiticity_defect();
    if defect > tol {
        return Err(Error::Symmetry { defect, tol });
    }
    Ok(herm_eig_unchecked(&a.hermitized()))
}

pub(crate) fn herm_eig_unchecked(h: &CMatrix) -> HermEig {
    let eig = h.0.clone().symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    // Re-sort each run of tied eigenvalues by the secondary key.
    let key = |k: usize| -> (f64, usize) {
        let col = eig.eigenvectors.column(k);
        match col.iter().position(|z| z.norm() > 1e-12) {
            Some(p) => (col[p].arg(), p),
            None => (0.0, n),
        }
    };
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (eig.eigenvalues[order[end - 1]] - eig.eigenvalues[order[end]]).abs() <= TIE_TOL {
            end += 1;
        }
        if end - start > 1 {
            order[start..end].sort_by(|&i, &j| {
                let (ai, pi) = key(i);
                let (aj, pj) = key(j);
                aj.total_cmp(&ai).then(pi.cmp(&pj))
            });
        }
        start = end;
    }

    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    HermEig { values, vectors: CMatrix(vectors) }
}

/// Thin singular value decomposition `A = U diag(s) V†`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    /// Non-negative and non-increasing, length `min(rows, cols)`.
    pub s: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> CMatrix {
        let k = self.s.len();
        let mut us = self.u.0.clone();
        for j in 0..k {
            us.column_mut(j).scale_mut(self.s[j]);
        }
        CMatrix(us * self.v.0.adjoint())
    }
}

pub fn svd(a: &CMatrix) -> Svd {
    let dec = a.0.clone().svd(true, true);
    let u = dec.u.expect("left singular vectors requested");
    let v = dec.v_t.expect("right singular vectors requested").adjoint();
    let k = dec.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| dec.singular_values[j].total_cmp(&dec.singular_values[i]));
    Svd {
        u: CMatrix(DMatrix::from_fn(u.nrows(), k, |i, j| u[(i, order[j])])),
        s: order.iter().map(|&j| dec.singular_values[j].max(0.0)).collect(),
        v: CMatrix(DMatrix::from_fn(v.nrows(), k, |i, j| v[(i, order[j])])),
    }
}

/// `exp(i·h)` for Hermitian `h`, computed through its eigendecomposition.
pub fn expm_antihermitian(h: &CMatrix) -> Result<CMatrix> {
    let eig = herm_eig(h, HERM_TOL)?;
    Ok(expi_from_eig(&eig, 1.0))
}

/// `exp(i·t·h)` from a precomputed eigendecomposition of `h`.
pub(crate) fn expi_from_eig(eig: &HermEig, t: f64) -> CMatrix {
    let v = &eig.vectors.0;
    let mut vp = v.clone();
    for (j, &lam) in eig.values.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, t * lam);
        for z in vp.column_mut(j).iter_mut() {
            *z *= phase;
        }
    }
    CMatrix(vp * v.adjoint())
}
