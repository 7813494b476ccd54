//! Density matrices and pure states over tensor-factor structures.
//!
//! Composite basis states are indexed by the mixed-radix number whose radices
//! are `dims`, leftmost subsystem most significant. Entropies are in bits.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmat::{self, c64, CMatrix, CVector};

/// Eigenvalues at or below this contribute nothing to an entropy.
pub const EIGEN_FLOOR: f64 = 1e-12;

/// Validation tolerance for state invariants (Hermiticity, trace, positivity, norm).
pub const STATE_TOL: f64 = 1e-9;

/// A bipartition of subsystem indices given by its left block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    left: Vec<usize>,
}

impl Cut {
    pub fn new(left: impl Into<Vec<usize>>) -> Self {
        let mut left = left.into();
        left.sort_unstable();
        left.dedup();
        Self { left }
    }

    /// Parses `"0,2"` style left-block lists.
    pub fn parse(spec: &str) -> Result<Self> {
        let left = spec
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Argument(format!("bad cut '{spec}': {e}")))?;
        Ok(Self::new(left))
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    /// Right block for a system with `n` subsystems.
    pub fn right(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|i| !self.left.contains(i)).collect()
    }

    /// Checks that both blocks are nonempty for `n` subsystems.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.left.is_empty() {
            return Err(Error::Argument("cut has an empty left block".into()));
        }
        if let Some(&bad) = self.left.iter().find(|&&i| i >= n) {
            return Err(Error::Argument(format!("cut index {bad} out of range for {n} subsystems")));
        }
        if self.left.len() == n {
            return Err(Error::Argument("cut has an empty right block".into()));
        }
        Ok(())
    }
}

impl std::fmt::Display for Cut {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.left.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

fn validate_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Argument(format!("invalid subsystem dimensions {dims:?}")));
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .filter(|&n| n <= qmat::MAX_DIM)
        .ok_or(Error::Size { dim: usize::MAX, max: qmat::MAX_DIM })
}

/// Hermitian, unit-trace, positive semidefinite operator on `Π dims`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates the density-matrix invariants at [`STATE_TOL`].
    pub fn new(dims: Vec<usize>, mat: CMatrix) -> Result<Self> {
        let n = validate_dims(&dims)?;
        if mat.rows() != n || mat.cols() != n {
            return Err(Error::Shape(format!(
                "dims {dims:?} need a {n}x{n} matrix, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let eig = qmat::herm_eig(&mat, STATE_TOL)?;
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::Normalization(format!("trace {tr} differs from 1")));
        }
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::Argument(format!("not positive semidefinite: eigenvalue {min:e}")));
        }
        Ok(Self { dims, mat: mat.hermitized() })
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_parts(dims: Vec<usize>, mat: CMatrix) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), mat.rows());
        Self { dims, mat }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let n = validate_dims(&dims)?;
        Ok(Self { dims, mat: CMatrix::identity(n).scale(1.0 / n as f64) })
    }

    pub fn from_diagonal(dims: Vec<usize>, diag: &[f64]) -> Result<Self> {
        Self::new(dims, CMatrix::from_real_diagonal(diag))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn eig(&self) -> qmat::HermEig {
        qmat::herm_eig_unchecked(&self.mat)
    }

    /// Number of eigenvalues above `threshold`.
    pub fn rank(&self, threshold: f64) -> usize {
        self.eig().values.iter().filter(|&&x| x > threshold).count()
    }

    /// Reorders subsystems: subsystem `k` of the result is subsystem `perm[k]` of `self`.
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<Self> {
        let map = permutation_map(&self.dims, perm)?;
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        for (i_new, &i_old) in map.iter().enumerate() {
            for (j_new, &j_old) in map.iter().enumerate() {
                out[(i_new, j_new)] = self.mat.get(i_old, j_old);
            }
        }
        let dims = perm.iter().map(|&p| self.dims[p]).collect();
        Ok(Self { dims, mat: CMatrix::from_inner(out) })
    }

    /// `W ρ W†`.
    pub fn conjugate_by(&self, w: &CMatrix) -> Result<Self> {
        if w.rows() != self.dim() || w.cols() != self.dim() {
            return Err(Error::Shape("conjugating unitary has the wrong size".into()));
        }
        let m = &(w * &self.mat) * &qmat::dagger(w);
        Ok(Self { dims: self.dims.clone(), mat: m.hermitized() })
    }
}

/// Normalized state vector on `Π dims`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    vec: CVector,
}

impl PureState {
    pub fn new(dims: Vec<usize>, vec: CVector) -> Result<Self> {
        let n = validate_dims(&dims)?;
        if vec.len() != n {
            return Err(Error::Shape(format!("dims {dims:?} need {n} amplitudes, got {}", vec.len())));
        }
        let norm = vec.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::Normalization(format!("state norm {norm} differs from 1")));
        }
        Ok(Self { dims, vec })
    }

    /// Normalizes `vec` first; fails on a zero vector.
    pub fn normalized(dims: Vec<usize>, vec: CVector) -> Result<Self> {
        let norm = vec.norm();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::Normalization("cannot normalize a zero vector".into()));
        }
        Self::new(dims, vec.unscale(norm))
    }

    pub(crate) fn from_parts(dims: Vec<usize>, vec: CVector) -> Self {
        Self { dims, vec }
    }

    /// Computational basis state with the given per-subsystem digits.
    pub fn basis(dims: Vec<usize>, digits: &[usize]) -> Result<Self> {
        let n = validate_dims(&dims)?;
        if digits.len() != dims.len() || digits.iter().zip(&dims).any(|(d, r)| d >= r) {
            return Err(Error::Argument(format!("digits {digits:?} invalid for dims {dims:?}")));
        }
        let idx = digits.iter().zip(&dims).fold(0, |acc, (d, r)| acc * r + d);
        let mut v = CVector::zeros(n);
        v[idx] = c64(1.0, 0.0);
        Ok(Self { dims, vec: v })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn vector(&self) -> &CVector {
        &self.vec
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { dims: self.dims.clone(), mat: CMatrix::projector(&self.vec) }
    }

    /// `ψ ⊗ φ`.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        validate_dims(&dims)?;
        Ok(Self { dims, vec: self.vec.kronecker(&other.vec) })
    }

    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<Self> {
        let map = permutation_map(&self.dims, perm)?;
        let vec = CVector::from_iterator(map.len(), map.iter().map(|&i| self.vec[i]));
        let dims = perm.iter().map(|&p| self.dims[p]).collect();
        Ok(Self { dims, vec })
    }

    /// Applies an operator to the full vector and renormalizes nothing.
    pub fn apply(&self, w: &CMatrix) -> Result<Self> {
        if w.cols() != self.vec.len() || w.rows() != self.vec.len() {
            return Err(Error::Shape("operator size does not match the state".into()));
        }
        Ok(Self { dims: self.dims.clone(), vec: w.mul_vec(&self.vec) })
    }
}

/// For each new flat index, the old flat index under a subsystem permutation.
fn permutation_map(dims: &[usize], perm: &[usize]) -> Result<Vec<usize>> {
    let n = dims.len();
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::Argument(format!("{perm:?} is not a permutation of {n} subsystems")));
    }
    let old_strides = strides(dims);
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let total: usize = dims.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; n];
    for _ in 0..total {
        out.push(digits.iter().zip(perm).map(|(&d, &p)| d * old_strides[p]).sum());
        for k in (0..n).rev() {
            digits[k] += 1;
            if digits[k] < new_dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    Ok(out)
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn validate_keep(dims: &[usize], keep: &[usize]) -> Result<Vec<usize>> {
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() {
        return Err(Error::Argument("partial trace needs at least one kept subsystem".into()));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::Argument(format!("subsystem {bad} out of range for dims {dims:?}")));
    }
    Ok(keep)
}

/// Splits every flat index into (kept index, traced index).
fn split_indices(dims: &[usize], keep: &[usize]) -> (Vec<usize>, Vec<usize>, usize, usize) {
    let st = strides(dims);
    let total: usize = dims.iter().product();
    let mut kept = vec![0usize; total];
    let mut traced = vec![0usize; total];
    let (mut dk, mut dt) = (1usize, 1usize);
    for (k, &d) in dims.iter().enumerate() {
        if keep.contains(&k) {
            dk *= d;
        } else {
            dt *= d;
        }
    }
    for i in 0..total {
        let (mut a, mut b) = (0usize, 0usize);
        for (k, &d) in dims.iter().enumerate() {
            let digit = (i / st[k]) % d;
            if keep.contains(&k) {
                a = a * d + digit;
            } else {
                b = b * d + digit;
            }
        }
        kept[i] = a;
        traced[i] = b;
    }
    (kept, traced, dk, dt)
}

/// Traces out every subsystem not in `keep`; kept subsystems stay in index order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let keep = validate_keep(&rho.dims, keep)?;
    let (kept, traced, dk, dt) = split_indices(&rho.dims, &keep);
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); dt];
    for i in 0..kept.len() {
        groups[traced[i]].push(i);
    }
    let mut out = DMatrix::<Complex64>::zeros(dk, dk);
    let m = rho.mat.inner();
    for g in &groups {
        for &i in g {
            for &j in g {
                out[(kept[i], kept[j])] += m[(i, j)];
            }
        }
    }
    let dims = keep.iter().map(|&k| rho.dims[k]).collect();
    Ok(DensityMatrix::from_parts(dims, CMatrix::from_inner(out).hermitized()))
}

/// Reshapes a state vector into a `left × right` amplitude matrix along a cut.
pub(crate) fn amplitude_matrix(vec: &CVector, dims: &[usize], left: &[usize]) -> DMatrix<Complex64> {
    let (rows, cols, _, _) = split_indices(dims, left);
    let dk = left.iter().map(|&k| dims[k]).product();
    let dt = vec.len() / dk;
    let mut m = DMatrix::zeros(dk, dt);
    for i in 0..vec.len() {
        m[(rows[i], cols[i])] = vec[i];
    }
    m
}

/// Reduced state of a pure state on the subsystems in `keep`.
pub fn reduced_state(psi: &PureState, keep: &[usize]) -> Result<DensityMatrix> {
    partial_trace(&psi.to_density(), keep)
}

/// Entropy in bits of a spectrum, ignoring eigenvalues at or below [`EIGEN_FLOOR`].
pub fn entropy_of_spectrum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().filter(|&x| x > EIGEN_FLOOR).map(|x| -x * x.log2()).sum::<f64>().max(0.0)
}

/// `S(ρ) = -Tr ρ log₂ ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(rho.eig().values)
}

/// Entropy of a Hermitian PSD matrix that is not wrapped as a [`DensityMatrix`].
pub(crate) fn matrix_entropy(m: &DMatrix<Complex64>) -> f64 {
    entropy_of_spectrum(m.clone().symmetric_eigen().eigenvalues.iter().copied())
}

/// Shannon entropy in bits. Entries down to `-1e-12` are clipped to zero.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    if let Some(&bad) = p.iter().find(|&&x| x < -1e-12 || !x.is_finite()) {
        return Err(Error::Argument(format!("probability {bad} is negative")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > STATE_TOL {
        return Err(Error::Normalization(format!("probabilities sum to {sum}")));
    }
    Ok(p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum())
}

/// Schmidt decomposition `|ψ⟩ = Σ_k c_k |l_k⟩|r_k⟩` along a cut.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    /// Positive, non-increasing; squares sum to 1.
    pub coeffs: Vec<f64>,
    /// Columns are `|l_k⟩` on the left block.
    pub left_vectors: CMatrix,
    /// Columns are `|r_k⟩` on the right block.
    pub right_vectors: CMatrix,
}

impl SchmidtDecomposition {
    /// Entropy of entanglement from the coefficients.
    pub fn entropy(&self) -> f64 {
        entropy_of_spectrum(self.coeffs.iter().map(|c| c * c))
    }

    /// Rebuilds the state vector in (left block, right block) ordering.
    pub fn reconstruct(&self) -> CVector {
        let mut out = CVector::zeros(self.left_vectors.rows() * self.right_vectors.rows());
        for (k, &c) in self.coeffs.iter().enumerate() {
            out += self.left_vectors.column(k).kronecker(&self.right_vectors.column(k)) * c64(c, 0.0);
        }
        out
    }
}

pub fn schmidt(psi: &PureState, cut: &Cut) -> Result<SchmidtDecomposition> {
    cut.validate(psi.dims.len())?;
    let m = amplitude_matrix(&psi.vec, &psi.dims, cut.left());
    let dec = qmat::svd(&CMatrix::from_inner(m));
    let keep = dec.s.iter().take_while(|&&s| s > EIGEN_FLOOR).count().max(1);
    let u = dec.u.leading_columns(keep);
    // ψ_{ab} = Σ s_k U_{ak} conj(V_{bk}), so the right vectors are conj(V).
    let v = CMatrix::from_inner(dec.v.leading_columns(keep).inner().map(|z| z.conj()));
    Ok(SchmidtDecomposition { coeffs: dec.s[..keep].to_vec(), left_vectors: u, right_vectors: v })
}

/// `a ⊗ b` with concatenated dims.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    let mat = qmat::kron(&a.mat, &b.mat)?;
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    Ok(DensityMatrix::from_parts(dims, mat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::expm_antihermitian;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn bell() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(vec![2, 2], CVector::from_vec(vec![c64(s, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(s, 0.0)]))
            .unwrap()
    }

    fn random_pure(dims: Vec<usize>, rng: &mut ChaCha20Rng) -> PureState {
        let n = dims.iter().product();
        let v = CVector::from_fn(n, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        PureState::normalized(dims, v).unwrap()
    }

    fn random_mixed(dims: Vec<usize>, rng: &mut ChaCha20Rng) -> DensityMatrix {
        let n: usize = dims.iter().product();
        let g = CMatrix::from_fn(n, n, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let m = &g * &qmat::dagger(&g);
        let tr = m.trace().re;
        DensityMatrix::new(dims, m.scale(1.0 / tr)).unwrap()
    }

    fn random_unitary(n: usize, rng: &mut ChaCha20Rng) -> CMatrix {
        let h =
            CMatrix::from_fn(n, n, |_, _| c64(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).hermitized();
        expm_antihermitian(&h).unwrap()
    }

    fn close(a: &DensityMatrix, b: &DensityMatrix, tol: f64) -> bool {
        a.dims() == b.dims() && (a.matrix() - b.matrix()).frobenius_norm() < tol
    }

    #[test]
    fn validation_rejects_bad_states() {
        assert!(DensityMatrix::from_diagonal(vec![2], &[0.7, 0.2]).is_err());
        assert!(DensityMatrix::from_diagonal(vec![2], &[1.2, -0.2]).is_err());
        assert!(DensityMatrix::from_diagonal(vec![3], &[0.5, 0.5]).is_err());
        assert!(PureState::new(vec![2], CVector::from_vec(vec![c64(1.0, 0.0), c64(1.0, 0.0)])).is_err());
    }

    #[test]
    fn partial_trace_examples() {
        let half = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        assert!(close(&partial_trace(&bell().to_density(), &[0]).unwrap(), &half, 1e-12));

        let classical = DensityMatrix::from_diagonal(vec![2, 2], &[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(close(&partial_trace(&classical, &[1]).unwrap(), &half, 1e-15));

        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (r, s) = (random_mixed(vec![3], &mut rng), random_mixed(vec![2], &mut rng));
        let rs = tensor(&r, &s).unwrap();
        assert!(close(&partial_trace(&rs, &[0]).unwrap(), &r, 1e-12));
        assert!(close(&partial_trace(&rs, &[1]).unwrap(), &s, 1e-12));
    }

    #[test]
    fn partial_trace_errors() {
        let rho = bell().to_density();
        assert!(matches!(partial_trace(&rho, &[]), Err(Error::Argument(_))));
        assert!(matches!(partial_trace(&rho, &[2]), Err(Error::Argument(_))));
    }

    #[test]
    fn partial_trace_preserves_trace_and_commutes() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let rho = random_mixed(vec![2, 3, 2], &mut rng);
        let r0 = partial_trace(&rho, &[0, 2]).unwrap();
        assert!((r0.matrix().trace().re - 1.0).abs() < 1e-10);
        assert!(r0.matrix().hermiticity_defect() < 1e-14);
        let stepwise = partial_trace(&partial_trace(&rho, &[0, 2]).unwrap(), &[0]).unwrap();
        let direct = partial_trace(&rho, &[0]).unwrap();
        assert!(close(&stepwise, &direct, 1e-12));
    }

    #[test]
    fn entropy_examples() {
        for d in [2, 3, 5] {
            let s = von_neumann_entropy(&DensityMatrix::maximally_mixed(vec![d]).unwrap());
            assert!((s - (d as f64).log2()).abs() < 1e-12);
        }
        assert!(von_neumann_entropy(&bell().to_density()).abs() < 1e-12);
        let s = von_neumann_entropy(&DensityMatrix::from_diagonal(vec![3], &[0.5, 0.25, 0.25]).unwrap());
        assert!((s - 1.5).abs() < 1e-14);
    }

    #[test]
    fn entropy_is_unitarily_invariant() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..5 {
            let rho = random_mixed(vec![4], &mut rng);
            let w = random_unitary(4, &mut rng);
            let s0 = von_neumann_entropy(&rho);
            let s1 = von_neumann_entropy(&rho.conjugate_by(&w).unwrap());
            assert!((s0 - s1).abs() < 1e-9);
        }
    }

    #[test]
    fn shannon_examples() {
        assert!((shannon_entropy(&[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(shannon_entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert!((shannon_entropy(&[0.5, 0.25, 0.25]).unwrap() - 1.5).abs() < 1e-15);
        assert!(shannon_entropy(&[1.0, -1e-13]).is_ok());
        assert!(matches!(shannon_entropy(&[0.5, 0.4]), Err(Error::Normalization(_))));
    }

    #[test]
    fn schmidt_examples() {
        let s = schmidt(&bell(), &Cut::new([0])).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(s.coeffs.iter().all(|c| (c - h).abs() < 1e-12) && s.coeffs.len() == 2);

        let prod = PureState::basis(vec![2, 2], &[0, 1]).unwrap();
        let s = schmidt(&prod, &Cut::new([0])).unwrap();
        assert_eq!(s.coeffs.len(), 1);
        assert!((s.coeffs[0] - 1.0).abs() < 1e-12);

        let v = CVector::from_vec(vec![c64(0.9f64.sqrt(), 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.1f64.sqrt(), 0.0)]);
        let s = schmidt(&PureState::new(vec![2, 2], v.clone()).unwrap(), &Cut::new([0])).unwrap();
        assert!((s.coeffs[0] - 0.9f64.sqrt()).abs() < 1e-12 && (s.coeffs[1] - 0.1f64.sqrt()).abs() < 1e-12);
        assert!((s.reconstruct() - v).norm() < 1e-12);
    }

    #[test]
    fn schmidt_rejects_bad_cuts() {
        assert!(schmidt(&bell(), &Cut::new([0, 1])).is_err());
        assert!(schmidt(&bell(), &Cut::new(Vec::<usize>::new())).is_err());
        assert!(schmidt(&bell(), &Cut::new([3])).is_err());
    }

    #[test]
    fn schmidt_matches_reduced_spectra() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for _ in 0..10 {
            let psi = random_pure(vec![3, 3], &mut rng);
            let s = schmidt(&psi, &Cut::new([0])).unwrap();
            let sum: f64 = s.coeffs.iter().map(|c| c * c).sum();
            assert!((sum - 1.0).abs() < 1e-9);
            let red = reduced_state(&psi, &[0]).unwrap().eig().values;
            for (c, l) in s.coeffs.iter().zip(&red) {
                assert!((c * c - l).abs() < 1e-10);
            }
            assert!((s.entropy() - von_neumann_entropy(&reduced_state(&psi, &[0]).unwrap())).abs() < 1e-9);
        }
    }

    #[test]
    fn schmidt_on_noncontiguous_cut() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let psi = random_pure(vec![2, 3, 2, 2], &mut rng);
        let cut = Cut::new([0, 2]);
        let s = schmidt(&psi, &cut).unwrap();
        let left = von_neumann_entropy(&reduced_state(&psi, &[0, 2]).unwrap());
        let right = von_neumann_entropy(&reduced_state(&psi, &[1, 3]).unwrap());
        assert!((s.entropy() - left).abs() < 1e-9 && (left - right).abs() < 1e-9);
        let permuted = psi.permute_subsystems(&[0, 2, 1, 3]).unwrap();
        assert!((s.reconstruct() - permuted.vector()).norm() < 1e-9);
    }

    #[test]
    fn schmidt_invariant_under_local_unitaries() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let psi = random_pure(vec![2, 3], &mut rng);
        let w = qmat::kron(&random_unitary(2, &mut rng), &random_unitary(3, &mut rng)).unwrap();
        let a = schmidt(&psi, &Cut::new([0])).unwrap().coeffs;
        let b = schmidt(&psi.apply(&w).unwrap(), &Cut::new([0])).unwrap().coeffs;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn reduced_state_examples() {
        let red = reduced_state(&bell(), &[0]).unwrap();
        assert!(close(&red, &DensityMatrix::maximally_mixed(vec![2]).unwrap(), 1e-12));
        let prod = PureState::basis(vec![2, 3], &[1, 2]).unwrap();
        assert!(von_neumann_entropy(&reduced_state(&prod, &[1]).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn tensor_examples() {
        let h = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        let hh = tensor(&h, &h).unwrap();
        assert!(close(&hh, &DensityMatrix::maximally_mixed(vec![2, 2]).unwrap(), 1e-15));
        assert!((von_neumann_entropy(&hh) - 2.0).abs() < 1e-12);
        let pp = tensor(&bell().to_density(), &bell().to_density()).unwrap();
        assert_eq!(pp.dims(), &[2, 2, 2, 2]);
        assert!(von_neumann_entropy(&pp).abs() < 1e-9);

        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let (a, b) = (random_mixed(vec![2, 2], &mut rng), random_mixed(vec![2, 2], &mut rng));
        let s = von_neumann_entropy(&tensor(&a, &b).unwrap());
        assert!((s - von_neumann_entropy(&a) - von_neumann_entropy(&b)).abs() < 1e-9);
    }

    #[test]
    fn permutation_moves_subsystems() {
        let psi = PureState::basis(vec![2, 3, 4], &[1, 2, 3]).unwrap();
        let p = psi.permute_subsystems(&[2, 0, 1]).unwrap();
        assert_eq!(p, PureState::basis(vec![4, 2, 3], &[3, 1, 2]).unwrap());
        let rho = psi.to_density().permute_subsystems(&[2, 0, 1]).unwrap();
        assert!(close(&rho, &p.to_density(), 1e-15));
        assert!(psi.permute_subsystems(&[0, 0, 1]).is_err());
    }
}
