//! Pure-state ensembles: the isometry picture of decompositions (HJW),
//! mixing, and classically flagged states.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmat::{c64, CMatrix, CVector, HermEig};
use crate::qstate::{self, DensityMatrix, PureState, STATE_TOL};

/// Default pruning threshold for ensemble members.
pub const PRUNE_TOL: f64 = 1e-12;

/// Eigenvalues above this count toward the rank of a density matrix.
pub const RANK_TOL: f64 = 1e-10;

/// Weighted list of pure states on identical dims.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    members: Vec<(f64, PureState)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        let Some((_, first)) = members.first() else {
            return Err(Error::Argument("ensemble has no members".into()));
        };
        let dims = first.dims().to_vec();
        if members.iter().any(|(_, s)| s.dims() != dims.as_slice()) {
            return Err(Error::Argument("ensemble members have different dims".into()));
        }
        if members.iter().any(|(w, _)| *w < 0.0 || !w.is_finite()) {
            return Err(Error::Argument("ensemble weights must be non-negative".into()));
        }
        let total: f64 = members.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::Normalization(format!("ensemble weights sum to {total}")));
        }
        Ok(Self { members })
    }

    pub(crate) fn from_parts(members: Vec<(f64, PureState)>) -> Self {
        Self { members }
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dims(&self) -> &[usize] {
        self.members[0].1.dims()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.members.iter().map(|(w, _)| *w).collect()
    }

    /// Eigen-ensemble `{(λ_j, |e_j⟩)}` over the support of `rho`.
    pub fn eigen(rho: &DensityMatrix) -> Self {
        let eig = rho.eig();
        let members = eig
            .values
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > RANK_TOL)
            .map(|(j, &l)| (l, PureState::from_parts(rho.dims().to_vec(), eig.vector(j))))
            .collect::<Vec<_>>();
        let total: f64 = members.iter().map(|(w, _)| w).sum();
        Self { members: members.into_iter().map(|(w, s)| (w / total, s)).collect() }
    }

    /// Product ensemble `{(p_i q_k, |ψ_i⟩ ⊗ |φ_k⟩)}`.
    pub fn product(&self, other: &Ensemble) -> Result<Ensemble> {
        let mut members = Vec::with_capacity(self.len() * other.len());
        for (p, a) in &self.members {
            for (q, b) in &other.members {
                members.push((p * q, a.tensor(b)?));
            }
        }
        Ok(Self { members })
    }
}

/// Rectangular matrix with orthonormal columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry(CMatrix);

impl Isometry {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.rows() < mat.cols() {
            return Err(Error::Shape(format!("isometry needs rows >= cols, got {}x{}", mat.rows(), mat.cols())));
        }
        let defect = mat.isometry_defect();
        if defect > 1e-9 {
            return Err(Error::Argument(format!("isometry defect {defect:e} exceeds 1e-9")));
        }
        Ok(Self(mat))
    }

    /// The `m × n` matrix whose top block is the identity.
    pub fn padded_identity(m: usize, n: usize) -> Result<Self> {
        Self::new(CMatrix::from_fn(m, n, |i, j| if i == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) }))
    }

    pub(crate) fn from_parts(mat: CMatrix) -> Self {
        Self(mat)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.rows()
    }

    pub fn cols(&self) -> usize {
        self.0.cols()
    }
}

/// Eigen-data of a density matrix restricted to its support.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub dims: Vec<usize>,
    /// Positive eigenvalues `λ_j`.
    pub values: Vec<f64>,
    /// Matching orthonormal eigenvectors `|e_j⟩`.
    pub vectors: Vec<CVector>,
}

impl Eigensystem {
    pub fn of(rho: &DensityMatrix) -> Self {
        Self::from_eig(rho.dims().to_vec(), &rho.eig())
    }

    pub(crate) fn from_eig(dims: Vec<usize>, eig: &HermEig) -> Self {
        let rank = eig.values.iter().filter(|&&l| l > RANK_TOL).count();
        Self { dims, values: eig.values[..rank].to_vec(), vectors: (0..rank).map(|j| eig.vector(j)).collect() }
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    /// `Σ_j λ_j |e_j⟩⟨e_j|`.
    pub fn density(&self) -> DensityMatrix {
        let n = self.vectors[0].len();
        let mut m = CMatrix::zeros(n, n);
        for (l, v) in self.values.iter().zip(&self.vectors) {
            m = &m + &CMatrix::projector(v).scale(*l);
        }
        DensityMatrix::from_parts(self.dims.clone(), m.hermitized())
    }

    /// `√λ_j |e_j⟩` for every j.
    pub(crate) fn weighted_vectors(&self) -> Vec<CVector> {
        self.values.iter().zip(&self.vectors).map(|(l, v)| v * c64(l.sqrt(), 0.0)).collect()
    }
}

/// Unnormalized HJW members `Σ_j U_ij √λ_j |e_j⟩`, one per isometry row.
pub(crate) fn hjw_vectors(sys: &Eigensystem, u: &CMatrix) -> Vec<CVector> {
    let basis = sys.weighted_vectors();
    let n = basis[0].len();
    (0..u.rows())
        .map(|i| {
            let mut v = CVector::zeros(n);
            for (j, b) in basis.iter().enumerate() {
                let uij: Complex64 = u.get(i, j);
                if uij != c64(0.0, 0.0) {
                    v.axpy(uij, b, c64(1.0, 0.0));
                }
            }
            v
        })
        .collect()
}

/// The decomposition of `Σ_j λ_j |e_j⟩⟨e_j|` induced by an isometry.
///
/// `|ψ_i⟩ = p_i^{-1/2} Σ_j U_ij √λ_j |e_j⟩` with `p_i = Σ_j |U_ij|² λ_j`.
/// Members with `p_i < ptol` are dropped and the remaining weights renormalized.
pub fn hjw_from_eigensystem(sys: &Eigensystem, u: &Isometry, ptol: f64) -> Result<Ensemble> {
    if u.cols() != sys.rank() {
        return Err(Error::Shape(format!("isometry has {} columns but the state has rank {}", u.cols(), sys.rank())));
    }
    let mut members = Vec::new();
    for v in hjw_vectors(sys, u.matrix()) {
        let p = v.norm_squared();
        if p > 0.0 && p >= ptol {
            members.push((p, PureState::from_parts(sys.dims.clone(), v.unscale(p.sqrt()))));
        }
    }
    let total: f64 = members.iter().map(|(p, _)| p).sum();
    if members.is_empty() || total <= 0.0 {
        return Err(Error::Argument("every ensemble member fell below the pruning threshold".into()));
    }
    Ok(Ensemble { members: members.into_iter().map(|(p, s)| (p / total, s)).collect() })
}

/// HJW ensemble of `rho` from its eigendecomposition and an `m × rank` isometry.
pub fn hjw_ensemble(rho: &DensityMatrix, u: &Isometry, ptol: f64) -> Result<Ensemble> {
    hjw_from_eigensystem(&Eigensystem::of(rho), u, ptol)
}

/// `Σ_i p_i |ψ_i⟩⟨ψ_i|`.
pub fn mix(e: &Ensemble) -> DensityMatrix {
    let n = e.members[0].1.vector().len();
    let mut h = nalgebra::DMatrix::<Complex64>::zeros(n, n);
    for (p, s) in &e.members {
        let v = s.vector();
        h += v * v.adjoint() * c64(*p, 0.0);
    }
    DensityMatrix::from_parts(e.dims().to_vec(), CMatrix::from_inner(h).hermitized())
}

/// `Σ_i w_i ρ_i ⊗ |i⟩⟨i|` with an appended classical register of dimension `len(weights)`.
pub fn flagged_state(weights: &[f64], states: &[DensityMatrix]) -> Result<DensityMatrix> {
    if weights.len() != states.len() || states.is_empty() {
        return Err(Error::Argument("flagged state needs one weight per state".into()));
    }
    qstate::shannon_entropy(weights)?;
    let dims = states[0].dims().to_vec();
    if states.iter().any(|s| s.dims() != dims.as_slice()) {
        return Err(Error::Argument("flagged states must share dims".into()));
    }
    let k = states.len();
    let d = states[0].dim();
    let mut m = CMatrix::zeros(d * k, d * k);
    for (i, (w, s)) in weights.iter().zip(states).enumerate() {
        for a in 0..d {
            for b in 0..d {
                // index of |a⟩ ⊗ |i⟩ is a·k + i
                m.set(a * k + i, b * k + i, s.matrix().get(a, b) * w.max(0.0));
            }
        }
    }
    let mut out_dims = dims;
    out_dims.push(k);
    Ok(DensityMatrix::from_parts(out_dims, m))
}
