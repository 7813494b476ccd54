//! Generators for the state families used throughout the crate.
//!
//! Random sampling is seeded and reproducible: every generator draws from a
//! ChaCha20 stream (`rand_chacha::ChaCha20Rng`) keyed by `seed`, and derived
//! streams use the ChaCha stream id, so `(seed, stream)` fully determines the
//! output regardless of thread scheduling. Complex Gaussians have independent
//! standard-normal real and imaginary parts (`rand_distr::StandardNormal`).
//!
//! # Werner states
//!
//! [`werner_state`] is parameterized by the swap expectation `φ = Tr(ρF)`:
//!
//! ```text
//! ρ(φ) = ((d − φ)·I + (dφ − 1)·F) / (d(d² − 1)),   φ ∈ [−1, 1]
//! ```
//!
//! For two qubits this is the familiar singlet mixture
//! `p |ψ⁻⟩⟨ψ⁻| + (1 − p) I/4` with `φ = (1 − 3p)/2`; see
//! [`werner_phi_from_singlet_weight`]. The state is separable iff `φ ≥ 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::ensembles::{Eigensystem, Isometry};
use crate::error::{Error, Result};
use crate::qmat::{c64, CMatrix, CVector};
use crate::qstate::{DensityMatrix, PureState, STATE_TOL};

/// Seeded generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn complex_gaussian(rng: &mut impl Rng) -> num_complex::Complex64 {
    c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub(crate) fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    // Fill row-major so the draw order matches the serialized layout.
    let entries = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    CMatrix::new(rows, cols, entries).expect("shape is consistent")
}

/// `G G† / Tr(G G†)` with `G` a `d × rank` complex Gaussian matrix.
pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(&mut stream_rng(seed, 0), vec![d], rank)
}

/// Like [`random_density`] but on an explicit factor structure, drawing from `rng`.
pub fn random_density_with(rng: &mut impl Rng, dims: Vec<usize>, rank: usize) -> Result<DensityMatrix> {
    let d: usize = dims.iter().product();
    if rank == 0 || rank > d {
        return Err(Error::Argument(format!("rank {rank} outside 1..={d}")));
    }
    let g = gaussian_matrix(d, rank, rng);
    let m = &g * &crate::qmat::dagger(&g);
    let tr = m.trace().re;
    Ok(DensityMatrix::from_parts(dims, m.scale(1.0 / tr).hermitized()))
}

/// Normalized complex Gaussian vector.
pub fn random_pure(dims: Vec<usize>, seed: u64) -> Result<PureState> {
    random_pure_with(&mut stream_rng(seed, 0), dims)
}

pub fn random_pure_with(rng: &mut impl Rng, dims: Vec<usize>) -> Result<PureState> {
    let n: usize = dims.iter().product();
    let v = CVector::from_iterator(n, (0..n).map(|_| complex_gaussian(rng)));
    PureState::normalized(dims, v)
}

/// Column orthonormalization (modified Gram-Schmidt, two passes) of a seeded
/// `m × n` complex Gaussian matrix.
pub fn random_isometry(m: usize, n: usize, seed: u64) -> Result<Isometry> {
    random_isometry_with(&mut stream_rng(seed, 0), m, n)
}

pub fn random_isometry_with(rng: &mut impl Rng, m: usize, n: usize) -> Result<Isometry> {
    if n == 0 || m < n {
        return Err(Error::Argument(format!("isometry needs rows >= cols >= 1, got {m}x{n}")));
    }
    let g = gaussian_matrix(m, n, rng);
    Isometry::new(orthonormalize_columns(&g))
}

pub fn random_unitary_with(rng: &mut impl Rng, n: usize) -> Result<CMatrix> {
    Ok(random_isometry_with(rng, n, n)?.matrix().clone())
}

pub(crate) fn orthonormalize_columns(a: &CMatrix) -> CMatrix {
    let mut q = a.inner().clone();
    for _pass in 0..2 {
        for j in 0..q.ncols() {
            for k in 0..j {
                let proj = q.column(k).dotc(&q.column(j));
                let qk = q.column(k).into_owned();
                q.column_mut(j).axpy(-proj, &qk, c64(1.0, 0.0));
            }
            let norm = q.column(j).norm();
            q.column_mut(j).unscale_mut(norm);
        }
    }
    CMatrix::from_inner(q)
}

/// Weights `λ_{αβ}` of `|Ψ⟩ = Σ_{αβ} √λ_{αβ} |α⟩_A |α⟩_B |β⟩_{A'} |β⟩_{B'}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case1Spec {
    lambda: Vec<Vec<f64>>,
}

impl Case1Spec {
    pub fn new(lambda: Vec<Vec<f64>>) -> Result<Self> {
        let cols = lambda.first().map_or(0, Vec::len);
        if lambda.is_empty() || cols == 0 || lambda.iter().any(|r| r.len() != cols) {
            return Err(Error::Argument("lambda must be a non-empty rectangular matrix".into()));
        }
        if lambda.iter().flatten().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::Argument("lambda entries must be non-negative".into()));
        }
        let total: f64 = lambda.iter().flatten().sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::Argument(format!("lambda sums to {total}, not 1")));
        }
        Ok(Self { lambda })
    }

    /// Random weights on a `rows × cols` grid (normalized uniform draws).
    pub fn random(rows: usize, cols: usize, seed: u64) -> Result<Self> {
        Self::random_with(&mut stream_rng(seed, 0), rows, cols)
    }

    pub fn random_with(rng: &mut impl Rng, rows: usize, cols: usize) -> Result<Self> {
        let raw: Vec<Vec<f64>> = (0..rows).map(|_| (0..cols).map(|_| rng.random::<f64>()).collect()).collect();
        let total: f64 = raw.iter().flatten().sum();
        Self::new(raw.into_iter().map(|r| r.into_iter().map(|x| x / total).collect()).collect())
    }

    pub fn lambda(&self) -> &[Vec<f64>] {
        &self.lambda
    }

    /// Number of α values (`d_A = d_B`).
    pub fn rows(&self) -> usize {
        self.lambda.len()
    }

    /// Number of β values (`d_A' = d_B'`).
    pub fn cols(&self) -> usize {
        self.lambda[0].len()
    }

    /// `λ_α = Σ_β λ_{αβ}`.
    pub fn row_marginals(&self) -> Vec<f64> {
        self.lambda.iter().map(|r| r.iter().sum()).collect()
    }

    /// `λ_β = Σ_α λ_{αβ}`.
    pub fn col_marginals(&self) -> Vec<f64> {
        (0..self.cols()).map(|b| self.lambda.iter().map(|r| r[b]).sum()).collect()
    }
}

/// Four-party state on dims `(d_A, d_B, d_A', d_B')`.
pub fn case1_state(spec: &Case1Spec) -> Result<PureState> {
    let (r, c) = (spec.rows(), spec.cols());
    let dims = vec![r, r, c, c];
    let mut v = CVector::zeros(r * r * c * c);
    for (a, row) in spec.lambda.iter().enumerate() {
        for (b, &l) in row.iter().enumerate() {
            let idx = ((a * r + a) * c + b) * c + b;
            v[idx] = c64(l.sqrt(), 0.0);
        }
    }
    PureState::normalized(dims, v)
}

/// One block of a case-II factor: a pure state supported on `a_support × b_support`.
#[derive(Clone, Debug, PartialEq)]
pub struct Case2Block {
    pub weight: f64,
    pub state: PureState,
    pub a_support: Vec<usize>,
    pub b_support: Vec<usize>,
}

/// Block-diagonal bipartite state whose blocks have pairwise disjoint local supports.
#[derive(Clone, Debug, PartialEq)]
pub struct Case2Spec {
    blocks: Vec<Case2Block>,
}

/// Amplitudes outside a block's declared support must vanish to this tolerance.
const SUPPORT_TOL: f64 = 1e-12;

impl Case2Spec {
    pub fn new(blocks: Vec<Case2Block>) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return Err(Error::Argument("case-II spec needs at least one block".into()));
        };
        let dims = first.state.dims().to_vec();
        if dims.len() != 2 {
            return Err(Error::Argument("case-II blocks must be bipartite".into()));
        }
        let total: f64 = blocks.iter().map(|b| b.weight).sum();
        if blocks.iter().any(|b| b.weight < 0.0) || (total - 1.0).abs() > STATE_TOL {
            return Err(Error::Argument(format!("block weights must be non-negative and sum to 1 (got {total})")));
        }
        let (mut used_a, mut used_b) = (vec![false; dims[0]], vec![false; dims[1]]);
        for (k, b) in blocks.iter().enumerate() {
            if b.state.dims() != dims.as_slice() {
                return Err(Error::Argument("case-II blocks must share dims".into()));
            }
            for (side, support, used) in [("A", &b.a_support, &mut used_a), ("B", &b.b_support, &mut used_b)] {
                for &i in support {
                    if i >= used.len() {
                        return Err(Error::Constraint(format!("block {k}: {side} index {i} out of range")));
                    }
                    if std::mem::replace(&mut used[i], true) {
                        return Err(Error::Constraint(format!(
                            "block {k}: {side}-side support overlaps another block at index {i}"
                        )));
                    }
                }
            }
            let v = b.state.vector();
            for i in 0..dims[0] {
                for j in 0..dims[1] {
                    let inside = b.a_support.contains(&i) && b.b_support.contains(&j);
                    if !inside && v[i * dims[1] + j].norm() > SUPPORT_TOL {
                        return Err(Error::Constraint(format!(
                            "block {k} has amplitude outside its declared support at ({i},{j})"
                        )));
                    }
                }
            }
        }
        Ok(Self { blocks })
    }

    /// `λ|00⟩⟨00| + (1−λ)·½(|11⟩+|22⟩)(⟨11|+⟨22|)` on 3⊗3.
    pub fn qutrit_example(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Argument(format!("weight {lambda} outside [0,1]")));
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut bell = CVector::zeros(9);
        bell[4] = c64(s, 0.0);
        bell[8] = c64(s, 0.0);
        Self::new(vec![
            Case2Block {
                weight: lambda,
                state: PureState::basis(vec![3, 3], &[0, 0])?,
                a_support: vec![0],
                b_support: vec![0],
            },
            Case2Block {
                weight: 1.0 - lambda,
                state: PureState::new(vec![3, 3], bell)?,
                a_support: vec![1, 2],
                b_support: vec![1, 2],
            },
        ])
    }

    /// `λ|00⟩⟨00| + (1−λ)|11⟩⟨11|` on 2⊗2.
    pub fn classical_qubits(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Argument(format!("weight {lambda} outside [0,1]")));
        }
        Self::new(vec![
            Case2Block {
                weight: lambda,
                state: PureState::basis(vec![2, 2], &[0, 0])?,
                a_support: vec![0],
                b_support: vec![0],
            },
            Case2Block {
                weight: 1.0 - lambda,
                state: PureState::basis(vec![2, 2], &[1, 1])?,
                a_support: vec![1],
                b_support: vec![1],
            },
        ])
    }

    /// A single pure block `cos θ |00⟩ + sin θ |11⟩` on 2⊗2.
    pub fn pure_qubits(theta: f64) -> Result<Self> {
        let v = CVector::from_vec(vec![c64(theta.cos(), 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(theta.sin(), 0.0)]);
        Self::new(vec![Case2Block {
            weight: 1.0,
            state: PureState::new(vec![2, 2], v)?,
            a_support: vec![0, 1],
            b_support: vec![0, 1],
        }])
    }

    pub fn blocks(&self) -> &[Case2Block] {
        &self.blocks
    }

    pub fn dims(&self) -> &[usize] {
        self.blocks[0].state.dims()
    }

    /// The blocks as an eigen-decomposition (positive weights only).
    pub fn eigensystem(&self) -> Eigensystem {
        let live: Vec<&Case2Block> = self.blocks.iter().filter(|b| b.weight > crate::ensembles::RANK_TOL).collect();
        Eigensystem {
            dims: self.dims().to_vec(),
            values: live.iter().map(|b| b.weight).collect(),
            vectors: live.iter().map(|b| b.state.vector().clone()).collect(),
        }
    }
}

/// `Σ_J w_J |J⟩⟨J|` over the blocks of `spec`.
pub fn case2_factor(spec: &Case2Spec) -> Result<DensityMatrix> {
    Ok(spec.eigensystem().density())
}

/// Swap operator `F|ij⟩ = |ji⟩` on `d ⊗ d`.
pub fn swap_operator(d: usize) -> CMatrix {
    CMatrix::from_fn(d * d, d * d, |r, c| {
        let (i, j) = (c / d, c % d);
        if r == j * d + i {
            c64(1.0, 0.0)
        } else {
            c64(0.0, 0.0)
        }
    })
}

/// `U⊗U`-invariant state on `d ⊗ d` with `Tr(ρF) = φ`.
pub fn werner_state(d: usize, phi: f64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::Argument(format!("Werner states need d >= 2, got {d}")));
    }
    if !(-1.0..=1.0).contains(&phi) {
        return Err(Error::Argument(format!("flip expectation {phi} outside [-1, 1]")));
    }
    let df = d as f64;
    let norm = df * (df * df - 1.0);
    let id = CMatrix::identity(d * d).scale((df - phi) / norm);
    let f = swap_operator(d).scale((df * phi - 1.0) / norm);
    Ok(DensityMatrix::from_parts(vec![d, d], &id + &f))
}

/// Two-qubit map from singlet weight `p` to flip expectation `φ = (1 − 3p)/2`.
pub fn werner_phi_from_singlet_weight(p: f64) -> f64 {
    (1.0 - 3.0 * p) / 2.0
}

/// The `d = 4` Werner state on `AA'|BB'`, returned on subsystem order `(A, B, A', B')`.
///
/// Its `AB` and `A'B'` reductions are two-qubit Werner states.
pub fn werner_four_qubit(phi: f64) -> Result<DensityMatrix> {
    let w = werner_state(4, phi)?;
    // (AA')(BB') -> A, A', B, B' -> A, B, A', B'
    DensityMatrix::from_parts(vec![2, 2, 2, 2], w.matrix().clone()).permute_subsystems(&[0, 2, 1, 3])
}
