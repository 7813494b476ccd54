//! Entanglement-of-formation estimators.
//!
//! * [`eof_pure`]: entropy of entanglement of a pure state.
//! * [`eof_wootters_2q`]: closed form for two qubits via the concurrence.
//! * [`eof_minimize`]: numerical minimum of the average member entanglement
//!   over HJW decompositions. Every value it returns is achieved by the
//!   reported ensemble, so it is an upper bound on the true EoF.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::{hjw_from_eigensystem, Eigensystem, Ensemble, Isometry, RANK_TOL};
use crate::error::{Error, Result};
use crate::optimize::{minimize_over_decompositions, RestartTrace};
use crate::qmat::{self, c64, CMatrix, CVector};
use crate::qstate::{self, Cut, DensityMatrix, PureState};

pub use crate::optimize::{EnsembleSize, EofOptions};

/// Outcome of [`eof_minimize`].
#[derive(Clone, Debug)]
pub struct EofEstimate {
    /// Bits.
    pub value: f64,
    pub best_ensemble: Ensemble,
    pub converged: bool,
    pub restarts_used: usize,
    /// Iterations of the restart that produced `value`.
    pub iterations: usize,
    pub traces: Vec<RestartTrace>,
}

/// EoF of a pure state: the entropy of its reduction to the left block.
pub fn eof_pure(psi: &PureState, cut: &Cut) -> Result<f64> {
    cut.validate(psi.dims().len())?;
    Ok(qstate::von_neumann_entropy(&qstate::reduced_state(psi, cut.left())?))
}

/// `Σ_i p_i S(Tr_right |ψ_i⟩⟨ψ_i|)` for the given ensemble, without minimizing.
pub fn ensemble_average_entanglement(e: &Ensemble, cut: &Cut) -> Result<f64> {
    cut.validate(e.dims().len())?;
    let ent = CutEntropy::new(e.dims(), cut);
    Ok(e.members().iter().map(|(p, s)| p * ent.entropy(s.vector())).sum())
}

/// Entropy of entanglement across a fixed cut for raw state vectors.
///
/// Builds the amplitude matrix through a precomputed index map and
/// diagonalizes whichever Gram matrix is smaller.
#[derive(Clone, Debug)]
pub(crate) struct CutEntropy {
    rows: Vec<usize>,
    cols: Vec<usize>,
    dl: usize,
    dr: usize,
}

impl CutEntropy {
    pub(crate) fn new(dims: &[usize], cut: &Cut) -> Self {
        let n: usize = dims.iter().product();
        let probe = CVector::from_iterator(n, (0..n).map(|i| c64(i as f64, 0.0)));
        let m = qstate::amplitude_matrix(&probe, dims, cut.left());
        let (dl, dr) = (m.nrows(), m.ncols());
        let (mut rows, mut cols) = (vec![0; n], vec![0; n]);
        for a in 0..dl {
            for b in 0..dr {
                let i = m[(a, b)].re as usize;
                rows[i] = a;
                cols[i] = b;
            }
        }
        Self { rows, cols, dl, dr }
    }

    /// Entropy of the normalized reduction of `x` (any nonzero norm).
    pub(crate) fn entropy(&self, x: &CVector) -> f64 {
        let mut m = DMatrix::<Complex64>::zeros(self.dl, self.dr);
        for (i, z) in x.iter().enumerate() {
            m[(self.rows[i], self.cols[i])] = *z;
        }
        let gram = if self.dl <= self.dr { &m * m.adjoint() } else { m.adjoint() * &m };
        let tr = gram.trace().re;
        if tr <= 0.0 {
            return 0.0;
        }
        qstate::entropy_of_spectrum(gram.symmetric_eigen().eigenvalues.iter().map(|l| l / tr))
    }
}

/// `h₂(x) = −x log₂ x − (1−x) log₂(1−x)`.
pub fn binary_entropy(x: f64) -> f64 {
    [x, 1.0 - x].iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// Two-qubit concurrence `max(0, √μ₁ − √μ₂ − √μ₃ − √μ₄)`, with `μ` the
/// spectrum of `ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn concurrence_2q(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims() != [2, 2] {
        return Err(Error::Shape(format!("concurrence needs dims [2, 2], got {:?}", rho.dims())));
    }
    let yy = qmat::kron(&pauli_y(), &pauli_y())?;
    let conj = CMatrix::from_inner(rho.matrix().inner().map(|z| z.conj()));
    let flipped = &(&yy * &conj) * &yy;
    // Same spectrum as ρρ̃, but Hermitian: √ρ ρ̃ √ρ.
    let eig = rho.eig();
    let sqrt_vals: Vec<f64> = eig.values.iter().map(|l| l.max(0.0).sqrt()).collect();
    let sqrt_rho = qmat::HermEig { values: sqrt_vals, vectors: eig.vectors.clone() }.reconstruct();
    let r = &(&sqrt_rho * &flipped) * &sqrt_rho;
    let mu = qmat::herm_eig(&r.hermitized(), qmat::HERM_TOL)?.values;
    let s: Vec<f64> = mu.iter().map(|x| x.max(0.0).sqrt()).collect();
    Ok((s[0] - s[1] - s[2] - s[3]).max(0.0))
}

fn pauli_y() -> CMatrix {
    CMatrix::new(2, 2, vec![c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)]).expect("2x2")
}

/// Closed-form two-qubit EoF `h₂((1 + √(1 − C²))/2)`.
pub fn eof_wootters_2q(rho: &DensityMatrix) -> Result<f64> {
    let c = concurrence_2q(rho)?;
    if c <= 0.0 {
        return Ok(0.0);
    }
    Ok(binary_entropy((1.0 + (1.0 - c * c).max(0.0).sqrt()) / 2.0))
}

/// Numerical EoF across `cut`.
pub fn eof_minimize(rho: &DensityMatrix, cut: &Cut, opts: &EofOptions) -> Result<EofEstimate> {
    eof_minimize_from(rho, cut, opts, &[])
}

/// [`eof_minimize`] with extra starting decompositions, each an ensemble of `rho`.
///
/// The result is never worse than any supplied ensemble (up to roundoff).
pub fn eof_minimize_from(rho: &DensityMatrix, cut: &Cut, opts: &EofOptions, warm: &[Ensemble]) -> Result<EofEstimate> {
    cut.validate(rho.dims().len())?;
    let sys = Eigensystem::of(rho);
    let starts = warm.iter().map(|e| isometry_for(&sys, e)).collect::<Result<Vec<_>>>()?;
    let ent = CutEntropy::new(rho.dims(), cut);
    let min = minimize_over_decompositions(&sys, |x| ent.entropy(x), opts, &starts)?;
    let best_ensemble = if sys.rank() == 1 {
        Ensemble::from_parts(vec![(1.0, PureState::from_parts(rho.dims().to_vec(), sys.vectors[0].clone()))])
    } else {
        hjw_from_eigensystem(&sys, &Isometry::from_parts(min.isometry.clone()), 0.0)?
    };
    Ok(EofEstimate {
        value: min.value.max(0.0),
        best_ensemble,
        converged: min.converged,
        restarts_used: min.restarts_used,
        iterations: min.iterations,
        traces: min.traces,
    })
}

/// Isometry reproducing `e` from the eigen-data: `U_ij = √p_i ⟨e_j|ψ_i⟩ / √λ_j`.
pub(crate) fn isometry_for(sys: &Eigensystem, e: &Ensemble) -> Result<CMatrix> {
    if e.dims() != sys.dims.as_slice() {
        return Err(Error::Shape("warm-start ensemble dims differ from the state".into()));
    }
    let r = sys.rank();
    if e.len() < r {
        return Err(Error::Argument(format!("an ensemble of {} members cannot realize a rank-{r} state", e.len())));
    }
    let u = CMatrix::from_fn(e.len(), r, |i, j| {
        let (p, psi) = &e.members()[i];
        let overlap: Complex64 = sys.vectors[j].dotc(psi.vector());
        overlap * (p.sqrt() / sys.values[j].sqrt())
    });
    let defect = u.isometry_defect();
    if defect > 1e-6 {
        return Err(Error::Argument(format!(
            "warm-start ensemble does not decompose the state (isometry defect {defect:e})"
        )));
    }
    Ok(u)
}

/// Rank as used by the estimators.
pub fn support_rank(rho: &DensityMatrix) -> usize {
    rho.rank(RANK_TOL)
}

/// Serializable summary of an [`EofEstimate`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EofSummary {
    pub value: f64,
    pub converged: bool,
    pub restarts_used: usize,
    pub iterations: usize,
    pub traces: Vec<RestartTrace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<Vec<crate::io::EnsembleMember>>,
}

impl EofEstimate {
    pub fn summary(&self, include_ensemble: bool) -> EofSummary {
        EofSummary {
            value: self.value,
            converged: self.converged,
            restarts_used: self.restarts_used,
            iterations: self.iterations,
            traces: self.traces.clone(),
            ensemble: include_ensemble.then(|| crate::io::ensemble_to_file(&self.best_ensemble)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::mix;
    use crate::statezoo::{random_density, random_pure, werner_state};

    fn bell() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(vec![2, 2], CVector::from_vec(vec![c64(h, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(h, 0.0)]))
            .unwrap()
    }

    fn quick() -> EofOptions {
        EofOptions { restarts: 4, ..EofOptions::default() }
    }

    #[test]
    fn pure_examples() {
        let cut = Cut::new([0]);
        assert!((eof_pure(&bell(), &cut).unwrap() - 1.0).abs() < 1e-12);
        assert!(eof_pure(&PureState::basis(vec![2, 3], &[1, 2]).unwrap(), &cut).unwrap().abs() < 1e-12);
        let double = bell().tensor(&bell()).unwrap();
        assert!((eof_pure(&double, &Cut::new([0, 2])).unwrap() - 2.0).abs() < 1e-12);
        assert!(eof_pure(&bell(), &Cut::new([0, 1])).is_err());
    }

    #[test]
    fn cut_entropy_matches_reduced_state() {
        for seed in 0..5 {
            let psi = random_pure(vec![2, 3, 2], seed).unwrap();
            for left in [vec![0], vec![1], vec![0, 2], vec![1, 2]] {
                let cut = Cut::new(left);
                let fast = CutEntropy::new(psi.dims(), &cut).entropy(psi.vector());
                assert!((fast - eof_pure(&psi, &cut).unwrap()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn average_entanglement_examples() {
        let cut = Cut::new([0]);
        let e = Ensemble::new(vec![(1.0, bell())]).unwrap();
        assert!((ensemble_average_entanglement(&e, &cut).unwrap() - 1.0).abs() < 1e-12);
        let e = Ensemble::new(vec![
            (0.3, PureState::basis(vec![2, 2], &[0, 1]).unwrap()),
            (0.7, PureState::basis(vec![2, 2], &[1, 1]).unwrap()),
        ])
        .unwrap();
        assert!(ensemble_average_entanglement(&e, &cut).unwrap().abs() < 1e-12);
        let singlet = Ensemble::eigen(&werner_state(2, -1.0).unwrap());
        assert_eq!(singlet.len(), 1);
        assert!((ensemble_average_entanglement(&singlet, &cut).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wootters_examples() {
        assert!((eof_wootters_2q(&bell().to_density()).unwrap() - 1.0).abs() < 1e-9);
        let mixed = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        assert_eq!(eof_wootters_2q(&mixed).unwrap(), 0.0);
        assert_eq!(eof_wootters_2q(&werner_state(2, 1.0 / 3.0).unwrap()).unwrap(), 0.0);
        assert_eq!(eof_wootters_2q(&werner_state(2, 0.0).unwrap()).unwrap(), 0.0);
        assert!(eof_wootters_2q(&DensityMatrix::maximally_mixed(vec![4]).unwrap()).is_err());
    }

    #[test]
    fn wootters_on_pure_states_matches_entropy() {
        for seed in 0..10 {
            let psi = random_pure(vec![2, 2], seed).unwrap();
            let w = eof_wootters_2q(&psi.to_density()).unwrap();
            assert!((w - eof_pure(&psi, &Cut::new([0])).unwrap()).abs() < 1e-7);
        }
    }

    #[test]
    fn minimize_rank_one_is_exact() {
        let psi = random_pure(vec![2, 3], 40).unwrap();
        let est = eof_minimize(&psi.to_density(), &Cut::new([0]), &quick()).unwrap();
        assert!((est.value - eof_pure(&psi, &Cut::new([0])).unwrap()).abs() < 1e-9);
        assert!(est.converged);
    }

    #[test]
    fn minimize_classical_mixture_is_zero() {
        let rho = DensityMatrix::from_diagonal(vec![2, 2], &[0.5, 0.0, 0.0, 0.5]).unwrap();
        let est = eof_minimize(&rho, &Cut::new([0]), &quick()).unwrap();
        assert!(est.value.abs() < 1e-6, "{}", est.value);
    }

    #[test]
    fn minimize_postconditions() {
        let rho = random_density(4, 3, 41).unwrap();
        let rho = DensityMatrix::new(vec![2, 2], rho.matrix().clone()).unwrap();
        let cut = Cut::new([0]);
        let est = eof_minimize(&rho, &cut, &quick()).unwrap();
        let eigen = ensemble_average_entanglement(&Ensemble::eigen(&rho), &cut).unwrap();
        assert!(est.value <= eigen + 1e-9);
        assert!(est.value >= -1e-9);
        let err = (mix(&est.best_ensemble).matrix() - rho.matrix()).frobenius_norm();
        assert!(err < 1e-8, "{err:e} {:?}", est.traces);
        let again = ensemble_average_entanglement(&est.best_ensemble, &cut).unwrap();
        assert!((again - est.value).abs() < 1e-9);
        let marg = qstate::von_neumann_entropy(&qstate::partial_trace(&rho, &[0]).unwrap());
        assert!(est.value <= marg + 1e-6);
    }

    #[test]
    fn minimize_is_deterministic() {
        let rho = DensityMatrix::new(vec![2, 2], random_density(4, 2, 42).unwrap().matrix().clone()).unwrap();
        let a = eof_minimize(&rho, &Cut::new([0]), &quick()).unwrap();
        let b = eof_minimize(&rho, &Cut::new([0]), &quick()).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.traces, b.traces);
    }

    #[test]
    fn minimize_werner_matches_wootters() {
        let rho = werner_state(2, crate::statezoo::werner_phi_from_singlet_weight(0.9)).unwrap();
        let exact = eof_wootters_2q(&rho).unwrap();
        assert!((exact - 0.7893).abs() < 1e-3);
        let est = eof_minimize(&rho, &Cut::new([0]), &EofOptions::default()).unwrap();
        assert!((est.value - exact).abs() < 1e-3, "{} vs {exact}", est.value);
    }

    #[test]
    fn warm_start_bounds_the_result() {
        let rho = DensityMatrix::new(vec![2, 2], random_density(4, 2, 43).unwrap().matrix().clone()).unwrap();
        let cut = Cut::new([0]);
        let u = crate::statezoo::random_isometry(5, 2, 44).unwrap();
        let e = crate::ensembles::hjw_ensemble(&rho, &u, 0.0).unwrap();
        let start = ensemble_average_entanglement(&e, &cut).unwrap();
        let opts = EofOptions { restarts: 1, max_iterations: 3, ..EofOptions::default() };
        let est = eof_minimize_from(&rho, &cut, &opts, &[e]).unwrap();
        assert!(est.value <= start + 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        assert!(eof_minimize(&rho, &Cut::new([0, 1]), &quick()).is_err());
        let opts = EofOptions { ensemble_size: EnsembleSize::Fixed(2), ..quick() };
        assert!(eof_minimize(&rho, &Cut::new([0]), &opts).is_err());
        let opts = EofOptions { restarts: 0, ..quick() };
        assert!(eof_minimize(&rho, &Cut::new([0]), &opts).is_err());
    }
}
