//! Verification suites and counterexample searches.
//!
//! Every gap is oriented so that `gap >= 0` means the relation holds.
//! Identity checks are judged on `|gap|`. Relations built only from entropies
//! use the exact tier (`1e-9`); relations involving a numerically minimized
//! EoF use an optimizer slack. Numerical EoF values are upper bounds, so a
//! probe that reports no violation has found no counterexample and nothing
//! more.
//!
//! Samples run in parallel; sample `k` draws from stream `(seed, k)`, so
//! reports are identical across runs and thread schedules.

mod additivity;
mod cases;
mod inequalities;
mod questions;
mod report;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use additivity::{check_pure_eof, check_weak_additivity, check_wootters_agreement, relation_chain_check};
pub use cases::{case1_suite, case1_terms, case2_suite, check_case1, check_case2, Case1Terms, Case2Params};
pub use inequalities::{check_flagged_identity, check_hjw_roundtrip, check_ssa, check_strong_concavity, ssa_gap};
pub use questions::{
    member_terms, probe_question1, probe_question2, superadditivity_gap, superadditivity_probe, FactorFile,
    Implication, MemberTerms, ProbeInstance, ProbeParams, ProbeResult, QuestionInput, SuperSource,
    SUPERADDITIVITY_CAVEAT,
};
pub use report::{CheckReport, Component, SampleGap, Semantics, Tier, EXACT_TOL};

use crate::ensembles::{Ensemble, RANK_TOL};
use crate::eof::{eof_minimize, eof_pure, eof_wootters_2q, EnsembleSize, EofOptions};
use crate::error::{Error, Result};
use crate::qstate::{Cut, DensityMatrix, PureState};

/// Parameters of a sampled suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteParams {
    pub samples: usize,
    /// Dimensions the suite draws from (their meaning is per suite).
    pub dims: Vec<usize>,
    pub seed: u64,
    pub tol: f64,
}

impl SuiteParams {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::Argument(format!(
                "dims must be a non-empty list of positive sizes, got {:?}",
                self.dims
            )));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::Argument(format!("tolerance {} must be non-negative", self.tol)));
        }
        Ok(())
    }
}

pub(crate) fn row(component: &str, index: usize, descriptor: String, gap: f64) -> SampleGap {
    SampleGap { component: component.into(), index, descriptor, gap }
}

/// Evaluates samples in parallel and concatenates their rows in sample order.
pub(crate) fn run_samples<F>(samples: usize, f: F) -> Result<Vec<SampleGap>>
where
    F: Fn(usize) -> Result<Vec<SampleGap>> + Sync,
{
    let per: Vec<Vec<SampleGap>> = (0..samples).into_par_iter().map(&f).collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// EoF of a bipartite state by the best available method, with a decomposition
/// achieving it when one is at hand.
///
/// Zero when a side is one-dimensional, the entropy of entanglement for pure
/// states, the closed form for two qubits, and [`eof_minimize`] otherwise.
pub(crate) fn factor_eof(rho: &DensityMatrix, opts: &EofOptions) -> Result<(f64, Option<Ensemble>)> {
    let dims = rho.dims();
    if dims.len() != 2 {
        return Err(Error::Shape(format!("expected a bipartite state, got dims {dims:?}")));
    }
    if dims.contains(&1) {
        return Ok((0.0, None));
    }
    let cut = Cut::new([0]);
    if rho.rank(RANK_TOL) == 1 {
        let psi = PureState::from_parts(dims.to_vec(), rho.eig().vector(0));
        let value = eof_pure(&psi, &cut)?;
        return Ok((value, Some(Ensemble::from_parts(vec![(1.0, psi)]))));
    }
    if dims == [2, 2] {
        return Ok((eof_wootters_2q(rho)?, None));
    }
    let est = eof_minimize(rho, &cut, opts)?;
    Ok((est.value, Some(est.best_ensemble)))
}

/// [`factor_eof`] with a decomposition always attached. When the closed form
/// gives the value, the decomposition is minimized with as many members as
/// the rank, which suffices on two qubits and keeps products of such
/// decompositions small.
pub(crate) fn factor_eof_with_ensemble(rho: &DensityMatrix, opts: &EofOptions) -> Result<(f64, Ensemble)> {
    let (value, ens) = factor_eof(rho, opts)?;
    match ens {
        Some(e) => Ok((value, e)),
        None if rho.dims().contains(&1) => Ok((value, Ensemble::eigen(rho))),
        None => {
            let rank = rho.rank(RANK_TOL);
            let opts = EofOptions { ensemble_size: EnsembleSize::Fixed(rank), ..opts.clone() };
            Ok((value, eof_minimize(rho, &Cut::new([0]), &opts)?.best_ensemble))
        }
    }
}
