//! Checks on EoF estimates of factors and their products.

use rand::Rng;

use super::report::{CheckReport, ReportBuilder, Semantics, Tier};
use super::{factor_eof_with_ensemble, row, run_samples};
use crate::ensembles::{Eigensystem, RANK_TOL};
use crate::eof::{eof_minimize, eof_minimize_from, eof_pure, eof_wootters_2q, isometry_for, CutEntropy, EofOptions};
use crate::error::{Error, Result};
use crate::optimize::minimize_over_decompositions;
use crate::qmat::CVector;
use crate::qstate::{reduced_state, tensor, Cut, DensityMatrix, PureState};
use crate::statezoo::{random_density_with, random_pure_with, stream_rng, werner_state};

const WERNER_PHIS: [f64; 4] = [-1.0, -0.5, -0.2, 0.0];

/// `eof_minimize` against the two-qubit closed form. The first four samples
/// are Werner states with `φ ∈ {−1, −0.5, −0.2, 0}`, the rest random states
/// of rank 2 to 4.
pub fn check_wootters_agreement(samples: usize, seed: u64, opts: &EofOptions, tol: f64) -> Result<CheckReport> {
    let rows = run_samples(samples, |i| {
        let (rho, desc) = match WERNER_PHIS.get(i) {
            Some(&phi) => (werner_state(2, phi)?, format!("werner phi={phi}")),
            None => {
                let mut rng = stream_rng(seed, i as u64);
                let rank = rng.random_range(2..=4);
                (random_density_with(&mut rng, vec![2, 2], rank)?, format!("random rank={rank}"))
            }
        };
        let est = eof_minimize(&rho, &Cut::new([0]), opts)?;
        let exact = eof_wootters_2q(&rho)?;
        Ok(vec![row("wootters-agreement", i, format!("{desc} closed-form={exact:.9}"), est.value - exact)])
    })?;
    let mut b = ReportBuilder::new("wootters-agreement", seed).relation(
        "wootters-agreement",
        Semantics::Identity,
        Tier::Optimizer,
        tol,
    );
    b.extend(rows);
    Ok(b.finish())
}

const PURE_DIMS: [&[usize]; 4] = [&[2, 2], &[2, 3], &[3, 3], &[2, 2, 2]];

/// `eof_minimize` on pure states against the entropy of entanglement.
pub fn check_pure_eof(samples: usize, seed: u64, opts: &EofOptions, tol: f64) -> Result<CheckReport> {
    let rows = run_samples(samples, |i| {
        let dims = PURE_DIMS[i % PURE_DIMS.len()];
        let psi = random_pure_with(&mut stream_rng(seed, i as u64), dims.to_vec())?;
        let cut = Cut::new([0]);
        let est = eof_minimize(&psi.to_density(), &cut, opts)?;
        Ok(vec![row("pure-eof", i, format!("dims={dims:?}"), est.value - eof_pure(&psi, &cut)?)])
    })?;
    let mut b = ReportBuilder::new("pure-eof", seed).relation("pure-eof", Semantics::Identity, Tier::Exact, tol);
    b.extend(rows);
    Ok(b.finish())
}

/// `E_f(ρ ⊗ σ) <= E_f(ρ) + E_f(σ)` on random rank-2 two-qubit pairs, with the
/// right side from the closed form and the left minimized across `AA'|BB'`
/// from random starts and from the product of the factors' best
/// decompositions.
pub fn check_weak_additivity(samples: usize, seed: u64, opts: &EofOptions, slack: f64) -> Result<CheckReport> {
    let rows = run_samples(samples, |i| {
        let mut rng = stream_rng(seed, i as u64);
        let a = random_density_with(&mut rng, vec![2, 2], 2)?;
        let b = random_density_with(&mut rng, vec![2, 2], 2)?;
        let cut = Cut::new([0]);
        let (ea, eb) = (eof_minimize(&a, &cut, opts)?, eof_minimize(&b, &cut, opts)?);
        let sum = eof_wootters_2q(&a)? + eof_wootters_2q(&b)?;
        let warm = ea.best_ensemble.product(&eb.best_ensemble)?;
        let est = eof_minimize_from(&tensor(&a, &b)?, &Cut::new([0, 2]), opts, &[warm])?;
        Ok(vec![row("weak-additivity", i, format!("product={:.9} sum={sum:.9}", est.value), sum - est.value)])
    })?;
    let mut b = ReportBuilder::new("weak-additivity", seed).relation(
        "weak-additivity",
        Semantics::Inequality,
        Tier::Optimizer,
        slack,
    );
    b.extend(rows);
    Ok(b.finish())
}

/// EoF of a member reduction: zero with a one-dimensional side, the
/// entanglement entropy when pure, the closed form on two qubits.
fn small_eof(rho: &DensityMatrix) -> f64 {
    if rho.dims().contains(&1) {
        return 0.0;
    }
    let eig = rho.eig();
    if eig.values[1] <= RANK_TOL {
        let psi = PureState::from_parts(rho.dims().to_vec(), eig.vector(0));
        return eof_pure(&psi, &Cut::new([0])).unwrap_or(f64::NAN);
    }
    eof_wootters_2q(rho).unwrap_or(f64::NAN)
}

type MemberCost<'a> = Box<dyn Fn(&CVector) -> f64 + Sync + 'a>;

const CHAIN: [&str; 4] = ["local-entropies", "entropy-eof", "eof-entropy", "eof-eof"];

/// Minimizes, over decompositions of `a ⊗ b`, the member averages of
/// `S(A)+S(A')`, `S(A)+E_f(A'B')`, `E_f(AB)+S(A')` and `E_f(AB)+E_f(A'B')`,
/// and compares each with `E_f(a) + E_f(b)`. A `spread` row records the
/// largest disagreement among the four.
///
/// Each factor must be bipartite with total dimension at most 4.
pub fn relation_chain_check(
    a: &DensityMatrix,
    b: &DensityMatrix,
    opts: &EofOptions,
    slack: f64,
) -> Result<CheckReport> {
    for f in [a, b] {
        if f.dims().len() != 2 || f.dim() > 4 {
            return Err(Error::Size { dim: f.dim(), max: 4 });
        }
    }
    let (va, ea) = factor_eof_with_ensemble(a, opts)?;
    let (vb, eb) = factor_eof_with_ensemble(b, opts)?;
    let sum = va + vb;
    let product = tensor(a, b)?;
    let dims = product.dims().to_vec();
    let sys = Eigensystem::of(&product);
    let warm = [isometry_for(&sys, &ea.product(&eb)?)?];

    let s_a = CutEntropy::new(&dims, &Cut::new([0]));
    let s_a2 = CutEntropy::new(&dims, &Cut::new([2]));
    let reduce = |x: &CVector, keep: &[usize]| {
        reduced_state(&PureState::from_parts(dims.clone(), x.clone()), keep).map(|r| small_eof(&r)).unwrap_or(f64::NAN)
    };
    let costs: [MemberCost; 4] = [
        Box::new(|x| s_a.entropy(x) + s_a2.entropy(x)),
        Box::new(|x| s_a.entropy(x) + reduce(x, &[2, 3])),
        Box::new(|x| reduce(x, &[0, 1]) + s_a2.entropy(x)),
        Box::new(|x| reduce(x, &[0, 1]) + reduce(x, &[2, 3])),
    ];
    let mut values = [0.0; 4];
    for (v, cost) in values.iter_mut().zip(&costs) {
        *v = minimize_over_decompositions(&sys, cost, opts, &warm)?.value;
    }

    let mut builder = ReportBuilder::new("relation-chain", opts.seed);
    for name in CHAIN {
        builder = builder.relation(name, Semantics::Identity, Tier::Optimizer, slack);
    }
    builder = builder.relation("spread", Semantics::Identity, Tier::Optimizer, slack);
    for (name, v) in CHAIN.iter().zip(values) {
        builder.record(name, 0, format!("estimate={v:.9} factor-sum={sum:.9}"), v - sum);
    }
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    builder.record("spread", 0, format!("max={hi:.9} min={lo:.9}"), hi - lo);
    Ok(builder.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statezoo::random_pure;

    fn quick() -> EofOptions {
        EofOptions { restarts: 3, ..EofOptions::default() }
    }

    #[test]
    fn pure_factors_give_a_flat_chain() {
        let a = random_pure(vec![2, 2], 1).unwrap().to_density();
        let b = random_pure(vec![2, 2], 2).unwrap().to_density();
        let r = relation_chain_check(&a, &b, &quick(), 1e-9).unwrap();
        assert!(r.passed, "{:?}", r.per_sample);
    }

    #[test]
    fn separable_factors_give_zero() {
        let a = DensityMatrix::from_diagonal(vec![2, 2], &[0.5, 0.0, 0.0, 0.5]).unwrap();
        let b = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        let r = relation_chain_check(&a, &b, &quick(), 5e-2).unwrap();
        assert!(r.passed, "{:?}", r.per_sample);
    }

    #[test]
    fn oversized_factors_are_rejected() {
        let a = DensityMatrix::maximally_mixed(vec![2, 3]).unwrap();
        assert!(matches!(relation_chain_check(&a, &a, &quick(), 5e-2), Err(Error::Size { .. })));
    }

    #[test]
    fn small_suites_pass() {
        assert!(check_pure_eof(4, 0, &quick(), 1e-9).unwrap().passed);
        assert!(check_wootters_agreement(5, 0, &EofOptions::default(), 1e-3).unwrap().passed);
    }
}
