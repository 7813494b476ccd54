//! Sampled checks of the entropy relations the additivity arguments rest on.

use rand::Rng;
use rand_distr::Exp1;

use super::report::{CheckReport, ReportBuilder, Semantics, Tier};
use super::{run_samples, SuiteParams};
use crate::ensembles::{flagged_state, hjw_ensemble, mix};
use crate::error::{Error, Result};
use crate::qmat::CMatrix;
use crate::qstate::{self, partial_trace, shannon_entropy, von_neumann_entropy, DensityMatrix};
use crate::statezoo::{random_density_with, random_isometry_with, random_pure_with, stream_rng};

/// Random probability vector of length `k` (normalized exponential draws).
pub(crate) fn random_weights(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

fn pick(rng: &mut impl Rng, dims: &[usize]) -> usize {
    dims[rng.random_range(0..dims.len())]
}

fn random_mixed(rng: &mut impl Rng, d: usize) -> Result<DensityMatrix> {
    let rank = rng.random_range(1..=d);
    random_density_with(rng, vec![d], rank)
}

/// `Σ_i w_i m_i`.
pub(crate) fn mixture<'a>(weights: &[f64], mats: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    let mut it = weights.iter().zip(mats);
    let (w0, m0) = it.next().expect("non-empty mixture");
    it.fold(m0.scale(*w0), |acc, (w, m)| &acc + &m.scale(*w))
}

pub(crate) fn entropy(m: &CMatrix) -> f64 {
    qstate::matrix_entropy(m.hermitized().inner())
}

fn avg_entropy(weights: &[f64], states: &[DensityMatrix]) -> f64 {
    weights.iter().zip(states).map(|(p, s)| p * von_neumann_entropy(s)).sum()
}

/// `S(Σ p_i ρ_i ⊗ |i⟩⟨i|) = H(p) + Σ p_i S(ρ_i)` on random ensembles of
/// 2–4 members whose dimension is drawn from `params.dims`.
pub fn check_flagged_identity(params: &SuiteParams) -> Result<CheckReport> {
    params.validate()?;
    let rows = run_samples(params.samples, |i| {
        let mut rng = stream_rng(params.seed, i as u64);
        let k = rng.random_range(2..=4);
        let d = pick(&mut rng, &params.dims);
        let states = (0..k).map(|_| random_mixed(&mut rng, d)).collect::<Result<Vec<_>>>()?;
        let p = random_weights(&mut rng, k);
        let lhs = von_neumann_entropy(&flagged_state(&p, &states)?);
        let rhs = shannon_entropy(&p)? + avg_entropy(&p, &states);
        Ok(vec![super::row("flagged-identity", i, format!("members={k} dim={d}"), lhs - rhs)])
    })?;
    let mut b = ReportBuilder::new("flagged-identity", params.seed).relation(
        "flagged-identity",
        Semantics::Identity,
        Tier::Exact,
        params.tol,
    );
    b.extend(rows);
    Ok(b.finish())
}

/// Strong concavity in both orientations, ordinary concavity, the bound
/// `H(p) + Σ p_i S(ρ_i) >= S(Σ p_i ρ_i)`, and its pure-state form
/// `H(p) >= S(Σ p_i |ψ_i⟩⟨ψ_i|)`.
pub fn check_strong_concavity(params: &SuiteParams) -> Result<CheckReport> {
    params.validate()?;
    let rows = run_samples(params.samples, |i| {
        let mut rng = stream_rng(params.seed, i as u64);
        let k = rng.random_range(2..=4);
        let (d1, d2) = (pick(&mut rng, &params.dims), pick(&mut rng, &params.dims));
        let r1 = (0..k).map(|_| random_mixed(&mut rng, d1)).collect::<Result<Vec<_>>>()?;
        let r2 = (0..k).map(|_| random_mixed(&mut rng, d2)).collect::<Result<Vec<_>>>()?;
        let pures =
            (0..k).map(|_| Ok(random_pure_with(&mut rng, vec![d2])?.to_density())).collect::<Result<Vec<_>>>()?;
        let p = random_weights(&mut rng, k);

        let products =
            r1.iter().zip(&r2).map(|(a, b)| Ok(qstate::tensor(a, b)?.matrix().clone())).collect::<Result<Vec<_>>>()?;
        let joint = entropy(&mixture(&p, &products));
        let s1 = avg_entropy(&p, &r1);
        let s2 = avg_entropy(&p, &r2);
        let m1 = entropy(&mixture(&p, r1.iter().map(DensityMatrix::matrix)));
        let m2 = entropy(&mixture(&p, r2.iter().map(DensityMatrix::matrix)));
        let h = shannon_entropy(&p)?;
        let pure_mix = entropy(&mixture(&p, pures.iter().map(DensityMatrix::matrix)));

        let desc = format!("members={k} dims={d1}x{d2}");
        Ok(vec![
            super::row("strong-concavity-1", i, desc.clone(), joint - s1 - m2),
            super::row("strong-concavity-2", i, desc.clone(), joint - m1 - s2),
            super::row("concavity", i, desc.clone(), joint - s1 - s2),
            super::row("mixture-bound", i, desc.clone(), h + s2 - m2),
            super::row("pure-mixture-bound", i, desc, h - pure_mix),
        ])
    })?;
    let mut b = ReportBuilder::new("strong-concavity", params.seed);
    for name in ["strong-concavity-1", "strong-concavity-2", "concavity", "mixture-bound", "pure-mixture-bound"] {
        b = b.relation(name, Semantics::Inequality, Tier::Exact, params.tol);
    }
    b.extend(rows);
    Ok(b.finish())
}

/// `S(ρ₁₂) + S(ρ₂₃) − S(ρ₁₂₃) − S(ρ₂) >= 0` on reductions of random
/// four-party pure states, plus the equality case `ρ₁₂₃ = ρ₁₂ ⊗ ρ₃`.
///
/// `params.dims` lists `(d₁, d₂, d₃)`; the purifying system has dimension
/// `d₁d₂d₃`.
pub fn check_ssa(params: &SuiteParams) -> Result<CheckReport> {
    params.validate()?;
    let [d1, d2, d3] = params.dims[..] else {
        return Err(Error::Argument(format!("strong subadditivity needs three dims, got {:?}", params.dims)));
    };
    let rows = run_samples(params.samples, |i| {
        let mut rng = stream_rng(params.seed, i as u64);
        let psi = random_pure_with(&mut rng, vec![d1, d2, d3, d1 * d2 * d3])?;
        let rho123 = qstate::reduced_state(&psi, &[0, 1, 2])?;
        let gap = ssa_gap(&rho123)?;

        let rho12 = random_density_with(&mut rng, vec![d1, d2], d1 * d2)?;
        let rho3 = random_density_with(&mut rng, vec![d3], d3)?;
        let saturated = ssa_gap(&qstate::tensor(&rho12, &rho3)?)?;
        let desc = format!("dims={d1}x{d2}x{d3}");
        Ok(vec![super::row("ssa", i, desc.clone(), gap), super::row("product-saturation", i, desc, saturated)])
    })?;
    let mut b = ReportBuilder::new("ssa", params.seed)
        .relation("ssa", Semantics::Inequality, Tier::Exact, params.tol)
        .relation("product-saturation", Semantics::Identity, Tier::Exact, params.tol);
    b.extend(rows);
    Ok(b.finish())
}

/// `S(ρ₁₂) + S(ρ₂₃) − S(ρ₁₂₃) − S(ρ₂)` for a tripartite state.
pub fn ssa_gap(rho123: &DensityMatrix) -> Result<f64> {
    let s = |keep: &[usize]| -> Result<f64> { Ok(von_neumann_entropy(&partial_trace(rho123, keep)?)) };
    Ok(s(&[0, 1])? + s(&[1, 2])? - von_neumann_entropy(rho123) - s(&[1])?)
}

/// Mixing the HJW ensemble of `(ρ, U)` returns `ρ`. The dimension is drawn
/// from `params.dims`, the rank from `1..=min(d, 4)` and the ensemble size
/// from `rank..=12`. Residual is `‖Σ p_i |ψ_i⟩⟨ψ_i| − ρ‖_F`.
pub fn check_hjw_roundtrip(params: &SuiteParams) -> Result<CheckReport> {
    params.validate()?;
    let rows = run_samples(params.samples, |i| {
        let mut rng = stream_rng(params.seed, i as u64);
        let d = pick(&mut rng, &params.dims);
        let rank = rng.random_range(1..=d.min(4));
        let m = rng.random_range(rank..=12.max(rank));
        let rho = random_density_with(&mut rng, vec![d], rank)?;
        let u = random_isometry_with(&mut rng, m, crate::eof::support_rank(&rho))?;
        let e = hjw_ensemble(&rho, &u, 0.0)?;
        let err = (mix(&e).matrix() - rho.matrix()).frobenius_norm();
        Ok(vec![super::row("hjw-roundtrip", i, format!("dim={d} rank={rank} members={m}"), err)])
    })?;
    let mut b = ReportBuilder::new("hjw-roundtrip", params.seed).relation(
        "hjw-roundtrip",
        Semantics::Identity,
        Tier::Exact,
        params.tol,
    );
    b.extend(rows);
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probes::report::EXACT_TOL;

    fn params(dims: Vec<usize>) -> SuiteParams {
        SuiteParams { samples: 25, dims, seed: 7, tol: EXACT_TOL }
    }

    #[test]
    fn flagged_identity_worked_example() {
        let zero = DensityMatrix::from_diagonal(vec![2], &[1.0, 0.0]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        let s = von_neumann_entropy(&flagged_state(&[0.5, 0.5], &[zero, mixed]).unwrap());
        assert!((s - 1.5).abs() < 1e-12);
    }

    #[test]
    fn suites_pass_at_small_scale() {
        assert!(check_flagged_identity(&params(vec![2, 3, 4])).unwrap().passed);
        assert!(check_strong_concavity(&params(vec![2, 3])).unwrap().passed);
        assert!(check_ssa(&params(vec![2, 2, 2])).unwrap().passed);
        assert!(check_hjw_roundtrip(&params(vec![2, 3, 4, 5, 6])).unwrap().passed);
    }

    #[test]
    fn reports_are_deterministic() {
        let a = serde_json::to_string(&check_strong_concavity(&params(vec![2, 3])).unwrap()).unwrap();
        let b = serde_json::to_string(&check_strong_concavity(&params(vec![2, 3])).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn identical_members_saturate_strong_concavity() {
        let mut rng = stream_rng(1, 0);
        let a = random_density_with(&mut rng, vec![2], 2).unwrap();
        let b = random_density_with(&mut rng, vec![3], 3).unwrap();
        let p = [0.3, 0.7];
        let prod = qstate::tensor(&a, &b).unwrap();
        let joint = entropy(&mixture(&p, [prod.matrix(), prod.matrix()]));
        let gap1 = joint - von_neumann_entropy(&a) - von_neumann_entropy(&b);
        assert!(gap1.abs() < 1e-9);
    }

    #[test]
    fn orthogonal_second_factors_reduce_to_the_flagged_identity() {
        let mut rng = stream_rng(2, 0);
        let r1: Vec<_> = (0..2).map(|_| random_density_with(&mut rng, vec![2], 2).unwrap()).collect();
        let r2 = [
            DensityMatrix::from_diagonal(vec![4], &[0.5, 0.5, 0.0, 0.0]).unwrap(),
            DensityMatrix::from_diagonal(vec![4], &[0.0, 0.0, 0.25, 0.75]).unwrap(),
        ];
        let p = [0.4, 0.6];
        let prods: Vec<_> = r1.iter().zip(&r2).map(|(a, b)| qstate::tensor(a, b).unwrap().matrix().clone()).collect();
        let joint = entropy(&mixture(&p, &prods));
        let m2 = entropy(&mixture(&p, r2.iter().map(DensityMatrix::matrix)));
        let gap = joint - avg_entropy(&p, &r1) - m2;
        assert!(gap.abs() < 1e-9, "{gap}");
    }

    #[test]
    fn rejects_bad_params() {
        assert!(check_ssa(&params(vec![2, 2])).is_err());
        assert!(check_flagged_identity(&params(vec![])).is_err());
    }
}
