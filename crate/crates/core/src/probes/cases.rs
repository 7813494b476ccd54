//! The two families for which additivity is proved: Schmidt-correlated
//! four-party pure states and products of block-diagonal factors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::questions::member_terms;
use super::report::{CheckReport, ReportBuilder, SampleGap, Semantics, Tier, EXACT_TOL};
use super::{factor_eof, factor_eof_with_ensemble, row, run_samples};
use crate::eof::{eof_minimize_from, eof_pure, EofOptions};
use crate::error::Result;
use crate::qmat::{c64, CVector};
use crate::qstate::{reduced_state, tensor, von_neumann_entropy, Cut, PureState};
use crate::statezoo::{case1_state, case2_factor, random_isometry_with, stream_rng, Case1Spec, Case2Spec};

/// Entropies and EoFs of a case-I state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case1Terms {
    /// `S(ρ_{AA'})`.
    pub s_aa: f64,
    /// `S(ρ_A)`.
    pub s_a: f64,
    /// `S(ρ_{A'})`.
    pub s_a2: f64,
    /// `Σ_α λ_α S(Tr_{B'} |Ψ^α_{A'B'}⟩⟨Ψ^α_{A'B'}|)`.
    pub dec_alpha: f64,
    /// `Σ_β λ_β S(Tr_B |Ψ^β_{AB}⟩⟨Ψ^β_{AB}|)`.
    pub dec_beta: f64,
    pub eof_ab: f64,
    pub eof_a2b2: f64,
}

/// `Σ_x w_x S(Tr_right |Ψ^x⟩⟨Ψ^x|)` where `|Ψ^x⟩ ∝ Σ_y √λ_{xy} |y⟩|y⟩` on `d ⊗ d`.
fn branch_average(lambda: &[Vec<f64>], d: usize) -> Result<f64> {
    let mut total = 0.0;
    for weights in lambda {
        let w: f64 = weights.iter().sum();
        if w <= 0.0 {
            continue;
        }
        let mut v = CVector::zeros(d * d);
        for (y, &l) in weights.iter().enumerate() {
            v[y * d + y] = c64((l / w).sqrt(), 0.0);
        }
        total += w * eof_pure(&PureState::normalized(vec![d, d], v)?, &Cut::new([0]))?;
    }
    Ok(total)
}

pub fn case1_terms(spec: &Case1Spec, opts: &EofOptions) -> Result<Case1Terms> {
    let psi = case1_state(spec)?;
    let s = |keep: &[usize]| -> Result<f64> { Ok(von_neumann_entropy(&reduced_state(&psi, keep)?)) };
    let transposed: Vec<Vec<f64>> = (0..spec.cols()).map(|b| spec.lambda().iter().map(|r| r[b]).collect()).collect();
    Ok(Case1Terms {
        s_aa: s(&[0, 2])?,
        s_a: s(&[0])?,
        s_a2: s(&[2])?,
        dec_alpha: branch_average(spec.lambda(), spec.cols())?,
        dec_beta: branch_average(&transposed, spec.rows())?,
        eof_ab: factor_eof(&reduced_state(&psi, &[0, 1])?, opts)?.0,
        eof_a2b2: factor_eof(&reduced_state(&psi, &[2, 3])?, opts)?.0,
    })
}

const CASE1_RELATIONS: [&str; 4] = ["medium", "medium2", "skew", "superadditivity"];

fn case1_rows(spec: &Case1Spec, index: usize, opts: &EofOptions) -> Result<Vec<SampleGap>> {
    let t = case1_terms(spec, opts)?;
    let desc = format!("lambda={}", serde_json::to_string(spec.lambda())?);
    Ok(vec![
        row("medium", index, desc.clone(), t.s_aa - t.s_a - t.dec_alpha),
        row("medium2", index, desc.clone(), t.s_aa - t.s_a2 - t.dec_beta),
        row("skew", index, desc.clone(), t.s_aa - t.s_a - t.eof_a2b2),
        row("superadditivity", index, desc, t.s_aa - t.eof_ab - t.eof_a2b2),
    ])
}

fn case1_builder(name: &str, seed: u64, tol: f64, slack: f64) -> ReportBuilder {
    ReportBuilder::new(name, seed)
        .relation(CASE1_RELATIONS[0], Semantics::Identity, Tier::Exact, tol)
        .relation(CASE1_RELATIONS[1], Semantics::Identity, Tier::Exact, tol)
        .relation(CASE1_RELATIONS[2], Semantics::Inequality, Tier::Optimizer, slack)
        .relation(CASE1_RELATIONS[3], Semantics::Inequality, Tier::Optimizer, slack)
}

/// Case-I relations for one weight grid: the two entropy identities
/// (`tol`) and the two EoF inequalities (`slack`).
pub fn check_case1(spec: &Case1Spec, opts: &EofOptions, tol: f64, slack: f64) -> Result<CheckReport> {
    let mut b = case1_builder("case1", opts.seed, tol, slack);
    b.extend(case1_rows(spec, 0, opts)?);
    Ok(b.finish())
}

const CASE1_SHAPES: [(usize, usize); 4] = [(2, 2), (2, 3), (3, 2), (3, 3)];

/// [`check_case1`] over `samples` random grids cycling through the shapes up
/// to `3 × 3`, plus the two exactly known states: the double Bell state
/// (`2 = 1 + 1`) and the classically correlated one (`1 = 1 + 0`).
pub fn case1_suite(samples: usize, seed: u64, opts: &EofOptions, tol: f64, slack: f64) -> Result<CheckReport> {
    let rows = run_samples(samples, |i| {
        let (r, c) = CASE1_SHAPES[i % CASE1_SHAPES.len()];
        let spec = Case1Spec::random_with(&mut stream_rng(seed, i as u64), r, c)?;
        case1_rows(&spec, i, opts)
    })?;
    let mut b = case1_builder("case1", seed, tol, slack)
        .relation("double-bell", Semantics::Identity, Tier::Exact, tol)
        .relation("classical-correlation", Semantics::Identity, Tier::Exact, tol);
    b.extend(rows);

    let t = case1_terms(&Case1Spec::new(vec![vec![0.25; 2]; 2])?, opts)?;
    let worst = [t.s_aa - 2.0, t.eof_ab - 1.0, t.eof_a2b2 - 1.0, t.s_aa - t.eof_ab - t.eof_a2b2];
    b.record("double-bell", 0, "S(AA')=2, EoFs 1 and 1", max_by_abs(&worst));
    let t = case1_terms(&Case1Spec::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]])?, opts)?;
    let worst = [t.s_aa - 1.0, t.s_a - 1.0, t.eof_a2b2, t.s_aa - t.s_a - t.eof_a2b2];
    b.record("classical-correlation", 0, "S(AA')=1, S(A)=1, EoF(A'B')=0", max_by_abs(&worst));
    Ok(b.finish())
}

fn max_by_abs(xs: &[f64]) -> f64 {
    xs.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(0.0)
}

/// Settings of [`check_case2`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case2Params {
    /// Random decompositions of the product to sample.
    pub decompositions: usize,
    /// Tolerance of the entropy-only inequality.
    pub tol: f64,
    /// Slack on the member-wise EoF inequality.
    pub slack: f64,
    /// Allowed `|E_f(product) − sum of factor EoFs|`.
    pub additivity_slack: f64,
}

impl Default for Case2Params {
    fn default() -> Self {
        Self { decompositions: 20, tol: EXACT_TOL, slack: 2e-3, additivity_slack: 2e-2 }
    }
}

/// Case-II chain for block-diagonal factors `a` on `AB` and `b` on `A'B'`.
///
/// * `key`: every member of sampled decompositions of the product has
///   `S(ρⁱ_{AA'}) >= Σ_K q_K S(ρ̂_A^{iK}) + S(ρⁱ_{A'})`.
/// * `super`: every such member has
///   `S(ρⁱ_{AA'}) >= E_f(ρⁱ_{AB}) + E_f(ρⁱ_{A'B'})`, each EoF taken as the
///   smaller of its numerical value and the entropy bound above.
/// * `additivity`: the minimized EoF of the product across `AA'|BB'`
///   matches the sum of the factor EoFs. The product of the factors' best
///   decompositions is one of the starting points.
pub fn check_case2(a: &Case2Spec, b: &Case2Spec, opts: &EofOptions, params: &Case2Params) -> Result<CheckReport> {
    let mut builder = case2_builder(opts.seed, params);
    builder.extend(case2_rows(a, b, opts, params, "", 0)?);
    Ok(builder.finish())
}

/// [`check_case2`] on the 3⊗3 example factor at weight 0.5 squared, and on
/// the two-qubit pair `0.5|00⟩⟨00| + 0.5|11⟩⟨11|` with `cos(π/8)|00⟩ + sin(π/8)|11⟩`.
pub fn case2_suite(opts: &EofOptions, params: &Case2Params) -> Result<CheckReport> {
    let qutrit = Case2Spec::qutrit_example(0.5)?;
    let pairs = [
        ("qutrit-example", qutrit.clone(), qutrit),
        ("qubit-analogue", Case2Spec::classical_qubits(0.5)?, Case2Spec::pure_qubits(std::f64::consts::PI / 8.0)?),
    ];
    let mut builder = case2_builder(opts.seed, params);
    for (p, (label, a, b)) in pairs.iter().enumerate() {
        builder.extend(case2_rows(a, b, opts, params, label, p)?);
    }
    Ok(builder.finish())
}

fn case2_builder(seed: u64, params: &Case2Params) -> ReportBuilder {
    ReportBuilder::new("case2", seed)
        .relation("key", Semantics::Inequality, Tier::Exact, params.tol)
        .relation("super", Semantics::Inequality, Tier::Optimizer, params.slack)
        .relation("additivity", Semantics::Identity, Tier::Optimizer, params.additivity_slack)
}

/// Rows for one factor pair; sample indices start at `pair · decompositions`.
fn case2_rows(
    a: &Case2Spec,
    b: &Case2Spec,
    opts: &EofOptions,
    params: &Case2Params,
    label: &str,
    pair: usize,
) -> Result<Vec<SampleGap>> {
    let (sa, sb) = (a.eigensystem(), b.eigensystem());
    let n = sa.rank() * sb.rank();
    let prefix = if label.is_empty() { String::new() } else { format!("{label} ") };
    let member_rows: Vec<Vec<SampleGap>> = (0..params.decompositions)
        .into_par_iter()
        .map(|d| {
            let u = random_isometry_with(&mut stream_rng(opts.seed, d as u64), n, n)?;
            let index = pair * params.decompositions + d;
            let mut rows = Vec::new();
            for i in 0..n {
                let Some(t) = member_terms(&sa, &sb, u.matrix(), i)? else { continue };
                let e_ab = factor_eof(&reduced_state(&t.member, &[0, 1])?, opts)?.0.min(t.bound_ab);
                let e_a2b2 = factor_eof(&reduced_state(&t.member, &[2, 3])?, opts)?.0.min(t.s_a2);
                let desc = format!("{prefix}decomposition={d} member={i}");
                rows.push(row("key", index, desc.clone(), t.key_gap()));
                rows.push(row("super", index, desc, t.s_aa - e_ab - e_a2b2));
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;

    let (ra, rb) = (case2_factor(a)?, case2_factor(b)?);
    let (va, ea) = factor_eof_with_ensemble(&ra, opts)?;
    let (vb, eb) = factor_eof_with_ensemble(&rb, opts)?;
    let est = eof_minimize_from(&tensor(&ra, &rb)?, &Cut::new([0, 2]), opts, &[ea.product(&eb)?])?;
    let mut rows: Vec<SampleGap> = member_rows.into_iter().flatten().collect();
    rows.push(row(
        "additivity",
        pair * params.decompositions,
        format!("{prefix}product={:.9} factors={va:.9}+{vb:.9}", est.value),
        est.value - (va + vb),
    ));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> EofOptions {
        EofOptions { restarts: 4, ..EofOptions::default() }
    }

    #[test]
    fn double_bell_and_classical_cases_are_exact() {
        let r = check_case1(&Case1Spec::new(vec![vec![0.25; 2]; 2]).unwrap(), &quick(), EXACT_TOL, 1e-3).unwrap();
        assert!(r.passed);
        for c in &r.components {
            assert!(c.min_gap.abs() < 1e-9, "{}: {}", c.name, c.min_gap);
        }
        let t = case1_terms(&Case1Spec::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap(), &quick()).unwrap();
        assert!((t.s_aa - 1.0).abs() < 1e-12 && (t.s_a - 1.0).abs() < 1e-12 && t.eof_a2b2.abs() < 1e-12);
    }

    #[test]
    fn single_entry_grid_is_unentangled() {
        let t = case1_terms(&Case1Spec::new(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap(), &quick()).unwrap();
        for x in [t.s_aa, t.s_a, t.s_a2, t.eof_ab, t.eof_a2b2] {
            assert!(x.abs() < 1e-12);
        }
    }

    #[test]
    fn small_case1_suite_passes() {
        let r = case1_suite(4, 1, &quick(), EXACT_TOL, 1e-3).unwrap();
        assert!(r.passed, "{:?}", r.components);
        assert_eq!(r.samples, 4);
    }

    #[test]
    fn pure_factors_are_exactly_additive() {
        let a = Case2Spec::pure_qubits(0.3).unwrap();
        let b = Case2Spec::pure_qubits(1.1).unwrap();
        let params = Case2Params { decompositions: 2, ..Case2Params::default() };
        let r = check_case2(&a, &b, &quick(), &params).unwrap();
        assert!(r.component("additivity").unwrap().max_abs_residual.unwrap() < 1e-9);
        assert!(r.passed);
    }

    #[test]
    fn qubit_analogue_is_additive() {
        let a = Case2Spec::classical_qubits(0.35).unwrap();
        let b = Case2Spec::pure_qubits(0.5).unwrap();
        let params = Case2Params { decompositions: 5, ..Case2Params::default() };
        let r = check_case2(&a, &b, &quick(), &params).unwrap();
        assert!(r.passed, "{:?}", r.components);
    }
}
