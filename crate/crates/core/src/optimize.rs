//! Minimization of ensemble-averaged costs over the decompositions of a
//! density matrix.
//!
//! A decomposition is an `m × r` isometry `V` acting on the weighted
//! eigenvectors `√λ_j |e_j⟩` (the HJW picture). Each iterate is moved by
//! left multiplication with `exp(iH)`, `H` Hermitian, and gradients are taken
//! by central differences along the `m²` generators of `H` at `H = 0`. The
//! off-diagonal generators rotate two rows of `V`, so a difference quotient
//! only needs the cost of the two members they touch. Directions come from
//! BFGS in those generator coordinates with an Armijo backtracking line
//! search along `t ↦ exp(itH(d))`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::Eigensystem;
use crate::error::{Error, Result};
use crate::qmat::{self, c64, CMatrix, CVector};
use crate::statezoo::{complex_gaussian, orthonormalize_columns, stream_rng};

/// Members lighter than this contribute nothing to the objective.
const MEMBER_FLOOR: f64 = 1e-15;

/// Largest generator-space step tried by the line search.
const MAX_STEP: f64 = 1.0;

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 40;

/// Largest ensemble the minimizer accepts. The quasi-Newton state grows with
/// the fourth power of the member count.
pub const MAX_MEMBERS: usize = 64;

/// Number of ensemble members.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EnsembleSize {
    /// `min(rank², 16)`, never below the rank.
    #[default]
    Auto,
    Fixed(usize),
}

impl EnsembleSize {
    pub fn resolve(self, rank: usize) -> Result<usize> {
        match self {
            EnsembleSize::Auto => Ok((rank * rank).min(16).max(rank)),
            EnsembleSize::Fixed(m) if m >= rank => Ok(m),
            EnsembleSize::Fixed(m) => {
                Err(Error::Argument(format!("ensemble size {m} is smaller than the rank {rank}")))
            }
        }
    }
}

impl std::str::FromStr for EnsembleSize {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(EnsembleSize::Auto),
            other => match other.parse::<usize>() {
                Ok(m) if m > 0 => Ok(EnsembleSize::Fixed(m)),
                _ => Err(Error::Argument(format!("ensemble size must be 'auto' or a positive integer, got '{s}'"))),
            },
        }
    }
}

impl std::fmt::Display for EnsembleSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EnsembleSize::Auto => write!(f, "auto"),
            EnsembleSize::Fixed(m) => write!(f, "{m}"),
        }
    }
}

impl Serialize for EnsembleSize {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            EnsembleSize::Auto => s.serialize_str("auto"),
            EnsembleSize::Fixed(m) => s.serialize_u64(*m as u64),
        }
    }
}

impl<'de> Deserialize<'de> for EnsembleSize {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(usize),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(m) if m > 0 => Ok(EnsembleSize::Fixed(m)),
            Raw::Num(_) => Err(serde::de::Error::custom("ensemble size must be positive")),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Optimizer settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EofOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    pub ensemble_size: EnsembleSize,
    /// Central-difference step in generator coordinates.
    pub gradient_step: f64,
    /// A restart stops once an iteration improves the objective by less than this.
    pub convergence_tol: f64,
    pub seed: u64,
}

impl Default for EofOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iterations: 500,
            ensemble_size: EnsembleSize::Auto,
            gradient_step: 1e-5,
            convergence_tol: 1e-7,
            seed: 0,
        }
    }
}

impl EofOptions {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iterations == 0 {
            return Err(Error::Argument("restarts and max_iterations must be positive".into()));
        }
        if !(self.gradient_step > 0.0) || !(self.convergence_tol > 0.0) {
            return Err(Error::Argument("gradient_step and convergence_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Where a restart began.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartKind {
    /// Seeded random unitary from stream `(seed, index)`.
    Random,
    /// The eigen-ensemble, padded with empty members.
    Eigen,
    /// A caller-supplied decomposition.
    Warm,
}

/// Per-restart record kept for reproducibility audits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartTrace {
    pub index: usize,
    pub start: StartKind,
    pub initial_value: f64,
    pub final_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Best decomposition found over all restarts.
#[derive(Clone, Debug)]
pub struct DecompositionMinimum {
    pub value: f64,
    /// `m × rank` isometry realizing `value`.
    pub isometry: CMatrix,
    pub converged: bool,
    pub iterations: usize,
    pub restarts_used: usize,
    pub traces: Vec<RestartTrace>,
}

/// Minimizes `Σ_i p_i cost(ψ_i)` over the decompositions `{(p_i, ψ_i)}` of the
/// state described by `sys`.
///
/// `cost` receives normalized member vectors. Restarts are `opts.restarts`
/// seeded random unitaries, then the eigen-ensemble, then every warm start
/// (each an `m_w × rank` isometry; its row count overrides the ensemble size
/// for that restart). Ties between restarts go to the lowest index.
pub fn minimize_over_decompositions<F>(
    sys: &Eigensystem,
    cost: F,
    opts: &EofOptions,
    warm_starts: &[CMatrix],
) -> Result<DecompositionMinimum>
where
    F: Fn(&CVector) -> f64 + Sync,
{
    opts.validate()?;
    let r = sys.rank();
    if r == 0 {
        return Err(Error::Argument("state has no support".into()));
    }
    for w in warm_starts {
        if w.cols() != r || w.rows() < r {
            return Err(Error::Shape(format!("warm start is {}x{}, rank is {r}", w.rows(), w.cols())));
        }
        if w.rows() > MAX_MEMBERS {
            return Err(Error::Size { dim: w.rows(), max: MAX_MEMBERS });
        }
    }
    let m = opts.ensemble_size.resolve(r)?;
    if m > MAX_MEMBERS {
        return Err(Error::Size { dim: m, max: MAX_MEMBERS });
    }
    let basis = sys.weighted_vectors();

    if r == 1 {
        let v = CMatrix::from_fn(1, 1, |_, _| c64(1.0, 0.0));
        let value = cost(&sys.vectors[0]);
        let trace = RestartTrace {
            index: 0,
            start: StartKind::Eigen,
            initial_value: value,
            final_value: value,
            iterations: 0,
            converged: true,
        };
        return Ok(DecompositionMinimum {
            value,
            isometry: v,
            converged: true,
            iterations: 0,
            restarts_used: 1,
            traces: vec![trace],
        });
    }

    let mut starts: Vec<(StartKind, CMatrix)> = Vec::with_capacity(opts.restarts + 1 + warm_starts.len());
    for k in 0..opts.restarts {
        let mut rng = stream_rng(opts.seed, k as u64);
        starts.push((StartKind::Random, random_start(&mut rng, m, r)?));
    }
    starts.push((StartKind::Eigen, crate::ensembles::Isometry::padded_identity(m, r)?.matrix().clone()));
    for w in warm_starts {
        starts.push((StartKind::Warm, orthonormalize_columns(w)));
    }

    let runs: Vec<(RestartTrace, DMatrix<Complex64>)> = starts
        .into_par_iter()
        .enumerate()
        .map(|(index, (kind, v0))| {
            let mut state = Restart::new(&basis, v0.inner(), &cost);
            let initial_value = state.value();
            let (iterations, converged) = state.run(opts);
            let trace =
                RestartTrace { index, start: kind, initial_value, final_value: state.value(), iterations, converged };
            (trace, state.v)
        })
        .collect();

    let best = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.0.final_value.total_cmp(&b.0.final_value).then(i.cmp(j)))
        .map(|(i, _)| i)
        .expect("at least one restart");
    let (trace, v) = &runs[best];
    Ok(DecompositionMinimum {
        value: trace.final_value,
        isometry: CMatrix::from_inner(v.clone()),
        converged: trace.converged,
        iterations: trace.iterations,
        restarts_used: runs.len(),
        traces: runs.iter().map(|(t, _)| t.clone()).collect(),
    })
}

/// First `r` columns of `exp(iH)` for a seeded Gaussian Hermitian `H`.
fn random_start(rng: &mut impl Rng, m: usize, r: usize) -> Result<CMatrix> {
    let mut h = CMatrix::zeros(m, m);
    for a in 0..m {
        h.set(a, a, c64(rng.sample(rand_distr::StandardNormal), 0.0));
        for b in a + 1..m {
            let z = complex_gaussian(rng) * std::f64::consts::FRAC_1_SQRT_2;
            h.set(a, b, z);
            h.set(b, a, z.conj());
        }
    }
    Ok(qmat::expm_antihermitian(&h)?.leading_columns(r))
}

/// Generator index layout: `m` diagonal phases, then `(X_ab, Y_ab)` for `a < b`.
fn pair_list(m: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::with_capacity(m * (m - 1) / 2);
    for a in 0..m {
        for b in a + 1..m {
            v.push((a, b));
        }
    }
    v
}

/// `H(θ) = Σ_k θ_k G_k` with `X_ab = E_ab + E_ba`, `Y_ab = -i E_ab + i E_ba`.
fn generator_matrix(theta: &DVector<f64>, m: usize, pairs: &[(usize, usize)]) -> CMatrix {
    let mut h = CMatrix::zeros(m, m);
    for a in 0..m {
        h.set(a, a, c64(theta[a], 0.0));
    }
    for (k, &(a, b)) in pairs.iter().enumerate() {
        let (x, y) = (theta[m + 2 * k], theta[m + 2 * k + 1]);
        h.set(a, b, c64(x, -y));
        h.set(b, a, c64(x, y));
    }
    h
}

struct Restart<'a, F> {
    basis: &'a [CVector],
    cost: &'a F,
    /// Current isometry, `m × r`.
    v: DMatrix<Complex64>,
    /// Unnormalized members `Σ_j V_ij √λ_j |e_j⟩`.
    members: Vec<CVector>,
    /// `p_i · cost(ψ_i / √p_i)`.
    contrib: Vec<f64>,
    pairs: Vec<(usize, usize)>,
}

impl<'a, F: Fn(&CVector) -> f64> Restart<'a, F> {
    fn new(basis: &'a [CVector], v0: &DMatrix<Complex64>, cost: &'a F) -> Self {
        let m = v0.nrows();
        let mut s = Self { basis, cost, v: v0.clone(), members: Vec::new(), contrib: Vec::new(), pairs: pair_list(m) };
        s.members = s.members_of(&s.v);
        s.contrib = s.members.iter().map(|x| s.weighted_cost(x)).collect();
        s
    }

    fn members_of(&self, v: &DMatrix<Complex64>) -> Vec<CVector> {
        let n = self.basis[0].len();
        (0..v.nrows())
            .map(|i| {
                let mut out = CVector::zeros(n);
                for (j, b) in self.basis.iter().enumerate() {
                    out.axpy(v[(i, j)], b, c64(1.0, 0.0));
                }
                out
            })
            .collect()
    }

    fn weighted_cost(&self, x: &CVector) -> f64 {
        let p = x.norm_squared();
        if p < MEMBER_FLOOR {
            return 0.0;
        }
        p * (self.cost)(&x.unscale(p.sqrt()))
    }

    fn value(&self) -> f64 {
        self.contrib.iter().sum()
    }

    /// Central-difference gradient at `H = 0` in generator coordinates.
    fn gradient(&self, step: f64) -> DVector<f64> {
        let m = self.members.len();
        let mut g = DVector::zeros(m * m);
        let (c, s) = (step.cos(), step.sin());
        let i = c64(0.0, 1.0);
        for (k, &(a, b)) in self.pairs.iter().enumerate() {
            let (pa, pb) = (&self.members[a], &self.members[b]);
            // X_ab: rows mix as cos·a + i sin·b, i sin·a + cos·b
            let eval_x = |sg: f64| {
                let na = pa * c64(c, 0.0) + pb * (i * sg * s);
                let nb = pa * (i * sg * s) + pb * c64(c, 0.0);
                self.weighted_cost(&na) + self.weighted_cost(&nb)
            };
            // Y_ab: rows mix as cos·a + sin·b, -sin·a + cos·b
            let eval_y = |sg: f64| {
                let na = pa * c64(c, 0.0) + pb * c64(sg * s, 0.0);
                let nb = pa * c64(-sg * s, 0.0) + pb * c64(c, 0.0);
                self.weighted_cost(&na) + self.weighted_cost(&nb)
            };
            g[m + 2 * k] = (eval_x(1.0) - eval_x(-1.0)) / (2.0 * step);
            g[m + 2 * k + 1] = (eval_y(1.0) - eval_y(-1.0)) / (2.0 * step);
        }
        g
    }

    /// Members after moving by `exp(itH)`; returns (members, contributions, total).
    fn trial(&self, rot: &CMatrix) -> (Vec<CVector>, Vec<f64>, f64) {
        let m = self.members.len();
        let n = self.basis[0].len();
        let members: Vec<CVector> = (0..m)
            .map(|a| {
                let mut out = CVector::zeros(n);
                for b in 0..m {
                    let w = rot.get(a, b);
                    if w != c64(0.0, 0.0) {
                        out.axpy(w, &self.members[b], c64(1.0, 0.0));
                    }
                }
                out
            })
            .collect();
        let contrib: Vec<f64> = members.iter().map(|x| self.weighted_cost(x)).collect();
        let total = contrib.iter().sum();
        (members, contrib, total)
    }

    /// Backtracking line search along `t ↦ exp(itH(d))`; accepts on success.
    fn line_search(&mut self, d: &DVector<f64>, slope: f64) -> Option<f64> {
        let m = self.members.len();
        let h = generator_matrix(d, m, &self.pairs);
        let eig = qmat::herm_eig_unchecked(&h);
        let f0 = self.value();
        let norm = d.norm();
        let mut t = if norm > MAX_STEP { MAX_STEP / norm } else { 1.0 };
        for _ in 0..MAX_BACKTRACKS {
            let rot = qmat::expi_from_eig(&eig, t);
            let (members, contrib, f) = self.trial(&rot);
            if f <= f0 + ARMIJO * t * slope {
                self.v = rot.inner() * &self.v;
                self.members = members;
                self.contrib = contrib;
                return Some(t);
            }
            t *= 0.5;
        }
        None
    }

    /// BFGS iterations; returns (iterations, converged).
    fn run(&mut self, opts: &EofOptions) -> (usize, bool) {
        let dim = self.members.len().pow(2);
        let mut hinv = DMatrix::<f64>::identity(dim, dim);
        let mut fresh = true;
        let mut g = self.gradient(opts.gradient_step);
        let mut small_steps = 0;
        for it in 1..=opts.max_iterations {
            if g.norm() == 0.0 {
                return (it - 1, true);
            }
            let mut d = -(&hinv * &g);
            let mut slope = g.dot(&d);
            if slope >= 0.0 {
                hinv = DMatrix::identity(dim, dim);
                fresh = true;
                d = -g.clone();
                slope = g.dot(&d);
            }
            let f0 = self.value();
            let t = match self.line_search(&d, slope) {
                Some(t) => t,
                None if !fresh => {
                    hinv = DMatrix::identity(dim, dim);
                    fresh = true;
                    continue;
                }
                None => return (it, true),
            };
            let improvement = f0 - self.value();
            let g_new = self.gradient(opts.gradient_step);
            let s = &d * t;
            let y = &g_new - &g;
            let sy = s.dot(&y);
            if sy > 1e-12 * s.norm() * y.norm() {
                if fresh {
                    hinv *= sy / y.dot(&y);
                }
                bfgs_update(&mut hinv, &s, &y, sy);
                fresh = false;
            }
            g = g_new;
            if improvement < opts.convergence_tol {
                small_steps += 1;
                if small_steps >= 2 {
                    return (it, true);
                }
            } else {
                small_steps = 0;
            }
        }
        (opts.max_iterations, false)
    }
}

/// `H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ`, `ρ = 1/(sᵀy)`.
fn bfgs_update(h: &mut DMatrix<f64>, s: &DVector<f64>, y: &DVector<f64>, sy: f64) {
    let rho = 1.0 / sy;
    let hy = &*h * y;
    let yhy = y.dot(&hy);
    // Expanded form: H + ρ²(yᵀHy)ssᵀ + ρ ssᵀ − ρ(Hy sᵀ + s yᵀH)
    let coef = rho * rho * yhy + rho;
    h.ger(coef, s, s, 1.0);
    h.ger(-rho, &hy, s, 1.0);
    h.ger(-rho, s, &hy, 1.0);
}
