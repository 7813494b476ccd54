use serde::{Deserialize, Serialize};

/// How a report must be read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Semantics {
    /// Both sides must agree; judged on `max_abs_residual`.
    Identity,
    /// `gap >= -tol` on every sample.
    Inequality,
    /// Search for a counterexample. Finding none proves nothing.
    ViolationSearch,
}

/// Tolerance tier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    /// Relations built from entropies and partial traces only.
    Exact,
    /// Relations involving a numerically minimized EoF.
    Optimizer,
}

/// Default tolerance of the exact tier.
pub const EXACT_TOL: f64 = 1e-9;

/// One evaluated sample of one relation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleGap {
    pub component: String,
    pub index: usize,
    pub descriptor: String,
    /// `LHS − RHS`, oriented so that `>= 0` means the relation holds.
    pub gap: f64,
}

/// Outcome for a single relation inside a check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub name: String,
    pub semantics: Semantics,
    pub tier: Tier,
    pub tol: f64,
    pub samples: usize,
    pub min_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs_residual: Option<f64>,
    pub passed: bool,
}

/// Outcome of a verification suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub semantics: Semantics,
    pub tier: Tier,
    pub samples: usize,
    pub min_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs_residual: Option<f64>,
    pub passed: bool,
    pub seed: u64,
    pub components: Vec<Component>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_sample: Option<Vec<SampleGap>>,
}

impl CheckReport {
    pub fn component(&self, name: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.name == name)
    }

    /// Drops the per-sample rows.
    pub fn without_samples(mut self) -> Self {
        self.per_sample = None;
        self
    }
}

/// Collects gaps relation by relation and folds them into a [`CheckReport`].
#[derive(Debug)]
pub(crate) struct ReportBuilder {
    name: String,
    seed: u64,
    specs: Vec<(String, Semantics, Tier, f64)>,
    rows: Vec<SampleGap>,
}

impl ReportBuilder {
    pub(crate) fn new(name: &str, seed: u64) -> Self {
        Self { name: name.into(), seed, specs: Vec::new(), rows: Vec::new() }
    }

    pub(crate) fn relation(mut self, name: &str, semantics: Semantics, tier: Tier, tol: f64) -> Self {
        self.specs.push((name.into(), semantics, tier, tol));
        self
    }

    pub(crate) fn record(&mut self, component: &str, index: usize, descriptor: impl Into<String>, gap: f64) {
        debug_assert!(self.specs.iter().any(|s| s.0 == component), "unknown component {component}");
        self.rows.push(SampleGap { component: component.into(), index, descriptor: descriptor.into(), gap });
    }

    pub(crate) fn extend(&mut self, rows: impl IntoIterator<Item = SampleGap>) {
        self.rows.extend(rows);
    }

    pub(crate) fn finish(self) -> CheckReport {
        let components: Vec<Component> = self
            .specs
            .iter()
            .map(|(name, semantics, tier, tol)| {
                let gaps: Vec<f64> = self.rows.iter().filter(|r| &r.component == name).map(|r| r.gap).collect();
                let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
                let max_abs = gaps.iter().map(|g| g.abs()).fold(0.0, f64::max);
                let nan = gaps.iter().any(|g| g.is_nan());
                let (max_abs_residual, passed) = match semantics {
                    Semantics::Identity => (Some(max_abs), !nan && max_abs <= *tol),
                    _ => (None, !nan && min_gap >= -tol),
                };
                Component {
                    name: name.clone(),
                    semantics: *semantics,
                    tier: *tier,
                    tol: *tol,
                    samples: gaps.len(),
                    min_gap,
                    max_abs_residual,
                    passed,
                }
            })
            .collect();
        let all_identity = components.iter().all(|c| c.semantics == Semantics::Identity);
        let max_abs_residual = components.iter().filter_map(|c| c.max_abs_residual).reduce(f64::max);
        let samples = self.rows.iter().map(|r| r.index).max().map_or(0, |i| i + 1);
        CheckReport {
            name: self.name,
            semantics: if all_identity { Semantics::Identity } else { Semantics::Inequality },
            tier: if components.iter().any(|c| c.tier == Tier::Optimizer) { Tier::Optimizer } else { Tier::Exact },
            samples,
            min_gap: components.iter().map(|c| c.min_gap).fold(f64::INFINITY, f64::min),
            max_abs_residual,
            passed: components.iter().all(|c| c.passed),
            seed: self.seed,
            components,
            per_sample: Some(self.rows),
        }
    }
}
