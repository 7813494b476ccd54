//! The `eof` command line: `compute`, `verify`, `probe` and `zoo`.
//!
//! Exit status is 0 when a check passes or a probe finds no violation, 1 on a
//! failed check or a violation, and 2 on usage or input errors. A config file
//! given with `--config` holds `key = value` lines using the long flag names;
//! flags on the command line take precedence.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::eof::{eof_minimize, EnsembleSize, EofOptions};
use crate::error::{Error, Result};
use crate::io::{read_state, write_state, State, StateFile};
use crate::probes::{self, CheckReport, ProbeResult, QuestionInput, SampleGap, SuiteParams, SuperSource, EXACT_TOL};
use crate::qstate::{Cut, DensityMatrix, PureState};
use crate::statezoo::{self, Case1Spec, Case2Spec};

#[derive(Debug, Parser)]
#[command(
    name = "eof",
    version,
    about = "Entanglement of formation: estimates, entropy-inequality checks and additivity probes"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// File of `key = value` defaults (long flag names).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Default, Args)]
struct OptimizerArgs {
    /// Random restarts of the minimizer.
    #[arg(long)]
    restarts: Option<usize>,
    /// Iteration cap per restart.
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Members per decomposition: a number or `auto`.
    #[arg(long)]
    ensemble_size: Option<EnsembleSize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate the EoF of a state file across a cut.
    Compute {
        state: PathBuf,
        /// Left block, e.g. `0,2`.
        #[arg(long)]
        cut: Option<String>,
        /// Include the best decomposition in the output.
        #[arg(long)]
        ensemble: bool,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Run a verification suite (or `all`).
    Verify {
        check: String,
        #[arg(long)]
        samples: Option<usize>,
        /// Comma-separated dimensions the suite samples from.
        #[arg(long, value_parser = parse_dims)]
        dims: Option<Vec<usize>>,
        /// Tolerance for entropy-only relations.
        #[arg(long)]
        tol: Option<f64>,
        /// Tolerance for relations involving a minimized EoF.
        #[arg(long)]
        slack: Option<f64>,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Search for counterexamples.
    Probe {
        #[arg(value_enum)]
        probe: ProbeName,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        slack: Option<f64>,
        #[arg(long, value_enum)]
        source: Option<Source>,
        /// Dimensions for random and case-1 sources.
        #[arg(long, value_parser = parse_dims)]
        dims: Option<Vec<usize>>,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Write a state from one of the built-in families.
    Zoo {
        #[arg(value_enum)]
        family: Family,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Case-1 weights: rows separated by `;`, entries by `,`.
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
        #[arg(long, value_enum)]
        example: Option<Case2Example>,
        /// Weight of the first block of a case-2 example.
        #[arg(long)]
        weight: Option<f64>,
        /// Angle of the pure case-2 example.
        #[arg(long)]
        theta: Option<f64>,
        /// Local dimension of a Werner state.
        #[arg(long)]
        d: Option<usize>,
        /// Flip expectation of a Werner state.
        #[arg(long, allow_negative_numbers = true)]
        phi: Option<f64>,
        /// Singlet weight of a two-qubit Werner state.
        #[arg(long)]
        singlet_weight: Option<f64>,
        /// The four-qubit Werner state on `(A, B, A', B')`.
        #[arg(long)]
        four_qubit: bool,
        #[arg(long, value_parser = parse_dims)]
        dims: Option<Vec<usize>>,
        #[arg(long)]
        rank: Option<usize>,
        /// Emit a pure state rather than a density matrix.
        #[arg(long)]
        pure: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ProbeName {
    Question1,
    Question2,
    Superadditivity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Source {
    Random,
    Case1,
    Case2,
    Werner,
}

impl FromStr for Source {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Case1,
    Case2,
    Werner,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Case2Example {
    Qutrit,
    Classical,
    Pure,
}

fn parse_dims(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',').map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad dimension {t:?}: {e}"))).collect()
}

/// Keys a config file may set.
const CONFIG_KEYS: [&str; 12] = [
    "format",
    "seed",
    "restarts",
    "max-iterations",
    "ensemble-size",
    "samples",
    "dims",
    "tol",
    "slack",
    "trials",
    "source",
    "cut",
];

#[derive(Debug, Default)]
struct Config(BTreeMap<String, String>);

impl Config {
    fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut map = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Argument(format!("config line {}: expected key = value", n + 1)))?;
            let key = k.trim().replace('_', "-");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(Error::Argument(format!("config line {}: unknown key {key:?}", n + 1)));
            }
            map.insert(key, v.trim().to_string());
        }
        Ok(Self(map))
    }

    /// `flag`, else the parsed config value, else `None`.
    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.0
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| Error::Argument(format!("config key {key}: {e}"))))
            .transpose()
    }

    fn dims(&self, flag: Option<Vec<usize>>) -> Result<Option<Vec<usize>>> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.0.get("dims").map(|v| parse_dims(v).map_err(Error::Argument)).transpose()
    }

    fn optimizer(&self, args: &OptimizerArgs) -> Result<EofOptions> {
        let d = EofOptions::default();
        let opts = EofOptions {
            restarts: self.pick(args.restarts, "restarts")?.unwrap_or(d.restarts),
            max_iterations: self.pick(args.max_iterations, "max-iterations")?.unwrap_or(d.max_iterations),
            ensemble_size: self.pick(args.ensemble_size, "ensemble-size")?.unwrap_or(d.ensemble_size),
            seed: self.pick(args.seed, "seed")?.unwrap_or(d.seed),
            ..d
        };
        opts.validate()?;
        Ok(opts)
    }
}

/// Success or failure of a completed command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
}

impl Status {
    fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// Runs the command line and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return 2;
            }
            let _ = write!(out, "{text}");
            return 0;
        }
    };
    match execute(cli, out) {
        Ok(Status::Pass) => 0,
        Ok(Status::Fail) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<Status> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let format = cfg.pick(cli.format, "format")?.unwrap_or(Format::Json);
    match cli.command {
        Command::Compute { state, cut, ensemble, opt } => {
            let opts = cfg.optimizer(&opt)?;
            let cut = cfg.pick(cut, "cut")?.ok_or_else(|| Error::Argument("compute needs --cut".into()))?;
            let rho = read_state(&state)?.to_density();
            let est = eof_minimize(&rho, &Cut::parse(&cut)?, &opts)?;
            let summary = est.summary(ensemble);
            match format {
                Format::Json => emit_json(out, &summary)?,
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(out);
                    w.write_record(["value", "converged", "restarts_used", "iterations"]).map_err(csv_err)?;
                    w.write_record([
                        summary.value.to_string(),
                        summary.converged.to_string(),
                        summary.restarts_used.to_string(),
                        summary.iterations.to_string(),
                    ])
                    .map_err(csv_err)?;
                    w.flush()?;
                }
            }
            Ok(Status::Pass)
        }
        Command::Verify { check, samples, dims, tol, slack, opt } => {
            let v = VerifyArgs {
                samples: cfg.pick(samples, "samples")?,
                dims: cfg.dims(dims)?,
                tol: cfg.pick(tol, "tol")?,
                slack: cfg.pick(slack, "slack")?,
                opts: cfg.optimizer(&opt)?,
            };
            let names: Vec<&str> = if check == "all" { CHECKS.to_vec() } else { vec![check.as_str()] };
            let reports = names.iter().map(|n| run_check(n, &v)).collect::<Result<Vec<_>>>()?;
            let passed = reports.iter().all(|r| r.passed);
            match format {
                Format::Json if check == "all" => emit_json(out, &reports)?,
                Format::Json => emit_json(out, &reports[0])?,
                Format::Csv => emit_rows(out, reports.iter().flat_map(|r| rows_of(&r.name, &r.per_sample)))?,
            }
            Ok(Status::of(passed))
        }
        Command::Probe { probe, trials, slack, source, dims, opt } => {
            let opts = cfg.optimizer(&opt)?;
            let default_slack = if probe == ProbeName::Superadditivity { 2e-3 } else { EXACT_TOL };
            let params = probes::ProbeParams {
                trials: cfg.pick(trials, "trials")?.unwrap_or(100),
                seed: opts.seed,
                slack: cfg.pick(slack, "slack")?.unwrap_or(default_slack),
            };
            let source = cfg.pick(source, "source")?;
            let dims = cfg.dims(dims)?;
            let result = match probe {
                ProbeName::Question1 => probes::probe_question1(&question_input(source, dims)?, &params)?,
                ProbeName::Question2 => probes::probe_question2(&question_input(source, dims)?, &params)?,
                ProbeName::Superadditivity => {
                    probes::superadditivity_probe(&super_source(source, dims)?, &params, &opts)?
                }
            };
            emit_probe(out, format, &result)?;
            let implication_ok = result.implication.as_ref().is_none_or(|i| i.holds);
            Ok(Status::of(!result.violation_found && implication_ok))
        }
        Command::Zoo {
            family,
            out: path,
            lambda,
            rows,
            cols,
            example,
            weight,
            theta,
            d,
            phi,
            singlet_weight,
            four_qubit,
            dims,
            rank,
            pure,
            seed,
        } => {
            let seed = cfg.pick(seed, "seed")?.unwrap_or(0);
            let dims = cfg.dims(dims)?;
            let state = match family {
                Family::Case1 => {
                    let spec = match lambda {
                        Some(text) => Case1Spec::new(parse_grid(&text)?)?,
                        None => Case1Spec::random(rows.unwrap_or(2), cols.unwrap_or(2), seed)?,
                    };
                    let psi = statezoo::case1_state(&spec)?;
                    if pure {
                        State::Pure(psi)
                    } else {
                        State::Density(psi.to_density())
                    }
                }
                Family::Case2 => {
                    let spec = match example.unwrap_or(Case2Example::Qutrit) {
                        Case2Example::Qutrit => Case2Spec::qutrit_example(weight.unwrap_or(0.5))?,
                        Case2Example::Classical => Case2Spec::classical_qubits(weight.unwrap_or(0.5))?,
                        Case2Example::Pure => Case2Spec::pure_qubits(theta.unwrap_or(std::f64::consts::PI / 8.0))?,
                    };
                    State::Density(statezoo::case2_factor(&spec)?)
                }
                Family::Werner => {
                    let phi = match (phi, singlet_weight) {
                        (Some(p), None) => p,
                        (None, Some(w)) => statezoo::werner_phi_from_singlet_weight(w),
                        _ => {
                            return Err(Error::Argument(
                                "werner needs exactly one of --phi and --singlet-weight".into(),
                            ))
                        }
                    };
                    if four_qubit {
                        State::Density(statezoo::werner_four_qubit(phi)?)
                    } else {
                        State::Density(statezoo::werner_state(d.unwrap_or(2), phi)?)
                    }
                }
                Family::Random => {
                    let dims = dims.unwrap_or_else(|| vec![2, 2]);
                    if pure {
                        State::Pure(statezoo::random_pure(dims, seed)?)
                    } else {
                        let n: usize = dims.iter().product();
                        let rho = statezoo::random_density(n, rank.unwrap_or(n), seed)?;
                        State::Density(DensityMatrix::new(dims, rho.matrix().clone())?)
                    }
                }
            };
            match path {
                Some(p) => write_state(p, &state)?,
                None => emit_json(out, &StateFile::from_state(&state))?,
            }
            Ok(Status::Pass)
        }
    }
}

/// Names accepted by `verify`, in the order `verify all` runs them.
pub const CHECKS: [&str; 10] = [
    "flagged-identity",
    "strong-concavity",
    "ssa",
    "hjw-roundtrip",
    "pure-eof",
    "wootters-agreement",
    "case1",
    "case2",
    "weak-additivity",
    "relation-chain",
];

struct VerifyArgs {
    samples: Option<usize>,
    dims: Option<Vec<usize>>,
    tol: Option<f64>,
    slack: Option<f64>,
    opts: EofOptions,
}

fn run_check(name: &str, v: &VerifyArgs) -> Result<CheckReport> {
    let seed = v.opts.seed;
    let tol = v.tol.unwrap_or(EXACT_TOL);
    let suite = |samples: usize, dims: &[usize]| SuiteParams {
        samples: v.samples.unwrap_or(samples),
        dims: v.dims.clone().unwrap_or_else(|| dims.to_vec()),
        seed,
        tol,
    };
    match name {
        "flagged-identity" => probes::check_flagged_identity(&suite(100, &[2, 3, 4])),
        "strong-concavity" => probes::check_strong_concavity(&suite(100, &[2, 3])),
        "ssa" => probes::check_ssa(&suite(100, &[2, 2, 2])),
        "hjw-roundtrip" => probes::check_hjw_roundtrip(&suite(100, &[2, 3, 4, 5, 6])),
        "pure-eof" => probes::check_pure_eof(v.samples.unwrap_or(10), seed, &v.opts, tol),
        "wootters-agreement" => {
            probes::check_wootters_agreement(v.samples.unwrap_or(25), seed, &v.opts, v.slack.unwrap_or(1e-3))
        }
        "case1" => probes::case1_suite(v.samples.unwrap_or(20), seed, &v.opts, tol, v.slack.unwrap_or(1e-3)),
        "case2" => {
            let d = probes::Case2Params::default();
            let params = probes::Case2Params {
                decompositions: v.samples.unwrap_or(d.decompositions),
                tol,
                slack: v.slack.unwrap_or(d.slack),
                ..d
            };
            probes::case2_suite(&v.opts, &params)
        }
        "weak-additivity" => {
            probes::check_weak_additivity(v.samples.unwrap_or(10), seed, &v.opts, v.slack.unwrap_or(2e-3))
        }
        "relation-chain" => {
            let werner = statezoo::werner_state(2, statezoo::werner_phi_from_singlet_weight(0.9))?;
            let bell = bell_state()?.to_density();
            probes::relation_chain_check(&werner, &bell, &v.opts, v.slack.unwrap_or(5e-2))
        }
        other => Err(Error::Argument(format!("unknown check {other:?}; expected one of {} or all", CHECKS.join(", ")))),
    }
}

fn bell_state() -> Result<PureState> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = crate::qmat::c64(0.0, 0.0);
    let v = crate::qmat::CVector::from_vec(vec![crate::qmat::c64(s, 0.0), z, z, crate::qmat::c64(s, 0.0)]);
    PureState::new(vec![2, 2], v)
}

fn question_input(source: Option<Source>, dims: Option<Vec<usize>>) -> Result<QuestionInput> {
    match source.unwrap_or(Source::Random) {
        Source::Random => {
            let dims = dims.unwrap_or_else(|| vec![2, 2]);
            let [a, b] = dims[..] else {
                return Err(Error::Argument("question probes take two factor dims".into()));
            };
            Ok(QuestionInput::Random { dims: [a, b] })
        }
        Source::Case2 => {
            let spec = Case2Spec::qutrit_example(0.5)?;
            Ok(QuestionInput::Case2 { a: spec.clone(), b: spec })
        }
        other => Err(Error::Argument(format!("question probes accept random or case2 sources, not {other:?}"))),
    }
}

fn super_source(source: Option<Source>, dims: Option<Vec<usize>>) -> Result<SuperSource> {
    match source.unwrap_or(Source::Random) {
        Source::Random => {
            let dims = dims.unwrap_or_else(|| vec![2, 2, 2, 2]);
            let [a, b, c, d] = dims[..] else {
                return Err(Error::Argument("random superadditivity sources take four dims".into()));
            };
            Ok(SuperSource::Random { dims: [a, b, c, d] })
        }
        Source::Case1 => {
            let dims = dims.unwrap_or_else(|| vec![2, 2]);
            let [rows, cols] = dims[..] else {
                return Err(Error::Argument("case1 sources take two dims (rows, cols)".into()));
            };
            Ok(SuperSource::Case1 { rows, cols })
        }
        Source::Werner => Ok(SuperSource::Werner),
        Source::Case2 => Err(Error::Argument("superadditivity accepts random, case1 or werner sources".into())),
    }
}

fn parse_grid(text: &str) -> Result<Vec<Vec<f64>>> {
    text.split(';')
        .map(|r| {
            r.split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|e| Error::Argument(format!("bad weight {x:?}: {e}"))))
                .collect()
        })
        .collect()
}

fn emit_json<T: Serialize + ?Sized>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct CsvRow<'a> {
    name: &'a str,
    component: &'a str,
    index: usize,
    descriptor: &'a str,
    gap: f64,
}

fn rows_of<'a>(name: &'a str, rows: &'a Option<Vec<SampleGap>>) -> impl Iterator<Item = CsvRow<'a>> {
    rows.iter().flatten().map(move |r| CsvRow {
        name,
        component: &r.component,
        index: r.index,
        descriptor: &r.descriptor,
        gap: r.gap,
    })
}

fn emit_rows<'a>(out: &mut dyn Write, rows: impl Iterator<Item = CsvRow<'a>>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(out);
    let mut any = false;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
        any = true;
    }
    if !any {
        w.write_record(["name", "component", "index", "descriptor", "gap"]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn emit_probe(out: &mut dyn Write, format: Format, result: &ProbeResult) -> Result<()> {
    match format {
        Format::Json => emit_json(out, result),
        Format::Csv => emit_rows(out, rows_of(&result.name, &result.per_sample)),
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
