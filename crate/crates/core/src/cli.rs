//! Job configuration, dispatch and reports for the `braidtower` binary.
//!
//! A job is a JSON object:
//!
//! ```json
//! {"field":"Q","space":{"diagonal":[["-1","1"],["-1","-1"]]},"degree":5,"task":"rank"}
//! ```
//!
//! Scalars are strings `"a"` or `"a/b"` so that they stay exact. User
//! brackets (`explicit`) are `n × dim P` matrices against the canonical
//! RREF basis of the primitives, which the `primitives` task prints.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use crate::braiding::{make_diagonal, make_flip, render_polynomial, BraidedSpace, LiftedBraiding};
use crate::envelope::{
    check_bracket_compat, check_implicit_jacobi, check_split, class_s_evidence, classical_envelope, compat_witness,
    detect_trivial_bracket, ideal_tower, nichols_truncation, rank_one_envelope, reconstruct, run_tower,
    ClassicalBracket, ExplicitBracket, FiniteBraidedBialgebra, StructureConstants, TowerRun, TowerState,
    TrivialBracket,
};
use crate::error::Error;
use crate::exactla::DenseMatrix;
use crate::oracle::{nichols_dims_via_symmetrizer, pbw_dims, permutation_lift_check, SYMMETRIZER_MAX_DEGREE};
use crate::scalar::{is_prime, Field, Fp, Rational};
use crate::tensoralg::TruncatedTensorAlgebra;

pub const DEFAULT_DEGREE: usize = 5;

/// Ground field: `"Q"` or `"F<p>"`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FieldSpec {
    #[default]
    Rationals,
    Prime(u64),
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Prime(p) => write!(f, "F{p}"),
        }
    }
}

impl From<FieldSpec> for String {
    fn from(f: FieldSpec) -> String {
        f.to_string()
    }
}

impl TryFrom<String> for FieldSpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl FromStr for FieldSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "Q" {
            return Ok(FieldSpec::Rationals);
        }
        let p: u64 = s
            .strip_prefix('F')
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| format!("unknown field `{s}`; expected \"Q\" or \"F<p>\""))?;
        if !is_prime(p) {
            return Err(format!("field F{p}: {p} is not prime"));
        }
        if !SUPPORTED_PRIMES.contains(&p) {
            return Err(format!("field F{p} unsupported; primes below 100 are available"));
        }
        Ok(FieldSpec::Prime(p))
    }
}

const SUPPORTED_PRIMES: [u64; 25] =
    [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];

// Monomorphizes `$run::<F>$args` for the field named by `$spec`.
macro_rules! with_field {
    ($spec:expr, $run:ident $args:tt; $($p:literal)*) => {
        match $spec {
            FieldSpec::Rationals => $run::<Rational> $args,
            $(FieldSpec::Prime($p) => $run::<Fp<$p>> $args,)*
            FieldSpec::Prime(p) => Err(CliError::Config(format!("field F{p} unsupported"))),
        }
    };
    ($spec:expr, $run:ident $args:tt) => {
        with_field!($spec, $run $args;
            2 3 5 7 11 13 17 19 23 29 31 37 41 43 47 53 59 61 67 71 73 79 83 89 97)
    };
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum SpaceSpec {
    /// `q`-matrix of a diagonal braiding `c(x_i⊗x_j) = q_ij x_j⊗x_i`.
    Diagonal(Vec<Vec<String>>),
    /// The flip on an `n`-dimensional space.
    Flip(usize),
    /// Full `n² × n²` matrix of `c`, row `k·n + l` and column `i·n + j`.
    Matrix(Vec<Vec<String>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Check,
    Primitives,
    Nichols,
    Rank,
    Envelope,
    Reconstruct,
    OracleCompare,
    IdealTower,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Check => "check",
            Task::Primitives => "primitives",
            Task::Nichols => "nichols",
            Task::Rank => "rank",
            Task::Envelope => "envelope",
            Task::Reconstruct => "reconstruct",
            Task::OracleCompare => "oracle-compare",
            Task::IdealTower => "ideal-tower",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| {
            format!(
                "unknown task `{s}`; expected one of check, primitives, nichols, rank, envelope, reconstruct, \
                 oracle-compare, ideal-tower"
            )
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BracketSpec {
    Trivial,
    /// `constants[i][j][k]` is the coefficient of `x_k` in `[x_i, x_j]`; needs the flip.
    Classical {
        constants: Vec<Vec<Vec<String>>>,
    },
    /// `b^[0], b^[1], …` as `n × dim P^[k]` matrices; trivial after the last one.
    Explicit {
        stages: Vec<Vec<Vec<String>>>,
    },
    /// `β` on `E(V,c)`: one `n × dim E_d` matrix per degree `d = 2..=D`; empty means `β = 0`.
    RankOne {
        #[serde(default)]
        beta: Vec<Vec<Vec<String>>>,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Structured,
}

fn default_degree() -> usize {
    DEFAULT_DEGREE
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default)]
    pub field: FieldSpec,
    pub space: SpaceSpec,
    #[serde(default = "default_degree")]
    pub degree: usize,
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bracket: Option<BracketSpec>,
    #[serde(default)]
    pub output: OutputFormat,
}

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Run(#[from] Error),
}

impl CliError {
    /// 1 assertion failure or refusal, 2 config error, 3 truncation instability.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(e) => match e {
                Error::UnstableTruncation { .. } | Error::StageCap(_) | Error::Truncated(_) => 3,
                Error::Parse(_) | Error::InvalidBraiding(_) | Error::Dimension(_) => 2,
                Error::Refused(_) | Error::IncompatibleBracket(_) | Error::Assertion(_) => 1,
            },
        }
    }
}

fn config_err(e: Error) -> CliError {
    CliError::Config(e.to_string())
}

/// Parses and validates a job. Unknown keys are rejected; JSON syntax
/// errors carry line and column.
pub fn parse_config(text: &str) -> Result<JobConfig, CliError> {
    let cfg: JobConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    validate(&cfg)?;
    Ok(cfg)
}

pub fn render_config(cfg: &JobConfig) -> String {
    serde_json::to_string_pretty(cfg).expect("config serializes")
}

/// Semantic checks: `D ≥ 1`, a valid braiding, a bracket where the task needs one.
pub fn validate(cfg: &JobConfig) -> Result<(), CliError> {
    if cfg.degree == 0 {
        return Err(CliError::Config("degree must be at least 1".into()));
    }
    if matches!(cfg.task, Task::Envelope | Task::Reconstruct) && cfg.bracket.is_none() {
        return Err(CliError::Config(format!("task {} needs a bracket", cfg.task)));
    }
    with_field!(cfg.field, check_job(cfg))
}

fn check_job<F: Field>(cfg: &JobConfig) -> Result<(), CliError> {
    build_job::<F>(cfg).map(|_| ())
}

/// The job with its scalars parsed into `F`.
struct Job<F: Field> {
    space: Arc<BraidedSpace<F>>,
    bracket: Option<BracketJob<F>>,
}

enum BracketJob<F: Field> {
    Trivial,
    Classical(StructureConstants<F>),
    Explicit(Vec<DenseMatrix<F>>),
    RankOne(Vec<DenseMatrix<F>>),
}

fn parse_matrix<F: Field>(rows: &[Vec<String>], what: &str) -> Result<DenseMatrix<F>, CliError> {
    let cols = rows.first().map_or(0, Vec::len);
    let parsed = rows
        .iter()
        .enumerate()
        .map(|(r, row)| {
            if row.len() != cols {
                return Err(CliError::Config(format!(
                    "{what}: row {} has {} entries, expected {cols}",
                    r + 1,
                    row.len()
                )));
            }
            row.iter().map(|s| F::parse_scalar(s).map_err(config_err)).collect()
        })
        .collect::<Result<Vec<Vec<F>>, CliError>>()?;
    DenseMatrix::from_rows(cols, parsed).map_err(config_err)
}

fn build_job<F: Field>(cfg: &JobConfig) -> Result<Job<F>, CliError> {
    let space = match &cfg.space {
        SpaceSpec::Diagonal(q) => {
            let m = parse_matrix::<F>(q, "diagonal")?;
            if m.rows() != m.cols() || m.rows() == 0 {
                return Err(CliError::Config("invalid braiding: q-matrix must be square and nonempty".into()));
            }
            make_diagonal(&m).map_err(config_err)?
        }
        SpaceSpec::Flip(n) => {
            if *n == 0 {
                return Err(CliError::Config("invalid braiding: flip needs n ≥ 1".into()));
            }
            make_flip(*n)
        }
        SpaceSpec::Matrix(rows) => {
            let m = parse_matrix::<F>(rows, "matrix")?;
            let n = (1..=m.rows())
                .find(|k| k * k == m.rows())
                .ok_or_else(|| CliError::Config(format!("invalid braiding: {} rows is not a square n²", m.rows())))?;
            BraidedSpace::new(n, m).map_err(config_err)?
        }
    };
    let n = space.dim();
    let bracket = match &cfg.bracket {
        None => None,
        Some(BracketSpec::Trivial) => Some(BracketJob::Trivial),
        Some(BracketSpec::Classical { constants }) => {
            if !space.is_flip() {
                return Err(CliError::Config("classical bracket needs the flip braiding".into()));
            }
            if constants.len() != n {
                return Err(CliError::Config(format!("structure constants must be {n}x{n}x{n}")));
            }
            let c = constants
                .iter()
                .map(|plane| {
                    if plane.len() != n || plane.iter().any(|r| r.len() != n) {
                        return Err(CliError::Config(format!("structure constants must be {n}x{n}x{n}")));
                    }
                    plane.iter().map(|r| r.iter().map(|s| F::parse_scalar(s).map_err(config_err)).collect()).collect()
                })
                .collect::<Result<Vec<Vec<Vec<F>>>, CliError>>()?;
            let sc = StructureConstants::new(c).map_err(config_err)?;
            ClassicalBracket::new(sc.clone()).map_err(config_err)?;
            Some(BracketJob::Classical(sc))
        }
        Some(BracketSpec::Explicit { stages }) => Some(BracketJob::Explicit(
            stages
                .iter()
                .enumerate()
                .map(|(k, m)| {
                    let b = parse_matrix::<F>(m, &format!("bracket stage {k}"))?;
                    if b.rows() != n {
                        return Err(CliError::Config(format!("bracket stage {k} must have {n} rows")));
                    }
                    Ok(b)
                })
                .collect::<Result<_, CliError>>()?,
        )),
        Some(BracketSpec::RankOne { beta }) => Some(BracketJob::RankOne(
            beta.iter()
                .enumerate()
                .map(|(k, m)| parse_matrix::<F>(m, &format!("beta in degree {}", k + 2)))
                .collect::<Result<_, CliError>>()?,
        )),
    };
    Ok(Job { space: Arc::new(space), bracket })
}

/// `values[d]` for `d = 0..=D` unless noted in the name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table {
    pub name: String,
    pub values: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Listing {
    pub name: String,
    pub items: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// One stage of a tower run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageRecord {
    pub stage: usize,
    pub graded_dims: Vec<usize>,
    pub filtered_dims: Vec<usize>,
    pub primitive_dim: usize,
    /// Whether `b^[k] ∘ i^[k] = Id`; absent on the last stage when the run stopped there.
    pub split: Option<bool>,
    /// Generators of `I_k` not already in `I_{k-1}`.
    pub new_generators: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub task: Task,
    pub field: FieldSpec,
    pub degree: usize,
    pub config: JobConfig,
    pub summary: Vec<String>,
    pub tables: Vec<Table>,
    pub listings: Vec<Listing>,
    pub stages: Vec<StageRecord>,
    pub verdicts: Vec<Verdict>,
}

impl Report {
    fn new(cfg: &JobConfig) -> Self {
        Report {
            task: cfg.task,
            field: cfg.field,
            degree: cfg.degree,
            config: cfg.clone(),
            summary: Vec::new(),
            tables: Vec::new(),
            listings: Vec::new(),
            stages: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }

    fn table(&mut self, name: impl Into<String>, values: Vec<usize>) {
        self.tables.push(Table { name: name.into(), values });
    }

    fn listing(&mut self, name: impl Into<String>, items: Vec<String>) {
        self.listings.push(Listing { name: name.into(), items });
    }

    fn verdict(&mut self, name: impl Into<String>, passed: bool, detail: Option<String>) {
        self.verdicts.push(Verdict { name: name.into(), passed, detail });
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable rendering; `verbose` adds stage generators and the config echo.
    pub fn render_text(&self, verbose: bool) -> String {
        let d = self.degree;
        let mut out = format!("task {} over {} (at truncation {d})\n", self.task, self.field);
        for s in &self.summary {
            out += &format!("{s}\n");
        }
        for t in &self.tables {
            let vals: Vec<String> = t.values.iter().map(usize::to_string).collect();
            out += &format!("{}: ({})\n", t.name, vals.join(","));
        }
        for l in &self.listings {
            out += &format!("{} [{}]:\n", l.name, l.items.len());
            for i in &l.items {
                out += &format!("  {i}\n");
            }
        }
        for s in &self.stages {
            let split = match s.split {
                Some(true) => "split",
                Some(false) => "not split",
                None => "-",
            };
            let g: Vec<String> = s.graded_dims.iter().map(usize::to_string).collect();
            out += &format!("stage {}: graded ({}), dim P = {}, {split}\n", s.stage, g.join(","), s.primitive_dim);
            if verbose {
                for x in &s.new_generators {
                    out += &format!("  + {x}\n");
                }
            }
        }
        for v in &self.verdicts {
            out += &format!("[{}] {}", if v.passed { "pass" } else { "FAIL" }, v.name);
            if let Some(w) = &v.detail {
                out += &format!(": {w}");
            }
            out += "\n";
        }
        if verbose {
            out += &format!("config:\n{}\n", render_config(&self.config));
        }
        out
    }
}

pub fn run(cfg: &JobConfig) -> Result<Report, CliError> {
    validate(cfg)?;
    with_field!(cfg.field, run_typed(cfg))
}

fn run_typed<F: Field>(cfg: &JobConfig) -> Result<Report, CliError> {
    let job = build_job::<F>(cfg)?;
    let mut report = Report::new(cfg);
    let d = cfg.degree;
    match cfg.task {
        Task::Check => task_check(&job, d, &mut report)?,
        Task::Primitives => task_primitives(&job, d, &mut report)?,
        Task::Nichols => task_nichols(&job, d, &mut report)?,
        Task::Rank => task_rank(&job, d, &mut report)?,
        Task::Envelope => task_envelope(&job, d, &mut report)?,
        Task::Reconstruct => task_reconstruct(&job, d, &mut report)?,
        Task::OracleCompare => task_oracle(&job, d, &mut report)?,
        Task::IdealTower => task_ideal_tower(&job, d, &mut report)?,
    }
    Ok(report)
}

fn tensor_algebra<F: Field>(job: &Job<F>, d: usize) -> Arc<TruncatedTensorAlgebra<F>> {
    Arc::new(TruncatedTensorAlgebra::new(job.space.clone(), d))
}

fn task_check<F: Field>(job: &Job<F>, d: usize, report: &mut Report) -> Result<(), CliError> {
    let bs = &job.space;
    report.line(format!("dim V = {}", bs.dim()));
    report.line(format!("minimal polynomial of c: {}", render_polynomial(&bs.minimal_polynomial())));
    if let Some(q) = bs.hecke_mark() {
        report.line(format!("Hecke type with q = {q}"));
    }
    report.line(match class_s_evidence(bs) {
        Some(why) => format!("class S: {why}"),
        None => "class S: no sufficient evidence".into(),
    });
    let t = tensor_algebra(job, d);
    for c in t.check_bialgebra_axioms().checks {
        report.verdict(c.name, c.passed, c.witness);
    }
    match &job.bracket {
        Some(BracketJob::Explicit(stages)) if !stages.is_empty() => {
            let ts = TowerState::initial(t)?;
            let b = &stages[0];
            if b.cols() != ts.primitives().dim() {
                return Err(CliError::Config(format!(
                    "bracket stage 0 must be {}x{} against the primitive basis",
                    ts.n(),
                    ts.primitives().dim()
                )));
            }
            let witness = compat_witness(&ts, b)?;
            report.verdict("bracket compatibility (stage 0)", witness.is_none(), witness);
            report.verdict("bracket split (stage 0)", check_split(&ts, b)?, None);
        }
        Some(BracketJob::Classical(sc)) => {
            let witness = sc.jacobi_witness().map(|([i, j, k], v)| {
                let v: Vec<String> = v.iter().map(ToString::to_string).collect();
                format!("(x{}, x{}, x{}) gives ({})", i + 1, j + 1, k + 1, v.join(", "))
            });
            report.verdict("Jacobi identity", witness.is_none(), witness);
        }
        _ => {}
    }
    Ok(())
}

fn task_primitives<F: Field>(job: &Job<F>, d: usize, report: &mut Report) -> Result<(), CliError> {
    let t = tensor_algebra(job, d);
    let mut graded = vec![0];
    for k in 1..=d {
        graded.push(t.primitives_of_degree(k)?.dim());
    }
    report.table("graded primitives dim P(T)_d", graded);
    let ts = TowerState::initial(t)?;
    report.table("filtered primitives dim P(T) ∩ F_d", (0..=d).map(|k| ts.primitives().dim_at(k)).collect());
    report.listing(
        "canonical primitive basis (columns of a bracket matrix)",
        ts.primitives().elements().iter().map(|p| ts.lift(p).to_string()).collect(),
    );
    Ok(())
}

fn task_nichols<F: Field>(job: &Job<F>, d: usize, report: &mut Report) -> Result<(), CliError> {
    let rep = nichols_truncation(job.space.clone(), d)?;
    report.line(format!("combinatorial rank {} (at truncation {d})", rep.rank));
    report.line(format!("total dimension {} (at truncation {d})", rep.total_dim()));
    report.table("graded dims", rep.graded_dims.clone());
    report.listing("basis", rep.basis.iter().map(ToString::to_string).collect());
    report.listing("relations", rep.relations.iter().map(ToString::to_string).collect());
    stage_records(&rep.run, report)?;
    let last = rep.run.final_stage();
    report.verdict(
        "primitives of the limit are V (at truncation)",
        last.section_injective() && last.primitives().dim() == last.n(),
        None,
    );
    Ok(())
}

fn task_rank<F: Field>(job: &Job<F>, d: usize, report: &mut Report) -> Result<(), CliError> {
    let rep = nichols_truncation(job.space.clone(), d)?;
    report.line(format!("combinatorial rank {} (at truncation {d})", rep.rank));
    for (k, s) in rep.run.stages.iter().enumerate() {
        report.table(format!("S^[{k}] graded dims"), s.quotient().graded_dims());
    }
    stage_records(&rep.run, report)?;
    Ok(())
}

/// Runs the tower of the configured bracket (trivial when absent).
fn bracket_run<F: Field>(job: &Job<F>, d: usize, report: &mut Report) -> Result<TowerRun<F>, CliError> {
    let t = tensor_algebra(job, d);
    let max = crate::envelope::max_stages();
    let run = match &job.bracket {
        None | Some(BracketJob::Trivial) => run_tower(t, &TrivialBracket, max)?,
        Some(BracketJob::Classical(sc)) => classical_envelope(sc, d)?,
        Some(BracketJob::Explicit(stages)) => run_tower(t, &ExplicitBracket { stages: stages.clone() }, max)?,
        Some(BracketJob::RankOne(beta)) => {
            let r = rank_one_envelope(job.space.clone(), beta, d)?;
            if let Some(why) = &r.class_s {
                report.line(format!("class S: {why}"));
            }
            if let Some(reached) = r.limit_reached {
                report.line(format!("S^[1] is the limit: {reached} (at truncation {d})"));
            }
            TowerRun {
                rule: "rank-one (Id_V + β)".into(),
                stages: vec![TowerState::initial(t)?, r.stage_one],
                brackets: Vec::new(),
                splits: Vec::new(),
                stabilized_at: None,
                stopped: Some("rank-one envelope: only stage 1 is computed".into()),
            }
        }
    };
    report.line(format!("bracket: {}", run.rule));
    match (run.stabilized_at, &run.stopped) {
        (Some(k), _) => report.line(format!("stabilized after {k} step(s) (at truncation {d})")),
        (None, Some(why)) => report.line(format!("stopped: {why}")),
        (None, None) => {}
    }
    Ok(run)
}

fn stage_records<F: Field>(run: &TowerRun<F>, report: &mut Report) -> Result<(), CliError> {
    for (k, s) in run.stages.iter().enumerate() {
        let new_generators = match k.checked_sub(1).map(|p| run.stages[p].ideal()) {
            None => Vec::new(),
            Some(prev) => {
                let mut out = Vec::new();
                for g in s.ideal().generators() {
                    if !prev.contains(g)? {
                        out.push(g.to_string());
                    }
                }
                out
            }
        };
        report.stages.push(StageRecord {
            stage: k,
            graded_dims: s.quotient().graded_dims(),
            filtered_dims: s.quotient().filtered_dims(),
            primitive_dim: s.primitives().dim(),
            split: run.splits.get(k).copied(),
            new_generators,
        });
    }
    Ok(())
}

fn task_envelope<F: Field>(job: &Job<F>, d: usize, report: &mut Report) -> Result<(), CliError> {
    let run = bracket_run(job, d, report)?;
    let last = run.final_stage();
    report.table("filtered dims of the final stage", last.quotient().filtered_dims());
    report.table("graded dims of the final stage", last.quotient().graded_dims());
    report.table("primitives dim P ∩ F_d of the final stage", (0..=d).map(|k| last.primitives().dim_at(k)).collect());
    stage_records(&run, report)?;
    if matches!(job.bracket, Some(BracketJob::Explicit(_))) {
        let nichols = nichols_truncation(job.space.clone(), d)?;
        let trivial = detect_trivial_bracket(&run, &nichols.relations)?;
        report.line(format!("bracket acts as the trivial bracket: {trivial} (at truncation {d})"));
    }
    if let Some(b) = run.brackets.first() {
        let ts = &run.stages[0];
        report.verdict("bracket compatibility (stage 0)", check_bracket_compat(ts, b)?, None);
    }
    if !matches!(job.bracket, Some(BracketJob::RankOne(_))) {
        report.verdict("implicit Jacobi identity (at truncation)", check_implicit_jacobi(&run), run.stopped.clone());
    }
    Ok(())
}

fn task_reconstruct<F: Field>(job: &Job<F>, d: usize, report: &mut Report) -> Result<(), CliError> {
    let run = bracket_run(job, d, report)?;
    let q = run.final_stage().quotient();
    if !q.is_finite_at_truncation() {
        return Err(Error::Refused(format!(
            "U is not finite-dimensional at truncation {d}; reconstruct needs a finite algebra"
        ))
        .into());
    }
    let a = FiniteBraidedBialgebra::from_tables(&q.structure_tables()?)?;
    report.line(format!("A = final stage, dim {}", a.dim()));
    let rep = reconstruct(&a, d)?;
    report.line(format!("dim P(A) = {}, dim U(P(A)) = {}, rank φ = {}", rep.dim_p, rep.dim_u, rep.rank_phi));
    report.verdict("φ multiplicative", rep.multiplicative, None);
    report.verdict("φ comultiplicative", rep.comultiplicative, None);
    report.verdict("φ braided", rep.braided, None);
    report.verdict("φ bijective (at truncation)", rep.rank_phi == rep.dim_a && rep.dim_u == rep.dim_a, None);
    report.verdict("implicit Jacobi identity of P(A) (at truncation)", rep.implicit_jacobi, None);
    Ok(())
}

fn task_oracle<F: Field>(job: &Job<F>, d: usize, report: &mut Report) -> Result<(), CliError> {
    let top = d.min(SYMMETRIZER_MAX_DEGREE);
    let lb = LiftedBraiding::new(job.space.clone());
    let sym = nichols_dims_via_symmetrizer(&lb, top)?;
    let nichols = nichols_truncation(job.space.clone(), top)?;
    report.table("Nichols dims via tower", nichols.graded_dims.clone());
    report.table("Nichols dims via symmetrizer", sym.clone());
    report.verdict("symmetrizer ranks equal tower dims", sym == nichols.graded_dims, None);
    if job.space.is_flip() {
        let mut bad = None;
        'outer: for a in 1..d {
            for b in 1..=d - a {
                if !permutation_lift_check(&lb, a, b)? {
                    bad = Some(format!("c_{{{a},{b}}}"));
                    break 'outer;
                }
            }
        }
        report.verdict("lifted flips are block swaps", bad.is_none(), bad);
    }
    if let Some(BracketJob::Classical(sc)) = &job.bracket {
        let run = classical_envelope(sc, d)?;
        let tower = run.final_stage().quotient().filtered_dims();
        report.table("classical envelope filtered dims", tower.clone());
        match pbw_dims(sc, d) {
            Ok(pbw) => {
                report.table("PBW filtered dims", pbw.clone());
                report.verdict("PBW count equals envelope dims", pbw == tower, None);
            }
            Err(e @ Error::Refused(_)) => report.verdict("PBW count equals envelope dims", false, Some(e.to_string())),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

fn task_ideal_tower<F: Field>(job: &Job<F>, d: usize, report: &mut Report) -> Result<(), CliError> {
    let run = bracket_run(job, d, report)?;
    let chain = ideal_tower(&run, None)?;
    for (k, i) in chain.tower.iter().enumerate() {
        report.table(format!("dim I_{k} ∩ F_d (tower)"), i.dims());
    }
    for (k, i) in chain.chain.iter().enumerate() {
        report.table(format!("dim I_{k} ∩ F_d (primitive chain)"), i.dims());
    }
    stage_records(&run, report)?;
    let detail = chain.mismatch.map(|(k, deg)| format!("first difference at stage {k}, degree {deg}"));
    report.verdict("Ker(π₀ⁿ) equals the primitive chain", chain.agrees(), detail);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{"field":"Q","space":{"diagonal":[["-1","1"],["-1","-1"]]},"degree":5,"task":"rank"}"#;

    #[test]
    fn minimal_flip_config_is_valid() {
        let cfg = parse_config(r#"{"space":{"flip":2},"task":"check"}"#).unwrap();
        assert_eq!(cfg.field, FieldSpec::Rationals);
        assert_eq!(cfg.degree, DEFAULT_DEGREE);
        assert_eq!(cfg.output, OutputFormat::Text);
    }

    #[test]
    fn zero_q_entry_is_an_invalid_braiding() {
        let err = parse_config(r#"{"space":{"diagonal":[["-1","0"],["-1","-1"]]},"task":"nichols"}"#).unwrap_err();
        assert!(err.to_string().contains("invalid braiding"), "{err}");
        assert_eq!(err.exit_code(), 2);
        // 2 vanishes in F2
        let err = parse_config(r#"{"field":"F2","space":{"diagonal":[["2"]]},"task":"nichols"}"#).unwrap_err();
        assert!(err.to_string().contains("invalid braiding"), "{err}");
    }

    #[test]
    fn antisymmetry_violation_names_indices() {
        let text = r#"{"space":{"flip":2},"task":"envelope",
            "bracket":{"kind":"classical","constants":[[["0","0"],["1","0"]],[["0","0"],["0","0"]]]}}"#;
        let err = parse_config(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("[x1,x2]") && msg.contains("x1"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_keys_and_fields_are_rejected() {
        let err = parse_config(r#"{"space":{"flip":1},"task":"check","colour":"red"}"#).unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
        assert!(parse_config(r#"{"field":"F4","space":{"flip":1},"task":"check"}"#).is_err());
        assert!(parse_config(r#"{"space":{"flip":1},"task":"envelope"}"#).is_err());
        let err = parse_config("{\n  \"space\": {\"flip\": 1},\n  \"task\": \"check\",\n}").unwrap_err();
        assert!(err.to_string().contains("line 4"), "{err}");
    }

    #[test]
    fn round_trip() {
        let cfg = parse_config(EXAMPLE).unwrap();
        assert_eq!(parse_config(&render_config(&cfg)).unwrap(), cfg);
        assert_eq!("oracle-compare".parse::<Task>().unwrap(), Task::OracleCompare);
        assert_eq!("F7".parse::<FieldSpec>().unwrap(), FieldSpec::Prime(7));
    }

    #[test]
    fn rank_and_nichols_on_the_example() {
        let mut cfg = parse_config(EXAMPLE).unwrap();
        let rep = run(&cfg).unwrap();
        assert!(rep.summary.contains(&"combinatorial rank 2 (at truncation 5)".to_string()));
        cfg.task = Task::Nichols;
        let rep = run(&cfg).unwrap();
        assert_eq!(rep.tables[0].values, vec![1, 2, 2, 2, 1, 0]);
        assert_eq!(rep.listings[1].items, vec!["x1.x1", "x2.x2", "x1.x2.x1.x2 + x2.x1.x2.x1"]);
        assert_eq!(rep.exit_code(), 0);
        let text = rep.render_text(false);
        assert!(text.contains("graded dims: (1,2,2,2,1,0)"), "{text}");
    }

    #[test]
    fn check_on_flip_passes() {
        let cfg = parse_config(r#"{"space":{"flip":2},"degree":4,"task":"check"}"#).unwrap();
        let rep = run(&cfg).unwrap();
        assert!(rep.passed(), "{}", rep.render_text(false));
        assert!(rep.verdicts.iter().any(|v| v.name == "Br5"));
    }
}
