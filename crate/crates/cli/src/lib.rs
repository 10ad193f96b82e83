//! Command-line front end: argument parsing, validated run configuration,
//! dispatch into `v19-core` and canonical JSON reports.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use v19_core::algebra::{default_arity, verify_algebra, verify_relation_sampled, RelationId};
use v19_core::bruteforce::{partition_bruteforce, partition_monodromy, BoundaryKind, BoundarySpec};
use v19_core::field::{bit_height, format_rational, int, parse_rational, rat, Rational};
use v19_core::monodromy::{compute_f, compute_fbar, compute_z};
use v19_core::sampling::{random_context_with_m, random_rational, rng_from_seed};
use v19_core::structure::verify_structure;
use v19_core::weights::{check_ybe, r_matrix};
use v19_core::zh::solve::{solve_zh, Backend, SolveOptions};
use v19_core::zh::tables::{compare_tables, table_sweep};
use v19_core::{make_context, Model, ModelContext};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] v19_core::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("cannot encode report: {0}")]
    Json(#[from] serde_json::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "v19",
    version,
    about = "Exact computations for the IK and FZ nineteen-vertex models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Report destination; "-" or "json" write to standard output.
    #[arg(long, global = true, default_value = "-")]
    pub output: String,
    /// Include wall-clock timing (makes the report run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify identities.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Evaluate a partition function.
    #[command(subcommand)]
    Compute(ComputeCommand),
    /// Solve the ZH functional system for the ansatz coefficients.
    Solve(SolveArgs),
    /// Compare two-site solutions with the reference tables at sampled q.
    Tables(TablesArgs),
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Yang-Baxter equation at random spectral parameters.
    Ybe(YbeArgs),
    /// Commutation relations of the monodromy entries.
    Algebra(AlgebraArgs),
    /// Degrees, zeros, symmetry and initial condition.
    Structure(StructureArgs),
}

#[derive(Debug, Subcommand)]
pub enum ComputeCommand {
    /// Z(X1, …, XL) through the monodromy matrix.
    Z(PointArgs),
    /// F(U | Y1, Y2).
    F(PointArgs),
    /// F̄(Y1, Y2 | U).
    Fbar(PointArgs),
    /// Direct sum over lattice configurations.
    Bruteforce(BruteforceArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelArg {
    Ik,
    Fz,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::Ik => Model::Ik,
            ModelArg::Fz => Model::Fz,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BackendArg {
    Rational,
    Modular,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BoundaryArg {
    Z,
    F,
    Fbar,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// p = q^(1/2) as NUM/DEN.
    #[arg(long)]
    pub p: Option<String>,
    /// Multiplicative inhomogeneities m_j = e^(2 mu_j), comma separated;
    /// defaults to all ones (mu = 0).
    #[arg(long, value_delimiter = ',')]
    pub mu: Vec<String>,
    /// Number of lattice sites; defaults to the number of --mu values.
    #[arg(long = "L", alias = "l")]
    pub size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct YbeArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Fixed p; drawn per sample when absent.
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct AlgebraArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long = "L", alias = "l")]
    pub size: usize,
    #[arg(long, default_value_t = 5)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Restrict to one relation, e.g. G1AB, AEL, HHb2.
    #[arg(long)]
    pub relation: Option<String>,
}

#[derive(Debug, Args)]
pub struct StructureArgs {
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Lattice parameters X (Z) or U (F, F̄), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<String>,
    /// Y1,Y2 for F and F̄.
    #[arg(long, value_delimiter = ',')]
    pub y: Vec<String>,
}

#[derive(Debug, Args)]
pub struct BruteforceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "z")]
    pub boundary: BoundaryArg,
    /// Row parameters, bottom row first.
    #[arg(long, value_delimiter = ',')]
    pub x: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "modular")]
    pub backend: BackendArg,
    /// Samples per assembly (two equations each); default 2.5 rows per unknown.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Use the symmetrized lattice basis (default for L ≥ 3).
    #[arg(long)]
    pub symmetric: Option<bool>,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// Model; both when absent.
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    #[arg(long = "q-samples", default_value_t = 5)]
    pub q_samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "modular")]
    pub backend: BackendArg,
}

/// Fully validated configuration, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub model: Option<Model>,
    #[serde(serialize_with = "opt_rational")]
    pub p: Option<Rational>,
    #[serde(serialize_with = "rationals")]
    pub mu: Vec<Rational>,
    #[serde(rename = "L")]
    pub size: Option<usize>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub backend: Option<Backend>,
    pub boundary: Option<BoundaryKind>,
    #[serde(serialize_with = "rationals")]
    pub x: Vec<Rational>,
    #[serde(serialize_with = "rationals")]
    pub y: Vec<Rational>,
    pub relation: Option<String>,
    pub symmetric: Option<bool>,
    pub output: String,
}

fn rationals<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

fn opt_rational<S: serde::Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_some(&format_rational(r)),
        None => s.serialize_none(),
    }
}

fn parse_list(values: &[String], what: &str) -> CliResult<Vec<Rational>> {
    values
        .iter()
        .map(|v| parse_rational(v).map_err(|e| CliError::Config(format!("--{what}: {e}"))))
        .collect()
}

fn parse_p(p: &Option<String>) -> CliResult<Option<Rational>> {
    p.as_deref()
        .map(|t| parse_rational(t).map_err(|e| CliError::Config(format!("--p: {e}"))))
        .transpose()
}

fn base_config(command: &str, output: &str) -> RunConfig {
    RunConfig {
        command: command.into(),
        model: None,
        p: None,
        mu: Vec::new(),
        size: None,
        samples: None,
        seed: 0,
        backend: None,
        boundary: None,
        x: Vec::new(),
        y: Vec::new(),
        relation: None,
        symmetric: None,
        output: output.into(),
    }
}

/// Resolves the model parameters. p defaults to 3/2 and m to all ones.
fn model_config(cfg: &mut RunConfig, args: &ModelArgs) -> CliResult<()> {
    cfg.model = Some(args.model.into());
    cfg.p = Some(parse_p(&args.p)?.unwrap_or_else(|| rat(3, 2)));
    let mu = parse_list(&args.mu, "mu")?;
    let size = match (args.size, mu.len()) {
        (Some(l), 0) => l,
        (Some(l), n) if l == n => l,
        (Some(l), n) => {
            return Err(CliError::Config(format!("--L {l} but {n} --mu values")));
        }
        (None, 0) => return Err(CliError::Config("give --L or --mu".into())),
        (None, n) => n,
    };
    if size == 0 {
        return Err(CliError::Config("--L must be positive".into()));
    }
    cfg.mu = if mu.is_empty() {
        vec![int(1); size]
    } else {
        mu
    };
    cfg.size = Some(size);
    cfg.seed = args.seed;
    Ok(())
}

impl RunConfig {
    /// Validates parsed arguments into a configuration.
    pub fn from_cli(cli: &Cli) -> CliResult<RunConfig> {
        let out = cli.output.as_str();
        let cfg = match &cli.command {
            Command::Verify(VerifyCommand::Ybe(a)) => {
                let mut c = base_config("verify-ybe", out);
                c.model = Some(a.model.into());
                c.p = parse_p(&a.p)?;
                c.samples = Some(a.samples);
                c.seed = a.seed;
                c
            }
            Command::Verify(VerifyCommand::Algebra(a)) => {
                let mut c = base_config("verify-algebra", out);
                if a.size == 0 {
                    return Err(CliError::Config("--L must be positive".into()));
                }
                if let Some(r) = &a.relation {
                    relation_by_name(r)?;
                }
                c.model = Some(a.model.into());
                c.size = Some(a.size);
                c.samples = Some(a.samples);
                c.seed = a.seed;
                c.relation = a.relation.clone();
                c
            }
            Command::Verify(VerifyCommand::Structure(a)) => {
                let mut c = base_config("verify-structure", out);
                model_config(&mut c, &a.model)?;
                c
            }
            Command::Compute(cmd) => {
                let (name, margs) = match cmd {
                    ComputeCommand::Z(a) => ("compute-z", &a.model),
                    ComputeCommand::F(a) => ("compute-f", &a.model),
                    ComputeCommand::Fbar(a) => ("compute-fbar", &a.model),
                    ComputeCommand::Bruteforce(a) => ("compute-bruteforce", &a.model),
                };
                let mut c = base_config(name, out);
                model_config(&mut c, margs)?;
                let size = c.size.expect("set by model_config");
                match cmd {
                    ComputeCommand::Z(a) => {
                        c.x = parse_list(&a.x, "x")?;
                        expect_len(&c.x, size, "--x")?;
                    }
                    ComputeCommand::F(a) | ComputeCommand::Fbar(a) => {
                        c.x = parse_list(&a.x, "x")?;
                        c.y = parse_list(&a.y, "y")?;
                        expect_len(&c.x, size - 1, "--x")?;
                        expect_len(&c.y, 2, "--y")?;
                    }
                    ComputeCommand::Bruteforce(a) => {
                        let kind = match a.boundary {
                            BoundaryArg::Z => BoundaryKind::Z,
                            BoundaryArg::F => BoundaryKind::F,
                            BoundaryArg::Fbar => BoundaryKind::Fbar,
                        };
                        c.boundary = Some(kind);
                        c.x = parse_list(&a.x, "x")?;
                        let rows = BoundarySpec::preset(kind, size)?.rows;
                        expect_len(&c.x, rows, "--x")?;
                    }
                }
                c
            }
            Command::Solve(a) => {
                let mut c = base_config("solve", out);
                model_config(&mut c, &a.model)?;
                if c.size.unwrap_or(0) > 3 {
                    return Err(CliError::Config("solve supports L ≤ 3".into()));
                }
                c.backend = Some(backend(a.backend));
                c.samples = a.samples;
                c.symmetric = a.symmetric;
                c
            }
            Command::Tables(a) => {
                let mut c = base_config("tables", out);
                c.model = a.model.map(Into::into);
                c.samples = Some(a.q_samples);
                c.seed = a.seed;
                c.backend = Some(backend(a.backend));
                c.size = Some(2);
                c
            }
        };
        Ok(cfg)
    }

    fn context(&self) -> CliResult<ModelContext> {
        let model = self
            .model
            .ok_or_else(|| CliError::Config("missing --model".into()))?;
        let p = self
            .p
            .clone()
            .ok_or_else(|| CliError::Config("missing --p".into()))?;
        Ok(make_context(model, p, self.mu.clone())?)
    }
}

fn backend(b: BackendArg) -> Backend {
    match b {
        BackendArg::Rational => Backend::Rational,
        BackendArg::Modular => Backend::Modular,
    }
}

fn expect_len(v: &[Rational], n: usize, flag: &str) -> CliResult<()> {
    if v.len() == n {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{flag} needs {n} values, got {}",
            v.len()
        )))
    }
}

fn relation_by_name(name: &str) -> CliResult<RelationId> {
    RelationId::all()
        .into_iter()
        .find(|r| format!("{r:?}").eq_ignore_ascii_case(name))
        .ok_or_else(|| CliError::Config(format!("unknown relation {name:?}")))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: RunConfig,
    pub seed: u64,
    pub result: Value,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

fn value_of(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

/// Dispatches a validated configuration to the owning module.
pub fn run(cfg: &RunConfig) -> CliResult<Report> {
    let (result, pass) = match cfg.command.as_str() {
        "verify-ybe" => run_ybe(cfg)?,
        "verify-algebra" => run_algebra(cfg)?,
        "verify-structure" => {
            let report = verify_structure(&cfg.context()?, cfg.seed)?;
            let pass = report.pass;
            (serde_json::to_value(report)?, pass)
        }
        "compute-z" | "compute-f" | "compute-fbar" => {
            let ctx = cfg.context()?;
            let value = match cfg.command.as_str() {
                "compute-z" => compute_z(&ctx, &cfg.x)?,
                "compute-f" => compute_f(&ctx, &cfg.x, &cfg.y[0], &cfg.y[1])?,
                _ => compute_fbar(&ctx, &cfg.y[0], &cfg.y[1], &cfg.x)?,
            };
            (json!({ "value": value_of(&value) }), true)
        }
        "compute-bruteforce" => {
            let ctx = cfg.context()?;
            let kind = cfg.boundary.unwrap_or(BoundaryKind::Z);
            let bnd = BoundarySpec::preset(kind, ctx.size())?;
            let value = partition_bruteforce(&ctx, &bnd, &cfg.x)?;
            let mono = partition_monodromy(&ctx, kind, &cfg.x)?;
            let agree = value == mono;
            (
                json!({
                    "value": value_of(&value),
                    "monodromy": value_of(&mono),
                    "agree": agree,
                    "internal_edges": bnd.internal_edges(),
                }),
                agree,
            )
        }
        "solve" => run_solve(cfg)?,
        "tables" => run_tables(cfg)?,
        other => return Err(CliError::Config(format!("unknown command {other:?}"))),
    };
    Ok(Report {
        config: cfg.clone(),
        seed: cfg.seed,
        result,
        pass,
        elapsed_ms: None,
    })
}

fn run_ybe(cfg: &RunConfig) -> CliResult<(Value, bool)> {
    let model = cfg.model.expect("validated");
    let samples = cfg.samples.unwrap_or(20);
    let mut rng = rng_from_seed(cfg.seed);
    let mut failures = Vec::new();
    let mut max_bits = 0;
    for i in 0..samples {
        let ctx = match &cfg.p {
            Some(p) => make_context(model, p.clone(), vec![int(1)])?,
            None => random_context_with_m(&mut rng, model, vec![int(1)]),
        };
        let x12 = random_rational(&mut rng, 40, 9);
        let x13 = random_rational(&mut rng, 40, 9);
        let x23 = &x13 / &x12;
        for x in [&x12, &x13, &x23] {
            let r = r_matrix(&ctx, x)?;
            for k in 0..81 {
                max_bits = max_bits.max(bit_height(r.at(k / 9, k % 9)));
            }
        }
        if !check_ybe(&ctx, &x12, &x13)? {
            failures.push(json!({
                "sample": i,
                "p": value_of(ctx.p()),
                "x12": value_of(&x12),
                "x13": value_of(&x13),
            }));
        }
    }
    let pass = failures.is_empty();
    Ok((
        json!({
            "samples": samples,
            "failures": failures.len(),
            "failed_samples": failures,
            "max_entry_bits": max_bits,
        }),
        pass,
    ))
}

fn run_algebra(cfg: &RunConfig) -> CliResult<(Value, bool)> {
    let model = cfg.model.expect("validated");
    let size = cfg.size.expect("validated");
    let samples = cfg.samples.unwrap_or(5);
    let residuals = match &cfg.relation {
        Some(name) => {
            let rel = relation_by_name(name)?;
            verify_relation_sampled(
                model,
                rel,
                size,
                default_arity(rel, size),
                samples,
                cfg.seed,
            )?
        }
        None => verify_algebra(model, size, samples, cfg.seed)?,
    };
    let failures = residuals.iter().filter(|r| !r.operator_norm_zero).count();
    Ok((
        json!({ "residuals": residuals, "failures": failures }),
        failures == 0,
    ))
}

fn run_solve(cfg: &RunConfig) -> CliResult<(Value, bool)> {
    let ctx = cfg.context()?;
    let size = ctx.size();
    let opts = SolveOptions {
        backend: cfg.backend.unwrap_or_default(),
        symmetric: cfg.symmetric,
        samples: cfg.samples,
        seed: cfg.seed,
        ..SolveOptions::default()
    };
    let sol = solve_zh(&ctx, size, &opts)?;
    let mut pass = sol.pass;
    let tables = if size == 2 && ctx.inhomogeneities().iter().all(|m| *m == int(1)) {
        let report = compare_tables(&ctx, &sol)?;
        pass &= report.pass;
        Some(report)
    } else {
        None
    };
    Ok((json!({ "solution": sol, "tables": tables }), pass))
}

fn run_tables(cfg: &RunConfig) -> CliResult<(Value, bool)> {
    let models = match cfg.model {
        Some(m) => vec![m],
        None => Model::ALL.to_vec(),
    };
    let opts = SolveOptions {
        backend: cfg.backend.unwrap_or_default(),
        seed: cfg.seed,
        ..SolveOptions::default()
    };
    let mut reports = Vec::new();
    for model in models {
        reports.extend(table_sweep(model, cfg.samples.unwrap_or(5), &opts)?);
    }
    let pass = reports.iter().all(|r| r.pass);
    Ok((json!({ "reports": reports }), pass))
}

/// Canonical JSON: object keys sorted, two-space indentation, trailing
/// newline.
pub fn to_canonical_json(report: &Report) -> CliResult<String> {
    // serde_json's default map is ordered by key, so converting through
    // `Value` sorts every object.
    let value = serde_json::to_value(report)?;
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text)
}

/// Writes the report to `path`, or to standard output for "-" and "json".
pub fn emit(report: &Report, path: &str) -> CliResult<()> {
    let text = to_canonical_json(report)?;
    if path == "-" || path == "json" {
        let mut out = io::stdout().lock();
        out.write_all(text.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })
    } else {
        fs::write(PathBuf::from(path), text).map_err(|source| CliError::Io {
            path: path.into(),
            source,
        })
    }
}

/// Caps the rayon pool from `V19_THREADS` when set.
pub fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("V19_THREADS") {
        let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::Config(format!("V19_THREADS={v:?} is not a positive integer"))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

/// Runs one command end to end and returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    let result = (|| -> CliResult<bool> {
        configure_threads()?;
        let cfg = RunConfig::from_cli(&cli)?;
        let start = Instant::now();
        let mut report = run(&cfg)?;
        if cli.timing {
            report.elapsed_ms = Some(start.elapsed().as_millis());
        }
        emit(&report, &cfg.output)?;
        Ok(report.pass)
    })();
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e @ CliError::Config(_)) => {
            eprintln!("v19: {e}");
            2
        }
        Err(e) => {
            eprintln!("v19: {e}");
            3
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("v19").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn config_defaults_and_validation() {
        let cli = parse(&["solve", "--model", "fz", "--L", "2", "--p", "2"]);
        let cfg = RunConfig::from_cli(&cli).unwrap();
        assert_eq!(cfg.mu, vec![int(1), int(1)]);
        assert_eq!(cfg.backend, Some(Backend::Modular));

        let cli = parse(&["compute", "z", "--model", "ik", "--mu", "1,2", "--x", "3"]);
        assert!(matches!(
            RunConfig::from_cli(&cli),
            Err(CliError::Config(_))
        ));

        let cli = parse(&[
            "compute", "z", "--model", "ik", "--L", "3", "--mu", "1,2", "--x", "3,4",
        ]);
        assert!(matches!(
            RunConfig::from_cli(&cli),
            Err(CliError::Config(_))
        ));

        let cli = parse(&[
            "verify",
            "algebra",
            "--model",
            "ik",
            "--L",
            "1",
            "--relation",
            "nope",
        ]);
        assert!(matches!(
            RunConfig::from_cli(&cli),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn compute_z_single_site_is_d13() {
        let cli = parse(&[
            "compute", "z", "--model", "ik", "--p", "3/2", "--mu", "2", "--x", "7",
        ]);
        let report = run(&RunConfig::from_cli(&cli).unwrap()).unwrap();
        let ctx = make_context(Model::Ik, rat(3, 2), vec![int(2)]).unwrap();
        let expected =
            v19_core::weights::weight(&ctx, v19_core::weights::WeightName::D(1, 3), &rat(7, 2))
                .unwrap();
        assert_eq!(report.result["value"], value_of(&expected));
        assert!(report.pass);
    }

    #[test]
    fn canonical_json_sorts_keys() {
        let cli = parse(&["verify", "ybe", "--model", "fz", "--samples", "2"]);
        let report = run(&RunConfig::from_cli(&cli).unwrap()).unwrap();
        let text = to_canonical_json(&report).unwrap();
        let config = text.find("\"config\"").unwrap();
        let pass = text.find("\"pass\"").unwrap();
        let result = text.find("\"result\"").unwrap();
        assert!(config < pass && pass < result);
        assert!(!text.contains("elapsed_ms"));
    }
}
