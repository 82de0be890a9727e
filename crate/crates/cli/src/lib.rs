//! Command-line front end: argument parsing, command dispatch and reports.

pub mod examples;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use qmd_core::algebra::{DecomposeOptions, OperatorAlgebra};
use qmd_core::channel::QuantumChannel;
use qmd_core::multdom::{
    bimodule_residual, genchar2_set, generalized_multiplicative_domain, is_bimodule, md_pi_kraus,
    multiplicative_domain, MultDomResult,
};
use qmd_core::numerics::{subspace_equal, DEFAULT_TOL};
use qmd_core::qec::{correction_suite, kl_subspace_test, ConditionCheck};
use qmd_core::representation::{md_restriction, Representation};
use qmd_core::{io, Error};

#[derive(Debug, Parser)]
#[command(name = "qmd", version, about = "Multiplicative domains and correctable codes of quantum channels")]
pub struct Cli {
    /// Numerical tolerance for rank decisions and equality checks.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Seed for the randomized steps of algebra decomposition.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension, Kraus count, unital/trace-preserving flags and Choi rank.
    Info { channel: PathBuf },
    /// Multiplicative domain of a channel.
    Md { channel: PathBuf },
    /// Generalized multiplicative domain for a representation.
    Mdpi {
        channel: PathBuf,
        representation: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
    },
    /// Whether an algebra is a bimodule for the channel.
    Bimodule { channel: PathBuf, algebra: PathBuf },
    /// Correctability conditions, recovery construction and verification.
    Qec { channel: PathBuf, code: PathBuf },
    /// Built-in worked examples.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExamplesAction {
    /// Run one example (2.1, 3.2, 3.5, 4.2) or `all`.
    Run { name: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Definition,
    Kraus,
    Unit,
    All,
}

/// Process exit status classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    ConditionFailed = 1,
    InputError = 2,
    Refused = 3,
}

impl Status {
    pub fn of_error(e: &Error) -> Status {
        match e {
            Error::Hypothesis { .. } => Status::Refused,
            Error::Inconsistent(_) => Status::ConditionFailed,
            _ => Status::InputError,
        }
    }
}

/// A finished command: its report and exit status.
pub struct Outcome {
    pub report: Value,
    pub status: Status,
}

impl Outcome {
    fn new<T: Serialize>(report: &T, ok: bool) -> Self {
        Outcome {
            report: report::to_value(report),
            status: if ok { Status::Success } else { Status::ConditionFailed },
        }
    }

    pub fn error(e: &Error) -> Self {
        let status = Status::of_error(e);
        Outcome {
            report: json!({ "error": e.to_string(), "exit_code": status as i32 }),
            status,
        }
    }
}

pub fn options(cli: &Cli) -> DecomposeOptions {
    DecomposeOptions {
        seed: cli.seed,
        ..DecomposeOptions::with_tol(cli.tol)
    }
}

fn load_channel(path: &Path) -> qmd_core::Result<QuantumChannel> {
    io::parse_channel(&io::read_json(path)?).map_err(|e| in_file(path, e))
}

/// Prefix parse errors with the file they came from.
fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse { path: inner, message } => Error::Parse {
            path: if inner.is_empty() {
                path.display().to_string()
            } else {
                format!("{}: {inner}", path.display())
            },
            message,
        },
        other => other,
    }
}

#[derive(Serialize)]
struct BlockReport {
    #[serde(rename = "dimA")]
    dim_a: usize,
    #[serde(rename = "dimB")]
    dim_b: usize,
}

#[derive(Serialize)]
struct StructureReport {
    structure: String,
    dim: usize,
    blocks: Vec<BlockReport>,
    kernel_dim: usize,
}

impl StructureReport {
    fn of(alg: &OperatorAlgebra) -> Self {
        StructureReport {
            structure: alg.to_string(),
            dim: alg.dim(),
            blocks: alg
                .blocks()
                .iter()
                .map(|b| BlockReport {
                    dim_a: b.dim_a,
                    dim_b: b.dim_b,
                })
                .collect(),
            kernel_dim: alg.kernel_dim(),
        }
    }
}

#[derive(Serialize)]
struct InfoReport {
    dim: usize,
    kraus_count: usize,
    unital: bool,
    unital_residual: f64,
    trace_preserving: bool,
    tp_residual: f64,
    choi_rank: usize,
}

fn cmd_info(cli: &Cli, path: &Path) -> qmd_core::Result<Outcome> {
    let ch = load_channel(path)?;
    let report = InfoReport {
        dim: ch.dim(),
        kraus_count: ch.kraus().len(),
        unital: ch.is_unital(cli.tol),
        unital_residual: ch.unital_residual(),
        trace_preserving: ch.is_trace_preserving(cli.tol),
        tp_residual: ch.tp_residual(),
        choi_rank: ch.choi_rank(cli.tol)?,
    };
    Ok(Outcome::new(&report, true))
}

#[derive(Serialize)]
struct MdReport {
    method: String,
    #[serde(flatten)]
    structure: StructureReport,
    worst_residual: f64,
    closure_residual: f64,
    /// `φ` restricted to the domain is a *-homomorphism.
    restriction_is_homomorphism: bool,
    matrices: Value,
}

fn cmd_md(cli: &Cli, path: &Path) -> qmd_core::Result<Outcome> {
    let ch = load_channel(path)?;
    let md = multiplicative_domain(&ch, &options(cli))?;
    let restriction = md_restriction(&ch, &md.algebra, cli.tol)?;
    let verified = restriction.verify(cli.tol)?.is_homomorphism();
    let report = MdReport {
        method: md.method.to_string(),
        structure: StructureReport::of(&md.algebra),
        worst_residual: md.worst_residual,
        closure_residual: md.closure_residual,
        restriction_is_homomorphism: verified,
        matrices: json!({ "basis": io::matrices_to_json(md.subspace().basis()) }),
    };
    Ok(Outcome::new(&report, verified))
}

#[derive(Serialize)]
struct MethodReport {
    method: String,
    /// `solved` or `refused`.
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<MethodResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    refusal: Option<String>,
}

#[derive(Serialize)]
struct MethodResult {
    #[serde(flatten)]
    structure: StructureReport,
    worst_residual: f64,
}

#[derive(Serialize)]
struct CrossCheck {
    agree: bool,
    max_angle: f64,
}

#[derive(Serialize)]
struct MdpiReport {
    domain: String,
    multiplicativity_residual: f64,
    adjoint_residual: f64,
    faithful: bool,
    methods: Vec<MethodReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cross_check: Option<CrossCheck>,
    matrices: Value,
}

fn cmd_mdpi(cli: &Cli, channel: &Path, rep_path: &Path, method: MethodArg) -> qmd_core::Result<Outcome> {
    let opts = options(cli);
    let ch = load_channel(channel)?;
    let rep = io::parse_representation(&io::read_json(rep_path)?, Some(ch.dim()), &opts)
        .map_err(|e| in_file(rep_path, e))?;
    let check = rep.ensure_homomorphism(cli.tol)?;
    type Solver = fn(&QuantumChannel, &Representation, &DecomposeOptions) -> qmd_core::Result<MultDomResult>;
    let solvers: Vec<(&str, Solver)> = vec![
        ("definition-system", generalized_multiplicative_domain),
        ("kraus-system", md_pi_kraus),
        ("unit-characterization", genchar2_set),
    ];
    let chosen: Vec<(&str, Solver)> = match method {
        MethodArg::Definition => solvers[..1].to_vec(),
        MethodArg::Kraus => solvers[1..2].to_vec(),
        MethodArg::Unit => solvers[2..].to_vec(),
        MethodArg::All => solvers,
    };
    let mut reports = Vec::new();
    let mut solved: Vec<MultDomResult> = Vec::new();
    for (name, solve) in chosen {
        match solve(&ch, &rep, &opts) {
            Ok(r) => {
                reports.push(MethodReport {
                    method: name.to_string(),
                    status: "solved",
                    result: Some(MethodResult {
                        structure: StructureReport::of(&r.algebra),
                        worst_residual: r.worst_residual,
                    }),
                    refusal: None,
                });
                solved.push(r);
            }
            // A single explicitly requested method reports refusal as an error.
            Err(e @ Error::Hypothesis { .. }) if method == MethodArg::All => reports.push(MethodReport {
                method: name.to_string(),
                status: "refused",
                result: None,
                refusal: Some(e.to_string()),
            }),
            Err(e) => return Err(e),
        }
    }
    let cross_check = if solved.len() > 1 {
        let mut agree = true;
        let mut max_angle: f64 = 0.0;
        for other in &solved[1..] {
            let cmp = subspace_equal(solved[0].subspace(), other.subspace(), 1e3 * cli.tol)?;
            agree &= cmp.equal;
            max_angle = max_angle.max(cmp.max_angle);
        }
        Some(CrossCheck { agree, max_angle })
    } else {
        None
    };
    let ok = cross_check.as_ref().is_none_or(|c| c.agree);
    let report = MdpiReport {
        domain: rep.domain().to_string(),
        multiplicativity_residual: check.multiplicativity,
        adjoint_residual: check.adjoint,
        faithful: check.faithful,
        methods: reports,
        cross_check,
        matrices: json!({ "basis": io::matrices_to_json(solved[0].subspace().basis()) }),
    };
    Ok(Outcome::new(&report, ok))
}

#[derive(Serialize)]
struct BimoduleReport {
    #[serde(flatten)]
    structure: StructureReport,
    bimodule: bool,
    residual: f64,
}

fn cmd_bimodule(cli: &Cli, channel: &Path, alg_path: &Path) -> qmd_core::Result<Outcome> {
    let opts = options(cli);
    let ch = load_channel(channel)?;
    let alg = io::parse_algebra(&io::read_json(alg_path)?, "", Some(ch.dim()), &opts)
        .map_err(|e| in_file(alg_path, e))?;
    let bimodule = is_bimodule(&ch, &alg, cli.tol)?;
    let report = BimoduleReport {
        structure: StructureReport::of(&alg),
        bimodule,
        residual: bimodule_residual(&ch, &alg)?,
    };
    Ok(Outcome::new(&report, bimodule))
}

#[derive(Serialize)]
struct ConditionReport {
    name: &'static str,
    holds: bool,
    residual: Option<f64>,
}

impl ConditionReport {
    fn of(name: &'static str, c: &ConditionCheck) -> Self {
        ConditionReport {
            name,
            holds: c.holds,
            residual: c.residual,
        }
    }
}

#[derive(Serialize)]
struct KlSummary {
    correctable: bool,
    residual: f64,
}

#[derive(Serialize)]
struct RecoverySummary {
    kraus_count: usize,
    multiplicity: usize,
    corrected: bool,
    residual: f64,
}

#[derive(Serialize)]
struct QecReport {
    #[serde(rename = "dimA")]
    dim_a: usize,
    #[serde(rename = "dimB")]
    dim_b: usize,
    correctable: bool,
    conditions: Vec<ConditionReport>,
    noiseless: ConditionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    knill_laflamme: Option<KlSummary>,
    recovery: Option<RecoverySummary>,
    matrices: Value,
}

fn cmd_qec(cli: &Cli, channel: &Path, code_path: &Path) -> qmd_core::Result<Outcome> {
    let ch = load_channel(channel)?;
    let code = io::parse_code(&io::read_json(code_path)?).map_err(|e| in_file(code_path, e))?;
    let suite = correction_suite(&ch, &code, &options(cli))?;
    let knill_laflamme = if code.dim_a() == 1 {
        let kl = kl_subspace_test(&ch, &code, cli.tol)?;
        Some(KlSummary {
            correctable: kl.correctable,
            residual: kl.residual,
        })
    } else {
        None
    };
    let recovery = match (&suite.recovery, &suite.correction) {
        (Some(r), Some(c)) => Some(RecoverySummary {
            kraus_count: r.channel.kraus().len(),
            multiplicity: r.multiplicity,
            corrected: c.corrected,
            residual: c.residual,
        }),
        _ => None,
    };
    let mut matrices = serde_json::Map::new();
    if let Some(rep) = &suite.representation {
        matrices.insert("representation".into(), io::representation_to_json(rep));
    }
    if let Some(r) = &suite.recovery {
        matrices.insert("recovery".into(), io::channel_to_json(&r.channel));
    }
    let report = QecReport {
        dim_a: code.dim_a(),
        dim_b: code.dim_b(),
        correctable: suite.correctable(),
        conditions: vec![
            ConditionReport::of("subsystem correctable", &suite.condition1),
            ConditionReport::of("unit equalities", &suite.condition2),
            ConditionReport::of("Kraus equalities", &suite.condition3),
            ConditionReport::of("domain equals code algebra", &suite.condition4),
        ],
        noiseless: ConditionReport::of("noiseless", &suite.noiseless),
        knill_laflamme,
        recovery,
        matrices: Value::Object(matrices),
    };
    Ok(Outcome::new(&report, suite.correctable()))
}

fn cmd_examples(cli: &Cli, name: &str) -> qmd_core::Result<Outcome> {
    let runs = examples::run(name, &options(cli))?;
    let ok = runs.iter().all(|r| r.failed == 0);
    let report = examples::Summary::of(runs);
    Ok(Outcome::new(&report, ok))
}

/// Run a parsed command line.
pub fn execute(cli: &Cli) -> Outcome {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Outcome::error(&Error::InvalidParameter(format!("--tol must be positive, got {}", cli.tol)));
    }
    let result = match &cli.command {
        Command::Info { channel } => cmd_info(cli, channel),
        Command::Md { channel } => cmd_md(cli, channel),
        Command::Mdpi {
            channel,
            representation,
            method,
        } => cmd_mdpi(cli, channel, representation, *method),
        Command::Bimodule { channel, algebra } => cmd_bimodule(cli, channel, algebra),
        Command::Qec { channel, code } => cmd_qec(cli, channel, code),
        Command::Examples {
            action: ExamplesAction::Run { name },
        } => cmd_examples(cli, name),
    };
    result.unwrap_or_else(|e| Outcome::error(&e))
}

/// Text or JSON for an outcome, as printed on stdout.
pub fn render(cli: &Cli, outcome: &Outcome) -> String {
    if cli.json {
        let mut s = serde_json::to_string_pretty(&outcome.report).expect("JSON values serialize");
        s.push('\n');
        s
    } else if let Some(runs) = outcome.report.get("examples").filter(|_| matches!(cli.command, Command::Examples { .. })) {
        examples::render_text(runs, &outcome.report)
    } else {
        report::render_text(&outcome.report)
    }
}
