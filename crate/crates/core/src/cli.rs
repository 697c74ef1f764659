//! The `tensorank` command line.
//!
//! JSON goes to `-o` when given, else to stdout. Human-readable tables go to
//! stdout when JSON is written to a file, else to stderr.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::capacity::{
    compare_models, parse_assumption, required_dim_exact, tt_mera_relation_holds, CapacityReport,
    RequiredDim,
};
use crate::decompose::{hosvd_tucker, ht_decompose, tt_svd, DecompositionReport};
use crate::error::Error;
use crate::formats::{Fill, ModelKind, TensorModel, DEFAULT_DENSE_CAP};
use crate::rank_analysis::{
    cannikin_from_profile, rank_profile, separability_profile, CannikinReport, RankProfile,
    SeparabilityProfile,
};
use crate::schmidt::DEFAULT_TOL;
use crate::synth_io::{
    format_tensor, ghz, parse_expression, random_cp, random_dense, read_tensor, sample_grid,
    write_tensor, ReportEnvelope,
};
use crate::tensor::DenseTensor;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "tensorank",
    version,
    about = "Bipartition ranks, decompositions and capacity bounds for tensor models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize a target tensor and write it in the text tensor format.
    Synth(SynthArgs),
    /// Decompose a tensor into TT, Tucker or HT format.
    Decompose(DecomposeArgs),
    /// Rank profile of a tensor, and model comparison with --model.
    Analyze(AnalyzeArgs),
    /// Required bond dimensions under a separability assumption.
    Capacity(CapacityArgs),
}

#[derive(Debug, Args)]
#[group(id = "generator", required = true, multiple = false)]
struct Generator {
    /// Sum of R random rank-1 terms.
    #[arg(long)]
    cp: bool,
    /// e0^{⊗L} + e1^{⊗L}.
    #[arg(long)]
    ghz: bool,
    /// I.i.d. standard normal entries.
    #[arg(long)]
    dense: bool,
    /// Sample an expression in x1..xL on a uniform grid.
    #[arg(long, value_name = "EXPR")]
    expr: Option<String>,
    /// Dense reconstruction of a randomly filled model.
    #[arg(long, value_name = "KIND")]
    model: Option<ModelKind>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[command(flatten)]
    generator: Generator,
    /// Order (number of modes).
    #[arg(long = "L")]
    order: Option<usize>,
    /// Physical dimension per mode.
    #[arg(long = "D", default_value_t = 2)]
    dim: usize,
    /// Number of CP terms.
    #[arg(long = "R", default_value_t = 1)]
    terms: usize,
    /// Uniform bond dimension for --model.
    #[arg(long = "r", default_value_t = 2)]
    rank: usize,
    /// Grid points per variable for --expr.
    #[arg(long = "P", default_value_t = 8)]
    points: usize,
    /// Interval `lo:hi` for every variable of --expr.
    #[arg(long, default_value = "0:1", allow_hyphen_values = true)]
    bounds: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output tensor file; stdout when absent.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    /// Input tensor file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "tt")]
    model: ModelKind,
    /// Bond cap for tt and ht; per-mode cap for tucker without --ranks.
    #[arg(long)]
    max_rank: Option<usize>,
    /// Squared-error budget for tt.
    #[arg(long)]
    eps: Option<f64>,
    /// Comma-separated Tucker ranks.
    #[arg(long, value_delimiter = ',')]
    ranks: Option<Vec<usize>>,
    /// Also write the model as JSON.
    #[arg(long)]
    dump_model: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Input tensor file; without it only the model's graph is analyzed.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    m_max: Option<usize>,
    /// Model whose bond graph is compared with the target.
    #[arg(long)]
    model: Option<ModelKind>,
    /// Uniform bond dimension of the model.
    #[arg(long = "r", default_value_t = 2)]
    rank: usize,
    /// Order of the model when no input is given.
    #[arg(long = "L")]
    order: Option<usize>,
    /// Physical dimension of the model when no input is given.
    #[arg(long = "D")]
    dim: Option<usize>,
    /// Write (m, value) series as CSV.
    #[arg(long)]
    emit_csv: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct CapacityArgs {
    #[arg(long = "L")]
    order: usize,
    #[arg(long = "D", default_value_t = 2)]
    dim: usize,
    /// exp:D, pow:c:alpha, log:c, const:c or table:path; defaults to exp:D.
    #[arg(long)]
    assume: Option<String>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// JSON report path; stdout when absent.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
    /// Leave the timestamp out of the report.
    #[arg(long)]
    no_timestamp: bool,
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            _ if e.is_resource_cap() => EXIT_RESOURCE,
            Error::Assumption(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        let mut message = e.to_string();
        if matches!(&e, Error::SizeCap { what, .. } if what.contains("order")) {
            message.push_str(&format!(
                " (raise {} to allow larger orders)",
                crate::rank_analysis::MAX_ORDER_ENV
            ));
        }
        Self { code, message }
    }
}

type CliResult<T> = Result<T, Failure>;

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Synth(a) => synth(a),
        Command::Decompose(a) => decompose(a),
        Command::Analyze(a) => analyze(a),
        Command::Capacity(a) => capacity(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn parse_bounds(text: &str) -> CliResult<(f64, f64)> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| Failure::usage(format!("--bounds expects lo:hi, got '{text}'")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Failure::usage(format!("--bounds: '{s}' is not a finite number")))
    };
    Ok((parse(lo)?, parse(hi)?))
}

fn need_order(order: Option<usize>, what: &str) -> CliResult<usize> {
    order.ok_or_else(|| Failure::usage(format!("{what} needs --L")))
}

fn synth(a: SynthArgs) -> CliResult<()> {
    let g = &a.generator;
    if a.dim == 0 {
        return Err(Failure::usage("--D must be at least 1"));
    }
    let (t, label) = if g.cp {
        let order = need_order(a.order, "--cp")?;
        if a.terms == 0 {
            return Err(Failure::usage("--R must be at least 1"));
        }
        (
            random_cp(order, a.dim, a.terms, a.seed)?,
            format!("cp R={}", a.terms),
        )
    } else if g.ghz {
        (
            ghz(need_order(a.order, "--ghz")?, a.dim)?,
            "ghz".to_string(),
        )
    } else if g.dense {
        let order = need_order(a.order, "--dense")?;
        (
            random_dense(vec![a.dim; order], a.seed)?,
            "dense".to_string(),
        )
    } else if let Some(text) = &g.expr {
        let ast = parse_expression(text).map_err(|e| Failure::usage(e.to_string()))?;
        let order = a.order.unwrap_or(ast.max_variable().max(1));
        let bounds = vec![parse_bounds(&a.bounds)?; order];
        (
            sample_grid(&ast, order, a.points, &bounds)?,
            format!("expr {ast}"),
        )
    } else if let Some(kind) = g.model {
        let order = need_order(a.order, "--model")?;
        let model = TensorModel::make(kind, order, a.dim, a.rank, Fill::Random(a.seed))
            .map_err(|e| Failure::usage(e.to_string()))?;
        (
            model.to_dense(DEFAULT_DENSE_CAP)?,
            format!("{kind} r={}", a.rank),
        )
    } else {
        unreachable!("clap requires one generator")
    };
    let summary = format!(
        "synthesized {label}: dims {:?}, {} entries, norm {:.6e}, seed {}",
        t.dims(),
        t.len(),
        t.frobenius_norm_sq().sqrt(),
        a.seed
    );
    match &a.output {
        Some(path) => {
            write_tensor(path, &t)?;
            println!("{summary}");
            println!("wrote {}", path.display());
        }
        None => {
            print_stdout(&format_tensor(&t))?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn print_stdout(text: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure {
            code: EXIT_FAILURE,
            message: format!("writing to stdout: {e}"),
        })
}

/// Writes the JSON report and the human table to their destinations.
fn emit<T: Serialize>(kind: &str, report: &T, table: &str, out: &OutputArgs) -> CliResult<()> {
    let json = ReportEnvelope::new(kind, report, !out.no_timestamp).to_json()?;
    match &out.output {
        Some(path) => {
            std::fs::write(path, json).map_err(|e| Error::io(path, e))?;
            print!("{table}");
        }
        None => {
            print_stdout(&json)?;
            eprint!("{table}");
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct DecomposeOutput<'a> {
    model: ModelKind,
    input: String,
    input_dims: Vec<usize>,
    /// TT bond dims, Tucker core dims, or HT ranks level by level.
    ranks: Vec<usize>,
    #[serde(flatten)]
    report: &'a DecompositionReport,
}

fn decompose(a: DecomposeArgs) -> CliResult<()> {
    if a.max_rank == Some(0) {
        return Err(Failure::usage("--max-rank must be at least 1"));
    }
    if let Some(e) = a.eps {
        if !e.is_finite() || e < 0.0 {
            return Err(Failure::usage("--eps must be a finite non-negative number"));
        }
    }
    match a.model {
        ModelKind::Tt | ModelKind::Ht | ModelKind::Tucker => {}
        ModelKind::Mera => return Err(Failure::usage("no decomposition algorithm for mera")),
    }
    if a.ranks.is_some() && a.model != ModelKind::Tucker {
        return Err(Failure::usage("--ranks applies to --model tucker only"));
    }
    if a.eps.is_some() && a.model != ModelKind::Tt {
        return Err(Failure::usage("--eps applies to --model tt only"));
    }
    let t = read_tensor(&a.input)?;
    let (model, report, ranks) = match a.model {
        ModelKind::Tt => {
            let (tt, rep) = tt_svd(&t, a.max_rank, a.eps)?;
            let ranks = tt.bond_dims();
            (TensorModel::Tt(tt), rep, ranks)
        }
        ModelKind::Tucker => {
            let caps = match &a.ranks {
                Some(r) => r.clone(),
                None => t
                    .dims()
                    .iter()
                    .map(|&d| a.max_rank.map_or(d, |m| m.min(d)))
                    .collect(),
            };
            if caps.len() != t.order() {
                return Err(Failure::usage(format!(
                    "--ranks needs {} entries, got {}",
                    t.order(),
                    caps.len()
                )));
            }
            let (tk, rep) = hosvd_tucker(&t, &caps)?;
            let ranks = tk.ranks();
            (TensorModel::Tucker(tk), rep, ranks)
        }
        ModelKind::Ht => {
            let (ht, rep) = ht_decompose(&t, a.max_rank)?;
            let ranks = (0..ht.levels()).flat_map(|h| ht.level_ranks(h)).collect();
            (TensorModel::Ht(ht), rep, ranks)
        }
        ModelKind::Mera => unreachable!("rejected above"),
    };
    if let Some(path) = &a.dump_model {
        let json = serde_json::to_string_pretty(&model).map_err(Error::from)? + "\n";
        std::fs::write(path, json).map_err(|e| Error::io(path, e))?;
    }
    let mut table = String::new();
    let _ = writeln!(
        table,
        "{} of {} (dims {:?})",
        report.algorithm,
        a.input.display(),
        t.dims()
    );
    let _ = writeln!(table, "{:<12} {:>6} {:>14}", "step", "rank", "discarded");
    for s in &report.steps {
        let _ = writeln!(
            table,
            "{:<12} {:>6} {:>14.6e}",
            s.label, s.retained_rank, s.discarded_weight
        );
    }
    let _ = writeln!(
        table,
        "error bound {:.6e}, achieved {:.6e}, relative {:.3e}",
        report.error_bound, report.achieved_error, report.relative_error
    );
    let out = DecomposeOutput {
        model: a.model,
        input: a.input.display().to_string(),
        input_dims: t.dims().to_vec(),
        ranks,
        report: &report,
    };
    emit("decomposition", &out, &table, &a.out)
}

#[derive(Serialize)]
struct ModelSpec {
    kind: ModelKind,
    order: usize,
    dim: usize,
    rank: usize,
}

#[derive(Serialize)]
struct AnalyzeOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rank_profile: Option<RankProfile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<ModelSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cannikin: Option<CannikinReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    separability: Option<SeparabilityProfile>,
}

fn analyze(a: AnalyzeArgs) -> CliResult<()> {
    if !(a.tol > 0.0 && a.tol < 1.0) {
        return Err(Failure::usage("--tol must lie in (0, 1)"));
    }
    if a.input.is_none() && a.model.is_none() {
        return Err(Failure::usage("analyze needs --input, --model, or both"));
    }
    if a.input.is_some() && (a.order.is_some() || a.dim.is_some()) {
        return Err(Failure::usage(
            "--L and --D describe the model only when no --input is given",
        ));
    }
    if a.rank == 0 {
        return Err(Failure::usage("--r must be at least 1"));
    }
    let target: Option<DenseTensor> = a.input.as_ref().map(read_tensor).transpose()?;
    let rank_profile = target
        .as_ref()
        .map(|t| rank_profile(t, a.tol, a.m_max))
        .transpose()?;

    let model = match a.model {
        None => None,
        Some(kind) => {
            let (order, dim) = match &target {
                Some(t) => {
                    let d = t.dims()[0];
                    if t.dims().iter().any(|&x| x != d) {
                        return Err(Failure::usage(
                            "model comparison needs a tensor with equal dims",
                        ));
                    }
                    (t.order(), d)
                }
                None => (
                    need_order(a.order, "--model without --input")?,
                    a.dim.unwrap_or(2),
                ),
            };
            let m = TensorModel::make(kind, order, dim, a.rank, Fill::Zeros)
                .map_err(|e| Failure::usage(e.to_string()))?;
            Some((
                ModelSpec {
                    kind,
                    order,
                    dim,
                    rank: a.rank,
                },
                m.structure_graph(),
            ))
        }
    };
    let separability = model
        .as_ref()
        .map(|(_, g)| separability_profile(g))
        .transpose()?;
    let cannikin = match (&rank_profile, &model) {
        (Some(p), Some((_, g))) => Some(cannikin_from_profile(p, g)?),
        _ => None,
    };

    let mut table = String::new();
    if let Some(p) = &rank_profile {
        let _ = writeln!(table, "rank profile (dims {:?}, tol {:e})", p.dims, p.tol);
        let _ = writeln!(table, "{:>4} {:>8} {:>8} {:>8}", "m", "cuts", "min", "max");
        for l in &p.levels {
            let _ = writeln!(
                table,
                "{:>4} {:>8} {:>8} {:>8}",
                l.m,
                l.entries.len(),
                l.min_rank,
                l.max_rank
            );
        }
    }
    if let (Some((spec, _)), Some(s)) = (&model, &separability) {
        let _ = writeln!(
            table,
            "separability of {} (L={}, D={}, r={})",
            spec.kind, spec.order, spec.dim, spec.rank
        );
        let _ = writeln!(table, "{:>4} {:>6} {:>12}", "m", "n(m)", "min bound");
        for smp in &s.samples {
            let _ = writeln!(
                table,
                "{:>4} {:>6} {:>12}",
                smp.m, smp.n, smp.min_rank_bound
            );
        }
        let _ = writeln!(table, "ssb class: {}", s.ssb_class);
    }
    if let Some(c) = &cannikin {
        let _ = writeln!(table, "cannikin check");
        let _ = writeln!(
            table,
            "{:>4} {:>8} {:>12} {:>6} {:>8}",
            "m", "target", "model", "holds", "aligned"
        );
        for l in &c.levels {
            let _ = writeln!(
                table,
                "{:>4} {:>8} {:>12} {:>6} {:>8}",
                l.m, l.lhs, l.rhs, l.satisfied, l.aligned_satisfied
            );
        }
        let _ = writeln!(
            table,
            "verdict: {} (aligned: {})",
            if c.verdict { "satisfied" } else { "violated" },
            if c.aligned_verdict {
                "satisfied"
            } else {
                "violated"
            }
        );
    }
    if let Some(path) = &a.emit_csv {
        write_csv(path, rank_profile.as_ref(), separability.as_ref())?;
    }
    let out = AnalyzeOutput {
        input: a.input.as_ref().map(|p| p.display().to_string()),
        rank_profile,
        model: model.map(|(spec, _)| spec),
        cannikin,
        separability,
    };
    emit("analysis", &out, &table, &a.out)
}

fn write_csv(
    path: &Path,
    profile: Option<&RankProfile>,
    sep: Option<&SeparabilityProfile>,
) -> CliResult<()> {
    let mut csv = String::from("series,m,value\n");
    if let Some(p) = profile {
        for l in &p.levels {
            let _ = writeln!(csv, "rank_max,{},{}", l.m, l.max_rank);
            let _ = writeln!(csv, "rank_min,{},{}", l.m, l.min_rank);
        }
    }
    if let Some(s) = sep {
        for smp in &s.samples {
            let _ = writeln!(csv, "n,{},{}", smp.m, smp.n);
        }
    }
    std::fs::write(path, csv).map_err(|e| Error::io(path, e).into())
}

#[derive(Serialize)]
struct CapacityOutput {
    #[serde(flatten)]
    report: CapacityReport,
    dim: usize,
    required_dims: Vec<RequiredDim>,
    /// `R_TT = R_MERA^{log₂L − 1}`, when both are defined.
    #[serde(skip_serializing_if = "Option::is_none")]
    tt_mera_relation: Option<bool>,
}

fn capacity(a: CapacityArgs) -> CliResult<()> {
    if a.order < 4 {
        return Err(Failure::usage("--L must be at least 4"));
    }
    if a.dim < 2 {
        return Err(Failure::usage("--D must be at least 2"));
    }
    let spec = a.assume.clone().unwrap_or_else(|| format!("exp:{}", a.dim));
    let n = parse_assumption(&spec).map_err(|e| match e {
        e if e.is_io() => Failure::from(e),
        e => Failure::usage(e.to_string()),
    })?;
    let report = compare_models(&n, a.order)?;
    let required_dims: Vec<RequiredDim> = [ModelKind::Tt, ModelKind::Ht, ModelKind::Mera]
        .into_iter()
        .filter_map(|k| required_dim_exact(k, a.order, a.dim).ok())
        .collect();
    let tt_mera_relation = tt_mera_relation_holds(a.order, a.dim).ok();

    let mut table = String::new();
    let _ = writeln!(table, "capacity for L={} under N = {}", a.order, spec);
    let _ = writeln!(table, "chi_tt_ht  {:.6}", report.chi_tt_ht);
    let _ = writeln!(
        table,
        "chi_mera   {:.6} at m = {:?} (m = L/2 gives {:.6})",
        report.chi_mera.value, report.chi_mera.argmax, report.chi_mera.at_half
    );
    let _ = writeln!(table, "margin     {:.6} bits", report.margin_log2);
    let _ = writeln!(table, "exact dims for D={}", a.dim);
    for r in &required_dims {
        let ceil = r.ceil.map_or("overflow".to_string(), |c| c.to_string());
        let _ = writeln!(
            table,
            "{:<6} {:>14} {:>10}",
            r.model.name(),
            r.exact.to_string(),
            ceil
        );
    }
    let out = CapacityOutput {
        report,
        dim: a.dim,
        required_dims,
        tt_mera_relation,
    };
    emit("capacity", &out, &table, &a.out)
}
