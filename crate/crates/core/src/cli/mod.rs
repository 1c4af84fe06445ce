//! Command-line front end: `grapde <command> [flags]`.
//!
//! Exit codes: 0 success or certified, 2 not certified or not converged, 1 usage or input
//! error. Reports are JSON envelopes `{header, result}` written to `--out` or stdout.

mod problem;

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use log::info;
use serde::Serialize;
use serde_json::{json, Value};

pub use problem::{ProblemFile, Resolved};

use crate::continuation::{branch_continuity_report, control_on_branch, grid_points, sweep, write_csv};
use crate::energy::ProblemInstance;
use crate::error::{Error, Result};
use crate::graph::{validate, GraphData, WeightedGraph};
use crate::nonlinearity::{check_continuity, check_hypotheses, check_scalar_hypotheses, HypothesisReport, SamplingConfig, Verdict};
use crate::solvers::{
    ball_radius, bound_certificate_mp, local_min_solve, mountain_pass_solve, negative_endpoint, nonexistence_check,
    uniform_grid, uniqueness_certificate, SolverConfig, SolverKind,
};
use crate::sobolev::embedding_constants;

pub const SCHEMA_ID: &str = "grapde-report/1";

#[derive(Debug, Parser)]
#[command(name = "grapde", version, about = "Solve, certify and sweep poly-Laplacian systems on weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Graph JSON file (demo defaults to the two-vertex path).
    #[arg(long, global = true)]
    graph: Option<PathBuf>,
    /// Problem JSON file.
    #[arg(long, global = true)]
    problem: Option<PathBuf>,
    /// Report path (stdout if absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Solver kind: mp (mountain pass) or min (local minimum).
    #[arg(long, global = true, default_value = "mp", value_parser = ["mp", "min"])]
    kind: String,
    /// Number of uniform grid points on J.
    #[arg(long, global = true, default_value_t = 21)]
    grid: usize,
    /// Residual tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Omit timestamps so identical runs give identical bytes.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Also write the branch as CSV (sweep, control).
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Parameter value, overriding the problem file.
    #[arg(long, global = true, allow_hyphen_values = true)]
    w: Option<f64>,
    /// Cold-start every grid point instead of warm-starting from the neighbour.
    #[arg(long, global = true)]
    cold: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Embedding constants and bound constants.
    Constants,
    /// Hypothesis screening.
    Check,
    /// One solve (--kind mp|min).
    Solve,
    /// Parameter sweep with continuity diagnostics.
    Sweep,
    /// Grid minimization of the control objective over a sweep.
    Control,
    /// Nonexistence evidence (radial-sign condition and multistart).
    Nonexist,
    /// End-to-end pipeline for a builtin example.
    Demo { name: String },
}

#[derive(Serialize)]
struct Header<'a> {
    schema: &'static str,
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<String>,
    seed: u64,
    grid: usize,
    solver: &'a SolverConfig,
    sampling: &'a SamplingConfig,
    graph: GraphSummary,
    problem: &'a Resolved,
}

#[derive(Serialize)]
struct GraphSummary {
    ids: Vec<String>,
    edges: usize,
    warnings: Vec<String>,
}

struct Outcome {
    result: Value,
    ok: bool,
    message: String,
}

/// Parses `argv` (including the program name), runs the command, returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter("GRAPDE_LOG")).try_init();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.workers.unwrap_or(0)).build();
    let res = match pool {
        Ok(pool) => pool.install(|| execute(&cli)),
        Err(e) => Err(Error::Input(format!("cannot start worker pool: {e}"))),
    };
    match res {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_graph(cli: &Cli, demo: bool) -> Result<WeightedGraph<f64>> {
    let data = match &cli.graph {
        Some(p) => GraphData::from_json(&read(p)?)
            .map_err(|e| Error::Input(format!("{}: malformed graph JSON: {e}", p.display())))?,
        None if demo => GraphData::path(2),
        None => return Err(Error::Input("--graph is required".into())),
    };
    let report = validate(&data)?;
    if !report.is_ok() {
        return Err(Error::Input(format!("graph violates its assumptions: {:?}", report.violations)));
    }
    WeightedGraph::from_data(&data)
}

fn execute(cli: &Cli) -> Result<bool> {
    let (name, demo) = match &cli.command {
        Command::Constants => ("constants", None),
        Command::Check => ("check", None),
        Command::Solve => ("solve", None),
        Command::Sweep => ("sweep", None),
        Command::Control => ("control", None),
        Command::Nonexist => ("nonexist", None),
        Command::Demo { name } => ("demo", Some(name.as_str())),
    };
    let graph = Arc::new(load_graph(cli, demo.is_some())?);
    let file = match (demo, &cli.problem) {
        (Some(b), None) => ProblemFile::builtin(b),
        (Some(_), Some(_)) => return Err(Error::Input("demo takes a builtin name, not --problem".into())),
        (None, Some(p)) => ProblemFile::from_json(&read(p)?)
            .map_err(|e| Error::Input(format!("{}: malformed problem JSON: {e}", p.display())))?,
        (None, None) => return Err(Error::Input("--problem is required".into())),
    };
    let mut resolved = file.resolve(&graph)?;
    if let Some(w) = cli.w {
        resolved.w = w;
    }
    let inst = resolved.instance(graph.clone())?;
    let cfg = SolverConfig {
        tol: cli.tol,
        seed: cli.seed,
        ..Default::default()
    };
    let sampling = SamplingConfig::default();
    let kind = SolverKind::parse(&cli.kind).expect("validated by clap");
    let ctx = Ctx { cli, inst: &inst, resolved: &resolved, cfg: &cfg, sampling: &sampling, kind };
    let outcome = match &cli.command {
        Command::Constants => constants(&ctx)?,
        Command::Check => check(&ctx)?,
        Command::Solve => solve(&ctx)?,
        Command::Sweep => sweep_cmd(&ctx, false)?,
        Command::Control => sweep_cmd(&ctx, true)?,
        Command::Nonexist => nonexist(&ctx)?,
        Command::Demo { name } => run_demo(&ctx, name)?,
    };
    let header = Header {
        schema: SCHEMA_ID,
        tool: "grapde",
        version: env!("CARGO_PKG_VERSION"),
        command: name,
        timestamp: (!cli.deterministic).then(|| {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            format!("unix:{secs}")
        }),
        seed: cli.seed,
        grid: cli.grid,
        solver: &cfg,
        sampling: &sampling,
        graph: GraphSummary {
            ids: graph.ids().to_vec(),
            edges: graph.edge_count(),
            warnings: graph.warnings().to_vec(),
        },
        problem: &resolved,
    };
    let text = serde_json::to_string_pretty(&json!({ "header": header, "result": outcome.result }))? + "\n";
    match &cli.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    eprintln!("{}", outcome.message);
    info!("{name} finished: ok = {}", outcome.ok);
    Ok(outcome.ok)
}

struct Ctx<'a> {
    cli: &'a Cli,
    inst: &'a ProblemInstance<f64>,
    resolved: &'a Resolved,
    cfg: &'a SolverConfig,
    sampling: &'a SamplingConfig,
    kind: SolverKind,
}

fn screening(ctx: &Ctx) -> HypothesisReport {
    let i = ctx.inst;
    if i.is_scalar() {
        check_scalar_hypotheses(i.nonlinearity(), i.spec(), i.graph(), i.ord1(), ctx.sampling)
    } else {
        check_hypotheses(i.nonlinearity(), i.spec(), i.graph(), i.ord1(), i.ord2(), ctx.sampling)
    }
}

/// Conditions the existence result of each solver kind rests on. The radial-sign condition
/// is the nonexistence alternative and never part of an existence verdict.
fn relevant_conditions(kind: SolverKind) -> &'static [&'static str] {
    match kind {
        SolverKind::MountainPass => &["F1", "F2", "F3", "F4", "H1", "H2", "H3", "F'1", "F'2", "F'3", "F'4", "H'1", "H'2", "H'3"],
        SolverKind::LocalMin => &["F1", "F2", "H4", "H5", "F'1", "F'2", "H'4"],
    }
}

fn no_failures(r: &HypothesisReport, kind: SolverKind) -> bool {
    let relevant = relevant_conditions(kind);
    r.conditions
        .iter()
        .filter(|c| relevant.contains(&c.name.as_str()))
        .all(|c| !matches!(c.verdict, Verdict::Fail | Verdict::Inconclusive))
}

fn constants(ctx: &Ctx) -> Result<Outcome> {
    let i = ctx.inst;
    let ec = embedding_constants(i.graph(), i.p(), i.q())?;
    let mut notes = Vec::new();
    let ws = uniform_grid(i, ctx.cfg.uniform_grid);
    let mp = match negative_endpoint(i, &ws, ctx.cfg.max_doublings)
        .and_then(|e| bound_certificate_mp(i, &e, f64::NAN))
    {
        Ok(c) => json!({
            "lower_label": c.lower_label, "upper_label": c.upper_label,
            "lower": c.lower, "upper": c.upper, "a": c.a, "m": c.m, "e0": c.e0, "endpoint": c.endpoint,
        }),
        Err(e) => {
            notes.push(format!("mountain-pass bounds unavailable: {e}"));
            Value::Null
        }
    };
    let rho = if i.is_scalar() || i.p() == i.q() {
        match ball_radius(i, &ws, ctx.cfg) {
            Ok(r) => serde_json::to_value(r)?,
            Err(e) => {
                notes.push(e.to_string());
                Value::Null
            }
        }
    } else {
        Value::Null
    };
    Ok(Outcome {
        result: json!({
            "embedding": ec,
            "growth_threshold": ec.growth_threshold(),
            "mountain_pass": mp,
            "ball_radius": rho,
            "notes": notes,
        }),
        ok: true,
        message: format!("b = {:.6e}, d = {:.6e}, threshold = {:.6e}", ec.b, ec.d, ec.growth_threshold()),
    })
}

fn check(ctx: &Ctx) -> Result<Outcome> {
    let report = screening(ctx);
    let mut ok = no_failures(&report, ctx.kind);
    let objective = match ctx.resolved.def.objective_fn(ctx.inst.graph())? {
        Some(g) => {
            let c = check_continuity(&g, ctx.inst.graph(), ctx.inst.spec(), ctx.sampling, ctx.inst.is_scalar());
            ok &= !matches!(c.verdict, Verdict::Fail | Verdict::Inconclusive);
            serde_json::to_value(c)?
        }
        None => Value::Null,
    };
    Ok(Outcome {
        result: json!({ "hypotheses": report, "objective": objective, "relevant": relevant_conditions(ctx.kind) }),
        ok,
        message: if ok { "no relevant screened hypothesis fails".into() } else { "some relevant hypotheses fail".into() },
    })
}

fn solve_value(ctx: &Ctx, kind: SolverKind) -> Result<(Value, bool)> {
    Ok(match kind {
        SolverKind::MountainPass => {
            let r = mountain_pass_solve(ctx.inst, ctx.cfg)?;
            (serde_json::to_value(&r)?, r.certified())
        }
        SolverKind::LocalMin => {
            let i = ctx.inst;
            let spec = i.spec();
            if !i.is_scalar() && spec.d1.is_some() && spec.d2.is_some() {
                let u = uniqueness_certificate(i, ctx.cfg)?;
                let ok = u.minimizer.certified();
                let mut v = serde_json::to_value(&u.minimizer)?;
                v["uniqueness"] = serde_json::to_value(&u)?;
                (v, ok && u.certified)
            } else {
                let r = local_min_solve(i, ctx.cfg)?;
                (serde_json::to_value(&r)?, r.certified())
            }
        }
    })
}

fn solve(ctx: &Ctx) -> Result<Outcome> {
    let (result, ok) = solve_value(ctx, ctx.kind)?;
    Ok(Outcome {
        result,
        ok,
        message: if ok { "certified".into() } else { "not certified".into() },
    })
}

fn sweep_cmd(ctx: &Ctx, control: bool) -> Result<Outcome> {
    let grid = grid_points(&ctx.inst.interval(), ctx.cli.grid);
    let objective = if control {
        Some(ctx.resolved.def.objective_fn(ctx.inst.graph())?.ok_or_else(|| {
            Error::Input("control needs an `objective` in the problem".into())
        })?)
    } else {
        None
    };
    let branch = sweep(ctx.inst, &grid, ctx.kind, ctx.cfg, !ctx.cli.cold)?;
    let diag = branch_continuity_report(ctx.inst, &branch, ctx.cfg)?;
    let mut ok = diag.coverage == 1.0 && diag.norms_within_bounds;
    let mut result = json!({ "branch": branch, "continuity": diag });
    let mut psi = None;
    let mut message = format!("coverage {:.0}%", 100.0 * diag.coverage);
    if let Some(g) = &objective {
        let c = control_on_branch(ctx.inst, &branch, g)?;
        message = format!("minimum psi = {:.6e} at w = {}", c.psi_bar, c.w_bar);
        ok = true;
        psi = Some(c.psi.clone());
        result["control"] = serde_json::to_value(&c)?;
    }
    if let Some(p) = &ctx.cli.csv {
        let f = std::fs::File::create(p)?;
        write_csv(&branch, psi.as_deref(), f)?;
    }
    Ok(Outcome { result, ok, message })
}

fn nonexist(ctx: &Ctx) -> Result<Outcome> {
    let r = nonexistence_check(ctx.inst, ctx.cfg)?;
    let verdict = if r.nonexistence_supported {
        "nonexistence certified (sampled)"
    } else {
        "nonexistence not certified"
    };
    let mut result = serde_json::to_value(&r)?;
    result["verdict"] = json!(verdict);
    Ok(Outcome { result, ok: r.nonexistence_supported, message: verdict.into() })
}

fn run_demo(ctx: &Ctx, name: &str) -> Result<Outcome> {
    let screening = screening(ctx);
    let (mut out, label) = match name {
        "mp-example" => (solve_demo(ctx, SolverKind::MountainPass)?, "mountain_pass"),
        "localmin-example" | "unique-example" => (solve_demo(ctx, SolverKind::LocalMin)?, "local_min"),
        "control-objective" => (sweep_cmd(ctx, true)?, "control"),
        "nonexist-example" => (nonexist(ctx)?, "nonexistence"),
        other => return Err(Error::UnknownBuiltin(other.into())),
    };
    out.result = json!({ "hypotheses": screening, label: out.result });
    Ok(out)
}

fn solve_demo(ctx: &Ctx, kind: SolverKind) -> Result<Outcome> {
    let (result, ok) = solve_value(ctx, kind)?;
    Ok(Outcome { result, ok, message: if ok { "certified".into() } else { "not certified".into() } })
}
