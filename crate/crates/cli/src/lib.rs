//! Batch front end: `validate`, `domain`, `plan`, `solve`, `eval`, `convergence`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use symhyp_core::algebraic::{format_rational, parse_rational, pow2, Rational, RealAlgebraic};
use symhyp_core::certify::{certify, compare_with_solution, interp_eval, restrict_h, Interpolant};
use symhyp_core::engine::{precompute, run_with, Backend, CauchyClosure, GridLayer, GridTrace, LayerData, RunOptions};
use symhyp_core::planner::{choose_tau, plan, rounding_bits, GridPlan, Plan};
use symhyp_core::problem::{compute_domain, parse_problem_str, validate, DomainH, HyperbolicProblem, ProblemError, ProblemKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

fn rt(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BackendArg {
    Exact,
    Dyadic,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ClosureArg {
    Cone,
    Periodic,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Dyadic => Backend::Dyadic,
        }
    }
}

impl From<ClosureArg> for CauchyClosure {
    fn from(c: ClosureArg) -> Self {
        match c {
            ClosureArg::Cone => CauchyClosure::Cone,
            ClosureArg::Periodic => CauchyClosure::Periodic,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "symhyp", about = "Certified Godunov solver for symmetric hyperbolic systems")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the hypotheses on the coefficients and boundary data.
    Validate {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Characteristic-speed extrema and the horizon T.
    Domain {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Grid plan and error budget.
    Plan {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run the scheme and emit layers, certificate and report.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "dyadic")]
        backend: BackendArg,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "cone")]
        closure: ClosureArg,
        /// Write every k-th layer (the last layer is always written).
        #[arg(long, default_value_t = 1)]
        every: u64,
        #[arg(long)]
        json: bool,
    },
    /// Interpolated value of a written trace at (t, x...).
    Eval {
        file: PathBuf,
        /// layers.csv written by `solve`.
        trace: PathBuf,
        t: String,
        x: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Errors at successive N against the exact solution (decoupled
    /// problems) or the finest level.
    Convergence {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: u32,
        #[arg(long)]
        start_n: Option<u32>,
        #[arg(long, value_enum, default_value = "dyadic")]
        backend: BackendArg,
        #[arg(long, value_enum, default_value = "cone")]
        closure: ClosureArg,
        #[arg(long)]
        json: bool,
    },
}

pub fn load_problem(path: &Path) -> Result<HyperbolicProblem, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    parse_problem_str(&text).map_err(|e| match e {
        ProblemError::Parse { .. } | ProblemError::Structure(_) | ProblemError::Arity { .. } => {
            CliError::Parse(e.to_string())
        }
        other => CliError::Runtime(other.to_string()),
    })
}

fn dec(x: &RealAlgebraic) -> String {
    x.to_decimal(6)
}

fn enc(x: &RealAlgebraic) -> Value {
    x.to_json()
}

fn require_valid(p: &HyperbolicProblem) -> Result<(), CliError> {
    let r = validate(p);
    if r.passed() {
        Ok(())
    } else {
        let names: Vec<String> = r.failures().map(|c| c.name.clone()).collect();
        Err(CliError::Invalid(format!("validation failed: {}", names.join(", "))))
    }
}

fn domain_of(p: &HyperbolicProblem) -> Result<DomainH, CliError> {
    compute_domain(p).map_err(|e| match e {
        ProblemError::NoDomain { .. } | ProblemError::MissingHorizon | ProblemError::Horizon(_) => {
            CliError::Invalid(e.to_string())
        }
        other => rt(other),
    })
}

pub fn domain_json(d: &DomainH) -> Value {
    json!({
        "axes": (0..d.mu_min.len()).map(|i| json!({
            "axis": i + 1,
            "mu_min": enc(&d.mu_min[i]),
            "mu_max": enc(&d.mu_max[i]),
            "mu_min_decimal": dec(&d.mu_min[i]),
            "mu_max_decimal": dec(&d.mu_max[i]),
        })).collect::<Vec<_>>(),
        "T_apex": d.t_apex.as_ref().map(enc),
        "T_apex_decimal": d.t_apex.as_ref().map(dec),
        "T": format_rational(&d.t),
    })
}

fn plan_json(pl: &Plan) -> Value {
    json!({"plan": pl.grid.to_json(), "budget": pl.budget.to_json()})
}

fn cmd_validate(file: &Path, as_json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let p = load_problem(file)?;
    let r = validate(&p);
    if as_json {
        writeln!(out, "{}", serde_json::to_string_pretty(&r).map_err(rt)?).map_err(rt)?;
    } else {
        for c in &r.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                writeln!(out, "{tag} {}", c.name).map_err(rt)?;
            } else {
                writeln!(out, "{tag} {}: {}", c.name, c.detail).map_err(rt)?;
            }
        }
        for w in &r.warnings {
            writeln!(out, "WARN {w}").map_err(rt)?;
        }
        if let Some(s) = r.strongly_dissipative {
            writeln!(out, "strongly dissipative: {s}").map_err(rt)?;
        }
        writeln!(out, "{}", if r.passed() { "valid" } else { "invalid" }).map_err(rt)?;
    }
    Ok(if r.passed() { EXIT_OK } else { EXIT_INVALID })
}

fn cmd_domain(file: &Path, as_json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let p = load_problem(file)?;
    require_valid(&p)?;
    let d = domain_of(&p)?;
    if as_json {
        writeln!(out, "{}", serde_json::to_string_pretty(&domain_json(&d)).map_err(rt)?).map_err(rt)?;
    } else {
        for i in 0..d.mu_min.len() {
            writeln!(
                out,
                "axis {}: mu_min = {} ({}), mu_max = {} ({})",
                i + 1,
                enc(&d.mu_min[i]),
                dec(&d.mu_min[i]),
                enc(&d.mu_max[i]),
                dec(&d.mu_max[i])
            )
            .map_err(rt)?;
        }
        if let Some(a) = &d.t_apex {
            writeln!(out, "T_apex = {} ({})", enc(a), dec(a)).map_err(rt)?;
        }
        writeln!(out, "T = {}", format_rational(&d.t)).map_err(rt)?;
    }
    Ok(EXIT_OK)
}

pub fn planned(p: &HyperbolicProblem) -> Result<(DomainH, Plan), CliError> {
    require_valid(p)?;
    let d = domain_of(p)?;
    let pl = plan(p, &d).map_err(rt)?;
    Ok((d, pl))
}

fn cmd_plan(file: &Path, as_json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let p = load_problem(file)?;
    let (_, pl) = planned(&p)?;
    if as_json {
        writeln!(out, "{}", serde_json::to_string_pretty(&plan_json(&pl)).map_err(rt)?).map_err(rt)?;
    } else {
        let g = &pl.grid;
        let b = &pl.budget;
        let f = format_rational;
        writeln!(out, "N = {}, h = {}", g.n_level, f(&g.h)).map_err(rt)?;
        writeln!(out, "tau = {}, L = {}, T = {}", f(&g.tau), g.steps, f(&g.t)).map_err(rt)?;
        writeln!(out, "CFL bound (rounded down) = {}", f(&g.tau_bound)).map_err(rt)?;
        writeln!(out, "P_bound = {} ({})", f(&g.p_bound), dec(&RealAlgebraic::from_rational(g.p_bound.clone()))).map_err(rt)?;
        writeln!(out, "kappa = {}", dec(&RealAlgebraic::from_rational(g.kappa.clone()))).map_err(rt)?;
        writeln!(out, "budget: discretisation {}, rounding {}", f(&g.budget_disc), f(&g.budget_round)).map_err(rt)?;
        writeln!(out, "dyadic precision bits = {}", g.dyadic_precision_bits).map_err(rt)?;
        writeln!(
            out,
            "terms: interpolation {}, scheme {}, rounding allowance {}",
            f(&b.interpolation_term),
            f(&b.scheme_term),
            f(&b.rounding_term)
        )
        .map_err(rt)?;
    }
    Ok(EXIT_OK)
}

struct SolveArgs<'a> {
    file: &'a Path,
    backend: Backend,
    out_dir: &'a Path,
    closure: CauchyClosure,
    every: u64,
    as_json: bool,
}

fn cmd_solve(a: SolveArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let start = Instant::now();
    let p = load_problem(a.file)?;
    let (_, pl) = planned(&p)?;
    let t_plan = start.elapsed();
    let sd = precompute(&p, &pl.grid, a.closure).map_err(rt)?;
    let t_pre = start.elapsed();
    let opts = RunOptions { backend: a.backend, closure: a.closure, keep_every: a.every };
    let trace = run_with(&p, &pl.grid, &sd, &opts, |_| {}).map_err(rt)?;
    let t_run = start.elapsed();
    fs::create_dir_all(a.out_dir).map_err(rt)?;
    let layers_path = a.out_dir.join("layers.csv");
    let mut w = std::io::BufWriter::new(fs::File::create(&layers_path).map_err(rt)?);
    trace.write_csv(&mut w).map_err(rt)?;
    w.flush().map_err(rt)?;
    let mut outputs = vec![layers_path.display().to_string()];
    let cert = certify(&p, &trace, &pl.grid, &pl.budget, &sd);
    let summary = match &cert {
        Ok(c) => {
            let cp = a.out_dir.join("certificate.json");
            fs::write(&cp, serde_json::to_string_pretty(&c.to_json()).map_err(rt)?).map_err(rt)?;
            outputs.push(cp.display().to_string());
            json!({"claim": c.claim, "total": format_rational(&c.total()), "target": format_rational(&c.target()),
                   "total_decimal": dec(&RealAlgebraic::from_rational(c.total()))})
        }
        Err(e) => json!({"refused": e.to_string()}),
    };
    let rp = a.out_dir.join("report.json");
    outputs.push(rp.display().to_string());
    let report = json!({
        "command": "solve",
        "file": a.file.display().to_string(),
        "backend": a.backend.as_str(),
        "closure": (p.kind == ProblemKind::Cauchy).then(|| a.closure.as_str()),
        "every": a.every,
        "timings_ms": {
            "plan": t_plan.as_millis() as u64,
            "precompute": (t_pre - t_plan).as_millis() as u64,
            "run": (t_run - t_pre).as_millis() as u64,
        },
        "outputs": outputs,
        "certificate": summary,
    });
    fs::write(&rp, serde_json::to_string_pretty(&report).map_err(rt)?).map_err(rt)?;
    if a.as_json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report).map_err(rt)?).map_err(rt)?;
    } else {
        writeln!(out, "N = {}, L = {}, backend = {}", pl.grid.n_level, pl.grid.steps, a.backend.as_str()).map_err(rt)?;
        for o in &outputs {
            writeln!(out, "wrote {o}").map_err(rt)?;
        }
        match &cert {
            Ok(c) => writeln!(out, "certificate: {} (terms sum to {})", c.claim, dec(&RealAlgebraic::from_rational(c.total())))
                .map_err(rt)?,
            Err(e) => writeln!(out, "{e}").map_err(rt)?,
        }
    }
    match cert {
        Ok(_) => Ok(EXIT_OK),
        Err(e) => Err(rt(e)),
    }
}

/// Reads `layers.csv` back into a trace for `plan`.
pub fn read_trace(path: &Path, p: &HyperbolicProblem, g: &GridPlan) -> Result<GridTrace, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let cells = g.cells() as usize;
    let ny = if p.m == 2 { cells } else { 1 };
    let n = p.n;
    let mut layers: Vec<GridLayer> = Vec::new();
    for (ln, line) in text.lines().enumerate().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 3 + n {
            return Err(CliError::Parse(format!("{}:{}: expected {} fields", path.display(), ln + 1, 3 + n)));
        }
        let bad = |what: &str| CliError::Parse(format!("{}:{}: bad {what}", path.display(), ln + 1));
        let l: u64 = f[0].parse().map_err(|_| bad("layer"))?;
        let i: usize = f[1].parse().map_err(|_| bad("i"))?;
        let j: usize = f[2].parse().map_err(|_| bad("j"))?;
        if i == 0 || i > cells || j == 0 || j > ny {
            return Err(CliError::Invalid("trace does not match the planned grid".into()));
        }
        if layers.last().is_none_or(|x| x.level != l) {
            layers.push(GridLayer {
                level: l,
                time: &g.tau * Rational::from_integer(l.into()),
                nx: cells,
                ny,
                n,
                data: LayerData::Exact(vec![Rational::from_integer(0.into()); cells * ny * n]),
            });
        }
        let layer = layers.last_mut().unwrap();
        let LayerData::Exact(v) = &mut layer.data else { unreachable!() };
        for k in 0..n {
            v[((i - 1) * ny + (j - 1)) * n + k] = parse_rational(f[3 + k]).map_err(|_| bad("value"))?;
        }
    }
    Ok(GridTrace {
        layers,
        plan: g.clone(),
        backend: Backend::Exact,
        closure: None,
        rounding_spent: Rational::from_integer(0.into()),
        residual_norms: vec![],
        m: p.m,
    })
}

fn cmd_eval(file: &Path, trace: &Path, t: &str, x: &[String], as_json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let p = load_problem(file)?;
    let (d, pl) = planned(&p)?;
    let tr = read_trace(trace, &p, &pl.grid)?;
    let t = parse_rational(t).map_err(|e| CliError::Parse(e.to_string()))?;
    let x: Vec<Rational> =
        x.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>().map_err(|e| CliError::Parse(e.to_string()))?;
    let itp = Interpolant::new(&tr);
    let itp = if p.kind == ProblemKind::Cauchy { restrict_h(itp, &d) } else { itp };
    let v = interp_eval(&itp, &t, &x).map_err(|e| CliError::Invalid(e.to_string()))?;
    let bound = trace
        .parent()
        .map(|dir| dir.join("certificate.json"))
        .and_then(|c| fs::read_to_string(c).ok())
        .and_then(|s| serde_json::from_str::<Value>(&s).ok())
        .and_then(|c| c.get("total").and_then(Value::as_str).map(str::to_string));
    if as_json {
        let vals: Vec<String> = v.iter().map(format_rational).collect();
        writeln!(out, "{}", json!({"value": vals, "sL2_error_bound": bound})).map_err(rt)?;
    } else {
        let vals: Vec<String> =
            v.iter().map(|r| format!("{} ({})", format_rational(r), dec(&RealAlgebraic::from_rational(r.clone())))).collect();
        writeln!(out, "u = [{}]", vals.join(", ")).map_err(rt)?;
        if let Some(b) = bound {
            writeln!(out, "sL2 error bound of the trace: {b}").map_err(rt)?;
        }
    }
    Ok(EXIT_OK)
}

/// Exact transport solution of a Cauchy problem with diagonal A and B_i
/// and f = 0.
pub fn transport_oracle(p: &HyperbolicProblem) -> Option<impl Fn(&Rational, &[Rational]) -> Vec<Rational> + '_> {
    if p.f.is_some() || p.kind != ProblemKind::Cauchy {
        return None;
    }
    let diag = |m: &symhyp_core::linalg::ExactMatrix| {
        let r = m.to_rationals()?;
        let zero = Rational::from_integer(0.into());
        (0..p.n).all(|i| (0..p.n).all(|j| i == j || r[i][j] == zero)).then_some(r)
    };
    let a = diag(&p.a)?;
    let bs: Vec<Vec<Vec<Rational>>> = p.b.iter().map(diag).collect::<Option<_>>()?;
    let speeds: Vec<Vec<Rational>> = (0..p.n).map(|k| bs.iter().map(|b| &b[k][k] / &a[k][k]).collect()).collect();
    Some(move |t: &Rational, x: &[Rational]| {
        (0..p.n)
            .map(|k| {
                let pt: Vec<Rational> = x.iter().zip(&speeds[k]).map(|(xi, mu)| xi - mu * t).collect();
                p.phi.components()[k].eval(&pt).expect("arity")
            })
            .collect()
    })
}

/// `base` moved to level N: h = 2^-N, tau from the CFL rule, precision
/// re-planned for the new step count. Budgets are kept.
pub fn level_plan(p: &HyperbolicProblem, d: &DomainH, base: &GridPlan, n_level: u32) -> GridPlan {
    let pencils = p.pencils().expect("validated problem");
    let h = pow2(-(n_level as i64));
    let (tau, steps, tau_bound) = choose_tau(&h, &pencils, &d.t);
    let dyadic_precision_bits =
        rounding_bits(&base.kappa, steps, p.n, p.m, &h, &(&base.budget_round / Rational::from_integer(4.into())));
    GridPlan { n_level, h, tau, steps, tau_bound, dyadic_precision_bits, ..base.clone() }
}

/// One convergence level: (N, h, error).
pub type Level = (u32, Rational, Rational);

/// Runs levels `start..start + levels` at the problem's horizon and
/// returns the error of each against the oracle (or the finest level).
pub fn convergence_table(
    p: &HyperbolicProblem,
    start: u32,
    levels: u32,
    backend: Backend,
    closure: CauchyClosure,
) -> Result<(Vec<Level>, bool), CliError> {
    let (d, base) = planned(p)?;
    p.pencils().map_err(rt)?;
    let mk_plan = |n_level: u32| level_plan(p, &d, &base.grid, n_level);
    let dom = (p.kind == ProblemKind::Cauchy).then_some(&d);
    let oracle = transport_oracle(p);
    let opts = RunOptions { backend, closure, keep_every: 1 };
    let mut out = Vec::new();
    if let Some(o) = &oracle {
        for n_level in start..start + levels {
            let g = mk_plan(n_level);
            let sd = precompute(p, &g, closure).map_err(rt)?;
            let mut worst = Rational::from_integer(0.into());
            run_with(p, &g, &sd, &RunOptions { keep_every: u64::MAX, ..opts }, |layer| {
                let e = symhyp_core::certify::layer_error(layer, &g.h, p.m, dom, o);
                if e > worst {
                    worst = e;
                }
            })
            .map_err(rt)?;
            out.push((n_level, g.h.clone(), worst));
        }
        return Ok((out, true));
    }
    // self-reference: finest level interpolated at the coarse nodes
    let fine_n = start + levels;
    let gf = mk_plan(fine_n);
    let sdf = precompute(p, &gf, closure).map_err(rt)?;
    let fine = run_with(p, &gf, &sdf, &opts, |_| {}).map_err(rt)?;
    let itp = Interpolant::new(&fine);
    let fine_solution = |t: &Rational, x: &[Rational]| interp_eval(&itp, t, x).expect("inside the cylinder");
    for n_level in start..start + levels {
        let g = mk_plan(n_level);
        let sd = precompute(p, &g, closure).map_err(rt)?;
        let tr = run_with(p, &g, &sd, &opts, |_| {}).map_err(rt)?;
        out.push((n_level, g.h.clone(), compare_with_solution(&tr, dom, &fine_solution)));
    }
    Ok((out, false))
}

#[allow(clippy::too_many_arguments)]
fn cmd_convergence(
    file: &Path,
    levels: u32,
    start_n: Option<u32>,
    backend: Backend,
    closure: CauchyClosure,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let p = load_problem(file)?;
    let (_, pl) = planned(&p)?;
    let start = start_n.unwrap_or(pl.grid.n_level);
    let (table, oracle) = convergence_table(&p, start, levels.max(1), backend, closure)?;
    let to_f = |r: &Rational| RealAlgebraic::from_rational(r.clone()).to_decimal(8);
    let ratios: Vec<Option<String>> = table
        .windows(2)
        .map(|w| {
            let zero = Rational::from_integer(0.into());
            (w[1].2 != zero).then(|| to_f(&(&w[0].2 / &w[1].2)))
        })
        .collect();
    if as_json {
        let rows: Vec<Value> = table
            .iter()
            .map(|(n, h, e)| json!({"N": n, "h": format_rational(h), "error": format_rational(e), "error_decimal": to_f(e)}))
            .collect();
        writeln!(out, "{}", json!({"reference": if oracle { "exact" } else { "finest level" }, "levels": rows, "ratios": ratios}))
            .map_err(rt)?;
    } else {
        writeln!(out, "reference: {}", if oracle { "exact transport solution" } else { "finest level" }).map_err(rt)?;
        writeln!(out, "N\th\terror\tratio").map_err(rt)?;
        for (k, (n, h, e)) in table.iter().enumerate() {
            let r = if k == 0 { "-".to_string() } else { ratios[k - 1].clone().unwrap_or_else(|| "-".into()) };
            writeln!(out, "{n}\t{}\t{}\t{r}", format_rational(h), to_f(e)).map_err(rt)?;
        }
    }
    Ok(EXIT_OK)
}

/// Runs one command, printing to `out`; returns the exit code.
pub fn run_command(cli: Cli, out: &mut dyn Write) -> i32 {
    let res = match cli.cmd {
        Command::Validate { file, json } => cmd_validate(&file, json, out),
        Command::Domain { file, json } => cmd_domain(&file, json, out),
        Command::Plan { file, json } => cmd_plan(&file, json, out),
        Command::Solve { file, backend, out: dir, closure, every, json } => cmd_solve(
            SolveArgs { file: &file, backend: backend.into(), out_dir: &dir, closure: closure.into(), every, as_json: json },
            out,
        ),
        Command::Eval { file, trace, t, x, json } => cmd_eval(&file, &trace, &t, &x, json, out),
        Command::Convergence { file, levels, start_n, backend, closure, json } => {
            cmd_convergence(&file, levels, start_n, backend.into(), closure.into(), json, out)
        }
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

/// Parses `args` (including the program name) and runs.
pub fn main_with_args(args: impl IntoIterator<Item = String>, out: &mut dyn Write) -> i32 {
    match Cli::try_parse_from(args) {
        Ok(cli) => run_command(cli, out),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
