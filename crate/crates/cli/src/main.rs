use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gtrs_core::canonical::reduce_to_standard_form;
use gtrs_core::generate::{generate, generate_complex, RandomSpec, Regime};
use gtrs_core::instance::fmt_f64;
use gtrs_core::oracle::{neighborhood_test, DEFAULT_SEED};
use gtrs_core::secular::build_secular;
use gtrs_core::{
    solve, solve_complex, verify_point, GlobalResult, GtrsError, GtrsInstance, KktPoint, Sense,
    SolveReport, Tolerances,
};
use nalgebra::DVector;

#[derive(Parser)]
#[command(name = "gtrs", version, about = "Global and local minimizers of one quadratic over one quadratic constraint")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Replace every certificate tolerance with this value.
    #[arg(long, global = true, value_name = "FLOAT")]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certified global minimizer.
    Solve {
        instance: PathBuf,
        /// Solve the `[complex]` block of the document and report `z`.
        #[arg(long)]
        complex: bool,
    },
    /// All KKT points with certificates and the local nonglobal minimizers.
    Local { instance: PathBuf },
    /// Certify and classify a given point and multiplier.
    Verify {
        instance: PathBuf,
        /// Comma-separated coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
    },
    /// Secular roots, or a CSV sweep of `φ` over original multipliers.
    Secular {
        instance: PathBuf,
        #[arg(long, num_args = 3, value_names = ["LO", "HI", "NPTS"], allow_hyphen_values = true)]
        sweep: Option<Vec<String>>,
    },
    /// Sample feasible neighbors of a point for objective decrease.
    Oracle {
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[arg(long, default_value_t = 1e-3)]
        radius: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Write a random instance document.
    Gen(GenArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Dimension.
    #[arg(long)]
    n: usize,
    /// Number of coordinates with nonzero constraint curvature in the
    /// diagonal form; all of them when absent.
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// `le` or `eq`.
    #[arg(long, default_value = "eq")]
    sense: String,
    /// `definite-pencil`, `diagonal-only` or `complex`.
    #[arg(long, default_value = "definite-pencil")]
    regime: String,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

enum Failure {
    Solver(GtrsError),
    Usage(String),
}

impl From<GtrsError> for Failure {
    fn from(e: GtrsError) -> Self {
        Self::Solver(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Solver(e) => match e {
                GtrsError::Parse(_)
                | GtrsError::DimensionMismatch { .. }
                | GtrsError::LinearConstraint
                | GtrsError::NotHermitian(_)
                | GtrsError::Io(_) => 2,
                GtrsError::NotSimultaneouslyDiagonalizable => 3,
                GtrsError::CountBoundViolated { .. }
                | GtrsError::NotIsolated { .. }
                | GtrsError::PairingViolation { .. } => 4,
                _ => 1,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Solver(e) => write!(f, "{e}"),
            Self::Usage(m) => f.write_str(m),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("gtrs: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let tol = match cli.tol {
        Some(t) if t > 0.0 && t.is_finite() => Tolerances::with_certificate_tol(t),
        Some(t) => return Err(Failure::Usage(format!("--tol must be positive, got {t}"))),
        None => Tolerances::default(),
    };
    match &cli.command {
        Command::Solve { instance, complex } => cmd_solve(instance, *complex, cli.json, &tol),
        Command::Local { instance } => {
            let report = solve(&load(instance)?, &tol)?;
            Ok(if cli.json {
                to_json(&report)
            } else {
                render_report(&report)
            })
        }
        Command::Verify { instance, x, lambda } => {
            let inst = load(instance)?;
            let pt = verify_point(&inst, &DVector::from_column_slice(x), *lambda, &tol)?;
            Ok(if cli.json {
                to_json(&pt)
            } else {
                let mut s = String::new();
                render_point(&mut s, &pt, "", "");
                s
            })
        }
        Command::Secular { instance, sweep } => cmd_secular(instance, sweep.as_deref(), cli.json, &tol),
        Command::Oracle {
            instance,
            x,
            radius,
            samples,
            seed,
        } => {
            let inst = load(instance)?;
            let rep = neighborhood_test(&inst, &DVector::from_column_slice(x), *radius, *samples, *seed)?;
            Ok(if cli.json {
                to_json(&rep)
            } else {
                format!(
                    "passed: {}\nsamples: {}\nskipped: {}\nworst_violation: {}\n",
                    rep.passed,
                    rep.samples,
                    rep.skipped,
                    fmt_f64(rep.worst_violation)
                )
            })
        }
        Command::Gen(args) => cmd_gen(args),
    }
}

fn load(path: &Path) -> Result<GtrsInstance, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(GtrsInstance::parse(&text)?)
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn cmd_solve(path: &Path, complex: bool, json: bool, tol: &Tolerances) -> Result<String, Failure> {
    let inst = load(path)?;
    if complex {
        let origin = inst
            .complex_origin()
            .ok_or_else(|| Failure::Usage("--complex needs a `[complex]` block".into()))?;
        let out = solve_complex(origin, tol)?;
        if json {
            return Ok(to_json(&serde_json::json!({
                "global": out.report.global,
                "z_re": out.z_re.as_ref().map(|v| v.as_slice().to_vec()),
                "z_im": out.z_im.as_ref().map(|v| v.as_slice().to_vec()),
                "pairing": out.pairing,
                "local_nonglobal": out.report.local_nonglobal.len(),
            })));
        }
        let mut s = String::new();
        render_global(&mut s, &out.report.global);
        if let (Some(re), Some(im)) = (&out.z_re, &out.z_im) {
            let z: Vec<String> = re
                .iter()
                .zip(im.iter())
                .map(|(r, i)| format!("{}{:+}i", fmt_f64(*r), i))
                .collect();
            let _ = writeln!(s, "z = [{}]", z.join(", "));
        }
        let _ = writeln!(
            s,
            "eigenvalue pairing: {} (worst gap {})",
            if out.pairing.passed { "ok" } else { "violated" },
            fmt_f64(out.pairing.worst_gap)
        );
        let _ = writeln!(s, "local nonglobal minimizers: {}", out.report.local_nonglobal.len());
        return Ok(s);
    }
    let report = solve(&inst, tol)?;
    if json {
        return Ok(to_json(&serde_json::json!({
            "global": report.global,
            "diagnostics": report.diagnostics,
        })));
    }
    let mut s = String::new();
    render_global(&mut s, &report.global);
    render_notes(&mut s, &report);
    Ok(s)
}

fn cmd_secular(
    path: &Path,
    sweep: Option<&[String]>,
    json: bool,
    tol: &Tolerances,
) -> Result<String, Failure> {
    let inst = load(path)?;
    let cf = reduce_to_standard_form(&inst, tol)?;
    let sf = build_secular(&cf, tol)?;
    let sigma = cf.scale;
    if let Some(args) = sweep {
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Failure::Usage(format!("bad --sweep value `{s}`")))
        };
        let (lo, hi) = (num(&args[0])?, num(&args[1])?);
        let npts: usize = args[2]
            .parse()
            .map_err(|_| Failure::Usage(format!("bad --sweep count `{}`", args[2])))?;
        if lo.is_nan() || hi.is_nan() || lo >= hi || npts < 2 {
            return Err(Failure::Usage("--sweep needs lo < hi and npts ≥ 2".into()));
        }
        let mut s = String::from("lambda,phi\n");
        for k in 0..npts {
            let l = lo + (hi - lo) * k as f64 / (npts - 1) as f64;
            // original φ(λ) = σ φ̂(σλ); poles are skipped
            if let Ok(v) = sf.eval_phi(sigma * l) {
                let _ = writeln!(s, "{},{}", fmt_f64(l), fmt_f64(sigma * v));
            }
        }
        return Ok(s);
    }
    let roots = sf.find_real_roots(tol)?;
    let lambdas: Vec<f64> = roots.iter().map(|r| r.lambda / sigma).collect();
    let poles: Vec<f64> = sf.poles.iter().map(|p| p / sigma).collect();
    if json {
        return Ok(to_json(&serde_json::json!({
            "roots": lambdas,
            "poles": poles,
            "count_bound": sf.count_bound(),
            "numerator_degree": sf.numerator.degree(),
        })));
    }
    let list = |v: &[f64]| v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(", ");
    Ok(format!(
        "roots: [{}]\npoles: [{}]\ncount bound: {}\n",
        list(&lambdas),
        list(&poles),
        sf.count_bound()
    ))
}

fn cmd_gen(args: &GenArgs) -> Result<String, Failure> {
    let spec = RandomSpec {
        n: args.n,
        n1: args.n1.unwrap_or(args.n),
        sense: Sense::parse(&args.sense)?,
        seed: args.seed,
        regime: Regime::parse(&args.regime)?,
    };
    spec.validate()?;
    let doc = match spec.regime {
        Regime::Complex => {
            let c = generate_complex(&spec);
            c.embed()?.to_document()
        }
        _ => generate(&spec)?.to_document(),
    };
    match &args.out {
        Some(path) => {
            std::fs::write(path, &doc).map_err(GtrsError::from)?;
            Ok(String::new())
        }
        None => Ok(doc),
    }
}

fn vec_text(v: &DVector<f64>) -> String {
    let parts: Vec<String> = v.iter().map(|x| fmt_f64(*x)).collect();
    format!("[{}]", parts.join(", "))
}

fn opt_text(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), fmt_f64)
}

fn render_global(s: &mut String, g: &GlobalResult) {
    let _ = writeln!(s, "global: {}", g.status);
    if let Some(x) = &g.x {
        let _ = writeln!(s, "  x = {}", vec_text(x));
        let _ = writeln!(s, "  lambda = {}", opt_text(g.lambda));
        let _ = writeln!(s, "  value = {}", opt_text(g.value));
        let _ = writeln!(s, "  g(x) = {}", opt_text(g.constraint_value));
        let _ = writeln!(
            s,
            "  kkt residual = {} (scale {})",
            opt_text(g.kkt_residual),
            opt_text(g.kkt_scale)
        );
        let _ = writeln!(s, "  min eig(A + lambda B) = {}", opt_text(g.min_eig));
    }
    if let Some(d) = &g.null_direction {
        let _ = writeln!(s, "  null direction = {}", vec_text(d));
    }
    if let Some(iv) = &g.psd_interval {
        let _ = writeln!(s, "  psd interval = [{}, {}]", fmt_f64(iv.lo), fmt_f64(iv.hi));
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Writes a point; `head` starts the first line and `indent` the rest.
fn render_point(s: &mut String, p: &KktPoint, head: &str, indent: &str) {
    let _ = writeln!(s, "{head}x = {}", vec_text(&p.x));
    let _ = writeln!(
        s,
        "{indent}  lambda = {}  value = {}  class = {}",
        fmt_f64(p.lambda),
        fmt_f64(p.value),
        p.classification
    );
    let _ = writeln!(
        s,
        "{indent}  inertia = {}  phi' = {}  tangent curvature = {}",
        p.inertia,
        opt_text(p.phi_prime),
        opt_text(p.tangent_curv)
    );
    let c = &p.certificates;
    let _ = writeln!(
        s,
        "{indent}  active={} strict_complementarity={} one_negative={} phi_prime_positive={} second_order_positive={}",
        yes(c.active),
        yes(c.strict_complementarity),
        yes(c.one_negative),
        yes(c.phi_prime_positive),
        yes(c.second_order_positive)
    );
    if p.borderline || !p.licq || !p.stationary {
        let _ = writeln!(
            s,
            "{indent}  stationary={} licq={} borderline={}",
            yes(p.stationary),
            yes(p.licq),
            yes(p.borderline)
        );
    }
}

fn render_notes(s: &mut String, r: &SolveReport) {
    let d = &r.diagnostics;
    if d.definiteness_unverified {
        let _ = writeln!(s, "note: no definite combination of A and B was found; candidates were checked by sampling");
    }
    for n in &d.notes {
        let _ = writeln!(s, "note: {n}");
    }
}

fn render_report(r: &SolveReport) -> String {
    let mut s = String::new();
    let d = &r.diagnostics;
    let _ = writeln!(s, "sense: {}", r.sense);
    let _ = writeln!(s, "n = {}, n1 = {}, count bound = {}", d.n, d.n1, d.count_bound);
    render_global(&mut s, &r.global);
    let _ = writeln!(s, "kkt points: {}", r.kkt_all.len());
    for (i, p) in r.kkt_all.iter().enumerate() {
        render_point(&mut s, p, &format!("  [{i}] "), "      ");
    }
    if !d.degenerate_roots.is_empty() {
        let roots: Vec<String> = d.degenerate_roots.iter().map(|l| fmt_f64(*l)).collect();
        let _ = writeln!(s, "degenerate roots: [{}]", roots.join(", "));
    }
    let _ = writeln!(s, "local nonglobal minimizers: {}", r.local_nonglobal.len());
    for p in &r.local_nonglobal {
        let _ = writeln!(
            s,
            "  x = {}  lambda = {}  value = {}",
            vec_text(&p.x),
            fmt_f64(p.lambda),
            fmt_f64(p.value)
        );
    }
    render_notes(&mut s, r);
    s
}
