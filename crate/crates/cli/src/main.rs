//! `dialride`: solve, simulate, generate, sweep, run the lower-bound
//! adversary and print the certified constants.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dialride::{
    audit_simulation, eagerize, format_sig, gen_luring, gen_nowaiting_lb, gen_theta_gt2,
    gen_theta_gt2_late, gen_waiting_lb, make_ignore, make_smarterstart, make_smartstart,
    parse_grid, ratio, run_general_lower_bound, simulate, solve_constants, sweep_csv, sweep_theta,
    theta_star, AdversaryConfig, AdversaryError, AnalysisError, Capacity, EventKind, Instance,
    ModelError, OfflineError, OnlineAlgorithm, Replan, SimError, Solver,
};

#[derive(Parser, Debug)]
#[command(
    name = "dialride",
    version,
    about = "Open non-preemptive online Dial-a-Ride on the line"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the offline optimum and a witness schedule.
    Opt {
        file: PathBuf,
        /// Largest instance the exact search accepts.
        #[arg(long, default_value_t = 10)]
        limit: usize,
    },
    /// Simulate an online algorithm (`ignore`, `replan`, `smartstart:Θ`,
    /// `smarterstart[:Θ]`, optionally prefixed by `eager:`).
    Run {
        algorithm: String,
        file: PathBuf,
        /// Largest instance the exact search accepts.
        #[arg(long, default_value_t = 24)]
        limit: usize,
    },
    /// Play the general lower-bound adversary against the eager version of an algorithm.
    Adversary {
        algorithm: String,
        /// Target ratio; defaults to the exact lower bound.
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 1)]
        capacity: usize,
        /// Transcript path; the instance is written next to it with suffix `.instance`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a tight instance (`waiting`, `nowaiting`, `gt2`, `gt2-late`, `luring`).
    Gen {
        family: String,
        theta: f64,
        epsilon: f64,
        #[arg(long, default_value = "1")]
        capacity: Capacity,
        /// Target position of the luring chain.
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit bound curves and simulated ratios on a `lo:hi:step` grid as CSV.
    Sweep {
        grid: String,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the certified constants.
    Bounds,
}

/// A failure with its exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Domain(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Domain(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<OfflineError> for Failure {
    fn from(e: OfflineError) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Offline(e) => e.into(),
            SimError::Model(e) => e.into(),
            SimError::InvalidParameter(_) => Failure::Domain(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<AdversaryError> for Failure {
    fn from(e: AdversaryError) -> Self {
        match e {
            AdversaryError::Sim(e) => e.into(),
            AdversaryError::Offline(e) => e.into(),
            AdversaryError::Model(e) => e.into(),
            AdversaryError::NotEager(_) | AdversaryError::Inconsistent(_) => {
                Failure::Internal(e.to_string())
            }
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Sim(e) => e.into(),
            AnalysisError::Offline(e) => e.into(),
            AnalysisError::Bracketing { .. } => Failure::Internal(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

/// Parses `ignore`, `replan`, `smartstart:Θ` or `smarterstart[:Θ]`, with an
/// optional `eager:` prefix.
fn parse_algorithm(selector: &str, solver: &Solver) -> Result<Box<dyn OnlineAlgorithm>, Failure> {
    if let Some(inner) = selector.strip_prefix("eager:") {
        return Ok(Box::new(eagerize(parse_algorithm(inner, solver)?)));
    }
    let (name, theta) = match selector.split_once(':') {
        Some((n, t)) => {
            let theta = t.parse::<f64>().map_err(|_| {
                Failure::Usage(format!("invalid Θ {t:?} in algorithm {selector:?}"))
            })?;
            (n, Some(theta))
        }
        None => (selector, None),
    };
    let alg: Box<dyn OnlineAlgorithm> = match (name, theta) {
        ("ignore", None) => Box::new(make_ignore().with_solver(*solver)),
        ("replan", None) => Box::new(Replan::with_solver(*solver)),
        ("smartstart", Some(t)) => Box::new(make_smartstart(t)?.with_solver(*solver)),
        ("smarterstart", t) => {
            Box::new(make_smarterstart(t.unwrap_or_else(theta_star))?.with_solver(*solver))
        }
        ("smartstart", None) => {
            return Err(Failure::Usage(
                "smartstart needs a parameter, e.g. smartstart:2".into(),
            ))
        }
        _ => return Err(Failure::Usage(format!(
            "unknown algorithm {selector:?}; expected ignore, replan, smartstart:Θ or smarterstart[:Θ]"
        ))),
    };
    Ok(alg)
}

fn smarterstart_theta(selector: &str) -> Option<f64> {
    let rest = selector.strip_prefix("eager:").unwrap_or(selector);
    match rest.split_once(':') {
        Some(("smarterstart", t)) => t.parse().ok(),
        None if rest == "smarterstart" => Some(theta_star()),
        _ => None,
    }
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Domain(format!("cannot read {}: {e}", path.display())))?;
    Ok(Instance::parse(&text)?)
}

/// Writes `contents` to `path` through a temporary file in the same directory.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| Failure::Domain(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents.as_bytes()).map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

fn emit(out: Option<&Path>, contents: &str) -> Result<String, Failure> {
    match out {
        Some(path) => {
            write_atomic(path, contents)?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(contents.to_string()),
    }
}

fn cmd_opt(file: &Path, limit: usize) -> Result<String, Failure> {
    let inst = read_instance(file)?;
    let solver = Solver::with_limit(limit);
    let query = dialride::OfflineQuery::new(0.0, 0.0, inst.requests().to_vec(), inst.capacity());
    let solution = solver.optimal_schedule(&query)?;
    let mut out = format!("OPT {}\n", format_sig(solution.makespan));
    for e in &solution.schedule.events {
        let kind = match e.kind {
            EventKind::Pickup => "pickup",
            EventKind::Dropoff => "dropoff",
        };
        let _ = writeln!(
            out,
            "{kind} {} t={} x={}",
            e.request,
            format_sig(e.time),
            format_sig(e.position)
        );
    }
    Ok(out)
}

fn cmd_run(selector: &str, file: &Path, limit: usize) -> Result<String, Failure> {
    let inst = read_instance(file)?;
    let solver = Solver::with_limit(limit);
    let mut alg = parse_algorithm(selector, &solver)?;
    let run = simulate(&mut alg, &inst)?;
    let opt = solver.opt(&inst)?;
    let mut out = String::new();
    let _ = writeln!(out, "algorithm {}", alg.name());
    let _ = writeln!(out, "ALG {}", format_sig(run.completion));
    let _ = writeln!(out, "OPT {}", format_sig(opt));
    let _ = writeln!(out, "ratio {}", format_sig(ratio(run.completion, opt)?));
    let right = inst.rightmost();
    if let Some(t) = run.first_arrival(right) {
        let _ = writeln!(out, "arrival x={} t={}", format_sig(right), format_sig(t));
    }
    for (j, rec) in run.records.iter().enumerate() {
        let _ = writeln!(
            out,
            "schedule {} t={} p={} end_t={} end_p={}",
            j + 1,
            format_sig(rec.start_time),
            format_sig(rec.start_position),
            format_sig(rec.end_time),
            format_sig(rec.end_position)
        );
    }
    match smarterstart_theta(selector) {
        Some(theta) => {
            let report = audit_simulation(&run, &inst, theta, &solver)?;
            let failures = report.failures();
            if failures.is_empty() {
                let _ = writeln!(out, "audit pass ({} checks)", report.entries.len());
            } else {
                for f in &failures {
                    let _ = writeln!(
                        out,
                        "audit FAIL {:?} schedule {} margin {}",
                        f.check,
                        f.schedule,
                        format_sig(f.margin)
                    );
                }
                print!("{out}");
                return Err(Failure::Internal(format!(
                    "{} audit check(s) failed",
                    failures.len()
                )));
            }
        }
        None => out.push_str("audit n/a\n"),
    }
    Ok(out)
}

fn cmd_adversary(
    selector: &str,
    rho: Option<f64>,
    capacity: usize,
    out: Option<&Path>,
) -> Result<String, Failure> {
    let cfg = match rho {
        Some(r) => AdversaryConfig::new(r, capacity)?,
        None => AdversaryConfig::with_capacity(capacity)?,
    };
    let solver = Solver::default();
    let mut alg = eagerize(parse_algorithm(selector, &solver)?);
    let transcript = run_general_lower_bound(&mut alg, &cfg)?;
    let log = transcript.log_text();
    let mut text = match out {
        Some(path) => {
            write_atomic(path, &log)?;
            let mut inst_path = path.as_os_str().to_owned();
            inst_path.push(".instance");
            let inst_path = PathBuf::from(inst_path);
            write_atomic(&inst_path, &transcript.instance().serialize())?;
            format!("wrote {} and {}\n", path.display(), inst_path.display())
        }
        None => log,
    };
    let _ = writeln!(text, "outcome {:?}", transcript.outcome);
    let _ = writeln!(text, "ALG {}", format_sig(transcript.alg_completion));
    let _ = writeln!(text, "OPT {}", format_sig(transcript.opt_value));
    let _ = writeln!(text, "ratio {}", format_sig(transcript.ratio));
    if transcript.ratio < cfg.rho - 1e-6 {
        print!("{text}");
        return Err(Failure::Internal(format!(
            "ratio {} below rho {}",
            format_sig(transcript.ratio),
            format_sig(cfg.rho)
        )));
    }
    Ok(text)
}

fn cmd_gen(
    family: &str,
    theta: f64,
    eps: f64,
    capacity: Capacity,
    q: f64,
    out: Option<&Path>,
) -> Result<String, Failure> {
    let inst = match family {
        "waiting" => gen_waiting_lb(theta, eps, capacity)?,
        "nowaiting" => gen_nowaiting_lb(theta, eps, capacity)?,
        "gt2" => gen_theta_gt2(theta, eps, capacity)?,
        "gt2-late" => gen_theta_gt2_late(theta, eps, capacity)?,
        "luring" => gen_luring(q, eps, theta, capacity)?,
        _ => {
            return Err(Failure::Usage(format!(
                "unknown family {family:?}; expected waiting, nowaiting, gt2, gt2-late or luring"
            )))
        }
    };
    emit(out, &inst.serialize())
}

fn cmd_sweep(grid: &str, eps: f64, out: Option<&Path>) -> Result<String, Failure> {
    let grid = parse_grid(grid)?;
    let rows = sweep_theta(&grid, eps)?;
    emit(out, &sweep_csv(&rows))
}

fn cmd_bounds() -> Result<String, Failure> {
    let c = solve_constants()?;
    let mut out = format!(
        "rho_lb={} theta_star={} rho_star={}\n",
        format_sig(c.rho_lb.value),
        format_sig(c.theta_star.value),
        format_sig(c.rho_star)
    );
    for (name, root) in [("rho_lb", c.rho_lb), ("theta_star", c.theta_star)] {
        let _ = writeln!(
            out,
            "{name} bracket=[{}, {}] residual={}",
            format_sig(root.bracket.0),
            format_sig(root.bracket.1),
            format_sig(root.residual)
        );
    }
    Ok(out)
}

fn execute(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Opt { file, limit } => cmd_opt(&file, limit),
        Command::Run {
            algorithm,
            file,
            limit,
        } => cmd_run(&algorithm, &file, limit),
        Command::Adversary {
            algorithm,
            rho,
            capacity,
            out,
        } => cmd_adversary(&algorithm, rho, capacity, out.as_deref()),
        Command::Gen {
            family,
            theta,
            epsilon,
            capacity,
            q,
            out,
        } => cmd_gen(&family, theta, epsilon, capacity, q, out.as_deref()),
        Command::Sweep { grid, eps, out } => cmd_sweep(&grid, eps, out.as_deref()),
        Command::Bounds => cmd_bounds(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
