//! Bound functions, certified constants, ratio computation, `Θ` sweeps and
//! audits of the structural inequalities on simulation traces.

use std::fmt::Write as _;

use thiserror::Error;

use crate::adversary::{gen_nowaiting_lb, gen_theta_gt2, gen_waiting_lb};
use crate::model::{Instance, Request};
use crate::offline::{OfflineError, Solver};
use crate::online::{make_smarterstart, simulate, OnlineAlgorithm, SimError, SimulationResult};

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("Θ must be a finite number > 1, got {0}")]
    InvalidTheta(f64),
    #[error("no sign change found in [{lo}, {hi}]")]
    Bracketing { lo: f64, hi: f64 },
    #[error("OPT is 0 but the algorithm needs {0}")]
    ZeroOpt(f64),
    #[error("invalid grid '{0}', expected lo:hi:step with lo ≤ hi and step > 0")]
    InvalidGrid(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Offline(#[from] OfflineError),
}

/// The four bound curves for SMARTERSTART.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// Upper bound when the final schedule is preceded by a wait.
    F1,
    /// Upper bound when the final schedule starts without waiting.
    F2,
    /// Lower bound for `2 < Θ ≤ 1 + √2`.
    G1,
    /// Lower bound for `Θ > 1 + √2`.
    G2,
}

pub fn f1(theta: f64) -> f64 {
    (2.0 * theta * theta - theta + 1.0) / (theta * theta - 1.0)
}

pub fn f2(theta: f64) -> f64 {
    (3.0 * theta * theta + 3.0) / (2.0 * theta + 1.0)
}

pub fn g1(theta: f64) -> f64 {
    (3.0 * theta * theta - 2.0 * theta + 1.0) / (theta * theta - 1.0)
}

pub fn g2(theta: f64) -> f64 {
    4.0 * theta / (theta + 1.0)
}

/// Evaluates one bound curve; `Θ` must exceed 1.
pub fn bound_value(kind: BoundKind, theta: f64) -> Result<f64, AnalysisError> {
    if !(theta.is_finite() && theta > 1.0) {
        return Err(AnalysisError::InvalidTheta(theta));
    }
    Ok(match kind {
        BoundKind::F1 => f1(theta),
        BoundKind::F2 => f2(theta),
        BoundKind::G1 => g1(theta),
        BoundKind::G2 => g2(theta),
    })
}

/// Lower bound curve that applies to `Θ > 2`.
pub fn g(theta: f64) -> f64 {
    if theta <= 1.0 + 2f64.sqrt() {
        g1(theta)
    } else {
        g2(theta)
    }
}

/// Polynomial with coefficients in increasing degree order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial(pub Vec<f64>);

impl Polynomial {
    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

/// `4ρ³ − 26ρ² + 39ρ − 5`.
pub fn rho_polynomial() -> Polynomial {
    Polynomial(vec![-5.0, 39.0, -26.0, 4.0])
}

/// `f1(Θ) = f2(Θ)` with denominators cleared:
/// `(3Θ² + 3)(Θ² − 1) − (2Θ² − Θ + 1)(2Θ + 1) = 3Θ⁴ − 4Θ³ − Θ − 4`.
pub fn theta_polynomial() -> Polynomial {
    Polynomial(vec![-4.0, -1.0, 0.0, -4.0, 3.0])
}

/// A root with the bracket it was isolated in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: f64,
    pub bracket: (f64, f64),
    pub residual: f64,
}

/// All sign changes of `p` on a uniform scan of `[lo, hi]`, each refined by
/// bisection to width `1e-12`.
pub fn real_roots(p: &Polynomial, lo: f64, hi: f64, step: f64) -> Vec<Root> {
    let mut roots = Vec::new();
    let steps = ((hi - lo) / step).round() as usize;
    let mut a = lo;
    let mut fa = p.eval(a);
    for k in 1..=steps {
        let b = lo + k as f64 * step;
        let fb = p.eval(b);
        if fa == 0.0 {
            roots.push(Root {
                value: a,
                bracket: (a, a),
                residual: 0.0,
            });
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            let (mut x0, mut x1, mut f0) = (a, b, fa);
            while x1 - x0 > 1e-12 {
                let mid = 0.5 * (x0 + x1);
                let fm = p.eval(mid);
                if fm == 0.0 {
                    x0 = mid;
                    x1 = mid;
                    break;
                }
                if fm.signum() == f0.signum() {
                    x0 = mid;
                    f0 = fm;
                } else {
                    x1 = mid;
                }
            }
            let value = 0.5 * (x0 + x1);
            roots.push(Root {
                value,
                bracket: (a, b),
                residual: p.eval(value),
            });
        }
        a = b;
        fa = fb;
    }
    roots
}

/// The certified constants of the analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    /// Middle real root of `4ρ³ − 26ρ² + 39ρ − 5`: the general lower bound.
    pub rho_lb: Root,
    /// Largest root `> 1` of `f1 = f2`: the best SMARTERSTART parameter.
    pub theta_star: Root,
    /// `f1(Θ*) = f2(Θ*)`: SMARTERSTART's competitive ratio.
    pub rho_star: f64,
}

pub fn solve_constants() -> Result<BoundConstants, AnalysisError> {
    let rho_roots = real_roots(&rho_polynomial(), 0.0, 10.0, 0.01);
    if rho_roots.len() != 3 {
        return Err(AnalysisError::Bracketing { lo: 0.0, hi: 10.0 });
    }
    let rho_lb = rho_roots[1];
    let theta_star = real_roots(&theta_polynomial(), 0.0, 10.0, 0.01)
        .into_iter()
        .rfind(|r| r.value > 1.0)
        .ok_or(AnalysisError::Bracketing { lo: 1.0, hi: 10.0 })?;
    Ok(BoundConstants {
        rho_lb,
        theta_star,
        rho_star: f1(theta_star.value),
    })
}

/// `ρ ≈ 2.0585`, the general lower bound for non-preemptive open Dial-a-Ride.
pub fn rho_lower_bound() -> f64 {
    solve_constants()
        .map(|c| c.rho_lb.value)
        .unwrap_or(f64::NAN)
}

/// `Θ* ≈ 1.71249`.
pub fn theta_star() -> f64 {
    solve_constants()
        .map(|c| c.theta_star.value)
        .unwrap_or(f64::NAN)
}

/// `ALG / OPT` with `0/0 = 1`.
pub fn ratio(alg: f64, opt: f64) -> Result<f64, AnalysisError> {
    if opt > 0.0 {
        Ok(alg / opt)
    } else if alg <= 0.0 {
        Ok(1.0)
    } else {
        Err(AnalysisError::ZeroOpt(alg))
    }
}

/// Per-instance ratios of one algorithm and their supremum.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub ratios: Vec<f64>,
    pub supremum: f64,
}

pub fn competitive_ratio(
    alg: &mut dyn OnlineAlgorithm,
    instances: &[Instance],
    solver: &Solver,
) -> Result<RatioReport, AnalysisError> {
    let mut ratios = Vec::with_capacity(instances.len());
    for inst in instances {
        let run = simulate(alg, inst)?;
        ratios.push(ratio(run.completion, solver.opt(inst)?)?);
    }
    let supremum = ratios.iter().copied().fold(1.0_f64, f64::max);
    Ok(RatioReport { ratios, supremum })
}

/// Parses a `lo:hi:step` grid specification.
pub fn parse_grid(grid: &str) -> Result<Vec<f64>, AnalysisError> {
    let bad = || AnalysisError::InvalidGrid(grid.to_string());
    let parts: Vec<f64> = grid
        .split(':')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [lo, hi, step] = parts[..] else {
        return Err(bad());
    };
    if !(lo.is_finite() && hi.is_finite() && step > 0.0 && lo <= hi) {
        return Err(bad());
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| lo + k as f64 * step).collect())
}

/// One row of the `Θ` sweep; `None` marks values outside their range.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub f1: Option<f64>,
    pub f2: Option<f64>,
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub sim_waiting: Option<f64>,
    pub sim_nowaiting: Option<f64>,
    pub sim_gt2: Option<f64>,
}

fn simulated_ratio(theta: f64, inst: &Instance) -> Result<f64, AnalysisError> {
    let run = simulate(&mut make_smarterstart(theta)?, inst)?;
    ratio(run.completion, Solver::default().opt(inst)?)
}

/// Bound curves and simulated SMARTERSTART ratios on every applicable
/// tight-instance family, per grid point.
pub fn sweep_theta(grid: &[f64], epsilon: f64) -> Result<Vec<SweepRow>, AnalysisError> {
    let mut rows = Vec::with_capacity(grid.len());
    for &theta in grid {
        if !(theta.is_finite() && theta > 1.0) {
            return Err(AnalysisError::InvalidTheta(theta));
        }
        let cap = crate::model::Capacity::Finite(1);
        let sim = |inst: Option<Instance>| inst.map(|i| simulated_ratio(theta, &i)).transpose();
        let gt2 = theta > 2.0;
        rows.push(SweepRow {
            theta,
            f1: Some(f1(theta)),
            f2: Some(f2(theta)),
            g1: (gt2 && theta <= 1.0 + 2f64.sqrt() + 1e-12).then(|| g1(theta)),
            g2: (theta >= 1.0 + 2f64.sqrt() - 1e-12).then(|| g2(theta)),
            sim_waiting: sim(gen_waiting_lb(theta, epsilon, cap).ok())?,
            sim_nowaiting: sim(gen_nowaiting_lb(theta, epsilon, cap).ok())?,
            sim_gt2: sim(gen_theta_gt2(theta, epsilon, cap).ok())?,
        });
    }
    Ok(rows)
}

/// Formats `x` with 12 significant digits, trimming trailing zeros but
/// keeping one decimal.
pub fn format_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.0".into();
    }
    let exponent = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exponent) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - exponent).max(1) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') && !s.ends_with(".0") {
            s.pop();
        }
    }
    if s == "-0.0" {
        s = "0.0".into();
    }
    s
}

/// The sweep as CSV with the documented header.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let cell = |v: Option<f64>| v.map(format_sig).unwrap_or_default();
    let mut out =
        String::from("theta,f1,f2,g1,g2,sim_ratio_waiting,sim_ratio_nowaiting,sim_ratio_gt2\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            format_sig(r.theta),
            cell(r.f1),
            cell(r.f2),
            cell(r.g1),
            cell(r.g2),
            cell(r.sim_waiting),
            cell(r.sim_nowaiting),
            cell(r.sim_gt2)
        );
    }
    out
}

/// Instance-wide extremes and the slack `y = OPT − |x−| − x+`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleExtremes {
    pub x_minus: f64,
    pub x_plus: f64,
    pub y: f64,
}

impl ScheduleExtremes {
    pub fn new(instance: &Instance, opt: f64) -> Self {
        let x_minus = instance.leftmost();
        let x_plus = instance.rightmost();
        Self {
            x_minus,
            x_plus,
            y: opt - x_minus.abs() - x_plus,
        }
    }
}

/// Leftmost and rightmost position occurring in `requests`.
pub fn request_extremes(requests: &[Request]) -> (f64, f64) {
    requests
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (
                lo.min(r.origin).min(r.destination),
                hi.max(r.origin).max(r.destination),
            )
        })
}

/// The audited inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditCheck {
    /// `t_j ≥ |p_{j+1}| / (Θ − 1)`.
    StartingTime,
    /// `L(t_j, p_j, σ_{S_j}) ≤ (1 + (Θ − 1)/(Θ + 1)) OPT`.
    CostPerSchedule,
    /// `L(t_j, 0, σ_{S_j}) ≤ |min{0, y−}| + max{0, y+} + y`.
    ScheduleFromOrigin,
    /// Every visited `p` satisfies `p ≤ |p_j| + |p_j − p_{j+1}| + y − |min{0, y−}|`
    /// (mirrored when `|x−| > x+`).
    RightmostPosition,
    /// `t_j ≥ L(t_j, 0, σ≤t_j) / (Θ − 1)`, with equality after a wait.
    WaitingRule,
}

/// One evaluated inequality; `margin ≥ 0` means it holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditEntry {
    pub check: AuditCheck,
    /// 1-based schedule index.
    pub schedule: usize,
    pub margin: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn failures(&self) -> Vec<AuditEntry> {
        self.entries.iter().copied().filter(|e| !e.passed).collect()
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }
}

const AUDIT_SLACK: f64 = 1e-9;
/// Start times come from a bisection to `1e-9`; equality is judged with this tolerance.
const WAIT_EQUALITY_TOL: f64 = 1e-6;

/// Checks the structural inequalities on every schedule of a SMARTERSTART(Θ) run.
pub fn audit_simulation(
    result: &SimulationResult,
    instance: &Instance,
    theta: f64,
    solver: &Solver,
) -> Result<AuditReport, AnalysisError> {
    if !(theta.is_finite() && theta > 1.0) {
        return Err(AnalysisError::InvalidTheta(theta));
    }
    let requests = instance.requests();
    let capacity = instance.capacity();
    let opt = solver.opt(instance)?;
    let ext = ScheduleExtremes::new(instance, opt);
    let mut entries = Vec::new();
    let mut push = |check, schedule, margin: f64, tol: f64| {
        entries.push(AuditEntry {
            check,
            schedule,
            margin,
            passed: margin >= -tol,
        });
    };
    for (j, rec) in result.records.iter().enumerate() {
        let j = j + 1;
        let t_j = rec.start_time;
        let p_j = rec.start_position;
        let p_next = rec.end_position;
        let served: Vec<Request> = rec.requests.iter().map(|&k| requests[k]).collect();
        let (y_minus, y_plus) = request_extremes(&served);

        push(
            AuditCheck::StartingTime,
            j,
            t_j - p_next.abs() / (theta - 1.0),
            AUDIT_SLACK,
        );

        let length = rec.end_time - rec.start_time;
        let cap = (1.0 + (theta - 1.0) / (theta + 1.0)) * opt;
        push(AuditCheck::CostPerSchedule, j, cap - length, AUDIT_SLACK);

        let from_origin = solver.makespan(t_j, 0.0, &served, capacity)?;
        let bound = (0f64.min(y_minus)).abs() + 0f64.max(y_plus) + ext.y;
        push(
            AuditCheck::ScheduleFromOrigin,
            j,
            bound - from_origin,
            AUDIT_SLACK,
        );

        let (lo, hi) = result.trajectory.extent(t_j, rec.end_time);
        let margin = if ext.x_minus.abs() <= ext.x_plus {
            p_j.abs() + (p_j - p_next).abs() + ext.y - (0f64.min(y_minus)).abs() - hi
        } else {
            p_j.abs() + (p_j - p_next).abs() + ext.y - 0f64.max(y_plus) + lo
        };
        push(AuditCheck::RightmostPosition, j, margin, AUDIT_SLACK);

        let known: Vec<Request> = requests
            .iter()
            .copied()
            .filter(|r| r.release <= t_j)
            .collect();
        let threshold = solver.makespan(t_j, 0.0, &known, capacity)? / (theta - 1.0);
        let last_release = known.iter().fold(0.0_f64, |m, r| m.max(r.release));
        let waited = t_j > rec.idle_since.max(last_release) + AUDIT_SLACK;
        let margin = if waited {
            WAIT_EQUALITY_TOL - (t_j - threshold).abs()
        } else {
            t_j - threshold
        };
        push(
            AuditCheck::WaitingRule,
            j,
            margin,
            if waited { 0.0 } else { AUDIT_SLACK },
        );
    }
    Ok(AuditReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_match_published_values() {
        let c = solve_constants().unwrap();
        assert!((c.rho_lb.value - 2.0585).abs() < 1e-4);
        assert!((c.theta_star.value - 1.71249).abs() < 1e-4);
        assert!((c.rho_star - 2.6662).abs() < 1e-4);
        assert!(c.rho_lb.residual.abs() < 1e-9);
        assert!((f1(c.theta_star.value) - f2(c.theta_star.value)).abs() < 1e-9);
    }

    #[test]
    fn bound_examples() {
        assert!((f1(1.5) - 3.2).abs() < 1e-12);
        assert!((f2(1.8) - 2.765217391304).abs() < 1e-9);
        let s = 1.0 + 2f64.sqrt();
        assert!((g1(s) - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((g2(s) - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!(bound_value(BoundKind::F1, 1.0).is_err());
    }

    #[test]
    fn ratio_convention() {
        assert_eq!(ratio(0.0, 0.0).unwrap(), 1.0);
        assert!(ratio(1.0, 0.0).is_err());
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("1.2:2.4:0.05").unwrap();
        assert_eq!(g.len(), 25);
        assert!(parse_grid("2:1:0.1").is_err());
        assert!(parse_grid("1:2").is_err());
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(1.0), "1.0");
        assert_eq!(format_sig(5.0), "5.0");
        assert_eq!(format_sig(2.0 / 3.0), "0.666666666667");
        assert_eq!(format_sig(15.95), "15.95");
    }
}
