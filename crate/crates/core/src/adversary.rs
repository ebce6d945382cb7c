//! The reactive lower-bound adversary against eager online algorithms and
//! the fixed tight-instance generators for SMARTERSTART and SMARTSTART.

use std::fmt::Write as _;

use thiserror::Error;

use crate::analysis::{f1, f2, format_sig, g, rho_lower_bound};
use crate::model::{Capacity, Instance, Line, ModelError, Request, Trajectory, TOL};
use crate::offline::{OfflineError, Solver};
use crate::online::{simulate, OnlineAlgorithm, SimError, SimulationResult};

/// Open interval of target ratios the general construction is valid for.
pub const RHO_RANGE: (f64, f64) = (2.056, 2.06);

/// Tolerance for comparing observed service times with construction thresholds.
const TIME_TOL: f64 = 1e-7;

/// Errors raised by the adversary and the generators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdversaryError {
    #[error("rho outside validated interval (2.056, 2.06): {0}")]
    RhoOutOfRange(f64),
    #[error("capacity must be a finite integer >= 1")]
    InvalidCapacity,
    #[error("algorithm is not eager: {0}")]
    NotEager(String),
    #[error("adversary state inconsistent: {0}")]
    Inconsistent(String),
    #[error("parameter outside admissible range: {0}")]
    Range(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Offline(#[from] OfflineError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Parameters of the general lower-bound construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversaryConfig {
    pub rho: f64,
    pub capacity: usize,
}

impl AdversaryConfig {
    pub fn new(rho: f64, capacity: usize) -> Result<Self, AdversaryError> {
        if !(rho > RHO_RANGE.0 && rho < RHO_RANGE.1) {
            return Err(AdversaryError::RhoOutOfRange(rho));
        }
        if capacity == 0 {
            return Err(AdversaryError::InvalidCapacity);
        }
        Ok(Self { rho, capacity })
    }

    /// Uses the exact root `ρ ≈ 2.0585` as the target ratio.
    pub fn with_capacity(capacity: usize) -> Result<Self, AdversaryError> {
        Self::new(rho_lower_bound(), capacity)
    }
}

fn check_rho(rho: f64) -> Result<(), AdversaryError> {
    if rho > RHO_RANGE.0 && rho < RHO_RANGE.1 {
        Ok(())
    } else {
        Err(AdversaryError::RhoOutOfRange(rho))
    }
}

/// Destination `δ = (3ρ² − 11) / (−3ρ³ + 15ρ − 4)` of the initial requests.
pub fn delta(rho: f64) -> Result<f64, AdversaryError> {
    check_rho(rho)?;
    Ok((3.0 * rho * rho - 11.0) / (-3.0 * rho.powi(3) + 15.0 * rho - 4.0))
}

/// The line `ℓ(t) = (4 − ρ) t − (2ρ − 2) t_L`.
pub fn line_ell(t_l: f64, rho: f64) -> Line {
    Line::new(4.0 - rho, -(2.0 * rho - 2.0) * t_l)
}

/// `(t_R*, t_L*) = ((2ρ − 2) t_L + (ρ − 2) t_R, (2ρ − 2) t_R + (ρ − 2) t_L)`.
pub fn critical_thresholds(t_l: f64, t_r: f64, rho: f64) -> Result<(f64, f64), AdversaryError> {
    if !(t_l > 0.0 && t_l <= t_r) {
        return Err(AdversaryError::Range(format!(
            "need 0 < t_L <= t_R, got t_L={t_l}, t_R={t_r}"
        )));
    }
    Ok((
        (2.0 * rho - 2.0) * t_l + (rho - 2.0) * t_r,
        (2.0 * rho - 2.0) * t_r + (rho - 2.0) * t_l,
    ))
}

/// Largest admissible `t_R / t_L`: `(4ρ² − 30ρ + 50) / (−8ρ² + 50ρ − 66)`.
pub fn critical_ratio_bound(rho: f64) -> f64 {
    (4.0 * rho * rho - 30.0 * rho + 50.0) / (-8.0 * rho * rho + 50.0 * rho - 66.0)
}

/// Largest `t_R / t_L` any algorithm can produce: `(4ρ − 5) / (6 − 2ρ)`.
pub fn guaranteed_ratio_cap(rho: f64) -> f64 {
    (4.0 * rho - 5.0) / (6.0 - 2.0 * rho)
}

/// Lower bound `t_R ≥ (3ρ − 5)/(7 − 3ρ) t_L` on the crossing time.
pub fn min_crossing_factor(rho: f64) -> f64 {
    (3.0 * rho - 5.0) / (7.0 - 3.0 * rho)
}

/// Which of the two critical requests the algorithm serves first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalSide {
    Left,
    Right,
}

/// Evaluation of the five properties of a critical pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalReport {
    pub t_l: f64,
    pub t_r: f64,
    /// (i) both sweeps `→−t_L ⊕ →t_R` and `→t_R ⊕ →−t_L` serve everything released by `t_R`.
    pub tours_serve_all: bool,
    /// (ii) neither request is served before `t_R` ...
    pub unserved_at_t_r: bool,
    /// ... and `−t_L ≤ pos(t_R) ≤ t_R`.
    pub position_between: bool,
    pub first_served: CriticalSide,
    /// (iii) right request served first, no earlier than `t_R*` (vacuous otherwise).
    pub right_threshold: bool,
    /// (iv) left request served first, no earlier than `t_L*` (vacuous otherwise).
    pub left_threshold: bool,
    /// (v) `t_R / t_L` within [`critical_ratio_bound`].
    pub ratio_bound: bool,
    /// `t_R ≥ (3ρ − 5)/(7 − 3ρ) t_L`.
    pub crossing_geometry: bool,
}

impl CriticalReport {
    pub fn all(&self) -> bool {
        self.tours_serve_all
            && self.unserved_at_t_r
            && self.position_between
            && self.right_threshold
            && self.left_threshold
            && self.ratio_bound
    }
}

fn tour_serves(tour: &Trajectory, r: &Request) -> bool {
    tour.first_reach(r.origin, r.release)
        .and_then(|t| tour.first_reach(r.destination, t))
        .is_some()
}

fn sweep_tour(first: f64, second: f64) -> Trajectory {
    let mut b = crate::model::TrajectoryBuilder::new(0.0, 0.0);
    b.move_to(first);
    b.move_to(second);
    b.build()
}

/// Evaluates the critical-pair properties of `σ_L = requests[left]` and
/// `σ_R = requests[right]` on a run over `requests`.
pub fn check_critical(
    requests: &[Request],
    run: &SimulationResult,
    left: usize,
    right: usize,
    rho: f64,
) -> Result<CriticalReport, AdversaryError> {
    let t_l = requests[left].release;
    let t_r = requests[right].release;
    let (t_r_star, t_l_star) = critical_thresholds(t_l, t_r, rho)?;
    let served_at = |k: usize| {
        run.served[k]
            .dropoff
            .ok_or_else(|| AdversaryError::Inconsistent(format!("request {k} never served")))
    };
    let (s_l, s_r) = (served_at(left)?, served_at(right)?);
    let known: Vec<&Request> = requests.iter().filter(|r| r.release <= t_r).collect();
    let a = sweep_tour(-t_l, t_r);
    let b = sweep_tour(t_r, -t_l);
    let pos = run.position(t_r);
    let first_served = if s_l < s_r {
        CriticalSide::Left
    } else {
        CriticalSide::Right
    };
    Ok(CriticalReport {
        t_l,
        t_r,
        tours_serve_all: known
            .iter()
            .all(|r| tour_serves(&a, r) && tour_serves(&b, r)),
        unserved_at_t_r: s_l >= t_r - TOL && s_r >= t_r - TOL,
        position_between: pos >= -t_l - TOL && pos <= t_r + TOL,
        first_served,
        right_threshold: first_served == CriticalSide::Left || s_r >= t_r_star - TIME_TOL,
        left_threshold: first_served == CriticalSide::Right || s_l >= t_l_star - TIME_TOL,
        ratio_bound: t_r / t_l <= critical_ratio_bound(rho) + 1e-12,
        crossing_geometry: t_r >= min_crossing_factor(rho) * t_l - TIME_TOL,
    })
}

/// How the construction ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Some initial request was delivered before all were loaded.
    SplitLoading,
    /// The initial requests were loaded at or after `ρδ − (δ − 1)`.
    LateLoading,
    /// Stage two, case 1: nothing released after `σ0+`.
    Case1,
    /// Stage two, case 2.1: `σ0+` not served before the midpoint reaches it.
    Case21,
    /// Stage two, case 2.2: `σ0++` released at the midpoint meeting time.
    Case22,
}

/// Quantities fixed during stage two, in the adversary's (unmirrored) frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageTwoState {
    /// Position of the critical request served first.
    pub p0: f64,
    /// Position of the other critical request.
    pub p1: f64,
    pub w: f64,
    pub t0_plus: f64,
    pub p0_plus: f64,
    pub t_mid: Option<f64>,
}

/// One line of the trigger log.
#[derive(Debug, Clone, PartialEq)]
pub struct LogEntry {
    pub time: f64,
    pub text: String,
}

/// Full record of one adversary run, in the algorithm's coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryTranscript {
    pub algorithm: String,
    pub rho: f64,
    pub capacity: usize,
    /// Whether the construction was played in the mirrored world.
    pub mirrored: bool,
    /// Released requests with the trigger that caused each release.
    pub released: Vec<(Request, String)>,
    pub t_l: Option<f64>,
    pub t_r: Option<f64>,
    pub critical: Option<CriticalReport>,
    pub stage_two: Option<StageTwoState>,
    pub outcome: Outcome,
    pub alg_completion: f64,
    /// OPT as claimed by the construction's closed form.
    pub claimed_opt: f64,
    /// OPT recomputed by the offline solver.
    pub opt_value: f64,
    pub ratio: f64,
    /// The construction's closed-form lower bound on ALG for this outcome.
    pub alg_lower_bound: f64,
    pub log: Vec<LogEntry>,
}

impl AdversaryTranscript {
    /// The realized instance.
    pub fn instance(&self) -> Instance {
        Instance::new(
            Capacity::Finite(self.capacity),
            self.released.iter().map(|(r, _)| *r).collect(),
        )
        .expect("released requests form a valid instance")
    }

    /// Trigger log, one `t=<time> <event>` line per entry.
    pub fn log_text(&self) -> String {
        let mut out = String::new();
        for e in &self.log {
            let _ = writeln!(out, "t={} {}", format_sig(e.time), e.text);
        }
        out
    }
}

struct Game<'a> {
    alg: &'a mut dyn OnlineAlgorithm,
    capacity: usize,
    mirrored: bool,
    requests: Vec<Request>,
    triggers: Vec<String>,
    log: Vec<LogEntry>,
}

impl Game<'_> {
    fn note(&mut self, time: f64, text: String) {
        self.log.push(LogEntry { time, text });
    }

    fn release(&mut self, r: Request, trigger: &str) {
        let shown = if self.mirrored { r.mirrored() } else { r };
        self.note(r.release, format!("release {shown} ({trigger})"));
        self.requests.push(r);
        self.triggers.push(trigger.to_string());
    }

    /// Simulates the algorithm on the current requests, in adversary coordinates.
    fn play(&mut self) -> Result<SimulationResult, AdversaryError> {
        let inst = Instance::new(Capacity::Finite(self.capacity), self.requests.clone())?;
        if self.mirrored {
            Ok(simulate(self.alg, &inst.mirrored())?.mirrored())
        } else {
            Ok(simulate(self.alg, &inst)?)
        }
    }

    fn service(&self, run: &SimulationResult, k: usize) -> Result<f64, AdversaryError> {
        run.served[k]
            .dropoff
            .ok_or_else(|| AdversaryError::Inconsistent(format!("request {k} never served")))
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        self,
        cfg: &AdversaryConfig,
        run: &SimulationResult,
        outcome: Outcome,
        claimed_opt: f64,
        alg_lower_bound: f64,
        t_l: Option<f64>,
        t_r: Option<f64>,
        critical: Option<CriticalReport>,
        stage_two: Option<StageTwoState>,
    ) -> Result<AdversaryTranscript, AdversaryError> {
        let solver = Solver::default();
        let inst = Instance::new(Capacity::Finite(self.capacity), self.requests.clone())?;
        let opt_value = solver.opt(&inst)?;
        let mut log = self.log;
        let completion = run.completion;
        log.push(LogEntry {
            time: completion,
            text: format!(
                "ALG completes; outcome {outcome:?}; OPT {} (claimed {}); ratio {}",
                format_sig(opt_value),
                format_sig(claimed_opt),
                format_sig(completion / opt_value)
            ),
        });
        let flip = |r: Request| if self.mirrored { r.mirrored() } else { r };
        let flip_state = |s: StageTwoState| {
            if self.mirrored {
                StageTwoState {
                    p0: -s.p0,
                    p1: -s.p1,
                    p0_plus: -s.p0_plus,
                    ..s
                }
            } else {
                s
            }
        };
        Ok(AdversaryTranscript {
            algorithm: self.alg.name(),
            rho: cfg.rho,
            capacity: self.capacity,
            mirrored: self.mirrored,
            released: self
                .requests
                .iter()
                .map(|&r| flip(r))
                .zip(self.triggers)
                .collect(),
            t_l,
            t_r,
            critical,
            stage_two: stage_two.map(flip_state),
            outcome,
            alg_completion: completion,
            claimed_opt,
            opt_value,
            ratio: completion / opt_value,
            alg_lower_bound,
            log,
        })
    }
}

/// Plays the general lower-bound construction against an eager,
/// deterministic algorithm (wrap with [`crate::online::eagerize`] first).
pub fn run_general_lower_bound(
    alg: &mut dyn OnlineAlgorithm,
    cfg: &AdversaryConfig,
) -> Result<AdversaryTranscript, AdversaryError> {
    let cfg = AdversaryConfig::new(cfg.rho, cfg.capacity)?;
    let rho = cfg.rho;
    let c = cfg.capacity;
    let d = delta(rho)?;
    let mut game = Game {
        alg,
        capacity: c,
        mirrored: false,
        requests: Vec::new(),
        triggers: Vec::new(),
        log: Vec::new(),
    };

    // Stage one: the position at time 1 decides the orientation.
    let idle = game.play()?;
    let pos1 = idle.position(1.0);
    game.mirrored = pos1 > TOL;
    game.note(
        1.0,
        format!(
            "ALG at {}; {}",
            format_sig(pos1),
            if game.mirrored {
                "mirrored world"
            } else {
                "original world"
            }
        ),
    );
    for j in 0..c {
        game.release(
            Request::new(1.0, d, 1.0),
            &format!("initial copy {}", j + 1),
        );
    }
    let run = game.play()?;
    let mut pickups = Vec::with_capacity(c);
    let mut drops = Vec::with_capacity(c);
    for k in 0..c {
        pickups.push(run.served[k].pickup.unwrap_or(f64::INFINITY));
        drops.push(game.service(&run, k)?);
    }
    let t_l = pickups.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let first_drop = drops.iter().copied().fold(f64::INFINITY, f64::min);
    if first_drop < t_l {
        game.note(
            first_drop,
            "initial request delivered before all copies were loaded".into(),
        );
        return game.finish(
            &cfg,
            &run,
            Outcome::SplitLoading,
            d,
            3.0 * d - 2.0,
            None,
            None,
            None,
            None,
        );
    }
    if t_l >= rho * d - (d - 1.0) {
        game.note(t_l, "initial copies loaded too late".into());
        return game.finish(
            &cfg,
            &run,
            Outcome::LateLoading,
            d,
            rho * d,
            Some(t_l),
            None,
            None,
            None,
        );
    }
    game.note(t_l, "ALG has loaded all initial copies (t_L)".into());

    let left = game.requests.len();
    game.release(Request::point(-t_l, t_l), "sigma_L at t_L");
    let run = game.play()?;
    let t_deliver = t_l + d - 1.0;
    let delivered_directly = (run.position(t_deliver) - d).abs() <= TIME_TOL
        && (0..c).all(|k| {
            run.served[k]
                .dropoff
                .is_some_and(|s| (s - t_deliver).abs() <= TIME_TOL)
        });
    if !delivered_directly {
        return Err(AdversaryError::NotEager(format!(
            "full load not delivered at time {} (position {})",
            format_sig(t_deliver),
            format_sig(run.position(t_deliver))
        )));
    }
    let ell = line_ell(t_l, rho);
    let t_r = run
        .trajectory
        .first_crossing(&ell, t_l)
        .ok_or_else(|| AdversaryError::Inconsistent("ALG never crosses the line ell".into()))?;
    game.note(t_r, "ALG crosses ell (t_R)".into());
    let right = game.requests.len();
    game.release(Request::point(t_r, t_r), "sigma_R at t_R");
    let run = game.play()?;
    let critical = check_critical(&game.requests, &run, left, right, rho)?;
    if !critical.all() {
        return Err(AdversaryError::Inconsistent(format!(
            "critical properties violated: {critical:?}"
        )));
    }

    // Stage two.
    let (idx0, idx1) = match critical.first_served {
        CriticalSide::Left => (left, right),
        CriticalSide::Right => (right, left),
    };
    let p0 = game.requests[idx0].origin;
    let p1 = game.requests[idx1].origin;
    let s0 = game.service(&run, idx0)?;
    let s1 = game.service(&run, idx1)?;
    game.note(
        s0,
        format!(
            "ALG serves the critical request at {} first",
            format_sig(p0)
        ),
    );
    let t0 = 2.0 * p1.abs() + p0.abs();
    let t_star = fixpoint_time(&run.trajectory, p0, p1, s0, s1, t0, rho).ok_or_else(|| {
        AdversaryError::Inconsistent("delay undefined before the fixpoint W is reached".into())
    })?;
    let w = (rho - 1.0) * (t_star - t0);
    let sgn = p0.signum();
    let p0_plus = p0 + sgn * w / (rho - 1.0);
    game.note(t_star, format!("fixpoint W = {}", format_sig(w)));
    let idx0p = game.requests.len();
    game.release(
        Request::point(p0_plus, t_star),
        "sigma_0+ at the W fixpoint",
    );
    let run = game.play()?;
    let mut state = StageTwoState {
        p0,
        p1,
        w,
        t0_plus: t_star,
        p0_plus,
        t_mid: None,
    };
    let pos = run.position(t_star);
    let s1 = game.service(&run, idx1)?;
    let s0p = game.service(&run, idx0p)?;
    let case1_bound = (2.0 * rho - 1.0) * p1.abs()
        + (rho - 1.0) * p0.abs()
        + w
        + p1.abs()
        + p0.abs()
        + w / (rho - 1.0);
    if (pos - p1).abs() <= (pos - p0_plus).abs() || s1 < s0p {
        game.note(
            t_star,
            "case 1: ALG is closer to p1 or serves sigma_1 first".into(),
        );
        let r = run.clone();
        return game.finish(
            &cfg,
            &r,
            Outcome::Case1,
            t_star,
            case1_bound,
            Some(t_l),
            Some(t_r),
            Some(critical),
            Some(state),
        );
    }
    let m_inv = (2.0 * p0_plus - 3.0 * p1).abs();
    if s0p >= m_inv {
        game.note(
            m_inv,
            "case 2.1: sigma_0+ not served before the midpoint reaches it".into(),
        );
        let bound = m_inv + p0_plus.abs() + p1.abs();
        let r = run.clone();
        return game.finish(
            &cfg,
            &r,
            Outcome::Case21,
            t_star,
            bound,
            Some(t_l),
            Some(t_r),
            Some(critical),
            Some(state),
        );
    }
    let midpoint = Line::new(sgn / 2.0, 1.5 * p1);
    let t_mid = run
        .trajectory
        .first_crossing(&midpoint, s0p)
        .ok_or_else(|| AdversaryError::Inconsistent("ALG never meets the midpoint".into()))?;
    state.t_mid = Some(t_mid);
    game.note(t_mid, "case 2.2: ALG meets the midpoint".into());
    game.release(
        Request::point(sgn * t_mid + 2.0 * p1, t_mid),
        "sigma_0++ at the midpoint meeting",
    );
    let run = game.play()?;
    let bound = (5.0 * t_mid + 3.0 * p1.abs()) / 2.0;
    game.finish(
        &cfg,
        &run,
        Outcome::Case22,
        t_mid,
        bound,
        Some(t_l),
        Some(t_r),
        Some(critical),
        Some(state),
    )
}

/// `delay(t)` of the stage-two analysis on `traj`, valid for `t < s1`.
pub fn delay(traj: &Trajectory, p0: f64, p1: f64, s0: f64, t: f64, rho: f64) -> f64 {
    let x = traj.position_clamped(t);
    if t < s0 {
        t + (x - p0).abs() - (rho - 2.0) * p0.abs() - (2.0 * rho - 2.0) * p1.abs()
    } else {
        t + (x - p1).abs() - (rho - 1.0) * p0.abs() - (2.0 * rho - 1.0) * p1.abs()
    }
}

/// First `t ∈ [t0, s1)` with `delay(t) ≤ (ρ − 1)(t − t0)`, solved exactly on
/// the linear pieces of `delay`.
fn fixpoint_time(
    traj: &Trajectory,
    p0: f64,
    p1: f64,
    s0: f64,
    s1: f64,
    t0: f64,
    rho: f64,
) -> Option<f64> {
    if t0 >= s1 {
        return None;
    }
    let h = |t: f64, served: bool| {
        let x = traj.position_clamped(t);
        let d = if served {
            t + (x - p1).abs() - (rho - 1.0) * p0.abs() - (2.0 * rho - 1.0) * p1.abs()
        } else {
            t + (x - p0).abs() - (rho - 2.0) * p0.abs() - (2.0 * rho - 2.0) * p1.abs()
        };
        d - (rho - 1.0) * (t - t0)
    };
    let mut cuts = vec![t0, s1];
    if s0 > t0 && s0 < s1 {
        cuts.push(s0);
    }
    let pts = traj.points();
    for pair in pts.windows(2) {
        let ((ta, xa), (tb, xb)) = (pair[0], pair[1]);
        if ta > t0 && ta < s1 {
            cuts.push(ta);
        }
        for p in [p0, p1] {
            if (xa - p) * (xb - p) < 0.0 {
                let t = ta + (p - xa) / (xb - xa) * (tb - ta);
                if t > t0 && t < s1 {
                    cuts.push(t);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let served = 0.5 * (a + b) >= s0;
        let (ha, hb) = (h(a, served), h(b, served));
        if ha <= 1e-12 {
            return Some(a);
        }
        if hb <= 0.0 {
            return Some(a + (b - a) * ha / (ha - hb));
        }
    }
    None
}

fn range_err(msg: String) -> AdversaryError {
    AdversaryError::Range(msg)
}

/// Waiting-case family: `σ1 = (1, 1; 0)`,
/// `σ2 = (−1/(Θ−1) + ε′, 1; 1/(Θ−1) + ε′)` with `ε′ = (Θ+1)/(2Θ) ε`.
pub fn gen_waiting_lb(
    theta: f64,
    epsilon: f64,
    capacity: Capacity,
) -> Result<Instance, AdversaryError> {
    if !(theta > 1.0 && theta < 2.0) {
        return Err(range_err(format!(
            "waiting family needs 1 < Θ < 2, got {theta}"
        )));
    }
    let max_eps = theta / (theta + 1.0);
    if !(epsilon > 0.0 && epsilon < max_eps) {
        return Err(range_err(format!(
            "waiting family needs 0 < ε < {max_eps}, got {epsilon}"
        )));
    }
    let e = (theta + 1.0) / (2.0 * theta) * epsilon;
    let k = 1.0 / (theta - 1.0);
    Ok(Instance::new(
        capacity,
        vec![Request::point(1.0, 0.0), Request::new(-k + e, 1.0, k + e)],
    )?)
}

/// No-waiting family: `σ1 = (1, 1; 0)`, two requests at `2 + 1/(Θ−1) − 2ε′`
/// and `−1/(Θ−1)` released at `1/(Θ−1) + ε′`, and `σ3` at `3/(Θ−1)² − ε′`
/// released at `3/(Θ−1)² + 2/(Θ−1)`, with `ε′ = (2Θ+1)/(5Θ² − 9Θ + 4) ε`.
pub fn gen_nowaiting_lb(
    theta: f64,
    epsilon: f64,
    capacity: Capacity,
) -> Result<Instance, AdversaryError> {
    let lo = 0.5 * (1.0 + 5f64.sqrt());
    if !(theta >= lo && theta <= 2.0) {
        return Err(range_err(format!(
            "no-waiting family needs Θ in [(1+√5)/2, 2] = [{lo}, 2], got {theta}"
        )));
    }
    let q = 5.0 * theta * theta - 9.0 * theta + 4.0;
    let max_eps = q / (4.0 * (2.0 * theta + 1.0));
    if !(epsilon > 0.0 && epsilon < max_eps) {
        return Err(range_err(format!(
            "no-waiting family needs 0 < ε < {max_eps}, got {epsilon}"
        )));
    }
    let e = (2.0 * theta + 1.0) / q * epsilon;
    let k = 1.0 / (theta - 1.0);
    Ok(Instance::new(
        capacity,
        vec![
            Request::point(1.0, 0.0),
            Request::point(2.0 + k - 2.0 * e, k + e),
            Request::point(-k, k + e),
            Request::point(3.0 * k * k - e, 3.0 * k * k + 2.0 * k),
        ],
    )?)
}

fn theta_gt2_parts(theta: f64, epsilon: f64) -> Result<(f64, f64), AdversaryError> {
    if !(theta > 2.0 && theta.is_finite()) {
        return Err(range_err(format!("Θ>2 family needs Θ > 2, got {theta}")));
    }
    let m = (theta / (2.0 * theta - 2.0))
        .min((theta * theta - theta - 2.0) / ((theta - 1.0) * (theta - 1.0)))
        .min(1.0 / (theta - 1.0));
    let max_eps = (4.0 * theta + 4.0) / (theta - 1.0) * m;
    if !(epsilon > 0.0 && epsilon < max_eps) {
        return Err(range_err(format!(
            "Θ>2 family needs 0 < ε < {max_eps}, got {epsilon}"
        )));
    }
    Ok((
        (theta - 1.0) / (4.0 * theta + 4.0) * epsilon,
        1.0 / (theta - 1.0),
    ))
}

fn theta_gt2_instance(
    theta: f64,
    e: f64,
    k: f64,
    r3: f64,
    capacity: Capacity,
) -> Result<Instance, AdversaryError> {
    Ok(Instance::new(
        capacity,
        vec![
            Request::point(1.0, 0.0),
            Request::new((theta - 2.0) / (2.0 * theta - 2.0) + e, 1.0, k + e),
            Request::point(-k + e, k + e),
            Request::point(1.0, r3),
        ],
    )?)
}

/// `Θ > 2` family: `σ3 = (1, 1; (Θ+1)/(Θ−1)² + ε′)` with
/// `ε′ = (Θ−1)/(4Θ+4) ε`.
pub fn gen_theta_gt2(
    theta: f64,
    epsilon: f64,
    capacity: Capacity,
) -> Result<Instance, AdversaryError> {
    let (e, k) = theta_gt2_parts(theta, epsilon)?;
    theta_gt2_instance(theta, e, k, (theta + 1.0) * k * k + e, capacity)
}

/// `Θ > 2` family with `σ3` released `ε′` after the second schedule starts,
/// at `max{(Θ+1)/(Θ−1)², Θ/(Θ−1)} + ε′`. Identical to [`gen_theta_gt2`] for
/// `Θ ≤ 1 + √2`; for larger `Θ` the release of `σ3` precedes the
/// start of the second schedule, which then absorbs it.
pub fn gen_theta_gt2_late(
    theta: f64,
    epsilon: f64,
    capacity: Capacity,
) -> Result<Instance, AdversaryError> {
    let (e, k) = theta_gt2_parts(theta, epsilon)?;
    let t2 = ((theta + 1.0) * k * k).max(theta * k);
    theta_gt2_instance(theta, e, k, t2 + e, capacity)
}

/// Luring chain: `((Θ−1)ε, (Θ−1)ε; (Θ−1)ε)` followed by `(iε, iε; iε)` for
/// `i = 2, …, ⌈q/ε⌉`.
pub fn gen_luring(
    q: f64,
    epsilon: f64,
    theta: f64,
    capacity: Capacity,
) -> Result<Instance, AdversaryError> {
    if !(q > 0.0 && q.is_finite() && epsilon > 0.0 && theta > 1.0 && theta.is_finite()) {
        return Err(range_err(format!(
            "luring needs q > 0, ε > 0, Θ > 1; got q={q}, ε={epsilon}, Θ={theta}"
        )));
    }
    let n = ((q / epsilon) - 1e-9).ceil().max(1.0) as usize;
    let first = (theta - 1.0) * epsilon;
    let mut requests = vec![Request::point(first, first)];
    requests.extend((2..=n).map(|i| Request::point(i as f64 * epsilon, i as f64 * epsilon)));
    Ok(Instance::new(capacity, requests)?)
}

/// Ratio `f1(Θ) − ε` claimed for SMARTERSTART(Θ) on [`gen_waiting_lb`].
pub fn claimed_ratio_waiting(theta: f64, epsilon: f64) -> f64 {
    f1(theta) - epsilon
}

/// Ratio `f2(Θ) − ε` claimed for SMARTERSTART(Θ) on [`gen_nowaiting_lb`].
pub fn claimed_ratio_nowaiting(theta: f64, epsilon: f64) -> f64 {
    f2(theta) - epsilon
}

/// Ratio `g(Θ) − ε` claimed as a lower bound for SMARTERSTART(Θ) on the
/// `Θ > 2` family.
pub fn claimed_ratio_theta_gt2(theta: f64, epsilon: f64) -> f64 {
    g(theta) - epsilon
}

/// Exact ratio of SMARTERSTART(Θ) on [`gen_waiting_lb`].
pub fn exact_ratio_waiting(theta: f64, epsilon: f64) -> f64 {
    f1(theta) - epsilon
}

/// Exact ratio of SMARTERSTART(Θ) on [`gen_nowaiting_lb`]:
/// `f2(Θ) − (5Θ − 3)/(5Θ − 4) ε`.
///
/// With `k = 1/(Θ−1)` the schedules start at `t1 = k`,
/// `t2 = (3k + 2 − 2ε′) k` and `t3 = t2 + 3 + 3k − 4ε′`, and the last one takes
/// `k + 3k² − ε′`, so ALG `= 6k² + 6k + 3 − (2k + 5) ε′` against OPT `= 2k + 3k²`.
pub fn exact_ratio_nowaiting(theta: f64, epsilon: f64) -> f64 {
    f2(theta) - (5.0 * theta - 3.0) / (5.0 * theta - 4.0) * epsilon
}

fn theta_gt2_alg(theta: f64, epsilon: f64, sigma3_release: f64) -> f64 {
    let k = 1.0 / (theta - 1.0);
    let e = (theta - 1.0) / (4.0 * theta + 4.0) * epsilon;
    let t2 = (theta * k).max((2.0 * k + 1.0 - 2.0 * e) * k);
    let end2 = t2 + 2.0 * theta * k - 3.0 * e;
    if sigma3_release > t2 {
        end2 + theta * k - e
    } else {
        end2
    }
}

/// Exact ratio of SMARTERSTART(Θ) on [`gen_theta_gt2`].
///
/// With `k = 1/(Θ−1)`, the second schedule starts at
/// `t2 = max{Θk, (2k + 1 − 2ε′) k}` from position 1 and takes `2Θk − 3ε′`.
/// If `σ3` is released after `t2` a third schedule of length `Θk − ε′`
/// follows; otherwise `σ3` is served at the start of the second one.
/// OPT is `(Θ+1) k`.
pub fn exact_ratio_theta_gt2(theta: f64, epsilon: f64) -> f64 {
    let k = 1.0 / (theta - 1.0);
    let e = (theta - 1.0) / (4.0 * theta + 4.0) * epsilon;
    theta_gt2_alg(theta, epsilon, (theta + 1.0) * k * k + e) / ((theta + 1.0) * k)
}

/// Exact ratio of SMARTERSTART(Θ) on [`gen_theta_gt2_late`]:
/// `g(Θ) − (Θ−1)²/(Θ+1)² ε` once `Θ ≥ 1 + √2`.
pub fn exact_ratio_theta_gt2_late(theta: f64, epsilon: f64) -> f64 {
    let k = 1.0 / (theta - 1.0);
    let e = (theta - 1.0) / (4.0 * theta + 4.0) * epsilon;
    let release = ((theta + 1.0) * k * k).max(theta * k) + e;
    theta_gt2_alg(theta, epsilon, release) / ((theta + 1.0) * k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_examples() {
        let rho = 2.0585;
        let d = delta(rho).unwrap();
        assert!((d - 2.4140).abs() < 1e-3);
        assert!(d > 2.0 / (3.0 - rho));
        assert!(delta(2.5).is_err());
    }

    #[test]
    fn ell_examples() {
        let l = line_ell(2.0, 2.0585);
        assert!((l.slope - 1.9415).abs() < 1e-12);
        assert!((l.intercept + 4.234).abs() < 1e-12);
        assert!((l.value(2.0) + 0.351).abs() < 1e-9);
    }

    #[test]
    fn threshold_examples() {
        let (r, l) = critical_thresholds(2.0, 3.0, 2.0585).unwrap();
        assert!((r - 4.4095).abs() < 1e-4);
        assert!((l - 6.468).abs() < 1e-3);
        let (r, l) = critical_thresholds(2.0, 2.0, 2.0585).unwrap();
        assert!((r - l).abs() < 1e-12 && (r - (3.0 * 2.0585 - 4.0) * 2.0).abs() < 1e-12);
        assert!(critical_thresholds(3.0, 2.0, 2.0585).is_err());
    }

    #[test]
    fn ratio_bound_examples() {
        let rho = rho_lower_bound();
        assert!((critical_ratio_bound(rho) - 1.7167).abs() < 2e-3);
        assert!((critical_ratio_bound(rho) - guaranteed_ratio_cap(rho)).abs() < 1e-6);
        assert!(3.0 > critical_ratio_bound(rho));
    }

    #[test]
    fn waiting_generator_example() {
        let inst = gen_waiting_lb(1.5, 0.01, Capacity::Finite(1)).unwrap();
        let r = inst.requests()[1];
        assert!((r.origin + 1.991_666_666_667).abs() < 1e-9);
        assert!((r.release - 2.008_333_333_333).abs() < 1e-9);
        assert!(gen_waiting_lb(2.0, 0.01, Capacity::Finite(1)).is_err());
    }

    #[test]
    fn nowaiting_range() {
        assert!(gen_nowaiting_lb(1.5, 0.001, Capacity::Finite(1)).is_err());
        assert!(gen_nowaiting_lb(1.8, 0.01, Capacity::Finite(1)).is_ok());
    }

    #[test]
    fn exact_ratios_closed_forms() {
        let e = 1e-3;
        assert!((exact_ratio_nowaiting(2.0, e) - (3.0 - 7.0 / 6.0 * e)).abs() < 1e-12);
        let s2 = 1.0 + 2f64.sqrt();
        let q = (s2 - 1.0) * (s2 - 1.0) / ((s2 + 1.0) * (s2 + 1.0));
        assert!((exact_ratio_theta_gt2(s2 + 1e-9, e) - (2.0 * 2f64.sqrt() - q * e)).abs() < 1e-6);
        assert!((exact_ratio_theta_gt2(3.0, e) - (2.25 - 0.1875 * e)).abs() < 1e-12);
        assert!((exact_ratio_theta_gt2_late(3.0, e) - (3.0 - 0.25 * e)).abs() < 1e-12);
        assert!((exact_ratio_theta_gt2(2.2, e) - exact_ratio_theta_gt2_late(2.2, e)).abs() < 1e-15);
    }

    #[test]
    fn luring_sizes() {
        assert_eq!(
            gen_luring(1.0, 0.1, 2.0, Capacity::Finite(1))
                .unwrap()
                .len(),
            10
        );
        assert_eq!(
            gen_luring(1.0, 0.05, 2.0, Capacity::Finite(1))
                .unwrap()
                .len(),
            20
        );
        assert_eq!(
            gen_luring(0.5, 0.5, 2.0, Capacity::Finite(1))
                .unwrap()
                .len(),
            1
        );
    }
}
