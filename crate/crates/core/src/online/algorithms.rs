//! Schedule-based algorithms (IGNORE, SMARTSTART, SMARTERSTART) and a
//! replanning baseline.

use super::{OnlineAlgorithm, Plan, RequestStatus, ScheduleRecord, SimError, View};
use crate::model::{Capacity, Request, ScheduledEvent, TrajectoryBuilder};
use crate::offline::{OfflineQuery, Solver};

/// When a schedule-based algorithm may start its next schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StartRule {
    /// Start as soon as the server is idle.
    Immediate,
    /// Earliest `t' ≥ t` with `L(t', p, R) / (t' + ... ) ≤ Θ`, i.e.
    /// `L(t', p, R) ≤ (Θ - 1) t'` for the unserved requests `R`.
    Smartstart { theta: f64 },
    /// Earliest `t' ≥ t` with `L(t', 0, σ≤t') ≤ (Θ - 1) t'` over all
    /// requests released so far.
    SmarterStart { theta: f64 },
}

#[derive(Debug, Clone)]
struct Active {
    start: f64,
    end: f64,
    plan: Plan,
}

/// An algorithm that never interrupts a running schedule. When idle it
/// collects all unserved released requests, waits according to its
/// [`StartRule`] and then follows an optimal schedule for them.
#[derive(Debug, Clone)]
pub struct ScheduleBased {
    rule: StartRule,
    solver: Solver,
    active: Option<Active>,
    last_end: f64,
}

fn check_theta(theta: f64) -> Result<(), SimError> {
    if theta.is_finite() && theta > 1.0 {
        Ok(())
    } else {
        Err(SimError::InvalidParameter(format!(
            "Θ must be a finite number > 1, got {theta}"
        )))
    }
}

/// IGNORE: start a new schedule as soon as idle.
pub fn make_ignore() -> ScheduleBased {
    ScheduleBased::new(StartRule::Immediate)
}

/// SMARTSTART with parameter `Θ > 1`.
pub fn make_smartstart(theta: f64) -> Result<ScheduleBased, SimError> {
    check_theta(theta)?;
    Ok(ScheduleBased::new(StartRule::Smartstart { theta }))
}

/// SMARTERSTART with parameter `Θ > 1`.
pub fn make_smarterstart(theta: f64) -> Result<ScheduleBased, SimError> {
    check_theta(theta)?;
    Ok(ScheduleBased::new(StartRule::SmarterStart { theta }))
}

impl ScheduleBased {
    pub fn new(rule: StartRule) -> Self {
        Self {
            rule,
            solver: Solver::default(),
            active: None,
            last_end: 0.0,
        }
    }

    /// Uses `solver` for schedules and start-time evaluations.
    pub fn with_solver(mut self, solver: Solver) -> Self {
        self.solver = solver;
        self
    }

    pub fn rule(&self) -> StartRule {
        self.rule
    }

    fn start_time(&self, view: &View<'_>, waiting: &[Request]) -> Result<f64, SimError> {
        match self.rule {
            StartRule::Immediate => Ok(view.now),
            StartRule::Smartstart { theta } => smartstart_start_time(
                view.now,
                view.position,
                waiting,
                view.capacity,
                theta,
                &self.solver,
            ),
            StartRule::SmarterStart { theta } => {
                smarterstart_start_time(view.now, view.released, view.capacity, theta, &self.solver)
            }
        }
    }
}

impl OnlineAlgorithm for ScheduleBased {
    fn name(&self) -> String {
        match self.rule {
            StartRule::Immediate => "ignore".into(),
            StartRule::Smartstart { theta } => format!("smartstart({theta})"),
            StartRule::SmarterStart { theta } => format!("smarterstart({theta})"),
        }
    }

    fn reset(&mut self) {
        self.active = None;
        self.last_end = 0.0;
    }

    fn decide(&mut self, view: &View<'_>) -> Result<Plan, SimError> {
        let now = view.now;
        if let Some(active) = self.active.take() {
            if active.start < now && now < active.end {
                let plan = active.plan.remainder(now);
                self.active = Some(active);
                return Ok(plan);
            }
            if now >= active.end {
                self.last_end = active.end;
            }
        }
        if !view.indices_with(RequestStatus::OnBoard).is_empty() {
            return Err(SimError::InfeasiblePlan {
                time: now,
                reason: "idle server still carries requests".into(),
            });
        }
        let waiting = view.indices_with(RequestStatus::Waiting);
        if waiting.is_empty() {
            return Ok(Plan::idle(now, view.position));
        }
        let requests: Vec<Request> = waiting.iter().map(|&k| view.released[k]).collect();
        let start = self.start_time(view, &requests)?;
        let solution = self.solver.optimal_schedule(&OfflineQuery::new(
            start,
            view.position,
            requests,
            view.capacity,
        ))?;
        let schedule = solution.schedule;
        let mut builder = TrajectoryBuilder::new(now, view.position);
        builder.wait_until(start);
        for &(t, x) in &schedule.trajectory().points()[1..] {
            builder.push(t, x);
        }
        let events: Vec<ScheduledEvent> = schedule
            .events
            .iter()
            .map(|e| ScheduledEvent {
                request: waiting[e.request],
                ..*e
            })
            .collect();
        let end = schedule.end_time();
        let record = ScheduleRecord {
            start_time: start,
            start_position: view.position,
            requests: waiting,
            end_position: schedule.end_position,
            end_time: end,
            idle_since: self.last_end,
        };
        let plan = Plan {
            path: builder.build().points().to_vec(),
            events,
            schedules: vec![record],
        };
        self.active = Some(Active {
            start,
            end,
            plan: plan.clone(),
        });
        Ok(plan)
    }
}

/// Earliest `t' ≥ now` with `l(t') ≤ (Θ - 1) t'`, where `l` is constant for
/// `t' ≥ settle`. Found by bisection to within `1e-9`, rounding up.
fn earliest_start(
    now: f64,
    theta: f64,
    settle: f64,
    mut l: impl FnMut(f64) -> Result<f64, SimError>,
) -> Result<f64, SimError> {
    let k = theta - 1.0;
    if l(now)? <= k * now {
        return Ok(now);
    }
    let settle = settle.max(now);
    let closed = l(settle)? / k;
    if closed >= settle {
        return Ok(closed);
    }
    let (mut lo, mut hi) = (now, settle);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if l(mid)? <= k * mid {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// SMARTSTART start time for the unserved requests `waiting`, idle at
/// position `p` from time `now` on.
pub fn smartstart_start_time(
    now: f64,
    p: f64,
    waiting: &[Request],
    capacity: Capacity,
    theta: f64,
    solver: &Solver,
) -> Result<f64, SimError> {
    check_theta(theta)?;
    if waiting.is_empty() {
        return Ok(now);
    }
    let settle = waiting.iter().fold(0.0_f64, |m, r| m.max(r.release));
    earliest_start(now, theta, settle, |t| {
        Ok(solver.makespan(t, p, waiting, capacity)?)
    })
}

/// SMARTERSTART start time given all requests `known` released so far.
pub fn smarterstart_start_time(
    now: f64,
    known: &[Request],
    capacity: Capacity,
    theta: f64,
    solver: &Solver,
) -> Result<f64, SimError> {
    check_theta(theta)?;
    if known.is_empty() {
        return Ok(now);
    }
    let settle = known.iter().fold(0.0_f64, |m, r| m.max(r.release));
    earliest_start(now, theta, settle, |t| {
        Ok(solver.makespan(t, 0.0, known, capacity)?)
    })
}

/// Baseline that re-solves the remaining problem optimally at every decision
/// point and follows the result until the next release.
#[derive(Debug, Clone, Default)]
pub struct Replan {
    solver: Solver,
}

pub fn make_replan() -> Replan {
    Replan::default()
}

impl Replan {
    pub fn with_solver(solver: Solver) -> Self {
        Self { solver }
    }
}

impl OnlineAlgorithm for Replan {
    fn name(&self) -> String {
        "replan".into()
    }

    fn reset(&mut self) {}

    fn decide(&mut self, view: &View<'_>) -> Result<Plan, SimError> {
        let open: Vec<usize> = (0..view.status.len())
            .filter(|&k| view.status[k] != RequestStatus::Served)
            .collect();
        if open.is_empty() {
            return Ok(Plan::idle(view.now, view.position));
        }
        let mut query = OfflineQuery::new(
            view.now,
            view.position,
            open.iter().map(|&k| view.released[k]).collect(),
            view.capacity,
        );
        query.onboard = (0..open.len())
            .filter(|&i| view.status[open[i]] == RequestStatus::OnBoard)
            .collect();
        let schedule = self.solver.optimal_schedule(&query)?.schedule;
        Ok(Plan {
            path: schedule.trajectory().points().to_vec(),
            events: schedule
                .events
                .iter()
                .map(|e| ScheduledEvent {
                    request: open[e.request],
                    ..*e
                })
                .collect(),
            schedules: Vec::new(),
        })
    }
}
