//! Event-driven simulation of online algorithms on the line.
//!
//! An algorithm is consulted at time 0, at every release time and whenever
//! its previous plan runs out. Each call returns a [`Plan`]: the motion and
//! service events it commits to until it is consulted again. The kernel
//! executes plans, checks their feasibility and records the run.
//!
//! Simultaneous happenings at one instant are ordered as: dropoffs, pickups,
//! newly released requests becoming visible, algorithm decisions.

mod algorithms;
mod eager;

use thiserror::Error;

use crate::model::{
    Capacity, EventKind, Instance, ModelError, Request, ScheduledEvent, Trajectory,
    TrajectoryBuilder, TOL,
};
use crate::offline::OfflineError;

pub use algorithms::{
    make_ignore, make_replan, make_smarterstart, make_smartstart, smarterstart_start_time,
    smartstart_start_time, Replan, ScheduleBased, StartRule,
};
pub use eager::{eager_transform, eagerize, Eager};

/// Errors raised during a simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Offline(#[from] OfflineError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("infeasible plan at time {time}: {reason}")]
    InfeasiblePlan { time: f64, reason: String },
    #[error("simulation exceeded its time horizon {horizon} at time {time}")]
    Horizon { time: f64, horizon: f64 },
    #[error("algorithm stalls at time {time} with unserved requests")]
    Stalled { time: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Service state of a request as seen by the algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RequestStatus {
    Waiting,
    OnBoard,
    Served,
}

/// What an algorithm observes when consulted.
#[derive(Debug, Clone, Copy)]
pub struct View<'a> {
    pub now: f64,
    pub position: f64,
    pub capacity: Capacity,
    /// All requests released so far, in release order. Indices are global.
    pub released: &'a [Request],
    pub status: &'a [RequestStatus],
}

impl View<'_> {
    pub fn indices_with(&self, wanted: RequestStatus) -> Vec<usize> {
        (0..self.status.len())
            .filter(|&k| self.status[k] == wanted)
            .collect()
    }
}

/// One schedule started by an ignore-style algorithm: start time `t_j`, start
/// position `p_j`, served requests and end position `p_{j+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleRecord {
    pub start_time: f64,
    pub start_position: f64,
    pub requests: Vec<usize>,
    pub end_position: f64,
    pub end_time: f64,
    /// Time at which the server last became idle before this start.
    pub idle_since: f64,
}

/// Committed motion and service events from the current time on.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    /// Breakpoints starting at `(now, position)`.
    pub path: Vec<(f64, f64)>,
    pub events: Vec<ScheduledEvent>,
    /// Schedules that start somewhere on this plan.
    pub schedules: Vec<ScheduleRecord>,
}

impl Plan {
    /// Stay put; the algorithm is consulted again at the next release.
    pub fn idle(now: f64, position: f64) -> Self {
        Self {
            path: vec![(now, position)],
            events: Vec::new(),
            schedules: Vec::new(),
        }
    }

    pub fn end_time(&self) -> f64 {
        self.path[self.path.len() - 1].0
    }

    fn position_at(&self, t: f64) -> f64 {
        Trajectory::new(self.path.clone())
            .map(|tr| tr.position_clamped(t))
            .unwrap_or(self.path[0].1)
    }

    /// The part of the plan after `now`; events at or before `now` are dropped.
    pub fn remainder(&self, now: f64) -> Self {
        let mut path = vec![(now, self.position_at(now))];
        path.extend(self.path.iter().copied().filter(|&(t, _)| t > now));
        Self {
            path,
            events: self
                .events
                .iter()
                .copied()
                .filter(|e| e.time > now)
                .collect(),
            schedules: Vec::new(),
        }
    }
}

/// A deterministic online algorithm.
pub trait OnlineAlgorithm {
    fn name(&self) -> String;
    /// Forget all per-run state.
    fn reset(&mut self);
    fn decide(&mut self, view: &View<'_>) -> Result<Plan, SimError>;
}

impl<A: OnlineAlgorithm + ?Sized> OnlineAlgorithm for Box<A> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn reset(&mut self) {
        (**self).reset()
    }
    fn decide(&mut self, view: &View<'_>) -> Result<Plan, SimError> {
        (**self).decide(view)
    }
}

/// Pickup and dropoff times of one request.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ServiceTimes {
    pub pickup: Option<f64>,
    pub dropoff: Option<f64>,
}

/// Outcome of a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    /// `ALG(σ)`: time of the last service event (0 for the empty instance).
    pub completion: f64,
    /// Server path from `(0, 0)` until the server comes to rest; it may
    /// extend past the completion time.
    pub trajectory: Trajectory,
    /// Executed service events in execution order.
    pub events: Vec<ScheduledEvent>,
    /// Schedules `S_1, S_2, ...` in start order.
    pub records: Vec<ScheduleRecord>,
    pub served: Vec<ServiceTimes>,
}

impl SimulationResult {
    /// First time the server is at `position`, if ever.
    pub fn first_arrival(&self, position: f64) -> Option<f64> {
        self.trajectory.first_reach(position, 0.0)
    }

    /// Server position at `t`; parked at its final position afterwards.
    pub fn position(&self, t: f64) -> f64 {
        self.trajectory.position_clamped(t)
    }

    /// The run reflected through the origin.
    pub fn mirrored(&self) -> Self {
        let flip = |e: &ScheduledEvent| ScheduledEvent {
            position: -e.position,
            ..*e
        };
        Self {
            completion: self.completion,
            trajectory: self.trajectory.mirrored(),
            events: self.events.iter().map(flip).collect(),
            records: self
                .records
                .iter()
                .map(|r| ScheduleRecord {
                    start_position: -r.start_position,
                    end_position: -r.end_position,
                    ..r.clone()
                })
                .collect(),
            served: self.served.clone(),
        }
    }
}

/// Kernel limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Absolute time after which the run is aborted; `None` derives
    /// `1000 (U + 1)` from a cheap upper bound `U ≥ OPT`.
    pub horizon: Option<f64>,
    /// Maximum number of algorithm consultations.
    pub max_decisions: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            horizon: None,
            max_decisions: 1_000_000,
        }
    }
}

/// An upper bound on `OPT`: wait for the last release, then serve the
/// requests one after another in release order.
pub fn opt_upper_bound(instance: &Instance) -> f64 {
    let last = instance
        .requests()
        .iter()
        .fold(0.0_f64, |m, r| m.max(r.release));
    let mut x = 0.0;
    let mut total = last;
    for r in instance.requests() {
        total += (x - r.origin).abs() + (r.origin - r.destination).abs();
        x = r.destination;
    }
    total
}

/// Runs `alg` on `instance` with default limits.
pub fn simulate(
    alg: &mut dyn OnlineAlgorithm,
    instance: &Instance,
) -> Result<SimulationResult, SimError> {
    simulate_with(alg, instance, SimConfig::default())
}

fn infeasible(time: f64, reason: impl Into<String>) -> SimError {
    SimError::InfeasiblePlan {
        time,
        reason: reason.into(),
    }
}

/// Runs `alg` on `instance`, revealing each request at its release time.
pub fn simulate_with(
    alg: &mut dyn OnlineAlgorithm,
    instance: &Instance,
    config: SimConfig,
) -> Result<SimulationResult, SimError> {
    alg.reset();
    let requests = instance.requests();
    let capacity = instance.capacity();
    let n = requests.len();
    let horizon = config
        .horizon
        .unwrap_or_else(|| 1000.0 * (opt_upper_bound(instance) + 1.0));

    let mut status = vec![RequestStatus::Waiting; n];
    let mut served = vec![ServiceTimes::default(); n];
    let mut events: Vec<ScheduledEvent> = Vec::new();
    let mut records: Vec<ScheduleRecord> = Vec::new();
    let mut builder = TrajectoryBuilder::new(0.0, 0.0);
    let mut load = 0usize;
    let mut done = 0usize;
    let mut revealed = 0usize;
    let mut now = 0.0_f64;
    let mut position = 0.0_f64;
    let mut decisions = 0usize;

    loop {
        while revealed < n && requests[revealed].release <= now {
            revealed += 1;
        }
        if now > horizon {
            return Err(SimError::Horizon { time: now, horizon });
        }
        decisions += 1;
        if decisions > config.max_decisions {
            return Err(SimError::Stalled { time: now });
        }
        let view = View {
            now,
            position,
            capacity,
            released: &requests[..revealed],
            status: &status[..revealed],
        };
        let plan = alg.decide(&view)?;

        let (t0, x0) = *plan
            .path
            .first()
            .ok_or_else(|| infeasible(now, "empty plan"))?;
        if (t0 - now).abs() > TOL || (x0 - position).abs() > TOL {
            return Err(infeasible(
                now,
                format!("plan starts at ({t0}, {x0}), server at ({now}, {position})"),
            ));
        }
        let mut path = plan.path.clone();
        path[0] = (now, position);
        let plan_traj = Trajectory::new(path)
            .map_err(|e| infeasible(now, format!("plan path rejected: {e}")))?;
        let plan_end = plan_traj.end_time();
        let next_release = (revealed < n).then(|| requests[revealed].release);
        let cut = next_release.unwrap_or(f64::INFINITY);
        let stop = plan_end.min(cut);

        for &(t, x) in &plan_traj.points()[1..] {
            if t <= stop {
                builder.push(t, x);
            } else {
                break;
            }
        }
        if plan_end > cut {
            builder.push(cut, plan_traj.position_clamped(cut));
        }

        // A schedule that starts exactly at the next release is decided after
        // that release becomes visible, so none of its events run yet.
        let deferred = plan.schedules.iter().any(|r| r.start_time >= cut);
        let mut executed = 0usize;
        let mut last_time = now;
        for e in &plan.events {
            let runs = e.time < cut || (e.time <= cut && !deferred);
            if !runs || e.time > plan_end + TOL {
                if e.time > plan_end + TOL {
                    return Err(infeasible(e.time, "event after the end of the plan path"));
                }
                continue;
            }
            if e.time < last_time - TOL {
                return Err(infeasible(e.time, "events out of time order"));
            }
            last_time = e.time;
            let k = e.request;
            if k >= revealed {
                return Err(infeasible(
                    e.time,
                    format!("request {k} is not released yet"),
                ));
            }
            let r = requests[k];
            let at = plan_traj.position_clamped(e.time);
            if (at - e.position).abs() > 1e-7 {
                return Err(infeasible(
                    e.time,
                    format!("server at {at}, event at {}", e.position),
                ));
            }
            match e.kind {
                EventKind::Pickup => {
                    if status[k] != RequestStatus::Waiting {
                        return Err(infeasible(e.time, format!("request {k} picked up twice")));
                    }
                    if (e.position - r.origin).abs() > TOL {
                        return Err(infeasible(
                            e.time,
                            format!("pickup of {k} away from its origin"),
                        ));
                    }
                    if e.time < r.release - TOL {
                        return Err(infeasible(e.time, format!("pickup of {k} before release")));
                    }
                    if !capacity.admits(load) {
                        return Err(infeasible(e.time, "capacity exceeded"));
                    }
                    load += 1;
                    status[k] = RequestStatus::OnBoard;
                    served[k].pickup = Some(e.time);
                }
                EventKind::Dropoff => {
                    if status[k] != RequestStatus::OnBoard {
                        return Err(infeasible(e.time, format!("dropoff of {k} without pickup")));
                    }
                    if (e.position - r.destination).abs() > TOL {
                        return Err(infeasible(
                            e.time,
                            format!("dropoff of {k} away from its destination"),
                        ));
                    }
                    load -= 1;
                    done += 1;
                    status[k] = RequestStatus::Served;
                    served[k].dropoff = Some(e.time);
                }
            }
            events.push(*e);
            executed += 1;
        }
        for record in &plan.schedules {
            if record.start_time < cut && !records.contains(record) {
                records.push(record.clone());
            }
        }

        position = builder.last().1;
        if plan_end >= cut {
            now = cut;
        } else if plan_end > now || executed > 0 {
            now = plan_end;
        } else {
            // No progress: idle until something new is released.
            match next_release {
                Some(t) => {
                    builder.push(t, position);
                    now = t;
                }
                None if done == n => break,
                None => return Err(SimError::Stalled { time: now }),
            }
        }
    }

    let completion = events.last().map_or(0.0, |e| e.time);
    records.sort_by(|a, b| a.start_time.total_cmp(&b.start_time));
    Ok(SimulationResult {
        completion,
        trajectory: builder.build(),
        events,
        records,
        served,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Serves every released request one by one, in index order, immediately.
    struct Naive;

    impl OnlineAlgorithm for Naive {
        fn name(&self) -> String {
            "naive".into()
        }
        fn reset(&mut self) {}
        fn decide(&mut self, view: &View<'_>) -> Result<Plan, SimError> {
            let mut b = TrajectoryBuilder::new(view.now, view.position);
            let mut events = Vec::new();
            for k in view.indices_with(RequestStatus::OnBoard) {
                let r = view.released[k];
                let t = b.move_to(r.destination);
                events.push(ScheduledEvent {
                    time: t,
                    kind: EventKind::Dropoff,
                    request: k,
                    position: r.destination,
                });
            }
            for k in view.indices_with(RequestStatus::Waiting) {
                let r = view.released[k];
                let t = b.move_to(r.origin);
                events.push(ScheduledEvent {
                    time: t,
                    kind: EventKind::Pickup,
                    request: k,
                    position: r.origin,
                });
                let t = b.move_to(r.destination);
                events.push(ScheduledEvent {
                    time: t,
                    kind: EventKind::Dropoff,
                    request: k,
                    position: r.destination,
                });
            }
            Ok(Plan {
                path: b.build().points().to_vec(),
                events,
                schedules: vec![],
            })
        }
    }

    #[test]
    fn empty_instance_completes_at_zero() {
        let r = simulate(&mut Naive, &Instance::empty(Capacity::Finite(1))).unwrap();
        assert_eq!(r.completion, 0.0);
        assert_eq!(r.trajectory.points(), &[(0.0, 0.0)]);
    }

    #[test]
    fn naive_replans_at_releases() {
        let inst = Instance::new(
            Capacity::Finite(1),
            vec![Request::point(2.0, 0.0), Request::point(-1.0, 1.0)],
        )
        .unwrap();
        let r = simulate(&mut Naive, &inst).unwrap();
        // At t=1 it is at 1 carrying nothing; it then continues to 2 and comes back.
        assert_eq!(r.served[0].dropoff, Some(2.0));
        assert_eq!(r.completion, 5.0);
        assert_eq!(r.trajectory.position_at(1.0).unwrap(), 1.0);
    }

    struct Cheater;
    impl OnlineAlgorithm for Cheater {
        fn name(&self) -> String {
            "cheater".into()
        }
        fn reset(&mut self) {}
        fn decide(&mut self, view: &View<'_>) -> Result<Plan, SimError> {
            Ok(Plan {
                path: vec![
                    (view.now, view.position),
                    (view.now + 1.0, view.position + 5.0),
                ],
                events: vec![],
                schedules: vec![],
            })
        }
    }

    #[test]
    fn speeding_plans_are_rejected() {
        let inst = Instance::new(Capacity::Finite(1), vec![Request::point(2.0, 0.0)]).unwrap();
        assert!(matches!(
            simulate(&mut Cheater, &inst),
            Err(SimError::InfeasiblePlan { .. })
        ));
    }

    struct Lazy;
    impl OnlineAlgorithm for Lazy {
        fn name(&self) -> String {
            "lazy".into()
        }
        fn reset(&mut self) {}
        fn decide(&mut self, view: &View<'_>) -> Result<Plan, SimError> {
            Ok(Plan::idle(view.now, view.position))
        }
    }

    #[test]
    fn idle_algorithms_are_reported() {
        let inst = Instance::new(Capacity::Finite(1), vec![Request::point(2.0, 0.0)]).unwrap();
        assert!(matches!(
            simulate(&mut Lazy, &inst),
            Err(SimError::Stalled { .. })
        ));
    }
}
