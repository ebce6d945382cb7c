//! The eagerize wrapper: a fully loaded server whose load shares one
//! destination drives straight there.

use super::{
    simulate, OnlineAlgorithm, Plan, RequestStatus, ScheduleRecord, SimError, SimulationResult,
    View,
};
use crate::model::{
    Capacity, EventKind, Instance, ScheduledEvent, Trajectory, TrajectoryBuilder, TOL,
};

/// Wraps an algorithm so that it becomes eager.
///
/// At every decision the wrapped algorithm is replayed from time 0 on the
/// requests known so far, and its run is rewritten by [`eager_transform`].
/// Replaying is sound because the wrapped algorithm is deterministic and its
/// motion up to the present only depends on requests released so far.
#[derive(Debug, Clone)]
pub struct Eager<A> {
    inner: A,
}

pub fn eagerize<A: OnlineAlgorithm>(alg: A) -> Eager<A> {
    Eager { inner: alg }
}

impl<A> Eager<A> {
    pub fn inner(&self) -> &A {
        &self.inner
    }
}

/// Rewrites a run into its eager counterpart.
///
/// The server mirrors the given run, except that whenever the run's server
/// becomes fully loaded with requests that all share destination `d`, it
/// drives straight to `d`, delivers them, and waits there until the original
/// server reaches `d` for its next dropoff. Later dropoffs of requests that
/// were already delivered are skipped. Returns the new path and events.
pub fn eager_transform(
    run: &SimulationResult,
    capacity: Capacity,
) -> Result<(Trajectory, Vec<ScheduledEvent>), SimError> {
    if capacity == Capacity::Unbounded {
        return Ok((run.trajectory.clone(), run.events.clone()));
    }
    let n = run.served.len();
    let mut loaded: Vec<usize> = Vec::new();
    let mut delivered = vec![false; n];
    let mut out_events = Vec::with_capacity(run.events.len());
    let mut builder = TrajectoryBuilder::new(0.0, 0.0);
    let mut clock = 0.0;
    let points = run.trajectory.points();

    let mirror = |builder: &mut TrajectoryBuilder, from: f64, to: f64| {
        for &(t, x) in points.iter().filter(|&&(t, _)| t > from && t < to) {
            builder.push(t, x);
        }
        builder.push(to, run.trajectory.position_clamped(to));
    };

    let events = &run.events;
    let mut i = 0;
    while i < events.len() {
        let e = events[i];
        if e.time > clock {
            mirror(&mut builder, clock, e.time);
            clock = e.time;
        }
        match e.kind {
            EventKind::Pickup => {
                loaded.push(e.request);
                out_events.push(e);
            }
            EventKind::Dropoff => {
                loaded.retain(|&k| k != e.request);
                if !delivered[e.request] {
                    out_events.push(e);
                }
            }
        }
        i += 1;

        // Several events may share this instant; judge the load after all of them.
        if i < events.len() && events[i].time <= clock {
            continue;
        }
        if !capacity.is_full(loaded.len()) {
            continue;
        }
        let own: Vec<usize> = loaded.iter().copied().filter(|&k| !delivered[k]).collect();
        let Some(&first) = own.first() else { continue };
        let d = destination_of(run, first);
        if loaded
            .iter()
            .any(|&k| (destination_of(run, k) - d).abs() > TOL)
        {
            continue;
        }
        let Some(next) = events.get(i) else { break };
        let (_, x) = builder.last();
        let arrival = clock + (d - x).abs();
        if arrival > next.time + 1e-7 || (next.position - d).abs() > TOL {
            return Err(SimError::InfeasiblePlan {
                time: clock,
                reason: "wrapped run does not deliver its full load next".into(),
            });
        }
        builder.move_to(d);
        let arrival = builder.last().0;
        for &k in &own {
            delivered[k] = true;
            out_events.push(ScheduledEvent {
                time: arrival,
                kind: EventKind::Dropoff,
                request: k,
                position: d,
            });
        }
        builder.wait_until(next.time);
        clock = next.time.max(arrival);
    }
    let end = run.trajectory.end_time();
    if end > clock {
        mirror(&mut builder, clock, end);
    }
    Ok((builder.build(), out_events))
}

fn destination_of(run: &SimulationResult, k: usize) -> f64 {
    run.events
        .iter()
        .find(|e| e.request == k && e.kind == EventKind::Dropoff)
        .map_or(f64::NAN, |e| e.position)
}

impl<A: OnlineAlgorithm> OnlineAlgorithm for Eager<A> {
    fn name(&self) -> String {
        format!("eager({})", self.inner.name())
    }

    fn reset(&mut self) {
        self.inner.reset();
    }

    fn decide(&mut self, view: &View<'_>) -> Result<Plan, SimError> {
        let known = Instance::new(view.capacity, view.released.to_vec())?;
        let run = simulate(&mut self.inner, &known)?;
        let (path, events) = eager_transform(&run, view.capacity)?;
        let now = view.now;
        let mut points = vec![(now, path.position_clamped(now))];
        points.extend(path.points().iter().copied().filter(|&(t, _)| t > now));
        let events = events
            .into_iter()
            .filter(|e| match e.kind {
                EventKind::Pickup => view.status[e.request] == RequestStatus::Waiting,
                EventKind::Dropoff => view.status[e.request] != RequestStatus::Served,
            })
            .collect();
        let schedules: Vec<ScheduleRecord> = run
            .records
            .into_iter()
            .filter(|r| r.start_time >= now)
            .collect();
        Ok(Plan {
            path: points,
            events,
            schedules,
        })
    }
}
