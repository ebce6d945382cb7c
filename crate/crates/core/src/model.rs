//! Core domain types: requests, instances, trajectories, schedules and the
//! instance file format.
//!
//! All times and positions are `f64`. Comparisons that must tolerate rounding
//! use the absolute tolerance [`TOL`].

use std::fmt;

use rand::Rng;
use thiserror::Error;

/// Absolute tolerance for every time and position comparison.
pub const TOL: f64 = 1e-9;

/// Errors raised while validating or parsing model data.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("capacity ≥ 1 violated")]
    ZeroCapacity,
    #[error("release ≥ 0 violated at index {index}")]
    NegativeRelease { index: usize },
    #[error("non-finite field at index {index}")]
    NonFinite { index: usize },
    #[error("trajectory has no breakpoints")]
    EmptyTrajectory,
    #[error("breakpoint {index} is not strictly later than its predecessor")]
    NonIncreasingTime { index: usize },
    #[error("segment ending at breakpoint {index} exceeds unit speed")]
    SpeedViolation { index: usize },
    #[error("time {time} outside trajectory span [{start}, {end}]")]
    OutsideSpan { time: f64, start: f64, end: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A transportation request `(a, b; r)`: carry an object from `origin` to
/// `destination`, available from time `release` on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Request {
    pub origin: f64,
    pub destination: f64,
    pub release: f64,
}

impl Request {
    pub fn new(origin: f64, destination: f64, release: f64) -> Self {
        Self {
            origin,
            destination,
            release,
        }
    }

    /// A request whose origin equals its destination, released at `release`.
    pub fn point(position: f64, release: f64) -> Self {
        Self::new(position, position, release)
    }

    pub fn mirrored(&self) -> Self {
        Self::new(-self.origin, -self.destination, self.release)
    }

    fn check(&self, index: usize) -> Result<(), ModelError> {
        if !(self.origin.is_finite() && self.destination.is_finite() && self.release.is_finite()) {
            return Err(ModelError::NonFinite { index });
        }
        if self.release < 0.0 {
            return Err(ModelError::NegativeRelease { index });
        }
        Ok(())
    }
}

impl fmt::Display for Request {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}; {})",
            self.origin, self.destination, self.release
        )
    }
}

/// Server capacity: a positive integer or unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Capacity {
    Finite(usize),
    Unbounded,
}

impl Capacity {
    /// Whether one more object fits when `load` objects are on board.
    pub fn admits(&self, load: usize) -> bool {
        match *self {
            Capacity::Finite(c) => load < c,
            Capacity::Unbounded => true,
        }
    }

    /// Whether `load` objects exhaust the capacity.
    pub fn is_full(&self, load: usize) -> bool {
        !self.admits(load)
    }
}

impl std::str::FromStr for Capacity {
    type Err = String;

    /// Parses `inf` or a positive integer.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" => Ok(Capacity::Unbounded),
            v => match v.parse::<usize>() {
                Ok(c) if c >= 1 => Ok(Capacity::Finite(c)),
                _ => Err(format!(
                    "invalid capacity {v:?}, expected a positive integer or inf"
                )),
            },
        }
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(c) => write!(f, "{c}"),
            Capacity::Unbounded => write!(f, "inf"),
        }
    }
}

/// A validated instance. Requests are kept sorted by release time with
/// stable tie-breaking on input order, so request indices coincide with the
/// order in which an online server learns about them.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    capacity: Capacity,
    requests: Vec<Request>,
}

impl Instance {
    /// Validates all invariants and sorts the requests by release time.
    pub fn new(capacity: Capacity, mut requests: Vec<Request>) -> Result<Self, ModelError> {
        if capacity == Capacity::Finite(0) {
            return Err(ModelError::ZeroCapacity);
        }
        for (index, request) in requests.iter().enumerate() {
            request.check(index)?;
        }
        requests.sort_by(|a, b| a.release.total_cmp(&b.release));
        Ok(Self { capacity, requests })
    }

    pub fn empty(capacity: Capacity) -> Self {
        Self {
            capacity,
            requests: Vec::new(),
        }
    }

    pub fn capacity(&self) -> Capacity {
        self.capacity
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    /// Returns a copy with one more request appended in release order.
    pub fn with_request(&self, request: Request) -> Result<Self, ModelError> {
        let mut requests = self.requests.clone();
        requests.push(request);
        Self::new(self.capacity, requests)
    }

    /// Reflects every request through the origin: `(a,b;r)` becomes `(-a,-b;r)`.
    pub fn mirrored(&self) -> Self {
        Self {
            capacity: self.capacity,
            requests: self.requests.iter().map(Request::mirrored).collect(),
        }
    }

    /// Leftmost point that must be visited, never right of the origin.
    pub fn leftmost(&self) -> f64 {
        self.requests
            .iter()
            .flat_map(|r| [r.origin, r.destination])
            .fold(0.0, f64::min)
    }

    /// Rightmost point that must be visited, never left of the origin.
    pub fn rightmost(&self) -> f64 {
        self.requests
            .iter()
            .flat_map(|r| [r.origin, r.destination])
            .fold(0.0, f64::max)
    }

    /// Parses the line-based instance format.
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        parse_instance(text)
    }

    /// Serializes into the line-based instance format.
    pub fn serialize(&self) -> String {
        serialize_instance(self)
    }
}

/// Checks an instance and returns it; a thin alias for [`Instance::new`].
pub fn validate_instance(
    capacity: Capacity,
    requests: Vec<Request>,
) -> Result<Instance, ModelError> {
    Instance::new(capacity, requests)
}

/// Parses the instance file format:
///
/// ```text
/// # comment
/// capacity <positive-int | inf>
/// request <a> <b> <r>
/// ```
pub fn parse_instance(text: &str) -> Result<Instance, ModelError> {
    let err = |line: usize, message: String| ModelError::Parse { line, message };
    let mut capacity = None;
    let mut requests = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("capacity") => {
                if capacity.is_some() {
                    return Err(err(line_no, "duplicate capacity line".into()));
                }
                let value = fields
                    .next()
                    .ok_or_else(|| err(line_no, "capacity value missing".into()))?;
                let parsed = if value == "inf" {
                    Capacity::Unbounded
                } else {
                    let c: usize = value
                        .parse()
                        .map_err(|_| err(line_no, format!("invalid capacity {value:?}")))?;
                    if c == 0 {
                        return Err(err(line_no, "capacity ≥ 1 violated".into()));
                    }
                    Capacity::Finite(c)
                };
                if fields.next().is_some() {
                    return Err(err(line_no, "trailing fields after capacity".into()));
                }
                capacity = Some(parsed);
            }
            Some("request") => {
                let mut values = [0.0; 3];
                for (slot, name) in values.iter_mut().zip(["origin", "destination", "release"]) {
                    let field = fields
                        .next()
                        .ok_or_else(|| err(line_no, format!("request {name} missing")))?;
                    *slot = field
                        .parse()
                        .map_err(|_| err(line_no, format!("invalid {name} {field:?}")))?;
                }
                if fields.next().is_some() {
                    return Err(err(line_no, "trailing fields after request".into()));
                }
                let request = Request::new(values[0], values[1], values[2]);
                request
                    .check(requests.len())
                    .map_err(|e| err(line_no, e.to_string()))?;
                requests.push(request);
            }
            Some(other) => return Err(err(line_no, format!("unknown directive {other:?}"))),
            None => unreachable!("blank lines are skipped"),
        }
    }
    let capacity = capacity.ok_or_else(|| err(0, "missing capacity line".into()))?;
    Instance::new(capacity, requests)
}

/// Serializes an instance; `parse_instance(serialize_instance(x)) == x`.
pub fn serialize_instance(instance: &Instance) -> String {
    let mut out = format!("capacity {}\n", instance.capacity);
    for r in &instance.requests {
        out.push_str(&format!(
            "request {} {} {}\n",
            r.origin, r.destination, r.release
        ));
    }
    out
}

/// Draws a random instance: positions uniform in `[-radius, radius]`,
/// releases uniform in `[0, 2 radius]`.
pub fn random_instance<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    radius: f64,
    capacity: Capacity,
) -> Instance {
    let requests = (0..n)
        .map(|_| {
            Request::new(
                rng.gen_range(-radius..=radius),
                rng.gen_range(-radius..=radius),
                rng.gen_range(0.0..=2.0 * radius),
            )
        })
        .collect();
    Instance::new(capacity, requests).expect("generated requests are valid")
}

/// A line `value(t) = slope * t + intercept` in the time/position plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
}

impl Line {
    pub fn new(slope: f64, intercept: f64) -> Self {
        Self { slope, intercept }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.slope * t + self.intercept
    }

    /// The reflected line `t -> -value(t)`.
    pub fn mirrored(&self) -> Self {
        Self::new(-self.slope, -self.intercept)
    }
}

/// Piecewise-linear unit-speed server path given by breakpoints
/// `(time, position)` with strictly increasing times. Waiting is a segment of
/// slope zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    points: Vec<(f64, f64)>,
}

impl Trajectory {
    /// Validates ordering and the unit-speed bound (with tolerance [`TOL`]).
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, ModelError> {
        if points.is_empty() {
            return Err(ModelError::EmptyTrajectory);
        }
        for (index, pair) in points.windows(2).enumerate() {
            let ((t0, x0), (t1, x1)) = (pair[0], pair[1]);
            if t1 <= t0 {
                return Err(ModelError::NonIncreasingTime { index: index + 1 });
            }
            if (x1 - x0).abs() > t1 - t0 + TOL {
                return Err(ModelError::SpeedViolation { index: index + 1 });
            }
        }
        Ok(Self { points })
    }

    /// A trajectory that stays at `position` from time `time` (a single point).
    pub fn at(time: f64, position: f64) -> Self {
        Self {
            points: vec![(time, position)],
        }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn start_time(&self) -> f64 {
        self.points[0].0
    }

    pub fn end_time(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    pub fn end_position(&self) -> f64 {
        self.points[self.points.len() - 1].1
    }

    /// Position at time `t` by linear interpolation.
    pub fn position_at(&self, t: f64) -> Result<f64, ModelError> {
        let (start, end) = (self.start_time(), self.end_time());
        if t < start - TOL || t > end + TOL {
            return Err(ModelError::OutsideSpan {
                time: t,
                start,
                end,
            });
        }
        Ok(self.position_clamped(t))
    }

    /// Position at `t`, treating the server as parked at its first/last
    /// breakpoint outside the span.
    pub fn position_clamped(&self, t: f64) -> f64 {
        let pts = &self.points;
        if t <= pts[0].0 {
            return pts[0].1;
        }
        let idx = pts.partition_point(|&(time, _)| time <= t);
        if idx >= pts.len() {
            return pts[pts.len() - 1].1;
        }
        let (t0, x0) = pts[idx - 1];
        let (t1, x1) = pts[idx];
        x0 + (x1 - x0) * (t - t0) / (t1 - t0)
    }

    /// Smallest `t >= from` within the span where the trajectory meets `line`.
    pub fn first_crossing(&self, line: &Line, from: f64) -> Option<f64> {
        let pts = &self.points;
        let gap = |t: f64, x: f64| x - line.value(t);
        if pts.len() == 1 {
            let (t, x) = pts[0];
            return (t >= from - TOL && gap(t, x).abs() <= TOL).then_some(t.max(from));
        }
        for pair in pts.windows(2) {
            let ((t0, x0), (t1, x1)) = (pair[0], pair[1]);
            if t1 < from {
                continue;
            }
            let a = t0.max(from);
            let xa = x0 + (x1 - x0) * (a - t0) / (t1 - t0);
            let ga = gap(a, xa);
            if ga.abs() <= TOL {
                return Some(a);
            }
            let gb = gap(t1, x1);
            if gb.abs() <= TOL {
                // Solve exactly where possible before falling back to the endpoint.
                return Some(solve_linear_root(a, ga, t1, gb).unwrap_or(t1));
            }
            if ga.signum() != gb.signum() {
                return solve_linear_root(a, ga, t1, gb);
            }
        }
        None
    }

    /// The reflected trajectory `t -> -pos(t)`.
    pub fn mirrored(&self) -> Self {
        Self {
            points: self.points.iter().map(|&(t, x)| (t, -x)).collect(),
        }
    }

    /// Minimum and maximum position over `[from, to]`.
    pub fn extent(&self, from: f64, to: f64) -> (f64, f64) {
        let mut lo = self.position_clamped(from);
        let mut hi = lo;
        let end = self.position_clamped(to);
        lo = lo.min(end);
        hi = hi.max(end);
        for &(t, x) in &self.points {
            if t > from && t < to {
                lo = lo.min(x);
                hi = hi.max(x);
            }
        }
        (lo, hi)
    }

    /// First time `t >= from` at which the server is at `position`.
    pub fn first_reach(&self, position: f64, from: f64) -> Option<f64> {
        self.first_crossing(&Line::new(0.0, position), from)
    }

    /// Removes breakpoints that lie on the straight segment joining their
    /// neighbours, so equal paths have equal breakpoint lists.
    pub fn normalized(&self) -> Self {
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(self.points.len());
        for &p in &self.points {
            while out.len() >= 2 {
                let (t0, x0) = out[out.len() - 2];
                let (t1, x1) = out[out.len() - 1];
                let s01 = (x1 - x0) / (t1 - t0);
                let s12 = (p.1 - x1) / (p.0 - t1);
                if (s01 - s12).abs() <= TOL {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(p);
        }
        Self { points: out }
    }
}

fn solve_linear_root(a: f64, ga: f64, b: f64, gb: f64) -> Option<f64> {
    if ga == gb {
        return None;
    }
    let t = a + (b - a) * ga / (ga - gb);
    Some(t.clamp(a, b))
}

/// Incrementally builds a trajectory, dropping zero-length steps.
#[derive(Debug, Clone)]
pub struct TrajectoryBuilder {
    points: Vec<(f64, f64)>,
}

impl TrajectoryBuilder {
    pub fn new(time: f64, position: f64) -> Self {
        Self {
            points: vec![(time, position)],
        }
    }

    pub fn last(&self) -> (f64, f64) {
        self.points[self.points.len() - 1]
    }

    /// Appends a breakpoint; a point at (nearly) the current time replaces the
    /// position instead of creating a zero-length segment.
    pub fn push(&mut self, time: f64, position: f64) {
        let (t, _) = self.last();
        if time <= t + 1e-12 {
            let n = self.points.len();
            if n == 1 {
                self.points[0].1 = position;
            } else {
                self.points[n - 1] = (t, position);
            }
        } else {
            self.points.push((time, position));
        }
    }

    /// Moves at unit speed to `position`, returning the arrival time.
    pub fn move_to(&mut self, position: f64) -> f64 {
        let (t, x) = self.last();
        let arrival = t + (position - x).abs();
        self.push(arrival, position);
        arrival
    }

    /// Waits at the current position until `time` (no-op if already later).
    pub fn wait_until(&mut self, time: f64) {
        let (t, x) = self.last();
        if time > t {
            self.push(time, x);
        }
    }

    pub fn build(self) -> Trajectory {
        Trajectory {
            points: self.points,
        }
    }
}

/// Kind of a service event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Pickup,
    Dropoff,
}

/// A timed pickup or dropoff of request `request` at `position`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduledEvent {
    pub time: f64,
    pub kind: EventKind,
    pub request: usize,
    pub position: f64,
}

/// A schedule: start state plus an ordered list of service events. Between
/// events the server drives straight to the next event position and waits
/// there if needed.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub start_time: f64,
    pub start_position: f64,
    pub events: Vec<ScheduledEvent>,
    pub end_position: f64,
}

impl Schedule {
    /// Time of the last event, or the start time for an empty schedule.
    pub fn end_time(&self) -> f64 {
        self.events.last().map_or(self.start_time, |e| e.time)
    }

    pub fn makespan(&self) -> f64 {
        self.end_time() - self.start_time
    }

    /// The unit-speed path realizing this schedule.
    pub fn trajectory(&self) -> Trajectory {
        let mut builder = TrajectoryBuilder::new(self.start_time, self.start_position);
        for event in &self.events {
            builder.move_to(event.position);
            builder.wait_until(event.time);
        }
        builder.build()
    }
}

/// Why a schedule is infeasible.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeasibilityError {
    #[error("request {request} picked up before its release")]
    PickupBeforeRelease { request: usize },
    #[error("event {event} for request {request} is not at the required position")]
    WrongPosition { event: usize, request: usize },
    #[error("capacity exceeded at event {event}")]
    CapacityExceeded { event: usize },
    #[error("event {event} is not reachable at unit speed")]
    Unreachable { event: usize },
    #[error("event {event} repeats or misorders service of request {request}")]
    BadOrder { event: usize, request: usize },
    #[error("request {request} is never delivered")]
    Incomplete { request: usize },
    #[error("event {event} refers to unknown request {request}")]
    UnknownRequest { event: usize, request: usize },
    #[error("end position does not match the last event")]
    EndPosition,
}

/// Checks that `schedule` serves every request exactly once, respecting
/// releases, destinations, capacity and unit speed. Requests listed in
/// `onboard` are already loaded at the start and only need a dropoff.
pub fn check_schedule(
    schedule: &Schedule,
    requests: &[Request],
    onboard: &[usize],
    capacity: Capacity,
) -> Result<(), FeasibilityError> {
    #[derive(Clone, Copy, PartialEq)]
    enum State {
        Waiting,
        Loaded,
        Done,
    }
    let mut state = vec![State::Waiting; requests.len()];
    for &k in onboard {
        state[k] = State::Loaded;
    }
    let mut load = onboard.len();
    let (mut t, mut x) = (schedule.start_time, schedule.start_position);
    for (i, event) in schedule.events.iter().enumerate() {
        let k = event.request;
        let request = requests.get(k).ok_or(FeasibilityError::UnknownRequest {
            event: i,
            request: k,
        })?;
        if event.time < t - TOL || (event.position - x).abs() > event.time - t + TOL {
            return Err(FeasibilityError::Unreachable { event: i });
        }
        match event.kind {
            EventKind::Pickup => {
                if state[k] != State::Waiting {
                    return Err(FeasibilityError::BadOrder {
                        event: i,
                        request: k,
                    });
                }
                if (event.position - request.origin).abs() > TOL {
                    return Err(FeasibilityError::WrongPosition {
                        event: i,
                        request: k,
                    });
                }
                if event.time < request.release - TOL {
                    return Err(FeasibilityError::PickupBeforeRelease { request: k });
                }
                if !capacity.admits(load) {
                    return Err(FeasibilityError::CapacityExceeded { event: i });
                }
                load += 1;
                state[k] = State::Loaded;
            }
            EventKind::Dropoff => {
                if state[k] != State::Loaded {
                    return Err(FeasibilityError::BadOrder {
                        event: i,
                        request: k,
                    });
                }
                if (event.position - request.destination).abs() > TOL {
                    return Err(FeasibilityError::WrongPosition {
                        event: i,
                        request: k,
                    });
                }
                load -= 1;
                state[k] = State::Done;
            }
        }
        t = event.time;
        x = event.position;
    }
    if let Some(k) = state.iter().position(|s| *s != State::Done) {
        return Err(FeasibilityError::Incomplete { request: k });
    }
    if (schedule.end_position - x).abs() > TOL {
        return Err(FeasibilityError::EndPosition);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_examples() {
        assert!(Instance::new(Capacity::Finite(1), vec![Request::point(1.0, 0.0)]).is_ok());
        let err = Instance::new(Capacity::Finite(0), vec![Request::point(1.0, 0.0)]).unwrap_err();
        assert_eq!(err.to_string(), "capacity ≥ 1 violated");
        let err =
            Instance::new(Capacity::Finite(2), vec![Request::new(1.0, 2.0, -0.5)]).unwrap_err();
        assert_eq!(err.to_string(), "release ≥ 0 violated at index 0");
        let err =
            Instance::new(Capacity::Finite(2), vec![Request::new(f64::NAN, 2.0, 0.5)]).unwrap_err();
        assert_eq!(err, ModelError::NonFinite { index: 0 });
    }

    #[test]
    fn requests_are_sorted_stably() {
        let inst = Instance::new(
            Capacity::Unbounded,
            vec![
                Request::point(1.0, 2.0),
                Request::point(2.0, 1.0),
                Request::point(3.0, 1.0),
            ],
        )
        .unwrap();
        let origins: Vec<f64> = inst.requests().iter().map(|r| r.origin).collect();
        assert_eq!(origins, vec![2.0, 3.0, 1.0]);
    }

    #[test]
    fn mirror_examples() {
        let delta = 2.414;
        let inst = Instance::new(Capacity::Finite(1), vec![Request::new(1.0, delta, 1.0)]).unwrap();
        assert_eq!(
            inst.mirrored().requests()[0],
            Request::new(-1.0, -delta, 1.0)
        );
        let fixed = Instance::new(Capacity::Finite(1), vec![Request::point(0.0, 5.0)]).unwrap();
        assert_eq!(fixed.mirrored().requests()[0].origin, 0.0);
        assert_eq!(fixed.mirrored().requests()[0].release, 5.0);
    }

    #[test]
    fn position_examples() {
        let t = Trajectory::new(vec![(0.0, 0.0), (2.0, 2.0)]).unwrap();
        assert_eq!(t.position_at(1.0).unwrap(), 1.0);
        let t = Trajectory::new(vec![(0.0, 0.0), (3.0, 0.0)]).unwrap();
        assert_eq!(t.position_at(2.0).unwrap(), 0.0);
        let t = Trajectory::new(vec![(0.0, 0.0), (2.0, 2.0), (5.0, -1.0)]).unwrap();
        assert_eq!(t.position_at(4.0).unwrap(), 0.0);
        assert!(matches!(
            t.position_at(6.0),
            Err(ModelError::OutsideSpan { .. })
        ));
    }

    #[test]
    fn trajectory_rejects_speeding_and_unordered_points() {
        assert_eq!(
            Trajectory::new(vec![(0.0, 0.0), (1.0, 2.0)]).unwrap_err(),
            ModelError::SpeedViolation { index: 1 }
        );
        assert_eq!(
            Trajectory::new(vec![(0.0, 0.0), (0.0, 0.0)]).unwrap_err(),
            ModelError::NonIncreasingTime { index: 1 }
        );
    }

    #[test]
    fn crossing_examples() {
        let flat = Trajectory::new(vec![(0.0, 0.0), (10.0, 0.0)]).unwrap();
        let hit = flat.first_crossing(&Line::new(1.0, -5.0), 0.0).unwrap();
        assert!((hit - 5.0).abs() < 1e-12);

        let rho: f64 = 2.0585;
        let diag = Trajectory::new(vec![(0.0, 0.0), (10.0, 10.0)]).unwrap();
        let ell = Line::new(4.0 - rho, -(2.0 * rho - 2.0) * 2.0);
        let hit = diag.first_crossing(&ell, 0.0).unwrap();
        assert!((hit - 4.234 / 0.9415).abs() < 1e-9);
        assert!((hit - 4.497).abs() < 1e-3);

        let parked = Trajectory::new(vec![(0.0, 1.0), (2.0, 1.0)]).unwrap();
        assert_eq!(parked.first_crossing(&Line::new(1.0, 10.0), 0.0), None);
    }

    #[test]
    fn parse_examples() {
        let inst = parse_instance("capacity 1\nrequest 1 1 0\n").unwrap();
        assert_eq!(inst.capacity(), Capacity::Finite(1));
        assert_eq!(inst.requests(), &[Request::point(1.0, 0.0)]);
        let inst = parse_instance("capacity inf\n").unwrap();
        assert_eq!(inst.capacity(), Capacity::Unbounded);
        assert!(inst.is_empty());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_instance("# header\ncapacity 2\nrequest 1 x 0\n").unwrap_err();
        assert!(matches!(err, ModelError::Parse { line: 3, .. }), "{err}");
        let err = parse_instance("capacity 0\n").unwrap_err();
        assert!(matches!(err, ModelError::Parse { line: 1, .. }));
        let err = parse_instance("request 1 1 1\n").unwrap_err();
        assert!(err.to_string().contains("missing capacity"));
        let err = parse_instance("capacity 1\nrequest 1 1 -1\n").unwrap_err();
        assert!(err.to_string().contains("release ≥ 0 violated"));
    }

    #[test]
    fn normalization_merges_collinear_points() {
        let t = Trajectory::new(vec![
            (0.0, 0.0),
            (1.0, 1.0),
            (2.0, 2.0),
            (3.0, 2.0),
            (4.0, 2.0),
        ])
        .unwrap();
        assert_eq!(
            t.normalized().points(),
            &[(0.0, 0.0), (2.0, 2.0), (4.0, 2.0)]
        );
    }

    fn two_requests() -> Vec<Request> {
        vec![Request::new(0.0, 2.0, 0.0), Request::point(1.0, 0.0)]
    }

    fn ev(time: f64, kind: EventKind, request: usize, position: f64) -> ScheduledEvent {
        ScheduledEvent {
            time,
            kind,
            request,
            position,
        }
    }

    #[test]
    fn feasibility_checker_catches_each_violation() {
        use EventKind::*;
        let reqs = two_requests();
        let good = Schedule {
            start_time: 0.0,
            start_position: 0.0,
            events: vec![
                ev(0.0, Pickup, 0, 0.0),
                ev(2.0, Dropoff, 0, 2.0),
                ev(3.0, Pickup, 1, 1.0),
                ev(3.0, Dropoff, 1, 1.0),
            ],
            end_position: 1.0,
        };
        assert_eq!(
            check_schedule(&good, &reqs, &[], Capacity::Finite(1)),
            Ok(())
        );

        let mut early = good.clone();
        early.events[0].time = -0.5;
        early.start_time = -1.0;
        assert_eq!(
            check_schedule(
                &early,
                &[Request::new(0.0, 2.0, 0.5), reqs[1]],
                &[],
                Capacity::Finite(1)
            ),
            Err(FeasibilityError::PickupBeforeRelease { request: 0 })
        );

        let mut wrong = good.clone();
        wrong.events[1].position = 1.9;
        assert!(matches!(
            check_schedule(&wrong, &reqs, &[], Capacity::Finite(1)),
            Err(FeasibilityError::WrongPosition { .. })
        ));

        let crowded = Schedule {
            start_time: 0.0,
            start_position: 0.0,
            events: vec![
                ev(0.0, Pickup, 0, 0.0),
                ev(1.0, Pickup, 1, 1.0),
                ev(1.0, Dropoff, 1, 1.0),
                ev(2.0, Dropoff, 0, 2.0),
            ],
            end_position: 2.0,
        };
        assert_eq!(
            check_schedule(&crowded, &reqs, &[], Capacity::Finite(1)),
            Err(FeasibilityError::CapacityExceeded { event: 1 })
        );
        assert_eq!(
            check_schedule(&crowded, &reqs, &[], Capacity::Finite(2)),
            Ok(())
        );

        let mut fast = good.clone();
        fast.events[1].time = 1.0;
        assert_eq!(
            check_schedule(&fast, &reqs, &[], Capacity::Finite(1)),
            Err(FeasibilityError::Unreachable { event: 1 })
        );
    }
}
