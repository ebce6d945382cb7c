//! Exact offline makespans `L(t, p, R)` for the open, non-preemptive variant,
//! plus an exhaustive oracle used to cross-check the search.
//!
//! For a fixed order of service events the cheapest timing is greedy: drive
//! straight to the next event position and wait there only if the request is
//! not yet released. The solver therefore searches over event orders only.

use std::collections::HashMap;

use thiserror::Error;

use crate::model::{
    check_schedule, Capacity, EventKind, Instance, Request, Schedule, ScheduledEvent,
};

/// Default maximum number of requests the search accepts.
pub const DEFAULT_SEARCH_LIMIT: usize = 10;

/// Maximum number of requests the exhaustive oracle accepts.
pub const BRUTE_FORCE_LIMIT: usize = 6;

/// Errors raised by the offline solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OfflineError {
    #[error("search limit exceeded: {size} requests, limit {limit}")]
    SearchLimitExceeded { size: usize, limit: usize },
    #[error("size limit exceeded: {size} requests, oracle limit {limit}")]
    OracleLimitExceeded { size: usize, limit: usize },
    #[error("start time must be finite and non-negative")]
    InvalidStartTime,
    #[error("on-board request index {0} is out of range or repeated")]
    InvalidOnboard(usize),
    #[error("on-board requests exceed the capacity")]
    OverCapacity,
}

/// A query for `L(t, p, R)`: serve `requests` starting at `start_position` at
/// time `start_time`. Requests listed in `onboard` are already loaded and only
/// need to be delivered.
#[derive(Debug, Clone, PartialEq)]
pub struct OfflineQuery {
    pub start_time: f64,
    pub start_position: f64,
    pub requests: Vec<Request>,
    pub onboard: Vec<usize>,
    pub capacity: Capacity,
}

impl OfflineQuery {
    pub fn new(
        start_time: f64,
        start_position: f64,
        requests: Vec<Request>,
        capacity: Capacity,
    ) -> Self {
        Self {
            start_time,
            start_position,
            requests,
            onboard: Vec::new(),
            capacity,
        }
    }

    fn validate(&self) -> Result<(), OfflineError> {
        if !self.start_time.is_finite() || self.start_time < 0.0 || !self.start_position.is_finite()
        {
            return Err(OfflineError::InvalidStartTime);
        }
        let mut seen = vec![false; self.requests.len()];
        for &k in &self.onboard {
            if k >= seen.len() || seen[k] {
                return Err(OfflineError::InvalidOnboard(k));
            }
            seen[k] = true;
        }
        match self.capacity {
            Capacity::Finite(c) if self.onboard.len() > c => Err(OfflineError::OverCapacity),
            _ => Ok(()),
        }
    }
}

/// The optimal makespan together with a witness schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct OfflineSolution {
    pub makespan: f64,
    pub schedule: Schedule,
}

/// Branch-and-bound solver with a configurable size limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Solver {
    limit: usize,
}

impl Default for Solver {
    fn default() -> Self {
        Self {
            limit: DEFAULT_SEARCH_LIMIT,
        }
    }
}

impl Solver {
    pub fn with_limit(limit: usize) -> Self {
        Self { limit }
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// Exact minimum makespan with a witness schedule.
    pub fn optimal_schedule(&self, query: &OfflineQuery) -> Result<OfflineSolution, OfflineError> {
        query.validate()?;
        let n = query.requests.len();
        if n > self.limit {
            return Err(OfflineError::SearchLimitExceeded {
                size: n,
                limit: self.limit,
            });
        }
        let mut search = Search::new(query);
        search.run();
        let schedule = search.witness();
        debug_assert_eq!(
            check_schedule(&schedule, &query.requests, &query.onboard, query.capacity),
            Ok(())
        );
        Ok(OfflineSolution {
            makespan: schedule.makespan(),
            schedule,
        })
    }

    /// `L(t, p, R)` for requests that are all still waiting.
    pub fn makespan(
        &self,
        t: f64,
        p: f64,
        requests: &[Request],
        capacity: Capacity,
    ) -> Result<f64, OfflineError> {
        self.optimal_schedule(&OfflineQuery::new(t, p, requests.to_vec(), capacity))
            .map(|s| s.makespan)
    }

    /// `OPT(σ) = L(0, 0, σ)`.
    pub fn opt(&self, instance: &Instance) -> Result<f64, OfflineError> {
        self.makespan(0.0, 0.0, instance.requests(), instance.capacity())
    }
}

/// Exact optimum with the default search limit.
pub fn optimal_schedule(query: &OfflineQuery) -> Result<OfflineSolution, OfflineError> {
    Solver::default().optimal_schedule(query)
}

/// `OPT(σ)` with the default search limit.
pub fn opt(instance: &Instance) -> Result<f64, OfflineError> {
    Solver::default().opt(instance)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Waiting,
    Loaded,
    Done,
}

/// Location identifier: event `2k` is the pickup of `k`, `2k + 1` its dropoff,
/// and `u32::MAX` is the start.
const START: u32 = u32::MAX;

struct Search<'q> {
    q: &'q OfflineQuery,
    status: Vec<Status>,
    code: u64,
    pow3: Vec<u64>,
    load: usize,
    remaining: usize,
    path: Vec<ScheduledEvent>,
    best: f64,
    best_path: Vec<ScheduledEvent>,
    memo: HashMap<(u64, u32), f64>,
}

impl<'q> Search<'q> {
    fn new(q: &'q OfflineQuery) -> Self {
        let n = q.requests.len();
        let mut status = vec![Status::Waiting; n];
        let pow3: Vec<u64> = (0..n).map(|k| 3u64.pow(k as u32)).collect();
        let mut code = 0;
        for &k in &q.onboard {
            status[k] = Status::Loaded;
            code += pow3[k];
        }
        Self {
            q,
            status,
            code,
            pow3,
            load: q.onboard.len(),
            remaining: 2 * n - q.onboard.len(),
            path: Vec::with_capacity(2 * n),
            best: f64::INFINITY,
            best_path: Vec::new(),
            memo: HashMap::new(),
        }
    }

    fn run(&mut self) {
        let (t, x) = (self.q.start_time, self.q.start_position);
        self.dfs(t, x, START);
    }

    fn witness(&self) -> Schedule {
        let end_position = self
            .best_path
            .last()
            .map_or(self.q.start_position, |e| e.position);
        Schedule {
            start_time: self.q.start_time,
            start_position: self.q.start_position,
            events: self.best_path.clone(),
            end_position,
        }
    }

    fn lower_bound(&self, t: f64, x: f64) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut release_bound = t;
        for (k, r) in self.q.requests.iter().enumerate() {
            match self.status[k] {
                Status::Waiting => {
                    lo = lo.min(r.origin.min(r.destination));
                    hi = hi.max(r.origin.max(r.destination));
                    let pickup = (t + (x - r.origin).abs()).max(r.release);
                    release_bound = release_bound.max(pickup + (r.destination - r.origin).abs());
                }
                Status::Loaded => {
                    lo = lo.min(r.destination);
                    hi = hi.max(r.destination);
                }
                Status::Done => {}
            }
        }
        if lo > hi {
            return t;
        }
        let sweep = t + (x - lo).abs().min((x - hi).abs()) + (hi - lo);
        sweep.max(release_bound)
    }

    fn apply(&mut self, k: usize, kind: EventKind, time: f64, position: f64) {
        self.path.push(ScheduledEvent {
            time,
            kind,
            request: k,
            position,
        });
        self.code += self.pow3[k];
        self.remaining -= 1;
        match kind {
            EventKind::Pickup => {
                self.status[k] = Status::Loaded;
                self.load += 1;
            }
            EventKind::Dropoff => {
                self.status[k] = Status::Done;
                self.load -= 1;
            }
        }
    }

    fn undo(&mut self) {
        let e = self.path.pop().expect("undo without a matching apply");
        self.code -= self.pow3[e.request];
        self.remaining += 1;
        match e.kind {
            EventKind::Pickup => {
                self.status[e.request] = Status::Waiting;
                self.load -= 1;
            }
            EventKind::Dropoff => {
                self.status[e.request] = Status::Loaded;
                self.load += 1;
            }
        }
    }

    fn step(&mut self, k: usize, kind: EventKind, t: f64, x: f64) {
        let r = self.q.requests[k];
        let (position, loc) = match kind {
            EventKind::Pickup => (r.origin, 2 * k as u32),
            EventKind::Dropoff => (r.destination, 2 * k as u32 + 1),
        };
        let mut time = t + (position - x).abs();
        if kind == EventKind::Pickup {
            time = time.max(r.release);
        }
        self.apply(k, kind, time, position);
        self.dfs(time, position, loc);
        self.undo();
    }

    fn dfs(&mut self, t: f64, x: f64, loc: u32) {
        if self.remaining == 0 {
            if t < self.best - 1e-12 {
                self.best = t;
                self.best_path = self.path.clone();
            }
            return;
        }
        if self.lower_bound(t, x) >= self.best - 1e-12 {
            return;
        }
        let key = (self.code, loc);
        if let Some(&seen) = self.memo.get(&key) {
            if seen <= t + 1e-12 {
                return;
            }
        }
        self.memo.insert(key, t);

        // Dominance: delivering a loaded request at the current position, or
        // serving a released point request here, never delays anything else.
        for k in 0..self.q.requests.len() {
            let r = self.q.requests[k];
            if self.status[k] == Status::Loaded && r.destination == x {
                self.step(k, EventKind::Dropoff, t, x);
                return;
            }
        }
        for k in 0..self.q.requests.len() {
            let r = self.q.requests[k];
            if self.status[k] == Status::Waiting
                && r.origin == x
                && r.destination == x
                && r.release <= t
                && self.q.capacity.admits(self.load)
            {
                self.step(k, EventKind::Pickup, t, x);
                return;
            }
        }

        let mut moves: Vec<(f64, usize, EventKind)> = Vec::new();
        for (k, r) in self.q.requests.iter().enumerate() {
            match self.status[k] {
                Status::Waiting if self.q.capacity.admits(self.load) => {
                    moves.push((
                        (t + (x - r.origin).abs()).max(r.release),
                        k,
                        EventKind::Pickup,
                    ));
                }
                Status::Loaded => {
                    moves.push((t + (x - r.destination).abs(), k, EventKind::Dropoff))
                }
                _ => {}
            }
        }
        moves.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (_, k, kind) in moves {
            self.step(k, kind, t, x);
        }
    }
}

/// Exhaustive oracle: enumerates every capacity-feasible interleaving of
/// pickups and dropoffs with greedy timing and no pruning at all.
pub fn brute_force_makespan(query: &OfflineQuery) -> Result<f64, OfflineError> {
    query.validate()?;
    let n = query.requests.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(OfflineError::OracleLimitExceeded {
            size: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    // 0 = waiting, 1 = loaded, 2 = done
    let mut state = vec![0u8; n];
    for &k in &query.onboard {
        state[k] = 1;
    }
    let best = enumerate(
        query,
        &mut state,
        query.onboard.len(),
        query.start_time,
        query.start_position,
    );
    Ok(best - query.start_time)
}

fn enumerate(q: &OfflineQuery, state: &mut [u8], load: usize, t: f64, x: f64) -> f64 {
    let mut best = f64::INFINITY;
    let mut any = false;
    for k in 0..state.len() {
        let r = q.requests[k];
        match state[k] {
            0 if q.capacity.admits(load) => {
                any = true;
                let time = (t + (x - r.origin).abs()).max(r.release);
                state[k] = 1;
                best = best.min(enumerate(q, state, load + 1, time, r.origin));
                state[k] = 0;
            }
            1 => {
                any = true;
                let time = t + (x - r.destination).abs();
                state[k] = 2;
                best = best.min(enumerate(q, state, load - 1, time, r.destination));
                state[k] = 1;
            }
            _ => {}
        }
    }
    if any {
        best
    } else {
        t
    }
}
