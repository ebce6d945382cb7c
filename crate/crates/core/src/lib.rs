//! Simulation and verification laboratory for open, non-preemptive online
//! Dial-a-Ride on the real line.
//!
//! * [`model`]: requests, instances, trajectories, schedules, file format.
//! * [`offline`]: exact offline makespans `L(t, p, R)` and an exhaustive oracle.
//! * [`online`]: the event-driven kernel and the online algorithms.
//! * [`adversary`]: the reactive lower-bound adversary and tight-instance generators.
//! * [`analysis`]: bound functions, certified constants, sweeps and trace audits.

pub mod adversary;
pub mod analysis;
pub mod model;
pub mod offline;
pub mod online;

pub use adversary::{
    check_critical, claimed_ratio_nowaiting, claimed_ratio_theta_gt2, claimed_ratio_waiting,
    critical_ratio_bound, critical_thresholds, delta, exact_ratio_nowaiting, exact_ratio_theta_gt2,
    exact_ratio_theta_gt2_late, exact_ratio_waiting, gen_luring, gen_nowaiting_lb, gen_theta_gt2,
    gen_theta_gt2_late, gen_waiting_lb, line_ell, run_general_lower_bound, AdversaryConfig,
    AdversaryError, AdversaryTranscript, CriticalReport, CriticalSide, Outcome, StageTwoState,
    RHO_RANGE,
};
pub use analysis::{
    audit_simulation, bound_value, competitive_ratio, f1, f2, format_sig, g, g1, g2, parse_grid,
    ratio, rho_lower_bound, solve_constants, sweep_csv, sweep_theta, theta_star, AnalysisError,
    AuditCheck, AuditEntry, AuditReport, BoundConstants, BoundKind, RatioReport, SweepRow,
};
pub use model::{
    check_schedule, parse_instance, random_instance, serialize_instance, validate_instance,
    Capacity, EventKind, FeasibilityError, Instance, Line, ModelError, Request, Schedule,
    ScheduledEvent, Trajectory, TrajectoryBuilder, TOL,
};
pub use offline::{
    brute_force_makespan, opt, optimal_schedule, OfflineError, OfflineQuery, OfflineSolution,
    Solver,
};
pub use online::{
    eager_transform, eagerize, make_ignore, make_replan, make_smarterstart, make_smartstart,
    opt_upper_bound, simulate, simulate_with, smarterstart_start_time, smartstart_start_time,
    Eager, OnlineAlgorithm, Plan, Replan, RequestStatus, ScheduleBased, ScheduleRecord,
    ServiceTimes, SimConfig, SimError, SimulationResult, StartRule, View,
};
