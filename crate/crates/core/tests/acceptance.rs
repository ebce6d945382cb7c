//! Acceptance run: one PASS/FAIL line per criterion, with detail lines.
//!
//! Criteria 3 and 4 are checked as literally stated and are expected to
//! fail; see `KNOWN_DEVIATIONS`. The process exits non-zero only if some
//! other criterion fails or a known deviation unexpectedly passes.

use std::process::ExitCode;
use std::time::Instant;

use dialride::{
    audit_simulation, brute_force_makespan, claimed_ratio_nowaiting, claimed_ratio_theta_gt2,
    eagerize, exact_ratio_nowaiting, exact_ratio_theta_gt2, exact_ratio_theta_gt2_late,
    exact_ratio_waiting, f1, f2, g1, g2, gen_luring, gen_nowaiting_lb, gen_theta_gt2,
    gen_theta_gt2_late, gen_waiting_lb, make_ignore, make_replan, make_smarterstart,
    make_smartstart, random_instance, rho_lower_bound, run_general_lower_bound, simulate,
    solve_constants, theta_star, AdversaryConfig, Capacity, Instance, OfflineQuery,
    OnlineAlgorithm, Request, Solver,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-3;
const KNOWN_DEVIATIONS: [usize; 2] = [3, 4];

struct Outcome {
    passed: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            passed: true,
            summary: String::new(),
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.details
            .push(format!("{} {line}", if ok { "ok  " } else { "BAD " }));
    }

    fn info(&mut self, line: String) {
        self.details.push(format!("info {line}"));
    }
}

/// Simulations collected for the structural audits of criterion 8.
#[derive(Default)]
struct AuditPool {
    runs: Vec<(String, Instance, f64)>,
}

fn smarterstart_ratio(
    theta: f64,
    inst: &Instance,
    solver: &Solver,
    pool: &mut AuditPool,
    label: String,
) -> f64 {
    let run = simulate(&mut make_smarterstart(theta).unwrap(), inst).unwrap();
    pool.runs.push((label, inst.clone(), theta));
    run.completion / solver.opt(inst).unwrap()
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let c = solve_constants().unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    o.check(
        (c.rho_lb.value - 2.0585).abs() <= 1e-4,
        format!("rho_lb = {:.10}", c.rho_lb.value),
    );
    o.check(
        (c.theta_star.value - 1.71249).abs() <= 1e-4,
        format!("theta_star = {:.10}", c.theta_star.value),
    );
    o.check(
        (c.rho_star - 2.6662).abs() <= 1e-4,
        format!("rho_star = {:.10}", c.rho_star),
    );
    o.check(elapsed < 1.0, format!("runtime {elapsed:.4}s"));
    o.summary = "certified constants".into();
    o
}

fn criterion_2(pool: &mut AuditPool) -> Outcome {
    let mut o = Outcome::new();
    let solver = Solver::default();
    for theta in [1.3, 1.5, theta_star(), 1.9] {
        let inst = gen_waiting_lb(theta, EPS, Capacity::Finite(1)).unwrap();
        let r = smarterstart_ratio(theta, &inst, &solver, pool, format!("waiting Θ={theta:.5}"));
        let want = f1(theta) - EPS;
        o.check(
            (r - want).abs() <= 1e-6,
            format!("Θ={theta:.5} ratio {r:.12} f1-ε {want:.12}"),
        );
        o.info(format!(
            "Θ={theta:.5} exact closed form {:.12}",
            exact_ratio_waiting(theta, EPS)
        ));
    }
    o.summary = "waiting family ratio = f1(Θ) − ε".into();
    o
}

fn criterion_3(pool: &mut AuditPool) -> Outcome {
    let mut o = Outcome::new();
    let solver = Solver::default();
    let mut exact_ok = true;
    for theta in [1.62, theta_star(), 1.8, 2.0] {
        let inst = gen_nowaiting_lb(theta, EPS, Capacity::Finite(1)).unwrap();
        let r = smarterstart_ratio(
            theta,
            &inst,
            &solver,
            pool,
            format!("nowaiting Θ={theta:.5}"),
        );
        let want = claimed_ratio_nowaiting(theta, EPS);
        o.check(
            (r - want).abs() <= 1e-6,
            format!(
                "Θ={theta:.5} ratio {r:.12} f2-ε {want:.12} diff {:.3e}",
                r - want
            ),
        );
        let exact = exact_ratio_nowaiting(theta, EPS);
        exact_ok &= (r - exact).abs() <= 1e-9;
        o.info(format!(
            "Θ={theta:.5} matches f2 − (5Θ−3)/(5Θ−4)·ε = {exact:.12}: {}",
            (r - exact).abs() <= 1e-9
        ));
    }
    o.info(format!(
        "all no-waiting ratios match the exact closed form: {exact_ok}"
    ));
    o.summary = "no-waiting family ratio = f2(Θ) − ε".into();
    o
}

fn criterion_4(pool: &mut AuditPool) -> Outcome {
    let mut o = Outcome::new();
    let solver = Solver::default();
    let s2 = 1.0 + 2f64.sqrt();
    for theta in [2.2, s2, 3.0] {
        let inst = gen_theta_gt2(theta, EPS, Capacity::Finite(1)).unwrap();
        let r = smarterstart_ratio(theta, &inst, &solver, pool, format!("gt2 Θ={theta:.5}"));
        let want = claimed_ratio_theta_gt2(theta, EPS);
        o.check(
            (r - want).abs() <= 1e-6,
            format!(
                "Θ={theta:.5} ratio {r:.12} g-ε {want:.12} diff {:.3e}",
                r - want
            ),
        );
        let exact = exact_ratio_theta_gt2(theta, EPS);
        o.info(format!("Θ={theta:.5} ratio ≥ g − ε: {}", r >= want - 1e-12));
        o.info(format!(
            "Θ={theta:.5} matches exact closed form {exact:.12}: {}",
            (r - exact).abs() <= 1e-9
        ));
        let late = gen_theta_gt2_late(theta, EPS, Capacity::Finite(1)).unwrap();
        let rl = smarterstart_ratio(
            theta,
            &late,
            &solver,
            pool,
            format!("gt2-late Θ={theta:.5}"),
        );
        let exact_late = exact_ratio_theta_gt2_late(theta, EPS);
        o.info(format!(
            "Θ={theta:.5} σ3 released after S2 starts: ratio {rl:.12} (exact {exact_late:.12}) ≥ g − ε: {}",
            rl >= want - 1e-12
        ));
    }
    let both =
        (g1(s2) - 2.0 * 2f64.sqrt()).abs() <= 1e-12 && (g2(s2) - 2.0 * 2f64.sqrt()).abs() <= 1e-12;
    o.check(
        both,
        format!(
            "g1(1+√2) = {:.12}, g2(1+√2) = {:.12}, 2√2 = {:.12}",
            g1(s2),
            g2(s2),
            2.0 * 2f64.sqrt()
        ),
    );
    o.summary = "Θ>2 family ratio = g(Θ) − ε".into();
    o
}

fn criterion_5(pool: &mut AuditPool) -> Outcome {
    let mut o = Outcome::new();
    let solver = Solver::default();
    let start = Instant::now();
    for (c, rho) in [
        (1usize, 2.0585),
        (2, 2.0585),
        (1, rho_lower_bound()),
        (2, rho_lower_bound()),
    ] {
        let cfg = AdversaryConfig::new(rho, c).unwrap();
        let scored = rho == 2.0585;
        let algs: Vec<(Box<dyn OnlineAlgorithm>, Option<f64>)> = vec![
            (Box::new(eagerize(make_ignore())), None),
            (Box::new(eagerize(make_smartstart(1.5).unwrap())), None),
            (
                Box::new(eagerize(make_smarterstart(theta_star()).unwrap())),
                Some(theta_star()),
            ),
            (Box::new(eagerize(make_replan())), None),
        ];
        for (mut alg, theta) in algs {
            let name = alg.name();
            match run_general_lower_bound(&mut alg, &cfg) {
                Ok(t) => {
                    let inst = t.instance();
                    let confirmed = solver.opt(&inst).unwrap();
                    let ok = t.ratio >= 2.0585 - 1e-6
                        && (confirmed - t.opt_value).abs() <= 1e-6
                        && (confirmed - t.claimed_opt).abs() <= 1e-6;
                    let line = format!(
                            "ρ={rho:.7} c={c} {name}: critical {}, outcome {:?}, ALG {:.9}, OPT {:.9} (claimed {:.9}), ratio {:.9}",
                            t.critical.map_or("n/a".into(), |r| r.all().to_string()),
                            t.outcome, t.alg_completion, confirmed, t.claimed_opt, t.ratio
                        );
                    if scored {
                        o.check(ok, line);
                    } else {
                        o.info(format!(
                            "{line}, ratio ≥ ρ − 1e−9: {}",
                            t.ratio >= rho - 1e-9
                        ));
                    }
                    if let Some(theta) = theta {
                        pool.runs
                            .push((format!("adversary c={c} {name}"), inst, theta));
                    }
                }
                Err(e) => o.check(false, format!("c={c} {name}: {e}")),
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    o.check(elapsed < 30.0, format!("runtime {elapsed:.2}s"));
    o.summary = "general adversary ratio ≥ 2.0585 − 1e−6 with confirmed OPT".into();
    o
}

fn random_capacity(rng: &mut ChaCha8Rng) -> Capacity {
    match rng.gen_range(0..4) {
        0 => Capacity::Finite(1),
        1 => Capacity::Finite(2),
        2 => Capacity::Finite(3),
        _ => Capacity::Unbounded,
    }
}

fn criterion_6(pool: &mut AuditPool) -> Outcome {
    let mut o = Outcome::new();
    let solver = Solver::default();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for theta in [1.3, theta_star(), 1.9] {
        let bound = f1(theta).max(f2(theta));
        let mut worst: f64 = 1.0;
        let mut violations = 0;
        for _ in 0..500 {
            let n = rng.gen_range(1..=5);
            let cap = random_capacity(&mut rng);
            let inst = random_instance(&mut rng, n, 5.0, cap);
            let r = smarterstart_ratio(theta, &inst, &solver, pool, "random".into());
            worst = worst.max(r);
            if r > bound + 1e-6 {
                violations += 1;
            }
        }
        o.check(
            violations == 0,
            format!("Θ={theta:.5}: worst ratio {worst:.9} ≤ max(f1,f2) = {bound:.9} ({violations} violations)"),
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    o.check(elapsed < 120.0, format!("runtime {elapsed:.2}s"));
    o.summary = "SmarterStart ratio within max(f1, f2) on 1500 random runs".into();
    o
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let solver = Solver::default();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let n = rng.gen_range(0..=6);
        let cap = random_capacity(&mut rng);
        let inst = random_instance(&mut rng, n, 5.0, cap);
        let t = rng.gen_range(0.0..10.0);
        let p = rng.gen_range(-5.0..5.0);
        let q = OfflineQuery::new(t, p, inst.requests().to_vec(), cap);
        let fast = solver.optimal_schedule(&q).unwrap().makespan;
        let slow = brute_force_makespan(&q).unwrap();
        worst = worst.max((fast - slow).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    o.check(
        worst <= 1e-9,
        format!("max |search − oracle| = {worst:.3e} over 500 queries"),
    );
    o.check(elapsed < 60.0, format!("runtime {elapsed:.2}s"));
    o.summary = "branch-and-bound equals the exhaustive oracle".into();
    o
}

fn criterion_8(pool: &AuditPool) -> Outcome {
    let mut o = Outcome::new();
    let solver = Solver::default();
    let mut checks = 0;
    let mut failures = Vec::new();
    for (label, inst, theta) in &pool.runs {
        let run = simulate(&mut make_smarterstart(*theta).unwrap(), inst).unwrap();
        let report = audit_simulation(&run, inst, *theta, &solver).unwrap();
        checks += report.entries.len();
        for f in report.failures() {
            failures.push(format!(
                "{label}: {:?} schedule {} margin {:.3e}",
                f.check, f.schedule, f.margin
            ));
        }
    }
    o.check(
        failures.is_empty(),
        format!(
            "{} simulations, {checks} inequalities, {} failures",
            pool.runs.len(),
            failures.len()
        ),
    );
    for f in failures.iter().take(10) {
        o.info(f.clone());
    }
    o.summary = "structural audits on the simulations of criteria 2–6".into();
    o
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    let solver = Solver::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut mono, mut tri, mut prefix) = (0, 0, 0);
    for _ in 0..300 {
        let n = rng.gen_range(0..=5);
        let cap = random_capacity(&mut rng);
        let inst = random_instance(&mut rng, n, 5.0, cap);
        let r = inst.requests();
        let t = rng.gen_range(0.0..10.0);
        let t2 = t + rng.gen_range(0.0..5.0);
        let p = rng.gen_range(-5.0..5.0);
        let p2 = rng.gen_range(-5.0..5.0);
        let l = |t: f64, p: f64, r: &[Request]| solver.makespan(t, p, r, cap).unwrap();
        if l(t2, p, r) > l(t, p, r) + 1e-9 {
            mono += 1;
        }
        if l(t, p, r) > (p - p2).abs() + l(t, p2, r) + 1e-9 {
            tri += 1;
        }
        let known: Vec<Request> = r.iter().copied().filter(|q| q.release <= t).collect();
        let chain = [
            l(t, 0.0, &known),
            l(t, 0.0, r),
            l(0.0, 0.0, r),
            solver.opt(&inst).unwrap(),
        ];
        if chain.windows(2).any(|w| w[0] > w[1] + 1e-9) {
            prefix += 1;
        }
    }
    o.check(
        mono == 0,
        format!("monotone in start time: {mono} violations"),
    );
    o.check(tri == 0, format!("triangle inequality: {tri} violations"));
    o.check(
        prefix == 0,
        format!("prefix chain up to OPT: {prefix} violations"),
    );
    o.summary = "L-function laws on 300 samples".into();
    o
}

fn criterion_10() -> Outcome {
    let mut o = Outcome::new();
    let inst = gen_luring(1.0, 0.05, 2.0, Capacity::Finite(1)).unwrap();
    let solver = Solver::with_limit(24);
    let smart = simulate(
        &mut make_smartstart(2.0).unwrap().with_solver(solver),
        &inst,
    )
    .unwrap();
    let smarter = simulate(
        &mut make_smarterstart(2.0).unwrap().with_solver(solver),
        &inst,
    )
    .unwrap();
    let a = smart.first_arrival(1.0);
    let b = smarter.first_arrival(1.0);
    o.check(
        a.is_some_and(|t| (t - 1.05).abs() <= 1e-9),
        format!("Smartstart reaches 1 at {a:?}"),
    );
    o.check(
        b.is_some_and(|t| t >= 1.0 - 1e-9),
        format!("SmarterStart reaches 1 at {b:?}"),
    );
    o.summary = "luring chain".into();
    o
}

fn main() -> ExitCode {
    let mut pool = AuditPool::default();
    let started = Instant::now();
    let results = vec![
        criterion_1(),
        criterion_2(&mut pool),
        criterion_3(&mut pool),
        criterion_4(&mut pool),
        criterion_5(&mut pool),
        criterion_6(&mut pool),
        criterion_7(),
        criterion_8(&pool),
        criterion_9(),
        criterion_10(),
    ];
    let mut unexpected = 0;
    for (i, r) in results.iter().enumerate() {
        let id = i + 1;
        let known = KNOWN_DEVIATIONS.contains(&id);
        let tag = match (r.passed, known) {
            (true, false) => "PASS".to_string(),
            (false, true) => "FAIL (known deviation)".to_string(),
            (true, true) => "PASS (known deviation did not reproduce)".to_string(),
            (false, false) => "FAIL".to_string(),
        };
        if r.passed == known {
            unexpected += 1;
        }
        println!("{tag} criterion {id}: {}", r.summary);
        for d in &r.details {
            println!("    {d}");
        }
    }
    println!("total runtime {:.2}s", started.elapsed().as_secs_f64());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criterion result(s) differ from expectations");
        ExitCode::FAILURE
    }
}
