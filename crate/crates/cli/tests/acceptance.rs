//! Acceptance suite: one PASS/FAIL line per criterion, exact rational
//! comparisons throughout. Exits nonzero if any criterion fails.

use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robustcover::maxmin::{maxmin_greedy, split_part_bound, split_scenario, KnapsackReduction, ReductionParams};
use robustcover::oracle::{ExactBudget, ExactOracle};
use robustcover::robust::{robust_p_system, threshold_grid, threshold_search, RobustConfig};
use robustcover::{CoveringProblem, DownwardClosed, KnapsackSet, PSystem, Problem, Rational, Scenario, Uncertainty};
use robustcover_cli::generate::{ExperimentSpec, Family, UncertaintySpec};

/// Wall-clock limit for criteria 1 and 2.
const TIME_LIMIT: Duration = Duration::from_secs(60);
/// Slack of the threshold search: grid ratio `ε = 1/10`.
const SEARCH_SLACK: (i128, i128) = (11, 10);
/// Reductions with at most this many matroids are checked one matroid at a time.
const MATROID_BY_MATROID: u32 = 3000;

fn r(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

struct Outcome {
    failures: usize,
    detail: String,
}

fn report(id: usize, name: &str, start: Instant, limit: Option<Duration>, o: Outcome) -> bool {
    let took = start.elapsed();
    let late = limit.is_some_and(|l| took > l);
    let pass = o.failures == 0 && !late;
    println!(
        "criterion {id} [{}] {name}: {}; {} failures; {:.2}s{}",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        o.failures,
        took.as_secs_f64(),
        if late { " (over time limit)" } else { "" }
    );
    pass
}

struct Tiny {
    problem: Problem,
    omega: Arc<dyn PSystem>,
}

/// Set cover or Steiner with at most `max_elements` elements and a uniform,
/// partition or two-partition-intersection uncertainty set over `n`
/// requirements.
fn tiny(seed: u64, n: usize, max_elements: usize) -> Tiny {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0.. {
        let family = if seed.is_multiple_of(2) { Family::SetCover } else { Family::Steiner };
        let m = match family {
            Family::SetCover => rng.gen_range(3..=7),
            Family::Steiner => n + 1 + rng.gen_range(0..=1),
        };
        let mut spec = ExperimentSpec::new(family, n, m, seed * 1000 + attempt);
        spec.density = match family {
            Family::SetCover => "2/5".parse().unwrap(),
            Family::Steiner => "3/10".parse().unwrap(),
        };
        spec.uncertainty = match (seed / 2) % 3 {
            0 => UncertaintySpec::Uniform { k: rng.gen_range(1..=4) },
            1 => UncertaintySpec::Partition { parts: rng.gen_range(1..=3), bound: rng.gen_range(1..=2) },
            _ => UncertaintySpec::Intersection { parts: rng.gen_range(1..=3), bound: rng.gen_range(1..=2) },
        };
        let inst = spec.instance(0).unwrap().1.build().unwrap();
        if inst.problem.num_elements() > max_elements {
            continue;
        }
        let Uncertainty::System(omega) = inst.uncertainty else { unreachable!() };
        return Tiny {
            problem: inst.problem,
            omega,
        };
    }
    unreachable!()
}

struct Audit {
    checked: usize,
    violations: usize,
}

impl Audit {
    fn absorb<P: CoveringProblem + ?Sized>(&mut self, oracle: &ExactOracle<'_, P>) {
        let (c, v) = oracle.audit_report().expect("audit enabled");
        self.checked += c;
        self.violations += v;
    }
}

fn criterion_1(audit: &mut Audit) -> Outcome {
    let mut failures = 0;
    let mut instances = 0;
    let mut checks = 0;
    for seed in 0..240u64 {
        let n = 4 + (seed as usize % 5);
        let t = tiny(seed, n, 10);
        let oracle = ExactOracle::new(&t.problem, ExactBudget::default()).unwrap().with_audit();
        let result = maxmin_greedy(&t.problem, t.omega.as_ref()).unwrap();
        let bound = result.online_cost.value() * Rational::from_integer(t.omega.p_value() as i128 + 1);
        for b in oracle.members(t.omega.as_ref()).unwrap() {
            checks += 1;
            if oracle.opt(&b).unwrap().value() > bound {
                failures += 1;
            }
        }
        instances += 1;
        audit.absorb(&oracle);
    }
    Outcome {
        failures,
        detail: format!("{instances} instances, {checks} scenarios B checked"),
    }
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = 0;
    let mut vectors = 0;
    let mut per_matroid = 0;
    for delta in [r(1, 1), r(1, 2), r(1, 3)] {
        for _ in 0..50 {
            let n = rng.gen_range(1..=8);
            let capacity = [r(1, 1), r(3, 2), r(2, 1)][rng.gen_range(0..3)];
            let w: Vec<Rational> = (0..n).map(|_| r(rng.gen_range(0..=15), 12)).collect();
            let red = KnapsackReduction::new(w.clone(), capacity, &Scenario::empty(), ReductionParams::new(delta, u64::MAX).unwrap())
                .unwrap();
            let relaxed = (Rational::from_integer(1) + Rational::from_integer(6) * delta) * capacity;
            // emitted matroids are checked one by one when few enough, otherwise
            // through the union membership test
            let matroids: Option<Vec<_>> = (red.count() <= &MATROID_BY_MATROID.into())
                .then(|| red.matroids().unwrap().map(|(_, m)| m).collect());
            if matroids.is_some() {
                per_matroid += 1;
            }
            for mask in 0u64..1 << n {
                let x = Scenario::from_mask(mask);
                let load: Rational = x.iter().map(|i| w[i]).sum();
                let in_union = match &matroids {
                    Some(ms) => ms.iter().any(|m| m.contains(&x)),
                    None => red.union_contains(&x),
                };
                if in_union && load > relaxed {
                    failures += 1;
                }
                if load <= capacity {
                    match red.locate(&x) {
                        Ok(tau) if red.matroid(&tau).contains(&x) => {}
                        _ => failures += 1,
                    }
                }
            }
            vectors += 1;
        }
    }
    Outcome {
        failures,
        detail: format!("{vectors} weight vectors over delta in {{1, 1/2, 1/3}}, {per_matroid} checked matroid by matroid"),
    }
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = 0;
    let mut cases = 0;
    let mut printed = Vec::new();
    for q in [1usize, 2] {
        for eps in [r(1, 2), r(1, 1)] {
            let bound = split_part_bound(q, eps);
            if eps == r(1, 2) {
                printed.push(format!("q={q}: bound {bound} (3q+1 = {})", 3 * q + 1));
                if bound != 3 * q + 1 {
                    failures += 1;
                }
            }
            for _ in 0..100 {
                let n = rng.gen_range(1..=10);
                let weights: Vec<Vec<Rational>> =
                    (0..q).map(|_| (0..n).map(|_| r(rng.gen_range(0..=12), 12)).collect()).collect();
                let k = KnapsackSet::new(n, weights, vec![r(1, 1); q]).unwrap();
                let relaxed = Rational::from_integer(q as i128) * (Rational::from_integer(1) + eps);
                let mut tau = Scenario::empty();
                let mut order: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    order.swap(i, rng.gen_range(0..=i));
                }
                for e in order {
                    let next = tau.with(e);
                    if k.combined_load(&next) <= relaxed {
                        tau = next;
                    }
                }
                let parts = split_scenario(&tau, &k, eps).unwrap();
                let mut union = Scenario::empty();
                let mut total = 0;
                let ok_parts = parts.iter().all(|p| {
                    total += p.len();
                    union = union.union(p);
                    k.contains(p)
                });
                if !(ok_parts && parts.len() <= bound && union == tau && total == tau.len()) {
                    failures += 1;
                }
                cases += 1;
            }
        }
    }
    Outcome {
        failures,
        detail: format!("{cases} scenarios; at eps = 1/2 {}", printed.join(", ")),
    }
}

/// Criteria 4, 5 and 6 share instances.
struct RobustTally {
    c4: usize,
    c4_checks: usize,
    c5: usize,
    c5_identity: usize,
    c6: usize,
    c6_iterations: usize,
    instances: usize,
}

fn robust_criteria(audit: &mut Audit) -> RobustTally {
    let mut t = RobustTally {
        c4: 0,
        c4_checks: 0,
        c5: 0,
        c5_identity: 0,
        c6: 0,
        c6_iterations: 0,
        instances: 0,
    };
    let lambdas = [r(1, 1), r(3, 2), r(2, 1), r(4, 1)];
    let eps = r(1, 10);
    for seed in 0..100u64 {
        let n = 3 + (seed as usize % 4);
        let inst = tiny(5000 + seed, n, 9);
        let problem = &inst.problem;
        let omega = inst.omega.as_ref();
        let p = omega.p_value();
        let oracle = ExactOracle::new(problem, ExactBudget::default()).unwrap().with_audit();
        let members = oracle.members(omega).unwrap();
        let cfg = RobustConfig::measured(problem, ExactBudget::default());
        let rho_on = cfg.online_ratio;
        let lambda = lambdas[seed as usize % lambdas.len()];
        let exact = oracle.robust(omega, lambda).unwrap();

        let mut grid = threshold_grid(problem, eps).unwrap();
        grid.push(exact.second_stage);
        grid.sort();
        grid.dedup();

        // first stages depend on ρ_on and T only; ρ_off is measured on them
        let runs: Vec<_> = grid.iter().map(|&th| robust_p_system(problem, omega, th, &cfg).unwrap()).collect();
        let mut rho_off = Rational::from_integer(1);
        for out in &runs {
            for d in &members {
                rho_off = rho_off.max(oracle.offline_ratio_on(d, &out.first_stage).unwrap());
            }
        }
        let measured = RobustConfig {
            offline_ratio: rho_off,
            ..cfg
        };
        let tags = measured.p_system_tags(p);
        let beta = tags.beta;

        for out in &runs {
            let th = out.threshold.value();
            for d in &members {
                t.c4_checks += 1;
                let aug = out.augment(problem, d).unwrap();
                if !problem.satisfies_all(d, &out.first_stage.union(&aug)) {
                    t.c4 += 1;
                }
                if problem.set_cost(&aug).value() > beta * th {
                    t.c4 += 1;
                }
            }
            if out.threshold >= exact.second_stage
                && out.first_stage_cost.value() > Rational::from_integer(2) * rho_on * exact.phi.value()
            {
                t.c4 += 1;
            }
            for it in &out.iterations {
                t.c6_iterations += 1;
                let paid = problem.set_cost(&it.added).value() * Rational::from_integer(p as i128 + 1);
                let table = oracle.aug_table(&it.prior);
                if members.iter().any(|b| table.get(b).value() > paid) {
                    t.c6 += 1;
                }
            }
        }

        let search = threshold_search(problem, lambda, eps, |th| {
            let mut out = robust_p_system(problem, omega, th, &cfg)?;
            out.tags = tags;
            Ok(out)
        })
        .unwrap();
        let slack = r(SEARCH_SLACK.0, SEARCH_SLACK.1);
        if search.upper_bound > slack * tags.alpha1.max(beta) * exact.value {
            t.c5 += 1;
        }
        let at_one = oracle.robust(omega, Rational::from_integer(1)).unwrap();
        let (max_min, _) = oracle.max_min(omega).unwrap();
        if at_one.value != max_min.value() {
            t.c5 += 1;
        } else {
            t.c5_identity += 1;
        }
        audit.absorb(&oracle);
        t.instances += 1;
    }
    t
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_robustcover");
    let manifest = env!("CARGO_MANIFEST_DIR");
    let golden = format!("{manifest}/tests/golden/setcover_n6_m8_seed1.json");
    let bench = format!("{manifest}/tests/data/bench_small.json");
    let knap = dir.path().join("knap.json");
    let mut spec = ExperimentSpec::new(Family::Steiner, 4, 6, 9);
    spec.uncertainty = UncertaintySpec::Knapsack { q: 1, k: Some(2) };
    std::fs::write(&knap, spec.instance(0).unwrap().1.to_json()).unwrap();
    let knap = knap.to_string_lossy().into_owned();
    let out_dir = dir.path().join("gen").to_string_lossy().into_owned();
    let commands: Vec<Vec<&str>> = vec![
        vec!["gen", "--problem", "steiner", "--n", "4", "--m", "7", "--seed", "3", "--uncertainty", "explicit:3:2"],
        vec!["gen", "--n", "5", "--m", "6", "--seed", "4", "--repetitions", "3", "--out-dir", &out_dir],
        vec!["maxmin", &golden],
        vec!["maxmin", &golden, "--oracle", "--format", "json"],
        vec!["maxmin", &knap, "--mode", "randomized", "--seed", "7", "--emit-matroids", "--format", "json"],
        vec!["robust", &golden, "--oracle"],
        vec!["robust", &golden, "--threshold", "3/2", "--format", "json"],
        vec!["robust", &knap, "--format", "csv", "--delta", "1"],
        vec!["oracle", &golden, "--lambda", "2"],
        vec!["bench", &bench],
        vec!["bench", &bench, "--format", "json"],
    ];
    let mut failures = 0;
    for args in &commands {
        let run = || Command::new(bin).args(args).env_remove("ROBUSTCOVER_SEED").output().unwrap();
        let (a, b) = (run(), run());
        if !a.status.success() || a.stdout != b.stdout || a.stderr != b.stderr {
            failures += 1;
            println!("  not deterministic or failed: {}", args.join(" "));
        }
    }
    Outcome {
        failures,
        detail: format!("{} commands run twice each", commands.len()),
    }
}

fn main() {
    let mut audit = Audit {
        checked: 0,
        violations: 0,
    };
    let mut all = true;

    let start = Instant::now();
    let o = criterion_1(&mut audit);
    all &= report(1, "greedy max-min certificate", start, Some(TIME_LIMIT), o);

    let start = Instant::now();
    let o = criterion_2();
    all &= report(2, "knapsack to partition matroid reduction", start, Some(TIME_LIMIT), o);

    let start = Instant::now();
    let o = criterion_3();
    all &= report(3, "scenario splitting", start, None, o);

    let start = Instant::now();
    let t = robust_criteria(&mut audit);
    all &= report(
        4,
        "discriminating contract",
        start,
        None,
        Outcome {
            failures: t.c4,
            detail: format!("{} instances, {} (T, D) pairs", t.instances, t.c4_checks),
        },
    );
    all &= report(
        5,
        "threshold search quality and lambda = 1 identity",
        start,
        None,
        Outcome {
            failures: t.c5,
            detail: format!("{} instances, {} identities exact", t.instances, t.c5_identity),
        },
    );
    all &= report(
        6,
        "per-iteration robust certificate",
        start,
        None,
        Outcome {
            failures: t.c6,
            detail: format!("{} iterations", t.c6_iterations),
        },
    );

    let start = Instant::now();
    all &= report(
        7,
        "oracle monotonicity and subadditivity",
        start,
        None,
        Outcome {
            failures: audit.violations,
            detail: format!("{} OptAug tables audited", audit.checked),
        },
    );

    let start = Instant::now();
    let o = criterion_8();
    all &= report(8, "CLI determinism", start, None, o);

    if !all {
        std::process::exit(1);
    }
}
