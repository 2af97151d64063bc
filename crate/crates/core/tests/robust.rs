mod common;

use std::sync::Arc;

use common::r;
use num_traits::One;
use robustcover::oracle::{ExactBudget, ExactOracle};
use robustcover::robust::{
    robust_explicit, robust_p_system, robust_system_knapsack, robust_union_p_systems, threshold_grid,
    DiscriminatingOutput, RobustConfig, RobustSolver, UnionCommit,
};
use robustcover::{
    Cost, CoveringProblem, DownwardClosed, ExplicitFamily, KnapsackSet, PSystem, Problem, Rational, Scenario,
    SetCoverProblem, Uncertainty, UniformMatroid,
};

fn instance(rng: &mut rand_chacha::ChaCha8Rng, case: usize) -> Problem {
    if case.is_multiple_of(2) {
        common::set_cover(rng, 6, 7).into()
    } else {
        common::steiner(rng, 5, 8, 6).into()
    }
}

/// Every member `D` is covered by `Φ ∪ augment(D)`, and the augmentation
/// costs at most `β·T`.
fn check_second_stage<P: CoveringProblem + ?Sized>(
    problem: &P,
    oracle: &ExactOracle<'_, P>,
    omega: &dyn DownwardClosed,
    out: &DiscriminatingOutput,
) {
    let bound = out.tags.beta * out.threshold.value();
    for d in oracle.members(omega).unwrap() {
        let aug = out.augment(problem, &d).unwrap();
        assert!(problem.satisfies_all(&d, &out.first_stage.union(&aug)));
        let c = problem.set_cost(&aug).value();
        assert!(c <= bound, "T = {}, D = {d}: {c} > {bound}", out.threshold);
    }
}

/// Structure of the repeat loop: every pass but the last rose by more than
/// `2ρ_on·T`, and the first stage is the state before the last pass.
fn check_iterations<P: CoveringProblem + ?Sized>(problem: &P, out: &DiscriminatingOutput, rho_on: Rational) {
    let limit = Rational::from_integer(2) * rho_on * out.threshold.value();
    let (last, rest) = out.iterations.split_last().unwrap();
    assert!(out.iterations.len() <= problem.num_requirements() + 1);
    assert!(last.increase.value() <= limit);
    for it in rest {
        assert!(it.increase.value() > limit);
    }
    assert_eq!(last.prior, out.first_stage);
    for w in out.iterations.windows(2) {
        assert_eq!(w[1].prior, w[0].prior.union(&w[0].added));
    }
    assert_eq!(out.first_stage_cost, problem.set_cost(&out.first_stage));
}

#[test]
fn p_system_discriminating_properties() {
    let mut rng = common::rng(5);
    for case in 0..24 {
        let p = instance(&mut rng, case);
        let omega = common::system(&mut rng, 6, case / 2);
        let oracle = ExactOracle::new(&p, ExactBudget::default()).unwrap();
        let cfg = RobustConfig::measured(&p, ExactBudget::default());
        let lambdas = [r(1, 1), r(2, 1), r(5, 1)];
        let optima: Vec<_> = lambdas.iter().map(|&l| oracle.robust(omega.as_ref(), l).unwrap()).collect();
        for t in threshold_grid(&p, r(1, 2)).unwrap() {
            let out = robust_p_system(&p, omega.as_ref(), t, &cfg).unwrap();
            check_iterations(&p, &out, cfg.online_ratio);
            check_second_stage(&p, &oracle, omega.as_ref(), &out);
            for opt in &optima {
                if t >= opt.second_stage {
                    let cap = out.tags.alpha1 * opt.phi.value() + out.tags.alpha2 * opt.second_stage.value();
                    assert!(out.first_stage_cost.value() <= cap, "case {case}, T = {t}");
                }
            }
        }
    }
}

#[test]
fn threshold_search_within_guarantee() {
    let mut rng = common::rng(8);
    let eps = r(1, 10);
    for case in 0..24 {
        let p = instance(&mut rng, case);
        let omega: Arc<dyn PSystem> = common::system(&mut rng, 6, case);
        let oracle = ExactOracle::new(&p, ExactBudget::default()).unwrap();
        let cfg = RobustConfig::measured(&p, ExactBudget::default());
        let u = Uncertainty::System(omega.clone());
        let solver = RobustSolver::new(&p, &u, cfg).unwrap();
        for lambda in [r(1, 1), r(3, 2), r(4, 1)] {
            let sol = solver.search(lambda, eps).unwrap();
            let exact = oracle.robust(omega.as_ref(), lambda).unwrap();
            let tags = sol.output.tags;
            let factor = (Rational::one() + eps) * tags.alpha1.max(tags.beta);
            assert!(sol.upper_bound <= factor * exact.value, "case {case}: {} > {factor}·{}", sol.upper_bound, exact.value);
            // realized cost never exceeds the certificate, nor beats the optimum
            let worst = oracle
                .members(omega.as_ref())
                .unwrap()
                .iter()
                .map(|d| p.set_cost(&sol.output.augment(&p, d).unwrap()).value())
                .max()
                .unwrap();
            let realized = sol.output.first_stage_cost.value() + lambda * worst;
            assert!(realized <= sol.upper_bound);
            assert!(realized >= exact.value);
            if lambda == Rational::one() {
                let (mm, _) = oracle.max_min(omega.as_ref()).unwrap();
                assert!(sol.upper_bound >= mm.value());
            }
        }
    }
}

#[test]
fn lambda_below_one_is_rejected() {
    let p = SetCoverProblem::new(1, vec![(Cost::from_integer(1), vec![0])]).unwrap();
    let u = Uncertainty::System(Arc::new(UniformMatroid::new(1, 1)));
    let solver = RobustSolver::new(&p, &u, RobustConfig::theoretical(&p)).unwrap();
    assert!(solver.search(r(1, 2), r(1, 10)).is_err());
}

#[test]
fn explicit_family_properties() {
    let mut rng = common::rng(13);
    use rand::Rng;
    for case in 0..20 {
        let p = instance(&mut rng, case);
        let oracle = ExactOracle::new(&p, ExactBudget::default()).unwrap();
        let cfg = RobustConfig::measured(&p, ExactBudget::default());
        let k = rng.gen_range(1..=4);
        let sets: Vec<Scenario> = (0..k).map(|_| Scenario::from_mask(rng.gen_range(0..64))).collect();
        let family = ExplicitFamily::new(6, sets.clone(), 2).unwrap();
        let mut doubled = sets.clone();
        doubled.extend(sets.iter().cloned());
        let twice = ExplicitFamily::new(6, doubled, 2).unwrap();
        let exact = oracle.robust(&family, r(2, 1)).unwrap();
        for t in threshold_grid(&p, r(1, 2)).unwrap() {
            let out = robust_explicit(&p, &family, t, &cfg).unwrap();
            check_iterations(&p, &out, cfg.online_ratio);
            check_second_stage(&p, &oracle, &family, &out);
            if t >= exact.second_stage {
                assert!(out.first_stage_cost.value() <= out.tags.alpha1 * exact.phi.value());
            }
            let dup = robust_explicit(&p, &twice, t, &cfg).unwrap();
            assert_eq!(dup.first_stage, out.first_stage);
        }
    }
}

#[test]
fn explicit_empty_family_buys_nothing() {
    let p = SetCoverProblem::new(2, vec![(Cost::from_integer(1), vec![0, 1])]).unwrap();
    let family = ExplicitFamily::new(2, vec![], 1).unwrap();
    let cfg = RobustConfig::theoretical(&p);
    let out = robust_explicit(&p, &family, Cost::ZERO, &cfg).unwrap();
    assert!(out.first_stage.is_empty());
    assert_eq!(out.iterations.len(), 1);
}

#[test]
fn union_of_one_matches_p_system() {
    let mut rng = common::rng(34);
    for case in 0..12 {
        let p = instance(&mut rng, case);
        let omega = common::system(&mut rng, 6, case);
        let cfg = RobustConfig::theoretical(&p);
        for t in threshold_grid(&p, r(1, 1)).unwrap() {
            let single = robust_p_system(&p, omega.as_ref(), t, &cfg).unwrap();
            let union = robust_union_p_systems(&p, std::slice::from_ref(&omega), t, &cfg).unwrap();
            assert_eq!(single.first_stage, union.first_stage);
            assert_eq!(single.tags, union.tags);
        }
    }
}

#[test]
fn union_ties_pick_the_first_system() {
    let p = SetCoverProblem::new(3, vec![(Cost::from_integer(1), vec![0]), (Cost::from_integer(1), vec![1, 2])]).unwrap();
    let m: Arc<dyn PSystem> = Arc::new(UniformMatroid::new(3, 1));
    let systems = vec![m.clone(), m];
    for commit in [UnionCommit::WinnerOnly, UnionCommit::AllProbes] {
        let cfg = RobustConfig {
            union_commit: commit,
            ..RobustConfig::theoretical(&p)
        };
        let out = robust_union_p_systems(&p, &systems, Cost::ZERO, &cfg).unwrap();
        assert!(out.iterations.iter().all(|it| it.system == Some(0)));
    }
}

#[test]
fn union_second_stage_bound() {
    let mut rng = common::rng(55);
    for case in 0..12 {
        let p = instance(&mut rng, case);
        let systems = vec![common::system(&mut rng, 6, case), common::system(&mut rng, 6, case + 1)];
        let oracle = ExactOracle::new(&p, ExactBudget::default()).unwrap();
        let cfg = RobustConfig::measured(&p, ExactBudget::default());
        let members: Vec<Scenario> = systems
            .iter()
            .flat_map(|s| oracle.members(s.as_ref()).unwrap())
            .collect();
        for t in threshold_grid(&p, r(1, 1)).unwrap() {
            let out = robust_union_p_systems(&p, &systems, t, &cfg).unwrap();
            check_iterations(&p, &out, cfg.online_ratio);
            for d in &members {
                let aug = out.augment(&p, d).unwrap();
                assert!(p.set_cost(&aug).value() <= out.tags.beta * t.value());
            }
        }
    }
}

#[test]
fn system_knapsack_second_stage_bound() {
    let mut rng = common::rng(89);
    use rand::Rng;
    for case in 0..8 {
        let p = instance(&mut rng, case);
        let oracle = ExactOracle::new(&p, ExactBudget::default()).unwrap();
        let cfg = RobustConfig {
            reduction: Some(robustcover::maxmin::ReductionParams::new(r(1, 1), 10_000).unwrap()),
            ..RobustConfig::measured(&p, ExactBudget::default())
        };
        let w: Vec<Rational> = (0..6).map(|_| r(rng.gen_range(1..=6), 6)).collect();
        let k = KnapsackSet::new(6, vec![w], vec![r(1, 1)]).unwrap();
        let m: Arc<dyn PSystem> = Arc::new(UniformMatroid::new(6, 3));
        let omega = Uncertainty::SystemKnapsack { system: m.clone(), knapsack: k.clone() };
        for t in threshold_grid(&p, r(1, 1)).unwrap() {
            let out = robust_system_knapsack(&p, m.clone(), &k, t, &cfg).unwrap();
            assert_eq!(out.relaxation_factor, robustcover::maxmin::split_part_bound(1, r(6, 1)));
            check_iterations(&p, &out, cfg.online_ratio);
            check_second_stage(&p, &oracle, &omega, &out);
        }
    }
}

#[test]
fn solver_rejects_mismatched_ground_set() {
    let p = SetCoverProblem::new(2, vec![(Cost::from_integer(1), vec![0, 1])]).unwrap();
    let u = Uncertainty::System(Arc::new(UniformMatroid::new(3, 1)));
    assert!(RobustSolver::new(&p, &u, RobustConfig::theoretical(&p)).is_err());
}
