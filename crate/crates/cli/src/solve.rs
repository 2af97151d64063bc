//! Solver runs and their exact comparisons, shared by the subcommands and
//! the benchmark.

use std::time::Instant;

use robustcover::cost::rational_string;
use robustcover::io::Instance;
use robustcover::maxmin::{
    maxmin_delta_floor, maxmin_greedy, maxmin_system_knapsack, KnapsackReduction, MatroidDump, ReductionParams,
    SplitMode, DEFAULT_ENUMERATION_CAP,
};
use robustcover::oracle::{p_system_ratio, ExactBudget, ExactOracle, MAX_ONLINE_RATIO_REQUIREMENTS};
use robustcover::robust::{
    robust_delta_floor, DiscriminatingOutput, GridPoint, GuaranteeTags, RobustConfig, RobustSolver, UnionCommit,
};
use robustcover::{Cost, CoveringProblem, ElementSet, Problem, Rational, Scenario, Uncertainty};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::report::{opt_string, ratio, rational_opt, RatioRow};

fn problem_name(p: &Problem) -> &'static str {
    p.kind()
}

/// Exact online ratio when the instance is small enough, the worst-case
/// bound otherwise.
fn online_ratio(problem: &Problem) -> Rational {
    if problem.num_requirements() <= MAX_ONLINE_RATIO_REQUIREMENTS {
        if let Ok(r) = ExactOracle::new(problem, ExactBudget::default()).and_then(|o| o.online_ratio()) {
            return r;
        }
    }
    problem.online_ratio_bound()
}

fn elapsed(start: Instant, timing: bool) -> Option<u128> {
    timing.then(|| start.elapsed().as_millis())
}

/// Exact answers are optional: a budget refusal leaves them out.
fn soft<T>(r: robustcover::Result<T>) -> CliResult<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(robustcover::Error::BudgetExceeded { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

#[derive(Clone, Debug)]
pub struct MaxMinOptions {
    pub oracle: bool,
    pub delta: Option<Rational>,
    pub cap: u64,
    pub mode: SplitMode,
    pub emit_matroids: bool,
    pub timing: bool,
}

impl Default for MaxMinOptions {
    fn default() -> Self {
        MaxMinOptions {
            oracle: false,
            delta: None,
            cap: DEFAULT_ENUMERATION_CAP,
            mode: SplitMode::Deterministic,
            emit_matroids: false,
            timing: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KnapsackDetails {
    #[serde(with = "rational_string")]
    pub delta: Rational,
    pub matroid_count: u64,
    pub best_index: u64,
    pub best_composition: Vec<u64>,
    pub part_bound: usize,
    pub parts: Vec<Scenario>,
    pub chosen_part: usize,
    pub dropped: Scenario,
    pub mode: SplitMode,
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxMinCheck {
    /// Exact max-min value and a maximizing scenario.
    pub exact: Cost,
    pub exact_scenario: Scenario,
    /// `Opt` of the returned scenario.
    pub scenario_opt: Cost,
    /// `exact / scenario_opt`
    #[serde(with = "rational_opt")]
    pub ratio: Option<Rational>,
    /// Guarantee factor the ratio is compared with.
    #[serde(with = "rational_string")]
    pub bound: Rational,
    pub within_bound: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxMinReport {
    pub problem: &'static str,
    pub uncertainty: &'static str,
    pub p: usize,
    pub q: usize,
    pub algorithm: &'static str,
    pub scenario: Scenario,
    pub order: Vec<usize>,
    /// `c(a_on)` along `order`.
    pub online_cost: Cost,
    /// Certified upper bound on the max-min value.
    #[serde(with = "rational_string")]
    pub upper_bound: Rational,
    #[serde(with = "rational_string")]
    pub rho_on: Rational,
    #[serde(with = "rational_string")]
    pub rho_off: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub knapsack: Option<KnapsackDetails>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matroids: Option<Vec<MatroidDump>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<MaxMinCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u128>,
}

impl MaxMinReport {
    pub fn row(&self, instance: &str) -> RatioRow {
        let check = self.oracle.as_ref();
        RatioRow {
            instance: instance.to_string(),
            problem: self.problem.to_string(),
            p: self.p,
            q: self.q,
            lambda: String::new(),
            alg: format!("maxmin-{}", self.algorithm),
            value: check.map_or(self.online_cost, |c| c.scenario_opt).to_string(),
            exact: opt_string(check.map(|c| c.exact)),
            ratio: opt_string(check.and_then(|c| c.ratio)),
            rho_on: self.rho_on.to_string(),
            rho_off: self.rho_off.to_string(),
            runtime_ms: opt_string(self.runtime_ms),
        }
    }
}

pub fn solve_maxmin(inst: &Instance, opts: &MaxMinOptions) -> CliResult<MaxMinReport> {
    let start = Instant::now();
    let problem = &inst.problem;
    let omega = &inst.uncertainty;
    let n = problem.num_requirements();
    let rho_off = problem.offline_ratio();
    let mut report = match omega {
        Uncertainty::System(_) | Uncertainty::Explicit(_) => {
            let system: &dyn robustcover::PSystem = match omega {
                Uncertainty::System(s) => s.as_ref(),
                Uncertainty::Explicit(f) => f,
                _ => unreachable!(),
            };
            let r = maxmin_greedy(problem, system)?;
            MaxMinReport {
                problem: problem_name(problem),
                uncertainty: omega.kind(),
                p: omega.p_value(),
                q: 0,
                algorithm: "greedy",
                order: r.order(),
                upper_bound: r.online_cost.value() * Rational::from_integer(r.lower_bound_factor as i128),
                scenario: r.scenario,
                online_cost: r.online_cost,
                rho_on: Rational::from_integer(0),
                rho_off,
                knapsack: None,
                matroids: None,
                oracle: None,
                runtime_ms: None,
            }
        }
        Uncertainty::SystemKnapsack { system, knapsack } => {
            let params = match opts.delta {
                Some(d) => ReductionParams::new(d, opts.cap)?,
                None => ReductionParams::auto(n, maxmin_delta_floor(), opts.cap),
            };
            let k = maxmin_system_knapsack(problem, system.as_ref(), knapsack, params, opts.mode)?;
            let matroids = if opts.emit_matroids {
                let (normalized, dropped) = knapsack.normalize()?;
                let combined = normalized.combine()?;
                let red = KnapsackReduction::new(
                    combined.weights()[0].clone(),
                    combined.capacities()[0],
                    &dropped,
                    params,
                )?;
                Some(red.dump()?)
            } else {
                None
            };
            MaxMinReport {
                problem: problem_name(problem),
                uncertainty: omega.kind(),
                p: omega.p_value(),
                q: omega.q(),
                algorithm: "knapsack",
                order: k.best.order(),
                upper_bound: k.best.online_cost.value() * Rational::from_integer(k.best.lower_bound_factor as i128),
                scenario: k.scenario.clone(),
                online_cost: k.best.online_cost,
                rho_on: Rational::from_integer(0),
                rho_off,
                knapsack: Some(KnapsackDetails {
                    delta: k.delta,
                    matroid_count: k.matroid_count,
                    best_index: k.best_index,
                    best_composition: k.best_composition,
                    part_bound: k.part_bound,
                    parts: k.parts,
                    chosen_part: k.chosen_part,
                    dropped: k.dropped,
                    mode: opts.mode,
                }),
                matroids,
                oracle: None,
                runtime_ms: None,
            }
        }
    };
    report.runtime_ms = elapsed(start, opts.timing);
    report.rho_on = online_ratio(problem);
    if opts.oracle {
        report.oracle = maxmin_check(inst, &report)?;
    }
    Ok(report)
}

/// Greedy: `(p+1)·ρ_on`. Knapsack: `(p+2)·parts·ρ_on·ρ_off`.
pub fn maxmin_bound(report: &MaxMinReport) -> Rational {
    let base = Rational::from_integer(report.p as i128 + 1) * report.rho_on;
    match &report.knapsack {
        None => base,
        Some(k) => {
            Rational::from_integer(report.p as i128 + 2)
                * Rational::from_integer(k.part_bound as i128)
                * report.rho_on
                * report.rho_off
        }
    }
}

fn maxmin_check(inst: &Instance, report: &MaxMinReport) -> CliResult<Option<MaxMinCheck>> {
    let Some(oracle) = soft(ExactOracle::new(&inst.problem, ExactBudget::default()))? else {
        return Ok(None);
    };
    let Some((exact, exact_scenario)) = soft(oracle.max_min(&inst.uncertainty))? else {
        return Ok(None);
    };
    let scenario_opt = oracle.opt(&report.scenario)?;
    let r = ratio(exact.value(), scenario_opt.value());
    let bound = maxmin_bound(report);
    Ok(Some(MaxMinCheck {
        exact,
        exact_scenario,
        scenario_opt,
        ratio: r,
        bound,
        within_bound: r.is_some_and(|r| r <= bound),
    }))
}

#[derive(Clone, Debug)]
pub struct RobustOptions {
    pub oracle: bool,
    pub threshold: Option<Cost>,
    pub lambda: Option<Rational>,
    pub epsilon: Rational,
    pub delta: Option<Rational>,
    pub cap: u64,
    pub commit: UnionCommit,
    /// Use the worst-case online ratio even when the exact one is computable.
    pub theoretical: bool,
    pub timing: bool,
}

impl Default for RobustOptions {
    fn default() -> Self {
        let (a, b) = robustcover::robust::DEFAULT_SEARCH_EPSILON;
        RobustOptions {
            oracle: false,
            threshold: None,
            lambda: None,
            epsilon: Rational::new(a, b),
            delta: None,
            cap: DEFAULT_ENUMERATION_CAP,
            commit: UnionCommit::WinnerOnly,
            theoretical: false,
            timing: false,
        }
    }
}

/// Discriminating-contract checks over every member of `Ω`.
#[derive(Clone, Debug, Serialize)]
pub struct ContractCheck {
    pub members: usize,
    /// `Φ ∪ augment(D)` covers every `D`.
    pub coverage: bool,
    /// `c(augment(D)) ≤ β·T` for every `D`.
    pub second_stage: bool,
    pub worst_augmentation: Cost,
    /// `c(Φ) ≤ α1·Φ* + α2·T*`, checked only when `T ≥ relaxation·T*`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_stage: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RobustCheck {
    /// Exact robust optimum `c(Φ*) + λ·T*`.
    #[serde(with = "rational_string")]
    pub exact: Rational,
    pub exact_first_stage: ElementSet,
    pub exact_phi: Cost,
    pub exact_second_stage: Cost,
    /// Exact max-min value.
    pub exact_max_min: Cost,
    /// `c(Φ) + λ·max_D c(augment(D))`
    #[serde(with = "rational_string")]
    pub realized: Rational,
    /// `upper_bound / exact`
    #[serde(with = "rational_opt")]
    pub ratio: Option<Rational>,
    /// Guarantee of the search; absent for single-threshold runs.
    #[serde(with = "rational_opt", skip_serializing_if = "Option::is_none")]
    pub bound: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_bound: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RobustReport {
    pub problem: &'static str,
    pub uncertainty: &'static str,
    pub algorithm: &'static str,
    pub p: usize,
    pub q: usize,
    #[serde(with = "rational_string")]
    pub lambda: Rational,
    /// `search` over the threshold grid or a single `threshold` run.
    pub mode: &'static str,
    pub threshold: Cost,
    pub first_stage: ElementSet,
    pub first_stage_cost: Cost,
    /// `c(Φ) + λ·β·T`
    #[serde(with = "rational_string")]
    pub upper_bound: Rational,
    pub tags: GuaranteeTags,
    pub relaxation_factor: usize,
    pub iterations: usize,
    #[serde(with = "rational_string")]
    pub rho_on: Rational,
    #[serde(with = "rational_string")]
    pub rho_off: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub union_size: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub grid: Vec<GridPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contract: Option<ContractCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<RobustCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u128>,
}

impl RobustReport {
    pub fn row(&self, instance: &str) -> RatioRow {
        let check = self.oracle.as_ref();
        RatioRow {
            instance: instance.to_string(),
            problem: self.problem.to_string(),
            p: self.p,
            q: self.q,
            lambda: self.lambda.to_string(),
            alg: format!("robust-{}", self.algorithm),
            value: self.upper_bound.to_string(),
            exact: opt_string(check.map(|c| c.exact)),
            ratio: opt_string(check.and_then(|c| c.ratio)),
            rho_on: self.rho_on.to_string(),
            rho_off: self.rho_off.to_string(),
            runtime_ms: opt_string(self.runtime_ms),
        }
    }
}

/// `(1+ε)·relaxation·max{α1, β}`, the guarantee of a threshold search.
pub fn robust_bound(report: &RobustReport, epsilon: Rational) -> Rational {
    let tags = report.tags;
    (Rational::from_integer(1) + epsilon)
        * Rational::from_integer(report.relaxation_factor as i128)
        * tags.alpha1.max(tags.beta)
}

pub fn solve_robust(inst: &Instance, opts: &RobustOptions) -> CliResult<RobustReport> {
    let start = Instant::now();
    let problem = &inst.problem;
    let omega = &inst.uncertainty;
    let lambda = opts.lambda.unwrap_or(inst.lambda);
    if lambda < Rational::from_integer(1) {
        return Err(CliError::input(format!("lambda = {lambda} is below 1")));
    }
    let mut config = if opts.theoretical {
        RobustConfig::theoretical(problem)
    } else {
        RobustConfig::measured(problem, ExactBudget::default())
    };
    config.union_commit = opts.commit;
    if let Uncertainty::SystemKnapsack { .. } = omega {
        let n = problem.num_requirements();
        config.reduction = Some(match opts.delta {
            Some(d) => ReductionParams::new(d, opts.cap)?,
            None => ReductionParams::auto(n, robust_delta_floor(), opts.cap),
        });
    }
    let solver = RobustSolver::new(problem, omega, config)?;
    let (output, upper_bound, grid, mode) = match opts.threshold {
        Some(t) => {
            let out = solver.discriminate(t)?;
            let ub = out.upper_bound(lambda);
            (out, ub, Vec::new(), "threshold")
        }
        None => {
            let sol = solver.search(lambda, opts.epsilon)?;
            (sol.output, sol.upper_bound, sol.trace, "search")
        }
    };
    let runtime_ms = elapsed(start, opts.timing);
    let note = match omega {
        Uncertainty::Explicit(_) => Some("explicit scenarios: listed-scenario discriminating algorithm"),
        Uncertainty::SystemKnapsack { .. } => Some("knapsack: union of p-system and partition-matroid intersections"),
        Uncertainty::System(_) => None,
    };
    let mut report = RobustReport {
        problem: problem_name(problem),
        uncertainty: omega.kind(),
        algorithm: output.kind,
        p: omega.p_value(),
        q: omega.q(),
        lambda,
        mode,
        threshold: output.threshold,
        first_stage: output.first_stage.clone(),
        first_stage_cost: output.first_stage_cost,
        upper_bound,
        tags: output.tags,
        relaxation_factor: output.relaxation_factor,
        iterations: output.iterations.len(),
        rho_on: config.online_ratio,
        rho_off: config.offline_ratio,
        union_size: solver.union_size(),
        grid,
        contract: None,
        oracle: None,
        note,
        runtime_ms,
    };
    if opts.threshold.is_some() || opts.oracle {
        report.contract = contract_check(inst, &output, lambda)?;
    }
    if opts.oracle {
        report.oracle = robust_check(inst, &report, &output, opts.epsilon)?;
    }
    Ok(report)
}

fn contract_check(inst: &Instance, out: &DiscriminatingOutput, lambda: Rational) -> CliResult<Option<ContractCheck>> {
    let problem = &inst.problem;
    let Some(members) = soft(robustcover::oracle::enumerate_members(&inst.uncertainty, ExactBudget::default()))?
    else {
        return Ok(None);
    };
    let bound = out.tags.beta * out.threshold.value();
    let mut coverage = true;
    let mut second_stage = true;
    let mut worst = Cost::ZERO;
    for d in &members {
        let aug = out.augment(problem, d)?;
        coverage &= problem.satisfies_all(d, &out.first_stage.union(&aug));
        let c = problem.set_cost(&aug);
        second_stage &= c.value() <= bound;
        worst = worst.max(c);
    }
    let first_stage = match soft(ExactOracle::new(problem, ExactBudget::default()))? {
        Some(oracle) => soft(oracle.robust(&inst.uncertainty, lambda))?.and_then(|opt| {
            let needed = opt.second_stage.value() * Rational::from_integer(out.relaxation_factor as i128);
            (out.threshold.value() >= needed).then(|| {
                out.first_stage_cost.value()
                    <= out.tags.alpha1 * opt.phi.value() + out.tags.alpha2 * opt.second_stage.value()
            })
        }),
        None => None,
    };
    Ok(Some(ContractCheck {
        members: members.len(),
        coverage,
        second_stage,
        worst_augmentation: worst,
        first_stage,
    }))
}

fn robust_check(
    inst: &Instance,
    report: &RobustReport,
    out: &DiscriminatingOutput,
    epsilon: Rational,
) -> CliResult<Option<RobustCheck>> {
    let problem = &inst.problem;
    let Some(oracle) = soft(ExactOracle::new(problem, ExactBudget::default()))? else {
        return Ok(None);
    };
    let Some(exact) = soft(oracle.robust(&inst.uncertainty, report.lambda))? else {
        return Ok(None);
    };
    let (exact_max_min, _) = oracle.max_min(&inst.uncertainty)?;
    let mut worst = Cost::ZERO;
    for d in oracle.members(&inst.uncertainty)? {
        worst = worst.max(problem.set_cost(&out.augment(problem, &d)?));
    }
    let realized = out.first_stage_cost.value() + report.lambda * worst.value();
    let r = ratio(report.upper_bound, exact.value);
    let bound = (report.mode == "search").then(|| robust_bound(report, epsilon));
    Ok(Some(RobustCheck {
        exact: exact.value,
        exact_first_stage: exact.first_stage,
        exact_phi: exact.phi,
        exact_second_stage: exact.second_stage,
        exact_max_min,
        realized,
        ratio: r,
        bound,
        within_bound: bound.map(|b| r.is_some_and(|r| r <= b)),
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct Audit {
    pub tables_checked: usize,
    pub violations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub problem: &'static str,
    pub uncertainty: &'static str,
    pub requirements: usize,
    pub elements: usize,
    pub p: usize,
    #[serde(with = "rational_opt")]
    pub p_measured: Option<Rational>,
    pub members: usize,
    pub max_min: Cost,
    pub max_min_scenario: Scenario,
    #[serde(with = "rational_string")]
    pub lambda: Rational,
    #[serde(with = "rational_string")]
    pub robust: Rational,
    pub robust_first_stage: ElementSet,
    pub robust_phi: Cost,
    pub robust_second_stage: Cost,
    #[serde(with = "rational_opt")]
    pub online_ratio: Option<Rational>,
    #[serde(with = "rational_string")]
    pub offline_ratio_bound: Rational,
    pub audit: Audit,
}

pub fn run_oracle(inst: &Instance, lambda: Option<Rational>) -> CliResult<OracleReport> {
    let problem = &inst.problem;
    let omega = &inst.uncertainty;
    let lambda = lambda.unwrap_or(inst.lambda);
    if lambda < Rational::from_integer(1) {
        return Err(CliError::input(format!("lambda = {lambda} is below 1")));
    }
    let oracle = ExactOracle::new(problem, ExactBudget::default())?.with_audit();
    let members = oracle.members(omega)?;
    let (max_min, max_min_scenario) = oracle.max_min(omega)?;
    let robust = oracle.robust(omega, lambda)?;
    let online = if problem.num_requirements() <= MAX_ONLINE_RATIO_REQUIREMENTS {
        Some(oracle.online_ratio()?)
    } else {
        None
    };
    let (tables_checked, violations) = oracle.audit_report().expect("audit enabled");
    Ok(OracleReport {
        problem: problem_name(problem),
        uncertainty: omega.kind(),
        requirements: problem.num_requirements(),
        elements: problem.num_elements(),
        p: omega.p_value(),
        p_measured: soft(p_system_ratio(omega, ExactBudget::default()))?,
        members: members.len(),
        max_min,
        max_min_scenario,
        lambda,
        robust: robust.value,
        robust_first_stage: robust.first_stage,
        robust_phi: robust.phi,
        robust_second_stage: robust.second_stage,
        online_ratio: online,
        offline_ratio_bound: problem.offline_ratio(),
        audit: Audit {
            tables_checked,
            violations,
        },
    })
}
