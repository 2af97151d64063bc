use num_traits::{One, Zero};
use serde::Serialize;

use super::DiscriminatingOutput;
use crate::cost::{rational_string, Cost, Rational};
use crate::error::{Error, Result};
use crate::problem::CoveringProblem;

/// Default grid ratio `ε` of [`threshold_search`].
pub const DEFAULT_SEARCH_EPSILON: (i128, i128) = (1, 10);

/// `0`, then `c_min` growing by `(1+ε)` per step and rounded down to a
/// multiple of `c_min·ε/2`, then `Σ c_e`. Rounding keeps denominators bounded
/// while consecutive points still differ by at most a factor `1+ε`, so every
/// value in `[c_min, Σ c_e]` has a grid point `T` with `T ≤ v ≤ (1+ε)T`.
pub fn threshold_grid<P: CoveringProblem + ?Sized>(problem: &P, epsilon: Rational) -> Result<Vec<Cost>> {
    if epsilon <= Rational::zero() {
        return Err(Error::precondition(format!("grid ratio {epsilon} is not positive")));
    }
    let mut grid = vec![Cost::ZERO];
    let total = problem.total_cost();
    let Some(c_min) = (0..problem.num_elements())
        .map(|e| problem.cost(e))
        .filter(|c| !c.is_zero())
        .min()
    else {
        return Ok(grid);
    };
    let step = c_min.value() * epsilon / Rational::from_integer(2);
    let growth = Rational::one() + epsilon;
    let mut t = c_min.value();
    while t < total.value() {
        grid.push(Cost::new(t).expect("positive"));
        t = (t * growth / step).floor() * step;
    }
    grid.push(total);
    Ok(grid)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridPoint {
    pub threshold: Cost,
    pub first_stage_cost: Cost,
    #[serde(with = "rational_string")]
    pub upper_bound: Rational,
}

/// Result of [`threshold_search`]: the run with the smallest certified bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RobustSolution {
    pub output: DiscriminatingOutput,
    #[serde(with = "rational_string")]
    pub lambda: Rational,
    /// `c(Φ_T) + λ·β·T` for the chosen `T`.
    #[serde(with = "rational_string")]
    pub upper_bound: Rational,
    pub trace: Vec<GridPoint>,
}

/// Runs `discriminate` at every point of [`threshold_grid`] and keeps the
/// smallest `c(Φ_T) + λ·β·T`, the smallest `T` on ties.
pub fn threshold_search<P, F>(
    problem: &P,
    lambda: Rational,
    epsilon: Rational,
    mut discriminate: F,
) -> Result<RobustSolution>
where
    P: CoveringProblem + ?Sized,
    F: FnMut(Cost) -> Result<DiscriminatingOutput>,
{
    let mut trace = Vec::new();
    let mut best: Option<(Rational, DiscriminatingOutput)> = None;
    for t in threshold_grid(problem, epsilon)? {
        let out = discriminate(t)?;
        let bound = out.upper_bound(lambda);
        trace.push(GridPoint {
            threshold: t,
            first_stage_cost: out.first_stage_cost,
            upper_bound: bound,
        });
        if best.as_ref().is_none_or(|(b, _)| bound < *b) {
            best = Some((bound, out));
        }
    }
    let (upper_bound, output) = best.expect("grid contains zero");
    Ok(RobustSolution {
        output,
        lambda,
        upper_bound,
        trace,
    })
}
