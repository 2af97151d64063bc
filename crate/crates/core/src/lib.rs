//! Max-min and two-stage robust optimization for covering problems.
//!
//! A covering problem is a ground set of priced elements together with `n`
//! requirements, each satisfied by an upward-closed family of element sets.
//! Given a downward-closed uncertainty set `Ω ⊆ 2^[n]` this crate provides
//!
//! * a greedy max-min solver driven by the marginal costs of a deterministic
//!   online algorithm ([`maxmin::maxmin_greedy`]),
//! * a reduction from knapsack constraints to a family of partition matroids
//!   ([`maxmin::KnapsackReduction`]) and the resulting max-min solver for a
//!   p-system intersected with q knapsacks,
//! * threshold-based ("discriminating") two-stage robust solvers and the
//!   threshold search turning them into approximation algorithms
//!   ([`robust`]),
//! * exact brute-force oracles for desk-scale instances ([`oracle`]).
//!
//! All costs and weights are exact rationals ([`Cost`], [`Rational`]).

pub mod cost;
pub mod error;
pub mod io;
pub mod knapsack;
pub mod maxmin;
pub mod oracle;
pub mod problem;
pub mod problems;
pub mod robust;
pub mod scenario;
pub mod system;
pub mod uncertainty;

pub use cost::{harmonic, parse_rational, Cost, Rational};
pub use error::{Error, Result};
pub use knapsack::KnapsackSet;
pub use problem::{CoveringProblem, OnlineRun};
pub use problems::{Problem, SetCoverProblem, SteinerTreeProblem};
pub use scenario::{ElementSet, Scenario};
pub use system::{
    DownwardClosed, ExplicitFamily, GraphicMatroid, Intersection, PSystem, PartitionMatroid,
    UniformMatroid,
};
pub use uncertainty::Uncertainty;
