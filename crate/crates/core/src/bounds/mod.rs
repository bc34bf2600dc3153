//! Local-realistic and no-signaling bounds of Bell functionals.

mod local;
mod ns;

pub use local::{local_bound, local_bound_with_cap, strategy_count, DeterministicStrategy, LocalBound, DEFAULT_STRATEGY_CAP};
pub use ns::{
    ns_bound, ns_constraints, ns_full_problem, ns_maximize, ns_vertex, random_objective, sample_ns_behavior,
    Coordinate, NsCoordinates, NsOptimum, MAX_LP_VARIABLES,
};
