//! Equation/variable structure of the linearised alignment system and the
//! explicit Jacobian construction.

mod bipartite;
mod construct;
mod matching;
mod rank;

pub use bipartite::{adjacent, build_bipartite, BipartiteSystem, EquationIndex, Matching, VariableIndex};
pub use construct::{
    certify_feasibility, construct_jacobian_d1, construction_channels, divide_by_streams,
    divisible_stream_count, lift_kronecker, Certificate, Certification, JacobianMatrix,
    MAX_CERTIFIED_DIM,
};
pub use matching::{maximum_matching, trim_to_square, HallWitness, MatchingOutcome};
pub use rank::{numeric_rank, RankReport, RankTolerance};
