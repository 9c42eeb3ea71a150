//! Output decomposition of Boolean control networks in the semi-tensor
//! product (STP) framework.
//!
//! States, inputs and outputs are packed into canonical basis vectors
//! `δ_{2^k}^i`, and the dynamics `x(t+1) = L u(t) x(t)`, `y(t) = H x(t)` are
//! stored as logical matrices. The decomposition routines look for a
//! coordinate change `z = T x` splitting the state into an output-relevant
//! part `z¹` that evolves on its own and a remainder `z²`.

pub mod decomposition;
pub mod expr;
pub mod model;
pub mod observability;
pub mod partition;
pub mod stp;

pub use decomposition::{
    extract_subsystems, max_decomposition, max_feasible_order, q_from_partition, regularity_test,
    search_cc_pevp, t_from_q, verify_decomposition, DecomposedBcn, DecompositionError,
    DecompositionResult, RegularityReport, RegularityVerdict, SearchMode,
};
pub use expr::{parse, table_to_dnf, to_truth_table, Expr, ExprError, ParseError, TruthTable};
pub use model::{assemble, Bcn, EquationSystem, ModelError, Names, Trajectory};
pub use observability::{obs_partition, obs_rows, obs_rows_limited, ObservabilityMatrix};
pub use partition::{gcr, is_cc_pevp, Partition, PartitionError};
pub use stp::{
    index_to_state, state_to_index, swap_matrix, LogicalMatrix, RationalMatrix, StateVector,
    StpError,
};
