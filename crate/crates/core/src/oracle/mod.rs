//! Ground truth that does not go through the solver: an exact projection for
//! polyhedral instances, closed forms for the worked examples, a dense
//! symmetric eigensolver and random instance generators.

mod eigen;
mod examples;
pub mod random;
mod qp;

pub use eigen::{eig_max_sym, jacobi_eigenvalues};
pub use examples::{
    example_fails_recurrence, example_tight, nonlinear_dual_solution, nonlinear_instance,
    tight_instance, RecurrenceState, RecurrenceStep,
};
pub use qp::{solve_qp_activeset, PolyhedralQP, QpSolution, MAX_CONSTRAINTS};
