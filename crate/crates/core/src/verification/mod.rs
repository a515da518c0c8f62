//! Exact solutions, balanced error norms, a dense reference solver and
//! convergence-rate fitting.

mod errors;
mod exact;
mod oracle;
mod rates;

pub use errors::{balanced_errors, element_fields, energy_error, ErrorReport};
pub use exact::{load_unaligned, problem_from_exact, ExactSolution, Manufactured};
pub use oracle::{dense_oracle_solve, OracleSolution};
pub use rates::{rate_fit, rate_fit_window, DEFAULT_RATE_WINDOW};
