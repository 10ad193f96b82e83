//! The ZH functional-equation system and its polynomial solution.

pub mod coeffs;
pub mod layout;
pub mod solve;
pub mod system;
mod table_data;
pub mod tables;

pub use coeffs::{big_lambdas, omegas, w_closed_form, zh_coeffs, CoeffSet};
pub use layout::{AnsatzFunction, AnsatzLayout};
pub use solve::{compare_backend_ranks, solve_zh, Backend, Solution, SolveOptions};
pub use system::{assemble_system, EquationFamily, LinearSystem};
pub use tables::{compare_tables, TableReport};
