//! Independent reference procedures used to cross-check the main pipeline.

pub mod bounded;
pub mod lasso;
pub mod native;
pub mod parity;
pub mod team;
pub mod twin;
pub mod universal;

pub use bounded::{bounded_semantics, OracleVerdict, Universe};
pub use lasso::{lasso_eval, lasso_eval_all, lasso_eval_recursive, Letter};
pub use native::{noninterference_direct, observation_based_direct};
pub use parity::parity_bruteforce;
pub use team::dl_eval;
pub use twin::twin_plant_diagnosable;
pub use universal::holds_on_all_paths;
