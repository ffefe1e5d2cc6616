//! Configuration-driven studies over the solvers and their result files.

pub mod config;
pub mod grid;
pub mod order;
pub mod output;
pub mod reference;
pub mod run;

pub use config::{Overrides, ReferenceChoice, RunConfig, StudyKind};
pub use grid::Grid;
pub use order::Order;
pub use output::write_outputs;
pub use run::{run_study, StudyOutcome};
