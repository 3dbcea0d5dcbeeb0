//! Run configuration, presets and output.

pub mod compare;
pub mod config;
pub mod output;
pub mod presets;
pub mod run;

pub use compare::{compare_runs, convergence, Coarsening, Comparison, Norm, ReferenceSpec};
pub use config::{parse_config, resolve, with_overrides, ResolvedConfig, RunConfig, SchemeKind};
pub use presets::{preset, PRESETS};
pub use run::{run_experiment, simulate, stability_scan, Outcome, Simulation};
