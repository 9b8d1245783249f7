//! Library half of the experiment harness: config parsing and the run,
//! sweep, verify and bounds pipelines. The `bfed` binary is a thin argument
//! parser on top.

pub mod commands;
pub mod config;

pub use config::ExperimentConfig;

/// Exit codes of the binary.
pub mod exit_codes {
    pub const OK: i32 = 0;
    pub const CONFIG_ERROR: i32 = 2;
    pub const BLOW_UP: i32 = 3;
    pub const PROPERTY_FAILURE: i32 = 4;
}
