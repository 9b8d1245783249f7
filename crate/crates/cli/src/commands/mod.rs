pub mod bounds;
pub mod run;
pub mod sweep;
pub mod verify;

pub use bounds::cmd_bounds;
pub use run::cmd_run;
pub use sweep::{cmd_sweep, SweepArtifacts, SweepPoint, SweepRow};
pub use verify::cmd_verify;
