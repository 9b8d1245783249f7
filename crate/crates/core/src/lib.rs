//! Pseudo-spectral simulation of the 3D periodic Brinkman-Forchheimer-extended
//! Darcy equations (Navier-Stokes with a nonlinear |u|^(2*alpha) u drag term),
//! coupled to a nudging-based observer system that assimilates coarse
//! observations of the reference solution, plus the analysis machinery that
//! evaluates the closed-form synchronization bounds and checks them against
//! measured trajectories.

pub mod assim;
pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod interpolant;
pub mod operators;
pub mod params;
pub mod rng;
pub mod snapshot;
pub mod stepper;
pub mod verify;

pub use assim::{fit_decay_and_plateau, run_coupled, spin_up, DecayFit, RunOutcome, RunRecord, RunSetup};
pub use error::{Error, Result};
pub use field::{PhysicalField, SpectralField};
pub use grid::Grid;
pub use interpolant::{apply_interpolant, verify_inequality, InterpolantKind, InterpolantSpec};
pub use params::{AssimParams, ForcingField, ForcingKind, ForcingSpec, PhysicalParams};
pub use stepper::{Scheme, Stepper, StepperConfig};
