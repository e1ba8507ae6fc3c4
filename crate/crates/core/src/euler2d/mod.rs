//! Two-dimensional solver for the reformulated `(θ, u)` system, with
//! vorticity and damped-wave residual checks, blowup detection and binary
//! field snapshots.

pub mod blowup;
pub mod data;
pub mod grid;
pub mod residual;
pub mod run;
pub mod snapshot;
pub mod solver;
pub mod state;
pub mod stencil;

pub use blowup::{detect_blowup, BlowupKind, BlowupMonitor, BlowupReport};
pub use grid::Grid2D;
pub use run::{evolve, Observation, RunOptions, RunOutcome, TimeStep};
pub use solver::{Solver, SolverConfig};
pub use state::{derived_fields, init_state, vorticity, DerivedFields, FlowState2D};
