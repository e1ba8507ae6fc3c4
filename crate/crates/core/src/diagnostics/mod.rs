//! Energy monitors, half-plane blowup functionals with their differential
//! inequality monitors, and an inequality test-bench on analytic fields.

pub mod energy;
pub mod functional;
pub mod halfplane;
pub mod series;
pub mod testbench;
pub mod zfields;

pub use energy::{energy_cal_e, energy_e, sigma_minus};
pub use functional::{f_functional, monitor_ode_inequalities, strip_grid, FSeries, OdeReport, StripSample, STRIP_INTERVALS};
pub use halfplane::{density, outgoing_momentum_data, p_functional, q0, q1, BlowupData, ConditionReport};
pub use testbench::{testbench_divcurl, testbench_klainerman, testbench_weighted, SpaceTimeFunction, WeightedForm};
pub use zfields::{PointJet, VectorField};
pub use series::{blowup_suite, BlowupSuite, DiagnosticSeries, SeriesCollector, SeriesOptions, SeriesRecord, StripSpec};
