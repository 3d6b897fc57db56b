//! Three-pulse composite sequences that rotate the bare qubit basis into the
//! dressed basis robustly against Rabi-frequency errors and crosstalk.

pub mod nelder_mead;
mod optimize;
mod robustness;
mod sequence;
pub mod su2;

pub use optimize::{optimize, optimize_with, OptimizeOptions, OptimizeOutcome};
pub use robustness::{evaluate, xy_angle, xy_error, xy_error_at, Aggregation, Band, BandKind, ErrorReport, Evaluator, RobustnessSpec, SampleError};
pub use sequence::{sequence_su2, sequence_unitary, time_reversal, CompositePulse, PulseParams, PULSE_COUNT};
