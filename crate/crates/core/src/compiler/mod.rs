//! Compilation of mid-circuit measurement and reset directives into timed
//! schedules, and their simulation on an ion register.

mod hands_off;
mod program;
mod schedule;
mod shelving;
mod simulate;

pub use hands_off::{compile_hands_off_reset, dressed_pump_tone};
pub use program::{
    reference_sequence, Directive, MCMRProgram, Method, Timing, TransitionMap, HANDS_OFF_DRESSING_RABI, SHELVING_DRESSING_RABI,
};
pub use schedule::{ItemKind, Schedule, ScheduleItem, SCHEDULE_SCHEMA_VERSION};
pub use shelving::{compile_individual_shelve, compile_individual_shelve_with, compile_shelving_measure, tomography_states};
pub(crate) use shelving::{composite_items, dressing_tones};
pub use simulate::{simulate_schedule, tone_scale, MeasurementRecord, SimulateOptions, SimulationOutput};

use crate::error::Result;
use crate::ion::LevelScheme;

/// Compiles any program according to its method.
pub fn compile(program: &MCMRProgram, scheme: &LevelScheme) -> Result<Schedule> {
    match program.method {
        Method::HandsOff => compile_hands_off_reset(program, scheme),
        _ => compile_shelving_measure(program, scheme),
    }
}
