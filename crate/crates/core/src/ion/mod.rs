//! Level scheme, drive and dissipation model for a single-species ion chain.

mod detect;
mod dissipators;
mod dynamics;
mod hamiltonian;
mod noise;
mod pulse;
mod register;
mod scheme;

pub use detect::{bright_population, bright_probability, detect, Detection};
pub use dissipators::{build_detection_leak, build_noise_dissipator, build_repump_dissipator, repump_branching, Dissipator};
pub use dynamics::{apply_noise_window, detuning_error_diagonal, evolve_segment, segment_unitary, ScaledTone, Segment, IDLE_STEP_BOUND, SHAPED_SLICES};
pub use hamiltonian::{build_drive_hamiltonian, DriveFrame};
pub use noise::NoiseModel;
pub use pulse::{Pulse, Shape, Target, BLACKMAN_AREA};
pub use register::{Ion, IonRegister, Role};
pub use scheme::{Level, LevelScheme, Manifold, RepumpBranch, RepumpConfig, Transition, TransitionKind};
