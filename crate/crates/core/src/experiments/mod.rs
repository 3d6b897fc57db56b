//! Parameter scans reproducing the spectroscopy, measurement, Ramsey,
//! pumping and composite-rotation experiments.

mod analysis;
mod scan;
mod scenarios;

pub use analysis::{fit_sinusoid, parabolic_peak, spam_apply, spam_correct, SpamCorrected};
pub use scan::{ResultMetadata, ScanResult, ScanRow, ScanSpec, Scenario, ScenarioOptions, Sweep, RESULT_SCHEMA_VERSION};
pub use scenarios::{
    phase_corrected_fidelity, run_dress_rotate_error, run_dstate_spectrum, run_measure_fidelity, run_pump_convergence, run_ramsey, run_scan,
    FLUCTUATION_BAND, SPECTRUM_PROBE_DURATION,
};
