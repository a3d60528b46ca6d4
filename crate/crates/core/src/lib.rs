//! Frequency-domain model of a three-mode optomechanical system: two
//! linearly coupled optical cavities sharing one mechanical resonator.
//!
//! The pipeline is
//! [`SystemParams`] → [`solve_steady_state`] → [`effective_params`] →
//! [`build_full_matrix`] / [`build_rwa_matrix`] → [`scattering_matrix`] →
//! [`transmission`] and [`vacuum_spectra`].
//!
//! Figure-style runs skip the first two steps and construct an
//! [`EffectiveParams`] directly.

pub mod circulator;
pub mod error;
pub mod linearized;
pub mod model;
pub mod scattering;

use nalgebra::SMatrix;
use num_complex::Complex64;

pub type Matrix6c = SMatrix<Complex64, 6, 6>;
pub type Matrix3c = SMatrix<Complex64, 3, 3>;

pub use circulator::{analytic_circulator_matrix, compare_full_vs_rwa, is_time_reversal_symmetric, DeviationReport};
pub use error::{Error, Result};
pub use linearized::{
    build_full_matrix, build_rwa_matrix, rwa_regime_holds, stability, LinearModel, RwaModel, StabilityReport,
    STABILITY_EPSILON,
};
pub use model::{
    design_drives, effective_params, normalize_phase, scan_steady_state_branches, solve_steady_state, BranchScan,
    DriveDesign, EffectiveParams, SteadyState, SystemParams,
};
pub use scattering::{
    output_spectra, rwa_scattering, scattering_matrix, sweep, sweep_rwa, sweep_serial, transmission, uniform_grid,
    vacuum_spectra, InputSpectra, ScatteringResult, SweepTable,
};
