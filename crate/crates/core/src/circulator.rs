//! Closed-form circulator matrices, the time-reversal criterion and
//! full-versus-RWA deviation reports.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linearized::{build_full_matrix, build_rwa_matrix, rwa_stable, stability};
use crate::model::{normalize_phase, EffectiveParams, SystemParams};
use crate::scattering::{rwa_scattering, scattering_matrix, transmission, validate_grid};
use crate::Matrix3c;

const PHASE_MATCH_TOLERANCE: f64 = 1e-9;

/// Ideal circulator at `θ = π/2` (a→b→c→a) or `θ = 3π/2` (a→c→b→a).
pub fn analytic_circulator_matrix(theta: f64) -> Result<Matrix3c> {
    let z = Complex64::new(0.0, 0.0);
    let mi = Complex64::new(0.0, -1.0);
    let m1 = Complex64::new(-1.0, 0.0);
    let t = normalize_phase(theta);
    if (t - FRAC_PI_2).abs() <= PHASE_MATCH_TOLERANCE {
        #[rustfmt::skip]
        let s = Matrix3c::from_row_slice(&[
            z, z, mi,
            mi, z, z,
            z, m1, z,
        ]);
        Ok(s)
    } else if (t - 3.0 * FRAC_PI_2).abs() <= PHASE_MATCH_TOLERANCE {
        #[rustfmt::skip]
        let s = Matrix3c::from_row_slice(&[
            z, mi, z,
            z, z, m1,
            mi, z, z,
        ]);
        Ok(s)
    } else {
        Err(Error::UnsupportedPhase(theta))
    }
}

/// True when `θ` lies within `tol` of an integer multiple of π.
pub fn is_time_reversal_symmetric(theta: f64, tol: f64) -> bool {
    let r = theta.rem_euclid(PI);
    r.min(PI - r) <= tol
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub grid: Vec<f64>,
    /// `|T_full − |S_rwa|²|` at each grid point.
    pub per_point: Vec<Matrix3<f64>>,
    /// Max over the grid, element by element.
    pub per_element_deviation: Matrix3<f64>,
    pub max_abs_t_deviation: f64,
    pub worst_frequency: f64,
    /// Set when the RWA validity regime does not hold.
    pub regime_warning: bool,
}

impl DeviationReport {
    pub fn max_at(&self, k: usize) -> f64 {
        self.per_point[k].max()
    }
}

/// Compares the full six-mode transmission with the RWA `|S|²` on `grid`.
pub fn compare_full_vs_rwa(eff: &EffectiveParams, p: &SystemParams, grid: &[f64]) -> Result<DeviationReport> {
    validate_grid(grid)?;
    let full = build_full_matrix(eff, p);
    let report = stability(&full)?;
    if !report.stable {
        return Err(Error::Unstable { margin: report.margin });
    }
    let rwa = build_rwa_matrix(eff, p);
    if !rwa_stable(&rwa)? {
        return Err(Error::Unstable { margin: f64::NAN });
    }

    let mut per_point = Vec::with_capacity(grid.len());
    let mut per_element = Matrix3::zeros();
    let mut max_dev = -1.0;
    let mut worst = grid[0];
    for &omega in grid {
        let t_full = transmission(&scattering_matrix(&full, omega)?);
        let t_rwa = rwa_scattering(&rwa, omega)?.map(|z| z.norm_sqr());
        let dev = (t_full - t_rwa).abs();
        per_element = per_element.zip_map(&dev, f64::max);
        let here = dev.max();
        if here > max_dev {
            max_dev = here;
            worst = omega;
        }
        per_point.push(dev);
    }
    Ok(DeviationReport {
        grid: grid.to_vec(),
        per_point,
        per_element_deviation: per_element,
        max_abs_t_deviation: max_dev,
        worst_frequency: worst,
        regime_warning: !rwa.regime_ok,
    })
}
