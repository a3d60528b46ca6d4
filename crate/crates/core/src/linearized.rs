//! Linearized fluctuation dynamics `dV/dt = −M V + Γ V_in`.
//!
//! Index convention, used by every downstream matrix in this crate:
//!
//! | index | 0    | 1    | 2    | 3     | 4     | 5     |
//! |-------|------|------|------|-------|-------|-------|
//! | field | δa   | δb   | δc   | δa†   | δb†   | δc†   |
//!
//! The RWA model keeps only the first three entries.

use nalgebra::{Schur, Vector3, Vector6};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{EffectiveParams, SystemParams};
use crate::{Matrix3c, Matrix6c};

pub const MODE_A: usize = 0;
pub const MODE_B: usize = 1;
pub const MODE_C: usize = 2;
/// Offset from a mode's index to its creation-operator partner.
pub const CONJUGATE_OFFSET: usize = 3;

/// Real parts at or below this value count as unstable.
pub const STABILITY_EPSILON: f64 = 1e-10;

const EIG_TOLERANCE: f64 = 1e-15;
const EIG_MAX_ITER: usize = 10_000;

/// Full six-dimensional linear model.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub m: Matrix6c,
    /// Diagonal of `Γ`: `(√γ_a, √γ_b, √γ_m, √γ_a, √γ_b, √γ_m)`.
    pub gamma_sqrt: Vector6<f64>,
}

impl LinearModel {
    pub fn gamma_matrix(&self) -> Matrix6c {
        Matrix6c::from_diagonal(&self.gamma_sqrt.map(|g| Complex64::new(g, 0.0)))
    }
}

/// Three-mode model under the rotating-wave approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct RwaModel {
    pub m: Matrix3c,
    /// Diagonal of `Γ₃`: `(√γ_a, √γ_b, √γ_m)`.
    pub gamma_sqrt: Vector3<f64>,
    /// Whether `ω_m ≈ Δ′ ≫ {J, |G|, γ}` holds (see [`rwa_regime_holds`]).
    pub regime_ok: bool,
}

impl RwaModel {
    pub fn gamma_matrix(&self) -> Matrix3c {
        Matrix3c::from_diagonal(&self.gamma_sqrt.map(|g| Complex64::new(g, 0.0)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// Ascending.
    pub eigenvalue_real_parts: [f64; 6],
    pub eigenvalues: [Complex64; 6],
    pub stable: bool,
    /// Smallest real part.
    pub margin: f64,
}

fn i(x: f64) -> Complex64 {
    Complex64::new(0.0, x)
}

fn diag(gamma: f64, freq: f64) -> Complex64 {
    Complex64::new(gamma / 2.0, freq)
}

pub fn build_full_matrix(eff: &EffectiveParams, p: &SystemParams) -> LinearModel {
    let ii = Complex64::i();
    let zero = Complex64::new(0.0, 0.0);
    let (ga, gb) = (eff.coupling_a, eff.coupling_b);
    let (ga_c, gb_c) = (ga.conj(), gb.conj());
    let j = i(p.j);

    #[rustfmt::skip]
    let m = Matrix6c::from_row_slice(&[
        diag(p.gamma_a, eff.delta_a_eff), j, ii * ga, zero, zero, ii * ga,
        j, diag(p.gamma_b, eff.delta_b_eff), ii * gb, zero, zero, ii * gb,
        ii * ga_c, ii * gb_c, diag(p.gamma_m, p.omega_m), ii * ga, ii * gb, zero,
        zero, zero, -ii * ga_c, diag(p.gamma_a, -eff.delta_a_eff), -j, -ii * ga_c,
        zero, zero, -ii * gb_c, -j, diag(p.gamma_b, -eff.delta_b_eff), -ii * gb_c,
        -ii * ga_c, -ii * gb_c, zero, -ii * ga, -ii * gb, diag(p.gamma_m, -p.omega_m),
    ]);
    let (sa, sb, sm) = (p.gamma_a.sqrt(), p.gamma_b.sqrt(), p.gamma_m.sqrt());
    LinearModel {
        m,
        gamma_sqrt: Vector6::new(sa, sb, sm, sa, sb, sm),
    }
}

/// `ω_m`, `Δ′_a` and `Δ′_b` all at least five times every other rate.
pub fn rwa_regime_holds(eff: &EffectiveParams, p: &SystemParams) -> bool {
    let scale = [
        p.j.abs(),
        eff.coupling_a.norm(),
        eff.coupling_b.norm(),
        p.gamma_a,
        p.gamma_b,
        p.gamma_m,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let slowest = p.omega_m.min(eff.delta_a_eff).min(eff.delta_b_eff);
    slowest >= 5.0 * scale
}

pub fn build_rwa_matrix(eff: &EffectiveParams, p: &SystemParams) -> RwaModel {
    let ii = Complex64::i();
    let (ga, gb) = (eff.coupling_a, eff.coupling_b);
    let j = i(p.j);
    #[rustfmt::skip]
    let m = Matrix3c::from_row_slice(&[
        diag(p.gamma_a, eff.delta_a_eff), j, ii * ga,
        j, diag(p.gamma_b, eff.delta_b_eff), ii * gb,
        ii * ga.conj(), ii * gb.conj(), diag(p.gamma_m, p.omega_m),
    ]);
    let regime_ok = rwa_regime_holds(eff, p);
    if !regime_ok {
        log::warn!(
            "RWA regime violated: omega_m = {}, delta' = ({}, {}) not much larger than couplings and dampings",
            p.omega_m,
            eff.delta_a_eff,
            eff.delta_b_eff
        );
    }
    RwaModel {
        m,
        gamma_sqrt: Vector3::new(p.gamma_a.sqrt(), p.gamma_b.sqrt(), p.gamma_m.sqrt()),
        regime_ok,
    }
}

/// Eigenvalues of `M` via a complex Schur decomposition.
pub fn eigenvalues(m: &Matrix6c) -> Result<[Complex64; 6]> {
    let schur = Schur::try_new(*m, EIG_TOLERANCE, EIG_MAX_ITER).ok_or(Error::EigSolverFailure)?;
    let values = schur.eigenvalues().ok_or(Error::EigSolverFailure)?;
    let mut out = [Complex64::new(0.0, 0.0); 6];
    for (slot, v) in out.iter_mut().zip(values.iter()) {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::EigSolverFailure);
        }
        *slot = *v;
    }
    Ok(out)
}

pub fn stability(model: &LinearModel) -> Result<StabilityReport> {
    let mut eigenvalues = eigenvalues(&model.m)?;
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let eigenvalue_real_parts = eigenvalues.map(|v| v.re);
    let margin = eigenvalue_real_parts[0];
    Ok(StabilityReport {
        eigenvalue_real_parts,
        eigenvalues,
        stable: margin > STABILITY_EPSILON,
        margin,
    })
}

/// Same criterion on the three-mode RWA matrix.
pub fn rwa_stable(model: &RwaModel) -> Result<bool> {
    let schur = Schur::try_new(model.m, EIG_TOLERANCE, EIG_MAX_ITER).ok_or(Error::EigSolverFailure)?;
    let values = schur.eigenvalues().ok_or(Error::EigSolverFailure)?;
    Ok(values.iter().all(|v| v.re > STABILITY_EPSILON))
}
