//! Input–output scattering, transmission probabilities and noise spectra.
//!
//! `U(ω) = Γ (M − iω)⁻¹ Γ − I` maps input to output fluctuations in the basis
//! documented in [`crate::linearized`].

use nalgebra::{Const, DimMin, Matrix3, SMatrix, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linearized::{LinearModel, RwaModel, CONJUGATE_OFFSET};
use crate::{Matrix3c, Matrix6c};

/// Solves above this 1-norm condition number are reported as singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// `Γ (A − iω)⁻¹ Γ − I` through an LU solve of the columns of `Γ`.
///
/// The condition estimate is `‖A‖₁ ‖A⁻¹‖₁`, with `A⁻¹` recovered from the
/// triangular solves already performed (`X = A⁻¹ Γ`, Γ diagonal).
fn input_output<const N: usize>(
    a: &SMatrix<Complex64, N, N>,
    gamma_sqrt: &SMatrix<f64, N, 1>,
    omega: f64,
) -> Result<SMatrix<Complex64, N, N>>
where
    Const<N>: DimMin<Const<N>, Output = Const<N>>,
{
    let shifted = a - SMatrix::<Complex64, N, N>::identity() * Complex64::new(0.0, omega);
    let gamma = SMatrix::<Complex64, N, N>::from_diagonal(&gamma_sqrt.map(|g| Complex64::new(g, 0.0)));
    let singular = |condition_estimate| Error::SingularAtFrequency {
        omega,
        condition_estimate,
    };
    let solved = shifted
        .lu()
        .solve(&gamma)
        .ok_or_else(|| singular(f64::INFINITY))?;

    let norm_a = one_norm(&shifted);
    let norm_inv = (0..N)
        .map(|c| solved.column(c).iter().map(|z| z.norm()).sum::<f64>() / gamma_sqrt[c])
        .fold(0.0, f64::max);
    let condition = norm_a * norm_inv;
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(singular(condition));
    }
    Ok(gamma * solved - SMatrix::<Complex64, N, N>::identity())
}

fn one_norm<const N: usize>(a: &SMatrix<Complex64, N, N>) -> f64 {
    (0..N)
        .map(|c| a.column(c).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Full 6×6 scattering matrix `U(ω)`.
pub fn scattering_matrix(model: &LinearModel, omega: f64) -> Result<Matrix6c> {
    input_output(&model.m, &model.gamma_sqrt, omega)
}

/// 3×3 scattering matrix of the RWA model.
pub fn rwa_scattering(model: &RwaModel, omega: f64) -> Result<Matrix3c> {
    input_output(&model.m, &model.gamma_sqrt, omega)
}

/// `T_ij = |U_ij|² + |U_i,j+3|²`, rows/columns ordered `(a, b, c)`.
pub fn transmission(u: &Matrix6c) -> Matrix3<f64> {
    Matrix3::from_fn(|r, c| u[(r, c)].norm_sqr() + u[(r, c + CONJUGATE_OFFSET)].norm_sqr())
}

/// `s_i,vac = Σ_k |U_i,k+3|²` over the creation-operator inputs.
pub fn vacuum_spectra(u: &Matrix6c) -> Vector3<f64> {
    Vector3::from_fn(|r, _| {
        (0..3)
            .map(|k| u[(r, k + CONJUGATE_OFFSET)].norm_sqr())
            .sum()
    })
}

/// `S_out = T S_in + S_vac`.
pub fn output_spectra(t: &Matrix3<f64>, s_vac: &Vector3<f64>, s_in: &Vector3<f64>) -> Result<Vector3<f64>> {
    if s_in.iter().any(|s| !(*s >= 0.0)) {
        return Err(Error::InvalidParameter {
            name: "S_in",
            reason: format!("input spectra must be non-negative, got {:?}", s_in.as_slice()),
        });
    }
    Ok(t * s_in + s_vac)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Amplitudes {
    Full(Matrix6c),
    Rwa(Matrix3c),
}

/// Scattering quantities at a single frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringResult {
    pub omega: f64,
    pub amplitudes: Amplitudes,
    pub t: Matrix3<f64>,
    pub s_vac: Vector3<f64>,
}

impl ScatteringResult {
    pub fn from_full(omega: f64, u: Matrix6c) -> Self {
        Self {
            omega,
            t: transmission(&u),
            s_vac: vacuum_spectra(&u),
            amplitudes: Amplitudes::Full(u),
        }
    }

    /// RWA path: `T = |S|²` and no vacuum contribution.
    pub fn from_rwa(omega: f64, s: Matrix3c) -> Self {
        Self {
            omega,
            t: s.map(|z| z.norm_sqr()),
            s_vac: Vector3::zeros(),
            amplitudes: Amplitudes::Rwa(s),
        }
    }

    pub fn is_rwa(&self) -> bool {
        matches!(self.amplitudes, Amplitudes::Rwa(_))
    }

    pub fn output_spectra(&self, s_in: &Vector3<f64>) -> Result<Vector3<f64>> {
        output_spectra(&self.t, &self.s_vac, s_in)
    }
}

/// Per-frequency input spectra `s_v,in(ω)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSpectra {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl InputSpectra {
    pub fn constant(len: usize, s_in: Vector3<f64>) -> Self {
        Self {
            a: vec![s_in[0]; len],
            b: vec![s_in[1]; len],
            c: vec![s_in[2]; len],
        }
    }

    pub fn at(&self, k: usize) -> Vector3<f64> {
        Vector3::new(self.a[k], self.b[k], self.c[k])
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// Uniform grid with inclusive endpoints.
pub fn uniform_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidGrid("count must be at least 1".into()));
    }
    if !min.is_finite() || !max.is_finite() {
        return Err(Error::InvalidGrid(format!("bounds must be finite, got [{min}, {max}]")));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    if !(max > min) {
        return Err(Error::InvalidGrid(format!("need max > min for {count} points, got [{min}, {max}]")));
    }
    let step = (max - min) / (count - 1) as f64;
    let mut grid: Vec<f64> = (0..count).map(|k| min + step * k as f64).collect();
    grid[count - 1] = max;
    Ok(grid)
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty".into()));
    }
    if grid.iter().any(|w| !w.is_finite()) {
        return Err(Error::InvalidGrid("grid contains non-finite frequencies".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Frequency sweep; failed points are kept in place.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub grid: Vec<f64>,
    pub rows: Vec<Result<ScatteringResult>>,
}

impl SweepTable {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.is_err()).count()
    }

    /// Output spectra per row, `None` where the point failed.
    pub fn output_spectra(&self, inputs: &InputSpectra) -> Result<Vec<Option<Vector3<f64>>>> {
        if inputs.len() != self.grid.len() {
            return Err(Error::InvalidGrid(format!(
                "input spectra length {} does not match grid length {}",
                inputs.len(),
                self.grid.len()
            )));
        }
        self.rows
            .iter()
            .enumerate()
            .map(|(k, row)| match row {
                Ok(r) => r.output_spectra(&inputs.at(k)).map(Some),
                Err(_) => Ok(None),
            })
            .collect()
    }
}

fn full_point(model: &LinearModel, omega: f64) -> Result<ScatteringResult> {
    scattering_matrix(model, omega).map(|u| ScatteringResult::from_full(omega, u))
}

fn rwa_point(model: &RwaModel, omega: f64) -> Result<ScatteringResult> {
    rwa_scattering(model, omega).map(|s| ScatteringResult::from_rwa(omega, s))
}

/// Parallel sweep of the full model; rows stay in grid order.
pub fn sweep(model: &LinearModel, grid: &[f64]) -> Result<SweepTable> {
    validate_grid(grid)?;
    let rows = grid.par_iter().map(|&w| full_point(model, w)).collect();
    Ok(SweepTable { grid: grid.to_vec(), rows })
}

pub fn sweep_serial(model: &LinearModel, grid: &[f64]) -> Result<SweepTable> {
    validate_grid(grid)?;
    let rows = grid.iter().map(|&w| full_point(model, w)).collect();
    Ok(SweepTable { grid: grid.to_vec(), rows })
}

pub fn sweep_rwa(model: &RwaModel, grid: &[f64]) -> Result<SweepTable> {
    validate_grid(grid)?;
    let rows = grid.par_iter().map(|&w| rwa_point(model, w)).collect();
    Ok(SweepTable { grid: grid.to_vec(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linearized::{build_full_matrix, build_rwa_matrix};
    use crate::model::{EffectiveParams, SystemParams};
    use std::f64::consts::FRAC_PI_2;

    fn decoupled() -> LinearModel {
        let p = SystemParams {
            j: 0.0,
            gamma_a: 0.7,
            ..SystemParams::default()
        };
        build_full_matrix(&EffectiveParams::with_phase(6.0, 8.0, 0.0, 0.0, 0.0), &p)
    }

    fn optimal(theta: f64) -> (EffectiveParams, SystemParams) {
        (EffectiveParams::with_phase(10.0, 10.0, 0.5, 0.5, theta), SystemParams::default())
    }

    #[test]
    fn resonant_single_port_reflects_fully_inverted() {
        let u = scattering_matrix(&decoupled(), 6.0).unwrap();
        assert!((u[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        let t = transmission(&u);
        assert!((t[(0, 0)] - 1.0).abs() < 1e-14);
        assert_eq!(vacuum_spectra(&u), Vector3::zeros());
    }

    #[test]
    fn far_off_resonance_reflects() {
        let u = scattering_matrix(&decoupled(), 1e6).unwrap();
        assert!((u + Matrix6c::identity()).camax() < 1e-5);
        let (eff, p) = optimal(FRAC_PI_2);
        let u = scattering_matrix(&build_full_matrix(&eff, &p), 1e6).unwrap();
        assert!((u + Matrix6c::identity()).camax() < 1e-5);
    }

    #[test]
    fn total_reflection_transmits_identity() {
        let t = transmission(&(-Matrix6c::identity()));
        assert_eq!(t, Matrix3::identity());
    }

    #[test]
    fn circulator_directionality_at_mechanical_frequency() {
        let (eff, p) = optimal(FRAC_PI_2);
        let t = transmission(&scattering_matrix(&build_full_matrix(&eff, &p), 10.0).unwrap());
        assert!(t[(1, 0)] > 0.96 && t[(0, 1)] < 0.02, "{t}");
        let (eff, p) = optimal(3.0 * FRAC_PI_2);
        let t = transmission(&scattering_matrix(&build_full_matrix(&eff, &p), 10.0).unwrap());
        assert!(t[(0, 1)] > 0.96 && t[(1, 0)] < 0.02, "{t}");
    }

    #[test]
    fn singular_point_is_reported() {
        // No damping and no coupling on the mechanics: a real pole at ω_m.
        let mut model = decoupled();
        model.m[(2, 2)] = Complex64::new(0.0, 10.0);
        model.m[(5, 5)] = Complex64::new(0.0, -10.0);
        match scattering_matrix(&model, 10.0) {
            Err(Error::SingularAtFrequency { omega, condition_estimate }) => {
                assert_eq!(omega, 10.0);
                assert!(condition_estimate > CONDITION_LIMIT);
            }
            other => panic!("expected singular, got {other:?}"),
        }
        let table = sweep(&model, &[9.0, 10.0, 11.0]).unwrap();
        assert_eq!(table.failures(), 1);
        assert!(table.rows[1].is_err());
    }

    #[test]
    fn output_spectra_basics() {
        let (eff, p) = optimal(FRAC_PI_2);
        let r = ScatteringResult::from_full(10.0, scattering_matrix(&build_full_matrix(&eff, &p), 10.0).unwrap());
        assert_eq!(r.output_spectra(&Vector3::zeros()).unwrap(), r.s_vac);
        let out = r.output_spectra(&Vector3::new(1.0, 0.0, 0.0)).unwrap() - r.s_vac;
        assert!((out - Vector3::new(0.0, 1.0, 0.0)).amax() < 0.04, "{out}");
        // Thermal phonons: S_out,a = T_ac n + s_a,vac.
        let n = 3.5;
        let out = r.output_spectra(&Vector3::new(0.0, 0.0, n)).unwrap();
        assert!((out[0] - (r.t[(0, 2)] * n + r.s_vac[0])).abs() < 1e-15);
        assert!(r.output_spectra(&Vector3::new(-1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn grid_construction() {
        assert_eq!(uniform_grid(1.0, 3.0, 3).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(uniform_grid(5.0, 5.0, 1).unwrap(), vec![5.0]);
        assert!(uniform_grid(0.0, 1.0, 0).is_err());
        assert!(uniform_grid(1.0, 1.0, 2).is_err());
        let g = uniform_grid(8.0, 12.0, 801).unwrap();
        assert_eq!(g[400], 10.0);
        assert_eq!(*g.last().unwrap(), 12.0);
        assert!(validate_grid(&[1.0, 1.0]).is_err());
        assert!(validate_grid(&[]).is_err());
    }

    #[test]
    fn single_point_sweep_matches_pointwise() {
        let (eff, p) = optimal(FRAC_PI_2);
        let model = build_full_matrix(&eff, &p);
        let table = sweep(&model, &[10.0]).unwrap();
        assert_eq!(table.rows.len(), 1);
        let direct = ScatteringResult::from_full(10.0, scattering_matrix(&model, 10.0).unwrap());
        assert_eq!(table.rows[0].as_ref().unwrap(), &direct);
    }

    #[test]
    fn rwa_sweep_has_no_vacuum_term() {
        let (eff, p) = optimal(FRAC_PI_2);
        let table = sweep_rwa(&build_rwa_matrix(&eff, &p), &[9.5, 10.0]).unwrap();
        for row in &table.rows {
            let row = row.as_ref().unwrap();
            assert!(row.is_rwa());
            assert_eq!(row.s_vac, Vector3::zeros());
        }
    }
}
