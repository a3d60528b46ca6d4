//! Physical parameters, the classical steady state and the effective
//! linearized couplings of the two-cavity / one-membrane system.
//!
//! All rates, detunings and frequencies are expressed in units of a single
//! reference damping rate `γ`; nothing here carries SI units.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default tolerance on the relative steady-state residual.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
/// Default iteration cap for the damped displacement iteration.
pub const DEFAULT_MAX_ITER: usize = 10_000;
/// Under-relaxation factor of the displacement iteration.
pub const DAMPING: f64 = 0.5;

/// Rates of the driven Hamiltonian in the frame rotating with the drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// `Δ_a = ω_a − ω_d`.
    pub delta_a: f64,
    /// `Δ_b = ω_b − ω_d`.
    pub delta_b: f64,
    pub omega_m: f64,
    /// Optical–optical tunnelling rate, taken real.
    pub j: f64,
    pub g_a: f64,
    pub g_b: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub gamma_m: f64,
    pub eps_a: f64,
    pub eps_b: f64,
    pub phi_a: f64,
    pub phi_b: f64,
}

impl Default for SystemParams {
    /// Figure regime: `ω_m = Δ_a = Δ_b = 10`, `J = 0.5`, all dampings 1, undriven.
    fn default() -> Self {
        Self {
            delta_a: 10.0,
            delta_b: 10.0,
            omega_m: 10.0,
            j: 0.5,
            g_a: 0.0,
            g_b: 0.0,
            gamma_a: 1.0,
            gamma_b: 1.0,
            gamma_m: 1.0,
            eps_a: 0.0,
            eps_b: 0.0,
            phi_a: 0.0,
            phi_b: 0.0,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("delta_a", self.delta_a),
            ("delta_b", self.delta_b),
            ("omega_m", self.omega_m),
            ("J", self.j),
            ("g_a", self.g_a),
            ("g_b", self.g_b),
            ("gamma_a", self.gamma_a),
            ("gamma_b", self.gamma_b),
            ("gamma_m", self.gamma_m),
            ("eps_a", self.eps_a),
            ("eps_b", self.eps_b),
            ("phi_a", self.phi_a),
            ("phi_b", self.phi_b),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(invalid(name, format!("must be finite, got {value}")));
            }
        }
        for (name, value) in [
            ("gamma_a", self.gamma_a),
            ("gamma_b", self.gamma_b),
            ("gamma_m", self.gamma_m),
            ("omega_m", self.omega_m),
        ] {
            if value <= 0.0 {
                return Err(invalid(name, format!("must be positive, got {value}")));
            }
        }
        for (name, value) in [("eps_a", self.eps_a), ("eps_b", self.eps_b)] {
            if value < 0.0 {
                return Err(invalid(name, format!("must be non-negative, got {value}")));
            }
        }
        Ok(())
    }

    /// Complex drive amplitudes `ε e^{iφ}` of modes a and b.
    pub fn drives(&self) -> (Complex64, Complex64) {
        (
            Complex64::from_polar(self.eps_a, self.phi_a),
            Complex64::from_polar(self.eps_b, self.phi_b),
        )
    }

    pub fn max_damping(&self) -> f64 {
        self.gamma_a.max(self.gamma_b).max(self.gamma_m)
    }
}

fn invalid(name: &'static str, reason: String) -> Error {
    Error::InvalidParameter { name, reason }
}

/// Mean amplitudes `(α, β, ξ)` of the three modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub xi: Complex64,
    /// Relative max-norm residual of the three mean-field equations.
    pub residual: f64,
    pub iterations: usize,
}

impl SteadyState {
    /// Static mechanical displacement `ξ + ξ*`.
    pub fn displacement(&self) -> f64 {
        2.0 * self.xi.re
    }
}

/// Optical mean fields for a prescribed displacement `x = ξ + ξ*`.
fn optical_fields(p: &SystemParams, x: f64) -> (Complex64, Complex64) {
    let (drive_a, drive_b) = p.drives();
    let la = Complex64::new(p.gamma_a / 2.0, p.delta_a + p.g_a * x);
    let lb = Complex64::new(p.gamma_b / 2.0, p.delta_b + p.g_b * x);
    let i_j = Complex64::new(0.0, p.j);
    let det = la * lb + p.j * p.j;
    let alpha = (lb * drive_a - i_j * drive_b) / det;
    let beta = (la * drive_b - i_j * drive_a) / det;
    (alpha, beta)
}

/// Mechanical mean field sourced by the optical intensities.
fn mechanical_field(p: &SystemParams, alpha: Complex64, beta: Complex64) -> Complex64 {
    let force = p.g_a * alpha.norm_sqr() + p.g_b * beta.norm_sqr();
    Complex64::new(0.0, -force) / Complex64::new(p.gamma_m / 2.0, p.omega_m)
}

/// Mean fields generated by displacement `x`: `(α(x), β(x), ξ(α(x), β(x)))`.
pub fn fields_at_displacement(p: &SystemParams, x: f64) -> (Complex64, Complex64, Complex64) {
    let (alpha, beta) = optical_fields(p, x);
    (alpha, beta, mechanical_field(p, alpha, beta))
}

/// Displacement map `x ↦ ξ(x) + ξ(x)*`; steady states are its fixed points.
pub fn displacement_map(p: &SystemParams, x: f64) -> f64 {
    2.0 * fields_at_displacement(p, x).2.re
}

/// Relative residual of a candidate `(α, β, ξ)`, with `Δ′` rebuilt from `ξ`.
///
/// Normalised by `max(|α|, |β|, 1)`.
pub fn steady_state_residual(
    p: &SystemParams,
    alpha: Complex64,
    beta: Complex64,
    xi: Complex64,
) -> f64 {
    let (alpha_rhs, beta_rhs) = optical_fields(p, 2.0 * xi.re);
    let xi_rhs = mechanical_field(p, alpha, beta);
    let scale = alpha.norm().max(beta.norm()).max(1.0);
    (alpha - alpha_rhs)
        .norm()
        .max((beta - beta_rhs).norm())
        .max((xi - xi_rhs).norm())
        / scale
}

/// Solves the self-consistent mean-field equations.
///
/// The circular dependence between the detuning shift and the mechanical
/// mean field only runs through the real displacement `x = ξ + ξ*`, so the
/// problem is the scalar fixed point `x = f(x)`. It is iterated from `x = 0`
/// with under-relaxation [`DAMPING`], which selects the branch continuously
/// connected to zero displacement when the system is multistable.
pub fn solve_steady_state(p: &SystemParams, tol: f64, max_iter: usize) -> Result<SteadyState> {
    p.validate()?;
    if !(tol > 0.0) {
        return Err(invalid("tol", format!("must be positive, got {tol}")));
    }
    let mut x = 0.0;
    let mut residual = f64::INFINITY;
    for iteration in 0..=max_iter {
        let (alpha, beta, xi) = fields_at_displacement(p, x);
        residual = steady_state_residual(p, alpha, beta, xi);
        if residual <= tol {
            return Ok(SteadyState {
                alpha,
                beta,
                xi,
                residual,
                iterations: iteration,
            });
        }
        if !residual.is_finite() {
            break;
        }
        x = (1.0 - DAMPING) * x + DAMPING * 2.0 * xi.re;
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        last_residual: residual,
    })
}

/// Upper bound on `|x|` over all steady states.
///
/// The optical response matrix is `diag(γ/2) + i·H` with `H` Hermitian, so its
/// inverse has norm at most `2 / min(γ_a, γ_b)` whatever the detunings.
pub fn displacement_bound(p: &SystemParams) -> f64 {
    let gamma_min = p.gamma_a.min(p.gamma_b);
    let photons = 4.0 * (p.eps_a * p.eps_a + p.eps_b * p.eps_b) / (gamma_min * gamma_min);
    let g_max = p.g_a.abs().max(p.g_b.abs());
    2.0 * p.omega_m * g_max * photons
        / (p.gamma_m * p.gamma_m / 4.0 + p.omega_m * p.omega_m)
}

/// Result of scanning `x − f(x)` for bistability.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchScan {
    pub x_min: f64,
    pub x_max: f64,
    pub samples: usize,
    /// Number of sign changes of `x − f(x)` on the scan grid.
    pub sign_changes: usize,
    /// Grid intervals `[x_k, x_{k+1}]` that bracket a root.
    pub brackets: Vec<(f64, f64)>,
}

impl BranchScan {
    pub fn is_multistable(&self) -> bool {
        self.sign_changes > 1
    }
}

/// Grid-scans the displacement self-consistency over every admissible `x`.
pub fn scan_steady_state_branches(p: &SystemParams, samples: usize) -> Result<BranchScan> {
    p.validate()?;
    let samples = samples.max(2);
    let bound = displacement_bound(p) * 1.01 + 1e-9;
    let (x_min, x_max) = (-bound, bound);
    let step = (x_max - x_min) / (samples - 1) as f64;
    let mut brackets = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..samples {
        let x = x_min + step * k as f64;
        let h = x - displacement_map(p, x);
        if let Some((x_prev, h_prev)) = prev {
            if (h_prev < 0.0) != (h < 0.0) {
                brackets.push((x_prev, x));
            }
        }
        prev = Some((x, h));
    }
    Ok(BranchScan {
        x_min,
        x_max,
        samples,
        sign_changes: brackets.len(),
        brackets,
    })
}

/// Detunings and couplings of the linearized fluctuation dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveParams {
    /// `Δ′_a`, including the static optomechanical shift.
    pub delta_a_eff: f64,
    pub delta_b_eff: f64,
    /// `G_a = g_a α`.
    pub coupling_a: Complex64,
    /// `G_b = g_b β`.
    pub coupling_b: Complex64,
    /// `arg G_b − arg G_a` in `[0, 2π)`.
    pub theta: f64,
}

impl EffectiveParams {
    pub fn new(delta_a_eff: f64, delta_b_eff: f64, coupling_a: Complex64, coupling_b: Complex64) -> Self {
        Self {
            delta_a_eff,
            delta_b_eff,
            coupling_a,
            coupling_b,
            theta: normalize_phase(coupling_b.arg() - coupling_a.arg()),
        }
    }

    /// Real `G_a = |G_a|` and `G_b = |G_b| e^{iθ}`, the figure parameterisation.
    pub fn with_phase(delta_a_eff: f64, delta_b_eff: f64, mag_a: f64, mag_b: f64, theta: f64) -> Self {
        Self {
            delta_a_eff,
            delta_b_eff,
            coupling_a: Complex64::new(mag_a, 0.0),
            coupling_b: Complex64::from_polar(mag_b, theta),
            theta: normalize_phase(theta),
        }
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn normalize_phase(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

pub fn effective_params(p: &SystemParams, s: &SteadyState) -> EffectiveParams {
    let x = s.displacement();
    let params = EffectiveParams::new(
        p.delta_a + p.g_a * x,
        p.delta_b + p.g_b * x,
        s.alpha * p.g_a,
        s.beta * p.g_b,
    );
    warn_if_weakly_driven(p, s);
    params
}

/// Heuristic check that the fluctuations are small against the mean fields.
fn warn_if_weakly_driven(p: &SystemParams, s: &SteadyState) {
    const MIN_AMPLITUDE: f64 = 10.0;
    for (mode, g, amp) in [("a", p.g_a, s.alpha.norm()), ("b", p.g_b, s.beta.norm())] {
        if g != 0.0 && amp < MIN_AMPLITUDE {
            log::warn!("mode {mode}: |mean amplitude| = {amp:.3} < {MIN_AMPLITUDE}, linearization is questionable");
        }
    }
}

/// Drive amplitudes and phases that approximately realise a target coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveDesign {
    pub eps_a: f64,
    pub eps_b: f64,
    pub phi_a: f64,
    pub phi_b: f64,
}

impl DriveDesign {
    /// Copy of `p` with the designed drives installed.
    pub fn apply(&self, p: &SystemParams) -> SystemParams {
        SystemParams {
            eps_a: self.eps_a,
            eps_b: self.eps_b,
            phi_a: self.phi_a,
            phi_b: self.phi_b,
            ..*p
        }
    }
}

/// Leading-order drive design for `|G_a| = |G_b| = target_g_mag` and phase
/// difference `target_theta`.
///
/// With `Δ′ ≈ ω_m ≫ γ` the cavity response is `α ≈ −i ε e^{iφ} / ω_m`, giving
/// `ε_a = ε_b = |G| ω_m / g` and `φ_a = π/2`, `φ_b = φ_a + θ`. Corrections of
/// order `J/ω_m` and `γ/ω_m` are neglected.
pub fn design_drives(target_g_mag: f64, target_theta: f64, p: &SystemParams) -> Result<DriveDesign> {
    p.validate()?;
    if !(target_g_mag >= 0.0) || !target_g_mag.is_finite() {
        return Err(invalid("target_G", format!("must be non-negative, got {target_g_mag}")));
    }
    if !target_theta.is_finite() {
        return Err(invalid("target_theta", format!("must be finite, got {target_theta}")));
    }
    let g = p.g_a;
    if !(g > 0.0) || (p.g_b - g).abs() > 1e-12 * g {
        return Err(invalid(
            "g_a",
            format!("drive design needs g_a = g_b > 0, got g_a = {}, g_b = {}", p.g_a, p.g_b),
        ));
    }
    let gamma = p.max_damping();
    if p.omega_m < 5.0 * gamma {
        return Err(Error::RegimeViolation(format!(
            "omega_m = {} < 5 * max damping = {}",
            p.omega_m,
            5.0 * gamma
        )));
    }
    for (mode, delta) in [("a", p.delta_a), ("b", p.delta_b)] {
        if (delta - p.omega_m).abs() > gamma {
            log::warn!("detuning of mode {mode} ({delta}) is not close to omega_m = {}", p.omega_m);
        }
    }
    let eps = target_g_mag * p.omega_m / g;
    Ok(DriveDesign {
        eps_a: eps,
        eps_b: eps,
        phi_a: FRAC_PI_2,
        phi_b: FRAC_PI_2 + normalize_phase(target_theta),
    })
}

/// Static detuning shifts `(g_a x, g_b x)` produced once `|G_a| = |G_b| = target_g_mag`.
///
/// Subtracting these from the bare detunings places `Δ′` where the drive
/// design assumes it.
pub fn expected_detuning_shift(target_g_mag: f64, p: &SystemParams) -> (f64, f64) {
    let mut force = 0.0;
    for g in [p.g_a, p.g_b] {
        if g != 0.0 {
            force += target_g_mag * target_g_mag / g;
        }
    }
    let x = -2.0 * p.omega_m * force / (p.gamma_m * p.gamma_m / 4.0 + p.omega_m * p.omega_m);
    (p.g_a * x, p.g_b * x)
}
