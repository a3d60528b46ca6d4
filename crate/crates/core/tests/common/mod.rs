//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the production linear algebra; the routines are
//! deliberately textbook so they can be checked by eye.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use optomech::{build_full_matrix, stability, EffectiveParams, LinearModel, Matrix6c, SystemParams};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Figure regime: Δ′ = ω_m = 10γ, J = |G_a| = |G_b| = γ/2, all dampings γ.
pub fn optimal_point(theta: f64) -> (EffectiveParams, SystemParams) {
    (EffectiveParams::with_phase(10.0, 10.0, 0.5, 0.5, theta), SystemParams::default())
}

/// Gauss–Jordan inverse with partial pivoting on a row-major `Vec<Vec<C>>`.
pub fn gauss_jordan_inverse(a: &[Vec<C>]) -> Vec<Vec<C>> {
    let n = a.len();
    let mut aug: Vec<Vec<C>> = a
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let mut v = row.clone();
            v.extend((0..n).map(|k| if k == r { c(1.0, 0.0) } else { c(0.0, 0.0) }));
            v
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| aug[x][col].norm().total_cmp(&aug[y][col].norm()))
            .unwrap();
        aug.swap(col, pivot);
        let p = aug[col][col];
        for v in aug[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = aug[r][col];
                for k in 0..2 * n {
                    let sub = f * aug[col][k];
                    aug[r][k] -= sub;
                }
            }
        }
    }
    aug.into_iter().map(|row| row[n..].to_vec()).collect()
}

/// `Γ (M − iω)⁻¹ Γ − I` through the Gauss–Jordan inverse.
pub fn oracle_scattering(model: &LinearModel, omega: f64) -> Vec<Vec<C>> {
    let n = 6;
    let shifted: Vec<Vec<C>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|k| model.m[(r, k)] - if r == k { c(0.0, omega) } else { c(0.0, 0.0) })
                .collect()
        })
        .collect();
    let inv = gauss_jordan_inverse(&shifted);
    let g = model.gamma_sqrt;
    (0..n)
        .map(|r| {
            (0..n)
                .map(|k| inv[r][k] * g[r] * g[k] - if r == k { c(1.0, 0.0) } else { c(0.0, 0.0) })
                .collect()
        })
        .collect()
}

/// Right-hand side of the linearized Langevin equations for the six
/// fluctuation components, with inputs switched off.
///
/// The creation-operator components obey the Hermitian conjugates of the
/// annihilation equations.
pub fn fluctuation_drift(eff: &EffectiveParams, p: &SystemParams, v: &[C; 6]) -> [C; 6] {
    let i = c(0.0, 1.0);
    let [a, b, cc, ad, bd, cd] = *v;
    let (ga, gb) = (eff.coupling_a, eff.coupling_b);
    let j = p.j;
    let da = c(-p.gamma_a / 2.0, -eff.delta_a_eff) * a - i * ga * (cc + cd) - i * j * b;
    let db = c(-p.gamma_b / 2.0, -eff.delta_b_eff) * b - i * gb * (cc + cd) - i * j * a;
    let dc = c(-p.gamma_m / 2.0, -p.omega_m) * cc - i * (ga * ad + ga.conj() * a) - i * (gb * bd + gb.conj() * b);
    let dad = c(-p.gamma_a / 2.0, eff.delta_a_eff) * ad + i * ga.conj() * (cd + cc) + i * j * bd;
    let dbd = c(-p.gamma_b / 2.0, eff.delta_b_eff) * bd + i * gb.conj() * (cd + cc) + i * j * ad;
    let dcd = c(-p.gamma_m / 2.0, p.omega_m) * cd + i * (ga.conj() * a + ga * ad) + i * (gb.conj() * b + gb * bd);
    [da, db, dc, dad, dbd, dcd]
}

/// `M` read off column by column as `−drift(e_k)`.
pub fn matrix_from_drift(eff: &EffectiveParams, p: &SystemParams) -> Matrix6c {
    let mut m = Matrix6c::zeros();
    for k in 0..6 {
        let mut e = [c(0.0, 0.0); 6];
        e[k] = c(1.0, 0.0);
        let col = fluctuation_drift(eff, p, &e);
        for r in 0..6 {
            m[(r, k)] = -col[r];
        }
    }
    m
}

/// Characteristic polynomial coefficients by Faddeev–LeVerrier, monic,
/// highest degree first: `λ^n + c_1 λ^{n−1} + … + c_n`.
pub fn characteristic_polynomial(m: &Matrix6c) -> Vec<C> {
    let n = 6;
    let mut coeffs = vec![c(1.0, 0.0)];
    let mut mk = Matrix6c::zeros();
    let id = Matrix6c::identity();
    for k in 1..=n {
        mk = m * (mk + id * coeffs[k - 1]);
        let ck = -mk.trace() / k as f64;
        coeffs.push(ck);
    }
    coeffs
}

/// Roots of a monic polynomial by Durand–Kerner iteration.
pub fn durand_kerner(coeffs: &[C]) -> Vec<C> {
    let n = coeffs.len() - 1;
    let eval = |z: C| coeffs.iter().fold(c(0.0, 0.0), |acc, &a| acc * z + a);
    let scale = coeffs.iter().skip(1).map(|a| a.norm()).fold(1.0, f64::max);
    let seed = c(0.4, 0.9) * scale.powf(1.0 / n as f64);
    let mut roots: Vec<C> = (0..n).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..5000 {
        let mut delta = 0.0f64;
        for k in 0..n {
            let mut denom = c(1.0, 0.0);
            for j in 0..n {
                if j != k {
                    denom *= roots[k] - roots[j];
                }
            }
            let step = eval(roots[k]) / denom;
            roots[k] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * scale {
            break;
        }
    }
    roots
}

/// Random figure-like parameters; unstable draws are rejected.
pub fn random_stable_model(rng: &mut ChaCha8Rng) -> (EffectiveParams, SystemParams, LinearModel) {
    loop {
        let p = SystemParams {
            omega_m: rng.gen_range(2.0..15.0),
            j: rng.gen_range(-1.0..1.0),
            gamma_a: rng.gen_range(0.2..2.0),
            gamma_b: rng.gen_range(0.2..2.0),
            gamma_m: rng.gen_range(0.05..2.0),
            ..SystemParams::default()
        };
        let eff = EffectiveParams::new(
            rng.gen_range(1.0..15.0),
            rng.gen_range(1.0..15.0),
            C::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..TAU)),
            C::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..TAU)),
        );
        let model = build_full_matrix(&eff, &p);
        if stability(&model).map(|r| r.stable).unwrap_or(false) {
            return (eff, p, model);
        }
    }
}

/// Mean fields written straight from the steady-state equations at
/// displacement `x = ξ + ξ*`.
pub fn oracle_fields(p: &SystemParams, x: f64) -> (C, C, C) {
    let i = c(0.0, 1.0);
    let ea = C::from_polar(p.eps_a, p.phi_a);
    let eb = C::from_polar(p.eps_b, p.phi_b);
    let ka = c(p.gamma_a / 2.0, 0.0) + i * (p.delta_a + p.g_a * x);
    let kb = c(p.gamma_b / 2.0, 0.0) + i * (p.delta_b + p.g_b * x);
    let den = ka * kb + p.j * p.j;
    let alpha = (kb * ea - i * p.j * eb) / den;
    let beta = (ka * eb - i * p.j * ea) / den;
    let xi = -i * (p.g_a * alpha.norm_sqr() + p.g_b * beta.norm_sqr()) / (c(p.gamma_m / 2.0, 0.0) + i * p.omega_m);
    (alpha, beta, xi)
}

/// Root of `x − 2 Re ξ(x)` closest to zero, by grid scan on `[-range, range]`
/// and bisection.
pub fn oracle_displacement(p: &SystemParams, range: f64, samples: usize) -> f64 {
    let h = |x: f64| x - 2.0 * oracle_fields(p, x).2.re;
    let step = 2.0 * range / (samples - 1) as f64;
    let (mut lo, mut hi) = (0..samples - 1)
        .map(|k| (-range + step * k as f64, -range + step * (k + 1) as f64))
        .filter(|&(lo, hi)| (h(lo) < 0.0) != (h(hi) < 0.0))
        .min_by(|a, b| a.0.abs().min(a.1.abs()).total_cmp(&b.0.abs().min(b.1.abs())))
        .expect("no root bracketed");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (h(lo) < 0.0) == (h(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `SystemParams` driven per the closed-form design for `|G| = γ/2`.
pub fn designed_params(j: f64, theta: f64, compensate_shift: bool) -> SystemParams {
    let mut p = SystemParams {
        j,
        g_a: 1e-3,
        g_b: 1e-3,
        ..SystemParams::default()
    };
    if compensate_shift {
        let (sa, sb) = optomech::model::expected_detuning_shift(0.5, &p);
        p.delta_a -= sa;
        p.delta_b -= sb;
    }
    let d = optomech::design_drives(0.5, theta, &p).unwrap();
    debug_assert_eq!(d.phi_a, FRAC_PI_2);
    d.apply(&p)
}

pub fn max_abs_diff(a: &Matrix6c, b: &[Vec<C>]) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..6 {
        for k in 0..6 {
            worst = worst.max((a[(r, k)] - b[r][k]).norm());
        }
    }
    worst
}
