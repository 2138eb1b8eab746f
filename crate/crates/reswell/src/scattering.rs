//! Real-axis s-wave scattering above threshold.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{find_real_root, ComplexEnergy, WellSpec};

/// |cos(Ka)| below this raises [`PhaseShiftPoint::near_singular`].
pub const NEAR_SINGULAR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseShiftPoint {
    pub e: f64,
    /// Principal value in (-pi/2, pi/2]; sweeps unwrap it.
    pub delta: f64,
    /// alpha = k a.
    pub alpha: f64,
    /// beta = k tan(Ka) / K; infinite when cos(Ka) = 0.
    pub beta: f64,
    pub near_singular: bool,
}

struct Parts {
    big_k: f64,
    k: f64,
    ka_big: f64,
    alpha: f64,
}

fn parts(well: &WellSpec, e: f64) -> Result<Parts> {
    if !(e > well.v0) || !e.is_finite() {
        return Err(Error::Domain(format!("need E > V0 = {}, got {e}", well.v0)));
    }
    let ce = ComplexEnergy::real(well, e);
    let (big_k, k) = (ce.big_k.re, ce.small_k.re);
    Ok(Parts {
        big_k,
        k,
        ka_big: big_k * well.a,
        alpha: k * well.a,
    })
}

/// Numerators of (sin delta, cos delta) up to a common positive factor.
fn sin_cos_numerators(p: &Parts) -> (f64, f64) {
    let (s, c) = p.ka_big.sin_cos();
    let (sa, ca) = p.alpha.sin_cos();
    (p.k * s * ca - p.big_k * c * sa, p.big_k * c * ca + p.k * s * sa)
}

fn fold(d: f64) -> f64 {
    let mut d = d;
    while d > 0.5 * PI {
        d -= PI;
    }
    while d <= -0.5 * PI {
        d += PI;
    }
    d
}

/// Phase shift from K tan(ka + delta) = k tan(Ka), evaluated through the
/// sine and cosine forms so that cos(Ka) = 0 stays finite.
pub fn phase_shift(well: &WellSpec, e: f64) -> Result<PhaseShiftPoint> {
    let p = parts(well, e)?;
    let (sn, cn) = sin_cos_numerators(&p);
    let c = p.ka_big.cos();
    Ok(PhaseShiftPoint {
        e,
        delta: fold(sn.atan2(cn)),
        alpha: p.alpha,
        beta: p.k * p.ka_big.tan() / p.big_k,
        near_singular: c.abs() < NEAR_SINGULAR,
    })
}

/// f = e^{i delta} sin(delta).
pub fn scattering_amplitude(well: &WellSpec, e: f64) -> Result<Complex64> {
    Ok(amplitude_of(phase_shift(well, e)?.delta))
}

pub fn amplitude_of(delta: f64) -> Complex64 {
    Complex64::from_polar(delta.sin(), delta)
}

/// Unwrapped phase shifts along an increasing energy grid.
pub fn phase_shift_sweep(well: &WellSpec, energies: &[f64]) -> Result<Vec<PhaseShiftPoint>> {
    let mut out: Vec<PhaseShiftPoint> = Vec::with_capacity(energies.len());
    for &e in energies {
        let mut p = phase_shift(well, e)?;
        if let Some(prev) = out.last() {
            let mut d = p.delta;
            while d - prev.delta > 0.5 * PI {
                d -= PI;
            }
            while d - prev.delta < -0.5 * PI {
                d += PI;
            }
            p.delta = d;
        }
        out.push(p);
    }
    Ok(out)
}

/// tan(delta) = (beta - tan alpha) / (beta tan alpha + 1) continued to
/// complex E on the principal branches.
pub fn tan_delta_complex(well: &WellSpec, e: Complex64) -> Complex64 {
    let ce = ComplexEnergy::new(well, e);
    let beta = ce.small_k * (ce.big_k * well.a).tan() / ce.big_k;
    let ta = (ce.small_k * well.a).tan();
    (beta - ta) / (beta * ta + 1.0)
}

/// cos(delta) up to a positive factor; its zeros are the delta = pi/2 points.
fn resonance_function(well: &WellSpec, e: f64) -> f64 {
    match parts(well, e) {
        Ok(p) => {
            let (sn, cn) = sin_cos_numerators(&p);
            cn / sn.hypot(cn)
        }
        Err(_) => f64::NAN,
    }
}

/// Energies in [lo, hi] with delta = pi/2 mod pi.
pub fn find_resonances_real_axis(well: &WellSpec, lo: f64, hi: f64, n_scan: usize) -> Result<Vec<f64>> {
    if !(lo > well.v0) || !(hi > lo) {
        return Err(Error::InvalidParameter(format!("need V0 < lo < hi, got [{lo}, {hi}]")));
    }
    if n_scan < 100 {
        return Err(Error::InvalidParameter("n_scan must be >= 100".into()));
    }
    let de = (hi - lo) / n_scan as f64;
    let mut roots = Vec::new();
    let mut e_prev = lo;
    let mut g_prev = resonance_function(well, lo);
    for i in 1..=n_scan {
        let e = if i == n_scan { hi } else { lo + de * i as f64 };
        let g = resonance_function(well, e);
        if g == 0.0 {
            roots.push(e);
        } else if g_prev * g < 0.0 {
            roots.push(find_real_root(
                |x| resonance_function(well, x),
                e_prev,
                e,
                1e-14 * e.abs(),
            )?);
        }
        e_prev = e;
        g_prev = g;
    }
    Ok(roots)
}

/// |beta tan(alpha) + 1| at a real energy.
pub fn resonance_residual(well: &WellSpec, e: f64) -> Result<f64> {
    let p = phase_shift(well, e)?;
    Ok((p.beta * p.alpha.tan() + 1.0).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreitWignerFit {
    /// Least-squares width of cot(delta) = (E0 - E)/Gamma. Negative for a
    /// falling phase (time advance).
    pub gamma: f64,
    pub e0: f64,
    /// beta0 + 1/beta0 at the input energy, in the local dimensionless units.
    pub gamma_closed_form: f64,
    /// Half-width of the final fit window.
    pub window: f64,
}

/// Fits cot(delta) = (E0 - E)/Gamma on 41 points over |E - e0| <= |Gamma|/2,
/// iterating the window from the initial width `gamma_guess`. Returns
/// (Gamma, E0, window half-width).
pub fn fit_breit_wigner<F: Fn(f64) -> f64>(
    cot_delta: F,
    e0: f64,
    gamma_guess: f64,
    domain_min: f64,
) -> Result<(f64, f64, f64)> {
    const POINTS: usize = 41;
    let mut gamma = gamma_guess;
    for _ in 0..100 {
        let w = 0.5 * gamma.abs();
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::FitFailed(format!("bad width {gamma}")));
        }
        if e0 - w <= domain_min {
            return Err(Error::FitFailed(format!(
                "window [{}, {}] reaches E <= {domain_min}",
                e0 - w,
                e0 + w
            )));
        }
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..POINTS {
            let x = w * (-1.0 + 2.0 * i as f64 / (POINTS - 1) as f64);
            let y = cot_delta(e0 + x);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let n = POINTS as f64;
        let c1 = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let c0 = (sy - c1 * sx) / n;
        let next = -1.0 / c1;
        if !next.is_finite() {
            return Err(Error::FitFailed("non-finite slope".into()));
        }
        let done = (next - gamma).abs() <= 1e-12 * next.abs();
        gamma = next;
        if done {
            return Ok((gamma, e0 - c0 / c1, w));
        }
    }
    Err(Error::FitFailed("window iteration did not settle".into()))
}

/// Breit-Wigner width at a real-axis resonance.
pub fn breit_wigner_width(well: &WellSpec, e0: f64) -> Result<BreitWignerFit> {
    let p = phase_shift(well, e0)?;
    let slope = delta_derivative(&|e| phase_shift(well, e).map(|p| p.delta), e0, 1e-4 * e0.abs().max(1.0))?;
    let cot = |e: f64| match parts(well, e) {
        Ok(p) => {
            let (sn, cn) = sin_cos_numerators(&p);
            cn / sn
        }
        Err(_) => f64::NAN,
    };
    let (gamma, e0_fit, window) = fit_breit_wigner(cot, e0, 1.0 / slope, well.v0)?;
    Ok(BreitWignerFit {
        gamma,
        e0: e0_fit,
        gamma_closed_form: p.beta + 1.0 / p.beta,
        window,
    })
}

fn wrapped_diff(a: f64, b: f64) -> f64 {
    fold(a - b)
}

fn central<F: Fn(f64) -> Result<f64>>(delta: &F, e: f64, h: f64) -> Result<f64> {
    Ok(wrapped_diff(delta(e + h)?, delta(e - h)?) / (2.0 * h))
}

/// d delta / dE by central differences with one Richardson step.
pub fn delta_derivative<F: Fn(f64) -> Result<f64>>(delta: &F, e: f64, h: f64) -> Result<f64> {
    let d1 = central(delta, e, h)?;
    let d2 = central(delta, e, 0.5 * h)?;
    Ok((4.0 * d2 - d1) / 3.0)
}

/// hbar d delta / dE.
pub fn wigner_time_delay(well: &WellSpec, e: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) || !(e - h > well.v0) {
        return Err(Error::Domain(format!("need h > 0 and E - h > V0, got E={e}, h={h}")));
    }
    Ok(well.hbar * delta_derivative(&|x| phase_shift(well, x).map(|p| p.delta), e, h)?)
}

/// hbar Gamma / ((E - E0)^2 + Gamma^2).
pub fn delay_profile(e0: f64, gamma: f64, e: f64, hbar: f64) -> f64 {
    hbar * gamma / ((e - e0).powi(2) + gamma * gamma)
}
