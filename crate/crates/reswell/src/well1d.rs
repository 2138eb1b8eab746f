//! One-dimensional well of width a: transmission, reflection and the complex
//! poles of the transmission amplitude.
//!
//! Matching at x = -a/2 and x = a/2 gives
//!
//! ```text
//! C/A = e^{-ika} / (cos Ka - i sin Ka (k^2 + K^2) / (2kK))
//! B/C = i sin Ka (K^2 - k^2) / (2kK)
//! ```
//!
//! so C/A has a pole where tan(Ka) = -2ikK/(k^2 + K^2), which in energies is
//! tan(Ka) = -2i [E(E - V0)]^{1/2} / (2E - V0).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::resonance::{BranchOutcome, BranchStatus, Member, ResonancePair};
use crate::spectral::{newton2d, principal_sqrt, WellSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Well1DResult {
    pub e: f64,
    pub t: f64,
    pub r: f64,
    pub x2: f64,
    pub c_over_a: Complex64,
    pub b_over_c: Complex64,
}

fn check_line(well: &WellSpec) -> Result<()> {
    if well.is_3d() {
        return Err(Error::InvalidParameter("well1d needs a line1d well".into()));
    }
    Ok(())
}

/// Denominator of C/A in the dimensionless interior wavenumber w = Ka.
fn denominator(w: Complex64, depth: f64) -> Complex64 {
    let kk = w;
    let k = principal_sqrt(w * w - depth * depth);
    kk.cos() - Complex64::i() * kk.sin() * (k * k + kk * kk) / (2.0 * k * kk)
}

pub fn transmission_reflection(well: &WellSpec, e: f64) -> Result<Well1DResult> {
    check_line(well)?;
    if !(e > well.v0) || !e.is_finite() {
        return Err(Error::Domain(format!("need E > V0 = {}, got {e}", well.v0)));
    }
    let depth = well.depth_param();
    let eps = e / well.energy_unit();
    let (kk, k) = (eps.sqrt(), (eps - depth * depth).sqrt());
    let s = kk.sin();
    let i = Complex64::i();
    let c_over_a = (-i * k).exp() / (kk.cos() - i * s * (k * k + kk * kk) / (2.0 * k * kk));
    let b_over_c = i * s * (kk * kk - k * k) / (2.0 * k * kk);
    let x2 = well.v0 * well.v0 * s * s / (4.0 * e * (e - well.v0));
    Ok(Well1DResult {
        e,
        t: 1.0 / (1.0 + x2),
        r: x2 / (1.0 + x2),
        x2,
        c_over_a,
        b_over_c,
    })
}

/// E(n) = n^2 pi^2 hbar^2 / (2 m a^2) above V0, first n_max of them.
pub fn transmission_resonances_1d(well: &WellSpec, n_max: usize) -> Result<Vec<f64>> {
    if n_max < 1 {
        return Err(Error::InvalidParameter("n_max must be >= 1".into()));
    }
    let eu = well.energy_unit();
    Ok((1..)
        .map(|n: usize| (n as f64 * PI).powi(2) * eu)
        .filter(|&e| e > well.v0)
        .take(n_max)
        .collect())
}

/// |tan(Ka) + 2i sqrt(E) sqrt(E - V0) / (2E - V0)| at complex E.
pub fn pole_residual_1d(well: &WellSpec, e: Complex64) -> f64 {
    let w = principal_sqrt(e / well.energy_unit());
    let root = principal_sqrt(e) * principal_sqrt(e - well.v0);
    (w.tan() + 2.0 * Complex64::i() * root / (2.0 * e - well.v0)).norm()
}

/// 1 / |C/A| at complex E; zero on a pole.
pub fn inverse_transmission_amplitude(well: &WellSpec, e: Complex64) -> f64 {
    let w = principal_sqrt(e / well.energy_unit());
    let k = principal_sqrt(w * w - well.depth_param().powi(2));
    (denominator(w, well.depth_param()) * (Complex64::i() * k).exp()).norm()
}

/// Member of a 1D pair that sits on the pole of C/A.
pub fn pole_member(pair: &ResonancePair) -> Member {
    let p = inverse_transmission_amplitude(&pair.well, pair.energy(Member::Plus));
    let m = inverse_transmission_amplitude(&pair.well, pair.energy(Member::Minus));
    if m <= p {
        Member::Minus
    } else {
        Member::Plus
    }
}

// X^2 + 1 divided by 1 - depth^2/w^2, scaled to be O(1): real coefficients, so
// its roots come in conjugate pairs
fn pair_system(w: Complex64, depth: f64) -> Complex64 {
    let d2 = depth * depth;
    let s = w.sin();
    s * s * (d2 * d2) / (4.0 * w * w * w * w) + 1.0 - d2 / (w * w)
}

fn solve_branch(well: &WellSpec, n: usize) -> BranchStatus {
    let depth = well.depth_param();
    let lo = n as f64 * PI;
    let hi = lo + PI;
    let f = |x: f64, y: f64| {
        let v = pair_system(Complex64::new(x, y), depth);
        (v.re, v.im)
    };
    let mut first = None;
    for y0 in [0.3, 1.0, 2.0, 4.0, 6.0] {
        let status = match newton2d(f, (lo + 0.25 * PI, y0), 1e-14, 100) {
            Ok((x, y)) => {
                if !(x > lo && x < hi) {
                    BranchStatus::OutOfStrip { gamma_mu: x }
                } else if y.abs() < 1e-8 {
                    BranchStatus::Collapsed { gamma_mu: x }
                } else {
                    return BranchStatus::Found(ResonancePair::from_root(well, n, Complex64::new(x, y.abs())));
                }
            }
            Err(e) => BranchStatus::NoConvergence(e),
        };
        if first.is_none() || matches!(status, BranchStatus::Collapsed { .. }) {
            first = Some(status);
        }
    }
    first.unwrap()
}

/// Per-branch search, strips n pi < Re(Ka) < (n + 1) pi for n = 1..=n_max.
pub fn pole_search_1d(well: &WellSpec, n_max: usize) -> Result<Vec<BranchOutcome>> {
    check_line(well)?;
    if n_max < 1 {
        return Err(Error::InvalidParameter("n_max must be >= 1".into()));
    }
    Ok((1..=n_max)
        .map(|n| BranchOutcome {
            n,
            status: solve_branch(well, n),
        })
        .collect())
}

pub fn pole_pairs_1d(well: &WellSpec, n_max: usize) -> Result<Vec<ResonancePair>> {
    Ok(pole_search_1d(well, n_max)?
        .into_iter()
        .filter_map(|o| match o.status {
            BranchStatus::Found(p) => Some(p),
            _ => None,
        })
        .collect())
}
