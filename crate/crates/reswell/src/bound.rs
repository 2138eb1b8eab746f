//! Real bound states 0 < E < V0 of the three-dimensional s-wave well.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{find_real_root, WellSpec};

/// Relative distance from threshold below which a root counts as a
/// threshold hit instead of a bound state.
pub const THRESHOLD_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundState {
    pub well: WellSpec,
    /// Branch index n; Ka lies in ((n + 1/2) pi, (n + 1) pi).
    pub n: usize,
    pub energy: f64,
    pub big_k: f64,
    pub sigma: f64,
    pub a_coef: f64,
    pub b_coef: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundSpectrum {
    pub states: Vec<BoundState>,
    /// Branch indices whose root sits at E = V0 within [`THRESHOLD_BAND`].
    pub threshold_hits: Vec<usize>,
}

/// Number of branches of tan(Ka) = -K/sigma that intersect (0, V0).
pub fn bound_state_count(well: &WellSpec) -> usize {
    let c = (well.depth_param() / PI - 0.5).ceil();
    if c > 0.0 {
        c as usize
    } else {
        0
    }
}

/// sin(x) sqrt(X^2 - x^2) + x cos(x), proportional to tan(Ka) + K/sigma
/// with the poles of tan removed.
fn bound_condition(x: f64, depth: f64) -> f64 {
    x.sin() * (depth * depth - x * x).max(0.0).sqrt() + x * x.cos()
}

pub fn bound_spectrum(well: &WellSpec) -> Result<BoundSpectrum> {
    if !well.is_3d() {
        return Err(Error::InvalidParameter("bound states need a radial3d well".into()));
    }
    let depth = well.depth_param();
    let mut states = Vec::new();
    let mut threshold_hits = Vec::new();
    for n in 0..bound_state_count(well) {
        let lo = (n as f64 + 0.5) * PI;
        let hi = ((n + 1) as f64 * PI).min(depth);
        if hi <= lo {
            threshold_hits.push(n);
            continue;
        }
        let x = find_real_root(|x| bound_condition(x, depth), lo, hi, 1e-15 * hi)?;
        if (depth * depth - x * x).abs() < THRESHOLD_BAND * depth * depth {
            threshold_hits.push(n);
            continue;
        }
        states.push(make_state(well, n, x));
    }
    // a branch opening exactly at threshold may sit just outside the count
    let next = bound_state_count(well);
    if !threshold_hits.contains(&next) && ((next as f64 + 0.5) * PI - depth).abs() < 0.5 * THRESHOLD_BAND * depth {
        threshold_hits.push(next);
    }
    Ok(BoundSpectrum { states, threshold_hits })
}

pub fn bound_energies(well: &WellSpec) -> Result<Vec<BoundState>> {
    Ok(bound_spectrum(well)?.states)
}

fn make_state(well: &WellSpec, n: usize, x: f64) -> BoundState {
    let depth = well.depth_param();
    let a = well.a;
    let big_k = x / a;
    let sigma = (depth * depth - x * x).sqrt() / a;
    let s = x.sin();
    let norm = 4.0 * PI * (a / 2.0 - (2.0 * x).sin() / (4.0 * big_k) + s * s / (2.0 * sigma));
    let a_coef = 1.0 / norm.sqrt();
    BoundState {
        well: *well,
        n,
        energy: well.energy_unit() * x * x,
        big_k,
        sigma,
        a_coef,
        b_coef: a_coef * s * (sigma * a).exp(),
    }
}

impl BoundState {
    /// tan(Ka) + K/sigma.
    pub fn tan_residual(&self) -> f64 {
        (self.big_k * self.well.a).tan() + self.big_k / self.sigma
    }

    /// |sin(Ka)| - sqrt(E / V0).
    pub fn sine_residual(&self) -> f64 {
        (self.big_k * self.well.a).sin().abs() - (self.energy / self.well.v0).sqrt()
    }

    /// Value and derivative mismatch at r = a, relative to the interior values.
    pub fn matching_residuals(&self) -> (f64, f64) {
        let ka = self.big_k * self.well.a;
        let outer = self.b_coef * (-self.sigma * self.well.a).exp();
        let value = (self.a_coef * ka.sin() - outer).abs() / outer.abs();
        let din = self.a_coef * self.big_k * ka.cos();
        let dout = -self.sigma * outer;
        (value, (din - dout).abs() / din.abs())
    }

    fn exterior_amplitude(&self) -> f64 {
        // B e^{-sigma a}, kept finite for deep wells
        self.a_coef * (self.big_k * self.well.a).sin()
    }
}

/// psi(r) = A sin(Kr)/r inside, B e^{-sigma r}/r outside.
pub fn bound_wavefunction(state: &BoundState, r: f64) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("r must be > 0, got {r}")));
    }
    let a = state.well.a;
    let v = if r < a {
        state.a_coef * (state.big_k * r).sin() / r
    } else {
        state.exterior_amplitude() * (-state.sigma * (r - a)).exp() / r
    };
    Ok(Complex64::new(v, 0.0))
}
