//! Threshold modes at the depths where a bound state sits exactly at E = V0.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::resonance::branch_sign;
use crate::spectral::{find_real_root, WellSpec};

/// ||sin(gamma sqrt(V0))| - 1| below this counts as exceptional.
pub const EXCEPTIONAL_BAND: f64 = 1e-9;

/// V0(n) = (2n + 1)^2 pi^2 hbar^2 / (8 m a^2) for n = 0..n_max.
pub fn exceptional_potentials(template: &WellSpec, n_max: usize) -> Result<Vec<f64>> {
    if n_max < 1 {
        return Err(Error::InvalidParameter("n_max must be >= 1".into()));
    }
    let c = PI * PI * template.hbar * template.hbar / (8.0 * template.m * template.a * template.a);
    Ok((0..n_max).map(|n| ((2 * n + 1) as f64).powi(2) * c).collect())
}

/// Depth at which the strip-n resonance pair merges into two real roots:
/// the double root of sin z = s z / X sits where tan z = z.
pub fn pair_collapse_depth(template: &WellSpec, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let lo = n as f64 * PI + 1e-9;
    let hi = (n as f64 + 0.5) * PI - 1e-9;
    let x = find_real_root(|x| x.sin() - x * x.cos(), lo, hi, 1e-15 * hi)?;
    let depth = branch_sign(n) * x / x.sin();
    Ok(depth * depth * template.energy_unit())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdModes {
    pub well: WellSpec,
    pub n: usize,
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
}

impl ThresholdModes {
    /// Snaps `well.v0` to the nearest exceptional depth when it lies inside
    /// [`EXCEPTIONAL_BAND`].
    pub fn new(well: &WellSpec) -> Result<Self> {
        let x = well.depth_param();
        let miss = (x.sin().abs() - 1.0).abs();
        if !(miss < EXCEPTIONAL_BAND) {
            return Err(Error::NotExceptional(miss));
        }
        let n = (x / PI - 0.5).round().max(0.0) as usize;
        let v0 = exceptional_potentials(well, n + 1)?[n];
        let well = well.with_v0(v0)?;
        let s = well.depth_param().sin();
        Ok(Self {
            well,
            n,
            a1: 1.0,
            b1: s,
            a2: 1.0,
            b2: s,
        })
    }

    /// K = sqrt(2 m V0) / hbar.
    pub fn big_k(&self) -> f64 {
        (2.0 * self.well.m * self.well.v0).sqrt() / self.well.hbar
    }

    /// (|sin(Ka)| - 1, cos(Ka)).
    pub fn threshold_residuals(&self) -> (f64, f64) {
        let ka = self.big_k() * self.well.a;
        (ka.sin().abs() - 1.0, ka.cos())
    }

    fn check(&self) -> Result<()> {
        let (s, _) = self.threshold_residuals();
        if s.abs() < EXCEPTIONAL_BAND {
            Ok(())
        } else {
            Err(Error::NotExceptional(s.abs()))
        }
    }

    fn phase(&self, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, -self.well.v0 * t / self.well.hbar)
    }
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("r must be > 0, got {r}")))
    }
}

/// A1 sin(Kr)/r inside, B1/r outside, times e^{-i V0 t / hbar}.
pub fn threshold_mode_psi1(modes: &ThresholdModes, r: f64, t: f64) -> Result<Complex64> {
    modes.check()?;
    check_r(r)?;
    let v = if r < modes.well.a {
        modes.a1 * (modes.big_k() * r).sin() / r
    } else {
        modes.b1 / r
    };
    Ok(modes.phase(t) * v)
}

/// Inside: A2 (sin(Kr) t / r + i m cos(Kr) / sqrt(2 m V0));
/// outside: B2 (t / r - i m (r - a) / hbar); times e^{-i V0 t / hbar}.
pub fn threshold_mode_psi2(modes: &ThresholdModes, r: f64, t: f64) -> Result<Complex64> {
    modes.check()?;
    check_r(r)?;
    let (lin, con) = psi2_parts(modes, r);
    Ok(modes.phase(t) * (lin * t + con))
}

/// psi2 = e^{-i V0 t / hbar} (lin t + con); returns (lin, con).
fn psi2_parts(modes: &ThresholdModes, r: f64) -> (Complex64, Complex64) {
    let w = &modes.well;
    let i = Complex64::i();
    if r < w.a {
        let kr = modes.big_k() * r;
        (
            Complex64::new(modes.a2 * kr.sin() / r, 0.0),
            i * modes.a2 * w.m * kr.cos() / (2.0 * w.m * w.v0).sqrt(),
        )
    } else {
        (
            Complex64::new(modes.b2 / r, 0.0),
            -i * modes.b2 * w.m * (r - w.a) / w.hbar,
        )
    }
}

/// i hbar d(psi2)/dt evaluated analytically.
pub fn psi2_time_derivative(modes: &ThresholdModes, r: f64, t: f64) -> Result<Complex64> {
    modes.check()?;
    check_r(r)?;
    let (lin, con) = psi2_parts(modes, r);
    let i = Complex64::i();
    let h = modes.well.hbar;
    Ok(modes.phase(t) * (modes.well.v0 * (lin * t + con) + i * h * lin))
}

/// (i hbar d psi2/dt) / psi2; a t-dependent value witnesses that psi2 is not
/// an eigenstate of the energy operator.
pub fn psi2_energy_witness(modes: &ThresholdModes, r: f64, t: f64) -> Result<Complex64> {
    Ok(psi2_time_derivative(modes, r, t)? / threshold_mode_psi2(modes, r, t)?)
}

/// The part of psi2 linear in t, divided by t.
pub fn psi2_linear_part(modes: &ThresholdModes, r: f64, t: f64) -> Result<Complex64> {
    modes.check()?;
    check_r(r)?;
    Ok(modes.phase(t) * psi2_parts(modes, r).0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseRow {
    pub gamma: f64,
    /// max over t of |(e^{-i(E0-iG)t} + e^{-i(E0+iG)t})/2 - e^{-iE0 t}|.
    pub sum_error: f64,
    /// max over t of |(e^{-i(E0-iG)t} - e^{-i(E0+iG)t})/(-2G) - t e^{-iE0 t}|;
    /// undefined at G = 0.
    pub diff_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollapseReport {
    pub rows: Vec<CollapseRow>,
}

impl CollapseReport {
    /// error(G_{i+1}) / error(G_i) for the sum and the difference limits.
    pub fn ratios(&self) -> Vec<(f64, Option<f64>)> {
        self.rows
            .windows(2)
            .map(|w| {
                let s = w[1].sum_error / w[0].sum_error;
                let d = match (w[0].diff_error, w[1].diff_error) {
                    (Some(a), Some(b)) => Some(b / a),
                    _ => None,
                };
                (s, d)
            })
            .collect()
    }

    pub fn monotone(&self) -> bool {
        self.rows.windows(2).all(|w| {
            w[1].sum_error <= w[0].sum_error
                && match (w[0].diff_error, w[1].diff_error) {
                    (Some(a), Some(b)) => b <= a,
                    _ => true,
                }
        })
    }
}

/// Convergence of the pair e^{-i(E0 -+ i G)t} onto e^{-iE0 t} and t e^{-iE0 t}.
pub fn pair_collapse_check(e0: f64, gamma_seq: &[f64], t_grid: &[f64]) -> Result<CollapseReport> {
    if gamma_seq.iter().any(|g| !(*g >= 0.0)) || gamma_seq.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter(
            "gamma_seq must be >= 0 and strictly decreasing".into(),
        ));
    }
    if t_grid.is_empty() || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter("t_grid must be finite and non-empty".into()));
    }
    let i = Complex64::i();
    let rows = gamma_seq
        .iter()
        .map(|&g| {
            let mut sum_error: f64 = 0.0;
            let mut diff_error: f64 = 0.0;
            for &t in t_grid {
                let lower = (-i * Complex64::new(e0, -g) * t).exp();
                let upper = (-i * Complex64::new(e0, g) * t).exp();
                let target = (-i * e0 * t).exp();
                sum_error = sum_error.max(((lower + upper) / 2.0 - target).norm());
                if g > 0.0 {
                    diff_error = diff_error.max(((lower - upper) / (-2.0 * g) - t * target).norm());
                }
            }
            CollapseRow {
                gamma: g,
                sum_error,
                diff_error: (g > 0.0).then_some(diff_error),
            }
        })
        .collect();
    Ok(CollapseReport { rows })
}
