//! Pais-Uhlenbeck two-frequency oscillator: grid check of the Gaussian
//! eigenfunction of the similarity-transformed Hamiltonian
//!
//! ```text
//! H' = p_x^2 / 2 - i q x + (w1^2 + w2^2) x^2 / 2 + w1^2 w2^2 y^2 / 2
//! psi(y, x) = exp(-S P y^2 / 2 - P y x - S x^2 / 2),  S = w1 + w2, P = w1 w2
//! ```
//!
//! with q the y-momentum, so `-i q x` acts as `-x d/dy`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pt::{CMatrix, FiniteOperator};

const REAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Realization {
    UnequalReal,
    EqualReal,
    ConjugatePair,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PUSpec {
    pub omega1: Complex64,
    pub omega2: Complex64,
    pub realization: Realization,
}

impl PUSpec {
    pub fn new(omega1: Complex64, omega2: Complex64) -> Result<Self> {
        let (s, p) = (omega1 + omega2, omega1 * omega2);
        if s.im.abs() > REAL_TOL * s.norm() || p.im.abs() > REAL_TOL * p.norm() {
            return Err(Error::InvalidParameter(format!(
                "w1 + w2 = {s} and w1 w2 = {p} must be real"
            )));
        }
        if !(s.re > 0.0 && p.re > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "w1 + w2 = {} and w1 w2 = {} must be positive",
                s.re, p.re
            )));
        }
        let real = omega1.im.abs() <= REAL_TOL * s.re && omega2.im.abs() <= REAL_TOL * s.re;
        let realization = if !real {
            Realization::ConjugatePair
        } else if (omega1 - omega2).norm() <= REAL_TOL * s.re {
            Realization::EqualReal
        } else {
            Realization::UnequalReal
        };
        Ok(Self {
            omega1,
            omega2,
            realization,
        })
    }

    pub fn real(w1: f64, w2: f64) -> Result<Self> {
        Self::new(Complex64::new(w1, 0.0), Complex64::new(w2, 0.0))
    }

    /// a +- i b.
    pub fn conjugate(a: f64, b: f64) -> Result<Self> {
        Self::new(Complex64::new(a, b), Complex64::new(a, -b))
    }

    pub fn sum(&self) -> f64 {
        (self.omega1 + self.omega2).re
    }

    pub fn product(&self) -> f64 {
        (self.omega1 * self.omega2).re
    }

    /// Coefficient matrix of the exponent in the (y, x) basis.
    pub fn exponent_form(&self) -> [[f64; 2]; 2] {
        let (s, p) = (self.sum(), self.product());
        [[-0.5 * s * p, -0.5 * p], [-0.5 * p, -0.5 * s]]
    }

    /// Eigenvalues of [`Self::exponent_form`], ascending.
    pub fn exponent_eigenvalues(&self) -> [f64; 2] {
        let [[a, b], [_, d]] = self.exponent_form();
        let m = 0.5 * (a + d);
        let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        [m - r, m + r]
    }

    /// Companion matrix of w^2 - S w + P; its eigenvalues are w1, w2.
    pub fn normal_mode_operator(&self) -> Result<FiniteOperator> {
        let (s, p) = (self.sum(), self.product());
        FiniteOperator::new(CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(s, 0.0),
                Complex64::new(-p, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        ))
    }
}

pub fn pu_wavefunction(spec: &PUSpec, y: f64, x: f64) -> Complex64 {
    let (s, p) = (spec.sum(), spec.product());
    Complex64::new((-0.5 * s * p * y * y - p * y * x - 0.5 * s * x * x).exp(), 0.0)
}

/// Coefficients of p_z^2, p_z x, x^2 and z^2, computed from the complex
/// frequencies: (1/2, 1, (w1^2 + w2^2)/2, -w1^2 w2^2 / 2).
pub fn pu_hamiltonian_coefficients(spec: &PUSpec) -> [Complex64; 4] {
    let (w1, w2) = (spec.omega1, spec.omega2);
    [
        Complex64::new(0.5, 0.0),
        Complex64::new(1.0, 0.0),
        0.5 * (w1 * w1 + w2 * w2),
        -0.5 * w1 * w1 * w2 * w2,
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PuGridResult {
    pub e_est: Complex64,
    /// ||H' psi - E psi|| / ||psi|| over the interior nodes.
    pub residual: f64,
    pub h: f64,
}

/// Applies H' by central differences on an N x N grid over [-L, L]^2.
pub fn pu_rayleigh_and_residual(spec: &PUSpec, extent: f64, points: usize) -> Result<PuGridResult> {
    if points < 256 {
        return Err(Error::InvalidParameter(format!("need N >= 256, got {points}")));
    }
    if !(extent > 0.0 && extent.is_finite()) {
        return Err(Error::InvalidParameter(format!("need L > 0, got {extent}")));
    }
    let n = points;
    let h = 2.0 * extent / (n - 1) as f64;
    let coord = |i: usize| -extent + h * i as f64;
    let (s, p) = (spec.sum(), spec.product());
    let psi_at = |y: f64, x: f64| (-0.5 * s * p * y * y - p * y * x - 0.5 * s * x * x).exp();
    let mut grid = vec![0.0; n * n];
    for iy in 0..n {
        for ix in 0..n {
            grid[iy * n + ix] = psi_at(coord(iy), coord(ix));
        }
    }
    let mut leak: f64 = 0.0;
    for k in 0..n {
        for v in [grid[k], grid[(n - 1) * n + k], grid[k * n], grid[k * n + n - 1]] {
            leak = leak.max(v.abs());
        }
    }
    if leak > 1e-8 {
        return Err(Error::BoundaryLeak(leak));
    }
    let c_x2 = 0.5 * (s * s - 2.0 * p);
    let c_y2 = 0.5 * p * p;
    let mut hpsi = vec![0.0; n * n];
    for iy in 1..n - 1 {
        let y = coord(iy);
        for ix in 1..n - 1 {
            let x = coord(ix);
            let k = iy * n + ix;
            let f = grid[k];
            let dxx = (grid[k + 1] - 2.0 * f + grid[k - 1]) / (h * h);
            let dy = (grid[k + n] - grid[k - n]) / (2.0 * h);
            hpsi[k] = -0.5 * dxx - x * dy + c_x2 * x * x * f + c_y2 * y * y * f;
        }
    }
    let (mut num, mut den) = (0.0, 0.0);
    for iy in 1..n - 1 {
        for ix in 1..n - 1 {
            let k = iy * n + ix;
            num += grid[k] * hpsi[k];
            den += grid[k] * grid[k];
        }
    }
    let e = num / den;
    let mut res = 0.0;
    for iy in 1..n - 1 {
        for ix in 1..n - 1 {
            let k = iy * n + ix;
            res += (hpsi[k] - e * grid[k]).powi(2);
        }
    }
    Ok(PuGridResult {
        e_est: Complex64::new(e, 0.0),
        residual: (res / den).sqrt(),
        h,
    })
}
