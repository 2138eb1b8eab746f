//! Units, square-root branch conventions and the two root-finding kernels.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Radial3d,
    Line1d,
}

/// Physical parameters of the well. `V(r < a) = 0`, `V(r > a) = v0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellSpec {
    pub v0: f64,
    pub a: f64,
    pub m: f64,
    pub hbar: f64,
    pub geometry: Geometry,
}

impl WellSpec {
    pub fn new(v0: f64, a: f64, m: f64, hbar: f64, geometry: Geometry) -> Result<Self> {
        for (name, v) in [("V0", v0), ("a", a), ("m", m), ("hbar", hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(Self {
            v0,
            a,
            m,
            hbar,
            geometry,
        })
    }

    /// hbar = 1, 2m = 1, a = 1.
    pub fn natural(v0: f64) -> Result<Self> {
        Self::new(v0, 1.0, 0.5, 1.0, Geometry::Radial3d)
    }

    pub fn natural_1d(v0: f64) -> Result<Self> {
        Self::new(v0, 1.0, 0.5, 1.0, Geometry::Line1d)
    }

    pub fn with_v0(&self, v0: f64) -> Result<Self> {
        Self::new(v0, self.a, self.m, self.hbar, self.geometry)
    }

    /// `a -> lambda a`, `V0 -> V0 / lambda^2`.
    pub fn rescaled(&self, lambda: f64) -> Result<Self> {
        Self::new(
            self.v0 / (lambda * lambda),
            self.a * lambda,
            self.m,
            self.hbar,
            self.geometry,
        )
    }

    /// gamma = a sqrt(2m) / hbar.
    pub fn gamma(&self) -> f64 {
        self.a * (2.0 * self.m).sqrt() / self.hbar
    }

    /// hbar^2 / (2 m a^2); energies are `energy_unit * x^2` with `x = K a`.
    pub fn energy_unit(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.m * self.a * self.a)
    }

    /// X = gamma sqrt(V0) = sqrt(V0 / energy_unit).
    pub fn depth_param(&self) -> f64 {
        (self.v0 / self.energy_unit()).sqrt()
    }

    /// Energy for a dimensionless interior wavenumber `w = K a`.
    pub fn energy_of(&self, w: Complex64) -> Complex64 {
        w * w * self.energy_unit()
    }

    pub fn is_3d(&self) -> bool {
        self.geometry == Geometry::Radial3d
    }
}

/// Principal square root: Re >= 0, and Im >= 0 when Re = 0.
///
/// A signed-zero imaginary part is treated as +0 so that negative reals
/// always map to the positive imaginary axis.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    let z = Complex64::new(z.re, if z.im == 0.0 { 0.0 } else { z.im });
    let mut w = z.sqrt();
    if w.re < 0.0 || (w.re == 0.0 && w.im < 0.0) {
        w = -w;
    }
    if w.im == 0.0 {
        w.im = 0.0;
    }
    w
}

/// A complex energy together with its interior (`big_k`) and exterior
/// (`small_k`) wavenumbers on the principal branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEnergy {
    pub value: Complex64,
    /// Outside the well, hbar^2 k^2 / 2m = E - V0.
    pub small_k: Complex64,
    /// Inside the well, hbar^2 K^2 / 2m = E.
    pub big_k: Complex64,
}

impl ComplexEnergy {
    pub fn new(well: &WellSpec, value: Complex64) -> Self {
        let eu = well.energy_unit();
        Self {
            value,
            small_k: principal_sqrt((value - well.v0) / eu) / well.a,
            big_k: principal_sqrt(value / eu) / well.a,
        }
    }

    pub fn real(well: &WellSpec, e: f64) -> Self {
        Self::new(well, Complex64::new(e, 0.0))
    }
}

/// Brent's method on a sign-changing bracket.
///
/// Returns once the bracket is narrower than `tol` or `f` vanishes exactly.
pub fn find_real_root<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be > 0, got {tol}")));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if !fa.is_finite() {
        return Err(Error::NonFinite(a));
    }
    if !fb.is_finite() {
        return Err(Error::NonFinite(b));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::NoSignChange { lo, hi });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..500 {
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::NonFinite(b));
        }
    }
    Ok(b)
}

/// Damped Newton iteration for a real 2x2 system with a central-difference
/// Jacobian.
pub fn newton2d<F>(mut f: F, seed: (f64, f64), tol: f64, max_iter: usize) -> Result<(f64, f64)>
where
    F: FnMut(f64, f64) -> (f64, f64),
{
    let norm = |v: (f64, f64)| v.0.abs().max(v.1.abs());
    let (mut x, mut y) = seed;
    let mut fv = f(x, y);
    if !(fv.0.is_finite() && fv.1.is_finite()) {
        return Err(Error::NonFinite(x));
    }
    for _ in 0..max_iter {
        let r = norm(fv);
        if r <= tol {
            return Ok((x, y));
        }
        let hx = 1e-7_f64.max(1e-7 * x.abs());
        let hy = 1e-7_f64.max(1e-7 * y.abs());
        let (fxp, fxm) = (f(x + hx, y), f(x - hx, y));
        let (fyp, fym) = (f(x, y + hy), f(x, y - hy));
        let j11 = (fxp.0 - fxm.0) / (2.0 * hx);
        let j21 = (fxp.1 - fxm.1) / (2.0 * hx);
        let j12 = (fyp.0 - fym.0) / (2.0 * hy);
        let j22 = (fyp.1 - fym.1) / (2.0 * hy);
        let cond = cond2(j11, j12, j21, j22);
        if !(cond <= 1e12) {
            return Err(Error::SingularJacobian(cond));
        }
        let det = j11 * j22 - j12 * j21;
        let dx = (j22 * fv.0 - j12 * fv.1) / det;
        let dy = (j11 * fv.1 - j21 * fv.0) / det;
        let mut lambda = 1.0;
        let mut next = (x - dx, y - dy);
        let mut fnext = f(next.0, next.1);
        for _ in 0..20 {
            if fnext.0.is_finite() && fnext.1.is_finite() && norm(fnext) < r {
                break;
            }
            lambda *= 0.5;
            next = (x - lambda * dx, y - lambda * dy);
            fnext = f(next.0, next.1);
        }
        if !(fnext.0.is_finite() && fnext.1.is_finite()) {
            return Err(Error::NonFinite(next.0));
        }
        (x, y) = next;
        fv = fnext;
    }
    let r = norm(fv);
    if r <= tol {
        Ok((x, y))
    } else {
        Err(Error::NoConvergence {
            iterations: max_iter,
            residual: r,
        })
    }
}

fn cond2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    // singular values of [[a, b], [c, d]]
    let s = a * a + b * b + c * c + d * d;
    let det = (a * d - b * c).abs();
    let disc = (s * s - 4.0 * det * det).max(0.0).sqrt();
    let smax = ((s + disc) / 2.0).sqrt();
    let smin = if smax > 0.0 { det / smax } else { 0.0 };
    if smin == 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// Adaptive Simpson quadrature of a real integrand.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(&f, a, b, fa, fm, fb, whole, tol, 48)
}
