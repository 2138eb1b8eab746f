//! Complex-conjugate energy pairs above threshold.
//!
//! With `E = (mu + i nu)^2` and `z = gamma (mu + i nu) = K a`, the analytic
//! continuation of `sin(Ka) = sqrt(E/V0)` reads `sin z = s z / X` with
//! `X = gamma sqrt(V0)`. Splitting into real and imaginary parts gives
//!
//! ```text
//! sin(gamma mu) cosh(gamma nu) = s mu / sqrt(V0)
//! cos(gamma mu) sinh(gamma nu) = s nu / sqrt(V0)
//! ```
//!
//! The sign `s = (-1)^n` picks the square-root branch that actually carries
//! a root in the strip `n pi < gamma mu < (n + 1/2) pi`; with `s = +1` on
//! odd strips the left side has the wrong sign throughout the strip.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{newton2d, ComplexEnergy, WellSpec};

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 100;
/// Roots with gamma nu below this are real roots, not pairs.
const COLLAPSE_NU: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Member {
    /// E0 + i Gamma; time factor e^{-i E0 t + Gamma t}.
    Plus,
    /// E0 - i Gamma; time factor e^{-i E0 t - Gamma t}.
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonancePair {
    pub well: WellSpec,
    pub branch_index: usize,
    pub mu: f64,
    pub nu: f64,
    pub e0: f64,
    pub gamma: f64,
    pub big_k_plus: Complex64,
    pub big_k_minus: Complex64,
    pub small_k_plus: Complex64,
    pub small_k_minus: Complex64,
}

impl ResonancePair {
    /// Builds the pair from the dimensionless root `z = K a` with Im z > 0.
    pub fn from_root(well: &WellSpec, branch_index: usize, z: Complex64) -> Self {
        let g = well.gamma();
        let (mu, nu) = (z.re / g, z.im / g);
        let e_plus = Complex64::new(mu * mu - nu * nu, 2.0 * mu * nu);
        let plus = ComplexEnergy::new(well, e_plus);
        let minus = ComplexEnergy::new(well, e_plus.conj());
        Self {
            well: *well,
            branch_index,
            mu,
            nu,
            e0: e_plus.re,
            gamma: e_plus.im,
            big_k_plus: plus.big_k,
            big_k_minus: minus.big_k,
            small_k_plus: plus.small_k,
            small_k_minus: minus.small_k,
        }
    }

    pub fn energy(&self, member: Member) -> Complex64 {
        match member {
            Member::Plus => Complex64::new(self.e0, self.gamma),
            Member::Minus => Complex64::new(self.e0, -self.gamma),
        }
    }

    pub fn big_k(&self, member: Member) -> Complex64 {
        match member {
            Member::Plus => self.big_k_plus,
            Member::Minus => self.big_k_minus,
        }
    }

    pub fn small_k(&self, member: Member) -> Complex64 {
        match member {
            Member::Plus => self.small_k_plus,
            Member::Minus => self.small_k_minus,
        }
    }

    /// Residuals of the split system at (mu, nu) and at (mu, -nu).
    pub fn system_residuals(&self) -> [f64; 2] {
        [
            system_residual(&self.well, self.branch_index, self.mu, self.nu),
            system_residual(&self.well, self.branch_index, self.mu, -self.nu),
        ]
    }

    /// |tan(gamma mu)/(gamma mu) - tanh(gamma nu)/(gamma nu)|.
    pub fn ratio_law_residual(&self) -> f64 {
        let g = self.well.gamma();
        let (x, y) = (g * self.mu, g * self.nu);
        (x.tan() / x - y.tanh() / y).abs()
    }

    /// The member whose exterior wave e^{ikr}/r satisfies the derivative
    /// matching, i.e. where k tan(Ka)/K = -i on the principal branch.
    pub fn outgoing_member(&self) -> Member {
        let p = verify_pole_condition(&self.well, self.energy(Member::Plus)).unwrap_or(f64::INFINITY);
        let m = verify_pole_condition(&self.well, self.energy(Member::Minus)).unwrap_or(f64::INFINITY);
        if m <= p {
            Member::Minus
        } else {
            Member::Plus
        }
    }
}

/// Sign of the square-root branch that carries the root of strip n.
pub fn branch_sign(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn split_system(x: f64, y: f64, depth: f64, s: f64) -> (f64, f64) {
    (x.sin() * y.cosh() - s * x / depth, x.cos() * y.sinh() - s * y / depth)
}

/// Max-norm residual of the split system at (mu, nu) for strip n.
pub fn system_residual(well: &WellSpec, n: usize, mu: f64, nu: f64) -> f64 {
    let g = well.gamma();
    let (r1, r2) = split_system(g * mu, g * nu, well.depth_param(), branch_sign(n));
    r1.abs().max(r2.abs())
}

#[derive(Debug, Clone, PartialEq)]
pub enum BranchStatus {
    Found(ResonancePair),
    /// Newton landed on a real root: the pair has merged into real solutions.
    Collapsed {
        gamma_mu: f64,
    },
    OutOfStrip {
        gamma_mu: f64,
    },
    NoConvergence(Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchOutcome {
    pub n: usize,
    pub status: BranchStatus,
}

fn solve_branch(well: &WellSpec, n: usize) -> BranchStatus {
    let depth = well.depth_param();
    let s = branch_sign(n);
    let lo = n as f64 * PI;
    let hi = lo + 0.5 * PI;
    let x0 = lo + 0.25 * PI;
    let seeds = [
        (x0, 0.5),
        (x0, (x0 / depth).asinh()),
        (lo + 0.4 * PI, 1.0),
        (x0, 2.0),
        (x0, 4.0),
    ];
    let mut first: Option<BranchStatus> = None;
    for seed in seeds {
        let status = match newton2d(|x, y| split_system(x, y, depth, s), seed, NEWTON_TOL, NEWTON_MAX_ITER) {
            Ok((x, y)) => {
                let y = y.abs();
                if !(x > lo && x < hi) {
                    BranchStatus::OutOfStrip { gamma_mu: x }
                } else if y < COLLAPSE_NU {
                    BranchStatus::Collapsed { gamma_mu: x }
                } else {
                    return BranchStatus::Found(ResonancePair::from_root(well, n, Complex64::new(x, y)));
                }
            }
            Err(e) => BranchStatus::NoConvergence(e),
        };
        let better = matches!(
            (&first, &status),
            (None, _)
                | (Some(BranchStatus::NoConvergence(_)), BranchStatus::Collapsed { .. })
                | (Some(BranchStatus::OutOfStrip { .. }), BranchStatus::Collapsed { .. })
        );
        if better {
            first = Some(status);
        }
    }
    first.unwrap()
}

/// Per-branch search over n = 1..=n_max.
pub fn resonance_search(well: &WellSpec, n_max: usize) -> Result<Vec<BranchOutcome>> {
    if n_max < 1 {
        return Err(Error::InvalidParameter("n_max must be >= 1".into()));
    }
    if !well.is_3d() {
        return Err(Error::InvalidParameter("resonance_pairs needs a radial3d well".into()));
    }
    Ok((1..=n_max)
        .map(|n| BranchOutcome {
            n,
            status: solve_branch(well, n),
        })
        .collect())
}

/// One pair per branch that carries a root with nu > 0; the nu > 0 member is
/// stored and its conjugate is implied.
pub fn resonance_pairs(well: &WellSpec, n_max: usize) -> Result<Vec<ResonancePair>> {
    Ok(resonance_search(well, n_max)?
        .into_iter()
        .filter_map(|o| match o.status {
            BranchStatus::Found(p) => Some(p),
            _ => None,
        })
        .collect())
}

/// |k tan(Ka)/K + i| on the principal branch.
pub fn verify_pole_condition(well: &WellSpec, e: Complex64) -> Result<f64> {
    if e == Complex64::new(well.v0, 0.0) {
        return Err(Error::Domain("E = V0 is the branch point".into()));
    }
    if e == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("E = 0 has K = 0".into()));
    }
    let ce = ComplexEnergy::new(well, e);
    let beta = ce.small_k * (ce.big_k * well.a).tan() / ce.big_k;
    Ok((beta + Complex64::i()).norm())
}

fn member_parts(pair: &ResonancePair, member: Member, t: f64) -> (Complex64, Complex64, Complex64, Complex64) {
    let kk = pair.big_k(member);
    let k = pair.small_k(member);
    let a = pair.well.a;
    let c = (kk * a).sin() * (-Complex64::i() * k * a).exp();
    let time = (-Complex64::i() * pair.energy(member) * t / pair.well.hbar).exp();
    (kk, k, c, time)
}

/// psi(r<a) = A sin(Kr)/r T(t), psi(r>a) = C e^{ikr}/r T(t) with A = 1,
/// C = sin(Ka) e^{-ika} and T(t) = e^{-i E t / hbar}.
///
/// The value is continuous for both members. The radial derivative is
/// continuous only for [`ResonancePair::outgoing_member`]; the other member
/// carries a jump since its true solution would need e^{-ikr}.
pub fn resonance_wavefunction(pair: &ResonancePair, member: Member, r: f64, t: f64) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("r must be > 0, got {r}")));
    }
    let (kk, k, c, time) = member_parts(pair, member, t);
    let v = if r < pair.well.a {
        (kk * r).sin() / r
    } else {
        c * (Complex64::i() * k * r).exp() / r
    };
    Ok(v * time)
}

/// Analytic radial derivative of [`resonance_wavefunction`].
pub fn resonance_wavefunction_dr(pair: &ResonancePair, member: Member, r: f64, t: f64) -> Result<Complex64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("r must be > 0, got {r}")));
    }
    let (kk, k, c, time) = member_parts(pair, member, t);
    let i = Complex64::i();
    let v = if r < pair.well.a {
        (kk * r * (kk * r).cos() - (kk * r).sin()) / (r * r)
    } else {
        c * (i * k * r).exp() * (i * k * r - 1.0) / (r * r)
    };
    Ok(v * time)
}

/// Relative jumps of value and radial derivative across r = a.
pub fn matching_jumps(pair: &ResonancePair, member: Member, t: f64) -> (f64, f64) {
    let a = pair.well.a;
    let (kk, k, c, time) = member_parts(pair, member, t);
    let i = Complex64::i();
    let vin = (kk * a).sin() / a * time;
    let vout = c * (i * k * a).exp() / a * time;
    let din = (kk * a * (kk * a).cos() - (kk * a).sin()) / (a * a) * time;
    let dout = c * (i * k * a).exp() * (i * k * a - 1.0) / (a * a) * time;
    ((vin - vout).norm() / vin.norm(), (din - dout).norm() / din.norm())
}

/// conj(psi_plus(r, t)) psi_minus(r, t) at each requested time.
pub fn pt_norm_profile(pair: &ResonancePair, r: f64, t_samples: &[f64]) -> Result<Vec<Complex64>> {
    if t_samples.len() < 2 {
        return Err(Error::InvalidParameter("need at least two time samples".into()));
    }
    t_samples
        .iter()
        .map(|&t| {
            let p = resonance_wavefunction(pair, Member::Plus, r, t)?;
            let m = resonance_wavefunction(pair, Member::Minus, r, t)?;
            Ok(p.conj() * m)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first(v0: f64) -> ResonancePair {
        resonance_pairs(&WellSpec::natural(v0).unwrap(), 1).unwrap()[0]
    }

    // coarse 2D log-residual scan, then repeated zoom on the best cell
    fn grid_oracle(v0: f64) -> (f64, f64) {
        let x = v0.sqrt();
        let f = |mu: f64, nu: f64| {
            let z = Complex64::new(mu, nu);
            (z.sin() + z / x).norm().ln()
        };
        let (mut mlo, mut mhi, mut nlo, mut nhi) = (PI, 1.5 * PI, 0.0, 3.0);
        let mut n = 2000;
        let mut best = (0.0, 0.0);
        for _ in 0..30 {
            let (dm, dn) = ((mhi - mlo) / n as f64, (nhi - nlo) / n as f64);
            let mut bv = f64::INFINITY;
            for i in 0..=n {
                for j in 0..=n {
                    let (m, v) = (mlo + dm * i as f64, nlo + dn * j as f64);
                    let r = f(m, v);
                    if r < bv {
                        bv = r;
                        best = (m, v);
                    }
                }
            }
            (mlo, mhi) = (best.0 - 2.0 * dm, best.0 + 2.0 * dm);
            (nlo, nhi) = (best.1 - 2.0 * dn, best.1 + 2.0 * dn);
            n = 8;
        }
        best
    }

    #[test]
    fn first_pair_matches_grid_scan() {
        let p = first(1.0);
        let (mu, nu) = grid_oracle(1.0);
        assert!(
            (p.mu - mu).abs() < 1e-7 && (p.nu - nu).abs() < 1e-7,
            "{p:?} vs {mu} {nu}"
        );
    }

    #[test]
    fn first_pair_in_strip() {
        for v0 in [0.3, 1.0, 5.0, 15.0] {
            let p = first(v0);
            assert!(p.mu > PI && p.mu < 1.5 * PI);
        }
    }

    #[test]
    fn known_first_root() {
        let p = first(1.0);
        assert!((p.mu - 4.21239223).abs() < 1e-7);
        assert!((p.nu - 2.250728612).abs() < 1e-8);
    }

    #[test]
    fn conjugate_also_solves() {
        for p in resonance_pairs(&WellSpec::natural(3.0).unwrap(), 4).unwrap() {
            let [a, b] = p.system_residuals();
            assert!(a < 1e-10 && b < 1e-10);
        }
    }

    #[test]
    fn momentum_identities() {
        let w = WellSpec::new(2.0, 1.7, 0.9, 1.3, crate::Geometry::Radial3d).unwrap();
        let c = w.hbar * w.hbar / (2.0 * w.m);
        for p in resonance_pairs(&w, 3).unwrap() {
            let (kk, k) = (p.big_k_plus, p.small_k_plus);
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
            assert!(rel(c * (kk.re * kk.re - kk.im * kk.im), p.e0) < 1e-9);
            assert!(rel(2.0 * c * kk.re * kk.im, p.gamma) < 1e-9);
            assert!(rel(c * (k.re * k.re - k.im * k.im), p.e0 - w.v0) < 1e-9);
            assert!(rel(2.0 * c * k.re * k.im, p.gamma) < 1e-9);
            assert_eq!(p.big_k_minus, p.big_k_plus.conj());
            assert_eq!(p.small_k_minus, p.small_k_plus.conj());
        }
    }

    #[test]
    fn pole_condition_holds_at_outgoing_member_only() {
        for p in resonance_pairs(&WellSpec::natural(1.0).unwrap(), 4).unwrap() {
            assert_eq!(p.outgoing_member(), Member::Minus);
            let m = verify_pole_condition(&p.well, p.energy(Member::Minus)).unwrap();
            assert!(m < 1e-8, "{m}");
            // the conjugate member has k tan(Ka)/K = +i
            let pl = verify_pole_condition(&p.well, p.energy(Member::Plus)).unwrap();
            assert!((pl - 2.0).abs() < 1e-8, "{pl}");
        }
    }

    #[test]
    fn pole_condition_generic_point_is_order_one() {
        let w = WellSpec::natural(1.0).unwrap();
        assert!(verify_pole_condition(&w, Complex64::new(7.3, 0.0)).unwrap() > 0.1);
        assert!(verify_pole_condition(&w, Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn ratio_law() {
        for p in resonance_pairs(&WellSpec::natural(4.0).unwrap(), 4).unwrap() {
            assert!(p.ratio_law_residual() < 1e-9);
        }
    }

    #[test]
    fn deep_well_first_branch_collapses() {
        let out = resonance_search(&WellSpec::natural(50.0).unwrap(), 2).unwrap();
        assert!(matches!(out[0].status, BranchStatus::Collapsed { .. }), "{:?}", out[0]);
        assert!(matches!(out[1].status, BranchStatus::Found(_)));
    }

    #[test]
    fn exterior_growth_and_decay() {
        let p = first(1.0);
        let k2 = p.small_k_plus.im;
        let at = |m, r: f64| resonance_wavefunction(&p, m, r, 0.0).unwrap().norm() * r;
        let gm = (at(Member::Minus, 6.0) / at(Member::Minus, 3.0)).ln() / 3.0;
        let gp = (at(Member::Plus, 6.0) / at(Member::Plus, 3.0)).ln() / 3.0;
        assert!((gm - k2).abs() < 1e-10 && (gp + k2).abs() < 1e-10);
    }

    #[test]
    fn matching_at_edge() {
        let p = first(1.0);
        let (v, d) = matching_jumps(&p, Member::Minus, 0.3);
        assert!(v < 1e-9 && d < 1e-9, "{v} {d}");
        let (v, d) = matching_jumps(&p, Member::Plus, 0.3);
        assert!(v < 1e-9);
        assert!(d > 1e-3, "plus member derivative jump {d}");
    }

    #[test]
    fn finite_difference_schrodinger_residual() {
        let p = first(1.0);
        let w = p.well;
        let h = 1e-4;
        let c = w.hbar * w.hbar / (2.0 * w.m);
        for member in [Member::Minus, Member::Plus] {
            let e = p.energy(member);
            let psi = |r: f64| resonance_wavefunction(&p, member, r, 0.4).unwrap();
            let mut r = 0.05;
            while r < 4.0 {
                if (r - w.a).abs() >= 2.0 * h {
                    let (f0, fp, fm) = (psi(r), psi(r + h), psi(r - h));
                    let lap = (fp - 2.0 * f0 + fm) / (h * h) + (fp - fm) / (h * r);
                    let v = if r < w.a { 0.0 } else { w.v0 };
                    let res = (e * f0 - (-c * lap + v * f0)).norm();
                    assert!(res < 1e-6 * f0.norm(), "{member:?} r={r} res={res}");
                }
                r += 0.0137;
            }
        }
    }

    #[test]
    fn pt_norm_is_time_independent() {
        let p = first(1.0);
        let ts = [0.0, 1.0 / p.gamma, 10.0 / p.gamma];
        for r in [0.5, 1.5, 3.0] {
            let v = pt_norm_profile(&p, r, &ts).unwrap();
            for x in &v[1..] {
                assert!((x - v[0]).norm() < 1e-10 * v[0].norm());
            }
        }
        let g = |r: f64| pt_norm_profile(&p, r, &ts).unwrap()[0].norm() * r * r;
        for r in [1.2, 2.0, 5.0, 9.0] {
            assert!((g(r) - g(1.1)).abs() < 1e-10 * g(1.1));
        }
    }

    #[test]
    fn same_member_product_decays() {
        let p = first(1.0);
        let dt = 0.7;
        let n = |t| resonance_wavefunction(&p, Member::Minus, 2.0, t).unwrap().norm_sqr();
        let ratio = n(dt) / n(0.0);
        assert!((ratio - (-2.0 * p.gamma * dt).exp()).abs() < 1e-12);
    }
}
