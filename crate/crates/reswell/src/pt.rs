//! Finite-dimensional antilinear symmetry: intertwiners, spectrum
//! classification, the M(s) family, the two-level V-norm and the
//! Breit-Wigner vs PT propagators.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const MAX_DIM: usize = 64;
/// Singular values of H - lambda I below this times ||H|| count as zero.
pub const JORDAN_TOL: f64 = 1e-8;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    RealSpectrum,
    ConjugatePairs,
    /// Real eigenvalues together with conjugate pairs.
    Mixed,
    /// Some eigenvalue has geometric multiplicity below its algebraic one.
    Exceptional,
    /// Some nonreal eigenvalue has no conjugate partner: no antilinear symmetry.
    Unpaired,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenspace {
    pub value: Complex64,
    pub algebraic: usize,
    /// Columns span the right null space of H - lambda I.
    pub right: CMatrix,
    /// Columns span the null space of (H - lambda I)^dagger.
    pub left: CMatrix,
    /// w with (H - lambda I) w = v for the first right vector v, when defective.
    pub jordan: Option<CVector>,
}

impl Eigenspace {
    pub fn geometric(&self) -> usize {
        self.right.ncols()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteOperator {
    pub matrix: CMatrix,
    pub classification: Classification,
    pub eigen: Vec<Eigenspace>,
}

impl FiniteOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tol(matrix, 1e-10)
    }

    pub fn with_tol(matrix: CMatrix, tol: f64) -> Result<Self> {
        let n = matrix.nrows();
        if n != matrix.ncols() || !(2..=MAX_DIM).contains(&n) {
            return Err(Error::InvalidParameter(format!(
                "need a square matrix of dimension 2..={MAX_DIM}, got {}x{}",
                n,
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
        }
        let (classification, eigen) = analyse(&matrix, tol)?;
        Ok(Self {
            matrix,
            classification,
            eigen,
        })
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Result<Self> {
        let n = rows.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.eigen
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.value, e.algebraic))
            .collect()
    }
}

fn scale_of(m: &CMatrix) -> f64 {
    m.norm().max(f64::MIN_POSITIVE)
}

/// Singular values sorted descending together with V (columns are the right
/// singular vectors in the same order).
fn sorted_svd(m: &CMatrix) -> (Vec<f64>, CMatrix, CMatrix) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.unwrap();
    let v = svd.v_t.unwrap().adjoint();
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let s = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let u = CMatrix::from_fn(u.nrows(), idx.len(), |r, k| u[(r, idx[k])]);
    let v = CMatrix::from_fn(v.nrows(), idx.len(), |r, k| v[(r, idx[k])]);
    (s, u, v)
}

fn null_space(m: &CMatrix, thresh: f64) -> CMatrix {
    let (s, _, v) = sorted_svd(m);
    let n = m.ncols();
    let mut k = s.iter().filter(|&&x| x <= thresh).count() + (n - s.len());
    if k == 0 {
        k = 1;
    }
    v.columns(n - k, k).into_owned()
}

fn schur_eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let schur = Schur::try_new(m.clone(), 1e-15, 10_000).ok_or(Error::NoConvergence {
        iterations: 10_000,
        residual: f64::NAN,
    })?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

fn analyse(m: &CMatrix, tol: f64) -> Result<(Classification, Vec<Eigenspace>)> {
    let n = m.nrows();
    let scale = scale_of(m);
    let mut values = schur_eigenvalues(m)?;
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    // cluster nearly equal eigenvalues (defective ones split like sqrt(eps))
    let cluster_tol = 1e-6 * scale;
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for v in values {
        match clusters.iter_mut().find(|cl| (cl[0] - v).norm() <= cluster_tol) {
            Some(cl) => cl.push(v),
            None => clusters.push(vec![v]),
        }
    }
    let eye = CMatrix::identity(n, n);
    let mut eigen = Vec::new();
    for cl in clusters {
        let mean = cl.iter().sum::<Complex64>() / cl.len() as f64;
        let value = if mean.im.abs() <= tol * scale {
            c(mean.re, 0.0)
        } else {
            mean
        };
        let shifted = m - &eye * value;
        let thresh = JORDAN_TOL * scale;
        let right = null_space(&shifted, thresh);
        let left = null_space(&shifted.adjoint(), thresh);
        let jordan = if right.ncols() < cl.len() {
            let v = right.column(0).into_owned();
            shifted.clone().svd(true, true).solve(&v, thresh).ok()
        } else {
            None
        };
        eigen.push(Eigenspace {
            value,
            algebraic: cl.len(),
            right,
            left,
            jordan,
        });
    }
    let class = classify(&eigen, tol, scale);
    Ok((class, eigen))
}

fn classify(eigen: &[Eigenspace], tol: f64, scale: f64) -> Classification {
    if eigen.iter().any(|e| e.geometric() < e.algebraic) {
        return Classification::Exceptional;
    }
    let is_real = |z: Complex64| z.im.abs() <= tol * scale;
    let nonreal: Vec<&Eigenspace> = eigen.iter().filter(|e| !is_real(e.value)).collect();
    if nonreal.is_empty() {
        return Classification::RealSpectrum;
    }
    let pair_tol = 1e-6 * scale;
    let closed = nonreal.iter().all(|e| {
        nonreal
            .iter()
            .any(|f| (f.value - e.value.conj()).norm() <= pair_tol && f.algebraic == e.algebraic)
    });
    if !closed {
        Classification::Unpaired
    } else if nonreal.len() == eigen.len() {
        Classification::ConjugatePairs
    } else {
        Classification::Mixed
    }
}

/// Re-analyses H with reality tolerance `tol` (relative to ||H||_F).
pub fn classify_spectrum(h: &FiniteOperator, tol: f64) -> Result<Classification> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be > 0".into()));
    }
    Ok(analyse(&h.matrix, tol)?.0)
}

/// ||V H - H^dagger V||_F.
pub fn intertwining_residual(h: &CMatrix, v: &CMatrix) -> f64 {
    (v * h - h.adjoint() * v).norm()
}

/// Orthonormal basis (Frobenius) of {V : V H = H^dagger V}, dense solve on
/// the n^2 x n^2 vectorized system; cost grows like n^6.
pub fn intertwiner_kernel(h: &CMatrix) -> Vec<CMatrix> {
    let n = h.nrows();
    let hd = h.adjoint();
    // vec(V) column-major: index i + j n
    let l = CMatrix::from_fn(n * n, n * n, |row, col| {
        let (i, j) = (row % n, row / n);
        let (p, q) = (col % n, col / n);
        let mut v = c(0.0, 0.0);
        if p == i {
            v += h[(q, j)];
        }
        if q == j {
            v -= hd[(i, p)];
        }
        v
    });
    let (s, _, v) = sorted_svd(&l);
    let smax = s[0].max(scale_of(h));
    let k = s.iter().filter(|&&x| x <= 1e-11 * smax).count();
    (n * n - k..n * n)
        .map(|col| CMatrix::from_fn(n, n, |i, j| v[(i + j * n, col)]))
        .collect()
}

/// Hermitian real basis of the kernel, orthonormal in Re tr(A^dagger B).
fn hermitian_basis(kernel: &[CMatrix]) -> Vec<CMatrix> {
    let mut out: Vec<CMatrix> = Vec::new();
    for b in kernel {
        let bd = b.adjoint();
        for cand in [(b + &bd) * c(0.5, 0.0), (b - &bd) * c(0.0, -0.5)] {
            let mut x = cand;
            for e in &out {
                let proj = e.iter().zip(x.iter()).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
                x -= e * c(proj, 0.0);
            }
            let nrm = x.norm();
            if nrm > 1e-8 && out.len() < kernel.len() {
                out.push(x / c(nrm, 0.0));
            }
        }
    }
    out
}

fn sv_extremes(m: &CMatrix) -> (f64, f64) {
    let s = m.singular_values();
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    (min, max)
}

/// Deterministic coefficient directions on the unit sphere in R^d.
fn search_directions(d: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    for k in 0..d {
        let mut e = vec![0.0; d];
        e[k] = 1.0;
        dirs.push(e);
    }
    if d == 2 {
        for k in 1..180 {
            let th = k as f64 * std::f64::consts::PI / 180.0;
            dirs.push(vec![th.cos(), th.sin()]);
        }
        return dirs;
    }
    // Halton points mapped to [-1, 1]^d
    let primes = [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
    for idx in 1..=2000u32 {
        let v: Vec<f64> = (0..d)
            .map(|k| {
                let b = primes[k % primes.len()] + 2 * (k / primes.len()) as u32 * 59;
                let (mut f, mut r, mut i) = (1.0, 0.0, idx);
                while i > 0 {
                    f /= b as f64;
                    r += f * (i % b) as f64;
                    i /= b;
                }
                2.0 * r - 1.0
            })
            .collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            dirs.push(v.iter().map(|x| x / n).collect());
        }
    }
    dirs
}

/// An invertible Hermitian V with V H = H^dagger V, scaled to unit spectral
/// norm; among real combinations of the kernel basis the one with the
/// largest smallest singular value is kept.
pub fn solve_intertwiner(h: &FiniteOperator) -> Result<FiniteOperator> {
    let kernel = intertwiner_kernel(&h.matrix);
    let basis = hermitian_basis(&kernel);
    if basis.is_empty() {
        return Err(Error::NoInvertibleIntertwiner(0.0));
    }
    let n = h.matrix.nrows();
    let mut best: Option<(f64, CMatrix)> = None;
    for dir in search_directions(basis.len()) {
        let mut v = CMatrix::zeros(n, n);
        for (b, w) in basis.iter().zip(&dir) {
            v += b * c(*w, 0.0);
        }
        let (smin, smax) = sv_extremes(&v);
        let score = smin / smax;
        if best.as_ref().is_none_or(|(s, _)| score > *s * (1.0 + 1e-12)) {
            best = Some((score, v / c(smax, 0.0)));
        }
    }
    let (score, v) = best.unwrap();
    if !(score >= 1e-8) {
        return Err(Error::NoInvertibleIntertwiner(score));
    }
    if intertwining_residual(&h.matrix, &v) > 1e-10 * scale_of(&h.matrix) {
        return Err(Error::NoInvertibleIntertwiner(score));
    }
    FiniteOperator::new(v)
}

/// Distance of `v` (normalized) from the span of the intertwiner kernel.
pub fn kernel_membership(h: &CMatrix, v: &CMatrix) -> f64 {
    let kernel = intertwiner_kernel(h);
    let mut x = v / c(v.norm(), 0.0);
    for k in &kernel {
        let proj: Complex64 = k.iter().zip(x.iter()).map(|(a, b)| a.conj() * b).sum();
        x -= k * proj;
    }
    x.norm()
}

/// [[1 + i, s], [s, 1 - i]].
pub fn m_of_s(s: f64) -> Result<FiniteOperator> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("s must be > 0, got {s}")));
    }
    FiniteOperator::new(CMatrix::from_row_slice(
        2,
        2,
        &[c(1.0, 1.0), c(s, 0.0), c(s, 0.0), c(1.0, -1.0)],
    ))
}

pub fn sigma1() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

/// -i sigma_2 = [[0, -1], [1, 0]].
pub fn minus_i_sigma2() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

/// ||P conj(M) P - M||_F with P = sigma_1 and T complex conjugation.
pub fn pt_commutation_residual(m: &CMatrix) -> f64 {
    let p = sigma1();
    (&p * m.map(|z| z.conj()) * &p - m).norm()
}

/// Solutions of i d/dt psi = M(1) psi that are not eigenvectors:
/// ((1 + t) e^{-it}, -i t e^{-it}) and the eigenmode (1, -i) e^{-it}.
pub fn m1_modes(t: f64) -> [CVector; 2] {
    let ph = Complex64::from_polar(1.0, -t);
    [
        CVector::from_vec(vec![ph * (1.0 + t), ph * c(0.0, -t)]),
        CVector::from_vec(vec![ph, ph * c(0.0, -1.0)]),
    ]
}

pub struct TwoLevel {
    pub u_plus: CVector,
    pub u_minus: CVector,
    pub gram: CMatrix,
    pub closure: CMatrix,
}

/// u_plus = e^{-iE0 t + G t}(1, 0), u_minus = e^{-iE0 t - G t}(0, 1),
/// G_ij = u_i^dagger V u_j over (plus, minus) with V = -i sigma_2.
pub fn two_level_vnorm(e0: f64, gamma: f64, t: f64) -> Result<TwoLevel> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter("Gamma must be > 0".into()));
    }
    let v = minus_i_sigma2();
    let fp = c(gamma * t, -e0 * t).exp();
    let fm = c(-gamma * t, -e0 * t).exp();
    let up = CVector::from_vec(vec![fp, c(0.0, 0.0)]);
    let um = CVector::from_vec(vec![c(0.0, 0.0), fm]);
    let us = [&up, &um];
    let gram = CMatrix::from_fn(2, 2, |i, j| (us[i].adjoint() * &v * us[j])[(0, 0)]);
    let closure = &up * um.adjoint() * &v - &um * up.adjoint() * &v;
    Ok(TwoLevel {
        u_plus: up,
        u_minus: um,
        gram,
        closure,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagatorKind {
    BreitWigner,
    PtPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Contour {
    RealAxis,
    DeformedLower,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorSpec {
    pub e0: f64,
    pub gamma: f64,
    pub kind: PropagatorKind,
    pub contour: Contour,
}

impl PropagatorSpec {
    pub fn new(e0: f64, gamma: f64, kind: PropagatorKind, contour: Contour) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) || !e0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "need finite E0 and Gamma > 0, got {e0}, {gamma}"
            )));
        }
        Ok(Self {
            e0,
            gamma,
            kind,
            contour,
        })
    }
}

pub fn propagator_energy(spec: &PropagatorSpec, e: f64) -> Complex64 {
    let (d, g) = (e - spec.e0, spec.gamma);
    match spec.kind {
        PropagatorKind::BreitWigner => c(1.0, 0.0) / c(d, g),
        PropagatorKind::PtPair => c(0.0, -2.0 * g / (d * d + g * g)),
    }
}

/// 1/(E - (E0 - iG)) - 1/(E - (E0 + iG)).
pub fn pt_two_pole_sum(e0: f64, gamma: f64, e: f64) -> Complex64 {
    c(1.0, 0.0) / c(e - e0, gamma) - c(1.0, 0.0) / c(e - e0, -gamma)
}

fn theta(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// Closed-form time transforms; hbar = 1.
pub fn propagator_time(spec: &PropagatorSpec, t: f64) -> Complex64 {
    let (e0, g) = (spec.e0, spec.gamma);
    let mi = c(0.0, -1.0);
    match (spec.kind, spec.contour) {
        (PropagatorKind::BreitWigner, _) => mi * theta(t) * c(-g * t, -e0 * t).exp(),
        (PropagatorKind::PtPair, Contour::DeformedLower) => {
            let th = theta(t);
            if th == 0.0 {
                return c(0.0, 0.0);
            }
            mi * th * (c(-g * t, -e0 * t).exp() - c(g * t, -e0 * t).exp())
        }
        (PropagatorKind::PtPair, Contour::RealAxis) => mi * c(-g * t.abs(), -e0 * t).exp(),
    }
}

/// (1/2pi) * integral of e^{-iEt} D(E) over [E0 - w G, E0 + w G], trapezoid
/// rule on `points` nodes.
pub fn numerical_time_transform(spec: &PropagatorSpec, t: f64, half_widths: f64, points: usize) -> Complex64 {
    let lo = spec.e0 - half_widths * spec.gamma;
    let hi = spec.e0 + half_widths * spec.gamma;
    let h = (hi - lo) / (points - 1) as f64;
    let mut acc = c(0.0, 0.0);
    for k in 0..points {
        let e = lo + h * k as f64;
        let w = if k == 0 || k == points - 1 { 0.5 } else { 1.0 };
        acc += Complex64::from_polar(w, -e * t) * propagator_energy(spec, e);
    }
    acc * h / (2.0 * std::f64::consts::PI)
}

/// -hbar G / ((E - E0)^2 + G^2).
pub fn time_advance_profile(e0: f64, gamma: f64, e: f64, hbar: f64) -> f64 {
    -hbar * gamma / ((e - e0).powi(2) + gamma * gamma)
}
