//! One PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reswell::bound::{bound_energies, bound_state_count};
use reswell::exceptional::{
    exceptional_potentials, pair_collapse_check, psi2_energy_witness, psi2_time_derivative, threshold_mode_psi1,
    threshold_mode_psi2, ThresholdModes,
};
use reswell::pt::{
    m_of_s, minus_i_sigma2, numerical_time_transform, propagator_energy, propagator_time, pt_commutation_residual,
    pt_two_pole_sum, time_advance_profile, two_level_vnorm, CMatrix, Classification, Contour, PropagatorKind,
    PropagatorSpec,
};
use reswell::pu::{pu_hamiltonian_coefficients, pu_rayleigh_and_residual, PUSpec};
use reswell::resonance::{
    pt_norm_profile, resonance_pairs, resonance_search, verify_pole_condition, BranchStatus, Member,
};
use reswell::scattering::{
    breit_wigner_width, delay_profile, find_resonances_real_axis, phase_shift, wigner_time_delay,
};
use reswell::well1d::{pole_pairs_1d, pole_residual_1d, transmission_reflection, transmission_resonances_1d};
use reswell::{Result, WellSpec};

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

fn nat(v0: f64) -> WellSpec {
    WellSpec::natural(v0).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn grid_count(depth: f64) -> usize {
    let f = |x: f64| x.sin() * (depth * depth - x * x).max(0.0).sqrt() + x * x.cos();
    let n = 200_000;
    let h = depth / n as f64;
    let mut prev = f(h);
    let mut count = 0;
    for i in 2..n {
        let cur = f(h * i as f64);
        if prev.signum() != cur.signum() {
            count += 1;
        }
        prev = cur;
    }
    count
}

fn c1() -> Outcome {
    let w = WellSpec::new(1.7, 0.8, 1.3, 0.9, reswell::Geometry::Radial3d)?;
    let vs = exceptional_potentials(&w, 3)?;
    let base = PI * PI * w.hbar * w.hbar / (8.0 * w.m * w.a * w.a);
    let err = vs
        .iter()
        .zip([1.0, 9.0, 25.0])
        .map(|(v, k)| rel(*v, k * base))
        .fold(0.0, f64::max);
    Ok((err <= f64::EPSILON, format!("max rel err {err:.1e}")))
}

fn c2() -> Outcome {
    let vt = PI * PI / 4.0;
    let below = bound_state_count(&nat(vt * (1.0 - 1e-6)));
    let above = bound_state_count(&nat(vt * (1.0 + 1e-6)));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut mismatches = 0;
    for _ in 0..100 {
        let v0: f64 = rng.gen_range(1e-6..100.0);
        let w = nat(v0);
        let g = grid_count(w.depth_param());
        if bound_state_count(&w) != g || bound_energies(&w)?.len() != g {
            mismatches += 1;
        }
    }
    let ok = below == 0 && above == 1 && mismatches == 0;
    Ok((
        ok,
        format!("below {below}, above {above}, grid mismatches {mismatches}/100"),
    ))
}

fn c3() -> Outcome {
    let w = nat(1.0);
    let p = resonance_pairs(&w, 1)?[0];
    let x = w.gamma() * p.mu;
    let in_strip = x > PI && x < 1.5 * PI;
    let [r1, r2] = p.system_residuals();
    let pole_minus = verify_pole_condition(&w, p.energy(Member::Minus))?;
    let pole_plus = verify_pole_condition(&w, p.energy(Member::Plus))?;
    // K = K1 + i K2, k = k1 + i k2 at the plus member
    let c = w.hbar * w.hbar / (2.0 * w.m);
    let (kk, k) = (p.big_k(Member::Plus), p.small_k(Member::Plus));
    let ids = [
        rel(c * (kk.re * kk.re - kk.im * kk.im), p.e0),
        rel(2.0 * c * kk.re * kk.im, p.gamma),
        rel(c * (k.re * k.re - k.im * k.im), p.e0 - w.v0),
        rel(2.0 * c * k.re * k.im, p.gamma),
    ];
    let id_err = ids.iter().cloned().fold(0.0, f64::max);
    let ok = in_strip && r1 <= 1e-10 && r2 <= 1e-10 && pole_minus <= 1e-8 && pole_plus <= 1e-8 && id_err <= 1e-9;
    Ok((
        ok,
        format!(
            "gamma*mu {x:.6}, residuals {r1:.1e}/{r2:.1e}, |beta+i| minus {pole_minus:.1e} plus {pole_plus:.1e}, identities {id_err:.1e}"
        ),
    ))
}

fn c4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut roots, mut worst) = (0, 0.0f64);
    let mut isolated = 0;
    for _ in 0..20 {
        let v0: f64 = rng.gen_range(0.5..20.0);
        for o in resonance_search(&nat(v0), 4)? {
            if let BranchStatus::Found(p) = o.status {
                roots += 1;
                let [r1, r2] = p.system_residuals();
                worst = worst.max(r1.max(r2));
                if r2 > 1e-10 || p.nu <= 0.0 {
                    isolated += 1;
                }
            }
        }
    }
    Ok((
        roots > 0 && isolated == 0,
        format!("{roots} roots, worst residual {worst:.1e}, isolated {isolated}"),
    ))
}

fn c5() -> Outcome {
    let p = resonance_pairs(&nat(1.0), 1)?[0];
    let ts = [0.0, 1.0 / p.gamma, 10.0 / p.gamma];
    let mut time_err: f64 = 0.0;
    let mut prof = Vec::new();
    for r in [0.3, 0.9, 1.5, 3.0, 10.0] {
        let v = pt_norm_profile(&p, r, &ts)?;
        for z in &v[1..] {
            time_err = time_err.max((z - v[0]).norm() / v[0].norm());
        }
        if r > p.well.a {
            prof.push(v[0] * r * r);
        }
    }
    let space_err = prof
        .iter()
        .map(|z| (z - prof[0]).norm() / prof[0].norm())
        .fold(0.0, f64::max);
    Ok((
        time_err <= 1e-10 && space_err <= 1e-10,
        format!("time {time_err:.1e}, r^2 profile {space_err:.1e}"),
    ))
}

fn radial_laplacian<F: Fn(f64) -> Complex64>(f: &F, r: f64, h: f64) -> Complex64 {
    let (f0, fp, fm) = (f(r), f(r + h), f(r - h));
    (fp - 2.0 * f0 + fm) / (h * h) + (fp - fm) / (h * r)
}

fn c6() -> Outcome {
    let m = ThresholdModes::new(&nat(PI * PI / 4.0))?;
    let w = m.well;
    let c = w.hbar * w.hbar / (2.0 * w.m);
    let h = 1e-4;
    let (mut res1, mut res2): (f64, f64) = (0.0, 0.0);
    for t in [0.0, 1.0, 10.0] {
        let p1 = |r: f64| threshold_mode_psi1(&m, r, t).unwrap();
        let p2 = |r: f64| threshold_mode_psi2(&m, r, t).unwrap();
        let mut r = 0.05;
        while r < 5.0 {
            if (r - w.a).abs() >= 2.0 * h {
                let v = if r < w.a { 0.0 } else { w.v0 };
                let e1 = (w.v0 * p1(r) - (-c * radial_laplacian(&p1, r, h) + v * p1(r))).norm();
                res1 = res1.max(e1 / p1(r).norm().max(1e-3));
                let e2 = (psi2_time_derivative(&m, r, t)? - (-c * radial_laplacian(&p2, r, h) + v * p2(r))).norm();
                res2 = res2.max(e2 / p2(r).norm().max(1.0));
            }
            r += 0.0173;
        }
    }
    let wit = [0.0, 1.0, 10.0].map(|t| psi2_energy_witness(&m, 0.5, t).unwrap());
    let witness_moves = (wit[1] - wit[0]).norm() > 1e-3 && (wit[2] - wit[1]).norm() > 1e-3;
    // analytic values and slopes on both sides of r = a
    let (a, kk) = (w.a, m.big_k());
    let ka = kk * a;
    let (cos_res, sin_res) = (ka.cos().abs(), (m.a1 * ka.sin() - m.b1).abs());
    let d1 = ((m.a1 * (kk * a * ka.cos() - ka.sin()) / (a * a)) - (-m.b1 / (a * a))).abs();
    let d2_con = (m.a2 * w.m * kk * ka.sin() / (2.0 * w.m * w.v0).sqrt() - m.b2 * w.m / w.hbar).abs();
    let v2 = (m.a2 * w.m * ka.cos() / (2.0 * w.m * w.v0).sqrt()).abs() + (m.a2 * ka.sin() - m.b2).abs();
    let matching = [cos_res, sin_res, d1, d2_con, v2].iter().cloned().fold(0.0, f64::max);
    let ok = res1 < 1e-6 && res2 < 1e-6 && witness_moves && matching <= 1e-9;
    Ok((
        ok,
        format!("psi1 {res1:.1e}, psi2 {res2:.1e}, witness varies {witness_moves}, matching {matching:.1e}"),
    ))
}

fn c7() -> Outcome {
    let gs: Vec<f64> = (0..6).map(|i| 0.02 / 2f64.powi(i)).collect();
    let ts: Vec<f64> = (0..=40).map(|i| 0.25 * i as f64).collect();
    let rep = pair_collapse_check(3.0, &gs, &ts)?;
    let mut worst: f64 = 0.0;
    for (s, d) in rep.ratios() {
        worst = worst.max(rel(s, 0.25));
        worst = worst.max(rel(d.unwrap_or(f64::NAN), 0.25));
    }
    Ok((
        worst <= 0.1,
        format!("worst deviation of ratio from 1/4: {:.1}%", 100.0 * worst),
    ))
}

fn scattering_checks(v0: f64, hi: f64) -> Result<(usize, f64, f64)> {
    let w = nat(v0);
    let es = find_resonances_real_axis(&w, v0 * (1.0 + 1e-4), v0 + hi, 40_000)?;
    let (mut dphase, mut dratio): (f64, f64) = (0.0, 0.0);
    for &e0 in &es {
        let d = phase_shift(&w, e0)?.delta;
        dphase = dphase.max((d.abs() - 0.5 * PI).abs());
        let fit = breit_wigner_width(&w, e0)?;
        let dt = wigner_time_delay(&w, e0, 1e-3)?;
        dratio = dratio.max(rel(dt, w.hbar / fit.gamma));
    }
    Ok((es.len(), dphase, dratio))
}

fn c8() -> Outcome {
    let (n1, p1, r1) = scattering_checks(1.0, 400.0)?;
    let (n50, p50, r50) = scattering_checks(50.0, 70.0)?;
    let mut prof: f64 = 0.0;
    for i in 0..=200 {
        let e = 40.0 + 0.1 * i as f64;
        prof = prof.max((time_advance_profile(50.0, 1.5, e, 1.0) + delay_profile(50.0, 1.5, e, 1.0)).abs());
    }
    let ok = p1 <= 1e-8 && r1 <= 0.25 && n50 > 0 && p50 <= 1e-8 && r50 <= 0.25 && prof == 0.0;
    Ok((
        ok,
        format!(
            "V0=1: {n1} crossings; V0=50: {n50} crossings, |delta|-pi/2 {p50:.1e}, delay/(hbar/Gamma_fit)-1 {r50:.2}; profile sum {prof:.1e}"
        ),
    ))
}

fn c9() -> Outcome {
    let w = WellSpec::natural_1d(20.0)?;
    let mut tr: f64 = 0.0;
    for i in 0..10_000 {
        let e = w.v0 * (1.0 + 1e-6) + 0.05 * i as f64;
        let r = transmission_reflection(&w, e)?;
        tr = tr.max((r.t + r.r - 1.0).abs());
    }
    let mut t_exact = true;
    for e in transmission_resonances_1d(&w, 5)? {
        t_exact &= transmission_reflection(&w, e)?.t == 1.0;
    }
    let pairs = pole_pairs_1d(&w, 3)?;
    let (mut rm, mut rp): (f64, f64) = (0.0, 0.0);
    for p in &pairs {
        rm = rm.max(pole_residual_1d(&w, p.energy(Member::Minus)));
        rp = rp.max(pole_residual_1d(&w, p.energy(Member::Plus)));
    }
    let ok = tr <= 1e-12 && t_exact && !pairs.is_empty() && rm <= 1e-9 && rp <= 1e-9;
    Ok((
        ok,
        format!(
            "T+R-1 {tr:.1e}, T=1 exact {t_exact}, {} pairs, residual at E {rm:.1e}, at conj(E) {rp:.1e}",
            pairs.len()
        ),
    ))
}

fn c10() -> Outcome {
    let close = |a: Complex64, b: Complex64| (a - b).norm() < 1e-12;
    let ev = |s: f64| -> Result<Vec<Complex64>> {
        let mut v = m_of_s(s)?.eigenvalues();
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Ok(v)
    };
    let r3 = 3f64.sqrt();
    let two = m_of_s(2.0)?;
    let e2 = ev(2.0)?;
    let ok2 = two.classification == Classification::RealSpectrum
        && close(e2[0], Complex64::new(1.0 - r3, 0.0))
        && close(e2[1], Complex64::new(1.0 + r3, 0.0));
    let half = m_of_s(0.5)?;
    let eh = ev(0.5)?;
    let ok_half = half.classification == Classification::ConjugatePairs
        && close(eh[0], Complex64::new(1.0, -r3 / 2.0))
        && close(eh[1], Complex64::new(1.0, r3 / 2.0));
    let one = m_of_s(1.0)?;
    let sp = &one.eigen[0];
    let v = sp.right.column(0);
    let ratio = v[1] / v[0];
    let ok1 = one.classification == Classification::Exceptional
        && one.eigen.len() == 1
        && sp.geometric() == 1
        && (sp.value - Complex64::new(1.0, 0.0)).norm() < 1e-6
        && (ratio - Complex64::new(0.0, -1.0)).norm() < 1e-6;
    let comm = [0.5, 1.0, 2.0]
        .map(|s| pt_commutation_residual(&m_of_s(s).unwrap().matrix))
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    Ok((
        ok2 && ok_half && ok1 && comm == 0.0,
        format!("s=2 {ok2}, s=1/2 {ok_half}, s=1 {ok1}, PT residual {comm:.1e}"),
    ))
}

fn c11() -> Outcome {
    let want = minus_i_sigma2();
    let (mut g, mut cl): (f64, f64) = (0.0, 0.0);
    for t in [0.0, 1.0, 5.0] {
        let tl = two_level_vnorm(2.0, 0.4, t)?;
        g = g.max((&tl.gram - &want).norm());
        cl = cl.max((&tl.closure - CMatrix::identity(2, 2)).norm());
    }
    Ok((g <= 1e-12 && cl <= 1e-12, format!("gram {g:.1e}, closure {cl:.1e}")))
}

fn c12() -> Outcome {
    let (e0, g) = (2.0, 0.5);
    let pt = PropagatorSpec::new(e0, g, PropagatorKind::PtPair, Contour::RealAxis)?;
    let mut sum_err: f64 = 0.0;
    for i in 0..=1000 {
        let e = e0 - 10.0 + 0.02 * i as f64;
        let a = pt_two_pole_sum(e0, g, e);
        sum_err = sum_err.max((a - propagator_energy(&pt, e)).norm() / a.norm());
    }
    let bw = PropagatorSpec::new(e0, g, PropagatorKind::BreitWigner, Contour::RealAxis)?;
    let t = 1.0 / g;
    let mut quad: f64 = 0.0;
    for (spec, tt) in [(bw, t), (pt, t), (pt, -t)] {
        let q = numerical_time_transform(&spec, tt, 200.0, 1_000_000);
        quad = quad.max((q - propagator_time(&spec, tt)).norm());
    }
    let deformed = PropagatorSpec::new(e0, g, PropagatorKind::PtPair, Contour::DeformedLower)?;
    let zero = [-0.1, -1.0, -10.0]
        .iter()
        .all(|&t| propagator_time(&deformed, t) == Complex64::new(0.0, 0.0));
    Ok((
        sum_err <= 1e-14 && quad <= 1e-3 && zero,
        format!("two-pole {sum_err:.1e}, quadrature {quad:.1e}, D(t<0)=0 {zero}"),
    ))
}

fn c13() -> Outcome {
    let spec = PUSpec::real(1.0, 2.0)?;
    let mut pts = Vec::new();
    for n in [256usize, 512, 1024] {
        let r = pu_rayleigh_and_residual(&spec, 8.0, n)?;
        pts.push((r.h.ln(), r.residual.ln()));
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / 3.0;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / 3.0;
    let slope =
        pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let small = pu_rayleigh_and_residual(&spec, 8.0, 513)?;
    let big = pu_rayleigh_and_residual(&spec, 12.0, 769)?;
    let stable = (small.e_est - big.e_est).norm();
    let coeffs = pu_hamiltonian_coefficients(&PUSpec::conjugate(1.0, 0.5)?);
    let real = coeffs.iter().all(|z| z.im.abs() <= 1e-15 * z.norm().max(1.0));
    let label = small.e_est.re / spec.sum();
    Ok((
        (slope - 2.0).abs() <= 0.2 && stable <= 1e-6 && real,
        format!("slope {slope:.3}, domain shift {stable:.1e}, coefficients real {real}; E_est/(w1+w2) = {label:.4} (reported)"),
    ))
}

fn c14() -> Outcome {
    let mut worst: f64 = 0.0;
    for v0 in [1.0, 50.0] {
        let base = nat(v0);
        let b = bound_energies(&base)?;
        let p = resonance_pairs(&base, 3)?;
        let x = exceptional_potentials(&base, 3)?;
        let s = if v0 > 10.0 {
            find_resonances_real_axis(&base, v0 * 1.0001, v0 + 70.0, 4000)?
        } else {
            vec![]
        };
        for lambda in [1e-1, 1.0, 1e1, 1e2] {
            let w = base.rescaled(lambda)?;
            let l2 = lambda * lambda;
            let bw = bound_energies(&w)?;
            let pw = resonance_pairs(&w, 3)?;
            let xw = exceptional_potentials(&w, 3)?;
            if bw.len() != b.len() || pw.len() != p.len() {
                return Ok((false, format!("count changed at V0={v0}, lambda={lambda}")));
            }
            for (u, v) in b.iter().zip(&bw) {
                worst = worst
                    .max(rel(v.energy * l2, u.energy))
                    .max(rel(v.big_k * lambda, u.big_k));
            }
            for (u, v) in p.iter().zip(&pw) {
                worst = worst
                    .max(rel(v.e0 * l2, u.e0))
                    .max(rel(v.gamma * l2, u.gamma))
                    .max((v.big_k_minus * lambda - u.big_k_minus).norm() / u.big_k_minus.norm())
                    .max((v.small_k_minus * lambda - u.small_k_minus).norm() / u.small_k_minus.norm());
            }
            for (u, v) in x.iter().zip(&xw) {
                worst = worst.max(rel(v * l2, *u));
            }
            if !s.is_empty() {
                let sw = find_resonances_real_axis(&w, w.v0 * 1.0001, w.v0 + 70.0 / l2, 4000)?;
                for (u, v) in s.iter().zip(&sw) {
                    worst = worst.max(rel(v * l2, *u));
                }
            }
        }
    }
    Ok((
        worst <= 1e-9,
        format!("worst relative deviation {worst:.1e} over lambda 0.1..100"),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 14] = [
        ("exceptional potentials", c1),
        ("bound-state gate", c2),
        ("first resonance pair", c3),
        ("conjugate-pair property", c4),
        ("pt-norm time independence", c5),
        ("threshold modes", c6),
        ("collapse limit", c7),
        ("scattering consistency", c8),
        ("1d well", c9),
        ("m(s) taxonomy", c10),
        ("two-level v-norm", c11),
        ("propagators", c12),
        ("pu verification", c13),
        ("unit covariance", c14),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        if !ok {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {detail} [{secs:.2}s]",
            if ok { "PASS" } else { "FAIL" },
            i + 1
        );
    }
    println!("{}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
