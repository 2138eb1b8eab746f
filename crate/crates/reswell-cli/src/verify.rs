use std::f64::consts::PI;

use num_complex::Complex64;
use reswell::bound::{bound_energies, bound_state_count};
use reswell::exceptional::{exceptional_potentials, pair_collapse_check, ThresholdModes};
use reswell::pt::{
    m_of_s, minus_i_sigma2, propagator_energy, pt_commutation_residual, pt_two_pole_sum, two_level_vnorm, CMatrix,
    Classification, Contour, PropagatorKind, PropagatorSpec,
};
use reswell::pu::{pu_rayleigh_and_residual, PUSpec};
use reswell::resonance::{pt_norm_profile, resonance_pairs, verify_pole_condition};
use reswell::scattering::{find_resonances_real_axis, phase_shift, tan_delta_complex};
use reswell::well1d::{inverse_transmission_amplitude, pole_member, pole_pairs_1d, transmission_reflection};
use reswell::{Result, WellSpec};
use serde_json::{json, Value};

type CheckFn = fn() -> Result<(bool, String)>;

pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn nat(v0: f64) -> Result<WellSpec> {
    WellSpec::natural(v0)
}

fn exceptional_depths() -> Result<(bool, String)> {
    let vs = exceptional_potentials(&nat(1.0)?, 3)?;
    let err = vs
        .iter()
        .zip([1.0, 9.0, 25.0])
        .map(|(v, k)| (v - k * PI * PI / 4.0).abs() / v)
        .fold(0.0, f64::max);
    Ok((err <= f64::EPSILON, format!("{err:.1e}")))
}

fn bound_gate() -> Result<(bool, String)> {
    let t = PI * PI / 4.0;
    let (b, a) = (
        bound_state_count(&nat(t * 0.999_999)?),
        bound_state_count(&nat(t * 1.000_001)?),
    );
    let e = bound_energies(&nat(50.0)?)?;
    let tan = e.iter().map(|s| s.tan_residual()).fold(0.0, f64::max);
    Ok((
        b == 0 && a == 1 && e.len() == 2 && tan < 1e-8,
        format!("{b}/{a} states, tan residual {tan:.1e}"),
    ))
}

fn first_pair() -> Result<(bool, String)> {
    let w = nat(1.0)?;
    let p = resonance_pairs(&w, 1)?[0];
    let x = w.gamma() * p.mu;
    let [r1, r2] = p.system_residuals();
    let m = p.outgoing_member();
    let pole = verify_pole_condition(&w, p.energy(m))?;
    let ok = x > PI && x < 1.5 * PI && r1.max(r2) <= 1e-10 && pole <= 1e-8;
    Ok((
        ok,
        format!(
            "Ka = {x:.8} + {:.8}i, |beta+i| {pole:.1e} at the outgoing member",
            w.gamma() * p.nu
        ),
    ))
}

fn conjugate_pairs() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for v0 in [0.7, 3.0, 11.0, 19.0] {
        for p in resonance_pairs(&nat(v0)?, 4)? {
            let [r1, r2] = p.system_residuals();
            worst = worst.max(r1).max(r2);
        }
    }
    Ok((worst <= 1e-10, format!("{worst:.1e}")))
}

fn pt_norm() -> Result<(bool, String)> {
    let p = resonance_pairs(&nat(1.0)?, 1)?[0];
    let ts = [0.0, 1.0 / p.gamma, 10.0 / p.gamma];
    let mut worst: f64 = 0.0;
    for r in [0.5, 2.0, 7.0] {
        let v = pt_norm_profile(&p, r, &ts)?;
        worst = v.iter().fold(worst, |acc, z| acc.max((z - v[0]).norm() / v[0].norm()));
    }
    Ok((worst <= 1e-10, format!("{worst:.1e}")))
}

fn threshold_modes() -> Result<(bool, String)> {
    let m = ThresholdModes::new(&nat(PI * PI / 4.0)?)?;
    let (s, c) = m.threshold_residuals();
    Ok((
        s.abs() <= 1e-9 && c.abs() <= 1e-9,
        format!("{:.1e}", s.abs().max(c.abs())),
    ))
}

fn collapse() -> Result<(bool, String)> {
    let gs: Vec<f64> = (0..5).map(|i| 0.02 / 2f64.powi(i)).collect();
    let ts: Vec<f64> = (0..=20).map(|i| 0.5 * i as f64).collect();
    let rep = pair_collapse_check(1.0, &gs, &ts)?;
    let worst = rep
        .ratios()
        .iter()
        .map(|(s, d)| ((s - 0.25).abs()).max((d.unwrap_or(f64::NAN) - 0.25).abs()) / 0.25)
        .fold(0.0, f64::max);
    Ok((worst <= 0.1, format!("{:.1}%", 100.0 * worst)))
}

fn scattering() -> Result<(bool, String)> {
    let w = nat(50.0)?;
    let es = find_resonances_real_axis(&w, 50.5, 150.0, 5000)?;
    let mut worst: f64 = 0.0;
    for &e in &es {
        worst = worst.max((phase_shift(&w, e)?.delta.abs() - 0.5 * PI).abs());
    }
    let p = resonance_pairs(&nat(1.0)?, 1)?[0];
    let t = tan_delta_complex(&p.well, p.energy(p.outgoing_member()));
    let ok = !es.is_empty() && worst <= 1e-8 && (t + Complex64::i()).norm() < 1e-6;
    Ok((ok, format!("{} crossings, |delta|-pi/2 {worst:.1e}", es.len())))
}

fn well1d() -> Result<(bool, String)> {
    let w = WellSpec::natural_1d(20.0)?;
    let mut flux: f64 = 0.0;
    for i in 0..1000 {
        let r = transmission_reflection(&w, 20.001 + 0.3 * i as f64)?;
        flux = flux.max((r.t + r.r - 1.0).abs());
    }
    let pole = pole_pairs_1d(&w, 3)?
        .iter()
        .map(|p| inverse_transmission_amplitude(&w, p.energy(pole_member(p))))
        .fold(0.0, f64::max);
    Ok((
        flux <= 1e-12 && pole < 1e-6,
        format!("T+R-1 {flux:.1e}, 1/|C/A| {pole:.1e}"),
    ))
}

fn taxonomy() -> Result<(bool, String)> {
    let cls = [2.0, 0.5, 1.0].map(|s| m_of_s(s).map(|m| m.classification));
    let want = [
        Classification::RealSpectrum,
        Classification::ConjugatePairs,
        Classification::Exceptional,
    ];
    let ok = cls.iter().zip(want).all(|(c, w)| c.as_ref().is_ok_and(|c| *c == w));
    let comm = pt_commutation_residual(&m_of_s(1.0)?.matrix);
    Ok((ok && comm == 0.0, format!("{:?}", cls.map(|c| c.ok()))))
}

fn vnorm() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for t in [0.0, 1.0, 5.0] {
        let tl = two_level_vnorm(1.0, 0.5, t)?;
        worst = worst
            .max((&tl.gram - minus_i_sigma2()).norm())
            .max((&tl.closure - CMatrix::identity(2, 2)).norm());
    }
    Ok((worst <= 1e-12, format!("{worst:.1e}")))
}

fn propagators() -> Result<(bool, String)> {
    let s = PropagatorSpec::new(1.0, 0.3, PropagatorKind::PtPair, Contour::DeformedLower)?;
    let mut worst: f64 = 0.0;
    for i in 0..=100 {
        let e = -4.0 + 0.1 * i as f64;
        let a = pt_two_pole_sum(1.0, 0.3, e);
        worst = worst.max((a - propagator_energy(&s, e)).norm() / a.norm());
    }
    Ok((worst <= 1e-14, format!("{worst:.1e}")))
}

fn pu() -> Result<(bool, String)> {
    let spec = PUSpec::real(1.0, 2.0)?;
    let a = pu_rayleigh_and_residual(&spec, 8.0, 256)?;
    let b = pu_rayleigh_and_residual(&spec, 8.0, 511)?;
    let order = (a.residual / b.residual).ln() / (a.h / b.h).ln();
    Ok((
        (order - 2.0).abs() <= 0.2,
        format!("order {order:.3}, E_est {:.6}", b.e_est.re),
    ))
}

fn covariance() -> Result<(bool, String)> {
    let (base, shallow) = (nat(50.0)?, nat(1.0)?);
    let e0 = bound_energies(&base)?[0].energy;
    let p0 = resonance_pairs(&shallow, 1)?[0];
    let mut worst: f64 = 0.0;
    for l in [0.1, 10.0, 100.0] {
        let w = base.rescaled(l)?;
        worst = worst.max((bound_energies(&w)?[0].energy * l * l - e0).abs() / e0);
        let p = resonance_pairs(&shallow.rescaled(l)?, 1)?[0];
        worst = worst.max((p.gamma * l * l - p0.gamma).abs() / p0.gamma);
    }
    Ok((worst <= 1e-9, format!("{worst:.1e}")))
}

pub fn run_all() -> Vec<Check> {
    let table: [(&'static str, CheckFn); 14] = [
        ("exceptional depths", exceptional_depths),
        ("bound-state gate", bound_gate),
        ("first resonance pair", first_pair),
        ("conjugate pairs", conjugate_pairs),
        ("pt-norm", pt_norm),
        ("threshold modes", threshold_modes),
        ("collapse limit", collapse),
        ("scattering", scattering),
        ("1d well", well1d),
        ("m(s) taxonomy", taxonomy),
        ("two-level v-norm", vnorm),
        ("propagators", propagators),
        ("pu grid", pu),
        ("unit covariance", covariance),
    ];
    table
        .iter()
        .map(|(name, f)| {
            let (pass, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
            Check { name, pass, detail }
        })
        .collect()
}

pub fn render_table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for c in checks {
        out.push_str(&format!(
            "{:<width$}  {}  {}\n",
            c.name,
            if c.pass { "PASS" } else { "FAIL" },
            c.detail
        ));
    }
    out
}

pub fn to_json(checks: &[Check]) -> Value {
    checks
        .iter()
        .map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail}))
        .collect()
}
