use num_complex::Complex64;
use rayon::prelude::*;
use reswell::bound::bound_spectrum;
use reswell::exceptional::exceptional_potentials;
use reswell::pt::{
    intertwining_residual, m_of_s, propagator_time, pt_commutation_residual, solve_intertwiner, CMatrix,
    Classification, Contour, FiniteOperator, PropagatorKind, PropagatorSpec,
};
use reswell::pu::{pu_hamiltonian_coefficients, pu_rayleigh_and_residual, PUSpec, Realization};
use reswell::resonance::{resonance_search, verify_pole_condition, BranchStatus, Member};
use reswell::scattering::{amplitude_of, phase_shift, wigner_time_delay};
use reswell::well1d::{
    inverse_transmission_amplitude, pole_member, pole_residual_1d, pole_search_1d, transmission_reflection,
    transmission_resonances_1d,
};
use reswell::{Geometry, WellSpec};
use serde_json::{json, Value};

use crate::config::{at_least, positive, ContourArg, Kind, RunConfig};
use crate::output::{complex, num};
use crate::CliError;

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

pub struct Output {
    pub data: Value,
    pub notes: Vec<String>,
    pub table: Option<Table>,
}

impl Output {
    fn new(data: Value) -> Self {
        Self {
            data,
            notes: Vec::new(),
            table: None,
        }
    }
}

fn member_name(m: Member) -> &'static str {
    match m {
        Member::Plus => "plus",
        Member::Minus => "minus",
    }
}

fn classification_name(c: Classification) -> &'static str {
    match c {
        Classification::RealSpectrum => "real_spectrum",
        Classification::ConjugatePairs => "conjugate_pairs",
        Classification::Mixed => "mixed",
        Classification::Exceptional => "exceptional",
        Classification::Unpaired => "unpaired",
    }
}

pub fn bound(cfg: &RunConfig) -> Result<Output, CliError> {
    let w = cfg.well(Geometry::Radial3d)?;
    let sp = bound_spectrum(&w)?;
    let rows: Vec<Vec<f64>> = sp
        .states
        .iter()
        .map(|s| vec![s.n as f64, s.energy, s.big_k, s.sigma, s.a_coef, s.b_coef])
        .collect();
    let data = sp
        .states
        .iter()
        .map(|s| {
            json!({
                "n": s.n,
                "E": num(s.energy),
                "K": num(s.big_k),
                "sigma": num(s.sigma),
                "A": num(s.a_coef),
                "B": num(s.b_coef),
            })
        })
        .collect();
    let mut out = Output::new(Value::Array(data));
    for n in sp.threshold_hits {
        out.notes.push(format!("branch {n} sits at the threshold E = V0"));
    }
    out.table = Some(Table {
        header: vec!["n", "E", "K", "sigma", "A", "B"],
        rows,
    });
    Ok(out)
}

fn status_json(w: &WellSpec, n: usize, st: &BranchStatus, one_d: bool) -> Value {
    match st {
        BranchStatus::Found(p) => {
            let (pole, residual) = if one_d {
                let m = pole_member(p);
                (m, inverse_transmission_amplitude(w, p.energy(m)))
            } else {
                let m = p.outgoing_member();
                (m, verify_pole_condition(w, p.energy(m)).unwrap_or(f64::NAN))
            };
            let mut v = json!({
                "n": n,
                "status": "found",
                "mu": num(p.mu),
                "nu": num(p.nu),
                "E0": num(p.e0),
                "Gamma": num(p.gamma),
                "K_minus": complex(p.big_k(Member::Minus)),
                "k_minus": complex(p.small_k(Member::Minus)),
                "pole_member": member_name(pole),
                "pole_residual": num(residual),
            });
            let [r1, r2] = p.system_residuals();
            if one_d {
                v["residual_1d"] = num(pole_residual_1d(w, p.energy(pole)));
            } else {
                v["system_residual"] = num(r1.max(r2));
                v["ratio_law_residual"] = num(p.ratio_law_residual());
            }
            v
        }
        BranchStatus::Collapsed { gamma_mu } => json!({"n": n, "status": "collapsed", "gamma_mu": num(*gamma_mu)}),
        BranchStatus::OutOfStrip { gamma_mu } => json!({"n": n, "status": "out_of_strip", "gamma_mu": num(*gamma_mu)}),
        BranchStatus::NoConvergence(e) => json!({"n": n, "status": "no_convergence", "error": e.to_string()}),
    }
}

fn all_failed(sts: &[&BranchStatus]) -> Option<String> {
    let msgs: Vec<String> = sts
        .iter()
        .map(|s| match s {
            BranchStatus::NoConvergence(e) => Some(e.to_string()),
            _ => None,
        })
        .collect::<Option<Vec<_>>>()?;
    Some(msgs.join("; "))
}

pub fn resonances(cfg: &RunConfig) -> Result<Output, CliError> {
    let w = cfg.well(Geometry::Radial3d)?;
    let n_max = at_least("n-max", cfg.n_max.unwrap_or(3), 1)?;
    let outs = resonance_search(&w, n_max)?;
    if let Some(msg) = all_failed(&outs.iter().map(|o| &o.status).collect::<Vec<_>>()) {
        return Err(CliError::Solver(msg));
    }
    let mut rows = Vec::new();
    for o in &outs {
        if let BranchStatus::Found(p) = &o.status {
            rows.push(vec![o.n as f64, p.mu, p.nu, p.e0, p.gamma]);
        }
    }
    let data = outs.iter().map(|o| status_json(&w, o.n, &o.status, false)).collect();
    let mut out = Output::new(Value::Array(data));
    out.notes
        .push("each pair is E0 +- i Gamma; pole_member names the member with k tan(Ka)/K = -i".into());
    out.table = Some(Table {
        header: vec!["n", "mu", "nu", "E0", "Gamma"],
        rows,
    });
    Ok(out)
}

pub fn exceptional(cfg: &RunConfig) -> Result<Output, CliError> {
    let n = at_least("n", cfg.n.unwrap_or(3), 1)?;
    // only hbar, m and a enter V0(n)
    let w = cfg.well_with_v0(cfg.v0.unwrap_or(1.0), Geometry::Radial3d)?;
    let vs = exceptional_potentials(&w, n)?;
    let rows = vs.iter().enumerate().map(|(i, v)| vec![i as f64, *v]).collect();
    let data = vs
        .iter()
        .enumerate()
        .map(|(i, v)| json!({"n": i, "V0": num(*v)}))
        .collect();
    let mut out = Output::new(Value::Array(data));
    out.table = Some(Table {
        header: vec!["n", "V0"],
        rows,
    });
    Ok(out)
}

fn sweep_grid(cfg: &RunConfig, v0: f64, unit: f64) -> Result<Vec<f64>, CliError> {
    let emin = cfg.emin.unwrap_or(v0 * 1.01);
    let emax = cfg.emax.unwrap_or(v0 + 100.0 * unit);
    let n = at_least("n", cfg.n.unwrap_or(1000), 2)?;
    if !(emin > v0 && emax > emin && emax.is_finite()) {
        return Err(CliError::Validation(format!(
            "need V0 < emin < emax, got V0={v0}, [{emin}, {emax}]"
        )));
    }
    let h = (emax - emin) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { emax } else { emin + h * i as f64 })
        .collect())
}

pub fn scatter(cfg: &RunConfig) -> Result<Output, CliError> {
    let w = cfg.well(Geometry::Radial3d)?;
    let es = sweep_grid(cfg, w.v0, w.energy_unit())?;
    let pts: Vec<(f64, f64, f64)> = es
        .par_iter()
        .map(|&e| {
            let p = phase_shift(&w, e)?;
            let h = (1e-3 * (e - w.v0)).min(1e-4 * e);
            Ok((p.delta, wigner_time_delay(&w, e, h)?, e))
        })
        .collect::<reswell::Result<_>>()?;
    // unwrap serially so the output does not depend on the thread count
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(pts.len());
    let mut prev: Option<f64> = None;
    for (d, dt, e) in pts {
        let mut d = d;
        if let Some(p) = prev {
            while d - p > 0.5 * std::f64::consts::PI {
                d -= std::f64::consts::PI;
            }
            while d - p < -0.5 * std::f64::consts::PI {
                d += std::f64::consts::PI;
            }
        }
        prev = Some(d);
        let f = amplitude_of(d);
        rows.push(vec![e, d, f.re, f.im, dt]);
    }
    let data = rows
        .iter()
        .map(|r| json!({"E": num(r[0]), "delta": num(r[1]), "re_f": num(r[2]), "im_f": num(r[3]), "time_delay": num(r[4])}))
        .collect();
    let mut out = Output::new(Value::Array(data));
    out.table = Some(Table {
        header: vec!["E", "delta", "re_f", "im_f", "time_delay"],
        rows,
    });
    Ok(out)
}

pub fn well1d(cfg: &RunConfig) -> Result<Output, CliError> {
    let w = cfg.well(Geometry::Line1d)?;
    let es = sweep_grid(cfg, w.v0, w.energy_unit())?;
    let rows: Vec<Vec<f64>> = es
        .par_iter()
        .map(|&e| transmission_reflection(&w, e).map(|r| vec![e, r.t, r.r]))
        .collect::<reswell::Result<_>>()?;
    let n_max = at_least("n-max", cfg.n_max.unwrap_or(3), 1)?;
    let outs = pole_search_1d(&w, n_max)?;
    let poles: Vec<Value> = outs.iter().map(|o| status_json(&w, o.n, &o.status, true)).collect();
    let res: Vec<Value> = transmission_resonances_1d(&w, n_max)?.into_iter().map(num).collect();
    let sweep: Vec<Value> = rows
        .iter()
        .map(|r| json!({"E": num(r[0]), "T": num(r[1]), "R": num(r[2])}))
        .collect();
    let mut out = Output::new(json!({"sweep": sweep, "poles": poles, "transmission_resonances": res}));
    out.table = Some(Table {
        header: vec!["E", "T", "R"],
        rows,
    });
    Ok(out)
}

fn read_matrix(path: &std::path::Path) -> Result<CMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read matrix {}: {e}", path.display())))?;
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("matrix must be rows of [re, im] pairs: {e}")))?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Validation("matrix must be square".into()));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

pub fn ptmatrix(cfg: &RunConfig) -> Result<Output, CliError> {
    let op = match (cfg.s, &cfg.matrix) {
        (Some(s), None) => m_of_s(s)?,
        (None, Some(p)) => FiniteOperator::new(read_matrix(p)?)?,
        _ => return Err(CliError::Validation("give exactly one of --s and --matrix".into())),
    };
    let eigen: Vec<Value> = op
        .eigen
        .iter()
        .map(|e| {
            json!({
                "value": complex(e.value),
                "algebraic": e.algebraic,
                "geometric": e.geometric(),
                "right": e.right.column(0).iter().map(|z| complex(*z)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut out = Output::new(Value::Null);
    let intertwiner = match solve_intertwiner(&op) {
        Ok(v) => json!({
            "matrix": (0..v.matrix.nrows())
                .map(|i| (0..v.matrix.ncols()).map(|j| complex(v.matrix[(i, j)])).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "residual": num(intertwining_residual(&op.matrix, &v.matrix)),
        }),
        Err(e) => {
            out.notes.push(format!("intertwiner: {e}"));
            Value::Null
        }
    };
    let mut data = json!({
        "classification": classification_name(op.classification),
        "eigenspaces": eigen,
        "intertwiner": intertwiner,
    });
    if op.matrix.nrows() == 2 {
        data["pt_commutation_residual"] = num(pt_commutation_residual(&op.matrix));
    }
    out.data = data;
    Ok(out)
}

pub fn pu(cfg: &RunConfig) -> Result<Output, CliError> {
    let spec = match (cfg.w1, cfg.w2, cfg.wr, cfg.wi) {
        (Some(a), Some(b), None, None) => PUSpec::real(a, b)?,
        (None, None, Some(a), Some(b)) => PUSpec::conjugate(a, b)?,
        _ => return Err(CliError::Validation("give --w1 and --w2, or --wr and --wi".into())),
    };
    let extent = positive("extent", cfg.extent.unwrap_or(8.0))?;
    let points = cfg.points.unwrap_or(512);
    let r = pu_rayleigh_and_residual(&spec, extent, points)?;
    let realization = match spec.realization {
        Realization::UnequalReal => "unequal_real",
        Realization::EqualReal => "equal_real",
        Realization::ConjugatePair => "conjugate_pair",
    };
    let ratio = r.e_est.re / spec.sum();
    let mut out = Output::new(json!({
        "realization": realization,
        "E_est": complex(r.e_est),
        "residual": num(r.residual),
        "h": num(r.h),
        "E_est_over_sum": num(ratio),
        "coefficients": pu_hamiltonian_coefficients(&spec).iter().map(|z| complex(*z)).collect::<Vec<_>>(),
        "exponent_eigenvalues": spec.exponent_eigenvalues().iter().map(|v| num(*v)).collect::<Vec<_>>(),
        "normal_modes": classification_name(spec.normal_mode_operator()?.classification),
    }));
    if (ratio - 1.0).abs() > 1e-3 {
        out.notes.push(format!("E_est is {ratio:.6} (w1 + w2), not w1 + w2"));
    }
    Ok(out)
}

pub fn propagator(cfg: &RunConfig) -> Result<Output, CliError> {
    let kind = match cfg.kind.unwrap_or(Kind::Pt) {
        Kind::Bw => PropagatorKind::BreitWigner,
        Kind::Pt => PropagatorKind::PtPair,
    };
    let contour = match cfg.contour.unwrap_or(ContourArg::Deformed) {
        ContourArg::Real => Contour::RealAxis,
        ContourArg::Deformed => Contour::DeformedLower,
    };
    let spec = PropagatorSpec::new(cfg.e0.unwrap_or(1.0), cfg.gamma.unwrap_or(0.1), kind, contour)?;
    let (tmin, tmax) = (
        cfg.tmin.unwrap_or(-10.0 / spec.gamma),
        cfg.tmax.unwrap_or(10.0 / spec.gamma),
    );
    let n = at_least("n", cfg.n.unwrap_or(401), 2)?;
    if !(tmax > tmin && tmin.is_finite() && tmax.is_finite()) {
        return Err(CliError::Validation(format!("need tmin < tmax, got [{tmin}, {tmax}]")));
    }
    let h = (tmax - tmin) / (n - 1) as f64;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let t = if i == n - 1 { tmax } else { tmin + h * i as f64 };
            let d = propagator_time(&spec, t);
            vec![t, d.re, d.im]
        })
        .collect();
    let data = rows
        .iter()
        .map(|r| json!({"t": num(r[0]), "re": num(r[1]), "im": num(r[2])}))
        .collect();
    let mut out = Output::new(Value::Array(data));
    out.table = Some(Table {
        header: vec!["t", "re", "im"],
        rows,
    });
    Ok(out)
}
