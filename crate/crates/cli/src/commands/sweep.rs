//! Parameter sweeps over the assimilation-side knobs (beta, b_tilde, eta, h)
//! with one truth spin-up hoisted across all points, points run in parallel,
//! and a log-log plateau-vs-mismatch regression when a mismatch axis is
//! swept.

use crate::config::ExperimentConfig;
use bfed_core::assim::{fit_decay_and_plateau, loglog_slope, run_coupled, RunSetup};
use bfed_core::bounds::{all_hold, check_hypotheses, verify_apriori};
use bfed_core::params::AssimParams;
use bfed_core::{Error, Result};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub index: usize,
    pub beta: f64,
    pub b_tilde: f64,
    pub eta: f64,
    pub h: f64,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub status: String,
    pub lambda: Option<f64>,
    pub plateau_l2: f64,
    pub plateau_h1: f64,
    pub hyp_l2: Option<bool>,
    pub hyp_h1: Option<bool>,
    pub apriori_all_hold: Option<bool>,
    pub wall_s: f64,
}

#[derive(Debug, Clone)]
pub struct SweepArtifacts {
    pub summary_path: PathBuf,
    pub rows: Vec<SweepRow>,
    /// (axis name, log-log slope of plateau vs mismatch) when available.
    pub mismatch_slopes: Vec<(String, f64)>,
}

pub fn cmd_sweep(cfg: &ExperimentConfig, out_dir: &Path, threads: usize) -> Result<SweepArtifacts> {
    if cfg.sweep_beta.is_empty()
        && cfg.sweep_b_tilde.is_empty()
        && cfg.sweep_eta.is_empty()
        && cfg.sweep_h.is_empty()
    {
        return Err(Error::InvalidParam(
            "sweep requires at least one sweep.* axis".into(),
        ));
    }
    std::fs::create_dir_all(out_dir)?;
    let grid = cfg.grid()?;
    let phys = cfg.physical()?;
    let stepper = cfg.stepper()?;
    let forcing = cfg.forcing().realize(grid)?;
    let mut bounds_cfg = cfg.bounds_template();
    bounds_cfg.f_norm = forcing.sup_l2();
    bounds_cfg.ft_norm = forcing.sup_dt_l2();

    // Axes default to the base value; the cross product is row-major in
    // (beta, b_tilde, eta, h) order.
    let axis = |vals: &Vec<f64>, base: f64| -> Vec<f64> {
        if vals.is_empty() {
            vec![base]
        } else {
            vals.clone()
        }
    };
    let betas = axis(&cfg.sweep_beta, cfg.beta);
    let b_tildes = axis(&cfg.sweep_b_tilde, cfg.b_tilde);
    let etas = axis(&cfg.sweep_eta, cfg.eta);
    let hs = axis(&cfg.sweep_h, cfg.interpolant_h);
    let mut points = Vec::new();
    for &beta in &betas {
        for &b_tilde in &b_tildes {
            for &eta in &etas {
                for &h in &hs {
                    points.push(SweepPoint {
                        index: points.len(),
                        beta,
                        b_tilde,
                        eta,
                        h,
                    });
                }
            }
        }
    }

    // One shared truth spin-up: sweep axes never touch the truth system.
    let (u0, _m0) = bfed_core::assim::spin_up(
        grid,
        &phys,
        &forcing,
        &stepper,
        cfg.seed,
        cfg.ic_amplitude,
        cfg.t_spin,
    )?;

    let results: Mutex<Vec<Option<SweepRow>>> = Mutex::new(vec![None; points.len()]);
    let next: AtomicUsize = AtomicUsize::new(0);
    let threads = threads.max(1).min(points.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= points.len() {
                    break;
                }
                let row = run_point(cfg, &points[i], &phys, &forcing, &bounds_cfg, &u0, out_dir);
                results.lock().unwrap()[i] = Some(row);
            });
        }
    });

    let rows: Vec<SweepRow> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("all points executed"))
        .collect();

    // Plateau-vs-mismatch regressions over the points that vary exactly one
    // mismatch quantity.
    let mut mismatch_slopes = Vec::new();
    if cfg.sweep_b_tilde.len() >= 2 {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.status == "ok" && (r.point.b_tilde - cfg.a_tilde).abs() > 1e-15)
            .map(|r| ((r.point.b_tilde - cfg.a_tilde).abs(), r.plateau_l2))
            .collect();
        if pts.len() >= 2 {
            mismatch_slopes.push(("b_tilde".into(), loglog_slope(&pts)));
        }
    }
    if cfg.sweep_beta.len() >= 2 {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.status == "ok" && (r.point.beta - cfg.alpha).abs() > 1e-15)
            .map(|r| ((r.point.beta - cfg.alpha).abs(), r.plateau_l2))
            .collect();
        if pts.len() >= 2 {
            mismatch_slopes.push(("beta".into(), loglog_slope(&pts)));
        }
    }

    let summary_path = out_dir.join("sweep.csv");
    let mut csv = cfg.preamble();
    for (axis_name, slope) in &mismatch_slopes {
        csv.push_str(&format!(
            "# plateau_vs_{axis_name}_mismatch_loglog_slope = {slope}\n"
        ));
    }
    csv.push_str(
        "index,beta,b_tilde,eta,h,status,lambda,plateau_l2,plateau_h1,hyp_l2,hyp_h1,apriori_all_hold,wall_s\n",
    );
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.point.index,
            r.point.beta,
            r.point.b_tilde,
            r.point.eta,
            r.point.h,
            r.status,
            r.lambda.map(|l| l.to_string()).unwrap_or_else(|| "nan".into()),
            r.plateau_l2,
            r.plateau_h1,
            opt_bool(r.hyp_l2),
            opt_bool(r.hyp_h1),
            opt_bool(r.apriori_all_hold),
            r.wall_s,
        ));
    }
    std::fs::write(&summary_path, csv)?;

    Ok(SweepArtifacts {
        summary_path,
        rows,
        mismatch_slopes,
    })
}

fn opt_bool(v: Option<bool>) -> String {
    match v {
        Some(b) => b.to_string(),
        None => "n/a".into(),
    }
}

fn run_point(
    cfg: &ExperimentConfig,
    point: &SweepPoint,
    phys: &bfed_core::params::PhysicalParams,
    forcing: &bfed_core::params::ForcingField,
    bounds_cfg: &bfed_core::bounds::BoundsConfig,
    u0: &bfed_core::SpectralField,
    out_dir: &Path,
) -> SweepRow {
    let start = std::time::Instant::now();
    let fail = |status: String| SweepRow {
        point: point.clone(),
        status,
        lambda: None,
        plateau_l2: f64::NAN,
        plateau_h1: f64::NAN,
        hyp_l2: None,
        hyp_h1: None,
        apriori_all_hold: None,
        wall_s: start.elapsed().as_secs_f64(),
    };

    let assim = match cfg
        .interpolant_with_h(point.h)
        .and_then(|spec| AssimParams::new(point.beta, point.b_tilde, point.eta, spec))
    {
        Ok(a) => a,
        Err(e) => return fail(format!("config-error: {e}")),
    };
    let stepper = match cfg.stepper() {
        Ok(s) => s,
        Err(e) => return fail(format!("config-error: {e}")),
    };
    let setup = RunSetup {
        phys: *phys,
        assim: assim.clone(),
        forcing,
        stepper,
        t_end: cfg.t_end,
        sample_stride: cfg.sample_stride,
        observe_stride: cfg.observe_stride,
        h_ball: None,
    };
    let outcome = match run_coupled(&setup, u0, None) {
        Ok(o) => o,
        Err(e) => return fail(format!("blow-up: {e}")),
    };

    let fit_l2 = fit_decay_and_plateau(&outcome.record.g_l2_sq_series()).ok();
    let fit_h1 = fit_decay_and_plateau(&outcome.record.g_h1_combined_series()).ok();

    let (hyp_l2, hyp_h1, apriori_all) =
        match bfed_core::bounds::eval_m_ladder(phys, bounds_cfg, outcome.m_initial) {
            Ok(ladder) => {
                let thm3233 =
                    bfed_core::bounds::eval_thm32_33_constants(phys, &assim, bounds_cfg, &ladder)
                        .ok();
                let hyp = check_hypotheses(phys, &assim, bounds_cfg, &ladder, thm3233.as_ref());
                let apriori = verify_apriori(&outcome.record, phys, &assim, bounds_cfg, &ladder)
                    .map(|v| all_hold(&v))
                    .ok();
                (Some(hyp.thm31_ok), hyp.thm32_33_ok, apriori)
            }
            Err(_) => (None, None, None),
        };

    // Per-point record for downstream tooling.
    let record_path = out_dir.join(format!("point_{:03}.csv", point.index));
    let mut csv = cfg.preamble();
    csv.push_str(&format!(
        "# point.beta = {}\n# point.b_tilde = {}\n# point.eta = {}\n# point.h = {}\n",
        point.beta, point.b_tilde, point.eta, point.h
    ));
    csv.push_str(&outcome.record.to_csv_body());
    if let Err(e) = std::fs::write(&record_path, csv) {
        return fail(format!("io-error: {e}"));
    }

    SweepRow {
        point: point.clone(),
        status: "ok".into(),
        lambda: fit_l2.as_ref().and_then(|f| f.lambda),
        plateau_l2: fit_l2.map(|f| f.plateau_norm()).unwrap_or(f64::NAN),
        plateau_h1: fit_h1.map(|f| f.plateau).unwrap_or(f64::NAN),
        hyp_l2,
        hyp_h1,
        apriori_all_hold: apriori_all,
        wall_s: start.elapsed().as_secs_f64(),
    }
}
