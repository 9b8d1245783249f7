//! Single coupled experiment: spin-up, coupled run, decay/plateau fit,
//! constant evaluation, a-priori verification, output emission.

use crate::config::ExperimentConfig;
use bfed_core::assim::{fit_decay_and_plateau, run_coupled, spin_up, DecayFit, RunSetup};
use bfed_core::bounds::{verify_apriori, BoundsReport};
use bfed_core::snapshot::write_snapshot_file;
use bfed_core::Result;
use std::path::{Path, PathBuf};

/// What a run leaves on disk plus the summary values tests key on.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub record_path: PathBuf,
    pub bounds_text_path: PathBuf,
    pub bounds_csv_path: PathBuf,
    pub fit_l2: Option<DecayFit>,
    pub fit_h1: Option<DecayFit>,
    /// min over samples of ||g|| / ||u||.
    pub min_rel_error: f64,
    pub synchronized_below_1e8: bool,
    pub no_decay: bool,
    pub m_initial: f64,
    pub rows: usize,
}

pub fn cmd_run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunArtifacts> {
    std::fs::create_dir_all(out_dir)?;
    let grid = cfg.grid()?;
    let phys = cfg.physical()?;
    let assim = cfg.assim()?;
    let stepper = cfg.stepper()?;
    let forcing = cfg.forcing().realize(grid)?;

    let mut bounds_cfg = cfg.bounds_template();
    bounds_cfg.f_norm = forcing.sup_l2();
    bounds_cfg.ft_norm = forcing.sup_dt_l2();

    let (u0, m0) = spin_up(
        grid,
        &phys,
        &forcing,
        &stepper,
        cfg.seed,
        cfg.ic_amplitude,
        cfg.t_spin,
    )?;

    // Constants first: the H-ball level (when finite) lets the run report
    // the empirical first-exit time.
    let mut report = BoundsReport::evaluate(&phys, &assim, &bounds_cfg, m0)?;
    let h_ball = report
        .constants
        .iter()
        .find(|(n, _)| n == "H")
        .map(|(_, v)| v.value())
        .filter(|v| v.is_finite());

    let setup = RunSetup {
        phys,
        assim: assim.clone(),
        forcing: &forcing,
        stepper,
        t_end: cfg.t_end,
        sample_stride: cfg.sample_stride,
        observe_stride: cfg.observe_stride,
        h_ball,
    };
    let outcome = run_coupled(&setup, &u0, None)?;

    let fit_l2 = if outcome.record.len() >= 10 {
        Some(fit_decay_and_plateau(&outcome.record.g_l2_sq_series())?)
    } else {
        None
    };
    let fit_h1 = if outcome.record.len() >= 10 {
        Some(fit_decay_and_plateau(&outcome.record.g_h1_combined_series())?)
    } else {
        None
    };

    let min_rel_error = outcome
        .record
        .rows
        .iter()
        .map(|r| r.g_l2 / r.u_l2.max(1e-300))
        .fold(f64::INFINITY, f64::min);

    if !outcome.record.is_empty() {
        let ladder = BoundsReport::ladder(&phys, &bounds_cfg, outcome.m_initial)?;
        report.apriori = verify_apriori(&outcome.record, &phys, &assim, &bounds_cfg, &ladder)?;
    }

    report.extras.push(("run.m_initial".into(), format!("{}", outcome.m_initial)));
    report.extras.push((
        "run.w0_within_m".into(),
        outcome.w0_within_m.to_string(),
    ));
    report.extras.push((
        "run.h_ball_first_exit".into(),
        match outcome.first_exit {
            Some(t) => format!("{t}"),
            None => "never".into(),
        },
    ));
    let mut synchronized_below_1e8 = false;
    if min_rel_error.is_finite() {
        synchronized_below_1e8 = min_rel_error < 1e-8;
        report.extras.push((
            "run.min_rel_error".into(),
            format!("{min_rel_error}"),
        ));
        report.extras.push((
            "run.synchronized_below_1e-8".into(),
            synchronized_below_1e8.to_string(),
        ));
    }
    let mut no_decay = false;
    if let Some(fit) = &fit_l2 {
        match fit.lambda {
            Some(l) => {
                report.extras.push(("fit.lambda_l2_sq".into(), format!("{l}")));
                report.extras.push((
                    "fit.lambda_vs_eta_over_8".into(),
                    format!("{}", l / (assim.eta / 8.0).max(1e-300)),
                ));
            }
            None => {
                no_decay = true;
                report.extras.push(("fit.no_decay".into(), "true".into()));
            }
        }
        report
            .extras
            .push(("fit.plateau_l2".into(), format!("{}", fit.plateau_norm())));
    }
    if let Some(fit) = &fit_h1 {
        report
            .extras
            .push(("fit.plateau_h1_combined".into(), format!("{}", fit.plateau)));
    }

    // Emission: record CSV with config preamble, bounds report, snapshots.
    let record_path = out_dir.join("run.csv");
    let mut csv = cfg.preamble();
    csv.push_str(&outcome.record.to_csv_body());
    std::fs::write(&record_path, csv)?;

    let bounds_text_path = out_dir.join("bounds.txt");
    let mut text = cfg.preamble();
    text.push_str(&report.to_text());
    std::fs::write(&bounds_text_path, text)?;

    let bounds_csv_path = out_dir.join("bounds.csv");
    let mut csv = cfg.preamble();
    csv.push_str(&report.to_csv());
    std::fs::write(&bounds_csv_path, csv)?;

    write_snapshot_file(&out_dir.join("u_final.bfed"), &outcome.u_final, cfg.t_end)?;
    write_snapshot_file(&out_dir.join("w_final.bfed"), &outcome.w_final, cfg.t_end)?;

    Ok(RunArtifacts {
        record_path,
        bounds_text_path,
        bounds_csv_path,
        fit_l2,
        fit_h1,
        min_rel_error,
        synchronized_below_1e8,
        no_decay,
        m_initial: outcome.m_initial,
        rows: outcome.record.len(),
    })
}
