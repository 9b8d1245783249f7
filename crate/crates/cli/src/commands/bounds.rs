//! Evaluate the constants ladder and hypothesis checks without simulating.

use crate::config::ExperimentConfig;
use bfed_core::bounds::BoundsReport;
use bfed_core::{Error, Result};
use std::path::{Path, PathBuf};

pub struct BoundsArtifacts {
    pub report: BoundsReport,
    pub text_path: PathBuf,
    pub csv_path: PathBuf,
}

pub fn cmd_bounds(cfg: &ExperimentConfig, out_dir: &Path) -> Result<BoundsArtifacts> {
    let m = cfg.bounds_m.ok_or_else(|| {
        Error::InvalidParam(
            "bounds evaluation without a run needs the initial-data bound: set bounds.m".into(),
        )
    })?;
    std::fs::create_dir_all(out_dir)?;
    let grid = cfg.grid()?;
    let phys = cfg.physical()?;
    let assim = cfg.assim()?;
    let forcing = cfg.forcing().realize(grid)?;
    let mut bounds_cfg = cfg.bounds_template();
    bounds_cfg.f_norm = forcing.sup_l2();
    bounds_cfg.ft_norm = forcing.sup_dt_l2();

    let report = BoundsReport::evaluate(&phys, &assim, &bounds_cfg, m)?;

    let text_path = out_dir.join("bounds.txt");
    let mut text = cfg.preamble();
    text.push_str(&report.to_text());
    std::fs::write(&text_path, &text)?;
    print!("{}", report.to_text());

    let csv_path = out_dir.join("bounds.csv");
    let mut csv = cfg.preamble();
    csv.push_str(&report.to_csv());
    std::fs::write(&csv_path, csv)?;

    Ok(BoundsArtifacts {
        report,
        text_path,
        csv_path,
    })
}
