//! Full property suite at n = 16 with one pass/fail line per property.

use bfed_core::interpolant::{verify_inequality, InequalityReport, InterpolantKind, InterpolantSpec};
use bfed_core::verify::{run_property_suite, Fault, SuiteReport};
use bfed_core::{Grid, Result};
use std::path::Path;

pub struct VerifyArtifacts {
    pub report: SuiteReport,
    pub elapsed: std::time::Duration,
}

pub fn cmd_verify(seed: u64, fault: Fault, out_dir: &Path) -> Result<VerifyArtifacts> {
    let start = std::time::Instant::now();
    let report = run_property_suite(16, seed, fault);
    for r in &report.results {
        println!("{} {} - {}", if r.pass { "PASS" } else { "FAIL" }, r.name, r.detail);
    }

    // Interpolant verification report as CSV.
    std::fs::create_dir_all(out_dir)?;
    let grid = Grid::cubic(16, 2.0 * std::f64::consts::PI).unwrap();
    let mut csv = String::from(InequalityReport::csv_header());
    csv.push('\n');
    for kind in [
        InterpolantKind::FourierLowpass,
        InterpolantKind::VolumeAverage,
        InterpolantKind::TrilinearNodal,
    ] {
        for h in [grid.l() / 4.0, grid.l() / 8.0] {
            let spec = InterpolantSpec::with_default_constants(kind, h)?;
            let rep = verify_inequality(&spec, grid, 20, seed)?;
            csv.push_str(&rep.csv_row());
            csv.push('\n');
        }
    }
    std::fs::write(out_dir.join("interpolant_verification.csv"), csv)?;

    Ok(VerifyArtifacts {
        report,
        elapsed: start.elapsed(),
    })
}
