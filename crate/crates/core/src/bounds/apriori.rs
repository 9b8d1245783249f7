//! Verification of the a-priori estimates against a recorded trajectory:
//! each closed-form bound is compared with the measured norm series, with
//! time windows respected and time integrals taken by trapezoid quadrature
//! on the sampled columns.

use super::ladder::{BoundsConfig, Ladder};
use super::logval::pv;
use crate::assim::RunRecord;
use crate::error::{Error, Result};
use crate::params::{AssimParams, PhysicalParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    /// The estimate's time window contains no samples; nothing to check.
    Vacuous,
    /// The estimate needs the `1 < alpha < 2` ladder and it is not available.
    Unavailable,
}

#[derive(Debug, Clone)]
pub struct EstimateVerdict {
    pub name: &'static str,
    pub window: String,
    /// max over checked samples/intervals of measured / bound.
    pub max_ratio: f64,
    pub verdict: Verdict,
}

impl EstimateVerdict {
    /// True when the estimate was not violated (vacuous windows and
    /// inapplicable-exponent estimates are not violations).
    pub fn holds(&self) -> bool {
        !matches!(self.verdict, Verdict::Violated)
    }

    /// True only when samples were actually checked and all passed.
    pub fn holds_nonvacuously(&self) -> bool {
        matches!(self.verdict, Verdict::Holds)
    }
}

fn ratio_verdict(name: &'static str, window: String, ratios: Vec<f64>) -> EstimateVerdict {
    if ratios.is_empty() {
        return EstimateVerdict {
            name,
            window,
            max_ratio: 0.0,
            verdict: Verdict::Vacuous,
        };
    }
    let max_ratio = ratios.into_iter().fold(0.0f64, f64::max);
    EstimateVerdict {
        name,
        window,
        max_ratio,
        verdict: if max_ratio <= 1.0 {
            Verdict::Holds
        } else {
            Verdict::Violated
        },
    }
}

/// Trapezoid integral of `f(row)` over samples with `r <= t <= t_hi`.
fn trapezoid<F: Fn(usize) -> f64>(ts: &[f64], lo: f64, hi: f64, f: F) -> f64 {
    let mut acc = 0.0;
    for i in 1..ts.len() {
        if ts[i - 1] >= lo - 1e-12 && ts[i] <= hi + 1e-12 {
            acc += 0.5 * (ts[i] - ts[i - 1]) * (f(i - 1) + f(i));
        }
    }
    acc
}

/// Check every implemented estimate on the truth trajectory of `record`.
///
/// `m` must dominate the initial data (it is taken from the run itself by the
/// harness). Estimates whose windows contain no samples come back `Vacuous`;
/// the `M5..M8` group comes back `Unavailable` outside `1 < alpha < 2`.
pub fn verify_apriori(
    record: &RunRecord,
    phys: &PhysicalParams,
    assim: &AssimParams,
    cfg: &BoundsConfig,
    ladder: &Ladder,
) -> Result<Vec<EstimateVerdict>> {
    if record.rows.is_empty() {
        return Err(Error::MissingColumn("record has no rows".into()));
    }
    for (name, missing) in [
        ("u_l2", record.rows.iter().any(|r| !r.u_l2.is_finite())),
        ("u_h1", record.rows.iter().any(|r| !r.u_h1.is_finite())),
        ("u_l2a2", record.rows.iter().any(|r| !r.u_l2a2.is_finite())),
        ("au_l2", record.rows.iter().any(|r| !r.au_l2.is_finite())),
        ("dudt_l2", record.rows.iter().any(|r| !r.dudt_l2.is_finite())),
    ] {
        if missing {
            return Err(Error::MissingColumn(name.into()));
        }
    }

    let rows = &record.rows;
    let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let t_end = *ts.last().unwrap();
    let nu = phys.nu;
    let l = phys.l;
    let a = phys.a();
    let al = phys.alpha;
    let fsq = cfg.f_norm * cfg.f_norm;
    let tau = l * l / nu; // the viscous time entering every window
    let u0_sq = rows[0].u_l2 * rows[0].u_l2;
    let grad_u0_sq = rows[0].u_h1 * rows[0].u_h1;
    let k = ladder.k.value();
    let p = 2.0 * al + 2.0;

    let mut out = Vec::new();

    // L2 decay toward the absorbing ball, all t >= 0.
    out.push(ratio_verdict(
        "l2_absorbing_ball",
        "t >= 0".into(),
        rows.iter()
            .map(|r| {
                let bound = (-2.0 * nu * r.t / (l * l)).exp() * u0_sq + l * l / nu * k;
                (r.u_l2 * r.u_l2) / bound
            })
            .collect(),
    ));

    // Integral of ||u||_{L^{2a+2}}^{2a+2} over [r, t].
    let m4 = ladder.m4.value();
    let lp_int_bound_direct = |lo: usize, hi_t: f64| {
        let u_r_sq = rows[lo].u_l2 * rows[lo].u_l2;
        u_r_sq / a
            + (2.0 * l * l / (a * nu) * fsq
                + 2f64.powf((1.0 + al) / al) * nu.powf((al + 1.0) / al)
                    * l.powf((al - 2.0) / al)
                    / a.powf((1.0 + al) / al))
                * (hi_t - rows[lo].t)
    };
    let mut lp_ratios = Vec::new();
    let mut lp_m4_ratios = Vec::new();
    for lo in [0usize, rows.len() / 2] {
        if rows[lo].t >= t_end {
            continue;
        }
        let integral = trapezoid(&ts, rows[lo].t, t_end, |i| rows[i].u_l2a2.powf(p));
        lp_ratios.push(integral / lp_int_bound_direct(lo, t_end));
        let m1 = ladder.m1.value();
        lp_m4_ratios.push(integral / (m1 / a + (t_end - rows[lo].t) * m4));
    }
    out.push(ratio_verdict(
        "lp_time_integral",
        "0 <= r <= t <= T".into(),
        lp_ratios,
    ));

    // Gradient bound after one viscous time.
    let coef = 1.0 / (2.0 * l * l)
        + 1.0 / (2.0 * nu.powf((2.0 * al - 1.0) / (al - 1.0)) * a.powf(1.0 / (al - 1.0)));
    let k_coef = 3.0 / (2.0 * nu)
        + 3.0 * l * l / (2.0 * nu.powf((3.0 * al - 2.0) / (al - 1.0)) * a.powf(1.0 / (al - 1.0)));
    out.push(ratio_verdict(
        "gradient_after_viscous_time",
        format!("t >= {tau:.4}"),
        rows.iter()
            .filter(|r| r.t >= tau)
            .map(|r| {
                let bound = coef * (-2.0 * nu * (r.t - tau) / (l * l)).exp() * u0_sq
                    + k * k_coef
                    + l * l / (nu * nu) * fsq;
                (r.u_h1 * r.u_h1) / bound
            })
            .collect(),
    ));

    // Gradient bound before one viscous time.
    let early_extra = 1.0 / (nu.powf(al / (al - 1.0)) * a.powf(1.0 / (al - 1.0)))
        * (l.powi(4) / nu.powi(3) * fsq
            + 4.0 * l.powf((3.0 * al - 2.0) / al) / (nu.powf((al - 1.0) / al) * a.powf(1.0 / al)));
    out.push(ratio_verdict(
        "gradient_before_viscous_time",
        format!("0 <= t <= {tau:.4}"),
        rows.iter()
            .filter(|r| r.t <= tau)
            .map(|r| {
                let bound = grad_u0_sq + early_extra + l * l / (nu * nu) * fsq;
                (r.u_h1 * r.u_h1) / bound
            })
            .collect(),
    ));

    // Integral of ||A u||^2 over [r, t].
    let mut au_ratios = Vec::new();
    let mut au_m3_ratios = Vec::new();
    for lo in [0usize, rows.len() / 2] {
        if rows[lo].t >= t_end {
            continue;
        }
        let integral = trapezoid(&ts, rows[lo].t, t_end, |i| rows[i].au_l2 * rows[i].au_l2);
        let grad_int = trapezoid(&ts, rows[lo].t, t_end, |i| rows[i].u_h1 * rows[i].u_h1);
        let grad_r_sq = rows[lo].u_h1 * rows[lo].u_h1;
        let bound = 2.0 / nu * grad_r_sq
            + 2.0 / (nu.powf((2.0 * al - 1.0) / (al - 1.0)) * a.powf(1.0 / (al - 1.0))) * grad_int
            + 4.0 * (t_end - rows[lo].t) / (nu * nu) * fsq;
        au_ratios.push(integral / bound);
        let m2 = ladder.m2.value();
        let m3 = ladder.m3.value();
        au_m3_ratios.push(integral / (2.0 / nu * m2 + (t_end - rows[lo].t) * m3));
    }
    out.push(ratio_verdict(
        "au_time_integral",
        "0 <= r <= t <= T".into(),
        au_ratios,
    ));

    // Uniform ladder bounds.
    let m1 = ladder.m1.value();
    let m2 = ladder.m2.value();
    out.push(ratio_verdict(
        "uniform_m1",
        "t >= 0".into(),
        rows.iter().map(|r| r.u_l2 * r.u_l2 / m1).collect(),
    ));
    out.push(ratio_verdict(
        "uniform_m2",
        "t >= 0".into(),
        rows.iter().map(|r| r.u_h1 * r.u_h1 / m2).collect(),
    ));
    out.push(ratio_verdict(
        "au_integral_m3",
        "0 <= r <= t <= T".into(),
        au_m3_ratios,
    ));
    out.push(ratio_verdict(
        "lp_integral_m4",
        "0 <= r <= t <= T".into(),
        lp_m4_ratios,
    ));

    // Exponentially weighted integral of ||A u||^2 (accumulated online during
    // the run), bounded by the eta-weighted constant.
    let q = (4.0 / nu) * m2
        + 16.0 / (assim.eta * nu.powf((3.0 * al - 2.0) / (al - 1.0)) * a.powf(1.0 / (al - 1.0)))
            * m2
        + 32.0 / (assim.eta * nu * nu) * fsq;
    out.push(ratio_verdict(
        "au_expweighted_integral",
        "t >= 0".into(),
        if assim.eta > 0.0 {
            rows.iter().map(|r| r.au_sq_expwt / q).collect()
        } else {
            Vec::new()
        },
    ));

    // The higher ladder (only for 1 < alpha < 2).
    match &ladder.higher {
        None => {
            for name in ["uniform_m5_lp", "m6_dudt_window_integral", "uniform_m7_dudt", "uniform_m8_au"] {
                out.push(EstimateVerdict {
                    name,
                    window: "1 < alpha < 2 only".into(),
                    max_ratio: 0.0,
                    verdict: Verdict::Unavailable,
                });
            }
        }
        Some(hi) => {
            let m5 = hi.m5.value();
            out.push(ratio_verdict(
                "uniform_m5_lp",
                format!("t >= {tau:.4}"),
                rows.iter()
                    .filter(|r| r.t >= tau)
                    .map(|r| r.u_l2a2.powf(p) / m5)
                    .collect(),
            ));

            // Sliding windows [t, t + tau] for the integral of ||u_t||^2.
            let m6 = hi.m6.value();
            let mut m6_ratios = Vec::new();
            for lo_t in &ts {
                if *lo_t < tau - 1e-12 || lo_t + tau > t_end + 1e-12 {
                    continue;
                }
                let integral = trapezoid(&ts, *lo_t, lo_t + tau, |j| {
                    rows[j].dudt_l2 * rows[j].dudt_l2
                });
                m6_ratios.push(integral / m6);
            }
            out.push(ratio_verdict(
                "m6_dudt_window_integral",
                format!("[t, t + {tau:.4}], t >= {tau:.4}"),
                m6_ratios,
            ));

            let m7 = hi.m7.value();
            out.push(ratio_verdict(
                "uniform_m7_dudt",
                format!("t >= {:.4}", 2.0 * tau),
                rows.iter()
                    .filter(|r| r.t >= 2.0 * tau)
                    .map(|r| r.dudt_l2 * r.dudt_l2 / m7)
                    .collect(),
            ));

            // ||A u|| <= M8 (the norm itself, not squared).
            let m8 = hi.m8;
            out.push(ratio_verdict(
                "uniform_m8_au",
                format!("t >= {:.4}", 2.0 * tau),
                rows.iter()
                    .filter(|r| r.t >= 2.0 * tau)
                    .map(|r| pv(r.au_l2).ratio(m8))
                    .collect(),
            ));
        }
    }

    Ok(out)
}

/// Convenience: the `PosVal` bound paired with each verdict row is not kept;
/// callers wanting the raw constants read them off the `Ladder`.
pub fn all_hold(verdicts: &[EstimateVerdict]) -> bool {
    verdicts.iter().all(|v| v.holds())
}
