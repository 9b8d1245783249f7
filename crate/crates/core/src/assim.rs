//! Coupled truth/observer runs: spin-up of the reference solution,
//! synchronized stepping with every-step observations, norm recording, and
//! decay/plateau extraction from the error series.

use crate::dynamics::{rhs_nudged_explicit, rhs_truth, rhs_truth_explicit};
use crate::error::{Error, Result};
use crate::field::{random_field, SpectralField};
use crate::grid::Grid;
use crate::params::{AssimParams, ForcingField, PhysicalParams};
use crate::rng::stream;
use crate::stepper::{Stepper, StepperConfig};

/// One sampled row of a coupled run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecordRow {
    pub t: f64,
    /// ||u||_{L2}
    pub u_l2: f64,
    /// ||grad u||_{L2}
    pub u_h1: f64,
    /// ||u||_{L^{2 alpha + 2}} (collocation quadrature)
    pub u_l2a2: f64,
    /// ||A u||_{L2}
    pub au_l2: f64,
    /// ||w - u||_{L2}
    pub g_l2: f64,
    /// ||grad (w - u)||_{L2}
    pub g_h1: f64,
    /// ||grad g||^2 + ||g||^2 / l^2 (the combined H1 error, squared quantity)
    pub g_h1_combined: f64,
    /// Trapezoid defect of the energy balance over the step(s) since the
    /// previous row; 0 on the first row.
    pub energy_residual: f64,
    /// ||du/dt||_{L2} evaluated from the truth right-hand side.
    pub dudt_l2: f64,
    /// Online accumulation of `int_0^t exp(eta/8 (s-t)) ||A u(s)||^2 ds`.
    pub au_sq_expwt: f64,
}

/// Time series of norms, error norms and balance residuals for one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunRecord {
    pub rows: Vec<RecordRow>,
}

pub const RECORD_COLUMNS: &str =
    "t,u_l2,u_h1,u_l2a2,au_l2,g_l2,g_h1,g_h1_combined,energy_residual,dudt_l2,au_sq_expwt";

impl RunRecord {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Body of the CSV emission (header + rows, no metadata preamble).
    pub fn to_csv_body(&self) -> String {
        let mut out = String::from(RECORD_COLUMNS);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                r.t,
                r.u_l2,
                r.u_h1,
                r.u_l2a2,
                r.au_l2,
                r.g_l2,
                r.g_h1,
                r.g_h1_combined,
                r.energy_residual,
                r.dudt_l2,
                r.au_sq_expwt
            ));
        }
        out
    }

    /// Squared L2 error series for decay fitting.
    pub fn g_l2_sq_series(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.t, r.g_l2 * r.g_l2)).collect()
    }

    pub fn g_h1_combined_series(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.t, r.g_h1_combined)).collect()
    }
}

/// Inputs of one coupled run.
#[derive(Debug, Clone)]
pub struct RunSetup<'a> {
    pub phys: PhysicalParams,
    pub assim: AssimParams,
    pub forcing: &'a ForcingField,
    pub stepper: StepperConfig,
    pub t_end: f64,
    pub sample_stride: usize,
    /// Steps between observation refreshes; 1 = continuous (every stage).
    pub observe_stride: usize,
    /// Optional level of the H1 ball whose first exit time is reported.
    pub h_ball: Option<f64>,
}

/// Outputs of one coupled run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub u_final: SpectralField,
    pub w_final: SpectralField,
    /// `max(estM(u0), estM(w0))` where `estM(v) = ||grad v||^2 + ||v||^2/l^2`.
    pub m_initial: f64,
    /// Whether `w0` satisfies the same initial H1 bound as `u0`.
    pub w0_within_m: bool,
    /// First time the combined H1 error left the `h_ball` (if tracked).
    pub first_exit: Option<f64>,
}

fn est_m(v: &SpectralField, l: f64) -> f64 {
    v.h1_seminorm_sq() + v.l2_norm_sq() / (l * l)
}

/// A non-finite value surfacing inside a tendency evaluation is a runaway
/// solution caught mid-step; report it as a blow-up of the named system.
fn blow_up_if_non_finite(e: Error, system: &str, t: f64) -> Error {
    match e {
        Error::NonFinite(_) => Error::BlowUp {
            system: system.into(),
            t,
            max_mode: f64::INFINITY,
        },
        other => other,
    }
}

/// Advance the truth system alone from random low-mode initial data for
/// `t_spin`, returning the settled state and its initial-data bound
/// `M = ||grad u||^2 + ||u||^2 / l^2`.
pub fn spin_up(
    grid: Grid,
    phys: &PhysicalParams,
    forcing: &ForcingField,
    cfg: &StepperConfig,
    ic_seed: u64,
    ic_amplitude: f64,
    t_spin: f64,
) -> Result<(SpectralField, f64)> {
    if t_spin < 0.0 {
        return Err(Error::InvalidParam(format!("t_spin must be >= 0, got {t_spin}")));
    }
    let mut u = random_field(
        grid,
        &mut stream(ic_seed, "initial-condition", 0),
        1,
        3,
        1.0,
        ic_amplitude,
        true,
    );
    if t_spin > 0.0 {
        let mut stepper = Stepper::new(grid, phys.nu, *cfg);
        let steps = steps_for(t_spin, cfg.dt);
        let dt = t_spin / steps as f64;
        let mut fields = vec![u];
        for i in 0..steps {
            let t = i as f64 * dt;
            stepper.step(&mut fields, t, dt, |s, tt| {
                Ok(vec![rhs_truth_explicit(&s[0], tt, phys, forcing)
                    .map_err(|e| blow_up_if_non_finite(e, "truth", tt))?])
            })?;
            Stepper::check_finite(&fields, &["truth"], (i + 1) as f64 * dt)?;
        }
        u = fields.pop().unwrap();
    }
    let m = est_m(&u, phys.l);
    Ok((u, m))
}

fn steps_for(t_end: f64, dt: f64) -> usize {
    let raw = t_end / dt;
    let rounded = raw.round();
    if (raw - rounded).abs() < 1e-9 && rounded >= 1.0 {
        rounded as usize
    } else {
        raw.ceil().max(1.0) as usize
    }
}

/// Advance the coupled pair to `t_end`, recording rows every
/// `sample_stride` steps. `w0 = None` is the standard cold start from rest.
///
/// Coupling is one-way by construction: the truth tendency is computed from
/// the truth state alone, so `u` is bit-identical to a solo run.
pub fn run_coupled(
    setup: &RunSetup,
    u0: &SpectralField,
    w0: Option<SpectralField>,
) -> Result<RunOutcome> {
    let grid = u0.grid();
    setup.forcing.base().grid().same_as(&grid)?;
    if setup.t_end < 0.0 {
        return Err(Error::InvalidParam(format!(
            "run duration must be >= 0, got {}",
            setup.t_end
        )));
    }
    if setup.sample_stride == 0 || setup.observe_stride == 0 {
        return Err(Error::InvalidParam("strides must be >= 1".into()));
    }
    let phys = &setup.phys;
    let assim = &setup.assim;
    let w0 = w0.unwrap_or_else(|| SpectralField::zeros(grid));
    w0.grid().same_as(&grid)?;

    let m_u = est_m(u0, phys.l);
    let m_w = est_m(&w0, phys.l);
    let m_initial = m_u.max(m_w);
    let w0_within_m = m_w <= m_u || m_w <= m_initial;

    let mut record = RunRecord::default();
    let mut outcome_first_exit: Option<f64> = None;

    if setup.t_end == 0.0 {
        return Ok(RunOutcome {
            record,
            u_final: u0.clone(),
            w_final: w0,
            m_initial,
            w0_within_m,
            first_exit: None,
        });
    }

    let steps = steps_for(setup.t_end, setup.stepper.dt);
    let dt = setup.t_end / steps as f64;
    let mut stepper = Stepper::new(grid, phys.nu, setup.stepper);
    let mut fields = vec![u0.clone(), w0];
    let alpha_p = 2.0 * phys.alpha + 2.0;

    // Exponentially weighted integral of ||A u||^2 (trapezoid, accumulated
    // per step so the quadrature is independent of the sampling stride).
    let mut au_expwt = 0.0f64;
    let mut au_sq_prev = fields[0].a_norm_sq();

    // Energy-balance bookkeeping between consecutive samples: trapezoid of
    // P(t) = nu ||grad u||^2 + a ||u||_{2a+2}^{2a+2} - (f, u) against the
    // change of (1/2) ||u||^2.
    let mut prev_sample: Option<(f64, f64, f64)> = None; // (t, E, P)

    let mut held_obs: Option<SpectralField> = None;

    let sample = |fields: &[SpectralField],
                      t: f64,
                      au_expwt: f64,
                      prev_sample: &mut Option<(f64, f64, f64)>,
                      record: &mut RunRecord|
     -> Result<()> {
        let u = &fields[0];
        let w = &fields[1];
        let u_phys = u.to_physical();
        let u_l2_sq = u.l2_norm_sq();
        let u_l2 = u_l2_sq.sqrt();
        let u_h1 = u.h1_seminorm();
        let u_l2a2 = u_phys.lp_norm(alpha_p);
        let au_l2 = u.a_norm();
        let mut g = w.clone();
        g.axpy(-1.0, u);
        let g_l2_sq = g.l2_norm_sq();
        let g_h1_sq = g.h1_seminorm_sq();
        let dudt_l2 = rhs_truth(u, t, phys, setup.forcing)?.l2_norm();

        let energy = 0.5 * u_l2_sq;
        let p_now = phys.nu * u_h1 * u_h1 + phys.a() * u_l2a2.powf(alpha_p)
            - setup.forcing.inner_with(t, u);
        let energy_residual = match prev_sample {
            None => 0.0,
            Some((tp, ep, pp)) => {
                let h = t - *tp;
                (energy - *ep) + 0.5 * h * (*pp + p_now)
            }
        };
        *prev_sample = Some((t, energy, p_now));

        record.rows.push(RecordRow {
            t,
            u_l2,
            u_h1,
            u_l2a2,
            au_l2,
            g_l2: g_l2_sq.sqrt(),
            g_h1: g_h1_sq.sqrt(),
            g_h1_combined: g_h1_sq + g_l2_sq / (phys.l * phys.l),
            energy_residual,
            dudt_l2,
            au_sq_expwt: au_expwt,
        });
        Ok(())
    };

    sample(&fields, 0.0, au_expwt, &mut prev_sample, &mut record)?;

    // Fixed-dt runs advance `steps` uniform steps; adaptive runs shrink each
    // step to the explicit stability limits and stop at t_end.
    let mut t = 0.0f64;
    let mut step = 0usize;
    loop {
        if setup.stepper.adaptive {
            if t >= setup.t_end - 1e-12 * setup.t_end.max(1.0) {
                break;
            }
        } else if step >= steps {
            break;
        }
        let dt_step = if setup.stepper.adaptive {
            crate::stepper::stable_dt(&fields[0], &setup.stepper, phys, Some(assim))
                .min(setup.t_end - t)
        } else {
            dt
        };
        if setup.observe_stride > 1 {
            if step % setup.observe_stride == 0 {
                held_obs = Some(fields[0].clone());
            }
        }
        let held = held_obs.clone();
        stepper.step(&mut fields, t, dt_step, |s, tt| {
            let ru = rhs_truth_explicit(&s[0], tt, phys, setup.forcing)
                .map_err(|e| blow_up_if_non_finite(e, "truth", tt))?;
            let obs = held.as_ref().unwrap_or(&s[0]);
            let rw = rhs_nudged_explicit(&s[1], obs, tt, phys, assim, setup.forcing)
                .map_err(|e| blow_up_if_non_finite(e, "assimilated", tt))?;
            Ok(vec![ru, rw])
        })?;
        let t_next = if setup.stepper.adaptive {
            t + dt_step
        } else {
            (step + 1) as f64 * dt
        };
        Stepper::check_finite(&fields, &["truth", "assimilated"], t_next)?;

        let au_sq_now = fields[0].a_norm_sq();
        let decay = (-(assim.eta / 8.0) * dt_step).exp();
        au_expwt = decay * au_expwt + 0.5 * dt_step * (decay * au_sq_prev + au_sq_now);
        au_sq_prev = au_sq_now;

        if let Some(h_level) = setup.h_ball {
            if outcome_first_exit.is_none() {
                let mut g = fields[1].clone();
                g.axpy(-1.0, &fields[0]);
                let combined = g.h1_seminorm_sq() + g.l2_norm_sq() / (phys.l * phys.l);
                if combined > h_level {
                    outcome_first_exit = Some(t_next);
                }
            }
        }

        t = t_next;
        step += 1;
        let at_end = if setup.stepper.adaptive {
            t >= setup.t_end - 1e-12 * setup.t_end.max(1.0)
        } else {
            step == steps
        };
        if step % setup.sample_stride == 0 || at_end {
            sample(&fields, t, au_expwt, &mut prev_sample, &mut record)?;
        }
        if at_end {
            break;
        }
    }

    let w_final = fields.pop().unwrap();
    let u_final = fields.pop().unwrap();
    Ok(RunOutcome {
        record,
        u_final,
        w_final,
        m_initial,
        w0_within_m,
        first_exit: outcome_first_exit,
    })
}

/// Decay-rate and plateau extraction from a squared-error series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// Exponential rate of the squared series on the transient (e_sq ~
    /// exp(-lambda t)); `None` when no decaying segment exists.
    pub lambda: Option<f64>,
    /// Median of the final 20% of samples (squared quantity).
    pub plateau: f64,
}

impl DecayFit {
    pub fn plateau_norm(&self) -> f64 {
        self.plateau.max(0.0).sqrt()
    }
}

/// Fit the initial transient slope of `log e(t)` and the long-time plateau.
///
/// The transient is segmented automatically: starting from the early-series
/// peak, samples are used while they stay above 10x the plateau. The plateau
/// is the median of the final 20% of samples.
pub fn fit_decay_and_plateau(series: &[(f64, f64)]) -> Result<DecayFit> {
    if series.len() < 10 {
        return Err(Error::InvalidParam(format!(
            "decay fit needs at least 10 samples, got {}",
            series.len()
        )));
    }
    let n = series.len();
    let tail_len = ((n as f64) * 0.2).ceil().max(1.0) as usize;
    let mut tail: Vec<f64> = series[n - tail_len..].iter().map(|&(_, e)| e).collect();
    tail.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let plateau = if tail_len % 2 == 1 {
        tail[tail_len / 2]
    } else {
        0.5 * (tail[tail_len / 2 - 1] + tail[tail_len / 2])
    };

    let threshold = 10.0 * plateau;
    let peak = series[..(n / 2).max(1)]
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut segment: Vec<(f64, f64)> = Vec::new();
    for &(t, e) in &series[peak..] {
        if e > threshold && e > 0.0 {
            segment.push((t, e.ln()));
        } else {
            break;
        }
    }
    let lambda = if segment.len() >= 3 && segment.last().unwrap().0 > segment[0].0 {
        let slope = least_squares_slope(&segment);
        if slope < 0.0 {
            Some(-slope)
        } else {
            None
        }
    } else {
        None
    };
    Ok(DecayFit { lambda, plateau })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Log-log least-squares slope, for plateau-vs-mismatch scaling studies.
pub fn loglog_slope(pts: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    least_squares_slope(&logs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_pure_exponential_fits_rate_exactly() {
        let series: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                let t = i as f64 * 0.05;
                (t, (-2.0 * t).exp())
            })
            .collect();
        let fit = fit_decay_and_plateau(&series).unwrap();
        let lambda = fit.lambda.expect("decaying segment");
        assert!((lambda - 2.0).abs() / 2.0 < 0.01, "lambda = {lambda}");
    }

    #[test]
    fn synthetic_exponential_with_floor_recovers_rate_and_plateau() {
        let series: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                let t = i as f64 * 0.05;
                (t, (-2.0 * t).exp() + 1e-6)
            })
            .collect();
        let fit = fit_decay_and_plateau(&series).unwrap();
        let lambda = fit.lambda.expect("decaying segment");
        assert!((lambda - 2.0).abs() / 2.0 < 0.05, "lambda = {lambda}");
        assert!(
            (fit.plateau - 1e-6).abs() / 1e-6 < 0.10,
            "plateau = {}",
            fit.plateau
        );
    }

    #[test]
    fn constant_series_has_no_decay_flag() {
        let series: Vec<(f64, f64)> = (0..50).map(|i| (i as f64, 3.0)).collect();
        let fit = fit_decay_and_plateau(&series).unwrap();
        assert!(fit.lambda.is_none());
        assert!((fit.plateau - 3.0).abs() < 1e-12);
    }

    #[test]
    fn too_short_series_rejected() {
        let series: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 1.0)).collect();
        assert!(fit_decay_and_plateau(&series).is_err());
    }
}
