//! Closed-form constants of the synchronization analysis, hypothesis checks,
//! and verification of the a-priori estimates against measured trajectories.

mod apriori;
mod ladder;
mod logval;

pub use apriori::{all_hold, verify_apriori, EstimateVerdict, Verdict};
pub use ladder::{
    check_hypotheses, eval_k, eval_m_ladder, eval_thm31_constants, eval_thm32_33_constants,
    transcription_flags, BoundsConfig, HypothesesReport, HypothesisCheck, Ladder, Lemma44, Thm31,
    Thm31Branch, Thm3233,
};
pub use logval::{pv, PosVal};

use crate::error::Result;
use crate::params::{AssimParams, PhysicalParams};

/// Assembled report: every evaluated constant (value and log10), hypothesis
/// verdicts, a-priori estimate verdicts, and the literal-transcription flags.
#[derive(Debug, Clone, Default)]
pub struct BoundsReport {
    /// (symbol, value). Values may be +inf; log10 is always finite-ish.
    pub constants: Vec<(String, PosVal)>,
    pub hypotheses: Vec<HypothesisCheck>,
    pub thm31_hypotheses_ok: Option<bool>,
    pub thm32_33_hypotheses_ok: Option<bool>,
    pub apriori: Vec<EstimateVerdict>,
    pub flags: Vec<String>,
    /// Free-form extras attached by the harness (fit results, run flags).
    pub extras: Vec<(String, String)>,
}

impl BoundsReport {
    /// Evaluate everything evaluable at this parameter point.
    pub fn evaluate(
        phys: &PhysicalParams,
        assim: &AssimParams,
        cfg: &BoundsConfig,
        m: f64,
    ) -> Result<BoundsReport> {
        let mut report = BoundsReport::default();
        let ladder = eval_m_ladder(phys, cfg, m)?;
        report.push("M", pv(m));
        report.push("K", ladder.k);
        report.push("M1", ladder.m1);
        report.push("M2", ladder.m2);
        report.push("M3", ladder.m3);
        report.push("M4", ladder.m4);
        if let Some(hi) = &ladder.higher {
            report.push("K2", hi.k2);
            report.push("M5", hi.m5);
            report.push("M6", hi.m6);
            report.push("M7", hi.m7);
            report.push("M8", hi.m8);
        } else {
            report
                .extras
                .push(("M5_M8".into(), "unavailable (requires 1 < alpha < 2)".into()));
        }

        match eval_thm31_constants(phys, assim, cfg, &ladder) {
            Ok(t31) => {
                match t31.branch {
                    Thm31Branch::A0 => report.push("A0", t31.a_value),
                    Thm31Branch::A1 => report.push("A1", t31.a_value),
                }
                report.push("L2_coef_alpha_mismatch", t31.coef_alpha);
                report.push("L2_coef_atilde_mismatch", t31.coef_ab);
                report.push("L2_bound_offset", t31.offset());
            }
            Err(e) => report.extras.push(("L2_constants".into(), e.to_string())),
        }

        let thm3233 = match eval_thm32_33_constants(phys, assim, cfg, &ladder) {
            Ok(t) => {
                report.push("B", t.b);
                report.push("C", t.c);
                report.push("D", t.d);
                report.push("Ctilde", t.ctilde);
                report.push("Dtilde", t.dtilde);
                report.push("H", t.h_const);
                report.push("Ztilde1", t.ztilde1);
                report.push("Z3", t.z3);
                report.push("Z5", t.z5);
                report.push("Z2_coeff_of_au_sq", t.z2_coeff);
                report.push("Z4_coeff_of_au_sq", t.z4_coeff);
                report.push("Z6_coeff_of_au_sq", t.z6_coeff);
                report.push("Cor43_bound", t.q_cor43);
                report.push("kappa_2beta", pv(t.kappa));
                report.extras.push((
                    "Z1".into(),
                    "time-dependent in (w, g); its uniform H-ball form is Ztilde1".into(),
                ));
                report.extras.push((
                    "Z2_Z4_Z6".into(),
                    "time-dependent via ||A u(t)||^2; coefficients reported as *_coeff_of_au_sq".into(),
                ));
                Some(t)
            }
            Err(e) => {
                report.extras.push(("H1_constants".into(), e.to_string()));
                None
            }
        };

        let hyp = check_hypotheses(phys, assim, cfg, &ladder, thm3233.as_ref());
        report.thm31_hypotheses_ok = Some(hyp.thm31_ok);
        report.thm32_33_hypotheses_ok = hyp.thm32_33_ok;
        report.hypotheses = hyp.checks;
        report.flags = transcription_flags().into_iter().map(String::from).collect();
        Ok(report)
    }

    fn push(&mut self, name: &str, v: PosVal) {
        self.constants.push((name.into(), v));
    }

    pub fn ladder(
        phys: &PhysicalParams,
        cfg: &BoundsConfig,
        m: f64,
    ) -> Result<Ladder> {
        eval_m_ladder(phys, cfg, m)
    }

    /// Flat key = value text rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, v) in &self.constants {
            let val = v.value();
            if val.is_finite() {
                out.push_str(&format!("{name} = {val}\n"));
            } else {
                out.push_str(&format!("{name} = overflow\n"));
            }
            out.push_str(&format!("{name}_log10 = {}\n", v.log10()));
        }
        for h in &self.hypotheses {
            out.push_str(&format!(
                "hypothesis.{} = {}\n",
                h.name,
                if h.passes { "pass" } else { "fail" }
            ));
            out.push_str(&format!("hypothesis.{}_lhs_log10 = {}\n", h.name, h.lhs.log10()));
            out.push_str(&format!("hypothesis.{}_rhs_log10 = {}\n", h.name, h.rhs.log10()));
        }
        if let Some(ok) = self.thm31_hypotheses_ok {
            out.push_str(&format!("hypotheses.l2_theorem = {}\n", pass_str(ok)));
        }
        if let Some(ok) = self.thm32_33_hypotheses_ok {
            out.push_str(&format!("hypotheses.h1_theorems = {}\n", pass_str(ok)));
        }
        for v in &self.apriori {
            out.push_str(&format!(
                "apriori.{} = {:?} (max measured/bound = {:.3e}; window {})\n",
                v.name, v.verdict, v.max_ratio, v.window
            ));
        }
        for (k, v) in &self.extras {
            out.push_str(&format!("{k} = {v}\n"));
        }
        for f in &self.flags {
            out.push_str(&format!("transcription_flag = {f}\n"));
        }
        out
    }

    /// CSV rendering: one row per constant.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,value,log10\n");
        for (name, v) in &self.constants {
            let val = v.value();
            let shown = if val.is_finite() {
                format!("{val}")
            } else {
                "overflow".into()
            };
            out.push_str(&format!("{name},{shown},{}\n", v.log10()));
        }
        out
    }
}

fn pass_str(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}
