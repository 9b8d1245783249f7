//! Flat `key = value` experiment configuration with dotted section prefixes.
//!
//! Parsing is fail-closed: unknown or duplicate keys are rejected by name.
//! Every key has a default, so the empty file is a valid minimal config.
//! `to_canonical()` emits a file that re-parses to a structurally equal
//! config; it doubles as the metadata preamble embedded in every output.

use bfed_core::bounds::BoundsConfig;
use bfed_core::interpolant::{default_constants, InterpolantKind, InterpolantSpec};
use bfed_core::params::{AssimParams, ForcingKind, ForcingSpec, PhysicalParams};
use bfed_core::stepper::{Scheme, StepperConfig};
use bfed_core::{Error, Grid, Result};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub grid_n: usize,
    pub grid_l: f64,
    pub dealias_fraction: f64,

    pub nu: f64,
    pub alpha: f64,
    pub a_tilde: f64,

    pub beta: f64,
    pub b_tilde: f64,
    pub eta: f64,
    pub observe_stride: usize,

    pub interpolant_kind: InterpolantKind,
    pub interpolant_h: f64,
    /// `None` = use the declared defaults of the kind.
    pub interpolant_c0: Option<f64>,
    pub interpolant_c1: Option<f64>,

    pub forcing_kind: ForcingKind,
    pub forcing_amplitude: f64,
    pub forcing_kmin: i64,
    pub forcing_kmax: i64,
    pub forcing_seed: u64,
    pub forcing_modulation_freq: Option<f64>,

    pub dt: f64,
    pub scheme: Scheme,
    pub cfl_safety: f64,
    pub adaptive: bool,

    pub c3: f64,
    pub c4: f64,
    pub c6: f64,
    pub c42_5: f64,
    pub c10: f64,
    pub c6beta: f64,
    pub c_inf: f64,
    pub kappa: Option<f64>,
    /// Initial-data bound for `bounds`-only evaluation.
    pub bounds_m: Option<f64>,

    pub t_end: f64,
    pub t_spin: f64,
    pub sample_stride: usize,
    pub seed: u64,
    pub ic_amplitude: f64,
    pub output: String,

    pub sweep_beta: Vec<f64>,
    pub sweep_b_tilde: Vec<f64>,
    pub sweep_eta: Vec<f64>,
    pub sweep_h: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let l = 2.0 * std::f64::consts::PI;
        ExperimentConfig {
            grid_n: 16,
            grid_l: l,
            dealias_fraction: 2.0 / 3.0,
            nu: 0.1,
            alpha: 2.0,
            a_tilde: 0.1,
            beta: 2.0,
            b_tilde: 0.1,
            eta: 10.0,
            observe_stride: 1,
            interpolant_kind: InterpolantKind::FourierLowpass,
            interpolant_h: l / 4.0,
            interpolant_c0: None,
            interpolant_c1: None,
            forcing_kind: ForcingKind::RandomLowMode,
            forcing_amplitude: 0.02,
            forcing_kmin: 1,
            forcing_kmax: 2,
            forcing_seed: 7,
            forcing_modulation_freq: None,
            dt: 0.02,
            scheme: Scheme::IfRk3,
            cfl_safety: 0.5,
            adaptive: false,
            c3: 1.0,
            c4: 1.0,
            c6: 1.0,
            c42_5: 1.0,
            c10: 1.0,
            c6beta: 1.0,
            c_inf: 1.0,
            kappa: None,
            bounds_m: None,
            t_end: 10.0,
            t_spin: 5.0,
            sample_stride: 10,
            seed: 42,
            ic_amplitude: 0.05,
            output: "out".into(),
            sweep_beta: Vec::new(),
            sweep_b_tilde: Vec::new(),
            sweep_eta: Vec::new(),
            sweep_h: Vec::new(),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| Error::InvalidParam(format!("key {key}: expected a number, got '{v}'")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>()
        .map_err(|_| Error::InvalidParam(format!("key {key}: expected a nonnegative integer, got '{v}'")))
}

fn parse_i64(key: &str, v: &str) -> Result<i64> {
    v.parse::<i64>()
        .map_err(|_| Error::InvalidParam(format!("key {key}: expected an integer, got '{v}'")))
}

fn parse_u64(key: &str, v: &str) -> Result<u64> {
    v.parse::<u64>()
        .map_err(|_| Error::InvalidParam(format!("key {key}: expected an unsigned integer, got '{v}'")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::InvalidParam(format!(
            "key {key}: expected true/false, got '{v}'"
        ))),
    }
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(|s| parse_f64(key, s.trim()))
        .collect::<Result<Vec<f64>>>()
}

impl ExperimentConfig {
    pub fn parse_str(text: &str) -> Result<ExperimentConfig> {
        let mut seen: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidParam(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if seen.insert(key.clone(), value).is_some() {
                return Err(Error::InvalidParam(format!("duplicate key '{key}'")));
            }
        }

        let mut cfg = ExperimentConfig::default();
        for (key, v) in &seen {
            match key.as_str() {
                "grid.n" => cfg.grid_n = parse_usize(key, v)?,
                "grid.l" => cfg.grid_l = parse_f64(key, v)?,
                "grid.dealias_fraction" => cfg.dealias_fraction = parse_f64(key, v)?,
                "physical.nu" => cfg.nu = parse_f64(key, v)?,
                "physical.alpha" => cfg.alpha = parse_f64(key, v)?,
                "physical.a_tilde" => cfg.a_tilde = parse_f64(key, v)?,
                "assim.beta" => cfg.beta = parse_f64(key, v)?,
                "assim.b_tilde" => cfg.b_tilde = parse_f64(key, v)?,
                "assim.eta" => cfg.eta = parse_f64(key, v)?,
                "assim.observe_stride" => cfg.observe_stride = parse_usize(key, v)?,
                "interpolant.kind" => cfg.interpolant_kind = parse_kind(v)?,
                "interpolant.h" => cfg.interpolant_h = parse_f64(key, v)?,
                "interpolant.c0" => cfg.interpolant_c0 = Some(parse_f64(key, v)?),
                "interpolant.c1" => cfg.interpolant_c1 = Some(parse_f64(key, v)?),
                "forcing.kind" => cfg.forcing_kind = parse_forcing_kind(v)?,
                "forcing.amplitude" => cfg.forcing_amplitude = parse_f64(key, v)?,
                "forcing.kmin" => cfg.forcing_kmin = parse_i64(key, v)?,
                "forcing.kmax" => cfg.forcing_kmax = parse_i64(key, v)?,
                "forcing.seed" => cfg.forcing_seed = parse_u64(key, v)?,
                "forcing.modulation_freq" => {
                    cfg.forcing_modulation_freq = Some(parse_f64(key, v)?)
                }
                "stepper.dt" => cfg.dt = parse_f64(key, v)?,
                "stepper.scheme" => {
                    cfg.scheme = match v.as_str() {
                        "if-rk3" => Scheme::IfRk3,
                        "if-euler" => Scheme::IfEuler,
                        other => {
                            return Err(Error::InvalidParam(format!(
                                "stepper.scheme: unknown scheme '{other}' (if-rk3 | if-euler)"
                            )))
                        }
                    }
                }
                "stepper.cfl_safety" => cfg.cfl_safety = parse_f64(key, v)?,
                "stepper.adaptive" => cfg.adaptive = parse_bool(key, v)?,
                "bounds.c3" => cfg.c3 = parse_f64(key, v)?,
                "bounds.c4" => cfg.c4 = parse_f64(key, v)?,
                "bounds.c6" => cfg.c6 = parse_f64(key, v)?,
                "bounds.c42_5" => cfg.c42_5 = parse_f64(key, v)?,
                "bounds.c10" => cfg.c10 = parse_f64(key, v)?,
                "bounds.c6beta" => cfg.c6beta = parse_f64(key, v)?,
                "bounds.c_inf" => cfg.c_inf = parse_f64(key, v)?,
                "bounds.kappa" => cfg.kappa = Some(parse_f64(key, v)?),
                "bounds.m" => cfg.bounds_m = Some(parse_f64(key, v)?),
                "run.t" => cfg.t_end = parse_f64(key, v)?,
                "run.t_spin" => cfg.t_spin = parse_f64(key, v)?,
                "run.sample_stride" => cfg.sample_stride = parse_usize(key, v)?,
                "run.seed" => cfg.seed = parse_u64(key, v)?,
                "run.ic_amplitude" => cfg.ic_amplitude = parse_f64(key, v)?,
                "run.output" => cfg.output = v.clone(),
                "sweep.beta" => cfg.sweep_beta = parse_list(key, v)?,
                "sweep.b_tilde" => cfg.sweep_b_tilde = parse_list(key, v)?,
                "sweep.eta" => cfg.sweep_eta = parse_list(key, v)?,
                "sweep.h" => cfg.sweep_h = parse_list(key, v)?,
                _ => {
                    return Err(Error::InvalidParam(format!("unknown key '{key}'")));
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse_file(path: &std::path::Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)?;
        ExperimentConfig::parse_str(&text)
    }

    /// Validate by constructing every component the run will use.
    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        self.physical()?;
        self.assim()?;
        self.forcing().validate()?;
        self.stepper()?;
        self.bounds_template().validate()?;
        if self.sample_stride == 0 || self.observe_stride == 0 {
            return Err(Error::InvalidParam("strides must be >= 1".into()));
        }
        if self.t_end < 0.0 || self.t_spin < 0.0 {
            return Err(Error::InvalidParam("run durations must be >= 0".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid_n, self.grid_l, self.dealias_fraction)
    }

    pub fn physical(&self) -> Result<PhysicalParams> {
        PhysicalParams::new(self.nu, self.grid_l, self.alpha, self.a_tilde)
    }

    pub fn interpolant(&self) -> Result<InterpolantSpec> {
        self.interpolant_with_h(self.interpolant_h)
    }

    pub fn interpolant_with_h(&self, h: f64) -> Result<InterpolantSpec> {
        let (d0, d1) = default_constants(self.interpolant_kind);
        InterpolantSpec::new(
            self.interpolant_kind,
            h,
            self.interpolant_c0.unwrap_or(d0),
            self.interpolant_c1.unwrap_or(d1),
        )
    }

    pub fn assim(&self) -> Result<AssimParams> {
        AssimParams::new(self.beta, self.b_tilde, self.eta, self.interpolant()?)
    }

    pub fn forcing(&self) -> ForcingSpec {
        ForcingSpec {
            kind: self.forcing_kind,
            amplitude: self.forcing_amplitude,
            m_min: self.forcing_kmin,
            m_max: self.forcing_kmax,
            seed: self.forcing_seed,
            modulation_freq: self.forcing_modulation_freq,
        }
    }

    pub fn stepper(&self) -> Result<StepperConfig> {
        StepperConfig::new(self.dt, self.scheme, self.cfl_safety, self.adaptive)
    }

    /// Bounds config without the forcing norms (filled from the realized
    /// forcing by the commands).
    pub fn bounds_template(&self) -> BoundsConfig {
        BoundsConfig {
            c3: self.c3,
            c4: self.c4,
            c6: self.c6,
            c42_5: self.c42_5,
            c10: self.c10,
            c6beta: self.c6beta,
            c_inf: self.c_inf,
            kappa: self.kappa,
            f_norm: 0.0,
            ft_norm: 0.0,
        }
    }

    pub fn to_canonical(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        kv("grid.n", self.grid_n.to_string());
        kv("grid.l", self.grid_l.to_string());
        kv("grid.dealias_fraction", self.dealias_fraction.to_string());
        kv("physical.nu", self.nu.to_string());
        kv("physical.alpha", self.alpha.to_string());
        kv("physical.a_tilde", self.a_tilde.to_string());
        kv("assim.beta", self.beta.to_string());
        kv("assim.b_tilde", self.b_tilde.to_string());
        kv("assim.eta", self.eta.to_string());
        kv("assim.observe_stride", self.observe_stride.to_string());
        kv("interpolant.kind", self.interpolant_kind.name().to_string());
        kv("interpolant.h", self.interpolant_h.to_string());
        if let Some(c0) = self.interpolant_c0 {
            kv("interpolant.c0", c0.to_string());
        }
        if let Some(c1) = self.interpolant_c1 {
            kv("interpolant.c1", c1.to_string());
        }
        kv("forcing.kind", forcing_kind_name(self.forcing_kind).to_string());
        kv("forcing.amplitude", self.forcing_amplitude.to_string());
        kv("forcing.kmin", self.forcing_kmin.to_string());
        kv("forcing.kmax", self.forcing_kmax.to_string());
        kv("forcing.seed", self.forcing_seed.to_string());
        if let Some(w) = self.forcing_modulation_freq {
            kv("forcing.modulation_freq", w.to_string());
        }
        kv("stepper.dt", self.dt.to_string());
        kv(
            "stepper.scheme",
            match self.scheme {
                Scheme::IfRk3 => "if-rk3",
                Scheme::IfEuler => "if-euler",
            }
            .to_string(),
        );
        kv("stepper.cfl_safety", self.cfl_safety.to_string());
        kv("stepper.adaptive", self.adaptive.to_string());
        kv("bounds.c3", self.c3.to_string());
        kv("bounds.c4", self.c4.to_string());
        kv("bounds.c6", self.c6.to_string());
        kv("bounds.c42_5", self.c42_5.to_string());
        kv("bounds.c10", self.c10.to_string());
        kv("bounds.c6beta", self.c6beta.to_string());
        kv("bounds.c_inf", self.c_inf.to_string());
        if let Some(k) = self.kappa {
            kv("bounds.kappa", k.to_string());
        }
        if let Some(m) = self.bounds_m {
            kv("bounds.m", m.to_string());
        }
        kv("run.t", self.t_end.to_string());
        kv("run.t_spin", self.t_spin.to_string());
        kv("run.sample_stride", self.sample_stride.to_string());
        kv("run.seed", self.seed.to_string());
        kv("run.ic_amplitude", self.ic_amplitude.to_string());
        kv("run.output", self.output.clone());
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        if !self.sweep_beta.is_empty() {
            kv("sweep.beta", list(&self.sweep_beta));
        }
        if !self.sweep_b_tilde.is_empty() {
            kv("sweep.b_tilde", list(&self.sweep_b_tilde));
        }
        if !self.sweep_eta.is_empty() {
            kv("sweep.eta", list(&self.sweep_eta));
        }
        if !self.sweep_h.is_empty() {
            kv("sweep.h", list(&self.sweep_h));
        }
        out
    }

    /// The canonical config as a commented metadata preamble.
    pub fn preamble(&self) -> String {
        self.to_canonical()
            .lines()
            .map(|l| format!("# {l}\n"))
            .collect()
    }
}

fn parse_kind(v: &str) -> Result<InterpolantKind> {
    match v {
        "fourier-lowpass" => Ok(InterpolantKind::FourierLowpass),
        "volume-average" => Ok(InterpolantKind::VolumeAverage),
        "trilinear-nodal" => Ok(InterpolantKind::TrilinearNodal),
        other => Err(Error::InvalidParam(format!(
            "interpolant.kind: unknown kind '{other}' (fourier-lowpass | volume-average | trilinear-nodal)"
        ))),
    }
}

fn parse_forcing_kind(v: &str) -> Result<ForcingKind> {
    match v {
        "zero" => Ok(ForcingKind::Zero),
        "taylor-green" => Ok(ForcingKind::TaylorGreen),
        "random-low-mode" => Ok(ForcingKind::RandomLowMode),
        other => Err(Error::InvalidParam(format!(
            "forcing.kind: unknown kind '{other}' (zero | taylor-green | random-low-mode)"
        ))),
    }
}

fn forcing_kind_name(k: ForcingKind) -> &'static str {
    match k {
        ForcingKind::Zero => "zero",
        ForcingKind::TaylorGreen => "taylor-green",
        ForcingKind::RandomLowMode => "random-low-mode",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_valid_with_defaults() {
        let cfg = ExperimentConfig::parse_str("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn unknown_key_rejected_by_name() {
        let err = ExperimentConfig::parse_str("alpha_guess = 2.0").unwrap_err();
        assert!(err.to_string().contains("alpha_guess"), "{err}");
    }

    #[test]
    fn duplicate_key_rejected() {
        let err = ExperimentConfig::parse_str("run.t = 1\nrun.t = 2").unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn canonical_round_trip_is_structural_identity() {
        let mut cfg = ExperimentConfig::default();
        cfg.grid_n = 32;
        cfg.eta = 12.5;
        cfg.sweep_b_tilde = vec![0.101, 0.102, 0.104];
        cfg.forcing_modulation_freq = Some(0.25);
        cfg.kappa = Some(1.5);
        let reparsed = ExperimentConfig::parse_str(&cfg.to_canonical()).unwrap();
        assert_eq!(cfg, reparsed);
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let cfg = ExperimentConfig::parse_str(
            "# a comment\n\nrun.t = 3.0   # trailing comment\n",
        )
        .unwrap();
        assert_eq!(cfg.t_end, 3.0);
    }

    #[test]
    fn invalid_values_surface_component_errors() {
        assert!(ExperimentConfig::parse_str("grid.n = 7").is_err());
        assert!(ExperimentConfig::parse_str("physical.alpha = 0.5").is_err());
        assert!(ExperimentConfig::parse_str("stepper.dt = 0").is_err());
    }
}
