use crate::error::{Error, Result};
use crate::field::{random_field, PhysicalField, SpectralField};
use crate::grid::Grid;
use crate::interpolant::InterpolantSpec;
use crate::operators::{dealias_inplace, leray_project_inplace};
use crate::rng::stream;
use num_complex::Complex64;

/// Parameters of the reference ("truth") system.
///
/// The damping coefficient is carried in dimensionless form `a_tilde`; the
/// dimensional coefficient is always derived as
/// `a = a_tilde * l^(2 alpha - 2) / nu^(2 alpha - 1)`
/// so that the damping term balances units for any exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub nu: f64,
    pub l: f64,
    pub alpha: f64,
    pub a_tilde: f64,
}

impl PhysicalParams {
    pub fn new(nu: f64, l: f64, alpha: f64, a_tilde: f64) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(Error::InvalidParam(format!("nu must be > 0, got {nu}")));
        }
        if !(l > 0.0) {
            return Err(Error::InvalidParam(format!("l must be > 0, got {l}")));
        }
        if !(alpha > 1.0) {
            return Err(Error::InvalidParam(format!("alpha must be > 1, got {alpha}")));
        }
        if !(a_tilde > 0.0) {
            return Err(Error::InvalidParam(format!(
                "a_tilde must be > 0, got {a_tilde}"
            )));
        }
        Ok(PhysicalParams { nu, l, alpha, a_tilde })
    }

    /// Dimensional damping coefficient of the truth system.
    pub fn a(&self) -> f64 {
        self.a_tilde * self.l.powf(2.0 * self.alpha - 2.0) / self.nu.powf(2.0 * self.alpha - 1.0)
    }
}

/// Parameters of the assimilated (observer) system.
#[derive(Debug, Clone, PartialEq)]
pub struct AssimParams {
    pub beta: f64,
    pub b_tilde: f64,
    pub eta: f64,
    pub interpolant: InterpolantSpec,
}

impl AssimParams {
    pub fn new(beta: f64, b_tilde: f64, eta: f64, interpolant: InterpolantSpec) -> Result<Self> {
        if !(beta > 1.0) {
            return Err(Error::InvalidParam(format!("beta must be > 1, got {beta}")));
        }
        if !(b_tilde > 0.0) {
            return Err(Error::InvalidParam(format!(
                "b_tilde must be > 0, got {b_tilde}"
            )));
        }
        if !(eta >= 0.0) {
            return Err(Error::InvalidParam(format!("eta must be >= 0, got {eta}")));
        }
        Ok(AssimParams { beta, b_tilde, eta, interpolant })
    }

    /// Dimensional damping coefficient of the guess system,
    /// `b = b_tilde * l^(2 beta - 2) / nu^(2 beta - 1)`.
    pub fn b(&self, phys: &PhysicalParams) -> f64 {
        self.b_tilde * phys.l.powf(2.0 * self.beta - 2.0) / phys.nu.powf(2.0 * self.beta - 1.0)
    }
}

/// Body-force selection. All kinds produce divergence-free, zero-mean fields
/// with a uniformly bounded L2 norm; the optional sinusoidal modulation keeps
/// both the force and its time derivative uniformly bounded.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingSpec {
    pub kind: ForcingKind,
    pub amplitude: f64,
    pub m_min: i64,
    pub m_max: i64,
    pub seed: u64,
    pub modulation_freq: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcingKind {
    Zero,
    TaylorGreen,
    RandomLowMode,
}

impl ForcingSpec {
    pub fn zero() -> Self {
        ForcingSpec {
            kind: ForcingKind::Zero,
            amplitude: 0.0,
            m_min: 1,
            m_max: 1,
            seed: 0,
            modulation_freq: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.amplitude < 0.0 || !self.amplitude.is_finite() {
            return Err(Error::InvalidParam(format!(
                "forcing amplitude must be finite and >= 0, got {}",
                self.amplitude
            )));
        }
        if self.m_min < 1 || self.m_max < self.m_min {
            return Err(Error::InvalidParam(format!(
                "forcing mode range must satisfy 1 <= kmin <= kmax, got [{}, {}]",
                self.m_min, self.m_max
            )));
        }
        if let Some(w) = self.modulation_freq {
            if !(w > 0.0) {
                return Err(Error::InvalidParam(format!(
                    "forcing modulation frequency must be > 0, got {w}"
                )));
            }
        }
        Ok(())
    }

    /// Build the concrete forcing field on `grid`.
    pub fn realize(&self, grid: Grid) -> Result<ForcingField> {
        self.validate()?;
        let base = match self.kind {
            ForcingKind::Zero => SpectralField::zeros(grid),
            ForcingKind::RandomLowMode => random_field(
                grid,
                &mut stream(self.seed, "forcing", 0),
                self.m_min,
                self.m_max,
                1.0,
                self.amplitude,
                true,
            ),
            ForcingKind::TaylorGreen => taylor_green(grid, self.amplitude)?,
        };
        Ok(ForcingField {
            base,
            modulation_freq: self.modulation_freq,
        })
    }
}

/// Realized forcing: a frozen spectral profile with an optional bounded
/// time modulation `factor(t) = 1 + sin(w t) / 2`.
#[derive(Debug, Clone)]
pub struct ForcingField {
    base: SpectralField,
    modulation_freq: Option<f64>,
}

const MODULATION_DEPTH: f64 = 0.5;

impl ForcingField {
    pub fn base(&self) -> &SpectralField {
        &self.base
    }

    pub fn factor(&self, t: f64) -> f64 {
        match self.modulation_freq {
            None => 1.0,
            Some(w) => 1.0 + MODULATION_DEPTH * (w * t).sin(),
        }
    }

    /// `f(t)` as a spectral field.
    pub fn at(&self, t: f64) -> SpectralField {
        let mut f = self.base.clone();
        f.scale(self.factor(t));
        f
    }

    /// (f(t), u)_{L2} without materializing the scaled field.
    pub fn inner_with(&self, t: f64, u: &SpectralField) -> f64 {
        self.factor(t) * self.base.inner(u)
    }

    /// `sup_t ||f(t)||_{L2}`.
    pub fn sup_l2(&self) -> f64 {
        let sup_factor = match self.modulation_freq {
            None => 1.0,
            Some(_) => 1.0 + MODULATION_DEPTH,
        };
        sup_factor * self.base.l2_norm()
    }

    /// `sup_t ||f_t(t)||_{L2}` (zero for frozen forcing).
    pub fn sup_dt_l2(&self) -> f64 {
        match self.modulation_freq {
            None => 0.0,
            Some(w) => MODULATION_DEPTH * w * self.base.l2_norm(),
        }
    }
}

/// Taylor-Green-type cellular force, divergence-free by construction,
/// rescaled so its L2 norm equals `amplitude`.
fn taylor_green(grid: Grid, amplitude: f64) -> Result<SpectralField> {
    let n = grid.n();
    let mut p = PhysicalField::zeros(grid);
    let two_pi_over_l = 2.0 * std::f64::consts::PI / grid.l();
    for ix in 0..n {
        let x = ix as f64 * grid.spacing() * two_pi_over_l;
        for iy in 0..n {
            let y = iy as f64 * grid.spacing() * two_pi_over_l;
            for iz in 0..n {
                let z = iz as f64 * grid.spacing() * two_pi_over_l;
                let idx = grid.idx(ix, iy, iz);
                p.component_mut(0)[idx] = x.sin() * y.cos() * z.cos();
                p.component_mut(1)[idx] = -x.cos() * y.sin() * z.cos();
            }
        }
    }
    let mut s = p.to_spectral()?;
    leray_project_inplace(&mut s);
    dealias_inplace(&mut s);
    for c in 0..3 {
        s.set_mode(c, 0, 0, 0, Complex64::default());
    }
    let norm = s.l2_norm();
    if norm > 0.0 {
        s.scale(amplitude / norm);
    }
    Ok(s)
}
