//! Right-hand sides of the reference system
//! `du/dt + nu A u + B(u,u) + a G_alpha(u) = P f`
//! and the nudged observer system
//! `dw/dt + nu A w + B(w,w) + b G_beta(w) = P f + eta P(I_h(u) - I_h(w))`.

use crate::error::{Error, Result};
use crate::field::{PhysicalField, SpectralField};
use crate::interpolant::apply_interpolant;
use crate::operators::{dealias_inplace, leray_project_inplace, partial_derivative, project_dealias_inplace};
use crate::params::{AssimParams, ForcingField, PhysicalParams};
use crate::rng::stream;
use rand::Rng;

/// Advection `B(u, v) = P(u . grad v)`, computed pseudo-spectrally:
/// transform, pointwise product, transform back, project, dealias.
pub fn advection(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    u.grid().same_as(&v.grid())?;
    let u_phys = u.to_physical();
    advection_with_physical(&u_phys, v)
}

fn advection_with_physical(u_phys: &PhysicalField, v: &SpectralField) -> Result<SpectralField> {
    let grid = v.grid();
    u_phys.grid().same_as(&grid)?;
    let len = grid.num_modes();
    let mut conv = PhysicalField::zeros(grid);
    for axis in 0..3 {
        let dv = partial_derivative(v, axis).to_physical();
        let ua = u_phys.component(axis);
        for c in 0..3 {
            let dvc = dv.component(c);
            let out = conv.component_mut(c);
            for i in 0..len {
                out[i] += ua[i] * dvc[i];
            }
        }
    }
    let mut s = conv.to_spectral()?;
    leray_project_inplace(&mut s);
    dealias_inplace(&mut s);
    Ok(s)
}

/// `B(u, u)` in divergence form `P(d_j (u_j u_i))`, which coincides with the
/// convective form on divergence-free dealiased fields (the only inputs the
/// right-hand sides feed it) at 6 forward transforms instead of 12.
fn self_advection_with_physical(u_phys: &PhysicalField) -> Result<SpectralField> {
    let grid = u_phys.grid();
    let n = grid.n();
    let len = grid.num_modes();
    // Symmetric tensor u_i u_j: diagonal then off-diagonal entries.
    const PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];
    let tensor_index = |i: usize, j: usize| -> usize {
        match (i.min(j), i.max(j)) {
            (0, 0) => 0,
            (1, 1) => 1,
            (2, 2) => 2,
            (0, 1) => 3,
            (0, 2) => 4,
            _ => 5,
        }
    };
    let mut products: Vec<Vec<num_complex::Complex64>> = Vec::with_capacity(6);
    let mut buf = vec![0.0f64; len];
    for &(a, b) in &PAIRS {
        let ua = u_phys.component(a);
        let ub = u_phys.component(b);
        for i in 0..len {
            buf[i] = ua[i] * ub[i];
        }
        if !buf.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("advection product".into()));
        }
        let mut spec = vec![num_complex::Complex64::default(); len];
        crate::fft::forward_scalar_into(&buf, n, &mut spec);
        products.push(spec);
    }
    let (_, k) = grid.mode_table();
    let mut out = SpectralField::zeros(grid);
    for ix in 0..n {
        for iy in 0..n {
            let row = (ix * n + iy) * n;
            for iz in 0..n {
                let idx = row + iz;
                let kk = [k[ix], k[iy], k[iz]];
                for c in 0..3 {
                    let mut acc = num_complex::Complex64::default();
                    for (j, kj) in kk.iter().enumerate() {
                        acc += *kj * products[tensor_index(c, j)][idx];
                    }
                    out.component_mut(c)[idx] = num_complex::Complex64::new(0.0, 1.0) * acc;
                }
            }
        }
    }
    leray_project_inplace(&mut out);
    dealias_inplace(&mut out);
    Ok(out)
}

/// Damping `coeff * G_gamma(u)` with `G_gamma(u) = |u|^(2 gamma) u` evaluated
/// pointwise in physical space, then projected and dealiased.
///
/// `|u|^(2 gamma)` at `u = 0` is defined as 0 (continuous extension), so
/// exponents with `2 gamma < 1` cannot produce NaN at rest points.
pub fn damping(u: &SpectralField, gamma: f64, coeff: f64) -> Result<SpectralField> {
    if !(coeff > 0.0) {
        return Err(Error::InvalidParam(format!(
            "damping coefficient must be > 0, got {coeff}"
        )));
    }
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParam(format!("gamma must be >= 0, got {gamma}")));
    }
    let u_phys = u.to_physical();
    damping_with_physical(&u_phys, gamma, coeff)
}

/// `m2^gamma` with fast paths for the common integer/half-integer exponents.
#[inline]
fn pow_sq_mag(m2: f64, gamma: f64) -> f64 {
    if m2 <= 0.0 {
        return 0.0;
    }
    if gamma == 1.0 {
        m2
    } else if gamma == 2.0 {
        m2 * m2
    } else if gamma == 0.5 {
        m2.sqrt()
    } else if gamma == 1.5 {
        m2 * m2.sqrt()
    } else {
        m2.powf(gamma)
    }
}

fn damping_with_physical(
    u_phys: &PhysicalField,
    gamma: f64,
    coeff: f64,
) -> Result<SpectralField> {
    let grid = u_phys.grid();
    let n = grid.n();
    let len = grid.num_modes();
    let mut out = SpectralField::zeros(grid);
    let mut buf = vec![0.0f64; len];
    let mut mags = vec![0.0f64; len];
    for i in 0..len {
        let m2 = u_phys.component(0)[i] * u_phys.component(0)[i]
            + u_phys.component(1)[i] * u_phys.component(1)[i]
            + u_phys.component(2)[i] * u_phys.component(2)[i];
        mags[i] = coeff * pow_sq_mag(m2, gamma);
    }
    if !mags.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("damping magnitude".into()));
    }
    for c in 0..3 {
        let uc = u_phys.component(c);
        for i in 0..len {
            buf[i] = mags[i] * uc[i];
        }
        crate::fft::forward_scalar_into(&buf, n, out.component_mut(c));
    }
    project_dealias_inplace(&mut out);
    Ok(out)
}

/// RHS of the truth system: `P f - nu A u - B(u,u) - a G_alpha(u)`.
pub fn rhs_truth(
    u: &SpectralField,
    t: f64,
    phys: &PhysicalParams,
    forcing: &ForcingField,
) -> Result<SpectralField> {
    rhs_truth_impl(u, t, phys, forcing, phys.nu)
}

/// Non-stiff part `P f - B(u,u) - a G_alpha(u)` of the truth tendency.
///
/// The integrating-factor stepper handles `-nu A u` exactly per mode, so its
/// closures must feed it this variant; passing the full tendency would apply
/// the viscosity twice.
pub fn rhs_truth_explicit(
    u: &SpectralField,
    t: f64,
    phys: &PhysicalParams,
    forcing: &ForcingField,
) -> Result<SpectralField> {
    rhs_truth_impl(u, t, phys, forcing, 0.0)
}

fn rhs_truth_impl(
    u: &SpectralField,
    t: f64,
    phys: &PhysicalParams,
    forcing: &ForcingField,
    nu: f64,
) -> Result<SpectralField> {
    let grid = u.grid();
    forcing.base().grid().same_as(&grid)?;
    let u_phys = u.to_physical();
    let adv = self_advection_with_physical(&u_phys)?;
    let damp = damping_with_physical(&u_phys, phys.alpha, phys.a())?;
    // Every term is individually projected and dealiased (the forcing at
    // construction, u by precondition), so the sum needs no extra pass.
    Ok(assemble_rhs(u, nu, forcing, t, &adv, &damp, None))
}

/// Single-pass assembly of `factor(t) P f - nu A u - adv - damp [+ feedback]`.
fn assemble_rhs(
    u: &SpectralField,
    nu: f64,
    forcing: &ForcingField,
    t: f64,
    adv: &SpectralField,
    damp: &SpectralField,
    feedback: Option<(&SpectralField, f64)>,
) -> SpectralField {
    let grid = u.grid();
    let n = grid.n();
    let factor = forcing.factor(t);
    let f = forcing.base();
    let (_, k) = grid.mode_table();
    let mut out = SpectralField::zeros(grid);
    for ix in 0..n {
        let kx2 = k[ix] * k[ix];
        for iy in 0..n {
            let kxy2 = kx2 + k[iy] * k[iy];
            let row = (ix * n + iy) * n;
            for iz in 0..n {
                let idx = row + iz;
                let k2 = kxy2 + k[iz] * k[iz];
                for c in 0..3 {
                    let mut v = factor * f.component(c)[idx] - nu * k2 * u.component(c)[idx]
                        - adv.component(c)[idx]
                        - damp.component(c)[idx];
                    if let Some((fb, eta)) = feedback {
                        v += eta * fb.component(c)[idx];
                    }
                    out.component_mut(c)[idx] = v;
                }
            }
        }
    }
    out
}

/// RHS of the nudged system:
/// `P f - nu A w - B(w,w) - b G_beta(w) + eta P(I_h(u_obs) - I_h(w))`.
pub fn rhs_nudged(
    w: &SpectralField,
    u_obs: &SpectralField,
    t: f64,
    phys: &PhysicalParams,
    assim: &AssimParams,
    forcing: &ForcingField,
) -> Result<SpectralField> {
    rhs_nudged_impl(w, u_obs, t, phys, assim, forcing, phys.nu)
}

/// Non-stiff part of the nudged tendency (see `rhs_truth_explicit`).
pub fn rhs_nudged_explicit(
    w: &SpectralField,
    u_obs: &SpectralField,
    t: f64,
    phys: &PhysicalParams,
    assim: &AssimParams,
    forcing: &ForcingField,
) -> Result<SpectralField> {
    rhs_nudged_impl(w, u_obs, t, phys, assim, forcing, 0.0)
}

fn rhs_nudged_impl(
    w: &SpectralField,
    u_obs: &SpectralField,
    t: f64,
    phys: &PhysicalParams,
    assim: &AssimParams,
    forcing: &ForcingField,
    nu: f64,
) -> Result<SpectralField> {
    let grid = w.grid();
    u_obs.grid().same_as(&grid)?;
    forcing.base().grid().same_as(&grid)?;
    let w_phys = w.to_physical();
    let adv = self_advection_with_physical(&w_phys)?;
    let damp = damping_with_physical(&w_phys, assim.beta, assim.b(phys))?;
    if assim.eta != 0.0 {
        let mut feedback = apply_interpolant(&assim.interpolant, u_obs)?;
        feedback.axpy(-1.0, &apply_interpolant(&assim.interpolant, w)?);
        leray_project_inplace(&mut feedback);
        // The physical-space interpolants repopulate truncated modes;
        // truncate the feedback before it enters the assembled tendency.
        dealias_inplace(&mut feedback);
        Ok(assemble_rhs(w, nu, forcing, t, &adv, &damp, Some((&feedback, assim.eta))))
    } else {
        Ok(assemble_rhs(w, nu, forcing, t, &adv, &damp, None))
    }
}

/// Both sides of the pointwise damping inequalities for one vector pair:
///
/// lower bound: `(|x|^g x - |y|^g y).(x-y) >= 1/2 |x-y|^2 (|x|^g + |y|^g)`
/// Lipschitz:   `| |x|^g x - |y|^g y | <= kappa(g) |x-y| (|x|+|y|)^g`
///
/// Returns `(monotonicity holds, Lipschitz holds with the given kappa)`.
pub fn pointwise_damping_inequalities(
    x: [f64; 3],
    y: [f64; 3],
    gamma: f64,
    kappa: f64,
) -> (bool, bool) {
    let (lhs1, rhs1) = damping_monotonicity_sides(x, y, gamma);
    let (num2, den2) = damping_lipschitz_sides(x, y, gamma);
    let tol = 1e-12 * (lhs1.abs() + rhs1.abs()).max(1.0);
    (lhs1 >= rhs1 - tol, num2 <= kappa * den2 + 1e-12 * den2.max(1.0))
}

fn pow_mag(v: [f64; 3], gamma: f64) -> f64 {
    let m2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    if m2 > 0.0 {
        m2.powf(gamma / 2.0)
    } else {
        0.0
    }
}

/// `((|x|^g x - |y|^g y).(x-y), 1/2 |x-y|^2 (|x|^g + |y|^g))`.
pub fn damping_monotonicity_sides(x: [f64; 3], y: [f64; 3], gamma: f64) -> (f64, f64) {
    let gx = pow_mag(x, gamma);
    let gy = pow_mag(y, gamma);
    let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
    let lhs = (gx * x[0] - gy * y[0]) * d[0]
        + (gx * x[1] - gy * y[1]) * d[1]
        + (gx * x[2] - gy * y[2]) * d[2];
    let d2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    (lhs, 0.5 * d2 * (gx + gy))
}

/// `(| |x|^g x - |y|^g y |, |x-y| (|x|+|y|)^g)`; kappa is the ratio bound.
pub fn damping_lipschitz_sides(x: [f64; 3], y: [f64; 3], gamma: f64) -> (f64, f64) {
    let gx = pow_mag(x, gamma);
    let gy = pow_mag(y, gamma);
    let num = ((gx * x[0] - gy * y[0]).powi(2)
        + (gx * x[1] - gy * y[1]).powi(2)
        + (gx * x[2] - gy * y[2]).powi(2))
    .sqrt();
    let d2 = (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2);
    let sum = pow_mag(x, 2.0).sqrt() + pow_mag(y, 2.0).sqrt();
    let den = d2.sqrt() * if sum > 0.0 { sum.powf(gamma) } else { 0.0 };
    (num, den)
}

/// Estimate the minimal admissible `kappa(gamma)` by a randomized max-ratio
/// search, seeded with structured near-extremal pairs (colinear, antipodal,
/// nearly equal vectors).
pub fn estimate_kappa(gamma: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = stream(seed, "kappa", (gamma * 1e6) as u64);
    let mut best: f64 = 0.0;
    let mut consider = |x: [f64; 3], y: [f64; 3]| {
        let (num, den) = damping_lipschitz_sides(x, y, gamma);
        if den > 1e-280 {
            let r = num / den;
            if r > best {
                best = r;
            }
        }
    };
    // Structured probes along one axis.
    for i in 0..1000 {
        let s = i as f64 / 1000.0;
        consider([1.0, 0.0, 0.0], [s, 0.0, 0.0]);
        consider([1.0, 0.0, 0.0], [-s, 0.0, 0.0]);
        consider([1.0, 0.0, 0.0], [1.0 - 1e-6 * (1.0 + s), 0.0, 0.0]);
    }
    fn draw<R: Rng>(rng: &mut R, scale: f64) -> [f64; 3] {
        [
            scale * (rng.gen::<f64>() * 2.0 - 1.0),
            scale * (rng.gen::<f64>() * 2.0 - 1.0),
            scale * (rng.gen::<f64>() * 2.0 - 1.0),
        ]
    }
    for _ in 0..samples {
        let x = draw(&mut rng, 1.0);
        // Mix global pairs with pairs at very small separation, where the
        // mean-value bound is tight.
        let y = if rng.gen::<f64>() < 0.5 {
            draw(&mut rng, 1.0)
        } else {
            let eps = 10f64.powf(-6.0 * rng.gen::<f64>());
            let d = draw(&mut rng, eps);
            [x[0] + d[0], x[1] + d[1], x[2] + d[2]]
        };
        consider(x, y);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::random_field;
    use crate::grid::Grid;
    use crate::interpolant::{InterpolantKind, InterpolantSpec};
    use crate::operators::apply_a;
    use crate::params::{ForcingKind, ForcingSpec};
    use num_complex::Complex64;

    fn grid16() -> Grid {
        Grid::cubic(16, 2.0 * std::f64::consts::PI).unwrap()
    }

    fn rand_div_free(grid: Grid, seed: u64, norm: f64) -> SpectralField {
        random_field(grid, &mut stream(seed, "dyn-test", 0), 1, 5, 0.8, norm, true)
    }

    #[test]
    fn advection_of_constant_target_vanishes() {
        let grid = grid16();
        let u = rand_div_free(grid, 1, 1.0);
        let mut v = SpectralField::zeros(grid);
        v.set_mode(0, 0, 0, 0, Complex64::new(2.0, 0.0));
        let b = advection(&u, &v).unwrap();
        assert!(b.max_coeff_norm() < 1e-14);
    }

    #[test]
    fn advection_grid_mismatch_rejected() {
        let u = rand_div_free(grid16(), 1, 1.0);
        let v = rand_div_free(Grid::cubic(8, 2.0 * std::f64::consts::PI).unwrap(), 1, 1.0);
        assert!(advection(&u, &v).is_err());
    }

    #[test]
    fn advection_energy_orthogonality() {
        let grid = grid16();
        for seed in 0..5 {
            let u = rand_div_free(grid, 10 + seed, 1.0);
            let w = rand_div_free(grid, 20 + seed, 1.4);
            let b = advection(&u, &w).unwrap();
            let ip = b.inner(&w);
            let scale = b.l2_norm() * w.l2_norm();
            assert!(
                ip.abs() <= 1e-10 * scale.max(1e-30),
                "<B(u,w),w> = {ip} not orthogonal (scale {scale})"
            );
        }
    }

    #[test]
    fn advection_skew_symmetry() {
        let grid = grid16();
        for seed in 0..5 {
            let u = rand_div_free(grid, 30 + seed, 1.0);
            let v = rand_div_free(grid, 40 + seed, 0.9);
            let w = rand_div_free(grid, 50 + seed, 1.1);
            let lhs = advection(&u, &v).unwrap().inner(&w);
            let rhs = -advection(&u, &w).unwrap().inner(&v);
            let scale = lhs.abs().max(rhs.abs()).max(1e-30);
            assert!(
                ((lhs - rhs) / scale).abs() < 1e-10,
                "skew-symmetry violated: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn advection_difference_identity() {
        let grid = grid16();
        let u = rand_div_free(grid, 61, 1.0);
        let v = rand_div_free(grid, 62, 1.2);
        let mut g = u.clone();
        g.axpy(-1.0, &v);
        let mut sum = u.clone();
        sum.axpy(1.0, &v);
        let mut lhs_field = advection(&u, &u).unwrap();
        lhs_field.axpy(-1.0, &advection(&v, &v).unwrap());
        let lhs = lhs_field.inner(&g);
        let rhs = -0.5 * advection(&g, &g).unwrap().inner(&sum);
        let scale = lhs.abs().max(rhs.abs()).max(1e-30);
        assert!(((lhs - rhs) / scale).abs() < 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn damping_constant_field_is_pointwise_cube() {
        let grid = grid16();
        let mut u = SpectralField::zeros(grid);
        u.set_mode(0, 0, 0, 0, Complex64::new(3.0, 0.0));
        let g = damping(&u, 1.0, 1.0).unwrap();
        // |u|^2 u = 27 in component 0; the k=0 mode passes the projection.
        assert!((g.mode(0, 0, 0, 0) - Complex64::new(27.0, 0.0)).norm() < 1e-10);
        assert!(g.mode(1, 0, 0, 0).norm() < 1e-12);
    }

    #[test]
    fn damping_gamma_zero_is_projection_scaling() {
        let grid = grid16();
        let u = rand_div_free(grid, 70, 1.0);
        let g = damping(&u, 0.0, 2.5).unwrap();
        let mut want = u.clone();
        want.scale(2.5);
        let mut diff = g;
        diff.axpy(-1.0, &want);
        assert!(diff.max_coeff_norm() < 1e-12);
        assert!(damping(&u, 1.0, -1.0).is_err(), "negative coeff rejected");
    }

    #[test]
    fn damping_energy_matches_lp_quadrature() {
        let grid = grid16();
        let u = rand_div_free(grid, 71, 1.0);
        for gamma in [0.5, 1.0, 2.0] {
            let g = damping(&u, gamma, 1.0).unwrap();
            let lhs = g.inner(&u);
            let p = 2.0 * gamma + 2.0;
            let rhs = u.to_physical().lp_norm(p).powf(p);
            assert!(
                ((lhs - rhs) / rhs).abs() < 1e-8,
                "gamma={gamma}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn damping_is_monotone_operator() {
        let grid = grid16();
        let u = rand_div_free(grid, 72, 1.0);
        let v = rand_div_free(grid, 73, 0.8);
        for gamma in [0.5, 1.0, 2.0] {
            let mut diff_g = damping(&u, gamma, 1.0).unwrap();
            diff_g.axpy(-1.0, &damping(&v, gamma, 1.0).unwrap());
            let mut diff = u.clone();
            diff.axpy(-1.0, &v);
            let ip = diff_g.inner(&diff);
            assert!(ip >= -1e-10, "monotonicity violated at gamma={gamma}: {ip}");
        }
    }

    #[test]
    fn rhs_truth_rest_state_is_zero_and_divergence_free() {
        let grid = grid16();
        let phys = PhysicalParams::new(0.1, grid.l(), 2.0, 0.1).unwrap();
        let forcing = ForcingSpec::zero().realize(grid).unwrap();
        let u = SpectralField::zeros(grid);
        let r = rhs_truth(&u, 0.0, &phys, &forcing).unwrap();
        assert!(r.max_coeff_norm() == 0.0);

        let u = rand_div_free(grid, 80, 0.7);
        let r = rhs_truth(&u, 0.0, &phys, &forcing).unwrap();
        assert!(r.divergence_rel_max() < 1e-10);
    }

    #[test]
    fn rhs_truth_matches_term_by_term_sum_for_low_mode() {
        let grid = grid16();
        // a = 0 reduces to the classical Navier-Stokes right-hand side.
        let phys = PhysicalParams::new(0.3, grid.l(), 2.0, 1e-300).unwrap();
        let forcing = ForcingSpec {
            kind: ForcingKind::RandomLowMode,
            amplitude: 0.5,
            m_min: 1,
            m_max: 2,
            seed: 3,
            modulation_freq: None,
        }
        .realize(grid)
        .unwrap();
        let u = rand_div_free(grid, 81, 0.6);
        let r = rhs_truth(&u, 0.0, &phys, &forcing).unwrap();
        let mut want = forcing.at(0.0);
        want.axpy(-phys.nu, &apply_a(&u));
        want.axpy(-1.0, &advection(&u, &u).unwrap());
        want.axpy(-phys.a(), &damping(&u, phys.alpha, 1.0).unwrap());
        let mut diff = r;
        diff.axpy(-1.0, &want);
        assert!(diff.max_coeff_norm() < 1e-11);
    }

    #[test]
    fn rhs_truth_energy_identity() {
        let grid = grid16();
        let phys = PhysicalParams::new(0.2, grid.l(), 2.0, 0.3).unwrap();
        let forcing = ForcingSpec {
            kind: ForcingKind::RandomLowMode,
            amplitude: 1.0,
            m_min: 1,
            m_max: 2,
            seed: 4,
            modulation_freq: None,
        }
        .realize(grid)
        .unwrap();
        let u = rand_div_free(grid, 82, 0.9);
        let r = rhs_truth(&u, 0.0, &phys, &forcing).unwrap();
        let lhs = r.inner(&u);
        let p = 2.0 * phys.alpha + 2.0;
        let rhs = forcing.inner_with(0.0, &u)
            - phys.nu * u.h1_seminorm_sq()
            - phys.a() * u.to_physical().lp_norm(p).powf(p);
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        assert!(
            ((lhs - rhs) / scale).abs() < 1e-8,
            "energy identity: {lhs} vs {rhs}"
        );
    }

    fn test_assim(grid: Grid, eta: f64) -> AssimParams {
        AssimParams::new(
            2.0,
            0.1,
            eta,
            InterpolantSpec::with_default_constants(
                InterpolantKind::FourierLowpass,
                grid.l() / 4.0,
            )
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn rhs_nudged_synchronized_state_equals_rhs_truth() {
        let grid = grid16();
        let phys = PhysicalParams::new(0.1, grid.l(), 2.0, 0.1).unwrap();
        let assim = test_assim(grid, 10.0);
        let forcing = ForcingSpec {
            kind: ForcingKind::RandomLowMode,
            amplitude: 0.4,
            m_min: 1,
            m_max: 2,
            seed: 5,
            modulation_freq: None,
        }
        .realize(grid)
        .unwrap();
        let u = rand_div_free(grid, 83, 0.5);
        let rw = rhs_nudged(&u, &u, 0.0, &phys, &assim, &forcing).unwrap();
        let ru = rhs_truth(&u, 0.0, &phys, &forcing).unwrap();
        let mut diff = rw;
        diff.axpy(-1.0, &ru);
        assert!(diff.max_coeff_norm() < 1e-12);
    }

    #[test]
    fn rhs_nudged_eta_zero_is_free_running_guess() {
        let grid = grid16();
        let phys = PhysicalParams::new(0.1, grid.l(), 2.0, 0.1).unwrap();
        let mut assim = test_assim(grid, 0.0);
        assim.beta = 1.5;
        assim.b_tilde = 0.2;
        let forcing = ForcingSpec::zero().realize(grid).unwrap();
        let w = rand_div_free(grid, 84, 0.5);
        let u_obs = rand_div_free(grid, 85, 0.7);
        let r = rhs_nudged(&w, &u_obs, 0.0, &phys, &assim, &forcing).unwrap();
        // Same as the truth RHS with the guess damping parameters.
        let guess_phys = PhysicalParams::new(phys.nu, phys.l, assim.beta, assim.b_tilde).unwrap();
        let want = rhs_truth(&w, 0.0, &guess_phys, &forcing).unwrap();
        let mut diff = r;
        diff.axpy(-1.0, &want);
        assert!(diff.max_coeff_norm() < 1e-12);
    }

    #[test]
    fn nudging_feedback_is_lowpass_of_difference_mode_by_mode() {
        let grid = grid16();
        let phys = PhysicalParams::new(0.1, grid.l(), 2.0, 0.1).unwrap();
        let assim = test_assim(grid, 7.0);
        let forcing = ForcingSpec::zero().realize(grid).unwrap();
        let w = rand_div_free(grid, 86, 0.5);
        let u_obs = rand_div_free(grid, 87, 0.7);
        let with_feedback = rhs_nudged(&w, &u_obs, 0.0, &phys, &assim, &forcing).unwrap();
        let mut free = test_assim(grid, 0.0);
        free.beta = assim.beta;
        free.b_tilde = assim.b_tilde;
        let without = rhs_nudged(&w, &u_obs, 0.0, &phys, &free, &forcing).unwrap();
        let mut feedback = with_feedback;
        feedback.axpy(-1.0, &without);
        // Mode-by-mode: eta * (u_obs - w) below the cutoff |m| <= 4, zero above.
        let cutoff_sq = 16.0;
        let n = grid.n();
        let (m, _) = grid.mode_table();
        for ixm in 0..n {
            for iym in 0..n {
                for izm in 0..n {
                    let m2 = (m[ixm] * m[ixm] + m[iym] * m[iym] + m[izm] * m[izm]) as f64;
                    let idx = grid.idx(ixm, iym, izm);
                    for c in 0..3 {
                        let got = feedback.component(c)[idx];
                        let want = if m2 <= cutoff_sq && grid.mode_retained(m[ixm], m[iym], m[izm])
                        {
                            assim.eta * (u_obs.component(c)[idx] - w.component(c)[idx])
                        } else {
                            num_complex::Complex64::default()
                        };
                        assert!(
                            (got - want).norm() < 1e-10,
                            "mode ({},{},{}) component {c}",
                            m[ixm],
                            m[iym],
                            m[izm]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn damping_inequality_trivial_cases() {
        // x = y: both sides zero.
        let (m, l) = (
            damping_monotonicity_sides([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], 1.5),
            damping_lipschitz_sides([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], 1.5),
        );
        assert_eq!(m.0, 0.0);
        assert_eq!(m.1, 0.0);
        assert_eq!(l.0, 0.0);
        // y = 0: reads |x|^(g+2) >= 1/2 |x|^(g+2).
        let (lhs, rhs) = damping_monotonicity_sides([2.0, 0.0, 0.0], [0.0, 0.0, 0.0], 1.0);
        assert!((lhs - 8.0).abs() < 1e-12);
        assert!((rhs - 4.0).abs() < 1e-12);
        let (ok1, ok2) = pointwise_damping_inequalities([2.0, 0.0, 0.0], [0.0; 3], 1.0, 2.0);
        assert!(ok1 && ok2);
    }

    #[test]
    fn kappa_estimate_is_bounded_by_mean_value_constant() {
        for gamma in [0.5, 1.0, 2.0, 3.0] {
            let kappa = estimate_kappa(gamma, 20_000, 99);
            assert!(kappa > 0.5, "gamma={gamma}: kappa={kappa} suspiciously small");
            assert!(
                kappa <= gamma + 1.0 + 1e-9,
                "gamma={gamma}: kappa={kappa} exceeds the mean-value bound"
            );
        }
    }
}
