//! Self-contained property suite: operator identities, damping inequalities,
//! interpolant inequality, and scheme order, run at a small grid size with a
//! single pass/fail line per property. A fault-injection hook exists so the
//! suite's failure path is itself testable.

use crate::dynamics::{
    advection, damping, damping_monotonicity_sides, estimate_kappa, damping_lipschitz_sides,
};
use crate::field::{random_field, SpectralField};
use crate::grid::Grid;
use crate::interpolant::{verify_inequality, InterpolantKind, InterpolantSpec};
use crate::operators::{apply_a, dealias, leray_project};
use crate::params::{ForcingKind, ForcingSpec, PhysicalParams};
use crate::rng::stream;
use crate::stepper::{Scheme, Stepper, StepperConfig};
use num_complex::Complex64;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    None,
    /// Skew the Leray projector so the identity checks must fail.
    PerturbLeray,
}

#[derive(Debug, Clone)]
pub struct PropertyResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub results: Vec<PropertyResult>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn first_failure(&self) -> Option<&PropertyResult> {
        self.results.iter().find(|r| !r.pass)
    }
}

fn project(f: &SpectralField, fault: Fault) -> SpectralField {
    let mut p = leray_project(f);
    if fault == Fault::PerturbLeray {
        // Corrupt one retained mode asymmetrically.
        let v = p.mode(0, 1, 0, 0);
        p.set_mode(0, 1, 0, 0, v + Complex64::new(1e-3, 0.0));
    }
    p
}

/// Run the property suite at grid size `n`.
pub fn run_property_suite(n: usize, seed: u64, fault: Fault) -> SuiteReport {
    let grid = Grid::cubic(n, 2.0 * std::f64::consts::PI).unwrap();
    let mut results = Vec::new();
    let fields: Vec<SpectralField> = (0..20)
        .map(|i| {
            let mut f = random_field(
                grid,
                &mut stream(seed, "verify-field", i),
                1,
                (grid.dealias_limit().floor()) as i64,
                0.8,
                1.0,
                false,
            );
            f = project(&f, fault);
            dealias(&f)
        })
        .collect();

    // Leray idempotence + divergence-freeness.
    let mut worst_div = 0.0f64;
    let mut worst_idem = 0.0f64;
    for f in &fields {
        let p = project(f, fault);
        worst_div = worst_div.max(p.divergence_rel_max());
        let pp = project(&p, fault);
        let mut diff = pp;
        diff.axpy(-1.0, &p);
        let scale = p.max_coeff_norm().max(1e-300);
        worst_idem = worst_idem.max(diff.max_coeff_norm() / scale);
    }
    results.push(PropertyResult {
        name: "leray_projection",
        pass: worst_div < 1e-12 && worst_idem < 1e-12,
        detail: format!("max relative divergence {worst_div:.2e}, idempotence defect {worst_idem:.2e}"),
    });

    // Skew-symmetry, energy orthogonality, difference identity.
    let mut worst_skew = 0.0f64;
    let mut worst_orth = 0.0f64;
    let mut worst_diff = 0.0f64;
    for i in 0..6 {
        let u = &fields[i * 3];
        let v = &fields[i * 3 + 1];
        let w = &fields[i * 3 + 2];
        if let (Ok(buv), Ok(buw)) = (advection(u, v), advection(u, w)) {
            let lhs = buv.inner(w);
            let rhs = -buw.inner(v);
            let scale = buv.l2_norm() * w.l2_norm() + buw.l2_norm() * v.l2_norm();
            worst_skew = worst_skew.max((lhs - rhs).abs() / scale.max(1e-300));
            worst_orth = worst_orth.max(buw.inner(w).abs() / (buw.l2_norm() * w.l2_norm()).max(1e-300));
        }
        let mut g = u.clone();
        g.axpy(-1.0, v);
        let mut s = u.clone();
        s.axpy(1.0, v);
        if let (Ok(buu), Ok(bvv), Ok(bgg)) = (advection(u, u), advection(v, v), advection(&g, &g)) {
            let mut lhs_f = buu;
            lhs_f.axpy(-1.0, &bvv);
            let lhs = lhs_f.inner(&g);
            let rhs = -0.5 * bgg.inner(&s);
            let scale = lhs.abs().max(rhs.abs()).max(1e-300);
            worst_diff = worst_diff.max((lhs - rhs).abs() / scale);
        }
    }
    results.push(PropertyResult {
        name: "advection_skew_symmetry",
        pass: worst_skew < 1e-10,
        detail: format!("max relative defect {worst_skew:.2e}"),
    });
    results.push(PropertyResult {
        name: "advection_energy_orthogonality",
        pass: worst_orth < 1e-10,
        detail: format!("max relative defect {worst_orth:.2e}"),
    });
    results.push(PropertyResult {
        name: "advection_difference_identity",
        pass: worst_diff < 1e-10,
        detail: format!("max relative defect {worst_diff:.2e}"),
    });

    // A is positive semi-definite and pairs as the gradient norm.
    let mut worst_a = 0.0f64;
    for f in fields.iter().take(5) {
        let au = apply_a(f);
        let lhs = au.inner(f);
        let rhs = f.h1_seminorm_sq();
        worst_a = worst_a.max((lhs - rhs).abs() / rhs.max(1e-300));
    }
    results.push(PropertyResult {
        name: "stokes_operator_energy",
        pass: worst_a < 1e-12,
        detail: format!("max relative defect {worst_a:.2e}"),
    });

    // Damping inequalities: monotonicity always, Lipschitz with fitted kappa.
    let mut rng = stream(seed, "verify-damping", 0);
    let mut dam_ok = true;
    let mut kappa_max: f64 = 0.0;
    for gamma in [0.5, 1.0, 2.0, 3.0] {
        let kappa = estimate_kappa(gamma, 50_000, seed);
        kappa_max = kappa_max.max(kappa / (gamma + 1.0));
        for _ in 0..50_000 {
            let x = [rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0];
            let y = [rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0];
            let (lhs, rhs) = damping_monotonicity_sides(x, y, gamma);
            if lhs < rhs - 1e-12 * rhs.abs().max(1.0) {
                dam_ok = false;
            }
            let (num, den) = damping_lipschitz_sides(x, y, gamma);
            if num > kappa * den * (1.0 + 1e-12) {
                dam_ok = false;
            }
        }
    }
    results.push(PropertyResult {
        name: "damping_inequalities",
        pass: dam_ok && kappa_max <= 1.0 + 1e-9,
        detail: format!("fitted kappa / mean-value bound <= {kappa_max:.3}"),
    });

    // Monotonicity of the damping operator on fields.
    let mut mono_ok = true;
    for i in 0..3 {
        let u = project(&fields[i], Fault::None);
        let v = project(&fields[i + 3], Fault::None);
        if let (Ok(gu), Ok(gv)) = (damping(&u, 1.0, 1.0), damping(&v, 1.0, 1.0)) {
            let mut dg = gu;
            dg.axpy(-1.0, &gv);
            let mut du = u.clone();
            du.axpy(-1.0, &v);
            if dg.inner(&du) < -1e-10 {
                mono_ok = false;
            }
        }
    }
    results.push(PropertyResult {
        name: "damping_monotonicity",
        pass: mono_ok,
        detail: "pairing <G(u)-G(v), u-v> >= 0".into(),
    });

    // Interpolant inequality with declared constants.
    let mut interp_ok = true;
    let mut interp_detail = String::new();
    for kind in [
        InterpolantKind::FourierLowpass,
        InterpolantKind::VolumeAverage,
        InterpolantKind::TrilinearNodal,
    ] {
        let spec = InterpolantSpec::with_default_constants(kind, grid.l() / 4.0).unwrap();
        match verify_inequality(&spec, grid, 20, seed) {
            Ok(rep) => {
                if rep.max_violation_declared > 1.0 {
                    interp_ok = false;
                }
                interp_detail.push_str(&format!(
                    "{}: max ratio {:.3e}; ",
                    kind.name(),
                    rep.max_violation_declared
                ));
            }
            Err(e) => {
                interp_ok = false;
                interp_detail.push_str(&format!("{}: {e}; ", kind.name()));
            }
        }
    }
    results.push(PropertyResult {
        name: "interpolant_inequality",
        pass: interp_ok,
        detail: interp_detail,
    });

    // Scheme order: exact viscous decay + RK3 order on the full system.
    results.push(scheme_order_property(grid, seed));

    SuiteReport { results }
}

fn scheme_order_property(grid: Grid, seed: u64) -> PropertyResult {
    // Exact viscous decay of a single mode with nonlinear terms off.
    let nu = 0.4;
    let cfg = StepperConfig::new(0.02, Scheme::IfRk3, 0.5, false).unwrap();
    let mut stepper = Stepper::new(grid, nu, cfg);
    let mut f = SpectralField::zeros(grid);
    f.set_mode(0, 0, 2, 0, Complex64::new(1.0, 0.0));
    f.set_mode(0, 0, -2, 0, Complex64::new(1.0, 0.0));
    let mut fields = vec![f];
    for i in 0..50 {
        if stepper
            .step(&mut fields, i as f64 * 0.02, 0.02, |s, _| {
                Ok(s.iter().map(|f| SpectralField::zeros(f.grid())).collect())
            })
            .is_err()
        {
            return PropertyResult {
                name: "scheme_order",
                pass: false,
                detail: "diffusion step failed".into(),
            };
        }
    }
    let want = (-nu * 4.0 * 1.0f64).exp(); // |k|^2 = 4, T = 1
    let got = fields[0].mode(0, 0, 2, 0).re;
    let decay_err = (got - want).abs() / want;
    if decay_err > 1e-12 {
        return PropertyResult {
            name: "scheme_order",
            pass: false,
            detail: format!("viscous decay error {decay_err:.2e}"),
        };
    }

    // Self-convergence of the full nonlinear system over dt, dt/2, dt/4.
    let phys = PhysicalParams::new(0.05, grid.l(), 2.0, 0.1).unwrap();
    let forcing = ForcingSpec {
        kind: ForcingKind::RandomLowMode,
        amplitude: 0.4,
        m_min: 1,
        m_max: 2,
        seed,
        modulation_freq: None,
    }
    .realize(grid)
    .unwrap();
    let u0 = random_field(grid, &mut stream(seed, "order-ic", 0), 1, 3, 1.0, 0.5, true);
    let t_end = 0.4;
    let mut finals = Vec::new();
    for halving in 0..3 {
        let dt = 0.02 / (1 << halving) as f64;
        let cfg = StepperConfig::new(dt, Scheme::IfRk3, 0.5, false).unwrap();
        let mut stepper = Stepper::new(grid, phys.nu, cfg);
        let mut fields = vec![u0.clone()];
        let steps = (t_end / dt).round() as usize;
        for i in 0..steps {
            if stepper
                .step(&mut fields, i as f64 * dt, dt, |s, tt| {
                    Ok(vec![crate::dynamics::rhs_truth_explicit(&s[0], tt, &phys, &forcing)?])
                })
                .is_err()
            {
                return PropertyResult {
                    name: "scheme_order",
                    pass: false,
                    detail: "nonlinear step failed".into(),
                };
            }
        }
        finals.push(fields.pop().unwrap());
    }
    let mut d01 = finals[0].clone();
    d01.axpy(-1.0, &finals[1]);
    let mut d12 = finals[1].clone();
    d12.axpy(-1.0, &finals[2]);
    let order = (d01.l2_norm() / d12.l2_norm()).log2();
    PropertyResult {
        name: "scheme_order",
        pass: order >= 2.7,
        detail: format!("self-convergence order {order:.2}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_build_passes_and_fault_injection_fails_by_name() {
        let report = run_property_suite(16, 7, Fault::None);
        for r in &report.results {
            assert!(r.pass, "{} failed: {}", r.name, r.detail);
        }
        let report = run_property_suite(16, 7, Fault::PerturbLeray);
        assert!(!report.all_pass());
        let failing = report.first_failure().unwrap();
        assert!(
            failing.name.contains("leray") || failing.name.contains("skew"),
            "fault should surface in projection/skew properties, got {}",
            failing.name
        );
    }
}
