//! Mode-space differential operators: Leray projection, the Stokes operator
//! `A = -P Laplacian` (= `-Laplacian` on periodic divergence-free fields),
//! spectral derivatives, and dealias truncation.

use crate::field::SpectralField;
use num_complex::Complex64;

/// Helmholtz-Leray projection onto divergence-free fields.
///
/// For `k != 0` applies `u_hat -> u_hat - k (k . u_hat) / |k|^2`; the mean
/// mode passes through unchanged.
pub fn leray_project(s: &SpectralField) -> SpectralField {
    let mut out = s.clone();
    leray_project_inplace(&mut out);
    out
}

pub(crate) fn leray_project_inplace(s: &mut SpectralField) {
    let grid = s.grid();
    let n = grid.n();
    let (_, k) = grid.mode_table();
    for ix in 0..n {
        for iy in 0..n {
            let row = (ix * n + iy) * n;
            for iz in 0..n {
                let kk = [k[ix], k[iy], k[iz]];
                let k2 = kk[0] * kk[0] + kk[1] * kk[1] + kk[2] * kk[2];
                if k2 == 0.0 {
                    continue;
                }
                let idx = row + iz;
                let dot = kk[0] * s.component(0)[idx]
                    + kk[1] * s.component(1)[idx]
                    + kk[2] * s.component(2)[idx];
                let factor = dot / k2;
                for c in 0..3 {
                    s.component_mut(c)[idx] -= kk[c] * factor;
                }
            }
        }
    }
}

/// Stokes operator: per-mode multiplication by `|k|^2`.
pub fn apply_a(s: &SpectralField) -> SpectralField {
    let grid = s.grid();
    let n = grid.n();
    let (_, k) = grid.mode_table();
    let mut out = s.clone();
    for ix in 0..n {
        let kx2 = k[ix] * k[ix];
        for iy in 0..n {
            let kxy2 = kx2 + k[iy] * k[iy];
            let row = (ix * n + iy) * n;
            for iz in 0..n {
                let k2 = kxy2 + k[iz] * k[iz];
                let idx = row + iz;
                for c in 0..3 {
                    out.component_mut(c)[idx] *= k2;
                }
            }
        }
    }
    out
}

/// Spectral partial derivative along `axis`: multiplication by `i k_axis`.
pub fn partial_derivative(s: &SpectralField, axis: usize) -> SpectralField {
    let grid = s.grid();
    let n = grid.n();
    let (_, k) = grid.mode_table();
    let mut out = s.clone();
    for ix in 0..n {
        for iy in 0..n {
            let row = (ix * n + iy) * n;
            for iz in 0..n {
                let ka = match axis {
                    0 => k[ix],
                    1 => k[iy],
                    _ => k[iz],
                };
                let idx = row + iz;
                let ik = Complex64::new(0.0, ka);
                for c in 0..3 {
                    let v = out.component(c)[idx];
                    out.component_mut(c)[idx] = ik * v;
                }
            }
        }
    }
    out
}

/// Full gradient tensor; entry `j` holds `d(s)/dx_j` of all three components.
pub fn gradient(s: &SpectralField) -> [SpectralField; 3] {
    [
        partial_derivative(s, 0),
        partial_derivative(s, 1),
        partial_derivative(s, 2),
    ]
}

/// Zero every mode with any `|m_j| > dealias_fraction * n/2`. Idempotent.
pub fn dealias(s: &SpectralField) -> SpectralField {
    let mut out = s.clone();
    dealias_inplace(&mut out);
    out
}

pub(crate) fn dealias_inplace(s: &mut SpectralField) {
    let grid = s.grid();
    let n = grid.n();
    let (m, _) = grid.mode_table();
    let lim = grid.dealias_limit();
    let keep: Vec<bool> = (0..n).map(|j| (m[j].abs() as f64) <= lim).collect();
    for ix in 0..n {
        for iy in 0..n {
            let row = (ix * n + iy) * n;
            let keep_xy = keep[ix] && keep[iy];
            for iz in 0..n {
                if !(keep_xy && keep[iz]) {
                    let idx = row + iz;
                    for c in 0..3 {
                        s.component_mut(c)[idx] = Complex64::default();
                    }
                }
            }
        }
    }
}

/// Fused Leray projection + dealias truncation in one mode pass; the hot
/// path of the right-hand sides.
pub(crate) fn project_dealias_inplace(s: &mut SpectralField) {
    let grid = s.grid();
    let n = grid.n();
    let (m, k) = grid.mode_table();
    let lim = grid.dealias_limit();
    let keep: Vec<bool> = (0..n).map(|j| (m[j].abs() as f64) <= lim).collect();
    for ix in 0..n {
        for iy in 0..n {
            let row = (ix * n + iy) * n;
            let keep_xy = keep[ix] && keep[iy];
            for iz in 0..n {
                let idx = row + iz;
                if !(keep_xy && keep[iz]) {
                    for c in 0..3 {
                        s.component_mut(c)[idx] = Complex64::default();
                    }
                    continue;
                }
                let kk = [k[ix], k[iy], k[iz]];
                let k2 = kk[0] * kk[0] + kk[1] * kk[1] + kk[2] * kk[2];
                if k2 == 0.0 {
                    continue;
                }
                let dot = kk[0] * s.component(0)[idx]
                    + kk[1] * s.component(1)[idx]
                    + kk[2] * s.component(2)[idx];
                let factor = dot / k2;
                for c in 0..3 {
                    s.component_mut(c)[idx] -= kk[c] * factor;
                }
            }
        }
    }
}

/// Spectral divergence `i k . u_hat` as a scalar coefficient array.
pub fn divergence(s: &SpectralField) -> Vec<Complex64> {
    let grid = s.grid();
    let n = grid.n();
    let (_, k) = grid.mode_table();
    let mut out = vec![Complex64::default(); grid.num_modes()];
    for ix in 0..n {
        for iy in 0..n {
            let row = (ix * n + iy) * n;
            for iz in 0..n {
                let idx = row + iz;
                let d = k[ix] * s.component(0)[idx]
                    + k[iy] * s.component(1)[idx]
                    + k[iz] * s.component(2)[idx];
                out[idx] = Complex64::new(0.0, 1.0) * d;
            }
        }
    }
    out
}
