use crate::error::{Error, Result};
use crate::fft::fft3_inplace;
use crate::grid::Grid;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Divergence-capable velocity field stored as truncated Fourier coefficients.
///
/// Coefficient `coeffs[c][idx]` is the mode amplitude of component `c` in the
/// expansion `u_c(x) = sum_m u_hat_c(m) exp(i 2 pi m . x / l)`. Real fields
/// keep conjugate symmetry `u_hat(-m) = conj(u_hat(m))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: [Vec<Complex64>; 3],
}

/// Real-valued collocation samples on the `n^3` grid; z runs fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: Grid,
    values: [Vec<f64>; 3],
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        let len = grid.num_modes();
        SpectralField {
            grid,
            coeffs: std::array::from_fn(|_| vec![Complex64::default(); len]),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.coeffs[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.coeffs[c]
    }

    /// Coefficient of the mode `(mx, my, mz)` for component `c`.
    pub fn mode(&self, c: usize, mx: i64, my: i64, mz: i64) -> Complex64 {
        let n = self.grid.n() as i64;
        let wrap = |m: i64| ((m % n) + n) % n;
        let ix = wrap(mx) as usize;
        let iy = wrap(my) as usize;
        let iz = wrap(mz) as usize;
        self.coeffs[c][self.grid.idx(ix, iy, iz)]
    }

    pub fn set_mode(&mut self, c: usize, mx: i64, my: i64, mz: i64, v: Complex64) {
        let n = self.grid.n() as i64;
        let wrap = |m: i64| ((m % n) + n) % n;
        let idx = self
            .grid
            .idx(wrap(mx) as usize, wrap(my) as usize, wrap(mz) as usize);
        self.coeffs[c][idx] = v;
    }

    /// `self <- self + a * other`
    pub fn axpy(&mut self, a: f64, other: &SpectralField) {
        for c in 0..3 {
            for (s, o) in self.coeffs[c].iter_mut().zip(other.coeffs[c].iter()) {
                *s += a * o;
            }
        }
    }

    pub fn scale(&mut self, a: f64) {
        for c in 0..3 {
            for s in self.coeffs[c].iter_mut() {
                *s *= a;
            }
        }
    }

    /// L2 inner product `(u, v)_{L2} = l^3 sum Re(u_hat . conj(v_hat))`.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        let mut acc = 0.0;
        for c in 0..3 {
            for (a, b) in self.coeffs[c].iter().zip(other.coeffs[c].iter()) {
                acc += a.re * b.re + a.im * b.im;
            }
        }
        acc * self.grid.volume()
    }

    /// `||u||_{L2}` via Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        let mut acc = 0.0;
        for c in 0..3 {
            for a in &self.coeffs[c] {
                acc += a.norm_sqr();
            }
        }
        acc * self.grid.volume()
    }

    /// `||grad u||_{L2}^2 = l^3 sum |k|^2 |u_hat|^2`.
    pub fn h1_seminorm_sq(&self) -> f64 {
        self.weighted_norm_sq(1)
    }

    pub fn h1_seminorm(&self) -> f64 {
        self.h1_seminorm_sq().sqrt()
    }

    /// `||A u||_{L2}^2 = l^3 sum |k|^4 |u_hat|^2` with `A = -Laplacian`.
    pub fn a_norm_sq(&self) -> f64 {
        self.weighted_norm_sq(2)
    }

    pub fn a_norm(&self) -> f64 {
        self.a_norm_sq().sqrt()
    }

    fn weighted_norm_sq(&self, lap_power: u32) -> f64 {
        let n = self.grid.n();
        let (_, k) = self.grid.mode_table();
        let mut acc = 0.0;
        for ix in 0..n {
            let kx2 = k[ix] * k[ix];
            for iy in 0..n {
                let ky2 = k[iy] * k[iy];
                let row = (ix * n + iy) * n;
                for iz in 0..n {
                    let k2 = kx2 + ky2 + k[iz] * k[iz];
                    let w = match lap_power {
                        1 => k2,
                        2 => k2 * k2,
                        _ => unreachable!(),
                    };
                    let idx = row + iz;
                    let m2 = self.coeffs[0][idx].norm_sqr()
                        + self.coeffs[1][idx].norm_sqr()
                        + self.coeffs[2][idx].norm_sqr();
                    acc += w * m2;
                }
            }
        }
        acc * self.grid.volume()
    }

    /// Largest coefficient magnitude over all components and modes.
    pub fn max_coeff_norm(&self) -> f64 {
        let mut m: f64 = 0.0;
        for c in 0..3 {
            for a in &self.coeffs[c] {
                m = m.max(a.norm_sqr());
            }
        }
        m.sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|comp| comp.iter().all(|a| a.re.is_finite() && a.im.is_finite()))
    }

    /// Max over modes of `|k . u_hat| / (|k| |u_hat|)`; 0 for the zero field.
    pub fn divergence_rel_max(&self) -> f64 {
        let n = self.grid.n();
        let (_, k) = self.grid.mode_table();
        let mut worst = 0.0f64;
        for ix in 0..n {
            for iy in 0..n {
                let row = (ix * n + iy) * n;
                for iz in 0..n {
                    let idx = row + iz;
                    let kk = [k[ix], k[iy], k[iz]];
                    let knorm = (kk[0] * kk[0] + kk[1] * kk[1] + kk[2] * kk[2]).sqrt();
                    if knorm == 0.0 {
                        continue;
                    }
                    let u = [self.coeffs[0][idx], self.coeffs[1][idx], self.coeffs[2][idx]];
                    let unorm =
                        (u[0].norm_sqr() + u[1].norm_sqr() + u[2].norm_sqr()).sqrt();
                    if unorm == 0.0 {
                        continue;
                    }
                    let div = kk[0] * u[0] + kk[1] * u[1] + kk[2] * u[2];
                    worst = worst.max(div.norm() / (knorm * unorm));
                }
            }
        }
        worst
    }

    /// Inverse transform to collocation samples, discarding the (roundoff)
    /// imaginary parts.
    pub fn to_physical(&self) -> PhysicalField {
        let n = self.grid.n();
        let len = self.grid.num_modes();
        let mut values: [Vec<f64>; 3] = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
        let mut buf = vec![Complex64::default(); len];
        for c in 0..3 {
            buf.copy_from_slice(&self.coeffs[c]);
            fft3_inplace(&mut buf, n, true);
            for (v, b) in values[c].iter_mut().zip(buf.iter()) {
                *v = b.re;
            }
        }
        PhysicalField { grid: self.grid, values }
    }

    /// Evaluate the truncated Fourier series at an arbitrary point.
    pub fn eval_at(&self, c: usize, x: [f64; 3]) -> f64 {
        let n = self.grid.n();
        let (m, _) = self.grid.mode_table();
        let two_pi_over_l = 2.0 * std::f64::consts::PI / self.grid.l();
        let mut acc = Complex64::default();
        for ix in 0..n {
            for iy in 0..n {
                let row = (ix * n + iy) * n;
                for iz in 0..n {
                    let phase = two_pi_over_l
                        * (m[ix] as f64 * x[0] + m[iy] as f64 * x[1] + m[iz] as f64 * x[2]);
                    acc += self.coeffs[c][row + iz] * Complex64::from_polar(1.0, phase);
                }
            }
        }
        acc.re
    }
}

impl PhysicalField {
    pub fn zeros(grid: Grid) -> Self {
        let len = grid.num_modes();
        PhysicalField {
            grid,
            values: [vec![0.0; len], vec![0.0; len], vec![0.0; len]],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.values[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.values[c]
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|comp| comp.iter().all(|v| v.is_finite()))
    }

    /// Forward transform to Fourier coefficients.
    ///
    /// Rejects non-finite samples; round trip with `to_physical` reproduces
    /// the input to machine precision.
    pub fn to_spectral(&self) -> Result<SpectralField> {
        if !self.is_finite() {
            return Err(Error::NonFinite("physical field".into()));
        }
        let n = self.grid.n();
        let len = self.grid.num_modes();
        let norm = 1.0 / len as f64;
        let mut out = SpectralField::zeros(self.grid);
        let mut buf = vec![Complex64::default(); len];
        for c in 0..3 {
            for (b, v) in buf.iter_mut().zip(self.values[c].iter()) {
                *b = Complex64::new(*v, 0.0);
            }
            fft3_inplace(&mut buf, n, false);
            for (o, b) in out.coeffs[c].iter_mut().zip(buf.iter()) {
                *o = b * norm;
            }
        }
        Ok(out)
    }

    /// Collocation-quadrature `L^p` norm of the pointwise Euclidean magnitude.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let half_p = p / 2.0;
        let mut acc = 0.0;
        for i in 0..self.values[0].len() {
            let m2 = self.values[0][i] * self.values[0][i]
                + self.values[1][i] * self.values[1][i]
                + self.values[2][i] * self.values[2][i];
            acc += if half_p == 3.0 {
                m2 * m2 * m2
            } else if half_p == 2.0 {
                m2 * m2
            } else if half_p == 1.0 {
                m2
            } else {
                m2.powf(half_p)
            };
        }
        (acc * self.grid.quad_weight()).powf(1.0 / p)
    }

    /// Quadrature L2 norm (used to cross-check Parseval).
    pub fn l2_norm_quadrature(&self) -> f64 {
        let mut acc = 0.0;
        for c in 0..3 {
            for v in &self.values[c] {
                acc += v * v;
            }
        }
        (acc * self.grid.quad_weight()).sqrt()
    }

    /// Max pointwise Euclidean magnitude.
    pub fn linf_norm(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.values[0].len() {
            let m2 = self.values[0][i] * self.values[0][i]
                + self.values[1][i] * self.values[1][i]
                + self.values[2][i] * self.values[2][i];
            m = m.max(m2);
        }
        m.sqrt()
    }
}

/// Random real vector field supported on modes with `0 < |m| <= m_max`.
///
/// Coefficients are complex Gaussians damped by `(1 + |m|^2)^(-decay)`,
/// conjugate-symmetrized so the field is real. Optionally Leray-projected,
/// always zero-mean and dealiased, then rescaled to the requested L2 norm.
pub fn random_field<R: Rng>(
    grid: Grid,
    rng: &mut R,
    m_min: i64,
    m_max: i64,
    decay: f64,
    target_l2: f64,
    divergence_free: bool,
) -> SpectralField {
    let mut f = SpectralField::zeros(grid);
    let half = grid.n() as i64 / 2;
    let m_max = m_max.min(half - 1);
    for mx in -m_max..=m_max {
        for my in -m_max..=m_max {
            for mz in -m_max..=m_max {
                let m2 = mx * mx + my * my + mz * mz;
                if m2 == 0 || m2 > m_max * m_max || m2 < m_min * m_min {
                    continue;
                }
                // Fill each conjugate pair once, from its lexicographically
                // positive representative.
                if !lex_positive(mx, my, mz) {
                    continue;
                }
                let amp = (1.0 + m2 as f64).powf(-decay);
                for c in 0..3 {
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = StandardNormal.sample(rng);
                    let v = Complex64::new(re, im) * amp;
                    f.set_mode(c, mx, my, mz, v);
                    f.set_mode(c, -mx, -my, -mz, v.conj());
                }
            }
        }
    }
    if divergence_free {
        crate::operators::leray_project_inplace(&mut f);
    }
    crate::operators::dealias_inplace(&mut f);
    for c in 0..3 {
        f.set_mode(c, 0, 0, 0, Complex64::default());
    }
    let norm = f.l2_norm();
    if norm > 0.0 && target_l2 > 0.0 {
        f.scale(target_l2 / norm);
    }
    f
}

fn lex_positive(mx: i64, my: i64, mz: i64) -> bool {
    if mx != 0 {
        return mx > 0;
    }
    if my != 0 {
        return my > 0;
    }
    mz > 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_field_transforms_to_dc_mode() {
        let grid = Grid::cubic(8, 2.0).unwrap();
        let mut p = PhysicalField::zeros(grid);
        for v in p.component_mut(0) {
            *v = 1.0;
        }
        let s = p.to_spectral().unwrap();
        assert!((s.mode(0, 0, 0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-13);
        let energy: f64 = s.component(0).iter().map(|a| a.norm_sqr()).sum();
        assert!((energy - 1.0).abs() < 1e-13, "all energy in the DC mode");
    }

    #[test]
    fn single_sine_has_two_conjugate_modes() {
        let grid = Grid::cubic(16, 3.0).unwrap();
        let mut p = PhysicalField::zeros(grid);
        let n = grid.n();
        for ix in 0..n {
            let x = ix as f64 * grid.spacing();
            let v = (2.0 * std::f64::consts::PI * x / grid.l()).sin();
            for iy in 0..n {
                for iz in 0..n {
                    p.component_mut(0)[grid.idx(ix, iy, iz)] = v;
                }
            }
        }
        let s = p.to_spectral().unwrap();
        let plus = s.mode(0, 1, 0, 0);
        let minus = s.mode(0, -1, 0, 0);
        assert!((plus - Complex64::new(0.0, -0.5)).norm() < 1e-13);
        assert!((minus - plus.conj()).norm() < 1e-13);
        let energy: f64 = s.component(0).iter().map(|a| a.norm_sqr()).sum();
        assert!((energy - 0.5).abs() < 1e-13);
    }

    #[test]
    fn round_trip_is_machine_precision() {
        let grid = Grid::cubic(16, 1.7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut p = PhysicalField::zeros(grid);
        for c in 0..3 {
            for v in p.component_mut(c) {
                *v = rng.gen::<f64>() - 0.5;
            }
        }
        let back = p.to_spectral().unwrap().to_physical();
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for c in 0..3 {
            for (a, b) in back.component(c).iter().zip(p.component(c).iter()) {
                num += (a - b) * (a - b);
                den += b * b;
            }
        }
        assert!((num / den).sqrt() < 1e-12);
    }

    #[test]
    fn parseval_matches_quadrature() {
        let grid = Grid::cubic(16, 2.9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_field(grid, &mut rng, 1, 5, 0.8, 1.3, true);
        let p = f.to_physical();
        let spectral = f.l2_norm();
        let quad = p.l2_norm_quadrature();
        assert!(
            ((spectral - quad) / quad).abs() < 1e-12,
            "spectral {spectral} vs quadrature {quad}"
        );
    }

    #[test]
    fn backward_of_single_mode_is_sampled_cosine() {
        let grid = Grid::cubic(8, 1.0).unwrap();
        let mut s = SpectralField::zeros(grid);
        s.set_mode(1, 2, 0, 0, Complex64::new(0.5, 0.0));
        s.set_mode(1, -2, 0, 0, Complex64::new(0.5, 0.0));
        let p = s.to_physical();
        let n = grid.n();
        for ix in 0..n {
            let x = ix as f64 * grid.spacing();
            let want = (2.0 * std::f64::consts::PI * 2.0 * x / grid.l()).cos();
            for iy in 0..n {
                for iz in 0..n {
                    let got = p.component(1)[grid.idx(ix, iy, iz)];
                    assert!((got - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_coefficients_give_zero_field() {
        let grid = Grid::cubic(8, 1.0).unwrap();
        let p = SpectralField::zeros(grid).to_physical();
        assert!(p.component(0).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn non_finite_input_rejected() {
        let grid = Grid::cubic(8, 1.0).unwrap();
        let mut p = PhysicalField::zeros(grid);
        p.component_mut(2)[3] = f64::NAN;
        assert!(p.to_spectral().is_err());
    }

    #[test]
    fn random_field_is_divergence_free_and_zero_mean() {
        let grid = Grid::cubic(16, 6.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_field(grid, &mut rng, 1, 4, 1.0, 2.0, true);
        assert!(f.divergence_rel_max() < 1e-12);
        assert!(f.mode(0, 0, 0, 0).norm() < 1e-15);
        assert!((f.l2_norm() - 2.0).abs() < 1e-12);
        // Real in physical space: transform back and forth must agree.
        let rt = f.to_physical().to_spectral().unwrap();
        let mut diff = 0.0f64;
        for c in 0..3 {
            for (a, b) in rt.component(c).iter().zip(f.component(c).iter()) {
                diff = diff.max((a - b).norm());
            }
        }
        assert!(diff < 1e-13);
    }
}
