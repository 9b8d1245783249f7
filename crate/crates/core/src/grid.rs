use crate::error::{Error, Result};

/// Periodic cubic grid on `[0, l]^3` with `n` Fourier modes per dimension.
///
/// Index `j` along an axis carries the integer mode `m_j = j` for
/// `j <= n/2` and `m_j = j - n` otherwise, so `m_j` ranges over
/// `{-n/2+1, ..., n/2}`. The wavenumber of mode `m` is `2*pi*m / l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    l: f64,
    n: usize,
    dealias_fraction: f64,
}

pub const DEFAULT_DEALIAS_FRACTION: f64 = 2.0 / 3.0;

impl Grid {
    pub fn new(n: usize, l: f64, dealias_fraction: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidParam(format!(
                "grid.n must be even and >= 8, got {n}"
            )));
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::InvalidParam(format!("grid.l must be positive, got {l}")));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(Error::InvalidParam(format!(
                "grid.dealias_fraction must lie in (0, 1], got {dealias_fraction}"
            )));
        }
        Ok(Grid { l, n, dealias_fraction })
    }

    /// Grid with the default 2/3-rule truncation.
    pub fn cubic(n: usize, l: f64) -> Result<Self> {
        Grid::new(n, l, DEFAULT_DEALIAS_FRACTION)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Collocation spacing `l / n`.
    pub fn spacing(&self) -> f64 {
        self.l / self.n as f64
    }

    /// Total number of modes (= collocation points) `n^3`.
    pub fn num_modes(&self) -> usize {
        self.n * self.n * self.n
    }

    /// Quadrature weight of one collocation point, `(l/n)^3`.
    pub fn quad_weight(&self) -> f64 {
        let h = self.spacing();
        h * h * h
    }

    /// Volume of the box, `l^3`.
    pub fn volume(&self) -> f64 {
        self.l * self.l * self.l
    }

    /// Flat index of the mode/point `(ix, iy, iz)`; z runs fastest.
    #[inline]
    pub fn idx(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.n + iy) * self.n + iz
    }

    /// Integer mode number of axis index `j`.
    #[inline]
    pub fn mode_of(&self, j: usize) -> i64 {
        if j <= self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Wavenumber `2*pi*m_j / l` of axis index `j`.
    #[inline]
    pub fn wavenumber_of(&self, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.mode_of(j) as f64 / self.l
    }

    /// Per-axis tables of integer modes and wavenumbers, in index order.
    pub fn mode_table(&self) -> (Vec<i64>, Vec<f64>) {
        let modes: Vec<i64> = (0..self.n).map(|j| self.mode_of(j)).collect();
        let waves: Vec<f64> = (0..self.n).map(|j| self.wavenumber_of(j)).collect();
        (modes, waves)
    }

    /// Largest retained |m_j| under the dealias rule.
    pub fn dealias_limit(&self) -> f64 {
        self.dealias_fraction * self.n as f64 / 2.0
    }

    /// Whether the mode `(mx, my, mz)` survives dealiasing.
    ///
    /// A mode is zeroed as soon as any |m_j| exceeds `dealias_fraction * n/2`.
    #[inline]
    pub fn mode_retained(&self, mx: i64, my: i64, mz: i64) -> bool {
        let lim = self.dealias_limit();
        (mx.abs() as f64) <= lim && (my.abs() as f64) <= lim && (mz.abs() as f64) <= lim
    }

    pub fn same_as(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_numbering_covers_symmetric_range() {
        let g = Grid::cubic(8, 1.0).unwrap();
        let modes: Vec<i64> = (0..8).map(|j| g.mode_of(j)).collect();
        assert_eq!(modes, vec![0, 1, 2, 3, 4, -3, -2, -1]);
    }

    #[test]
    fn rejects_odd_or_small_n() {
        assert!(Grid::cubic(7, 1.0).is_err());
        assert!(Grid::cubic(6, 1.0).is_err());
        assert!(Grid::cubic(8, -1.0).is_err());
        assert!(Grid::new(8, 1.0, 0.0).is_err());
        assert!(Grid::new(8, 1.0, 1.2).is_err());
    }

    #[test]
    fn two_thirds_rule_drops_top_third() {
        let g = Grid::cubic(12, 1.0).unwrap();
        // limit = 2/3 * 6 = 4
        assert!(g.mode_retained(4, 0, 0));
        assert!(!g.mode_retained(5, 0, 0));
        assert!(!g.mode_retained(0, 0, 6));
    }
}
