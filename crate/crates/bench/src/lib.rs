//! Shared setup helpers for the spectral-kernel benchmarks.

use bfed_core::field::random_field;
use bfed_core::params::{AssimParams, ForcingField, ForcingKind, ForcingSpec, PhysicalParams};
use bfed_core::interpolant::{InterpolantKind, InterpolantSpec};
use bfed_core::rng::stream;
use bfed_core::{Grid, SpectralField};

pub struct BenchSetup {
    pub grid: Grid,
    pub phys: PhysicalParams,
    pub assim: AssimParams,
    pub forcing: ForcingField,
    pub u: SpectralField,
    pub w: SpectralField,
}

pub fn setup(n: usize) -> BenchSetup {
    let grid = Grid::cubic(n, 2.0 * std::f64::consts::PI).unwrap();
    let phys = PhysicalParams::new(0.1, grid.l(), 2.0, 0.1).unwrap();
    let forcing = ForcingSpec {
        kind: ForcingKind::RandomLowMode,
        amplitude: 0.1,
        m_min: 1,
        m_max: 2,
        seed: 7,
        modulation_freq: None,
    }
    .realize(grid)
    .unwrap();
    let assim = AssimParams::new(
        2.0,
        0.1,
        10.0,
        InterpolantSpec::with_default_constants(InterpolantKind::FourierLowpass, grid.l() / 4.0)
            .unwrap(),
    )
    .unwrap();
    let m_max = grid.dealias_limit().floor() as i64;
    let u = random_field(grid, &mut stream(1, "bench", 0), 1, m_max, 0.8, 0.3, true);
    let w = random_field(grid, &mut stream(1, "bench", 1), 1, m_max, 0.8, 0.25, true);
    BenchSetup { grid, phys, assim, forcing, u, w }
}
