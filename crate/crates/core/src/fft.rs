//! Batched 3D complex FFTs on the flat `z`-fastest layout used by the fields.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

struct AxisPlans {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

fn plans_for(n: usize) -> Arc<AxisPlans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<AxisPlans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(AxisPlans {
                fwd: planner.plan_fft_forward(n),
                inv: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

thread_local! {
    // Per-thread staging + rustfft scratch, reused across calls to avoid
    // allocating and zeroing n^3 buffers on every transform.
    static BUFFERS: RefCell<HashMap<usize, (Vec<Complex64>, Vec<Complex64>)>> =
        RefCell::new(HashMap::new());
}

/// In-place 3D FFT over an `n^3` buffer laid out as `[(ix*n + iy)*n + iz]`.
///
/// `inverse = false` applies `sum exp(-i 2 pi m x / l)` along each axis
/// (unnormalized); `inverse = true` the conjugate kernel. Callers own the
/// `1/n^3` normalization convention.
pub fn fft3_inplace(data: &mut [Complex64], n: usize, inverse: bool) {
    let n3 = n * n * n;
    assert_eq!(data.len(), n3);
    let plans = plans_for(n);
    let plan = if inverse { &plans.inv } else { &plans.fwd };
    BUFFERS.with(|cell| {
        let mut map = cell.borrow_mut();
        let (staged, scratch) = map.entry(n).or_insert_with(|| {
            (
                vec![Complex64::default(); n3],
                vec![
                    Complex64::default();
                    plans.fwd.get_inplace_scratch_len().max(plans.inv.get_inplace_scratch_len())
                ],
            )
        });

        // Axis z: lines are contiguous; one batched call transforms all n^2.
        plan.process_with_scratch(data, scratch);

        // Axis y: per x-plane, transpose (iy, iz) so the y-lines become
        // contiguous, batch-transform, transpose back.
        for ix in 0..n {
            let plane = &data[ix * n * n..(ix + 1) * n * n];
            let sp = &mut staged[ix * n * n..(ix + 1) * n * n];
            for iy in 0..n {
                let row = &plane[iy * n..(iy + 1) * n];
                for (iz, v) in row.iter().enumerate() {
                    sp[iz * n + iy] = *v;
                }
            }
        }
        plan.process_with_scratch(staged, scratch);
        for ix in 0..n {
            let plane = &mut data[ix * n * n..(ix + 1) * n * n];
            let sp = &staged[ix * n * n..(ix + 1) * n * n];
            for iz in 0..n {
                let row = &sp[iz * n..(iz + 1) * n];
                for (iy, v) in row.iter().enumerate() {
                    plane[iy * n + iz] = *v;
                }
            }
        }

        // Axis x: gather stride-n^2 lines into contiguous rows, transform,
        // scatter back.
        for ix in 0..n {
            let plane = &data[ix * n * n..(ix + 1) * n * n];
            for (j, v) in plane.iter().enumerate() {
                staged[j * n + ix] = *v;
            }
        }
        plan.process_with_scratch(staged, scratch);
        for ix in 0..n {
            let plane = &mut data[ix * n * n..(ix + 1) * n * n];
            for (j, v) in plane.iter_mut().enumerate() {
                *v = staged[j * n + ix];
            }
        }
    });
}

/// Forward transform of one real scalar component into `out` (normalized).
pub fn forward_scalar_into(values: &[f64], n: usize, out: &mut [Complex64]) {
    debug_assert_eq!(values.len(), n * n * n);
    debug_assert_eq!(out.len(), n * n * n);
    let norm = 1.0 / (n * n * n) as f64;
    for (o, v) in out.iter_mut().zip(values.iter()) {
        *o = Complex64::new(*v, 0.0);
    }
    fft3_inplace(out, n, false);
    for o in out.iter_mut() {
        *o *= norm;
    }
}
