use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

static PLANS: Lazy<Mutex<HashMap<usize, Arc<Plans>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn plans(n: usize) -> Arc<Plans> {
    let mut cache = PLANS.lock().unwrap_or_else(|e| e.into_inner());
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    // Blocked so that both the reads and the writes stay in cache.
    const B: usize = 16;
    for bi in (0..n).step_by(B) {
        for bj in (0..n).step_by(B) {
            for i in bi..(bi + B).min(n) {
                for j in bj..(bj + B).min(n) {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}

/// Unnormalized 2D DFT in place over a row-major `n x n` buffer.
pub(crate) fn fft2(data: &mut [Complex64], n: usize, inverse: bool) {
    debug_assert_eq!(data.len(), n * n);
    let p = plans(n);
    let plan = if inverse { &p.inverse } else { &p.forward };
    let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
    plan.process_with_scratch(data, &mut scratch);
    let mut t = vec![Complex64::default(); n * n];
    transpose(data, &mut t, n);
    plan.process_with_scratch(&mut t, &mut scratch);
    transpose(&t, data, n);
}
