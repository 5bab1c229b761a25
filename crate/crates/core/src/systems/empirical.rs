//! Lagged cross-correlation of sampled observable values with batch-means
//! standard errors.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Number of contiguous batches used for the standard-error estimate.
pub const BATCHES: usize = 16;

/// Lag sets up to this size are summed directly; larger sets go through FFT.
const DIRECT_LAG_LIMIT: usize = 64;

/// `c(n) = (1/N) Σ_{t<N} f[origin+t+n] · conj(g[origin+t])` for every lag,
/// together with a batch-means standard error.
///
/// The caller guarantees `origin + lo ≥ 0` and `origin + N + hi ≤ len` for
/// the extreme lags `lo`, `hi`.
pub fn cross_correlate(
    f: &[Complex64],
    g: &[Complex64],
    origin: usize,
    n: usize,
    lags: &[i64],
) -> (Vec<Complex64>, Vec<f64>) {
    let batches = BATCHES.min(n).max(1);
    let base = n / batches;
    let mut per_batch: Vec<Vec<Complex64>> = Vec::with_capacity(batches);
    let mut sizes = Vec::with_capacity(batches);
    for b in 0..batches {
        let start = origin + b * base;
        let len = if b + 1 == batches { n - b * base } else { base };
        let block = if lags.len() <= DIRECT_LAG_LIMIT {
            direct_block(f, g, start, len, lags)
        } else {
            fft_block(f, g, start, len, lags)
        };
        per_batch.push(block);
        sizes.push(len);
    }
    let mut values = vec![Complex64::new(0.0, 0.0); lags.len()];
    let mut stderr = vec![0.0; lags.len()];
    for (li, v) in values.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, block) in per_batch.iter().enumerate() {
            acc += block[li] * sizes[b] as f64;
        }
        *v = acc / n as f64;
    }
    if batches > 1 {
        for (li, se) in stderr.iter_mut().enumerate() {
            let mean = values[li];
            let var: f64 = per_batch.iter().map(|blk| (blk[li] - mean).norm_sqr()).sum::<f64>()
                / (batches - 1) as f64;
            *se = (var / batches as f64).sqrt();
        }
    }
    (values, stderr)
}

fn direct_block(f: &[Complex64], g: &[Complex64], start: usize, len: usize, lags: &[i64]) -> Vec<Complex64> {
    lags.iter()
        .map(|lag| {
            let fs = (start as i64 + lag) as usize;
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..len {
                acc += f[fs + t] * g[start + t].conj();
            }
            acc / len as f64
        })
        .collect()
}

fn fft_block(f: &[Complex64], g: &[Complex64], start: usize, len: usize, lags: &[i64]) -> Vec<Complex64> {
    let lo = *lags.iter().min().unwrap();
    let hi = *lags.iter().max().unwrap();
    let span = (hi - lo) as usize;
    let size = (len + span).next_power_of_two();
    let fs = (start as i64 + lo) as usize;
    let mut a = vec![Complex64::new(0.0, 0.0); size];
    a[..len + span].copy_from_slice(&f[fs..fs + len + span]);
    let mut b = vec![Complex64::new(0.0, 0.0); size];
    b[..len].copy_from_slice(&g[start..start + len]);
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);
    forward.process(&mut a);
    forward.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y.conj();
    }
    inverse.process(&mut a);
    let scale = 1.0 / (size as f64 * len as f64);
    lags.iter().map(|lag| a[(lag - lo) as usize] * scale).collect()
}
