//! Fourier coefficients of the uniform Cantor measure on base-4 expansions
//! with digits in {0, 1}.

use num_complex::Complex64;

/// Default truncation depth of the infinite product.
pub const DEFAULT_TRUNCATION: u32 = 40;

/// Smallest truncation accepted by [`super::BaseMeasure::Cantor4`].
pub const MIN_TRUNCATION: u32 = 8;

/// Position `k ≥ 1` of the factor that vanishes in the product for `n`, i.e.
/// the `k` with `n ≡ 2·4^{k−1} (mod 4^k)`, if any.
///
/// Equivalently: the least significant nonzero base-4 digit of `|n|` is 2,
/// sitting at digit position `k − 1`.
pub fn vanishing_factor(n: i64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let mut m = n.unsigned_abs();
    let mut k = 1;
    while m % 4 == 0 {
        m /= 4;
        k += 1;
    }
    (m % 4 == 2).then_some(k)
}

/// True iff the first (least significant) nonzero base-4 digit of `|n|` is 2.
pub fn first_nonzero_digit_is_two(n: i64) -> bool {
    vanishing_factor(n).is_some()
}

/// `∏_{k=1}^{K} (1 + e^{−2πi n 4^{−k}}) / 2`.
///
/// When the digit rule puts a vanishing factor inside the truncation the
/// result is exactly zero. Otherwise each factor is written as
/// `e^{−πiθ_k} cos(πθ_k)` with `θ_k = (|n| mod 4^k) / 4^k` computed in integer
/// arithmetic, so the phases are exact; negative `n` is handled by conjugation.
pub fn cantor_fourier(n: i64, truncation: u32) -> Complex64 {
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if let Some(k) = vanishing_factor(n) {
        if k <= truncation {
            return Complex64::new(0.0, 0.0);
        }
    }
    // σ is a real measure, so σ̂(−n) = conj σ̂(n).
    let value = positive_transform(n.unsigned_abs(), truncation);
    if n < 0 {
        value.conj()
    } else {
        value
    }
}

fn positive_transform(n: u64, truncation: u32) -> Complex64 {
    let n = n as u128;
    let mut modulus = 1.0f64;
    let mut phase = 0.0f64;
    for k in 1..=truncation {
        let theta = if k < 64 {
            let q = 1u128 << (2 * k);
            (n % q) as f64 / q as f64
        } else {
            // 4^k exceeds every u64, so θ_k = n / 4^k.
            n as f64 / 2f64.powi(2 * k as i32)
        };
        modulus *= (std::f64::consts::PI * theta).cos();
        phase += theta;
    }
    Complex64::from_polar(modulus, -std::f64::consts::PI * phase.rem_euclid(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(cantor_fourier(0, DEFAULT_TRUNCATION), Complex64::new(1.0, 0.0));
        for k in [8, 20, 40] {
            assert_eq!(cantor_fourier(2, k), Complex64::new(0.0, 0.0));
            assert_eq!(cantor_fourier(8, k), Complex64::new(0.0, 0.0));
            assert_eq!(cantor_fourier(-2, k), Complex64::new(0.0, 0.0));
        }
        assert!(!first_nonzero_digit_is_two(1));
        assert!(first_nonzero_digit_is_two(6)); // 12 in base 4
        assert!(!first_nonzero_digit_is_two(9)); // 21 in base 4
    }

    #[test]
    fn matches_digit_sum_oracle() {
        // Brute force over all 2^20 points Σ d_k 4^{-k} with d ∈ {0,1}^20.
        let depth = 20;
        let mut sum = Complex64::new(0.0, 0.0);
        for bits in 0u32..(1 << depth) {
            let mut x = 0.0f64;
            for k in 0..depth {
                if bits >> k & 1 == 1 {
                    x += 4f64.powi(-(k as i32 + 1));
                }
            }
            sum += Complex64::from_polar(1.0, -std::f64::consts::TAU * x);
        }
        let oracle = sum / (1u64 << depth) as f64;
        assert!((cantor_fourier(1, depth as u32) - oracle).norm() < 1e-10);
        assert!((cantor_fourier(1, DEFAULT_TRUNCATION) - oracle).norm() < 1e-10);
    }

    #[test]
    fn conjugate_symmetry_and_scaling() {
        for n in 1..300 {
            let a = cantor_fourier(n, 40);
            let b = cantor_fourier(-n, 40);
            assert!((a - b.conj()).norm() < 1e-14);
            // Exact truncation identity: μ̂_K(4n) = μ̂_{K−1}(n).
            assert!((cantor_fourier(4 * n, 40) - cantor_fourier(n, 39)).norm() < 1e-14);
        }
    }
}
