//! The Rudin–Shapiro sequence `r_n = (−1)^{#"11" blocks in binary n}`.

use crate::error::{input, Result};

/// Largest sequence length served by [`rudin_shapiro_sequence`].
pub const MAX_LEN: usize = 1 << 26;

/// `r_n` for any `n ≥ 0`.
pub fn rudin_shapiro(n: u64) -> i8 {
    if (n & (n >> 1)).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `r_0, …, r_{len−1}`.
pub fn rudin_shapiro_sequence(len: usize) -> Result<Vec<i8>> {
    if len == 0 || len > MAX_LEN {
        return input(format!("length must be in 1..=2^26, got {len}"));
    }
    Ok((0..len as u64).map(rudin_shapiro).collect())
}

/// Symbolic form used by the subshift: `+` for `+1`, `-` for `−1`.
pub fn symbol(n: u64) -> u8 {
    if rudin_shapiro(n) > 0 {
        b'+'
    } else {
        b'-'
    }
}
