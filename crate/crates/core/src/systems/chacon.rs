//! The Chacon subshift, generated by the substitution `0 → 0010`, `1 → 1`.
//!
//! Iterating the substitution on `0` gives nested words `B_{k+1} = B_k B_k 1 B_k`
//! whose lengths are the tower heights `h_{k+1} = 3h_k + 1`, `h_0 = 1`.

use crate::error::{input, Result};

/// Largest number of tower heights that fit in 64 bits.
pub const MAX_HEIGHTS: usize = 40;

/// Spacer symbol.
pub const SPACER: u8 = b'1';
/// Tower symbol.
pub const TOWER: u8 = b'0';

/// First `count` tower heights `1, 4, 13, 40, …`.
pub fn chacon_heights(count: usize) -> Result<Vec<u64>> {
    if count == 0 || count > MAX_HEIGHTS {
        return input(format!("height count must be in 1..={MAX_HEIGHTS}, got {count}"));
    }
    let mut h = vec![1u64];
    while h.len() < count {
        let last = *h.last().unwrap();
        h.push(3 * last + 1);
    }
    Ok(h)
}

/// Prefix of length `len` of the one-sided fixed point starting with `0`.
pub fn chacon_word(len: usize) -> Vec<u8> {
    let mut word = vec![TOWER];
    while word.len() < len {
        let mut next = Vec::with_capacity(word.len() * 3 + 1);
        // B_{k+1} = B_k B_k 1 B_k, which is the substitution applied letterwise.
        next.extend_from_slice(&word);
        next.extend_from_slice(&word);
        next.push(SPACER);
        next.extend_from_slice(&word);
        word = next;
    }
    word.truncate(len);
    word
}

#[cfg(test)]
mod tests {
    use super::*;

    fn substitute(word: &[u8]) -> Vec<u8> {
        word.iter()
            .flat_map(|c| if *c == TOWER { b"0010".to_vec() } else { b"1".to_vec() })
            .collect()
    }

    #[test]
    fn heights() {
        assert_eq!(chacon_heights(1).unwrap(), vec![1]);
        assert_eq!(chacon_heights(3).unwrap(), vec![1, 4, 13]);
        assert_eq!(chacon_heights(5).unwrap(), vec![1, 4, 13, 40, 121]);
        let all = chacon_heights(MAX_HEIGHTS).unwrap();
        assert_eq!(*all.last().unwrap(), (3u64.pow(40) - 1) / 2);
        assert!(chacon_heights(41).is_err());
        assert!(chacon_heights(0).is_err());
    }

    #[test]
    fn block_recursion_agrees_with_substitution() {
        let mut w = b"0".to_vec();
        for _ in 0..6 {
            w = substitute(&w);
        }
        assert_eq!(chacon_word(w.len()), w);
        // Heights are the block lengths.
        for (k, h) in chacon_heights(7).unwrap().into_iter().enumerate() {
            let mut b = b"0".to_vec();
            for _ in 0..k {
                b = substitute(&b);
            }
            assert_eq!(b.len() as u64, h);
        }
    }

    #[test]
    fn spacers_are_isolated() {
        let w = chacon_word(100_000);
        assert!(!w.windows(2).any(|p| p == b"11"));
        let ones = w.iter().filter(|c| **c == SPACER).count() as f64 / w.len() as f64;
        assert!((ones - 1.0 / 3.0).abs() < 1e-3);
    }
}
