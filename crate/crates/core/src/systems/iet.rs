//! Interval exchange transformations of `[0, 1)`.
//!
//! Subinterval `i` has length `lengths[i]` and moves to position
//! `permutation[i]` (0-based) in the image ordering. Branches are
//! right-continuous: a point on a discontinuity belongs to the interval
//! starting there.

use crate::error::{input, Result};

/// Checks that `lengths` is a probability vector and `permutation` a
/// bijection of `0..lengths.len()`.
pub fn validate(lengths: &[f64], permutation: &[usize]) -> Result<()> {
    if lengths.is_empty() {
        return input("an interval exchange needs at least one interval");
    }
    if lengths.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
        return input("interval lengths must be positive and finite");
    }
    let total: f64 = lengths.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return input(format!("interval lengths sum to {total}, expected 1"));
    }
    if permutation.len() != lengths.len() {
        return input("permutation length differs from interval count");
    }
    let mut seen = vec![false; permutation.len()];
    for p in permutation {
        if *p >= seen.len() || seen[*p] {
            return input(format!("permutation {permutation:?} is not a bijection"));
        }
        seen[*p] = true;
    }
    Ok(())
}

/// Translation applied to each subinterval.
pub fn translations(lengths: &[f64], permutation: &[usize]) -> Vec<f64> {
    let n = lengths.len();
    let mut order = vec![0usize; n];
    for (i, p) in permutation.iter().enumerate() {
        order[*p] = i;
    }
    let mut image_start = vec![0.0; n];
    let mut acc = 0.0;
    for i in order {
        image_start[i] = acc;
        acc += lengths[i];
    }
    let mut start = 0.0;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(image_start[i] - start);
        start += lengths[i];
    }
    out
}

/// Precomputed exchange for repeated application.
#[derive(Debug, Clone)]
pub struct Iet {
    starts: Vec<f64>,
    shifts: Vec<f64>,
}

impl Iet {
    pub fn new(lengths: &[f64], permutation: &[usize]) -> Result<Self> {
        validate(lengths, permutation)?;
        let mut starts = Vec::with_capacity(lengths.len());
        let mut acc = 0.0;
        for l in lengths {
            starts.push(acc);
            acc += l;
        }
        Ok(Iet { starts, shifts: translations(lengths, permutation) })
    }

    pub fn apply(&self, x: f64) -> f64 {
        // Last interval whose start is ≤ x: right-continuous branches.
        let i = self.starts.partition_point(|s| *s <= x).saturating_sub(1);
        let y = x + self.shifts[i];
        // Round-off can push an image just outside [0, 1).
        if y < 0.0 {
            0.0
        } else if y >= 1.0 {
            y - 1.0
        } else {
            y
        }
    }
}

/// Image of `x ∈ [0, 1)` under the exchange.
pub fn iet_apply(lengths: &[f64], permutation: &[usize], x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return input(format!("point {x} is outside [0, 1)"));
    }
    Ok(Iet::new(lengths, permutation)?.apply(x))
}
