//! Spectral measures from correlation sequences: Fejér estimates, atom
//! extraction, Wiener atom masses, coefficientwise convolution and Rajchman
//! tail tables.

use std::collections::BTreeMap;
use std::io::Write;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::systems::CorrelationSequence;

/// Peaks above this multiple of the median density count as atoms.
pub const ATOM_PEAK_FACTOR: f64 = 5.0;

/// Half-width of the atom integration window, in units of `1/L`.
pub const ATOM_WINDOW: f64 = 2.0;

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// A measure on `[0, 1)` as a density on `M` grid points plus atoms.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct SpectralEstimate {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub atoms: Vec<Atom>,
    pub total_mass: f64,
    /// Largest lag `L` used.
    pub max_lag: i64,
}

impl SpectralEstimate {
    /// `Σ density/M + Σ atom masses`.
    pub fn accounted_mass(&self) -> f64 {
        self.density.iter().sum::<f64>() / self.density.len() as f64 + self.atoms.iter().map(|a| a.mass).sum::<f64>()
    }

    pub fn min_density(&self) -> f64 {
        self.density.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Grid location of the largest density value.
    pub fn argmax(&self) -> f64 {
        let (j, _) = self
            .density
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (j, &d)| if d > best.1 { (j, d) } else { best });
        self.grid[j]
    }

    /// CSV with columns `theta, density`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Input(format!("csv: {e}"));
        w.write_record(["theta", "density"]).map_err(err)?;
        for (t, d) in self.grid.iter().zip(&self.density) {
            w.write_record([t.to_string(), d.to_string()]).map_err(err)?;
        }
        w.flush().map_err(|e| Error::Input(format!("csv: {e}")))
    }

    pub fn atoms_json(&self) -> String {
        serde_json::to_string_pretty(&self.atoms).expect("atoms serialize")
    }
}

/// Fejér-smoothed density `Σ_{|n|≤L} (1 − |n|/(L+1)) c(n) e^{−2πinθ_j}` on
/// `θ_j = j/M`, where `L` is the largest lag of `c`.
///
/// `c` must be an autocorrelation sequence holding every lag in `−L..=L`,
/// and `M ≥ 4L`.
pub fn fejer_estimate(c: &CorrelationSequence, m: usize) -> Result<SpectralEstimate> {
    if !c.autocorrelation {
        return input("Fejér estimates need an autocorrelation sequence (f = g)");
    }
    let l = c.max_lag();
    c.require(-l..=l)?;
    if l < 1 {
        return input("need at least lags −1..=1");
    }
    if m < 4 * l as usize {
        return input(format!("grid size {m} below 4L = {}", 4 * l));
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for n in -l..=l {
        let w = 1.0 - n.unsigned_abs() as f64 / (l + 1) as f64;
        buf[n.rem_euclid(m as i64) as usize] += c.values[&n] * w;
    }
    FftPlanner::<f64>::new().plan_fft_forward(m).process(&mut buf);
    let density: Vec<f64> = buf.iter().map(|z| z.re).collect();
    Ok(SpectralEstimate {
        grid: (0..m).map(|j| j as f64 / m as f64).collect(),
        density,
        atoms: Vec::new(),
        total_mass: c.mass.re,
        max_lag: l,
    })
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Moves peaks into atoms: a grid point above [`ATOM_PEAK_FACTOR`] × median
/// that is the maximum of its `±2/L` window becomes an atom carrying the
/// window's mass above the median; the window is then flattened to the
/// median. Total mass is unchanged.
pub fn extract_atoms(mut est: SpectralEstimate) -> SpectralEstimate {
    let m = est.density.len();
    let base = median(&est.density).max(0.0);
    let half = ((ATOM_WINDOW * m as f64 / est.max_lag as f64).ceil() as usize).min(m / 2);
    let at = |j: isize| j.rem_euclid(m as isize) as usize;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| est.density[b].total_cmp(&est.density[a]));
    let mut taken = vec![false; m];
    for j in order {
        let d = est.density[j];
        if d <= ATOM_PEAK_FACTOR * base || d <= 0.0 {
            break;
        }
        if taken[j] {
            continue;
        }
        let window: Vec<usize> = (-(half as isize)..=half as isize).map(|k| at(j as isize + k)).collect();
        if window.iter().any(|&i| est.density[i] > d) {
            continue;
        }
        let mut mass = 0.0;
        for &i in &window {
            if !taken[i] {
                mass += (est.density[i] - base) / m as f64;
                est.density[i] = base;
                taken[i] = true;
            }
        }
        est.atoms.push(Atom { location: est.grid[j], mass });
    }
    est.atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
    est
}

/// `(1/N) Σ_{n=1..N} |c(n)|²`, which tends to `Σ (atom masses)²`.
pub fn wiener_atom_mass(c: &CorrelationSequence, n: usize) -> Result<f64> {
    if n == 0 {
        return input("window must be positive");
    }
    let lags: Vec<i64> = (1..=n as i64).collect();
    let values = c.at(&lags)?;
    Ok(values.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64)
}

/// Coefficientwise product `c1(n)·c2(n)`: the Fourier coefficients of the
/// convolution of the two measures.
pub fn convolve_coefficients(c1: &CorrelationSequence, c2: &CorrelationSequence) -> Result<CorrelationSequence> {
    if !c1.values.keys().eq(c2.values.keys()) {
        return input("sequences must share their lag set");
    }
    let values: BTreeMap<i64, Complex64> = c1.values.iter().map(|(n, v)| (*n, v * c2.values[n])).collect();
    let mass = values[&0];
    Ok(CorrelationSequence {
        values,
        stderr: BTreeMap::new(),
        mass,
        centered: c1.centered || c2.centered,
        autocorrelation: c1.autocorrelation && c2.autocorrelation,
    })
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct RajchmanRow {
    pub threshold: f64,
    /// Least `N ≥ 1` with `sup_{N ≤ n ≤ L} |c(n)| ≤ threshold`, if any.
    pub attained_at: Option<i64>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct RajchmanTable {
    pub max_lag: i64,
    pub rows: Vec<RajchmanRow>,
}

/// Tail-decay table over the positive lags of `c`.
pub fn rajchman_report(c: &CorrelationSequence, thresholds: &[f64]) -> Result<RajchmanTable> {
    let positive: Vec<(i64, f64)> = c.values.range(1..).map(|(n, v)| (*n, v.norm())).collect();
    if positive.is_empty() {
        return input("no positive lags");
    }
    // suffix[i] = max |c| over positive[i..].
    let mut suffix = vec![0.0f64; positive.len() + 1];
    for i in (0..positive.len()).rev() {
        suffix[i] = suffix[i + 1].max(positive[i].1);
    }
    let rows = thresholds
        .iter()
        .map(|&eps| {
            let first = (0..positive.len()).find(|&i| suffix[i] <= eps);
            RajchmanRow { threshold: eps, attained_at: first.map(|i| positive[i].0) }
        })
        .collect();
    Ok(RajchmanTable { max_lag: positive.last().unwrap().0, rows })
}
