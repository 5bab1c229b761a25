//! Finite proxies for limits along ultrafilters: explicit subsequences,
//! Følner–Cesàro windows `[0, N)`, IP finite-sum grids and tail suprema,
//! together with the finitary van der Corput inequality and conclusion
//! checks.

use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::operator::{final_quarter_start, random_unitary, sequence_limit_operator};
use crate::operator::{ComplexMatrix, LimitOperatorReport};
use crate::systems::CorrelationSequence;

/// Largest number of IP generators.
pub const MAX_IP_GENERATORS: usize = 20;

/// Random unit vectors added to the standard basis when probing `sup_y`.
pub const PROBE_VECTORS: usize = 32;

/// Seed of the probe vectors.
pub const PROBE_SEED: u64 = 0x7d_c0;

/// Slack for the van der Corput inequality.
pub const VDC_SLACK: f64 = 1e-12;

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitScheme {
    /// `lim_k c(n_k)` over a strictly increasing index list.
    Subsequence { indices: Vec<i64> },
    /// `(1/N) Σ_{n<N} |c(n)|` for increasing window lengths.
    FolnerCesaro { windows: Vec<usize> },
    /// `c` over the nonempty finite sums of the first `depth` generators.
    IpGrid { generators: Vec<i64>, depth: usize },
    /// `sup_{n ≥ start} |c(n)|` over the available lags.
    TailSup { start: i64 },
}

impl LimitScheme {
    pub fn subsequence(indices: Vec<i64>) -> Self {
        LimitScheme::Subsequence { indices }
    }

    pub fn label(&self) -> String {
        match self {
            LimitScheme::Subsequence { indices } => match (indices.first(), indices.last()) {
                (Some(a), Some(b)) => format!("subsequence[{} terms, {a}..{b}]", indices.len()),
                _ => "subsequence[]".into(),
            },
            LimitScheme::FolnerCesaro { windows } => format!("folner_cesaro{windows:?}"),
            LimitScheme::IpGrid { generators, depth } => format!("ip_grid(depth {depth} of {})", generators.len()),
            LimitScheme::TailSup { start } => format!("tail_sup(n ≥ {start})"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LimitScheme::Subsequence { indices } => {
                if indices.len() < 2 {
                    return input("a subsequence needs at least two indices");
                }
                if indices.windows(2).any(|w| w[0] >= w[1]) {
                    return input("subsequence indices must be strictly increasing");
                }
            }
            LimitScheme::FolnerCesaro { windows } => {
                if windows.is_empty() || windows[0] == 0 {
                    return input("folner windows must be nonempty and positive");
                }
                if windows.windows(2).any(|w| w[0] >= w[1]) {
                    return input("folner windows must be strictly increasing");
                }
            }
            LimitScheme::IpGrid { generators, depth } => {
                if generators.len() > MAX_IP_GENERATORS {
                    return input(format!("at most {MAX_IP_GENERATORS} IP generators"));
                }
                if *depth == 0 || *depth > generators.len() {
                    return input(format!("IP depth {depth} must lie in 1..={}", generators.len()));
                }
            }
            LimitScheme::TailSup { .. } => {}
        }
        Ok(())
    }

    /// Lags the scheme reads. For `tail_sup` this is only the start lag.
    pub fn required_lags(&self) -> Result<Vec<i64>> {
        self.validate()?;
        Ok(match self {
            LimitScheme::Subsequence { indices } => indices.clone(),
            LimitScheme::FolnerCesaro { windows } => (0..*windows.last().unwrap() as i64).collect(),
            LimitScheme::IpGrid { generators, depth } => ip_sums(&generators[..*depth])?,
            LimitScheme::TailSup { start } => vec![*start],
        })
    }
}

/// All nonempty finite sums of distinct generators, in subset-bitmask order.
pub fn ip_sums(generators: &[i64]) -> Result<Vec<i64>> {
    if generators.len() > MAX_IP_GENERATORS {
        return input(format!("at most {MAX_IP_GENERATORS} IP generators"));
    }
    let count = 1usize << generators.len();
    let mut sums = vec![0i64; count];
    for mask in 1..count {
        let bit = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)]
            .checked_add(generators[bit])
            .ok_or_else(|| Error::Input("IP sum overflows".into()))?;
    }
    sums.remove(0);
    Ok(sums)
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct LimitReport {
    pub scheme: String,
    pub value: Option<Complex64>,
    pub converged: bool,
    pub deviation: f64,
    pub samples_used: usize,
    pub tolerance: f64,
}

impl LimitReport {
    pub fn modulus(&self) -> Option<f64> {
        self.value.map(|v| v.norm())
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol >= 0.0) {
        return input(format!("tolerance {tol} must be finite and nonnegative"));
    }
    Ok(())
}

/// Stabilisation over the final quarter: the value is the last entry, the
/// deviation the largest distance from it, and convergence additionally
/// requires successive entries to differ by at most `tol`.
fn last_quarter(values: &[Complex64], tol: f64) -> (Complex64, f64, bool) {
    let window = &values[final_quarter_start(values.len())..];
    let value = *window.last().unwrap();
    let deviation = window.iter().map(|v| (v - value).norm()).fold(0.0, f64::max);
    let step = window.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max);
    (value, deviation, step <= tol && deviation <= tol)
}

/// Evaluates `c` along `scheme`.
pub fn evaluate_limit(c: &CorrelationSequence, scheme: &LimitScheme, tol: f64) -> Result<LimitReport> {
    check_tol(tol)?;
    let lags = scheme.required_lags()?;
    c.require(lags.iter().copied())?;
    let report = |value, deviation, converged, samples_used| LimitReport {
        scheme: scheme.label(),
        value: Some(value),
        converged,
        deviation,
        samples_used,
        tolerance: tol,
    };
    Ok(match scheme {
        LimitScheme::Subsequence { indices } => {
            let values = c.at(indices)?;
            let (value, deviation, converged) = last_quarter(&values, tol);
            report(value, deviation, converged, indices.len())
        }
        LimitScheme::FolnerCesaro { windows } => {
            let mut averages = Vec::with_capacity(windows.len());
            let mut acc = 0.0;
            let mut n = 0i64;
            for &w in windows {
                while n < w as i64 {
                    acc += c.values[&n].norm();
                    n += 1;
                }
                averages.push(acc / w as f64);
            }
            let value = *averages.last().unwrap();
            let deviation = averages.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
            report(Complex64::new(value, 0.0), deviation, deviation <= tol, n as usize)
        }
        LimitScheme::IpGrid { .. } => {
            let values = c.at(&lags)?;
            grid_report(scheme.label(), &values, tol)
        }
        LimitScheme::TailSup { start } => {
            let tail: Vec<f64> = c.values.range(*start..).map(|(_, v)| v.norm()).collect();
            let sup = tail.iter().copied().fold(0.0, f64::max);
            report(Complex64::new(sup, 0.0), 0.0, true, tail.len())
        }
    })
}

fn grid_report(scheme: String, values: &[Complex64], tol: f64) -> LimitReport {
    let mean = values.iter().sum::<Complex64>() / values.len() as f64;
    let deviation = values.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
    LimitReport {
        scheme,
        value: Some(mean),
        converged: deviation <= tol,
        deviation,
        samples_used: values.len(),
        tolerance: tol,
    }
}

/// Sums `n_j + n_k` with both indices in the final quarter.
pub fn sumset_grid(indices: &[i64]) -> Result<Vec<i64>> {
    let w = &indices[final_quarter_start(indices.len())..];
    let mut out = Vec::with_capacity(w.len() * w.len());
    for a in w {
        for b in w {
            out.push(a.checked_add(*b).ok_or_else(|| Error::Input("sumset index overflows".into()))?);
        }
    }
    Ok(out)
}

/// Differences `n_k − n_j` with `j` in the third quarter and `k` in the final quarter.
pub fn difference_grid(indices: &[i64]) -> Vec<i64> {
    let q4 = final_quarter_start(indices.len());
    let q3 = final_quarter_start(q4);
    let mut out = Vec::new();
    for j in q3..q4 {
        for k in q4..indices.len() {
            out.push(indices[k] - indices[j]);
        }
    }
    out
}

/// Limit of `c` over an explicit grid of lags: mean value, converged iff every
/// grid value lies within `tol` of it.
pub fn grid_limit(c: &CorrelationSequence, grid: &[i64], label: &str, tol: f64) -> Result<LimitReport> {
    check_tol(tol)?;
    if grid.is_empty() {
        return input("empty grid");
    }
    Ok(grid_report(label.to_string(), &c.at(grid)?, tol))
}

/// Operator-level counterpart of [`evaluate_limit`]: approximates the limit
/// of `Uⁿ` along a scheme. Følner windows give Cesàro means `(1/N) Σ_{n<N} Uⁿ`;
/// IP grids give the mean of `U^s` over the finite sums. Tail suprema have no
/// operator meaning.
pub fn limit_operator(u: &ComplexMatrix, scheme: &LimitScheme, tol: f64) -> Result<LimitOperatorReport> {
    check_tol(tol)?;
    scheme.validate()?;
    let defect = u.unitarity_defect();
    if defect > tol.max(1e-9) {
        return input(format!("matrix is not unitary: defect {defect:.3e}"));
    }
    match scheme {
        LimitScheme::Subsequence { indices } => sequence_limit_operator(u, indices, tol),
        LimitScheme::FolnerCesaro { windows } => {
            let dim = u.dim();
            let mut power = ComplexMatrix::identity(dim);
            let mut acc = ComplexMatrix::zeros(dim);
            let mut means = Vec::with_capacity(windows.len());
            let mut n = 0usize;
            for &w in windows {
                while n < w {
                    acc = &acc + &power;
                    power = &power * u;
                    n += 1;
                }
                means.push(acc.scale(Complex64::new(1.0 / w as f64, 0.0)));
            }
            let limit = means.last().unwrap().clone();
            let residual = means.windows(2).map(|w| (&w[1] - &w[0]).frobenius_norm()).fold(0.0, f64::max);
            Ok(LimitOperatorReport { limit, converged: residual <= tol, residual, tolerance: tol })
        }
        LimitScheme::IpGrid { generators, depth } => {
            let sums = ip_sums(&generators[..*depth])?;
            let powers: Vec<ComplexMatrix> = sums.iter().map(|s| u.power_signed(*s)).collect();
            let mut mean = ComplexMatrix::zeros(u.dim());
            for p in &powers {
                mean = &mean + p;
            }
            let mean = mean.scale(Complex64::new(1.0 / powers.len() as f64, 0.0));
            let residual = powers.iter().map(|p| (p - &mean).frobenius_norm()).fold(0.0, f64::max);
            Ok(LimitOperatorReport { limit: mean, converged: residual <= tol, residual, tolerance: tol })
        }
        LimitScheme::TailSup { .. } => Err(Error::Capability("tail_sup has no limit operator".into())),
    }
}

/// Writes reports as CSV rows.
pub fn write_reports_csv<W: Write>(reports: &[LimitReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Input(format!("csv: {e}"));
    w.write_record(["scheme", "re", "im", "converged", "deviation", "samples_used", "tolerance"])
        .map_err(err)?;
    for r in reports {
        let v = r.value.unwrap_or_default();
        w.write_record([
            r.scheme.clone(),
            if r.value.is_some() { v.re.to_string() } else { String::new() },
            if r.value.is_some() { v.im.to_string() } else { String::new() },
            r.converged.to_string(),
            r.deviation.to_string(),
            r.samples_used.to_string(),
            r.tolerance.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::Input(format!("csv: {e}")))
}

/// Unitary `U ⊕ S` on `Cᵈ ⊕ ℓ²(Z)`: `U` has rational eigenphases
/// `numerators[i] / q` in a random eigenbasis and `S` is the bilateral
/// shift, which is mixing. Vectors have finitely supported shift parts.
#[derive(Clone, Debug)]
pub struct ShiftUnitaryModel {
    pub q: u64,
    pub numerators: Vec<u64>,
    pub basis: ComplexMatrix,
}

/// A vector of a [`ShiftUnitaryModel`]: atomic coordinates plus shift
/// coefficients at positions `0..shift.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelVector {
    pub atomic: Vec<Complex64>,
    pub shift: Vec<Complex64>,
}

impl ModelVector {
    pub fn norm(&self) -> f64 {
        self.atomic.iter().chain(&self.shift).map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_atomic_zero(&self) -> bool {
        self.atomic.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }
}

fn gaussian_vector<R: Rng>(len: usize, rng: &mut R) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
        .collect()
}

impl ShiftUnitaryModel {
    pub fn random<R: Rng>(dim: usize, q: u64, rng: &mut R) -> Self {
        let numerators = (0..dim).map(|_| rng.random_range(0..q)).collect();
        ShiftUnitaryModel { q, numerators, basis: random_unitary(dim, rng) }
    }

    pub fn dim(&self) -> usize {
        self.numerators.len()
    }

    /// `Uⁿ`, exact in the phases since `n` is reduced mod `q`.
    pub fn atomic_power(&self, n: i64) -> ComplexMatrix {
        let q = self.q as i64;
        let phases: Vec<f64> = self
            .numerators
            .iter()
            .map(|&a| ((a as i64 * n.rem_euclid(q)).rem_euclid(q)) as f64 / q as f64)
            .collect();
        let d = ComplexMatrix::phases(&phases);
        &(&self.basis * &d) * &self.basis.adjoint()
    }

    /// `⟨Wⁿf, g⟩`.
    pub fn pairing(&self, n: i64, f: &ModelVector, g: &ModelVector) -> Complex64 {
        let uf = self.atomic_power(n).apply(&f.atomic);
        let mut total: Complex64 = uf.iter().zip(&g.atomic).map(|(a, b)| a * b.conj()).sum();
        for (j, fj) in f.shift.iter().enumerate() {
            let pos = j as i64 + n;
            if pos >= 0 && (pos as usize) < g.shift.len() {
                total += fj * g.shift[pos as usize].conj();
            }
        }
        total
    }

    pub fn correlation(&self, f: &ModelVector, g: &ModelVector, lags: &[i64]) -> CorrelationSequence {
        CorrelationSequence::from_fn(lags.iter().copied(), f == g, |n| self.pairing(n, f, g))
    }

    /// Coordinate probes: atomic basis vectors and shift positions `−w..2w`
    /// where `w` is the support width of `f`.
    fn probes(&self, f: &ModelVector) -> Vec<(Vec<Complex64>, i64)> {
        let d = self.dim();
        let mut out: Vec<(Vec<Complex64>, i64)> = (0..d)
            .map(|i| {
                let mut e = vec![Complex64::new(0.0, 0.0); d];
                e[i] = Complex64::new(1.0, 0.0);
                (e, i64::MIN)
            })
            .collect();
        let w = f.shift.len() as i64;
        out.extend((-w..2 * w).map(|p| (vec![Complex64::new(0.0, 0.0); d], p)));
        out
    }

    /// Weak limit of `Wⁿf` over a grid of lags, tested through its pairings
    /// with coordinate probes. Returns `Some(true)` when every pairing tends to
    /// zero within `tol`, `Some(false)` when some converged pairing is larger,
    /// `None` when a pairing fails to converge.
    pub fn weak_limit_vanishes(&self, f: &ModelVector, grid: &[i64], tol: f64) -> Option<bool> {
        let mut all_zero = true;
        for (atomic, pos) in self.probes(f) {
            let values: Vec<Complex64> = grid
                .iter()
                .map(|&n| {
                    if pos == i64::MIN {
                        let uf = self.atomic_power(n).apply(&f.atomic);
                        uf.iter().zip(&atomic).map(|(a, b)| a * b.conj()).sum()
                    } else {
                        let j = pos - n;
                        if j >= 0 && (j as usize) < f.shift.len() {
                            f.shift[j as usize]
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    }
                })
                .collect();
            let report = grid_report(String::new(), &values, tol);
            if !report.converged {
                return None;
            }
            if report.value.unwrap().norm() > tol {
                all_zero = false;
            }
        }
        Some(all_zero)
    }

    /// Fast-growing indices `n_k = r + q(2^k + k)`, `k = 1..=count`, all in
    /// one residue class mod `q`.
    pub fn indices(&self, residue: u64, count: usize) -> Vec<i64> {
        (1..=count as i64).map(|k| residue as i64 + self.q as i64 * ((1i64 << k) + k)).collect()
    }

    pub fn random_vector<R: Rng>(&self, atomic_zero: bool, shift_width: usize, rng: &mut R) -> ModelVector {
        let atomic = if atomic_zero {
            vec![Complex64::new(0.0, 0.0); self.dim()]
        } else {
            gaussian_vector(self.dim(), rng)
        };
        let mut v = ModelVector { atomic, shift: gaussian_vector(shift_width, rng) };
        let n = v.norm();
        v.atomic.iter_mut().chain(v.shift.iter_mut()).for_each(|z| *z /= n);
        v
    }
}

/// Outcome of comparing the three index families of one model.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct SchemeEquivalence {
    pub along_sequence: Option<bool>,
    pub along_sumset: Option<bool>,
    pub along_differences: Option<bool>,
}

impl SchemeEquivalence {
    /// All three verdicts exist and agree.
    pub fn agrees(&self) -> bool {
        match (self.along_sequence, self.along_sumset, self.along_differences) {
            (Some(a), Some(b), Some(c)) => a == b && b == c,
            _ => false,
        }
    }
}

/// Zero-limit of `Wⁿf` along `(n_k)`, the sumset grid and the difference grid.
pub fn scheme_equivalence(model: &ShiftUnitaryModel, f: &ModelVector, indices: &[i64], tol: f64) -> Result<SchemeEquivalence> {
    LimitScheme::subsequence(indices.to_vec()).validate()?;
    let tail = &indices[final_quarter_start(indices.len())..];
    Ok(SchemeEquivalence {
        along_sequence: model.weak_limit_vanishes(f, tail, tol),
        along_sumset: model.weak_limit_vanishes(f, &sumset_grid(indices)?, tol),
        along_differences: model.weak_limit_vanishes(f, &difference_grid(indices), tol),
    })
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct VdcInequality {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

fn probe_set(dim: usize) -> Vec<Vec<Complex64>> {
    let mut probes: Vec<Vec<Complex64>> = (0..dim)
        .map(|i| {
            let mut e = vec![Complex64::new(0.0, 0.0); dim];
            e[i] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    for _ in 0..PROBE_VECTORS {
        let mut v = gaussian_vector(dim, &mut rng);
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= n);
        probes.push(v);
    }
    probes
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// `max_y |(1/N) Σ⟨y, x_k⟩|² ≤ (1/N²) Σ_{k,k'} Re⟨x_k, x_k'⟩` over the probe set.
pub fn vdc_inequality_check(xs: &[Vec<Complex64>]) -> Result<VdcInequality> {
    let Some(first) = xs.first() else {
        return input("need at least one vector");
    };
    let dim = first.len();
    if dim == 0 || xs.iter().any(|x| x.len() != dim) {
        return input("vectors must share a positive dimension");
    }
    for (k, x) in xs.iter().enumerate() {
        let norm = inner(x, x).re.sqrt();
        if !norm.is_finite() || norm > 1.0 + VDC_SLACK {
            return input(format!("‖x_{k}‖ = {norm} exceeds 1"));
        }
    }
    let n = xs.len() as f64;
    let mut avg = vec![Complex64::new(0.0, 0.0); dim];
    for x in xs {
        for (a, v) in avg.iter_mut().zip(x) {
            *a += v / n;
        }
    }
    let lhs = probe_set(dim).iter().map(|y| inner(y, &avg).norm_sqr()).fold(0.0, f64::max);
    let mut rhs = 0.0;
    for a in xs {
        for b in xs {
            rhs += inner(a, b).re;
        }
    }
    rhs /= n * n;
    Ok(VdcInequality { lhs, rhs, holds: lhs <= rhs + VDC_SLACK })
}

/// Gram table `⟨x_r, x_t⟩` over a list of indices.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct PairTable {
    pub indices: Vec<i64>,
    pub gram: Vec<Vec<Complex64>>,
}

impl PairTable {
    pub fn from_vectors(indices: Vec<i64>, xs: &[Vec<Complex64>]) -> Self {
        let gram = xs.iter().map(|a| xs.iter().map(|b| inner(a, b)).collect()).collect();
        PairTable { indices, gram }
    }

    fn position(&self, n: i64) -> Option<usize> {
        self.indices.iter().position(|&m| m == n)
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct VdcConclusion {
    pub double_limit: LimitReport,
    pub single_limit: LimitReport,
    /// `sqrt(1/N + |D| + dev_D) + tol`, with `N` the window size.
    pub bound: f64,
    /// `None` when either limit fails to converge.
    pub verdict: Option<bool>,
}

/// Finitary form of "if `lim_r lim_t ⟨x_r, x_t⟩ = 0` then `lim_n ⟨y, x_n⟩ = 0`".
///
/// Over the final-quarter window `W` (`N` indices) of a subsequence scheme,
/// the double limit `D` is the mean of `⟨x_r, x_t⟩` over `r < t` in `W`, and
/// the single limit `L` is the subsequence limit of the pairings. Since
/// `|(1/N) Σ_W ⟨y, x_n⟩|² ≤ 1/N + max_{r≠t} |⟨x_r, x_t⟩|`, the verdict is
/// true unless `|D| ≤ tol` and `|L| > sqrt(1/N + |D| + dev_D) + tol`.
pub fn vdc_conclusion_check(
    c2: &PairTable,
    scheme: &LimitScheme,
    y_pairings: &BTreeMap<i64, Complex64>,
    tol: f64,
) -> Result<VdcConclusion> {
    check_tol(tol)?;
    let LimitScheme::Subsequence { indices } = scheme else {
        return Err(Error::Capability("the van der Corput check runs on subsequence schemes".into()));
    };
    scheme.validate()?;
    let window = &indices[final_quarter_start(indices.len())..];
    let mut missing: Vec<i64> = window.iter().copied().filter(|n| c2.position(*n).is_none()).collect();
    missing.extend(indices.iter().copied().filter(|n| !y_pairings.contains_key(n)));
    if !missing.is_empty() {
        missing.sort_unstable();
        missing.dedup();
        return Err(Error::MissingLags(missing));
    }
    let pos: Vec<usize> = window.iter().map(|n| c2.position(*n).unwrap()).collect();
    let mut pairs = Vec::new();
    for (a, &r) in pos.iter().enumerate() {
        for &t in &pos[a + 1..] {
            pairs.push(c2.gram[r][t]);
        }
    }
    let double_limit = grid_report(format!("{}×{}", scheme.label(), scheme.label()), &pairs, tol);
    let ys: Vec<Complex64> = indices.iter().map(|n| y_pairings[n]).collect();
    let (value, deviation, converged) = last_quarter(&ys, tol);
    let single_limit = LimitReport {
        scheme: scheme.label(),
        value: Some(value),
        converged,
        deviation,
        samples_used: ys.len(),
        tolerance: tol,
    };
    let d = double_limit.value.unwrap().norm();
    let bound = (1.0 / window.len() as f64 + d + double_limit.deviation).sqrt() + tol;
    let verdict = if double_limit.converged && single_limit.converged {
        Some(d > tol || value.norm() <= bound)
    } else {
        None
    };
    Ok(VdcConclusion { double_limit, single_limit, bound, verdict })
}

/// Vectors with a prescribed positive semidefinite Gram matrix, as the rows of
/// its Cholesky factor (a small ridge keeps semidefinite inputs factorable).
pub fn vectors_with_gram(gram: &DMatrix<Complex64>) -> Result<Vec<Vec<Complex64>>> {
    let n = gram.nrows();
    if n == 0 || gram.ncols() != n {
        return input("gram matrix must be square and nonempty");
    }
    // ⟨x_r, x_t⟩ = Σ_i x_r[i] conj(x_t[i]) = (L L*)_{rt} for rows of L.
    let ridge = DMatrix::<Complex64>::identity(n, n) * Complex64::new(1e-12, 0.0);
    let chol = nalgebra::Cholesky::new(gram + ridge)
        .ok_or_else(|| Error::Numerical("gram matrix is not positive semidefinite".into()))?;
    let l = chol.l();
    Ok((0..n).map(|r| (0..n).map(|i| l[(r, i)]).collect()).collect())
}
