//! Mixing and rigidity diagnostics: weak / mild / strong verdicts, rigidity
//! profiles along candidate sequences, weak-limit fits `T^{n_k} → Σ a_j T^{b_j}`,
//! image/kernel splits of limit operators, and finite checks relating
//! rigidity, partial mixing and disjointness.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::joinings::{is_disjoint, rational, FiniteSystem, Rational};
use crate::limits::{evaluate_limit, ip_sums, limit_operator, LimitReport, LimitScheme};
use crate::operator::{final_quarter_start, kernel_projector, ComplexMatrix, OrthogonalDecomposition};
use crate::systems::{chacon_heights, correlation, Observable, ObservableKind, Quality, System};

/// Verdict tolerance for empirical correlations.
pub const EMPIRICAL_TOL: f64 = 0.05;

/// Verdict tolerance for exact correlations.
pub const EXACT_TOL: f64 = 1e-8;

/// `alpha_hat` at or below this is reported as no rigidity.
pub const NONE_FOUND_BELOW: f64 = 0.01;

/// `alpha_hat` at or above this is reported as rigid.
pub const RIGID_ABOVE: f64 = 0.99;

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Fail,
    Inconclusive,
    Pass,
}

impl Verdict {
    /// Fail if any fails, pass if all pass, inconclusive otherwise.
    fn combine(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut out = Verdict::Pass;
        for v in verdicts {
            out = out.min(v);
        }
        out
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct Evidence {
    pub observable: String,
    pub test: String,
    pub verdict: Verdict,
    pub report: LimitReport,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct MixingVerdict {
    pub weak: Verdict,
    pub mild_proxy: Verdict,
    pub strong_proxy: Verdict,
    pub tolerance: f64,
    pub exact: bool,
    pub evidence: Vec<Evidence>,
    pub diagnostics: Vec<String>,
}

/// Resources for [`classify`].
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct Budget {
    pub max_lag: i64,
    pub orbit_length: usize,
    pub ip_families: usize,
    pub ip_depth: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_lag: 10_000, orbit_length: 1_000_000, ip_families: 4, ip_depth: 8, seed: 0 }
    }
}

/// Smallest `max_lag` for which the windows and IP families are meaningful.
const MIN_BUDGET_LAG: i64 = 64;

/// Seeded IP generators whose finite sums all stay below `max_lag`:
/// generator `j` lies in `(max_lag/2^{d−j+2}, max_lag/2^{d−j+1}]`.
pub fn ip_family(max_lag: i64, depth: usize, seed: u64, family: usize) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (family as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    (1..=depth)
        .map(|j| {
            let hi = (max_lag >> (depth - j + 1)).max(1);
            let lo = (max_lag >> (depth - j + 2)) + 1;
            if lo >= hi {
                hi
            } else {
                rng.random_range(lo..=hi)
            }
        })
        .collect()
}

fn supports_exact(sys: &System, obs: &Observable) -> bool {
    use crate::systems::Family;
    matches!(
        (&sys.family, &obs.kind),
        (Family::Rotation { .. } | Family::SkewTorus { .. }, ObservableKind::Character { .. })
    )
}

/// Places the system in the mixing hierarchy using centered observables.
///
/// Weak: Følner–Cesàro average of `|c(n)|` over `1 ≤ n < N`. Mild: seeded IP
/// grids (pass when every finite sum is within tolerance, fail when none is).
/// Strong: `sup |c(n)|` over `n ≥ max_lag/2`. A failing observable refutes a
/// property; verdicts are then made monotone along strong ⇒ mild ⇒ weak.
pub fn classify(sys: &System, observables: &[Observable], budget: &Budget) -> Result<MixingVerdict> {
    if observables.is_empty() {
        return input("need at least one observable");
    }
    if let Some(o) = observables.iter().find(|o| !o.centered) {
        return Err(Error::Precondition(format!("observable `{}` is not centered", o.name)));
    }
    let exact = observables.iter().all(|o| supports_exact(sys, o));
    let tol = if exact { EXACT_TOL } else { EMPIRICAL_TOL };
    let mut out = MixingVerdict {
        weak: Verdict::Inconclusive,
        mild_proxy: Verdict::Inconclusive,
        strong_proxy: Verdict::Inconclusive,
        tolerance: tol,
        exact,
        evidence: Vec::new(),
        diagnostics: Vec::new(),
    };
    let depth = budget.ip_depth.min(crate::limits::MAX_IP_GENERATORS);
    if budget.max_lag < MIN_BUDGET_LAG || depth == 0 || budget.ip_families == 0 {
        out.diagnostics.push(format!(
            "budget exhausted: max_lag {} (need ≥ {MIN_BUDGET_LAG}), ip depth {depth}, {} IP families",
            budget.max_lag, budget.ip_families
        ));
        return Ok(out);
    }
    let quality = if exact { Quality::Exact } else { Quality::empirical(budget.orbit_length) };
    let lags: Vec<i64> = (1..=budget.max_lag).collect();
    let windows = vec![(budget.max_lag / 4) as usize, (budget.max_lag / 2) as usize, budget.max_lag as usize];
    let families: Vec<Vec<i64>> =
        (0..budget.ip_families).map(|k| ip_family(budget.max_lag, depth, budget.seed, k)).collect();

    let (mut weak, mut mild, mut strong) = (Vec::new(), Vec::new(), Vec::new());
    for f in observables {
        let c = correlation(sys, f, f, &lags, quality)?;

        let report = evaluate_limit(&c, &LimitScheme::FolnerCesaro { windows: windows.clone() }, tol)?;
        let n = *windows.last().unwrap() as f64;
        let off_zero = report.value.unwrap().re - c.mass.norm() / n;
        let v = if off_zero <= tol { Verdict::Pass } else { Verdict::Fail };
        weak.push(v);
        out.evidence.push(Evidence { observable: f.name.clone(), test: "weak".into(), verdict: v, report });

        let mut family_verdicts = Vec::new();
        for generators in &families {
            let scheme = LimitScheme::IpGrid { generators: generators.clone(), depth };
            let report = evaluate_limit(&c, &scheme, tol)?;
            let sums = ip_sums(generators)?;
            let smallest = sums.iter().map(|s| c.values[s].norm()).fold(f64::INFINITY, f64::min);
            let v = if report.value.unwrap().norm() + report.deviation <= tol {
                Verdict::Pass
            } else if smallest > tol {
                Verdict::Fail
            } else {
                Verdict::Inconclusive
            };
            family_verdicts.push(v);
            out.evidence.push(Evidence { observable: f.name.clone(), test: "mild".into(), verdict: v, report });
        }
        mild.push(Verdict::combine(family_verdicts));

        let report = evaluate_limit(&c, &LimitScheme::TailSup { start: budget.max_lag / 2 }, tol)?;
        let v = if report.value.unwrap().re <= tol { Verdict::Pass } else { Verdict::Fail };
        strong.push(v);
        out.evidence.push(Evidence { observable: f.name.clone(), test: "strong".into(), verdict: v, report });
    }
    out.weak = Verdict::combine(weak);
    let mild = Verdict::combine(mild);
    let strong = Verdict::combine(strong);
    out.mild_proxy = mild.min(out.weak);
    out.strong_proxy = strong.min(out.mild_proxy);
    if out.mild_proxy != mild {
        out.diagnostics.push(format!("mild verdict {mild:?} lowered to {:?} by the weak verdict", out.mild_proxy));
    }
    if out.strong_proxy != strong {
        out.diagnostics
            .push(format!("strong verdict {strong:?} lowered to {:?} by the mild verdict", out.strong_proxy));
    }
    Ok(out)
}

/// Named index sequence offered to [`rigidity_search`].
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CandidateSequence {
    pub name: String,
    pub indices: Vec<i64>,
}

impl CandidateSequence {
    pub fn new(name: impl Into<String>, indices: Vec<i64>) -> Self {
        CandidateSequence { name: name.into(), indices }
    }
}

/// Strictly increasing continued-fraction denominators `q_k` of `alpha`.
pub fn continued_fraction_denominators(alpha: f64, count: usize) -> Vec<i64> {
    let mut out = Vec::new();
    let (mut q_prev, mut q) = (0i64, 1i64);
    let mut x = alpha.rem_euclid(1.0);
    while out.len() < count && x > 1e-15 {
        x = 1.0 / x;
        let a = x.floor();
        x -= a;
        let Some(next) = (a as i64).checked_mul(q).and_then(|v| v.checked_add(q_prev)) else {
            break;
        };
        (q_prev, q) = (q, next);
        if out.last().is_none_or(|&last| q > last) {
            out.push(q);
        }
    }
    out
}

/// `mult · base^k` for `k = 1..=count`, stopping before overflow.
pub fn scaled_powers(mult: i64, base: i64, count: usize) -> Vec<i64> {
    let mut out = Vec::new();
    let mut p = mult;
    for _ in 0..count {
        let Some(next) = p.checked_mul(base) else { break };
        p = next;
        out.push(p);
    }
    out
}

/// Default candidate families: convergent denominators for rotations, tower
/// heights for Chacon, powers of 2 and 4 (and small multiples) otherwise.
pub fn default_candidates(sys: &System, max_lag: i64) -> Vec<CandidateSequence> {
    use crate::systems::Family;
    let clip = |v: Vec<i64>| v.into_iter().filter(|&n| n <= max_lag).collect::<Vec<_>>();
    let mut out = Vec::new();
    match &sys.family {
        Family::Rotation { alpha, .. } => {
            out.push(CandidateSequence::new("convergent denominators", clip(continued_fraction_denominators(*alpha, 40))))
        }
        Family::Chacon => out.push(CandidateSequence::new(
            "tower heights",
            clip(chacon_heights(crate::systems::chacon::MAX_HEIGHTS).unwrap_or_default().into_iter().map(|h| h as i64).collect()),
        )),
        _ => {}
    }
    for (mult, base) in [(1, 2), (3, 2), (1, 4)] {
        let name = if mult == 1 { format!("powers of {base}") } else { format!("{mult}·{base}^k") };
        out.push(CandidateSequence::new(name, clip(scaled_powers(mult, base, 62))));
    }
    out.retain(|c| c.indices.len() >= 2);
    out
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RigidityKind {
    Rigid,
    AlphaRigid,
    AlphaWeaklyMixing { alpha: f64 },
    NoneFound,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct RigidityProfile {
    /// `liminf μ(A ∩ T^{n_k} A) / μ(A)` along the best candidate, in `[0, 1]`.
    pub alpha_hat: f64,
    /// Standard error of `alpha_hat` (0 for exact inputs).
    pub stderr: f64,
    pub sequence: Vec<i64>,
    pub sequence_name: String,
    pub kind: RigidityKind,
    pub mass: f64,
    /// `(candidate, liminf ratio)` for every candidate examined.
    pub candidates: Vec<(String, f64)>,
}

/// Searches candidate sequences for returns `μ(A ∩ T^{n_k} A) ≥ α μ(A)`.
///
/// `f` is the indicator of `A` (centering is ignored). Each candidate is cut
/// to its first `depth` terms; the liminf is the minimum ratio over the final
/// quarter.
pub fn rigidity_search(
    sys: &System,
    f: &Observable,
    candidates: &[CandidateSequence],
    depth: usize,
    quality: Quality,
) -> Result<RigidityProfile> {
    if !f.is_indicator() {
        return Err(Error::Precondition(format!("`{}` is not an indicator", f.name)));
    }
    let mut f = f.clone();
    f.centered = false;
    let mass = sys.mean(&f, quality)?.re;
    if mass <= 0.0 {
        return Err(Error::Precondition(format!("`{}` has zero measure along the sampled orbit", f.name)));
    }
    let mut best: Option<(f64, f64, &CandidateSequence, Vec<i64>)> = None;
    let mut table = Vec::new();
    for cand in candidates {
        let seq: Vec<i64> = cand.indices.iter().copied().take(depth).collect();
        if seq.len() < 2 || seq[0] <= 0 || seq.windows(2).any(|w| w[0] >= w[1]) {
            return input(format!("candidate `{}` must be a positive increasing sequence", cand.name));
        }
        let c = correlation(sys, &f, &f, &seq, quality)?;
        let start = final_quarter_start(seq.len());
        let (ratio, err) = seq[start..]
            .iter()
            .map(|n| (c.values[n].re / mass, c.stderr_at(*n) / mass))
            .fold((f64::INFINITY, 0.0), |acc, x| if x.0 < acc.0 { x } else { acc });
        table.push((cand.name.clone(), ratio));
        if best.as_ref().is_none_or(|b| ratio > b.0) {
            best = Some((ratio, err, cand, seq));
        }
    }
    let Some((ratio, stderr, cand, seq)) = best else {
        return input("no candidate sequences");
    };
    let alpha_hat = ratio.clamp(0.0, 1.0);
    let kind = if alpha_hat <= NONE_FOUND_BELOW {
        RigidityKind::NoneFound
    } else if alpha_hat >= RIGID_ABOVE {
        RigidityKind::Rigid
    } else {
        RigidityKind::AlphaRigid
    };
    Ok(RigidityProfile {
        alpha_hat,
        stderr,
        sequence: seq,
        sequence_name: cand.name.clone(),
        kind,
        mass,
        candidates: table,
    })
}

/// Upgrades an `alpha_rigid` profile to `alpha_weakly_mixing` when the pairs
/// satisfy the α-weak-mixing identity along the profile's sequence, with α
/// read off the single-set ratio `r = α μ(A) + (1 − α)`.
pub fn refine_profile(
    profile: &RigidityProfile,
    sys: &System,
    pairs: &[(Observable, Observable)],
    quality: Quality,
    tol: f64,
) -> Result<RigidityProfile> {
    let mut out = profile.clone();
    if profile.kind != RigidityKind::AlphaRigid || profile.mass >= 1.0 {
        return Ok(out);
    }
    let alpha = ((1.0 - profile.alpha_hat) / (1.0 - profile.mass)).clamp(0.0, 1.0);
    let check = alpha_weak_mixing_check(sys, pairs, &profile.sequence, alpha, quality, tol)?;
    if check.verdict == Some(true) {
        out.kind = RigidityKind::AlphaWeaklyMixing { alpha };
    }
    Ok(out)
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct PairCheck {
    pub a: String,
    pub b: String,
    pub limit: f64,
    pub target: f64,
    pub converged: bool,
    pub holds: Option<bool>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct AlphaMixingCheck {
    /// `None` when some pair did not converge and none failed.
    pub verdict: Option<bool>,
    pub pairs: Vec<PairCheck>,
}

/// Checks `lim μ(A ∩ T^{n_k} B) = α μ(A) μ(B) + (1 − α) μ(A ∩ B)` for every
/// pair along `sequence` (final-quarter limit, `μ(A ∩ Tⁿ B) = ⟨Tⁿ1_A, 1_B⟩`).
pub fn alpha_weak_mixing_check(
    sys: &System,
    pairs: &[(Observable, Observable)],
    sequence: &[i64],
    alpha: f64,
    quality: Quality,
    tol: f64,
) -> Result<AlphaMixingCheck> {
    if !(0.0..=1.0).contains(&alpha) {
        return input(format!("alpha {alpha} outside [0, 1]"));
    }
    let scheme = LimitScheme::subsequence(sequence.to_vec());
    let mut out = Vec::new();
    for (a, b) in pairs {
        if !a.is_indicator() || !b.is_indicator() {
            return Err(Error::Precondition(format!("`{}` and `{}` must be indicators", a.name, b.name)));
        }
        let (mut a, mut b) = (a.clone(), b.clone());
        a.centered = false;
        b.centered = false;
        let c = correlation(sys, &a, &b, sequence, quality)?;
        let ma = sys.mean(&a, quality)?.re;
        let mb = sys.mean(&b, quality)?.re;
        let report = evaluate_limit(&c, &scheme, tol)?;
        let limit = report.value.unwrap().re;
        let target = alpha * ma * mb + (1.0 - alpha) * c.mass.re;
        let holds = report.converged.then(|| (limit - target).abs() <= tol);
        out.push(PairCheck { a: a.name, b: b.name, limit, target, converged: report.converged, holds });
    }
    let verdict = if out.iter().any(|p| p.holds == Some(false)) {
        Some(false)
    } else if out.iter().all(|p| p.holds == Some(true)) {
        Some(true)
    } else {
        None
    };
    Ok(AlphaMixingCheck { verdict, pairs: out })
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct WeakLimitFit {
    pub weights: Vec<f64>,
    pub powers: Vec<i64>,
    /// Largest absolute misfit over the `(f, g)` pairs.
    pub residual: f64,
    /// Misfit of the mixing model `lim = μ(f) conj μ(g)`.
    pub theta_residual: f64,
    /// Rank of the design matrix (columns are powers `−B..=B`).
    pub design_rank: usize,
    pub pairs: usize,
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &mut [f64]) {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (i, x) in u.iter().enumerate() {
        acc += x;
        let t = (acc - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter_mut().for_each(|x| *x = (*x - theta).max(0.0));
}

/// `min ‖X a − y‖²` over the simplex by accelerated projected gradient.
fn simplex_least_squares(x: &DMatrix<f64>, y: &[f64]) -> Vec<f64> {
    let k = x.ncols();
    let yv = nalgebra::DVector::from_column_slice(y);
    let gram = x.transpose() * x;
    let xty = x.transpose() * &yv;
    let lipschitz = gram.norm().max(1e-12);
    let mut a = vec![1.0 / k as f64; k];
    let mut z = a.clone();
    let mut t = 1.0f64;
    for _ in 0..20_000 {
        let zv = nalgebra::DVector::from_column_slice(&z);
        let grad = &gram * &zv - &xty;
        let mut next: Vec<f64> = z.iter().zip(grad.iter()).map(|(zi, gi)| zi - gi / lipschitz).collect();
        project_simplex(&mut next);
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        z = next.iter().zip(&a).map(|(n, o)| n + (t - 1.0) / t_next * (n - o)).collect();
        a = next;
        t = t_next;
    }
    a
}

fn misfit(x: &DMatrix<f64>, a: &[f64], y: &[f64]) -> f64 {
    let av = nalgebra::DVector::from_column_slice(a);
    let pred = x * av;
    pred.iter().zip(y).map(|(p, t)| (p - t).abs()).fold(0.0, f64::max)
}

/// Fits `lim_k ⟨T^{n_k} f, g⟩ ≈ Σ_j a_j ⟨T^{b_j} f, g⟩` with `a` on the
/// simplex and `|b_j| ≤ max_power`, over all pairs from `basis`.
///
/// Targets are final-quarter means along `sequence`. Weights below `1e-3` are
/// dropped; if more than three powers remain, the fit is redone on the three
/// heaviest. Real and imaginary parts are fitted jointly.
pub fn chacon_weak_limit_fit(
    sys: &System,
    max_power: i64,
    sequence: &[i64],
    basis: &[Observable],
    quality: Quality,
) -> Result<WeakLimitFit> {
    if !(0..=8).contains(&max_power) {
        return input(format!("max power {max_power} outside 0..=8"));
    }
    if sequence.is_empty() || basis.is_empty() {
        return input("need a nonempty sequence and basis");
    }
    let powers: Vec<i64> = (-max_power..=max_power).collect();
    let window = &sequence[final_quarter_start(sequence.len()).min(sequence.len() - 1)..];
    let mut lags: Vec<i64> = powers.clone();
    lags.extend_from_slice(window);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut targets = Vec::new();
    let mut theta = Vec::new();
    for f in basis {
        for g in basis {
            let c = correlation(sys, f, g, &lags, quality)?;
            let target = window.iter().map(|n| c.values[n]).sum::<Complex64>() / window.len() as f64;
            let product = if f.centered || g.centered {
                Complex64::new(0.0, 0.0)
            } else {
                sys.mean(f, quality)? * sys.mean(g, quality)?.conj()
            };
            rows.push(powers.iter().map(|b| c.values[b].re).collect());
            rows.push(powers.iter().map(|b| c.values[b].im).collect());
            targets.extend([target.re, target.im]);
            theta.extend([(target - product).re.abs(), (target - product).im.abs()]);
        }
    }
    let x = DMatrix::from_fn(rows.len(), powers.len(), |i, j| rows[i][j]);
    let design_rank = x.clone().svd(false, false).rank(1e-9);
    let mut a = simplex_least_squares(&x, &targets);
    let mut support: Vec<usize> = (0..powers.len()).filter(|&j| a[j] >= 1e-3).collect();
    if support.len() > 3 {
        support.sort_by(|&i, &j| a[j].total_cmp(&a[i]));
        support.truncate(3);
    }
    support.sort_unstable();
    let sub = x.select_columns(&support);
    let sub_weights = simplex_least_squares(&sub, &targets);
    a = vec![0.0; powers.len()];
    for (k, &j) in support.iter().enumerate() {
        a[j] = sub_weights[k];
    }
    let residual = misfit(&x, &a, &targets);
    let keep: Vec<usize> = (0..powers.len()).filter(|&j| a[j] > 0.0).collect();
    Ok(WeakLimitFit {
        weights: keep.iter().map(|&j| a[j]).collect(),
        powers: keep.iter().map(|&j| powers[j]).collect(),
        residual,
        theta_residual: theta.iter().copied().fold(0.0, f64::max),
        design_rank,
        pairs: basis.len() * basis.len(),
    })
}

/// Projector split for a family of normal operators: `p_kernel` projects onto
/// `∩ Ker L_i`, computed as the kernel of the stacked matrix.
pub fn u_split_operators(ops: &[ComplexMatrix], tol: f64) -> Result<OrthogonalDecomposition> {
    let Some(first) = ops.first() else {
        return input("need at least one operator");
    };
    let d = first.dim();
    if ops.iter().any(|o| o.dim() != d) {
        return input("operators must share a dimension");
    }
    let stacked = DMatrix::from_fn(d * ops.len(), d, |r, c| ops[r / d].get(r % d, c));
    let p = kernel_projector(&stacked, tol);
    Ok(OrthogonalDecomposition::from_kernel_projector(ComplexMatrix::from_dmatrix(p)?, tol))
}

/// `Cᵈ = (⊕ closure Im U^p) ⊕ (∩ Ker U^p)` over the limit operators of `u`
/// along each scheme.
pub fn u_split(u: &ComplexMatrix, schemes: &[LimitScheme], tol: f64) -> Result<OrthogonalDecomposition> {
    let mut limits = Vec::with_capacity(schemes.len());
    for s in schemes {
        let report = limit_operator(u, s, tol)?;
        if !report.converged {
            return Err(Error::NotConverged { scheme: s.label(), residual: report.residual });
        }
        limits.push(report.limit);
    }
    u_split_operators(&limits, tol.max(1e-12))
}

/// Finite model of a limit operator that is the conditional expectation onto
/// a partition into fibres (uniform measure on `fibre.len()` points).
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct FiberModel {
    /// Fibre label of each point.
    pub fibre: Vec<usize>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct FiniteExtensionReport {
    pub alpha: f64,
    pub fibres_found: usize,
    pub largest_fibre: usize,
    pub bound: usize,
    pub image_rank: usize,
    pub holds: bool,
}

impl FiberModel {
    pub fn random<R: Rng>(points: usize, fibres: usize, rng: &mut R) -> Self {
        let mut fibre: Vec<usize> = (0..points).map(|i| i % fibres).collect();
        for i in (1..points).rev() {
            fibre.swap(i, rng.random_range(0..=i));
        }
        FiberModel { fibre }
    }

    /// `E[f | fibres]` as a matrix.
    pub fn operator(&self) -> DMatrix<f64> {
        let n = self.fibre.len();
        let mut sizes = std::collections::HashMap::new();
        for &l in &self.fibre {
            *sizes.entry(l).or_insert(0usize) += 1;
        }
        DMatrix::from_fn(n, n, |i, j| {
            if self.fibre[i] == self.fibre[j] {
                1.0 / sizes[&self.fibre[i]] as f64
            } else {
                0.0
            }
        })
    }
}

/// For `T^p = E[· | fibres]`, reads off `α = min_x ⟨T^p 1_x, 1_x⟩/μ(x)`, recovers the
/// fibres as classes of equal rows, and checks that every fibre has at most
/// `floor(1/α)` points and that the image of `T^p` has one dimension per fibre.
pub fn finite_extension_check(model: &FiberModel) -> Result<FiniteExtensionReport> {
    let e = model.operator();
    let n = e.nrows();
    if n == 0 {
        return input("empty model");
    }
    let alpha = (0..n).map(|i| e[(i, i)]).fold(f64::INFINITY, f64::min);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        match classes.iter_mut().find(|c| (0..n).all(|j| (e[(c[0], j)] - e[(i, j)]).abs() < 1e-12)) {
            Some(c) => c.push(i),
            None => classes.push(vec![i]),
        }
    }
    let largest = classes.iter().map(Vec::len).max().unwrap();
    let bound = (1.0 / alpha + 1e-9).floor() as usize;
    let complex = ComplexMatrix::from_dmatrix(e.map(|v| Complex64::new(v, 0.0)))?;
    let split = u_split_operators(&[complex], 1e-9)?;
    let image_rank = split.image_rank();
    Ok(FiniteExtensionReport {
        alpha,
        fibres_found: classes.len(),
        largest_fibre: largest,
        bound,
        image_rank,
        holds: largest <= bound && image_rank == classes.len(),
    })
}

/// `min_{A ≠ ∅} μ(A ∩ T^r A) / μ(A)` over all subsets.
pub fn finite_rigidity(x: &FiniteSystem, r: usize) -> Rational {
    let tr = x.power(r);
    let n = x.size();
    let mut best: Option<Rational> = None;
    for mask in 1u64..(1 << n) {
        let inside = |i: usize| mask >> i & 1 == 1;
        let ma: Rational = (0..n).filter(|&i| inside(i)).map(|i| &x.measure[i]).sum();
        // T^r A ∩ A = {T^r i : i ∈ A, T^r i ∈ A}, measure-preserving.
        let overlap: Rational = (0..n).filter(|&i| inside(i) && inside(tr[i])).map(|i| &x.measure[i]).sum();
        let ratio = overlap / ma;
        if best.as_ref().is_none_or(|b| ratio < *b) {
            best = Some(ratio);
        }
    }
    best.unwrap()
}

/// `min_{B, C ≠ ∅} μ(B ∩ S^r C) / (μ(B) μ(C))` over all pairs of subsets.
pub fn finite_partial_mixing(y: &FiniteSystem, r: usize) -> Rational {
    let sr = y.power(r);
    let n = y.size();
    let mut best: Option<Rational> = None;
    for b in 1u64..(1 << n) {
        let mb: Rational = (0..n).filter(|&i| b >> i & 1 == 1).map(|i| &y.measure[i]).sum();
        for c in 1u64..(1 << n) {
            let mc: Rational = (0..n).filter(|&i| c >> i & 1 == 1).map(|i| &y.measure[i]).sum();
            // S^r C = {S^r j : j ∈ C}.
            let overlap: Rational =
                (0..n).filter(|&j| c >> j & 1 == 1 && b >> sr[j] & 1 == 1).map(|j| &y.measure[j]).sum();
            let ratio = overlap / (&mb * &mc);
            if best.as_ref().is_none_or(|v| ratio < *v) {
                best = Some(ratio);
            }
        }
    }
    best.unwrap()
}

/// Cycle-type representatives of permutations of `n` points with uniform measure.
pub fn systems_of_size(n: usize) -> Vec<FiniteSystem> {
    fn partitions(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            prefix.push(k);
            partitions(n - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut parts = Vec::new();
    partitions(n, n, &mut Vec::new(), &mut parts);
    parts
        .into_iter()
        .map(|p| {
            let weights: Vec<Rational> = p.iter().map(|&l| rational(l as i64, n as i64)).collect();
            FiniteSystem::from_cycles(&p, &weights).expect("valid cycle system")
        })
        .collect()
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct RigidMixingSurvey {
    pub pairs_examined: usize,
    /// `(x, y, r)` triples with `α + β > 1` along `r`.
    pub qualifying: usize,
    pub violations: Vec<String>,
}

/// Exhaustive finite check: for all cycle types of size `≤ max_size` and
/// every common power `r`, whenever `x` is α-rigid and `y` is β-partially
/// mixing along `r` with `α + β > 1`, the pair is disjoint.
pub fn rigid_mixing_disjointness_survey(max_size: usize) -> Result<RigidMixingSurvey> {
    if max_size > 6 {
        return input("exhaustive survey is limited to size 6");
    }
    let systems: Vec<FiniteSystem> = (1..=max_size).flat_map(systems_of_size).collect();
    let mut survey = RigidMixingSurvey { pairs_examined: 0, qualifying: 0, violations: Vec::new() };
    for x in &systems {
        for y in &systems {
            survey.pairs_examined += 1;
            let period = num_integer::lcm(x.order(), y.order());
            for r in 0..period {
                let alpha = finite_rigidity(x, r);
                let beta = finite_partial_mixing(y, r);
                if alpha + beta > Rational::one() {
                    survey.qualifying += 1;
                    if !is_disjoint(x, y)? {
                        survey.violations.push(format!("{:?} vs {:?} along r = {r}", x.map, y.map));
                    }
                }
            }
        }
    }
    Ok(survey)
}

/// `β` with `β μ(B) μ(C) ≤ μ(B ∩ S^r C)` is zero unless `S^r` is a single point map.
pub fn partially_mixing_is_trivial(y: &FiniteSystem, r: usize) -> bool {
    let beta = finite_partial_mixing(y, r);
    beta.is_zero() || y.size() == 1
}
