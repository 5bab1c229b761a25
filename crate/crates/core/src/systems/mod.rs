//! Concrete measure-preserving systems over `Z`, their observables and
//! correlation sequences `c(n) = ⟨Tⁿf, g⟩ = ∫ f∘Tⁿ · conj(g) dμ`.

pub mod cantor;
pub mod chacon;
pub mod empirical;
pub mod iet;
pub mod rudin_shapiro;

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::operator::unit_phase;

pub use cantor::{cantor_fourier, DEFAULT_TRUNCATION};
pub use chacon::chacon_heights;
pub use iet::iet_apply;
pub use rudin_shapiro::rudin_shapiro_sequence;

/// Steps discarded before an empirical orbit starts recording.
pub const BURN_IN: usize = 1000;

/// Shortest orbit accepted by empirical correlation.
pub const MIN_ORBIT_LENGTH: usize = 10_000;

/// Starting point for rotation and IET orbits when no seed is given.
pub const DEFAULT_START: f64 = SQRT_2 - 1.0;

/// Largest denominator tried when deciding whether a rotation number is rational.
const RATIONALITY_DENOMINATOR: u64 = 1_000_000;

/// The measure on the base circle of a skew product.
#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseMeasure {
    Lebesgue,
    /// Uniform measure on `{Σ d_k 4^{-k} : d_k ∈ {0,1}}`, product truncated at `truncation` factors.
    Cantor4 { truncation: u32 },
}

impl BaseMeasure {
    pub fn cantor4() -> Self {
        BaseMeasure::Cantor4 { truncation: DEFAULT_TRUNCATION }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            BaseMeasure::Cantor4 { truncation } if truncation < cantor::MIN_TRUNCATION => {
                input(format!("cantor truncation {truncation} below {}", cantor::MIN_TRUNCATION))
            }
            _ => Ok(()),
        }
    }

    /// `σ̂(m) = ∫ e^{-2πimx} dσ(x)`.
    pub fn fourier(&self, m: i64) -> Complex64 {
        match *self {
            BaseMeasure::Lebesgue => Complex64::new(if m == 0 { 1.0 } else { 0.0 }, 0.0),
            BaseMeasure::Cantor4 { truncation } => cantor_fourier(m, truncation),
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            BaseMeasure::Lebesgue => rng.random::<f64>(),
            BaseMeasure::Cantor4 { truncation } => {
                // Digits beyond 2^-52 precision do not change the float.
                let digits = truncation.min(27);
                let mut x = 0.0;
                let mut scale = 0.25;
                for _ in 0..digits {
                    if rng.random::<bool>() {
                        x += scale;
                    }
                    scale *= 0.25;
                }
                x
            }
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `x ↦ x + alpha mod 1`.
    Rotation {
        alpha: f64,
        #[serde(default)]
        irrational: bool,
    },
    /// `(x, y) ↦ (x, y + x)` on the 2-torus, `x` distributed by `base`, `y` uniform.
    SkewTorus { base: BaseMeasure },
    /// Shift on the subshift generated by `0 ↦ 0010, 1 ↦ 1`.
    Chacon,
    /// Shift on the ±1 Rudin–Shapiro sequence, symbols `+` and `-`.
    RudinShapiro,
    /// Interval exchange: interval `i` lands at position `permutation[i]`.
    Iet { lengths: Vec<f64>, permutation: Vec<usize> },
    /// Full shift with i.i.d. symbols `0, 1, ...` drawn from `probabilities`.
    Bernoulli { probabilities: Vec<f64>, seed: u64 },
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct System {
    pub name: String,
    #[serde(flatten)]
    pub family: Family,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ObservableKind {
    /// `e^{2πi k·x}`; one frequency on the circle, `(d, c)` on the torus.
    Character { frequencies: Vec<i64> },
    /// Indicator of `x[offset .. offset + |word|] = word`.
    Cylinder { word: String, offset: i64 },
    /// Indicator of the union of same-length cylinders at a common offset.
    CylinderUnion { words: Vec<String>, offset: i64 },
    /// Indicator of `[a, b)`.
    IntervalIndicator { a: f64, b: f64 },
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct Observable {
    pub name: String,
    pub kind: ObservableKind,
    /// Subtract `∫f dμ` before correlating.
    #[serde(default)]
    pub centered: bool,
}

impl Observable {
    pub fn character(frequencies: &[i64]) -> Self {
        let name = format!("e{frequencies:?}");
        Observable { name, kind: ObservableKind::Character { frequencies: frequencies.to_vec() }, centered: false }
    }

    pub fn cylinder(word: &str, offset: i64) -> Self {
        Observable {
            name: format!("[{word}]@{offset}"),
            kind: ObservableKind::Cylinder { word: word.to_string(), offset },
            centered: false,
        }
    }

    pub fn cylinder_union(words: &[&str], offset: i64) -> Self {
        Observable {
            name: format!("[{}]@{offset}", words.join("|")),
            kind: ObservableKind::CylinderUnion { words: words.iter().map(|w| w.to_string()).collect(), offset },
            centered: false,
        }
    }

    pub fn interval(a: f64, b: f64) -> Self {
        Observable { name: format!("[{a},{b})"), kind: ObservableKind::IntervalIndicator { a, b }, centered: false }
    }

    pub fn centered(mut self) -> Self {
        self.centered = true;
        self
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn is_indicator(&self) -> bool {
        !matches!(self.kind, ObservableKind::Character { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            ObservableKind::Character { frequencies } if frequencies.is_empty() => {
                input(format!("observable `{}` has no frequencies", self.name))
            }
            ObservableKind::Cylinder { word, .. } if word.is_empty() => {
                input(format!("observable `{}` has an empty word", self.name))
            }
            ObservableKind::CylinderUnion { words, .. } => {
                let Some(first) = words.first() else {
                    return input(format!("observable `{}` has no words", self.name));
                };
                if first.is_empty() || words.iter().any(|w| w.len() != first.len()) {
                    return input(format!("observable `{}` needs nonempty words of one length", self.name));
                }
                Ok(())
            }
            &ObservableKind::IntervalIndicator { a, b } if !(0.0 <= a && a < b && b <= 1.0) => {
                input(format!("interval [{a}, {b}) must satisfy 0 ≤ a < b ≤ 1"))
            }
            _ => Ok(()),
        }
    }
}

/// How correlations are evaluated.
#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Quality {
    Exact,
    /// Birkhoff averages along an orbit of `orbit_length` steps. A seed picks a
    /// random start instead of the fixed one.
    Empirical {
        orbit_length: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
}

impl Quality {
    pub fn empirical(orbit_length: usize) -> Self {
        Quality::Empirical { orbit_length, seed: None }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Quality::Exact)
    }
}

/// Values `⟨Tⁿf, g⟩` at a set of lags. Lag 0 is always present.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CorrelationSequence {
    pub values: BTreeMap<i64, Complex64>,
    /// Batch-means standard errors (empty for exact sequences).
    #[serde(default)]
    pub stderr: BTreeMap<i64, f64>,
    pub mass: Complex64,
    pub centered: bool,
    /// `f = g`, so the sequence is positive definite.
    pub autocorrelation: bool,
}

impl CorrelationSequence {
    /// Builds a sequence from explicit values; `mass` is read from lag 0.
    pub fn from_values(values: BTreeMap<i64, Complex64>, autocorrelation: bool) -> Result<Self> {
        let Some(&mass) = values.get(&0) else {
            return Err(Error::MissingLags(vec![0]));
        };
        if values.values().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return input("correlation values must be finite");
        }
        Ok(CorrelationSequence { values, stderr: BTreeMap::new(), mass, centered: false, autocorrelation })
    }

    /// Tabulates `c` on `lags ∪ {0}`.
    pub fn from_fn(lags: impl IntoIterator<Item = i64>, autocorrelation: bool, c: impl Fn(i64) -> Complex64) -> Self {
        let mut values: BTreeMap<i64, Complex64> = lags.into_iter().map(|n| (n, c(n))).collect();
        let mass = *values.entry(0).or_insert_with(|| c(0));
        CorrelationSequence { values, stderr: BTreeMap::new(), mass, centered: false, autocorrelation }
    }

    pub fn get(&self, lag: i64) -> Option<Complex64> {
        self.values.get(&lag).copied()
    }

    pub fn stderr_at(&self, lag: i64) -> f64 {
        self.stderr.get(&lag).copied().unwrap_or(0.0)
    }

    pub fn lags(&self) -> impl Iterator<Item = i64> + '_ {
        self.values.keys().copied()
    }

    pub fn max_lag(&self) -> i64 {
        self.values.keys().next_back().copied().unwrap_or(0)
    }

    /// Lags among `wanted` with no stored value, sorted and deduplicated.
    pub fn missing(&self, wanted: impl IntoIterator<Item = i64>) -> Vec<i64> {
        let mut out: Vec<i64> = wanted.into_iter().filter(|n| !self.values.contains_key(n)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn require(&self, wanted: impl IntoIterator<Item = i64>) -> Result<()> {
        let missing = self.missing(wanted);
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::MissingLags(missing))
        }
    }

    /// Values at `lags`, failing with the full list of absent lags.
    pub fn at(&self, lags: &[i64]) -> Result<Vec<Complex64>> {
        self.require(lags.iter().copied())?;
        Ok(lags.iter().map(|n| self.values[n]).collect())
    }

    /// CSV with columns `lag, re, im, stderr`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Input(format!("csv: {e}"));
        w.write_record(["lag", "re", "im", "stderr"]).map_err(io)?;
        for (lag, v) in &self.values {
            w.write_record([
                lag.to_string(),
                v.re.to_string(),
                v.im.to_string(),
                self.stderr_at(*lag).to_string(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Input(format!("csv: {e}")))
    }
}

/// Decides rationality of `alpha` up to [`RATIONALITY_DENOMINATOR`] via continued fractions.
fn looks_irrational(alpha: f64) -> bool {
    let (mut h0, mut h1) = (0.0f64, 1.0f64);
    let (mut k0, mut k1) = (1.0f64, 0.0f64);
    let mut x = alpha;
    for _ in 0..64 {
        let a = x.floor();
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > RATIONALITY_DENOMINATOR as f64 {
            return true;
        }
        if (alpha - h2 / k2).abs() < 1e-12 {
            return false;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = x - a;
        if frac < 1e-15 {
            return false;
        }
        x = 1.0 / frac;
    }
    true
}

impl System {
    pub fn new(name: impl Into<String>, family: Family) -> Result<Self> {
        let mut sys = System { name: name.into(), family };
        sys.validate()?;
        if let Family::Rotation { alpha, irrational } = &mut sys.family {
            *irrational = looks_irrational(*alpha);
        }
        Ok(sys)
    }

    pub fn rotation(alpha: f64) -> Result<Self> {
        System::new(format!("rotation({alpha})"), Family::Rotation { alpha, irrational: false })
    }

    pub fn skew_torus(base: BaseMeasure) -> Result<Self> {
        let name = match base {
            BaseMeasure::Lebesgue => "skew_torus(lebesgue)".to_string(),
            BaseMeasure::Cantor4 { truncation } => format!("skew_torus(cantor4, K={truncation})"),
        };
        System::new(name, Family::SkewTorus { base })
    }

    pub fn chacon() -> Self {
        System { name: "chacon".into(), family: Family::Chacon }
    }

    pub fn rudin_shapiro() -> Self {
        System { name: "rudin_shapiro".into(), family: Family::RudinShapiro }
    }

    pub fn iet(lengths: &[f64], permutation: &[usize]) -> Result<Self> {
        System::new(
            format!("iet{permutation:?}"),
            Family::Iet { lengths: lengths.to_vec(), permutation: permutation.to_vec() },
        )
    }

    pub fn bernoulli(probabilities: &[f64], seed: u64) -> Result<Self> {
        System::new(
            format!("bernoulli({} symbols)", probabilities.len()),
            Family::Bernoulli { probabilities: probabilities.to_vec(), seed },
        )
    }

    /// Checks the family's parameter invariants.
    pub fn validate(&self) -> Result<()> {
        match &self.family {
            Family::Rotation { alpha, .. } => {
                if !(0.0..1.0).contains(alpha) {
                    return input(format!("rotation number {alpha} must lie in [0, 1)"));
                }
                Ok(())
            }
            Family::SkewTorus { base } => base.validate(),
            Family::Chacon | Family::RudinShapiro => Ok(()),
            Family::Iet { lengths, permutation } => iet::validate(lengths, permutation),
            Family::Bernoulli { probabilities, .. } => {
                if probabilities.is_empty() || probabilities.len() > 10 {
                    return input("bernoulli needs between 1 and 10 symbols");
                }
                if probabilities.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
                    return input("bernoulli probabilities must be positive");
                }
                let total: f64 = probabilities.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return input(format!("bernoulli probabilities sum to {total}, not 1"));
                }
                Ok(())
            }
        }
    }

    /// Symbol alphabet of symbolic systems.
    pub fn alphabet(&self) -> Option<Vec<u8>> {
        match &self.family {
            Family::Chacon => Some(vec![chacon::TOWER, chacon::SPACER]),
            Family::RudinShapiro => Some(vec![b'+', b'-']),
            Family::Bernoulli { probabilities, .. } => Some((0..probabilities.len() as u8).map(|d| b'0' + d).collect()),
            _ => None,
        }
    }

    /// Fails with a capability error unless `obs` makes sense on this system.
    pub fn check_observable(&self, obs: &Observable) -> Result<()> {
        obs.validate()?;
        let unsupported = || {
            Err(Error::Capability(format!("observable `{}` is not defined on system `{}`", obs.name, self.name)))
        };
        match (&self.family, &obs.kind) {
            (Family::Rotation { .. } | Family::Iet { .. }, ObservableKind::Character { frequencies }) => {
                if frequencies.len() == 1 {
                    Ok(())
                } else {
                    unsupported()
                }
            }
            (Family::Rotation { .. } | Family::Iet { .. }, ObservableKind::IntervalIndicator { .. }) => Ok(()),
            (Family::SkewTorus { .. }, ObservableKind::Character { frequencies }) => {
                if frequencies.len() == 2 {
                    Ok(())
                } else {
                    unsupported()
                }
            }
            (
                Family::Chacon | Family::RudinShapiro | Family::Bernoulli { .. },
                ObservableKind::Cylinder { .. } | ObservableKind::CylinderUnion { .. },
            ) => {
                let alphabet = self.alphabet().unwrap_or_default();
                let words: Vec<&str> = match &obs.kind {
                    ObservableKind::Cylinder { word, .. } => vec![word.as_str()],
                    ObservableKind::CylinderUnion { words, .. } => words.iter().map(String::as_str).collect(),
                    _ => unreachable!(),
                };
                for w in words {
                    if let Some(bad) = w.bytes().find(|b| !alphabet.contains(b)) {
                        return input(format!(
                            "symbol `{}` in observable `{}` is not in the alphabet of `{}`",
                            bad as char, obs.name, self.name
                        ));
                    }
                }
                Ok(())
            }
            _ => unsupported(),
        }
    }

    /// `∫ f dμ` in closed form, where known.
    pub fn exact_mean(&self, obs: &Observable) -> Option<Complex64> {
        match (&self.family, &obs.kind) {
            (Family::Rotation { .. } | Family::Iet { .. }, ObservableKind::Character { frequencies }) => {
                Some(Complex64::new(if frequencies[0] == 0 { 1.0 } else { 0.0 }, 0.0))
            }
            (Family::Rotation { .. } | Family::Iet { .. }, &ObservableKind::IntervalIndicator { a, b }) => {
                Some(Complex64::new(b - a, 0.0))
            }
            (Family::SkewTorus { base }, ObservableKind::Character { frequencies }) => {
                let (d, c) = (frequencies[0], frequencies[1]);
                Some(if c == 0 { base.fourier(-d) } else { Complex64::new(0.0, 0.0) })
            }
            (Family::Bernoulli { probabilities, .. }, ObservableKind::Cylinder { word, .. }) => {
                Some(Complex64::new(word_probability(probabilities, word), 0.0))
            }
            (Family::Bernoulli { probabilities, .. }, ObservableKind::CylinderUnion { words, .. }) => {
                let p: f64 = unique(words).iter().map(|w| word_probability(probabilities, w)).sum();
                Some(Complex64::new(p, 0.0))
            }
            _ => None,
        }
    }

    /// Exact correlation of characters, where a closed form exists.
    fn exact_value(&self, f: &Observable, g: &Observable, n: i64) -> Option<Complex64> {
        let (ObservableKind::Character { frequencies: fk }, ObservableKind::Character { frequencies: gk }) =
            (&f.kind, &g.kind)
        else {
            return None;
        };
        match &self.family {
            Family::Rotation { alpha, .. } => {
                if fk[0] != gk[0] {
                    return Some(Complex64::new(0.0, 0.0));
                }
                Some(rotation_phase(fk[0].checked_mul(n)?, *alpha))
            }
            Family::SkewTorus { base } => {
                // ⟨Tⁿe_{d,c}, e_{a,b}⟩ = ∫ e^{2πi((d + cn − a)x + (c − b)y)} = [c = b] σ̂(a − d − cn).
                // The plain-product pairing ∫ Tⁿe_{d,c}·e_{a,b} is this value at (−a, −b).
                let (d, c) = (fk[0], fk[1]);
                let (a, b) = (gk[0], gk[1]);
                if c != b {
                    return Some(Complex64::new(0.0, 0.0));
                }
                let m = (a as i128) - (d as i128) - (c as i128) * (n as i128);
                let m = i64::try_from(m).ok()?;
                Some(base.fourier(m))
            }
            _ => None,
        }
    }

    /// Mean of `obs`: exact when known, else the empirical orbit average.
    pub fn mean(&self, obs: &Observable, quality: Quality) -> Result<Complex64> {
        self.check_observable(obs)?;
        if let Some(m) = self.exact_mean(obs) {
            return Ok(m);
        }
        let Quality::Empirical { orbit_length, seed } = quality else {
            return Err(Error::Capability(format!("no closed-form mean of `{}` on `{}`", obs.name, self.name)));
        };
        let mut path = self.sample_paths(&[obs], orbit_length, seed)?;
        let values = path.pop().unwrap();
        Ok(values.iter().sum::<Complex64>() / values.len() as f64)
    }

    /// Samples `obs ∘ Tᵗ` for `t = 0..len` along the default or seeded orbit.
    ///
    /// The skew torus has no single-orbit sampler (its orbits are not generic),
    /// so it is rejected here.
    pub fn sample_path(&self, obs: &Observable, len: usize, seed: Option<u64>) -> Result<Vec<Complex64>> {
        self.check_observable(obs)?;
        Ok(self.sample_paths(&[obs], len, seed)?.pop().unwrap())
    }

    fn sample_paths(&self, observables: &[&Observable], len: usize, seed: Option<u64>) -> Result<Vec<Vec<Complex64>>> {
        match &self.family {
            Family::Rotation { alpha, .. } => {
                let alpha = *alpha;
                let points = point_orbit(len, seed, move |x| (x + alpha).rem_euclid(1.0));
                Ok(observables.iter().map(|o| points.iter().map(|&x| point_value(o, x)).collect()).collect())
            }
            Family::Iet { lengths, permutation } => {
                let map = iet::Iet::new(lengths, permutation)?;
                let points = point_orbit(len, seed, |x| map.apply(x));
                Ok(observables.iter().map(|o| points.iter().map(|&x| point_value(o, x)).collect()).collect())
            }
            Family::Chacon | Family::RudinShapiro | Family::Bernoulli { .. } => {
                let (lo, hi) = observables.iter().fold((0i64, 0i64), |(lo, hi), o| {
                    let (off, w) = cylinder_span(o);
                    (lo.min(off), hi.max(off + w as i64))
                });
                let front = (-lo) as usize;
                let total = front + len + hi as usize;
                let word = self.symbols(total, seed);
                Ok(observables
                    .iter()
                    .map(|o| (0..len).map(|t| cylinder_value(o, &word, front + t)).collect())
                    .collect())
            }
            Family::SkewTorus { .. } => Err(Error::Capability(format!(
                "`{}` has no single-orbit sampler; use Monte Carlo correlation",
                self.name
            ))),
        }
    }

    /// `len` symbols of the default (fixed point after burn-in) or seeded orbit.
    fn symbols(&self, len: usize, seed: Option<u64>) -> Vec<u8> {
        let start = BURN_IN + seed.map_or(0, |s| ChaCha8Rng::seed_from_u64(s).random_range(0..1_000_000usize));
        match &self.family {
            Family::Chacon => chacon::chacon_word(start + len).split_off(start),
            Family::RudinShapiro => (start..start + len).map(|n| rudin_shapiro::symbol(n as u64)).collect(),
            Family::Bernoulli { probabilities, seed: sys_seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(sys_seed ^ seed.unwrap_or(0).rotate_left(17));
                let cumulative: Vec<f64> = probabilities
                    .iter()
                    .scan(0.0, |acc, p| {
                        *acc += p;
                        Some(*acc)
                    })
                    .collect();
                (0..len)
                    .map(|_| {
                        let u: f64 = rng.random();
                        let idx = cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1);
                        b'0' + idx as u8
                    })
                    .collect()
            }
            _ => unreachable!("not a symbolic system"),
        }
    }
}

fn unique(words: &[String]) -> Vec<&String> {
    let mut out: Vec<&String> = words.iter().collect();
    out.sort();
    out.dedup();
    out
}

fn word_probability(probabilities: &[f64], word: &str) -> f64 {
    word.bytes().map(|b| probabilities[(b - b'0') as usize]).product()
}

fn point_orbit(len: usize, seed: Option<u64>, step: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut x = seed.map_or(DEFAULT_START, |s| ChaCha8Rng::seed_from_u64(s).random::<f64>());
    for _ in 0..BURN_IN {
        x = step(x);
    }
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(x);
        x = step(x);
    }
    out
}

fn point_value(obs: &Observable, x: f64) -> Complex64 {
    match obs.kind {
        ObservableKind::Character { ref frequencies } => unit_phase((frequencies[0] as f64 * x).rem_euclid(1.0)),
        ObservableKind::IntervalIndicator { a, b } => Complex64::new(if a <= x && x < b { 1.0 } else { 0.0 }, 0.0),
        _ => unreachable!("checked by check_observable"),
    }
}

fn cylinder_span(obs: &Observable) -> (i64, usize) {
    match &obs.kind {
        ObservableKind::Cylinder { word, offset } => (*offset, word.len()),
        ObservableKind::CylinderUnion { words, offset } => (*offset, words[0].len()),
        _ => (0, 0),
    }
}

fn cylinder_value(obs: &Observable, word: &[u8], t: usize) -> Complex64 {
    let hit = match &obs.kind {
        ObservableKind::Cylinder { word: w, offset } => {
            let s = (t as i64 + offset) as usize;
            &word[s..s + w.len()] == w.as_bytes()
        }
        ObservableKind::CylinderUnion { words, offset } => {
            let s = (t as i64 + offset) as usize;
            let n = words[0].len();
            words.iter().any(|w| &word[s..s + n] == w.as_bytes())
        }
        _ => unreachable!("checked by check_observable"),
    };
    Complex64::new(if hit { 1.0 } else { 0.0 }, 0.0)
}

/// `⟨Tⁿf, g⟩` at each lag (and lag 0).
///
/// Exact mode covers characters on rotations and skew tori. Empirical mode
/// averages along an orbit (rotations, IETs, symbolic systems) or, on skew
/// tori, over independent Monte Carlo points; every value carries a
/// batch-means standard error.
pub fn correlation(
    sys: &System,
    f: &Observable,
    g: &Observable,
    lags: &[i64],
    quality: Quality,
) -> Result<CorrelationSequence> {
    sys.check_observable(f)?;
    sys.check_observable(g)?;
    let mut all: Vec<i64> = lags.to_vec();
    all.push(0);
    all.sort_unstable();
    all.dedup();
    let centered = f.centered || g.centered;
    let autocorrelation = f == g;

    let (values, stderr) = match quality {
        Quality::Exact => {
            let exact_pair = matches!(
                (&sys.family, &f.kind),
                (Family::Rotation { .. } | Family::SkewTorus { .. }, ObservableKind::Character { .. })
            );
            if !exact_pair {
                return Err(Error::Capability(format!(
                    "exact correlation of `{}` and `{}` on `{}` is not available",
                    f.name, g.name, sys.name
                )));
            }
            let shift = if centered {
                sys.exact_mean(f).unwrap() * sys.exact_mean(g).unwrap().conj()
            } else {
                Complex64::new(0.0, 0.0)
            };
            let mut values = BTreeMap::new();
            for &n in &all {
                let v = sys
                    .exact_value(f, g, n)
                    .ok_or_else(|| Error::Input(format!("lag {n} overflows the exact formula")))?;
                values.insert(n, v - shift);
            }
            (values, BTreeMap::new())
        }
        Quality::Empirical { orbit_length, seed } => {
            if orbit_length < MIN_ORBIT_LENGTH {
                return input(format!("empirical orbit length {orbit_length} below {MIN_ORBIT_LENGTH}"));
            }
            // Autocorrelations are estimated at |n| and mirrored, so c(−n) = conj c(n) exactly.
            let estimated: Vec<i64> = if autocorrelation {
                let mut abs: Vec<i64> = all.iter().map(|n| n.abs()).collect();
                abs.sort_unstable();
                abs.dedup();
                abs
            } else {
                all.clone()
            };
            let (mut values, mut stderr) = if let Family::SkewTorus { base } = &sys.family {
                monte_carlo_skew(*base, f, g, &estimated, orbit_length, seed.unwrap_or(0), centered)?
            } else {
                orbit_correlation(sys, f, g, &estimated, orbit_length, seed, centered)?
            };
            if autocorrelation {
                values.get_mut(&0).unwrap().im = 0.0;
                for &n in all.iter().filter(|n| **n < 0) {
                    let v = values[&-n].conj();
                    let e = stderr[&-n];
                    values.insert(n, v);
                    stderr.insert(n, e);
                }
                values.retain(|n, _| all.binary_search(n).is_ok());
                stderr.retain(|n, _| all.binary_search(n).is_ok());
            }
            (values, stderr)
        }
    };
    let mass = values[&0];
    Ok(CorrelationSequence { values, stderr, mass, centered, autocorrelation })
}

type Estimates = (BTreeMap<i64, Complex64>, BTreeMap<i64, f64>);

fn orbit_correlation(
    sys: &System,
    f: &Observable,
    g: &Observable,
    lags: &[i64],
    n: usize,
    seed: Option<u64>,
    centered: bool,
) -> Result<Estimates> {
    let lo = (*lags.first().unwrap()).min(0);
    let hi = (*lags.last().unwrap()).max(0);
    let origin = (-lo) as usize;
    let total = origin + n + hi as usize;
    let mut paths = sys.sample_paths(&[f, g], total, seed)?;
    let mut gp = paths.pop().unwrap();
    let mut fp = paths.pop().unwrap();
    if centered {
        for p in [&mut fp, &mut gp] {
            let m = p.iter().sum::<Complex64>() / p.len() as f64;
            p.iter_mut().for_each(|v| *v -= m);
        }
    }
    let (values, stderr) = empirical::cross_correlate(&fp, &gp, origin, n, lags);
    Ok((lags.iter().copied().zip(values).collect(), lags.iter().copied().zip(stderr).collect()))
}

fn monte_carlo_skew(
    base: BaseMeasure,
    f: &Observable,
    g: &Observable,
    lags: &[i64],
    samples: usize,
    seed: u64,
    centered: bool,
) -> Result<Estimates> {
    let (ObservableKind::Character { frequencies: fk }, ObservableKind::Character { frequencies: gk }) =
        (&f.kind, &g.kind)
    else {
        unreachable!("checked by check_observable");
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<(f64, f64)> = (0..samples).map(|_| (base.sample(&mut rng), rng.random::<f64>())).collect();
    let char_at = |k: &[i64], x: f64, y: f64| {
        unit_phase((k[0] as f64 * x + k[1] as f64 * y).rem_euclid(1.0))
    };
    let (mf, mg) = if centered {
        let mf = points.iter().map(|&(x, y)| char_at(fk, x, y)).sum::<Complex64>() / samples as f64;
        let mg = points.iter().map(|&(x, y)| char_at(gk, x, y)).sum::<Complex64>() / samples as f64;
        (mf, mg)
    } else {
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    };
    let mut values = BTreeMap::new();
    let mut stderr = BTreeMap::new();
    for &n in lags {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sq = 0.0;
        for &(x, y) in &points {
            let y_n = (y + (n as f64 * x).rem_euclid(1.0)).rem_euclid(1.0);
            let v = (char_at(fk, x, y_n) - mf) * (char_at(gk, x, y) - mg).conj();
            sum += v;
            sq += v.norm_sqr();
        }
        let mean = sum / samples as f64;
        let var = (sq / samples as f64 - mean.norm_sqr()).max(0.0);
        values.insert(n, mean);
        stderr.insert(n, (var / samples as f64).sqrt());
    }
    Ok((values, stderr))
}

/// `e^{2πinα}`, reducing `|n|·α` mod 1 in two halves so large lags keep precision.
pub fn rotation_phase(n: i64, alpha: f64) -> Complex64 {
    const SPLIT: u32 = 26;
    let m = n.unsigned_abs();
    let hi = m >> SPLIT;
    let lo = m & ((1 << SPLIT) - 1);
    // 2^26·α is exact in binary, so its fractional part is too.
    let shifted = (alpha * (1u64 << SPLIT) as f64).rem_euclid(1.0);
    let phase = ((hi as f64 * shifted).rem_euclid(1.0) + (lo as f64 * alpha).rem_euclid(1.0)).rem_euclid(1.0);
    let z = unit_phase(phase);
    if n < 0 {
        z.conj()
    } else {
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_eigenfunction_correlation() {
        let alpha = SQRT_2 - 1.0;
        let sys = System::rotation(alpha).unwrap();
        assert!(matches!(sys.family, Family::Rotation { irrational: true, .. }));
        let e1 = Observable::character(&[1]);
        let c = correlation(&sys, &e1, &e1, &[1, 2, 7, -3], Quality::Exact).unwrap();
        for n in [1, 2, 7, -3] {
            let want = unit_phase((n as f64 * alpha).rem_euclid(1.0));
            assert!((c.get(n).unwrap() - want).norm() < 1e-12);
        }
        assert_eq!(c.mass, Complex64::new(1.0, 0.0));
        assert!(c.autocorrelation);
    }

    #[test]
    fn rational_rotation_is_flagged() {
        let sys = System::rotation(0.5).unwrap();
        assert!(matches!(sys.family, Family::Rotation { irrational: false, .. }));
        let sys = System::rotation(3.0 / 7.0).unwrap();
        assert!(matches!(sys.family, Family::Rotation { irrational: false, .. }));
    }

    #[test]
    fn skew_torus_exact_matches_cantor_transform() {
        let sys = System::skew_torus(BaseMeasure::cantor4()).unwrap();
        let e = Observable::character(&[0, 1]);
        for k in 1..10 {
            let n = 4i64.pow(k);
            let c = correlation(&sys, &e, &e, &[n], Quality::Exact).unwrap();
            assert_eq!(c.get(n).unwrap(), cantor_fourier(-n, DEFAULT_TRUNCATION));
        }
    }

    #[test]
    fn exact_mode_rejects_symbolic_systems() {
        let f = Observable::cylinder("0", 0);
        let err = correlation(&System::chacon(), &f, &f, &[1], Quality::Exact).unwrap_err();
        assert!(matches!(err, Error::Capability(_)));
    }

    #[test]
    fn mismatched_observable_is_a_capability_error() {
        let sys = System::rotation(0.3).unwrap();
        let f = Observable::cylinder("0", 0);
        assert!(matches!(sys.check_observable(&f), Err(Error::Capability(_))));
        let chars = Observable::character(&[1, 2]);
        assert!(matches!(sys.check_observable(&chars), Err(Error::Capability(_))));
    }

    #[test]
    fn short_orbits_are_rejected() {
        let f = Observable::cylinder("0", 0);
        let err = correlation(&System::chacon(), &f, &f, &[1], Quality::empirical(100)).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn unknown_symbols_are_input_errors() {
        let f = Observable::cylinder("02", 0);
        assert!(matches!(System::chacon().check_observable(&f), Err(Error::Input(_))));
    }

    #[test]
    fn empirical_rotation_matches_exact() {
        let alpha = SQRT_2 - 1.0;
        let sys = System::rotation(alpha).unwrap();
        let e1 = Observable::character(&[1]);
        let emp = correlation(&sys, &e1, &e1, &[1, 5, 40], Quality::empirical(20_000)).unwrap();
        for n in [1, 5, 40] {
            let want = rotation_phase(n, alpha);
            assert!((emp.get(n).unwrap() - want).norm() < 1e-9);
        }
    }

    #[test]
    fn chacon_cylinder_frequencies() {
        let sys = System::chacon();
        let m0 = sys.mean(&Observable::cylinder("0", 0), Quality::empirical(200_000)).unwrap();
        let m1 = sys.mean(&Observable::cylinder("1", 0), Quality::empirical(200_000)).unwrap();
        assert!((m0.re - 2.0 / 3.0).abs() < 2e-3);
        assert!((m1.re - 1.0 / 3.0).abs() < 2e-3);
    }

    #[test]
    fn centered_autocorrelation_has_variance_as_mass() {
        let sys = System::rudin_shapiro();
        let f = Observable::cylinder("+", 0).centered();
        let c = correlation(&sys, &f, &f, &[1, 2, 3], Quality::empirical(1 << 16)).unwrap();
        assert!((c.mass.re - 0.25).abs() < 1e-2);
        assert!(c.centered);
        assert_eq!(c.stderr.len(), 4);
    }

    #[test]
    fn monte_carlo_skew_torus_agrees_with_exact() {
        let sys = System::skew_torus(BaseMeasure::cantor4()).unwrap();
        let f = Observable::character(&[1, 1]);
        let g = Observable::character(&[2, 1]);
        let exact = correlation(&sys, &f, &g, &[3], Quality::Exact).unwrap();
        let emp = correlation(&sys, &f, &g, &[3], Quality::Empirical { orbit_length: 40_000, seed: Some(3) }).unwrap();
        let err = (exact.get(3).unwrap() - emp.get(3).unwrap()).norm();
        assert!(err < 5.0 * emp.stderr_at(3) + 1e-3, "err {err}");
    }

    #[test]
    fn csv_layout() {
        let c = CorrelationSequence::from_fn([1, 2], true, |n| Complex64::new(n as f64, 0.0));
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "lag,re,im,stderr");
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn descriptors_round_trip_through_json() {
        let sys = System::skew_torus(BaseMeasure::Cantor4 { truncation: 12 }).unwrap();
        let text = serde_json::to_string(&sys).unwrap();
        assert!(text.contains("\"family\":\"skew_torus\""));
        let back: System = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sys);
        let obs = Observable::cylinder("001", -1).centered();
        let back: Observable = serde_json::from_str(&serde_json::to_string(&obs).unwrap()).unwrap();
        assert_eq!(back, obs);
    }
}
