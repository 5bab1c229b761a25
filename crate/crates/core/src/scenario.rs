//! Batch scenarios: an ordered list of operation steps with optional
//! expectations on their JSON results, plus the builtin registry.
//!
//! A scenario file looks like
//!
//! ```json
//! {
//!   "name": "demo",
//!   "seed": 7,
//!   "steps": [
//!     {"op": "chacon_heights", "count": 5,
//!      "expect": [{"path": "/heights/4", "eq": 121}]}
//!   ]
//! }
//! ```
//!
//! Every step writes its result into the JSON summary; steps with tabular
//! output also write `<scenario>-<index>-<op>.csv`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::joinings::{
    coupling_to_strings, extreme_joinings, is_disjoint, is_joining, joining_polytope, non_ergodic_witness,
    product_coupling, FiniteSystem,
};
use crate::limits::{
    evaluate_limit, scheme_equivalence, vdc_conclusion_check, vdc_inequality_check, vectors_with_gram, LimitReport,
    LimitScheme, ModelVector, PairTable, ShiftUnitaryModel,
};
use crate::mixing::{
    alpha_weak_mixing_check, chacon_weak_limit_fit, classify, default_candidates, finite_extension_check,
    rigid_mixing_disjointness_survey, rigidity_search, systems_of_size, Budget, CandidateSequence, FiberModel,
};
use crate::operator::{
    assert_projection_from_idempotent_contraction, image_kernel_decomposition, kernel_power_invariance,
    normal_with_spectrum, random_unitary, sequence_limit_operator, ComplexMatrix,
};
use crate::spectral::{convolve_coefficients, extract_atoms, fejer_estimate, rajchman_report, wiener_atom_mass};
use crate::systems::cantor::first_nonzero_digit_is_two;
use crate::systems::{
    cantor_fourier, chacon_heights, correlation, iet_apply, rudin_shapiro_sequence, BaseMeasure, CorrelationSequence,
    Observable, Quality, System,
};

/// Why a scenario could not produce a verdict.
#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("io error: {0}")]
    Io(String),
}

impl ScenarioError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub steps: Vec<StepSpec>,
    /// Files written by the last run, relative to the output directory.
    #[serde(default)]
    pub outputs: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct StepSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(flatten)]
    pub step: Step,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expect: Vec<Expectation>,
}

/// A check on the step's JSON result at a JSON pointer.
#[derive(Serialize, Deserialize, Clone, Debug, Default)]
pub struct Expectation {
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eq: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub le: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ge: Option<f64>,
}

impl Expectation {
    fn check(&self, result: &Value) -> Option<String> {
        let Some(v) = result.pointer(&self.path) else {
            return Some(format!("{}: no such field", self.path));
        };
        if let Some(want) = &self.eq {
            let same = match (v.as_f64(), want.as_f64()) {
                (Some(a), Some(b)) => a == b,
                _ => v == want,
            };
            if !same {
                return Some(format!("{}: expected {want}, got {v}", self.path));
            }
        }
        if self.le.is_some() || self.ge.is_some() {
            let Some(x) = v.as_f64() else {
                return Some(format!("{}: {v} is not a number", self.path));
            };
            if let Some(le) = self.le.filter(|&le| !(x <= le)) {
                return Some(format!("{}: {x} > {le}", self.path));
            }
            if let Some(ge) = self.ge.filter(|&ge| !(x >= ge)) {
                return Some(format!("{}: {x} < {ge}", self.path));
            }
        }
        None
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(untagged)]
pub enum Lags {
    List(Vec<i64>),
    Range { from: i64, to: i64 },
}

impl Lags {
    fn expand(&self) -> Vec<i64> {
        match self {
            Lags::List(v) => v.clone(),
            Lags::Range { from, to } => (*from..=*to).collect(),
        }
    }
}

/// A correlation source `⟨Tⁿf, f⟩` for the spectral steps.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct Source {
    pub system: System,
    pub f: Observable,
    #[serde(default = "default_quality")]
    pub quality: Quality,
}

impl Source {
    fn sequence(&self, lags: &[i64]) -> crate::Result<CorrelationSequence> {
        correlation(&self.system, &self.f, &self.f, lags, self.quality)
    }

    fn validate(&self) -> crate::Result<()> {
        self.system.validate()?;
        self.system.check_observable(&self.f)
    }
}

fn default_quality() -> Quality {
    Quality::empirical(1_000_000)
}

fn default_tol() -> f64 {
    crate::mixing::EMPIRICAL_TOL
}

fn default_truncation() -> u32 {
    crate::systems::DEFAULT_TRUNCATION
}

fn chacon_system() -> System {
    System::chacon()
}

macro_rules! defaults {
    ($($name:ident: $ty:ty = $val:expr;)*) => {
        $(fn $name() -> $ty { $val })*
    };
}

defaults! {
    d4096: i64 = 4096;
    d16: i64 = 16;
    d12: u32 = 12;
    d14: u32 = 14;
    d3: i64 = 3;
    d64: i64 = 64;
    d_rs_len: usize = 1 << 20;
    d_depth: usize = 40;
    d_max_lag: i64 = 100_000;
    d_heights: usize = 9;
    d_power: i64 = 3;
    d1000: usize = 1000;
    d8: usize = 8;
    d16u: usize = 16;
    d32: usize = 32;
    d200: usize = 200;
    d_tol_op: f64 = 1e-9;
    d50: usize = 50;
    d_tol_scheme: f64 = 1e-6;
    d4: usize = 4;
    d_vdc_tol: f64 = 1e-3;
    d5: usize = 5;
    d6: usize = 6;
    d12u: usize = 12;
}

/// The operations a scenario can call. JSON field `op` selects the variant;
/// the remaining fields are its parameters.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Step {
    /// Digit rule, `μ̂(4n) = μ̂(n)` and `μ̂(m·4^j + n) ≈ μ̂(n) μ̂(m)` for the Cantor measure.
    CantorIdentities {
        #[serde(default = "d4096")]
        max_n: i64,
        #[serde(default = "default_truncation")]
        truncation: u32,
        #[serde(default = "d16")]
        factor_range: i64,
        #[serde(default = "d12")]
        factor_power: u32,
    },
    CantorFourier {
        ns: Vec<i64>,
        #[serde(default = "default_truncation")]
        truncation: u32,
    },
    /// Exact `⟨T^{4^k} e_{d,c}, e_{a,b}⟩` on the Cantor skew torus against `[b=c] σ̂(a−d) σ̂(−c)`.
    SkewTorusLimits {
        #[serde(default = "d14")]
        max_k: u32,
        #[serde(default = "d3")]
        range: i64,
        #[serde(default = "default_truncation")]
        truncation: u32,
    },
    Correlation {
        system: System,
        f: Observable,
        #[serde(default)]
        g: Option<Observable>,
        lags: Lags,
        #[serde(default = "default_quality")]
        quality: Quality,
    },
    EvaluateLimit {
        system: System,
        f: Observable,
        #[serde(default)]
        g: Option<Observable>,
        scheme: LimitScheme,
        /// Extra lags to evaluate, e.g. the index set a `tail_sup` runs over.
        #[serde(default)]
        lags: Option<Lags>,
        #[serde(default = "default_quality")]
        quality: Quality,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    ChaconHeights {
        count: usize,
    },
    RudinShapiroAutocorrelation {
        #[serde(default = "d_rs_len")]
        length: usize,
        #[serde(default = "d64")]
        max_lag: i64,
    },
    IetApply {
        lengths: Vec<f64>,
        permutation: Vec<usize>,
        points: Vec<f64>,
    },
    Classify {
        system: System,
        observables: Vec<Observable>,
        #[serde(default)]
        budget: Budget,
    },
    RigiditySearch {
        system: System,
        observable: Observable,
        #[serde(default)]
        candidates: Option<Vec<CandidateSequence>>,
        #[serde(default = "d_depth")]
        depth: usize,
        #[serde(default = "d_max_lag")]
        max_lag: i64,
        #[serde(default = "default_quality")]
        quality: Quality,
    },
    ChaconWeakLimitFit {
        #[serde(default = "chacon_system")]
        system: System,
        #[serde(default = "d_power")]
        max_power: i64,
        #[serde(default)]
        sequence: Option<Vec<i64>>,
        #[serde(default = "d_heights")]
        heights: usize,
        basis: Vec<Observable>,
        #[serde(default = "default_quality")]
        quality: Quality,
    },
    AlphaWeakMixingCheck {
        system: System,
        pairs: Vec<(Observable, Observable)>,
        sequence: Vec<i64>,
        alpha: f64,
        #[serde(default = "default_tol")]
        tol: f64,
        #[serde(default = "default_quality")]
        quality: Quality,
    },
    FejerEstimate {
        source: Source,
        max_lag: i64,
        #[serde(default)]
        grid: Option<usize>,
        #[serde(default)]
        atoms: bool,
    },
    WienerAtomMass {
        source: Source,
        window: usize,
    },
    RajchmanReport {
        source: Source,
        max_lag: i64,
        thresholds: Vec<f64>,
    },
    ConvolveCoefficients {
        first: Source,
        second: Source,
        max_lag: i64,
    },
    VdcInequality {
        #[serde(default = "d1000")]
        trials: usize,
        #[serde(default = "d8")]
        dim: usize,
        #[serde(default = "d16u")]
        count: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
    VdcConclusion {
        #[serde(default = "d32")]
        count: usize,
        #[serde(default = "d_vdc_tol")]
        tol: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
    ImageKernelLemma {
        #[serde(default = "d200")]
        trials: usize,
        #[serde(default = "d16u")]
        max_dim: usize,
        #[serde(default = "d_tol_op")]
        tol: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
    ImageKernelDecomposition {
        matrix: ComplexMatrix,
        #[serde(default = "d_tol_op")]
        tol: f64,
    },
    SequenceLimitOperator {
        matrix: ComplexMatrix,
        indices: Vec<i64>,
        #[serde(default = "d_tol_op")]
        tol: f64,
    },
    USplit {
        matrix: ComplexMatrix,
        schemes: Vec<LimitScheme>,
        #[serde(default = "d_tol_op")]
        tol: f64,
    },
    SchemeEquivalence {
        #[serde(default = "d50")]
        models: usize,
        #[serde(default = "d_tol_scheme")]
        tol: f64,
        #[serde(default = "d4")]
        max_dim: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
    FiniteDisjointness {
        #[serde(default = "d8")]
        max_n: usize,
        #[serde(default = "d8")]
        max_size: usize,
        #[serde(default = "d5")]
        witness_size: usize,
    },
    JoiningPolytope {
        x: FiniteSystem,
        y: FiniteSystem,
    },
    ExtremeJoinings {
        x: FiniteSystem,
        y: FiniteSystem,
    },
    RigidMixingSurvey {
        #[serde(default = "d5")]
        max_size: usize,
    },
    FiniteExtension {
        #[serde(default = "d12u")]
        points: usize,
        #[serde(default = "d6")]
        max_fibres: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
}

/// Step result: JSON for the summary, optionally a CSV table.
struct StepOutput {
    value: Value,
    table: Option<Table>,
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn write(&self, path: &Path) -> Result<(), ScenarioError> {
        let io = |e: csv::Error| ScenarioError::Io(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush().map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))
    }
}

fn c_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn correlation_table(c: &CorrelationSequence) -> Table {
    let mut t = Table::new(&["lag", "re", "im", "stderr"]);
    for (n, v) in &c.values {
        t.push(vec![n.to_string(), v.re.to_string(), v.im.to_string(), c.stderr_at(*n).to_string()]);
    }
    t
}

fn report_table(reports: &[(String, &LimitReport)]) -> Table {
    let mut t = Table::new(&["name", "scheme", "re", "im", "converged", "deviation", "samples_used", "tolerance"]);
    for (name, r) in reports {
        let v = r.value.unwrap_or_default();
        t.push(vec![
            name.clone(),
            r.scheme.clone(),
            v.re.to_string(),
            v.im.to_string(),
            r.converged.to_string(),
            r.deviation.to_string(),
            r.samples_used.to_string(),
            r.tolerance.to_string(),
        ]);
    }
    t
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn random_unit_ball_vectors(rng: &mut ChaCha8Rng, count: usize, dim: usize) -> Vec<Vec<Complex64>> {
    (0..count)
        .map(|_| {
            let v: Vec<Complex64> =
                (0..dim).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let radius: f64 = rng.random();
            v.into_iter().map(|z| z * (radius / norm)).collect()
        })
        .collect()
}

impl Step {
    pub fn name(&self) -> &'static str {
        match self {
            Step::CantorIdentities { .. } => "cantor_identities",
            Step::CantorFourier { .. } => "cantor_fourier",
            Step::SkewTorusLimits { .. } => "skew_torus_limits",
            Step::Correlation { .. } => "correlation",
            Step::EvaluateLimit { .. } => "evaluate_limit",
            Step::ChaconHeights { .. } => "chacon_heights",
            Step::RudinShapiroAutocorrelation { .. } => "rudin_shapiro_autocorrelation",
            Step::IetApply { .. } => "iet_apply",
            Step::Classify { .. } => "classify",
            Step::RigiditySearch { .. } => "rigidity_search",
            Step::ChaconWeakLimitFit { .. } => "chacon_weak_limit_fit",
            Step::AlphaWeakMixingCheck { .. } => "alpha_weak_mixing_check",
            Step::FejerEstimate { .. } => "fejer_estimate",
            Step::WienerAtomMass { .. } => "wiener_atom_mass",
            Step::RajchmanReport { .. } => "rajchman_report",
            Step::ConvolveCoefficients { .. } => "convolve_coefficients",
            Step::VdcInequality { .. } => "vdc_inequality",
            Step::VdcConclusion { .. } => "vdc_conclusion",
            Step::ImageKernelLemma { .. } => "image_kernel_lemma",
            Step::ImageKernelDecomposition { .. } => "image_kernel_decomposition",
            Step::SequenceLimitOperator { .. } => "sequence_limit_operator",
            Step::USplit { .. } => "u_split",
            Step::SchemeEquivalence { .. } => "scheme_equivalence",
            Step::FiniteDisjointness { .. } => "finite_disjointness",
            Step::JoiningPolytope { .. } => "joining_polytope",
            Step::ExtremeJoinings { .. } => "extreme_joinings",
            Step::RigidMixingSurvey { .. } => "rigid_mixing_survey",
            Step::FiniteExtension { .. } => "finite_extension",
        }
    }

    /// Checks systems, observables and finite systems before anything runs.
    pub fn validate(&self) -> crate::Result<()> {
        let check = |sys: &System, obs: &[&Observable]| -> crate::Result<()> {
            sys.validate()?;
            obs.iter().try_for_each(|o| sys.check_observable(o))
        };
        match self {
            Step::Correlation { system, f, g, .. } | Step::EvaluateLimit { system, f, g, .. } => {
                check(system, &[f])?;
                g.as_ref().map_or(Ok(()), |g| check(system, &[g]))
            }
            Step::Classify { system, observables, .. } => check(system, &observables.iter().collect::<Vec<_>>()),
            Step::RigiditySearch { system, observable, .. } => check(system, &[observable]),
            Step::ChaconWeakLimitFit { system, basis, .. } => check(system, &basis.iter().collect::<Vec<_>>()),
            Step::AlphaWeakMixingCheck { system, pairs, .. } => {
                pairs.iter().try_for_each(|(a, b)| check(system, &[a, b]))
            }
            Step::FejerEstimate { source, .. }
            | Step::WienerAtomMass { source, .. }
            | Step::RajchmanReport { source, .. } => source.validate(),
            Step::ConvolveCoefficients { first, second, .. } => {
                first.validate()?;
                second.validate()
            }
            Step::IetApply { lengths, permutation, .. } => crate::systems::iet::validate(lengths, permutation),
            Step::JoiningPolytope { x, y } | Step::ExtremeJoinings { x, y } => {
                FiniteSystem::new(x.map.clone(), x.measure.clone())?;
                FiniteSystem::new(y.map.clone(), y.measure.clone()).map(|_| ())
            }
            Step::SkewTorusLimits { truncation, .. } => {
                System::skew_torus(BaseMeasure::Cantor4 { truncation: *truncation }).map(|_| ())
            }
            _ => Ok(()),
        }
    }

    fn run(&self, seed: u64) -> crate::Result<StepOutput> {
        match self {
            Step::CantorIdentities { max_n, truncation, factor_range, factor_power } => {
                let k = *truncation;
                let mut t = Table::new(&["n", "re", "im", "first_digit_two", "scaling_gap"]);
                let (mut violations, mut scaling) = (0usize, 0f64);
                for n in -max_n..=*max_n {
                    let v = cantor_fourier(n, k);
                    let zero = v == Complex64::new(0.0, 0.0);
                    let two = n != 0 && first_nonzero_digit_is_two(n);
                    if zero != two {
                        violations += 1;
                    }
                    let gap = (cantor_fourier(4 * n, k) - v).norm();
                    scaling = scaling.max(gap);
                    t.push(vec![n.to_string(), v.re.to_string(), v.im.to_string(), two.to_string(), gap.to_string()]);
                }
                let shift = 4i64.pow(*factor_power);
                let mut factorization = 0f64;
                for m in -factor_range..=*factor_range {
                    for n in -factor_range..=*factor_range {
                        let gap = (cantor_fourier(m * shift + n, k) - cantor_fourier(n, k) * cantor_fourier(m, k)).norm();
                        factorization = factorization.max(gap);
                    }
                }
                Ok(StepOutput {
                    value: json!({
                        "zero_rule_violations": violations,
                        "max_scaling_gap": scaling,
                        "max_factorization_gap": factorization,
                        "mu_hat_1": c_json(cantor_fourier(1, k)),
                    }),
                    table: Some(t),
                })
            }
            Step::CantorFourier { ns, truncation } => {
                let mut t = Table::new(&["n", "re", "im"]);
                let mut values = Vec::new();
                for &n in ns {
                    let v = cantor_fourier(n, *truncation);
                    t.push(vec![n.to_string(), v.re.to_string(), v.im.to_string()]);
                    values.push(c_json(v));
                }
                Ok(StepOutput { value: json!({ "values": values }), table: Some(t) })
            }
            Step::SkewTorusLimits { max_k, range, truncation } => {
                let base = BaseMeasure::Cantor4 { truncation: *truncation };
                let sys = System::skew_torus(base)?;
                let lags: Vec<i64> = (1..=*max_k).map(|k| 4i64.pow(k)).collect();
                let last = *lags.last().unwrap();
                let mut t = Table::new(&["a", "b", "c", "d", "re", "im", "limit_re", "limit_im", "gap"]);
                let (mut worst, mut worst_two) = (0f64, 0f64);
                let r = *range;
                for c in -r..=r {
                    for d in -r..=r {
                        let f = Observable::character(&[d, c]);
                        for a in -r..=r {
                            for b in -r..=r {
                                let g = Observable::character(&[a, b]);
                                let seq = correlation(&sys, &f, &g, &lags, Quality::Exact)?;
                                let v = seq.values[&last];
                                let limit = if b == c { base.fourier(a - d) * base.fourier(-c) } else { Complex64::default() };
                                let gap = (v - limit).norm();
                                worst = worst.max(gap);
                                if c.rem_euclid(4) == 2 {
                                    worst_two = worst_two.max(v.norm());
                                }
                                t.push(
                                    [a, b, c, d].iter().map(i64::to_string).chain(
                                        [v.re, v.im, limit.re, limit.im, gap].iter().map(f64::to_string),
                                    )
                                    .collect(),
                                );
                            }
                        }
                    }
                }
                Ok(StepOutput {
                    value: json!({ "lag": last, "max_gap": worst, "max_abs_c_2_mod_4": worst_two }),
                    table: Some(t),
                })
            }
            Step::Correlation { system, f, g, lags, quality } => {
                let g = g.as_ref().unwrap_or(f);
                let c = correlation(system, f, g, &lags.expand(), *quality)?;
                let positive: Vec<f64> = c.values.range(1..).map(|(_, v)| v.norm()).collect();
                let cesaro = if positive.is_empty() { 0.0 } else { positive.iter().sum::<f64>() / positive.len() as f64 };
                Ok(StepOutput {
                    value: json!({
                        "mass": c_json(c.mass),
                        "centered": c.centered,
                        "lags": c.values.len(),
                        "max_abs_positive": positive.iter().copied().fold(0.0, f64::max),
                        "cesaro_abs_positive": cesaro,
                        "max_stderr": c.stderr.values().copied().fold(0.0, f64::max),
                    }),
                    table: Some(correlation_table(&c)),
                })
            }
            Step::EvaluateLimit { system, f, g, scheme, lags, quality, tol } => {
                let g = g.as_ref().unwrap_or(f);
                let mut lags_needed = scheme.required_lags()?;
                lags_needed.extend(lags.as_ref().map(Lags::expand).unwrap_or_default());
                let lags = lags_needed;
                let c = correlation(system, f, g, &lags, *quality)?;
                let report = evaluate_limit(&c, scheme, *tol)?;
                let mut value = to_value(&report);
                value["modulus"] = json!(report.modulus());
                Ok(StepOutput { value, table: Some(report_table(&[(f.name.clone(), &report)])) })
            }
            Step::ChaconHeights { count } => {
                let h = chacon_heights(*count)?;
                Ok(StepOutput { value: json!({ "heights": h }), table: None })
            }
            Step::RudinShapiroAutocorrelation { length, max_lag } => {
                if *max_lag < 1 {
                    return Err(Error::Input("max_lag must be positive".into()));
                }
                let r = rudin_shapiro_sequence(length + *max_lag as usize)?;
                let mut t = Table::new(&["lag", "value"]);
                let mut worst = 0f64;
                for n in 1..=*max_lag as usize {
                    let s: i64 = (0..*length).map(|k| (r[k + n] * r[k]) as i64).sum();
                    let v = s as f64 / *length as f64;
                    worst = worst.max(v.abs());
                    t.push(vec![n.to_string(), v.to_string()]);
                }
                let mut partial = 0i64;
                let mut ratio = 0f64;
                for (k, x) in r[..*length].iter().enumerate() {
                    partial += *x as i64;
                    ratio = ratio.max(partial.abs() as f64 / ((k + 1) as f64).sqrt());
                }
                Ok(StepOutput {
                    value: json!({ "max_abs_autocorrelation": worst, "max_partial_sum_ratio": ratio }),
                    table: Some(t),
                })
            }
            Step::IetApply { lengths, permutation, points } => {
                let mut t = Table::new(&["x", "image"]);
                let mut images = Vec::new();
                for &x in points {
                    let y = iet_apply(lengths, permutation, x)?;
                    t.push(vec![x.to_string(), y.to_string()]);
                    images.push(y);
                }
                Ok(StepOutput { value: json!({ "images": images }), table: Some(t) })
            }
            Step::Classify { system, observables, budget } => {
                let verdict = classify(system, observables, budget)?;
                let mut t = Table::new(&["observable", "test", "verdict", "value", "deviation", "converged"]);
                for e in &verdict.evidence {
                    t.push(vec![
                        e.observable.clone(),
                        e.test.clone(),
                        to_value(&e.verdict).as_str().unwrap_or_default().to_string(),
                        e.report.value.unwrap_or_default().norm().to_string(),
                        e.report.deviation.to_string(),
                        e.report.converged.to_string(),
                    ]);
                }
                Ok(StepOutput { value: to_value(&verdict), table: Some(t) })
            }
            Step::RigiditySearch { system, observable, candidates, depth, max_lag, quality } => {
                let candidates = candidates.clone().unwrap_or_else(|| default_candidates(system, *max_lag));
                let profile = rigidity_search(system, observable, &candidates, *depth, *quality)?;
                let mut t = Table::new(&["candidate", "liminf_ratio"]);
                for (name, ratio) in &profile.candidates {
                    t.push(vec![name.clone(), ratio.to_string()]);
                }
                Ok(StepOutput { value: to_value(&profile), table: Some(t) })
            }
            Step::ChaconWeakLimitFit { system, max_power, sequence, heights, basis, quality } => {
                let sequence = match sequence {
                    Some(s) => s.clone(),
                    None => chacon_heights(*heights)?.into_iter().map(|h| h as i64).collect(),
                };
                let fit = chacon_weak_limit_fit(system, *max_power, &sequence, basis, *quality)?;
                let mut t = Table::new(&["power", "weight"]);
                for (b, a) in fit.powers.iter().zip(&fit.weights) {
                    t.push(vec![b.to_string(), a.to_string()]);
                }
                let mut value = to_value(&fit);
                value["support"] = json!(fit.powers.len());
                Ok(StepOutput { value, table: Some(t) })
            }
            Step::AlphaWeakMixingCheck { system, pairs, sequence, alpha, tol, quality } => {
                let check = alpha_weak_mixing_check(system, pairs, sequence, *alpha, *quality, *tol)?;
                let mut t = Table::new(&["a", "b", "limit", "target", "converged", "holds"]);
                for p in &check.pairs {
                    t.push(vec![
                        p.a.clone(),
                        p.b.clone(),
                        p.limit.to_string(),
                        p.target.to_string(),
                        p.converged.to_string(),
                        p.holds.map_or("inconclusive".into(), |h| h.to_string()),
                    ]);
                }
                Ok(StepOutput { value: to_value(&check), table: Some(t) })
            }
            Step::FejerEstimate { source, max_lag, grid, atoms } => {
                let l = *max_lag;
                let c = source.sequence(&(-l..=l).collect::<Vec<_>>())?;
                let m = grid.unwrap_or(4 * l as usize);
                let mut est = fejer_estimate(&c, m)?;
                if *atoms {
                    est = extract_atoms(est);
                }
                let mut t = Table::new(&["theta", "density"]);
                for (th, d) in est.grid.iter().zip(&est.density) {
                    t.push(vec![th.to_string(), d.to_string()]);
                }
                Ok(StepOutput {
                    value: json!({
                        "total_mass": est.total_mass,
                        "mass_gap": (est.accounted_mass() - est.total_mass).abs(),
                        "min_density": est.min_density(),
                        "min_density_over_mass": est.min_density() / est.total_mass.abs().max(f64::MIN_POSITIVE),
                        "argmax": est.argmax(),
                        "atoms": to_value(&est.atoms),
                    }),
                    table: Some(t),
                })
            }
            Step::WienerAtomMass { source, window } => {
                let c = source.sequence(&(1..=*window as i64).collect::<Vec<_>>())?;
                Ok(StepOutput { value: json!({ "mass": wiener_atom_mass(&c, *window)? }), table: None })
            }
            Step::RajchmanReport { source, max_lag, thresholds } => {
                let c = source.sequence(&(1..=*max_lag).collect::<Vec<_>>())?;
                let table = rajchman_report(&c, thresholds)?;
                let mut t = Table::new(&["threshold", "attained_at"]);
                for r in &table.rows {
                    t.push(vec![r.threshold.to_string(), r.attained_at.map_or(String::new(), |n| n.to_string())]);
                }
                Ok(StepOutput { value: to_value(&table), table: Some(t) })
            }
            Step::ConvolveCoefficients { first, second, max_lag } => {
                let l = *max_lag;
                let lags: Vec<i64> = (-l..=l).collect();
                let c1 = first.sequence(&lags)?;
                let c2 = second.sequence(&lags)?;
                let conv = convolve_coefficients(&c1, &c2)?;
                let identity_gap =
                    lags.iter().map(|n| (conv.values[n] - c1.values[n] * c2.values[n]).norm()).fold(0.0, f64::max);
                let n = l as usize;
                Ok(StepOutput {
                    value: json!({
                        "identity_gap": identity_gap,
                        "wiener_first": wiener_atom_mass(&c1, n)?,
                        "wiener_second": wiener_atom_mass(&c2, n)?,
                        "wiener_convolution": wiener_atom_mass(&conv, n)?,
                    }),
                    table: Some(correlation_table(&conv)),
                })
            }
            Step::VdcInequality { trials, dim, count, .. } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut t = Table::new(&["trial", "lhs", "rhs", "holds"]);
                let (mut violations, mut worst) = (0usize, f64::NEG_INFINITY);
                for k in 0..*trials {
                    let xs = random_unit_ball_vectors(&mut rng, *count, *dim);
                    let r = vdc_inequality_check(&xs)?;
                    violations += usize::from(!r.holds);
                    worst = worst.max(r.lhs - r.rhs);
                    t.push(vec![k.to_string(), r.lhs.to_string(), r.rhs.to_string(), r.holds.to_string()]);
                }
                Ok(StepOutput {
                    value: json!({ "trials": trials, "violations": violations, "max_excess": worst }),
                    table: Some(t),
                })
            }
            Step::VdcConclusion { count, tol, .. } => vdc_conclusion_cases(*count, *tol, seed),
            Step::ImageKernelLemma { trials, max_dim, tol, .. } => image_kernel_lemma(*trials, *max_dim, *tol, seed),
            Step::ImageKernelDecomposition { matrix, tol } => {
                let d = image_kernel_decomposition(matrix, *tol)?;
                Ok(StepOutput {
                    value: json!({
                        "image_rank": d.image_rank(),
                        "kernel_rank": d.kernel_rank(),
                        "invariant_defect": d.invariant_defect(),
                        "p_image": to_value(&d.p_image),
                        "p_kernel": to_value(&d.p_kernel),
                    }),
                    table: None,
                })
            }
            Step::SequenceLimitOperator { matrix, indices, tol } => {
                let r = sequence_limit_operator(matrix, indices, *tol)?;
                Ok(StepOutput { value: to_value(&r), table: None })
            }
            Step::USplit { matrix, schemes, tol } => {
                let d = crate::mixing::u_split(matrix, schemes, *tol)?;
                Ok(StepOutput {
                    value: json!({
                        "image_rank": d.image_rank(),
                        "kernel_rank": d.kernel_rank(),
                        "invariant_defect": d.invariant_defect(),
                        "p_kernel": to_value(&d.p_kernel),
                    }),
                    table: None,
                })
            }
            Step::SchemeEquivalence { models, tol, max_dim, .. } => scheme_equivalence_suite(*models, *tol, *max_dim, seed),
            Step::FiniteDisjointness { max_n, max_size, witness_size } => {
                finite_disjointness(*max_n, *max_size, *witness_size)
            }
            Step::JoiningPolytope { x, y } => {
                let p = joining_polytope(x, y)?;
                Ok(StepOutput { value: to_value(&p), table: None })
            }
            Step::ExtremeJoinings { x, y } => {
                let e = extreme_joinings(x, y)?;
                let product = product_coupling(x, y);
                Ok(StepOutput {
                    value: json!({
                        "count": e.vertices.len(),
                        "partial": e.partial,
                        "product_is_vertex": e.vertices.contains(&product),
                        "vertices": e.vertices.iter().map(coupling_to_strings).collect::<Vec<_>>(),
                    }),
                    table: None,
                })
            }
            Step::RigidMixingSurvey { max_size } => {
                let s = rigid_mixing_disjointness_survey(*max_size)?;
                let mut value = to_value(&s);
                value["violation_count"] = json!(s.violations.len());
                Ok(StepOutput { value, table: None })
            }
            Step::FiniteExtension { points, max_fibres, .. } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut t = Table::new(&["fibres", "alpha", "largest_fibre", "bound", "image_rank", "holds"]);
                let mut failures = 0usize;
                for fibres in 1..=(*max_fibres).min(*points) {
                    let r = finite_extension_check(&FiberModel::random(*points, fibres, &mut rng))?;
                    failures += usize::from(!r.holds);
                    t.push(vec![
                        fibres.to_string(),
                        r.alpha.to_string(),
                        r.largest_fibre.to_string(),
                        r.bound.to_string(),
                        r.image_rank.to_string(),
                        r.holds.to_string(),
                    ]);
                }
                Ok(StepOutput { value: json!({ "failures": failures }), table: Some(t) })
            }
        }
    }
}

fn vdc_conclusion_cases(count: usize, tol: f64, seed: u64) -> crate::Result<StepOutput> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = BTreeMap::new();
    let mut t = Table::new(&["case", "double_limit", "single_limit", "bound", "verdict"]);
    let mut record = |name: &str, c: crate::limits::VdcConclusion| {
        t.push(vec![
            name.to_string(),
            c.double_limit.value.unwrap_or_default().norm().to_string(),
            c.single_limit.value.unwrap_or_default().norm().to_string(),
            c.bound.to_string(),
            c.verdict.map_or("none".into(), |v| v.to_string()),
        ]);
        cases.insert(name.to_string(), to_value(&c));
    };

    // Shift model: x_n = Wⁿf with f supported on the shift part.
    let model = ShiftUnitaryModel::random(3, 7, &mut rng);
    let width = 4usize;
    let f = model.random_vector(true, width, &mut rng);
    let y = model.random_vector(false, 3 * width, &mut rng);
    let indices: Vec<i64> = (1..=count as i64).map(|k| k * (width as i64 + 1)).collect();
    let gram: Vec<Vec<Complex64>> =
        indices.iter().map(|&r| indices.iter().map(|&s| model.pairing(r - s, &f, &f)).collect()).collect();
    let pairings: BTreeMap<i64, Complex64> = indices.iter().map(|&n| (n, model.pairing(n, &f, &y).conj())).collect();
    let scheme = LimitScheme::subsequence(indices.clone());
    record("mixing_model", vdc_conclusion_check(&PairTable { indices: indices.clone(), gram }, &scheme, &pairings, tol)?);

    // Constant sequence.
    let e = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let xs = vec![e.clone(); count];
    let pairings = indices.iter().map(|&n| (n, Complex64::new(1.0, 0.0))).collect();
    record("constant", vdc_conclusion_check(&PairTable::from_vectors(indices.clone(), &xs), &scheme, &pairings, tol)?);

    // Unit vectors with slowly decaying correlations (tol/2)(1 + |r − t|)^{-1/2},
    // so the hypothesis holds, and y along the window average (the worst case).
    let gram = nalgebra::DMatrix::from_fn(count, count, |r, s| {
        let v = if r == s { 1.0 } else { 0.5 * tol / (1.0 + (r as f64 - s as f64).abs()).sqrt() };
        Complex64::new(v, 0.0)
    });
    let xs = vectors_with_gram(&gram)?;
    let start = crate::operator::final_quarter_start(count);
    let dim = xs[0].len();
    let mut avg = vec![Complex64::new(0.0, 0.0); dim];
    for x in &xs[start..] {
        avg.iter_mut().zip(x).for_each(|(a, b)| *a += b);
    }
    let norm = avg.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    avg.iter_mut().for_each(|z| *z /= norm);
    let pairings = indices
        .iter()
        .zip(&xs)
        .map(|(&n, x)| (n, avg.iter().zip(x).map(|(a, b)| a * b.conj()).sum()))
        .collect();
    record("slow_decay", vdc_conclusion_check(&PairTable::from_vectors(indices.clone(), &xs), &scheme, &pairings, tol)?);

    let all_true = cases.values().all(|c| c["verdict"] == json!(true));
    Ok(StepOutput { value: json!({ "cases": cases, "all_hold": all_true }), table: Some(t) })
}

fn image_kernel_lemma(trials: usize, max_dim: usize, tol: f64, seed: u64) -> crate::Result<StepOutput> {
    if max_dim == 0 {
        return Err(Error::Input("max_dim must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Table::new(&["trial", "dim", "kernel_rank", "found_kernel_rank", "defect", "powers_ok", "projection_ok"]);
    let (mut worst, mut failures) = (0f64, 0usize);
    for k in 0..trials {
        let dim = rng.random_range(1..=max_dim);
        let kernel = rng.random_range(0..=dim);
        let q = random_unitary(dim, &mut rng);
        let spectrum: Vec<Complex64> = (0..dim)
            .map(|i| {
                if i < kernel {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::from_polar(rng.random_range(0.5..2.0), std::f64::consts::TAU * rng.random::<f64>())
                }
            })
            .collect();
        let v = normal_with_spectrum(&q, &spectrum);
        let d = image_kernel_decomposition(&v, 1e-8)?;
        let defect = d.invariant_defect();
        worst = worst.max(defect);
        let mut powers_ok = true;
        for n in [2, 3, 5] {
            powers_ok &= kernel_power_invariance(&v, n, 1e-8)?;
        }
        let bits: Vec<Complex64> =
            (0..dim).map(|_| Complex64::new(if rng.random::<bool>() { 1.0 } else { 0.0 }, 0.0)).collect();
        let projector = normal_with_spectrum(&q, &bits);
        let projection_ok = assert_projection_from_idempotent_contraction(&projector, tol)?;
        let ok = defect <= tol && d.kernel_rank() == kernel && powers_ok && projection_ok;
        failures += usize::from(!ok);
        t.push(vec![
            k.to_string(),
            dim.to_string(),
            kernel.to_string(),
            d.kernel_rank().to_string(),
            defect.to_string(),
            powers_ok.to_string(),
            projection_ok.to_string(),
        ]);
    }
    Ok(StepOutput { value: json!({ "trials": trials, "failures": failures, "max_defect": worst }), table: Some(t) })
}

fn scheme_equivalence_suite(models: usize, tol: f64, max_dim: usize, seed: u64) -> crate::Result<StepOutput> {
    if max_dim == 0 {
        return Err(Error::Input("max_dim must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Table::new(&["model", "q", "atomic_zero", "sequence", "sumset", "differences", "agrees"]);
    let mut failures = 0usize;
    let show = |v: Option<bool>| v.map_or("none".to_string(), |b| b.to_string());
    for k in 0..models {
        let dim = rng.random_range(1..=max_dim);
        let q = rng.random_range(2..=12u64);
        let model = ShiftUnitaryModel::random(dim, q, &mut rng);
        let atomic_zero = rng.random::<bool>();
        let f: ModelVector = model.random_vector(atomic_zero, 4, &mut rng);
        let indices = model.indices(rng.random_range(0..q), 16);
        let eq = scheme_equivalence(&model, &f, &indices, tol)?;
        let ok = eq.agrees() && eq.along_sequence == Some(atomic_zero);
        failures += usize::from(!ok);
        t.push(vec![
            k.to_string(),
            q.to_string(),
            atomic_zero.to_string(),
            show(eq.along_sequence),
            show(eq.along_sumset),
            show(eq.along_differences),
            ok.to_string(),
        ]);
    }
    Ok(StepOutput { value: json!({ "models": models, "failures": failures }), table: Some(t) })
}

fn finite_disjointness(max_n: usize, max_size: usize, witness_size: usize) -> crate::Result<StepOutput> {
    let mut t = Table::new(&["m", "n", "disjoint", "gcd"]);
    let mut cyclic_mismatches = 0usize;
    for m in 2..=max_n {
        for n in 2..=max_n {
            let d = is_disjoint(&FiniteSystem::cyclic(m)?, &FiniteSystem::cyclic(n)?)?;
            let g = num_integer::gcd(m, n);
            cyclic_mismatches += usize::from(d != (g == 1));
            t.push(vec![m.to_string(), n.to_string(), d.to_string(), g.to_string()]);
        }
    }
    let mut witness_failures = 0usize;
    let mut witnesses = 0usize;
    let small: Vec<FiniteSystem> = (1..=witness_size).flat_map(systems_of_size).collect();
    for x in small.iter().filter(|s| !s.is_ergodic()) {
        for y in small.iter().filter(|s| !s.is_ergodic()) {
            witnesses += 1;
            match non_ergodic_witness(x, y)? {
                Some((_, c)) if is_joining(&c, x, y) && c != product_coupling(x, y) => {}
                _ => witness_failures += 1,
            }
        }
    }
    let mut component_mismatches = 0usize;
    let mut component_pairs = 0usize;
    let all: Vec<FiniteSystem> = (1..=max_size).flat_map(systems_of_size).collect();
    for m in 1..=max_size {
        let x = FiniteSystem::cyclic(m)?;
        for y in &all {
            component_pairs += 1;
            let whole = is_disjoint(&x, y)?;
            let mut parts = true;
            for cycle in y.cycles() {
                parts &= is_disjoint(&x, &y.component(&cycle)?)?;
            }
            component_mismatches += usize::from(whole != parts);
        }
    }
    Ok(StepOutput {
        value: json!({
            "cyclic_mismatches": cyclic_mismatches,
            "witness_pairs": witnesses,
            "witness_failures": witness_failures,
            "component_pairs": component_pairs,
            "component_mismatches": component_mismatches,
        }),
        table: Some(t),
    })
}

/// Per-step record in the summary.
#[derive(Serialize, Debug, Clone)]
pub struct StepRecord {
    pub index: usize,
    pub op: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub passed: bool,
    pub failures: Vec<String>,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
}

#[derive(Serialize, Debug, Clone)]
pub struct RunSummary {
    pub scenario: String,
    pub seed: u64,
    pub passed: bool,
    pub steps: Vec<StepRecord>,
    pub outputs: Vec<String>,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// Parses a scenario, reporting line and column on failure.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    serde_json::from_str(text).map_err(|e| {
        let at = format!(" at line {} column {}", e.line(), e.column());
        let msg = e.to_string();
        let msg = msg.strip_suffix(&at).unwrap_or(&msg);
        ScenarioError::Parse(format!("line {} column {}: {msg}", e.line(), e.column()))
    })
}

fn step_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add((index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(ScenarioError::Invalid(format!("bad scenario name `{}`", self.name)));
        }
        for (i, s) in self.steps.iter().enumerate() {
            s.step
                .validate()
                .map_err(|e| ScenarioError::Invalid(format!("step {i} ({}): {e}", s.step.name())))?;
        }
        Ok(())
    }

    /// Runs every step in order. With `out`, writes `<name>.json` and the
    /// per-step CSV files there; an empty scenario writes nothing.
    pub fn run(&self, seed: Option<u64>, out: Option<&Path>) -> Result<RunSummary, ScenarioError> {
        self.validate()?;
        let seed = seed.unwrap_or(self.seed);
        if let Some(dir) = out.filter(|_| !self.steps.is_empty()) {
            fs::create_dir_all(dir).map_err(|e| ScenarioError::Io(format!("{}: {e}", dir.display())))?;
        }
        let mut records = Vec::new();
        let mut outputs = Vec::new();
        for (index, spec) in self.steps.iter().enumerate() {
            let op = spec.step.name();
            let own_seed = match &spec.step {
                Step::VdcInequality { seed, .. }
                | Step::VdcConclusion { seed, .. }
                | Step::ImageKernelLemma { seed, .. }
                | Step::SchemeEquivalence { seed, .. }
                | Step::FiniteExtension { seed, .. } => *seed,
                _ => None,
            };
            let mut record = StepRecord {
                index,
                op: op.to_string(),
                label: spec.label.clone(),
                passed: true,
                failures: Vec::new(),
                result: Value::Null,
                csv: None,
            };
            match spec.step.run(own_seed.unwrap_or_else(|| step_seed(seed, index))) {
                Ok(output) => {
                    record.failures = spec.expect.iter().filter_map(|e| e.check(&output.value)).collect();
                    record.passed = record.failures.is_empty();
                    record.result = output.value;
                    if let (Some(dir), Some(table)) = (out, output.table) {
                        let file = format!("{}-{index:02}-{op}.csv", self.name);
                        table.write(&dir.join(&file))?;
                        record.csv = Some(file.clone());
                        outputs.push(file);
                    }
                }
                Err(e @ (Error::Input(_) | Error::Capability(_) | Error::Precondition(_) | Error::MissingLags(_))) => {
                    return Err(ScenarioError::Invalid(format!("step {index} ({op}): {e}")));
                }
                Err(e) => {
                    record.passed = false;
                    record.failures.push(e.to_string());
                }
            }
            records.push(record);
        }
        let mut summary = RunSummary {
            scenario: self.name.clone(),
            seed,
            passed: records.iter().all(|r| r.passed),
            steps: records,
            outputs,
        };
        if let Some(dir) = out.filter(|_| !self.steps.is_empty()) {
            let file = format!("{}.json", self.name);
            summary.outputs.push(file.clone());
            let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
            fs::write(dir.join(&file), text + "\n").map_err(|e| ScenarioError::Io(format!("{file}: {e}")))?;
        }
        Ok(summary)
    }
}

/// Builtin scenario names with their JSON sources.
const BUILTINS: &[(&str, &str)] = &[
    ("cantor-example-4.4", include_str!("../scenarios/cantor-example-4.4.json")),
    ("skew-torus-example-4.5", include_str!("../scenarios/skew-torus-example-4.5.json")),
    ("chacon-example-4.2", include_str!("../scenarios/chacon-example-4.2.json")),
    ("rudin-shapiro-example-4.3", include_str!("../scenarios/rudin-shapiro-example-4.3.json")),
    ("vdc-lemma-7.1", include_str!("../scenarios/vdc-lemma-7.1.json")),
    ("image-kernel-lemma", include_str!("../scenarios/image-kernel-lemma.json")),
    ("finite-disjointness", include_str!("../scenarios/finite-disjointness.json")),
    ("rigidity-profiles", include_str!("../scenarios/rigidity-profiles.json")),
    ("scheme-equivalence", include_str!("../scenarios/scheme-equivalence.json")),
    ("spectral-suite", include_str!("../scenarios/spectral-suite.json")),
];

pub fn list_builtin_scenarios() -> Vec<&'static str> {
    BUILTINS.iter().map(|(n, _)| *n).collect()
}

pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn builtin(name: &str) -> Option<Scenario> {
    builtin_source(name).map(|s| parse_scenario(s).expect("builtin scenarios parse"))
}

/// Loads a builtin by name, or else a scenario file.
pub fn load(name_or_path: &str) -> Result<Scenario, ScenarioError> {
    if let Some(s) = builtin(name_or_path) {
        return Ok(s);
    }
    let path = PathBuf::from(name_or_path);
    let text = fs::read_to_string(&path).map_err(|e| ScenarioError::Parse(format!("{}: {e}", path.display())))?;
    parse_scenario(&text).map_err(|e| match e {
        ScenarioError::Parse(msg) => ScenarioError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}
