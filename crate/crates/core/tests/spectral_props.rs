mod common;

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use common::*;
use ergolab::spectral::{convolve_coefficients, extract_atoms, fejer_estimate, rajchman_report, wiener_atom_mass};
use ergolab::systems::cantor::cantor_fourier;
use ergolab::systems::{correlation, rotation_phase, BaseMeasure, CorrelationSequence, Observable, Quality, System};
use ergolab::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn atomic_sequence(atoms: &[(f64, f64)], l: i64) -> CorrelationSequence {
    CorrelationSequence::from_fn(-l..=l, true, |n| {
        atoms.iter().map(|&(theta, w)| Complex64::from_polar(w, TAU * (theta * n as f64).rem_euclid(1.0))).sum()
    })
}

fn builtin_inputs() -> Vec<(String, CorrelationSequence)> {
    let l = 256;
    let lags: Vec<i64> = (-l..=l).collect();
    let q = Quality::empirical(1_000_000);
    let cases = vec![
        (System::rotation(2f64.sqrt() - 1.0).unwrap(), Observable::character(&[1]), Quality::Exact),
        (System::rotation(2f64.sqrt() - 1.0).unwrap(), Observable::interval(0.0, 0.5).centered(), q),
        (System::skew_torus(BaseMeasure::cantor4()).unwrap(), Observable::character(&[1, 1]), Quality::Exact),
        (System::skew_torus(BaseMeasure::cantor4()).unwrap(), Observable::character(&[0, 1]), Quality::Exact),
        (System::skew_torus(BaseMeasure::Lebesgue).unwrap(), Observable::character(&[1, 1]), Quality::Exact),
        (System::chacon(), Observable::cylinder("0", 0).centered(), q),
        (System::chacon(), Observable::cylinder("00", 0), q),
        (System::rudin_shapiro(), Observable::cylinder("+", 0).centered(), q),
        (System::rudin_shapiro(), Observable::cylinder_union(&["++", "--"], 0), q),
        (System::iet(&[0.3, 0.2, 0.5], &[2, 1, 0]).unwrap(), Observable::interval(0.1, 0.35).centered(), q),
        (System::bernoulli(&[0.5, 0.5], 1).unwrap(), Observable::cylinder("0", 0).centered(), q),
    ];
    let mut out: Vec<(String, CorrelationSequence)> = cases
        .into_iter()
        .map(|(sys, f, q)| (format!("{} {}", sys.name, f.name), correlation(&sys, &f, &f, &lags, q).unwrap()))
        .collect();
    out.push(("cantor".into(), CorrelationSequence::from_fn(-l..=l, true, |n| cantor_fourier(n, 40))));
    out
}

#[test]
fn fejer_estimates_are_nonnegative_and_conserve_mass() {
    for (name, c) in builtin_inputs() {
        let est = fejer_estimate(&c, 4096).unwrap();
        let mass = c.mass.re;
        assert!(est.min_density() >= -1e-9 * mass.max(1e-300), "{name}: {}", est.min_density());
        assert!((est.total_mass - mass).abs() <= 1e-9, "{name}");
        assert!((est.accounted_mass() - mass).abs() <= 1e-9, "{name}: {}", est.accounted_mass());
        let with_atoms = extract_atoms(est);
        assert!((with_atoms.accounted_mass() - mass).abs() <= 1e-6, "{name}");
    }
}

#[test]
fn rotation_eigenfunction_is_a_single_atom_at_alpha() {
    let alpha = 2f64.sqrt() - 1.0;
    let c = CorrelationSequence::from_fn(-512..=512, true, |n| rotation_phase(n, alpha));
    let est = fejer_estimate(&c, 8192).unwrap();
    assert!((est.argmax() - alpha).abs() <= 1.0 / 8192.0, "{} {alpha}", est.argmax());
    let est = extract_atoms(est);
    let biggest = est.atoms.iter().max_by(|a, b| a.mass.total_cmp(&b.mass)).unwrap();
    assert!((biggest.location - alpha).abs() <= 1.0 / 8192.0);
    // The ±2/L window holds all but about 1/π² of a Fejér peak.
    assert!(biggest.mass >= 0.85, "{}", biggest.mass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wiener_mass_matches_constructed_atoms(seed in any::<u64>(), k in 1usize..=5) {
        let mut r = rng(seed);
        // Atoms at least 0.05 apart.
        let mut thetas: Vec<f64> = Vec::new();
        while thetas.len() < k {
            let t: f64 = r.random();
            if thetas.iter().all(|s| ((s - t + 0.5).rem_euclid(1.0) - 0.5).abs() >= 0.05) {
                thetas.push(t);
            }
        }
        let raw: Vec<f64> = (0..k).map(|_| r.random_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let atoms: Vec<(f64, f64)> = thetas.iter().zip(&raw).map(|(&t, &w)| (t, w / total)).collect();
        let c = atomic_sequence(&atoms, 4096);
        let expected: f64 = atoms.iter().map(|(_, w)| w * w).sum();
        let got = wiener_atom_mass(&c, 4096).unwrap();
        prop_assert!((got - expected).abs() <= 0.02 * expected, "{got} vs {expected}");
    }

    #[test]
    fn convolution_is_exact_commutative_and_associative(seed in any::<u64>()) {
        // Dyadic entries with few bits multiply without rounding.
        let mut r = rng(seed);
        let mut dyadic = || c(r.random_range(-8i32..=8) as f64 / 8.0, r.random_range(-8i32..=8) as f64 / 8.0);
        let mut make = |_: usize| {
            let values: BTreeMap<i64, Complex64> = (-16..=16).map(|n| (n, dyadic())).collect();
            CorrelationSequence::from_values(values, false).unwrap()
        };
        let (a, b, cc) = (make(0), make(1), make(2));
        let ab = convolve_coefficients(&a, &b).unwrap();
        let ba = convolve_coefficients(&b, &a).unwrap();
        prop_assert_eq!(&ab.values, &ba.values);
        let left = convolve_coefficients(&ab, &cc).unwrap();
        let right = convolve_coefficients(&a, &convolve_coefficients(&b, &cc).unwrap()).unwrap();
        prop_assert_eq!(&left.values, &right.values);
        for n in -16..=16 {
            prop_assert_eq!(ab.values[&n], a.values[&n] * b.values[&n]);
        }
    }
}

#[test]
fn convolution_needs_matching_lags() {
    let a = CorrelationSequence::from_fn(-2..=2, true, |_| c(1.0, 0.0));
    let b = CorrelationSequence::from_fn(-3..=3, true, |_| c(1.0, 0.0));
    assert!(convolve_coefficients(&a, &b).is_err());
}

/// Mass of `[a, b)` under the estimate, by summing grid cells.
fn estimate_mass(density: &[f64], a: f64, b: f64) -> f64 {
    let m = density.len();
    (0..m).filter(|&j| (a..b).contains(&(j as f64 / m as f64))).map(|j| density[j] / m as f64).sum()
}

#[test]
fn cantor_fejer_estimate_matches_sampling_histogram() {
    let l = 4096;
    let c = CorrelationSequence::from_fn(-l..=l, true, |n| cantor_fourier(n, 40));
    let est = fejer_estimate(&c, 4 * l as usize).unwrap();
    // c(n) = ∫ e^{−2πinx} dμ, while the estimate reads c(n) = ∫ e^{2πinθ} dσ, so θ = −x.
    let mut r = rng(99);
    let samples: Vec<f64> = (0..400_000)
        .map(|_| {
            let mut x = 0.0f64;
            let mut s = 0.25;
            for _ in 0..30 {
                if r.random::<bool>() {
                    x += s;
                }
                s *= 0.25;
            }
            (1.0 - x).rem_euclid(1.0)
        })
        .collect();
    // Endpoints sit in gaps of the reflected Cantor set.
    for (a, b) in [(0.5, 0.83), (0.83, 0.96), (0.5, 0.96), (0.96, 0.99)] {
        let hist = samples.iter().filter(|&&t| (a..b).contains(&t)).count() as f64 / samples.len() as f64;
        let fejer = estimate_mass(&est.density, a, b);
        assert!((hist - fejer).abs() <= 0.02, "[{a}, {b}): histogram {hist}, estimate {fejer}");
    }
}

#[test]
fn rajchman_tables() {
    let decay = CorrelationSequence::from_fn(0..=1000, true, |n| c(1.0 / (1.0 + n as f64), 0.0));
    let t = rajchman_report(&decay, &[0.1, 0.01]).unwrap();
    assert_eq!(t.rows[0].attained_at, Some(9));
    assert_eq!(t.rows[1].attained_at, Some(99));

    let eigen = CorrelationSequence::from_fn(0..=1000, true, |n| rotation_phase(n, 0.3));
    assert!(rajchman_report(&eigen, &[0.5]).unwrap().rows[0].attained_at.is_none());

    let lags: Vec<i64> = (0..=4i64.pow(10)).step_by(4).collect();
    let cantor = CorrelationSequence::from_fn(lags, true, |n| cantor_fourier(n, 40));
    assert!(cantor_fourier(1, 40).norm() > 0.1);
    assert!(rajchman_report(&cantor, &[0.1]).unwrap().rows[0].attained_at.is_none());
}
