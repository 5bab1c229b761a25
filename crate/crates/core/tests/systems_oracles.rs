mod common;

use std::f64::consts::TAU;

use common::*;
use ergolab::systems::cantor::{cantor_fourier, first_nonzero_digit_is_two};
use ergolab::systems::chacon::{chacon_heights, chacon_word};
use ergolab::systems::iet::{iet_apply, translations};
use ergolab::systems::rudin_shapiro::rudin_shapiro_sequence;
use ergolab::systems::{correlation, BaseMeasure, Observable, Quality, System};
use ergolab::{Complex64, Error};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

/// Atoms of the Cantor measure truncated at `digits` base-4 digits in {0, 1}.
fn cantor_points(digits: u32) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut scale = 0.25;
    for _ in 0..digits {
        pts = pts.iter().flat_map(|&x| [x, x + scale]).collect();
        scale *= 0.25;
    }
    pts
}

/// `∫ e^{−2πimx} dσ` as a plain average over the atoms.
fn atom_average(points: &[f64], m: i64) -> Complex64 {
    let sum: Complex64 = points.iter().map(|&x| Complex64::from_polar(1.0, -TAU * (m as f64 * x).rem_euclid(1.0))).sum();
    sum / points.len() as f64
}

#[test]
fn cantor_transform_matches_brute_force_digit_sum() {
    let pts = cantor_points(20);
    for m in [1i64, 3, 5, 7, 17, 63, -9] {
        let brute = atom_average(&pts, m);
        let value = cantor_fourier(m, 40);
        assert!((brute - value).norm() <= 1e-9, "m = {m}: {brute} vs {value}");
    }
}

#[test]
fn cantor_zeros_follow_the_digit_rule() {
    for n in -4096i64..=4096 {
        let zero = cantor_fourier(n, 40) == Complex64::new(0.0, 0.0);
        assert_eq!(zero, first_nonzero_digit_is_two(n), "n = {n}");
        let digit_two = {
            let mut m = n.unsigned_abs();
            while m != 0 && m % 4 == 0 {
                m /= 4;
            }
            m % 4 == 2
        };
        assert_eq!(zero, digit_two, "n = {n}");
    }
}

#[test]
fn cantor_scaling_identities() {
    for n in -4096i64..=4096 {
        assert!((cantor_fourier(4 * n, 40) - cantor_fourier(n, 40)).norm() <= 1e-8, "n = {n}");
        // The first factor of the product at 4n is 1, so one level of truncation is consumed.
        for k in [9u32, 20, 30] {
            assert!((cantor_fourier(4 * n, k) - cantor_fourier(n, k - 1)).norm() <= 1e-12);
        }
        assert!((cantor_fourier(-n, 40) - cantor_fourier(n, 40).conj()).norm() == 0.0);
    }
}

#[test]
fn skew_torus_exact_formula_matches_quadrature() {
    let pts = cantor_points(14);
    let sys = System::skew_torus(BaseMeasure::cantor4()).unwrap();
    let mut r = rng(11);
    for _ in 0..200 {
        let (a, b, cc, d) = (r.random_range(-3..=3), r.random_range(-3..=3), r.random_range(-3..=3), r.random_range(-3..=3));
        let n: i64 = r.random_range(-1000..=1000);
        let f = Observable::character(&[d, cc]);
        let g = Observable::character(&[a, b]);
        let exact = correlation(&sys, &f, &g, &[n], Quality::Exact).unwrap().values[&n];
        // ∫∫ e(dx + c(y + nx)) conj e(ax + by) = [c = b] ∫ e((d + cn − a)x) dσ.
        let quad = if cc == b { atom_average(&pts, a - d - cc * n) } else { c(0.0, 0.0) };
        assert!((exact - quad).norm() <= 1e-3, "({a},{b},{cc},{d}) n={n}: {exact} vs {quad}");
    }
}

#[test]
fn skew_torus_monte_carlo_agrees_with_exact() {
    let sys = System::skew_torus(BaseMeasure::cantor4()).unwrap();
    let f = Observable::character(&[0, 1]);
    let g = Observable::character(&[1, 1]);
    let lags = [1, 4, 16];
    let exact = correlation(&sys, &f, &g, &lags, Quality::Exact).unwrap();
    let mc = correlation(&sys, &f, &g, &lags, Quality::empirical(200_000)).unwrap();
    for n in lags {
        assert!((exact.values[&n] - mc.values[&n]).norm() <= 5.0 * mc.stderr_at(n) + 1e-3);
    }
}

fn substitute(word: &[u8]) -> Vec<u8> {
    word.iter()
        .flat_map(|&s| if s == b'0' { b"0010".to_vec() } else { vec![b'1'] })
        .collect()
}

#[test]
fn chacon_word_is_the_substitution_fixed_point() {
    let mut w = b"0".to_vec();
    let mut lengths = vec![1u64];
    for _ in 0..8 {
        w = substitute(&w);
        lengths.push(w.len() as u64);
    }
    assert_eq!(chacon_word(w.len()), w);
    assert_eq!(chacon_heights(9).unwrap(), lengths);
    assert!(chacon_heights(0).is_err());
}

#[test]
fn chacon_cylinder_frequencies() {
    let sys = System::chacon();
    let q = Quality::empirical(1_000_000);
    let m0 = sys.mean(&Observable::cylinder("0", 0), q).unwrap().re;
    let m000 = sys.mean(&Observable::cylinder("000", 0), q).unwrap().re;
    let m01 = sys.mean(&Observable::cylinder("01", 0), q).unwrap().re;
    let m010 = sys.mean(&Observable::cylinder("010", 0), q).unwrap().re;
    assert!((m0 - 2.0 / 3.0).abs() <= 1e-3);
    assert!((m000 - 1.0 / 9.0).abs() <= 1e-3);
    // Every 1 is preceded and followed by 0, so [01] = [010].
    assert!((m01 - m010).abs() <= 1e-9);
    assert!(sys.mean(&Observable::cylinder("11", 0), q).unwrap().re == 0.0);
}

#[test]
fn rudin_shapiro_matches_its_recursion() {
    let r = rudin_shapiro_sequence(1 << 12).unwrap();
    assert_eq!(r[0], 1);
    for n in 0..(1usize << 11) {
        assert_eq!(r[2 * n], r[n]);
        let sign = if n % 2 == 0 { 1 } else { -1 };
        assert_eq!(r[2 * n + 1], sign * r[n]);
    }
}

/// Brute-force interval exchange: locate the interval, then stack the
/// intervals in the order given by the permutation.
fn iet_oracle(lengths: &[f64], perm: &[usize], x: f64) -> f64 {
    let mut start = 0.0;
    for i in 0..lengths.len() {
        if x < start + lengths[i] || i + 1 == lengths.len() {
            let before: f64 = (0..lengths.len()).filter(|&j| perm[j] < perm[i]).map(|j| lengths[j]).sum();
            return before + (x - start);
        }
        start += lengths[i];
    }
    unreachable!()
}

fn lengths_and_perm() -> impl Strategy<Value = (Vec<f64>, Vec<usize>)> {
    (2usize..=6).prop_flat_map(|n| {
        (prop::collection::vec(0.05f64..1.0, n), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
    .prop_map(|(raw, perm)| {
        let total: f64 = raw.iter().sum();
        let mut lengths: Vec<f64> = raw.iter().map(|l| l / total).collect();
        let head: f64 = lengths[..lengths.len() - 1].iter().sum();
        *lengths.last_mut().unwrap() = 1.0 - head;
        (lengths, perm)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn iet_apply_matches_oracle((lengths, perm) in lengths_and_perm(), x in 0.0f64..1.0) {
        let y = iet_apply(&lengths, &perm, x).unwrap();
        prop_assert!((y - iet_oracle(&lengths, &perm, x)).abs() <= 1e-12);
        prop_assert!((0.0..1.0).contains(&y));
    }

    #[test]
    fn exact_correlations_are_hermitian_and_bounded(alpha in 0.01f64..0.99, k in -5i64..=5, n in 1i64..5000) {
        let sys = System::rotation(alpha).unwrap();
        let f = Observable::character(&[k]);
        let c = correlation(&sys, &f, &f, &[n, -n], Quality::Exact).unwrap();
        prop_assert!((c.values[&-n] - c.values[&n].conj()).norm() <= 1e-12);
        prop_assert!(c.values[&n].norm() <= c.mass.norm() + 1e-9);
    }
}

#[test]
fn iet_rejects_bad_input() {
    assert!(matches!(System::iet(&[0.5, 0.4], &[1, 0]), Err(Error::Input(_))));
    assert!(matches!(System::iet(&[0.5, 0.5], &[0, 0]), Err(Error::Input(_))));
}

fn toeplitz_min_eigenvalue(c: &ergolab::systems::CorrelationSequence, l: i64) -> f64 {
    let size = (l + 1) as usize;
    let m = DMatrix::from_fn(size, size, |i, j| c.values[&(i as i64 - j as i64)]);
    m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

fn test_cases() -> Vec<(System, Observable, Quality)> {
    let q = Quality::empirical(1_000_000);
    vec![
        (System::rotation(0.5f64.sqrt()).unwrap(), Observable::character(&[1]), Quality::Exact),
        (System::rotation(0.5f64.sqrt()).unwrap(), Observable::interval(0.1, 0.6), q),
        (System::skew_torus(BaseMeasure::cantor4()).unwrap(), Observable::character(&[1, 1]), Quality::Exact),
        (System::chacon(), Observable::cylinder("0", 0).centered(), q),
        (System::chacon(), Observable::cylinder("00", 0), q),
        (System::rudin_shapiro(), Observable::cylinder("+", 0), q),
        (System::iet(&[0.2, 0.3, 0.5], &[2, 0, 1]).unwrap(), Observable::interval(0.0, 0.4), q),
        (System::bernoulli(&[0.3, 0.7], 5).unwrap(), Observable::cylinder("01", 0), q),
    ]
}

#[test]
fn autocorrelations_are_positive_definite() {
    let l = 24;
    let lags: Vec<i64> = (-l..=l).collect();
    for (sys, f, q) in test_cases() {
        let c = correlation(&sys, &f, &f, &lags, q).unwrap();
        for n in 1..=l {
            assert_eq!(c.values[&-n], c.values[&n].conj(), "{} {}", sys.name, f.name);
            assert!(c.values[&n].norm() <= c.mass.norm() + 1e-9);
        }
        let min = toeplitz_min_eigenvalue(&c, l);
        assert!(min >= -1e-6 * c.mass.norm(), "{} {}: min eigenvalue {min}", sys.name, f.name);
    }
}

#[test]
fn empirical_measure_is_shift_invariant() {
    let q = Quality::empirical(1_000_000);
    let n = 1_000_000f64;
    let within = |a: f64, b: f64| {
        let p = a.clamp(1e-6, 1.0 - 1e-6);
        (a - b).abs() <= 3.0 * (p * (1.0 - p) / n).sqrt()
    };
    for (sys, word) in [(System::chacon(), "010"), (System::rudin_shapiro(), "+-"), (System::bernoulli(&[0.4, 0.6], 9).unwrap(), "10")] {
        let a = sys.mean(&Observable::cylinder(word, 0), q).unwrap().re;
        let b = sys.mean(&Observable::cylinder(word, 1), q).unwrap().re;
        assert!(within(a, b), "{}: {a} vs {b}", sys.name);
    }
    let alpha = 0.5f64.sqrt() - 0.5;
    let rot = System::rotation(alpha).unwrap();
    let a = rot.mean(&Observable::interval(0.4, 0.7), q).unwrap().re;
    let b = rot.mean(&Observable::interval(0.4 - alpha, 0.7 - alpha), q).unwrap().re;
    assert!(within(a, b));
    // IET: preimage of a subinterval of the image of interval 1 is a translate.
    let (lengths, perm) = ([0.2, 0.3, 0.5], [2, 0, 1]);
    let iet = System::iet(&lengths, &perm).unwrap();
    let t = translations(&lengths, &perm)[1];
    let a = iet.mean(&Observable::interval(0.25 + t, 0.45 + t), q).unwrap().re;
    let b = iet.mean(&Observable::interval(0.25, 0.45), q).unwrap().re;
    assert!(within(a, b), "iet: {a} vs {b}");
}

#[test]
fn exact_correlation_needs_characters() {
    let e = correlation(&System::chacon(), &Observable::cylinder("0", 0), &Observable::cylinder("0", 0), &[1], Quality::Exact);
    assert!(matches!(e, Err(Error::Capability(_))));
    let e = correlation(&System::rotation(0.3).unwrap(), &Observable::cylinder("0", 0), &Observable::cylinder("0", 0), &[1], Quality::empirical(20_000));
    assert!(e.is_err());
    let e = correlation(&System::chacon(), &Observable::cylinder("0", 0), &Observable::cylinder("0", 0), &[1], Quality::empirical(100));
    assert!(matches!(e, Err(Error::Input(_))));
}
