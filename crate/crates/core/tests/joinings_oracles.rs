mod common;

use common::brute_force_dimension;
use ergolab::joinings::{
    extreme_joinings, is_disjoint, is_ergodic_coupling, is_joining, joining_polytope, markov_from_joining,
    non_ergodic_witness, product_coupling, rational, Coupling, FiniteSystem, Rational,
};
use ergolab::mixing::systems_of_size;
use num_integer::gcd;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

#[test]
fn cyclic_disjointness_matches_gcd_and_brute_force() {
    for m in 2..=8 {
        for n in 2..=8 {
            let (x, y) = (FiniteSystem::cyclic(m).unwrap(), FiniteSystem::cyclic(n).unwrap());
            let poly = joining_polytope(&x, &y).unwrap();
            assert_eq!(poly.dimension, brute_force_dimension(&x, &y), "{m} {n}");
            assert_eq!(poly.dimension, gcd(m, n) - 1);
            assert_eq!(is_disjoint(&x, &y).unwrap(), gcd(m, n) == 1);
        }
    }
}

#[test]
fn polytope_dimension_matches_brute_force_on_all_cycle_types() {
    for a in 1..=5 {
        for b in 1..=5 {
            for x in systems_of_size(a) {
                for y in systems_of_size(b) {
                    assert_eq!(joining_polytope(&x, &y).unwrap().dimension, brute_force_dimension(&x, &y));
                }
            }
        }
    }
}

#[test]
fn one_point_factor_is_disjoint_from_everything() {
    for n in 1..=8 {
        assert!(is_disjoint(&FiniteSystem::cyclic(n).unwrap(), &FiniteSystem::one_point()).unwrap());
    }
}

#[test]
fn ergodic_systems_are_not_disjoint_from_themselves() {
    for n in 2..=8 {
        let x = FiniteSystem::cyclic(n).unwrap();
        assert!(!is_disjoint(&x, &x).unwrap());
    }
}

#[test]
fn disjointness_from_an_ergodic_system_is_decided_componentwise() {
    for n in 1..=8 {
        let x = FiniteSystem::cyclic(n).unwrap();
        for m in 1..=8 {
            for y in systems_of_size(m) {
                let whole = is_disjoint(&x, &y).unwrap();
                let parts = y.cycles().iter().all(|c| is_disjoint(&x, &y.component(c).unwrap()).unwrap());
                assert_eq!(whole, parts, "cyclic({n}) vs {:?}", y.map);
            }
        }
    }
    // Non-uniform weights on the cycles do not change the answer.
    let y = FiniteSystem::from_cycles(&[3, 5], &[rational(1, 7), rational(6, 7)]).unwrap();
    let x = FiniteSystem::cyclic(4).unwrap();
    assert!(is_disjoint(&x, &y).unwrap());
    let x = FiniteSystem::cyclic(6).unwrap();
    assert!(!is_disjoint(&x, &y).unwrap());
}

fn non_ergodic_systems(max: usize) -> Vec<FiniteSystem> {
    (2..=max).flat_map(systems_of_size).filter(|s| !s.is_ergodic()).collect()
}

#[test]
fn split_joining_witnesses_non_disjointness_of_non_ergodic_pairs() {
    let systems = non_ergodic_systems(6);
    for x in &systems {
        for y in &systems {
            let (t, lambda) = non_ergodic_witness(x, y).unwrap().expect("both are non-ergodic");
            assert!(is_joining(&lambda, x, y));
            assert_ne!(lambda, product_coupling(x, y));
            assert!(t > Rational::zero());
            assert!(!is_disjoint(x, y).unwrap());
            let markov = markov_from_joining(&lambda, x, y).unwrap();
            for row in &markov {
                assert_eq!(row.iter().cloned().sum::<Rational>(), rational(1, 1));
            }
        }
    }
    assert!(non_ergodic_witness(&FiniteSystem::cyclic(3).unwrap(), &systems[0]).unwrap().is_none());
}

#[test]
fn markov_operators_of_product_and_diagonal() {
    let x = FiniteSystem::from_cycles(&[2, 1], &[rational(2, 3), rational(1, 3)]).unwrap();
    let p = product_coupling(&x, &x);
    let m = markov_from_joining(&p, &x, &x).unwrap();
    for row in &m {
        assert_eq!(row, &x.measure);
    }
    let n = 5;
    let c = FiniteSystem::cyclic(n).unwrap();
    let diag: Coupling =
        (0..n).map(|i| (0..n).map(|j| if i == j { rational(1, n as i64) } else { Rational::zero() }).collect()).collect();
    let m = markov_from_joining(&diag, &c, &c).unwrap();
    for (j, row) in m.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            assert_eq!(*v, rational(i64::from(i == j), 1));
        }
    }
}

#[test]
fn extreme_joinings_of_small_cycles() {
    let c2 = FiniteSystem::cyclic(2).unwrap();
    let c4 = FiniteSystem::cyclic(4).unwrap();
    let ext = extreme_joinings(&c4, &c2).unwrap();
    assert!(!ext.partial);
    // Graph couplings of the factor maps i ↦ i + s mod 2.
    let graphs: Vec<Coupling> = (0..2)
        .map(|s| {
            (0..4)
                .map(|i| (0..2).map(|j| if (i + s) % 2 == j { rational(1, 4) } else { Rational::zero() }).collect())
                .collect()
        })
        .collect();
    assert_eq!(ext.vertices.len(), graphs.len());
    for g in &graphs {
        assert!(ext.vertices.contains(g));
    }
    for v in &ext.vertices {
        assert!(is_ergodic_coupling(v, &c4, &c2));
    }
    let c3 = FiniteSystem::cyclic(3).unwrap();
    let ext = extreme_joinings(&c2, &c3).unwrap();
    assert_eq!(ext.vertices, vec![product_coupling(&c2, &c3)]);
}

#[test]
fn rejects_non_invariant_measures() {
    assert!(FiniteSystem::new(vec![1, 0], vec![rational(1, 3), rational(2, 3)]).is_err());
    assert!(FiniteSystem::new(vec![0, 1], vec![rational(1, 2), rational(1, 3)]).is_err());
    assert!(FiniteSystem::new(vec![0, 0], vec![rational(1, 2), rational(1, 2)]).is_err());
}

fn weighted_system() -> impl Strategy<Value = FiniteSystem> {
    prop::collection::vec((1usize..=3, 1i64..=5), 1..=3).prop_map(|cycles| {
        let total: i64 = cycles.iter().map(|c| c.1).sum();
        let lengths: Vec<usize> = cycles.iter().map(|c| c.0).collect();
        let weights: Vec<Rational> = cycles.iter().map(|c| rational(c.1, total)).collect();
        FiniteSystem::from_cycles(&lengths, &weights).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polytope_couplings_are_exact_joinings(x in weighted_system(), y in weighted_system()) {
        let poly = joining_polytope(&x, &y).unwrap();
        prop_assert_eq!(poly.basis.len(), poly.dimension + 1);
        for c in &poly.basis {
            prop_assert!(is_joining(c, &x, &y));
        }
        prop_assert!(is_joining(&poly.product, &x, &y));
        let ext = extreme_joinings(&x, &y).unwrap();
        prop_assert!(!ext.partial);
        for v in &ext.vertices {
            prop_assert!(is_joining(v, &x, &y));
            if x.is_ergodic() && y.is_ergodic() {
                prop_assert!(is_ergodic_coupling(v, &x, &y));
            }
        }
        prop_assert_eq!(ext.vertices.len() == 1, poly.dimension == 0);
    }

    #[test]
    fn markov_operators_are_stochastic_and_intertwining(x in weighted_system(), y in weighted_system()) {
        let poly = joining_polytope(&x, &y).unwrap();
        for c in &poly.basis {
            let m = markov_from_joining(c, &x, &y).unwrap();
            for row in &m {
                prop_assert_eq!(row.iter().cloned().sum::<Rational>(), rational(1, 1));
                prop_assert!(row.iter().all(|v| v.to_f64().unwrap() >= 0.0));
            }
        }
    }
}
