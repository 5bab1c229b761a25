//! Exact joining theory for finite systems: invariant couplings of two
//! permutations with invariant measures, disjointness, extreme couplings and
//! the Markov operators they induce. All arithmetic is rational.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{input, Error, Result};

/// Largest state space accepted by [`joining_polytope`].
pub const MAX_POLYTOPE_SIZE: usize = 64;

/// Largest state space accepted by [`extreme_joinings`].
pub const MAX_VERTEX_SIZE: usize = 10;

/// Candidate bases examined by [`extreme_joinings`] before giving up.
pub const VERTEX_BUDGET: usize = 200_000;

pub type Rational = BigRational;

/// Coupling matrix `λ(i, j)` with rows indexed by `x` and columns by `y`.
pub type Coupling = Vec<Vec<Rational>>;

pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Input(format!("`{s}` is not a fraction"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Serde adapter writing rationals as `"p/q"` strings.
mod fraction_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(fmt_rational).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect()
    }
}

/// Exact fraction strings of a coupling, for JSON export.
pub fn coupling_to_strings(c: &Coupling) -> Vec<Vec<String>> {
    c.iter().map(|row| row.iter().map(fmt_rational).collect()).collect()
}

/// A permutation of `{0..size}` with an invariant probability vector.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct FiniteSystem {
    pub map: Vec<usize>,
    #[serde(with = "fraction_vec")]
    pub measure: Vec<Rational>,
}

impl FiniteSystem {
    pub fn new(map: Vec<usize>, measure: Vec<Rational>) -> Result<Self> {
        let n = map.len();
        if n == 0 {
            return input("a finite system needs at least one state");
        }
        if measure.len() != n {
            return input(format!("measure has {} entries for {n} states", measure.len()));
        }
        let mut seen = vec![false; n];
        for &t in &map {
            if t >= n || std::mem::replace(&mut seen[t], true) {
                return input(format!("map {map:?} is not a permutation"));
            }
        }
        if measure.iter().any(|p| !p.is_positive()) {
            return input("measure must be strictly positive (restrict to the support first)");
        }
        let total: Rational = measure.iter().sum();
        if !total.is_one() {
            return input(format!("measure sums to {}", fmt_rational(&total)));
        }
        for i in 0..n {
            if measure[map[i]] != measure[i] {
                return input(format!("measure is not invariant at state {i}"));
            }
        }
        Ok(FiniteSystem { map, measure })
    }

    /// `i ↦ i + 1 mod n` with uniform measure.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return input("cyclic(0) is empty");
        }
        FiniteSystem::new((0..n).map(|i| (i + 1) % n).collect(), vec![rational(1, n as i64); n])
    }

    pub fn one_point() -> Self {
        FiniteSystem { map: vec![0], measure: vec![Rational::one()] }
    }

    /// Uniform measure on a permutation.
    pub fn uniform(map: Vec<usize>) -> Result<Self> {
        let n = map.len().max(1) as i64;
        let measure = vec![rational(1, n); map.len()];
        FiniteSystem::new(map, measure)
    }

    /// Disjoint union of cycles of the given lengths, each carrying the given
    /// total weight spread uniformly.
    pub fn from_cycles(lengths: &[usize], weights: &[Rational]) -> Result<Self> {
        if lengths.len() != weights.len() || lengths.iter().any(|&l| l == 0) {
            return input("need one positive length per weight");
        }
        let mut map = Vec::new();
        let mut measure = Vec::new();
        for (&len, w) in lengths.iter().zip(weights) {
            let start = map.len();
            for k in 0..len {
                map.push(start + (k + 1) % len);
                measure.push(w / BigRational::from_integer(BigInt::from(len)));
            }
        }
        FiniteSystem::new(map, measure)
    }

    pub fn size(&self) -> usize {
        self.map.len()
    }

    /// Cycles of the permutation, each listed from its smallest state.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.size()];
        let mut out = Vec::new();
        for s in 0..self.size() {
            if seen[s] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = self.map[i];
            }
            out.push(cycle);
        }
        out
    }

    pub fn is_ergodic(&self) -> bool {
        self.cycles().len() == 1
    }

    /// The system restricted to one cycle, renumbered and renormalised.
    pub fn component(&self, cycle: &[usize]) -> Result<FiniteSystem> {
        let len = cycle.len();
        let map = (0..len).map(|k| (k + 1) % len).collect();
        FiniteSystem::new(map, vec![rational(1, len as i64); len])
    }

    /// `T^k`.
    pub fn power(&self, k: usize) -> Vec<usize> {
        (0..self.size())
            .map(|mut i| {
                for _ in 0..k {
                    i = self.map[i];
                }
                i
            })
            .collect()
    }

    /// Order of the permutation.
    pub fn order(&self) -> usize {
        self.cycles().iter().fold(1, |acc, c| acc.lcm(&c.len()))
    }
}

/// Orbits of `T × S` on `{0..n} × {0..m}`.
fn product_orbits(x: &FiniteSystem, y: &FiniteSystem) -> Vec<Vec<(usize, usize)>> {
    let (n, m) = (x.size(), y.size());
    let mut seen = vec![vec![false; m]; n];
    let mut orbits = Vec::new();
    for i in 0..n {
        for j in 0..m {
            if seen[i][j] {
                continue;
            }
            let mut orbit = Vec::new();
            let (mut a, mut b) = (i, j);
            while !seen[a][b] {
                seen[a][b] = true;
                orbit.push((a, b));
                (a, b) = (x.map[a], y.map[b]);
            }
            orbits.push(orbit);
        }
    }
    orbits
}

/// Reduced row echelon form in place; returns pivot columns.
pub(crate) fn rref(rows: &mut [Vec<Rational>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&k| !rows[k][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        for k in 0..rows.len() {
            if k != r && !rows[k][c].is_zero() {
                let f = rows[k][c].clone();
                let (src, dst) = if k < r {
                    let (lo, hi) = rows.split_at_mut(r);
                    (&hi[0], &mut lo[k])
                } else {
                    let (lo, hi) = rows.split_at_mut(k);
                    (&lo[r], &mut hi[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d = &*d - &f * s;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

/// Basis of `{v : A v = 0}` from an RREF of `A`.
pub(crate) fn nullspace(a: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut rows = a.to_vec();
    let pivots = rref(&mut rows);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -rows[r][f].clone();
            }
            v
        })
        .collect()
}

/// The marginal constraints on orbit variables: rows for each `x` state then
/// each `y` state, augmented with the right-hand side.
struct OrbitSystem {
    orbits: Vec<Vec<(usize, usize)>>,
    /// `[A | b]`.
    augmented: Vec<Vec<Rational>>,
}

impl OrbitSystem {
    fn new(x: &FiniteSystem, y: &FiniteSystem) -> Self {
        let orbits = product_orbits(x, y);
        let k = orbits.len();
        let (n, m) = (x.size(), y.size());
        let mut augmented = vec![vec![Rational::zero(); k + 1]; n + m];
        for (o, orbit) in orbits.iter().enumerate() {
            for &(i, j) in orbit {
                augmented[i][o] += Rational::one();
                augmented[n + j][o] += Rational::one();
            }
        }
        for i in 0..n {
            augmented[i][k] = x.measure[i].clone();
        }
        for j in 0..m {
            augmented[n + j][k] = y.measure[j].clone();
        }
        OrbitSystem { orbits, augmented }
    }

    fn width(&self) -> usize {
        self.orbits.len()
    }

    fn matrix(&self) -> Vec<Vec<Rational>> {
        self.augmented.iter().map(|r| r[..self.width()].to_vec()).collect()
    }

    fn coupling(&self, v: &[Rational], n: usize, m: usize) -> Coupling {
        let mut c = vec![vec![Rational::zero(); m]; n];
        for (orbit, val) in self.orbits.iter().zip(v) {
            for &(i, j) in orbit {
                c[i][j] = val.clone();
            }
        }
        c
    }
}

pub fn product_coupling(x: &FiniteSystem, y: &FiniteSystem) -> Coupling {
    x.measure.iter().map(|a| y.measure.iter().map(|b| a * b).collect()).collect()
}

/// Whether `c` has marginals `μ`, `ν`, is `T × S`-invariant and nonnegative.
pub fn is_joining(c: &Coupling, x: &FiniteSystem, y: &FiniteSystem) -> bool {
    let (n, m) = (x.size(), y.size());
    if c.len() != n || c.iter().any(|r| r.len() != m) {
        return false;
    }
    let nonneg = c.iter().flatten().all(|v| !v.is_negative());
    let rows = (0..n).all(|i| c[i].iter().sum::<Rational>() == x.measure[i]);
    let cols = (0..m).all(|j| (0..n).map(|i| &c[i][j]).sum::<Rational>() == y.measure[j]);
    let invariant = (0..n).all(|i| (0..m).all(|j| c[x.map[i]][y.map[j]] == c[i][j]));
    nonneg && rows && cols && invariant
}

/// Couplings spanning the affine hull of the joining set.
#[derive(Clone, Debug, PartialEq)]
pub struct JoiningPolytope {
    /// The product, then one boundary point along each free direction.
    pub basis: Vec<Coupling>,
    pub product: Coupling,
    pub dimension: usize,
    /// Number of `T × S` orbits (the coupling variables).
    pub orbit_count: usize,
}

impl Serialize for JoiningPolytope {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            dimension: usize,
            orbit_count: usize,
            product: Vec<Vec<String>>,
            basis: Vec<Vec<Vec<String>>>,
        }
        Repr {
            dimension: self.dimension,
            orbit_count: self.orbit_count,
            product: coupling_to_strings(&self.product),
            basis: self.basis.iter().map(coupling_to_strings).collect(),
        }
        .serialize(s)
    }
}

fn check_sizes(x: &FiniteSystem, y: &FiniteSystem, max: usize) -> Result<()> {
    if x.size() > max || y.size() > max {
        return input(format!("sizes {} and {} exceed {max}", x.size(), y.size()));
    }
    Ok(())
}

/// Solves the exact marginal and invariance constraints.
///
/// Invariant couplings are constant on `T × S` orbits, so the unknowns are one
/// value per orbit. The product coupling is strictly positive, so the
/// polytope's dimension equals the dimension of the nullspace.
pub fn joining_polytope(x: &FiniteSystem, y: &FiniteSystem) -> Result<JoiningPolytope> {
    check_sizes(x, y, MAX_POLYTOPE_SIZE)?;
    let x = FiniteSystem::new(x.map.clone(), x.measure.clone())?;
    let y = FiniteSystem::new(y.map.clone(), y.measure.clone())?;
    let (n, m) = (x.size(), y.size());
    let sys = OrbitSystem::new(&x, &y);
    let product = product_coupling(&x, &y);
    let p: Vec<Rational> = sys.orbits.iter().map(|o| product[o[0].0][o[0].1].clone()).collect();
    let directions = nullspace(&sys.matrix(), sys.width());
    let mut basis = vec![product.clone()];
    for d in &directions {
        // Largest t with p + t·d ≥ 0.
        let t = p
            .iter()
            .zip(d)
            .filter(|(_, di)| di.is_negative())
            .map(|(pi, di)| -(pi / di))
            .min()
            .expect("a nonzero direction with zero row sums has a negative entry");
        let v: Vec<Rational> = p.iter().zip(d).map(|(pi, di)| pi + &t * di).collect();
        basis.push(sys.coupling(&v, n, m));
    }
    Ok(JoiningPolytope { basis, product, dimension: directions.len(), orbit_count: sys.width() })
}

/// `μ ⊗ ν` is the only joining.
pub fn is_disjoint(x: &FiniteSystem, y: &FiniteSystem) -> Result<bool> {
    Ok(joining_polytope(x, y)?.dimension == 0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtremeJoinings {
    pub vertices: Vec<Coupling>,
    /// The enumeration budget ran out before all bases were examined.
    pub partial: bool,
}

fn combinations(n: usize, k: usize, budget: usize, mut visit: impl FnMut(&[usize])) -> bool {
    let mut idx: Vec<usize> = (0..k).collect();
    let mut count = 0;
    if k > n {
        return true;
    }
    loop {
        if count == budget {
            return false;
        }
        count += 1;
        visit(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return true;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All vertices of the joining polytope, by basic-feasible-solution
/// enumeration over the orbit variables.
pub fn extreme_joinings(x: &FiniteSystem, y: &FiniteSystem) -> Result<ExtremeJoinings> {
    check_sizes(x, y, MAX_VERTEX_SIZE)?;
    let x = FiniteSystem::new(x.map.clone(), x.measure.clone())?;
    let y = FiniteSystem::new(y.map.clone(), y.measure.clone())?;
    let sys = OrbitSystem::new(&x, &y);
    let mut reduced = sys.augmented.clone();
    let pivots = rref(&mut reduced);
    let width = sys.width();
    let rank = pivots.len();
    let rows: Vec<Vec<Rational>> = reduced.into_iter().take(rank).collect();
    let mut vertices: Vec<Vec<Rational>> = Vec::new();
    let complete = combinations(width, rank, VERTEX_BUDGET, |cols| {
        // Solve the square system restricted to `cols`.
        let mut sub: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| cols.iter().map(|&c| r[c].clone()).chain(std::iter::once(r[width].clone())).collect())
            .collect();
        let piv = rref(&mut sub);
        if piv.len() != rank || piv.iter().enumerate().any(|(k, &p)| p != k) {
            return;
        }
        let mut v = vec![Rational::zero(); width];
        for (k, &c) in cols.iter().enumerate() {
            v[c] = sub[k][rank].clone();
        }
        if v.iter().any(|t| t.is_negative()) {
            return;
        }
        if !vertices.contains(&v) {
            vertices.push(v);
        }
    });
    let (n, m) = (x.size(), y.size());
    Ok(ExtremeJoinings {
        vertices: vertices.iter().map(|v| sys.coupling(v, n, m)).collect(),
        partial: !complete,
    })
}

/// Whether `T × S` restricted to the support of `c` has only trivial
/// invariant sets, i.e. the support is a single orbit.
pub fn is_ergodic_coupling(c: &Coupling, x: &FiniteSystem, y: &FiniteSystem) -> bool {
    let orbits = product_orbits(x, y);
    let charged = orbits.iter().filter(|o| o.iter().any(|&(i, j)| !c[i][j].is_zero())).count();
    charged == 1
}

/// Stochastic matrix `M[j][i] = λ(i, j) / ν(j)` of the Markov operator
/// `L²(X) → L²(Y)` induced by a joining.
pub fn markov_from_joining(lambda: &Coupling, x: &FiniteSystem, y: &FiniteSystem) -> Result<Vec<Vec<Rational>>> {
    if !is_joining(lambda, x, y) {
        return Err(Error::Precondition("coupling is not a joining of the two systems".into()));
    }
    let (n, m) = (x.size(), y.size());
    let mut markov = vec![vec![Rational::zero(); n]; m];
    for j in 0..m {
        if y.measure[j].is_zero() {
            // ν-null rows are unconstrained; use the uniform row.
            markov[j] = vec![rational(1, n as i64); n];
            continue;
        }
        for i in 0..n {
            markov[j][i] = &lambda[i][j] / &y.measure[j];
        }
    }
    if !intertwines(&markov, x, y) {
        return Err(Error::Numerical("induced operator does not intertwine the actions".into()));
    }
    Ok(markov)
}

/// `M ∘ U_T = U_S ∘ M`, entrywise `M[j][i] = M[S j][T i]`.
pub fn intertwines(markov: &[Vec<Rational>], x: &FiniteSystem, y: &FiniteSystem) -> bool {
    (0..y.size()).all(|j| (0..x.size()).all(|i| markov[j][i] == markov[y.map[j]][x.map[i]]))
}

/// `λ_t = t μ_A⊗ν_B + (μ(A)−t) μ_A⊗ν_{Bᶜ} + (ν(B)−t) μ_{Aᶜ}⊗ν_B + (1−μ(A)−ν(B)+t) μ_{Aᶜ}⊗ν_{Bᶜ}`
/// for invariant sets `A ⊂ X`, `B ⊂ Y`, with `μ_A = μ(· ∩ A)/μ(A)`.
pub fn split_joining(x: &FiniteSystem, y: &FiniteSystem, a: &[usize], b: &[usize], t: &Rational) -> Result<Coupling> {
    let in_a: Vec<bool> = (0..x.size()).map(|i| a.contains(&i)).collect();
    let in_b: Vec<bool> = (0..y.size()).map(|j| b.contains(&j)).collect();
    if (0..x.size()).any(|i| in_a[x.map[i]] != in_a[i]) || (0..y.size()).any(|j| in_b[y.map[j]] != in_b[j]) {
        return input("A and B must be invariant");
    }
    let ma: Rational = (0..x.size()).filter(|&i| in_a[i]).map(|i| &x.measure[i]).sum();
    let nb: Rational = (0..y.size()).filter(|&j| in_b[j]).map(|j| &y.measure[j]).sum();
    let one = Rational::one();
    if ma.is_zero() || ma == one || nb.is_zero() || nb == one {
        return input("A and B must be proper invariant sets of positive measure");
    }
    let lo = (&ma + &nb - &one).max(Rational::zero());
    let hi = (&ma).min(&nb).clone();
    if *t < lo || *t > hi {
        return input(format!("t = {} outside [{}, {}]", fmt_rational(t), fmt_rational(&lo), fmt_rational(&hi)));
    }
    let weights = [
        [t.clone(), &ma - t],
        [&nb - t, &one - &ma - &nb + t],
    ];
    let mut c = vec![vec![Rational::zero(); y.size()]; x.size()];
    for i in 0..x.size() {
        let (wa, mass_a) = if in_a[i] { (0, ma.clone()) } else { (1, &one - &ma) };
        for j in 0..y.size() {
            let (wb, mass_b) = if in_b[j] { (0, nb.clone()) } else { (1, &one - &nb) };
            c[i][j] = &weights[wa][wb] * &x.measure[i] / &mass_a * &y.measure[j] / &mass_b;
        }
    }
    Ok(c)
}

/// For two non-ergodic systems, a non-product joining `λ_t` built from the
/// first cycle of each, with `t` halfway between `μ(A)ν(B)` and
/// `min(μ(A), ν(B))`. `None` when either system is ergodic.
pub fn non_ergodic_witness(x: &FiniteSystem, y: &FiniteSystem) -> Result<Option<(Rational, Coupling)>> {
    if x.is_ergodic() || y.is_ergodic() {
        return Ok(None);
    }
    let a = x.cycles().swap_remove(0);
    let b = y.cycles().swap_remove(0);
    let ma: Rational = a.iter().map(|&i| &x.measure[i]).sum();
    let nb: Rational = b.iter().map(|&j| &y.measure[j]).sum();
    let t = (&ma * &nb + (&ma).min(&nb)) / rational(2, 1);
    Ok(Some((t.clone(), split_joining(x, y, &a, &b, &t)?)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coprime_cycles_are_disjoint() {
        let p = joining_polytope(&FiniteSystem::cyclic(2).unwrap(), &FiniteSystem::cyclic(3).unwrap()).unwrap();
        assert_eq!(p.dimension, 0);
        assert_eq!(p.basis.len(), 1);
    }

    #[test]
    fn two_cycles_have_a_segment_of_joinings() {
        let c2 = FiniteSystem::cyclic(2).unwrap();
        let p = joining_polytope(&c2, &c2).unwrap();
        assert_eq!(p.dimension, 1);
        for c in &p.basis {
            assert!(is_joining(c, &c2, &c2));
        }
        let ext = extreme_joinings(&c2, &c2).unwrap();
        assert!(!ext.partial);
        assert_eq!(ext.vertices.len(), 2);
        let mid: Coupling = (0..2)
            .map(|i| (0..2).map(|j| (&ext.vertices[0][i][j] + &ext.vertices[1][i][j]) / rational(2, 1)).collect())
            .collect();
        assert_eq!(mid, p.product);
        assert!(!ext.vertices.contains(&p.product));
    }

    #[test]
    fn one_point_factor_is_disjoint_from_everything() {
        for n in 1..6 {
            assert!(is_disjoint(&FiniteSystem::cyclic(n).unwrap(), &FiniteSystem::one_point()).unwrap());
        }
    }

    #[test]
    fn self_joining_of_ergodic_is_not_disjoint() {
        let c5 = FiniteSystem::cyclic(5).unwrap();
        assert!(!is_disjoint(&c5, &c5).unwrap());
    }

    #[test]
    fn invalid_measures_are_rejected() {
        let err = FiniteSystem::new(vec![1, 0], vec![rational(1, 3), rational(2, 3)]).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
        assert!(FiniteSystem::new(vec![0, 0], vec![rational(1, 2), rational(1, 2)]).is_err());
    }

    #[test]
    fn markov_operators_of_product_and_diagonal() {
        let c3 = FiniteSystem::cyclic(3).unwrap();
        let m = markov_from_joining(&product_coupling(&c3, &c3), &c3, &c3).unwrap();
        assert!(m.iter().all(|row| row.iter().all(|v| *v == rational(1, 3))));
        let diag: Coupling =
            (0..3).map(|i| (0..3).map(|j| if i == j { rational(1, 3) } else { rational(0, 1) }).collect()).collect();
        let m = markov_from_joining(&diag, &c3, &c3).unwrap();
        for (j, row) in m.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                assert_eq!(*v, if i == j { rational(1, 1) } else { rational(0, 1) });
            }
        }
    }

    #[test]
    fn witness_joining_is_a_strict_mixture() {
        let x = FiniteSystem::from_cycles(&[1, 2], &[rational(1, 3), rational(2, 3)]).unwrap();
        let y = FiniteSystem::from_cycles(&[3, 1], &[rational(1, 2), rational(1, 2)]).unwrap();
        let (_, c) = non_ergodic_witness(&x, &y).unwrap().unwrap();
        assert!(is_joining(&c, &x, &y));
        assert_ne!(c, product_coupling(&x, &y));
        let m = markov_from_joining(&c, &x, &y).unwrap();
        assert!(m.iter().all(|row| row.iter().sum::<Rational>().is_one()));
    }

    #[test]
    fn fractions_round_trip() {
        let x = FiniteSystem::cyclic(3).unwrap();
        let text = serde_json::to_string(&x).unwrap();
        assert!(text.contains("\"1/3\""));
        assert_eq!(serde_json::from_str::<FiniteSystem>(&text).unwrap(), x);
    }
}
