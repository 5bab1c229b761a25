#![allow(dead_code)]

use ergolab::joinings::FiniteSystem;
use ergolab::operator::ComplexMatrix;
use ergolab::Complex64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_unit_vector<R: Rng>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Haar-ish unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    g.qr().q()
}

/// `Q diag(λ) Q*` with `zeros` vanishing eigenvalues and the rest of modulus in `[0.2, 1]`.
pub fn random_normal<R: Rng>(dim: usize, zeros: usize, rng: &mut R) -> ComplexMatrix {
    let q = random_unitary(dim, rng);
    let lambdas: Vec<Complex64> = (0..dim)
        .map(|i| {
            if i < zeros {
                c(0.0, 0.0)
            } else {
                Complex64::from_polar(rng.random_range(0.2..1.0), rng.random_range(0.0..std::f64::consts::TAU))
            }
        })
        .collect();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(lambdas));
    ComplexMatrix::from_dmatrix(&q * d * q.adjoint()).unwrap()
}

/// Orthogonal projector onto a random subspace of dimension `rank`.
pub fn random_projector<R: Rng>(dim: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let q = random_unitary(dim, rng);
    let cols = q.columns(0, rank);
    ComplexMatrix::from_dmatrix(&cols * cols.adjoint()).unwrap()
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.as_dmatrix().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Dimension of `{λ : marginals, λ(Ti, Sj) = λ(i, j)}` from the rank of the
/// full `nm`-variable constraint matrix, by floating Gaussian elimination.
pub fn brute_force_dimension(x: &FiniteSystem, y: &FiniteSystem) -> usize {
    let (n, m) = (x.size(), y.size());
    let var = |i: usize, j: usize| i * m + j;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut r = vec![0.0; n * m];
        (0..m).for_each(|j| r[var(i, j)] = 1.0);
        rows.push(r);
    }
    for j in 0..m {
        let mut r = vec![0.0; n * m];
        (0..n).for_each(|i| r[var(i, j)] = 1.0);
        rows.push(r);
    }
    for i in 0..n {
        for j in 0..m {
            let mut r = vec![0.0; n * m];
            r[var(x.map[i], y.map[j])] += 1.0;
            r[var(i, j)] -= 1.0;
            rows.push(r);
        }
    }
    let mut rank = 0;
    for col in 0..n * m {
        let Some(p) = (rank..rows.len()).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs())) else {
            break;
        };
        if rows[p][col].abs() < 1e-9 {
            continue;
        }
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for r in rows.iter_mut().skip(rank + 1) {
            let f = r[col] / pivot[col];
            if f != 0.0 {
                r.iter_mut().zip(&pivot).for_each(|(a, b)| *a -= f * b);
            }
        }
        rank += 1;
    }
    n * m - rank
}
