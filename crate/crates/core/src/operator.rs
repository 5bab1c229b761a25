//! Finite-dimensional complex linear algebra for normal operators and
//! limits of unitary powers.
//!
//! Everything here works on dense `dim × dim` matrices (`dim ≤ 64` is the
//! intended envelope). Singular values at or below the caller's tolerance
//! are treated as zero; [`default_tolerance`] gives the relative threshold
//! used when the caller has no better scale in mind.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

/// Slack per dimension in [`assert_projection_from_idempotent_contraction`].
pub const PROJECTION_SLACK_PER_DIM: f64 = 10.0;

/// Minimum number of indices accepted by the sequence-limit routines.
pub const MIN_LIMIT_INDICES: usize = 8;

/// Dense square complex matrix with finite entries.
///
/// Serialises as `{"dim": d, "entries": [[re, im], ...]}` in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix(DMatrix<Complex64>);

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        let entries = repr
            .entries
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        ComplexMatrix::new(repr.dim, entries)
    }
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        let dim = m.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let z = m.0[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        MatrixRepr { dim, entries }
    }
}

impl ComplexMatrix {
    /// Builds a matrix from `dim²` row-major entries.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return input("matrix dimension must be at least 1");
        }
        if entries.len() != dim * dim {
            return input(format!(
                "expected {} entries for dimension {dim}, got {}",
                dim * dim,
                entries.len()
            ));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return input("matrix entries must be finite");
        }
        Ok(ComplexMatrix(DMatrix::from_row_slice(dim, dim, &entries)))
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return input("matrix rows must all have length equal to the row count");
        }
        ComplexMatrix::new(dim, rows.concat())
    }

    /// Wraps an existing nalgebra matrix, validating shape and finiteness.
    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return input(format!("matrix must be square and non-empty, got {}x{}", m.nrows(), m.ncols()));
        }
        let out = ComplexMatrix(m);
        if !out.is_finite() {
            return input("matrix entries must be finite");
        }
        Ok(out)
    }

    pub fn identity(dim: usize) -> Self {
        ComplexMatrix(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(dim, dim))
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        ComplexMatrix(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values)))
    }

    /// Diagonal unitary `diag(e^{2πiθ_1}, …)`.
    pub fn phases(thetas: &[f64]) -> Self {
        let values: Vec<_> = thetas.iter().map(|t| unit_phase(*t)).collect();
        ComplexMatrix::diagonal(&values)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix(&self.0 * s)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.0.clone().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Spectral norm (largest singular value).
    pub fn operator_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    /// Number of singular values strictly above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.singular_values().iter().filter(|s| **s > tol).count()
    }

    /// Frobenius norm of `m·m* − m*·m`.
    pub fn commutator_norm(&self) -> f64 {
        let a = &self.0 * self.0.adjoint();
        let b = self.0.adjoint() * &self.0;
        ComplexMatrix(a - b).frobenius_norm()
    }

    /// Frobenius distance from `m*·m` to the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.0.adjoint() * &self.0;
        ComplexMatrix(g - DMatrix::identity(self.dim(), self.dim())).frobenius_norm()
    }

    /// `mⁿ` by repeated squaring.
    pub fn power(&self, n: u64) -> Self {
        let dim = self.dim();
        let mut result = DMatrix::identity(dim, dim);
        let mut base = self.0.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        ComplexMatrix(result)
    }

    /// `mⁿ` for signed `n`; negative powers are taken as powers of the
    /// adjoint, which is the inverse for unitary `m`.
    pub fn power_signed(&self, n: i64) -> Self {
        if n >= 0 {
            self.power(n as u64)
        } else {
            self.adjoint().power(n.unsigned_abs())
        }
    }

    /// `m·v` for a column vector.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let x = nalgebra::DVector::from_column_slice(v);
        (&self.0 * x).iter().copied().collect()
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// `e^{2πiθ}`.
pub fn unit_phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * theta)
}

/// Relative kernel threshold: `1e-10 · σ_max(m)`.
pub fn default_tolerance(m: &ComplexMatrix) -> f64 {
    1e-10 * m.operator_norm()
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol >= 0.0) || !tol.is_finite() {
        return input(format!("tolerance must be finite and non-negative, got {tol}"));
    }
    Ok(())
}

fn check_finite(m: &ComplexMatrix) -> Result<()> {
    if !m.is_finite() {
        return input("matrix has non-finite entries");
    }
    Ok(())
}

/// True iff `‖m·m* − m*·m‖_F ≤ tol`.
pub fn check_normal(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    check_tol(tol)?;
    check_finite(m)?;
    Ok(m.commutator_norm() <= tol)
}

fn require_normal(m: &ComplexMatrix, tol: f64) -> Result<()> {
    if !check_normal(m, tol)? {
        return Err(Error::Precondition(format!(
            "operator is not normal: commutator norm {:.3e} exceeds {tol:.3e}",
            m.commutator_norm()
        )));
    }
    Ok(())
}

/// Orthogonal splitting `Cᵈ = closure(Im V) ⊕ Ker V`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalDecomposition {
    pub p_image: ComplexMatrix,
    pub p_kernel: ComplexMatrix,
    pub tolerance: f64,
}

impl OrthogonalDecomposition {
    pub fn from_kernel_projector(p_kernel: ComplexMatrix, tolerance: f64) -> Self {
        let p_image = &ComplexMatrix::identity(p_kernel.dim()) - &p_kernel;
        OrthogonalDecomposition { p_image, p_kernel, tolerance }
    }

    /// Largest violation among: the projectors summing to the identity,
    /// idempotency, self-adjointness, and mutual orthogonality.
    pub fn invariant_defect(&self) -> f64 {
        let id = ComplexMatrix::identity(self.p_image.dim());
        let sum = (&(&self.p_image + &self.p_kernel) - &id).frobenius_norm();
        let mut worst = sum;
        for p in [&self.p_image, &self.p_kernel] {
            worst = worst.max((&(p * p) - p).frobenius_norm());
            worst = worst.max((&p.adjoint() - p).frobenius_norm());
        }
        worst.max((&self.p_image * &self.p_kernel).frobenius_norm())
    }

    pub fn satisfies_invariants(&self) -> bool {
        self.invariant_defect() <= self.tolerance.max(1e-12) * self.p_image.dim() as f64
    }

    pub fn image_rank(&self) -> usize {
        self.p_image.rank(0.5)
    }

    pub fn kernel_rank(&self) -> usize {
        self.p_kernel.rank(0.5)
    }
}

/// Projector onto the span of the right singular vectors of `m` whose
/// singular value is at most `tol`.
pub(crate) fn kernel_projector(m: &DMatrix<Complex64>, tol: f64) -> DMatrix<Complex64> {
    let ncols = m.ncols();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut p = DMatrix::<Complex64>::zeros(ncols, ncols);
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= tol {
            let row = v_t.row(i);
            p += row.adjoint() * row;
        }
    }
    // Wide matrices have ncols − nrows extra null directions not listed in
    // the thin SVD.
    let listed = svd.singular_values.len();
    if listed < ncols {
        let mut q = DMatrix::<Complex64>::identity(ncols, ncols);
        for i in 0..listed {
            let row = v_t.row(i);
            q -= row.adjoint() * row;
        }
        p += q;
    }
    p
}

/// Splits `Cᵈ` into the closure of `Im v` and `Ker v` for normal `v`.
///
/// The kernel projector collects the singular directions with singular
/// value `≤ tol`; the image projector is its complement. The result is
/// verified against `‖v − P_im·v‖ ≤ tol·dim` and `‖v·P_ker‖ ≤ tol·dim`.
pub fn image_kernel_decomposition(v: &ComplexMatrix, tol: f64) -> Result<OrthogonalDecomposition> {
    check_tol(tol)?;
    check_finite(v)?;
    require_normal(v, tol)?;
    let p_kernel = ComplexMatrix(kernel_projector(&v.0, tol));
    let dec = OrthogonalDecomposition::from_kernel_projector(p_kernel, tol);
    let bound = tol * v.dim() as f64;
    let off_image = (v - &(&dec.p_image * v)).frobenius_norm();
    let kernel_leak = (v * &dec.p_kernel).frobenius_norm();
    if off_image > bound || kernel_leak > bound {
        return Err(Error::Numerical(format!(
            "decomposition check failed: ‖v − P_im v‖ = {off_image:.3e}, ‖v P_ker‖ = {kernel_leak:.3e}, bound {bound:.3e}"
        )));
    }
    Ok(dec)
}

/// Rank comparison `rank(v) = rank(vⁿ)` at threshold `tol`, without any
/// normality requirement.
pub fn ranks_agree(v: &ComplexMatrix, n: u32, tol: f64) -> bool {
    v.rank(tol) == v.power(n as u64).rank(tol)
}

/// Checks `Ker V = Ker Vⁿ` for a normal `V`, restated as equality of ranks.
pub fn kernel_power_invariance(v: &ComplexMatrix, n: u32, tol: f64) -> Result<bool> {
    if n == 0 {
        return input("power must be at least 1 (V⁰ is the identity)");
    }
    check_tol(tol)?;
    check_finite(v)?;
    require_normal(v, tol)?;
    Ok(ranks_agree(v, n, tol))
}

/// Checks that an idempotent contraction is self-adjoint:
/// with `‖v‖ ≤ 1 + tol` and `‖v² − v‖_F ≤ tol`, returns whether
/// `‖v* − v‖_F ≤ 10·dim·tol`.
pub fn assert_projection_from_idempotent_contraction(v: &ComplexMatrix, tol: f64) -> Result<bool> {
    check_tol(tol)?;
    check_finite(v)?;
    let norm = v.operator_norm();
    let idem = (&(v * v) - v).frobenius_norm();
    let mut failed = Vec::new();
    if norm > 1.0 + tol {
        failed.push(format!("contraction: ‖V‖ = {norm:.6} > 1 + {tol:.1e}"));
    }
    if idem > tol {
        failed.push(format!("idempotent: ‖V² − V‖ = {idem:.3e} > {tol:.1e}"));
    }
    if !failed.is_empty() {
        return Err(Error::Precondition(failed.join("; ")));
    }
    let slack = PROJECTION_SLACK_PER_DIM * v.dim() as f64;
    Ok((&v.adjoint() - v).frobenius_norm() <= slack * tol)
}

/// Result of approximating `lim U^{n_k}` over a finite index list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitOperatorReport {
    pub limit: ComplexMatrix,
    pub converged: bool,
    /// Largest Frobenius distance between an iterate in the final window and
    /// the reported limit.
    pub residual: f64,
    pub tolerance: f64,
}

/// Index where the final-quarter window of a list of length `len` starts.
pub fn final_quarter_start(len: usize) -> usize {
    len - (len / 4).max(2).min(len)
}

fn require_unitary(u: &ComplexMatrix, tol: f64) -> Result<()> {
    let defect = u.unitarity_defect();
    if defect > tol {
        return input(format!("matrix is not unitary: ‖U*U − I‖ = {defect:.3e} > {tol:.3e}"));
    }
    Ok(())
}

fn check_indices(indices: &[i64]) -> Result<()> {
    if indices.len() < MIN_LIMIT_INDICES {
        return input(format!(
            "need at least {MIN_LIMIT_INDICES} indices, got {}",
            indices.len()
        ));
    }
    if indices.windows(2).any(|w| w[0] >= w[1]) {
        return input("indices must be strictly increasing");
    }
    Ok(())
}

fn window_report(iterates: Vec<ComplexMatrix>, tol: f64) -> LimitOperatorReport {
    let limit = iterates.last().expect("non-empty window").clone();
    let residual = iterates
        .iter()
        .map(|a| (a - &limit).frobenius_norm())
        .fold(0.0, f64::max);
    let step = iterates
        .windows(2)
        .map(|w| (&w[1] - &w[0]).frobenius_norm())
        .fold(0.0, f64::max);
    LimitOperatorReport { limit, converged: step <= tol && residual <= tol, residual, tolerance: tol }
}

/// Approximates `U^p = lim_k U^{n_k}` from the final quarter of `indices`.
///
/// The limit is the last iterate; the report is converged iff successive
/// iterates in the window differ by at most `tol` and every iterate lies
/// within `tol` of the limit. Divergence is reported, not raised.
pub fn sequence_limit_operator(u: &ComplexMatrix, indices: &[i64], tol: f64) -> Result<LimitOperatorReport> {
    check_tol(tol)?;
    check_finite(u)?;
    require_unitary(u, tol)?;
    check_indices(indices)?;
    let start = final_quarter_start(indices.len());
    let iterates = indices[start..].iter().map(|n| u.power_signed(*n)).collect();
    Ok(window_report(iterates, tol))
}

/// Paired check of `U^{−p} = (U^p)*`: the limit along `(−n_k)`, computed
/// with powers of `U*`, must match the adjoint of the limit along `(n_k)`
/// within `10·tol`. Returns `None` when either limit fails to converge.
pub fn adjoint_pair_check(u: &ComplexMatrix, indices: &[i64], tol: f64) -> Result<Option<bool>> {
    let forward = sequence_limit_operator(u, indices, tol)?;
    let start = final_quarter_start(indices.len());
    let adj = u.adjoint();
    let backward = window_report(
        indices[start..].iter().map(|n| adj.power_signed(*n)).collect(),
        tol,
    );
    if !forward.converged || !backward.converged {
        return Ok(None);
    }
    let gap = (&backward.limit - &forward.limit.adjoint()).frobenius_norm();
    Ok(Some(gap <= 10.0 * tol))
}

/// Iterated limit `lim_j lim_k U^{n_j + m_k}` over the final quarters of
/// both index lists, with each power computed directly from the summed
/// exponent.
pub fn sumset_limit_operator(
    u: &ComplexMatrix,
    first: &[i64],
    second: &[i64],
    tol: f64,
) -> Result<LimitOperatorReport> {
    check_tol(tol)?;
    check_finite(u)?;
    require_unitary(u, tol)?;
    check_indices(first)?;
    check_indices(second)?;
    let a = &first[final_quarter_start(first.len())..];
    let b = &second[final_quarter_start(second.len())..];
    let mut iterates = Vec::with_capacity(a.len() * b.len());
    for n in a {
        for m in b {
            let s = n
                .checked_add(*m)
                .ok_or_else(|| Error::Input(format!("index sum {n} + {m} overflows")))?;
            iterates.push(u.power_signed(s));
        }
    }
    Ok(window_report(iterates, tol))
}

/// Haar-distributed random unitary via QR of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (q, r) = qr.unpack();
    let mut q = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix(q)
}

/// `q · diag(eigenvalues) · q*`, a normal matrix with the given spectrum.
pub fn normal_with_spectrum(q: &ComplexMatrix, eigenvalues: &[Complex64]) -> ComplexMatrix {
    &(q * &ComplexMatrix::diagonal(eigenvalues)) * &q.adjoint()
}
