//! Dense complex linear algebra kernel.
//!
//! Operators are `nalgebra` matrices over `Complex64`. Vectorization is
//! row-major: entry `(i, j)` of an `n x n` operator is stored at index
//! `i * n + j` of its vector. Every constraint matrix in the crate is built
//! against this convention, so `vectorize` is the only place it is encoded.
//!
//! Rank decisions are relative: a singular value counts as zero when it is at
//! most `tol` times the largest singular value of the same matrix (or `tol`
//! when that is below one).
//!
//! SVDs and Hermitian eigendecompositions are delegated to `faer`.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Default relative rank / residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "tolerance must be positive and finite, got {tol}"
        )))
    }
}

/// Row-major vectorization.
pub fn vectorize(m: &ComplexMatrix) -> ComplexVector {
    let cols = m.ncols();
    DVector::from_fn(m.nrows() * cols, |k, _| m[(k / cols, k % cols)])
}

/// Inverse of [`vectorize`] for square `n x n` operators.
pub fn unvectorize(v: &ComplexVector, n: usize) -> Result<ComplexMatrix> {
    if v.len() != n * n {
        return Err(Error::dims(format!(
            "vector of length {} cannot be reshaped to {n}x{n}",
            v.len()
        )));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| v[i * n + j]))
}

/// Hilbert–Schmidt inner product `Tr(a† b)`.
#[inline]
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.dotc(b)
}

/// `|i><j|` on `C^n`.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    m[(i, j)] = real(1.0);
    m
}

/// Rank-one operator `|u><v|`.
pub fn outer(u: &ComplexVector, v: &ComplexVector) -> ComplexMatrix {
    u * v.adjoint()
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Block-diagonal `a ⊕ b`.
pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut m = ComplexMatrix::zeros(ra + rb, ca + cb);
    m.view_mut((0, 0), (ra, ca)).copy_from(a);
    m.view_mut((ra, ca), (rb, cb)).copy_from(b);
    m
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

fn to_faer(m: &ComplexMatrix) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Thin SVD `m = U diag(σ) V†` with `σ` in nonincreasing order.
struct Svd {
    u: ComplexMatrix,
    values: DVector<f64>,
    v: ComplexMatrix,
}

fn thin_svd(m: &ComplexMatrix) -> Result<Svd> {
    let svd = to_faer(m)
        .thin_svd()
        .map_err(|e| Error::Structure(format!("SVD did not converge: {e:?}")))?;
    let s = svd.S().column_vector();
    Ok(Svd {
        u: from_faer(svd.U()),
        values: DVector::from_fn(s.nrows(), |k, _| s[k].re),
        v: from_faer(svd.V()),
    })
}

fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    to_faer(m)
        .singular_values()
        .map_err(|e| Error::Structure(format!("SVD did not converge: {e:?}")))
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    match singular_values(m) {
        Ok(values) => values.into_iter().fold(0.0, f64::max),
        Err(_) => f64::NAN,
    }
}

pub fn hermitian_residual(m: &ComplexMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && hermitian_residual(m) <= tol * m.norm().max(1.0)
}

/// Stack vectorized operators as the columns of an `n² x k` matrix.
pub fn stack_vectorized(ops: &[ComplexMatrix], n: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(n * n, ops.len());
    for (j, op) in ops.iter().enumerate() {
        out.set_column(j, &vectorize(op));
    }
    out
}

/// Matrix of a linear map given by its action on a list of domain elements:
/// column `j` is `vectorize(f(domain[j]))`.
pub fn map_matrix<F>(domain: &[ComplexMatrix], out_dim: usize, f: F) -> ComplexMatrix
where
    F: Fn(&ComplexMatrix) -> ComplexMatrix,
{
    let mut out = ComplexMatrix::zeros(out_dim * out_dim, domain.len());
    for (j, d) in domain.iter().enumerate() {
        out.set_column(j, &vectorize(&f(d)));
    }
    out
}

fn stack_rows(blocks: &[ComplexMatrix], cols: usize) -> Result<ComplexMatrix> {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = ComplexMatrix::zeros(rows.max(cols), cols);
    let mut offset = 0;
    for (k, b) in blocks.iter().enumerate() {
        if b.ncols() != cols {
            return Err(Error::dims(format!(
                "constraint {k} has {} columns, expected {cols}",
                b.ncols()
            )));
        }
        out.view_mut((offset, 0), b.shape()).copy_from(b);
        offset += b.nrows();
    }
    Ok(out)
}

/// Singular values at or below `tol · max(σ_max, 1)` count as zero. The
/// floor keeps systems made entirely of rounding noise from being read as
/// full rank.
fn singular_cutoff(values: &DVector<f64>, tol: f64) -> f64 {
    tol * values.iter().cloned().fold(1.0, f64::max)
}

/// Orthonormal basis (as columns) of the joint kernel of the stacked
/// constraint matrices. An empty constraint list yields the full space.
pub fn joint_kernel(blocks: &[ComplexMatrix], cols: usize, tol: f64) -> Result<ComplexMatrix> {
    check_tol(tol)?;
    if blocks.is_empty() || cols == 0 {
        return Ok(ComplexMatrix::identity(cols, cols));
    }
    let stacked = stack_rows(blocks, cols)?;
    if stacked.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return Ok(ComplexMatrix::identity(cols, cols));
    }
    // Tall systems are reduced to their triangular factor; the singular
    // values (and hence the kernel) are unchanged.
    let reduced = if stacked.nrows() > 2 * cols {
        stacked.qr().r()
    } else {
        stacked
    };
    let mut square = reduced;
    if square.nrows() < cols {
        square = square.resize_vertically(cols, C64::new(0.0, 0.0));
    }
    let svd = thin_svd(&square)?;
    let cutoff = singular_cutoff(&svd.values, tol);
    let keep: Vec<usize> = (0..svd.values.len())
        .filter(|&k| svd.values[k] <= cutoff)
        .collect();
    let mut out = ComplexMatrix::zeros(cols, keep.len());
    for (j, &k) in keep.iter().enumerate() {
        out.set_column(j, &svd.v.column(k));
    }
    Ok(out)
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn range_basis(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    check_tol(tol)?;
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(ComplexMatrix::zeros(rows, 0));
    }
    let svd = thin_svd(m)?;
    let cutoff = singular_cutoff(&svd.values, tol);
    let keep: Vec<usize> = (0..svd.values.len())
        .filter(|&k| svd.values[k] > cutoff)
        .collect();
    let mut out = ComplexMatrix::zeros(rows, keep.len());
    for (j, &k) in keep.iter().enumerate() {
        out.set_column(j, &svd.u.column(k));
    }
    Ok(out)
}

pub fn rank(m: &ComplexMatrix, tol: f64) -> Result<usize> {
    Ok(range_basis(m, tol)?.ncols())
}

/// Orthogonal projection onto the range of `m`.
pub fn support_projection(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let q = range_basis(m, tol)?;
    Ok(&q * q.adjoint())
}

/// Moore–Penrose pseudoinverse with relative singular value cutoff.
pub fn pseudo_inverse(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    check_tol(tol)?;
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(ComplexMatrix::zeros(cols, rows));
    }
    let svd = thin_svd(m)?;
    let cutoff = singular_cutoff(&svd.values, tol);
    let mut out = ComplexMatrix::zeros(cols, rows);
    for (k, &s) in svd.values.iter().enumerate() {
        if s > cutoff {
            out += (svd.v.column(k) * svd.u.column(k).adjoint()) * real(1.0 / s);
        }
    }
    Ok(out)
}

/// Rotate the global phase of `v` so its first significant entry is real and
/// positive.
pub fn fix_phase(v: &mut ComplexVector) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-8 * max).cloned() {
        let phase = z.conj() / z.norm();
        *v *= phase;
    }
}

/// Extend an `n x k` isometry to an `n x n` unitary whose first `k` columns
/// are the isometry.
pub fn complete_to_unitary(isometry: &ComplexMatrix) -> ComplexMatrix {
    let (n, k) = isometry.shape();
    let mut u = ComplexMatrix::zeros(n, n);
    u.view_mut((0, 0), (n, k)).copy_from(isometry);
    if k == n {
        return u;
    }
    let complement = ComplexMatrix::identity(n, n) - isometry * isometry.adjoint();
    let eig = nalgebra::SymmetricEigen::new((&complement + complement.adjoint()) * real(0.5));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    for (j, &idx) in order.iter().take(n - k).enumerate() {
        let mut v = eig.eigenvectors.column(idx).into_owned();
        fix_phase(&mut v);
        u.set_column(k + j, &v);
    }
    u
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// Group consecutive eigenvalues whose gap is below `gap`.
    ///
    /// Only projectors onto whole clusters are meaningful; vectors inside a
    /// degenerate cluster are an arbitrary orthonormal basis of it.
    pub fn clusters(&self, gap: f64) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for k in 1..=self.values.len() {
            if k == self.values.len() || self.values[k] - self.values[k - 1] >= gap {
                out.push(start..k);
                start = k;
            }
        }
        out
    }

    pub fn cluster_vectors(&self, cluster: Range<usize>) -> ComplexMatrix {
        self.vectors.columns(cluster.start, cluster.len()).into_owned()
    }

    pub fn projector(&self, cluster: Range<usize>) -> ComplexMatrix {
        let v = self.cluster_vectors(cluster);
        &v * v.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.vectors.nrows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let v = self.vectors.column(k);
            out += (v * v.adjoint()) * real(lambda);
        }
        out
    }
}

/// Eigendecomposition of `m`, which must satisfy `‖m − m†‖ ≤ tol·max(1, ‖m‖)`.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    check_tol(tol)?;
    if !m.is_square() {
        return Err(Error::dims(format!("eigendecomposition of {:?} matrix", m.shape())));
    }
    let residual = hermitian_residual(m);
    if residual > tol * m.norm().max(1.0) {
        return Err(Error::NotHermitian { residual });
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(HermitianEigen {
            values: vec![],
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let sym = (m + m.adjoint()) * real(0.5);
    let eig = to_faer(&sym)
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Structure(format!("eigendecomposition did not converge: {e:?}")))?;
    let s = eig.S().column_vector();
    let values = (0..n).map(|k| s[k].re).collect();
    Ok(HermitianEigen {
        values,
        vectors: from_faer(eig.U()),
    })
}

/// Which tensor factor a partial trace removes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    A,
    B,
}

/// Partial trace of an operator on `A ⊗ B` (index `α·dim_b + β`), tracing out
/// `traced`.
pub fn partial_trace(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    traced: Factor,
) -> Result<ComplexMatrix> {
    let d = dim_a * dim_b;
    if m.shape() != (d, d) {
        return Err(Error::dims(format!(
            "partial trace of {:?} matrix over {dim_a}x{dim_b}",
            m.shape()
        )));
    }
    Ok(match traced {
        Factor::B => ComplexMatrix::from_fn(dim_a, dim_a, |a, a2| {
            (0..dim_b).map(|b| m[(a * dim_b + b, a2 * dim_b + b)]).sum()
        }),
        Factor::A => ComplexMatrix::from_fn(dim_b, dim_b, |b, b2| {
            (0..dim_a).map(|a| m[(a * dim_b + b, a * dim_b + b2)]).sum()
        }),
    })
}

/// A linear subspace of `L(C^n)` with a Hilbert–Schmidt orthonormal basis.
#[derive(Clone, Debug)]
pub struct OperatorSubspace {
    ambient_dim: usize,
    basis: Vec<ComplexMatrix>,
}

impl OperatorSubspace {
    /// Wrap a basis that is already HS-orthonormal.
    pub fn from_orthonormal(ambient_dim: usize, basis: Vec<ComplexMatrix>) -> Self {
        debug_assert!(basis.iter().all(|b| b.shape() == (ambient_dim, ambient_dim)));
        Self { ambient_dim, basis }
    }

    /// Orthonormalize an arbitrary spanning family.
    pub fn from_spanning(ambient_dim: usize, elements: &[ComplexMatrix], tol: f64) -> Result<Self> {
        for (k, e) in elements.iter().enumerate() {
            if e.shape() != (ambient_dim, ambient_dim) {
                return Err(Error::dims(format!(
                    "element {k} is {:?}, expected {ambient_dim}x{ambient_dim}",
                    e.shape()
                )));
            }
        }
        let cols = range_basis(&stack_vectorized(elements, ambient_dim), tol)?;
        Self::from_columns(ambient_dim, &cols)
    }

    /// Build from orthonormal columns of an `n² x d` matrix.
    pub fn from_columns(ambient_dim: usize, cols: &ComplexMatrix) -> Result<Self> {
        let basis = (0..cols.ncols())
            .map(|j| unvectorize(&cols.column(j).into_owned(), ambient_dim))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { ambient_dim, basis })
    }

    /// All of `L(C^n)`, spanned by matrix units.
    pub fn full(n: usize) -> Self {
        let basis = (0..n * n).map(|k| matrix_unit(n, k / n, k % n)).collect();
        Self {
            ambient_dim: n,
            basis,
        }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            ambient_dim: n,
            basis: vec![],
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    /// `n² x d` matrix whose columns are the vectorized basis elements.
    pub fn basis_matrix(&self) -> ComplexMatrix {
        stack_vectorized(&self.basis, self.ambient_dim)
    }

    /// Coordinates `⟨b_j, x⟩` of `x` in the basis.
    pub fn coefficients(&self, x: &ComplexMatrix) -> ComplexVector {
        DVector::from_iterator(self.basis.len(), self.basis.iter().map(|b| hs_inner(b, x)))
    }

    pub fn combine(&self, coefficients: &[C64]) -> ComplexMatrix {
        let n = self.ambient_dim;
        self.basis
            .iter()
            .zip(coefficients)
            .fold(ComplexMatrix::zeros(n, n), |acc, (b, &c)| acc + b * c)
    }

    pub fn project(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let coeffs = self.coefficients(x);
        self.combine(coeffs.as_slice())
    }

    /// HS distance from `x` to the subspace.
    pub fn residual(&self, x: &ComplexMatrix) -> f64 {
        (x - self.project(x)).norm()
    }

    pub fn contains(&self, x: &ComplexMatrix, tol: f64) -> bool {
        x.shape() == (self.ambient_dim, self.ambient_dim)
            && self.residual(x) < tol * x.norm().max(1.0)
    }

    /// `max |G − I|` over the Gram matrix of the basis.
    pub fn gram_residual(&self) -> f64 {
        let d = self.basis.len();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((hs_inner(&self.basis[i], &self.basis[j]) - expected).norm());
            }
        }
        worst
    }
}

/// Outcome of [`subspace_equal`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubspaceComparison {
    pub equal: bool,
    /// Largest principal angle in radians (π/2 when dimensions differ).
    pub max_angle: f64,
}

/// Compare two subspaces by dimension and largest principal angle.
pub fn subspace_equal(
    s1: &OperatorSubspace,
    s2: &OperatorSubspace,
    tol: f64,
) -> Result<SubspaceComparison> {
    check_tol(tol)?;
    if s1.ambient_dim != s2.ambient_dim {
        return Err(Error::dims(format!(
            "comparing subspaces of L(C^{}) and L(C^{})",
            s1.ambient_dim, s2.ambient_dim
        )));
    }
    if s1.dim() != s2.dim() {
        return Ok(SubspaceComparison {
            equal: false,
            max_angle: std::f64::consts::FRAC_PI_2,
        });
    }
    if s1.dim() == 0 {
        return Ok(SubspaceComparison {
            equal: true,
            max_angle: 0.0,
        });
    }
    let q1 = s1.basis_matrix();
    let q2 = s2.basis_matrix();
    let overlap = q2.adjoint() * &q1;
    let residual = &q1 - &q2 * &overlap;
    let sine = operator_norm(&residual);
    let cosine = singular_values(&overlap)?.into_iter().fold(f64::INFINITY, f64::min);
    let max_angle = sine.atan2(cosine);
    Ok(SubspaceComparison {
        equal: max_angle < tol,
        max_angle,
    })
}

/// Orthonormal basis of the joint kernel of linear maps on `L(C^n)`, each
/// given as an `m x n²` matrix acting on vectorized operators.
pub fn operator_nullspace(
    n: usize,
    constraints: &[ComplexMatrix],
    tol: f64,
) -> Result<OperatorSubspace> {
    let kernel = joint_kernel(constraints, n * n, tol)?;
    OperatorSubspace::from_columns(n, &kernel)
}
