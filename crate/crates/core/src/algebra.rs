//! Concrete finite-dimensional C*-algebras.
//!
//! Every algebra is stored twice: as an HS-orthonormal basis of operators and
//! as its Wedderburn structure. The structure is a unitary `U` and a list of
//! blocks `(dim_a, dim_b)` such that
//!
//! ```text
//! U† 𝔄 U = ⊕_k (I_{A_k} ⊗ L(B_k)) ⊕ 0_K
//! ```
//!
//! Columns of `U` are laid out block by block; inside block `k` the column for
//! `|α⟩ ⊗ |β⟩` sits at offset `α·dim_b + β`, and the last `kernel_dim` columns
//! span `K`. The unit `1_𝔄` is the projection onto `⊕_k A_k ⊗ B_k`, which is
//! in general not the identity of the ambient space.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{
    check_tol, hermitian_eig, hs_inner, kron, matrix_unit, operator_norm, range_basis, real,
    stack_vectorized, ComplexMatrix, OperatorSubspace, DEFAULT_TOL,
};
use crate::random::{self, SeededRng};

/// Eigenvalue gap under which two normalized eigenvalues are one cluster.
const CLUSTER_MERGE_GAP: f64 = 1e-6;
/// Minimum separation between clusters before a random draw is accepted.
const CLUSTER_SEPARATION: f64 = 1e-4;
const MAX_DRAWS: usize = 5;
/// Bases up to this dimension are closure-checked on every pair.
const EXHAUSTIVE_LIMIT: usize = 24;

/// One Wedderburn summand `I_{A} ⊗ L(B)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl Block {
    pub fn new(dim_a: usize, dim_b: usize) -> Self {
        Self { dim_a, dim_b }
    }

    /// Dimension of `A ⊗ B`.
    pub fn support_dim(&self) -> usize {
        self.dim_a * self.dim_b
    }
}

/// Knobs for [`decompose`] and everything that calls it.
#[derive(Clone, Copy, Debug)]
pub struct DecomposeOptions {
    pub tol: f64,
    pub seed: u64,
    /// Reject bases whose closure residual exceeds `1e3·tol`. When false the
    /// residual is only reported and the final reconstruction is checked at
    /// `√tol` instead.
    pub strict: bool,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            seed: 0,
            strict: true,
        }
    }
}

impl DecomposeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    fn closure_tol(&self) -> f64 {
        1e3 * self.tol
    }

    fn reconstruction_tol(&self) -> f64 {
        if self.strict {
            self.closure_tol()
        } else {
            self.tol.sqrt()
        }
    }
}

/// Structure recovered by [`decompose`].
#[derive(Clone, Debug)]
pub struct Structure {
    pub blocks: Vec<Block>,
    pub embedding: ComplexMatrix,
    pub unit: ComplexMatrix,
    pub kernel_dim: usize,
    /// Worst closure residual (adjoints and products) seen on the input basis.
    pub closure_residual: f64,
}

/// A concrete C*-subalgebra of `L(C^n)`.
#[derive(Clone, Debug)]
pub struct OperatorAlgebra {
    basis: OperatorSubspace,
    blocks: Vec<Block>,
    embedding: ComplexMatrix,
    unit: ComplexMatrix,
    kernel_dim: usize,
}

fn block_offsets(blocks: &[Block]) -> Vec<usize> {
    blocks
        .iter()
        .scan(0, |acc, b| {
            let start = *acc;
            *acc += b.support_dim();
            Some(start)
        })
        .collect()
}

/// `U (0 ⊕ I_A ⊗ x ⊕ 0) U†` with `x` placed in the block starting at `offset`.
fn embed_block_operator(
    embedding: &ComplexMatrix,
    offset: usize,
    block: Block,
    x: &ComplexMatrix,
) -> ComplexMatrix {
    let cols = embedding.columns(offset, block.support_dim());
    let local = kron(&ComplexMatrix::identity(block.dim_a, block.dim_a), x);
    cols * local * cols.adjoint()
}

fn canonical_basis(embedding: &ComplexMatrix, blocks: &[Block]) -> Vec<ComplexMatrix> {
    let mut out = Vec::new();
    for (block, offset) in blocks.iter().zip(block_offsets(blocks)) {
        let scale = real(1.0 / (block.dim_a as f64).sqrt());
        for i in 0..block.dim_b {
            for j in 0..block.dim_b {
                let e = matrix_unit(block.dim_b, i, j);
                out.push(embed_block_operator(embedding, offset, *block, &e) * scale);
            }
        }
    }
    out
}

fn canonical_unit(embedding: &ComplexMatrix, blocks: &[Block]) -> ComplexMatrix {
    let support: usize = blocks.iter().map(Block::support_dim).sum();
    let cols = embedding.columns(0, support);
    cols * cols.adjoint()
}

impl OperatorAlgebra {
    /// Build `U (⊕_k I_{A_k} ⊗ L(B_k) ⊕ 0_K) U†` from its structure. A missing
    /// embedding means `U = I`.
    pub fn from_structure(
        blocks: Vec<Block>,
        kernel_dim: usize,
        embedding: Option<ComplexMatrix>,
    ) -> Result<Self> {
        if blocks.iter().any(|b| b.dim_a == 0 || b.dim_b == 0) {
            return Err(Error::InvalidParameter("blocks must have positive dimensions".into()));
        }
        let n: usize = blocks.iter().map(Block::support_dim).sum::<usize>() + kernel_dim;
        let embedding = embedding.unwrap_or_else(|| ComplexMatrix::identity(n, n));
        if embedding.shape() != (n, n) {
            return Err(Error::dims(format!(
                "embedding is {:?} but the blocks need {n}x{n}",
                embedding.shape()
            )));
        }
        let defect = (embedding.adjoint() * &embedding - ComplexMatrix::identity(n, n)).norm();
        if defect > 1e-8 {
            return Err(Error::InvalidParameter(format!(
                "embedding is not unitary (defect {defect:.3e})"
            )));
        }
        let basis = OperatorSubspace::from_orthonormal(n, canonical_basis(&embedding, &blocks));
        let unit = canonical_unit(&embedding, &blocks);
        Ok(Self {
            basis,
            blocks,
            embedding,
            unit,
            kernel_dim,
        })
    }

    /// `W (I_A ⊗ L(B)) W† ⊕ 0` for an isometry `W: A ⊗ B → C^n`.
    pub fn from_isometry(dim_a: usize, dim_b: usize, w: &ComplexMatrix) -> Result<Self> {
        let (n, k) = w.shape();
        if k != dim_a * dim_b || k > n {
            return Err(Error::dims(format!(
                "isometry is {n}x{k}, expected n x {} with n >= {}",
                dim_a * dim_b,
                dim_a * dim_b
            )));
        }
        let defect = (w.adjoint() * w - ComplexMatrix::identity(k, k)).norm();
        if defect > 1e-8 {
            return Err(Error::InvalidParameter(format!(
                "embedding is not an isometry (defect {defect:.3e})"
            )));
        }
        Self::from_structure(
            vec![Block::new(dim_a, dim_b)],
            n - k,
            Some(crate::numerics::complete_to_unitary(w)),
        )
    }

    /// `L(C^n)` itself.
    pub fn full(n: usize) -> Self {
        Self::from_structure(vec![Block::new(1, n)], 0, None).expect("valid structure")
    }

    /// `C · I` on `C^n`.
    pub fn scalars(n: usize) -> Self {
        Self::from_structure(vec![Block::new(n, 1)], 0, None).expect("valid structure")
    }

    /// Attach structure to a basis that spans an algebra.
    pub fn from_subspace(basis: OperatorSubspace, opts: &DecomposeOptions) -> Result<Self> {
        let structure = decompose(&basis, opts)?;
        Ok(Self::from_parts(basis, structure))
    }

    /// Pair a basis with a structure already recovered from it.
    pub(crate) fn from_parts(basis: OperatorSubspace, structure: Structure) -> Self {
        Self {
            basis,
            blocks: structure.blocks,
            embedding: structure.embedding,
            unit: structure.unit,
            kernel_dim: structure.kernel_dim,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.ambient_dim()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &OperatorSubspace {
        &self.basis
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn embedding(&self) -> &ComplexMatrix {
        &self.embedding
    }

    /// `1_𝔄`.
    pub fn unit(&self) -> &ComplexMatrix {
        &self.unit
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel_dim
    }

    pub fn contains(&self, x: &ComplexMatrix, tol: f64) -> bool {
        self.basis.contains(x, tol)
    }

    pub fn project(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.basis.project(x)
    }

    /// `U (0 ⊕ I_{A_k} ⊗ x ⊕ 0) U†` for an operator `x` on `B_k`.
    pub fn block_element(&self, k: usize, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let block = *self
            .blocks
            .get(k)
            .ok_or_else(|| Error::InvalidParameter(format!("no block {k}")))?;
        if x.shape() != (block.dim_b, block.dim_b) {
            return Err(Error::dims(format!(
                "block {k} acts on C^{}, got {:?}",
                block.dim_b,
                x.shape()
            )));
        }
        let offset = block_offsets(&self.blocks)[k];
        Ok(embed_block_operator(&self.embedding, offset, block, x))
    }

    /// Minimal central projection of block `k`.
    pub fn block_projection(&self, k: usize) -> Result<ComplexMatrix> {
        let dim_b = self.blocks.get(k).map(|b| b.dim_b).unwrap_or(0);
        self.block_element(k, &ComplexMatrix::identity(dim_b, dim_b))
    }

    /// Basis rebuilt from the structure fields alone.
    pub fn structure_basis(&self) -> OperatorSubspace {
        OperatorSubspace::from_orthonormal(
            self.ambient_dim(),
            canonical_basis(&self.embedding, &self.blocks),
        )
    }

    fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexMatrix {
        random_combination(self.basis.basis(), self.ambient_dim(), rng)
    }

    /// A positive element of maximal rank: `1_𝔄 + ε h` with `h` a random
    /// Hermitian element and `ε` chosen so the spectrum on the range of
    /// `1_𝔄` lies in `[1/2, 3/2]`.
    pub fn random_positive_full_rank(&self, seed: u64) -> Result<ComplexMatrix> {
        if self.dim() == 0 {
            return Err(Error::InvalidParameter("the zero algebra has no positive elements".into()));
        }
        let mut rng = random::rng(seed);
        let x = self.random_element(&mut rng);
        let h = (&x + x.adjoint()) * real(0.5);
        let norm = operator_norm(&h);
        let eps = if norm > 0.0 { 0.5 / norm } else { 0.0 };
        Ok(&self.unit + h * real(eps))
    }

    /// Membership in `𝔄_{>0}`: a positive element of the algebra whose rank
    /// equals the rank of `1_𝔄`.
    pub fn is_positive_full_rank(&self, a: &ComplexMatrix, tol: f64) -> Result<bool> {
        check_tol(tol)?;
        if !self.contains(a, tol) {
            return Ok(false);
        }
        let eig = match hermitian_eig(a, tol) {
            Ok(e) => e,
            Err(Error::NotHermitian { .. }) => return Ok(false),
            Err(e) => return Err(e),
        };
        let scale = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
        if eig.values.iter().any(|&v| v < -tol * scale) {
            return Ok(false);
        }
        let rank = eig.values.iter().filter(|&&v| v > tol * scale).count();
        let unit_rank = self.ambient_dim() - self.kernel_dim;
        Ok(rank == unit_rank)
    }
}

impl fmt::Display for OperatorAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| format!("I_{}⊗M_{}", b.dim_a, b.dim_b))
            .collect();
        if self.kernel_dim > 0 || parts.is_empty() {
            parts.push(format!("0_{}", self.kernel_dim));
        }
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

fn random_combination<R: Rng + ?Sized>(
    elements: &[ComplexMatrix],
    n: usize,
    rng: &mut R,
) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    elements.iter().fold(ComplexMatrix::zeros(n, n), |acc, e| {
        acc + e * crate::numerics::c64(s * random::normal(rng), s * random::normal(rng))
    })
}

/// Worst residual of `basis` under adjoints and pairwise products.
fn closure_residual(basis: &OperatorSubspace, rng: &mut SeededRng) -> f64 {
    let elems = basis.basis();
    let n = basis.ambient_dim();
    let mut worst: f64 = 0.0;
    for b in elems {
        worst = worst.max(basis.residual(&b.adjoint()));
    }
    if elems.len() <= EXHAUSTIVE_LIMIT {
        for x in elems {
            for y in elems {
                worst = worst.max(basis.residual(&(x * y)));
            }
        }
    } else {
        // A nonzero bilinear defect is nonzero on generic random pairs.
        for _ in 0..4 {
            let x = random_combination(elems, n, rng);
            let y = random_combination(elems, n, rng);
            let scale = x.norm() * y.norm();
            worst = worst.max(basis.residual(&(&x * &y)) / scale.max(1e-300));
            for b in elems.iter().take(8) {
                worst = worst.max(basis.residual(&(&x * b)) / x.norm().max(1e-300));
            }
        }
    }
    worst
}

/// Center `𝔄 ∩ 𝔄'` of the algebra spanned by `basis`.
fn center(basis: &OperatorSubspace, opts: &DecomposeOptions, rng: &mut SeededRng) -> Result<OperatorSubspace> {
    let elems = basis.basis();
    let n = basis.ambient_dim();
    let solve = |probes: &[ComplexMatrix]| -> Result<OperatorSubspace> {
        let blocks: Vec<ComplexMatrix> = probes
            .iter()
            .map(|p| {
                let comms: Vec<ComplexMatrix> = elems.iter().map(|b| b * p - p * b).collect();
                stack_vectorized(&comms, n)
            })
            .collect();
        let kernel = crate::numerics::joint_kernel(&blocks, elems.len(), opts.tol)?;
        let central = (0..kernel.ncols())
            .map(|j| {
                let coeffs: Vec<_> = kernel.column(j).iter().cloned().collect();
                basis.combine(&coeffs)
            })
            .collect();
        Ok(OperatorSubspace::from_orthonormal(n, central))
    };
    let commutes_with_all = |z: &OperatorSubspace| {
        z.basis().iter().all(|c| {
            elems
                .iter()
                .all(|b| (c * b - b * c).norm() <= opts.closure_tol())
        })
    };
    if elems.len() > EXHAUSTIVE_LIMIT {
        // The *-algebra generated by two random elements is generically all
        // of 𝔄, so commuting with them and their adjoints suffices.
        for _ in 0..MAX_DRAWS {
            let x = random_combination(elems, n, rng);
            let y = random_combination(elems, n, rng);
            let probes = [x.adjoint(), y.adjoint(), x, y];
            let z = solve(&probes)?;
            if commutes_with_all(&z) {
                return Ok(z);
            }
        }
    }
    solve(elems)
}

fn min_cluster_gap(values: &[f64], clusters: &[std::ops::Range<usize>]) -> f64 {
    clusters
        .windows(2)
        .map(|w| values[w[1].start] - values[w[0].end - 1])
        .fold(f64::INFINITY, f64::min)
}

/// Normalized Hermitian compression `Q† h Q / ‖h‖`, its eigendecomposition
/// and clusters.
fn clustered_spectrum(
    h: &ComplexMatrix,
    q: &ComplexMatrix,
) -> Result<(crate::numerics::HermitianEigen, Vec<std::ops::Range<usize>>)> {
    let mut compressed = q.adjoint() * h * q;
    let norm = operator_norm(&compressed);
    if norm > 0.0 {
        compressed *= real(1.0 / norm);
    }
    let compressed = (&compressed + compressed.adjoint()) * real(0.5);
    let eig = hermitian_eig(&compressed, 1e-8)?;
    let clusters = eig.clusters(CLUSTER_MERGE_GAP);
    Ok((eig, clusters))
}

struct RecoveredBlock {
    block: Block,
    projection: ComplexMatrix,
    /// `n x (dim_a·dim_b)` columns in `α·dim_b + β` order.
    columns: ComplexMatrix,
}

fn recover_block(
    basis: &OperatorSubspace,
    projection: ComplexMatrix,
    range: ComplexMatrix,
    opts: &DecomposeOptions,
    rng: &mut SeededRng,
) -> Result<RecoveredBlock> {
    let n = basis.ambient_dim();
    let rank = range.ncols();
    let compressed: Vec<ComplexMatrix> = basis.basis().iter().map(|b| &projection * b).collect();
    let local = OperatorSubspace::from_columns(
        n,
        &range_basis(&stack_vectorized(&compressed, n), opts.tol)?,
    )?;
    let local_dim = local.dim();
    let dim_b = (local_dim as f64).sqrt().round() as usize;
    if dim_b == 0 || dim_b * dim_b != local_dim {
        return Err(Error::Structure(format!(
            "central block of linear dimension {local_dim} is not a full matrix algebra"
        )));
    }
    if !rank.is_multiple_of(dim_b) {
        return Err(Error::Structure(format!(
            "block of rank {rank} is incompatible with dim_b = {dim_b}"
        )));
    }
    let dim_a = rank / dim_b;
    let block = Block::new(dim_a, dim_b);

    // Minimal projections: spectral projections of a random Hermitian block
    // element have dim_b clusters of multiplicity dim_a.
    let mut spectral = None;
    for _ in 0..MAX_DRAWS {
        let x = random_combination(local.basis(), n, rng);
        let h = (&x + x.adjoint()) * real(0.5);
        let (eig, clusters) = clustered_spectrum(&h, &range)?;
        let shaped = clusters.len() == dim_b && clusters.iter().all(|c| c.len() == dim_a);
        if shaped && min_cluster_gap(&eig.values, &clusters) >= CLUSTER_SEPARATION {
            spectral = Some((eig, clusters));
            break;
        }
    }
    let (eig, clusters) = spectral.ok_or_else(|| {
        Error::Structure(format!(
            "could not split a block of type I_{dim_a}⊗M_{dim_b} into minimal projections"
        ))
    })?;
    let minimal: Vec<ComplexMatrix> = clusters
        .iter()
        .map(|c| {
            let v = &range * eig.cluster_vectors(c.clone());
            &v * v.adjoint()
        })
        .collect();
    let first = &range * eig.cluster_vectors(clusters[0].clone());

    let mut columns = ComplexMatrix::zeros(n, block.support_dim());
    for alpha in 0..dim_a {
        columns.set_column(alpha * dim_b, &first.column(alpha));
    }
    for beta in 1..dim_b {
        // p_β 𝔄 p_1 is one-dimensional; normalizing a random element of it
        // gives the matrix unit e_{β1}.
        let mut unit = None;
        for _ in 0..MAX_DRAWS {
            let x = random_combination(local.basis(), n, rng);
            let t = &minimal[beta] * &x * &minimal[0];
            let c = (t.norm_squared() / dim_a as f64).sqrt();
            if c > 1e-6 * x.norm() {
                unit = Some(t * real(1.0 / c));
                break;
            }
        }
        let e = unit.ok_or_else(|| Error::Structure("degenerate matrix unit candidate".into()))?;
        let moved = &e * &first;
        for alpha in 0..dim_a {
            columns.set_column(alpha * dim_b + beta, &moved.column(alpha));
        }
    }
    Ok(RecoveredBlock {
        block,
        projection,
        columns,
    })
}

/// Recover the Wedderburn structure of the algebra spanned by `basis`.
///
/// Steps: support projection of `Σ b b†` gives `1_𝔄`; the center is solved
/// as a nullspace; a random self-adjoint central element splits the range of
/// `1_𝔄` into minimal central projections; each block's linear dimension
/// gives `dim_b²`; matrix units built from minimal projections give the
/// embedding columns.
pub fn decompose(basis: &OperatorSubspace, opts: &DecomposeOptions) -> Result<Structure> {
    check_tol(opts.tol)?;
    let n = basis.ambient_dim();
    let mut rng = random::rng(opts.seed);

    let closure = closure_residual(basis, &mut rng);
    if opts.strict && closure > opts.closure_tol() {
        return Err(Error::NotClosed {
            operation: "adjoints and products",
            residual: closure,
        });
    }

    let support = basis
        .basis()
        .iter()
        .fold(ComplexMatrix::zeros(n, n), |acc, b| acc + b * b.adjoint());
    let range = range_basis(&support, opts.tol)?;
    let unit_rank = range.ncols();

    let mut recovered = Vec::new();
    if basis.dim() > 0 {
        let z = center(basis, opts, &mut rng)?;
        if z.dim() == 0 {
            return Err(Error::Structure("nonzero algebra with trivial center".into()));
        }
        let mut split = None;
        let mut best_gap = f64::NEG_INFINITY;
        for _ in 0..MAX_DRAWS {
            let x = random_combination(z.basis(), n, &mut rng);
            let h = (&x + x.adjoint()) * real(0.5);
            let (eig, clusters) = clustered_spectrum(&h, &range)?;
            let gap = min_cluster_gap(&eig.values, &clusters);
            if clusters.len() == z.dim() && gap > best_gap {
                best_gap = gap;
                split = Some((eig, clusters));
            }
            if best_gap >= CLUSTER_SEPARATION {
                break;
            }
        }
        let (eig, clusters) = split.ok_or_else(|| {
            Error::Structure(format!(
                "center of dimension {} did not split into as many blocks",
                z.dim()
            ))
        })?;
        for c in clusters {
            let block_range = &range * eig.cluster_vectors(c);
            let projection = &block_range * block_range.adjoint();
            recovered.push(recover_block(basis, projection, block_range, opts, &mut rng)?);
        }
    }

    // Deterministic order: (dim_b, dim_a) descending, then position against
    // the reference diag(1, …, n).
    let reference_weight = |p: &ComplexMatrix| -> f64 { (0..n).map(|i| (i + 1) as f64 * p[(i, i)].re).sum() };
    recovered.sort_by(|x, y| {
        (y.block.dim_b, y.block.dim_a)
            .cmp(&(x.block.dim_b, x.block.dim_a))
            .then_with(|| reference_weight(&x.projection).total_cmp(&reference_weight(&y.projection)))
    });

    let kernel_dim = n - unit_rank;
    let mut embedding = ComplexMatrix::zeros(n, n);
    let mut offset = 0;
    for r in &recovered {
        embedding
            .view_mut((0, offset), (n, r.columns.ncols()))
            .copy_from(&r.columns);
        offset += r.columns.ncols();
    }
    if offset != unit_rank {
        return Err(Error::Structure(format!(
            "blocks cover {offset} dimensions but the unit has rank {unit_rank}"
        )));
    }
    if kernel_dim > 0 {
        let complement = ComplexMatrix::identity(n, n) - &range * range.adjoint();
        let eig = hermitian_eig(&complement, 1e-8)?;
        let k = eig.cluster_vectors(n - kernel_dim..n);
        embedding.view_mut((0, offset), (n, kernel_dim)).copy_from(&k);
    }
    let defect = (embedding.adjoint() * &embedding - ComplexMatrix::identity(n, n)).norm();
    if defect > opts.reconstruction_tol().max(1e-8) {
        return Err(Error::Structure(format!(
            "recovered embedding is not unitary (defect {defect:.3e})"
        )));
    }

    let blocks: Vec<Block> = recovered.iter().map(|r| r.block).collect();
    let rebuilt = canonical_basis(&embedding, &blocks);
    if rebuilt.len() != basis.dim() {
        return Err(Error::Structure(format!(
            "structure has dimension {} but the basis has {}",
            rebuilt.len(),
            basis.dim()
        )));
    }
    let rebuilt = OperatorSubspace::from_orthonormal(n, rebuilt);
    let worst = basis
        .basis()
        .iter()
        .map(|b| rebuilt.residual(b))
        .fold(0.0, f64::max);
    if worst > opts.reconstruction_tol() {
        return Err(Error::Structure(format!(
            "canonical form does not reproduce the basis (residual {worst:.3e})"
        )));
    }
    let unit = canonical_unit(&embedding, &blocks);
    Ok(Structure {
        blocks,
        embedding,
        unit,
        kernel_dim,
        closure_residual: closure,
    })
}

/// Smallest *-closed, product-closed subspace containing `generators`.
///
/// Words in the generators and their adjoints span the algebra; the span is
/// grown by left-multiplying new elements by an orthonormal basis of the
/// letters until nothing new appears.
pub fn generate(
    ambient_dim: usize,
    generators: &[ComplexMatrix],
    opts: &DecomposeOptions,
) -> Result<OperatorAlgebra> {
    check_tol(opts.tol)?;
    let n = ambient_dim;
    let mut letters_raw = Vec::with_capacity(2 * generators.len());
    for (k, g) in generators.iter().enumerate() {
        if g.shape() != (n, n) {
            return Err(Error::dims(format!(
                "generator {k} is {:?}, expected {n}x{n}",
                g.shape()
            )));
        }
        letters_raw.push(g.clone());
        letters_raw.push(g.adjoint());
    }
    let letters = OperatorSubspace::from_spanning(n, &letters_raw, opts.tol)?;
    let mut span: Vec<ComplexMatrix> = letters.basis().to_vec();
    let mut frontier: Vec<usize> = (0..span.len()).collect();
    let threshold = opts.closure_tol();
    while let Some(idx) = frontier.pop() {
        let v = span[idx].clone();
        for l in letters.basis() {
            let mut w = l * &v;
            // Two passes of modified Gram–Schmidt.
            for _ in 0..2 {
                for b in &span {
                    let c = hs_inner(b, &w);
                    w -= b * c;
                }
            }
            let norm = w.norm();
            if norm > threshold {
                span.push(w * real(1.0 / norm));
                frontier.push(span.len() - 1);
                assert!(span.len() <= n * n, "generated algebra exceeds L(C^n)");
            }
        }
    }
    OperatorAlgebra::from_subspace(OperatorSubspace::from_orthonormal(n, span), opts)
}

/// `{X : Xg = gX for every generator g}`.
pub fn commutant(generators: &[ComplexMatrix], ambient_dim: usize, tol: f64) -> Result<OperatorSubspace> {
    check_tol(tol)?;
    let n = ambient_dim;
    let gens = OperatorSubspace::from_spanning(n, generators, tol)?;
    let id = ComplexMatrix::identity(n, n);
    // Row-major: vec(Xg) = (I ⊗ gᵀ) vec X and vec(gX) = (g ⊗ I) vec X.
    let constraints: Vec<ComplexMatrix> = gens
        .basis()
        .iter()
        .map(|g| kron(&id, &g.transpose()) - kron(g, &id))
        .collect();
    crate::numerics::operator_nullspace(n, &constraints, tol)
}
