//! Completely positive maps in Kraus form.

use crate::error::{Error, Result};
use crate::numerics::{check_tol, kron, matrix_unit, rank, real, ComplexMatrix};

/// A CP map `φ(a) = Σ_i E_i a E_i†` on `L(C^n)`.
///
/// The unital and trace-preservation residuals are computed once at
/// construction; the boolean flags compare them against a caller tolerance.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
    tp_residual: f64,
    unital_residual: f64,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty Kraus family".into()))?;
        let dim = first.nrows();
        for (i, k) in kraus.iter().enumerate() {
            if k.shape() != (dim, dim) {
                return Err(Error::dims(format!(
                    "Kraus operator {i} is {:?}, expected {dim}x{dim}",
                    k.shape()
                )));
            }
        }
        let id = ComplexMatrix::identity(dim, dim);
        let tp = kraus
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, k| acc + k.adjoint() * k);
        let unital = kraus
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, k| acc + k * k.adjoint());
        Ok(Self {
            dim,
            tp_residual: (tp - &id).norm(),
            unital_residual: (unital - &id).norm(),
            kraus,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![ComplexMatrix::identity(n, n)]).expect("identity is square")
    }

    /// Conjugation by a single operator `u`.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// Completely depolarizing map with Kraus family `{|i⟩⟨j|/√n}`.
    pub fn completely_depolarizing(n: usize) -> Self {
        let s = real(1.0 / (n as f64).sqrt());
        let kraus = (0..n * n)
            .map(|k| matrix_unit(n, k / n, k % n) * s)
            .collect();
        Self::new(kraus).expect("square Kraus family")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `Σ_i E_i x E_i†`.
    ///
    /// Panics if `x` is not `dim x dim`; see [`QuantumChannel::try_apply`].
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(x.shape(), (self.dim, self.dim), "operator dimension mismatch");
        self.kraus
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, e| {
                acc + e * x * e.adjoint()
            })
    }

    pub fn try_apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.dim, self.dim) {
            return Err(Error::dims(format!(
                "channel on C^{} applied to {:?} operator",
                self.dim,
                x.shape()
            )));
        }
        Ok(self.apply(x))
    }

    /// Dual with respect to the trace pairing: Kraus family `{E_i†}`.
    pub fn dual(&self) -> Self {
        Self {
            dim: self.dim,
            kraus: self.kraus.iter().map(|k| k.adjoint()).collect(),
            tp_residual: self.unital_residual,
            unital_residual: self.tp_residual,
        }
    }

    /// `‖Σ E_i†E_i − I‖_F`.
    pub fn tp_residual(&self) -> f64 {
        self.tp_residual
    }

    /// `‖Σ E_iE_i† − I‖_F`.
    pub fn unital_residual(&self) -> f64 {
        self.unital_residual
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.tp_residual < tol
    }

    pub fn is_unital(&self, tol: f64) -> bool {
        self.unital_residual < tol
    }

    /// Choi matrix `Σ_{ij} |i⟩⟨j| ⊗ φ(|i⟩⟨j|)`.
    pub fn choi(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let image = self.apply(&matrix_unit(n, i, j));
                out.view_mut((i * n, j * n), (n, n)).copy_from(&image);
            }
        }
        out
    }

    pub fn choi_rank(&self, tol: f64) -> Result<usize> {
        check_tol(tol)?;
        rank(&self.choi(), tol)
    }

    /// Stinespring operator `V = Σ_i |i⟩ ⊗ E_i†`, shape `(k·n) x n`, with
    /// `V†(I_k ⊗ a)V = φ(a)`.
    pub fn stinespring(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut v = ComplexMatrix::zeros(self.kraus.len() * n, n);
        for (i, e) in self.kraus.iter().enumerate() {
            v.view_mut((i * n, 0), (n, n)).copy_from(&e.adjoint());
        }
        v
    }
}

/// `outer ∘ inner`, Kraus family `{F_j E_i}`.
pub fn compose(outer: &QuantumChannel, inner: &QuantumChannel) -> Result<QuantumChannel> {
    if outer.dim != inner.dim {
        return Err(Error::dims(format!(
            "composing channels on C^{} and C^{}",
            outer.dim, inner.dim
        )));
    }
    let mut kraus = Vec::with_capacity(outer.kraus.len() * inner.kraus.len());
    for f in &outer.kraus {
        for e in &inner.kraus {
            kraus.push(f * e);
        }
    }
    QuantumChannel::new(kraus)
}

/// Frobenius distance between Choi matrices.
pub fn choi_distance(a: &QuantumChannel, b: &QuantumChannel) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::dims(format!(
            "comparing channels on C^{} and C^{}",
            a.dim, b.dim
        )));
    }
    Ok((a.choi() - b.choi()).norm())
}

/// Equality as maps (not as Kraus lists).
pub fn channels_equal(a: &QuantumChannel, b: &QuantumChannel, tol: f64) -> bool {
    matches!(choi_distance(a, b), Ok(d) if d < tol)
}

/// `I_{2}^{⊗ before} ⊗ op ⊗ I_{2}^{⊗ after}`.
pub(crate) fn embed_qubit_op(op: &ComplexMatrix, position: usize, qubits: usize) -> ComplexMatrix {
    let left = ComplexMatrix::identity(1 << position, 1 << position);
    let right_qubits = qubits - position - 1;
    let right = ComplexMatrix::identity(1 << right_qubits, 1 << right_qubits);
    kron(&kron(&left, op), &right)
}

pub(crate) fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)])
}

/// Named reference channels used throughout the tests and the CLI.
pub mod fixtures {
    use super::*;

    /// `num/den · √2^root2`, evaluated with a single rounding of √2.
    #[derive(Clone, Copy, Debug)]
    pub(crate) struct Exact {
        num: i64,
        den: i64,
        root2: u8,
    }

    pub(crate) const fn ex(num: i64, den: i64, root2: u8) -> Exact {
        Exact { num, den, root2 }
    }

    const Z: Exact = ex(0, 1, 0);
    const ONE: Exact = ex(1, 1, 0);
    const NEG: Exact = ex(-1, 1, 0);
    const R2: Exact = ex(1, 1, 1);

    impl Exact {
        fn times(self, other: Exact) -> Exact {
            ex(self.num * other.num, self.den * other.den, self.root2 + other.root2)
        }

        fn value(self) -> f64 {
            let mut num = self.num;
            let mut p = self.root2;
            while p >= 2 {
                num *= 2;
                p -= 2;
            }
            let q = num as f64 / self.den as f64;
            if p == 1 {
                q * std::f64::consts::SQRT_2
            } else {
                q
            }
        }
    }

    fn exact_matrix(n: usize, prefactor: Exact, entries: &[Exact]) -> ComplexMatrix {
        assert_eq!(entries.len(), n * n);
        ComplexMatrix::from_fn(n, n, |i, j| real(prefactor.times(entries[i * n + j]).value()))
    }

    pub const NAMES: [&str; 5] = [
        "bit_flip_3q",
        "recovery_3q",
        "counterexample_4d",
        "unital_not_tp_3d",
        "tp_not_unital_3d",
    ];

    pub fn by_name(name: &str) -> Result<QuantumChannel> {
        match name {
            "bit_flip_3q" => Ok(bit_flip_3q()),
            "recovery_3q" => Ok(recovery_3q()),
            "counterexample_4d" => Ok(counterexample_4d()),
            "unital_not_tp_3d" => Ok(unital_not_tp_3d()),
            "tp_not_unital_3d" => Ok(tp_not_unital_3d()),
            other => Err(Error::UnknownFixture(other.to_string())),
        }
    }

    /// Three-qubit bit flip: `{½ I, ½ X₁, ½ X₂, ½ X₃}`.
    pub fn bit_flip_3q() -> QuantumChannel {
        let mut kraus = vec![ComplexMatrix::identity(8, 8) * real(0.5)];
        for q in 0..3 {
            kraus.push(embed_qubit_op(&pauli_x(), q, 3) * real(0.5));
        }
        QuantumChannel::new(kraus).expect("8x8 Kraus family")
    }

    /// Projections onto `C_0 … C_3` (`span{|000⟩,|111⟩}` and its three flips).
    pub fn bit_flip_code_projections() -> [ComplexMatrix; 4] {
        let pair = |a: usize, b: usize| matrix_unit(8, a, a) + matrix_unit(8, b, b);
        [pair(0b000, 0b111), pair(0b100, 0b011), pair(0b010, 0b101), pair(0b001, 0b110)]
    }

    /// Correction for the bit flip code:
    /// `{P_{C0}, X₁P_{C1}, X₂P_{C2}, X₃P_{C3}}`.
    pub fn recovery_3q() -> QuantumChannel {
        let p = bit_flip_code_projections();
        let mut kraus = vec![p[0].clone()];
        for q in 0..3 {
            kraus.push(embed_qubit_op(&pauli_x(), q, 3) * &p[q + 1]);
        }
        QuantumChannel::new(kraus).expect("8x8 Kraus family")
    }

    /// Unital CPTP map on `M_4` whose quadratic equalities hold for a rank-one
    /// projection outside the generalized multiplicative domain.
    pub fn counterexample_4d() -> QuantumChannel {
        let half = ex(1, 2, 0);
        #[rustfmt::skip]
        let e1 = exact_matrix(4, half, &[
            ONE, Z,   ONE, Z,
            Z,   ONE, ONE, Z,
            ONE, ONE, Z,   Z,
            Z,   Z,   Z,   R2,
        ]);
        #[rustfmt::skip]
        let e2 = exact_matrix(4, half, &[
            ONE, Z,   NEG, Z,
            Z,   NEG, ONE, Z,
            NEG, ONE, Z,   Z,
            Z,   Z,   Z,   R2,
        ]);
        QuantumChannel::new(vec![e1, e2]).expect("4x4 Kraus family")
    }

    /// Unital but not trace-preserving map on `M_3`.
    pub fn unital_not_tp_3d() -> QuantumChannel {
        let half = ex(1, 2, 0);
        #[rustfmt::skip]
        let e1 = exact_matrix(3, half, &[
            R2,  Z, Z,
            ONE, Z, ONE,
            Z,   Z, R2,
        ]);
        #[rustfmt::skip]
        let e2 = exact_matrix(3, half, &[
            R2,  Z, Z,
            NEG, Z, NEG,
            Z,   Z, R2,
        ]);
        QuantumChannel::new(vec![e1, e2]).expect("3x3 Kraus family")
    }

    /// Trace-preserving but not unital map on `M_3`.
    pub fn tp_not_unital_3d() -> QuantumChannel {
        let inv_root2 = ex(1, 2, 1);
        #[rustfmt::skip]
        let e1 = exact_matrix(3, inv_root2, &[
            ONE, Z,  Z,
            Z,   R2, Z,
            Z,   Z,  ONE,
        ]);
        #[rustfmt::skip]
        let e2 = exact_matrix(3, inv_root2, &[
            Z,   Z, Z,
            ONE, Z, Z,
            Z,   Z, Z,
        ]);
        #[rustfmt::skip]
        let e3 = exact_matrix(3, inv_root2, &[
            Z, Z, Z,
            Z, Z, ONE,
            Z, Z, Z,
        ]);
        QuantumChannel::new(vec![e1, e2, e3]).expect("3x3 Kraus family")
    }
}
