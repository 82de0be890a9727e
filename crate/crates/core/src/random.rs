//! Seeded random operators, channels and states.
//!
//! Every sampler takes an explicit RNG so results depend only on the seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{Block, OperatorAlgebra};
use crate::channel::QuantumChannel;
use crate::numerics::{c64, direct_sum, hermitian_eig, kron, real, ComplexMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Ginibre matrix: i.i.d. entries `(x + iy)/√2` with standard normal `x, y`.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| c64(s * normal(rng), s * normal(rng)))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, n);
    (&g + g.adjoint()) * real(0.5)
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the phases of
/// `diag(R)` divided out).
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let qr = gaussian_matrix(rng, n, n).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { real(1.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// `n x k` isometry: the first `k` columns of a Haar unitary.
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> ComplexMatrix {
    haar_unitary(rng, n).columns(0, k).into_owned()
}

/// `S^{-1/2}` for a positive definite `S`.
pub(crate) fn inverse_sqrt(s: &ComplexMatrix) -> ComplexMatrix {
    let eig = hermitian_eig(s, 1e-8).expect("Gram matrix is Hermitian");
    let n = s.nrows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        let v = eig.vectors.column(k);
        out += (v * v.adjoint()) * real(1.0 / lambda.sqrt());
    }
    out
}

/// Normalize a Kraus family so that `Σ K_i† K_i = I`. This is the polar
/// correction of the stacked operator `[K_1; …; K_k]`.
pub fn trace_preserving_normalization(kraus: &mut [ComplexMatrix]) {
    let n = kraus[0].ncols();
    let gram = kraus
        .iter()
        .fold(ComplexMatrix::zeros(n, n), |acc, k| acc + k.adjoint() * k);
    let correction = inverse_sqrt(&gram);
    for k in kraus.iter_mut() {
        *k = &*k * &correction;
    }
}

/// Random CPTP map with `k` Gaussian Kraus operators.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> QuantumChannel {
    let mut kraus: Vec<_> = (0..k).map(|_| gaussian_matrix(rng, n, n)).collect();
    trace_preserving_normalization(&mut kraus);
    QuantumChannel::new(kraus).expect("square Kraus family")
}

/// Random probability vector of length `k` (normalized exponentials).
pub fn random_probabilities<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(1e-12).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Random unital CPTP map: a mixture of `k` Haar unitaries.
pub fn random_unital_channel<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> QuantumChannel {
    let probs = random_probabilities(rng, k);
    let kraus = probs
        .iter()
        .map(|p| haar_unitary(rng, n) * real(p.sqrt()))
        .collect();
    QuantumChannel::new(kraus).expect("square Kraus family")
}

/// Algebra `U (⊕ I_a ⊗ M_b ⊕ 0_K) U†` with up to three blocks
/// (`a, b ≤ 3`), a Haar `U`, and `Σ a·b + K ≤ max_dim`. Half of the draws
/// have `K = 0`.
pub fn random_block_algebra<R: Rng + ?Sized>(rng: &mut R, max_dim: usize) -> OperatorAlgebra {
    assert!(max_dim > 0, "max_dim must be positive");
    loop {
        let mut blocks = Vec::new();
        let mut used = 0;
        for _ in 0..rng.random_range(1..=3usize) {
            let a = rng.random_range(1..=3usize);
            let b = rng.random_range(1..=3usize);
            if used + a * b <= max_dim {
                blocks.push(Block::new(a, b));
                used += a * b;
            }
        }
        if blocks.is_empty() {
            continue;
        }
        let kernel = if rng.random_bool(0.5) {
            rng.random_range(0..=max_dim - used)
        } else {
            0
        };
        let u = haar_unitary(rng, used + kernel);
        return OperatorAlgebra::from_structure(blocks, kernel, Some(u)).expect("valid structure");
    }
}

/// `k` Kraus operators on `C^d`: a unitary mixture when `unital`, otherwise
/// normalized Gaussians.
fn kraus_family<R: Rng + ?Sized>(rng: &mut R, d: usize, k: usize, unital: bool) -> Vec<ComplexMatrix> {
    if unital {
        random_probabilities(rng, k)
            .iter()
            .map(|p| haar_unitary(rng, d) * real(p.sqrt()))
            .collect()
    } else {
        let mut ops: Vec<_> = (0..k).map(|_| gaussian_matrix(rng, d, d)).collect();
        trace_preserving_normalization(&mut ops);
        ops
    }
}

/// CPTP map whose Kraus operators commute with `alg`: `G ⊗ I_B` on each
/// block and arbitrary on the kernel. With `unital` every `G` family is a
/// unitary mixture, so the map is unital and fixes `alg` pointwise.
pub fn block_commuting_channel<R: Rng + ?Sized>(
    rng: &mut R,
    alg: &OperatorAlgebra,
    k: usize,
    unital: bool,
) -> QuantumChannel {
    let mut parts: Vec<Vec<ComplexMatrix>> = alg
        .blocks()
        .iter()
        .map(|b| {
            let id_b = ComplexMatrix::identity(b.dim_b, b.dim_b);
            kraus_family(rng, b.dim_a, k, unital)
                .iter()
                .map(|g| kron(g, &id_b))
                .collect()
        })
        .collect();
    if alg.kernel_dim() > 0 {
        parts.push(kraus_family(rng, alg.kernel_dim(), k, unital));
    }
    let u = alg.embedding();
    let kraus = (0..k)
        .map(|i| {
            let local = parts
                .iter()
                .fold(ComplexMatrix::zeros(0, 0), |acc, part| direct_sum(&acc, &part[i]));
            u * local * u.adjoint()
        })
        .collect();
    QuantumChannel::new(kraus).expect("square Kraus family")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut r = rng(1);
        let u = haar_unitary(&mut r, 5);
        assert!((u.adjoint() * &u - ComplexMatrix::identity(5, 5)).norm() < 1e-12);
    }

    #[test]
    fn sampled_channels_have_expected_flags() {
        let mut r = rng(2);
        let ch = random_channel(&mut r, 4, 3);
        assert!(ch.is_trace_preserving(1e-10));
        assert!(!ch.is_unital(1e-6));
        let u = random_unital_channel(&mut r, 3, 2);
        assert!(u.is_trace_preserving(1e-10) && u.is_unital(1e-10));
    }

    #[test]
    fn same_seed_same_output() {
        let a = gaussian_matrix(&mut rng(9), 3, 3);
        let b = gaussian_matrix(&mut rng(9), 3, 3);
        assert_eq!(a, b);
    }
}
