//! *-homomorphisms `π: 𝔄 → L(C^n)` given by their images on a basis.

use crate::algebra::OperatorAlgebra;
use crate::channel::QuantumChannel;
use crate::error::{Error, Result};
use crate::numerics::{
    check_tol, complete_to_unitary, fix_phase, kron, matrix_unit, range_basis, rank,
    stack_vectorized, ComplexMatrix,
};

/// A linear map on an algebra, fixed by the images of its HS-orthonormal basis.
#[derive(Clone, Debug)]
pub struct Representation {
    domain: OperatorAlgebra,
    images: Vec<ComplexMatrix>,
    target_dim: usize,
}

/// Residuals reported by [`Representation::verify`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyReport {
    /// `max ‖π(a b) − π(a) π(b)‖` over basis pairs.
    pub multiplicativity: f64,
    /// `max ‖π(a†) − π(a)†‖` over the basis.
    pub adjoint: f64,
    pub faithful: bool,
    /// Threshold the residuals were judged against.
    pub threshold: f64,
}

impl VerifyReport {
    pub fn is_homomorphism(&self) -> bool {
        self.multiplicativity <= self.threshold && self.adjoint <= self.threshold
    }

    pub fn passed(&self) -> bool {
        self.is_homomorphism() && self.faithful
    }
}

/// `π(I_A ⊗ X) = U (I_m ⊗ X ⊕ 0) U†` on a single-block domain.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub multiplicity: usize,
    pub dim_b: usize,
    pub unitary: ComplexMatrix,
}

impl CanonicalForm {
    /// `U (I_m ⊗ x ⊕ 0) U†` for an operator `x` on `B`.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let k = self.multiplicity * self.dim_b;
        let cols = self.unitary.columns(0, k);
        let local = kron(&ComplexMatrix::identity(self.multiplicity, self.multiplicity), x);
        cols * local * cols.adjoint()
    }

    /// The isometry `A′ ⊗ B′ → H` formed by the first `m·dim_b` columns.
    pub fn isometry(&self) -> ComplexMatrix {
        self.unitary
            .columns(0, self.multiplicity * self.dim_b)
            .into_owned()
    }
}

impl Representation {
    pub fn new(domain: OperatorAlgebra, images: Vec<ComplexMatrix>) -> Result<Self> {
        if images.len() != domain.dim() {
            return Err(Error::dims(format!(
                "{} images for a domain of dimension {}",
                images.len(),
                domain.dim()
            )));
        }
        let target_dim = images.first().map_or(domain.ambient_dim(), |m| m.nrows());
        for (k, m) in images.iter().enumerate() {
            if m.shape() != (target_dim, target_dim) {
                return Err(Error::dims(format!(
                    "image {k} is {:?}, expected {target_dim}x{target_dim}",
                    m.shape()
                )));
            }
        }
        Ok(Self {
            domain,
            images,
            target_dim,
        })
    }

    /// `π(a) = a`.
    pub fn identity(domain: OperatorAlgebra) -> Self {
        let images = domain.basis().basis().to_vec();
        let target_dim = domain.ambient_dim();
        Self {
            domain,
            images,
            target_dim,
        }
    }

    /// `π(a) = Σ_l K_l a K_l†`.
    pub fn from_kraus_conjugation(domain: OperatorAlgebra, kraus: &[ComplexMatrix]) -> Result<Self> {
        let n = domain.ambient_dim();
        let Some(first) = kraus.first() else {
            return Err(Error::InvalidParameter("empty Kraus family".into()));
        };
        let target = first.nrows();
        for (k, m) in kraus.iter().enumerate() {
            if m.shape() != (target, n) {
                return Err(Error::dims(format!(
                    "operator {k} is {:?}, expected {target}x{n}",
                    m.shape()
                )));
            }
        }
        let images = domain
            .basis()
            .basis()
            .iter()
            .map(|b| {
                kraus
                    .iter()
                    .fold(ComplexMatrix::zeros(target, target), |acc, k| acc + k * b * k.adjoint())
            })
            .collect();
        Self::new(domain, images)
    }

    pub fn domain(&self) -> &OperatorAlgebra {
        &self.domain
    }

    pub fn images(&self) -> &[ComplexMatrix] {
        &self.images
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    /// `π(a)` for `a` in the domain, through its basis coordinates. Components
    /// of `a` outside the domain are ignored.
    pub fn apply(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let coeffs = self.domain.basis().coefficients(a);
        let t = self.target_dim;
        self.images
            .iter()
            .zip(coeffs.iter())
            .fold(ComplexMatrix::zeros(t, t), |acc, (img, &c)| acc + img * c)
    }

    pub fn try_apply(&self, a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
        if !self.domain.contains(a, tol) {
            return Err(Error::InvalidParameter(
                "operator is not in the domain algebra".into(),
            ));
        }
        Ok(self.apply(a))
    }

    /// Multiplicativity, adjoint preservation and faithfulness. Residuals are
    /// judged against `tol · max(1, s²)` with `s` the largest image norm.
    pub fn verify(&self, tol: f64) -> Result<VerifyReport> {
        check_tol(tol)?;
        let basis = self.domain.basis().basis();
        let mut multiplicativity: f64 = 0.0;
        let mut adjoint: f64 = 0.0;
        for (x, px) in basis.iter().zip(&self.images) {
            adjoint = adjoint.max((self.apply(&x.adjoint()) - px.adjoint()).norm());
            for (y, py) in basis.iter().zip(&self.images) {
                let r = (self.apply(&(x * y)) - px * py).norm();
                multiplicativity = multiplicativity.max(r);
            }
        }
        let scale = self.images.iter().map(|m| m.norm()).fold(1.0, f64::max);
        let faithful = self.images.is_empty()
            || rank(&stack_vectorized(&self.images, self.target_dim), tol)? == self.images.len();
        Ok(VerifyReport {
            multiplicativity,
            adjoint,
            faithful,
            threshold: tol * scale * scale,
        })
    }

    /// [`verify`](Self::verify), failing unless `π` is a *-homomorphism.
    pub fn ensure_homomorphism(&self, tol: f64) -> Result<VerifyReport> {
        let report = self.verify(tol)?;
        if !report.is_homomorphism() {
            return Err(Error::NotRepresentation(format!(
                "multiplicativity residual {:.3e}, adjoint residual {:.3e} (threshold {:.3e})",
                report.multiplicativity, report.adjoint, report.threshold
            )));
        }
        Ok(report)
    }

    /// `π(1_𝔄)`.
    pub fn unit_image(&self) -> ComplexMatrix {
        self.apply(self.domain.unit())
    }

    /// Multiplicity `m` and unitary `U` with `π(I_A ⊗ X) = U (I_m ⊗ X) U†`.
    ///
    /// `U` is built from the images of matrix units: an orthonormal basis
    /// `g_μ` of the range of `π(e_11)` is moved by `π(e_j1)` to give column
    /// `μ·dim_b + j`. Each `g_μ` has its first significant entry made real
    /// positive. Columns past `m·dim_b` span the complement of the range of
    /// `π(1_𝔄)` and carry no meaning.
    pub fn canonical_form(&self, tol: f64) -> Result<CanonicalForm> {
        let [block] = self.domain.blocks() else {
            return Err(Error::InvalidParameter(format!(
                "canonical form needs a single-block domain, got {}",
                self.domain
            )));
        };
        let report = self.ensure_homomorphism(tol)?;
        if !report.faithful {
            return Err(Error::NotRepresentation("representation is not faithful".into()));
        }
        let dim_b = block.dim_b;
        let n = self.target_dim;
        let unit_rank = rank(&self.unit_image(), tol)?;
        if unit_rank % dim_b != 0 {
            return Err(Error::NotRepresentation(format!(
                "rank of π(1) is {unit_rank}, not a multiple of dim B = {dim_b}"
            )));
        }
        let m = unit_rank / dim_b;
        let unit_images: Vec<ComplexMatrix> = (0..dim_b)
            .map(|j| {
                let e = self.domain.block_element(0, &matrix_unit(dim_b, j, 0))?;
                Ok(self.apply(&e))
            })
            .collect::<Result<_>>()?;
        let g = range_basis(&unit_images[0], tol)?;
        if g.ncols() != m {
            return Err(Error::NotRepresentation(format!(
                "π(e_11) has rank {} but the multiplicity is {m}",
                g.ncols()
            )));
        }
        let mut iso = ComplexMatrix::zeros(n, m * dim_b);
        for mu in 0..m {
            let mut g_mu = g.column(mu).into_owned();
            fix_phase(&mut g_mu);
            for (j, img) in unit_images.iter().enumerate() {
                iso.set_column(mu * dim_b + j, &(img * &g_mu));
            }
        }
        let form = CanonicalForm {
            multiplicity: m,
            dim_b,
            unitary: complete_to_unitary(&iso),
        };
        let scale = self.images.iter().map(|x| x.norm()).fold(1.0, f64::max);
        for i in 0..dim_b {
            for j in 0..dim_b {
                let x = matrix_unit(dim_b, i, j);
                let expected = self.apply(&self.domain.block_element(0, &x)?);
                let r = (form.apply(&x) - expected).norm();
                if r > 1e2 * tol * scale {
                    return Err(Error::Inconsistent(format!(
                        "canonical form misses π on a matrix unit by {r:.3e}"
                    )));
                }
            }
        }
        Ok(form)
    }
}

/// `φ` restricted to an algebra contained in its multiplicative domain.
pub fn md_restriction(ch: &QuantumChannel, md: &OperatorAlgebra, tol: f64) -> Result<Representation> {
    if md.ambient_dim() != ch.dim() {
        return Err(Error::dims(format!(
            "algebra on C^{} but channel on C^{}",
            md.ambient_dim(),
            ch.dim()
        )));
    }
    let images = md.basis().basis().iter().map(|b| ch.apply(b)).collect();
    let rep = Representation::new(md.clone(), images)?;
    rep.ensure_homomorphism(tol)?;
    Ok(rep)
}

/// Representations from the worked examples.
pub mod fixtures {
    use super::*;
    use crate::algebra::Block;
    use crate::channel::fixtures::bit_flip_code_projections;
    use crate::channel::{embed_qubit_op, pauli_x};

    /// `L(span{|00⟩, |01⟩})` inside `M_4`.
    pub fn corner_algebra() -> OperatorAlgebra {
        OperatorAlgebra::from_structure(vec![Block::new(1, 2)], 2, None).expect("valid structure")
    }

    /// `A ⊕ 0 ↦ A ⊕ A` on the top-left `M_2` block of `M_4`.
    pub fn doubling() -> Representation {
        let domain = corner_algebra();
        let images = domain
            .basis()
            .basis()
            .iter()
            .map(|b| {
                let a = b.view((0, 0), (2, 2)).into_owned();
                crate::numerics::direct_sum(&a, &a)
            })
            .collect();
        Representation::new(domain, images).expect("consistent shapes")
    }

    /// `L(C_0)` for `C_0 = span{|000⟩, |111⟩}`.
    pub fn code_space_algebra() -> OperatorAlgebra {
        let mut w = ComplexMatrix::zeros(8, 2);
        w[(0b000, 0)] = crate::numerics::real(1.0);
        w[(0b111, 1)] = crate::numerics::real(1.0);
        OperatorAlgebra::from_isometry(1, 2, &w).expect("isometry")
    }

    /// Conjugation by `{P_{C0}, P_{C1}X₁, P_{C2}X₂, P_{C3}X₃}` on `L(C_0)`.
    pub fn bit_flip_correction() -> Representation {
        let p = bit_flip_code_projections();
        let mut kraus = vec![p[0].clone()];
        for q in 0..3 {
            kraus.push(&p[q + 1] * embed_qubit_op(&pauli_x(), q, 3));
        }
        Representation::from_kraus_conjugation(code_space_algebra(), &kraus).expect("8x8 family")
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::algebra::Block;
    use crate::channel::fixtures::{bit_flip_3q, recovery_3q};
    use crate::numerics::{direct_sum, real, DEFAULT_TOL};
    use crate::random;

    #[test]
    fn identity_representation_is_exact() {
        let w = random::haar_unitary(&mut random::rng(5), 5);
        let alg = OperatorAlgebra::from_structure(vec![Block::new(2, 2)], 1, Some(w)).unwrap();
        let rep = Representation::identity(alg);
        let report = rep.verify(DEFAULT_TOL).unwrap();
        assert!(report.multiplicativity < 1e-14);
        assert!(report.adjoint < 1e-14);
        assert!(report.passed());
        let form = rep.canonical_form(DEFAULT_TOL).unwrap();
        assert_eq!(form.multiplicity, 2);
    }

    #[test]
    fn doubling_is_a_representation() {
        let rep = doubling();
        assert!(rep.verify(DEFAULT_TOL).unwrap().passed());
        // Oracle: the image of E_ij on the corner is E_ij ⊕ E_ij.
        for i in 0..2 {
            for j in 0..2 {
                let e = matrix_unit(2, i, j);
                let a = direct_sum(&e, &ComplexMatrix::zeros(2, 2));
                assert!((rep.apply(&a) - direct_sum(&e, &e)).norm() < 1e-14);
            }
        }
        let form = rep.canonical_form(DEFAULT_TOL).unwrap();
        assert_eq!(form.multiplicity, 2);
        let u = &form.unitary;
        assert!((u.adjoint() * u - ComplexMatrix::identity(4, 4)).norm() < 1e-12);
        for i in 0..2 {
            for j in 0..2 {
                let e = matrix_unit(2, i, j);
                assert!((form.apply(&e) - direct_sum(&e, &e)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn bit_flip_correction_is_a_representation() {
        let rep = bit_flip_correction();
        assert!(rep.verify(DEFAULT_TOL).unwrap().passed());
        assert!((rep.unit_image() - ComplexMatrix::identity(8, 8)).norm() < 1e-12);
        assert_eq!(rep.canonical_form(DEFAULT_TOL).unwrap().multiplicity, 4);
    }

    #[test]
    fn bit_flip_correction_is_dual_of_recovery() {
        let rep = bit_flip_correction();
        let dual = recovery_3q().dual();
        for b in rep.domain().basis().basis() {
            assert!((rep.apply(b) - dual.apply(b)).norm() < 1e-12);
        }
    }

    #[test]
    fn canonical_form_reproduces_images() {
        let mut rng = random::rng(17);
        let w = random::random_isometry(&mut rng, 7, 3);
        let alg = OperatorAlgebra::from_isometry(1, 3, &w).unwrap();
        let v = random::random_isometry(&mut rng, 7, 6);
        // π(x) = V (I_2 ⊗ W†xW) V†, a multiplicity-2 representation.
        let images = alg
            .basis()
            .basis()
            .iter()
            .map(|b| {
                let local = kron(&ComplexMatrix::identity(2, 2), &(w.adjoint() * b * &w));
                &v * local * v.adjoint()
            })
            .collect();
        let rep = Representation::new(alg, images).unwrap();
        let form = rep.canonical_form(DEFAULT_TOL).unwrap();
        assert_eq!(form.multiplicity, 2);
        for i in 0..3 {
            for j in 0..3 {
                let x = matrix_unit(3, i, j);
                let a = rep.domain().block_element(0, &x).unwrap();
                assert!((form.apply(&x) - rep.apply(&a)).norm() < 1e-9);
            }
        }
        let p = rep.unit_image();
        assert!((&p * &p - &p).norm() < 1e-10);
        assert!((&p - p.adjoint()).norm() < 1e-10);
    }

    #[test]
    fn canonical_form_rejects_multi_block_domains() {
        let alg = OperatorAlgebra::from_structure(vec![Block::new(1, 2), Block::new(1, 1)], 0, None).unwrap();
        let rep = Representation::identity(alg);
        assert!(matches!(rep.canonical_form(DEFAULT_TOL), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn non_multiplicative_map_fails_verification() {
        let alg = OperatorAlgebra::full(2);
        let images = alg.basis().basis().iter().map(|b| b * real(2.0)).collect();
        let rep = Representation::new(alg, images).unwrap();
        assert!(!rep.verify(DEFAULT_TOL).unwrap().is_homomorphism());
        assert!(rep.canonical_form(DEFAULT_TOL).is_err());
    }

    #[test]
    fn image_count_must_match() {
        assert!(Representation::new(OperatorAlgebra::full(2), vec![]).is_err());
    }

    #[test]
    fn restriction_to_full_algebra_for_unitary_channel() {
        let u = random::haar_unitary(&mut random::rng(4), 3);
        let ch = QuantumChannel::unitary(u.clone()).unwrap();
        let rep = md_restriction(&ch, &OperatorAlgebra::full(3), DEFAULT_TOL).unwrap();
        for b in rep.domain().basis().basis() {
            assert!((rep.apply(b) - &u * b * u.adjoint()).norm() < 1e-12);
        }
    }

    #[test]
    fn restriction_outside_the_domain_is_rejected() {
        assert!(md_restriction(&bit_flip_3q(), &OperatorAlgebra::full(8), DEFAULT_TOL).is_err());
    }
}
