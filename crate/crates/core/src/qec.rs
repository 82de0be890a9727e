//! Subsystem codes: correctability tests, the correcting representation,
//! recovery construction and the four-way equivalence suite.

use crate::algebra::{DecomposeOptions, OperatorAlgebra};
use crate::channel::QuantumChannel;
use crate::error::{Error, Result};
use crate::multdom::generalized_multiplicative_domain;
use crate::numerics::{
    check_tol, hermitian_eig, kron, matrix_unit, partial_trace, pseudo_inverse, real,
    subspace_equal, support_projection, ComplexMatrix, ComplexVector, Factor,
};
use crate::representation::Representation;

/// Factorization residual allowed when splitting the compression of `ℰ(P_C)`
/// as `σ ⊗ I`.
pub const SIGMA_FACTOR_TOL: f64 = 1e-7;
/// Factor applied to `tol` when comparing subspaces or re-verifying a result
/// produced by another routine.
const CHECK_FACTOR: f64 = 1e3;

/// `C = A ⊗ B` embedded in `C^n` by an isometry `W` whose column
/// `α·dim_b + β` is the image of `|α⟩ ⊗ |β⟩`.
#[derive(Clone, Debug)]
pub struct SubsystemCode {
    dim_a: usize,
    dim_b: usize,
    isometry: ComplexMatrix,
    algebra: OperatorAlgebra,
}

impl SubsystemCode {
    pub fn new(dim_a: usize, dim_b: usize, isometry: ComplexMatrix) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::InvalidParameter("code factors must be nonzero".into()));
        }
        let algebra = OperatorAlgebra::from_isometry(dim_a, dim_b, &isometry)?;
        Ok(Self {
            dim_a,
            dim_b,
            isometry,
            algebra,
        })
    }

    /// Subspace code spanned by `vectors` (`dim_a = 1`). Orthonormal input is
    /// kept as given; anything else is orthonormalized.
    pub fn from_span(n: usize, vectors: &[ComplexVector]) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidParameter("empty spanning set".into()));
        }
        let mut w = ComplexMatrix::zeros(n, vectors.len());
        for (j, v) in vectors.iter().enumerate() {
            if v.len() != n {
                return Err(Error::dims(format!("vector {j} has length {}, expected {n}", v.len())));
            }
            w.set_column(j, v);
        }
        let k = vectors.len();
        let gram_defect = (w.adjoint() * &w - ComplexMatrix::identity(k, k)).norm();
        if gram_defect > 1e-10 {
            let q = crate::numerics::range_basis(&w, 1e-10)?;
            if q.ncols() != k {
                return Err(Error::InvalidParameter(format!(
                    "spanning vectors have rank {} < {k}",
                    q.ncols()
                )));
            }
            w = q;
        }
        Self::new(1, k, w)
    }

    pub fn ambient_dim(&self) -> usize {
        self.isometry.nrows()
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn isometry(&self) -> &ComplexMatrix {
        &self.isometry
    }

    /// `P_C = W W†`.
    pub fn projection(&self) -> &ComplexMatrix {
        self.algebra.unit()
    }

    /// `𝔄_B = W (I_A ⊗ L(B)) W† ⊕ 0`.
    pub fn algebra(&self) -> &OperatorAlgebra {
        &self.algebra
    }

    /// `W (x ⊗ y) W†`.
    pub fn embed(&self, x: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
        &self.isometry * kron(x, y) * self.isometry.adjoint()
    }

    fn check_channel(&self, ch: &QuantumChannel) -> Result<()> {
        if ch.dim() != self.ambient_dim() {
            return Err(Error::dims(format!(
                "channel on C^{} but code in C^{}",
                ch.dim(),
                self.ambient_dim()
            )));
        }
        Ok(())
    }
}

/// Outcome of one condition: whether it holds and the residual it was
/// judged on (absent when the condition could not be evaluated).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionCheck {
    pub holds: bool,
    pub residual: Option<f64>,
}

impl ConditionCheck {
    fn judged(residual: f64, threshold: f64) -> Self {
        Self {
            holds: residual <= threshold,
            residual: Some(residual),
        }
    }

    fn unavailable() -> Self {
        Self {
            holds: false,
            residual: None,
        }
    }
}

/// Result of [`kl_subspace_test`].
#[derive(Clone, Debug)]
pub struct KlReport {
    pub correctable: bool,
    /// `λ_ij` with `P_C E_i†E_j P_C ≈ λ_ij P_C`.
    pub lambda: ComplexMatrix,
    pub residual: f64,
}

/// Compressions `W† E_i† E_j W`, indexed `[i][j]`.
fn compressions(ch: &QuantumChannel, code: &SubsystemCode) -> Vec<Vec<ComplexMatrix>> {
    let w = code.isometry();
    let ew: Vec<ComplexMatrix> = ch.kraus().iter().map(|e| e * w).collect();
    ew.iter()
        .map(|ei| ew.iter().map(|ej| ei.adjoint() * ej).collect())
        .collect()
}

/// Knill–Laflamme test for a subspace code.
pub fn kl_subspace_test(ch: &QuantumChannel, code: &SubsystemCode, tol: f64) -> Result<KlReport> {
    check_tol(tol)?;
    code.check_channel(ch)?;
    if code.dim_a() != 1 {
        return Err(Error::InvalidParameter(
            "code has a nontrivial A factor; use the subsystem test".into(),
        ));
    }
    let k = ch.kraus().len();
    let d = code.dim_b();
    let id = ComplexMatrix::identity(d, d);
    let mut lambda = ComplexMatrix::zeros(k, k);
    let mut residual: f64 = 0.0;
    for (i, row) in compressions(ch, code).iter().enumerate() {
        for (j, m) in row.iter().enumerate() {
            let l = m.trace() / real(d as f64);
            lambda[(i, j)] = l;
            residual = residual.max((m - &id * l).norm());
        }
    }
    Ok(KlReport {
        correctable: residual <= tol,
        lambda,
        residual,
    })
}

/// Operator-QEC test: every `W† E_i† E_j W` factors as `g_ij ⊗ I_B`.
pub fn subsystem_correctable_test(
    ch: &QuantumChannel,
    code: &SubsystemCode,
    tol: f64,
) -> Result<ConditionCheck> {
    check_tol(tol)?;
    code.check_channel(ch)?;
    let (a, b) = (code.dim_a(), code.dim_b());
    let id_b = ComplexMatrix::identity(b, b);
    let mut residual: f64 = 0.0;
    for row in compressions(ch, code) {
        for m in row {
            let g = partial_trace(&m, a, b, Factor::B)? / real(b as f64);
            residual = residual.max((&m - kron(&g, &id_b)).norm());
        }
    }
    Ok(ConditionCheck::judged(residual, tol))
}

/// Largest violation of `π(a)E_iP_C = E_i a` and `P_C E_i†π(a) = aE_i†` over
/// the basis of `𝔄_B`.
pub fn kraus_condition_residual(ch: &QuantumChannel, code: &SubsystemCode, rep: &Representation) -> f64 {
    let p = code.projection();
    let mut worst: f64 = 0.0;
    for a in code.algebra().basis().basis() {
        let pa = rep.apply(a);
        for e in ch.kraus() {
            worst = worst.max((&pa * e * p - e * a).norm());
            worst = worst.max((p * e.adjoint() * &pa - a * e.adjoint()).norm());
        }
    }
    worst
}

/// Result of [`find_correcting_representation`].
#[derive(Clone, Debug)]
pub struct CorrectingSolve {
    /// Present when the solve satisfies the Kraus equalities and is a
    /// faithful *-homomorphism.
    pub representation: Option<Representation>,
    /// Kraus-equality residual of the minimum-norm solve.
    pub residual: f64,
}

/// Solve `π(a) M = N(a)` with `M = [E_1P_C | … | E_kP_C]` and
/// `N(a) = [E_1a | … | E_ka]` by pseudoinverse, then verify.
pub fn find_correcting_representation(
    ch: &QuantumChannel,
    code: &SubsystemCode,
    tol: f64,
) -> Result<CorrectingSolve> {
    check_tol(tol)?;
    code.check_channel(ch)?;
    require_tp(ch, tol)?;
    let n = ch.dim();
    let k = ch.kraus().len();
    let p = code.projection();
    let hstack = |blocks: Vec<ComplexMatrix>| {
        let mut out = ComplexMatrix::zeros(n, n * k);
        for (i, b) in blocks.iter().enumerate() {
            out.view_mut((0, i * n), (n, n)).copy_from(b);
        }
        out
    };
    let m = hstack(ch.kraus().iter().map(|e| e * p).collect());
    let m_pinv = pseudo_inverse(&m, tol)?;
    let q = support_projection(&m, tol)?;
    let images = code
        .algebra()
        .basis()
        .basis()
        .iter()
        .map(|a| {
            let na = hstack(ch.kraus().iter().map(|e| e * a).collect());
            &q * (na * &m_pinv) * &q
        })
        .collect();
    let rep = Representation::new(code.algebra().clone(), images)?;
    let residual = kraus_condition_residual(ch, code, &rep);
    let report = rep.verify(tol)?;
    let representation = (residual <= tol && report.passed()).then_some(rep);
    Ok(CorrectingSolve {
        representation,
        residual,
    })
}

/// `π(a)ℰ(P_C) = ℰ(P_C)π(a) = ℰ(a)` over the basis of `𝔄_B`.
pub fn check_condition2(
    ch: &QuantumChannel,
    code: &SubsystemCode,
    rep: &Representation,
    tol: f64,
) -> Result<ConditionCheck> {
    check_tol(tol)?;
    code.check_channel(ch)?;
    let ep = ch.apply(code.projection());
    let mut worst: f64 = 0.0;
    for a in code.algebra().basis().basis() {
        let pa = rep.apply(a);
        let ea = ch.apply(a);
        worst = worst.max((&pa * &ep - &ea).norm());
        worst = worst.max((&ep * &pa - &ea).norm());
    }
    Ok(ConditionCheck::judged(worst, tol))
}

/// Noiseless test: the Kraus equalities with `π = id`.
pub fn noiseless_check(ch: &QuantumChannel, code: &SubsystemCode, tol: f64) -> Result<ConditionCheck> {
    check_tol(tol)?;
    code.check_channel(ch)?;
    let rep = Representation::identity(code.algebra().clone());
    Ok(ConditionCheck::judged(kraus_condition_residual(ch, code, &rep), tol))
}

/// A recovery channel together with the data it was built from.
#[derive(Clone, Debug)]
pub struct Recovery {
    pub channel: QuantumChannel,
    /// Multiplicity of the correcting representation (`dim A′`).
    pub multiplicity: usize,
    /// `σ_{A′}` with `W′† ℰ(P_C) W′ = σ ⊗ I_{B′}`.
    pub sigma: ComplexMatrix,
}

/// Build `R` with `R ∘ P_{C′} = (D ⊗ id) ∘ P_{C′}`, where `D` completely
/// depolarizes `A′` onto `A`, and `R` sends `C′⊥` to the code state
/// `W(|0⟩ ⊗ |0⟩)`.
pub fn build_recovery(
    ch: &QuantumChannel,
    code: &SubsystemCode,
    rep: &Representation,
    tol: f64,
) -> Result<Recovery> {
    check_tol(tol)?;
    let cond2 = check_condition2(ch, code, rep, tol)?;
    if !cond2.holds {
        return Err(Error::Hypothesis {
            requirement: format!(
                "π(a)ℰ(P_C) = ℰ(P_C)π(a) = ℰ(a) must hold (residual {:.3e})",
                cond2.residual.unwrap_or(f64::NAN)
            ),
            counterexample: None,
        });
    }
    let form = rep.canonical_form(tol)?;
    let (a, b, m) = (code.dim_a(), code.dim_b(), form.multiplicity);
    let n = code.ambient_dim();
    let w_prime = form.isometry();
    let compressed = w_prime.adjoint() * ch.apply(code.projection()) * &w_prime;
    let sigma = partial_trace(&compressed, m, b, Factor::B)? / real(b as f64);
    let factor_residual = (&compressed - kron(&sigma, &ComplexMatrix::identity(b, b))).norm();
    if factor_residual > SIGMA_FACTOR_TOL {
        return Err(Error::Inconsistent(format!(
            "ℰ(P_C) does not factor as σ ⊗ I on the corrected space (residual {factor_residual:.3e})"
        )));
    }
    let id_b = ComplexMatrix::identity(b, b);
    let scale = real(1.0 / (a as f64).sqrt());
    let mut kraus = Vec::with_capacity(a * m + n - m * b);
    for i in 0..a {
        for j in 0..m {
            let mut local = ComplexMatrix::zeros(a, m);
            local[(i, j)] = scale;
            kraus.push(code.isometry() * kron(&local, &id_b) * w_prime.adjoint());
        }
    }
    let w0 = code.isometry().column(0).into_owned();
    for l in m * b..n {
        let f = form.unitary.column(l);
        kraus.push(&w0 * f.adjoint());
    }
    let channel = QuantumChannel::new(kraus)?;
    if !channel.is_trace_preserving(CHECK_FACTOR * tol) {
        return Err(Error::Inconsistent(format!(
            "recovery is not trace-preserving (residual {:.3e})",
            channel.tp_residual()
        )));
    }
    Ok(Recovery {
        channel,
        multiplicity: m,
        sigma,
    })
}

/// Result of [`verify_correction`].
#[derive(Clone, Debug)]
pub struct Correction {
    pub corrected: bool,
    /// Largest `‖T(x ⊗ y) − W(F_A(x) ⊗ y)W†‖` over matrix units.
    pub residual: f64,
    /// The extracted `F_A`, when it is a channel.
    pub f_a: Option<QuantumChannel>,
}

/// Check `R ∘ ℰ ∘ P_C = (F_A ⊗ id_B) ∘ P_C`. `F_A` is read off from inputs
/// `x ⊗ |0⟩⟨0|` and compressed back with `|0⟩_B`.
pub fn verify_correction(
    ch: &QuantumChannel,
    recovery: &QuantumChannel,
    code: &SubsystemCode,
    tol: f64,
) -> Result<Correction> {
    check_tol(tol)?;
    code.check_channel(ch)?;
    code.check_channel(recovery)?;
    let (a, b) = (code.dim_a(), code.dim_b());
    let t = |x: &ComplexMatrix, y: &ComplexMatrix| recovery.apply(&ch.apply(&code.embed(x, y)));
    let w = code.isometry();
    let w0 = ComplexMatrix::from_fn(w.nrows(), a, |r, alpha| w[(r, alpha * b)]);
    let e00 = matrix_unit(b, 0, 0);

    let mut choi = ComplexMatrix::zeros(a * a, a * a);
    for i in 0..a {
        for j in 0..a {
            let image = w0.adjoint() * t(&matrix_unit(a, i, j), &e00) * &w0;
            choi.view_mut((i * a, j * a), (a, a)).copy_from(&image);
        }
    }
    let f_a = match hermitian_eig(&choi, CHECK_FACTOR * tol) {
        Ok(eig) if eig.values.iter().all(|&v| v >= -CHECK_FACTOR * tol) => {
            let kraus: Vec<ComplexMatrix> = eig
                .values
                .iter()
                .enumerate()
                .filter(|(_, &v)| v > CHECK_FACTOR * tol)
                .map(|(k, &v)| {
                    let col = eig.vectors.column(k);
                    ComplexMatrix::from_fn(a, a, |r, i| col[i * a + r] * real(v.sqrt()))
                })
                .collect();
            if kraus.is_empty() {
                None
            } else {
                Some(QuantumChannel::new(kraus)?)
            }
        }
        _ => None,
    };
    let Some(f) = f_a.filter(|f| f.is_trace_preserving(CHECK_FACTOR * tol)) else {
        return Ok(Correction {
            corrected: false,
            residual: f64::INFINITY,
            f_a: None,
        });
    };
    let mut residual: f64 = 0.0;
    for k in 0..a * a {
        let x = matrix_unit(a, k / a, k % a);
        let fx = f.apply(&x);
        for l in 0..b * b {
            let y = matrix_unit(b, l / b, l % b);
            residual = residual.max((t(&x, &y) - code.embed(&fx, &y)).norm());
        }
    }
    Ok(Correction {
        corrected: residual <= tol,
        residual,
        f_a: Some(f),
    })
}

fn require_tp(ch: &QuantumChannel, tol: f64) -> Result<()> {
    if ch.is_trace_preserving(tol) {
        Ok(())
    } else {
        Err(Error::Hypothesis {
            requirement: format!(
                "channel must be trace-preserving (residual {:.3e})",
                ch.tp_residual()
            ),
            counterexample: None,
        })
    }
}

/// All four correctability conditions for one channel and code.
#[derive(Clone, Debug)]
pub struct CorrectionReport {
    /// The subsystem `B` is correctable (operator-QEC factorization test).
    pub condition1: ConditionCheck,
    /// `π(a)ℰ(P_C) = ℰ(P_C)π(a) = ℰ(a)`.
    pub condition2: ConditionCheck,
    /// Kraus-level equalities for the solved `π`.
    pub condition3: ConditionCheck,
    /// `MD_π(ℰ) = 𝔄_B`; the residual is the largest principal angle.
    pub condition4: ConditionCheck,
    pub noiseless: ConditionCheck,
    pub representation: Option<Representation>,
    pub recovery: Option<Recovery>,
    pub correction: Option<Correction>,
}

impl CorrectionReport {
    pub fn flags(&self) -> [bool; 4] {
        [
            self.condition1.holds,
            self.condition2.holds,
            self.condition3.holds,
            self.condition4.holds,
        ]
    }

    pub fn correctable(&self) -> bool {
        self.condition1.holds
    }
}

/// Evaluate every condition, insist they agree, and for correctable codes
/// build and verify a recovery.
pub fn correction_suite(
    ch: &QuantumChannel,
    code: &SubsystemCode,
    opts: &DecomposeOptions,
) -> Result<CorrectionReport> {
    let tol = opts.tol;
    check_tol(tol)?;
    code.check_channel(ch)?;
    require_tp(ch, tol)?;
    let condition1 = subsystem_correctable_test(ch, code, tol)?;
    let solve = find_correcting_representation(ch, code, tol)?;
    let condition3 = ConditionCheck {
        holds: solve.representation.is_some(),
        residual: Some(solve.residual),
    };
    let (condition2, condition4) = match &solve.representation {
        Some(rep) => {
            let c2 = check_condition2(ch, code, rep, tol)?;
            let md = generalized_multiplicative_domain(ch, rep, opts)?;
            let cmp = subspace_equal(md.subspace(), code.algebra().basis(), CHECK_FACTOR * tol)?;
            let c4 = ConditionCheck {
                holds: cmp.equal,
                residual: Some(cmp.max_angle),
            };
            (c2, c4)
        }
        None => (ConditionCheck::unavailable(), ConditionCheck::unavailable()),
    };
    let noiseless = noiseless_check(ch, code, tol)?;
    let mut report = CorrectionReport {
        condition1,
        condition2,
        condition3,
        condition4,
        noiseless,
        representation: solve.representation,
        recovery: None,
        correction: None,
    };
    let flags = report.flags();
    if flags.iter().any(|&f| f != flags[0]) {
        return Err(Error::Inconsistent(format!(
            "correctability conditions disagree: {flags:?} (residuals {:?}, {:?}, {:?}, {:?})",
            report.condition1.residual,
            report.condition2.residual,
            report.condition3.residual,
            report.condition4.residual
        )));
    }
    if report.noiseless.holds && !flags[0] {
        return Err(Error::Inconsistent("noiseless code reported as not correctable".into()));
    }
    if let Some(rep) = &report.representation {
        let recovery = build_recovery(ch, code, rep, tol)?;
        let correction = verify_correction(ch, &recovery.channel, code, CHECK_FACTOR * tol)?;
        if !correction.corrected {
            return Err(Error::Inconsistent(format!(
                "built recovery fails verification (residual {:.3e})",
                correction.residual
            )));
        }
        report.recovery = Some(recovery);
        report.correction = Some(correction);
    }
    Ok(report)
}

/// Named codes and seeded model generators.
pub mod fixtures {
    use super::*;
    use crate::random::{self, SeededRng};

    pub const NAMES: [&str; 6] = ["c0", "c1", "c2", "c3", "flip_pair", "non_code"];

    fn basis_state(n: usize, k: usize) -> ComplexVector {
        let mut v = ComplexVector::zeros(n);
        v[k] = real(1.0);
        v
    }

    /// Basis states of `C_k`: `|000⟩,|111⟩` and the single-qubit flips of
    /// that pair.
    pub fn code_states(k: usize) -> [usize; 2] {
        [[0b000, 0b111], [0b100, 0b011], [0b010, 0b101], [0b001, 0b110]][k]
    }

    /// `C_k` as a subspace code in `C^8`.
    pub fn bit_flip_code(k: usize) -> SubsystemCode {
        let [s, t] = code_states(k);
        SubsystemCode::from_span(8, &[basis_state(8, s), basis_state(8, t)]).expect("orthonormal")
    }

    /// `C_0 ⊕ C_1` read as `A ⊗ B` with `A` selecting the summand.
    pub fn flip_pair_code() -> SubsystemCode {
        let mut w = ComplexMatrix::zeros(8, 4);
        for (col, state) in [0b000, 0b111, 0b100, 0b011].into_iter().enumerate() {
            w[(state, col)] = real(1.0);
        }
        SubsystemCode::new(2, 2, w).expect("isometry")
    }

    /// `span{|000⟩, |100⟩}`, not correctable for the bit flip channel.
    pub fn non_code() -> SubsystemCode {
        SubsystemCode::from_span(8, &[basis_state(8, 0b000), basis_state(8, 0b100)]).expect("orthonormal")
    }

    pub fn by_name(name: &str) -> Result<SubsystemCode> {
        match name {
            "c0" => Ok(bit_flip_code(0)),
            "c1" => Ok(bit_flip_code(1)),
            "c2" => Ok(bit_flip_code(2)),
            "c3" => Ok(bit_flip_code(3)),
            "flip_pair" => Ok(flip_pair_code()),
            "non_code" => Ok(non_code()),
            other => Err(Error::UnknownFixture(other.to_string())),
        }
    }

    /// Random code `A ⊗ B ⊂ C^n`.
    pub fn random_code(rng: &mut SeededRng, dim_a: usize, dim_b: usize, n: usize) -> SubsystemCode {
        let w = random::random_isometry(rng, n, dim_a * dim_b);
        SubsystemCode::new(dim_a, dim_b, w).expect("isometry")
    }

    /// Random Kraus family `n_out x n_in` with `Σ K†K = I`.
    fn random_kraus(rng: &mut SeededRng, n_out: usize, n_in: usize, k: usize) -> Vec<ComplexMatrix> {
        let mut kraus: Vec<_> = (0..k).map(|_| random::gaussian_matrix(rng, n_out, n_in)).collect();
        random::trace_preserving_normalization(&mut kraus);
        kraus
    }

    /// `ℰ = (F_A ⊗ id_B) ⊕ G` on `C ⊕ C⊥` with random `F_A` and `G`, both with
    /// `kraus` operators. Nothing leaks between `C` and `C⊥`.
    pub fn noiseless_model(
        seed: u64,
        dim_a: usize,
        dim_b: usize,
        n: usize,
        kraus: usize,
    ) -> Result<(QuantumChannel, SubsystemCode)> {
        let d = dim_a * dim_b;
        if d == 0 || d > n || kraus == 0 {
            return Err(Error::InvalidParameter(format!(
                "no noiseless model with dim A·B = {d} in C^{n} and {kraus} Kraus operators"
            )));
        }
        let mut rng = random::rng(seed);
        let code = random_code(&mut rng, dim_a, dim_b, n);
        let u = crate::numerics::complete_to_unitary(code.isometry());
        let w_perp = u.columns(d, n - d).into_owned();
        let f_a = random_kraus(&mut rng, dim_a, dim_a, kraus);
        let g = if n > d {
            random_kraus(&mut rng, n - d, n - d, kraus)
        } else {
            vec![ComplexMatrix::zeros(0, 0); kraus]
        };
        let id_b = ComplexMatrix::identity(dim_b, dim_b);
        let ops = f_a
            .iter()
            .zip(&g)
            .map(|(fa, gi)| {
                code.embed(fa, &id_b) + &w_perp * gi * w_perp.adjoint()
            })
            .collect();
        Ok((QuantumChannel::new(ops)?, code))
    }

    /// Correctable model: branch `l` sends `C` into its own copy
    /// `V_l(A ⊗ B)` with `E_l P_C = V_l (N_l ⊗ I_B) W†`, where `{N_l}` is a
    /// random channel on `A` and the `V_l` have orthogonal ranges. `C⊥` is
    /// sent anywhere by `leak` extra Kraus operators.
    pub fn correctable_model(
        seed: u64,
        dim_a: usize,
        dim_b: usize,
        n: usize,
        branches: usize,
        leak: usize,
    ) -> Result<(QuantumChannel, SubsystemCode)> {
        let d = dim_a * dim_b;
        if d == 0 || branches == 0 || branches * d > n || (leak == 0 && n > d) {
            return Err(Error::InvalidParameter(format!(
                "no correctable model with {branches} branches of dimension {d} in C^{n}"
            )));
        }
        let mut rng = random::rng(seed);
        let code = random_code(&mut rng, dim_a, dim_b, n);
        let u = crate::numerics::complete_to_unitary(code.isometry());
        let w_perp = u.columns(d, n - d).into_owned();
        let targets = random::haar_unitary(&mut rng, n);
        let n_ops = random_kraus(&mut rng, dim_a, dim_a, branches);
        let id_b = ComplexMatrix::identity(dim_b, dim_b);
        let mut ops: Vec<ComplexMatrix> = n_ops
            .iter()
            .enumerate()
            .map(|(l, nl)| {
                let v = targets.columns(l * d, d);
                v * kron(nl, &id_b) * code.isometry().adjoint()
            })
            .collect();
        if n > d {
            for y in random_kraus(&mut rng, n, n - d, leak) {
                ops.push(y * w_perp.adjoint());
            }
        }
        Ok((QuantumChannel::new(ops)?, code))
    }
}
