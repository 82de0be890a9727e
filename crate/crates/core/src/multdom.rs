//! Multiplicative domains, generalized multiplicative domains and bimodule
//! tests for CP maps.
//!
//! Every solver here turns a "for all `b`" condition into finitely many
//! linear constraints by letting `b` run over a basis, and solves for the
//! coordinates of `a` in a basis of the search space.

use std::fmt;

use crate::algebra::{decompose, DecomposeOptions, OperatorAlgebra};
use crate::channel::QuantumChannel;
use crate::error::{Error, Result};
use crate::numerics::{
    check_tol, joint_kernel, kron, subspace_equal, vectorize, ComplexMatrix, OperatorSubspace,
};
use crate::random;
use crate::representation::Representation;

/// Factor applied to `tol` for internal consistency checks between routes
/// that should agree exactly.
const CHECK_FACTOR: f64 = 1e3;

/// Which linear system produced a [`MultDomResult`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// `φ(ab) = π(a)φ(b)`, `φ(ba) = φ(b)π(a)` over a basis of `b`.
    DefinitionSystem,
    /// `π(a)E_iP − E_i a = 0` and `P E_i†π(a) − aE_i† = 0` for each Kraus operator.
    KrausSystem,
    /// `φ(1_𝔄)π(a) = φ(a) = π(a)φ(1_𝔄)`.
    UnitCharacterization,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::DefinitionSystem => "definition-system",
            Method::KrausSystem => "kraus-system",
            Method::UnitCharacterization => "unit-characterization",
        })
    }
}

/// A solved domain together with its recovered algebra structure.
#[derive(Clone, Debug)]
pub struct MultDomResult {
    pub algebra: OperatorAlgebra,
    pub method: Method,
    /// Largest constraint residual over the returned basis.
    pub worst_residual: f64,
    /// Largest residual of the basis under adjoints and products.
    pub closure_residual: f64,
}

impl MultDomResult {
    pub fn subspace(&self) -> &OperatorSubspace {
        self.algebra.basis()
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }
}

/// Solve `f(a) = 0` for `a` in `space`, where `f` returns a list of
/// operators that must all vanish and is linear in `a`.
fn solve_linear<F>(space: &OperatorSubspace, tol: f64, f: F) -> Result<(OperatorSubspace, f64)>
where
    F: Fn(&ComplexMatrix) -> Vec<ComplexMatrix>,
{
    let n = space.ambient_dim();
    let d = space.dim();
    let columns: Vec<Vec<ComplexMatrix>> = space.basis().iter().map(&f).collect();
    let rows: usize = columns
        .first()
        .map_or(0, |c| c.iter().map(|m| m.nrows() * m.ncols()).sum());
    let mut system = ComplexMatrix::zeros(rows, d);
    for (k, outputs) in columns.iter().enumerate() {
        let mut offset = 0;
        for m in outputs {
            let v = vectorize(m);
            system.view_mut((offset, k), (v.len(), 1)).copy_from(&v);
            offset += v.len();
        }
    }
    let kernel = if rows == 0 {
        ComplexMatrix::identity(d, d)
    } else {
        joint_kernel(&[system], d, tol)?
    };
    let basis: Vec<ComplexMatrix> = (0..kernel.ncols())
        .map(|j| {
            let coeffs: Vec<_> = kernel.column(j).iter().cloned().collect();
            space.combine(&coeffs)
        })
        .collect();
    let worst = basis
        .iter()
        .flat_map(|a| f(a).into_iter().map(|m| m.norm()))
        .fold(0.0, f64::max);
    Ok((OperatorSubspace::from_orthonormal(n, basis), worst))
}

fn finish(
    subspace: OperatorSubspace,
    worst_residual: f64,
    method: Method,
    opts: &DecomposeOptions,
) -> Result<MultDomResult> {
    let structure = decompose(&subspace, opts)?;
    let closure_residual = structure.closure_residual;
    Ok(MultDomResult {
        algebra: OperatorAlgebra::from_parts(subspace, structure),
        method,
        worst_residual,
        closure_residual,
    })
}

fn require_same_dims(ch: &QuantumChannel, rep: &Representation) -> Result<()> {
    let n = ch.dim();
    if rep.domain().ambient_dim() != n || rep.target_dim() != n {
        return Err(Error::dims(format!(
            "channel on C^{n} but representation maps L(C^{}) to L(C^{})",
            rep.domain().ambient_dim(),
            rep.target_dim()
        )));
    }
    Ok(())
}

fn require_tp(ch: &QuantumChannel, tol: f64) -> Result<()> {
    if ch.is_trace_preserving(tol) {
        Ok(())
    } else {
        Err(Error::Hypothesis {
            requirement: format!(
                "map must be trace-preserving (residual {:.3e})",
                ch.tp_residual()
            ),
            counterexample: Some("unital_not_tp_3d"),
        })
    }
}

fn require_unital(ch: &QuantumChannel, tol: f64) -> Result<()> {
    if ch.is_unital(tol) {
        Ok(())
    } else {
        Err(Error::Hypothesis {
            requirement: format!("map must be unital (residual {:.3e})", ch.unital_residual()),
            counterexample: Some("tp_not_unital_3d"),
        })
    }
}

/// `MD(φ) = {a : φ(ab) = φ(a)φ(b), φ(ba) = φ(b)φ(a) ∀ b}`.
pub fn multiplicative_domain(ch: &QuantumChannel, opts: &DecomposeOptions) -> Result<MultDomResult> {
    check_tol(opts.tol)?;
    let n = ch.dim();
    let probes = OperatorSubspace::full(n);
    let probe_images: Vec<ComplexMatrix> = probes.basis().iter().map(|b| ch.apply(b)).collect();
    let (subspace, worst) = solve_linear(&probes, opts.tol, |a| {
        let pa = ch.apply(a);
        let mut out = Vec::with_capacity(2 * probe_images.len());
        for (b, pb) in probes.basis().iter().zip(&probe_images) {
            out.push(ch.apply(&(a * b)) - &pa * pb);
            out.push(ch.apply(&(b * a)) - pb * &pa);
        }
        out
    })?;
    finish(subspace, worst, Method::DefinitionSystem, opts)
}

/// `MD_π(φ) = {a ∈ 𝔄 : π(a)φ(b) = φ(ab), φ(b)π(a) = φ(ba) ∀ b ∈ 𝔄}`.
pub fn generalized_multiplicative_domain(
    ch: &QuantumChannel,
    rep: &Representation,
    opts: &DecomposeOptions,
) -> Result<MultDomResult> {
    check_tol(opts.tol)?;
    require_same_dims(ch, rep)?;
    rep.ensure_homomorphism(opts.tol)?;
    let domain = rep.domain().basis();
    let probe_images: Vec<ComplexMatrix> = domain.basis().iter().map(|b| ch.apply(b)).collect();
    let (subspace, worst) = solve_linear(domain, opts.tol, |a| {
        let pa = rep.apply(a);
        let mut out = Vec::with_capacity(2 * probe_images.len());
        for (b, phib) in domain.basis().iter().zip(&probe_images) {
            out.push(&pa * phib - ch.apply(&(a * b)));
            out.push(phib * &pa - ch.apply(&(b * a)));
        }
        out
    })?;
    finish(subspace, worst, Method::DefinitionSystem, opts)
}

/// `MD_π(ℰ)` for trace-preserving `ℰ` from the Kraus-level equalities,
/// with `P = 1_𝔄`.
pub fn md_pi_kraus(
    ch: &QuantumChannel,
    rep: &Representation,
    opts: &DecomposeOptions,
) -> Result<MultDomResult> {
    check_tol(opts.tol)?;
    require_same_dims(ch, rep)?;
    require_tp(ch, opts.tol)?;
    rep.ensure_homomorphism(opts.tol)?;
    let p = rep.domain().unit();
    let kraus_p: Vec<ComplexMatrix> = ch.kraus().iter().map(|e| e * p).collect();
    let p_kraus_adj: Vec<ComplexMatrix> = ch.kraus().iter().map(|e| p * e.adjoint()).collect();
    let (subspace, worst) = solve_linear(rep.domain().basis(), opts.tol, |a| {
        let pa = rep.apply(a);
        let mut out = Vec::with_capacity(2 * ch.kraus().len());
        for ((e, ep), pe) in ch.kraus().iter().zip(&kraus_p).zip(&p_kraus_adj) {
            out.push(&pa * ep - e * a);
            out.push(pe * &pa - a * e.adjoint());
        }
        out
    })?;
    finish(subspace, worst, Method::KrausSystem, opts)
}

/// `max(‖φ(a)†φ(a) − φ(a†a)‖, ‖φ(a)φ(a)† − φ(aa†)‖)`.
pub fn choi_residual(ch: &QuantumChannel, a: &ComplexMatrix) -> Result<f64> {
    let pa = ch.try_apply(a)?;
    let left = (pa.adjoint() * &pa - ch.apply(&(a.adjoint() * a))).norm();
    let right = (&pa * pa.adjoint() - ch.apply(&(a * a.adjoint()))).norm();
    Ok(left.max(right))
}

/// Both Choi equalities for a unital `φ`, relative to `‖a‖²`.
pub fn choi_equalities_hold(ch: &QuantumChannel, a: &ComplexMatrix, tol: f64) -> Result<bool> {
    check_tol(tol)?;
    require_unital(ch, tol)?;
    Ok(choi_residual(ch, a)? <= tol * a.norm_squared().max(1.0))
}

/// `MD(φ)` for unital `φ`, checked against the Choi equalities: every basis
/// element must satisfy them, and random elements orthogonal to `MD(φ)` must
/// violate them.
pub fn choi_md_characterization(ch: &QuantumChannel, opts: &DecomposeOptions) -> Result<OperatorSubspace> {
    check_tol(opts.tol)?;
    require_unital(ch, opts.tol)?;
    let md = multiplicative_domain(ch, opts)?;
    let check_tol = CHECK_FACTOR * opts.tol;
    for (k, a) in md.subspace().basis().iter().enumerate() {
        if !choi_equalities_hold(ch, a, check_tol)? {
            return Err(Error::Inconsistent(format!(
                "basis element {k} of MD fails the Choi equalities (residual {:.3e})",
                choi_residual(ch, a)?
            )));
        }
    }
    let n = ch.dim();
    if md.dim() < n * n {
        let mut rng = random::rng(opts.seed);
        for _ in 0..3 {
            let x = random::gaussian_matrix(&mut rng, n, n);
            let x = &x - md.subspace().project(&x);
            let x = &x / crate::numerics::real(x.norm());
            if choi_equalities_hold(ch, &x, check_tol)? {
                return Err(Error::Inconsistent(
                    "an element outside MD satisfies the Choi equalities".into(),
                ));
            }
        }
    }
    Ok(md.subspace().clone())
}

/// `max(‖ℰ(a)π(a) − ℰ(a²)‖, ‖π(a)ℰ(a) − ℰ(a²)‖)`.
pub fn genchar_residual(ch: &QuantumChannel, rep: &Representation, a: &ComplexMatrix) -> Result<f64> {
    require_same_dims(ch, rep)?;
    let ea = ch.try_apply(a)?;
    let pa = rep.apply(a);
    let ea2 = ch.apply(&(a * a));
    Ok((&ea * &pa - &ea2).norm().max((&pa * &ea - &ea2).norm()))
}

/// `ℰ(a)π(a) = ℰ(a²) = π(a)ℰ(a)` for unital trace-preserving `ℰ` and
/// `a ∈ 𝔄`, relative to `‖a‖²`.
pub fn genchar_equalities_hold(
    ch: &QuantumChannel,
    rep: &Representation,
    a: &ComplexMatrix,
    tol: f64,
) -> Result<bool> {
    check_tol(tol)?;
    require_unital(ch, tol)?;
    require_tp(ch, tol)?;
    if !rep.domain().contains(a, tol) {
        return Err(Error::InvalidParameter("operator is not in the domain algebra".into()));
    }
    Ok(genchar_residual(ch, rep, a)? <= tol * a.norm_squared().max(1.0))
}

/// Solutions of `ℰ(1_𝔄)π(a) = ℰ(a) = π(a)ℰ(1_𝔄)` over `𝔄` for unital
/// trace-preserving `ℰ`. The result is compared with
/// [`generalized_multiplicative_domain`]; disagreement is an error.
pub fn genchar2_set(
    ch: &QuantumChannel,
    rep: &Representation,
    opts: &DecomposeOptions,
) -> Result<MultDomResult> {
    check_tol(opts.tol)?;
    require_same_dims(ch, rep)?;
    require_unital(ch, opts.tol)?;
    require_tp(ch, opts.tol)?;
    rep.ensure_homomorphism(opts.tol)?;
    let unit_image = ch.apply(rep.domain().unit());
    let (subspace, worst) = solve_linear(rep.domain().basis(), opts.tol, |a| {
        let pa = rep.apply(a);
        let ea = ch.apply(a);
        vec![&unit_image * &pa - &ea, &pa * &unit_image - ea]
    })?;
    let result = finish(subspace, worst, Method::UnitCharacterization, opts)?;
    let reference = generalized_multiplicative_domain(ch, rep, opts)?;
    let cmp = subspace_equal(result.subspace(), reference.subspace(), CHECK_FACTOR * opts.tol)?;
    if !cmp.equal {
        return Err(Error::Inconsistent(format!(
            "unit characterization (dim {}) and definition system (dim {}) differ, angle {:.3e}",
            result.dim(),
            reference.dim(),
            cmp.max_angle
        )));
    }
    Ok(result)
}

/// Row-major transfer matrix `S` with `vec φ(x) = S vec x`.
fn transfer_matrix(ch: &QuantumChannel) -> ComplexMatrix {
    let n = ch.dim();
    ch.kraus()
        .iter()
        .fold(ComplexMatrix::zeros(n * n, n * n), |acc, k| acc + kron(k, &k.conjugate()))
}

/// Largest violation of `φ(ab) = aφ(b)`, `φ(ba) = φ(b)a` over `a` in the
/// algebra basis and `b` in an orthonormal basis of `L(H)`.
pub fn bimodule_residual(ch: &QuantumChannel, alg: &OperatorAlgebra) -> Result<f64> {
    let n = ch.dim();
    if alg.ambient_dim() != n {
        return Err(Error::dims(format!(
            "algebra on C^{} but channel on C^{n}",
            alg.ambient_dim()
        )));
    }
    let s = transfer_matrix(ch);
    let id = ComplexMatrix::identity(n, n);
    let mut worst: f64 = 0.0;
    for a in alg.basis().basis() {
        // b ↦ ab is a ⊗ I and b ↦ ba is I ⊗ aᵀ in row-major coordinates.
        let left = kron(a, &id);
        let right = kron(&id, &a.transpose());
        worst = worst.max((&s * &left - &left * &s).norm());
        worst = worst.max((&s * &right - &right * &s).norm());
    }
    Ok(worst)
}

/// Whether `alg` is a `φ`-bimodule.
pub fn is_bimodule(ch: &QuantumChannel, alg: &OperatorAlgebra, tol: f64) -> Result<bool> {
    check_tol(tol)?;
    Ok(bimodule_residual(ch, alg)? <= tol * ch.kraus().iter().map(|k| k.norm_squared()).sum::<f64>().max(1.0))
}

/// `φ(1)a = φ(a) = aφ(1)` over the algebra basis. Only meaningful when the
/// algebra contains the identity of the ambient space.
pub fn bimodule_characterization(ch: &QuantumChannel, alg: &OperatorAlgebra, tol: f64) -> Result<bool> {
    check_tol(tol)?;
    let n = ch.dim();
    if alg.ambient_dim() != n {
        return Err(Error::dims(format!(
            "algebra on C^{} but channel on C^{n}",
            alg.ambient_dim()
        )));
    }
    if !alg.contains(&ComplexMatrix::identity(n, n), tol) {
        return Err(Error::Hypothesis {
            requirement: "algebra must contain the identity operator".into(),
            counterexample: None,
        });
    }
    let phi_one = ch.apply(&ComplexMatrix::identity(n, n));
    let scale = phi_one.norm().max(1.0);
    let worst = alg
        .basis()
        .basis()
        .iter()
        .map(|a| {
            let pa = ch.apply(a);
            (&phi_one * a - &pa).norm().max((a * &phi_one - pa).norm())
        })
        .fold(0.0, f64::max);
    Ok(worst <= tol * scale)
}
