// Checks are written as `ensure!(err < tol)` so that a NaN error fails.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line.

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;

use qmd_core::algebra::{commutant, decompose, DecomposeOptions, OperatorAlgebra};
use qmd_core::channel::fixtures as chf;
use qmd_core::channel::{choi_distance, compose, QuantumChannel};
use qmd_core::multdom::{
    choi_residual, genchar2_set, genchar_residual, generalized_multiplicative_domain, is_bimodule,
    md_pi_kraus, multiplicative_domain,
};
use qmd_core::numerics::{matrix_unit, real, subspace_equal, ComplexMatrix, OperatorSubspace};
use qmd_core::qec::fixtures as codes;
use qmd_core::qec::{correction_suite, kl_subspace_test, noiseless_check, verify_correction, SubsystemCode};
use qmd_core::random::{self, SeededRng};
use qmd_core::representation::fixtures as reps;
use qmd_core::representation::Representation;
use qmd_core::Error;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T>(r: qmd_core::Result<T>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn opts() -> DecomposeOptions {
    DecomposeOptions::default()
}

fn diag(values: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(values.len(), values.len(), |i, j| {
        if i == j {
            real(values[i])
        } else {
            real(0.0)
        }
    })
}

fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn angle(a: &OperatorSubspace, b: &OperatorSubspace) -> Result<f64, String> {
    Ok(ok(subspace_equal(a, b, 1e-8), "subspace comparison")?.max_angle)
}

fn criterion1() -> Outcome {
    let ch = chf::counterexample_4d();
    let rep = reps::doubling();
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mut c = [0.0; 4];
            c[2 * i + j] = 1.0;
            let [c1, c2, c3, c4] = c;
            #[rustfmt::skip]
            let expected = ComplexMatrix::from_row_slice(4, 4, &[
                c1,  0.0, c2,      0.0,
                0.0, c4,  c3,      0.0,
                c3,  c2,  c1 + c4, 0.0,
                0.0, 0.0, 0.0,     0.0,
            ].map(|x| real(0.5 * x)));
            worst = worst.max(max_abs(&(ch.apply(&matrix_unit(4, i, j)) - expected)));
        }
    }
    ensure!(worst < 1e-12, "image formula off by {worst:.3e}");
    let a = matrix_unit(4, 0, 0);
    let ea2 = ch.apply(&(&a * &a));
    let ea = ch.apply(&a);
    let pa = rep.apply(&a);
    let quad = max_abs(&(&ea2 - &ea * &pa)).max(max_abs(&(&ea2 - &pa * &ea)));
    ensure!(quad < 1e-12, "quadratic equalities for |00><00| off by {quad:.3e}");
    let md = ok(generalized_multiplicative_domain(&ch, &rep, &opts()), "MD_pi")?;
    ensure!(md.dim() < 4, "MD_pi has dimension {}", md.dim());
    ensure!(!md.algebra.contains(&a, 1e-9), "|00><00| reported inside MD_pi");
    Ok(format!("image error {worst:.1e}, quadratic {quad:.1e}, dim MD_pi = {}", md.dim()))
}

fn criterion2() -> Outcome {
    let phi = chf::unital_not_tp_3d();
    let b = matrix_unit(3, 0, 0);
    let id = ComplexMatrix::identity(3, 3);
    let mut worst: f64 = 0.0;
    let mut check = |got: ComplexMatrix, want: &[f64]| {
        worst = worst.max(max_abs(&(got - diag(want))));
    };

    let a = diag(&[1.0, 2.5, 3.0]);
    let a2 = phi.apply(&(&a * &a));
    let quad = max_abs(&(&a * phi.apply(&a) - &a2)).max(max_abs(&(phi.apply(&a) * &a - &a2)));
    check(phi.apply(&(&b * &a)), &[1.0, 0.5, 0.0]);
    check(phi.apply(&b) * &a, &[1.0, 1.25, 0.0]);

    let a1 = diag(&[1.0, 2.0, 3.0]);
    let phi_id = phi.apply(&id);
    check(&phi_id * &a1, &[1.0, 2.0, 3.0]);
    check(phi.apply(&a1), &[1.0, 2.0, 3.0]);
    check(&a1 * &phi_id, &[1.0, 2.0, 3.0]);
    check(phi.apply(&(&b * &a1)), &[1.0, 0.5, 0.0]);
    check(phi.apply(&b) * &a1, &[1.0, 1.0, 0.0]);
    ensure!(worst < 1e-12 && quad < 1e-12, "displayed values off by {:.3e}", worst.max(quad));

    let identity = Representation::identity(OperatorAlgebra::full(3));
    for (name, ch) in [("unital_not_tp_3d", phi.clone()), ("tp_not_unital_3d", chf::tp_not_unital_3d())] {
        match genchar2_set(&ch, &identity, &opts()) {
            Err(Error::Hypothesis { .. }) => {}
            Err(e) => return Err(format!("{name}: wrong error {e}")),
            Ok(_) => return Err(format!("{name}: unit characterization did not refuse")),
        }
    }
    Ok(format!("max entry error {:.1e}, both variants refused", worst.max(quad)))
}

fn criterion3() -> Outcome {
    let ch = chf::bit_flip_3q();
    let code = codes::bit_flip_code(0);
    let report = ok(correction_suite(&ch, &code, &opts()), "suite")?;
    ensure!(report.flags() == [true; 4], "flags {:?}", report.flags());
    let rep = report.representation.as_ref().ok_or("no representation")?;
    let md = ok(generalized_multiplicative_domain(&ch, rep, &opts()), "MD_pi")?;
    ensure!(md.dim() == 4, "MD_pi has dimension {}", md.dim());
    let th = angle(md.subspace(), code.algebra().basis())?;
    ensure!(th < 1e-9, "MD_pi vs L(C0) angle {th:.3e}");

    let fixture = reps::bit_flip_correction();
    let mut pi_err: f64 = 0.0;
    for b in fixture.domain().basis().basis() {
        pi_err = pi_err.max((rep.apply(b) - fixture.apply(b)).norm());
    }
    ensure!(pi_err < 1e-9, "solved pi differs from the fixture by {pi_err:.3e}");

    let recovery = report.recovery.as_ref().ok_or("no recovery")?;
    let p = QuantumChannel::new(vec![code.projection().clone()]).map_err(|e| e.to_string())?;
    let inner = ok(compose(&ch, &p), "compose")?;
    let rep_p = ok(compose(&recovery.channel, &inner), "compose")?;
    let dist = ok(choi_distance(&rep_p, &p), "choi distance")?;
    ensure!(dist < 1e-9, "R∘E∘P vs P Choi distance {dist:.3e}");

    let explicit = chf::recovery_3q();
    let fixed = ok(verify_correction(&ch, &explicit, &code, 1e-9), "verify fixture")?;
    ensure!(fixed.corrected, "fixture recovery residual {:.3e}", fixed.residual);
    let explicit_dist = ok(choi_distance(&ok(compose(&explicit, &inner), "compose")?, &p), "choi distance")?;
    ensure!(explicit_dist < 1e-9, "fixture recovery Choi distance {explicit_dist:.3e}");

    let kl = ok(kl_subspace_test(&ch, &code, 1e-9), "KL")?;
    let lam = max_abs(&(&kl.lambda - ComplexMatrix::identity(4, 4) * real(0.25)));
    ensure!(kl.correctable && lam < 1e-12, "lambda off by {lam:.3e}");
    Ok(format!(
        "angle {th:.1e}, pi error {pi_err:.1e}, Choi distance {dist:.1e}, lambda error {lam:.1e}"
    ))
}

fn criterion4() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut unital_cases = 0;
    let mut nontrivial = 0;
    for seed in 0..100u64 {
        let mut rng = random::rng(4000 + seed);
        let n = rng.random_range(3..=6usize);
        let k = rng.random_range(2..=4usize);
        let alg = loop {
            let alg = random::random_block_algebra(&mut rng, n);
            if alg.ambient_dim() == n {
                break alg;
            }
        };
        let ch = match seed % 4 {
            0 => random::random_channel(&mut rng, n, k),
            1 => random::random_unital_channel(&mut rng, n, k),
            2 => random::block_commuting_channel(&mut rng, &alg, k, false),
            _ => random::block_commuting_channel(&mut rng, &alg, k, true),
        };
        let rep = Representation::identity(alg);
        let def = ok(generalized_multiplicative_domain(&ch, &rep, &opts()), "definition system")?;
        let kr = ok(md_pi_kraus(&ch, &rep, &opts()), "Kraus system")?;
        let th = angle(def.subspace(), kr.subspace())?;
        ensure!(th < 1e-8, "seed {seed}: definition vs Kraus angle {th:.3e} (dims {}, {})", def.dim(), kr.dim());
        worst = worst.max(th);
        if def.dim() > 0 {
            nontrivial += 1;
        }
        if ch.is_unital(1e-9) {
            unital_cases += 1;
            let g2 = ok(genchar2_set(&ch, &rep, &opts()), "unit characterization")?;
            let th = angle(def.subspace(), g2.subspace())?;
            ensure!(th < 1e-8, "seed {seed}: definition vs unit characterization angle {th:.3e}");
            worst = worst.max(th);
        }
    }
    Ok(format!(
        "100 channels ({nontrivial} with nonzero MD_pi, {unital_cases} unital), max angle {worst:.1e}"
    ))
}

fn criterion5() -> Outcome {
    let mut choi_worst: f64 = 0.0;
    let mut quad_worst: f64 = 0.0;
    let mut samples = 0;
    for seed in 0..50u64 {
        let mut rng = random::rng(5000 + seed);
        let n = rng.random_range(3..=6usize);
        let k = rng.random_range(2..=4usize);
        let alg = loop {
            let alg = random::random_block_algebra(&mut rng, n);
            if alg.ambient_dim() == n {
                break alg;
            }
        };
        let ch = random::block_commuting_channel(&mut rng, &alg, k, true);
        let md = ok(multiplicative_domain(&ch, &opts()), "MD")?;
        for b in md.subspace().basis() {
            choi_worst = choi_worst.max(ok(choi_residual(&ch, b), "Choi residual")?);
        }
        let rep = Representation::identity(alg);
        let md_pi = ok(generalized_multiplicative_domain(&ch, &rep, &opts()), "MD_pi")?;
        ensure!(md_pi.dim() > 0, "seed {seed}: empty MD_pi");
        for s in 0..20u64 {
            let a = ok(md_pi.algebra.random_positive_full_rank(seed * 100 + s), "sample")?;
            ensure!(
                ok(md_pi.algebra.is_positive_full_rank(&a, 1e-9), "positivity")?,
                "seed {seed}: sample {s} is not positive of full rank"
            );
            quad_worst = quad_worst.max(ok(genchar_residual(&ch, &rep, &a), "quadratic residual")?);
            samples += 1;
        }
    }
    ensure!(choi_worst < 1e-9, "Choi equalities off by {choi_worst:.3e}");
    ensure!(quad_worst < 1e-9, "quadratic equalities off by {quad_worst:.3e}");

    let ch = chf::counterexample_4d();
    let rep = reps::doubling();
    let a = matrix_unit(4, 0, 0);
    let rank_one = ok(genchar_residual(&ch, &rep, &a), "quadratic residual")?;
    ensure!(rank_one < 1e-9, "rank-1 element fails the equalities ({rank_one:.3e})");
    let md = ok(generalized_multiplicative_domain(&ch, &rep, &opts()), "MD_pi")?;
    ensure!(!md.algebra.contains(&a, 1e-9), "rank-1 element is in MD_pi");
    ensure!(
        !ok(rep.domain().is_positive_full_rank(&a, 1e-9), "positivity")?,
        "rank-1 element reported as full rank"
    );
    Ok(format!(
        "Choi {choi_worst:.1e}, {samples} samples quadratic {quad_worst:.1e}, rank-1 element excluded"
    ))
}

fn criterion6() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut bicommutants = 0;
    for seed in 0..100u64 {
        let mut rng = random::rng(6000 + seed);
        let alg = random::random_block_algebra(&mut rng, 12);
        let n = alg.ambient_dim();
        let s = ok(decompose(alg.basis(), &opts()), "decompose")?;
        let mut want: Vec<(usize, usize)> = alg.blocks().iter().map(|b| (b.dim_a, b.dim_b)).collect();
        let mut got: Vec<(usize, usize)> = s.blocks.iter().map(|b| (b.dim_a, b.dim_b)).collect();
        want.sort_unstable();
        got.sort_unstable();
        ensure!(want == got, "seed {seed}: blocks {got:?}, expected {want:?}");
        ensure!(s.kernel_dim == alg.kernel_dim(), "seed {seed}: kernel {} vs {}", s.kernel_dim, alg.kernel_dim());
        let rebuilt = ok(
            OperatorAlgebra::from_structure(s.blocks.clone(), s.kernel_dim, Some(s.embedding.clone())),
            "rebuild",
        )?;
        let th = angle(rebuilt.basis(), alg.basis())?;
        ensure!(th < 1e-8, "seed {seed}: rebuilt basis angle {th:.3e}");
        worst = worst.max(th);
        if alg.kernel_dim() == 0 {
            let c = ok(commutant(alg.basis().basis(), n, 1e-9), "commutant")?;
            let cc = ok(commutant(c.basis(), n, 1e-9), "bicommutant")?;
            let th = angle(&cc, alg.basis())?;
            ensure!(th < 1e-8, "seed {seed}: bicommutant angle {th:.3e}");
            worst = worst.max(th);
            bicommutants += 1;
        }
    }
    Ok(format!("100 algebras, {bicommutants} bicommutants, max angle {worst:.1e}"))
}

fn random_code_dims(rng: &mut SeededRng, n: usize, copies: usize) -> (usize, usize) {
    loop {
        let a = rng.random_range(1..=3usize);
        let b = rng.random_range(1..=3usize);
        if a * b * copies <= n {
            return (a, b);
        }
    }
}

fn criterion7() -> Outcome {
    let mut pi_worst: f64 = 0.0;
    for seed in 0..50u64 {
        let mut rng = random::rng(7000 + seed);
        let n = rng.random_range(2..=6usize);
        let (a, b) = random_code_dims(&mut rng, n, 1);
        let k = rng.random_range(1..=3usize);
        let (ch, code) = ok(codes::noiseless_model(seed, a, b, n, k), "noiseless model")?;
        let nl = ok(noiseless_check(&ch, &code, 1e-9), "noiseless check")?;
        ensure!(nl.holds, "seed {seed}: noiseless check failed ({:?})", nl.residual);
        ensure!(ok(is_bimodule(&ch, code.algebra(), 1e-9), "bimodule")?, "seed {seed}: not a bimodule");
        let report = ok(correction_suite(&ch, &code, &opts()), "suite")?;
        ensure!(report.flags() == [true; 4], "seed {seed}: flags {:?}", report.flags());
        let rep = report.representation.as_ref().ok_or("no representation")?;
        for x in code.algebra().basis().basis() {
            pi_worst = pi_worst.max((rep.apply(x) - x).norm());
        }
    }
    ensure!(pi_worst < 1e-8, "solved pi differs from the identity by {pi_worst:.3e}");
    let ch = chf::bit_flip_3q();
    let c0 = codes::bit_flip_code(0);
    ensure!(!ok(noiseless_check(&ch, &c0, 1e-9), "noiseless check")?.holds, "C0 reported noiseless");
    ensure!(ok(correction_suite(&ch, &c0, &opts()), "suite")?.correctable(), "C0 not correctable");
    Ok(format!("50 models, pi = id within {pi_worst:.1e}; C0 correctable, not noiseless"))
}

fn suite_flags(ch: &QuantumChannel, code: &SubsystemCode, label: &str) -> Result<bool, String> {
    let report = correction_suite(ch, code, &opts()).map_err(|e| format!("{label}: {e}"))?;
    let f = report.flags();
    ensure!(f.iter().all(|&x| x == f[0]), "{label}: flags disagree {f:?}");
    Ok(f[0])
}

fn criterion8() -> Outcome {
    let mut checked = 0;
    let mut correctable = 0;
    for ch_name in ["bit_flip_3q", "recovery_3q"] {
        let ch = ok(chf::by_name(ch_name), "fixture")?;
        for code_name in codes::NAMES {
            let code = ok(codes::by_name(code_name), "fixture")?;
            correctable += suite_flags(&ch, &code, &format!("{ch_name}/{code_name}"))? as usize;
            checked += 1;
        }
    }
    let mut rng = random::rng(8000);
    for ch_name in ["counterexample_4d", "tp_not_unital_3d"] {
        let ch = ok(chf::by_name(ch_name), "fixture")?;
        for (a, b) in [(1, 1), (1, 2), (2, 1)] {
            let code = codes::random_code(&mut rng, a, b, ch.dim());
            correctable += suite_flags(&ch, &code, &format!("{ch_name}/random {a}x{b}"))? as usize;
            checked += 1;
        }
    }
    match correction_suite(&chf::unital_not_tp_3d(), &codes::random_code(&mut rng, 1, 2, 3), &opts()) {
        Err(Error::Hypothesis { .. }) => {}
        other => return Err(format!("non-TP fixture not refused: {:?}", other.map(|r| r.flags()))),
    }

    let mut expected = 0;
    for seed in 0..200u64 {
        let mut rng = random::rng(80_000 + seed);
        let n = rng.random_range(3..=6usize);
        let label = format!("random pair {seed}");
        let (ch, code, should_correct) = match seed % 4 {
            0 => {
                // dim B = 1 would be correctable for any channel.
                let (a, b) = loop {
                    let (a, b) = random_code_dims(&mut rng, n, 1);
                    if b > 1 {
                        break (a, b);
                    }
                };
                let k = rng.random_range(2..=4usize);
                let ch = random::random_channel(&mut rng, n, k);
                (ch, codes::random_code(&mut rng, a, b, n), false)
            }
            1 => {
                let (a, b) = random_code_dims(&mut rng, n, 1);
                let k = rng.random_range(1..=3usize);
                let (ch, code) = ok(codes::noiseless_model(seed, a, b, n, k), "noiseless model")?;
                (ch, code, true)
            }
            2 => {
                let branches = rng.random_range(1..=2usize);
                let (a, b) = random_code_dims(&mut rng, n, branches);
                let leak = rng.random_range(1..=2usize);
                let (ch, code) = ok(codes::correctable_model(seed, a, b, n, branches, leak), "correctable model")?;
                (ch, code, true)
            }
            _ => {
                let (a, b) = random_code_dims(&mut rng, n, 1);
                let k = rng.random_range(1..=3usize);
                let (noise, code) = ok(codes::noiseless_model(seed, a, b, n, k), "noiseless model")?;
                let u = ok(QuantumChannel::unitary(random::haar_unitary(&mut rng, n)), "unitary")?;
                (ok(compose(&u, &noise), "compose")?, code, true)
            }
        };
        let flag = suite_flags(&ch, &code, &label)?;
        if should_correct {
            ensure!(flag, "{label}: constructed correctable model reported uncorrectable");
            expected += 1;
        }
        correctable += flag as usize;
        checked += 1;
    }
    Ok(format!(
        "{checked} pairs agree ({correctable} correctable, {expected} by construction), non-TP refused"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("counterexample image formula and MD_pi", criterion1),
        ("non-TP and non-unital counterexamples", criterion2),
        ("bit flip code correction", criterion3),
        ("solver cross-checks", criterion4),
        ("Choi and quadratic equalities", criterion5),
        ("algebra round trips", criterion6),
        ("noiseless and bimodule models", criterion7),
        ("correctability flags agree", criterion8),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {} FAIL  {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
