//! Built-in worked examples, replayed as numbered assertion lists.

use serde::Serialize;
use serde_json::Value;

use qmd_core::algebra::{DecomposeOptions, OperatorAlgebra};
use qmd_core::channel::fixtures as chf;
use qmd_core::channel::{choi_distance, compose, QuantumChannel};
use qmd_core::multdom::{genchar2_set, generalized_multiplicative_domain, md_pi_kraus};
use qmd_core::numerics::{matrix_unit, real, subspace_equal, ComplexMatrix};
use qmd_core::qec::fixtures::bit_flip_code;
use qmd_core::qec::{correction_suite, kl_subspace_test, noiseless_check, verify_correction};
use qmd_core::representation::fixtures as reps;
use qmd_core::representation::Representation;
use qmd_core::{Error, Result};

use crate::report::fmt_num;

pub const NAMES: [&str; 4] = ["2.1", "3.2", "3.5", "4.2"];

/// Entrywise agreement threshold for displayed values.
const EXACT: f64 = 1e-12;
/// Threshold for solver-derived comparisons.
const SOLVED: f64 = 1e-9;
/// Two displayed values count as different when this far apart.
const DISTINCT: f64 = 1e-3;

#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub description: String,
    pub passed: bool,
    /// The measured error, gap or dimension behind the verdict, if any.
    pub value: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExampleRun {
    pub name: &'static str,
    pub title: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub assertions: Vec<Assertion>,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub examples: Vec<ExampleRun>,
    pub passed: usize,
    pub failed: usize,
}

impl Summary {
    pub fn of(examples: Vec<ExampleRun>) -> Self {
        let passed = examples.iter().map(|e| e.passed).sum();
        let failed = examples.iter().map(|e| e.failed).sum();
        Summary {
            examples,
            passed,
            failed,
        }
    }
}

#[derive(Default)]
struct Checks(Vec<Assertion>);

impl Checks {
    fn push(&mut self, description: impl Into<String>, passed: bool, value: Option<f64>) {
        self.0.push(Assertion {
            description: description.into(),
            passed,
            value,
        });
    }

    fn close(&mut self, description: impl Into<String>, error: f64, tol: f64) {
        self.push(description, error < tol, Some(error));
    }

    fn apart(&mut self, description: impl Into<String>, gap: f64) {
        self.push(description, gap > DISTINCT, Some(gap));
    }

    fn holds(&mut self, description: impl Into<String>, ok: bool) {
        self.push(description, ok, None);
    }

    /// Record an unexpected error as a failed assertion.
    fn attempt<T>(&mut self, description: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.push(format!("{description}: {e}"), false, None);
                None
            }
        }
    }

    fn refused<T>(&mut self, description: impl Into<String>, r: Result<T>) {
        let ok = matches!(r, Err(Error::Hypothesis { .. }));
        self.push(description, ok, None);
    }

    fn finish(self, name: &'static str, title: &'static str) -> ExampleRun {
        let passed = self.0.iter().filter(|a| a.passed).count();
        ExampleRun {
            name,
            title,
            passed,
            failed: self.0.len() - passed,
            assertions: self.0,
        }
    }
}

fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn diag(values: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| real(v)),
    ))
}

fn projection_channel(p: &ComplexMatrix) -> Result<QuantumChannel> {
    QuantumChannel::new(vec![p.clone()])
}

fn bit_flip(opts: &DecomposeOptions) -> ExampleRun {
    let mut c = Checks::default();
    let ch = chf::bit_flip_3q();
    c.close("the bit flip channel is trace-preserving", ch.tp_residual(), EXACT);
    let projections = chf::bit_flip_code_projections();
    let sum = projections.iter().fold(ComplexMatrix::zeros(8, 8), |acc, p| acc + p);
    c.close("C_0 ⊕ C_1 ⊕ C_2 ⊕ C_3 is all of C^8", max_abs(&(sum - ComplexMatrix::identity(8, 8))), EXACT);
    let code = bit_flip_code(0);
    if let Some(kl) = c.attempt("Knill-Laflamme test", kl_subspace_test(&ch, &code, opts.tol)) {
        let lambda = max_abs(&(&kl.lambda - ComplexMatrix::identity(4, 4) * real(0.25)));
        c.holds("C_0 is correctable (Knill-Laflamme)", kl.correctable);
        c.close("Knill-Laflamme matrix equals I/4", lambda, EXACT);
    }
    let recovery = chf::recovery_3q();
    c.close("the recovery is trace-preserving", recovery.tp_residual(), EXACT);
    let distance = projection_channel(&projections[0])
        .and_then(|p| Ok((compose(&recovery, &compose(&ch, &p)?)?, p)))
        .and_then(|(rep, p)| choi_distance(&rep, &p));
    if let Some(d) = c.attempt("composition", distance) {
        c.close("R ∘ E ∘ P_C0 = P_C0 (Choi distance)", d, SOLVED);
    }
    if let Some(v) = c.attempt("verify recovery", verify_correction(&ch, &recovery, &code, SOLVED)) {
        c.holds("the recovery corrects C_0", v.corrected);
    }
    c.finish("2.1", "three-qubit bit flip code")
}

fn rank_one(opts: &DecomposeOptions) -> ExampleRun {
    let mut c = Checks::default();
    let ch = chf::counterexample_4d();
    c.close("the map is unital", ch.unital_residual(), EXACT);
    c.close("the map is trace-preserving", ch.tp_residual(), EXACT);
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mut x = [0.0; 4];
            x[2 * i + j] = 1.0;
            let [c1, c2, c3, c4] = x;
            #[rustfmt::skip]
            let expected = ComplexMatrix::from_row_slice(4, 4, &[
                c1,  0.0, c2,      0.0,
                0.0, c4,  c3,      0.0,
                c3,  c2,  c1 + c4, 0.0,
                0.0, 0.0, 0.0,     0.0,
            ].map(|v| real(0.5 * v)));
            worst = worst.max(max_abs(&(ch.apply(&matrix_unit(4, i, j)) - expected)));
        }
    }
    c.close("image of the top-left corner matches the closed form", worst, EXACT);
    let rep = reps::doubling();
    if let Some(v) = c.attempt("verify representation", rep.verify(opts.tol)) {
        c.holds("A ⊕ 0 ↦ A ⊕ A is a faithful representation", v.passed());
    }
    let a = matrix_unit(4, 0, 0);
    let (ea, ea2, pa) = (ch.apply(&a), ch.apply(&(&a * &a)), rep.apply(&a));
    c.close("E(a²) = E(a)π(a) for a = |00⟩⟨00|", max_abs(&(&ea2 - &ea * &pa)), EXACT);
    c.close("E(a²) = π(a)E(a) for a = |00⟩⟨00|", max_abs(&(&ea2 - &pa * &ea)), EXACT);
    let mut defect: f64 = 0.0;
    for (i, j) in [(0, 1), (1, 0), (1, 1)] {
        let b = matrix_unit(4, i, j);
        defect = defect
            .max(max_abs(&(ch.apply(&(&b * &a)) - ch.apply(&b) * &pa)))
            .max(max_abs(&(ch.apply(&(&a * &b)) - &pa * ch.apply(&b))));
    }
    c.apart("the defining equalities fail for some b outside the support of a", defect);
    if let Some(md) = c.attempt("solve MD_π", generalized_multiplicative_domain(&ch, &rep, opts)) {
        c.push("MD_π is smaller than the corner algebra", md.dim() < 4, Some(md.dim() as f64));
        c.holds("a is not in MD_π", !md.algebra.contains(&a, SOLVED));
    }
    c.finish("3.2", "rank-one element outside the generalized domain")
}

fn hypotheses(opts: &DecomposeOptions) -> ExampleRun {
    let mut c = Checks::default();
    let phi = chf::unital_not_tp_3d();
    c.close("φ is unital", phi.unital_residual(), EXACT);
    c.push("φ is not trace-preserving", phi.tp_residual() > DISTINCT, Some(phi.tp_residual()));
    let b = matrix_unit(3, 0, 0);
    let a = diag(&[1.0, 2.5, 3.0]);
    let (pa, pa2) = (phi.apply(&a), phi.apply(&(&a * &a)));
    c.close("π(a)φ(a) = φ(a²) for a = diag(1, 5/2, 3)", max_abs(&(&a * &pa - &pa2)), EXACT);
    c.close("φ(a)π(a) = φ(a²)", max_abs(&(&pa * &a - &pa2)), EXACT);
    let phi_ba = phi.apply(&(&b * &a));
    let phib_a = phi.apply(&b) * &a;
    c.close("φ(ba) = diag(1, 1/2, 0)", max_abs(&(&phi_ba - diag(&[1.0, 0.5, 0.0]))), EXACT);
    c.close("φ(b)π(a) = diag(1, 5/4, 0)", max_abs(&(&phib_a - diag(&[1.0, 1.25, 0.0]))), EXACT);
    c.apart("φ(ba) ≠ φ(b)π(a)", max_abs(&(&phi_ba - &phib_a)));

    let a1 = diag(&[1.0, 2.0, 3.0]);
    let phi_one = phi.apply(&ComplexMatrix::identity(3, 3));
    c.close("π(a′)φ(I) = diag(1, 2, 3) for a′ = diag(1, 2, 3)", max_abs(&(&a1 * &phi_one - &a1)), EXACT);
    c.close("φ(a′) = diag(1, 2, 3)", max_abs(&(phi.apply(&a1) - &a1)), EXACT);
    c.close("φ(I)π(a′) = diag(1, 2, 3)", max_abs(&(&phi_one * &a1 - &a1)), EXACT);
    let phi_ba1 = phi.apply(&(&b * &a1));
    let phib_a1 = phi.apply(&b) * &a1;
    c.close("φ(ba′) = diag(1, 1/2, 0)", max_abs(&(&phi_ba1 - diag(&[1.0, 0.5, 0.0]))), EXACT);
    c.close("φ(b)π(a′) = diag(1, 1, 0)", max_abs(&(&phib_a1 - diag(&[1.0, 1.0, 0.0]))), EXACT);
    c.apart("φ(ba′) ≠ φ(b)π(a′)", max_abs(&(&phi_ba1 - &phib_a1)));

    let id = Representation::identity(OperatorAlgebra::full(3));
    c.refused("the unit characterization refuses φ", genchar2_set(&phi, &id, opts));
    c.refused("the Kraus system refuses φ", md_pi_kraus(&phi, &id, opts));
    c.refused(
        "the unit characterization refuses the trace-preserving, non-unital variant",
        genchar2_set(&chf::tp_not_unital_3d(), &id, opts),
    );
    c.finish("3.5", "maps that are unital but not trace-preserving, or the reverse")
}

fn correction(opts: &DecomposeOptions) -> ExampleRun {
    let mut c = Checks::default();
    let ch = chf::bit_flip_3q();
    let code = bit_flip_code(0);
    let pi = reps::bit_flip_correction();
    if let Some(v) = c.attempt("verify representation", pi.verify(opts.tol)) {
        c.holds("π is a representation of L(C_0)", v.passed());
    }
    let dual = chf::recovery_3q().dual();
    let gap = pi
        .domain()
        .basis()
        .basis()
        .iter()
        .map(|b| max_abs(&(pi.apply(b) - dual.apply(b))))
        .fold(0.0, f64::max);
    c.close("π equals the dual of the recovery on L(C_0)", gap, SOLVED);
    if let Some(md) = c.attempt("solve MD_π", generalized_multiplicative_domain(&ch, &pi, opts)) {
        c.push("MD_π has dimension 4", md.dim() == 4, Some(md.dim() as f64));
        if let Some(cmp) = c.attempt("compare", subspace_equal(md.subspace(), code.algebra().basis(), SOLVED)) {
            c.close("MD_π = L(C_0) (largest principal angle)", cmp.max_angle, SOLVED);
        }
    }
    if let Some(report) = c.attempt("correction suite", correction_suite(&ch, &code, opts)) {
        c.holds("all four correctability conditions hold", report.flags() == [true; 4]);
        if let (Some(rep), Some(corr)) = (&report.representation, &report.correction) {
            let gap = pi
                .domain()
                .basis()
                .basis()
                .iter()
                .map(|b| max_abs(&(rep.apply(b) - pi.apply(b))))
                .fold(0.0, f64::max);
            c.close("the solved representation equals π", gap, SOLVED);
            c.holds("the constructed recovery corrects C_0", corr.corrected);
        } else {
            c.holds("the suite produced a representation and a recovery", false);
        }
    }
    if let Some(nl) = c.attempt("noiseless check", noiseless_check(&ch, &code, opts.tol)) {
        c.holds("C_0 is not noiseless", !nl.holds);
    }
    c.finish("4.2", "bit flip correction as a representation")
}

/// Run a named example or `all`.
pub fn run(name: &str, opts: &DecomposeOptions) -> Result<Vec<ExampleRun>> {
    let one = |n: &str| -> Result<ExampleRun> {
        Ok(match n {
            "2.1" => bit_flip(opts),
            "3.2" => rank_one(opts),
            "3.5" => hypotheses(opts),
            "4.2" => correction(opts),
            other => {
                return Err(Error::UnknownFixture(format!(
                    "{other} (known examples: {}, all)",
                    NAMES.join(", ")
                )))
            }
        })
    };
    if name == "all" {
        NAMES.iter().map(|n| one(n)).collect()
    } else {
        Ok(vec![one(name)?])
    }
}

/// Text rendering of a [`Summary`] value.
pub fn render_text(examples: &Value, summary: &Value) -> String {
    let mut out = String::new();
    for e in examples.as_array().into_iter().flatten() {
        out.push_str(&format!(
            "example {} ({}): {} passed, {} failed\n",
            e["name"].as_str().unwrap_or_default(),
            e["title"].as_str().unwrap_or_default(),
            e["passed"],
            e["failed"]
        ));
        for a in e["assertions"].as_array().into_iter().flatten() {
            let verdict = if a["passed"].as_bool() == Some(true) { "PASS" } else { "FAIL" };
            let value = a["value"].as_f64().map(|v| format!(" [{}]", fmt_num(v))).unwrap_or_default();
            out.push_str(&format!("  {verdict} {}{value}\n", a["description"].as_str().unwrap_or_default()));
        }
    }
    out.push_str(&format!(
        "total: {} passed, {} failed\n",
        summary["passed"], summary["failed"]
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_example_passes() {
        let runs = run("all", &DecomposeOptions::default()).unwrap();
        assert_eq!(runs.len(), 4);
        for r in &runs {
            let failures: Vec<_> = r.assertions.iter().filter(|a| !a.passed).collect();
            assert!(failures.is_empty(), "{}: {failures:?}", r.name);
            assert!(r.passed >= 5);
        }
    }

    #[test]
    fn unknown_example_is_an_error() {
        assert!(matches!(
            run("9.9", &DecomposeOptions::default()),
            Err(Error::UnknownFixture(_))
        ));
    }
}
