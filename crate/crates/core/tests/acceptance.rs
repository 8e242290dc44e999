//! Acceptance suite: one line per criterion, then a non-zero exit if any
//! criterion deviates from its expected outcome.
//!
//! Two criteria have a known, pinned deviation (see `Outcome::known`): the
//! suite asserts that exactly the documented part fails and everything else
//! passes, and prints the criterion as FAIL.

use std::io::Write;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use superbos::cli::{convergent_box, laplace_points};
use superbos::domains::{FlatDomain, HermMethod, OmegaDomain, UnitaryNodes};
use superbos::error::Error;
use superbos::numeric::{self, c};
use superbos::report::VerificationReport;
use superbos::riesz::*;
use superbos::sfunc::{HElement, StructuredFunction};
use superbos::smat::MultiIndex;
use superbos::{osc, properties, weights};

struct Outcome {
    pass: bool,
    summary: String,
    /// The documented deviation, when the criterion cannot pass as stated.
    known: Option<String>,
    /// Whether the observed outcome is exactly what is expected (a full pass,
    /// or precisely the documented deviation).
    as_expected: bool,
}

impl Outcome {
    fn plain(pass: bool, summary: String) -> Self {
        Outcome { pass, summary, known: None, as_expected: pass }
    }
}

fn mi(v: &[i64]) -> MultiIndex {
    MultiIndex(v.to_vec())
}

/// Tally of reports: (passed, total, worst relative error, first failure).
fn tally(reports: &[VerificationReport]) -> (usize, usize, f64, Option<String>) {
    let passed = reports.iter().filter(|r| r.pass).count();
    let worst = reports.iter().map(|r| r.rel_err).fold(0.0, f64::max);
    let first = reports.iter().find(|r| !r.pass).map(|r| r.line());
    (passed, reports.len(), worst, first)
}

fn from_reports(label: &str, reports: &[VerificationReport]) -> Outcome {
    let (passed, total, worst, first) = tally(reports);
    let mut s = format!("{label}: {passed}/{total} checks, worst rel err {worst:.1e}");
    if let Some(f) = first {
        s.push_str(&format!("; first failure: {f}"));
    }
    Outcome::plain(passed == total && total > 0, s)
}

/// `U(2)` rule used for `(1|2)`: fine in the overall phase, coarse elsewhere.
fn omega_domain(p: usize, q: usize) -> OmegaDomain {
    let mut d = OmegaDomain::quadrature(p, q);
    if (p, q) == (1, 2) {
        d.unitary = UnitaryNodes { phi: 14, alpha: 12, beta: 4, u: 4, ..d.unitary };
        d.herm = HermMethod::Quadrature { laguerre: 8, hermite: 6 };
    }
    d
}

fn sbos(p: usize, q: usize, n: i64, f: &StructuredFunction, tol: f64) -> VerificationReport {
    superbosonise_check(f, n, &FlatDomain::quadrature(p, q, n as usize), &omega_domain(p, q), tol).unwrap()
}

fn criterion_1() -> Outcome {
    let cases = [(0, 1, 1), (0, 1, 2), (1, 0, 1), (1, 0, 2), (1, 1, 1), (1, 1, 2), (0, 2, 1), (1, 2, 2)];
    let mut reports = Vec::new();
    for (p, q, n) in cases {
        for m in MultiIndex::cone(p, q, 2) {
            let f = StructuredFunction::conical(p, q, m, 1.0).unwrap();
            reports.push(sbos(p, q, n, &f, 1e-6));
        }
    }
    from_reports("superbosonisation vs √π^{np}(n)_m, 8 (p,q,n), cone Σ|m| ≤ 2", &reports)
}

/// Off the polynomial cone the `(0|2)` integral vanishes on `m₂ = −1` while the
/// meromorphic closed form does not.
fn gamma_known_deviation(m: &MultiIndex, p: usize, q: usize) -> bool {
    (p, q) == (0, 2) && m.0[1] == -1 && m.0[0] >= 0
}

fn criterion_2() -> Outcome {
    let mut reports = Vec::new();
    for (p, q) in [(1, 0), (0, 1), (1, 1), (2, 0), (0, 2)] {
        let dom = OmegaDomain::quadrature(p, q);
        let tol = if p == 2 { 1e-3 } else { 1e-6 };
        for m in convergent_box(p, q, -2, 3) {
            reports.push((gamma_check(&m, p, q, &dom, tol).unwrap(), gamma_known_deviation(&m, p, q)));
        }
    }
    let all: Vec<VerificationReport> = reports.iter().map(|(r, _)| r.clone()).collect();
    let (passed, total, _, _) = tally(&all);
    let worst_ok = reports.iter().filter(|(_, k)| !k).map(|(r, _)| r.rel_err).fold(0.0, f64::max);
    let failed: Vec<String> = reports.iter().filter(|(r, _)| !r.pass).map(|(r, _)| format!("{:?}", r.m.as_ref().unwrap())).collect();
    let expected_fail = reports.iter().filter(|(_, k)| *k).count();
    let exact_set = reports.iter().all(|(r, k)| r.pass != *k);
    let two_zero = reports.iter().filter(|(r, _)| (r.p, r.q) == (2, 0)).all(|(r, _)| r.pass);
    Outcome {
        pass: passed == total,
        summary: format!(
            "Gindikin Γ, (1,0),(0,1),(1,1),(2,0),(0,2), entries in [−2,3]: {passed}/{total} match; \
             worst rel err off the documented line {worst_ok:.1e}; (2,0) with (2π) prefactor {}; failing m (0|2): {}",
            if two_zero { "ok" } else { "FAILED" },
            failed.join(" ")
        ),
        known: Some(format!(
            "for (0|2), m₂ = −1, m₁ ≥ 0 ({expected_fail} points, off the polynomial cone) the integral is exactly 0 \
             but the closed form gives 1/m₁!"
        )),
        as_expected: exact_set && total > 0,
    }
}

fn criterion_3() -> Outcome {
    let mut reports = Vec::new();
    for (p, q) in [(1, 0), (0, 1), (1, 1), (0, 2)] {
        let dom = OmegaDomain::quadrature(p, q);
        for m in MultiIndex::cone(p, q, 2).into_iter().filter(|m| converges(m, p)) {
            for x in laplace_points(p + q) {
                reports.push(laplace_check(&m, &x, p, q, &dom, 1e-6).unwrap());
            }
        }
    }
    let mut o = from_reports("LT(Δ_m)(x⁻¹) = Γ_Ω(m)Δ_m(x) at 5 points per case", &reports);
    let dom = OmegaDomain::quadrature(1, 0);
    let rejects = matches!(laplace_conical(&mi(&[0]), &[1.0], 1, 0, &dom), Err(Error::Divergent(_)))
        && laplace_conical(&mi(&[1]), &[1.0], 1, 0, &dom).is_ok()
        && !converges(&mi(&[0]), 1);
    o.pass &= rejects;
    o.as_expected = o.pass;
    o.summary.push_str(&format!("; m₁ = 0 at p = 1 rejected as divergent: {rejects}"));
    o
}

fn criterion_4() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    // Cauchy: f(w) = w is Δ_(−1) without the Gaussian, plus Gaussian-weighted conicals.
    let mut cauchy = vec![sbos(0, 1, 1, &StructuredFunction::conical(0, 1, mi(&[-1]), 0.0).unwrap(), 1e-12)];
    for m in [0, -1, -2] {
        cauchy.push(sbos(0, 1, 1, &StructuredFunction::conical(0, 1, mi(&[m]), 1.0).unwrap(), 1e-12));
    }
    let mut boson = Vec::new();
    for n in [1, 2] {
        for m in MultiIndex::cone(0, 2, 2) {
            boson.push(sbos(0, 2, n, &StructuredFunction::conical(0, 2, m, 1.0).unwrap(), 1e-8));
        }
    }
    let mut ingham = Vec::new();
    for n in [1, 2] {
        for m in MultiIndex::cone(1, 0, 2) {
            ingham.push(sbos(1, 0, n, &StructuredFunction::conical(1, 0, m, 1.0).unwrap(), 1e-10));
        }
        ingham.push(sbos(1, 0, n, &StructuredFunction::gaussian(1, 0, 2.5), 1e-10));
    }
    for (label, rs) in [("Cauchy 1e−12", &cauchy), ("bosonisation 1e−8", &boson), ("Ingham–Siegel 1e−10", &ingham)] {
        let (passed, total, worst, _) = tally(rs);
        pass &= passed == total;
        parts.push(format!("{label}: {passed}/{total} (worst {worst:.1e})"));
    }
    Outcome::plain(pass, format!("special cases — {}", parts.join("; ")))
}

fn criterion_5() -> Outcome {
    let mut reports = Vec::new();
    for (p, q, n) in [(1, 0, 1), (1, 1, 1)] {
        let dom = OmegaDomain::quadrature(p, q);
        for m in MultiIndex::cone(p, q, 1).into_iter().filter(|m| converges(&m.shifted(n), p)) {
            for t in [0.0, 0.3, 0.5] {
                for weighted in [false, true] {
                    reports.push(weighted_lt_check(p, q, n, &m, t, &dom, weighted, 1e-6).unwrap());
                }
            }
        }
    }
    let mut o = from_reports("weighted Laplace after Cayley, z ∈ {0, 0.3, 0.5}·1", &reports);
    let mut base_ok = true;
    for (p, q) in [(1, 0), (1, 1)] {
        let r = weighted_lt_check(p, q, 1, &MultiIndex::zeros(p + q), 0.0, &OmegaDomain::quadrature(p, q), true, 1e-10).unwrap();
        base_ok &= r.pass && (r.lhs - c(1.0, 0.0)).norm() < 1e-10;
    }
    o.pass &= base_ok;
    o.as_expected = o.pass;
    o.summary.push_str(&format!("; base case (γ_n∘LT_n)(e^{{−str/2}}) = 1: {base_ok}"));
    o
}

fn criterion_6() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (p, q, n) in [(1, 0, 1), (0, 1, 1), (1, 1, 1), (1, 1, 2)] {
        let r = osc::commutator_check(p, q, n, 3).unwrap();
        let hw = osc::highest_weight_from_operators(p, q, n).unwrap() == osc::highest_weight(p, q, n);
        pass &= r.pass && r.grading_ok && r.failures.is_empty() && hw && r.centralizer_pairs_checked > 0;
        parts.push(format!("({p},{q},{n}) {} brackets + {} centralizer pairs, hw {}", r.pairs_checked, r.centralizer_pairs_checked, if hw { "=" } else { "≠" }));
    }
    Outcome::plain(pass, format!("oscillator, exact over ℚ, degree ≤ 3 — {}", parts.join("; ")))
}

fn criterion_7() -> Outcome {
    let mut diagrams_ok = true;
    let mut invariant_all = true;
    let mut invariant_as_documented = true;
    let mut coordinate_ok = true;
    for (p, q) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
        let chain = weights::borel_chain(p, q, Some(1));
        diagrams_ok &= chain.matches_target;
    }
    let mut finite_ok = true;
    for p in 0..=2 {
        for q in 0..=2 {
            if p + q == 0 {
                continue;
            }
            for n in 1..=4 {
                let w = weights::borel_chain(p, q, Some(n)).weights.unwrap();
                finite_ok &= weights::finite_dim_check(&w.lambda).finite == (p == 0);
                invariant_all &= w.lambda_invariant;
                invariant_as_documented &= w.lambda_invariant == (p * q == 0);
                coordinate_ok &= w.coordinate_pairings_vanish;
            }
        }
    }
    // The weight λ actually moves to: the oscillator's standard-Borel highest weight.
    let mut oscillator_ok = true;
    for (p, q, n, d) in [(1, 1, 1, 2), (1, 1, 2, 2), (2, 1, 1, 4), (1, 2, 1, 4)] {
        let (w, _) = osc::standard_borel_highest_weight(p, q, n, d).unwrap();
        oscillator_ok &= w == weights::borel_chain(p, q, Some(n)).weights.unwrap().standard_highest_weight;
    }
    Outcome {
        pass: diagrams_ok && finite_ok && invariant_all,
        summary: format!(
            "Borel chain: target diagrams (1,1),(2,1),(1,2),(2,2) {diagrams_ok}; finite_dim_check(λ) == (p==0) for p,q ≤ 2, n ≤ 4 \
             {finite_ok}; λ invariant under the executed chain {invariant_all}"
        ),
        known: Some(format!(
            "under the invariant form (λ, δ_i−ε_j) = n ≠ 0 on the chain roots, so λ moves whenever pq > 0; \
             it is fixed only for the coordinate pairing ({coordinate_ok}); the oscillator's standard-Borel \
             singular vector has exactly the transported weight ({oscillator_ok})"
        )),
        as_expected: diagrams_ok && finite_ok && invariant_as_documented && coordinate_ok && oscillator_ok,
    }
}

fn criterion_8() -> Outcome {
    let outcomes = properties::run_all(128, 2024, 1e-10).unwrap();
    let pass = outcomes.iter().all(|o| o.pass && o.instances >= 100);
    let parts: Vec<String> = outcomes.iter().map(|o| format!("{} {}/{} (max err {:.1e})", o.name, o.instances - o.failures, o.instances, o.max_err)).collect();
    Outcome::plain(pass, format!("property suites — {}", parts.join("; ")))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut reports = Vec::new();
    for (p, q, n) in [(1, 0, 1), (0, 1, 1), (1, 1, 1), (1, 1, 2)] {
        let omega_f = StructuredFunction::conical(p, q, mi(&[1, 1][..p + q]), 1.0).unwrap();
        let flat_f = StructuredFunction::conical(p, q, MultiIndex::cone(p, q, 1).pop().unwrap(), 1.0).unwrap();
        let flat = FlatDomain::quadrature(p, q, n as usize);
        let omega = OmegaDomain::quadrature(p, q);
        for _ in 0..20 {
            let a = numeric::random_positive(&mut rng, p, 0.6, 1.6) * numeric::random_unitary(&mut rng, p);
            let h = HElement::real_form(a, numeric::random_unitary(&mut rng, q), numeric::random_unitary(&mut rng, q)).unwrap();
            reports.push(omega_invariance_check(&omega_f, &h, &omega, 1e-6).unwrap());
            for twisted in [false, true] {
                reports.push(flat_invariance_check(&flat_f, &h, twisted, &flat, 1e-6).unwrap());
            }
        }
    }
    from_reports("invariance of |Dy|, relative invariance of |Dv| (χ and χ^{1/2}), 20 elements per (p,q,n)", &reports)
}

fn main() {
    let criteria: [(usize, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let start = Instant::now();
    let mut unexpected = Vec::new();
    let mut out = std::io::stdout().lock();
    for (k, run) in criteria {
        let t0 = Instant::now();
        let o = run();
        let mut line = format!("[{}] criterion {k}: {} ({:.1}s)", if o.pass { "PASS" } else { "FAIL" }, o.summary, t0.elapsed().as_secs_f64());
        if let Some(reason) = o.known.as_ref().filter(|_| !o.pass) {
            line.push_str(&format!("\n       documented deviation: {reason}"));
        }
        if !o.as_expected {
            line.push_str("\n       UNEXPECTED outcome");
            unexpected.push(k);
        }
        writeln!(out, "{line}").unwrap();
        out.flush().unwrap();
    }
    writeln!(out, "acceptance finished in {:.1}s", start.elapsed().as_secs_f64()).unwrap();
    if !unexpected.is_empty() {
        writeln!(out, "unexpected outcomes in criteria {unexpected:?}").unwrap();
        std::process::exit(1);
    }
}
