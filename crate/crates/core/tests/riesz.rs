use superbos::domains::{FlatDomain, OmegaDomain};
use superbos::numeric::{self, c};
use superbos::riesz::*;
use superbos::sfunc::StructuredFunction;
use superbos::smat::MultiIndex;

fn mi(v: &[i64]) -> MultiIndex {
    MultiIndex(v.to_vec())
}

#[test]
fn normalised_riesz_values() {
    let dom = OmegaDomain::quadrature(1, 0);
    let spec = RieszSpec { p: 1, q: 0, n: 1, normalised: true };
    let v = riesz_apply(&spec, &StructuredFunction::gaussian(1, 0, 1.0), &dom).unwrap();
    assert!((v.value - c(1.0, 0.0)).norm() < 1e-12);
    let spec = RieszSpec { n: 2, ..spec };
    let f = StructuredFunction::conical(1, 0, mi(&[1]), 1.0).unwrap();
    assert!((riesz_apply(&spec, &f, &dom).unwrap().value - c(2.0, 0.0)).norm() < 1e-12);
    let spec = RieszSpec { p: 1, q: 1, n: 1, normalised: true };
    let f = StructuredFunction::conical(1, 1, mi(&[1, 0]), 1.0).unwrap();
    let v = riesz_apply(&spec, &f, &OmegaDomain::quadrature(1, 1)).unwrap();
    assert!((v.value - c(1.0, 0.0)).norm() < 1e-6, "{v:?}");
}

#[test]
fn identity_examples() {
    let cases: Vec<(usize, usize, i64, StructuredFunction)> = vec![
        (0, 1, 1, StructuredFunction::conical(0, 1, mi(&[-1]), 0.0).unwrap()),
        (1, 0, 1, StructuredFunction::gaussian(1, 0, 1.0)),
        (1, 1, 1, StructuredFunction::conical(1, 1, mi(&[1, 0]), 1.0).unwrap()),
    ];
    for (p, q, n, f) in cases {
        let r = superbosonise_check(&f, n, &FlatDomain::quadrature(p, q, n as usize), &OmegaDomain::quadrature(p, q), 1e-6).unwrap();
        assert!(r.pass, "{}", r.line());
    }
    let f = StructuredFunction::gaussian(1, 0, 1.0);
    assert!(superbosonise_check(&f, 0, &FlatDomain::quadrature(1, 0, 0), &OmegaDomain::quadrature(1, 0), 1e-6).is_err());
}

#[test]
fn weighted_laplace_examples() {
    let dom = OmegaDomain::quadrature(1, 0);
    for (t, want) in [(0.0, 1.0), (0.3, 0.49)] {
        let r = weighted_lt_check(1, 0, 1, &mi(&[1]), t, &dom, false, 1e-6).unwrap();
        assert!(r.pass && (r.rhs - c(want, 0.0)).norm() < 1e-12, "{}", r.line());
        let r = weighted_lt_check(1, 0, 1, &mi(&[1]), t, &dom, true, 1e-6).unwrap();
        assert!(r.pass, "{}", r.line());
    }
    let r = weighted_lt_check(1, 1, 1, &mi(&[0, 0]), 0.0, &OmegaDomain::quadrature(1, 1), true, 1e-6).unwrap();
    assert!(r.pass && (r.lhs - c(1.0, 0.0)).norm() < 1e-6, "{}", r.line());
}

#[test]
fn laplace_superconical() {
    let dom = OmegaDomain::quadrature(1, 1);
    let (est, closed) = laplace_conical(&mi(&[2, 1]), &[1.5, 0.7], 1, 1, &dom).unwrap();
    assert!((est.value - closed).norm() < 1e-6 * closed.norm(), "{est:?} {closed}");
}

#[test]
fn gamma_two_by_two() {
    let r = gamma_check(&mi(&[2, 3]), 2, 0, &OmegaDomain::quadrature(2, 0), 1e-3).unwrap();
    assert!(r.pass, "{}", r.line());
    let _ = numeric::identity(1);
}

/// Expanding `e^{tr w}` on `U(2)`, the phase forces degree `m₁+m₂`, the
/// remaining binomial and the `u` integral leave `1/(m₁!(m₂+1)!)`.
fn gamma_02_by_hand(m1: i64, m2: i64) -> f64 {
    let fact = |k: i64| (1..=k).product::<i64>() as f64;
    if m1 < 0 || m2 < 0 {
        0.0
    } else {
        1.0 / (fact(m1) * fact(m2 + 1))
    }
}

#[test]
fn gamma_odd_entries_against_hand_residues() {
    let dom = OmegaDomain::quadrature(0, 2);
    for m1 in -2..=3 {
        for m2 in -2..=3 {
            let m = mi(&[m1, m2]);
            let numeric = superbos::domains::integrate_omega(&StructuredFunction::conical(0, 2, m.clone(), 1.0).unwrap(), 0, &dom)
                .unwrap()
                .value;
            let hand = gamma_02_by_hand(m1, m2);
            assert!((numeric.re - hand).abs() < 1e-9 && numeric.im.abs() < 1e-9, "m = {m}: {numeric} vs {hand}");
            // The closed form reproduces it except on the off-cone line m₂ = −1.
            if m2 != -1 {
                let g = gamma_omega(&m, 0, 2).unwrap().value;
                assert!((g.re - hand).abs() < 1e-12, "m = {m}: closed form {g}");
            }
        }
    }
    // The two odd-entry orderings genuinely differ here.
    assert_eq!(gamma_omega(&mi(&[0, 1]), 0, 2).unwrap().value.re, 0.5);
    assert_eq!(gamma_omega_as_printed(&mi(&[0, 1]), 0, 2).unwrap().value.re, 1.0);
    // …and coincide for equal odd entries.
    for k in 0..4 {
        let m = mi(&[1, k, k]);
        assert!((gamma_omega(&m, 1, 2).unwrap().value - gamma_omega_as_printed(&m, 1, 2).unwrap().value).norm() < 1e-12);
    }
}

#[test]
fn gamma_one_two_unequal_odd_entries() {
    let dom = OmegaDomain::quadrature(1, 2);
    for (m, expect) in [([1, 3, 1], 0.5), ([1, 2, 0], 1.0), ([2, 1, 2], 0.5)] {
        let r = gamma_check(&mi(&m), 1, 2, &dom, 1e-6).unwrap();
        assert!(r.pass, "{}", r.line());
        assert!((r.rhs.re - expect).abs() < 1e-12);
    }
}
