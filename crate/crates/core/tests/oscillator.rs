use std::time::Instant;

use num_traits::One;
use superbos::osc::*;

/// The explicit form `T_{E^A_{ij}} = −½ Σ_α (∂ ℓ + (−1)^{|i||j|} ℓ ∂)` with
/// `∂ = ∂_{x_i e^α}` pairing to `(−1)^{|i|}` against its dual coordinate.
fn explicit_ea(osc: &Oscillator, i: usize, j: usize, f: &SuperPolynomial) -> SuperPolynomial {
    let k = osc.p + osc.q;
    let odd = |a: usize| a >= osc.p;
    let sgn = |b: bool| if b { -Q::one() } else { Q::one() };
    let mut out = SuperPolynomial::zero();
    for a in 0..osc.n {
        let (xi, xj) = (a * k + i, a * k + j);
        let d_then = osc.space.der(xi, &osc.space.mul(xj, f));
        let l_then = osc.space.mul(xj, &osc.space.der(xi, f));
        let pair = sgn(odd(i));
        out.add_scaled(&d_then, &(-pair.clone() / Q::from_integer(2.into())));
        out.add_scaled(&l_then, &(-pair * sgn(odd(i) && odd(j)) / Q::from_integer(2.into())));
    }
    out
}

#[test]
fn explicit_a_block_matches() {
    for (p, q, n) in [(1, 1, 1), (1, 1, 2), (2, 1, 1)] {
        let osc = Oscillator::new(p, q, n).unwrap();
        for i in 0..p + q {
            for j in 0..p + q {
                let t = osc.build_operator(BasisLabel { block: Block::A, i, j }).unwrap();
                for m in osc.basis_up_to(2) {
                    let f = SuperPolynomial::monomial(m, Q::one());
                    assert_eq!(t.apply(&osc.space, &f), explicit_ea(&osc, i, j, &f));
                }
            }
        }
    }
}

#[test]
fn brackets_degree_three() {
    for (p, q, n) in [(1, 0, 1), (0, 1, 1), (1, 1, 1), (1, 1, 2)] {
        let t = Instant::now();
        let r = commutator_check(p, q, n, 3).unwrap();
        assert!(r.pass && r.grading_ok, "({p},{q},{n}): {:?}", &r.failures[..r.failures.len().min(5)]);
        assert!(r.centralizer_pairs_checked > 0);
        eprintln!("({p},{q},{n}) {} pairs on {} monomials in {:?}", r.pairs_checked, r.basis_size, t.elapsed());
    }
}

#[test]
fn invariant_dimensions() {
    let inv = invariants_up_to_degree(1, 1, 1, 2).unwrap();
    let dims: Vec<usize> = inv.iter().map(|(_, b)| b.len()).collect();
    assert_eq!(dims, vec![1, 0, 4]);
    for (p, q, n) in [(1, 0, 1), (0, 1, 1), (1, 1, 2), (0, 2, 2)] {
        let inv = invariants_up_to_degree(p, q, n, 2).unwrap();
        assert_eq!(inv[1].1.len(), 0);
        assert_eq!(inv[2].1.len(), (p + q) * (p + q), "({p},{q},{n})");
    }
    // The entries of Q span the degree-two invariants.
    let osc = Oscillator::new(1, 1, 2).unwrap();
    for e in q_entries(&osc) {
        for a in 0..2 {
            for b in 0..2 {
                assert!(osc.gl_n_operator(a, b).apply(&osc.space, &e).is_zero());
            }
        }
    }
}

#[test]
fn guardrails() {
    assert!(Oscillator::new(3, 0, 1).is_err());
    assert!(commutator_check(1, 0, 1, 5).is_err());
}

#[test]
fn standard_borel_weight_is_chain_transport_of_lambda() {
    for (p, q, n, deg) in [(1, 0, 1, 0), (0, 1, 1, 0), (1, 1, 1, 2), (1, 1, 2, 2), (2, 1, 1, 4), (1, 2, 1, 4)] {
        let (w, v) = standard_borel_highest_weight(p, q, n, deg).unwrap();
        let chain = superbos::weights::borel_chain(p, q, Some(n));
        let cw = chain.weights.unwrap();
        assert_eq!(w, cw.standard_highest_weight, "({p},{q},{n}) singular vector {v:?}");
        if p * q > 0 {
            assert_ne!(w, cw.lambda);
        }
    }
}
