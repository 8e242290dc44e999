//! Weights of `gl(2p|2q)`, odd reflections, the Borel chain from the standard
//! simple system to the one adapted to the short grading, and Dynkin diagrams.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::osc::Q;
use crate::smat::MultiIndex;

/// A weight in the `δ₁…δ_P, ε₁…ε_R` basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Weight {
    pub delta: Vec<Q>,
    pub eps: Vec<Q>,
}

fn qi(n: i64) -> Q {
    Q::from_integer(n.into())
}

impl Weight {
    pub fn zero(nd: usize, ne: usize) -> Self {
        Weight { delta: vec![Q::zero(); nd], eps: vec![Q::zero(); ne] }
    }

    pub fn delta(i: usize, nd: usize, ne: usize) -> Self {
        let mut w = Self::zero(nd, ne);
        w.delta[i] = qi(1);
        w
    }

    pub fn eps(j: usize, nd: usize, ne: usize) -> Self {
        let mut w = Self::zero(nd, ne);
        w.eps[j] = qi(1);
        w
    }

    pub fn add(&self, o: &Weight) -> Weight {
        Weight {
            delta: self.delta.iter().zip(&o.delta).map(|(a, b)| a + b).collect(),
            eps: self.eps.iter().zip(&o.eps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn neg(&self) -> Weight {
        Weight {
            delta: self.delta.iter().map(|a| -a).collect(),
            eps: self.eps.iter().map(|a| -a).collect(),
        }
    }

    pub fn sub(&self, o: &Weight) -> Weight {
        self.add(&o.neg())
    }

    /// `(δ_i, δ_j) = δ_ij`, `(ε_i, ε_j) = −δ_ij`, `(δ, ε) = 0`.
    pub fn form(&self, o: &Weight) -> Q {
        let d: Q = self.delta.iter().zip(&o.delta).map(|(a, b)| a * b).sum();
        let e: Q = self.eps.iter().zip(&o.eps).map(|(a, b)| a * b).sum();
        d - e
    }

    /// Mixes δ and ε: the root is odd.
    pub fn is_odd_root(&self) -> bool {
        self.delta.iter().any(|x| !x.is_zero()) && self.eps.iter().any(|x| !x.is_zero())
    }

    pub fn label(&self) -> String {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut push = |c: &Q, name: String| {
            if c.is_zero() {
                return;
            }
            let mag = c.abs();
            let s = if mag == qi(1) { name } else { format!("{mag}{name}") };
            if c.is_positive() {
                pos.push(s)
            } else {
                neg.push(s)
            }
        };
        for (i, c) in self.delta.iter().enumerate() {
            push(c, format!("δ{}", i + 1));
        }
        for (j, c) in self.eps.iter().enumerate() {
            push(c, format!("ε{}", j + 1));
        }
        let mut s = pos.join("+");
        for t in neg {
            s.push('−');
            s.push_str(&t);
        }
        if s.is_empty() {
            "0".into()
        } else {
            s
        }
    }
}

impl std::fmt::Display for Weight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let d: Vec<String> = self.delta.iter().map(|x| x.to_string()).collect();
        let e: Vec<String> = self.eps.iter().map(|x| x.to_string()).collect();
        write!(f, "δ:({}) ε:({})", d.join(", "), e.join(", "))
    }
}

/// Which basis vector a chain node is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Basis {
    D(usize),
    E(usize),
}

/// Ordered simple roots of `gl(2p|2q)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleSystem {
    pub p: usize,
    pub q: usize,
    pub roots: Vec<Weight>,
}

impl SimpleSystem {
    fn from_sequence(p: usize, q: usize, seq: &[Basis]) -> Self {
        let v = |b: Basis| match b {
            Basis::D(i) => Weight::delta(i, 2 * p, 2 * q),
            Basis::E(j) => Weight::eps(j, 2 * p, 2 * q),
        };
        SimpleSystem {
            p,
            q,
            roots: seq.windows(2).map(|w| v(w[0]).sub(&v(w[1]))).collect(),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        self.roots.iter().map(Weight::label).collect()
    }

    pub fn position(&self, alpha: &Weight) -> Option<usize> {
        self.roots.iter().position(|r| r == alpha)
    }

    pub fn diagram(&self) -> DynkinDiagram {
        let nodes = self
            .roots
            .iter()
            .map(|r| DynkinNode { label: r.label(), odd: r.is_odd_root() })
            .collect();
        let mut edges = Vec::new();
        for i in 0..self.roots.len() {
            for j in i + 1..self.roots.len() {
                if !self.roots[i].form(&self.roots[j]).is_zero() {
                    edges.push((i, j));
                }
            }
        }
        DynkinDiagram { nodes, edges }
    }
}

/// `δ₁−δ₂, …, δ_{2p}−ε₁, …, ε_{2q−1}−ε_{2q}`.
pub fn standard_simple_system(p: usize, q: usize) -> SimpleSystem {
    let seq: Vec<Basis> = (0..2 * p).map(Basis::D).chain((0..2 * q).map(Basis::E)).collect();
    SimpleSystem::from_sequence(p, q, &seq)
}

/// The diagram of the Borel contained in `k ⊕ p⁺`: the `δ₁..δ_p`, `ε₁..ε_q`,
/// `δ_{p+1}..δ_{2p}`, `ε_{q+1}..ε_{2q}` segments in this order.
pub fn target_simple_system(p: usize, q: usize) -> SimpleSystem {
    let seq: Vec<Basis> = (0..p)
        .map(Basis::D)
        .chain((0..q).map(Basis::E))
        .chain((p..2 * p).map(Basis::D))
        .chain((q..2 * q).map(Basis::E))
        .collect();
    SimpleSystem::from_sequence(p, q, &seq)
}

/// `α ↦ −α`, `β ↦ β + α` if `(β, α) ≠ 0`, otherwise `β ↦ β`.
pub fn odd_reflection(sys: &SimpleSystem, alpha: &Weight) -> Result<SimpleSystem> {
    if sys.position(alpha).is_none() {
        return Err(Error::InvalidArgument(format!("{} is not simple", alpha.label())));
    }
    if !alpha.is_odd_root() || !alpha.form(alpha).is_zero() {
        return Err(Error::InvalidArgument(format!("{} is not odd isotropic", alpha.label())));
    }
    let roots = sys
        .roots
        .iter()
        .map(|b| {
            if b == alpha {
                b.neg()
            } else if !b.form(alpha).is_zero() {
                b.add(alpha)
            } else {
                b.clone()
            }
        })
        .collect();
    Ok(SimpleSystem { roots, ..sys.clone() })
}

/// `λ` if `(λ, α) = 0`, else `λ − α`.
pub fn reflect_weight(lambda: &Weight, alpha: &Weight) -> Weight {
    if lambda.form(alpha).is_zero() {
        lambda.clone()
    } else {
        lambda.sub(alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynkinNode {
    pub label: String,
    pub odd: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DynkinDiagram {
    pub nodes: Vec<DynkinNode>,
    pub edges: Vec<(usize, usize)>,
}

impl DynkinDiagram {
    /// `○` even, `⊗` odd isotropic; `—` for consecutive linked nodes.
    pub fn ascii(&self) -> String {
        let mut s = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 {
                s.push_str(if self.edges.contains(&(i - 1, i)) { " — " } else { "   " });
            }
            s.push_str(if n.odd { "⊗" } else { "○" });
            s.push('(');
            s.push_str(&n.label);
            s.push(')');
        }
        s
    }
}

/// One step of the executed chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflectionStep {
    pub root: String,
    pub applied: bool,
    pub system_after: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BorelChain {
    pub p: usize,
    pub q: usize,
    pub final_system: SimpleSystem,
    pub diagram: DynkinDiagram,
    pub target: DynkinDiagram,
    pub matches_target: bool,
    pub log: Vec<ReflectionStep>,
    pub weights: Option<ChainWeights>,
}

/// The oscillator highest weight `λ` (for the Borel adapted to the grading)
/// followed through the executed chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainWeights {
    pub lambda: Weight,
    /// `λ` pushed along the chain as if it were the standard highest weight.
    pub lambda_after_chain: Weight,
    /// Whether that push leaves `λ` fixed, i.e. `(λ, α) = 0` for every applied root.
    pub lambda_invariant: bool,
    /// `λ` transported back from the adapted Borel to the standard one.
    pub standard_highest_weight: Weight,
    /// `λ_δ − λ_ε` (coordinate pairing, not the invariant form) vanishes on every applied root.
    pub coordinate_pairings_vanish: bool,
}

/// The reflections `R_{max(p,q)} ⋯ R_1`, listed in order of application.
pub fn chain_roots(p: usize, q: usize) -> Vec<Weight> {
    let (nd, ne) = (2 * p, 2 * q);
    if p == 0 || q == 0 {
        return Vec::new();
    }
    // 1-based δ_a − ε_b.
    let root = |a: usize, b: usize| Weight::delta(a - 1, nd, ne).sub(&Weight::eps(b - 1, nd, ne));
    let mut out = Vec::new();
    for i in 1..=p.max(q) {
        // Products list smaller k to the right, so they are applied first.
        let r_delta: Vec<Weight> = (1..=i).map(|k| root(2 * p - i + 1, k.min(q))).collect();
        let r_eps: Vec<Weight> = (1..=i).map(|k| root((p + 1).max(2 * p + 1 - k), i)).collect();
        // R_i = r · (R^δ R^ε): rightmost first.
        if i <= p.min(q) {
            out.extend(r_eps);
            out.extend(r_delta);
        } else if i <= p {
            out.extend(r_delta);
        } else {
            out.extend(r_eps);
        }
        out.push(root((p + 1).max(2 * p + 1 - i), i.min(q)));
    }
    out
}

/// Runs the chain from the standard system, skipping reflections whose root
/// is not simple in the current system, and compares with the target diagram.
pub fn borel_chain(p: usize, q: usize, n: Option<usize>) -> BorelChain {
    let mut sys = standard_simple_system(p, q);
    let mut log = Vec::new();
    let mut applied = Vec::new();
    for alpha in chain_roots(p, q) {
        let ok = match odd_reflection(&sys, &alpha) {
            Ok(next) => {
                sys = next;
                applied.push(alpha.clone());
                true
            }
            Err(_) => false,
        };
        log.push(ReflectionStep { root: alpha.label(), applied: ok, system_after: sys.labels() });
    }
    let target = target_simple_system(p, q);
    let weights = n.map(|n| {
        let lambda = highest_weight(p, q, n);
        let after = applied.iter().fold(lambda.clone(), |l, a| reflect_weight(&l, a));
        // Undo each reflection: across −α, the weight moves by +α when (λ, α) ≠ 0.
        let standard = applied.iter().rev().fold(lambda.clone(), |l, a| reflect_weight(&l, &a.neg()));
        let coord = |a: &Weight| -> Q {
            let d: Q = lambda.delta.iter().zip(&a.delta).map(|(x, y)| x * y).sum();
            let e: Q = lambda.eps.iter().zip(&a.eps).map(|(x, y)| x * y).sum();
            d + e
        };
        ChainWeights {
            lambda_invariant: after == lambda,
            coordinate_pairings_vanish: applied.iter().all(|a| coord(a).is_zero()),
            lambda_after_chain: after,
            standard_highest_weight: standard,
            lambda,
        }
    });
    BorelChain {
        p,
        q,
        matches_target: sys.roots == target.roots,
        diagram: sys.diagram(),
        target: target.diagram(),
        final_system: sys,
        log,
        weights,
    }
}

/// `λ = −n/2 Σ_{i≤p} δ_i + n/2 Σ_{i>p} δ_i + n/2 Σ_{j≤q} ε_j − n/2 Σ_{j>q} ε_j`.
pub fn highest_weight(p: usize, q: usize, n: usize) -> Weight {
    let h = Q::new((n as i64).into(), 2.into());
    Weight {
        delta: (0..2 * p).map(|i| if i < p { -h.clone() } else { h.clone() }).collect(),
        eps: (0..2 * q).map(|j| if j < q { h.clone() } else { -h.clone() }).collect(),
    }
}

/// Outcome of the dominance-integrality test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteDimCheck {
    pub finite: bool,
    pub witness: Option<String>,
}

/// Finite-dimensionality of `L(λ)` for the standard (distinguished) Borel:
/// `⟨λ, α^∨⟩ ∈ ℤ_{≥0}` for every even simple root, where the coroot pairing is
/// `λ_i − λ_{i+1}` on both the δ and the ε chain.
pub fn finite_dim_check(lambda: &Weight) -> FiniteDimCheck {
    let chains = [("δ", &lambda.delta), ("ε", &lambda.eps)];
    for (name, coords) in chains {
        for i in 0..coords.len().saturating_sub(1) {
            let v = &coords[i] - &coords[i + 1];
            if !v.is_integer() || v.is_negative() {
                return FiniteDimCheck {
                    finite: false,
                    witness: Some(format!("⟨λ, {name}{}−{name}{}⟩ = {v}", i + 1, i + 2)),
                };
            }
        }
    }
    FiniteDimCheck { finite: true, witness: None }
}

/// Polynomial-cone indices with `Σ|m_j| ≤ cap` and their weights
/// `μ_m = −Σ m_j δ_j + Σ m_{p+j} ε_j` (as `gl(p|q)` weights).
pub fn k_types(p: usize, q: usize, cap: i64) -> Vec<(MultiIndex, Weight)> {
    MultiIndex::cone(p, q, cap)
        .into_iter()
        .map(|m| {
            let w = Weight {
                delta: m.0[..p].iter().map(|&x| qi(-x)).collect(),
                eps: m.0[p..].iter().map(|&x| qi(x)).collect(),
            };
            (m, w)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_systems() {
        assert_eq!(standard_simple_system(1, 0).labels(), vec!["δ1−δ2"]);
        assert_eq!(standard_simple_system(0, 1).labels(), vec!["ε1−ε2"]);
        assert_eq!(standard_simple_system(1, 1).labels(), vec!["δ1−δ2", "δ2−ε1", "ε1−ε2"]);
    }

    #[test]
    fn reflection_example() {
        let s = standard_simple_system(1, 1);
        let a = Weight::delta(1, 2, 2).sub(&Weight::eps(0, 2, 2));
        let r = odd_reflection(&s, &a).unwrap();
        assert_eq!(r.labels(), vec!["δ1−ε1", "ε1−δ2", "δ2−ε2"]);
        assert_eq!(odd_reflection(&r, &a.neg()).unwrap(), s);
        assert!(odd_reflection(&s, &Weight::delta(0, 2, 2).sub(&Weight::eps(0, 2, 2))).is_err());
        assert!(odd_reflection(&s, &s.roots[0]).is_err());
    }

    #[test]
    fn reflect_weight_examples() {
        let a = Weight::delta(0, 2, 2).sub(&Weight::eps(0, 2, 2));
        assert_eq!(reflect_weight(&Weight::delta(0, 2, 2), &a), Weight::eps(0, 2, 2));
        let orth = Weight::delta(1, 2, 2);
        assert_eq!(reflect_weight(&orth, &a), orth);
    }

    #[test]
    fn finite_dim_examples() {
        let c = finite_dim_check(&highest_weight(1, 0, 1));
        assert!(!c.finite);
        assert_eq!(c.witness.as_deref(), Some("⟨λ, δ1−δ2⟩ = -1"));
        assert!(finite_dim_check(&highest_weight(0, 2, 3)).finite);
        assert!(!finite_dim_check(&highest_weight(1, 1, 2)).finite);
    }

    #[test]
    fn finiteness_iff_no_even_x_block() {
        for p in 0..=2 {
            for q in 0..=2 {
                for n in 1..=4 {
                    let w = borel_chain(p, q, Some(n)).weights.unwrap();
                    assert_eq!(finite_dim_check(&w.lambda).finite, p == 0, "({p},{q},{n})");
                    assert_eq!(finite_dim_check(&w.standard_highest_weight).finite, p == 0, "({p},{q},{n})");
                    assert!(w.coordinate_pairings_vanish);
                    assert_eq!(w.lambda_invariant, p * q == 0);
                }
            }
        }
    }

    #[test]
    fn k_type_examples() {
        assert_eq!(k_types(1, 1, 0).len(), 1);
        let ms: Vec<Vec<i64>> = k_types(1, 0, 2).into_iter().map(|(m, _)| m.0).collect();
        assert_eq!(ms, vec![vec![0], vec![1], vec![2]]);
        let mut ms: Vec<Vec<i64>> = k_types(1, 1, 2).into_iter().map(|(m, _)| m.0).collect();
        ms.sort();
        assert_eq!(ms, vec![vec![0, -2], vec![0, -1], vec![0, 0], vec![1, -1], vec![1, 0], vec![2, 0]]);
    }
}
