//! Restriction of `S`-`S`-bisets along `ψ: R -> S` on the left.

use super::{canonical_in, Canonical, Coefficient, FormalBiset, GraphSubgroup};
use crate::group::{Elem, GroupMorphism, Heisenberg};

/// One transitive piece of `_ψ((S×S)/Δ_Q^φ)`: the `R×S`-orbit of the point
/// `(t, 1)Δ_Q^φ`.
#[derive(Clone, Debug)]
pub struct Piece {
    /// Representative of the double coset `ψ(R) t Q`.
    pub t: Elem,
    /// Stabiliser `Δ_A^χ` with `A = ψ^-1(tQt^-1)`, `χ = φ∘c_{t^-1}∘ψ`.
    pub stabilizer: GraphSubgroup,
    pub canonical: Canonical,
}

pub fn restriction_pieces(g: &Heisenberg, class: &GroupMorphism, psi: &GroupMorphism) -> Vec<Piece> {
    let r = psi.source();
    let q = class.source();
    g.double_cosets(psi.image(), q)
        .iter()
        .map(|&(t, _)| {
            let ti = g.inv(t);
            let a: Vec<Elem> = r
                .elements()
                .iter()
                .copied()
                .filter(|&e| q.contains(g.conj(ti, psi.apply(e))))
                .collect();
            let a = g.subgroup_from_elements(&a).expect("preimage of a subgroup");
            let imgs: Vec<Elem> =
                a.gens().iter().map(|&e| class.apply(g.conj(ti, psi.apply(e)))).collect();
            let chi = g.morphism(a, &imgs).expect("restriction of an injective map");
            let canonical = canonical_in(g, r, &chi);
            Piece { t, stabilizer: GraphSubgroup::new(chi), canonical }
        })
        .collect()
}

/// `_ψ X` as a formal `R`-`S`-biset.
pub fn restrict_left<C: Coefficient>(b: &FormalBiset<C>, psi: &GroupMorphism) -> FormalBiset<C> {
    let g = b.group();
    let mut out = FormalBiset::new_over(g.clone(), psi.source());
    for (_, t) in b.terms() {
        for piece in restriction_pieces(g, &t.rep.morphism, psi) {
            out.add_key(piece.canonical.key, t.coeff.clone());
        }
    }
    out
}

/// `_α X` for an automorphism `α` of `S`: `[Q, φ] -> [α^-1 Q, φ∘α]`.
pub fn twist<C: Coefficient>(b: &FormalBiset<C>, alpha: &GroupMorphism) -> FormalBiset<C> {
    restrict_left(b, alpha)
}
