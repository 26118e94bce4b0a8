//! Transitive bisets `(S×S)/Δ_Q^φ`, their classes, and fixed-point counts.

pub mod explicit;
pub mod formal;
pub mod restrict;
pub mod stability;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::group::{Elem, GroupMorphism, Heisenberg, Subgroup};

pub use formal::{Coefficient, FormalBiset, FormalBisetJson, Rational, SummandJson};

/// `Δ_Q^φ = {(u, φ(u)) : u ∈ Q}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphSubgroup {
    pub morphism: GroupMorphism,
}

impl GraphSubgroup {
    pub fn new(morphism: GroupMorphism) -> Self {
        GraphSubgroup { morphism }
    }
    pub fn source(&self) -> &Subgroup {
        self.morphism.source()
    }
    pub fn image(&self) -> &Subgroup {
        self.morphism.image()
    }
    pub fn order(&self) -> usize {
        self.morphism.source().order()
    }
    pub fn describe(&self, g: &Heisenberg) -> String {
        let show = |v: &[Elem]| {
            v.iter().map(|&e| g.element(e).to_string()).collect::<Vec<_>>().join(",")
        };
        format!(
            "[<{}> -> <{}>]",
            show(self.source().gens()),
            show(&self.morphism.gen_images())
        )
    }
}

impl From<GroupMorphism> for GraphSubgroup {
    fn from(m: GroupMorphism) -> Self {
        GraphSubgroup { morphism: m }
    }
}

/// Canonical label of an `R×S`-conjugacy class of graph subgroups of
/// `R×S`: the canonical `R`-conjugate of the source and the images of its
/// generators, minimised over the remaining conjugations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassKey {
    pub ambient: usize,
    pub source: usize,
    pub images: Vec<Elem>,
}

/// A class key with a witness `(left, right)` such that conjugating the
/// input by `(left, right)` gives the canonical representative.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub key: ClassKey,
    pub left: Elem,
    pub right: Elem,
}

/// Canonical class of `Δ_A^χ ≤ R×S` under `R×S`-conjugation.
pub fn canonical_in(g: &Heisenberg, ambient: &Subgroup, chi: &GroupMorphism) -> Canonical {
    let d = g.conj_data(ambient, chi.source());
    let gens = d.canon.gens();
    let k = gens.len();
    let trans = g.transversal(g.centralizer(chi.image()));
    let mut best = [Elem::MAX; 2];
    let mut wit = (0, 0);
    let mut pre = [0 as Elem; 2];
    let mut first = true;
    for &n in &d.normalizer_reps {
        let x = g.mul(n, d.x0);
        let xi = g.inv(x);
        for (slot, &e) in pre.iter_mut().zip(gens) {
            *slot = chi.apply(g.conj(xi, e));
        }
        for &y in &trans.reps {
            let mut cand = [Elem::MAX; 2];
            for t in 0..k {
                cand[t] = g.conj(y, pre[t]);
            }
            if first || cand[..k] < best[..k] {
                first = false;
                best = cand;
                wit = (x, y);
            }
        }
    }
    Canonical {
        key: ClassKey { ambient: ambient.id(), source: d.canon.id(), images: best[..k].to_vec() },
        left: wit.0,
        right: wit.1,
    }
}

/// Canonical class of `Δ_Q^φ ≤ S×S`.
pub fn canonical(g: &Heisenberg, phi: &GroupMorphism) -> Canonical {
    canonical_in(g, g.whole(), phi)
}

/// The canonical representative of a class key.
pub fn representative(g: &Heisenberg, key: &ClassKey) -> GraphSubgroup {
    GraphSubgroup::new(g.morphism(g.subgroup(key.source), &key.images).expect("valid class key"))
}

/// A transitive biset class: canonical key plus canonical representative.
#[derive(Clone, Debug)]
pub struct BisetClass {
    pub key: ClassKey,
    pub rep: GraphSubgroup,
}

impl BisetClass {
    pub fn of(g: &Heisenberg, phi: &GroupMorphism) -> Self {
        let key = canonical(g, phi).key;
        let rep = representative(g, &key);
        BisetClass { key, rep }
    }
    pub fn of_in(g: &Heisenberg, ambient: &Subgroup, phi: &GroupMorphism) -> Self {
        let key = canonical_in(g, ambient, phi).key;
        let rep = representative(g, &key);
        BisetClass { key, rep }
    }
}

impl PartialEq for BisetClass {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl Eq for BisetClass {}

impl fmt::Display for ClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q#{}{:?}", self.source, self.images)
    }
}

/// `N_{ψ,φ} = {x ∈ S : xRx^-1 ≤ Q and φ∘c_x|_R = c_y∘ψ for some y}`.
pub fn n_set(g: &Heisenberg, psi: &GroupMorphism, phi: &GroupMorphism) -> Vec<Elem> {
    let r = psi.source();
    let q = phi.source();
    let src = psi.gen_images();
    (0..g.order() as Elem)
        .filter(|&x| {
            let moved: Vec<Elem> = r.gens().iter().map(|&e| g.conj(x, e)).collect();
            if !moved.iter().all(|&e| q.contains(e)) {
                return false;
            }
            let targets: Vec<Elem> = moved.iter().map(|&e| phi.apply(e)).collect();
            g.find_conjugator(psi.image(), &src, &targets).is_some()
        })
        .collect()
}

/// `Δ_R^ψ` is `S×S`-conjugate into `Δ_Q^φ`.
pub fn is_subconjugate(g: &Heisenberg, psi: &GroupMorphism, phi: &GroupMorphism) -> bool {
    psi.source().order() <= phi.source().order() && !n_set(g, psi, phi).is_empty()
}

pub fn are_conjugate(g: &Heisenberg, a: &GraphSubgroup, b: &GraphSubgroup) -> bool {
    a.order() == b.order()
        && is_subconjugate(g, &a.morphism, &b.morphism)
        && is_subconjugate(g, &b.morphism, &a.morphism)
}

/// `|X^{Δ_R^ψ}|` for `X = (S×S)/Δ_Q^φ`, as `|N_{ψ,φ}|/|Q| · |C_S(ψ(R))|`.
/// `N_{ψ,φ}` is a union of double cosets `Q x C_S(R)`, so only double
/// coset representatives are tested.
pub fn count_fixed_points(g: &Heisenberg, class: &GroupMorphism, by: &GroupMorphism) -> u64 {
    let q = class.source();
    let r = by.source();
    if r.order() > q.order() {
        return 0;
    }
    let src = by.gen_images();
    let mut n = 0u64;
    let mut targets = [0 as Elem; 2];
    let k = r.gens().len();
    for &(x, w) in g.double_cosets(q, g.centralizer(r)).iter() {
        let mut inside = true;
        for (t, &e) in r.gens().iter().enumerate() {
            let m = g.conj(x, e);
            if !q.contains(m) {
                inside = false;
                break;
            }
            targets[t] = class.apply(m);
        }
        if inside && g.find_conjugator(by.image(), &src, &targets[..k]).is_some() {
            n += w as u64;
        }
    }
    n / q.order() as u64 * g.centralizer(by.image()).order() as u64
}

/// `|X^{Δ_R^ψ}|` counted on the explicit coset set `(S×S)/Δ_Q^φ`.
pub fn brute_force_fixed_points(g: &Heisenberg, class: &GroupMorphism, by: &GroupMorphism) -> u64 {
    let q = class.source();
    let cos = g.cosets(q);
    let n = g.order();
    let gens: Vec<(Elem, Elem)> = by.source().gens().iter().map(|&e| (e, by.apply(e))).collect();
    let mut count = 0;
    for (ci, &rep) in cos.reps.iter().enumerate() {
        for t in 0..n as Elem {
            let fixed = gens.iter().all(|&(a, b)| {
                let s = g.mul(a, rep);
                let ci2 = cos.index[s as usize] as usize;
                let r2 = cos.reps[ci2];
                let qq = g.mul(g.inv(s), r2);
                ci2 == ci && g.mul(g.mul(b, t), class.apply(qq)) == t
            });
            if fixed {
                count += 1;
            }
        }
    }
    count
}

/// Brute-force subconjugacy over all `(s, t) ∈ S×S`.
pub fn brute_force_subconjugate(g: &Heisenberg, psi: &GroupMorphism, phi: &GroupMorphism) -> bool {
    let r = psi.source();
    let q = phi.source();
    (0..g.order() as Elem).any(|s| {
        r.elements().iter().all(|&e| q.contains(g.conj(s, e)))
            && (0..g.order() as Elem).any(|t| {
                r.elements().iter().all(|&e| phi.apply(g.conj(s, e)) == g.conj(t, psi.apply(e)))
            })
    })
}
