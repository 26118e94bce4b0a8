//! Bisets as explicit finite sets with action tables. Used as oracles for
//! the formula-based code and for products.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use super::{canonical, canonical_in, count_fixed_points, representative, BisetClass, FormalBiset};
use crate::error::{Error, Result};
use crate::group::{Elem, GroupMorphism, Heisenberg};

/// Default bound on `points * |S|` table entries.
pub const DEFAULT_LIMIT: usize = 1 << 25;

/// A finite `S`-`S`-biset with tables `left[u*n + x] = u·x` and
/// `right[v*n + x] = x·v`.
#[derive(Clone, Debug)]
pub struct ExplicitBiset {
    group: Arc<Heisenberg>,
    n: usize,
    left: Vec<u32>,
    right: Vec<u32>,
}

impl ExplicitBiset {
    pub fn from_tables(group: Arc<Heisenberg>, n: usize, left: Vec<u32>, right: Vec<u32>) -> Result<Self> {
        let s = group.order();
        if left.len() != s * n || right.len() != s * n {
            return Err(Error::Parse("action table size mismatch".into()));
        }
        let x = ExplicitBiset { group, n, left, right };
        let g = &x.group;
        for u in 0..s as Elem {
            for v in 0..s as Elem {
                for p in (0..n as u32).step_by(1 + n / 64) {
                    let a = x.act_left(g.mul(u, v), p);
                    let b = x.act_left(u, x.act_left(v, p));
                    let c = x.act_right(p, g.mul(u, v));
                    let d = x.act_right(x.act_right(p, u), v);
                    if a != b || c != d {
                        return Err(Error::Parse("tables are not actions".into()));
                    }
                }
            }
        }
        Ok(x)
    }

    /// `(S×S)/Δ_Q^φ`, points `(sQ, t)` with `s` the least coset element.
    pub fn transitive(group: Arc<Heisenberg>, phi: &GroupMorphism, limit: usize) -> Result<Self> {
        let g = &group;
        let s = g.order();
        let q = phi.source();
        let cos = g.cosets(q);
        let n = cos.reps.len() * s;
        if n * s > limit {
            return Err(Error::ResourceLimit(format!("{n} points")));
        }
        let mut left = vec![0; s * n];
        let mut right = vec![0; s * n];
        for (ci, &rep) in cos.reps.iter().enumerate() {
            for t in 0..s as Elem {
                let id = ci * s + t as usize;
                for u in 0..s as Elem {
                    let su = g.mul(u, rep);
                    let ci2 = cos.index[su as usize] as usize;
                    let qq = g.mul(g.inv(su), cos.reps[ci2]);
                    let t2 = g.mul(t, phi.apply(qq));
                    left[u as usize * n + id] = (ci2 * s + t2 as usize) as u32;
                    right[u as usize * n + id] = (ci * s + g.mul(g.inv(u), t) as usize) as u32;
                }
            }
        }
        Ok(ExplicitBiset { group, n, left, right })
    }

    pub fn from_formal(b: &FormalBiset<i64>, limit: usize) -> Result<Self> {
        if !b.is_genuine() {
            return Err(Error::NotGenuine("negative coefficient".into()));
        }
        let mut out = ExplicitBiset::empty(b.group().clone());
        for (_, t) in b.terms() {
            let one = ExplicitBiset::transitive(b.group().clone(), &t.rep.morphism, limit)?;
            for _ in 0..t.coeff {
                out = out.disjoint_union(&one);
                if out.n * out.group.order() > limit {
                    return Err(Error::ResourceLimit(format!("{} points", out.n)));
                }
            }
        }
        Ok(out)
    }

    pub fn empty(group: Arc<Heisenberg>) -> Self {
        ExplicitBiset { group, n: 0, left: Vec::new(), right: Vec::new() }
    }

    pub fn disjoint_union(&self, other: &Self) -> Self {
        let s = self.group.order();
        let n = self.n + other.n;
        let mut left = Vec::with_capacity(s * n);
        let mut right = Vec::with_capacity(s * n);
        for u in 0..s {
            left.extend_from_slice(&self.left[u * self.n..(u + 1) * self.n]);
            left.extend(other.left[u * other.n..(u + 1) * other.n].iter().map(|&x| x + self.n as u32));
            right.extend_from_slice(&self.right[u * self.n..(u + 1) * self.n]);
            right.extend(other.right[u * other.n..(u + 1) * other.n].iter().map(|&x| x + self.n as u32));
        }
        ExplicitBiset { group: self.group.clone(), n, left, right }
    }

    pub fn len(&self) -> usize {
        self.n
    }
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
    pub fn group(&self) -> &Arc<Heisenberg> {
        &self.group
    }

    #[inline]
    pub fn act_left(&self, u: Elem, x: u32) -> u32 {
        self.left[u as usize * self.n + x as usize]
    }
    #[inline]
    pub fn act_right(&self, x: u32, v: Elem) -> u32 {
        self.right[v as usize * self.n + x as usize]
    }

    /// Points `x` with `u·x·ψ(u)^-1 = x` for all `u` in the source of `ψ`.
    pub fn fixed_points(&self, by: &GroupMorphism) -> u64 {
        let g = &self.group;
        let gens: Vec<(Elem, Elem)> =
            by.source().gens().iter().map(|&e| (e, g.inv(by.apply(e)))).collect();
        (0..self.n as u32)
            .filter(|&x| gens.iter().all(|&(a, b)| self.act_right(self.act_left(a, x), b) == x))
            .count() as u64
    }

    pub fn is_free(&self) -> bool {
        (1..self.group.order() as Elem).all(|u| {
            (0..self.n as u32).all(|x| self.act_left(u, x) != x && self.act_right(x, u) != x)
        })
    }

    /// `X ×_S Y = (X × Y) / (x·w, y) ~ (x, w·y)`.
    pub fn compose(&self, other: &Self, limit: usize) -> Result<Self> {
        let g = &self.group;
        let s = g.order();
        let pairs = self.n * other.n;
        if pairs > limit {
            return Err(Error::ResourceLimit(format!("{pairs} pairs")));
        }
        let mut id = vec![u32::MAX; pairs];
        let mut reps = Vec::new();
        for x in 0..self.n as u32 {
            for y in 0..other.n as u32 {
                if id[x as usize * other.n + y as usize] != u32::MAX {
                    continue;
                }
                let k = reps.len() as u32;
                reps.push((x, y));
                for w in 0..s as Elem {
                    let x2 = self.act_right(x, w);
                    let y2 = other.act_left(g.inv(w), y);
                    id[x2 as usize * other.n + y2 as usize] = k;
                }
            }
        }
        let n = reps.len();
        if n * s > limit {
            return Err(Error::ResourceLimit(format!("{n} points")));
        }
        let mut left = vec![0; s * n];
        let mut right = vec![0; s * n];
        for u in 0..s as Elem {
            for (k, &(x, y)) in reps.iter().enumerate() {
                left[u as usize * n + k] = id[self.act_left(u, x) as usize * other.n + y as usize];
                right[u as usize * n + k] = id[x as usize * other.n + other.act_right(y, u) as usize];
            }
        }
        Ok(ExplicitBiset { group: self.group.clone(), n, left, right })
    }

    /// The `R`-`S`-biset `_ψ X`, decomposed by orbits and point stabilisers.
    pub fn restrict_left(&self, psi: &GroupMorphism) -> FormalBiset<i64> {
        let g = &self.group;
        let r = psi.source();
        let mut out = FormalBiset::new_over(g.clone(), r);
        let mut seen = vec![false; self.n];
        let s = g.order();
        let mut where_v = vec![Elem::MAX; self.n];
        for x0 in 0..self.n as u32 {
            if seen[x0 as usize] {
                continue;
            }
            let mut stack = vec![x0];
            seen[x0 as usize] = true;
            while let Some(x) = stack.pop() {
                let next = r
                    .gens()
                    .iter()
                    .map(|&e| self.act_left(psi.apply(e), x))
                    .chain((0..s as Elem).map(|v| self.act_right(x, v)));
                for y in next.collect::<Vec<_>>() {
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        stack.push(y);
                    }
                }
            }
            for v in 0..s as Elem {
                where_v[self.act_right(x0, v) as usize] = v;
            }
            let mut a = Vec::new();
            let mut chi = HashMap::new();
            for &e in r.elements() {
                let y = self.act_left(psi.apply(e), x0);
                let v = where_v[y as usize];
                if v != Elem::MAX && self.act_right(x0, v) == y {
                    a.push(e);
                    chi.insert(e, v);
                }
            }
            for v in 0..s as Elem {
                where_v[self.act_right(x0, v) as usize] = Elem::MAX;
            }
            let a = g.subgroup_from_elements(&a).expect("stabiliser is a subgroup");
            let m = g.morphism_from_fn(a, |e| chi[&e]).expect("stabiliser is a graph");
            out.add(&m, 1);
        }
        out
    }
}

static UNIVERSE: OnceLock<Mutex<HashMap<u32, Arc<Vec<BisetClass>>>>> = OnceLock::new();

/// Every `S×S`-class of graph subgroups `Δ_Q^φ`, largest `Q` first.
pub fn graph_universe(g: &Heisenberg) -> Arc<Vec<BisetClass>> {
    let map = UNIVERSE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(u) = map.lock().unwrap().get(&g.p()) {
        return u.clone();
    }
    let mut keys = BTreeMap::new();
    for q in g.subgroups() {
        for phi in g.injective_homs(q) {
            let key = canonical(g, &phi).key;
            keys.entry(key).or_insert(());
        }
    }
    let mut classes: Vec<BisetClass> = keys
        .into_keys()
        .map(|key| BisetClass { rep: representative(g, &key), key })
        .collect();
    classes.sort_by(|a, b| b.rep.order().cmp(&a.rep.order()).then(a.key.cmp(&b.key)));
    let u = Arc::new(classes);
    map.lock().unwrap().insert(g.p(), u.clone());
    u
}

/// Recover the class decomposition of a free `S`-`S`-set from its marks by
/// a triangular solve over all graph classes.
pub fn decompose_by_marks(x: &ExplicitBiset) -> Result<FormalBiset<i64>> {
    if !x.is_free() {
        return Err(Error::NotFree);
    }
    let g = x.group();
    if g.p() > 5 {
        return Err(Error::ResourceLimit("decomposition needs p <= 5".into()));
    }
    let universe = graph_universe(g);
    let mut found: Vec<(&BisetClass, i64)> = Vec::new();
    let mut out = FormalBiset::new(g.clone());
    for c in universe.iter() {
        let mut m = x.fixed_points(&c.rep.morphism) as i64;
        for (d, k) in &found {
            m -= k * count_fixed_points(g, &d.rep.morphism, &c.rep.morphism) as i64;
        }
        if m == 0 {
            continue;
        }
        let diag = count_fixed_points(g, &c.rep.morphism, &c.rep.morphism) as i64;
        if m < 0 || m % diag != 0 {
            return Err(Error::NotGenuine(format!("residual mark {m} at {}", c.key)));
        }
        found.push((c, m / diag));
        out.add_class(c, m / diag);
    }
    Ok(out)
}

/// Product in the double Burnside ring, via explicit sets.
pub fn compose(a: &FormalBiset<i64>, b: &FormalBiset<i64>) -> Result<FormalBiset<i64>> {
    let x = ExplicitBiset::from_formal(a, DEFAULT_LIMIT)?;
    let y = ExplicitBiset::from_formal(b, DEFAULT_LIMIT)?;
    decompose_by_marks(&x.compose(&y, DEFAULT_LIMIT)?)
}

/// Brute-force `R×S`-class test for two graph subgroups of `R×S`.
pub fn brute_force_conjugate_in(
    g: &Heisenberg,
    ambient: &crate::group::Subgroup,
    a: &GroupMorphism,
    b: &GroupMorphism,
) -> bool {
    if a.source().order() != b.source().order() {
        return false;
    }
    ambient.elements().iter().any(|&x| {
        g.conjugate(x, a.source()) == b.source()
            && (0..g.order() as Elem).any(|y| {
                a.source().elements().iter().all(|&e| b.apply(g.conj(x, e)) == g.conj(y, a.apply(e)))
            })
    })
}

/// Class keys agree with brute-force conjugacy.
pub fn keys_agree(g: &Heisenberg, ambient: &crate::group::Subgroup, a: &GroupMorphism, b: &GroupMorphism) -> bool {
    let same_key = canonical_in(g, ambient, a).key == canonical_in(g, ambient, b).key;
    same_key == brute_force_conjugate_in(g, ambient, a, b)
}
