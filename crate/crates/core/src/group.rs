//! Arithmetic in the extraspecial group `S = p^{1+2}_+` of order p^3 and
//! exponent p, realised as the Heisenberg group over F_p.
//!
//! Elements are triples `(a, b, c)` with
//! `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`.
//! Internally an element is the index `a*p^2 + b*p + c`.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of an element of `S`.
pub type Elem = u16;

const NONE: Elem = Elem::MAX;

/// Largest prime for which the explicit element tables are built.
pub const MAX_PRIME: u32 = 31;

pub fn is_odd_prime(n: u64) -> bool {
    if n < 3 || n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A standalone element `(a, b, c)` of the Heisenberg group over F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub p: u32,
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

impl GroupElement {
    pub fn new(p: u32, a: i64, b: i64, c: i64) -> Result<Self> {
        if !is_odd_prime(p as u64) {
            return Err(Error::NotOddPrime(p as u64));
        }
        let m = p as i64;
        Ok(Self {
            p,
            a: a.rem_euclid(m) as u32,
            b: b.rem_euclid(m) as u32,
            c: c.rem_euclid(m) as u32,
        })
    }

    pub fn identity(p: u32) -> Result<Self> {
        Self::new(p, 0, 0, 0)
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch { expected: self.p, got: other.p });
        }
        let p = self.p as u64;
        Ok(Self {
            p: self.p,
            a: ((self.a + other.a) as u64 % p) as u32,
            b: ((self.b + other.b) as u64 % p) as u32,
            c: ((self.c as u64 + other.c as u64 + self.a as u64 * other.b as u64) % p) as u32,
        })
    }

    pub fn inverse(&self) -> Self {
        let p = self.p as u64;
        let neg = |v: u32| ((p - v as u64) % p) as u32;
        Self {
            p: self.p,
            a: neg(self.a),
            b: neg(self.b),
            c: ((self.a as u64 * self.b as u64 + p - self.c as u64) % p) as u32,
        }
    }

    pub fn pow(&self, k: i64) -> Self {
        let p = self.p as i64;
        let k = k.rem_euclid(p);
        // (a,b,c)^k = (ka, kb, kc + C(k,2) ab)
        let a = self.a as i64;
        let b = self.b as i64;
        let c = self.c as i64;
        Self {
            p: self.p,
            a: (k * a).rem_euclid(p) as u32,
            b: (k * b).rem_euclid(p) as u32,
            c: (k * c + (k * (k - 1) / 2) % p * (a * b % p)).rem_euclid(p) as u32,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.a == 0 && self.b == 0 && self.c == 0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

/// Bitset over the elements of `S`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ElemSet(Vec<u64>);

impl ElemSet {
    pub fn empty(n: usize) -> Self {
        ElemSet(vec![0; n.div_ceil(64)])
    }

    #[inline]
    pub fn insert(&mut self, e: Elem) -> bool {
        let (w, b) = (e as usize / 64, e as usize % 64);
        let fresh = self.0[w] >> b & 1 == 0;
        self.0[w] |= 1 << b;
        fresh
    }

    #[inline]
    pub fn contains(&self, e: Elem) -> bool {
        let w = e as usize / 64;
        w < self.0.len() && self.0[w] >> (e as usize % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &ElemSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = Elem> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            let mut bits = bits;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros();
                bits &= bits - 1;
                Some((w * 64 + t as usize) as Elem)
            })
        })
    }
}

#[derive(Debug)]
struct SubgroupData {
    id: usize,
    set: ElemSet,
    elements: Vec<Elem>,
    gens: Vec<Elem>,
}

/// A subgroup of `S`, interned in the group's registry.
#[derive(Clone, Debug)]
pub struct Subgroup(Arc<SubgroupData>);

impl Subgroup {
    /// Position in the registry of all subgroups.
    pub fn id(&self) -> usize {
        self.0.id
    }
    pub fn order(&self) -> usize {
        self.0.elements.len()
    }
    pub fn elements(&self) -> &[Elem] {
        &self.0.elements
    }
    /// A minimal generating set.
    pub fn gens(&self) -> &[Elem] {
        &self.0.gens
    }
    pub fn set(&self) -> &ElemSet {
        &self.0.set
    }
    #[inline]
    pub fn contains(&self, e: Elem) -> bool {
        self.0.set.contains(e)
    }
    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.0.set.is_subset(&other.0.set)
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}
impl Eq for Subgroup {}
impl Hash for Subgroup {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.id.hash(state)
    }
}
impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.id.cmp(&other.0.id)
    }
}

/// An injective homomorphism from a subgroup of `S` into `S`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupMorphism {
    source: Subgroup,
    image: Subgroup,
    table: Arc<[Elem]>,
}

impl GroupMorphism {
    pub fn source(&self) -> &Subgroup {
        &self.source
    }
    pub fn image(&self) -> &Subgroup {
        &self.image
    }
    #[inline]
    pub fn apply(&self, e: Elem) -> Elem {
        self.table[e as usize]
    }
    pub fn try_apply(&self, e: Elem) -> Result<Elem> {
        match self.table.get(e as usize) {
            Some(&v) if v != NONE => Ok(v),
            _ => Err(Error::OutsideDomain(e as u32)),
        }
    }
    /// Images of the source generators.
    pub fn gen_images(&self) -> Vec<Elem> {
        self.source.gens().iter().map(|&g| self.apply(g)).collect()
    }
    pub fn is_identity(&self) -> bool {
        self.source.elements().iter().all(|&e| self.apply(e) == e)
    }
}

/// Left cosets `sQ` of a subgroup.
#[derive(Debug)]
pub struct CosetTable {
    /// `index[s]` is the number of the coset `sQ`.
    pub index: Vec<u32>,
    /// Least element of each coset.
    pub reps: Vec<Elem>,
}

/// Data for conjugating a subgroup `A` into canonical position inside an
/// ambient subgroup `R`.
#[derive(Debug)]
pub struct ConjData {
    pub canon: Subgroup,
    /// `x0 * A * x0^-1 = canon`
    pub x0: Elem,
    /// Left transversal of `C_R(canon)` in `N_R(canon)`.
    pub normalizer_reps: Vec<Elem>,
}

type DoubleCosets = Arc<Vec<(Elem, u32)>>;

/// The group `S` with element tables, its subgroup lattice and caches.
pub struct Heisenberg {
    p: u32,
    n: usize,
    coords: Vec<[u8; 3]>,
    table: Option<Vec<Elem>>,
    inverse: Vec<Elem>,
    subgroups: Vec<Subgroup>,
    by_set: HashMap<ElemSet, usize>,
    centralizers: Vec<OnceLock<Subgroup>>,
    cosets: Vec<OnceLock<Arc<CosetTable>>>,
    double: RwLock<HashMap<(usize, usize), DoubleCosets>>,
    conj: RwLock<HashMap<(usize, usize), Arc<ConjData>>>,
}

impl fmt::Debug for Heisenberg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Heisenberg(p={})", self.p)
    }
}

static SHARED: OnceLock<Mutex<HashMap<u32, Arc<Heisenberg>>>> = OnceLock::new();

impl Heisenberg {
    /// A process-wide shared instance, so caches are reused.
    pub fn shared(p: u32) -> Result<Arc<Heisenberg>> {
        let map = SHARED.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(g) = map.lock().unwrap().get(&p) {
            return Ok(g.clone());
        }
        let g = Arc::new(Heisenberg::new(p)?);
        Ok(map.lock().unwrap().entry(p).or_insert(g).clone())
    }

    pub fn new(p: u32) -> Result<Self> {
        if !is_odd_prime(p as u64) {
            return Err(Error::NotOddPrime(p as u64));
        }
        if p > MAX_PRIME {
            return Err(Error::PrimeTooLarge(p, MAX_PRIME));
        }
        let n = (p * p * p) as usize;
        let coords = (0..n)
            .map(|e| {
                let e = e as u32;
                [(e / (p * p)) as u8, (e / p % p) as u8, (e % p) as u8]
            })
            .collect();
        let mut g = Heisenberg {
            p,
            n,
            coords,
            table: None,
            inverse: Vec::new(),
            subgroups: Vec::new(),
            by_set: HashMap::new(),
            centralizers: Vec::new(),
            cosets: Vec::new(),
            double: RwLock::new(HashMap::new()),
            conj: RwLock::new(HashMap::new()),
        };
        if n * n <= 1 << 20 {
            let mut t = vec![0; n * n];
            for a in 0..n {
                for b in 0..n {
                    t[a * n + b] = g.mul_slow(a as Elem, b as Elem);
                }
            }
            g.table = Some(t);
        }
        g.inverse = (0..n as Elem).map(|e| g.inv_slow(e)).collect();
        g.build_registry();
        Ok(g)
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn elem(&self, a: i64, b: i64, c: i64) -> Elem {
        let p = self.p as i64;
        (a.rem_euclid(p) * p * p + b.rem_euclid(p) * p + c.rem_euclid(p)) as Elem
    }
    #[inline]
    pub fn coords(&self, e: Elem) -> (u32, u32, u32) {
        let [a, b, c] = self.coords[e as usize];
        (a as u32, b as u32, c as u32)
    }
    pub fn element(&self, e: Elem) -> GroupElement {
        let (a, b, c) = self.coords(e);
        GroupElement { p: self.p, a, b, c }
    }
    pub fn from_element(&self, g: &GroupElement) -> Result<Elem> {
        if g.p != self.p {
            return Err(Error::PrimeMismatch { expected: self.p, got: g.p });
        }
        Ok(self.elem(g.a as i64, g.b as i64, g.c as i64))
    }

    pub fn identity(&self) -> Elem {
        0
    }
    pub fn x(&self) -> Elem {
        self.elem(1, 0, 0)
    }
    pub fn y(&self) -> Elem {
        self.elem(0, 1, 0)
    }
    pub fn z(&self) -> Elem {
        self.elem(0, 0, 1)
    }
    /// `u_i = x y^i` for `i < p`, and `u_p = y`.
    pub fn u(&self, i: usize) -> Elem {
        let i = i as i64;
        if i == self.p as i64 {
            self.y()
        } else {
            self.elem(1, i, i)
        }
    }

    fn mul_slow(&self, x: Elem, y: Elem) -> Elem {
        let p = self.p;
        let (a, b, c) = self.coords(x);
        let (a2, b2, c2) = self.coords(y);
        (((a + a2) % p) * p * p + ((b + b2) % p) * p + (c + c2 + a * b2) % p) as Elem
    }

    fn inv_slow(&self, x: Elem) -> Elem {
        let p = self.p;
        let (a, b, c) = self.coords(x);
        (((p - a) % p) * p * p + ((p - b) % p) * p + (a * b + p - c) % p) as Elem
    }

    #[inline]
    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        match &self.table {
            Some(t) => t[x as usize * self.n + y as usize],
            None => self.mul_slow(x, y),
        }
    }
    #[inline]
    pub fn inv(&self, x: Elem) -> Elem {
        self.inverse[x as usize]
    }
    pub fn pow(&self, x: Elem, k: i64) -> Elem {
        let k = k.rem_euclid(self.p as i64);
        let mut r = 0;
        for _ in 0..k {
            r = self.mul(r, x);
        }
        r
    }
    /// `x g x^-1`
    #[inline]
    pub fn conj(&self, x: Elem, g: Elem) -> Elem {
        self.mul(self.mul(x, g), self.inv(x))
    }
    pub fn commutator(&self, g: Elem, h: Elem) -> Elem {
        self.mul(self.mul(g, h), self.mul(self.inv(g), self.inv(h)))
    }
    pub fn is_central(&self, e: Elem) -> bool {
        let (a, b, _) = self.coords(e);
        a == 0 && b == 0
    }
    /// The index `i` of the maximal subgroup `V_i = <z, u_i>` containing a
    /// non-central element.
    pub fn line_of(&self, e: Elem) -> Option<usize> {
        let (a, b, _) = self.coords(e);
        if a == 0 && b == 0 {
            None
        } else if a == 0 {
            Some(self.p as usize)
        } else {
            Some((b as u64 * inv_mod(a as u64, self.p as u64) % self.p as u64) as usize)
        }
    }
    /// Conjugacy class label: central elements are singletons, a
    /// non-central `g` has class `g<z>`.
    #[inline]
    pub fn class_label(&self, e: Elem) -> u32 {
        let (a, b, c) = self.coords(e);
        if a == 0 && b == 0 {
            c
        } else {
            self.p + a * self.p + b
        }
    }

    fn closure(&self, gens: &[Elem]) -> ElemSet {
        let mut set = ElemSet::empty(self.n);
        set.insert(0);
        let mut queue = vec![0];
        while let Some(e) = queue.pop() {
            for &g in gens {
                let f = self.mul(e, g);
                if set.insert(f) {
                    queue.push(f);
                }
            }
        }
        set
    }

    fn build_registry(&mut self) {
        let p = self.p as usize;
        let mut list: Vec<(ElemSet, Vec<Elem>)> = Vec::new();
        list.push((self.closure(&[self.x(), self.y()]), vec![self.x(), self.y()]));
        for i in 0..=p {
            let gens = vec![self.z(), self.u(i)];
            list.push((self.closure(&gens), gens));
        }
        list.push((self.closure(&[self.z()]), vec![self.z()]));
        let mut seen: HashMap<ElemSet, ()> = list.iter().map(|(s, _)| (s.clone(), ())).collect();
        for e in 1..self.n as Elem {
            if self.is_central(e) {
                continue;
            }
            let s = self.closure(&[e]);
            if !seen.contains_key(&s) {
                seen.insert(s.clone(), ());
                list.push((s, vec![e]));
            }
        }
        list.push((self.closure(&[]), vec![]));
        for (id, (set, gens)) in list.into_iter().enumerate() {
            let elements: Vec<Elem> = set.iter().collect();
            self.by_set.insert(set.clone(), id);
            self.subgroups.push(Subgroup(Arc::new(SubgroupData { id, set, elements, gens })));
        }
        let k = self.subgroups.len();
        self.centralizers = (0..k).map(|_| OnceLock::new()).collect();
        self.cosets = (0..k).map(|_| OnceLock::new()).collect();
    }

    /// All subgroups of `S`: `S`, `V_0..V_p`, `Z(S)`, the other subgroups of
    /// order p, and the trivial subgroup, in that order.
    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }
    pub fn subgroup(&self, id: usize) -> &Subgroup {
        &self.subgroups[id]
    }
    pub fn whole(&self) -> &Subgroup {
        &self.subgroups[0]
    }
    /// `V_i = <z, u_i>`.
    pub fn maximal(&self, i: usize) -> &Subgroup {
        &self.subgroups[1 + i]
    }
    pub fn maximal_subgroups(&self) -> &[Subgroup] {
        &self.subgroups[1..self.p as usize + 2]
    }
    pub fn center(&self) -> &Subgroup {
        &self.subgroups[self.p as usize + 2]
    }
    pub fn trivial(&self) -> &Subgroup {
        self.subgroups.last().unwrap()
    }

    pub fn subgroup_of_set(&self, set: &ElemSet) -> Result<&Subgroup> {
        self.by_set.get(set).map(|&id| &self.subgroups[id]).ok_or(Error::NotASubgroup)
    }
    pub fn subgroup_from_elements(&self, elements: &[Elem]) -> Result<&Subgroup> {
        let mut set = ElemSet::empty(self.n);
        for &e in elements {
            if e as usize >= self.n {
                return Err(Error::OutsideDomain(e as u32));
            }
            set.insert(e);
        }
        self.subgroup_of_set(&set)
    }
    pub fn generate(&self, gens: &[Elem]) -> &Subgroup {
        self.subgroup_of_set(&self.closure(gens)).expect("closure is a subgroup")
    }
    /// The cyclic subgroup generated by `e`.
    pub fn cyclic(&self, e: Elem) -> &Subgroup {
        self.generate(&[e])
    }

    pub fn centralizer(&self, q: &Subgroup) -> &Subgroup {
        self.centralizers[q.id()].get_or_init(|| {
            let els: Vec<Elem> = (0..self.n as Elem)
                .filter(|&x| q.gens().iter().all(|&g| self.mul(x, g) == self.mul(g, x)))
                .collect();
            self.subgroup_from_elements(&els).unwrap().clone()
        })
    }

    /// `N_R(A)` for subgroups `A, R`.
    pub fn normalizer_in(&self, r: &Subgroup, a: &Subgroup) -> &Subgroup {
        let els: Vec<Elem> = r
            .elements()
            .iter()
            .copied()
            .filter(|&x| a.gens().iter().all(|&g| a.contains(self.conj(x, g))))
            .collect();
        self.subgroup_from_elements(&els).unwrap()
    }
    pub fn normalizer(&self, a: &Subgroup) -> &Subgroup {
        self.normalizer_in(self.whole(), a)
    }

    /// `x A x^-1`.
    pub fn conjugate(&self, x: Elem, a: &Subgroup) -> &Subgroup {
        let mut set = ElemSet::empty(self.n);
        for &e in a.elements() {
            set.insert(self.conj(x, e));
        }
        self.subgroup_of_set(&set).unwrap()
    }

    pub fn cosets(&self, q: &Subgroup) -> Arc<CosetTable> {
        self.cosets[q.id()]
            .get_or_init(|| {
                let mut index = vec![u32::MAX; self.n];
                let mut reps = Vec::new();
                for s in 0..self.n as Elem {
                    if index[s as usize] != u32::MAX {
                        continue;
                    }
                    let k = reps.len() as u32;
                    reps.push(s);
                    for &e in q.elements() {
                        index[self.mul(s, e) as usize] = k;
                    }
                }
                Arc::new(CosetTable { index, reps })
            })
            .clone()
    }

    /// Left transversal of `Q` in `S`.
    pub fn transversal(&self, q: &Subgroup) -> Arc<CosetTable> {
        self.cosets(q)
    }

    /// Double cosets `A \ S / B` as (least element, size).
    pub fn double_cosets(&self, a: &Subgroup, b: &Subgroup) -> DoubleCosets {
        let key = (a.id(), b.id());
        if let Some(d) = self.double.read().unwrap().get(&key) {
            return d.clone();
        }
        let mut seen = ElemSet::empty(self.n);
        let mut out = Vec::new();
        for s in 0..self.n as Elem {
            if seen.contains(s) {
                continue;
            }
            let mut size = 0;
            for &x in a.elements() {
                let xs = self.mul(x, s);
                for &y in b.elements() {
                    if seen.insert(self.mul(xs, y)) {
                        size += 1;
                    }
                }
            }
            out.push((s, size));
        }
        let d = Arc::new(out);
        self.double.write().unwrap().insert(key, d.clone());
        d
    }

    /// Canonical `R`-conjugate of `A` (least bitset) with a conjugating
    /// element and a transversal of `C_R(canon)` in `N_R(canon)`.
    pub fn conj_data(&self, r: &Subgroup, a: &Subgroup) -> Arc<ConjData> {
        let key = (r.id(), a.id());
        if let Some(d) = self.conj.read().unwrap().get(&key) {
            return d.clone();
        }
        let mut best: Option<(&Subgroup, Elem)> = None;
        for &x in r.elements() {
            let c = self.conjugate(x, a);
            if best.map_or(true, |(b, _)| c.set() < b.set()) {
                best = Some((c, x));
            }
        }
        let (canon, x0) = best.unwrap();
        let nr = self.normalizer_in(r, canon);
        let mut seen = ElemSet::empty(self.n);
        let cr: Vec<Elem> = nr
            .elements()
            .iter()
            .copied()
            .filter(|&x| canon.gens().iter().all(|&g| self.conj(x, g) == g))
            .collect();
        let mut normalizer_reps = Vec::new();
        for &x in nr.elements() {
            if seen.contains(x) {
                continue;
            }
            normalizer_reps.push(x);
            for &c in &cr {
                seen.insert(self.mul(x, c));
            }
        }
        let d = Arc::new(ConjData { canon: canon.clone(), x0, normalizer_reps });
        self.conj.write().unwrap().insert(key, d.clone());
        d
    }

    /// Some `y` with `y g_k y^-1 = h_k` for all k, where `sub = <g>`;
    /// searches a transversal of `C_S(sub)`.
    pub fn find_conjugator(&self, sub: &Subgroup, g: &[Elem], h: &[Elem]) -> Option<Elem> {
        if g.iter().zip(h).any(|(&a, &b)| self.class_label(a) != self.class_label(b)) {
            return None;
        }
        let t = self.transversal(self.centralizer(sub));
        t.reps
            .iter()
            .copied()
            .find(|&y| g.iter().zip(h).all(|(&a, &b)| self.conj(y, a) == b))
    }

    // ----- morphisms -----

    /// The homomorphism on `source` sending its generators to `images`.
    pub fn morphism(&self, source: &Subgroup, images: &[Elem]) -> Result<GroupMorphism> {
        let phi = self.morphism_by(source.gens(), images)?;
        if phi.source() != source {
            return Err(Error::NotAHomomorphism);
        }
        Ok(phi)
    }

    /// The homomorphism on `<gens>` sending `gens[k]` to `images[k]`.
    pub fn morphism_by(&self, gens: &[Elem], images: &[Elem]) -> Result<GroupMorphism> {
        if images.len() != gens.len() {
            return Err(Error::NotAHomomorphism);
        }
        if let Some(&bad) = gens.iter().chain(images).find(|&&e| e as usize >= self.n) {
            return Err(Error::OutsideDomain(bad as u32));
        }
        let mut table = vec![NONE; self.n];
        table[0] = 0;
        let mut queue = vec![0 as Elem];
        let mut count = 1;
        while let Some(e) = queue.pop() {
            let fe = table[e as usize];
            for (&g, &h) in gens.iter().zip(images) {
                let eg = self.mul(e, g);
                let img = self.mul(fe, h);
                match table[eg as usize] {
                    NONE => {
                        table[eg as usize] = img;
                        queue.push(eg);
                        count += 1;
                    }
                    v if v != img => return Err(Error::NotAHomomorphism),
                    _ => {}
                }
            }
        }
        let mut src = ElemSet::empty(self.n);
        let mut set = ElemSet::empty(self.n);
        for (e, &v) in table.iter().enumerate() {
            if v != NONE {
                src.insert(e as Elem);
                set.insert(v);
            }
        }
        if set.len() != count {
            return Err(Error::NotInjective);
        }
        let source = self.subgroup_of_set(&src)?.clone();
        let image = self.subgroup_of_set(&set)?.clone();
        Ok(GroupMorphism { source, image, table: table.into() })
    }

    /// A morphism given pointwise; checked to be an injective homomorphism.
    pub fn morphism_from_fn(
        &self,
        source: &Subgroup,
        f: impl Fn(Elem) -> Elem,
    ) -> Result<GroupMorphism> {
        let phi = self.morphism(source, &source.gens().iter().map(|&g| f(g)).collect::<Vec<_>>())?;
        if source.elements().iter().any(|&e| phi.apply(e) != f(e)) {
            return Err(Error::NotAHomomorphism);
        }
        Ok(phi)
    }

    pub fn identity_on(&self, q: &Subgroup) -> GroupMorphism {
        self.morphism(q, q.gens()).unwrap()
    }

    /// `c_x : Q -> S, g |-> x g x^-1`.
    pub fn conjugation(&self, x: Elem, q: &Subgroup) -> GroupMorphism {
        let imgs: Vec<Elem> = q.gens().iter().map(|&g| self.conj(x, g)).collect();
        self.morphism(q, &imgs).unwrap()
    }

    /// `g ∘ f`.
    pub fn compose(&self, f: &GroupMorphism, g: &GroupMorphism) -> Result<GroupMorphism> {
        if !f.image().is_subgroup_of(g.source()) {
            return Err(Error::NotComposable);
        }
        let imgs: Vec<Elem> = f.source().gens().iter().map(|&e| g.apply(f.apply(e))).collect();
        self.morphism(f.source(), &imgs)
    }

    pub fn inverse(&self, f: &GroupMorphism) -> GroupMorphism {
        let mut back = vec![NONE; self.n];
        for &e in f.source().elements() {
            back[f.apply(e) as usize] = e;
        }
        let imgs: Vec<Elem> = f.image().gens().iter().map(|&g| back[g as usize]).collect();
        self.morphism(f.image(), &imgs).unwrap()
    }

    pub fn restrict(&self, f: &GroupMorphism, sub: &Subgroup) -> Result<GroupMorphism> {
        if !sub.is_subgroup_of(f.source()) {
            return Err(Error::NotComposable);
        }
        let imgs: Vec<Elem> = sub.gens().iter().map(|&g| f.apply(g)).collect();
        self.morphism(sub, &imgs)
    }

    /// All injective homomorphisms `Q -> S`.
    pub fn injective_homs(&self, q: &Subgroup) -> Vec<GroupMorphism> {
        let k = q.gens().len();
        let mut out = Vec::new();
        let mut imgs = vec![0 as Elem; k];
        let total = self.n.pow(k as u32);
        for code in 0..total {
            let mut c = code;
            for slot in imgs.iter_mut() {
                *slot = (c % self.n) as Elem;
                c /= self.n;
            }
            if let Ok(m) = self.morphism(q, &imgs) {
                out.push(m);
            }
        }
        out
    }
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}
