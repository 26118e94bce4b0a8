//! Saturated fusion systems on `S` in which every `V_i` is radical,
//! described by the partition of the `p+1` maximal subgroups into
//! `F`-classes and the index `r` of `SL_2(p)` in each `Aut_F(V_i)`.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gl2::{line_of_vector, line_vector, Mat2};
use crate::group::{inv_mod, is_odd_prime, pow_mod, Elem, GroupMorphism, Heisenberg, Subgroup};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineClass {
    pub lines: Vec<usize>,
    pub r: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionSystemSpec {
    pub prime: u32,
    pub name: String,
    pub classes: Vec<LineClass>,
}

impl FusionSystemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap()
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.prime;
        if !is_odd_prime(p as u64) {
            return Err(Error::NotOddPrime(p as u64));
        }
        let bad = |m: String| Err(Error::InvalidFusionData(m));
        if self.classes.is_empty() {
            return bad("no line classes".into());
        }
        let mut seen = vec![false; p as usize + 1];
        for c in &self.classes {
            if c.lines.is_empty() {
                return bad("empty line class".into());
            }
            if c.r == 0 || (p - 1) % c.r != 0 {
                return bad(format!("r = {} does not divide p-1 = {}", c.r, p - 1));
            }
            for &l in &c.lines {
                if l > p as usize {
                    return bad(format!("line {l} out of range 0..={p}"));
                }
                if std::mem::replace(&mut seen[l], true) {
                    return bad(format!("line {l} listed twice"));
                }
            }
        }
        if let Some(l) = seen.iter().position(|s| !s) {
            return bad(format!("line {l} missing"));
        }
        self.f_number().map(|_| ())
    }

    /// `f = |Out_F(S)| / (p-1)`, which equals `|class| * r` for every class.
    pub fn f_number(&self) -> Result<u32> {
        let fs: Vec<u32> = self.classes.iter().map(|c| c.lines.len() as u32 * c.r).collect();
        if fs.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::InvalidFusionData(format!(
                "class sizes times r disagree: {fs:?}"
            )));
        }
        Ok(fs[0])
    }

    pub fn out_order(&self) -> usize {
        (self.prime as usize - 1) * self.f_number().unwrap_or(0) as usize
    }

    pub fn class_of(&self, line: usize) -> usize {
        self.classes.iter().position(|c| c.lines.contains(&line)).expect("line in some class")
    }

    pub fn r_of(&self, line: usize) -> u32 {
        self.classes[self.class_of(line)].r
    }
}

/// Metadata for the six built-in systems.
#[derive(Clone, Debug, Serialize)]
pub struct BuiltinSystem {
    pub key: &'static str,
    pub aliases: &'static [&'static str],
    pub group: &'static str,
    pub spec: FusionSystemSpec,
}

pub fn builtin_catalog() -> Vec<BuiltinSystem> {
    let mk = |p: u32, name: &str, classes: &[(&[usize], u32)]| FusionSystemSpec {
        prime: p,
        name: name.to_string(),
        classes: classes.iter().map(|(l, r)| LineClass { lines: l.to_vec(), r: *r }).collect(),
    };
    vec![
        BuiltinSystem {
            key: "d8",
            aliases: &["tits", "2f4"],
            group: "2F4(2)'",
            spec: mk(3, "D8", &[(&[0, 1], 2), (&[2, 3], 2)]),
        },
        BuiltinSystem {
            key: "sd16",
            aliases: &["j4"],
            group: "J4",
            spec: mk(3, "SD16", &[(&[0, 1, 2, 3], 2)]),
        },
        BuiltinSystem {
            key: "th4s4",
            aliases: &["th", "4s4"],
            group: "Th",
            spec: mk(5, "4S4", &[(&[0, 1, 2, 3, 4, 5], 4)]),
        },
        BuiltinSystem {
            key: "rv48",
            aliases: &["d16x3"],
            group: "exotic",
            spec: mk(7, "D16x3", &[(&[0, 1, 2, 3], 2), (&[4, 5, 6, 7], 2)]),
        },
        BuiltinSystem {
            key: "rv72",
            aliases: &["6sq:2", "6^2:2"],
            group: "exotic",
            spec: mk(7, "6sq:2", &[(&[1, 2, 3, 4, 5, 6], 2), (&[0, 7], 6)]),
        },
        BuiltinSystem {
            key: "rv96",
            aliases: &["sd32x3"],
            group: "exotic",
            spec: mk(7, "SD32x3", &[(&[0, 1, 2, 3, 4, 5, 6, 7], 2)]),
        },
    ]
}

pub fn builtin_systems() -> Vec<FusionSystemSpec> {
    builtin_catalog().into_iter().map(|b| b.spec).collect()
}

/// Look up a built-in system by key, alias or name (case-insensitive).
pub fn builtin(name: &str) -> Result<BuiltinSystem> {
    let n = name.to_ascii_lowercase();
    builtin_catalog()
        .into_iter()
        .find(|b| b.key == n || b.aliases.contains(&n.as_str()) || b.spec.name.to_ascii_lowercase() == n)
        .ok_or_else(|| Error::UnknownSystem(name.to_string()))
}

/// The subgroup of order `r` of F_p^x.
pub fn d_r(p: u32, r: u32) -> Vec<u32> {
    (1..p).filter(|&x| pow_mod(x as u64, r as u64, p as u64) == 1).collect()
}

/// `Aut_F(V_i)` in the basis `(z, u_i)`: matrices with determinant in `D_r`.
pub fn aut_f_v(spec: &FusionSystemSpec, i: usize) -> Vec<Mat2> {
    let d = d_r(spec.prime, spec.r_of(i));
    Mat2::all_invertible(spec.prime).into_iter().filter(|m| d.contains(&m.det())).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaSets {
    /// `(k, l)` with `kl` in `D_r`.
    pub extendable: Vec<(u32, u32)>,
    /// `(k, l)` with `-kl` in `D_r`.
    pub nonextendable: Vec<(u32, u32)>,
}

pub fn lambda_sets(spec: &FusionSystemSpec, i: usize) -> LambdaSets {
    let p = spec.prime;
    let d = d_r(p, spec.r_of(i));
    let mut ext = Vec::new();
    let mut non = Vec::new();
    for k in 1..p {
        for l in 1..p {
            let kl = k * l % p;
            if d.contains(&kl) {
                ext.push((k, l));
            }
            if d.contains(&((p - kl) % p)) {
                non.push((k, l));
            }
        }
    }
    LambdaSets { extendable: ext, nonextendable: non }
}

/// The automorphism of `S` acting on `S/Z` by `m` and on `Z` by `det m`.
pub fn lift_matrix_to_aut(g: &Heisenberg, m: &Mat2) -> Result<GroupMorphism> {
    if m.p != g.p() {
        return Err(Error::PrimeMismatch { expected: g.p(), got: m.p });
    }
    if !m.is_invertible() {
        return Err(Error::SingularMatrix);
    }
    let (a, b, c, d) = (m.a as i64, m.b as i64, m.c as i64, m.d as i64);
    g.morphism(g.whole(), &[g.elem(a, c, a * c), g.elem(b, d, b * d)])
}

/// Action of an automorphism of `S` on `S/Z`.
pub fn aut_matrix(g: &Heisenberg, alpha: &GroupMorphism) -> Mat2 {
    let (a, c, _) = g.coords(alpha.apply(g.x()));
    let (b, d, _) = g.coords(alpha.apply(g.y()));
    Mat2::new(g.p(), a as i64, b as i64, c as i64, d as i64)
}

/// Image line of line `i` under `m` and the eigenvalue on it.
fn line_action(m: &Mat2, i: usize) -> (usize, u32) {
    let p = m.p;
    let w = m.apply(line_vector(p, i));
    let j = line_of_vector(p, w);
    let u = line_vector(p, j);
    let lam = if u.0 != 0 {
        w.0 as u64 * inv_mod(u.0 as u64, p as u64) % p as u64
    } else {
        w.1 as u64 * inv_mod(u.1 as u64, p as u64) % p as u64
    };
    (j, lam as u32)
}

fn mat_closure(gens: &[Mat2], p: u32, limit: usize) -> Option<HashSet<Mat2>> {
    let id = Mat2::identity(p);
    let mut set = HashSet::from([id]);
    let mut frontier = vec![id];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for g in &frontier {
            for h in gens {
                let x = g.mul(h);
                if set.insert(x) {
                    if set.len() > limit {
                        return None;
                    }
                    next.push(x);
                }
            }
        }
        frontier = next;
    }
    Some(set)
}

struct OutSearch<'a> {
    spec: &'a FusionSystemSpec,
    p: u32,
    target: usize,
    class_of: Vec<usize>,
    dr: Vec<Vec<u32>>,
    all: Vec<Mat2>,
}

impl OutSearch<'_> {
    /// Orbits inside classes, and every line stabiliser embeds into
    /// `{(det, lambda) : det*lambda in D_r}` (onto it when `full`).
    fn admissible(&self, g: &HashSet<Mat2>, full: bool) -> bool {
        let p = self.p;
        if g.len() % p as usize == 0 || self.target % g.len() != 0 {
            return false;
        }
        for i in 0..=p as usize {
            let ci = self.class_of[i];
            let mut seen = HashSet::new();
            for m in g {
                let (j, lam) = line_action(m, i);
                if self.class_of[j] != ci {
                    return false;
                }
                if j == i {
                    let k = m.det();
                    if !self.dr[ci].contains(&(k * lam % p)) || !seen.insert((k, lam)) {
                        return false;
                    }
                }
            }
        }
        !full || g.len() == self.target
    }

    fn orbit(&self, g: &HashSet<Mat2>, i: usize) -> Vec<usize> {
        let mut o: Vec<usize> = g.iter().map(|m| line_action(m, i).0).collect();
        o.sort_unstable();
        o.dedup();
        o
    }

    /// Matrices diagonal in the basis `(w_i, w_j)` with eigenvalues `(a, b)`,
    /// `a^2 b` in `D_r`.
    fn torus(&self, i: usize, j: usize, ci: usize) -> Vec<Mat2> {
        let p = self.p;
        let (vi, vj) = (line_vector(p, i), line_vector(p, j));
        let base = Mat2::new(p, vi.0 as i64, vj.0 as i64, vi.1 as i64, vj.1 as i64);
        let inv = base.inverse().unwrap();
        let mut out = Vec::new();
        for a in 1..p {
            for b in 1..p {
                if self.dr[ci].contains(&(a * a % p * b % p)) {
                    out.push(base.mul(&Mat2::diag(p, a as i64, b as i64)).mul(&inv));
                }
            }
        }
        out
    }

    fn rec(&self, gens: &[Mat2], g: &HashSet<Mat2>, depth: usize) -> Option<HashSet<Mat2>> {
        if self.admissible(g, true) {
            return Some(g.clone());
        }
        if depth > 8 {
            return None;
        }
        for c in &self.spec.classes {
            let i = *c.lines.iter().min().unwrap();
            let orb = self.orbit(g, i);
            let mut want = c.lines.clone();
            want.sort_unstable();
            if orb != want {
                let t = *want.iter().find(|l| !orb.contains(l)).unwrap();
                for m in &self.all {
                    if line_action(m, i).0 != t {
                        continue;
                    }
                    let mut next = gens.to_vec();
                    next.push(*m);
                    let Some(h) = mat_closure(&next, self.p, self.target) else { continue };
                    if !self.admissible(&h, false) {
                        continue;
                    }
                    if let Some(res) = self.rec(&next, &h, depth + 1) {
                        return Some(res);
                    }
                }
                return None;
            }
        }
        for (ci, c) in self.spec.classes.iter().enumerate() {
            let i = *c.lines.iter().min().unwrap();
            let stab = g.iter().filter(|m| line_action(m, i).0 == i).count();
            if stab < (self.p as usize - 1) * c.r as usize {
                for j in (0..=self.p as usize).filter(|&j| j != i) {
                    let mut next = gens.to_vec();
                    next.extend(self.torus(i, j, ci));
                    let Some(h) = mat_closure(&next, self.p, self.target) else { continue };
                    if !self.admissible(&h, false) {
                        continue;
                    }
                    if let Some(res) = self.rec(&next, &h, depth + 1) {
                        return Some(res);
                    }
                }
                return None;
            }
        }
        None
    }
}

/// `Out_F(S)` as a subgroup of `GL_2(p)`: a p'-subgroup of order `(p-1)f`
/// whose orbits on lines are the given classes and whose line stabilisers
/// act on `V_i` through exactly the extendable part of `Aut_F(V_i)`.
/// Found by a backtracking search over subgroups generated by line tori and
/// line-moving elements.
pub fn build_out_f(spec: &FusionSystemSpec) -> Result<Vec<Mat2>> {
    spec.validate()?;
    let p = spec.prime;
    let mut class_of = vec![0; p as usize + 1];
    for (ci, c) in spec.classes.iter().enumerate() {
        for &l in &c.lines {
            class_of[l] = ci;
        }
    }
    let search = OutSearch {
        spec,
        p,
        target: spec.out_order(),
        class_of,
        dr: spec.classes.iter().map(|c| d_r(p, c.r)).collect(),
        all: Mat2::all_invertible(p),
    };
    let c0 = &spec.classes[0];
    let i = *c0.lines.iter().min().unwrap();
    for j in (0..=p as usize).filter(|&j| j != i) {
        let k = search.torus(i, j, 0);
        let Some(g) = mat_closure(&k, p, search.target) else { continue };
        if !search.admissible(&g, false) {
            continue;
        }
        if let Some(res) = search.rec(&k, &g, 0) {
            let mut out: Vec<Mat2> = res.into_iter().collect();
            out.sort();
            return Ok(out);
        }
    }
    Err(Error::NoOuterGroup { name: spec.name.clone(), p })
}

pub fn f_number(spec: &FusionSystemSpec) -> Result<u32> {
    spec.f_number()
}

/// A representative of an `S×S`-class of morphisms in `F`.
#[derive(Clone, Debug)]
pub struct HomClass {
    pub morphism: GroupMorphism,
    pub extendable: bool,
    /// Target maximal subgroup, when the source is some `V_i`.
    pub target: Option<usize>,
}

/// A fusion system with `Out_F(S)` and the normalised generators
/// `ũ_i = u_i^{n_i}` for which the isomorphisms `α_{i,j}` send `z -> z`
/// and `ũ_i -> ũ_j`.
pub struct FusionSystem {
    spec: FusionSystemSpec,
    group: Arc<Heisenberg>,
    out: Vec<Mat2>,
    out_set: HashSet<Mat2>,
    out_autos: Vec<GroupMorphism>,
    class_of: Vec<usize>,
    dr: Vec<Vec<u32>>,
    norm_exp: Vec<u32>,
    line_gens: Vec<Elem>,
    alpha: BTreeMap<(usize, usize), GroupMorphism>,
    builtin: bool,
}

impl std::fmt::Debug for FusionSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FusionSystem({}, p={})", self.spec.name, self.spec.prime)
    }
}

impl FusionSystem {
    pub fn builtin(name: &str) -> Result<Self> {
        let b = builtin(name)?;
        let mut fs = Self::new(b.spec)?;
        fs.builtin = true;
        Ok(fs)
    }

    pub fn new(spec: FusionSystemSpec) -> Result<Self> {
        spec.validate()?;
        let p = spec.prime;
        let group = Heisenberg::shared(p)?;
        let out = build_out_f(&spec)?;
        let out_autos = out
            .iter()
            .map(|m| lift_matrix_to_aut(&group, m))
            .collect::<Result<Vec<_>>>()?;
        let mut class_of = vec![0; p as usize + 1];
        for (ci, c) in spec.classes.iter().enumerate() {
            for &l in &c.lines {
                class_of[l] = ci;
            }
        }
        let dr = spec.classes.iter().map(|c| d_r(p, c.r)).collect();
        let builtin = builtin_catalog().iter().any(|b| b.spec == spec);
        let mut fs = FusionSystem {
            out_set: out.iter().copied().collect(),
            spec,
            group,
            out,
            out_autos,
            class_of,
            dr,
            norm_exp: vec![1; p as usize + 1],
            line_gens: Vec::new(),
            alpha: BTreeMap::new(),
            builtin,
        };
        fs.line_gens = (0..=p as usize).map(|i| fs.group.u(i)).collect();
        fs.normalize()?;
        Ok(fs)
    }

    fn normalize(&mut self) -> Result<()> {
        let g = self.group.clone();
        let p = self.spec.prime;
        let mut root_alpha: BTreeMap<usize, GroupMorphism> = BTreeMap::new();
        for (ci, c) in self.spec.classes.iter().enumerate() {
            let i0 = *c.lines.iter().min().unwrap();
            let mut lines = c.lines.clone();
            lines.sort_unstable();
            for &j in &lines {
                let m = *self
                    .out
                    .iter()
                    .find(|m| line_action(m, i0).0 == j)
                    .ok_or_else(|| Error::InvalidFusionData(format!("line {j} not in orbit")))?;
                let lift = lift_matrix_to_aut(&g, &m)?;
                let (_, b) = decompose_in(&g, g.u(j), lift.apply(g.u(i0)))
                    .ok_or_else(|| Error::InvalidFusionData("lift leaves V_j".into()))?;
                let det = m.det();
                let base = b as u64 * det as u64 % p as u64;
                let n_j = self.dr[ci].iter().map(|&d| (base * d as u64 % p as u64) as u32).min().unwrap();
                let t = (n_j as u64 * inv_mod(b as u64, p as u64) % p as u64) as u32;
                let det_inv = inv_mod(det as u64, p as u64) as u32;
                let h = *self
                    .out
                    .iter()
                    .find(|h| line_action(h, i0) == (i0, t) && h.det() == det_inv)
                    .ok_or_else(|| Error::InvalidFusionData("stabiliser too small".into()))?;
                let beta = g.compose(&lift_matrix_to_aut(&g, &h)?, &lift)?;
                let target = g.pow(g.u(j), n_j as i64);
                let img = beta.apply(g.u(i0));
                let w = (0..g.order() as Elem)
                    .find(|&w| g.conj(w, img) == target)
                    .ok_or_else(|| Error::InvalidFusionData("no inner correction".into()))?;
                let alpha = g.compose(&beta, &g.conjugation(w, g.whole()))?;
                debug_assert_eq!(alpha.apply(g.z()), g.z());
                self.norm_exp[j] = n_j;
                self.line_gens[j] = target;
                root_alpha.insert(j, alpha);
            }
            debug_assert_eq!(self.norm_exp[i0], 1);
            for &i in &lines {
                let inv_i = g.inverse(&root_alpha[&i]);
                for &j in &lines {
                    let a = g.compose(&inv_i, &root_alpha[&j])?;
                    self.alpha.insert((i, j), a);
                }
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> &FusionSystemSpec {
        &self.spec
    }
    pub fn group(&self) -> &Arc<Heisenberg> {
        &self.group
    }
    pub fn p(&self) -> u32 {
        self.spec.prime
    }
    pub fn is_builtin(&self) -> bool {
        self.builtin
    }
    pub fn f(&self) -> u32 {
        self.spec.f_number().unwrap()
    }
    /// `Out_F(S)` as matrices on `S/Z`.
    pub fn out(&self) -> &[Mat2] {
        &self.out
    }
    /// One automorphism of `S` per element of `Out_F(S)`, in the order of
    /// [`FusionSystem::out`].
    pub fn out_autos(&self) -> &[GroupMorphism] {
        &self.out_autos
    }
    pub fn out_order(&self) -> usize {
        self.out.len()
    }
    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }
    pub fn r(&self, i: usize) -> u32 {
        self.spec.classes[self.class_of[i]].r
    }
    /// `D_r` for the class of line `i`.
    pub fn d_r(&self, i: usize) -> &[u32] {
        &self.dr[self.class_of[i]]
    }
    pub fn conjugate_lines(&self, i: usize) -> Vec<usize> {
        (0..=self.p() as usize).filter(|&j| self.class_of[j] == self.class_of[i]).collect()
    }
    /// The normalised generator `ũ_i` of `V_i` modulo `Z`.
    pub fn line_gen(&self, i: usize) -> Elem {
        self.line_gens[i]
    }
    pub fn norm_exponent(&self, i: usize) -> u32 {
        self.norm_exp[i]
    }

    /// `α_{i,j}`: `z -> z`, `ũ_i -> ũ_j`.
    pub fn alpha(&self, i: usize, j: usize) -> Result<&GroupMorphism> {
        self.alpha.get(&(i, j)).ok_or_else(|| {
            Error::InvalidFusionData(format!("V_{i} and V_{j} are not F-conjugate"))
        })
    }
    pub fn normalized_isos(&self) -> &BTreeMap<(usize, usize), GroupMorphism> {
        &self.alpha
    }

    /// The morphism `V_i -> V_j` with matrix `m` in the bases `(z, ũ_i)`,
    /// `(z, ũ_j)`.
    pub fn v_morphism(&self, i: usize, j: usize, m: &Mat2) -> Result<GroupMorphism> {
        let g = &self.group;
        let uj = self.line_gens[j];
        let img = |s: u32, t: u32| g.mul(g.pow(g.z(), s as i64), g.pow(uj, t as i64));
        let img_z = img(m.a, m.c);
        let img_u = img(m.b, m.d);
        let back = inv_mod(self.norm_exp[i] as u64, self.p() as u64) as i64;
        g.morphism(g.maximal(i), &[img_z, g.pow(img_u, back)])
    }

    /// Matrix of a morphism `V_i -> V_j` in the bases `(z, ũ_i)`, `(z, ũ_j)`.
    pub fn v_matrix(&self, phi: &GroupMorphism) -> Option<(usize, usize, Mat2)> {
        let g = &self.group;
        let i = (0..=self.p() as usize).find(|&i| g.maximal(i) == phi.source())?;
        let j = (0..=self.p() as usize).find(|&j| g.maximal(j) == phi.image())?;
        let (a, c) = decompose_in(g, self.line_gens[j], phi.apply(g.z()))?;
        let (b, d) = decompose_in(g, self.line_gens[j], phi.apply(self.line_gens[i]))?;
        Some((i, j, Mat2::new(self.p(), a as i64, b as i64, c as i64, d as i64)))
    }

    /// `ψ_{i,j}^{k,l}`: `z -> z^k`, `ũ_i -> ũ_j^l`.
    pub fn psi(&self, i: usize, j: usize, k: u32, l: u32) -> Result<GroupMorphism> {
        self.v_morphism(i, j, &Mat2::diag(self.p(), k as i64, l as i64))
    }

    /// `φ_{i,j}^{k,l}`: `z -> ũ_j^k`, `ũ_i -> z^l`.
    pub fn phi(&self, i: usize, j: usize, k: u32, l: u32) -> Result<GroupMorphism> {
        self.v_morphism(i, j, &Mat2::new(self.p(), 0, l as i64, k as i64, 0))
    }

    /// Whether a morphism between subgroups of `S` lies in `F`.
    pub fn contains(&self, phi: &GroupMorphism) -> bool {
        let g = &self.group;
        match phi.source().order() {
            n if n == g.order() => self.out_set.contains(&aut_matrix(g, phi)),
            n if n == (self.p() * self.p()) as usize => match self.v_matrix(phi) {
                Some((i, j, m)) => {
                    self.class_of[i] == self.class_of[j] && self.d_r(i).contains(&m.det())
                }
                None => false,
            },
            _ => true,
        }
    }

    /// Extendability of a morphism out of some `V_i`: `φ(Z) = Z`.
    pub fn is_extendable(&self, phi: &GroupMorphism) -> bool {
        self.group.is_central(phi.apply(self.group.z()))
    }

    /// Extendability via `N_φ = {g ∈ N_S(Q) : φ c_g φ^-1 ∈ Aut_S(φ Q)}`:
    /// a morphism out of a fully normalised `V_i` extends to `S` exactly
    /// when `N_φ = S`.
    pub fn n_phi(&self, phi: &GroupMorphism) -> Subgroup {
        let g = &self.group;
        let q = phi.source();
        let n = g.normalizer(q);
        let gens = q.gens();
        let imgs: Vec<Elem> = gens.iter().map(|&e| phi.apply(e)).collect();
        let els: Vec<Elem> = n
            .elements()
            .iter()
            .copied()
            .filter(|&x| {
                let targets: Vec<Elem> = gens.iter().map(|&e| phi.apply(g.conj(x, e))).collect();
                g.find_conjugator(phi.image(), &imgs, &targets).is_some()
            })
            .collect();
        g.subgroup_from_elements(&els).unwrap().clone()
    }

    /// Representatives of `S×S`-classes of `Hom_F(Q, S)`.
    pub fn enumerate_hom_classes(&self, q: &Subgroup) -> Result<Vec<HomClass>> {
        let g = &self.group;
        let p = self.p() as usize;
        if q.order() == g.order() {
            return Ok(self
                .out_autos
                .iter()
                .map(|a| HomClass { morphism: a.clone(), extendable: true, target: None })
                .collect());
        }
        if let Some(i) = (0..=p).find(|&i| g.maximal(i) == q) {
            let sets = lambda_sets(&self.spec, i);
            let mut out = Vec::new();
            for j in self.conjugate_lines(i) {
                for &(k, l) in &sets.extendable {
                    out.push(HomClass { morphism: self.psi(i, j, k, l)?, extendable: true, target: Some(j) });
                }
                for &(k, l) in &sets.nonextendable {
                    out.push(HomClass { morphism: self.phi(i, j, k, l)?, extendable: false, target: Some(j) });
                }
            }
            return Ok(out);
        }
        if q.order() == p {
            let mut out = Vec::new();
            for zeta in self.order_p_targets() {
                for m in 1..p as i64 {
                    let morphism = g.morphism(q, &[g.pow(zeta, m)])?;
                    out.push(HomClass { morphism, extendable: false, target: None });
                }
            }
            return Ok(out);
        }
        if q.order() == 1 {
            return Ok(vec![HomClass { morphism: g.identity_on(q), extendable: true, target: None }]);
        }
        Err(Error::NotASubgroup)
    }

    /// `z, ũ_0, ..., ũ_p`: representatives of the `S`-classes of subgroups
    /// of order p.
    pub fn order_p_targets(&self) -> Vec<Elem> {
        let mut v = vec![self.group.z()];
        v.extend_from_slice(&self.line_gens);
        v
    }
}

/// Write `g` as `z^s h^t` inside `<z, h>`.
pub fn decompose_in(grp: &Heisenberg, h: Elem, g: Elem) -> Option<(u32, u32)> {
    let p = grp.p() as u64;
    let (ha, hb, _) = grp.coords(h);
    let (ga, gb, _) = grp.coords(g);
    let t = if ha != 0 {
        ga as u64 * inv_mod(ha as u64, p) % p
    } else {
        gb as u64 * inv_mod(hb as u64, p) % p
    };
    let rest = grp.mul(g, grp.inv(grp.pow(h, t as i64)));
    let (ra, rb, rc) = grp.coords(rest);
    (ra == 0 && rb == 0).then_some((rc, t as u32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_orders() {
        let want = [8, 16, 96, 48, 72, 96];
        for (b, w) in builtin_catalog().iter().zip(want) {
            let out = build_out_f(&b.spec).unwrap();
            assert_eq!(out.len(), w, "{}", b.key);
            assert_eq!(out.len(), b.spec.out_order());
        }
    }

    #[test]
    fn spec_validation() {
        let mut s = builtin("d8").unwrap().spec;
        s.classes[0].r = 3;
        assert!(s.validate().is_err());
        let mut s = builtin("d8").unwrap().spec;
        s.classes[1].lines = vec![2];
        assert!(s.validate().is_err());
        let s = builtin("rv72").unwrap().spec;
        assert_eq!(s.f_number().unwrap(), 12);
        assert!(builtin("nope").is_err());
        assert_eq!(builtin("J4").unwrap().key, "sd16");
    }

    #[test]
    fn json_round_trip() {
        for s in builtin_systems() {
            assert_eq!(FusionSystemSpec::from_json(&s.to_json()).unwrap(), s);
        }
    }
}
