//! The permutation image of `G = Aut(₁X) ≅ S≀Sym(J)` realizing `F`.
//!
//! `J` is the set of right `S`-orbits of `X`: one block per summand copy
//! `(S×S)/Δ_Q^φ`, with points the left cosets `sQ`.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::biset::restrict::{restriction_pieces, Piece};
use crate::biset::{ClassKey, FormalBiset, GraphSubgroup};
use crate::error::{Error, Result};
use crate::fusion::FusionSystem;
use crate::group::{Elem, GroupMorphism, Heisenberg};

#[derive(Clone, Debug)]
pub struct Block {
    pub class: ClassKey,
    pub rep: GraphSubgroup,
    /// Which copy of a summand with multiplicity above one.
    pub copy: usize,
    pub offset: usize,
    /// `|S : Q|`.
    pub size: usize,
}

/// `J` with its blocks `J_i`, in summand order.
#[derive(Clone, Debug)]
pub struct IndexSet {
    group: Arc<Heisenberg>,
    blocks: Vec<Block>,
    len: usize,
}

impl IndexSet {
    pub fn group(&self) -> &Arc<Heisenberg> {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_of(&self, j: usize) -> usize {
        self.blocks.partition_point(|b| b.offset <= j) - 1
    }

    /// `(block, least element of the coset)`.
    pub fn point(&self, j: usize) -> (usize, Elem) {
        let b = self.block_of(j);
        let q = self.blocks[b].rep.source();
        (b, self.group.cosets(q).reps[j - self.blocks[b].offset])
    }

    /// Blocks with `Q = S`; their points form `J⁽⁰⁾`.
    pub fn top_blocks(&self) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&b| self.blocks[b].size == 1).collect()
    }

    /// Block counts by layer.
    pub fn layer_counts(&self) -> Vec<usize> {
        let p = self.group.p() as usize;
        let mut out = Vec::new();
        for b in &self.blocks {
            let r = (0..).find(|&r| p.pow(r as u32) == b.size).expect("index is a power of p");
            if out.len() <= r {
                out.resize(r + 1, 0);
            }
            out[r] += 1;
        }
        out
    }
}

pub fn build_index_set(x: &FormalBiset<i64>) -> Result<IndexSet> {
    let g = x.group().clone();
    let mut blocks = Vec::new();
    let mut len = 0;
    for (key, t) in x.terms() {
        if t.coeff < 0 {
            return Err(Error::NotGenuine(format!("coefficient {} on {}", t.coeff, t.rep.describe(&g))));
        }
        let size = g.order() / t.rep.order();
        for copy in 0..t.coeff as usize {
            blocks.push(Block { class: key.clone(), rep: t.rep.clone(), copy, offset: len, size });
            len += size;
        }
    }
    Ok(IndexSet { group: g, blocks, len })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PermutationOnJ {
    map: Vec<u32>,
}

impl PermutationOnJ {
    pub fn identity(n: usize) -> Self {
        PermutationOnJ { map: (0..n as u32).collect() }
    }

    pub fn from_vec(map: Vec<u32>) -> Result<Self> {
        let p = PermutationOnJ { map };
        if !p.is_bijection() {
            return Err(Error::TheoremViolation("map on J is not a bijection".into()));
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, j: usize) -> usize {
        self.map[j] as usize
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.map.len()];
        self.map.iter().all(|&k| (k as usize) < seen.len() && !std::mem::replace(&mut seen[k as usize], true))
    }

    /// `self` after `first`.
    pub fn after(&self, first: &Self) -> Self {
        PermutationOnJ { map: first.map.iter().map(|&j| self.map[j as usize]).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut map = vec![0; self.map.len()];
        for (j, &k) in self.map.iter().enumerate() {
            map[k as usize] = j as u32;
        }
        PermutationOnJ { map }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(j, &k)| j == k as usize)
    }
}

/// How isomorphic pieces are paired when several share a class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Matching {
    InOrder,
    Reversed,
}

struct Located {
    block: usize,
    piece: Piece,
}

fn pieces_by_class(
    ix: &IndexSet,
    blocks: &[usize],
    psi: &GroupMorphism,
) -> BTreeMap<ClassKey, Vec<Located>> {
    let g = &ix.group;
    let all: Vec<Vec<Located>> = blocks
        .par_iter()
        .map(|&b| {
            restriction_pieces(g, &ix.blocks[b].rep.morphism, psi)
                .into_iter()
                .map(|piece| Located { block: b, piece })
                .collect()
        })
        .collect();
    let mut out: BTreeMap<ClassKey, Vec<Located>> = BTreeMap::new();
    for l in all.into_iter().flatten() {
        out.entry(l.piece.canonical.key.clone()).or_default().push(l);
    }
    out
}

/// Counts of matched pairs, split by whether the two blocks differ in size.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchStats {
    pub pairs: usize,
    pub across_sizes: usize,
}

/// `ḡ` on the points of `blocks` for an isomorphism `₁X|_R ≅ _ψX` of
/// `R`-`S`-bisets; `None` marks points outside `blocks`.
fn partial_image(
    ix: &IndexSet,
    blocks: &[usize],
    psi: &GroupMorphism,
    matching: Matching,
) -> Result<(Vec<Option<u32>>, MatchStats)> {
    let g = &ix.group;
    let r = psi.source();
    let incl = pieces_by_class(ix, blocks, &g.identity_on(r));
    let twisted = pieces_by_class(ix, blocks, psi);
    if incl.len() != twisted.len() {
        return Err(Error::StabilityViolation(format!(
            "{} piece classes against {} after twisting",
            incl.len(),
            twisted.len()
        )));
    }
    let mut map = vec![None; ix.len];
    let mut stats = MatchStats::default();
    for (key, left) in &incl {
        let right = twisted.get(key).map_or(&[][..], |v| &v[..]);
        if left.len() != right.len() {
            return Err(Error::StabilityViolation(format!(
                "piece class {key:?} occurs {} times untwisted and {} times twisted",
                left.len(),
                right.len()
            )));
        }
        let n = left.len();
        for (k, a) in left.iter().enumerate() {
            let b = &right[if matching == Matching::InOrder { k } else { n - 1 - k }];
            let (ba, bb) = (&ix.blocks[a.block], &ix.blocks[b.block]);
            stats.pairs += 1;
            if ba.size != bb.size {
                stats.across_sizes += 1;
            }
            let ca = g.cosets(ba.rep.source());
            let cb = g.cosets(bb.rep.source());
            let m = g.mul(g.inv(a.piece.canonical.left), b.piece.canonical.left);
            for &x in r.elements() {
                let src = ba.offset + ca.index[g.mul(x, a.piece.t) as usize] as usize;
                let dst = (bb.offset + cb.index[g.mul(psi.apply(g.mul(x, m)), b.piece.t) as usize] as usize) as u32;
                match map[src] {
                    None => map[src] = Some(dst),
                    Some(d) if d == dst => {}
                    Some(_) => {
                        return Err(Error::TheoremViolation(format!("inconsistent coset map at point {src}")))
                    }
                }
            }
        }
    }
    Ok((map, stats))
}

fn all_blocks(ix: &IndexSet) -> Vec<usize> {
    (0..ix.blocks.len()).collect()
}

/// `ḡ` for `ψ ∈ Hom_F(R, S)`, with match statistics.
pub fn perm_image_with(
    ix: &IndexSet,
    psi: &GroupMorphism,
    matching: Matching,
) -> Result<(PermutationOnJ, MatchStats)> {
    let (map, stats) = partial_image(ix, &all_blocks(ix), psi, matching)?;
    let map: Option<Vec<u32>> = map.into_iter().collect();
    let map = map.ok_or_else(|| Error::TheoremViolation("coset map is not total".into()))?;
    Ok((PermutationOnJ::from_vec(map)?, stats))
}

pub fn perm_image_of_out(ix: &IndexSet, alpha: &GroupMorphism) -> Result<PermutationOnJ> {
    if alpha.source() != ix.group.whole() {
        return Err(Error::InvalidFusionData("expected an automorphism of S".into()));
    }
    Ok(perm_image_with(ix, alpha, Matching::InOrder)?.0)
}

/// `φ` must be a nonextendable automorphism of some `V_i`.
pub fn perm_image_of_essential(
    fs: &FusionSystem,
    ix: &IndexSet,
    phi: &GroupMorphism,
    matching: Matching,
) -> Result<(PermutationOnJ, MatchStats)> {
    let g = fs.group();
    if !g.maximal_subgroups().contains(phi.source()) || phi.image() != phi.source() {
        return Err(Error::InvalidFusionData("expected an automorphism of some V_i".into()));
    }
    if !fs.contains(phi) || fs.is_extendable(phi) {
        return Err(Error::InvalidFusionData("expected a nonextendable F-automorphism".into()));
    }
    perm_image_with(ix, phi, matching)
}

/// The action of `α` on the top blocks, as block indices.
pub fn out_action_on_top(ix: &IndexSet, alpha: &GroupMorphism) -> Result<BTreeMap<usize, usize>> {
    let top = ix.top_blocks();
    let (map, _) = partial_image(ix, &top, alpha, Matching::InOrder)?;
    top.iter()
        .map(|&b| {
            let j = map[ix.blocks[b].offset].ok_or_else(|| Error::TheoremViolation("J0 not preserved".into()))?;
            Ok((b, ix.block_of(j as usize)))
        })
        .collect()
}

/// Every block goes onto a whole block whose class twists back to its own.
pub fn maps_blocks_to_twisted_classes(ix: &IndexSet, perm: &PermutationOnJ, alpha: &GroupMorphism) -> bool {
    let g = &ix.group;
    ix.blocks.iter().all(|b| {
        let target = ix.block_of(perm.apply(b.offset));
        let tb = &ix.blocks[target];
        let whole = (b.offset..b.offset + b.size).all(|j| ix.block_of(perm.apply(j)) == target);
        let pieces = restriction_pieces(g, &tb.rep.morphism, alpha);
        whole && tb.size == b.size && pieces.len() == 1 && pieces[0].canonical.key == b.class
    })
}

/// The class of the `R`-`S`-piece of `₁X|_R` holding each point.
pub fn piece_classes(ix: &IndexSet, r: &crate::group::Subgroup) -> Vec<ClassKey> {
    let g = &ix.group;
    let id = g.identity_on(r);
    let mut out = vec![None; ix.len];
    for b in &ix.blocks {
        let cosets = g.cosets(b.rep.source());
        for piece in restriction_pieces(g, &b.rep.morphism, &id) {
            for &x in r.elements() {
                out[b.offset + cosets.index[g.mul(x, piece.t) as usize] as usize] = Some(piece.canonical.key.clone());
            }
        }
    }
    out.into_iter().map(|k| k.expect("pieces cover J")).collect()
}

/// Orbit label (least point) of each point under `gens`.
pub fn orbits(n: usize, gens: &[&PermutationOnJ]) -> Vec<usize> {
    let mut uf = UnionFind::<usize>::new(n);
    for perm in gens {
        for j in 0..n {
            uf.union(j, perm.apply(j));
        }
    }
    let mut least = vec![usize::MAX; n];
    let roots: Vec<usize> = (0..n).map(|j| uf.find(j)).collect();
    for (j, &r) in roots.iter().enumerate() {
        least[r] = least[r].min(j);
    }
    roots.into_iter().map(|r| least[r]).collect()
}

pub fn orbit_count(labels: &[usize]) -> usize {
    labels.iter().enumerate().filter(|&(j, &l)| j == l).count()
}

/// A nonextendable `φ ∈ Aut_F(V_i)`, `z ↦ ũ_i^l`, `ũ_i ↦ z^k`.
pub fn essential_automorphism(fs: &FusionSystem, i: usize) -> Result<GroupMorphism> {
    let p = fs.p();
    for k in 1..p {
        for l in 1..p {
            if let Ok(phi) = fs.phi(i, i, k, l) {
                if fs.contains(&phi) && !fs.is_extendable(&phi) {
                    return Ok(phi);
                }
            }
        }
    }
    Err(Error::InvalidFusionData(format!("no nonextendable automorphism of V{i}")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizationReport {
    pub system: String,
    pub prime: u32,
    #[serde(rename = "J")]
    pub j: usize,
    pub blocks: usize,
    pub blocks_by_layer: Vec<usize>,
    pub j0: usize,
    pub generator_count: usize,
    pub out_generators: usize,
    /// Indices `i` of the `V_i` whose essential automorphisms were used.
    pub essential_on: Vec<usize>,
    /// Whether one essential generator per `F`-class was not enough.
    pub extended: bool,
    pub orbit_count: usize,
    pub j0_orbit_count: usize,
    pub j0_free: bool,
    pub j0_transitive: bool,
    pub bijective: bool,
    pub block_classes_ok: bool,
    pub composite_preserves_pieces: bool,
    pub matching_independent: bool,
    pub pairs_across_sizes: usize,
    pub wall_time_ms: u64,
}

impl RealizationReport {
    pub fn passed(&self) -> bool {
        self.orbit_count == 1
            && self.j0_orbit_count == 1
            && self.j0_free
            && self.j0_transitive
            && self.bijective
            && self.block_classes_ok
            && self.composite_preserves_pieces
            && self.matching_independent
    }
}

/// The Out-images restricted to `J⁽⁰⁾`: transitive and free.
fn check_top(fs: &FusionSystem, ix: &IndexSet) -> Result<(usize, bool, bool)> {
    let top = ix.top_blocks();
    let actions: Vec<BTreeMap<usize, usize>> =
        fs.out_autos().par_iter().map(|a| out_action_on_top(ix, a)).collect::<Result<_>>()?;
    let free = top.iter().all(|b| actions.iter().filter(|act| act[b] == *b).count() == 1);
    let base = top[0];
    let mut reached: Vec<usize> = actions.iter().map(|act| act[&base]).collect();
    reached.sort_unstable();
    reached.dedup();
    let transitive = reached.len() == top.len();
    let mut uf = UnionFind::<usize>::new(ix.blocks.len());
    for act in &actions {
        for (&a, &b) in act {
            uf.union(a, b);
        }
    }
    let mut roots: Vec<usize> = top.iter().map(|&b| uf.find(b)).collect();
    roots.sort_unstable();
    roots.dedup();
    Ok((roots.len(), free, transitive))
}

/// Orbits of `J` under the Out-images and essential images, plus the
/// structural checks on the generators.
pub fn realization_report(fs: &Arc<FusionSystem>, x: &FormalBiset<i64>) -> Result<RealizationReport> {
    let start = Instant::now();
    let g = fs.group();
    let p = fs.p() as usize;
    let ix = build_index_set(x)?;
    let (j0_orbits, j0_free, j0_transitive) = check_top(fs, &ix)?;

    let outs: Vec<(GroupMorphism, PermutationOnJ)> = fs
        .out_autos()
        .iter()
        .map(|a| Ok((a.clone(), perm_image_of_out(&ix, a)?)))
        .collect::<Result<_>>()?;
    let block_classes_ok = outs.iter().all(|(a, perm)| maps_blocks_to_twisted_classes(&ix, perm, a));

    let mut reps: Vec<usize> = Vec::new();
    for i in 0..=p {
        if !reps.iter().any(|&k| fs.class_of(k) == fs.class_of(i)) {
            reps.push(i);
        }
    }
    let essential = |lines: &[usize], matching| -> Result<Vec<(PermutationOnJ, MatchStats)>> {
        lines
            .iter()
            .map(|&i| perm_image_of_essential(fs, &ix, &essential_automorphism(fs, i)?, matching))
            .collect()
    };
    let labels_for = |ess: &[(PermutationOnJ, MatchStats)]| {
        let gens: Vec<&PermutationOnJ> = outs.iter().map(|(_, q)| q).chain(ess.iter().map(|(q, _)| q)).collect();
        orbits(ix.len(), &gens)
    };
    let mut lines = reps;
    let mut ess = essential(&lines, Matching::InOrder)?;
    let mut labels = labels_for(&ess);
    let mut extended = false;
    if orbit_count(&labels) > 1 {
        extended = true;
        lines = (0..=p).collect();
        ess = essential(&lines, Matching::InOrder)?;
        labels = labels_for(&ess);
    }
    let reversed = essential(&lines, Matching::Reversed)?;
    let matching_independent = labels_for(&reversed) == labels;

    let mut composite_preserves_pieces = true;
    for &i in &lines {
        let phi = essential_automorphism(fs, i)?;
        let (a, _) = perm_image_with(&ix, &phi, Matching::InOrder)?;
        let (b, _) = perm_image_with(&ix, &g.inverse(&phi), Matching::InOrder)?;
        let both = b.after(&a);
        let classes = piece_classes(&ix, phi.source());
        composite_preserves_pieces &= (0..ix.len()).all(|j| classes[both.apply(j)] == classes[j]);
    }

    let bijective = outs.iter().all(|(_, q)| q.is_bijection()) && ess.iter().all(|(q, _)| q.is_bijection());
    Ok(RealizationReport {
        system: fs.spec().name.clone(),
        prime: fs.p(),
        j: ix.len(),
        blocks: ix.blocks().len(),
        blocks_by_layer: ix.layer_counts(),
        j0: ix.top_blocks().len(),
        generator_count: outs.len() + ess.len(),
        out_generators: outs.len(),
        essential_on: lines,
        extended,
        orbit_count: orbit_count(&labels),
        j0_orbit_count: j0_orbits,
        j0_free,
        j0_transitive,
        bijective,
        block_classes_ok,
        composite_preserves_pieces,
        matching_independent,
        pairs_across_sizes: ess.iter().map(|(_, s)| s.across_sizes).sum(),
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

/// [`realization_report`], failing unless `J` is a single orbit.
pub fn check_transitivity(fs: &Arc<FusionSystem>, x: &FormalBiset<i64>) -> Result<RealizationReport> {
    let report = realization_report(fs, x)?;
    if report.orbit_count != 1 {
        return Err(Error::TheoremViolation(format!(
            "{} orbits on J with essential generators on {:?}",
            report.orbit_count, report.essential_on
        )));
    }
    Ok(report)
}
