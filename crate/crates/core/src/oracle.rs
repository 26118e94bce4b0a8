//! The fixed-point formula checked against explicit coset counts.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::biset::stability::f_graph_classes;
use crate::biset::{brute_force_fixed_points, count_fixed_points, GraphSubgroup};
use crate::error::Result;
use crate::fusion::FusionSystem;
use crate::group::{Elem, GroupMorphism, Heisenberg};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleLevel {
    Off,
    P3Exhaustive,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub system: String,
    pub prime: u32,
    pub exhaustive: bool,
    pub pairs: usize,
    pub mismatches: Vec<String>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.pairs > 0
    }
}

/// `Δ_{sQs^-1}^{c_t φ c_s^-1}`.
pub fn conjugate_graph(g: &Heisenberg, phi: &GroupMorphism, s: Elem, t: Elem) -> Result<GroupMorphism> {
    let src = g.conjugate(s, phi.source());
    let si = g.inv(s);
    let imgs: Vec<Elem> = src.gens().iter().map(|&e| g.conj(t, phi.apply(g.conj(si, e)))).collect();
    g.morphism(src, &imgs)
}

fn run(g: &Heisenberg, pairs: &[(GroupMorphism, GroupMorphism)]) -> Vec<String> {
    pairs
        .par_iter()
        .filter_map(|(a, b)| {
            let f = count_fixed_points(g, a, b);
            let brute = brute_force_fixed_points(g, a, b);
            (f != brute).then(|| {
                format!(
                    "{} by {}: formula {f}, cosets {brute}",
                    GraphSubgroup::new(a.clone()).describe(g),
                    GraphSubgroup::new(b.clone()).describe(g)
                )
            })
        })
        .collect()
}

/// Every pair of `F`-graph class representatives.
pub fn exhaustive(fs: &FusionSystem) -> OracleReport {
    let g = fs.group();
    let classes = f_graph_classes(fs);
    let pairs: Vec<_> = classes
        .iter()
        .flat_map(|a| classes.iter().map(move |b| (a.morphism.clone(), b.morphism.clone())))
        .collect();
    OracleReport {
        system: fs.spec().name.clone(),
        prime: fs.p(),
        exhaustive: true,
        pairs: pairs.len(),
        mismatches: run(g, &pairs),
    }
}

/// `n` pairs: a class representative against a random `S×S`-conjugate of
/// another, seeded.
pub fn sampled(fs: &FusionSystem, n: usize, seed: u64) -> Result<OracleReport> {
    let g = fs.group();
    let classes = f_graph_classes(fs);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = g.order() as Elem;
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        let a = classes.choose(&mut rng).expect("classes exist");
        let b = classes.choose(&mut rng).expect("classes exist");
        let (s, t) = (rng.gen_range(0..order), rng.gen_range(0..order));
        pairs.push((a.morphism.clone(), conjugate_graph(g, &b.morphism, s, t)?));
    }
    Ok(OracleReport {
        system: fs.spec().name.clone(),
        prime: fs.p(),
        exhaustive: false,
        pairs: n,
        mismatches: run(g, &pairs),
    })
}
