//! Left and right `F`-stability of formal bisets, tested on marks.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Coefficient, FormalBiset, GraphSubgroup};
use crate::error::{Error, Result};
use crate::fusion::FusionSystem;

/// Representatives of all `S×S`-classes of graph subgroups `Δ_Q^φ` with
/// `φ ∈ Hom_F(Q, S)`, one source per `S`-class of subgroups.
pub fn f_graph_classes(fs: &FusionSystem) -> Vec<GraphSubgroup> {
    let g = fs.group();
    let mut sources = vec![g.whole().clone()];
    sources.extend(g.maximal_subgroups().iter().cloned());
    sources.extend(fs.order_p_targets().into_iter().map(|e| g.cyclic(e).clone()));
    sources.push(g.trivial().clone());
    sources
        .iter()
        .flat_map(|q| fs.enumerate_hom_classes(q).expect("listed sources are subgroups"))
        .map(|c| GraphSubgroup::new(c.morphism))
        .collect()
}

/// Every class in the support of `b` is the graph of a morphism in `F`.
pub fn check_condition_a<C: Coefficient>(fs: &FusionSystem, b: &FormalBiset<C>) -> Result<()> {
    for (_, t) in b.terms() {
        if !fs.contains(&t.rep.morphism) {
            return Err(Error::ConditionA(t.rep.describe(fs.group())));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub stable: bool,
    pub checked: usize,
    pub witness: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Left: `|X^{Δ_Q^φ}| = |X^{Δ_{φQ}^{id}}|`. Right: `|X^{Δ_Q^φ}| = |X^{Δ_Q^{id}}|`.
pub fn check_stability<C: Coefficient>(
    fs: &FusionSystem,
    b: &FormalBiset<C>,
    side: Side,
    tests: &[GraphSubgroup],
) -> Result<StabilityReport> {
    check_condition_a(fs, b)?;
    let g = fs.group();
    let anchor = |t: &GraphSubgroup| match side {
        Side::Left => t.image().clone(),
        Side::Right => t.source().clone(),
    };
    let mut anchors: Vec<_> = tests.iter().map(anchor).collect();
    anchors.sort();
    anchors.dedup();
    let id_marks: HashMap<usize, C> = anchors
        .par_iter()
        .map(|q| (q.id(), b.mark(&g.identity_on(q))))
        .collect();
    let marks: Vec<C> = tests.par_iter().map(|t| b.mark(&t.morphism)).collect();
    let bad = tests
        .iter()
        .zip(&marks)
        .find(|(t, m)| id_marks[&anchor(t).id()] != **m);
    Ok(StabilityReport {
        stable: bad.is_none(),
        checked: tests.len(),
        witness: bad.map(|(t, m)| {
            format!("{} mark {} vs {}", t.describe(g), m, id_marks[&anchor(t).id()])
        }),
    })
}

pub fn is_left_stable<C: Coefficient>(fs: &FusionSystem, b: &FormalBiset<C>) -> Result<StabilityReport> {
    check_stability(fs, b, Side::Left, &f_graph_classes(fs))
}

pub fn is_right_stable<C: Coefficient>(fs: &FusionSystem, b: &FormalBiset<C>) -> Result<StabilityReport> {
    check_stability(fs, b, Side::Right, &f_graph_classes(fs))
}
