//! Shared fixtures for the benchmarks.

use std::sync::Arc;

use charbiset::biset::FormalBiset;
use charbiset::solver::{minimal_biset, ClassTable};
use charbiset::FusionSystem;

pub fn system(name: &str) -> Arc<FusionSystem> {
    Arc::new(FusionSystem::builtin(name).expect("built-in system"))
}

pub fn table(name: &str) -> ClassTable {
    ClassTable::new(system(name)).expect("class table")
}

/// The minimal characteristic biset of a built-in system.
pub fn minimal(name: &str) -> (Arc<FusionSystem>, FormalBiset<i64>) {
    let t = table(name);
    let x = minimal_biset(&t).expect("minimal biset").biset().clone();
    (t.fusion().clone(), x)
}
