use std::sync::Arc;

use charbiset::biset::FormalBiset;
use charbiset::realization::{
    build_index_set, check_transitivity, essential_automorphism, orbit_count, orbits, out_action_on_top,
    perm_image_of_essential, perm_image_of_out, piece_classes, realization_report, Matching, PermutationOnJ,
};
use charbiset::solver::{minimal_biset, ClassTable};
use charbiset::{Error, FusionSystem};

fn minimal(name: &str) -> (Arc<FusionSystem>, FormalBiset<i64>) {
    let fs = Arc::new(FusionSystem::builtin(name).unwrap());
    let t = ClassTable::new(fs.clone()).unwrap();
    let x = minimal_biset(&t).unwrap().biset().clone();
    (fs, x)
}

#[test]
fn index_set_shape() {
    let (fs, x) = minimal("d8");
    let ix = build_index_set(&x).unwrap();
    assert_eq!(ix.len(), 968);
    assert_eq!(ix.top_blocks().len(), 8);
    assert_eq!(ix.layer_counts(), vec![8, 32, 96]);
    for b in ix.blocks() {
        assert_eq!(b.size, fs.group().order() / b.rep.order());
    }
    for j in [0, 7, 8, 500, 967] {
        let (b, s) = ix.point(j);
        assert!(j >= ix.blocks()[b].offset && j < ix.blocks()[b].offset + ix.blocks()[b].size);
        let cosets = fs.group().cosets(ix.blocks()[b].rep.source());
        assert_eq!(cosets.index[s as usize] as usize, j - ix.blocks()[b].offset);
    }
    let mut neg = x.clone();
    neg.add_key(x.terms().next().unwrap().0.clone(), -2);
    assert!(matches!(build_index_set(&neg), Err(Error::NotGenuine(_))));
}

#[test]
fn out_images() {
    let (fs, x) = minimal("d8");
    let g = fs.group();
    let ix = build_index_set(&x).unwrap();
    let id = g.identity_on(g.whole());
    assert!(perm_image_of_out(&ix, &id).unwrap().is_identity());
    for a in fs.out_autos() {
        let perm = perm_image_of_out(&ix, a).unwrap();
        assert!(perm.is_bijection());
        for b in ix.blocks() {
            let target = &ix.blocks()[ix.block_of(perm.apply(b.offset))];
            assert_eq!(target.size, b.size);
        }
        let top = out_action_on_top(&ix, a).unwrap();
        for (&from, &to) in &top {
            assert_eq!(ix.block_of(perm.apply(ix.blocks()[from].offset)), to);
        }
    }
}

#[test]
fn essential_images_merge_block_sizes() {
    let (fs, x) = minimal("d8");
    let g = fs.group();
    let ix = build_index_set(&x).unwrap();
    let phi = essential_automorphism(&fs, 0).unwrap();
    let (perm, stats) = perm_image_of_essential(&fs, &ix, &phi, Matching::InOrder).unwrap();
    assert!(perm.is_bijection());
    assert!(stats.across_sizes > 0);
    let top = ix.top_blocks();
    assert!(top.iter().any(|&b| ix.blocks()[ix.block_of(perm.apply(ix.blocks()[b].offset))].size == 3));

    let (back, _) = perm_image_of_essential(&fs, &ix, &g.inverse(&phi), Matching::InOrder).unwrap();
    let both = back.after(&perm);
    let classes = piece_classes(&ix, phi.source());
    assert!((0..ix.len()).all(|j| classes[both.apply(j)] == classes[j]));

    let psi = fs.psi(0, 0, 1, 1).unwrap();
    assert!(perm_image_of_essential(&fs, &ix, &psi, Matching::InOrder).is_err());
}

#[test]
fn non_characteristic_biset_is_rejected() {
    let (fs, x) = minimal("d8");
    let mut y = x.clone();
    let key = x.terms().find(|(_, t)| t.rep.order() == 9).unwrap().0.clone();
    y.add_key(key, 1);
    let ix = build_index_set(&y).unwrap();
    let phi = essential_automorphism(&fs, 0).unwrap();
    let err = (0..=3)
        .map(|i| perm_image_of_essential(&fs, &ix, &essential_automorphism(&fs, i).unwrap(), Matching::InOrder))
        .chain(fs.out_autos().iter().map(|a| perm_image_of_out(&ix, a).map(|q| (q, Default::default()))))
        .find_map(|r| r.err());
    assert!(matches!(err, Some(Error::StabilityViolation(_))), "{err:?} {}", phi.source().order());
}

#[test]
fn orbits_by_union_find() {
    let a = PermutationOnJ::from_vec(vec![1, 0, 2, 3]).unwrap();
    let b = PermutationOnJ::from_vec(vec![0, 1, 3, 2]).unwrap();
    assert_eq!(orbits(4, &[&a, &b]), vec![0, 0, 2, 2]);
    assert_eq!(orbit_count(&orbits(4, &[&a])), 3);
    assert!(PermutationOnJ::from_vec(vec![0, 0]).is_err());
    assert_eq!(a.inverse().after(&a), PermutationOnJ::identity(4));
}

#[test]
fn transitive_for_p3_and_p5() {
    for (name, size) in [("d8", 968), ("sd16", 1936), ("th4s4", 74976)] {
        let (fs, x) = minimal(name);
        let r = check_transitivity(&fs, &x).unwrap();
        assert_eq!(r.j, size);
        assert_eq!(r.orbit_count, 1);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.j0, fs.out_order());
        assert!(!r.extended);
    }
}

#[test]
fn report_round_trips() {
    let (fs, x) = minimal("d8");
    let r = realization_report(&fs, &x).unwrap();
    let back: charbiset::realization::RealizationReport =
        serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);
}
