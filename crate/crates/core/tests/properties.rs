use charbiset::biset::stability::f_graph_classes;
use charbiset::biset::{are_conjugate, brute_force_fixed_points, count_fixed_points, GraphSubgroup};
use charbiset::oracle::conjugate_graph;
use charbiset::{FusionSystem, GroupElement, Heisenberg};
use proptest::prelude::*;

fn element(p: u32) -> impl Strategy<Value = GroupElement> {
    (0..p as i64, 0..p as i64, 0..p as i64).prop_map(move |(a, b, c)| GroupElement::new(p, a, b, c).unwrap())
}

fn prime() -> impl Strategy<Value = u32> {
    prop_oneof![Just(3u32), Just(5), Just(7), Just(11)]
}

proptest! {
    #[test]
    fn group_law((p, x, y, z) in prime().prop_flat_map(|p| (Just(p), element(p), element(p), element(p)))) {
        let xy_z = x.multiply(&y).unwrap().multiply(&z).unwrap();
        let x_yz = x.multiply(&y.multiply(&z).unwrap()).unwrap();
        prop_assert_eq!(xy_z, x_yz);
        prop_assert!(x.multiply(&x.inverse()).unwrap().is_identity());
        prop_assert!(x.pow(p as i64).is_identity());
    }

    #[test]
    fn commutators_are_central(x in element(5), y in element(5), w in element(5)) {
        let c = x.multiply(&y).unwrap().multiply(&x.inverse()).unwrap().multiply(&y.inverse()).unwrap();
        prop_assert_eq!(c.multiply(&w).unwrap(), w.multiply(&c).unwrap());
    }

    #[test]
    fn fixed_points_are_conjugation_invariant(a in 0usize..1000, b in 0usize..1000, s in 0u16..125, t in 0u16..125) {
        let fs = FusionSystem::builtin("th4s4").unwrap();
        let g = fs.group();
        let classes = f_graph_classes(&fs);
        let phi = &classes[a % classes.len()].morphism;
        let by = &classes[b % classes.len()].morphism;
        let moved = conjugate_graph(g, by, s, t).unwrap();
        prop_assert!(are_conjugate(g, &GraphSubgroup::new(by.clone()), &GraphSubgroup::new(moved.clone())));
        let n = count_fixed_points(g, phi, by);
        prop_assert_eq!(n, count_fixed_points(g, phi, &moved));
        prop_assert_eq!(n, brute_force_fixed_points(g, phi, &moved));
    }
}

#[test]
fn group_tables_agree_with_element_arithmetic() {
    let g = Heisenberg::new(5).unwrap();
    for x in (0..125u16).step_by(7) {
        for y in (0..125u16).step_by(11) {
            let prod = g.element(x).multiply(&g.element(y)).unwrap();
            assert_eq!(g.from_element(&prod).unwrap(), g.mul(x, y));
        }
    }
}
