use charbiset::biset::explicit::{
    brute_force_conjugate_in, compose, decompose_by_marks, graph_universe, ExplicitBiset,
    DEFAULT_LIMIT,
};
use charbiset::biset::restrict::{restrict_left, restriction_pieces};
use charbiset::biset::stability::f_graph_classes;
use charbiset::biset::{
    are_conjugate, brute_force_fixed_points, brute_force_subconjugate, canonical, canonical_in,
    count_fixed_points, n_set, BisetClass, FormalBiset, GraphSubgroup,
};
use charbiset::fusion::lift_matrix_to_aut;
use charbiset::{Elem, FusionSystem, GroupMorphism, Heisenberg, Mat2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn conjugated(g: &Heisenberg, phi: &GroupMorphism, s: Elem, t: Elem) -> GroupMorphism {
    let src = g.conjugate(s, phi.source());
    let si = g.inv(s);
    g.morphism_from_fn(src, |e| g.conj(t, phi.apply(g.conj(si, e)))).unwrap()
}

#[test]
fn fixed_point_formula_matches_cosets_exhaustively_at_p3() {
    for name in ["d8", "sd16"] {
        let fs = FusionSystem::builtin(name).unwrap();
        let g = fs.group();
        let classes = f_graph_classes(&fs);
        for a in &classes {
            for b in &classes {
                assert_eq!(
                    count_fixed_points(g, &a.morphism, &b.morphism),
                    brute_force_fixed_points(g, &a.morphism, &b.morphism),
                    "{} by {}",
                    a.describe(g),
                    b.describe(g)
                );
            }
        }
    }
}

#[test]
fn fixed_point_examples() {
    for p in [3, 5, 7] {
        let g = Heisenberg::shared(p).unwrap();
        let id = g.identity_on(g.whole());
        assert_eq!(count_fixed_points(&g, &id, &id), p as u64);
        let triv = g.identity_on(g.trivial());
        assert_eq!(brute_force_fixed_points(&g, &id, &triv), (p * p * p) as u64);
        assert_eq!(count_fixed_points(&g, &id, &triv), (p * p * p) as u64);
    }
    let fs = FusionSystem::builtin("th4s4").unwrap();
    let g = fs.group();
    let p = 5u64;
    for i in 0..=5 {
        for j in fs.conjugate_lines(i) {
            let phi = fs.phi(i, j, 1, p as u32 - 1).unwrap();
            let by = g.morphism(g.center(), &[fs.line_gen(j)]).unwrap();
            assert_eq!(count_fixed_points(g, &phi, &by), p * p * p);
            assert_eq!(brute_force_fixed_points(g, &phi, &by), p * p * p);
        }
    }
    let xi = g.cyclic(fs.line_gen(0));
    let cyc = g.morphism(xi, &[fs.line_gen(3)]).unwrap();
    assert_eq!(count_fixed_points(g, &cyc, &cyc), p * p * p);
}

#[test]
fn n_set_matches_brute_transporter() {
    let g = Heisenberg::shared(3).unwrap();
    let u = graph_universe(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let a = &u[rng.gen_range(0..u.len())].rep.morphism;
        let b = &u[rng.gen_range(0..u.len())].rep.morphism;
        let a = conjugated(&g, a, rng.gen_range(0..27), rng.gen_range(0..27));
        let brute: Vec<Elem> = (0..27)
            .filter(|&x| {
                a.source().elements().iter().all(|&r| b.source().contains(g.conj(x, r)))
                    && (0..27).any(|y| {
                        a.source()
                            .elements()
                            .iter()
                            .all(|&r| b.apply(g.conj(x, r)) == g.conj(y, a.apply(r)))
                    })
            })
            .collect();
        assert_eq!(n_set(&g, &a, b), brute);
    }
    let id = g.identity_on(g.whole());
    assert_eq!(n_set(&g, &id, &id).len(), 27);
}

#[test]
fn marks_detect_subconjugacy() {
    let g = Heisenberg::shared(3).unwrap();
    let u = graph_universe(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..400 {
        let a = &u[rng.gen_range(0..u.len())].rep.morphism;
        let b = &u[rng.gen_range(0..u.len())].rep.morphism;
        let positive = count_fixed_points(&g, a, b) > 0;
        assert_eq!(positive, brute_force_subconjugate(&g, b, a));
    }
}

#[test]
fn class_keys_are_conjugacy_invariants() {
    let g = Heisenberg::shared(3).unwrap();
    let u = graph_universe(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let a = &u[rng.gen_range(0..u.len())].rep.morphism;
        let c = conjugated(&g, a, rng.gen_range(0..27), rng.gen_range(0..27));
        assert_eq!(canonical(&g, a).key, canonical(&g, &c).key);
        assert!(are_conjugate(&g, &GraphSubgroup::new(a.clone()), &GraphSubgroup::new(c.clone())));
        let w = canonical(&g, &c);
        let back = conjugated(&g, &c, w.left, w.right);
        assert_eq!(back.source().id(), w.key.source);
        assert_eq!(back.gen_images(), w.key.images);
    }
    for i in 0..u.len() {
        for j in (i + 1..u.len()).step_by(17) {
            let (a, b) = (&u[i].rep, &u[j].rep);
            assert!(!are_conjugate(&g, a, b));
        }
    }
    let x = lift_matrix_to_aut(&g, &Mat2::diag(3, 1, 2)).unwrap();
    let xc = g.compose(&x, &g.conjugation(g.y(), g.whole())).unwrap();
    assert_eq!(canonical(&g, &x).key, canonical(&g, &xc).key);
}

#[test]
fn ambient_keys_match_brute_conjugacy_in_v0() {
    let g = Heisenberg::shared(3).unwrap();
    let v0 = g.maximal(0);
    let mut homs = Vec::new();
    for q in g.subgroups().iter().filter(|q| q.is_subgroup_of(v0)) {
        homs.extend(g.injective_homs(q));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..3000 {
        let a = &homs[rng.gen_range(0..homs.len())];
        let b = &homs[rng.gen_range(0..homs.len())];
        let same = canonical_in(&g, v0, a).key == canonical_in(&g, v0, b).key;
        assert_eq!(same, brute_force_conjugate_in(&g, v0, a, b));
    }
}

#[test]
fn extendable_and_nonextendable_classes_differ() {
    let fs = FusionSystem::builtin("d8").unwrap();
    let g = fs.group();
    let psi = GraphSubgroup::new(fs.psi(0, 0, 1, 1).unwrap());
    let phi = GraphSubgroup::new(fs.phi(0, 0, 1, 2).unwrap());
    assert!(!are_conjugate(g, &psi, &phi));
}

#[test]
fn opposite_is_an_involution() {
    let fs = FusionSystem::builtin("sd16").unwrap();
    let g = fs.group().clone();
    let u = graph_universe(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let mut b = FormalBiset::<i64>::new(g.clone());
        for _ in 0..4 {
            b.add(&u[rng.gen_range(0..u.len())].rep.morphism, rng.gen_range(1..4));
        }
        assert_eq!(b.opposite().opposite(), b);
        for t in f_graph_classes(&fs).iter().step_by(5) {
            let inv = g.inverse(&t.morphism);
            assert_eq!(b.mark(&t.morphism), b.opposite().mark(&inv));
        }
    }
    let mut id = FormalBiset::<i64>::new(g.clone());
    id.add(&g.identity_on(g.whole()), 1);
    assert_eq!(id.opposite(), id);
    for i in 0..=3 {
        for j in fs.conjugate_lines(i) {
            let phi = fs.phi(i, j, 1, 1).unwrap();
            let inv = g.inverse(&phi);
            assert_eq!(inv.source(), g.maximal(j));
            assert!(!fs.is_extendable(&inv));
            assert!(fs.contains(&inv));
        }
    }
}

#[test]
fn restriction_matches_explicit_orbits() {
    let fs = FusionSystem::builtin("d8").unwrap();
    let g = fs.group().clone();
    let u = graph_universe(&g);
    let mut restrictions = vec![g.identity_on(g.maximal(0)), g.identity_on(g.center())];
    restrictions.push(fs.phi(0, 1, 1, 1).unwrap());
    restrictions.push(fs.out_autos()[3].clone());
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..40 {
        let mut b = FormalBiset::<i64>::new(g.clone());
        b.add(&u[rng.gen_range(0..u.len())].rep.morphism, rng.gen_range(1..3));
        let x = ExplicitBiset::from_formal(&b, DEFAULT_LIMIT).unwrap();
        for psi in &restrictions {
            let formal = restrict_left(&b, psi);
            assert_eq!(formal, x.restrict_left(psi));
            assert_eq!(formal.e(), b.e() * g.whole().order() as i64 / g.whole().order() as i64);
        }
    }
    let phi = fs.phi(0, 0, 1, 1).unwrap();
    let pieces = restriction_pieces(&g, &phi, &g.identity_on(g.maximal(0)));
    assert_eq!(pieces.len(), 3);
    let alpha = &fs.out_autos()[5];
    let id_pieces = restriction_pieces(&g, alpha, &g.identity_on(g.maximal(2)));
    assert_eq!(id_pieces.len(), 1);
}

#[test]
fn composition_convention_and_identity() {
    let fs = FusionSystem::builtin("d8").unwrap();
    let g = fs.group().clone();
    let single = |m: &GroupMorphism| {
        let mut b = FormalBiset::<i64>::new(g.clone());
        b.add(m, 1);
        b
    };
    let id = single(&g.identity_on(g.whole()));
    let autos = fs.out_autos();
    for a in autos.iter().take(4) {
        for b in autos.iter().skip(2).take(3) {
            let prod = compose(&single(a), &single(b)).unwrap();
            assert_eq!(prod, single(&g.compose(a, b).unwrap()));
        }
    }
    let u = graph_universe(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..5 {
        let b = single(&u[rng.gen_range(0..40)].rep.morphism);
        assert_eq!(compose(&id, &b).unwrap(), b);
        assert_eq!(compose(&b, &id).unwrap(), b);
    }
    for _ in 0..3 {
        let pick = |rng: &mut ChaCha8Rng| single(&u[rng.gen_range(0..u.len() / 2)].rep.morphism);
        let (x, y, z) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let left = compose(&compose(&x, &y).unwrap(), &z).unwrap();
        let right = compose(&x, &compose(&y, &z).unwrap()).unwrap();
        assert_eq!(left, right);
    }
}

#[test]
fn decomposition_round_trips() {
    let g = Heisenberg::shared(3).unwrap();
    let u = graph_universe(&g);
    for c in u.iter().step_by(9) {
        let x = ExplicitBiset::transitive(g.clone(), &c.rep.morphism, DEFAULT_LIMIT).unwrap();
        let d = decompose_by_marks(&x).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.coefficient_of(&c.key), 1);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..10 {
        let mut b = FormalBiset::<i64>::new(g.clone());
        for _ in 0..3 {
            b.add(&u[rng.gen_range(0..u.len())].rep.morphism, rng.gen_range(1..3));
        }
        let x = ExplicitBiset::from_formal(&b, DEFAULT_LIMIT).unwrap();
        assert_eq!(decompose_by_marks(&x).unwrap(), b);
    }
}

#[test]
fn marks_are_injective_on_random_combinations() {
    let g = Heisenberg::shared(3).unwrap();
    let u = graph_universe(&g);
    let tests: Vec<GraphSubgroup> = u.iter().map(|c| c.rep.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        let mut a = FormalBiset::<i64>::new(g.clone());
        let mut b = FormalBiset::<i64>::new(g.clone());
        for _ in 0..5 {
            a.add(&u[rng.gen_range(0..u.len())].rep.morphism, rng.gen_range(-3..4));
            b.add(&u[rng.gen_range(0..u.len())].rep.morphism, rng.gen_range(-3..4));
        }
        assert_eq!(a.mark_vector(&tests) == b.mark_vector(&tests), a == b);
        assert_eq!(a.minus(&a).mark_vector(&tests), vec![0; tests.len()]);
    }
}

#[test]
fn marks_respect_truncation() {
    let fs = FusionSystem::builtin("d8").unwrap();
    let g = fs.group().clone();
    let u = graph_universe(&g);
    let mut b = FormalBiset::<i64>::new(g.clone());
    for c in u.iter().step_by(7) {
        b.add(&c.rep.morphism, 2);
    }
    for c in u.iter() {
        let r = b.layer_of(&c.rep);
        assert_eq!(b.mark(&c.rep.morphism), b.truncate(r).mark(&c.rep.morphism));
    }
}

#[test]
fn biset_class_equality_is_key_equality() {
    let g = Heisenberg::shared(3).unwrap();
    let a = lift_matrix_to_aut(&g, &Mat2::new(3, 0, 1, 1, 0)).unwrap();
    let b = g.compose(&a, &g.conjugation(g.x(), g.whole())).unwrap();
    assert_eq!(BisetClass::of(&g, &a), BisetClass::of(&g, &b));
}
