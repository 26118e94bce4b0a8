use std::sync::Arc;

use charbiset::biset::stability::{is_left_stable, is_right_stable};
use charbiset::solver::{
    exoticity_bound, expected_table, layer0, layer1, minimal_biset, solve_layer2, ClassTable, Point,
};
use charbiset::{Error, FusionSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn table(name: &str) -> ClassTable {
    ClassTable::new(Arc::new(FusionSystem::builtin(name).unwrap())).unwrap()
}

#[test]
fn layer0_examples() {
    let fs = FusionSystem::builtin("d8").unwrap();
    let b = layer0(&fs, 1).unwrap();
    assert_eq!(b.len(), 8);
    assert!(b.terms().all(|(_, t)| t.coeff == 1));
    let b2 = layer0(&fs, 2).unwrap();
    assert_eq!(b2.e(), 2 * 8);
    let g = fs.group();
    for a in fs.out_autos() {
        assert_eq!(b2.mark(a), 2 * g.center().order() as i64);
    }
    assert!(matches!(layer0(&fs, 3), Err(Error::InvalidCoefficient(_))));
    assert!(layer0(&fs, 0).is_err());
}

#[test]
fn layer1_examples() {
    for name in ["d8", "th4s4", "rv72"] {
        let fs = FusionSystem::builtin(name).unwrap();
        let p = fs.p() as usize;
        let b = layer1(&fs, 1, &vec![0; p + 1]).unwrap();
        assert_eq!(b.len(), (p + 1) * fs.out_order());
        assert!(b.terms().all(|(_, t)| t.coeff == 1 && !fs.is_extendable(&t.rep.morphism)));
        let c1: Vec<i64> = (0..=p as i64).map(|i| i % 3).collect();
        let b = layer1(&fs, 2, &c1).unwrap();
        for (_, t) in b.terms() {
            let i = fs.group().maximal_subgroups().iter().position(|v| v == t.rep.source()).unwrap();
            let expect = if fs.is_extendable(&t.rep.morphism) { c1[i] } else { 2 + p as i64 * c1[i] };
            assert_eq!(t.coeff, expect);
        }
    }
}

#[test]
fn minimal_layer2_values() {
    for name in ["d8", "sd16", "th4s4"] {
        let t = table(name);
        let fs = t.fusion();
        let p = fs.p() as usize;
        let f = fs.f() as i64;
        let c2u: Vec<i64> = (0..=p).map(|i| f - fs.r(i) as i64).collect();
        let c = solve_layer2(&t, 1, &vec![0; p + 1], 0, &c2u).unwrap();
        assert_eq!(c.c0, 1);
        assert_eq!(c.c2.len(), (p + 2) * (p + 2) * (p - 1));
        for e in &c.c2 {
            let expect = match (e.xi, e.zeta) {
                (Point::U(i), Point::U(j)) if fs.class_of(i) == fs.class_of(j) => f - fs.r(i) as i64,
                (Point::U(_), Point::U(_)) => f,
                _ => 0,
            };
            assert_eq!(e.value, expect, "{name} {:?}", e);
        }
    }
    let t = table("d8");
    let c = solve_layer2(&t, 1, &[0; 4], 0, &[2; 4]).unwrap();
    assert_eq!(c.c2(Point::U(0), Point::U(0), 1), Some(2));
    assert_eq!(c.c2(Point::U(0), Point::U(2), 2), Some(4));
}

#[test]
fn layer2_below_bound_is_infeasible() {
    let t = table("d8");
    match solve_layer2(&t, 1, &[0; 4], 0, &[2, 2, 1, 2]) {
        Err(Error::Infeasible { xi, .. }) => assert_eq!(xi, "u2"),
        other => panic!("expected infeasibility, got {other:?}"),
    }
    let err = solve_layer2(&t, 1, &[0; 4], 0, &[2, 3, 2, 2]).unwrap_err();
    assert!(err.to_string().contains("u1"), "{err}");
    assert!(solve_layer2(&t, 3, &[0; 4], 0, &[2; 4]).is_err());
}

#[test]
fn layer2_relations_hold_for_random_feasible_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for name in ["d8", "sd16", "th4s4", "rv72"] {
        let t = table(name);
        let fs = t.fusion().clone();
        let p = fs.p() as i64;
        let f = fs.f() as i64;
        for _ in 0..8 {
            let c0 = loop {
                let c = rng.gen_range(1..12);
                if c % p != 0 {
                    break c;
                }
            };
            let c1: Vec<i64> = (0..=p).map(|_| rng.gen_range(0..3)).collect();
            let c2z = rng.gen_range(0..4);
            let c2u: Vec<i64> = (0..=p as usize)
                .map(|i| {
                    let r = fs.r(i) as i64;
                    (f - r) * c0 + p * (f - r) * c1[i] + p * rng.gen_range(0..3)
                })
                .collect();
            let c = solve_layer2(&t, c0, &c1, c2z, &c2u).unwrap();
            assert_eq!(c.c1, c1);
            for e in &c.c2 {
                let m = e.m;
                let expect = match (e.xi, e.zeta) {
                    (Point::Z, Point::Z) => c2z,
                    (Point::U(i), Point::U(j)) if fs.class_of(i) == fs.class_of(j) => c2u[i],
                    (Point::U(i), Point::U(_)) => {
                        let r = fs.r(i) as i64;
                        c2u[i] + r * c0 + p * r * c1[i]
                    }
                    (Point::U(i), Point::Z) => {
                        let r = fs.r(i) as i64;
                        (c2u[i] - (f - r) * c0 - p * (f - r) * c1[i]) / p
                    }
                    (Point::Z, Point::U(j)) => {
                        let r = fs.r(j) as i64;
                        let (same, other): (Vec<usize>, Vec<usize>) =
                            (0..=p as usize).partition(|&i| fs.class_of(i) == fs.class_of(j));
                        p * c2z
                            + (f - r) * same.iter().map(|&i| c1[i]).sum::<i64>()
                            + f * other.iter().map(|&i| c1[i]).sum::<i64>()
                    }
                };
                assert_eq!(e.value, expect, "{name} {:?} m={m}", (e.xi, e.zeta));
            }
        }
    }
}

#[test]
fn feasible_nonminimal_bisets_are_stable_and_larger() {
    let t = table("d8");
    let fs = t.fusion().clone();
    let eq = t.equations(charbiset::biset::stability::Side::Right);
    let min = minimal_biset(&t).unwrap();
    let c2u: Vec<i64> = (0..4).map(|i| 2 + 3 * (i as i64 % 2)).collect();
    let values: Vec<i64> = eq
        .params()
        .iter()
        .map(|&a| match t.classes()[a].label {
            charbiset::solver::ClassLabel::Top { .. } => 2,
            charbiset::solver::ClassLabel::Cyclic(k) => match k.xi {
                Point::Z => 1,
                Point::U(i) => 2 * 2 + c2u[i] - 2,
            },
            charbiset::solver::ClassLabel::Trivial => 1,
            _ => 0,
        })
        .collect();
    let coeffs = eq.solve(&values).unwrap();
    assert!(coeffs.iter().all(|&c| c >= 0));
    let x = t.to_biset(&coeffs);
    assert!(is_right_stable(&fs, &x).unwrap().stable);
    assert!(x.e() > min.e);
    assert_ne!(x.e() % 3, 0);
    let bad = {
        let mut c = coeffs.clone();
        let n = t.classes().iter().position(|c| matches!(c.label, charbiset::solver::ClassLabel::Nonextendable { .. })).unwrap();
        c[n] += 1;
        t.to_biset(&c)
    };
    let report = is_right_stable(&fs, &bad).unwrap();
    assert!(!report.stable);
    assert!(report.witness.is_some());
}

#[test]
fn minimal_biset_is_certified_for_all_six() {
    for row in expected_table() {
        let t = table(&row.key);
        let r = minimal_biset(&t).unwrap();
        assert!(r.certified(), "{}: {:?}", row.key, r.certificates);
        assert_eq!((r.f, r.d0, r.d1, r.d2, r.e), (row.f, row.d0, row.d1, row.d2, row.e), "{}", row.key);
        assert_eq!(r.bound, row.bound);
        assert_eq!(r.d3, 0);
        let out = r.out_order as i64;
        let p = r.prime as i64;
        assert_eq!((r.d0, r.d1, r.d2), (out, (p + 1) * out, p * (p + 1) * out));
        assert_eq!(r.e, r.d0 + p * r.d1 + p * p * r.d2);
        assert_eq!(r.e, (p.pow(5) - 1) / (p - 1) * out);
        let fs = t.fusion();
        assert!(is_left_stable(fs, r.biset()).unwrap().stable);
        assert_eq!(r.biset().opposite(), *r.biset());
        for c in &r.certificates {
            assert_eq!((c.candidates, c.feasible), (1, 1));
        }
    }
}

#[test]
fn exoticity_bound_examples() {
    assert_eq!(exoticity_bound(134448, 7, 3), 425744);
    assert_eq!(exoticity_bound(201672, 7, 3), 638620);
    assert_eq!(exoticity_bound(268896, 7, 3), 851496);
    assert_eq!(exoticity_bound(1, 7, 3), 0);
    assert_eq!(exoticity_bound(1, 3, 3), 0);
    assert_eq!(exoticity_bound(9, 3, 3), 24 + 3 + 1);
}

#[test]
fn minimal_output_is_deterministic() {
    let a = serde_json::to_string(&minimal_biset(&table("d8")).unwrap()).unwrap();
    let b = serde_json::to_string(&minimal_biset(&table("d8")).unwrap()).unwrap();
    assert_eq!(a, b);
}
