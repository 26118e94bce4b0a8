use std::sync::Arc;

use charbiset::biset::{Coefficient, Rational};
use charbiset::idempotent::{
    denominators_prime_to_p, idempotent_report, omega0, omega1, omega2, omega_closed_form, omega_layer,
    omega_solve, perturb_c2z, source_sums, verify_idempotent_stability,
};
use charbiset::solver::{expected_table, ClassTable};
use charbiset::{Error, FusionSystem};

fn table(name: &str) -> ClassTable {
    ClassTable::new(Arc::new(FusionSystem::builtin(name).unwrap())).unwrap()
}

fn r(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

#[test]
fn omega0_examples() {
    let t = table("d8");
    let w = omega0(&t);
    assert_eq!(w.len(), 8);
    assert!(w.terms().all(|(_, x)| x.coeff == r(1, 8)));
    assert_eq!(w.layer_total(0), r(1, 1));
    assert!(denominators_prime_to_p(&w));
}

#[test]
fn omega1_examples() {
    let t = table("d8");
    let w = omega1(&t);
    let fs = t.fusion();
    for (_, x) in w.terms() {
        let expect = if fs.is_extendable(&x.rep.morphism) { r(-1, 32) } else { r(1, 32) };
        assert_eq!(x.coeff, expect);
    }
    assert_eq!(w.layer_total(1), r(0, 1));
    let report = idempotent_report(&t).unwrap();
    for i in 0..=3 {
        assert_eq!(report.d_extendable[i], report.d_nonextendable[i]);
        let d = fs.conjugate_lines(i).len() * (fs.p() as usize - 1) * fs.r(i) as usize;
        assert_eq!(report.d_extendable[i], d);
        assert_eq!(d, fs.out_order());
    }
    let c0 = r(1, 8);
    let ce: Rational = Rational::parse_fraction(&report.c1_extendable).unwrap();
    let cn: Rational = Rational::parse_fraction(&report.c1_nonextendable).unwrap();
    assert_eq!(cn, c0 + Rational::from_int(3) * ce);
}

#[test]
fn omega2_examples() {
    let t = table("d8");
    let rep = idempotent_report(&t).unwrap();
    assert_eq!(rep.c0, "1/8");
    assert_eq!(rep.c2_z, "3/26");
    assert_eq!(rep.layer_sums, vec!["1", "0", "0"]);
    let t7 = table("rv72");
    let rep7 = idempotent_report(&t7).unwrap();
    assert_eq!(rep7.c2_mixed, "-7/2736");
    assert_eq!(rep7.c2_cross, "1/342");
    assert_eq!(rep7.c2_z, "7/342");
    let w2 = omega2(&t);
    assert!(w2.terms().all(|(_, x)| w2.layer_of(&x.rep) == 2));
    assert_eq!(w2.len(), 5 * 5 * 2);
}

#[test]
fn omega3_is_not_computed() {
    let t = table("d8");
    assert_eq!(omega_layer(&t, 3).unwrap_err(), Error::NotComputed(3));
    assert!(omega_layer(&t, 2).is_ok());
}

#[test]
fn closed_forms_match_linear_solve_for_all_six() {
    for row in expected_table() {
        let t = table(&row.key);
        let closed = omega_closed_form(&t);
        let solved = omega_solve(&t).unwrap();
        assert_eq!(closed, solved, "{}", row.key);
        assert!(denominators_prime_to_p(&closed));
        for s in source_sums(&t, &closed) {
            let expect = if s.layer == 0 { "1" } else { "0" };
            assert_eq!(s.sum, expect, "{} {}", row.key, s.source);
        }
        let (left, right) = verify_idempotent_stability(&t, &closed).unwrap();
        assert!(left.stable && right.stable, "{}: {:?} {:?}", row.key, left.witness, right.witness);
        assert!(idempotent_report(&t).unwrap().passed());
    }
}

#[test]
fn perturbation_breaks_stability() {
    for name in ["d8", "th4s4"] {
        let t = table(name);
        let p = t.fusion().p() as i128;
        let bad = perturb_c2z(&t, &omega_closed_form(&t), r(1, p));
        let (left, right) = verify_idempotent_stability(&t, &bad).unwrap();
        assert!(!right.stable);
        assert!(!left.stable);
        assert!(right.witness.unwrap().contains("mark"));
    }
}

