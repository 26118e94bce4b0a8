//! Layers `ω_0, ω_1, ω_2` of the characteristic idempotent.
//!
//! Computed twice: from closed forms, and by solving the stability
//! equations together with the idempotency sums
//! `Σ_{[φ]} c_{[P,φ]} = 1` for `P = S` and `0` for `P < S`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::biset::stability::{check_stability, Side, StabilityReport};
use crate::biset::{Coefficient, FormalBiset, GraphSubgroup, Rational};
use crate::error::{Error, Result};
use crate::linalg;
use crate::solver::{ClassLabel, ClassTable, Indivisible, Point};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n as i128, d as i128)
}

/// Closed-form coefficient of one class of layer at most 2.
fn closed_form_coefficient(table: &ClassTable, label: &ClassLabel) -> Option<Rational> {
    let fs = table.fusion();
    let p = fs.p() as i64;
    let c0 = q(1, fs.out_order() as i64);
    let c1 = -c0 / q(1 + p, 1);
    let p3 = p * p * p - 1;
    Some(match *label {
        ClassLabel::Top { .. } => c0,
        ClassLabel::Extendable { .. } => c1,
        ClassLabel::Nonextendable { .. } => -c1,
        ClassLabel::Cyclic(k) => match (k.xi, k.zeta) {
            (Point::Z, Point::Z) => q(p, p3),
            (Point::U(_), Point::Z) | (Point::Z, Point::U(_)) => q(-p, (p + 1) * p3),
            (Point::U(i), Point::U(j)) if fs.class_of(i) == fs.class_of(j) => {
                q(1, p3) - c0 * q(fs.r(i) as i64, p + 1)
            }
            (Point::U(_), Point::U(_)) => q(1, p3),
        },
        ClassLabel::Trivial => return None,
    })
}

fn closed_form_layer(table: &ClassTable, r: usize) -> Result<FormalBiset<Rational>> {
    if r > 2 {
        return Err(Error::NotComputed(r));
    }
    let coeffs: Vec<Rational> = table
        .classes()
        .iter()
        .map(|c| if c.layer == r { closed_form_coefficient(table, &c.label).unwrap_or_default() } else { Rational::zero() })
        .collect();
    Ok(table.to_biset(&coeffs))
}

/// `ω_0 = c_0 Σ [S, α]` with `c_0 = 1/|Out_F(S)|`.
pub fn omega0(table: &ClassTable) -> FormalBiset<Rational> {
    closed_form_layer(table, 0).expect("layer 0")
}

/// `ω_1 = -c_0/(1+p) Σ [V_i, ψ] + c_0/(1+p) Σ [V_i, φ]`.
pub fn omega1(table: &ClassTable) -> FormalBiset<Rational> {
    closed_form_layer(table, 1).expect("layer 1")
}

pub fn omega2(table: &ClassTable) -> FormalBiset<Rational> {
    closed_form_layer(table, 2).expect("layer 2")
}

/// `ω_r`; the trivial-subgroup layer is not determined here.
pub fn omega_layer(table: &ClassTable, r: usize) -> Result<FormalBiset<Rational>> {
    closed_form_layer(table, r)
}

/// `ω_0 + ω_1 + ω_2` from the closed forms.
pub fn omega_closed_form(table: &ClassTable) -> FormalBiset<Rational> {
    omega0(table).plus(&omega1(table)).plus(&omega2(table))
}

/// Classes of layer at most 2 grouped by the `S`-class of their source.
fn source_groups(table: &ClassTable) -> BTreeMap<usize, Vec<usize>> {
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (n, c) in table.classes().iter().enumerate() {
        if c.layer <= 2 {
            groups.entry(c.key.source).or_default().push(n);
        }
    }
    groups
}

/// `ω_0 + ω_1 + ω_2` by solving right stability plus the idempotency sums.
pub fn omega_solve(table: &ClassTable) -> Result<FormalBiset<Rational>> {
    let eq = table.equations(Side::Right);
    let params = eq.params();
    let n = params.len();
    let solve = |vals: &[Rational]| -> Result<Vec<Rational>> {
        eq.solve(vals).map_err(|Indivisible(_)| Error::NoUniqueSolution)
    };
    let base = solve(&vec![Rational::zero(); n])?;
    let units: Vec<Vec<Rational>> = (0..n)
        .map(|k| {
            let mut v = vec![Rational::zero(); n];
            v[k] = Rational::one();
            solve(&v)
        })
        .collect::<Result<_>>()?;
    let whole = table.group().whole().id();
    let free: Vec<usize> = (0..n).filter(|&k| table.classes()[params[k]].layer <= 2).collect();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (source, members) in source_groups(table) {
        let sum = |c: &[Rational]| members.iter().fold(Rational::zero(), |s, &m| s + c[m]);
        let target = if source == whole { Rational::one() } else { Rational::zero() };
        let b0 = sum(&base);
        a.push(free.iter().map(|&k| linalg::big(&(sum(&units[k]) - b0))).collect::<Vec<_>>());
        b.push(linalg::big(&(target - b0)));
    }
    let x = linalg::solve(&a, &b)?;
    let mut vals = vec![Rational::zero(); n];
    for (&k, v) in free.iter().zip(&x) {
        vals[k] = linalg::small(v).ok_or_else(|| Error::ResourceLimit("coefficient overflow".into()))?;
    }
    let coeffs = solve(&vals)?;
    let truncated: Vec<Rational> = coeffs
        .into_iter()
        .zip(table.classes())
        .map(|(c, cl)| if cl.layer <= 2 { c } else { Rational::zero() })
        .collect();
    Ok(table.to_biset(&truncated))
}

/// `Σ_{[φ]} c_{[P,φ]}` for each `S`-class of sources `P` of order at least p.
pub fn source_sums(table: &ClassTable, omega: &FormalBiset<Rational>) -> Vec<SourceSum> {
    let coeffs = table.coefficients_of(omega).expect("ω is supported on F-classes");
    let g = table.group();
    source_groups(table)
        .into_iter()
        .map(|(source, members)| {
            let sub = g.subgroup(source);
            SourceSum {
                source: describe_source(table, source),
                layer: table.classes()[members[0]].layer,
                order: sub.order(),
                sum: members.iter().fold(Rational::zero(), |s, &m| s + coeffs[m]).to_fraction(),
            }
        })
        .collect()
}

fn describe_source(table: &ClassTable, id: usize) -> String {
    let g = table.group();
    let fs = table.fusion();
    let sub = g.subgroup(id);
    if sub == g.whole() {
        return "S".into();
    }
    if let Some(i) = g.maximal_subgroups().iter().position(|v| v == sub) {
        return format!("V{i}");
    }
    if sub == g.center() {
        return "<z>".into();
    }
    match (0..=fs.p() as usize).find(|&i| {
        let u = fs.line_gen(i);
        (0..g.order() as u16).any(|x| g.conjugate(x, sub).contains(u))
    }) {
        Some(i) => format!("<u{i}>"),
        None => format!("#{id}"),
    }
}

/// Both stability families on `F`-graph subgroups of order at least p.
pub fn verify_idempotent_stability(
    table: &ClassTable,
    omega: &FormalBiset<Rational>,
) -> Result<(StabilityReport, StabilityReport)> {
    let tests: Vec<GraphSubgroup> =
        table.classes().iter().filter(|c| c.layer <= 2).map(|c| c.rep.clone()).collect();
    let fs = table.fusion();
    Ok((check_stability(fs, omega, Side::Left, &tests)?, check_stability(fs, omega, Side::Right, &tests)?))
}

pub fn denominators_prime_to_p(omega: &FormalBiset<Rational>) -> bool {
    let p = omega.p() as i128;
    omega.terms().all(|(_, t)| t.coeff.denom() % p != 0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSum {
    pub source: String,
    pub layer: usize,
    pub order: usize,
    pub sum: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub class: String,
    pub layer: usize,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdempotentReport {
    pub system: String,
    pub prime: u32,
    pub c0: String,
    pub c1_extendable: String,
    pub c1_nonextendable: String,
    pub c2_z: String,
    /// `c_2^{(u_i)}` for each `i`.
    pub c2_u: Vec<String>,
    /// `[u_i, z^m]` and `[z, u_j^m]`.
    pub c2_mixed: String,
    /// `[u_i, u_j^m]` with `V_i`, `V_j` not `F`-conjugate.
    pub c2_cross: String,
    /// Extendable and nonextendable classes out of each `V_i`.
    pub d_extendable: Vec<usize>,
    pub d_nonextendable: Vec<usize>,
    pub layer_sums: Vec<String>,
    pub source_sums: Vec<SourceSum>,
    pub solve_matches_closed_form: bool,
    pub p_local: bool,
    pub left_stable: bool,
    pub right_stable: bool,
    pub coefficients: Vec<CoefficientEntry>,
}

impl IdempotentReport {
    pub fn passed(&self) -> bool {
        let sums_ok = self.source_sums.iter().all(|s| s.sum == if s.layer == 0 { "1" } else { "0" });
        self.solve_matches_closed_form && self.p_local && self.left_stable && self.right_stable && sums_ok
    }
}

pub fn idempotent_report(table: &ClassTable) -> Result<IdempotentReport> {
    let fs = table.fusion();
    let p = fs.p() as usize;
    let closed = omega_closed_form(table);
    let solved = omega_solve(table)?;
    let (left, right) = verify_idempotent_stability(table, &closed)?;
    let value = |label: ClassLabel| {
        let n = table.find_label(&label).expect("label in table");
        closed.coefficient_of(&table.classes()[n].key).to_fraction()
    };
    let top = table.classes().iter().find(|c| c.layer == 0).map(|c| c.label).expect("top layer");
    let mut d_e = vec![0; p + 1];
    let mut d_n = vec![0; p + 1];
    for c in table.classes() {
        match c.label {
            ClassLabel::Extendable { i, .. } => d_e[i] += 1,
            ClassLabel::Nonextendable { i, .. } => d_n[i] += 1,
            _ => {}
        }
    }
    let cyc = |xi, zeta| ClassLabel::Cyclic(crate::solver::Layer2Key { xi, zeta, m: 1 });
    let cross = (0..=p)
        .flat_map(|i| (0..=p).map(move |j| (i, j)))
        .find(|&(i, j)| fs.class_of(i) != fs.class_of(j))
        .map(|(i, j)| value(cyc(Point::U(i), Point::U(j))));
    let c1_nonextendable = closed
        .terms()
        .find(|(_, t)| closed.layer_of(&t.rep) == 1 && !fs.is_extendable(&t.rep.morphism))
        .map(|(_, t)| t.coeff.to_fraction())
        .unwrap_or_default();
    let one_layer = |r: usize| closed.layer(r).terms().fold(Rational::zero(), |s, (_, t)| s + t.coeff);
    Ok(IdempotentReport {
        system: fs.spec().name.clone(),
        prime: fs.p(),
        c0: value(top),
        c1_extendable: value(ClassLabel::Extendable { i: 0, j: 0, k: 1, l: 1 }),
        c1_nonextendable,
        c2_z: value(cyc(Point::Z, Point::Z)),
        c2_u: (0..=p).map(|i| value(cyc(Point::U(i), Point::U(i)))).collect(),
        c2_mixed: value(cyc(Point::U(0), Point::Z)),
        c2_cross: cross.unwrap_or_else(|| "-".into()),
        d_extendable: d_e,
        d_nonextendable: d_n,
        layer_sums: (0..=2).map(|r| one_layer(r).to_fraction()).collect(),
        source_sums: source_sums(table, &closed),
        solve_matches_closed_form: solved == closed,
        p_local: denominators_prime_to_p(&closed),
        left_stable: left.stable,
        right_stable: right.stable,
        coefficients: table
            .classes()
            .iter()
            .filter(|c| c.layer <= 2)
            .map(|c| CoefficientEntry {
                class: c.label.to_string(),
                layer: c.layer,
                value: closed.coefficient_of(&c.key).to_fraction(),
            })
            .collect(),
    })
}

/// `ω` with `c_2^{(z)}` (the `[z, z]` class alone) shifted by `delta`.
pub fn perturb_c2z(table: &ClassTable, omega: &FormalBiset<Rational>, delta: Rational) -> FormalBiset<Rational> {
    let n = table
        .find_label(&ClassLabel::Cyclic(crate::solver::Layer2Key { xi: Point::Z, zeta: Point::Z, m: 1 }))
        .expect("[z, z] in table");
    let mut out = omega.clone();
    out.add_key(table.classes()[n].key.clone(), delta);
    out
}

