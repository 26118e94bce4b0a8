//! Formal sums of transitive bisets with exact coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{canonical_in, count_fixed_points, representative, BisetClass, ClassKey, GraphSubgroup};
use crate::error::{Error, Result};
use crate::group::{GroupMorphism, Heisenberg, Subgroup};

pub type Rational = Ratio<i128>;

/// Exact scalars: `i64` for bisets, [`Rational`] for idempotents.
pub trait Coefficient:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_int(v: i64) -> Self;
    /// `self / d` if it is again a scalar of this type.
    fn div_exact(&self, d: i64) -> Option<Self>;
    fn is_nonneg_integer(&self) -> bool;
    fn to_fraction(&self) -> String;
    fn parse_fraction(s: &str) -> Result<Self>;
}

impl Coefficient for i64 {
    fn from_int(v: i64) -> Self {
        v
    }
    fn div_exact(&self, d: i64) -> Option<Self> {
        (d != 0 && self % d == 0).then(|| self / d)
    }
    fn is_nonneg_integer(&self) -> bool {
        *self >= 0
    }
    fn to_fraction(&self) -> String {
        self.to_string()
    }
    fn parse_fraction(s: &str) -> Result<Self> {
        let r = Rational::from_str(s.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        if !r.is_integer() {
            return Err(Error::Parse(format!("{s} is not an integer")));
        }
        i64::try_from(r.to_integer()).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl Coefficient for Rational {
    fn from_int(v: i64) -> Self {
        Rational::from_integer(v as i128)
    }
    fn div_exact(&self, d: i64) -> Option<Self> {
        (d != 0).then(|| self / Rational::from_integer(d as i128))
    }
    fn is_nonneg_integer(&self) -> bool {
        self.is_integer() && !self.is_negative()
    }
    fn to_fraction(&self) -> String {
        self.to_string()
    }
    fn parse_fraction(s: &str) -> Result<Self> {
        Rational::from_str(s.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))
    }
}

#[derive(Clone, Debug)]
pub struct Term<C> {
    pub rep: GraphSubgroup,
    pub coeff: C,
}

/// `Σ c_i [Q_i, φ_i]` over `R×S`-classes of graph subgroups, where `R` is
/// the ambient left group (`S` for `S`-`S`-bisets).
#[derive(Clone)]
pub struct FormalBiset<C> {
    group: Arc<Heisenberg>,
    ambient: Subgroup,
    terms: BTreeMap<ClassKey, Term<C>>,
}

impl<C: Coefficient> fmt::Debug for FormalBiset<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(k, t)| (k, &t.coeff))).finish()
    }
}

impl<C: Coefficient> PartialEq for FormalBiset<C> {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient
            && self.group.p() == other.group.p()
            && self.terms.len() == other.terms.len()
            && self.terms.iter().zip(&other.terms).all(|((k, a), (l, b))| k == l && a.coeff == b.coeff)
    }
}

impl<C: Coefficient> FormalBiset<C> {
    pub fn new(group: Arc<Heisenberg>) -> Self {
        let ambient = group.whole().clone();
        FormalBiset { group, ambient, terms: BTreeMap::new() }
    }

    /// An `R`-`S`-biset.
    pub fn new_over(group: Arc<Heisenberg>, ambient: &Subgroup) -> Self {
        FormalBiset { group, ambient: ambient.clone(), terms: BTreeMap::new() }
    }

    pub fn group(&self) -> &Arc<Heisenberg> {
        &self.group
    }
    pub fn p(&self) -> u32 {
        self.group.p()
    }
    pub fn ambient(&self) -> &Subgroup {
        &self.ambient
    }

    /// Add `c [Q, φ]`.
    pub fn add(&mut self, phi: &GroupMorphism, c: C) {
        let key = canonical_in(&self.group, &self.ambient, phi).key;
        self.add_key(key, c);
    }

    pub fn add_class(&mut self, class: &BisetClass, c: C) {
        self.add_key(class.key.clone(), c);
    }

    pub fn add_key(&mut self, key: ClassKey, c: C) {
        if c.is_zero() {
            return;
        }
        let remove = match self.terms.get_mut(&key) {
            Some(t) => {
                t.coeff = t.coeff.clone() + c;
                t.coeff.is_zero()
            }
            None => {
                let rep = representative(&self.group, &key);
                self.terms.insert(key.clone(), Term { rep, coeff: c });
                false
            }
        };
        if remove {
            self.terms.remove(&key);
        }
    }

    pub fn coefficient(&self, phi: &GroupMorphism) -> C {
        let key = canonical_in(&self.group, &self.ambient, phi).key;
        self.coefficient_of(&key)
    }

    pub fn coefficient_of(&self, key: &ClassKey) -> C {
        self.terms.get(key).map_or_else(C::zero, |t| t.coeff.clone())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ClassKey, &Term<C>)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `r` with `|R : Q| = p^r`.
    pub fn layer_of(&self, rep: &GraphSubgroup) -> usize {
        let mut idx = self.ambient.order() / rep.order();
        let mut r = 0;
        while idx > 1 {
            idx /= self.p() as usize;
            r += 1;
        }
        r
    }

    fn filtered(&self, keep: impl Fn(usize) -> bool) -> Self {
        let mut out = Self::new_over(self.group.clone(), &self.ambient);
        for (k, t) in &self.terms {
            if keep(self.layer_of(&t.rep)) {
                out.terms.insert(k.clone(), t.clone());
            }
        }
        out
    }

    /// `X_r`.
    pub fn layer(&self, r: usize) -> Self {
        self.filtered(|l| l == r)
    }

    /// `X_{≤r}`.
    pub fn truncate(&self, r: usize) -> Self {
        self.filtered(|l| l <= r)
    }

    /// Total multiplicity in layer `r`.
    pub fn layer_total(&self, r: usize) -> C {
        self.terms
            .values()
            .filter(|t| self.layer_of(&t.rep) == r)
            .fold(C::zero(), |a, t| a + t.coeff.clone())
    }

    /// Number of distinct classes in layer `r`.
    pub fn layer_classes(&self, r: usize) -> usize {
        self.terms.values().filter(|t| self.layer_of(&t.rep) == r).count()
    }

    /// `e(X) = |X| / |S|`.
    pub fn e(&self) -> C {
        self.terms.values().fold(C::zero(), |a, t| {
            a + t.coeff.clone() * C::from_int((self.ambient.order() / t.rep.order()) as i64)
        })
    }

    pub fn is_genuine(&self) -> bool {
        self.terms.values().all(|t| t.coeff.is_nonneg_integer())
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::new_over(self.group.clone(), &self.ambient);
        for (k, t) in &self.terms {
            out.add_key(k.clone(), t.coeff.clone() * c.clone());
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, t) in &other.terms {
            out.add_key(k.clone(), t.coeff.clone());
        }
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scale(&-C::one()))
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> FormalBiset<D> {
        let mut out = FormalBiset::new_over(self.group.clone(), &self.ambient);
        for (k, t) in &self.terms {
            out.add_key(k.clone(), f(&t.coeff));
        }
        out
    }

    /// `|X^{Δ_R^ψ}|`, for `S`-`S`-bisets.
    pub fn mark(&self, by: &GroupMorphism) -> C {
        assert_eq!(&self.ambient, self.group.whole(), "marks are defined for S-S-bisets");
        self.terms.values().fold(C::zero(), |a, t| {
            let n = count_fixed_points(&self.group, &t.rep.morphism, by);
            if n == 0 {
                a
            } else {
                a + t.coeff.clone() * C::from_int(n as i64)
            }
        })
    }

    pub fn mark_vector(&self, tests: &[GraphSubgroup]) -> Vec<C> {
        tests.iter().map(|t| self.mark(&t.morphism)).collect()
    }

    /// `[Q, φ] -> [φ(Q), φ^-1]`.
    pub fn opposite(&self) -> Self {
        let mut out = Self::new_over(self.group.clone(), &self.ambient);
        for t in self.terms.values() {
            out.add(&self.group.inverse(&t.rep.morphism), t.coeff.clone());
        }
        out
    }

    pub fn to_json(&self, system: &str) -> FormalBisetJson {
        let g = &self.group;
        let coords = |e| {
            let (a, b, c) = g.coords(e);
            [a, b, c]
        };
        FormalBisetJson {
            prime: self.p(),
            system: system.to_string(),
            summands: self
                .terms
                .values()
                .map(|t| SummandJson {
                    source_generators: t.rep.source().gens().iter().map(|&e| coords(e)).collect(),
                    image_generators: t.rep.morphism.gen_images().into_iter().map(coords).collect(),
                    multiplicity: t.coeff.to_fraction(),
                })
                .collect(),
        }
    }

    pub fn from_json(group: Arc<Heisenberg>, j: &FormalBisetJson) -> Result<Self> {
        if j.prime != group.p() {
            return Err(Error::PrimeMismatch { expected: group.p(), got: j.prime });
        }
        let elem = |v: &[u32; 3]| -> Result<_> {
            if v.iter().any(|&c| c >= j.prime) {
                return Err(Error::Parse(format!("coordinate out of range in {v:?}")));
            }
            Ok(group.elem(v[0] as i64, v[1] as i64, v[2] as i64))
        };
        let mut out = Self::new(group.clone());
        for s in &j.summands {
            let gens = s.source_generators.iter().map(elem).collect::<Result<Vec<_>>>()?;
            let imgs = s.image_generators.iter().map(elem).collect::<Result<Vec<_>>>()?;
            let phi = group.morphism_by(&gens, &imgs)?;
            out.add(&phi, C::parse_fraction(&s.multiplicity)?);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummandJson {
    pub source_generators: Vec<[u32; 3]>,
    pub image_generators: Vec<[u32; 3]>,
    pub multiplicity: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalBisetJson {
    pub prime: u32,
    pub system: String,
    pub summands: Vec<SummandJson>,
}
