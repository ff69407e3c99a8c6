//! Generalized support: elements, sets, properties and their minimal supports.

pub(crate) mod check;
pub mod properties;

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};
use crate::model::{is_x_tuple, tuples_of, Domain, Schema, Signature, Tuple, DEFAULT_TUPLE_LIMIT};

pub use check::{backtrack_stable_check, p_admissible_check, CheckReport, Counterexample};

/// Default bound on the number of universe elements [`support_sets`] will
/// enumerate subsets of.
pub const DEFAULT_UNIVERSE_LIMIT: usize = 20;

/// A column/value pair; `col` indexes the owning property's scope.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lit {
    pub col: usize,
    pub val: i64,
}

impl Lit {
    pub const fn new(col: usize, val: i64) -> Self {
        Lit { col, val }
    }

    /// Orders like `(col, val)`.
    #[inline]
    fn key(&self) -> u128 {
        (self.col as u128) << 64 | (self.val as u64 ^ 1 << 63) as u128
    }
}

impl Ord for Lit {
    #[inline]
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Lit {
    #[inline]
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }

    #[inline]
    fn lt(&self, other: &Self) -> bool {
        self.key() < other.key()
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{},{}⟩", self.col, self.val)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SupportElement {
    Tuple(Tuple),
    Lit(Lit),
}

impl SupportElement {
    pub fn lit(col: usize, val: i64) -> Self {
        SupportElement::Lit(Lit::new(col, val))
    }

    pub fn valid(&self, scope: &Schema, sig: &Signature) -> Result<bool> {
        match self {
            SupportElement::Tuple(t) => is_x_tuple(scope, sig, t),
            SupportElement::Lit(l) => {
                let v = scope.get(l.col).ok_or(Error::IndexOutOfRange { index: l.col, len: scope.len() })?;
                Ok(sig.get(v)?.contains(l.val))
            }
        }
    }
}

impl From<Lit> for SupportElement {
    fn from(l: Lit) -> Self {
        SupportElement::Lit(l)
    }
}

impl From<Tuple> for SupportElement {
    fn from(t: Tuple) -> Self {
        SupportElement::Tuple(t)
    }
}

impl fmt::Debug for SupportElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SupportElement::Tuple(t) => t.fmt(f),
            SupportElement::Lit(l) => l.fmt(f),
        }
    }
}

pub type SupportSet = BTreeSet<SupportElement>;

pub fn lit_set(lits: impl IntoIterator<Item = Lit>) -> SupportSet {
    lits.into_iter().map(SupportElement::Lit).collect()
}

/// Every element of `s` is valid under `σ`; the empty set is always valid.
pub fn valid(s: &SupportSet, scope: &Schema, sig: &Signature) -> Result<bool> {
    for e in s {
        if !e.valid(scope, sig)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Which kind of element a property's supports are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UniverseKind {
    Literals,
    Tuples,
}

type Eval = dyn Fn(&Signature, &SupportSet) -> bool + Send + Sync;

/// A named predicate over a signature and a support set.
#[derive(Clone)]
pub struct SupportProperty {
    name: String,
    scope: Schema,
    universe: UniverseKind,
    monotone: bool,
    eval: Arc<Eval>,
}

impl fmt::Debug for SupportProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SupportProperty")
            .field("name", &self.name)
            .field("scope", &self.scope)
            .field("universe", &self.universe)
            .finish_non_exhaustive()
    }
}

impl SupportProperty {
    /// `monotone` asserts that supersets of a satisfying set satisfy too;
    /// it only enables shortcuts and must be truthful.
    pub fn new(
        name: impl Into<String>,
        scope: Schema,
        universe: UniverseKind,
        monotone: bool,
        eval: impl Fn(&Signature, &SupportSet) -> bool + Send + Sync + 'static,
    ) -> Self {
        SupportProperty { name: name.into(), scope, universe, monotone, eval: Arc::new(eval) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn scope(&self) -> &Schema {
        &self.scope
    }

    pub fn universe_kind(&self) -> UniverseKind {
        self.universe
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    /// `P_σ(S)`.
    pub fn holds(&self, sig: &Signature, s: &SupportSet) -> Result<bool> {
        sig.covers(&self.scope)?;
        Ok((self.eval)(sig, s))
    }

    pub(crate) fn eval_unchecked(&self, sig: &Signature, s: &SupportSet) -> bool {
        (self.eval)(sig, s)
    }

    /// All candidate elements drawn from `σ0`: every literal of the scope, or
    /// every scope tuple.
    pub fn universe(&self, sig: &Signature) -> Result<Vec<SupportElement>> {
        match self.universe {
            UniverseKind::Literals => {
                let mut out = Vec::new();
                for (col, v) in self.scope.iter().enumerate() {
                    out.extend(sig.get(v)?.iter().map(|a| SupportElement::lit(col, a)));
                }
                Ok(out)
            }
            UniverseKind::Tuples => Ok(tuples_of(&self.scope, sig, DEFAULT_TUPLE_LIMIT)?
                .into_iter()
                .map(SupportElement::Tuple)
                .collect()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combinator {
    And,
    Or,
}

/// Pointwise conjunction or disjunction.
pub fn combine(p: &SupportProperty, q: &SupportProperty, op: Combinator) -> Result<SupportProperty> {
    if p.scope != q.scope || p.universe != q.universe {
        return Err(Error::ScopeMismatch);
    }
    let (pe, qe) = (p.eval.clone(), q.eval.clone());
    let name = match op {
        Combinator::And => alloc::format!("({} ∧ {})", p.name, q.name),
        Combinator::Or => alloc::format!("({} ∨ {})", p.name, q.name),
    };
    let monotone = p.monotone && q.monotone;
    Ok(match op {
        Combinator::And => SupportProperty::new(name, p.scope.clone(), p.universe, monotone, move |s, x| {
            pe(s, x) && qe(s, x)
        }),
        Combinator::Or => SupportProperty::new(name, p.scope.clone(), p.universe, monotone, move |s, x| {
            pe(s, x) || qe(s, x)
        }),
    })
}

/// Elements of `universe` valid under `σ`, in their given order.
pub fn valid_elements(
    scope: &Schema,
    sig: &Signature,
    universe: &[SupportElement],
) -> Result<Vec<SupportElement>> {
    let mut out = Vec::new();
    for e in universe {
        if e.valid(scope, sig)? {
            out.push(e.clone());
        }
    }
    Ok(out)
}

pub(crate) fn set_of_mask(elems: &[SupportElement], mask: u64) -> SupportSet {
    let mut s = SupportSet::new();
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        s.insert(elems[i].clone());
        m &= m - 1;
    }
    s
}

/// Iterates the `n`-bit masks in order of popcount, then numerically.
pub(crate) fn masks_by_popcount(n: usize) -> impl Iterator<Item = u64> {
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    (0..=n).flat_map(move |k| {
        let mut next = if k == 0 { Some(0u64) } else { Some((1u64 << k) - 1) };
        core::iter::from_fn(move || {
            let cur = next?;
            next = if cur == 0 {
                None
            } else {
                // Gosper's hack
                let c = cur & cur.wrapping_neg();
                let r = cur + c;
                let n2 = (((r ^ cur) >> 2) / c) | r;
                if n2 & !full != 0 || n2 < cur { None } else { Some(n2) }
            };
            Some(cur)
        })
    })
}

/// The minimal satisfying subsets of the valid part of `universe`, as
/// bitmasks over that valid part.
pub(crate) fn minimal_masks(
    p: &SupportProperty,
    sig: &Signature,
    elems: &[SupportElement],
    limit: usize,
) -> Result<Vec<u64>> {
    if elems.len() > limit {
        return Err(Error::EnumerationLimit { limit: limit as u128, required: elems.len() as u128 });
    }
    if p.monotone && !p.eval_unchecked(sig, &set_of_mask(elems, full_mask(elems.len()))) {
        return Ok(Vec::new());
    }
    let mut found: Vec<u64> = Vec::new();
    for m in masks_by_popcount(elems.len()) {
        if found.iter().any(|&f| f & !m == 0) {
            continue;
        }
        if p.eval_unchecked(sig, &set_of_mask(elems, m)) {
            found.push(m);
        }
    }
    Ok(found)
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// `Support(P, σ)` restricted to subsets of `universe`: every minimal
/// `S ⊆ universe` valid under `σ` with `P_σ(S)`.
pub fn support_sets(
    p: &SupportProperty,
    sig: &Signature,
    universe: &[SupportElement],
) -> Result<BTreeSet<SupportSet>> {
    support_sets_bounded(p, sig, universe, DEFAULT_UNIVERSE_LIMIT)
}

pub fn support_sets_bounded(
    p: &SupportProperty,
    sig: &Signature,
    universe: &[SupportElement],
    limit: usize,
) -> Result<BTreeSet<SupportSet>> {
    sig.covers(&p.scope)?;
    let elems = valid_elements(&p.scope, sig, universe)?;
    Ok(minimal_masks(p, sig, &elems, limit)?.into_iter().map(|m| set_of_mask(&elems, m)).collect())
}

/// `Support(P, σ) ≠ ∅` within `universe`.
pub fn has_support(p: &SupportProperty, sig: &Signature, universe: &[SupportElement]) -> Result<bool> {
    sig.covers(&p.scope)?;
    let elems = valid_elements(&p.scope, sig, universe)?;
    if p.monotone {
        return Ok(p.eval_unchecked(sig, &elems.iter().cloned().collect()));
    }
    if elems.len() > DEFAULT_UNIVERSE_LIMIT {
        return Err(Error::EnumerationLimit {
            limit: DEFAULT_UNIVERSE_LIMIT as u128,
            required: elems.len() as u128,
        });
    }
    Ok(masks_by_popcount(elems.len()).any(|m| p.eval_unchecked(sig, &set_of_mask(&elems, m))))
}

/// A collection is supported iff each member has a nonempty support set.
pub fn collection_supported(
    ps: &[SupportProperty],
    sig: &Signature,
    universe: &[SupportElement],
) -> Result<bool> {
    for p in ps {
        if !has_support(p, sig, universe)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `S ∈ Support(P, σ)`: `S` is valid, satisfies `P`, and no proper subset does.
pub fn is_support(p: &SupportProperty, sig: &Signature, s: &SupportSet) -> Result<bool> {
    if !valid(s, &p.scope, sig)? || !p.holds(sig, s)? {
        return Ok(false);
    }
    let elems: Vec<SupportElement> = s.iter().cloned().collect();
    if p.monotone {
        for e in &elems {
            let mut smaller = s.clone();
            smaller.remove(e);
            if p.eval_unchecked(sig, &smaller) {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    if elems.len() > DEFAULT_UNIVERSE_LIMIT {
        return Err(Error::EnumerationLimit {
            limit: DEFAULT_UNIVERSE_LIMIT as u128,
            required: elems.len() as u128,
        });
    }
    let full = full_mask(elems.len());
    Ok(masks_by_popcount(elems.len())
        .filter(|&m| m != full)
        .all(|m| !p.eval_unchecked(sig, &set_of_mask(&elems, m))))
}

/// Domain of column `col` of `scope` under `σ`, or the empty domain when
/// the column does not exist.
pub(crate) fn col_domain<'a>(sig: &'a Signature, scope: &Schema, col: usize) -> &'a Domain {
    static EMPTY: Domain = Domain::EMPTY;
    scope.get(col).and_then(|v| sig.domain(v)).unwrap_or(&EMPTY)
}

#[cfg(test)]
mod tests {
    use super::properties::*;
    use super::*;
    use alloc::vec;

    fn bits3() -> Signature {
        Signature::new().with("x", [0, 1]).with("y", [0, 1]).with("z", [0, 1])
    }

    #[test]
    fn gosper_order() {
        let v: Vec<u64> = masks_by_popcount(3).collect();
        assert_eq!(v, vec![0, 1, 2, 4, 3, 5, 6, 7]);
        assert_eq!(masks_by_popcount(0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(masks_by_popcount(10).count(), 1024);
    }

    #[test]
    fn true_and_false() {
        let scope = Schema::from_names(&["x", "y", "z"]);
        let sig = bits3();
        let t = truth(scope.clone());
        let f = falsity(scope.clone());
        let u = t.universe(&sig).unwrap();
        assert_eq!(support_sets(&t, &sig, &u).unwrap(), [SupportSet::new()].into_iter().collect());
        assert!(support_sets(&f, &sig, &u).unwrap().is_empty());
        assert!(t.holds(&sig, &SupportSet::new()).unwrap());
        assert!(!f.holds(&sig, &SupportSet::new()).unwrap());
    }

    #[test]
    fn running_example_support() {
        let scope = Schema::from_names(&["x", "y", "z"]);
        let p = running_example(scope);
        let sig = bits3();
        let u = p.universe(&sig).unwrap();
        let expect: SupportSet = [SupportElement::Tuple(Tuple::from([0, 1, 1]))].into_iter().collect();
        assert_eq!(support_sets(&p, &sig, &u).unwrap(), [expect].into_iter().collect());
    }

    #[test]
    fn literal_supports_are_singletons() {
        let scope = Schema::from_names(&["x", "y"]);
        let p = literal(scope.clone(), 1, 2);
        let sig = Signature::new().with("x", [1, 3]).with("y", [2]);
        let u = vec![SupportElement::Tuple(Tuple::from([1, 2])), SupportElement::Tuple(Tuple::from([3, 2]))];
        let sets = support_sets(&p, &sig, &u).unwrap();
        assert_eq!(sets.len(), 2);
        assert!(sets.iter().all(|s| s.len() == 1));

        let none = literal(scope.clone(), 0, 9);
        assert!(support_sets(&none, &sig, &u).unwrap().is_empty());
        assert!(!literal(scope.clone(), 0, 1).holds(&sig, &SupportSet::new()).unwrap());
        let one: SupportSet = [SupportElement::Tuple(Tuple::from([1, 5]))].into_iter().collect();
        assert!(literal(scope, 0, 1).holds(&sig, &one).unwrap());
    }

    #[test]
    fn combinators() {
        let scope = Schema::from_names(&["x", "y", "z"]);
        let sig = bits3();
        let p = running_example(scope.clone());
        let and = combine(&truth_tuples(scope.clone()), &p, Combinator::And).unwrap();
        let or = combine(&falsity_tuples(scope.clone()), &p, Combinator::Or).unwrap();
        let u = p.universe(&sig).unwrap();
        for m in 0..(1u64 << u.len()) {
            let s = set_of_mask(&u, m);
            let want = p.holds(&sig, &s).unwrap();
            assert_eq!(and.holds(&sig, &s).unwrap(), want);
            assert_eq!(or.holds(&sig, &s).unwrap(), want);
        }
        let other = truth(Schema::from_names(&["x"]));
        assert_eq!(combine(&p, &other, Combinator::And).unwrap_err(), Error::ScopeMismatch);
    }

    #[test]
    fn collections() {
        let scope = Schema::from_names(&["x", "y", "z"]);
        let sig = bits3();
        let u = truth(scope.clone()).universe(&sig).unwrap();
        assert!(collection_supported(&[truth(scope.clone())], &sig, &u).unwrap());
        assert!(!collection_supported(&[truth(scope.clone()), falsity(scope)], &sig, &u).unwrap());
    }

    #[test]
    fn alldifferent_literal_collection() {
        let scope = Schema::from_names(&["x1", "x2", "x3"]);
        let sig = Signature::new()
            .with("x1", [1, 2])
            .with("x2", [1, 2, 3, 4])
            .with("x3", [1, 2, 3, 4, 5]);
        let alldiff = crate::semantics::ConstraintSpec::table(
            scope.clone(),
            tuples_of(&scope, &sig, DEFAULT_TUPLE_LIMIT)
                .unwrap()
                .into_iter()
                .filter(|t| t[0] != t[1] && t[0] != t[2] && t[1] != t[2]),
        )
        .unwrap();
        let sols: Vec<SupportElement> =
            alldiff.denote(&sig).unwrap().tuples.into_iter().map(SupportElement::Tuple).collect();
        // x1 ∈ {1,2}, x2 ∈ {3,4}, x3 ∈ {5}: the set L of seven literals
        let lits = [(0, 1), (0, 2), (1, 3), (1, 4), (2, 3), (2, 4), (2, 5)];
        let props: Vec<_> = lits.iter().map(|&(i, a)| literal(scope.clone(), i, a)).collect();
        assert!(collection_supported(&props, &sig, &sols).unwrap());
        let absent = literal(scope, 2, 9);
        assert!(!collection_supported(&[absent], &sig, &sols).unwrap());
    }

    #[test]
    fn element_support_shapes() {
        let x = Schema::from_names(&["x0", "x1"]);
        let p1 = element_p1(&x, "y", "z");
        let sig = Signature::new().with("x0", [1, 2]).with("x1", [3]).with("y", [0, 1]).with("z", [1, 2, 3]);
        let u = p1.universe(&sig).unwrap();
        let sets = support_sets(&p1, &sig, &u).unwrap();
        assert!(sets.contains(&lit_set([Lit::new(2, 0), Lit::new(2, 1)])));
        let fixed = sig.clone().with("y", [0]);
        assert_eq!(
            support_sets(&p1, &fixed, &u).unwrap(),
            [lit_set([Lit::new(3, 1), Lit::new(3, 2)])].into_iter().collect()
        );
        assert!(is_support(&p1, &fixed, &lit_set([Lit::new(3, 1), Lit::new(3, 2)])).unwrap());
        assert!(!is_support(&p1, &fixed, &lit_set([Lit::new(3, 1), Lit::new(3, 2), Lit::new(3, 3)])).unwrap());
    }

    #[test]
    fn universe_bound() {
        let scope = Schema::from_names(&["x"]);
        let sig = Signature::new().with("x", Domain::range(0, 30));
        let p = element_like_literal_universe(scope);
        let u = p.universe(&sig).unwrap();
        assert!(matches!(
            support_sets(&p, &sig, &u),
            Err(Error::EnumerationLimit { limit: 20, required: 31 })
        ));
    }

    fn element_like_literal_universe(scope: Schema) -> SupportProperty {
        SupportProperty::new("nonempty", scope, UniverseKind::Literals, true, |_, s| !s.is_empty())
    }
}
