//! Relational substrate: variables, domains, signatures, schemata (with
//! duplicate columns), tuples, coherence, selection and projection.
//!
//! Everything here is an immutable value; operations are pure.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use crate::error::{Error, Result};

/// Default bound on the number of tuples produced by [`tuples_of`].
pub const DEFAULT_TUPLE_LIMIT: u128 = 1_000_000;

/// Variable identifier. Cheap to clone; ordered by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(Arc<str>);

impl VarId {
    pub fn new(name: &str) -> Self {
        VarId(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for VarId {
    fn from(s: &str) -> Self {
        VarId::new(s)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A finite set of integers, kept sorted so `min`/`max` are O(1).
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Domain(Vec<i64>);

impl Domain {
    pub const EMPTY: Domain = Domain(Vec::new());

    pub fn empty() -> Self {
        Domain(Vec::new())
    }

    /// The contiguous range `lo..=hi` (empty when `lo > hi`).
    pub fn range(lo: i64, hi: i64) -> Self {
        if lo > hi {
            return Domain::empty();
        }
        Domain((lo..=hi).collect())
    }

    pub fn singleton(v: i64) -> Self {
        Domain(alloc::vec![v])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_singleton(&self) -> bool {
        self.0.len() == 1
    }

    pub fn contains(&self, v: i64) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn min(&self) -> Option<i64> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<i64> {
        self.0.last().copied()
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset(&self, other: &Domain) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    pub fn intersection(&self, other: &Domain) -> Domain {
        Domain(self.0.iter().copied().filter(|&v| other.contains(v)).collect())
    }

    pub fn without(&self, v: i64) -> Domain {
        Domain(self.0.iter().copied().filter(|&w| w != v).collect())
    }

    pub fn retain(&mut self, mut keep: impl FnMut(i64) -> bool) {
        self.0.retain(|&v| keep(v));
    }

    pub fn insert(&mut self, v: i64) {
        if let Err(pos) = self.0.binary_search(&v) {
            self.0.insert(pos, v);
        }
    }

    pub fn remove(&mut self, v: i64) -> bool {
        match self.0.binary_search(&v) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }
}

impl FromIterator<i64> for Domain {
    fn from_iter<I: IntoIterator<Item = i64>>(iter: I) -> Self {
        let mut v: Vec<i64> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Domain(v)
    }
}

impl<const N: usize> From<[i64; N]> for Domain {
    fn from(vals: [i64; N]) -> Self {
        vals.into_iter().collect()
    }
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

/// An ordered sequence of variables; duplicates are permitted and indexing
/// is zero-based.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Schema(Vec<VarId>);

impl Schema {
    pub fn new(vars: Vec<VarId>) -> Self {
        Schema(vars)
    }

    pub fn from_names(names: &[&str]) -> Self {
        Schema(names.iter().map(|n| VarId::new(n)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vars(&self) -> &[VarId] {
        &self.0
    }

    pub fn contains(&self, v: &VarId) -> bool {
        self.0.contains(v)
    }

    /// `{i | schema[i] = v}`, ascending.
    pub fn indices(&self, v: &VarId) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, w)| *w == v)
            .map(|(i, _)| i)
            .collect()
    }

    /// Distinct variables in order of first occurrence.
    pub fn distinct(&self) -> Vec<VarId> {
        let mut seen = BTreeSet::new();
        self.0.iter().filter(|v| seen.insert((*v).clone())).cloned().collect()
    }

    /// Set inclusion of the underlying variables, ignoring order and multiplicity.
    pub fn is_subset_of(&self, other: &Schema) -> bool {
        self.0.iter().all(|v| other.contains(v))
    }

    pub fn equivalent(&self, other: &Schema) -> bool {
        self.is_subset_of(other) && other.is_subset_of(self)
    }

    pub fn concat(&self, other: &Schema) -> Schema {
        let mut vars = self.0.clone();
        vars.extend(other.0.iter().cloned());
        Schema(vars)
    }
}

impl Deref for Schema {
    type Target = [VarId];

    fn deref(&self) -> &[VarId] {
        &self.0
    }
}

impl fmt::Debug for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Free function form of [`Schema::indices`].
pub fn indices(schema: &Schema, v: &VarId) -> Vec<usize> {
    schema.indices(v)
}

/// A finite mapping from variables to domains.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature(BTreeMap<VarId, Domain>);

impl Signature {
    pub fn new() -> Self {
        Signature(BTreeMap::new())
    }

    pub fn with(mut self, v: &str, dom: impl Into<Domain>) -> Self {
        self.0.insert(VarId::new(v), dom.into());
        self
    }

    pub fn insert(&mut self, v: VarId, dom: Domain) {
        self.0.insert(v, dom);
    }

    pub fn domain(&self, v: &VarId) -> Option<&Domain> {
        self.0.get(v)
    }

    pub fn domain_mut(&mut self, v: &VarId) -> Option<&mut Domain> {
        self.0.get_mut(v)
    }

    /// Domain lookup that reports a missing entry as an error.
    pub fn get(&self, v: &VarId) -> Result<&Domain> {
        self.0.get(v).ok_or_else(|| Error::MissingVariable(v.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarId, &Domain)> {
        self.0.iter()
    }

    pub fn vars(&self) -> impl Iterator<Item = &VarId> {
        self.0.keys()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn covers(&self, schema: &Schema) -> Result<()> {
        for v in schema.iter() {
            self.get(v)?;
        }
        Ok(())
    }

    /// True iff every mapped domain is nonempty.
    pub fn is_nonempty(&self) -> bool {
        self.0.values().all(|d| !d.is_empty())
    }

    /// True iff every mapped domain has exactly one value.
    pub fn is_singleton(&self) -> bool {
        self.0.values().all(Domain::is_singleton)
    }

    /// The signature restricted to the variables of `schema`.
    pub fn restrict(&self, schema: &Schema) -> Result<Signature> {
        let mut out = Signature::new();
        for v in schema.iter() {
            out.insert(v.clone(), self.get(v)?.clone());
        }
        Ok(out)
    }

    /// The signature whose domains are the singletons of a coherent tuple.
    pub fn from_tuple(schema: &Schema, tuple: &Tuple) -> Result<Signature> {
        check_len(schema, tuple)?;
        let mut out = Signature::new();
        for (v, &val) in schema.iter().zip(tuple.iter()) {
            out.insert(v.clone(), Domain::singleton(val));
        }
        Ok(out)
    }
}

impl FromIterator<(VarId, Domain)> for Signature {
    fn from_iter<I: IntoIterator<Item = (VarId, Domain)>>(iter: I) -> Self {
        Signature(iter.into_iter().collect())
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.0.iter()).finish()
    }
}

/// `narrow ⊑ wide` over the variables of `schema`.
pub fn signature_leq(narrow: &Signature, wide: &Signature, schema: &Schema) -> Result<bool> {
    let mut leq = true;
    for v in schema.iter() {
        leq &= narrow.get(v)?.is_subset(wide.get(v)?);
    }
    Ok(leq)
}

/// `narrow ⊏ wide`: `⊑` with at least one proper subset.
pub fn signature_lt(narrow: &Signature, wide: &Signature, schema: &Schema) -> Result<bool> {
    if !signature_leq(narrow, wide, schema)? {
        return Ok(false);
    }
    for v in schema.iter() {
        if narrow.get(v)?.len() < wide.get(v)?.len() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// An ordered sequence of integers.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tuple(pub Vec<i64>);

impl Tuple {
    pub fn new(vals: Vec<i64>) -> Self {
        Tuple(vals)
    }
}

impl Deref for Tuple {
    type Target = [i64];

    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl<const N: usize> From<[i64; N]> for Tuple {
    fn from(vals: [i64; N]) -> Self {
        Tuple(vals.to_vec())
    }
}

impl fmt::Debug for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⟨")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("⟩")
    }
}

pub(crate) fn check_len(schema: &Schema, tuple: &Tuple) -> Result<()> {
    if schema.len() != tuple.len() {
        return Err(Error::ArityMismatch { expected: schema.len(), found: tuple.len() });
    }
    Ok(())
}

/// `τ` is an X-tuple under `σ`: right length and every column inside its domain.
pub fn is_x_tuple(schema: &Schema, sig: &Signature, tuple: &Tuple) -> Result<bool> {
    check_len(schema, tuple)?;
    for (v, &val) in schema.iter().zip(tuple.iter()) {
        if !sig.get(v)?.contains(val) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All columns indexed by `v` agree (vacuous when `v` is absent).
pub fn coherent_var(schema: &Schema, tuple: &Tuple, v: &VarId) -> Result<bool> {
    check_len(schema, tuple)?;
    let mut first = None;
    for (w, &val) in schema.iter().zip(tuple.iter()) {
        if w == v {
            match first {
                None => first = Some(val),
                Some(f) if f != val => return Ok(false),
                Some(_) => {}
            }
        }
    }
    Ok(true)
}

/// Coherence with respect to every variable of `wrt`.
pub fn coherent(schema: &Schema, tuple: &Tuple, wrt: &Schema) -> Result<bool> {
    check_len(schema, tuple)?;
    for v in wrt.distinct() {
        if !coherent_var(schema, tuple, &v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Row filters for [`Relation::select`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Selection {
    /// `τ[i] = a`; does not imply coherence.
    IndexEq(usize, i64),
    /// Every column labelled by the variable holds the value.
    ValueEq(VarId, i64),
    /// Tuples coherent with the given schema.
    CoherentWith(Schema),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    pub schema: Schema,
    pub tuples: BTreeSet<Tuple>,
}

impl Relation {
    pub fn new(schema: Schema, tuples: impl IntoIterator<Item = Tuple>) -> Result<Relation> {
        let tuples: BTreeSet<Tuple> = tuples.into_iter().collect();
        for t in &tuples {
            check_len(&schema, t)?;
        }
        Ok(Relation { schema, tuples })
    }

    pub fn empty(schema: Schema) -> Relation {
        Relation { schema, tuples: BTreeSet::new() }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &Tuple) -> bool {
        self.tuples.contains(t)
    }

    pub fn is_wellformed(&self, sig: &Signature) -> Result<bool> {
        for t in &self.tuples {
            if !is_x_tuple(&self.schema, sig, t)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn select(&self, mode: &Selection) -> Result<Relation> {
        let schema = &self.schema;
        let keep: alloc::boxed::Box<dyn Fn(&Tuple) -> bool> = match mode {
            Selection::IndexEq(i, a) => {
                if *i >= schema.len() {
                    return Err(Error::IndexOutOfRange { index: *i, len: schema.len() });
                }
                let (i, a) = (*i, *a);
                alloc::boxed::Box::new(move |t: &Tuple| t[i] == a)
            }
            Selection::ValueEq(x, a) => {
                let idx = schema.indices(x);
                let a = *a;
                alloc::boxed::Box::new(move |t: &Tuple| idx.iter().all(|&i| t[i] == a))
            }
            Selection::CoherentWith(wrt) => {
                let groups: Vec<Vec<usize>> =
                    wrt.distinct().iter().map(|v| schema.indices(v)).collect();
                alloc::boxed::Box::new(move |t: &Tuple| {
                    groups.iter().all(|g| g.windows(2).all(|w| t[w[0]] == t[w[1]]))
                })
            }
        };
        Ok(Relation {
            schema: schema.clone(),
            tuples: self.tuples.iter().filter(|t| keep(t)).cloned().collect(),
        })
    }

    pub fn coherent_part(&self) -> Relation {
        self.select(&Selection::CoherentWith(self.schema.clone()))
            .expect("coherent selection cannot fail")
    }

    pub fn project(&self, f: &ProjectionMap) -> Result<Relation> {
        if f.source != self.schema {
            return Err(Error::ScopeMismatch);
        }
        let mut tuples = BTreeSet::new();
        for t in &self.tuples {
            tuples.insert(f.project_tuple(t)?);
        }
        Ok(Relation { schema: f.target.clone(), tuples })
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{:?}, {:?}⟩", self.schema, self.tuples)
    }
}

/// A witness for `target ⊆ source`: `target[i] = source[map[i]]` for every `i`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjectionMap {
    pub target: Schema,
    pub source: Schema,
    pub map: Vec<usize>,
}

impl ProjectionMap {
    pub fn identity(schema: &Schema) -> ProjectionMap {
        ProjectionMap {
            target: schema.clone(),
            source: schema.clone(),
            map: (0..schema.len()).collect(),
        }
    }

    /// Pairs `(i, map[i])`, matching the written form of a projection map.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.map.iter().copied().enumerate().collect()
    }

    pub fn is_valid(&self) -> bool {
        self.map.len() == self.target.len()
            && self
                .map
                .iter()
                .enumerate()
                .all(|(i, &j)| j < self.source.len() && self.target[i] == self.source[j])
    }

    pub fn project_tuple(&self, t: &Tuple) -> Result<Tuple> {
        check_len(&self.source, t)?;
        Ok(Tuple(self.map.iter().map(|&j| t[j]).collect()))
    }
}

impl fmt::Debug for ProjectionMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

/// Every projection map witnessing `y ⊆ x`; empty when the inclusion fails.
pub fn projection_maps(y: &Schema, x: &Schema) -> Vec<ProjectionMap> {
    let choices: Vec<Vec<usize>> = y.iter().map(|v| x.indices(v)).collect();
    if choices.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cursor = alloc::vec![0usize; choices.len()];
    loop {
        out.push(ProjectionMap {
            target: y.clone(),
            source: x.clone(),
            map: cursor.iter().zip(&choices).map(|(&c, ch)| ch[c]).collect(),
        });
        // odometer, last position fastest
        let mut pos = choices.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            cursor[pos] += 1;
            if cursor[pos] < choices[pos].len() {
                break;
            }
            cursor[pos] = 0;
        }
    }
}

/// Same coherent tuples once `a` is reordered onto `b`'s schema.
pub fn constraint_equiv(a: &Relation, b: &Relation) -> bool {
    if !a.schema.equivalent(&b.schema) {
        return false;
    }
    let Some(f) = projection_maps(&b.schema, &a.schema).into_iter().next() else {
        return false;
    };
    let Ok(lhs) = a.coherent_part().project(&f) else {
        return false;
    };
    lhs.tuples == b.coherent_part().tuples
}

/// Number of tuples in `T_X^σ`, saturating.
pub fn product_size(schema: &Schema, sig: &Signature) -> Result<u128> {
    let mut n: u128 = 1;
    for v in schema.iter() {
        n = n.saturating_mul(sig.get(v)?.len() as u128);
    }
    Ok(n)
}

/// The X-tuples under `σ`: the full product of column domains, incoherent
/// tuples included.
pub fn tuples_of(schema: &Schema, sig: &Signature, limit: u128) -> Result<Vec<Tuple>> {
    let required = product_size(schema, sig)?;
    if required > limit {
        return Err(Error::EnumerationLimit { limit, required });
    }
    let cols: Vec<&[i64]> =
        schema.iter().map(|v| sig.get(v).map(Domain::values)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(required as usize);
    if required == 0 {
        return Ok(out);
    }
    let mut cursor = alloc::vec![0usize; cols.len()];
    loop {
        out.push(Tuple(cursor.iter().zip(&cols).map(|(&c, col)| col[c]).collect()));
        let mut pos = cols.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            cursor[pos] += 1;
            if cursor[pos] < cols[pos].len() {
                break;
            }
            cursor[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn rel_xxy() -> Relation {
        Relation::new(
            Schema::from_names(&["x", "x", "y"]),
            [Tuple::from([1, 2, 3]), Tuple::from([1, 1, 3]), Tuple::from([2, 2, 3])],
        )
        .unwrap()
    }

    #[test]
    fn indices_of_repeated_variable() {
        let s = Schema::from_names(&["x", "y", "z", "x"]);
        assert_eq!(s.indices(&"x".into()), vec![0, 3]);
        assert!(Schema::default().indices(&"x".into()).is_empty());
        assert!(Schema::from_names(&["x", "y"]).indices(&"z".into()).is_empty());
    }

    #[test]
    fn signature_order() {
        let s = Schema::from_names(&["x", "y"]);
        let wide = Signature::new().with("x", [1, 2]).with("y", [1, 2]);
        assert!(signature_leq(&wide, &wide, &s).unwrap());
        assert!(!signature_lt(&wide, &wide, &s).unwrap());

        let narrow = wide.clone().with("x", [1]);
        assert!(signature_leq(&narrow, &wide, &s).unwrap());
        assert!(signature_lt(&narrow, &wide, &s).unwrap());

        let off = wide.clone().with("x", [3]);
        assert!(!signature_leq(&off, &wide, &s).unwrap());

        let missing = Signature::new().with("x", [1]);
        assert_eq!(
            signature_leq(&missing, &wide, &s),
            Err(Error::MissingVariable("y".into()))
        );
    }

    #[test]
    fn coherence_examples() {
        let s = Schema::from_names(&["x", "x", "y"]);
        assert!(!coherent_var(&s, &Tuple::from([1, 2, 3]), &"x".into()).unwrap());
        assert!(coherent_var(&s, &Tuple::from([1, 1, 3]), &"x".into()).unwrap());
        let xy = Schema::from_names(&["x", "y"]);
        assert!(coherent_var(&xy, &Tuple::from([1, 2]), &"z".into()).unwrap());
        assert!(matches!(
            coherent_var(&xy, &Tuple::from([1]), &"x".into()),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn selections() {
        let r = rel_xxy();
        let coh = r.select(&Selection::CoherentWith(Schema::from_names(&["x"]))).unwrap();
        assert_eq!(
            coh.tuples,
            [Tuple::from([1, 1, 3]), Tuple::from([2, 2, 3])].into_iter().collect()
        );
        let val = r.select(&Selection::ValueEq("x".into(), 1)).unwrap();
        assert_eq!(val.tuples, [Tuple::from([1, 1, 3])].into_iter().collect());
        assert!(r.select(&Selection::IndexEq(0, 9)).unwrap().is_empty());
        assert_eq!(coh.schema, r.schema);
        assert!(matches!(
            r.select(&Selection::IndexEq(3, 1)),
            Err(Error::IndexOutOfRange { index: 3, len: 3 })
        ));
    }

    #[test]
    fn projection_map_witnesses() {
        let y = Schema::from_names(&["x4", "x2", "x2", "x1", "x3"]);
        let x = Schema::from_names(&["x1", "x2", "x3", "x4"]);
        let maps = projection_maps(&y, &x);
        assert_eq!(maps.len(), 1);
        assert_eq!(maps[0].pairs(), vec![(0, 3), (1, 1), (2, 1), (3, 0), (4, 2)]);

        let back = projection_maps(&x, &y);
        assert!(back.iter().any(|m| m.pairs() == vec![(0, 3), (1, 1), (2, 4), (3, 0)]));

        let single = projection_maps(&Schema::from_names(&["x2"]), &y);
        let pairs: Vec<_> = single.iter().map(ProjectionMap::pairs).collect();
        assert_eq!(pairs, vec![vec![(0, 1)], vec![(0, 2)]]);

        let id = Schema::from_names(&["x"]);
        assert_eq!(projection_maps(&id, &id), vec![ProjectionMap::identity(&id)]);

        assert!(projection_maps(&Schema::from_names(&["w"]), &x).is_empty());
    }

    #[test]
    fn tuple_projection_independent_of_witness() {
        let y = Schema::from_names(&["x", "y"]);
        let x = Schema::from_names(&["x", "x", "w", "y", "w"]);
        let t = Tuple::from([1, 1, 2, 3, 4]);
        let maps = projection_maps(&y, &x);
        assert_eq!(maps.len(), 2);
        for f in &maps {
            assert_eq!(f.project_tuple(&t).unwrap(), Tuple::from([1, 3]));
        }
        let ident = ProjectionMap::identity(&x);
        assert_eq!(ident.project_tuple(&t).unwrap(), t);
        assert!(ident.project_tuple(&Tuple::from([1])).is_err());

        let empty = Relation::empty(x.clone());
        let projected = empty.project(&maps[0]).unwrap();
        assert!(projected.is_empty());
        assert_eq!(projected.schema, y);
    }

    #[test]
    fn equivalence_examples() {
        let a = Relation::new(Schema::from_names(&["x", "y"]), [Tuple::from([1, 2])]).unwrap();
        let b = Relation::new(Schema::from_names(&["y", "x"]), [Tuple::from([2, 1])]).unwrap();
        assert!(constraint_equiv(&a, &a));
        assert!(constraint_equiv(&a, &b));
        let c = Relation::new(Schema::from_names(&["x"]), [Tuple::from([1])]).unwrap();
        let d = Relation::new(Schema::from_names(&["y"]), [Tuple::from([1])]).unwrap();
        assert!(!constraint_equiv(&c, &d));
    }

    #[test]
    fn product_enumeration() {
        let s = Schema::from_names(&["x", "y"]);
        let sig = Signature::new().with("x", [0, 1]).with("y", [5]);
        assert_eq!(
            tuples_of(&s, &sig, DEFAULT_TUPLE_LIMIT).unwrap(),
            vec![Tuple::from([0, 5]), Tuple::from([1, 5])]
        );
        let empty = sig.clone().with("y", Domain::empty());
        assert!(tuples_of(&s, &empty, DEFAULT_TUPLE_LIMIT).unwrap().is_empty());

        let xx = Schema::from_names(&["x", "x"]);
        let sig = Signature::new().with("x", [1, 2]);
        let all = tuples_of(&xx, &sig, DEFAULT_TUPLE_LIMIT).unwrap();
        assert_eq!(all.len(), 4);
        assert!(all.contains(&Tuple::from([1, 2])));

        assert_eq!(
            tuples_of(&xx, &sig, 3),
            Err(Error::EnumerationLimit { limit: 3, required: 4 })
        );
    }
}
