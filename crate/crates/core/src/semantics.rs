//! Extensional meaning of the constraint catalogue.
//!
//! Element positions are zero-based throughout: for `Element(X, y, z)` with
//! `|X| = k`, column `k` holds `y` and column `k + 1` holds `z`, and `y` ranges
//! over the indices `0..k`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{
    check_len, coherent, product_size, Domain, Relation, Schema, Signature, Tuple, VarId,
    DEFAULT_TUPLE_LIMIT,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstraintSpec {
    /// `z = X[y]`.
    Element { x: Schema, y: VarId, z: VarId },
    /// At most `c` columns of `X` take value `a`.
    OccurrenceLeq { x: Schema, a: i64, c: i64 },
    /// At least `c` columns of `X` take value `a`.
    OccurrenceGeq { x: Schema, a: i64, c: i64 },
    /// Explicit list of allowed rows.
    Table { x: Schema, rows: BTreeSet<Tuple> },
    /// `x1 != x2`.
    DiseqIdx { x1: VarId, x2: VarId },
}

impl ConstraintSpec {
    pub fn element(x: Schema, y: &str, z: &str) -> Self {
        ConstraintSpec::Element { x, y: VarId::new(y), z: VarId::new(z) }
    }

    pub fn occurrence_leq(x: Schema, a: i64, c: i64) -> Self {
        ConstraintSpec::OccurrenceLeq { x, a, c }
    }

    pub fn occurrence_geq(x: Schema, a: i64, c: i64) -> Self {
        ConstraintSpec::OccurrenceGeq { x, a, c }
    }

    pub fn table(x: Schema, rows: impl IntoIterator<Item = Tuple>) -> Result<Self> {
        let rows: BTreeSet<Tuple> = rows.into_iter().collect();
        for r in &rows {
            check_len(&x, r)?;
        }
        Ok(ConstraintSpec::Table { x, rows })
    }

    pub fn diseq(x1: &str, x2: &str) -> Self {
        ConstraintSpec::DiseqIdx { x1: VarId::new(x1), x2: VarId::new(x2) }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConstraintSpec::Element { .. } => "element",
            ConstraintSpec::OccurrenceLeq { .. } => "occurrenceleq",
            ConstraintSpec::OccurrenceGeq { .. } => "occurrencegeq",
            ConstraintSpec::Table { .. } => "table",
            ConstraintSpec::DiseqIdx { .. } => "diseq",
        }
    }

    /// The full scope; for element this is `X·y·z`.
    pub fn scope(&self) -> Schema {
        match self {
            ConstraintSpec::Element { x, y, z } => {
                let mut vars = x.vars().to_vec();
                vars.push(y.clone());
                vars.push(z.clone());
                Schema::new(vars)
            }
            ConstraintSpec::OccurrenceLeq { x, .. }
            | ConstraintSpec::OccurrenceGeq { x, .. }
            | ConstraintSpec::Table { x, .. } => x.clone(),
            ConstraintSpec::DiseqIdx { x1, x2 } => Schema::new(alloc::vec![x1.clone(), x2.clone()]),
        }
    }

    /// Structural requirements the propagators rely on. `denote` and
    /// `check_tuple` accept any spec.
    pub fn validate(&self) -> Result<()> {
        match self {
            ConstraintSpec::Element { x, y, z } => {
                if x.is_empty() {
                    return Err(Error::InvalidConstraint("element over an empty vector".into()));
                }
                if x.contains(y) || x.contains(z) || y == z {
                    return Err(Error::InvalidConstraint(format!(
                        "element index `{y}` and value `{z}` must be distinct and outside the vector"
                    )));
                }
                Ok(())
            }
            ConstraintSpec::DiseqIdx { x1, x2 } if x1 == x2 => Err(Error::InvalidConstraint(
                format!("disequality between `{x1}` and itself"),
            )),
            ConstraintSpec::Table { x, rows } => {
                for r in rows {
                    check_len(x, r)?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// The defining predicate on a scope tuple, ignoring coherence. A tuple
    /// read off a full assignment is coherent by construction.
    pub fn satisfied_by(&self, t: &[i64]) -> bool {
        match self {
            ConstraintSpec::Element { x, .. } => {
                let k = x.len();
                let y = t[k];
                y >= 0 && (y as u64) < k as u64 && t[k + 1] == t[y as usize]
            }
            ConstraintSpec::OccurrenceLeq { x, a, c } => {
                (t[..x.len()].iter().filter(|&&v| v == *a).count() as i64) <= *c
            }
            ConstraintSpec::OccurrenceGeq { x, a, c } => {
                (t[..x.len()].iter().filter(|&&v| v == *a).count() as i64) >= *c
            }
            ConstraintSpec::Table { rows, .. } => rows.iter().any(|r| r.0 == t),
            ConstraintSpec::DiseqIdx { .. } => t[0] != t[1],
        }
    }

    /// Point test: `τ` satisfies the predicate and is coherent with the scope.
    pub fn check_tuple(&self, t: &Tuple) -> Result<bool> {
        let scope = self.scope();
        if !coherent(&scope, t, &scope)? {
            return Ok(false);
        }
        Ok(self.satisfied_by(t))
    }

    /// `⟦C⟧σ` with the default enumeration bound.
    pub fn denote(&self, sig: &Signature) -> Result<Relation> {
        self.denote_bounded(sig, DEFAULT_TUPLE_LIMIT)
    }

    /// `⟦C⟧σ`: the coherent scope tuples under `σ` satisfying the predicate.
    pub fn denote_bounded(&self, sig: &Signature, limit: u128) -> Result<Relation> {
        let scope = self.scope();
        sig.covers(&scope)?;
        if let ConstraintSpec::Table { rows, .. } = self {
            let mut tuples = BTreeSet::new();
            for r in rows {
                if crate::model::is_x_tuple(&scope, sig, r)? && coherent(&scope, r, &scope)? {
                    tuples.insert(r.clone());
                }
            }
            return Ok(Relation { schema: scope, tuples });
        }
        // Enumerate assignments to the distinct variables; every tuple built
        // from one is coherent by construction.
        let distinct = Schema::new(scope.distinct());
        let required = product_size(&distinct, sig)?;
        if required > limit {
            return Err(Error::EnumerationLimit { limit, required });
        }
        let slot: Vec<usize> = scope
            .iter()
            .map(|v| distinct.iter().position(|w| w == v).expect("scope variable is distinct"))
            .collect();
        let doms: Vec<&Domain> = distinct.iter().map(|v| sig.get(v)).collect::<Result<_>>()?;
        let mut tuples = BTreeSet::new();
        for_each_assignment(&doms, |vals| {
            let t: Vec<i64> = slot.iter().map(|&s| vals[s]).collect();
            if self.satisfied_by(&t) {
                tuples.insert(Tuple(t));
            }
        });
        Ok(Relation { schema: scope, tuples })
    }
}

/// Calls `f` on every point of the product of `doms`, last position fastest.
pub(crate) fn for_each_assignment(doms: &[&Domain], mut f: impl FnMut(&[i64])) {
    if doms.iter().any(|d| d.is_empty()) {
        return;
    }
    let mut cursor = alloc::vec![0usize; doms.len()];
    let mut vals: Vec<i64> = doms.iter().map(|d| d.values()[0]).collect();
    loop {
        f(&vals);
        let mut pos = doms.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            cursor[pos] += 1;
            if cursor[pos] < doms[pos].len() {
                vals[pos] = doms[pos].values()[cursor[pos]];
                break;
            }
            cursor[pos] = 0;
            vals[pos] = doms[pos].values()[0];
        }
    }
}

/// A constraint problem: variables in declaration order, their initial
/// domains, and the constraint list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Instance {
    pub vars: Vec<VarId>,
    pub signature: Signature,
    pub constraints: Vec<ConstraintSpec>,
}

impl Instance {
    pub fn new() -> Self {
        Instance::default()
    }

    pub fn add_var(&mut self, name: &str, dom: Domain) -> VarId {
        let v = VarId::new(name);
        if self.signature.domain(&v).is_none() {
            self.vars.push(v.clone());
        }
        self.signature.insert(v.clone(), dom);
        v
    }

    pub fn add_constraint(&mut self, c: ConstraintSpec) -> Result<()> {
        c.validate()?;
        self.signature.covers(&c.scope())?;
        self.constraints.push(c);
        Ok(())
    }

    /// Checks a full assignment (in declaration order) against every constraint.
    pub fn check_solution(&self, vals: &[i64]) -> Result<bool> {
        let index: BTreeMap<&VarId, usize> = self.vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
        for c in &self.constraints {
            let t = c
                .scope()
                .iter()
                .map(|v| index.get(v).and_then(|&i| vals.get(i).copied()).ok_or_else(|| Error::MissingVariable(v.clone())))
                .collect::<Result<Vec<i64>>>()?;
            if !c.satisfied_by(&t) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
