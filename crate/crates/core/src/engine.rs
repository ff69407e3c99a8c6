//! Trailed domain store and the propagation loop.
//!
//! Domains are bitsets offset by each variable's smallest initial value.
//! Every removal is trailed; a decision level is a mark into the trail.
//! Propagators sit in a FIFO queue and are woken through the
//! [`TriggerStore`]: element propagators through dynamic literals, watched
//! occurrence propagators through watched literals, and the rest through
//! static triggers placed once at the root.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{Domain, Signature, Tuple, VarId};
use crate::propagators::{KernelResult, Kernel, ScopeView, Scratch};
use crate::semantics::{ConstraintSpec, Instance};
use crate::support::Lit;
use crate::triggers::{PlacementId, PropId, TriggerKind, TriggerStore};

/// Widest value range a single variable may span.
pub const MAX_DOMAIN_WIDTH: u64 = 1 << 22;

/// How occurrence constraints are propagated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum OccMode {
    /// Support-based, on watched literals.
    #[default]
    Watched,
    /// Counter-based, woken by every assignment in scope.
    Static,
}

impl OccMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            OccMode::Watched => "watched",
            OccMode::Static => "static",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    Dynamic,
    Watched,
    Static,
}

#[derive(Clone, Debug)]
enum Body {
    Support(Kernel),
    StaticLeq { a: i64, c: i64 },
    StaticGeq { a: i64, c: i64 },
    Diseq,
    Table(BTreeSet<Tuple>),
}

#[derive(Clone, Debug)]
struct Prop {
    name: String,
    vars: Vec<u32>,
    body: Body,
    policy: Policy,
}

#[derive(Clone, Debug)]
pub struct Store {
    meta: Vec<Meta>,
    bits: Vec<u64>,
}

#[derive(Clone, Copy, Debug)]
struct Meta {
    lo: i64,
    width: u64,
    base: usize,
    size: usize,
}

impl Store {
    pub fn new(doms: &[&Domain]) -> Result<Store> {
        let mut s = Store { meta: Vec::with_capacity(doms.len()), bits: Vec::new() };
        for d in doms {
            let (lo, width) = match (Domain::min(d), Domain::max(d)) {
                (Some(lo), Some(hi)) => (lo, (hi as i128 - lo as i128 + 1) as u64),
                _ => (0, 0),
            };
            if width > MAX_DOMAIN_WIDTH {
                return Err(Error::EnumerationLimit { limit: MAX_DOMAIN_WIDTH as u128, required: width as u128 });
            }
            s.meta.push(Meta { lo, width, base: s.bits.len(), size: d.len() });
            s.bits.extend(core::iter::repeat_n(0, width.div_ceil(64) as usize));
            let v = s.meta.len() - 1;
            for a in d.iter() {
                let (w, b) = s.slot(v, a).expect("value inside its own range");
                s.bits[w] |= 1 << b;
            }
        }
        Ok(s)
    }

    #[inline(always)]
    fn slot(&self, v: usize, a: i64) -> Option<(usize, u32)> {
        let m = &self.meta[v];
        let off = a.wrapping_sub(m.lo) as u64;
        if off >= m.width {
            return None;
        }
        Some((m.base + (off as usize >> 6), (off & 63) as u32))
    }

    fn words(&self, v: usize) -> &[u64] {
        let m = &self.meta[v];
        &self.bits[m.base..m.base + m.width.div_ceil(64) as usize]
    }

    pub fn len(&self) -> usize {
        self.meta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.meta.is_empty()
    }

    #[inline(always)]
    pub fn contains(&self, v: usize, a: i64) -> bool {
        match self.slot(v, a) {
            Some((w, b)) => self.bits.get(w).is_some_and(|x| x >> b & 1 == 1),
            None => false,
        }
    }

    #[inline(always)]
    pub fn size(&self, v: usize) -> usize {
        self.meta[v].size
    }

    pub fn min(&self, v: usize) -> Option<i64> {
        self.values(v).next()
    }

    pub fn max(&self, v: usize) -> Option<i64> {
        let words = self.words(v);
        let w = words.iter().rposition(|&x| x != 0)?;
        Some(self.meta[v].lo + (w as i64) * 64 + 63 - words[w].leading_zeros() as i64)
    }

    pub fn values(&self, v: usize) -> BitValues<'_> {
        let words = self.words(v);
        BitValues { words, w: 0, cur: words.first().copied().unwrap_or(0), lo: self.meta[v].lo }
    }

    pub fn domain(&self, v: usize) -> Domain {
        self.values(v).collect()
    }

    /// Initial value range of `v`, for trigger indexing.
    pub fn range(&self, v: usize) -> (i64, i64) {
        let m = &self.meta[v];
        (m.lo, m.lo + m.width as i64 - 1)
    }

    fn clear(&mut self, v: usize, a: i64) -> bool {
        match self.slot(v, a) {
            Some((w, b)) if self.bits[w] >> b & 1 == 1 => {
                self.bits[w] &= !(1 << b);
                self.meta[v].size -= 1;
                true
            }
            _ => false,
        }
    }

    fn restore(&mut self, v: usize, a: i64) {
        let (w, b) = self.slot(v, a).expect("trailed value is in range");
        self.bits[w] |= 1 << b;
        self.meta[v].size += 1;
    }
}

/// Ascending values of one bitset domain.
pub struct BitValues<'a> {
    words: &'a [u64],
    w: usize,
    cur: u64,
    lo: i64,
}

impl Iterator for BitValues<'_> {
    type Item = i64;

    fn next(&mut self) -> Option<i64> {
        loop {
            if self.cur != 0 {
                let b = self.cur.trailing_zeros();
                self.cur &= self.cur - 1;
                return Some(self.lo + (self.w as i64) * 64 + b as i64);
            }
            self.w += 1;
            self.cur = *self.words.get(self.w)?;
        }
    }
}

/// A [`ScopeView`] over the store, one variable per column.
pub struct StoreView<'a> {
    store: &'a Store,
    vars: &'a [u32],
}

impl ScopeView for StoreView<'_> {
    type Values<'b>
        = BitValues<'b>
    where
        Self: 'b;

    fn arity(&self) -> usize {
        self.vars.len()
    }

    #[inline(always)]
    fn contains(&self, col: usize, val: i64) -> bool {
        self.store.contains(self.vars[col] as usize, val)
    }

    #[inline(always)]
    fn size(&self, col: usize) -> usize {
        self.store.size(self.vars[col] as usize)
    }

    fn min(&self, col: usize) -> Option<i64> {
        self.store.min(self.vars[col] as usize)
    }

    fn max(&self, col: usize) -> Option<i64> {
        self.store.max(self.vars[col] as usize)
    }

    fn values(&self, col: usize) -> BitValues<'_> {
        self.store.values(self.vars[col] as usize)
    }

    fn count_lacking(&self, a: i64, stop: usize) -> usize {
        let mut n = 0;
        for &v in self.vars {
            if !self.store.contains(v as usize, a) {
                n += 1;
                if n == stop {
                    break;
                }
            }
        }
        n
    }
}

#[derive(Clone, Debug)]
pub struct Engine {
    names: Vec<VarId>,
    store: Store,
    triggers: TriggerStore,
    props: Vec<Prop>,
    calls: Vec<u64>,
    started: Vec<bool>,
    queue: VecDeque<PropId>,
    queued: Vec<bool>,
    vtrail: Vec<(u32, i64)>,
    marks: Vec<usize>,
    scratch: Scratch,
    prev: Vec<Lit>,
    held: Vec<PlacementId>,
    root_empty: bool,
}

impl Engine {
    pub fn new(inst: &Instance, mode: OccMode) -> Result<Engine> {
        let index: BTreeMap<&VarId, u32> = inst.vars.iter().enumerate().map(|(i, v)| (v, i as u32)).collect();
        let doms: Vec<&Domain> = inst.vars.iter().map(|v| inst.signature.get(v)).collect::<Result<_>>()?;
        let store = Store::new(&doms)?;
        let mut props = Vec::new();
        for (ci, spec) in inst.constraints.iter().enumerate() {
            spec.validate()?;
            let vars: Vec<u32> = spec
                .scope()
                .iter()
                .map(|v| index.get(v).copied().ok_or_else(|| Error::MissingVariable(v.clone())))
                .collect::<Result<_>>()?;
            let mut push = |tag: &str, body: Body, policy: Policy| {
                props.push(Prop { name: format!("c{ci}.{}.{tag}", spec.kind()), vars: vars.clone(), body, policy });
            };
            match *spec {
                ConstraintSpec::Element { .. } => {
                    for k in [Kernel::ElementP1, Kernel::ElementP2, Kernel::ElementP3] {
                        push(k.name(), Body::Support(k), Policy::Dynamic);
                    }
                }
                ConstraintSpec::OccurrenceLeq { a, c, .. } => match mode {
                    OccMode::Watched => push("watched", Body::Support(Kernel::OccLeq { a, c }), Policy::Watched),
                    OccMode::Static => push("static", Body::StaticLeq { a, c }, Policy::Static),
                },
                ConstraintSpec::OccurrenceGeq { a, c, .. } => match mode {
                    OccMode::Watched => push("watched", Body::Support(Kernel::OccGeq { a, c }), Policy::Watched),
                    OccMode::Static => push("static", Body::StaticGeq { a, c }, Policy::Static),
                },
                ConstraintSpec::DiseqIdx { .. } => push("diseq", Body::Diseq, Policy::Static),
                ConstraintSpec::Table { ref rows, .. } => push("check", Body::Table(rows.clone()), Policy::Static),
            }
        }
        let ranges: Vec<(i64, i64)> = (0..store.len()).map(|v| store.range(v)).collect();
        let mut triggers = TriggerStore::new(&ranges, props.len());
        for (p, prop) in props.iter().enumerate() {
            let p = p as PropId;
            for (col, &v) in prop.vars.iter().enumerate() {
                let kind = match prop.body {
                    Body::Support(_) => continue,
                    Body::StaticGeq { a, .. } if store.contains(v as usize, a) => TriggerKind::DynamicLiteral(v, a),
                    Body::StaticGeq { .. } => continue,
                    Body::StaticLeq { .. } | Body::Diseq | Body::Table(_) => TriggerKind::StaticAssignment(v),
                };
                triggers.place(kind, p, col as u32, 0)?;
            }
        }
        let n = props.len();
        Ok(Engine {
            names: inst.vars.clone(),
            root_empty: (0..store.len()).any(|v| store.size(v) == 0),
            store,
            triggers,
            props,
            calls: alloc::vec![0; n],
            started: alloc::vec![false; n],
            queue: (0..n as PropId).collect(),
            queued: alloc::vec![true; n],
            vtrail: Vec::new(),
            marks: Vec::new(),
            scratch: Scratch::default(),
            prev: Vec::new(),
            held: Vec::new(),
        })
    }

    pub fn num_vars(&self) -> usize {
        self.store.len()
    }

    pub fn var_names(&self) -> &[VarId] {
        &self.names
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn triggers(&self) -> &TriggerStore {
        &self.triggers
    }

    pub fn domain(&self, v: usize) -> Domain {
        self.store.domain(v)
    }

    pub fn signature(&self) -> Signature {
        self.names.iter().enumerate().map(|(i, v)| (v.clone(), self.store.domain(i))).collect()
    }

    pub fn level(&self) -> u32 {
        self.marks.len() as u32
    }

    pub fn prop_names(&self) -> impl Iterator<Item = &str> {
        self.props.iter().map(|p| p.name.as_str())
    }

    pub fn prop_policy(&self, p: usize) -> Policy {
        self.props[p].policy
    }

    /// Invocation count per propagator, in creation order.
    pub fn prop_calls(&self) -> &[u64] {
        &self.calls
    }

    pub fn push_level(&mut self) {
        self.marks.push(self.vtrail.len());
    }

    /// Restores domains, counters and dynamic placements to `level`.
    pub fn backtrack(&mut self, level: u32) {
        while self.marks.len() > level as usize {
            let mark = self.marks.pop().expect("level above root");
            while self.vtrail.len() > mark {
                let (v, a) = self.vtrail.pop().expect("trail entry");
                self.store.restore(v as usize, a);
            }
        }
        self.triggers.backtrack(level);
        self.clear_queue();
    }

    fn clear_queue(&mut self) {
        for p in self.queue.drain(..) {
            self.queued[p as usize] = false;
        }
    }

    /// Removes `a` from `v` and wakes whoever watches it; `false` on wipe-out.
    pub fn remove_value(&mut self, v: usize, a: i64) -> bool {
        self.remove(v as u32, a, None)
    }

    /// Reduces `v` to `{a}`; `false` on wipe-out.
    pub fn assign(&mut self, v: usize, a: i64) -> bool {
        let others: Vec<i64> = self.store.values(v).filter(|&b| b != a).collect();
        if !self.store.contains(v, a) {
            for b in others {
                self.remove(v as u32, b, None);
            }
            return false;
        }
        others.into_iter().all(|b| self.remove(v as u32, b, None))
    }

    fn remove(&mut self, var: u32, val: i64, cause: Option<PropId>) -> bool {
        let v = var as usize;
        if !self.store.clear(v, val) {
            return true;
        }
        self.vtrail.push((var, val));
        let size = self.store.size(v);
        if size == 0 {
            return false;
        }
        let Engine { triggers, props, queued, queue, .. } = self;
        triggers.for_each_wake(var, val, size == 1, |p, _| {
            if Some(p) == cause && props[p as usize].policy != Policy::Static {
                return;
            }
            if !queued[p as usize] {
                queued[p as usize] = true;
                queue.push_back(p);
            }
        });
        true
    }

    /// Runs queued propagators to a fixpoint; `false` on failure, in which
    /// case the queue is emptied and the caller must backtrack.
    pub fn propagate(&mut self) -> bool {
        if self.root_empty {
            self.clear_queue();
            return false;
        }
        while let Some(p) = self.queue.pop_front() {
            self.queued[p as usize] = false;
            let ok = self.run(p);
            self.started[p as usize] = true;
            if !ok {
                self.clear_queue();
                return false;
            }
        }
        true
    }

    fn run(&mut self, p: PropId) -> bool {
        let pi = p as usize;
        self.calls[pi] += 1;
        match self.props[pi].body {
            Body::Support(k) => {
                self.triggers.literals_of(p, &mut self.prev);
                debug_assert!(!self.started[pi] || !self.prev.is_empty(), "woken with an empty support");
                let view = StoreView { store: &self.store, vars: &self.props[pi].vars };
                if k.run(&view, &self.prev, &mut self.scratch) == KernelResult::NoSupport {
                    return false;
                }
                if !self.apply_removals(p) {
                    return false;
                }
                self.update_placements(p);
                true
            }
            Body::StaticLeq { a, c } => {
                self.scratch.clear();
                let view = StoreView { store: &self.store, vars: &self.props[pi].vars };
                let fixed = (0..view.arity()).filter(|&i| !view.has_other_than(i, a)).count() as i64;
                if fixed > c {
                    return false;
                }
                if fixed == c {
                    for i in 0..view.arity() {
                        if view.size(i) > 1 && view.contains(i, a) {
                            self.scratch.removals.push(Lit::new(i, a));
                        }
                    }
                }
                self.apply_removals(p)
            }
            Body::StaticGeq { a, c } => {
                self.scratch.clear();
                let view = StoreView { store: &self.store, vars: &self.props[pi].vars };
                let open = (0..view.arity()).filter(|&i| view.contains(i, a)).count() as i64;
                if open < c {
                    return false;
                }
                if open == c {
                    for i in 0..view.arity() {
                        if view.contains(i, a) {
                            self.scratch.removals.extend(view.values(i).filter(|&b| b != a).map(|b| Lit::new(i, b)));
                        }
                    }
                }
                self.apply_removals(p)
            }
            Body::Diseq => {
                let view = StoreView { store: &self.store, vars: &self.props[pi].vars };
                self.scratch.clear();
                if Kernel::Diseq.run(&view, &[], &mut self.scratch) == KernelResult::NoSupport {
                    return false;
                }
                self.apply_removals(p)
            }
            Body::Table(ref rows) => {
                let vars = &self.props[pi].vars;
                if vars.iter().any(|&v| self.store.size(v as usize) != 1) {
                    return true;
                }
                let t = Tuple(vars.iter().map(|&v| self.store.min(v as usize).expect("fixed")).collect());
                rows.contains(&t)
            }
        }
    }

    fn apply_removals(&mut self, p: PropId) -> bool {
        for i in 0..self.scratch.removals.len() {
            let r = self.scratch.removals[i];
            let v = self.props[p as usize].vars[r.col];
            if !self.remove(v, r.val, Some(p)) {
                return false;
            }
        }
        true
    }

    /// Moves the prop's literal triggers onto the support in `scratch`,
    /// keeping those already in place. A watched propagator that reports
    /// an empty support keeps its old watches.
    fn update_placements(&mut self, p: PropId) {
        let policy = self.props[p as usize].policy;
        if policy == Policy::Watched && self.scratch.support.is_empty() {
            return;
        }
        let level = self.level();
        self.held.clear();
        self.held.extend_from_slice(self.triggers.placements_of(p));
        self.prev.clear();
        for &pid in &self.held {
            let Some((_, a)) = self.triggers.kind_of(pid).literal() else { continue };
            let lit = Lit::new(self.triggers.col_of(pid) as usize, a);
            if self.scratch.support.binary_search(&lit).is_ok() {
                self.prev.push(lit);
            } else {
                self.triggers.unplace(pid, level);
            }
        }
        if !self.prev.is_sorted() {
            self.prev.sort_unstable();
        }
        for &lit in &self.scratch.support {
            if self.prev.binary_search(&lit).is_ok() {
                continue;
            }
            let v = self.props[p as usize].vars[lit.col];
            let kind = match policy {
                Policy::Watched => TriggerKind::WatchedLiteral(v, lit.val),
                _ => TriggerKind::DynamicLiteral(v, lit.val),
            };
            self.triggers.place(kind, p, lit.col as u32, level).expect("support literal is in range");
        }
    }

    /// Number of undoable dynamic trigger changes.
    pub fn journal_len(&self) -> usize {
        self.triggers.journal_len()
    }
}

/// Runs every propagator of `constraints` on `σ` at the root.
/// `None` means propagation failed.
pub fn propagate_to_fixpoint(
    constraints: &[ConstraintSpec],
    sig: &Signature,
    mode: OccMode,
) -> Result<Option<Signature>> {
    let mut inst = Instance::new();
    for (v, d) in sig.iter() {
        inst.add_var(v.as_str(), d.clone());
    }
    for c in constraints {
        inst.add_constraint(c.clone())?;
    }
    let mut e = Engine::new(&inst, mode)?;
    Ok(e.propagate().then(|| e.signature()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Schema;

    fn dom(v: &[i64]) -> Domain {
        v.iter().copied().collect()
    }

    #[test]
    fn store_basics() {
        let d = dom(&[-3, 0, 64, 130]);
        let mut s = Store::new(&[&d]).unwrap();
        assert_eq!(s.values(0).collect::<Vec<_>>(), alloc::vec![-3, 0, 64, 130]);
        assert_eq!((s.min(0), s.max(0), s.size(0)), (Some(-3), Some(130), 4));
        assert!(s.clear(0, 130));
        assert!(!s.clear(0, 130));
        assert!(!s.clear(0, 999));
        assert_eq!(s.max(0), Some(64));
        s.restore(0, 130);
        assert_eq!(s.domain(0), d);
    }

    #[test]
    fn no_propagators_keeps_signature() {
        let sig = Signature::new().with("x", [1, 2]);
        assert_eq!(propagate_to_fixpoint(&[], &sig, OccMode::Watched).unwrap(), Some(sig));
    }

    #[test]
    fn element_fixpoint() {
        let sig = Signature::new().with("x0", [1, 2, 3]).with("y", [0]).with("z", [2, 3, 4]);
        let c = ConstraintSpec::element(Schema::from_names(&["x0"]), "y", "z");
        let out = propagate_to_fixpoint(&[c], &sig, OccMode::Watched).unwrap().unwrap();
        assert_eq!(out.domain(&"x0".into()).unwrap(), &dom(&[2, 3]));
        assert_eq!(out.domain(&"z".into()).unwrap(), &dom(&[2, 3]));
    }

    #[test]
    fn occurrence_failure_at_root() {
        let sig = Signature::new().with("x", [1]).with("y", [1, 2]);
        let c = ConstraintSpec::occurrence_leq(Schema::from_names(&["x", "y"]), 1, 0);
        for mode in [OccMode::Watched, OccMode::Static] {
            assert_eq!(propagate_to_fixpoint(std::slice::from_ref(&c), &sig, mode).unwrap(), None);
        }
    }

    #[test]
    fn modes_agree_on_small_instance() {
        let sig = Signature::new().with("a", [1, 2]).with("b", [1]).with("c", [1, 2]).with("d", [1, 2, 3]);
        let x = Schema::from_names(&["a", "b", "c", "d"]);
        for (c, geq) in [(1, false), (2, false), (3, true), (2, true)] {
            let spec = if geq {
                ConstraintSpec::occurrence_geq(x.clone(), 1, c)
            } else {
                ConstraintSpec::occurrence_leq(x.clone(), 1, c)
            };
            let w = propagate_to_fixpoint(std::slice::from_ref(&spec), &sig, OccMode::Watched).unwrap();
            let s = propagate_to_fixpoint(&[spec], &sig, OccMode::Static).unwrap();
            assert_eq!(w, s, "c={c} geq={geq}");
        }
    }

    #[test]
    fn levels_restore_everything() {
        let mut inst = Instance::new();
        for v in ["x0", "x1", "y", "z"] {
            inst.add_var(v, dom(&[0, 1, 2]));
        }
        inst.add_constraint(ConstraintSpec::element(Schema::from_names(&["x0", "x1"]), "y", "z")).unwrap();
        let mut e = Engine::new(&inst, OccMode::Watched).unwrap();
        assert!(e.propagate());
        let root = e.signature();
        let placed = e.triggers().snapshot();
        e.push_level();
        assert!(e.assign(2, 0));
        assert!(e.propagate());
        e.push_level();
        assert!(e.remove_value(0, 1));
        assert!(e.propagate());
        assert!(e.journal_len() > 0);
        e.backtrack(0);
        assert_eq!(e.signature(), root);
        assert_eq!(e.triggers().snapshot(), placed);
        assert_eq!(e.journal_len(), 0);
    }

    #[test]
    fn idempotent_fixpoint() {
        let sig = Signature::new().with("x0", [0, 1]).with("x1", [2, 3]).with("y", [0, 1, 5]).with("z", [1, 2]);
        let c = ConstraintSpec::element(Schema::from_names(&["x0", "x1"]), "y", "z");
        let once = propagate_to_fixpoint(std::slice::from_ref(&c), &sig, OccMode::Watched).unwrap().unwrap();
        let twice = propagate_to_fixpoint(&[c], &once, OccMode::Watched).unwrap().unwrap();
        assert_eq!(once, twice);
        assert_eq!(once.domain(&"y".into()).unwrap(), &dom(&[0, 1]));
    }
}
