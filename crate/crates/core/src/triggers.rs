//! Trigger placement and dispatch.
//!
//! Literal lists and assignment lists are kept in placement order and use
//! lazy deletion: an entry is live only while its slot generation matches.
//! Dynamic placements are journalled with the decision level that made them
//! and undone on backtrack; watched and static placements are not.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{Signature, VarId};
use crate::support::{Lit, SupportSet};

pub type PropId = u32;
pub type PlacementId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TriggerKind {
    /// Fires when the variable's domain becomes a singleton.
    StaticAssignment(u32),
    /// Fires when the literal is removed; undone on backtrack.
    DynamicLiteral(u32, i64),
    /// Fires when the literal is removed; survives backtracking.
    WatchedLiteral(u32, i64),
}

impl TriggerKind {
    pub fn var(&self) -> u32 {
        match *self {
            TriggerKind::StaticAssignment(v)
            | TriggerKind::DynamicLiteral(v, _)
            | TriggerKind::WatchedLiteral(v, _) => v,
        }
    }

    pub fn literal(&self) -> Option<(u32, i64)> {
        match *self {
            TriggerKind::StaticAssignment(_) => None,
            TriggerKind::DynamicLiteral(v, a) | TriggerKind::WatchedLiteral(v, a) => Some((v, a)),
        }
    }
}

/// Result of one propagator run at the signature level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PropagatorOutcome {
    NewSupport(Signature, SupportSet),
    NoSupport,
}

#[derive(Clone, Copy, Debug)]
struct Slot {
    kind: TriggerKind,
    prop: PropId,
    col: u32,
    gen: u32,
    live: bool,
}

#[derive(Clone, Copy)]
enum ListRef {
    Lit(usize),
    Assign(usize),
}

#[derive(Clone, Copy, Debug)]
enum Undo {
    Placed(PlacementId),
    Unplaced(PlacementId),
}

#[derive(Clone, Debug)]
pub struct TriggerStore {
    lo: Vec<i64>,
    lit_base: Vec<usize>,
    width: Vec<usize>,
    lit_lists: Vec<Vec<(PlacementId, u32)>>,
    assign_lists: Vec<Vec<(PlacementId, u32)>>,
    slots: Vec<Slot>,
    free: Vec<PlacementId>,
    by_prop: Vec<Vec<PlacementId>>,
    journal: Vec<(u32, Undo)>,
}

impl TriggerStore {
    /// `ranges[v] = (lo, hi)` bounds every value that may ever be watched on `v`.
    pub fn new(ranges: &[(i64, i64)], props: usize) -> Self {
        let mut lit_base = Vec::with_capacity(ranges.len());
        let mut width = Vec::with_capacity(ranges.len());
        let mut total = 0usize;
        for &(lo, hi) in ranges {
            lit_base.push(total);
            let w = if hi >= lo { (hi - lo + 1) as usize } else { 0 };
            width.push(w);
            total += w;
        }
        TriggerStore {
            lo: ranges.iter().map(|r| r.0).collect(),
            lit_base,
            width,
            lit_lists: alloc::vec![Vec::new(); total],
            assign_lists: alloc::vec![Vec::new(); ranges.len()],
            slots: Vec::new(),
            free: Vec::new(),
            by_prop: alloc::vec![Vec::new(); props],
            journal: Vec::new(),
        }
    }

    fn lit_index(&self, var: u32, val: i64) -> Option<usize> {
        let v = var as usize;
        let off = val.checked_sub(*self.lo.get(v)?)?;
        (off >= 0 && (off as usize) < self.width[v]).then(|| self.lit_base[v] + off as usize)
    }

    fn list_of(&self, kind: TriggerKind) -> Result<ListRef> {
        match kind {
            TriggerKind::StaticAssignment(v) if (v as usize) < self.lo.len() => Ok(ListRef::Assign(v as usize)),
            TriggerKind::StaticAssignment(v) => {
                Err(Error::IndexOutOfRange { index: v as usize, len: self.lo.len() })
            }
            TriggerKind::DynamicLiteral(v, a) | TriggerKind::WatchedLiteral(v, a) => self
                .lit_index(v, a)
                .map(ListRef::Lit)
                .ok_or_else(|| Error::RemovedLiteral { var: VarId::new(&alloc::format!("#{v}")), val: a }),
        }
    }

    fn is_live(&self, (pid, gen): (PlacementId, u32)) -> bool {
        let s = &self.slots[pid as usize];
        s.live && s.gen == gen
    }

    /// Registers a trigger. `col` is the scope column the literal supports and
    /// is reported back through [`TriggerStore::support_of`].
    pub fn place(&mut self, kind: TriggerKind, prop: PropId, col: u32, level: u32) -> Result<PlacementId> {
        let which = self.list_of(kind)?;
        let pid = match self.free.pop() {
            Some(p) => p,
            None => {
                self.slots.push(Slot { kind, prop, col, gen: 0, live: false });
                (self.slots.len() - 1) as PlacementId
            }
        };
        let s = &mut self.slots[pid as usize];
        s.kind = kind;
        s.prop = prop;
        s.col = col;
        self.link(pid, which);
        if level > 0 && matches!(kind, TriggerKind::DynamicLiteral(..)) {
            self.journal.push((level, Undo::Placed(pid)));
        }
        Ok(pid)
    }

    fn link(&mut self, pid: PlacementId, which: ListRef) {
        let s = &mut self.slots[pid as usize];
        s.live = true;
        let (gen, prop) = (s.gen, s.prop);
        let slots = &self.slots;
        let list = match which {
            ListRef::Lit(i) => &mut self.lit_lists[i],
            ListRef::Assign(v) => &mut self.assign_lists[v],
        };
        list.push((pid, gen));
        if list.len() >= 16 && list.len().is_power_of_two() {
            list.retain(|&(p, g)| {
                let s = &slots[p as usize];
                s.live && s.gen == g
            });
        }
        self.by_prop[prop as usize].push(pid);
    }

    fn kill(&mut self, pid: PlacementId) -> TriggerKind {
        let s = &mut self.slots[pid as usize];
        debug_assert!(s.live);
        s.live = false;
        s.gen = s.gen.wrapping_add(1);
        let (kind, prop) = (s.kind, s.prop);
        let list = &mut self.by_prop[prop as usize];
        if let Some(pos) = list.iter().position(|&p| p == pid) {
            list.remove(pos);
        }
        kind
    }

    /// Deregisters a placement; dynamic removals above the root are
    /// journalled at `level` and keep their slot reserved for the undo.
    pub fn unplace(&mut self, pid: PlacementId, level: u32) {
        let kind = self.kill(pid);
        if level > 0 && matches!(kind, TriggerKind::DynamicLiteral(..)) {
            self.journal.push((level, Undo::Unplaced(pid)));
        } else {
            self.free.push(pid);
        }
    }

    /// Undoes every dynamic placement change made above `level`.
    pub fn backtrack(&mut self, level: u32) {
        while let Some(&(l, undo)) = self.journal.last() {
            if l <= level {
                break;
            }
            self.journal.pop();
            match undo {
                Undo::Placed(pid) => {
                    self.kill(pid);
                    self.free.push(pid);
                }
                Undo::Unplaced(pid) => {
                    let which = self.list_of(self.slots[pid as usize].kind).expect("slot was placeable");
                    self.link(pid, which);
                }
            }
        }
    }

    /// Number of journal entries; zero once search has backtracked to the root.
    pub fn journal_len(&self) -> usize {
        self.journal.len()
    }

    /// Propagators to wake, in placement order, for the removal of
    /// `(var, val)`; `assigned` adds the variable's assignment triggers.
    pub fn on_remove(&mut self, var: u32, val: i64, assigned: bool) -> Vec<PropId> {
        let mut out = Vec::new();
        self.for_each_wake(var, val, assigned, |p, _| out.push(p));
        out
    }

    pub(crate) fn for_each_wake(&mut self, var: u32, val: i64, assigned: bool, mut f: impl FnMut(PropId, u32)) {
        if let Some(i) = self.lit_index(var, val) {
            let mut list = core::mem::take(&mut self.lit_lists[i]);
            list.retain(|&e| self.is_live(e));
            for &(pid, _) in &list {
                let s = &self.slots[pid as usize];
                f(s.prop, s.col);
            }
            self.lit_lists[i] = list;
        }
        if assigned {
            let list = &self.assign_lists[var as usize];
            for &(pid, gen) in list {
                let s = &self.slots[pid as usize];
                if s.live && s.gen == gen {
                    f(s.prop, s.col);
                }
            }
        }
    }

    pub fn placements_of(&self, prop: PropId) -> &[PlacementId] {
        &self.by_prop[prop as usize]
    }

    pub fn kind_of(&self, pid: PlacementId) -> TriggerKind {
        self.slots[pid as usize].kind
    }

    pub fn col_of(&self, pid: PlacementId) -> u32 {
        self.slots[pid as usize].col
    }

    pub fn is_placed(&self, pid: PlacementId) -> bool {
        self.slots.get(pid as usize).is_some_and(|s| s.live)
    }

    /// The literal support currently recorded for `prop`, as scope columns.
    pub fn support_of(&self, prop: PropId, out: &mut Vec<Lit>) {
        self.literals_of(prop, out);
        out.sort_unstable();
        out.dedup();
    }

    /// Like [`TriggerStore::support_of`], in placement order.
    pub fn literals_of(&self, prop: PropId, out: &mut Vec<Lit>) {
        out.clear();
        for &pid in &self.by_prop[prop as usize] {
            let s = &self.slots[pid as usize];
            if let Some((_, a)) = s.kind.literal() {
                out.push(Lit::new(s.col as usize, a));
            }
        }
    }

    /// Sorted `(prop, kind)` pairs of every live placement.
    pub fn snapshot(&self) -> Vec<(PropId, u32, TriggerKind)> {
        let mut v: Vec<_> = self
            .slots
            .iter()
            .filter(|s| s.live)
            .map(|s| (s.prop, s.col, s.kind))
            .collect();
        v.sort_unstable_by_key(|&(p, c, k)| (p, c, k.var(), k.literal().map(|l| l.1), kind_rank(k)));
        v
    }
}

fn kind_rank(k: TriggerKind) -> u8 {
    match k {
        TriggerKind::StaticAssignment(_) => 0,
        TriggerKind::DynamicLiteral(..) => 1,
        TriggerKind::WatchedLiteral(..) => 2,
    }
}
