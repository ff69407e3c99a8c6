//! Depth-first binary branching over the engine.
//!
//! Variables are branched in declaration order and values in ascending
//! order: the left branch assigns `x = v`, the right branch removes `v`.
//! Every branch counts as one node.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::engine::{Engine, OccMode};
use crate::error::{Error, Result};
use crate::model::VarId;
use crate::semantics::Instance;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// `None` for no limit.
    pub node_limit: Option<u64>,
    pub find_all: bool,
    pub occ_mode: OccMode,
    /// Re-check each solution against the constraint definitions.
    pub leaf_check: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { node_limit: None, find_all: false, occ_mode: OccMode::Watched, leaf_check: true }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub solutions: u64,
    /// Invocations keyed by propagator id.
    pub prop_calls: BTreeMap<String, u64>,
    pub limit_hit: bool,
    /// Dynamic trigger journal length once the search has returned to the root.
    pub journal_at_root: usize,
}

impl SearchStats {
    /// Total invocations of propagators whose id contains `pat`.
    pub fn calls_matching(&self, pat: &str) -> u64 {
        self.prop_calls.iter().filter(|(k, _)| k.contains(pat)).map(|(_, &n)| n).sum()
    }
}

struct Frame {
    var: usize,
    val: i64,
    right: bool,
}

enum Step {
    Continue,
    Stop,
}

struct Search<'a, F> {
    inst: &'a Instance,
    cfg: &'a SearchConfig,
    engine: Engine,
    stack: Vec<Frame>,
    /// Variable indices of each constraint's scope, for the leaf check.
    scopes: Vec<Vec<usize>>,
    row: Vec<i64>,
    stats: SearchStats,
    on_solution: F,
}

impl<F: FnMut(&[i64])> Search<'_, F> {
    fn budget_left(&mut self) -> bool {
        if self.cfg.node_limit.is_some_and(|l| self.stats.nodes >= l) {
            self.stats.limit_hit = true;
            return false;
        }
        true
    }

    /// Pops finished frames and opens the next right branch.
    fn backtrack(&mut self) -> Step {
        while let Some(f) = self.stack.pop() {
            self.engine.backtrack(self.stack.len() as u32);
            if f.right {
                continue;
            }
            if !self.budget_left() {
                return Step::Stop;
            }
            self.stats.nodes += 1;
            self.stack.push(Frame { right: true, ..f });
            self.engine.push_level();
            if self.engine.remove_value(f.var, f.val) && self.engine.propagate() {
                return Step::Continue;
            }
        }
        Step::Stop
    }

    fn satisfied(&mut self, vals: &[i64]) -> bool {
        self.inst.constraints.iter().zip(&self.scopes).all(|(c, scope)| {
            self.row.clear();
            self.row.extend(scope.iter().map(|&i| vals[i]));
            c.satisfied_by(&self.row)
        })
    }

    fn leaf(&mut self) -> Result<Step> {
        let vals: Vec<i64> = (0..self.engine.num_vars())
            .map(|v| self.engine.store().min(v).expect("fixed"))
            .collect();
        if self.cfg.leaf_check && !self.satisfied(&vals) {
            return Err(Error::InvalidConstraint(alloc::format!(
                "propagation accepted a non-solution {vals:?}"
            )));
        }
        self.stats.solutions += 1;
        (self.on_solution)(&vals);
        Ok(if self.cfg.find_all { self.backtrack() } else { Step::Stop })
    }

    fn run(&mut self) -> Result<()> {
        if !self.engine.propagate() {
            return Ok(());
        }
        loop {
            let store = self.engine.store();
            let next = (0..store.len()).find(|&v| store.size(v) > 1).map(|v| (v, store.min(v).expect("nonempty")));
            let step = match next {
                None => self.leaf()?,
                Some((var, val)) => {
                    if !self.budget_left() {
                        break;
                    }
                    self.stats.nodes += 1;
                    self.stack.push(Frame { var, val, right: false });
                    self.engine.push_level();
                    if self.engine.assign(var, val) && self.engine.propagate() {
                        Step::Continue
                    } else {
                        self.backtrack()
                    }
                }
            };
            if let Step::Stop = step {
                break;
            }
        }
        Ok(())
    }
}

/// Searches `inst`, calling `on_solution` with each solution in variable
/// declaration order.
pub fn solve(inst: &Instance, cfg: &SearchConfig, on_solution: impl FnMut(&[i64])) -> Result<SearchStats> {
    let engine = Engine::new(inst, cfg.occ_mode)?;
    let index: BTreeMap<&VarId, usize> = inst.vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let scopes = inst.constraints.iter().map(|c| c.scope().iter().map(|v| index[v]).collect()).collect();
    let mut s = Search {
        inst,
        cfg,
        engine,
        stack: Vec::new(),
        scopes,
        row: Vec::new(),
        stats: SearchStats::default(),
        on_solution,
    };
    s.run()?;
    s.engine.backtrack(0);
    s.stats.journal_at_root = s.engine.journal_len();
    s.stats.prop_calls = s.engine.prop_names().map(String::from).zip(s.engine.prop_calls().iter().copied()).collect();
    Ok(s.stats)
}

/// All solutions, in search order.
pub fn solve_all(inst: &Instance, cfg: &SearchConfig) -> Result<(Vec<Vec<i64>>, SearchStats)> {
    let mut sols = Vec::new();
    let cfg = SearchConfig { find_all: true, ..cfg.clone() };
    let stats = solve(inst, &cfg, |s| sols.push(s.to_vec()))?;
    Ok((sols, stats))
}
