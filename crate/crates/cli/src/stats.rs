use std::collections::BTreeMap;
use std::time::Instant;

use gensupport::search::{self, SearchConfig};
use gensupport::Instance;
use serde::{Deserialize, Serialize};

/// Statistics of one search, serialised with keys in this order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub nodes: u64,
    pub solutions: u64,
    pub prop_calls: BTreeMap<String, u64>,
    pub wall_ms: f64,
    pub limit_hit: bool,
}

impl RunStats {
    /// Invocations of propagators whose id contains `pat`.
    pub fn calls_matching(&self, pat: &str) -> u64 {
        self.prop_calls.iter().filter(|(k, _)| k.contains(pat)).map(|(_, &n)| n).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialise")
    }

    /// JSON text with `wall_ms` dropped, for comparing runs.
    pub fn to_json_without_wall(&self) -> String {
        let mut v = serde_json::to_value(self).expect("stats serialise");
        v.as_object_mut().expect("object").remove("wall_ms");
        serde_json::to_string_pretty(&v).expect("stats serialise")
    }
}

/// Runs the search and times it.
pub fn run(inst: &Instance, cfg: &SearchConfig, on_solution: impl FnMut(&[i64])) -> gensupport::Result<RunStats> {
    let start = Instant::now();
    let s = search::solve(inst, cfg, on_solution)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    debug_assert_eq!(s.journal_at_root, 0);
    Ok(RunStats {
        nodes: s.nodes,
        solutions: s.solutions,
        prop_calls: s.prop_calls,
        wall_ms: (wall_ms * 1e3).round() / 1e3,
        limit_hit: s.limit_hit,
    })
}
