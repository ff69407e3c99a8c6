//! The occurrence benchmark: `n` variables over `{1, 2}`, a chain of
//! disequalities over the last `⌈n/5⌉` variables, and `copies` identical
//! `occurrenceleq(X, 1, ⌊0.9n⌋)` constraints.

use std::io;

use anyhow::{bail, Result};
use gensupport::engine::OccMode;
use gensupport::search::SearchConfig;
use gensupport::{ConstraintSpec, Domain, Instance, Schema, VarId};
use serde::Serialize;

use crate::instance;
use crate::stats::{self, RunStats};

/// First index `i` of the `X[i] ≠ X[i+1]` band.
pub fn band_start(n: usize) -> usize {
    n - n.div_ceil(5)
}

pub fn gen_benchmark(n: usize, copies: usize) -> Instance {
    let mut inst = Instance::new();
    let xs: Vec<VarId> = (0..n).map(|i| inst.add_var(&format!("x{i}"), Domain::from([1, 2]))).collect();
    for i in band_start(n)..n.saturating_sub(1) {
        inst.add_constraint(ConstraintSpec::DiseqIdx { x1: xs[i].clone(), x2: xs[i + 1].clone() })
            .expect("distinct variables");
    }
    let x = Schema::new(xs);
    for _ in 0..copies {
        inst.add_constraint(ConstraintSpec::occurrence_leq(x.clone(), 1, (9 * n / 10) as i64))
            .expect("valid occurrence");
    }
    inst
}

pub fn benchmark_text(n: usize, copies: usize) -> String {
    format!("# occurrence benchmark n={n} copies={copies}\n{}", instance::write(&gen_benchmark(n, copies)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub limit: u64,
    pub mode: &'static str,
    pub nodes: u64,
    pub solutions: u64,
    /// Invocations of the occurrence propagators only.
    pub occ_calls: u64,
    pub total_calls: u64,
    /// Median over the repeats.
    pub wall_ms: f64,
    pub limit_hit: bool,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

fn row(limit: u64, mode: OccMode, runs: &[RunStats]) -> Result<BenchRow> {
    let first = &runs[0];
    if runs.iter().any(|s| (s.nodes, s.solutions, &s.prop_calls) != (first.nodes, first.solutions, &first.prop_calls)) {
        bail!("repeated {} run at limit {limit} was not reproducible", mode.as_str());
    }
    Ok(BenchRow {
        limit,
        mode: mode.as_str(),
        nodes: first.nodes,
        solutions: first.solutions,
        occ_calls: first.calls_matching("occurrence"),
        total_calls: first.prop_calls.values().sum(),
        wall_ms: median(runs.iter().map(|s| s.wall_ms).collect()),
        limit_hit: first.limit_hit,
    })
}

/// Solves the benchmark in both occurrence modes at every limit; the two
/// search trees must agree. Repeats alternate between the modes.
pub fn bench_compare(n: usize, copies: usize, limits: &[u64], repeats: usize) -> Result<Vec<BenchRow>> {
    let inst = gen_benchmark(n, copies);
    let modes = [OccMode::Watched, OccMode::Static];
    let mut rows = Vec::new();
    for &limit in limits {
        let mut runs: [Vec<RunStats>; 2] = Default::default();
        for _ in 0..repeats.max(1) {
            for (i, &occ_mode) in modes.iter().enumerate() {
                let cfg = SearchConfig { node_limit: Some(limit), find_all: true, occ_mode, leaf_check: true };
                runs[i].push(stats::run(&inst, &cfg, |_| {})?);
            }
        }
        let w = row(limit, modes[0], &runs[0])?;
        let s = row(limit, modes[1], &runs[1])?;
        if (w.nodes, w.solutions) != (s.nodes, s.solutions) {
            bail!(
                "modes diverge at limit {limit}: watched {} nodes / {} solutions, static {} / {}",
                w.nodes,
                w.solutions,
                s.nodes,
                s.solutions
            );
        }
        rows.push(w);
        rows.push(s);
    }
    Ok(rows)
}

pub fn write_csv(rows: &[BenchRow], out: impl io::Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_matches_the_hundred_variable_case() {
        assert_eq!(band_start(100), 80);
        let inst = gen_benchmark(100, 100);
        let diseqs: Vec<_> = inst.constraints.iter().filter(|c| c.kind() == "diseq").collect();
        assert_eq!(diseqs.len(), 19);
        assert_eq!(diseqs[0], &ConstraintSpec::diseq("x80", "x81"));
        assert_eq!(diseqs[18], &ConstraintSpec::diseq("x98", "x99"));
        assert_eq!(inst.constraints.len(), 119);
        assert_eq!(inst.constraints[19], ConstraintSpec::occurrence_leq(Schema::new(inst.vars.clone()), 1, 90));
    }

    #[test]
    fn small_sizes() {
        assert_eq!(gen_benchmark(1, 1).constraints.len(), 1);
        let ten = gen_benchmark(10, 1);
        assert_eq!(ten.constraints.iter().filter(|c| c.kind() == "diseq").count(), 1);
        assert_eq!(ten.constraints[1], ConstraintSpec::occurrence_leq(Schema::new(ten.vars.clone()), 1, 9));
    }

    #[test]
    fn limit_zero_is_root_only() {
        let rows = bench_compare(10, 2, &[0], 1).unwrap();
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert_eq!((r.nodes, r.solutions, r.limit_hit), (0, 0, true));
            assert!(r.occ_calls > 0);
        }
    }

    #[test]
    fn csv_has_one_row_per_limit_and_mode() {
        let rows = bench_compare(10, 1, &[10, 10_000], 1).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "limit,mode,nodes,solutions,occ_calls,total_calls,wall_ms,limit_hit");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("10,watched,10,"));
        assert!(lines[2].starts_with("10,static,10,"));
        assert_eq!(rows[2].solutions, rows[3].solutions);
        assert!(!rows[2].limit_hit);
    }
}
