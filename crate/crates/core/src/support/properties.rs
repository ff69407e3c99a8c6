//! The property catalogue: framework fixtures plus the element and
//! occurrence families.
//!
//! Element properties are over the scope `X·y·z` with `k = |X|`: literal
//! column `k` is `y`, column `k + 1` is `z`. A value `i` of `y` outside
//! `0..k` names no column and is treated as indexing an empty domain.

use alloc::format;
use alloc::vec::Vec;

use super::{col_domain, Lit, SupportElement, SupportProperty, SupportSet, UniverseKind};
use crate::model::{Domain, Schema, VarId};

fn has(s: &SupportSet, col: usize, val: i64) -> bool {
    s.contains(&SupportElement::Lit(Lit::new(col, val)))
}

fn lits(s: &SupportSet) -> impl Iterator<Item = Lit> + '_ {
    s.iter().filter_map(|e| match e {
        SupportElement::Lit(l) => Some(*l),
        SupportElement::Tuple(_) => None,
    })
}

pub fn truth(scope: Schema) -> SupportProperty {
    SupportProperty::new("True", scope, UniverseKind::Literals, true, |_, _| true)
}

pub fn falsity(scope: Schema) -> SupportProperty {
    SupportProperty::new("False", scope, UniverseKind::Literals, true, |_, _| false)
}

pub fn truth_tuples(scope: Schema) -> SupportProperty {
    SupportProperty::new("True", scope, UniverseKind::Tuples, true, |_, _| true)
}

pub fn falsity_tuples(scope: Schema) -> SupportProperty {
    SupportProperty::new("False", scope, UniverseKind::Tuples, true, |_, _| false)
}

/// `⟨i=a⟩(S) = ∃τ ∈ S. τ[i] = a`.
pub fn literal(scope: Schema, i: usize, a: i64) -> SupportProperty {
    SupportProperty::new(format!("⟨{i}={a}⟩"), scope, UniverseKind::Tuples, true, move |_, s| {
        s.iter().any(|e| matches!(e, SupportElement::Tuple(t) if t.get(i) == Some(&a)))
    })
}

/// `∃τ ∈ S. Σ τ ≥ 2 ∧ τ[0] = min σ(scope[0])`, the running example over `x+y+z ≥ 2`.
pub fn running_example(scope: Schema) -> SupportProperty {
    let sc = scope.clone();
    SupportProperty::new("sum≥2 at min(x)", scope, UniverseKind::Tuples, true, move |sig, s| {
        let Some(min) = col_domain(sig, &sc, 0).min() else {
            return false;
        };
        s.iter().any(|e| {
            matches!(e, SupportElement::Tuple(t) if t.iter().sum::<i64>() >= 2 && t.first() == Some(&min))
        })
    })
}

/// `∀b ∈ V ∖ σ(X[j]). ⟨i,b⟩ ∈ S`; not p-admissible when `i ≠ j`.
pub fn outside_values(scope: Schema, i: usize, j: usize, values: Domain) -> SupportProperty {
    let sc = scope.clone();
    SupportProperty::new(format!("∀b∉σ({j}).⟨{i},b⟩"), scope, UniverseKind::Literals, true, move |sig, s| {
        let dj = col_domain(sig, &sc, j);
        values.iter().filter(|&b| !dj.contains(b)).all(|b| has(s, i, b))
    })
}

fn element_scope(x: &Schema, y: &str, z: &str) -> Schema {
    let mut vars = x.vars().to_vec();
    vars.push(VarId::new(y));
    vars.push(VarId::new(z));
    Schema::new(vars)
}

fn x_col(i: i64, k: usize) -> Option<usize> {
    (i >= 0 && (i as u64) < k as u64).then_some(i as usize)
}

/// P1: `(∃ i ≠ j ∈ σ(y). ⟨k,i⟩,⟨k,j⟩ ∈ S) ∨ (∀i ∈ σ(y). ∀a ∈ σ(X[i]). ⟨k+1,a⟩ ∈ S)`.
pub fn element_p1(x: &Schema, y: &str, z: &str) -> SupportProperty {
    let sc = element_scope(x, y, z);
    let k = x.len();
    let inner = sc.clone();
    SupportProperty::new("element.P1", sc, UniverseKind::Literals, true, move |sig, s| {
        let dy = col_domain(sig, &inner, k);
        if dy.iter().filter(|&i| has(s, k, i)).nth(1).is_some() {
            return true;
        }
        dy.iter().all(|i| match x_col(i, k) {
            Some(c) => col_domain(sig, &inner, c).iter().all(|a| has(s, k + 1, a)),
            None => true,
        })
    })
}

/// P2: `∀i ∈ σ(y). ∃a ∈ σ(z). ⟨i,a⟩ ∈ S ∧ ⟨k+1,a⟩ ∈ S`.
pub fn element_p2(x: &Schema, y: &str, z: &str) -> SupportProperty {
    let sc = element_scope(x, y, z);
    let k = x.len();
    let inner = sc.clone();
    SupportProperty::new("element.P2", sc, UniverseKind::Literals, true, move |sig, s| {
        let dz = col_domain(sig, &inner, k + 1);
        col_domain(sig, &inner, k).iter().all(|i| match x_col(i, k) {
            Some(c) => dz.iter().any(|a| has(s, c, a) && has(s, k + 1, a)),
            None => false,
        })
    })
}

/// P3: `∀a ∈ σ(z). ∃i ∈ σ(y). ⟨i,a⟩ ∈ S ∧ ⟨k,i⟩ ∈ S`.
pub fn element_p3(x: &Schema, y: &str, z: &str) -> SupportProperty {
    let sc = element_scope(x, y, z);
    let k = x.len();
    let inner = sc.clone();
    SupportProperty::new("element.P3", sc, UniverseKind::Literals, true, move |sig, s| {
        let dy = col_domain(sig, &inner, k);
        col_domain(sig, &inner, k + 1).iter().all(|a| {
            dy.iter().any(|i| x_col(i, k).is_some_and(|c| has(s, c, a) && has(s, k, i)))
        })
    })
}

/// `P_{2,i}`: `i ∈ σ(y) ⇒ ∃a ∈ σ(z). ⟨i,a⟩ ∈ S ∧ ⟨k+1,a⟩ ∈ S`.
pub fn element_p2_at(x: &Schema, y: &str, z: &str, i: usize) -> SupportProperty {
    let sc = element_scope(x, y, z);
    let k = x.len();
    let inner = sc.clone();
    SupportProperty::new(format!("element.P2[{i}]"), sc, UniverseKind::Literals, true, move |sig, s| {
        if !col_domain(sig, &inner, k).contains(i as i64) {
            return true;
        }
        col_domain(sig, &inner, k + 1).iter().any(|a| has(s, i, a) && has(s, k + 1, a))
    })
}

fn distinct_cols(s: &SupportSet, n: usize, pick: impl Fn(Lit) -> bool) -> usize {
    let mut cols: Vec<usize> = lits(s).filter(|l| l.col < n && pick(*l)).map(|l| l.col).collect();
    cols.dedup();
    cols.len()
}

/// P_l for `occurrenceleq(X, a, c)`: `|X|−c+1` columns with a non-`a`
/// literal in `S`, or `|X|−c` columns whose domain lacks `a`.
pub fn occ_leq(x: &Schema, a: i64, c: i64) -> SupportProperty {
    let sc = x.clone();
    let n = x.len();
    let need = n as i64 - c;
    SupportProperty::new(format!("occurrenceleq.Pl(a={a},c={c})"), sc.clone(), UniverseKind::Literals, true, move |sig, s| {
        if distinct_cols(s, n, |l| l.val != a) as i64 >= (need + 1).max(0) {
            return true;
        }
        (0..n).filter(|&i| !col_domain(sig, &sc, i).contains(a)).count() as i64 >= need.max(0)
    })
}

/// P_g for `occurrencegeq(X, a, c)`: `c+1` columns with literal `⟨i,a⟩` in
/// `S`, or `c` columns whose domain is within `{a}`.
pub fn occ_geq(x: &Schema, a: i64, c: i64) -> SupportProperty {
    let sc = x.clone();
    let n = x.len();
    SupportProperty::new(format!("occurrencegeq.Pg(a={a},c={c})"), sc.clone(), UniverseKind::Literals, true, move |sig, s| {
        if distinct_cols(s, n, |l| l.val == a) as i64 >= (c + 1).max(0) {
            return true;
        }
        (0..n).filter(|&i| col_domain(sig, &sc, i).iter().all(|b| b == a)).count() as i64 >= c.max(0)
    })
}
