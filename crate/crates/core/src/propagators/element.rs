//! Element kernels over the scope `X·y·z`: column `k = |X|` is `y`,
//! column `k + 1` is `z`.

use super::{KernelResult, ScopeView, Scratch};
use crate::support::Lit;

fn x_col(i: i64, k: usize) -> Option<usize> {
    (i >= 0 && (i as u64) < k as u64).then_some(i as usize)
}

/// While `y` is unfixed the support is its min and max literals; once
/// `σ(y) = {i}`, `X[i]` is narrowed to `σ(z)` and each surviving value is
/// supported by its `z` literal.
pub fn element_p1<V: ScopeView>(view: &V, out: &mut Scratch) -> KernelResult {
    let k = view.arity() - 2;
    let (y, z) = (k, k + 1);
    if view.values(y).all(|i| x_col(i, k).is_none()) {
        return KernelResult::Supported;
    }
    if view.size(y) > 1 {
        let (lo, hi) = (view.min(y).expect("nonempty"), view.max(y).expect("nonempty"));
        out.support.push(Lit::new(y, lo));
        out.support.push(Lit::new(y, hi));
        return KernelResult::Supported;
    }
    let Some(i) = view.min(y).and_then(|i| x_col(i, k)) else {
        return KernelResult::Supported;
    };
    for a in view.values(i) {
        if view.contains(z, a) {
            out.support.push(Lit::new(z, a));
        } else {
            out.removals.push(Lit::new(i, a));
        }
    }
    if out.support.is_empty() {
        KernelResult::NoSupport
    } else {
        KernelResult::Supported
    }
}

/// Keeps the indices `i` whose `X[i]` meets `σ(z)`, each witnessed by the
/// smallest common value.
pub fn element_p2<V: ScopeView>(view: &V, out: &mut Scratch) -> KernelResult {
    let k = view.arity() - 2;
    let (y, z) = (k, k + 1);
    let mut kept = false;
    for i in view.values(y) {
        let witness = x_col(i, k).and_then(|c| view.values(c).find(|&a| view.contains(z, a)).map(|a| (c, a)));
        match witness {
            Some((c, a)) => {
                kept = true;
                out.support.push(Lit::new(c, a));
                out.support.push(Lit::new(z, a));
            }
            None => out.removals.push(Lit::new(y, i)),
        }
    }
    if kept {
        KernelResult::Supported
    } else {
        KernelResult::NoSupport
    }
}

/// Keeps the values of `z` found in some `X[i]` with `i ∈ σ(y)`, each
/// witnessed by the smallest such index.
pub fn element_p3<V: ScopeView>(view: &V, out: &mut Scratch) -> KernelResult {
    let k = view.arity() - 2;
    let (y, z) = (k, k + 1);
    let mut kept = false;
    for a in view.values(z) {
        match view.values(y).find(|&i| x_col(i, k).is_some_and(|c| view.contains(c, a))) {
            Some(i) => {
                kept = true;
                out.support.push(Lit::new(i as usize, a));
                out.support.push(Lit::new(y, i));
            }
            None => out.removals.push(Lit::new(z, a)),
        }
    }
    if kept {
        KernelResult::Supported
    } else {
        KernelResult::NoSupport
    }
}
