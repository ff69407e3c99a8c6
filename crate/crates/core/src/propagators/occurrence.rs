//! Occurrence kernels.
//!
//! Both keep a support of distinct columns and reuse the columns of the
//! previous support while they still qualify. Missing columns are found by
//! scanning from the first lost column to the end and wrapping around.

use super::{KernelResult, ScopeView, Scratch};
use crate::support::Lit;

fn scan_start<V: ScopeView>(view: &V, prev: &[Lit], ok: impl Fn(Lit) -> bool) -> usize {
    prev.iter()
        .filter(|l| l.col < view.arity() && !ok(**l))
        .map(|l| l.col)
        .min()
        .unwrap_or(0)
}

/// Picks up to `want` distinct columns accepted by `pick`, which maps a
/// column to the literal chosen for it. Previous columns come first. Returns
/// how many were found; short of `want`, that is every acceptable column.
fn choose<V: ScopeView>(
    view: &V,
    prev: &[Lit],
    want: usize,
    valid: impl Fn(Lit) -> bool,
    pick: impl Fn(usize) -> Option<i64>,
    out: &mut Scratch,
) -> usize {
    let n = view.arity();
    let mut taken = core::mem::take(&mut out.taken);
    taken.clear();
    taken.resize(n, false);
    let mut count = 0;
    for l in prev {
        if count == want {
            break;
        }
        if l.col >= n || taken[l.col] {
            continue;
        }
        let val = if valid(*l) { Some(l.val) } else { pick(l.col) };
        if let Some(b) = val {
            taken[l.col] = true;
            count += 1;
            out.support.push(Lit::new(l.col, b));
        }
    }
    if count < want {
        let start = scan_start(view, prev, &valid);
        for i in (start..n).chain(0..start) {
            if taken[i] {
                continue;
            }
            if let Some(b) = pick(i) {
                count += 1;
                out.support.push(Lit::new(i, b));
                if count == want {
                    break;
                }
            }
        }
    }
    out.taken = taken;
    count
}

/// At most `c` columns equal `a`.
///
/// Supported by `|X| − c + 1` columns holding a value other than `a`. With
/// exactly `|X| − c` such columns, `a` is removed from all of them and the
/// constraint is entailed; with fewer it fails.
pub fn occ_leq<V: ScopeView>(view: &V, a: i64, c: i64, prev: &[Lit], out: &mut Scratch) -> KernelResult {
    let n = view.arity();
    let need = n as i64 - c;
    if need <= 0 {
        return KernelResult::Supported;
    }
    let need = need as usize;
    if view.count_lacking(a, need) == need {
        return KernelResult::Supported;
    }
    let free = choose(
        view,
        prev,
        need + 1,
        |l| l.val != a && view.contains(l.col, l.val),
        |i| view.first_other_than(i, a),
        out,
    );
    if free > need {
        return KernelResult::Supported;
    }
    out.support.clear();
    if free < need {
        return KernelResult::NoSupport;
    }
    for i in 0..n {
        if view.has_other_than(i, a) && view.contains(i, a) {
            out.removals.push(Lit::new(i, a));
        }
    }
    KernelResult::Supported
}

/// At least `c` columns equal `a`.
///
/// Supported by `c + 1` columns that may still take `a`. With exactly `c`
/// of them, each is fixed to `a`; with fewer it fails.
pub fn occ_geq<V: ScopeView>(view: &V, a: i64, c: i64, prev: &[Lit], out: &mut Scratch) -> KernelResult {
    let n = view.arity();
    if c <= 0 {
        return KernelResult::Supported;
    }
    let c = c as usize;
    if view.count_fixed(a, c) == c {
        return KernelResult::Supported;
    }
    let open = choose(
        view,
        prev,
        c + 1,
        |l| l.val == a && view.contains(l.col, a),
        |i| view.contains(i, a).then_some(a),
        out,
    );
    if open > c {
        return KernelResult::Supported;
    }
    out.support.clear();
    if open < c {
        return KernelResult::NoSupport;
    }
    for i in 0..n {
        if view.contains(i, a) {
            out.removals.extend(view.values(i).filter(|&b| b != a).map(|b| Lit::new(i, b)));
        }
    }
    KernelResult::Supported
}
