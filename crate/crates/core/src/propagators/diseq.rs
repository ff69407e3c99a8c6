use super::{KernelResult, ScopeView, Scratch};
use crate::support::Lit;

/// `X[0] ≠ X[1]`: a fixed side removes its value from the other side.
pub fn diseq<V: ScopeView>(view: &V, out: &mut Scratch) -> KernelResult {
    let fixed = |c: usize| (view.size(c) == 1).then(|| view.min(c).expect("nonempty"));
    match (fixed(0), fixed(1)) {
        (Some(u), Some(v)) if u == v => return KernelResult::NoSupport,
        (Some(_), Some(_)) => {}
        (Some(u), None) => {
            if view.contains(1, u) {
                out.removals.push(Lit::new(1, u));
            }
        }
        (None, Some(v)) => {
            if view.contains(0, v) {
                out.removals.push(Lit::new(0, v));
            }
        }
        (None, None) => {
            let u = view.min(0).expect("nonempty");
            let v = view.first_other_than(1, u).expect("two values");
            out.support.push(Lit::new(0, u));
            out.support.push(Lit::new(1, v));
        }
    }
    KernelResult::Supported
}
