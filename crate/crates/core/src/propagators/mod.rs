//! Support-generating propagators.
//!
//! Each kernel reads the current domains of its scope through a
//! [`ScopeView`] and writes the values to prune plus the new support into a
//! [`Scratch`]. The same kernels run inside the search engine (over the
//! trailed store) and at the signature level, where the oracle checks them
//! against their support properties.

mod diseq;
mod element;
mod occurrence;

pub use diseq::diseq;
pub use element::{element_p1, element_p2, element_p3};
pub use occurrence::{occ_geq, occ_leq};

use alloc::vec::Vec;
use core::iter::Copied;
use core::slice;

use crate::error::Result;
use crate::model::{Domain, Schema, Signature, VarId};
use crate::semantics::ConstraintSpec;
use crate::support::{lit_set, properties, Lit, SupportElement, SupportProperty, SupportSet};
use crate::triggers::PropagatorOutcome;

/// Read access to the column domains of one scope.
pub trait ScopeView {
    type Values<'a>: Iterator<Item = i64>
    where
        Self: 'a;

    fn arity(&self) -> usize;
    fn contains(&self, col: usize, val: i64) -> bool;
    fn size(&self, col: usize) -> usize;
    fn min(&self, col: usize) -> Option<i64>;
    fn max(&self, col: usize) -> Option<i64>;
    /// Ascending.
    fn values(&self, col: usize) -> Self::Values<'_>;

    fn has_other_than(&self, col: usize, a: i64) -> bool {
        match self.size(col) {
            0 => false,
            1 => !self.contains(col, a),
            _ => true,
        }
    }

    fn first_other_than(&self, col: usize, a: i64) -> Option<i64> {
        self.values(col).find(|&b| b != a)
    }

    /// Number of columns without `a`, counting no further than `stop`.
    fn count_lacking(&self, a: i64, stop: usize) -> usize {
        let mut n = 0;
        for i in 0..self.arity() {
            if !self.contains(i, a) {
                n += 1;
                if n == stop {
                    break;
                }
            }
        }
        n
    }

    /// Number of columns fixed to `a` (or empty), counting no further than `stop`.
    fn count_fixed(&self, a: i64, stop: usize) -> usize {
        let mut n = 0;
        for i in 0..self.arity() {
            if !self.has_other_than(i, a) {
                n += 1;
                if n == stop {
                    break;
                }
            }
        }
        n
    }
}

/// Kernel output buffers, reused across calls.
#[derive(Clone, Debug, Default)]
pub struct Scratch {
    /// `(col, val)` pairs to remove.
    pub removals: Vec<Lit>,
    pub support: Vec<Lit>,
    taken: Vec<bool>,
}

impl Scratch {
    pub fn clear(&mut self) {
        self.removals.clear();
        self.support.clear();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelResult {
    Supported,
    NoSupport,
}

/// A [`ScopeView`] over a [`Signature`].
pub struct SigView<'a> {
    cols: Vec<&'a Domain>,
}

impl<'a> SigView<'a> {
    pub fn new(scope: &Schema, sig: &'a Signature) -> Result<Self> {
        Ok(SigView { cols: scope.iter().map(|v| sig.get(v)).collect::<Result<_>>()? })
    }
}

impl ScopeView for SigView<'_> {
    type Values<'b>
        = Copied<slice::Iter<'b, i64>>
    where
        Self: 'b;

    fn arity(&self) -> usize {
        self.cols.len()
    }

    fn contains(&self, col: usize, val: i64) -> bool {
        self.cols[col].contains(val)
    }

    fn size(&self, col: usize) -> usize {
        self.cols[col].len()
    }

    fn min(&self, col: usize) -> Option<i64> {
        self.cols[col].min()
    }

    fn max(&self, col: usize) -> Option<i64> {
        self.cols[col].max()
    }

    fn values(&self, col: usize) -> Self::Values<'_> {
        self.cols[col].values().iter().copied()
    }
}

/// Which support property a kernel establishes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kernel {
    ElementP1,
    ElementP2,
    ElementP3,
    OccLeq { a: i64, c: i64 },
    OccGeq { a: i64, c: i64 },
    Diseq,
}

impl Kernel {
    pub fn name(&self) -> &'static str {
        match self {
            Kernel::ElementP1 => "p1",
            Kernel::ElementP2 => "p2",
            Kernel::ElementP3 => "p3",
            Kernel::OccLeq { .. } => "pl",
            Kernel::OccGeq { .. } => "pg",
            Kernel::Diseq => "diseq",
        }
    }

    /// Runs the kernel. Element kernels expect the scope `X·y·z`.
    pub fn run<V: ScopeView>(&self, view: &V, prev: &[Lit], out: &mut Scratch) -> KernelResult {
        out.clear();
        let r = match *self {
            Kernel::ElementP1 => element_p1(view, out),
            Kernel::ElementP2 => element_p2(view, out),
            Kernel::ElementP3 => element_p3(view, out),
            Kernel::OccLeq { a, c } => occ_leq(view, a, c, prev, out),
            Kernel::OccGeq { a, c } => occ_geq(view, a, c, prev, out),
            Kernel::Diseq => diseq(view, out),
        };
        if !out.support.is_sorted() {
            out.support.sort_unstable();
        }
        out.support.dedup();
        r
    }
}

/// A kernel bound to a scope, callable on signatures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportPropagator {
    pub kernel: Kernel,
    pub scope: Schema,
}

impl SupportPropagator {
    pub fn new(kernel: Kernel, scope: Schema) -> Self {
        SupportPropagator { kernel, scope }
    }

    /// The propagators a constraint is compiled to. Tables have none.
    pub fn for_spec(spec: &ConstraintSpec) -> Vec<SupportPropagator> {
        let scope = spec.scope();
        let ks: Vec<Kernel> = match *spec {
            ConstraintSpec::Element { .. } => {
                alloc::vec![Kernel::ElementP1, Kernel::ElementP2, Kernel::ElementP3]
            }
            ConstraintSpec::OccurrenceLeq { a, c, .. } => alloc::vec![Kernel::OccLeq { a, c }],
            ConstraintSpec::OccurrenceGeq { a, c, .. } => alloc::vec![Kernel::OccGeq { a, c }],
            ConstraintSpec::DiseqIdx { .. } => alloc::vec![Kernel::Diseq],
            ConstraintSpec::Table { .. } => Vec::new(),
        };
        ks.into_iter().map(|k| SupportPropagator::new(k, scope.clone())).collect()
    }

    /// The property this propagator establishes; `None` for disequality.
    pub fn property(&self) -> Option<SupportProperty> {
        let k = self.scope.len();
        let element = || {
            let x = Schema::new(self.scope[..k - 2].to_vec());
            (x, self.scope[k - 2].clone(), self.scope[k - 1].clone())
        };
        Some(match self.kernel {
            Kernel::ElementP1 => {
                let (x, y, z) = element();
                properties::element_p1(&x, y.as_str(), z.as_str())
            }
            Kernel::ElementP2 => {
                let (x, y, z) = element();
                properties::element_p2(&x, y.as_str(), z.as_str())
            }
            Kernel::ElementP3 => {
                let (x, y, z) = element();
                properties::element_p3(&x, y.as_str(), z.as_str())
            }
            Kernel::OccLeq { a, c } => properties::occ_leq(&self.scope, a, c),
            Kernel::OccGeq { a, c } => properties::occ_geq(&self.scope, a, c),
            Kernel::Diseq => return None,
        })
    }

    /// One run on `σ1` with previous support `S`: the narrowed signature and
    /// the new support, or failure.
    pub fn propagate(&self, sig: &Signature, s: &SupportSet) -> Result<PropagatorOutcome> {
        let view = SigView::new(&self.scope, sig)?;
        let prev: Vec<Lit> = s
            .iter()
            .filter_map(|e| match e {
                SupportElement::Lit(l) => Some(*l),
                SupportElement::Tuple(_) => None,
            })
            .collect();
        let mut out = Scratch::default();
        if self.kernel.run(&view, &prev, &mut out) == KernelResult::NoSupport {
            return Ok(PropagatorOutcome::NoSupport);
        }
        let mut narrowed = sig.clone();
        for r in &out.removals {
            let v: &VarId = &self.scope[r.col];
            if let Some(d) = narrowed.domain_mut(v) {
                d.remove(r.val);
            }
        }
        if !narrowed.is_nonempty() {
            return Ok(PropagatorOutcome::NoSupport);
        }
        Ok(PropagatorOutcome::NewSupport(narrowed, lit_set(out.support.iter().copied())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::is_support;

    fn el() -> Schema {
        Schema::from_names(&["x0", "y", "z"])
    }

    fn run(k: Kernel, scope: &Schema, sig: &Signature, s: &SupportSet) -> PropagatorOutcome {
        SupportPropagator::new(k, scope.clone()).propagate(sig, s).unwrap()
    }

    #[test]
    fn p1_cases() {
        let scope = Schema::from_names(&["x0", "x1", "x2", "y", "z"]);
        let sig = Signature::new()
            .with("x0", [1])
            .with("x1", [1])
            .with("x2", [1])
            .with("y", [0, 2])
            .with("z", [1]);
        let out = run(Kernel::ElementP1, &scope, &sig, &SupportSet::new());
        assert_eq!(out, PropagatorOutcome::NewSupport(sig, lit_set([Lit::new(3, 0), Lit::new(3, 2)])));

        let sig = Signature::new().with("x0", [1, 2, 3]).with("y", [0]).with("z", [2, 3, 4]);
        let PropagatorOutcome::NewSupport(s2, sup) = run(Kernel::ElementP1, &el(), &sig, &SupportSet::new()) else {
            panic!("supported");
        };
        assert_eq!(s2.domain(&"x0".into()).unwrap(), &Domain::from([2, 3]));
        assert_eq!(sup, lit_set([Lit::new(2, 2), Lit::new(2, 3)]));

        let sig = Signature::new().with("x0", [1]).with("y", [0]).with("z", [2]);
        assert_eq!(run(Kernel::ElementP1, &el(), &sig, &SupportSet::new()), PropagatorOutcome::NoSupport);
    }

    #[test]
    fn p2_cases() {
        let scope = Schema::from_names(&["x0", "x1", "y", "z"]);
        let sig = Signature::new().with("x0", [1]).with("x1", [2]).with("y", [0, 1]).with("z", [2]);
        let PropagatorOutcome::NewSupport(s2, sup) = run(Kernel::ElementP2, &scope, &sig, &SupportSet::new()) else {
            panic!("supported");
        };
        assert_eq!(s2.domain(&"y".into()).unwrap(), &Domain::from([1]));
        assert_eq!(sup, lit_set([Lit::new(1, 2), Lit::new(3, 2)]));
        let none = sig.clone().with("z", [7]);
        assert_eq!(run(Kernel::ElementP2, &scope, &none, &SupportSet::new()), PropagatorOutcome::NoSupport);
    }

    #[test]
    fn p3_cases() {
        let sig = Signature::new().with("x0", [1, 2]).with("y", [0]).with("z", [1, 9]);
        let PropagatorOutcome::NewSupport(s2, sup) = run(Kernel::ElementP3, &el(), &sig, &SupportSet::new()) else {
            panic!("supported");
        };
        assert_eq!(s2.domain(&"z".into()).unwrap(), &Domain::from([1]));
        assert_eq!(sup, lit_set([Lit::new(0, 1), Lit::new(1, 0)]));
        let none = sig.with("z", [5]);
        assert_eq!(run(Kernel::ElementP3, &el(), &none, &SupportSet::new()), PropagatorOutcome::NoSupport);
    }

    #[test]
    fn occ_leq_cases() {
        let x = Schema::from_names(&["x1", "x2", "x3"]);
        let k = Kernel::OccLeq { a: 1, c: 1 };
        let sig = Signature::new().with("x1", [1, 2]).with("x2", [1, 2]).with("x3", [1, 2]);
        let out = run(k, &x, &sig, &SupportSet::new());
        let three = lit_set([Lit::new(0, 2), Lit::new(1, 2), Lit::new(2, 2)]);
        assert_eq!(out, PropagatorOutcome::NewSupport(sig.clone(), three));

        let one = sig.clone().with("x1", [1]);
        let out = run(k, &x, &one, &SupportSet::new());
        let want = one.clone().with("x2", [2]).with("x3", [2]);
        assert_eq!(out, PropagatorOutcome::NewSupport(want, SupportSet::new()));

        let two = one.with("x2", [1]);
        assert_eq!(run(k, &x, &two, &SupportSet::new()), PropagatorOutcome::NoSupport);
    }

    #[test]
    fn occ_geq_cases() {
        let x = Schema::from_names(&["x1", "x2"]);
        let sig = Signature::new().with("x1", [1, 2]).with("x2", [1, 2]);
        let out = run(Kernel::OccGeq { a: 1, c: 1 }, &x, &sig, &SupportSet::new());
        assert_eq!(out, PropagatorOutcome::NewSupport(sig.clone(), lit_set([Lit::new(0, 1), Lit::new(1, 1)])));
        let out = run(Kernel::OccGeq { a: 1, c: 2 }, &x, &sig, &SupportSet::new());
        let want = Signature::new().with("x1", [1]).with("x2", [1]);
        assert_eq!(out, PropagatorOutcome::NewSupport(want, SupportSet::new()));
        let single = Schema::from_names(&["x1"]);
        let out = run(Kernel::OccGeq { a: 1, c: 2 }, &single, &sig, &SupportSet::new());
        assert_eq!(out, PropagatorOutcome::NoSupport);
    }

    #[test]
    fn diseq_cases() {
        let s = Schema::from_names(&["x", "y"]);
        let sig = Signature::new().with("x", [1]).with("y", [1, 2]);
        let PropagatorOutcome::NewSupport(s2, _) = run(Kernel::Diseq, &s, &sig, &SupportSet::new()) else {
            panic!("supported");
        };
        assert_eq!(s2.domain(&"y".into()).unwrap(), &Domain::from([2]));
        let both = sig.clone().with("y", [1]);
        assert_eq!(run(Kernel::Diseq, &s, &both, &SupportSet::new()), PropagatorOutcome::NoSupport);
        let free = sig.with("x", [1, 2]);
        let PropagatorOutcome::NewSupport(s2, sup) = run(Kernel::Diseq, &s, &free, &SupportSet::new()) else {
            panic!("supported");
        };
        assert_eq!(s2, free);
        assert_eq!(sup, lit_set([Lit::new(0, 1), Lit::new(1, 2)]));
    }

    #[test]
    fn supports_are_minimal() {
        let scope = Schema::from_names(&["x0", "x1", "y", "z"]);
        let sig = Signature::new().with("x0", [0, 1, 2]).with("x1", [1, 2]).with("y", [0, 1]).with("z", [1, 2, 3]);
        for k in [Kernel::ElementP1, Kernel::ElementP2, Kernel::ElementP3] {
            let p = SupportPropagator::new(k, scope.clone());
            let PropagatorOutcome::NewSupport(s2, sup) = p.propagate(&sig, &SupportSet::new()).unwrap() else {
                panic!("supported");
            };
            assert!(is_support(&p.property().unwrap(), &s2, &sup).unwrap(), "{k:?}");
        }
    }

    #[test]
    fn leq_reuses_valid_literals() {
        let x = Schema::from_names(&["a", "b", "c", "d"]);
        let k = Kernel::OccLeq { a: 1, c: 2 };
        let sig = Signature::new().with("a", [1, 2]).with("b", [1]).with("c", [1, 2]).with("d", [2, 3]);
        let prev = lit_set([Lit::new(1, 2), Lit::new(3, 3), Lit::new(0, 2)]);
        let PropagatorOutcome::NewSupport(_, sup) = run(k, &x, &sig, &prev) else {
            panic!("supported");
        };
        // column 1 is lost; the scan resumes after it and finds column 2
        assert_eq!(sup, lit_set([Lit::new(0, 2), Lit::new(2, 2), Lit::new(3, 3)]));
    }
}
