//! Brute-force ground truth over bounded signature families.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;

use crate::engine::{propagate_to_fixpoint, OccMode};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::model::{Domain, Signature};
use crate::semantics::ConstraintSpec;
use crate::support::check::SatTable;
use crate::support::{has_support, SupportElement, SupportProperty, SupportSet, DEFAULT_UNIVERSE_LIMIT};
use crate::triggers::PropagatorOutcome;

/// Outcome of an oracle sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport<C> {
    pub counterexample: Option<C>,
    /// Lattice points (or propagator runs) examined.
    pub checked: u64,
    /// Completeness only: witnesses whose extension equals the original.
    pub equalities: u64,
}

impl<C> Default for OracleReport<C> {
    fn default() -> Self {
        OracleReport { counterexample: None, checked: 0, equalities: 0 }
    }
}

impl<C> OracleReport<C> {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// The GAC signature of `spec` at `σ`: every scope variable keeps exactly
/// the values that occur in some solution. Other variables are unchanged.
pub fn gac_signature(spec: &ConstraintSpec, sig: &Signature) -> Result<Signature> {
    let rel = spec.denote(sig)?;
    let mut out = sig.clone();
    for v in rel.schema.distinct() {
        let cols = rel.schema.indices(&v);
        let vals: Domain = rel.tuples.iter().map(|t| t[cols[0]]).collect();
        out.insert(v, vals);
    }
    Ok(out)
}

/// Root propagation of `spec` alone agrees with [`gac_signature`]; a failed
/// propagation must correspond to an empty extension.
pub fn fixpoint_is_gac(spec: &ConstraintSpec, sig: &Signature, mode: OccMode) -> Result<bool> {
    let gac = gac_signature(spec, sig)?;
    Ok(match propagate_to_fixpoint(core::slice::from_ref(spec), sig, mode)? {
        Some(fix) => fix == gac,
        None => !gac.is_nonempty(),
    })
}

fn supported(props: &[SupportProperty], sig: &Signature) -> Result<bool> {
    for p in props {
        if !has_support(p, sig, &p.universe(sig)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Soundness: no singleton lattice point is supported by every property
/// while its extension is empty.
pub fn check_sound(
    props: &[SupportProperty],
    spec: &ConstraintSpec,
    lattice: &Lattice,
) -> Result<OracleReport<Signature>> {
    let mut report = OracleReport::default();
    for &code in lattice.points() {
        let sig = lattice.signature(code);
        if !sig.is_singleton() {
            continue;
        }
        report.checked += 1;
        if supported(props, &sig)? && spec.denote(&sig)?.is_empty() {
            report.counterexample = Some(sig);
            break;
        }
    }
    Ok(report)
}

/// Completeness: every lattice point with solutions has some `σ' ⊑ σ`
/// losing none of them where every property is supported.
///
/// The witness is searched breadth-first downwards from `σ`, removing one
/// value at a time and never a value that occurs in a solution.
pub fn check_complete(
    props: &[SupportProperty],
    spec: &ConstraintSpec,
    lattice: &Lattice,
) -> Result<OracleReport<Signature>> {
    let mut report = OracleReport::default();
    for &code in lattice.points() {
        let sig = lattice.signature(code);
        let rel = spec.denote(&sig)?;
        if rel.is_empty() {
            continue;
        }
        report.checked += 1;
        let gac = gac_signature(spec, &sig)?;
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([sig.clone()]);
        let mut witness = None;
        while let Some(s) = queue.pop_front() {
            if supported(props, &s)? {
                witness = Some(s);
                break;
            }
            for (v, d) in s.iter() {
                let keep = gac.get(v)?;
                for a in d.iter().filter(|&a| !keep.contains(a)) {
                    let mut next = s.clone();
                    next.domain_mut(v).expect("present").remove(a);
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
        match witness {
            Some(w) => {
                if spec.denote(&w)?.tuples == rel.tuples {
                    report.equalities += 1;
                }
            }
            None => {
                report.counterexample = Some(sig);
                break;
            }
        }
    }
    Ok(report)
}

/// A propagator run that breaks the propagation schema.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformanceViolation {
    /// The signature the propagator was called on.
    pub narrow: Signature,
    /// The lost support it was handed.
    pub lost: SupportSet,
    pub outcome: PropagatorOutcome,
    pub reason: &'static str,
}

/// Propagation-schema conformance of `propagate` for `p`.
///
/// For every lattice point `σ`, every nonempty `S ∈ Support(P, σ)` and
/// every `σ1 ⊑ σ` under which `S` is no longer valid, and for the initial
/// call with `S = ∅` at every point, the result must be either a maximal
/// narrowing `σ2` with `S' ∈ Support(P, σ2)`, or `NoSupport` when no
/// narrowing of `σ1` has support. The lattice must be exhaustive.
pub fn check_schema_conformance(
    propagate: impl Fn(&Signature, &SupportSet) -> Result<PropagatorOutcome>,
    p: &SupportProperty,
    lattice: &Lattice,
) -> Result<OracleReport<ConformanceViolation>> {
    if !lattice.is_exhaustive() {
        return Err(Error::InvalidConstraint("schema conformance needs an exhaustive lattice".into()));
    }
    let universe = p.universe(&lattice.signature(lattice.top()))?;
    let mut table = SatTable::new(p, lattice, &universe, DEFAULT_UNIVERSE_LIMIT)?;
    let mut report = OracleReport::default();
    let mut done: BTreeSet<(u64, u64)> = BTreeSet::new();
    let mut empty_below: BTreeMap<u64, bool> = BTreeMap::new();
    let mut calls: Vec<(u64, u64)> = Vec::new();
    for &wide in lattice.points() {
        calls.clear();
        calls.push((wide, 0));
        let mins: Vec<u64> = table.minimal(wide)?.iter().copied().filter(|&m| m != 0).collect();
        for narrow in lattice.below(wide) {
            let valid = table.valid_mask(narrow)?;
            calls.extend(mins.iter().filter(|&&s| s & !valid != 0).map(|&s| (narrow, s)));
        }
        for &(narrow, lost) in &calls {
            if !done.insert((narrow, lost)) {
                continue;
            }
            report.checked += 1;
            let sig = lattice.signature(narrow);
            let lost_set = table.set(lost);
            let outcome = propagate(&sig, &lost_set)?;
            let reason = judge(lattice, &mut table, &universe, &mut empty_below, narrow, &outcome)?;
            if let Some(reason) = reason {
                report.counterexample = Some(ConformanceViolation { narrow: sig, lost: lost_set, outcome, reason });
                return Ok(report);
            }
        }
    }
    Ok(report)
}

fn no_support_below(
    lattice: &Lattice,
    table: &mut SatTable<'_>,
    memo: &mut BTreeMap<u64, bool>,
    code: u64,
) -> Result<bool> {
    if let Some(&b) = memo.get(&code) {
        return Ok(b);
    }
    let mut none = true;
    for c in lattice.below(code) {
        if table.has_support(c)? {
            none = false;
            break;
        }
    }
    memo.insert(code, none);
    Ok(none)
}

fn judge(
    lattice: &Lattice,
    table: &mut SatTable<'_>,
    universe: &[SupportElement],
    memo: &mut BTreeMap<u64, bool>,
    narrow: u64,
    outcome: &PropagatorOutcome,
) -> Result<Option<&'static str>> {
    let (sig2, s2) = match outcome {
        PropagatorOutcome::NoSupport => {
            return Ok((!no_support_below(lattice, table, memo, narrow)?).then_some("gave up while a narrowing has support"));
        }
        PropagatorOutcome::NewSupport(sig2, s2) => (sig2, s2),
    };
    let Some(code2) = lattice.encode(sig2) else {
        return Ok(Some("new signature leaves the lattice"));
    };
    if !lattice.leq(code2, narrow) {
        return Ok(Some("new signature is not a narrowing"));
    }
    if !lattice.is_nonempty(code2) {
        return Ok(Some("new signature has an empty domain"));
    }
    let mut mask = 0u64;
    for e in s2 {
        match universe.iter().position(|u| u == e) {
            Some(b) => mask |= 1 << b,
            None => return Ok(Some("support element outside the universe")),
        }
    }
    if mask & !table.valid_mask(code2)? != 0 {
        return Ok(Some("new support is not valid"));
    }
    if !table.minimal(code2)?.contains(&mask) {
        return Ok(Some("new support is not a minimal support"));
    }
    for c in lattice.between(code2, narrow) {
        if c != code2 && table.has_support(c)? {
            return Ok(Some("new signature is not maximal"));
        }
    }
    Ok(None)
}
