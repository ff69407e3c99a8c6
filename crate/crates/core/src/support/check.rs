//! Exhaustive admissibility checkers over a bounded lattice.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{set_of_mask, SupportElement, SupportProperty, SupportSet};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::model::Signature;

/// A witness `(σ, σ', S)` with `σ' ⊑ σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub wide: Signature,
    pub narrow: Signature,
    pub support: SupportSet,
}

/// Outcome of a checker plus how much of the space it scanned.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub counterexample: Option<Counterexample>,
    /// Lattice points whose satisfying sets were tabulated.
    pub points: u64,
    /// `(σ, σ')` pairs visited.
    pub pairs: u64,
    /// Individual `(σ, σ', S)` implications tested.
    pub tests: u64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Memoized `P_σ(S)` over the subsets of a fixed universe, keyed by lattice point.
pub(crate) struct SatTable<'a> {
    prop: &'a SupportProperty,
    lattice: &'a Lattice,
    universe: &'a [SupportElement],
    valid: BTreeMap<u64, u64>,
    sat: BTreeMap<u64, Vec<u64>>,
    minimal: BTreeMap<u64, Vec<u64>>,
    pub(crate) tabulated: u64,
}

impl<'a> SatTable<'a> {
    pub(crate) fn new(
        prop: &'a SupportProperty,
        lattice: &'a Lattice,
        universe: &'a [SupportElement],
        limit: usize,
    ) -> Result<Self> {
        if universe.len() > limit {
            return Err(Error::EnumerationLimit { limit: limit as u128, required: universe.len() as u128 });
        }
        if let Some(v) = prop.scope().iter().find(|v| !lattice.vars().contains(v)) {
            return Err(Error::MissingVariable(v.clone()));
        }
        Ok(SatTable {
            prop,
            lattice,
            universe,
            valid: BTreeMap::new(),
            sat: BTreeMap::new(),
            minimal: BTreeMap::new(),
            tabulated: 0,
        })
    }

    /// Universe elements valid at `code`, as a mask.
    pub(crate) fn valid_mask(&mut self, code: u64) -> Result<u64> {
        if let Some(&m) = self.valid.get(&code) {
            return Ok(m);
        }
        let sig = self.lattice.signature(code);
        let mut m = 0u64;
        for (b, e) in self.universe.iter().enumerate() {
            if e.valid(self.prop.scope(), &sig)? {
                m |= 1 << b;
            }
        }
        self.valid.insert(code, m);
        Ok(m)
    }

    /// Sorted masks `S ⊆ valid(code)` with `P_code(S)`.
    pub(crate) fn sat(&mut self, code: u64) -> Result<&[u64]> {
        if !self.sat.contains_key(&code) {
            let valid = self.valid_mask(code)?;
            let sig = self.lattice.signature(code);
            let mut out = Vec::new();
            let mut sub = 0u64;
            loop {
                if self.prop.eval_unchecked(&sig, &set_of_mask(self.universe, sub)) {
                    out.push(sub);
                }
                if sub == valid {
                    break;
                }
                sub = sub.wrapping_sub(valid) & valid;
            }
            self.tabulated += 1;
            self.sat.insert(code, out);
        }
        Ok(&self.sat[&code])
    }

    pub(crate) fn holds(&mut self, code: u64, mask: u64) -> Result<bool> {
        Ok(self.sat(code)?.binary_search(&mask).is_ok())
    }

    pub(crate) fn has_support(&mut self, code: u64) -> Result<bool> {
        Ok(!self.sat(code)?.is_empty())
    }

    /// Masks of `Support(P, code)` within the universe.
    pub(crate) fn minimal(&mut self, code: u64) -> Result<&[u64]> {
        if !self.minimal.contains_key(&code) {
            let sat = self.sat(code)?.to_vec();
            let mins = sat
                .iter()
                .copied()
                .filter(|&m| {
                    let mut sub = (m.wrapping_sub(1)) & m;
                    // proper submasks of m, descending
                    loop {
                        if sub != m && sat.binary_search(&sub).is_ok() {
                            return false;
                        }
                        if sub == 0 {
                            return true;
                        }
                        sub = (sub - 1) & m;
                    }
                })
                .collect();
            self.minimal.insert(code, mins);
        }
        Ok(&self.minimal[&code])
    }

    pub(crate) fn set(&self, mask: u64) -> SupportSet {
        set_of_mask(self.universe, mask)
    }
}

/// Searches for `(σ, σ' ⊑ σ, S)` with `S` valid under `σ`, `P_σ(S)`, `S`
/// valid under `σ'` and `¬P_σ'(S)`. `σ` ranges over the lattice points and
/// `σ'` over every nonempty sub-signature of `σ`.
pub fn p_admissible_check(
    p: &SupportProperty,
    lattice: &Lattice,
    universe: &[SupportElement],
) -> Result<CheckReport> {
    let mut table = SatTable::new(p, lattice, universe, super::DEFAULT_UNIVERSE_LIMIT)?;
    let mut report = CheckReport::default();
    for &wide in lattice.points() {
        let sat_wide = table.sat(wide)?.to_vec();
        for narrow in lattice.below(wide) {
            report.pairs += 1;
            let valid = table.valid_mask(narrow)?;
            for &s in &sat_wide {
                if s & !valid != 0 {
                    continue;
                }
                report.tests += 1;
                if !table.holds(narrow, s)? {
                    report.counterexample = Some(Counterexample {
                        wide: lattice.signature(wide),
                        narrow: lattice.signature(narrow),
                        support: table.set(s),
                    });
                    report.points = table.tabulated;
                    return Ok(report);
                }
            }
        }
    }
    report.points = table.tabulated;
    Ok(report)
}

/// Searches for `(σ ⊒ σ', S ≠ ∅)` where `S` is a minimal support at `σ'`
/// but `¬P_σ(S)`. `σ'` ranges over the lattice points and `σ` over every
/// wider sub-signature of the base.
pub fn backtrack_stable_check(
    p: &SupportProperty,
    lattice: &Lattice,
    universe: &[SupportElement],
) -> Result<CheckReport> {
    let mut table = SatTable::new(p, lattice, universe, super::DEFAULT_UNIVERSE_LIMIT)?;
    let mut report = CheckReport::default();
    for &narrow in lattice.points() {
        let mins: Vec<u64> = table.minimal(narrow)?.iter().copied().filter(|&m| m != 0).collect();
        if mins.is_empty() {
            continue;
        }
        for wide in lattice.above(narrow) {
            report.pairs += 1;
            for &s in &mins {
                report.tests += 1;
                if !table.holds(wide, s)? {
                    report.counterexample = Some(Counterexample {
                        wide: lattice.signature(wide),
                        narrow: lattice.signature(narrow),
                        support: table.set(s),
                    });
                    report.points = table.tabulated;
                    return Ok(report);
                }
            }
        }
    }
    report.points = table.tabulated;
    Ok(report)
}
