//! Bounded families of nonempty sub-signatures.
//!
//! A point is packed into a `u64`: each variable owns a contiguous run of
//! bits, one per value of its base domain, so `⊑` is a single mask test.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Domain, Signature, VarId};

/// Exhaustive enumeration is used up to this many points; beyond it the
/// family is sampled.
pub const DEFAULT_POINT_BUDGET: u128 = 50_000;
pub const DEFAULT_SEED: u64 = 0x5eed_2009;

#[derive(Clone, Debug)]
pub struct Lattice {
    vars: Vec<VarId>,
    values: Vec<Vec<i64>>,
    offsets: Vec<u32>,
    points: Vec<u64>,
    exhaustive: bool,
}

impl Lattice {
    fn layout(base: &Signature) -> Result<Lattice> {
        let mut vars = Vec::new();
        let mut values = Vec::new();
        let mut offsets = Vec::new();
        let mut bits = 0u32;
        for (v, d) in base.iter() {
            if d.is_empty() {
                return Err(Error::InvalidConstraint(alloc::format!("empty base domain for `{v}`")));
            }
            vars.push(v.clone());
            values.push(d.values().to_vec());
            offsets.push(bits);
            bits += d.len() as u32;
        }
        if bits > 64 {
            return Err(Error::EnumerationLimit { limit: 64, required: bits as u128 });
        }
        Ok(Lattice { vars, values, offsets, points: Vec::new(), exhaustive: false })
    }

    /// Number of nonempty sub-signatures of `base`.
    pub fn count(base: &Signature) -> u128 {
        base.iter()
            .map(|(_, d)| (1u128 << d.len().min(127)) - 1)
            .fold(1u128, |acc, n| acc.saturating_mul(n))
    }

    /// Every nonempty sub-signature of `base`, failing above `budget`.
    pub fn exhaustive(base: &Signature, budget: u128) -> Result<Lattice> {
        let required = Self::count(base);
        if required > budget {
            return Err(Error::EnumerationLimit { limit: budget, required });
        }
        let mut l = Self::layout(base)?;
        let top = l.top();
        l.points = l.below(top);
        l.exhaustive = true;
        Ok(l)
    }

    /// `count` distinct points drawn uniformly per variable from a seeded RNG.
    pub fn sampled(base: &Signature, count: usize, seed: u64) -> Result<Lattice> {
        let mut l = Self::layout(base)?;
        let total = Self::count(base);
        let count = (count as u128).min(total) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = BTreeSet::new();
        let mut points = Vec::with_capacity(count);
        while points.len() < count {
            let mut code = 0u64;
            for (i, vals) in l.values.iter().enumerate() {
                let m: u64 = rng.gen_range(1..(1u64 << vals.len()));
                code |= m << l.offsets[i];
            }
            if seen.insert(code) {
                points.push(code);
            }
        }
        l.points = points;
        Ok(l)
    }

    /// Exhaustive within `budget`, otherwise `budget` sampled points.
    pub fn bounded(base: &Signature, budget: u128, seed: u64) -> Result<Lattice> {
        if Self::count(base) <= budget {
            Self::exhaustive(base, budget)
        } else {
            Self::sampled(base, budget as usize, seed)
        }
    }

    /// Every singleton sub-signature of `base`, failing above `budget`.
    pub fn singletons(base: &Signature, budget: u128) -> Result<Lattice> {
        let required = base.iter().map(|(_, d)| d.len() as u128).fold(1u128, |a, n| a.saturating_mul(n));
        if required > budget {
            return Err(Error::EnumerationLimit { limit: budget, required });
        }
        let mut l = Self::layout(base)?;
        let mut points = alloc::vec![0u64];
        for (vals, &off) in l.values.iter().zip(&l.offsets) {
            points = points
                .iter()
                .flat_map(|&p| (0..vals.len()).map(move |b| p | 1u64 << (off + b as u32)))
                .collect();
        }
        points.sort_unstable();
        l.points = points;
        Ok(l)
    }

    pub fn is_exhaustive(&self) -> bool {
        self.exhaustive
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[u64] {
        &self.points
    }

    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    /// The base signature itself.
    pub fn top(&self) -> u64 {
        self.values
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, v)| acc | (low_bits(v.len()) << self.offsets[i]))
    }

    fn var_mask(&self, code: u64, i: usize) -> u64 {
        (code >> self.offsets[i]) & low_bits(self.values[i].len())
    }

    /// `a ⊑ b`.
    pub fn leq(&self, a: u64, b: u64) -> bool {
        a & !b == 0
    }

    /// `a ⊏ b`.
    pub fn lt(&self, a: u64, b: u64) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn is_nonempty(&self, code: u64) -> bool {
        (0..self.vars.len()).all(|i| self.var_mask(code, i) != 0)
    }

    pub fn signature(&self, code: u64) -> Signature {
        self.vars
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let m = self.var_mask(code, i);
                let d: Domain = self.values[i]
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| m >> b & 1 == 1)
                    .map(|(_, &a)| a)
                    .collect();
                (v.clone(), d)
            })
            .collect()
    }

    /// Encodes `σ`; `None` if it mentions a value outside the base or lacks a variable.
    pub fn encode(&self, sig: &Signature) -> Option<u64> {
        let mut code = 0u64;
        for (i, v) in self.vars.iter().enumerate() {
            for a in sig.domain(v)?.iter() {
                let b = self.values[i].iter().position(|&x| x == a)?;
                code |= 1u64 << (self.offsets[i] + b as u32);
            }
        }
        Some(code)
    }

    /// All nonempty codes `c` with `lo ⊑ c ⊑ hi`, ascending.
    pub fn between(&self, lo: u64, hi: u64) -> Vec<u64> {
        if !self.leq(lo, hi) {
            return Vec::new();
        }
        let free = hi & !lo;
        let mut out = Vec::new();
        let mut sub = 0u64;
        loop {
            let c = lo | sub;
            if self.is_nonempty(c) {
                out.push(c);
            }
            if sub == free {
                break;
            }
            sub = (sub.wrapping_sub(free)) & free;
        }
        out
    }

    /// All nonempty sub-points of `hi`.
    pub fn below(&self, hi: u64) -> Vec<u64> {
        self.between(0, hi)
    }

    /// Wider points of `lo` inside the base.
    pub fn above(&self, lo: u64) -> Vec<u64> {
        self.between(lo, self.top())
    }
}

fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Signature {
        Signature::new().with("x", [1, 2]).with("y", [0, 1, 2])
    }

    #[test]
    fn exhaustive_counts() {
        let l = Lattice::exhaustive(&base(), DEFAULT_POINT_BUDGET).unwrap();
        assert_eq!(l.len(), 3 * 7);
        assert_eq!(Lattice::count(&base()), 21);
        assert!(l.points().iter().all(|&c| l.is_nonempty(c)));
        assert!(Lattice::exhaustive(&base(), 20).is_err());
    }

    #[test]
    fn order_matches_signatures() {
        let l = Lattice::exhaustive(&base(), DEFAULT_POINT_BUDGET).unwrap();
        let schema = crate::model::Schema::from_names(&["x", "y"]);
        for &a in l.points() {
            assert_eq!(l.encode(&l.signature(a)), Some(a));
            for &b in l.points() {
                let sa = l.signature(a);
                let sb = l.signature(b);
                assert_eq!(l.leq(a, b), crate::model::signature_leq(&sa, &sb, &schema).unwrap());
                assert_eq!(l.lt(a, b), crate::model::signature_lt(&sa, &sb, &schema).unwrap());
            }
        }
    }

    #[test]
    fn intervals() {
        let l = Lattice::exhaustive(&base(), DEFAULT_POINT_BUDGET).unwrap();
        let top = l.top();
        assert_eq!(l.below(top).len(), 21);
        assert_eq!(l.above(top), alloc::vec![top]);
        let sig = Signature::new().with("x", [1]).with("y", [0]);
        let lo = l.encode(&sig).unwrap();
        assert_eq!(l.above(lo).len(), 2 * 4);
        assert_eq!(l.below(lo), alloc::vec![lo]);
    }

    #[test]
    fn singleton_points() {
        let l = Lattice::singletons(&base(), DEFAULT_POINT_BUDGET).unwrap();
        assert_eq!(l.len(), 6);
        assert!(l.points().iter().all(|&c| l.signature(c).is_singleton()));
        assert!(Lattice::singletons(&base(), 5).is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        let big = Signature::new()
            .with("a", [0, 1, 2, 3])
            .with("b", [0, 1, 2, 3])
            .with("c", [0, 1, 2, 3])
            .with("d", [0, 1, 2, 3])
            .with("e", [0, 1, 2, 3]);
        let l1 = Lattice::bounded(&big, 1000, 7).unwrap();
        let l2 = Lattice::bounded(&big, 1000, 7).unwrap();
        let l3 = Lattice::bounded(&big, 1000, 8).unwrap();
        assert!(!l1.is_exhaustive());
        assert_eq!(l1.points(), l2.points());
        assert_ne!(l1.points(), l3.points());
        assert_eq!(l1.len(), 1000);
        assert!(l1.points().iter().all(|&c| l1.is_nonempty(c)));
    }
}
