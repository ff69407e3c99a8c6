//! Oracle sweeps over small constraint families.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use anyhow::{anyhow, Result};
use gensupport::lattice::{Lattice, DEFAULT_POINT_BUDGET, DEFAULT_SEED};
use gensupport::oracle::{check_complete, check_schema_conformance, check_sound};
use gensupport::propagators::SupportPropagator;
use gensupport::support::{backtrack_stable_check, p_admissible_check, Counterexample};
use gensupport::{ConstraintSpec, Domain, Instance, PropagatorOutcome, Schema, Signature, SupportSet, VarId};

use crate::instance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Element,
    OccLeq,
    OccGeq,
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "element" => Ok(Family::Element),
            "occleq" => Ok(Family::OccLeq),
            "occgeq" => Ok(Family::OccGeq),
            _ => Err(format!("unknown family `{s}` (element, occleq, occgeq)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    Padmiss,
    Btstable,
    Sound,
    Complete,
    Schema,
}

impl Check {
    pub const ALL: [Check; 5] = [Check::Padmiss, Check::Btstable, Check::Sound, Check::Complete, Check::Schema];

    pub fn as_str(&self) -> &'static str {
        match self {
            Check::Padmiss => "padmiss",
            Check::Btstable => "btstable",
            Check::Sound => "sound",
            Check::Complete => "complete",
            Check::Schema => "schema",
        }
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Check::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown check `{s}` (padmiss, btstable, sound, complete, schema)"))
    }
}

/// One constraint of a family with the base signature its lattices live under.
#[derive(Clone, Debug)]
pub struct Case {
    pub spec: ConstraintSpec,
    pub base: Signature,
    pub props: Vec<SupportPropagator>,
}

impl Case {
    pub fn label(&self) -> String {
        match &self.spec {
            ConstraintSpec::Element { x, .. } => format!("element |X|={}", x.len()),
            ConstraintSpec::OccurrenceLeq { x, a, c } => format!("occleq X=[{}] a={a} c={c}", names(x)),
            ConstraintSpec::OccurrenceGeq { x, a, c } => format!("occgeq X=[{}] a={a} c={c}", names(x)),
            other => other.kind().to_string(),
        }
    }
}

fn names(x: &Schema) -> String {
    x.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(" ")
}

/// Vectors of length `1..=k` over `x0, x1, ...` up to renaming: each
/// position reuses an earlier variable or introduces the next one.
pub fn schemas(k: usize) -> Vec<Schema> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &frontier {
            let fresh = s.iter().max().map_or(0, |m| m + 1);
            for v in 0..=fresh {
                let mut t = s.clone();
                t.push(v);
                next.push(t);
            }
        }
        out.extend(next.iter().map(|s| Schema::new(s.iter().map(|i| VarId::new(&format!("x{i}"))).collect())));
        frontier = next;
    }
    out
}

/// Element: distinct `x0..x{k-1}` for `k ≤ max_vars`, domains `{0..max_val}`.
/// Occurrence: every vector from [`schemas`], values `{1..max_val}`,
/// `a ∈ 1..=max_val`, `c ∈ 0..=max_vars+1`.
pub fn cases(family: Family, max_vars: usize, max_val: i64) -> Vec<Case> {
    let mut out = Vec::new();
    let with_base = |spec: ConstraintSpec, dom: &Domain| {
        let base = spec.scope().distinct().into_iter().map(|v| (v, dom.clone())).collect();
        let props = SupportPropagator::for_spec(&spec);
        Case { spec, base, props }
    };
    match family {
        Family::Element => {
            let dom = Domain::range(0, max_val);
            for k in 1..=max_vars {
                let x = Schema::new((0..k).map(|i| VarId::new(&format!("x{i}"))).collect());
                out.push(with_base(ConstraintSpec::element(x, "y", "z"), &dom));
            }
        }
        Family::OccLeq | Family::OccGeq => {
            let dom = Domain::range(1, max_val);
            for x in schemas(max_vars) {
                for a in 1..=max_val {
                    for c in 0..=max_vars as i64 + 1 {
                        let spec = if family == Family::OccLeq {
                            ConstraintSpec::occurrence_leq(x.clone(), a, c)
                        } else {
                            ConstraintSpec::occurrence_geq(x.clone(), a, c)
                        };
                        out.push(with_base(spec, &dom));
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// A counterexample, rendered for humans and as a replayable instance.
    Fail(String),
    Skipped(String),
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub case: String,
    /// Property name, or `all` for checks over the whole set.
    pub property: String,
    pub check: Check,
    pub verdict: Verdict,
    /// Lattice points or runs examined.
    pub work: u64,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match &self.verdict {
            Verdict::Pass => "pass".to_string(),
            Verdict::Fail(_) => "COUNTEREXAMPLE".to_string(),
            Verdict::Skipped(why) => format!("skipped ({why})"),
        };
        write!(f, "{:<9} {:<28} {:<30} {} [{}]", self.check.as_str(), self.case, self.property, v, self.work)?;
        if let Verdict::Fail(cx) = &self.verdict {
            for line in cx.lines() {
                write!(f, "\n    {line}")?;
            }
        }
        Ok(())
    }
}

/// The constraint under `sig` as an instance file for `check-gac` or `solve`.
pub fn replay(spec: &ConstraintSpec, sig: &Signature) -> String {
    let mut inst = Instance::new();
    for (v, d) in sig.iter() {
        inst.add_var(v.as_str(), d.clone());
    }
    inst.constraints.push(spec.clone());
    instance::write(&inst)
}

fn show_sig(sig: &Signature) -> String {
    sig.iter().map(|(v, d)| format!("{v}={d:?}")).collect::<Vec<_>>().join(" ")
}

fn show_set(s: &SupportSet) -> String {
    format!("{s:?}")
}

fn pair_cx(spec: &ConstraintSpec, cx: &Counterexample) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# wide:    {}", show_sig(&cx.wide));
    let _ = writeln!(s, "# narrow:  {}", show_sig(&cx.narrow));
    let _ = writeln!(s, "# support: {}", show_set(&cx.support));
    s.push_str(&replay(spec, &cx.narrow));
    s
}

fn exhaustive(case: &Case) -> Result<Lattice, Verdict> {
    Lattice::exhaustive(&case.base, DEFAULT_POINT_BUDGET)
        .map_err(|_| Verdict::Skipped(format!("{} points exceed the exhaustive budget", Lattice::count(&case.base))))
}

pub fn run_case(case: &Case, check: Check) -> Result<Vec<Outcome>> {
    let label = case.label();
    let props: Vec<_> = case.props.iter().filter_map(|p| p.property()).collect();
    let out = |property: &str, verdict: Verdict, work: u64| Outcome {
        case: label.clone(),
        property: property.to_string(),
        check,
        verdict,
        work,
    };
    let mut res = Vec::new();
    match check {
        Check::Padmiss | Check::Btstable => {
            let l = match exhaustive(case) {
                Ok(l) => l,
                Err(v) => return Ok(vec![out("all", v, 0)]),
            };
            for p in &props {
                let u = p.universe(&case.base)?;
                let r = if check == Check::Padmiss {
                    p_admissible_check(p, &l, &u)?
                } else {
                    backtrack_stable_check(p, &l, &u)?
                };
                let v = match &r.counterexample {
                    None => Verdict::Pass,
                    Some(cx) => Verdict::Fail(pair_cx(&case.spec, cx)),
                };
                res.push(out(p.name(), v, r.tests));
            }
        }
        Check::Sound => {
            let l = Lattice::singletons(&case.base, DEFAULT_POINT_BUDGET)?;
            let r = check_sound(&props, &case.spec, &l)?;
            let v = r.counterexample.map_or(Verdict::Pass, |sig| Verdict::Fail(replay(&case.spec, &sig)));
            res.push(out("all", v, r.checked));
        }
        Check::Complete => {
            let l = Lattice::bounded(&case.base, DEFAULT_POINT_BUDGET, DEFAULT_SEED)?;
            let mut sets: Vec<(String, Vec<_>)> = props.iter().map(|p| (p.name().to_string(), vec![p.clone()])).collect();
            if props.len() > 1 {
                sets.push(("all".to_string(), props.clone()));
            }
            for (name, set) in sets {
                let r = check_complete(&set, &case.spec, &l)?;
                let v = r.counterexample.map_or(Verdict::Pass, |sig| Verdict::Fail(replay(&case.spec, &sig)));
                res.push(out(&name, v, r.checked));
            }
        }
        Check::Schema => {
            let l = match exhaustive(case) {
                Ok(l) => l,
                Err(v) => return Ok(vec![out("all", v, 0)]),
            };
            for prop in &case.props {
                let Some(p) = prop.property() else { continue };
                let r = check_schema_conformance(|s, lost| prop.propagate(s, lost), &p, &l)?;
                let v = match r.counterexample {
                    None => Verdict::Pass,
                    Some(cx) => {
                        let mut s = String::new();
                        let _ = writeln!(s, "# {}", cx.reason);
                        let _ = writeln!(s, "# lost support: {}", show_set(&cx.lost));
                        match &cx.outcome {
                            PropagatorOutcome::NoSupport => s.push_str("# result: no support\n"),
                            PropagatorOutcome::NewSupport(sig, sup) => {
                                let _ = writeln!(s, "# result: {} with {}", show_sig(sig), show_set(sup));
                            }
                        }
                        s.push_str(&replay(&case.spec, &cx.narrow));
                        Verdict::Fail(s)
                    }
                };
                res.push(out(p.name(), v, r.checked));
            }
        }
    }
    Ok(res)
}

/// Runs `checks` over every case of the family.
pub fn verify(family: Family, max_vars: usize, max_val: i64, checks: &[Check]) -> Result<Vec<Outcome>> {
    if max_vars == 0 || max_val < 1 {
        return Err(anyhow!("--max-vars and --max-val must be at least 1"));
    }
    let mut all = Vec::new();
    for case in cases(family, max_vars, max_val) {
        for &check in checks {
            all.extend(run_case(&case, check)?);
        }
    }
    Ok(all)
}
