//! Line-oriented instance files.
//!
//! ```text
//! # x + y + z >= 2
//! var x 0 1
//! varset y 0 1
//! var z 0 1
//! vec X x y z
//! table X : 0 1 1 ; 1 0 1 ; 1 1 0 ; 1 1 1 ;
//! ```

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use gensupport::{ConstraintSpec, Domain, Instance, Schema, Tuple, VarId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.msg)
    }
}

impl std::error::Error for ParseError {}

struct Parser {
    inst: Instance,
    vecs: BTreeMap<String, Schema>,
}

fn int(tok: &str) -> Result<i64, String> {
    tok.parse().map_err(|_| format!("expected an integer, found `{tok}`"))
}

fn arity(toks: &[&str], n: usize, usage: &str) -> Result<(), String> {
    if toks.len() != n {
        return Err(format!("expected `{usage}`"));
    }
    Ok(())
}

impl Parser {
    fn var(&self, name: &str) -> Result<VarId, String> {
        let v = VarId::new(name);
        if self.inst.signature.domain(&v).is_none() {
            return Err(format!("undeclared variable `{name}`"));
        }
        Ok(v)
    }

    fn vec(&self, name: &str) -> Result<Schema, String> {
        self.vecs.get(name).cloned().ok_or_else(|| format!("undeclared vector `{name}`"))
    }

    fn declare(&mut self, name: &str, dom: Domain) -> Result<(), String> {
        if self.inst.signature.domain(&VarId::new(name)).is_some() {
            return Err(format!("variable `{name}` declared twice"));
        }
        self.inst.add_var(name, dom);
        Ok(())
    }

    fn line(&mut self, toks: &[&str]) -> Result<(), String> {
        let c = match toks[0] {
            "var" => {
                arity(toks, 4, "var <name> <lo> <hi>")?;
                let (lo, hi) = (int(toks[2])?, int(toks[3])?);
                if lo > hi {
                    return Err(format!("empty range {lo}..{hi}"));
                }
                return self.declare(toks[1], Domain::range(lo, hi));
            }
            "varset" => {
                if toks.len() < 2 {
                    return Err("expected `varset <name> <v1> ...`".into());
                }
                let dom = toks[2..].iter().map(|t| int(t)).collect::<Result<Domain, _>>()?;
                return self.declare(toks[1], dom);
            }
            "vec" => {
                if toks.len() < 2 {
                    return Err("expected `vec <name> <var> ...`".into());
                }
                if self.vecs.contains_key(toks[1]) {
                    return Err(format!("vector `{}` declared twice", toks[1]));
                }
                let vars = toks[2..].iter().map(|t| self.var(t)).collect::<Result<Vec<_>, _>>()?;
                self.vecs.insert(toks[1].to_string(), Schema::new(vars));
                return Ok(());
            }
            "element" => {
                arity(toks, 4, "element <vec> <var> <var>")?;
                let x = self.vec(toks[1])?;
                self.var(toks[2])?;
                self.var(toks[3])?;
                ConstraintSpec::element(x, toks[2], toks[3])
            }
            "occurrenceleq" => {
                arity(toks, 4, "occurrenceleq <vec> <a> <c>")?;
                ConstraintSpec::occurrence_leq(self.vec(toks[1])?, int(toks[2])?, int(toks[3])?)
            }
            "occurrencegeq" => {
                arity(toks, 4, "occurrencegeq <vec> <a> <c>")?;
                ConstraintSpec::occurrence_geq(self.vec(toks[1])?, int(toks[2])?, int(toks[3])?)
            }
            "diseq" => {
                arity(toks, 3, "diseq <var> <var>")?;
                self.var(toks[1])?;
                self.var(toks[2])?;
                ConstraintSpec::diseq(toks[1], toks[2])
            }
            "table" => {
                if toks.len() < 3 || toks[2] != ":" {
                    return Err("expected `table <vec> : <row> ; ...`".into());
                }
                let x = self.vec(toks[1])?;
                let mut rows = Vec::new();
                let mut row = Vec::new();
                for t in &toks[3..] {
                    if *t == ";" {
                        if row.len() != x.len() {
                            return Err(format!("row of {} values for a vector of {}", row.len(), x.len()));
                        }
                        rows.push(Tuple(std::mem::take(&mut row)));
                    } else {
                        row.push(int(t)?);
                    }
                }
                if !row.is_empty() {
                    return Err("table row not terminated by `;`".into());
                }
                ConstraintSpec::table(x, rows).map_err(|e| e.to_string())?
            }
            other => return Err(format!("unknown directive `{other}`")),
        };
        self.inst.add_constraint(c).map_err(|e| e.to_string())
    }
}

/// Splits `;` and `:` off their neighbours so `0 1;` and `X:` parse.
fn tokens(line: &str) -> Vec<&str> {
    let mut out = Vec::new();
    for word in line.split_whitespace() {
        let mut rest = word;
        while let Some(i) = rest.find([';', ':']) {
            if i > 0 {
                out.push(&rest[..i]);
            }
            out.push(&rest[i..i + 1]);
            rest = &rest[i + 1..];
        }
        if !rest.is_empty() {
            out.push(rest);
        }
    }
    out
}

pub fn parse(text: &str) -> Result<Instance, ParseError> {
    let mut p = Parser { inst: Instance::new(), vecs: BTreeMap::new() };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }
        p.line(&toks).map_err(|msg| ParseError { line: i + 1, msg })?;
    }
    Ok(p.inst)
}

fn vec_name(vecs: &mut Vec<Schema>, out: &mut String, x: &Schema) -> String {
    let name = |i: usize| if i == 0 { "X".to_string() } else { format!("X{i}") };
    if let Some(i) = vecs.iter().position(|s| s == x) {
        return name(i);
    }
    vecs.push(x.clone());
    let n = name(vecs.len() - 1);
    let _ = write!(out, "vec {n}");
    for v in x.iter() {
        let _ = write!(out, " {v}");
    }
    out.push('\n');
    n
}

/// Renders `inst` so that [`parse`] gives it back. Vectors are named `X`,
/// `X1`, ... in order of first use.
pub fn write(inst: &Instance) -> String {
    let mut out = String::new();
    for v in &inst.vars {
        let d = inst.signature.domain(v).expect("declared");
        match (d.min(), d.max()) {
            (Some(lo), Some(hi)) if (hi - lo + 1) as usize == d.len() => {
                let _ = writeln!(out, "var {v} {lo} {hi}");
            }
            _ => {
                let _ = write!(out, "varset {v}");
                for a in d.iter() {
                    let _ = write!(out, " {a}");
                }
                out.push('\n');
            }
        }
    }
    let mut vecs = Vec::new();
    for c in &inst.constraints {
        match c {
            ConstraintSpec::Element { x, y, z } => {
                let n = vec_name(&mut vecs, &mut out, x);
                let _ = writeln!(out, "element {n} {y} {z}");
            }
            ConstraintSpec::OccurrenceLeq { x, a, c } => {
                let n = vec_name(&mut vecs, &mut out, x);
                let _ = writeln!(out, "occurrenceleq {n} {a} {c}");
            }
            ConstraintSpec::OccurrenceGeq { x, a, c } => {
                let n = vec_name(&mut vecs, &mut out, x);
                let _ = writeln!(out, "occurrencegeq {n} {a} {c}");
            }
            ConstraintSpec::DiseqIdx { x1, x2 } => {
                let _ = writeln!(out, "diseq {x1} {x2}");
            }
            ConstraintSpec::Table { x, rows } => {
                let n = vec_name(&mut vecs, &mut out, x);
                let _ = write!(out, "table {n} :");
                for r in rows {
                    for a in r.iter() {
                        let _ = write!(out, " {a}");
                    }
                    out.push_str(" ;");
                }
                out.push('\n');
            }
        }
    }
    out
}
