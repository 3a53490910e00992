//! Structure documents.
//!
//! ```text
//! sig R:1 S:2 eq
//! finite 3
//! R = {0,2}
//! S = {(0,1),(2,0)}
//! ```
//!
//! or, for the periodic backend, `periodic` followed by lines like
//! `R = prefix:110 cycle:01`. Blank lines and `#` comments are ignored;
//! relations without a line are empty.

use distinguo_core::structures::{Element, StructureError};
use distinguo_core::{FiniteStructure, PeriodicSet, PeriodicUnaryStructure, Signature, Structure};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct DocError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> DocError {
    DocError {
        line,
        message: message.into(),
    }
}

enum Backend {
    Finite(usize),
    Periodic,
}

pub fn parse_structure(text: &str) -> Result<Structure, DocError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let last_line = text.lines().count().max(1);

    let (sig_line, header) = lines.next().ok_or_else(|| err(last_line, "expected `sig ...`"))?;
    let signature = parse_signature(sig_line, header)?;

    let (backend_line, backend) = lines
        .next()
        .ok_or_else(|| err(last_line, "expected `finite N` or `periodic`"))?;
    let backend = match backend.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["finite", n] => Backend::Finite(
            n.parse()
                .map_err(|_| err(backend_line, format!("`{n}` is not a universe size")))?,
        ),
        ["periodic"] => Backend::Periodic,
        _ => {
            return Err(err(
                backend_line,
                format!("expected `finite N` or `periodic`, found `{backend}`"),
            ))
        }
    };

    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut finite: Vec<(String, Vec<Vec<Element>>)> = Vec::new();
    let mut periodic: Vec<(String, PeriodicSet)> = Vec::new();
    for (line, body) in lines {
        let (name, value) = body
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected `NAME = ...`, found `{body}`")))?;
        let name = name.trim().to_string();
        if signature.index_of(&name).is_none() {
            return Err(err(line, format!("relation `{name}` is not in the signature")));
        }
        if let Some(first) = seen.insert(name.clone(), line) {
            return Err(err(line, format!("relation `{name}` already given on line {first}")));
        }
        match backend {
            Backend::Finite(_) => finite.push((name, parse_tuples(value.trim()).map_err(|m| err(line, m))?)),
            Backend::Periodic => periodic.push((name, parse_periodic(value.trim()).map_err(|m| err(line, m))?)),
        }
    }

    let line_of = |e: &StructureError| -> usize {
        let relation = match e {
            StructureError::ArityMismatch { relation, .. } | StructureError::OutOfUniverse { relation, .. } => relation,
            StructureError::NotUnary { .. } => return sig_line,
            _ => return backend_line,
        };
        seen.get(relation).copied().unwrap_or(backend_line)
    };
    let built = match backend {
        Backend::Finite(n) => FiniteStructure::new(signature, n, finite).map(Structure::from),
        Backend::Periodic => PeriodicUnaryStructure::new(signature, periodic).map(Structure::from),
    };
    built.map_err(|e| err(line_of(&e), e.to_string()))
}

fn parse_signature(line: usize, header: &str) -> Result<Signature, DocError> {
    let mut words = header.split_whitespace();
    if words.next() != Some("sig") {
        return Err(err(line, format!("expected `sig ...`, found `{header}`")));
    }
    let mut relations = Vec::new();
    let mut equality = false;
    for word in words {
        if word == "eq" {
            equality = true;
            continue;
        }
        let (name, arity) = word
            .split_once(':')
            .ok_or_else(|| err(line, format!("expected `NAME:ARITY` or `eq`, found `{word}`")))?;
        let arity: usize = arity
            .parse()
            .map_err(|_| err(line, format!("`{arity}` is not an arity")))?;
        relations.push((name.to_string(), arity));
    }
    Signature::new(relations, equality).map_err(|e| err(line, e.to_string()))
}

/// `{0,2}` or `{(0,1),(2,0)}`; bare elements are 1-tuples.
fn parse_tuples(value: &str) -> Result<Vec<Vec<Element>>, String> {
    let inner = value
        .strip_prefix('{')
        .and_then(|v| v.strip_suffix('}'))
        .ok_or_else(|| format!("expected `{{...}}`, found `{value}`"))?;
    let number = |s: &str| -> Result<Element, String> {
        s.trim()
            .parse()
            .map_err(|_| format!("`{}` is not an element", s.trim()))
    };
    let inner = inner.trim();
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    if !inner.starts_with('(') {
        return inner.split(',').map(|s| number(s).map(|e| vec![e])).collect();
    }
    let mut tuples = Vec::new();
    let mut rest = inner;
    loop {
        let open = rest
            .strip_prefix('(')
            .ok_or_else(|| format!("expected `(` at `{rest}`"))?;
        let (body, after) = open
            .split_once(')')
            .ok_or_else(|| format!("unclosed `(` at `{rest}`"))?;
        let tuple = if body.trim().is_empty() {
            Vec::new()
        } else {
            body.split(',').map(number).collect::<Result<_, _>>()?
        };
        tuples.push(tuple);
        let after = after.trim_start();
        if after.is_empty() {
            return Ok(tuples);
        }
        rest = after
            .strip_prefix(',')
            .ok_or_else(|| format!("expected `,` at `{after}`"))?
            .trim_start();
    }
}

/// `prefix:110 cycle:01`; the prefix may be omitted or empty.
fn parse_periodic(value: &str) -> Result<PeriodicSet, String> {
    let (mut prefix, mut cycle) = ("", None);
    for word in value.split_whitespace() {
        match word.split_once(':') {
            Some(("prefix", bits)) => prefix = bits,
            Some(("cycle", bits)) => cycle = Some(bits),
            _ => return Err(format!("expected `prefix:BITS` or `cycle:BITS`, found `{word}`")),
        }
    }
    let cycle = cycle.ok_or("missing `cycle:BITS`")?;
    PeriodicSet::from_bits(prefix, cycle)
}

#[cfg(test)]
pub fn render_structure(m: &Structure) -> String {
    let sig = m.signature();
    let mut out = if sig.relations().is_empty() && !sig.with_equality() {
        "sig\n".to_string()
    } else {
        format!("sig {sig}\n")
    };
    match m {
        Structure::Finite(f) => {
            out.push_str(&format!("finite {}\n", f.size()));
            for (name, tuples) in f.interpretation() {
                let parts: Vec<String> = tuples
                    .iter()
                    .map(|t| {
                        let elems: Vec<String> = t.iter().map(|e| e.to_string()).collect();
                        if t.len() == 1 {
                            elems[0].clone()
                        } else {
                            format!("({})", elems.join(","))
                        }
                    })
                    .collect();
                out.push_str(&format!("{name} = {{{}}}\n", parts.join(",")));
            }
        }
        Structure::Periodic(p) => {
            out.push_str("periodic\n");
            for (r, set) in sig.relations().iter().zip(p.sets()) {
                out.push_str(&format!("{} = {set}\n", r.name));
            }
        }
    }
    out
}
