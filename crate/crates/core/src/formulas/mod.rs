//! First-order formulas over a relational signature.
//!
//! Besides the usual connectives the AST carries a counting quantifier
//! [`Formula::ExistsAtLeast`] ("there are at least `n` tuples `v̄` with ψ"),
//! which is what the product-language encoding in [`crate::borel`] is written in.

mod fragment;
mod parser;

pub use fragment::{generate_fragment, FragmentConfig, DEFAULT_FRAGMENT_CAP};
pub use parser::parse;

use crate::structures::Signature;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("relation `{relation}` has arity {expected} but got {found} arguments{}", at(*position))]
    Arity {
        relation: String,
        expected: usize,
        found: usize,
        position: Option<usize>,
    },
    #[error("unknown relation `{name}`{}", at(*position))]
    UnknownRelation { name: String, position: Option<usize> },
    #[error("equality is not part of this signature{}", at(*position))]
    EqualityNotEnabled { position: Option<usize> },
    #[error("conjunctions and disjunctions need at least one operand")]
    EmptyConnective,
    #[error("fragment generation would exceed the cap of {cap} formulas")]
    BudgetExceeded { cap: usize },
    #[error("{max_vars} variables cannot fill atoms of arity {max_arity}")]
    InsufficientVariables { max_vars: usize, max_arity: usize },
    #[error("line {line}: {source}")]
    Line {
        line: usize,
        #[source]
        source: Box<FormulaError>,
    },
}

fn at(position: Option<usize>) -> String {
    position.map(|p| format!(" at byte {p}")).unwrap_or_default()
}

/// Variable `v_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom {
        relation: String,
        args: Vec<Var>,
    },
    Equal(Var, Var),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
    /// At least `count` distinct assignments to `vars` satisfy `body`.
    ExistsAtLeast {
        count: u64,
        vars: Vec<Var>,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn atom(relation: impl Into<String>, args: &[u32]) -> Self {
        Formula::Atom {
            relation: relation.into(),
            args: args.iter().map(|&i| Var(i)).collect(),
        }
    }

    pub fn eq(a: u32, b: u32) -> Self {
        Formula::Equal(Var(a), Var(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(operands: Vec<Formula>) -> Self {
        Formula::And(operands)
    }

    pub fn or(operands: Vec<Formula>) -> Self {
        Formula::Or(operands)
    }

    pub fn exists(v: u32, body: Formula) -> Self {
        Formula::Exists(Var(v), Box::new(body))
    }

    pub fn forall(v: u32, body: Formula) -> Self {
        Formula::Forall(Var(v), Box::new(body))
    }

    pub fn exists_at_least(count: u64, vars: &[Var], body: Formula) -> Self {
        Formula::ExistsAtLeast {
            count,
            vars: vars.to_vec(),
            body: Box::new(body),
        }
    }

    /// `(a ∧ b) ∨ (¬a ∧ ¬b)`.
    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Or(vec![
            Formula::And(vec![a.clone(), b.clone()]),
            Formula::And(vec![a.not(), b.not()]),
        ])
    }

    /// Free variables in ascending index order; this order fixes tuple positions.
    pub fn free_vars(&self) -> FreeVars {
        let mut acc = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut acc);
        FreeVars(acc.into_iter().collect())
    }

    fn collect_free(&self, bound: &mut Vec<Var>, acc: &mut BTreeSet<Var>) {
        match self {
            Formula::Atom { args, .. } => acc.extend(args.iter().filter(|v| !bound.contains(v))),
            Formula::Equal(a, b) => acc.extend([a, b].into_iter().filter(|v| !bound.contains(v))),
            Formula::Not(f) => f.collect_free(bound, acc),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, acc)),
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(*v);
                f.collect_free(bound, acc);
                bound.pop();
            }
            Formula::ExistsAtLeast { vars, body, .. } => {
                let depth = bound.len();
                bound.extend(vars);
                body.collect_free(bound, acc);
                bound.truncate(depth);
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Quantifier rank; `∃^n v̄` counts as `n·|v̄|` nested quantifiers, the rank of its expansion.
    pub fn rank(&self) -> u64 {
        match self {
            Formula::Atom { .. } | Formula::Equal(..) => 0,
            Formula::Not(f) => f.rank(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::rank).max().unwrap_or(0),
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.rank(),
            Formula::ExistsAtLeast { count, vars, body } => count * vars.len() as u64 + body.rank(),
        }
    }

    /// One past the largest variable index mentioned anywhere (free or bound).
    pub fn var_span(&self) -> usize {
        let own = |vs: &[Var]| vs.iter().map(|v| v.index() + 1).max().unwrap_or(0);
        match self {
            Formula::Atom { args, .. } => own(args),
            Formula::Equal(a, b) => own(&[*a, *b]),
            Formula::Not(f) => f.var_span(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::var_span).max().unwrap_or(0),
            Formula::Exists(v, f) | Formula::Forall(v, f) => (v.index() + 1).max(f.var_span()),
            Formula::ExistsAtLeast { vars, body, .. } => own(vars).max(body.var_span()),
        }
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom { .. } | Formula::Equal(..) => Vec::new(),
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => vec![f],
            Formula::ExistsAtLeast { body, .. } => vec![body],
            Formula::And(fs) | Formula::Or(fs) => fs.iter().collect(),
        }
    }

    /// All subformulas including `self`, parents before children.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let kids = out[i].children();
            out.extend(kids);
            i += 1;
        }
        out
    }

    /// Checks relation names, arities, equality use and nonempty connectives.
    pub fn check(&self, sig: &Signature) -> Result<(), FormulaError> {
        match self {
            Formula::Atom { relation, args } => match sig.arity(relation) {
                None => Err(FormulaError::UnknownRelation {
                    name: relation.clone(),
                    position: None,
                }),
                Some(a) if a != args.len() => Err(FormulaError::Arity {
                    relation: relation.clone(),
                    expected: a,
                    found: args.len(),
                    position: None,
                }),
                Some(_) => Ok(()),
            },
            Formula::Equal(..) if !sig.with_equality() => Err(FormulaError::EqualityNotEnabled { position: None }),
            Formula::Equal(..) => Ok(()),
            Formula::And(fs) | Formula::Or(fs) if fs.is_empty() => Err(FormulaError::EmptyConnective),
            other => other.children().into_iter().try_for_each(|f| f.check(sig)),
        }
    }

    /// Normal form used for deduplication: flattened, sorted and deduplicated
    /// `And`/`Or` operand lists, singleton connectives collapsed, `¬¬φ`
    /// collapsed, and equality arguments ordered.
    pub fn normalize(&self) -> Formula {
        match self {
            Formula::Atom { .. } => self.clone(),
            Formula::Equal(a, b) => Formula::Equal(*a.min(b), *a.max(b)),
            Formula::Not(f) => match f.normalize() {
                Formula::Not(inner) => *inner,
                g => g.not(),
            },
            Formula::And(fs) => Self::normalize_list(fs, true),
            Formula::Or(fs) => Self::normalize_list(fs, false),
            Formula::Exists(v, f) => Formula::Exists(*v, Box::new(f.normalize())),
            Formula::Forall(v, f) => Formula::Forall(*v, Box::new(f.normalize())),
            Formula::ExistsAtLeast { count, vars, body } => Formula::ExistsAtLeast {
                count: *count,
                vars: vars.clone(),
                body: Box::new(body.normalize()),
            },
        }
    }

    fn normalize_list(fs: &[Formula], conj: bool) -> Formula {
        let mut out = BTreeSet::new();
        for f in fs {
            match (f.normalize(), conj) {
                (Formula::And(inner), true) | (Formula::Or(inner), false) => out.extend(inner),
                (g, _) => {
                    out.insert(g);
                }
            }
        }
        let mut out: Vec<Formula> = out.into_iter().collect();
        if out.len() == 1 {
            return out.pop().expect("one operand");
        }
        if conj {
            Formula::And(out)
        } else {
            Formula::Or(out)
        }
    }

    /// Same formula with every relation name passed through `rename`.
    pub fn map_relations(&self, rename: &impl Fn(&str) -> String) -> Formula {
        match self {
            Formula::Atom { relation, args } => Formula::Atom {
                relation: rename(relation),
                args: args.clone(),
            },
            Formula::Equal(..) => self.clone(),
            Formula::Not(f) => f.map_relations(rename).not(),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.map_relations(rename)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.map_relations(rename)).collect()),
            Formula::Exists(v, f) => Formula::Exists(*v, Box::new(f.map_relations(rename))),
            Formula::Forall(v, f) => Formula::Forall(*v, Box::new(f.map_relations(rename))),
            Formula::ExistsAtLeast { count, vars, body } => Formula::ExistsAtLeast {
                count: *count,
                vars: vars.clone(),
                body: Box::new(body.map_relations(rename)),
            },
        }
    }
}

fn write_vars(f: &mut fmt::Formatter<'_>, vars: &[Var]) -> fmt::Result {
    for (i, v) in vars.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    /// Concrete syntax accepted by [`parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom { relation, args } => {
                write!(f, "{relation}(")?;
                write_vars(f, args)?;
                f.write_str(")")
            }
            Formula::Equal(a, b) => write!(f, "{a}={b}"),
            Formula::Not(g) => write!(f, "~{g}"),
            Formula::And(fs) | Formula::Or(fs) => {
                let sep = if matches!(self, Formula::And(_)) { " & " } else { " | " };
                f.write_str("(")?;
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    write!(f, "{g}")?;
                }
                f.write_str(")")
            }
            Formula::Exists(v, g) => write!(f, "E {v}. {g}"),
            Formula::Forall(v, g) => write!(f, "A {v}. {g}"),
            Formula::ExistsAtLeast { count, vars, body } => {
                write!(f, "E^{count} (")?;
                write_vars(f, vars)?;
                write!(f, "). {body}")
            }
        }
    }
}

/// Free variables sorted by index; position `i` of a realization tuple holds
/// the value of the `i`-th smallest free variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FreeVars(Vec<Var>);

impl FreeVars {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Var] {
        &self.0
    }

    pub fn contains(&self, v: Var) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn position(&self, v: Var) -> Option<usize> {
        self.0.binary_search(&v).ok()
    }
}

impl<'a> IntoIterator for &'a FreeVars {
    type Item = &'a Var;
    type IntoIter = std::slice::Iter<'a, Var>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A finite, ordered family of formulas over one signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaSet {
    signature: Signature,
    formulas: Vec<Formula>,
}

impl FormulaSet {
    pub fn new(signature: Signature, formulas: Vec<Formula>) -> Result<Self, FormulaError> {
        for f in &formulas {
            f.check(&signature)?;
        }
        Ok(FormulaSet { signature, formulas })
    }

    /// One formula per line; blank lines and `#` comments are skipped.
    pub fn parse_lines(signature: Signature, text: &str) -> Result<Self, FormulaError> {
        let mut formulas = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let f = parse(line, &signature).map_err(|e| FormulaError::Line {
                line: i + 1,
                source: Box::new(e),
            })?;
            formulas.push(f);
        }
        Ok(FormulaSet { signature, formulas })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Formula> {
        self.formulas.iter()
    }

    /// The sentences of the family, in order.
    pub fn sentences(&self) -> impl Iterator<Item = &Formula> {
        self.formulas.iter().filter(|f| f.is_sentence())
    }

    /// Largest number of free variables of a member.
    pub fn max_free_vars(&self) -> usize {
        self.formulas.iter().map(|f| f.free_vars().len()).max().unwrap_or(0)
    }

    fn members(&self) -> std::collections::HashSet<&Formula> {
        self.formulas.iter().collect()
    }

    /// Every subformula of a member is a member.
    pub fn is_subformula_closed(&self) -> bool {
        let members = self.members();
        self.formulas
            .iter()
            .all(|f| f.subformulas().into_iter().all(|g| members.contains(g)))
    }

    /// The normalized negation of every member is a member.
    pub fn is_negation_closed(&self) -> bool {
        let members = self.members();
        self.formulas
            .iter()
            .all(|f| members.contains(&f.clone().not().normalize()))
    }

    /// `∃v φ` and `∀v φ` are members for every member φ of rank below
    /// `max_rank` and every free variable `v` of φ.
    pub fn is_quantifier_closed(&self, max_rank: u64) -> bool {
        let members = self.members();
        self.formulas.iter().filter(|f| f.rank() < max_rank).all(|f| {
            f.free_vars().as_slice().iter().all(|&v| {
                members.contains(&Formula::Exists(v, Box::new(f.clone())))
                    && members.contains(&Formula::Forall(v, Box::new(f.clone())))
            })
        })
    }

    /// Every atom over `v0..v_{max_vars-1}` is a member.
    pub fn contains_all_atoms(&self, max_vars: usize) -> bool {
        let members = self.members();
        fragment::atoms(&self.signature, max_vars)
            .iter()
            .all(|a| members.contains(a))
    }
}

impl<'a> IntoIterator for &'a FormulaSet {
    type Item = &'a Formula;
    type IntoIter = std::slice::Iter<'a, Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.formulas.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(rel: &str, args: &[u32]) -> Formula {
        Formula::atom(rel, args)
    }

    #[test]
    fn free_vars_of_atoms_and_quantifiers() {
        let atom = s("S", &[0, 1]);
        assert_eq!(atom.free_vars().as_slice(), &[Var(0), Var(1)]);
        let ex = Formula::exists(0, atom.clone());
        assert_eq!(ex.free_vars().as_slice(), &[Var(1)]);
        let sentence = Formula::forall(1, ex.clone());
        assert!(sentence.free_vars().is_empty());
        assert_eq!(atom.clone().not().free_vars(), atom.free_vars());
    }

    #[test]
    fn free_vars_of_counting_quantifier() {
        let f = Formula::exists_at_least(2, &[Var(0)], s("S", &[0, 2]));
        assert_eq!(f.free_vars().as_slice(), &[Var(2)]);
    }

    #[test]
    fn rank_and_span() {
        let f = Formula::exists(0, Formula::forall(3, s("S", &[0, 3])).not());
        assert_eq!(f.rank(), 2);
        assert_eq!(f.var_span(), 4);
        assert_eq!(
            Formula::exists_at_least(3, &[Var(0), Var(1)], s("S", &[0, 1])).rank(),
            6
        );
    }

    #[test]
    fn normalization() {
        let a = s("R", &[0]);
        let b = s("R", &[1]);
        let nested = Formula::and(vec![b.clone(), Formula::and(vec![a.clone(), b.clone()])]);
        assert_eq!(nested.normalize(), Formula::and(vec![a.clone(), b.clone()]));
        assert_eq!(a.clone().not().not().normalize(), a);
        assert_eq!(Formula::or(vec![a.clone()]).normalize(), a);
        assert_eq!(Formula::eq(3, 1).normalize(), Formula::eq(1, 3));
    }

    #[test]
    fn check_reports_problems() {
        let sig = Signature::new([("R", 1)], false).unwrap();
        assert!(matches!(
            s("R", &[0, 1]).check(&sig),
            Err(FormulaError::Arity {
                expected: 1,
                found: 2,
                ..
            })
        ));
        assert!(matches!(
            s("T", &[0]).check(&sig),
            Err(FormulaError::UnknownRelation { .. })
        ));
        assert!(matches!(
            Formula::eq(0, 1).check(&sig),
            Err(FormulaError::EqualityNotEnabled { .. })
        ));
        assert_eq!(Formula::and(vec![]).check(&sig), Err(FormulaError::EmptyConnective));
    }

    #[test]
    fn formula_list_parsing() {
        let sig = Signature::new([("R", 1)], false).unwrap();
        let set = FormulaSet::parse_lines(sig.clone(), "# header\nR(v0)\n\n  ~R(v0) # negated\n").unwrap();
        assert_eq!(set.len(), 2);
        let err = FormulaSet::parse_lines(sig, "R(v0)\nR(v0,v1)\n").unwrap_err();
        assert!(matches!(err, FormulaError::Line { line: 2, .. }));
    }
}
