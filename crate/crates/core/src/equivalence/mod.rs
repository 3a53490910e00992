//! E_A, isomorphism, the permutation action and q-round EF equivalence.
//!
//! `e_equiv` compares realization counts formula by formula and reports the
//! first formula that tells the structures apart. `isomorphic` runs a
//! backtracking search on finite structures and compares color classes on
//! periodic ones. `ef_equiv` plays the Ehrenfeucht–Fraïssé game.

mod classify;
mod ef;
mod iso;
mod permutation;

pub use classify::{classify, classify_with, ClassifyOptions, Partition, Relation};
pub use ef::{Move, Side};
pub use permutation::{act, Permutation};

use crate::formulas::{Formula, FormulaSet};
use crate::semantics::{self, SemanticsError};
use crate::structures::{Count, Structure};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("signatures differ: {0} vs {1}")]
    SignatureMismatch(String, String),
    #[error("cannot compare a {0} structure with a {1} structure")]
    BackendMismatch(&'static str, &'static str),
    #[error("not a bijection: {0}")]
    NotABijection(String),
    #[error("search budget of {0} nodes exhausted")]
    BudgetExceeded(u64),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// A formula of `A` with different realization counts in the two structures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distinction {
    /// Position of the formula in `A`.
    pub index: usize,
    pub formula: Formula,
    pub left: Count,
    pub right: Count,
}

impl fmt::Display for Distinction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} vs {}", self.formula, self.left, self.right)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Distinction(Distinction),
    Isomorphism(Permutation),
    Spoiler(Vec<Move>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationKind {
    EA,
    Iso,
    Ef(u32),
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationKind::EA => f.write_str("E_A"),
            RelationKind::Iso => f.write_str("iso"),
            RelationKind::Ef(q) => write!(f, "ef_rank_{q}"),
        }
    }
}

/// Verdict plus a witness: the distinguishing formula when E_A fails, the
/// bijection when isomorphic, spoiler's line when the EF game is lost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivReport {
    pub relation: RelationKind,
    pub verdict: bool,
    pub witness: Option<Witness>,
}

fn check_pair(m: &Structure, n: &Structure) -> Result<(), EquivError> {
    if m.signature() != n.signature() {
        return Err(EquivError::SignatureMismatch(
            m.signature().to_string(),
            n.signature().to_string(),
        ));
    }
    if m.backend() != n.backend() {
        return Err(EquivError::BackendMismatch(m.backend(), n.backend()));
    }
    Ok(())
}

fn check_family(m: &Structure, a: &FormulaSet) -> Result<(), EquivError> {
    if m.signature() != a.signature() {
        return Err(EquivError::SignatureMismatch(
            m.signature().to_string(),
            a.signature().to_string(),
        ));
    }
    Ok(())
}

/// `(|φ^M|)_{φ ∈ A}`.
pub fn count_vector(m: &Structure, a: &FormulaSet) -> Result<Vec<Count>, EquivError> {
    check_family(m, a)?;
    Ok(semantics::counts(m, a)?)
}

/// The first formula of `A` (in list order) with different counts in `M` and `N`.
pub fn distinguishable(m: &Structure, n: &Structure, a: &FormulaSet) -> Result<Option<Distinction>, EquivError> {
    check_pair(m, n)?;
    check_family(m, a)?;
    for (index, phi) in a.iter().enumerate() {
        let (left, right) = (semantics::count(m, phi)?, semantics::count(n, phi)?);
        if left != right {
            return Ok(Some(Distinction {
                index,
                formula: phi.clone(),
                left,
                right,
            }));
        }
    }
    Ok(None)
}

pub fn e_equiv(m: &Structure, n: &Structure, a: &FormulaSet) -> Result<EquivReport, EquivError> {
    let d = distinguishable(m, n, a)?;
    Ok(EquivReport {
        relation: RelationKind::EA,
        verdict: d.is_none(),
        witness: d.map(Witness::Distinction),
    })
}

pub fn isomorphic(m: &Structure, n: &Structure) -> Result<EquivReport, EquivError> {
    isomorphic_with_budget(m, n, None)
}

/// As [`isomorphic`], giving up with `BudgetExceeded` after `budget` search nodes.
pub fn isomorphic_with_budget(m: &Structure, n: &Structure, budget: Option<u64>) -> Result<EquivReport, EquivError> {
    check_pair(m, n)?;
    let g = match (m, n) {
        (Structure::Finite(a), Structure::Finite(b)) => iso::finite_isomorphism(a, b, budget)?,
        (Structure::Periodic(a), Structure::Periodic(b)) => iso::periodic_isomorphism(a, b),
        _ => unreachable!("backends checked"),
    };
    Ok(EquivReport {
        relation: RelationKind::Iso,
        verdict: g.is_some(),
        witness: g.map(Witness::Isomorphism),
    })
}

pub fn ef_equiv(m: &Structure, n: &Structure, q: u32) -> Result<EquivReport, EquivError> {
    ef_equiv_with_budget(m, n, q, None)
}

/// As [`ef_equiv`], giving up with `BudgetExceeded` after `budget` game positions.
pub fn ef_equiv_with_budget(
    m: &Structure,
    n: &Structure,
    q: u32,
    budget: Option<u64>,
) -> Result<EquivReport, EquivError> {
    check_pair(m, n)?;
    let trace = match (m, n) {
        (Structure::Finite(a), Structure::Finite(b)) => ef::finite_game(a, b, q, budget)?,
        (Structure::Periodic(a), Structure::Periodic(b)) => ef::periodic_game(a, b, q),
        _ => unreachable!("backends checked"),
    };
    Ok(EquivReport {
        relation: RelationKind::Ef(q),
        verdict: trace.is_none(),
        witness: trace.map(Witness::Spoiler),
    })
}

/// Outcome of checking `iso ⇒ E_A ⇒ agreement on the sentences of A` on one pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchyCheck {
    pub isomorphic: bool,
    pub e_equivalent: bool,
    /// First sentence of `A` true in exactly one of the structures.
    pub disagreement: Option<Formula>,
}

impl HierarchyCheck {
    pub fn holds(&self) -> bool {
        (!self.isomorphic || self.e_equivalent) && (!self.e_equivalent || self.disagreement.is_none())
    }
}

pub fn check_hierarchy(m: &Structure, n: &Structure, a: &FormulaSet) -> Result<HierarchyCheck, EquivError> {
    let isomorphic = isomorphic(m, n)?.verdict;
    let e_equivalent = e_equiv(m, n, a)?.verdict;
    let mut disagreement = None;
    for phi in a.sentences() {
        if semantics::satisfies(m, phi, &[])? != semantics::satisfies(n, phi, &[])? {
            disagreement = Some(phi.clone());
            break;
        }
    }
    Ok(HierarchyCheck {
        isomorphic,
        e_equivalent,
        disagreement,
    })
}

#[cfg(test)]
mod tests;
