//! Satisfaction, realization sets and realization counts.
//!
//! On finite structures quantifiers range over the whole universe. On
//! periodic unary structures they range over a finite witness set: the
//! elements already named by the assignment plus one unnamed representative
//! of each nonempty color class. Swapping two unnamed elements of the same
//! color is an automorphism fixing the named ones, so every element is
//! interchangeable with one of the witnesses.

mod finite;
mod periodic;
mod realization;

pub use finite::FiniteModel;
pub(crate) use finite::{next_tuple, Evaluator as FiniteEvaluator, NodeId, Program};
pub use realization::{RealizationSet, SymbolicSet, TupleSet, TupleType};

use crate::formulas::{Formula, FormulaError, FormulaSet, Var};
use crate::structures::{Count, Element, PeriodicUnaryStructure, Structure};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("free variable {0} has no value (assignment has {1} entries)")]
    UnboundVariable(Var, usize),
    #[error("assignment has {found} entries but the formula has {expected} free variables")]
    AssignmentLength { expected: usize, found: usize },
    #[error("formula does not fit the structure's signature: {0}")]
    SignatureMismatch(#[from] FormulaError),
    #[error("element {element} is outside the universe of size {size}")]
    OutOfUniverse { element: Element, size: usize },
}

fn check_assignment(phi: &Formula, assignment: &[Element]) -> Result<Vec<Var>, SemanticsError> {
    let free = phi.free_vars();
    if assignment.len() < free.len() {
        return Err(SemanticsError::UnboundVariable(
            free.as_slice()[assignment.len()],
            assignment.len(),
        ));
    }
    if assignment.len() > free.len() {
        return Err(SemanticsError::AssignmentLength {
            expected: free.len(),
            found: assignment.len(),
        });
    }
    Ok(free.as_slice().to_vec())
}

/// Truth of φ under `assignment`, whose `i`-th entry is the value of the
/// `i`-th smallest free variable of φ.
pub fn satisfies(m: &Structure, phi: &Formula, assignment: &[Element]) -> Result<bool, SemanticsError> {
    match m {
        Structure::Finite(f) => satisfies_finite(f, phi, assignment),
        Structure::Periodic(p) => satisfies_periodic(p, phi, assignment),
    }
}

pub fn satisfies_finite<M: FiniteModel>(m: &M, phi: &Formula, assignment: &[Element]) -> Result<bool, SemanticsError> {
    phi.check(m.signature())?;
    let free = check_assignment(phi, assignment)?;
    if let Some(&element) = assignment.iter().find(|&&e| e >= m.size()) {
        return Err(SemanticsError::OutOfUniverse {
            element,
            size: m.size(),
        });
    }
    let (program, root) = Program::of(m.signature(), phi);
    Ok(finite::Evaluator::new(m, &program).satisfies(root, &free, assignment))
}

pub fn satisfies_periodic(
    m: &PeriodicUnaryStructure,
    phi: &Formula,
    assignment: &[Element],
) -> Result<bool, SemanticsError> {
    phi.check(m.signature())?;
    let free = check_assignment(phi, assignment)?;
    Ok(periodic::Evaluator::new(m).satisfies(phi, &free, assignment))
}

/// φ^M, the set of satisfying assignments in the backend's representation.
pub fn realizations(m: &Structure, phi: &Formula) -> Result<RealizationSet, SemanticsError> {
    phi.check(m.signature())?;
    Ok(match m {
        Structure::Finite(f) => {
            let (program, root) = Program::of(f.signature(), phi);
            finite::Evaluator::new(f, &program).realizations(root, phi.free_vars().as_slice())
        }
        Structure::Periodic(p) => periodic::Evaluator::new(p).realizations(phi),
    })
}

/// |φ^M|.
pub fn count(m: &Structure, phi: &Formula) -> Result<Count, SemanticsError> {
    phi.check(m.signature())?;
    Ok(match m {
        Structure::Finite(f) => Count::Finite(count_finite_unchecked(f, phi)),
        Structure::Periodic(p) => periodic::Evaluator::new(p).realizations(phi).count(),
    })
}

/// Counts of every formula of `a`, sharing one evaluator across the family.
pub fn counts(m: &Structure, a: &FormulaSet) -> Result<Vec<Count>, SemanticsError> {
    CompiledFamily::new(a).counts(m)
}

/// Realization sets of every formula of `a`, sharing one evaluator across the family.
pub fn realization_sets(m: &Structure, a: &FormulaSet) -> Result<Vec<RealizationSet>, SemanticsError> {
    CompiledFamily::new(a).realization_sets(m)
}

/// A formula family prepared once for evaluation on many structures over its signature.
#[derive(Debug, Clone)]
pub struct CompiledFamily<'a> {
    family: &'a FormulaSet,
    program: Program,
    roots: Vec<NodeId>,
}

impl<'a> CompiledFamily<'a> {
    pub fn new(family: &'a FormulaSet) -> Self {
        let mut program = Program::new(family.signature());
        let roots = family.iter().map(|phi| program.add(phi)).collect();
        CompiledFamily { family, program, roots }
    }

    fn each_finite<M: FiniteModel, T>(
        &self,
        m: &M,
        mut f: impl FnMut(&mut finite::Evaluator<'_, '_, M>, NodeId, &[Var]) -> T,
    ) -> Result<Vec<T>, SemanticsError> {
        let local;
        let (program, roots) = if m.signature() == self.family.signature() {
            (&self.program, self.roots.as_slice())
        } else {
            let mut p = Program::new(m.signature());
            let mut roots = Vec::with_capacity(self.family.len());
            for phi in self.family {
                phi.check(m.signature())?;
                roots.push(p.add(phi));
            }
            local = (p, roots);
            (&local.0, local.1.as_slice())
        };
        let mut ev = finite::Evaluator::new(m, program);
        Ok(self
            .family
            .iter()
            .zip(roots)
            .map(|(phi, &root)| f(&mut ev, root, phi.free_vars().as_slice()))
            .collect())
    }

    fn check_periodic(&self, m: &PeriodicUnaryStructure) -> Result<(), SemanticsError> {
        if m.signature() != self.family.signature() {
            for phi in self.family {
                phi.check(m.signature())?;
            }
        }
        Ok(())
    }

    pub fn counts(&self, m: &Structure) -> Result<Vec<Count>, SemanticsError> {
        match m {
            Structure::Finite(f) => self.each_finite(f, |ev, root, free| Count::Finite(ev.count(root, free))),
            Structure::Periodic(p) => {
                self.check_periodic(p)?;
                let mut ev = periodic::Evaluator::new(p);
                Ok(self.family.iter().map(|phi| ev.realizations(phi).count()).collect())
            }
        }
    }

    pub fn realization_sets(&self, m: &Structure) -> Result<Vec<RealizationSet>, SemanticsError> {
        match m {
            Structure::Finite(f) => self.each_finite(f, |ev, root, free| ev.realizations(root, free)),
            Structure::Periodic(p) => {
                self.check_periodic(p)?;
                let mut ev = periodic::Evaluator::new(p);
                Ok(self.family.iter().map(|phi| ev.realizations(phi)).collect())
            }
        }
    }
}

pub fn count_finite<M: FiniteModel>(m: &M, phi: &Formula) -> Result<u64, SemanticsError> {
    phi.check(m.signature())?;
    Ok(count_finite_unchecked(m, phi))
}

fn count_finite_unchecked<M: FiniteModel>(m: &M, phi: &Formula) -> u64 {
    let (program, root) = Program::of(m.signature(), phi);
    finite::Evaluator::new(m, &program).count(root, phi.free_vars().as_slice())
}
