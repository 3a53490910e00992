use super::{Formula, FormulaError, FormulaSet, Var};
use crate::structures::Signature;
use std::collections::HashSet;

pub const DEFAULT_FRAGMENT_CAP: usize = 1_000_000;

/// Bounds for [`generate_fragment`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FragmentConfig {
    pub max_rank: u64,
    pub max_vars: usize,
    pub cap: usize,
}

impl FragmentConfig {
    pub fn new(max_rank: u64, max_vars: usize) -> Self {
        FragmentConfig {
            max_rank,
            max_vars,
            cap: DEFAULT_FRAGMENT_CAP,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    /// Builds the fragment in layers.
    ///
    /// Rank 0: every atom over `v0..v_{max_vars-1}`, every literal, every
    /// binary conjunction and disjunction of two distinct literals, and the
    /// negations of those. Rank `r+1`: `∃v φ`, `∀v φ` and their negations for
    /// each rank-`r` member φ and each free variable `v` of φ. Members are
    /// normalized and deduplicated; order is by layer, then by construction.
    pub fn generate(&self, sig: &Signature) -> Result<FormulaSet, FormulaError> {
        if self.max_vars < sig.max_arity() {
            return Err(FormulaError::InsufficientVariables {
                max_vars: self.max_vars,
                max_arity: sig.max_arity(),
            });
        }
        let mut out = Collector::new(self.cap);
        let atoms = atoms(sig, self.max_vars);
        let literals: Vec<Formula> = atoms
            .iter()
            .cloned()
            .chain(atoms.iter().map(|a| a.clone().not()))
            .collect();
        let mut layer = Vec::new();
        for lit in &literals {
            out.push(lit.clone(), &mut layer)?;
        }
        for (i, a) in literals.iter().enumerate() {
            for b in &literals[i + 1..] {
                for combo in [
                    Formula::And(vec![a.clone(), b.clone()]),
                    Formula::Or(vec![a.clone(), b.clone()]),
                ] {
                    let combo = combo.normalize();
                    out.push(combo.clone(), &mut layer)?;
                    out.push(combo.not().normalize(), &mut layer)?;
                }
            }
        }
        for _ in 0..self.max_rank {
            let mut next = Vec::new();
            for phi in &layer {
                for &v in phi.free_vars().as_slice() {
                    for q in [
                        Formula::Exists(v, Box::new(phi.clone())),
                        Formula::Forall(v, Box::new(phi.clone())),
                    ] {
                        out.push(q.clone(), &mut next)?;
                        out.push(q.not(), &mut next)?;
                    }
                }
            }
            layer = next;
        }
        Ok(FormulaSet {
            signature: sig.clone(),
            formulas: out.formulas,
        })
    }
}

/// Fragment with the default size cap; see [`FragmentConfig::generate`].
pub fn generate_fragment(sig: &Signature, max_rank: u64, max_vars: usize) -> Result<FormulaSet, FormulaError> {
    FragmentConfig::new(max_rank, max_vars).generate(sig)
}

struct Collector {
    formulas: Vec<Formula>,
    seen: HashSet<Formula>,
    cap: usize,
}

impl Collector {
    fn new(cap: usize) -> Self {
        Collector {
            formulas: Vec::new(),
            seen: HashSet::new(),
            cap,
        }
    }

    fn push(&mut self, f: Formula, layer: &mut Vec<Formula>) -> Result<(), FormulaError> {
        if self.seen.contains(&f) {
            return Ok(());
        }
        if self.formulas.len() >= self.cap {
            return Err(FormulaError::BudgetExceeded { cap: self.cap });
        }
        self.seen.insert(f.clone());
        layer.push(f.clone());
        self.formulas.push(f);
        Ok(())
    }
}

/// Relation atoms in signature order with argument tuples in lexicographic
/// order, then equalities `vi=vj` with `i ≤ j` when the signature has equality.
pub(crate) fn atoms(sig: &Signature, max_vars: usize) -> Vec<Formula> {
    let mut out = Vec::new();
    for rel in sig.relations() {
        let total = max_vars.pow(rel.arity as u32);
        for code in 0..total {
            let mut args = vec![Var(0); rel.arity];
            let mut rest = code;
            for slot in args.iter_mut().rev() {
                *slot = Var((rest % max_vars) as u32);
                rest /= max_vars;
            }
            out.push(Formula::Atom {
                relation: rel.name.clone(),
                args,
            });
        }
    }
    if sig.with_equality() {
        for i in 0..max_vars as u32 {
            for j in i..max_vars as u32 {
                out.push(Formula::eq(i, j));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::parse;

    fn unary() -> Signature {
        Signature::new([("R", 1)], false).unwrap()
    }

    #[test]
    fn rank_zero_has_atoms_and_negations() {
        let set = generate_fragment(&unary(), 0, 1).unwrap();
        let r = parse("R(v0)", &unary()).unwrap();
        assert!(set.formulas().contains(&r));
        assert!(set.formulas().contains(&r.not()));
        assert!(set.is_subformula_closed());
        assert!(set.is_negation_closed());
    }

    #[test]
    fn rank_one_has_existential() {
        let set = generate_fragment(&unary(), 1, 1).unwrap();
        assert!(set.formulas().contains(&parse("E v0. R(v0)", &unary()).unwrap()));
        assert!(set.is_quantifier_closed(1));
    }

    #[test]
    fn closure_properties_binary_signature() {
        let sig = Signature::new([("R", 1), ("S", 2)], true).unwrap();
        let set = generate_fragment(&sig, 2, 2).unwrap();
        assert!(set.contains_all_atoms(2));
        assert!(set.is_subformula_closed());
        assert!(set.is_negation_closed());
        assert!(set.is_quantifier_closed(2));
        assert!(set.iter().all(|f| f.rank() <= 2 && f.var_span() <= 2));
        assert!(set.iter().all(|f| *f == f.normalize()));
        let distinct: HashSet<_> = set.iter().collect();
        assert_eq!(distinct.len(), set.len());
    }

    #[test]
    fn first_member_is_first_atom() {
        let sig = Signature::new([("R", 1), ("S", 2)], false).unwrap();
        let set = generate_fragment(&sig, 1, 2).unwrap();
        assert_eq!(set.formulas()[0], Formula::atom("R", &[0]));
    }

    #[test]
    fn cap_and_variable_bound() {
        let sig = Signature::new([("R", 1), ("S", 2)], false).unwrap();
        assert_eq!(
            FragmentConfig::new(2, 2).with_cap(100).generate(&sig),
            Err(FormulaError::BudgetExceeded { cap: 100 })
        );
        assert_eq!(
            generate_fragment(&sig, 1, 1),
            Err(FormulaError::InsufficientVariables {
                max_vars: 1,
                max_arity: 2
            })
        );
    }
}
