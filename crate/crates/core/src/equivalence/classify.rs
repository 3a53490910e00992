use super::{check_family, check_pair, ef_equiv_with_budget, iso, isomorphic_with_budget, EquivError};
use crate::formulas::FormulaSet;
use crate::semantics::CompiledFamily;
use crate::structures::{Count, Structure};
use rayon::prelude::*;
use std::collections::HashMap;

#[derive(Debug, Clone, Copy)]
pub enum Relation<'a> {
    EA(&'a FormulaSet),
    Iso,
    Ef(u32),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ClassifyOptions {
    /// Compute per-structure keys on the rayon pool.
    pub parallel: bool,
    /// Node budget for each isomorphism search or game.
    pub budget: Option<u64>,
}

/// Classes of input indices, each sorted, ordered by smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    classes: Vec<Vec<usize>>,
}

impl Partition {
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_of(&self, i: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&i))
    }
}

fn keyed<K, F>(structures: &[Structure], parallel: bool, key: F) -> Result<Vec<K>, EquivError>
where
    K: Send,
    F: Fn(&Structure) -> Result<K, EquivError> + Sync,
{
    if parallel {
        structures.par_iter().map(&key).collect()
    } else {
        structures.iter().map(key).collect()
    }
}

/// Groups equal keys, then splits each group with `same` against class representatives.
fn refine<K: std::hash::Hash + Eq>(
    keys: Vec<K>,
    mut same: impl FnMut(usize, usize) -> Result<bool, EquivError>,
) -> Result<Partition, EquivError> {
    let mut buckets: HashMap<K, Vec<usize>> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, k) in keys.into_iter().enumerate() {
        let bucket = buckets.entry(k).or_default();
        let mut placed = false;
        for &c in bucket.iter() {
            if same(classes[c][0], i)? {
                classes[c].push(i);
                placed = true;
                break;
            }
        }
        if !placed {
            bucket.push(classes.len());
            classes.push(vec![i]);
        }
    }
    Ok(Partition { classes })
}

pub fn classify(structures: &[Structure], relation: Relation<'_>) -> Result<Partition, EquivError> {
    classify_with(structures, relation, ClassifyOptions::default())
}

pub fn classify_with(
    structures: &[Structure],
    relation: Relation<'_>,
    options: ClassifyOptions,
) -> Result<Partition, EquivError> {
    if let Some(first) = structures.first() {
        for s in structures {
            check_pair(first, s)?;
        }
    }
    match relation {
        Relation::EA(a) => {
            if let Some(first) = structures.first() {
                check_family(first, a)?;
            }
            let compiled = CompiledFamily::new(a);
            let keys: Vec<Vec<Count>> = keyed(structures, options.parallel, |s| Ok(compiled.counts(s)?))?;
            refine(keys, |_, _| Ok(true))
        }
        Relation::Iso => {
            let keys = keyed(structures, options.parallel, |s| {
                Ok(match s {
                    Structure::Finite(f) => format!("{:?}", iso::structure_invariant(f)),
                    Structure::Periodic(p) => format!(
                        "{:?}",
                        p.colors().iter().map(|c| (&c.membership, c.size)).collect::<Vec<_>>()
                    ),
                })
            })?;
            refine(keys, |i, j| {
                Ok(isomorphic_with_budget(&structures[i], &structures[j], options.budget)?.verdict)
            })
        }
        Relation::Ef(q) => refine(vec![(); structures.len()], |i, j| {
            Ok(ef_equiv_with_budget(&structures[i], &structures[j], q, options.budget)?.verdict)
        }),
    }
}
