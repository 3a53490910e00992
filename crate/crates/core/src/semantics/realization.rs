use crate::structures::{Count, Element, PeriodicSet};
use std::fmt;

/// A finite set of finite sequences, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct TupleSet(Vec<Vec<Element>>);

impl TupleSet {
    pub fn new<I: IntoIterator<Item = Vec<Element>>>(tuples: I) -> Self {
        let mut v: Vec<_> = tuples.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        TupleSet(v)
    }

    pub(crate) fn from_sorted(v: Vec<Vec<Element>>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        TupleSet(v)
    }

    pub fn empty() -> Self {
        TupleSet(Vec::new())
    }

    pub fn contains(&self, t: &[Element]) -> bool {
        self.0.binary_search_by(|x| x.as_slice().cmp(t)).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Vec<Element>] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vec<Element>> {
        self.0.iter()
    }
}

impl FromIterator<Vec<Element>> for TupleSet {
    fn from_iter<I: IntoIterator<Item = Vec<Element>>>(iter: I) -> Self {
        TupleSet::new(iter)
    }
}

impl<'a> IntoIterator for &'a TupleSet {
    type Item = &'a Vec<Element>;
    type IntoIter = std::slice::Iter<'a, Vec<Element>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for TupleSet {
    /// `{(0),(2)}`; `{()}` for the sentence case.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("(")?;
            for (j, e) in t.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{e}")?;
            }
            f.write_str(")")?;
        }
        f.write_str("}")
    }
}

/// The equality-and-color pattern of a tuple over a periodic unary structure.
///
/// Position `i` holds an element of block `blocks[i]`; distinct blocks hold
/// distinct elements, and block `b` lies in color class `colors[b]`. Blocks
/// are numbered in order of first occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TupleType {
    pub blocks: Vec<usize>,
    pub colors: Vec<usize>,
    pub multiplicity: Count,
}

/// Realizations of a formula with two or more free variables on a periodic
/// unary structure: the union of the tuple types it holds on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolicSet {
    pub(crate) arity: usize,
    pub(crate) classes: Vec<PeriodicSet>,
    pub(crate) types: Vec<TupleType>,
}

impl SymbolicSet {
    pub fn types(&self) -> &[TupleType] {
        &self.types
    }

    fn pattern(&self, t: &[Element]) -> (Vec<usize>, Vec<usize>) {
        let mut firsts: Vec<Element> = Vec::new();
        let mut blocks = Vec::with_capacity(t.len());
        for &e in t {
            let b = firsts.iter().position(|&x| x == e).unwrap_or_else(|| {
                firsts.push(e);
                firsts.len() - 1
            });
            blocks.push(b);
        }
        let colors = firsts
            .iter()
            .map(|&e| {
                self.classes
                    .iter()
                    .position(|c| c.contains(e))
                    .expect("color classes partition ℕ")
            })
            .collect();
        (blocks, colors)
    }

    pub fn contains(&self, t: &[Element]) -> bool {
        if t.len() != self.arity {
            return false;
        }
        let (blocks, colors) = self.pattern(t);
        self.types.iter().any(|ty| ty.blocks == blocks && ty.colors == colors)
    }

    pub fn count(&self) -> Count {
        self.types.iter().map(|t| t.multiplicity).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RealizationSet {
    /// Finite backend, or a sentence on either backend.
    Explicit { arity: usize, tuples: TupleSet },
    /// Periodic backend, one free variable.
    Periodic(PeriodicSet),
    /// Periodic backend, two or more free variables.
    Symbolic(SymbolicSet),
}

impl RealizationSet {
    pub fn arity(&self) -> usize {
        match self {
            RealizationSet::Explicit { arity, .. } => *arity,
            RealizationSet::Periodic(_) => 1,
            RealizationSet::Symbolic(s) => s.arity,
        }
    }

    pub fn contains(&self, t: &[Element]) -> bool {
        match self {
            RealizationSet::Explicit { tuples, .. } => tuples.contains(t),
            RealizationSet::Periodic(s) => t.len() == 1 && s.contains(t[0]),
            RealizationSet::Symbolic(s) => s.contains(t),
        }
    }

    pub fn count(&self) -> Count {
        match self {
            RealizationSet::Explicit { tuples, .. } => Count::Finite(tuples.len() as u64),
            RealizationSet::Periodic(s) => s.cardinality(),
            RealizationSet::Symbolic(s) => s.count(),
        }
    }

    /// Box bound from the periodic certificate: when the set is finite all
    /// entries of all members are below it, and when it is infinite some
    /// member has an entry at or above it.
    pub fn finite_bound(&self) -> usize {
        match self {
            RealizationSet::Explicit { tuples, .. } => {
                tuples.iter().flat_map(|t| t.iter().map(|&e| e + 1)).max().unwrap_or(0)
            }
            RealizationSet::Periodic(s) => s.finite_bound(),
            RealizationSet::Symbolic(s) => s.classes.iter().map(PeriodicSet::finite_bound).max().unwrap_or(0),
        }
    }

    /// When the set is infinite, some member has every entry below this bound
    /// and some entry at or above [`Self::finite_bound`].
    pub fn growth_bound(&self) -> usize {
        match self {
            RealizationSet::Explicit { .. } => self.finite_bound(),
            RealizationSet::Periodic(s) => s.finite_bound() + s.cycle().len(),
            RealizationSet::Symbolic(s) => {
                let period = s
                    .classes
                    .iter()
                    .map(|c| c.cycle().len())
                    .fold(1, |acc, c| acc / gcd(acc, c) * c);
                self.finite_bound() + (s.arity + 1) * period
            }
        }
    }

    /// Members with every entry below `bound`, in lexicographic order.
    pub fn members_below(&self, bound: usize) -> TupleSet {
        match self {
            RealizationSet::Explicit { tuples, .. } => TupleSet::from_sorted(
                tuples
                    .iter()
                    .filter(|t| t.iter().all(|&e| e < bound))
                    .cloned()
                    .collect(),
            ),
            RealizationSet::Periodic(s) => {
                TupleSet::from_sorted((0..bound).filter(|&m| s.contains(m)).map(|m| vec![m]).collect())
            }
            RealizationSet::Symbolic(s) => {
                let mut out = Vec::new();
                let mut t = vec![0; s.arity];
                if bound == 0 {
                    return TupleSet::empty();
                }
                loop {
                    if s.contains(&t) {
                        out.push(t.clone());
                    }
                    let mut i = s.arity;
                    loop {
                        if i == 0 {
                            return TupleSet::from_sorted(out);
                        }
                        i -= 1;
                        t[i] += 1;
                        if t[i] < bound {
                            break;
                        }
                        t[i] = 0;
                    }
                }
            }
        }
    }

    pub fn as_explicit(&self) -> Option<&TupleSet> {
        match self {
            RealizationSet::Explicit { tuples, .. } => Some(tuples),
            _ => None,
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
