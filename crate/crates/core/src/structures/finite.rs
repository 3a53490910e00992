use super::{Element, Signature, StructureError};
use std::hash::{Hash, Hasher};

/// Relations whose tuple space exceeds this many bits fall back to binary search.
const DENSE_LIMIT: usize = 1 << 24;

#[derive(Debug, Clone)]
struct Relation {
    /// Sorted and deduplicated.
    tuples: Vec<Vec<Element>>,
    /// Membership bitmap indexed by the tuple read as a base-`n` numeral; empty when too large.
    dense: Vec<u64>,
}

impl Relation {
    fn new(mut tuples: Vec<Vec<Element>>, arity: usize, size: usize) -> Self {
        tuples.sort_unstable();
        tuples.dedup();
        let dense = match size.checked_pow(arity as u32) {
            Some(space) if space <= DENSE_LIMIT => {
                let mut bits = vec![0u64; space.div_ceil(64)];
                for t in &tuples {
                    let i = dense_index(t, size);
                    bits[i / 64] |= 1 << (i % 64);
                }
                bits
            }
            _ => Vec::new(),
        };
        Relation { tuples, dense }
    }

    fn contains(&self, tuple: &[Element], size: usize) -> bool {
        if self.dense.is_empty() {
            self.tuples.binary_search_by(|t| t.as_slice().cmp(tuple)).is_ok()
        } else {
            let i = dense_index(tuple, size);
            self.dense[i / 64] >> (i % 64) & 1 == 1
        }
    }
}

fn dense_index(tuple: &[Element], size: usize) -> usize {
    tuple.iter().fold(0, |acc, &e| acc * size + e)
}

/// A structure with universe `{0..size-1}`.
#[derive(Debug, Clone)]
pub struct FiniteStructure {
    signature: Signature,
    size: usize,
    relations: Vec<Relation>,
}

// The bitmap is a function of the tuple list, so equality and hashing look at tuples only.
impl PartialEq for FiniteStructure {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size
            && self.signature == other.signature
            && self
                .relations
                .iter()
                .zip(&other.relations)
                .all(|(a, b)| a.tuples == b.tuples)
    }
}

impl Eq for FiniteStructure {}

impl Hash for FiniteStructure {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.signature.hash(state);
        self.size.hash(state);
        for r in &self.relations {
            r.tuples.hash(state);
        }
    }
}

impl FiniteStructure {
    pub fn new<I, S, T>(signature: Signature, size: usize, interp: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = (S, T)>,
        S: AsRef<str>,
        T: IntoIterator<Item = Vec<Element>>,
    {
        if size == 0 {
            return Err(StructureError::EmptyUniverse);
        }
        let mut raw: Vec<Vec<Vec<Element>>> = vec![Vec::new(); signature.len()];
        for (name, tuples) in interp {
            let name = name.as_ref();
            let idx = signature
                .index_of(name)
                .ok_or_else(|| StructureError::UnknownRelation(name.to_string()))?;
            let arity = signature.relations()[idx].arity;
            for tuple in tuples {
                if tuple.len() != arity {
                    return Err(StructureError::ArityMismatch {
                        relation: name.to_string(),
                        tuple,
                        expected: arity,
                    });
                }
                if tuple.iter().any(|&e| e >= size) {
                    return Err(StructureError::OutOfUniverse {
                        relation: name.to_string(),
                        tuple,
                        size,
                    });
                }
                raw[idx].push(tuple);
            }
        }
        Ok(Self::from_checked(signature, size, raw))
    }

    /// Caller guarantees every tuple fits the signature and universe.
    pub(crate) fn from_checked(signature: Signature, size: usize, raw: Vec<Vec<Vec<Element>>>) -> Self {
        let relations = raw
            .into_iter()
            .zip(signature.relations())
            .map(|(tuples, sym)| Relation::new(tuples, sym.arity, size))
            .collect();
        FiniteStructure {
            signature,
            size,
            relations,
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Canonical (sorted, deduplicated) tuples of the `rel`-th relation.
    pub fn tuples(&self, rel: usize) -> &[Vec<Element>] {
        &self.relations[rel].tuples
    }

    pub fn tuples_of(&self, name: &str) -> Option<&[Vec<Element>]> {
        self.signature.index_of(name).map(|i| self.tuples(i))
    }

    /// Membership test; `tuple` must have the relation's arity and lie in the universe.
    #[inline]
    pub fn holds(&self, rel: usize, tuple: &[Element]) -> bool {
        self.relations[rel].contains(tuple, self.size)
    }

    /// Per-relation tuple lists, ready to feed back into [`FiniteStructure::new`].
    pub fn interpretation(&self) -> impl Iterator<Item = (&str, &[Vec<Element>])> {
        self.signature
            .relations()
            .iter()
            .zip(&self.relations)
            .map(|(sym, r)| (sym.name.as_str(), r.tuples.as_slice()))
    }
}
