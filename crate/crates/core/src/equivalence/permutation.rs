use super::EquivError;
use crate::structures::{Element, FiniteStructure, PeriodicSet, PeriodicUnaryStructure, Structure};
use std::fmt;

/// A bijection of a universe.
///
/// `Listed` gives the images of `0..len`; on ℕ it is the identity from `len`
/// on, which makes it finitely supported. `ClassWise` pairs up source and
/// target sets and maps the `k`-th member of each source to the `k`-th member
/// of its target; the sources (and the targets) partition ℕ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Permutation {
    Listed(Vec<Element>),
    ClassWise(Vec<(PeriodicSet, PeriodicSet)>),
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation::Listed((0..n).collect())
    }

    pub fn transposition(n: usize, a: Element, b: Element) -> Self {
        let mut images: Vec<Element> = (0..n).collect();
        images.swap(a, b);
        Permutation::Listed(images)
    }

    /// Fails unless `images` is a permutation of `0..images.len()`.
    pub fn from_images(images: Vec<Element>) -> Result<Self, EquivError> {
        let mut seen = vec![false; images.len()];
        for &e in &images {
            if e >= images.len() || std::mem::replace(&mut seen[e], true) {
                return Err(EquivError::NotABijection(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Permutation::Listed(images))
    }

    /// Fails unless the sources and the targets each partition ℕ and paired
    /// sets have the same cardinality.
    pub fn class_wise(pairs: Vec<(PeriodicSet, PeriodicSet)>) -> Result<Self, EquivError> {
        for (s, t) in &pairs {
            if s.cardinality() != t.cardinality() {
                return Err(EquivError::NotABijection(format!("{s} and {t} differ in size")));
            }
        }
        for side in [0, 1] {
            let sets: Vec<&PeriodicSet> = pairs.iter().map(|p| if side == 0 { &p.0 } else { &p.1 }).collect();
            let mut union = PeriodicSet::empty();
            for (i, s) in sets.iter().enumerate() {
                if sets[..i].iter().any(|t| !t.intersection(s).is_empty()) {
                    return Err(EquivError::NotABijection("classes overlap".into()));
                }
                union = union.union(s);
            }
            if union != PeriodicSet::full() {
                return Err(EquivError::NotABijection("classes do not cover ℕ".into()));
            }
        }
        Ok(Permutation::ClassWise(pairs))
    }

    /// All permutations of `0..n` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        let mut next = Some((0..n).collect::<Vec<_>>());
        std::iter::from_fn(move || {
            let cur = next.take()?;
            let mut p = cur.clone();
            if let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) {
                let j = (i..p.len())
                    .rev()
                    .find(|&j| p[j] > p[i - 1])
                    .expect("suffix has a larger entry");
                p.swap(i - 1, j);
                p[i..].reverse();
                next = Some(p);
            }
            Some(Permutation::Listed(cur))
        })
    }

    pub fn apply(&self, m: Element) -> Element {
        match self {
            Permutation::Listed(images) => images.get(m).copied().unwrap_or(m),
            Permutation::ClassWise(pairs) => {
                let (s, t) = pairs.iter().find(|(s, _)| s.contains(m)).expect("sources partition ℕ");
                t.nth(s.rank(m)).expect("paired classes have equal size")
            }
        }
    }

    pub fn inverse(&self) -> Permutation {
        match self {
            Permutation::Listed(images) => {
                let mut inv = vec![0; images.len()];
                for (i, &e) in images.iter().enumerate() {
                    inv[e] = i;
                }
                Permutation::Listed(inv)
            }
            Permutation::ClassWise(pairs) => {
                Permutation::ClassWise(pairs.iter().map(|(s, t)| (t.clone(), s.clone())).collect())
            }
        }
    }

    /// `self ∘ other` (apply `other` first). Only defined for two listed permutations.
    pub fn compose(&self, other: &Permutation) -> Option<Permutation> {
        match (self, other) {
            (Permutation::Listed(a), Permutation::Listed(b)) => {
                let n = a.len().max(b.len());
                Some(Permutation::Listed(
                    (0..n).map(|m| self.apply(other.apply(m))).collect(),
                ))
            }
            _ => None,
        }
    }

    /// Images of `0..len` for a listed permutation.
    pub fn images(&self) -> Option<&[Element]> {
        match self {
            Permutation::Listed(images) => Some(images),
            Permutation::ClassWise(_) => None,
        }
    }
}

impl fmt::Display for Permutation {
    /// `[1,0,2]` or `{prefix:.. cycle:.. -> prefix:.. cycle:.., ...}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Permutation::Listed(images) => {
                let parts: Vec<String> = images.iter().map(|e| e.to_string()).collect();
                write!(f, "[{}]", parts.join(","))
            }
            Permutation::ClassWise(pairs) => {
                let parts: Vec<String> = pairs.iter().map(|(s, t)| format!("{s} -> {t}")).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
        }
    }
}

/// The structure with `R^{act(g,M)} = { g(t) : t ∈ R^M }`.
pub fn act(g: &Permutation, m: &Structure) -> Result<Structure, EquivError> {
    match m {
        Structure::Finite(f) => act_finite(g, f).map(Structure::Finite),
        Structure::Periodic(p) => act_periodic(g, p).map(Structure::Periodic),
    }
}

fn act_finite(g: &Permutation, m: &FiniteStructure) -> Result<FiniteStructure, EquivError> {
    let images = match g.images() {
        Some(images) if images.len() == m.size() => images,
        _ => {
            return Err(EquivError::NotABijection(format!(
                "{g} is not a permutation of a universe of size {}",
                m.size()
            )))
        }
    };
    let raw = (0..m.signature().len())
        .map(|r| {
            m.tuples(r)
                .iter()
                .map(|t| t.iter().map(|&e| images[e]).collect())
                .collect()
        })
        .collect();
    Ok(FiniteStructure::from_checked(m.signature().clone(), m.size(), raw))
}

fn act_periodic(g: &Permutation, m: &PeriodicUnaryStructure) -> Result<PeriodicUnaryStructure, EquivError> {
    let sets = match g {
        Permutation::Listed(images) => {
            let inv = g.inverse();
            m.sets()
                .iter()
                .map(|s| {
                    let start = images.len().max(s.prefix().len());
                    let prefix = (0..start).map(|t| s.contains(inv.apply(t))).collect();
                    let cycle = (start..start + s.cycle().len()).map(|t| s.contains(t)).collect();
                    PeriodicSet::new(prefix, cycle).expect("cycle is nonempty")
                })
                .collect()
        }
        Permutation::ClassWise(pairs) => m
            .sets()
            .iter()
            .map(|s| {
                let mut image = PeriodicSet::empty();
                for (src, tgt) in pairs {
                    let inside = src.intersection(s);
                    if inside == *src {
                        image = image.union(tgt);
                    } else if !inside.is_empty() {
                        return Err(EquivError::NotABijection(format!(
                            "class {src} is split by a relation, so the image is not periodic in general"
                        )));
                    }
                }
                Ok(image)
            })
            .collect::<Result<_, _>>()?,
    };
    Ok(PeriodicUnaryStructure::from_sets(m.signature().clone(), sets))
}
