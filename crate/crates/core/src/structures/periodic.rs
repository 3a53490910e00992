use super::{Count, Element, Signature, StructureError};
use std::fmt;

/// An ultimately periodic subset of ℕ: `m` is a member iff `prefix[m]` for
/// `m < p`, else `cycle[(m - p) mod c]`.
///
/// Values are always in normal form (primitive cycle, shortest prefix), so two
/// sets are equal as sets exactly when they are equal as values.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeriodicSet {
    prefix: Vec<bool>,
    cycle: Vec<bool>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl PeriodicSet {
    pub fn new(mut prefix: Vec<bool>, mut cycle: Vec<bool>) -> Result<Self, StructureError> {
        if cycle.is_empty() {
            return Err(StructureError::EmptyCycle);
        }
        let c = cycle.len();
        if let Some(d) = (1..=c).find(|&d| c.is_multiple_of(d) && (d..c).all(|i| cycle[i] == cycle[i - d])) {
            cycle.truncate(d);
        }
        while let (Some(&last), Some(&tail)) = (prefix.last(), cycle.last()) {
            if last != tail {
                break;
            }
            prefix.pop();
            cycle.rotate_right(1);
        }
        Ok(PeriodicSet { prefix, cycle })
    }

    /// Parses bit strings such as `("110", "01")`.
    pub fn from_bits(prefix: &str, cycle: &str) -> Result<Self, String> {
        let bits = |s: &str| -> Result<Vec<bool>, String> {
            s.chars()
                .map(|ch| match ch {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(format!("invalid bit `{other}`")),
                })
                .collect()
        };
        Self::new(bits(prefix)?, bits(cycle)?).map_err(|e| e.to_string())
    }

    pub fn empty() -> Self {
        PeriodicSet {
            prefix: Vec::new(),
            cycle: vec![false],
        }
    }

    pub fn full() -> Self {
        PeriodicSet {
            prefix: Vec::new(),
            cycle: vec![true],
        }
    }

    /// The finite set with the given members.
    pub fn finite<I: IntoIterator<Item = Element>>(elements: I) -> Self {
        let mut prefix = Vec::new();
        for e in elements {
            if e >= prefix.len() {
                prefix.resize(e + 1, false);
            }
            prefix[e] = true;
        }
        Self::new(prefix, vec![false]).expect("cycle is nonempty")
    }

    pub fn prefix(&self) -> &[bool] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[bool] {
        &self.cycle
    }

    /// `(prefix, cycle)` as `0`/`1` strings.
    pub fn to_bits(&self) -> (String, String) {
        let s = |v: &[bool]| v.iter().map(|&b| if b { '1' } else { '0' }).collect();
        (s(&self.prefix), s(&self.cycle))
    }

    #[inline]
    pub fn contains(&self, m: Element) -> bool {
        match self.prefix.get(m) {
            Some(&b) => b,
            None => self.cycle[(m - self.prefix.len()) % self.cycle.len()],
        }
    }

    pub fn cardinality(&self) -> Count {
        if self.cycle.iter().any(|&b| b) {
            Count::Infinite
        } else {
            Count::Finite(self.prefix.iter().filter(|&&b| b).count() as u64)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cardinality() == Count::ZERO
    }

    /// Every member is below this bound when the set is finite; an infinite
    /// set has members at or above it.
    pub fn finite_bound(&self) -> usize {
        self.prefix.len()
    }

    pub fn complement(&self) -> Self {
        PeriodicSet {
            prefix: self.prefix.iter().map(|b| !b).collect(),
            cycle: self.cycle.iter().map(|b| !b).collect(),
        }
    }

    fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        let p = self.prefix.len().max(other.prefix.len());
        let (a, b) = (self.cycle.len(), other.cycle.len());
        let c = a / gcd(a, b) * b;
        let bit = |m| op(self.contains(m), other.contains(m));
        Self::new((0..p).map(bit).collect(), (p..p + c).map(bit).collect()).expect("cycle is nonempty")
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, |x, y| x || y)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.combine(other, |x, y| x && y)
    }

    /// Number of members strictly below `m`.
    pub fn rank(&self, m: Element) -> u64 {
        let ones = |bits: &[bool]| bits.iter().filter(|&&b| b).count() as u64;
        let p = self.prefix.len();
        if m <= p {
            return ones(&self.prefix[..m]);
        }
        let c = self.cycle.len();
        let (full, part) = ((m - p) / c, (m - p) % c);
        ones(&self.prefix) + full as u64 * ones(&self.cycle) + ones(&self.cycle[..part])
    }

    /// The `k`-th smallest member (0-based).
    pub fn nth(&self, k: u64) -> Option<Element> {
        let mut k = k;
        for (m, &b) in self.prefix.iter().enumerate() {
            if b {
                if k == 0 {
                    return Some(m);
                }
                k -= 1;
            }
        }
        let per_cycle = self.cycle.iter().filter(|&&b| b).count() as u64;
        if per_cycle == 0 {
            return None;
        }
        let (laps, r) = (k / per_cycle, k % per_cycle);
        let offset = self
            .cycle
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .nth(r as usize)
            .map(|(j, _)| j)?;
        Some(self.prefix.len() + laps as usize * self.cycle.len() + offset)
    }

    /// Members in increasing order; does not terminate on its own for infinite sets.
    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        let finite = !self.cardinality().is_infinite();
        let end = if finite { self.prefix.len() } else { usize::MAX };
        (0..end).filter(move |&m| self.contains(m))
    }
}

impl fmt::Debug for PeriodicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PeriodicSet {
    /// `prefix:110 cycle:01`, the structure-document syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, c) = self.to_bits();
        write!(f, "prefix:{p} cycle:{c}")
    }
}

/// A nonempty intersection of relations and complements, one choice per relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColorClass {
    /// `membership[i]` says whether the class lies inside relation `i`.
    pub membership: Vec<bool>,
    pub members: PeriodicSet,
    pub size: Count,
}

/// A structure with universe ℕ and unary relations given by periodic sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodicUnaryStructure {
    signature: Signature,
    sets: Vec<PeriodicSet>,
    colors: Vec<ColorClass>,
}

impl PeriodicUnaryStructure {
    /// Relations missing from `interp` are empty.
    pub fn new<I, S>(signature: Signature, interp: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = (S, PeriodicSet)>,
        S: AsRef<str>,
    {
        if let Some(r) = signature.relations().iter().find(|r| r.arity != 1) {
            return Err(StructureError::NotUnary {
                relation: r.name.clone(),
                arity: r.arity,
            });
        }
        let mut sets = vec![PeriodicSet::empty(); signature.len()];
        for (name, set) in interp {
            let idx = signature
                .index_of(name.as_ref())
                .ok_or_else(|| StructureError::UnknownRelation(name.as_ref().to_string()))?;
            sets[idx] = set;
        }
        Ok(Self::from_sets(signature, sets))
    }

    pub(crate) fn from_sets(signature: Signature, sets: Vec<PeriodicSet>) -> Self {
        debug_assert!(signature.is_unary() && signature.len() == sets.len());
        let mut colors = vec![(Vec::new(), PeriodicSet::full())];
        for set in &sets {
            let complement = set.complement();
            colors = colors
                .into_iter()
                .flat_map(|(mask, members): (Vec<bool>, PeriodicSet)| {
                    let inside = members.intersection(set);
                    let outside = members.intersection(&complement);
                    let mut with = mask.clone();
                    with.push(true);
                    let mut without = mask;
                    without.push(false);
                    [(without, outside), (with, inside)]
                })
                .filter(|(_, s)| !s.is_empty())
                .collect();
        }
        let colors = colors
            .into_iter()
            .map(|(membership, members)| ColorClass {
                size: members.cardinality(),
                membership,
                members,
            })
            .collect();
        PeriodicUnaryStructure {
            signature,
            sets,
            colors,
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn set(&self, rel: usize) -> &PeriodicSet {
        &self.sets[rel]
    }

    pub fn set_of(&self, name: &str) -> Option<&PeriodicSet> {
        self.signature.index_of(name).map(|i| &self.sets[i])
    }

    pub fn sets(&self) -> &[PeriodicSet] {
        &self.sets
    }

    #[inline]
    pub fn holds(&self, rel: usize, m: Element) -> bool {
        self.sets[rel].contains(m)
    }

    /// Nonempty color classes, ordered by membership vector.
    pub fn colors(&self) -> &[ColorClass] {
        &self.colors
    }

    pub fn color_of(&self, m: Element) -> usize {
        self.colors
            .iter()
            .position(|c| c.members.contains(m))
            .expect("color classes partition ℕ")
    }

    /// Every element of a finite color class lies below this bound.
    pub fn finite_bound(&self) -> usize {
        self.colors.iter().map(|c| c.members.finite_bound()).max().unwrap_or(0)
    }

    /// Structure-wide period: every color class is periodic with this period above [`Self::finite_bound`].
    pub fn period(&self) -> usize {
        self.sets
            .iter()
            .map(|s| s.cycle().len())
            .fold(1, |acc, c| acc / gcd(acc, c) * c)
    }
}
