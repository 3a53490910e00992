use crate::semantics::TupleSet;
use crate::structures::Element;
use std::collections::{HashMap, HashSet};
use std::fmt;

/// Injective maps `f, g : {0..n-1} → finite sequences` with
/// `t ∈ X ⟺ g(f⁻¹(t)) ∈ Y` and `t ∈ Y ⟺ f(g⁻¹(t)) ∈ X` for every `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjectionWitness {
    pub n: usize,
    pub f: Vec<Vec<Element>>,
    pub g: Vec<Vec<Element>>,
}

impl fmt::Display for InjectionWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |m: &[Vec<Element>]| TupleSet::from_iter(m.iter().cloned()).to_string();
        write!(f, "n={} f={} g={}", self.n, show(&self.f), show(&self.g))
    }
}

fn injective(map: &[Vec<Element>]) -> bool {
    let mut seen = HashSet::with_capacity(map.len());
    map.iter().all(|t| seen.insert(t))
}

/// `(∀t)[t ∈ X ⟺ to(from⁻¹(t)) ∈ Y]`, with `t` ranging over `support`.
fn transports(
    from: &[Vec<Element>],
    to: &[Vec<Element>],
    x: &TupleSet,
    y: &TupleSet,
    support: &HashSet<&Vec<Element>>,
) -> bool {
    let inverse: HashMap<&Vec<Element>, usize> = from.iter().enumerate().map(|(i, t)| (t, i)).collect();
    support
        .iter()
        .all(|t| x.contains(t) == inverse.get(t).is_some_and(|&i| y.contains(&to[i])))
}

impl InjectionWitness {
    /// Checks injectivity, the domains, and both transport conditions. Outside
    /// `X ∪ Y ∪ range f ∪ range g` both sides of each condition are false, so
    /// the quantifier over all sequences is checked on that union only.
    pub fn verify(&self, x: &TupleSet, y: &TupleSet) -> bool {
        if self.f.len() != self.n || self.g.len() != self.n || !injective(&self.f) || !injective(&self.g) {
            return false;
        }
        let support: HashSet<&Vec<Element>> = x.iter().chain(y.iter()).chain(&self.f).chain(&self.g).collect();
        transports(&self.f, &self.g, x, y, &support) && transports(&self.g, &self.f, y, x, &support)
    }
}

/// The canonical candidate (`n = |X|`, `f` lists `X`, `g` lists `Y` padded
/// with sequences outside `Y`), returned only if it verifies; so a witness
/// comes back exactly when `|X| = |Y|`.
pub fn equal_finite_card_witness(x: &TupleSet, y: &TupleSet) -> Option<InjectionWitness> {
    let n = x.len();
    let fresh_base = x.iter().chain(y.iter()).flatten().map(|&e| e + 1).max().unwrap_or(0);
    let f: Vec<Vec<Element>> = x.iter().cloned().collect();
    let g: Vec<Vec<Element>> = y
        .iter()
        .cloned()
        .chain((fresh_base..).map(|e| vec![e]))
        .take(n)
        .collect();
    let w = InjectionWitness { n, f, g };
    w.verify(x, y).then_some(w)
}
