use super::{EquivError, Permutation};
use crate::structures::{Element, FiniteStructure, PeriodicUnaryStructure};

/// Per-element incidence counts: for every relation and argument position the
/// number of tuples with the element there, then per relation the number of
/// constant tuples `(e,…,e)`.
pub(crate) fn element_invariants(m: &FiniteStructure) -> Vec<Vec<u32>> {
    let sig = m.signature();
    let width: usize = sig.relations().iter().map(|r| r.arity + 1).sum();
    let mut inv = vec![vec![0u32; width]; m.size()];
    let mut base = 0;
    for (r, sym) in sig.relations().iter().enumerate() {
        for t in m.tuples(r) {
            for (p, &e) in t.iter().enumerate() {
                inv[e][base + p] += 1;
            }
            if t.iter().all(|&e| e == t[0]) {
                inv[t[0]][base + sym.arity] += 1;
            }
        }
        base += sym.arity + 1;
    }
    inv
}

/// Isomorphism-invariant summary used to bucket structures.
pub(crate) fn structure_invariant(m: &FiniteStructure) -> (usize, Vec<usize>, Vec<Vec<u32>>) {
    let mut inv = element_invariants(m);
    inv.sort_unstable();
    let sizes = (0..m.signature().len()).map(|r| m.tuples(r).len()).collect();
    (m.size(), sizes, inv)
}

struct Search<'a> {
    n: &'a FiniteStructure,
    order: Vec<Element>,
    candidates: Vec<Vec<Element>>,
    /// Tuples of M whose last element in `order` is `order[k]`.
    checks: Vec<Vec<(usize, &'a [Element])>>,
    image: Vec<Element>,
    used: Vec<bool>,
    nodes: u64,
    budget: Option<u64>,
}

impl Search<'_> {
    fn run(&mut self, k: usize) -> Result<bool, EquivError> {
        if k == self.order.len() {
            return Ok(true);
        }
        let x = self.order[k];
        for i in 0..self.candidates[k].len() {
            let y = self.candidates[k][i];
            if self.used[y] {
                continue;
            }
            self.nodes += 1;
            if self.budget.is_some_and(|b| self.nodes > b) {
                return Err(EquivError::BudgetExceeded(self.budget.unwrap_or_default()));
            }
            self.image[x] = y;
            let ok = self.checks[k].iter().all(|&(r, t)| {
                let mut buf = [0; 8];
                if t.len() <= buf.len() {
                    for (slot, &e) in buf.iter_mut().zip(t) {
                        *slot = self.image[e];
                    }
                    self.n.holds(r, &buf[..t.len()])
                } else {
                    let mapped: Vec<_> = t.iter().map(|&e| self.image[e]).collect();
                    self.n.holds(r, &mapped)
                }
            });
            if ok {
                self.used[y] = true;
                if self.run(k + 1)? {
                    return Ok(true);
                }
                self.used[y] = false;
            }
        }
        Ok(false)
    }
}

/// An isomorphism `M → N` if one exists.
pub(crate) fn finite_isomorphism(
    m: &FiniteStructure,
    n: &FiniteStructure,
    budget: Option<u64>,
) -> Result<Option<Permutation>, EquivError> {
    if m.size() != n.size() || (0..m.signature().len()).any(|r| m.tuples(r).len() != n.tuples(r).len()) {
        return Ok(None);
    }
    let (inv_m, inv_n) = (element_invariants(m), element_invariants(n));
    let (mut sorted_m, mut sorted_n) = (inv_m.clone(), inv_n.clone());
    sorted_m.sort_unstable();
    sorted_n.sort_unstable();
    if sorted_m != sorted_n {
        return Ok(None);
    }
    let size = m.size();
    let cands: Vec<Vec<Element>> = (0..size)
        .map(|x| (0..size).filter(|&y| inv_m[x] == inv_n[y]).collect())
        .collect();
    let mut order: Vec<Element> = (0..size).collect();
    order.sort_by_key(|&x| (cands[x].len(), x));
    let mut pos = vec![0; size];
    for (k, &x) in order.iter().enumerate() {
        pos[x] = k;
    }
    let mut checks = vec![Vec::new(); size];
    for r in 0..m.signature().len() {
        for t in m.tuples(r) {
            let last = t.iter().map(|&e| pos[e]).max().expect("arity is positive");
            checks[last].push((r, t.as_slice()));
        }
    }
    let mut search = Search {
        n,
        candidates: order.iter().map(|&x| cands[x].clone()).collect(),
        order,
        checks,
        image: vec![0; size],
        used: vec![false; size],
        nodes: 0,
        budget,
    };
    // Every tuple of M maps into N and the relations have equal sizes, so the
    // injective map found is onto each relation.
    Ok(search.run(0)?.then_some(Permutation::Listed(search.image)))
}

/// Pairs the color classes of `m` and `n` when they agree in membership and size.
pub(crate) fn periodic_isomorphism(m: &PeriodicUnaryStructure, n: &PeriodicUnaryStructure) -> Option<Permutation> {
    let (cm, cn) = (m.colors(), n.colors());
    if cm.len() != cn.len() {
        return None;
    }
    let mut pairs = Vec::with_capacity(cm.len());
    for (a, b) in cm.iter().zip(cn) {
        if a.membership != b.membership || a.size != b.size {
            return None;
        }
        pairs.push((a.members.clone(), b.members.clone()));
    }
    Some(Permutation::ClassWise(pairs))
}
