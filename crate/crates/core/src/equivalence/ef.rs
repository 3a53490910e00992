use super::EquivError;
use crate::structures::{Element, FiniteStructure, PeriodicUnaryStructure};
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// One round of a spoiler line: spoiler pebbles `element` on `side`, the
/// duplicator answers with `response` on the other side. `None` means no
/// answer keeps the pebbled map a partial isomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub side: Side,
    pub element: Element,
    pub response: Option<Element>,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.side, self.element)?;
        match self.response {
            Some(r) => write!(f, " / {r}"),
            None => f.write_str(" / -"),
        }
    }
}

/// Classes of elements `x, y` for which the transposition `(x y)` is an automorphism.
fn swap_classes(m: &FiniteStructure) -> Vec<usize> {
    let n = m.size();
    let mut class: Vec<usize> = (0..n).collect();
    for x in 0..n {
        if class[x] != x {
            continue;
        }
        for y in x + 1..n {
            if class[y] != y {
                continue;
            }
            let swap = |e: Element| {
                if e == x {
                    y
                } else if e == y {
                    x
                } else {
                    e
                }
            };
            let automorphism = (0..m.signature().len()).all(|r| {
                m.tuples(r)
                    .iter()
                    .all(|t| m.holds(r, &t.iter().map(|&e| swap(e)).collect::<Vec<_>>()))
            });
            if automorphism {
                class[y] = x;
            }
        }
    }
    class
}

struct Game<'a> {
    m: &'a FiniteStructure,
    n: &'a FiniteStructure,
    equality: bool,
    classes: [Vec<usize>; 2],
    memo: HashMap<(Vec<(Element, Element)>, u32), bool>,
    nodes: u64,
    budget: Option<u64>,
}

impl Game<'_> {
    fn structure(&self, side: Side) -> &FiniteStructure {
        match side {
            Side::Left => self.m,
            Side::Right => self.n,
        }
    }

    /// Pebbled elements plus one unpebbled element per swap class.
    fn candidates(&self, side: Side, pebbles: &[(Element, Element)]) -> Vec<Element> {
        let pick = |p: &(Element, Element)| if side == Side::Left { p.0 } else { p.1 };
        let pebbled: Vec<Element> = pebbles.iter().map(pick).collect();
        let classes = &self.classes[side as usize];
        let mut out = pebbled.clone();
        out.sort_unstable();
        out.dedup();
        let mut seen = Vec::new();
        for e in 0..self.structure(side).size() {
            if !pebbled.contains(&e) && !seen.contains(&classes[e]) {
                seen.push(classes[e]);
                out.push(e);
            }
        }
        out
    }

    /// Whether the last pebble pair keeps the pebbled map a partial isomorphism.
    fn consistent(&self, pebbles: &[(Element, Element)]) -> bool {
        let last = pebbles.len() - 1;
        let (a, b) = pebbles[last];
        if self.equality && pebbles.iter().any(|&(x, y)| (x == a) != (y == b)) {
            return false;
        }
        for (r, sym) in self.m.signature().relations().iter().enumerate() {
            let k = sym.arity;
            let mut idx = vec![0; k];
            loop {
                if idx.contains(&last) {
                    let tm: Vec<Element> = idx.iter().map(|&i| pebbles[i].0).collect();
                    let tn: Vec<Element> = idx.iter().map(|&i| pebbles[i].1).collect();
                    if self.m.holds(r, &tm) != self.n.holds(r, &tn) {
                        return false;
                    }
                }
                if !crate::semantics::next_tuple(&mut idx, pebbles.len()) {
                    break;
                }
            }
        }
        true
    }

    fn extend(pebbles: &[(Element, Element)], side: Side, x: Element, y: Element) -> Vec<(Element, Element)> {
        let mut next = pebbles.to_vec();
        next.push(if side == Side::Left { (x, y) } else { (y, x) });
        next
    }

    fn duplicator_wins(&mut self, pebbles: &[(Element, Element)], rounds: u32) -> Result<bool, EquivError> {
        if rounds == 0 {
            return Ok(true);
        }
        let mut key = pebbles.to_vec();
        key.sort_unstable();
        key.dedup();
        if let Some(&v) = self.memo.get(&(key.clone(), rounds)) {
            return Ok(v);
        }
        self.nodes += 1;
        if let Some(b) = self.budget.filter(|&b| self.nodes > b) {
            return Err(EquivError::BudgetExceeded(b));
        }
        let mut result = true;
        'spoiler: for side in [Side::Left, Side::Right] {
            for x in self.candidates(side, pebbles) {
                if self.answer(pebbles, rounds, side, x)?.is_none() {
                    result = false;
                    break 'spoiler;
                }
            }
        }
        self.memo.insert((key, rounds), result);
        Ok(result)
    }

    /// A winning duplicator answer to spoiler playing `x` on `side`.
    fn answer(
        &mut self,
        pebbles: &[(Element, Element)],
        rounds: u32,
        side: Side,
        x: Element,
    ) -> Result<Option<Element>, EquivError> {
        let other = if side == Side::Left { Side::Right } else { Side::Left };
        for y in self.candidates(other, pebbles) {
            let next = Self::extend(pebbles, side, x, y);
            if self.consistent(&next) && self.duplicator_wins(&next, rounds - 1)? {
                return Ok(Some(y));
            }
        }
        Ok(None)
    }

    /// A principal line of spoiler's winning strategy from a lost position.
    fn spoiler_line(&mut self, pebbles: &[(Element, Element)], rounds: u32) -> Result<Vec<Move>, EquivError> {
        for side in [Side::Left, Side::Right] {
            for x in self.candidates(side, pebbles) {
                if self.answer(pebbles, rounds, side, x)?.is_some() {
                    continue;
                }
                let other = if side == Side::Left { Side::Right } else { Side::Left };
                let responses = self.candidates(other, pebbles);
                let consistent = responses
                    .iter()
                    .copied()
                    .find(|&y| self.consistent(&Self::extend(pebbles, side, x, y)));
                let mut line = vec![Move {
                    side,
                    element: x,
                    response: consistent,
                }];
                if let Some(y) = consistent {
                    line.extend(self.spoiler_line(&Self::extend(pebbles, side, x, y), rounds - 1)?);
                }
                return Ok(line);
            }
        }
        unreachable!("spoiler_line is only called on positions the duplicator loses")
    }
}

pub(crate) fn finite_game(
    m: &FiniteStructure,
    n: &FiniteStructure,
    q: u32,
    budget: Option<u64>,
) -> Result<Option<Vec<Move>>, EquivError> {
    let mut game = Game {
        m,
        n,
        equality: m.signature().with_equality(),
        classes: [swap_classes(m), swap_classes(n)],
        memo: HashMap::new(),
        nodes: 0,
        budget,
    };
    if game.duplicator_wins(&[], q)? {
        Ok(None)
    } else {
        game.spoiler_line(&[], q).map(Some)
    }
}

/// Decides the game from color-class sizes: with equality each class size
/// matters up to `q`, without it only which classes are nonempty.
pub(crate) fn periodic_game(m: &PeriodicUnaryStructure, n: &PeriodicUnaryStructure, q: u32) -> Option<Vec<Move>> {
    if q == 0 {
        return None;
    }
    let cap = if m.signature().with_equality() { q as u64 } else { 1 };
    let size_of = |s: &PeriodicUnaryStructure, membership: &[bool]| {
        s.colors()
            .iter()
            .find(|c| c.membership == membership)
            .map_or(0, |c| c.size.capped(cap))
    };
    let memberships = m.colors().iter().chain(n.colors()).map(|c| &c.membership);
    for membership in memberships {
        let (a, b) = (size_of(m, membership), size_of(n, membership));
        if a == b {
            continue;
        }
        let (side, big, small) = if a > b { (Side::Left, m, n) } else { (Side::Right, n, m) };
        let class_of = |s: &PeriodicUnaryStructure| {
            s.colors()
                .iter()
                .find(|c| &c.membership == membership)
                .map(|c| c.members.clone())
        };
        let big_class = class_of(big).expect("the larger class is nonempty");
        let small_class = class_of(small);
        let picks = a.min(b) + 1;
        return Some(
            (0..picks)
                .map(|i| Move {
                    side,
                    element: big_class.nth(i).expect("class has enough members"),
                    response: if i + 1 < picks {
                        small_class.as_ref().and_then(|c| c.nth(i))
                    } else {
                        None
                    },
                })
                .collect(),
        );
    }
    None
}
