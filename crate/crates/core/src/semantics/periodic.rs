use super::realization::{RealizationSet, SymbolicSet, TupleSet, TupleType};
use crate::formulas::{Formula, Var};
use crate::structures::{Count, Element, PeriodicSet, PeriodicUnaryStructure};
use std::collections::HashMap;

#[derive(Clone, Copy)]
enum Slot {
    Param(usize),
    Block(usize),
}

pub(crate) struct Evaluator<'a, 'f> {
    m: &'a PeriodicUnaryStructure,
    rel_index: HashMap<&'a str, usize>,
    closed_counts: HashMap<&'f Formula, Option<Count>>,
}

impl<'a, 'f> Evaluator<'a, 'f> {
    pub(crate) fn new(m: &'a PeriodicUnaryStructure) -> Self {
        let rel_index = m
            .signature()
            .relations()
            .iter()
            .enumerate()
            .map(|(i, r)| (r.name.as_str(), i))
            .collect();
        Evaluator {
            m,
            rel_index,
            closed_counts: HashMap::new(),
        }
    }

    pub(crate) fn satisfies(&mut self, phi: &'f Formula, free: &[Var], values: &[Element]) -> bool {
        let mut env = vec![None; phi.var_span()];
        for (v, &e) in free.iter().zip(values) {
            env[v.index()] = Some(e);
        }
        self.eval(phi, &mut env)
    }

    pub(crate) fn realizations(&mut self, phi: &'f Formula) -> RealizationSet {
        let free = phi.free_vars();
        let vars = free.as_slice();
        let mut env = vec![None; phi.var_span()];
        match vars.len() {
            0 => {
                let tuples = if self.eval(phi, &mut env) {
                    TupleSet::from_sorted(vec![Vec::new()])
                } else {
                    TupleSet::empty()
                };
                RealizationSet::Explicit { arity: 0, tuples }
            }
            1 => {
                let mut set = PeriodicSet::empty();
                for class in self.m.colors() {
                    let rep = class.members.nth(0).expect("color classes are nonempty");
                    env[vars[0].index()] = Some(rep);
                    if self.eval(phi, &mut env) {
                        set = set.union(&class.members);
                    }
                }
                RealizationSet::Periodic(set)
            }
            arity => {
                let mut types = Vec::new();
                self.for_each_type(arity, &[], &mut |ev, rep, blocks, colors, multiplicity| {
                    for (v, &e) in vars.iter().zip(rep) {
                        env[v.index()] = Some(e);
                    }
                    if ev.eval(phi, &mut env) {
                        types.push(TupleType {
                            blocks: blocks.to_vec(),
                            colors: colors.to_vec(),
                            multiplicity,
                        });
                    }
                });
                RealizationSet::Symbolic(SymbolicSet {
                    arity,
                    classes: self.m.colors().iter().map(|c| c.members.clone()).collect(),
                    types,
                })
            }
        }
    }

    /// Distinct values currently named by `env`, ignoring the slots in `skip`.
    fn named(env: &[Option<Element>], skip: &[Var]) -> Vec<Element> {
        let mut out: Vec<Element> = env
            .iter()
            .enumerate()
            .filter(|(i, _)| !skip.iter().any(|v| v.index() == *i))
            .filter_map(|(_, e)| *e)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn witnesses(&self, named: &[Element]) -> Vec<Element> {
        let mut out = named.to_vec();
        for class in self.m.colors() {
            if let Some(fresh) = class.members.iter().find(|e| named.binary_search(e).is_err()) {
                out.push(fresh);
            }
        }
        out
    }

    fn eval(&mut self, phi: &'f Formula, env: &mut [Option<Element>]) -> bool {
        match phi {
            Formula::Atom { relation, args } => {
                let rel = self.rel_index[relation.as_str()];
                self.m
                    .holds(rel, env[args[0].index()].expect("free variables are assigned"))
            }
            Formula::Equal(a, b) => env[a.index()] == env[b.index()],
            Formula::Not(f) => !self.eval(f, env),
            Formula::And(fs) => fs.iter().all(|f| self.eval(f, env)),
            Formula::Or(fs) => fs.iter().any(|f| self.eval(f, env)),
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                let want = matches!(phi, Formula::Exists(..));
                let saved = env[v.index()];
                let named = Self::named(env, &[*v]);
                let mut result = !want;
                for w in self.witnesses(&named) {
                    env[v.index()] = Some(w);
                    if self.eval(f, env) == want {
                        result = want;
                        break;
                    }
                }
                env[v.index()] = saved;
                result
            }
            Formula::ExistsAtLeast { count, vars, body } => {
                if *count == 0 {
                    return true;
                }
                let mut vars = vars.clone();
                vars.sort_unstable();
                vars.dedup();
                let key: &'f Formula = body;
                let cached = match self.closed_counts.get(key) {
                    Some(c) => *c,
                    None => {
                        let closed = body.free_vars().as_slice().iter().all(|v| vars.contains(v));
                        let c = closed.then(|| self.count_tuples(body, &vars, env));
                        self.closed_counts.insert(key, c);
                        c
                    }
                };
                cached
                    .unwrap_or_else(|| self.count_tuples(body, &vars, env))
                    .at_least(*count)
            }
        }
    }

    fn count_tuples(&mut self, body: &'f Formula, vars: &[Var], env: &mut [Option<Element>]) -> Count {
        let saved: Vec<_> = vars.iter().map(|v| env[v.index()]).collect();
        let params = Self::named(env, vars);
        let mut total = Count::ZERO;
        self.for_each_type(vars.len(), &params, &mut |ev, rep, _, _, multiplicity| {
            for (v, &e) in vars.iter().zip(rep) {
                env[v.index()] = Some(e);
            }
            if ev.eval(body, env) {
                total = total + multiplicity;
            }
        });
        for (v, e) in vars.iter().zip(saved) {
            env[v.index()] = e;
        }
        total
    }

    /// Enumerates the types of `arity`-tuples relative to the distinct
    /// elements `params`: each position either equals a parameter or falls in
    /// a block of fresh elements with a color. For every type with at least
    /// one realization, `visit` gets a representative tuple, the block and
    /// color vectors (parameter positions get block `usize::MAX`) and the
    /// number of tuples of that type.
    fn for_each_type(
        &mut self,
        arity: usize,
        params: &[Element],
        visit: &mut dyn FnMut(&mut Self, &[Element], &[usize], &[usize], Count),
    ) {
        let mut slots = Vec::with_capacity(arity);
        let mut block_colors = Vec::new();
        self.types_rec(arity, params, &mut slots, &mut block_colors, visit);
    }

    fn types_rec(
        &mut self,
        arity: usize,
        params: &[Element],
        slots: &mut Vec<Slot>,
        block_colors: &mut Vec<usize>,
        visit: &mut dyn FnMut(&mut Self, &[Element], &[usize], &[usize], Count),
    ) {
        if slots.len() == arity {
            if let Some((fresh, multiplicity)) = self.fresh_elements(params, block_colors) {
                let rep: Vec<Element> = slots
                    .iter()
                    .map(|s| match *s {
                        Slot::Param(i) => params[i],
                        Slot::Block(b) => fresh[b],
                    })
                    .collect();
                let blocks: Vec<usize> = slots
                    .iter()
                    .map(|s| match *s {
                        Slot::Param(_) => usize::MAX,
                        Slot::Block(b) => b,
                    })
                    .collect();
                visit(self, &rep, &blocks, block_colors, multiplicity);
            }
            return;
        }
        for i in 0..params.len() {
            slots.push(Slot::Param(i));
            self.types_rec(arity, params, slots, block_colors, visit);
            slots.pop();
        }
        for b in 0..block_colors.len() {
            slots.push(Slot::Block(b));
            self.types_rec(arity, params, slots, block_colors, visit);
            slots.pop();
        }
        for c in 0..self.m.colors().len() {
            slots.push(Slot::Block(block_colors.len()));
            block_colors.push(c);
            self.types_rec(arity, params, slots, block_colors, visit);
            block_colors.pop();
            slots.pop();
        }
    }

    /// Distinct non-parameter representatives for the blocks, and the number
    /// of ways to choose the blocks; `None` if some class is too small.
    fn fresh_elements(&self, params: &[Element], block_colors: &[usize]) -> Option<(Vec<Element>, Count)> {
        let colors = self.m.colors();
        let mut fresh = vec![0; block_colors.len()];
        let mut multiplicity = Count::Finite(1);
        for (c, class) in colors.iter().enumerate() {
            let wanted: Vec<usize> = (0..block_colors.len()).filter(|&b| block_colors[b] == c).collect();
            if wanted.is_empty() {
                continue;
            }
            let taken = params.iter().filter(|&&p| class.members.contains(p)).count() as u64;
            let available = match class.size {
                Count::Finite(k) => Count::Finite(k - taken),
                Count::Infinite => Count::Infinite,
            };
            let ways = available.falling(wanted.len() as u64);
            if ways == Count::ZERO {
                return None;
            }
            multiplicity = multiplicity.mul(ways);
            let mut members = class.members.iter().filter(|e| params.binary_search(e).is_err());
            for b in wanted {
                fresh[b] = members.next().expect("class has enough elements");
            }
        }
        Some((fresh, multiplicity))
    }
}
