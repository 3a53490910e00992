use super::realization::{RealizationSet, TupleSet};
use crate::formulas::{Formula, Var};
use crate::structures::{Element, FiniteStructure, Signature};
use rustc_hash::FxHashMap;

/// Anything that can be read as a finite relational structure.
pub trait FiniteModel {
    fn signature(&self) -> &Signature;
    fn size(&self) -> usize;
    /// Membership of `tuple` in the `rel`-th relation of the signature.
    fn holds(&self, rel: usize, tuple: &[Element]) -> bool;
}

impl FiniteModel for FiniteStructure {
    fn signature(&self) -> &Signature {
        FiniteStructure::signature(self)
    }

    fn size(&self) -> usize {
        FiniteStructure::size(self)
    }

    #[inline]
    fn holds(&self, rel: usize, tuple: &[Element]) -> bool {
        FiniteStructure::holds(self, rel, tuple)
    }
}

/// Advances `t` to the next tuple over `0..size` in lexicographic order.
pub(crate) fn next_tuple(t: &mut [Element], size: usize) -> bool {
    for slot in t.iter_mut().rev() {
        *slot += 1;
        if *slot < size {
            return true;
        }
        *slot = 0;
    }
    false
}

pub(crate) type NodeId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    Atom {
        rel: usize,
        args: Box<[u32]>,
    },
    Unary {
        rel: usize,
        arg: u32,
    },
    Binary {
        rel: usize,
        args: [u32; 2],
    },
    Equal(u32, u32),
    Not(NodeId),
    Iff(NodeId, NodeId),
    And(Box<[NodeId]>),
    Or(Box<[NodeId]>),
    Exists(u32, NodeId),
    Forall(u32, NodeId),
    /// Number of assignments to `vars` satisfying `body`; `closed` when the
    /// body has no other free variables, so the number can be cached.
    Tally {
        vars: Box<[u32]>,
        body: NodeId,
        closed: bool,
    },
    AtLeast {
        count: u64,
        tally: NodeId,
    },
}

/// Formulas over one signature, compiled to shared nodes: identical
/// subformulas get the same id, relation names are resolved to indices.
#[derive(Debug, Clone)]
pub(crate) struct Program {
    relations: Vec<String>,
    nodes: Vec<Node>,
    ids: FxHashMap<Node, NodeId>,
    span: usize,
}

impl Program {
    pub(crate) fn new(signature: &Signature) -> Self {
        Program {
            relations: signature.relations().iter().map(|r| r.name.clone()).collect(),
            nodes: Vec::new(),
            ids: FxHashMap::default(),
            span: 0,
        }
    }

    pub(crate) fn of(signature: &Signature, phi: &Formula) -> (Self, NodeId) {
        let mut p = Program::new(signature);
        let root = p.add(phi);
        (p, root)
    }

    fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.ids.get(&node) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(node.clone());
        self.ids.insert(node, id);
        id
    }

    /// Compiles φ, which must be checked against the signature.
    pub(crate) fn add(&mut self, phi: &Formula) -> NodeId {
        self.span = self.span.max(phi.var_span());
        self.compile(phi)
    }

    fn compile(&mut self, phi: &Formula) -> NodeId {
        if let Some((a, b)) = as_iff(phi) {
            let node = Node::Iff(self.compile(a), self.compile(b));
            return self.intern(node);
        }
        let node = match phi {
            Formula::Atom { relation, args } => {
                let rel = self
                    .relations
                    .iter()
                    .position(|r| r == relation)
                    .expect("formula checked against signature");
                match args.as_slice() {
                    [a] => Node::Unary { rel, arg: a.0 },
                    [a, b] => Node::Binary { rel, args: [a.0, b.0] },
                    _ => Node::Atom {
                        rel,
                        args: args.iter().map(|v| v.0).collect(),
                    },
                }
            }
            Formula::Equal(a, b) => Node::Equal(a.0, b.0),
            Formula::Not(f) => Node::Not(self.compile(f)),
            Formula::And(fs) => Node::And(fs.iter().map(|f| self.compile(f)).collect()),
            Formula::Or(fs) => Node::Or(fs.iter().map(|f| self.compile(f)).collect()),
            Formula::Exists(v, f) => Node::Exists(v.0, self.compile(f)),
            Formula::Forall(v, f) => Node::Forall(v.0, self.compile(f)),
            Formula::ExistsAtLeast { count, vars, body } => {
                let mut vs: Vec<u32> = vars.iter().map(|v| v.0).collect();
                vs.sort_unstable();
                vs.dedup();
                let closed = body.free_vars().as_slice().iter().all(|v| vs.contains(&v.0));
                let body = self.compile(body);
                let tally = self.intern(Node::Tally {
                    vars: vs.into(),
                    body,
                    closed,
                });
                Node::AtLeast { count: *count, tally }
            }
        };
        self.intern(node)
    }
}

/// Recognizes the shape `(a ∧ b) ∨ (¬a ∧ ¬b)` built by [`Formula::iff`].
fn as_iff(phi: &Formula) -> Option<(&Formula, &Formula)> {
    let Formula::Or(disjuncts) = phi else { return None };
    let [Formula::And(pos), Formula::And(neg)] = disjuncts.as_slice() else {
        return None;
    };
    let ([a, b], [Formula::Not(na), Formula::Not(nb)]) = (pos.as_slice(), neg.as_slice()) else {
        return None;
    };
    (**na == *a && **nb == *b).then_some((a, b))
}

pub(crate) struct Evaluator<'a, 'p, M: ?Sized> {
    model: &'a M,
    program: &'p Program,
    /// Values of closed tallies.
    tallies: FxHashMap<NodeId, u64>,
}

impl<'a, 'p, M: FiniteModel + ?Sized> Evaluator<'a, 'p, M> {
    pub(crate) fn new(model: &'a M, program: &'p Program) -> Self {
        Evaluator {
            model,
            program,
            tallies: FxHashMap::default(),
        }
    }

    fn env(&self) -> Vec<Element> {
        vec![0; self.program.span]
    }

    pub(crate) fn satisfies(&mut self, root: NodeId, free: &[Var], values: &[Element]) -> bool {
        let mut env = self.env();
        for (v, &e) in free.iter().zip(values) {
            env[v.index()] = e;
        }
        self.eval(root, &mut env)
    }

    /// Calls `on_hit` with every satisfying assignment of `free`, in lexicographic order.
    fn scan(&mut self, root: NodeId, free: &[Var], mut on_hit: impl FnMut(&[Element])) {
        let n = self.model.size();
        let mut env = self.env();
        let mut t = vec![0; free.len()];
        loop {
            for (v, &e) in free.iter().zip(&t) {
                env[v.index()] = e;
            }
            if self.eval(root, &mut env) {
                on_hit(&t);
            }
            if !next_tuple(&mut t, n) {
                break;
            }
        }
    }

    pub(crate) fn realizations(&mut self, root: NodeId, free: &[Var]) -> RealizationSet {
        let mut out = Vec::new();
        self.scan(root, free, |t| out.push(t.to_vec()));
        RealizationSet::Explicit {
            arity: free.len(),
            tuples: TupleSet::from_sorted(out),
        }
    }

    pub(crate) fn count(&mut self, root: NodeId, free: &[Var]) -> u64 {
        let mut k = 0;
        self.scan(root, free, |_| k += 1);
        k
    }

    fn eval(&mut self, id: NodeId, env: &mut [Element]) -> bool {
        let program = self.program;
        match &program.nodes[id as usize] {
            Node::Atom { rel, args } => {
                let mut buf = [0; 8];
                if args.len() <= buf.len() {
                    for (slot, &v) in buf.iter_mut().zip(args.iter()) {
                        *slot = env[v as usize];
                    }
                    self.model.holds(*rel, &buf[..args.len()])
                } else {
                    let t: Vec<_> = args.iter().map(|&v| env[v as usize]).collect();
                    self.model.holds(*rel, &t)
                }
            }
            Node::Unary { rel, arg } => self.model.holds(*rel, &[env[*arg as usize]]),
            Node::Binary { rel, args: [a, b] } => self.model.holds(*rel, &[env[*a as usize], env[*b as usize]]),
            Node::Equal(a, b) => env[*a as usize] == env[*b as usize],
            Node::Not(f) => !self.eval(*f, env),
            Node::Iff(a, b) => self.eval(*a, env) == self.eval(*b, env),
            Node::And(fs) => fs.iter().all(|&f| self.eval(f, env)),
            Node::Or(fs) => fs.iter().any(|&f| self.eval(f, env)),
            Node::Exists(v, f) => self.quantify(*v, *f, env, true),
            Node::Forall(v, f) => self.quantify(*v, *f, env, false),
            Node::AtLeast { count, tally } => {
                if *count == 0 {
                    return true;
                }
                let Node::Tally { vars, body, closed } = &program.nodes[*tally as usize] else {
                    unreachable!("AtLeast always points at a Tally");
                };
                if !closed {
                    return self.tally(*body, vars, env, *count) >= *count;
                }
                let c = match self.tallies.get(tally) {
                    Some(&c) => c,
                    None => {
                        let c = self.tally(*body, vars, env, u64::MAX);
                        self.tallies.insert(*tally, c);
                        c
                    }
                };
                c >= *count
            }
            Node::Tally { .. } => unreachable!("tallies are only reached through AtLeast"),
        }
    }

    fn quantify(&mut self, v: u32, body: NodeId, env: &mut [Element], want: bool) -> bool {
        let saved = env[v as usize];
        let mut result = !want;
        for e in 0..self.model.size() {
            env[v as usize] = e;
            if self.eval(body, env) == want {
                result = want;
                break;
            }
        }
        env[v as usize] = saved;
        result
    }

    /// Number of assignments to `vars` (other variables fixed by `env`) that
    /// satisfy `body`, stopping once `limit` is reached.
    fn tally(&mut self, body: NodeId, vars: &[u32], env: &mut [Element], limit: u64) -> u64 {
        let (mut saved_buf, mut t_buf) = ([0; 4], [0; 4]);
        let (mut saved_vec, mut t_vec) = (Vec::new(), Vec::new());
        let (saved, t) = if vars.len() <= 4 {
            (&mut saved_buf[..vars.len()], &mut t_buf[..vars.len()])
        } else {
            saved_vec.resize(vars.len(), 0);
            t_vec.resize(vars.len(), 0);
            (&mut saved_vec[..], &mut t_vec[..])
        };
        for (s, &v) in saved.iter_mut().zip(vars) {
            *s = env[v as usize];
        }
        let mut k = 0;
        loop {
            for (&v, &e) in vars.iter().zip(t.iter()) {
                env[v as usize] = e;
            }
            if self.eval(body, env) {
                k += 1;
                if k >= limit {
                    break;
                }
            }
            if !next_tuple(t, self.model.size()) {
                break;
            }
        }
        for (&v, &e) in vars.iter().zip(saved.iter()) {
            env[v as usize] = e;
        }
        k
    }
}
