use super::BorelError;
use crate::formulas::{Formula, FormulaSet};
use crate::semantics::{satisfies_finite, satisfies_periodic, FiniteEvaluator, FiniteModel, NodeId, Program};
use crate::structures::{Element, FiniteStructure, PeriodicUnaryStructure, Signature, Structure};
use std::borrow::Cow;
use std::sync::atomic::{AtomicUsize, Ordering};

/// Relation `R` of the `side`-th copy of a signature.
pub fn copy_name(name: &str, side: usize) -> String {
    format!("{name}_{side}")
}

/// `L* = L₀ ∪ L₁`: every relation of `L` twice, first all `_0` copies, then all `_1` copies.
pub fn product_signature(sig: &Signature) -> Signature {
    let copies = (0..2).flat_map(|side| sig.relations().iter().map(move |r| (copy_name(&r.name, side), r.arity)));
    Signature::new(copies, sig.with_equality()).expect("copies of valid names are valid and distinct")
}

/// Two structures over `L` on a common universe, read as one structure over `L*`.
#[derive(Debug, Clone)]
pub struct ProductStructure<'a> {
    signature: Cow<'a, Signature>,
    parts: Parts<'a>,
    half: usize,
}

#[derive(Debug, Clone)]
enum Parts<'a> {
    Finite(&'a FiniteStructure, &'a FiniteStructure),
    Periodic(PeriodicUnaryStructure),
}

impl<'a> ProductStructure<'a> {
    pub fn new(m: &'a Structure, n: &'a Structure) -> Result<Self, BorelError> {
        Self::build(m, n, Cow::Owned(product_signature(m.signature())))
    }

    fn build(m: &'a Structure, n: &'a Structure, signature: Cow<'a, Signature>) -> Result<Self, BorelError> {
        if m.signature() != n.signature() {
            return Err(BorelError::SignatureMismatch);
        }
        let parts = match (m, n) {
            (Structure::Finite(a), Structure::Finite(b)) => {
                if a.size() != b.size() {
                    return Err(BorelError::UniverseMismatch(a.size(), b.size()));
                }
                Parts::Finite(a, b)
            }
            (Structure::Periodic(a), Structure::Periodic(b)) => {
                let sets = a.sets().iter().chain(b.sets()).cloned().collect();
                Parts::Periodic(PeriodicUnaryStructure::from_sets(signature.clone().into_owned(), sets))
            }
            _ => return Err(BorelError::BackendMismatch),
        };
        let half = signature.len() / 2;
        Ok(ProductStructure { signature, parts, half })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// The `L_side`-reduct, renamed back to `L`.
    pub fn reduct(&self, side: usize) -> Structure {
        let half = self.signature.len() / 2;
        match &self.parts {
            Parts::Finite(a, b) => (if side == 0 { *a } else { *b }).clone().into(),
            Parts::Periodic(p) => {
                let sig = Signature::new(
                    p.signature().relations()[..half]
                        .iter()
                        .map(|r| (r.name.trim_end_matches("_0").to_string(), r.arity)),
                    self.signature.with_equality(),
                )
                .expect("names come from a valid signature");
                let sets = p.sets()[side * half..(side + 1) * half].to_vec();
                PeriodicUnaryStructure::from_sets(sig, sets).into()
            }
        }
    }

    pub fn satisfies(&self, sentence: &Formula) -> Result<bool, BorelError> {
        Ok(match &self.parts {
            Parts::Finite(..) => satisfies_finite(self, sentence, &[])?,
            Parts::Periodic(p) => satisfies_periodic(p, sentence, &[])?,
        })
    }
}

impl FiniteModel for ProductStructure<'_> {
    fn signature(&self) -> &Signature {
        &self.signature
    }

    fn size(&self) -> usize {
        match &self.parts {
            Parts::Finite(a, _) => a.size(),
            Parts::Periodic(_) => 0,
        }
    }

    #[inline]
    fn holds(&self, rel: usize, tuple: &[Element]) -> bool {
        match &self.parts {
            Parts::Finite(a, b) => {
                if rel < self.half {
                    a.holds(rel, tuple)
                } else {
                    b.holds(rel - self.half, tuple)
                }
            }
            Parts::Periodic(p) => p.holds(rel, tuple[0]),
        }
    }
}

/// `⋀_{1 ≤ k ≤ n_max} (∃^k x̄ φ₀ ↔ ∃^k x̄ φ₁)` with `x̄` the free variables of φ.
pub fn star_encode(phi: &Formula, n_max: u64) -> Result<Formula, BorelError> {
    if n_max == 0 {
        return Err(BorelError::ZeroTruncation);
    }
    let vars = phi.free_vars();
    let copies = [0, 1].map(|side| phi.map_relations(&|r| copy_name(r, side)));
    let mut conjuncts: Vec<Formula> = (1..=n_max)
        .map(|k| {
            let [a, b] = copies.clone().map(|c| Formula::exists_at_least(k, vars.as_slice(), c));
            Formula::iff(a, b)
        })
        .collect();
    Ok(if conjuncts.len() == 1 {
        conjuncts.pop().expect("one conjunct")
    } else {
        Formula::And(conjuncts)
    })
}

/// The sentences `φ*` for a family `A`, built once and checked against many pairs.
#[derive(Debug, Clone)]
pub struct RemarkEncoding {
    signature: Signature,
    product: Signature,
    n_max: u64,
    max_free_vars: usize,
    stars: Vec<Formula>,
    /// The stars compiled over `L*`, for products of finite structures.
    program: Program,
    roots: Vec<NodeId>,
    /// Index of the star that last failed; tried first on the next pair.
    last_failure: LastFailure,
}

#[derive(Debug, Default)]
struct LastFailure(AtomicUsize);

impl Clone for LastFailure {
    fn clone(&self) -> Self {
        LastFailure(AtomicUsize::new(self.0.load(Ordering::Relaxed)))
    }
}

impl RemarkEncoding {
    pub fn new(a: &FormulaSet, n_max: u64) -> Result<Self, BorelError> {
        let stars: Vec<Formula> = a.iter().map(|phi| star_encode(phi, n_max)).collect::<Result<_, _>>()?;
        let product = product_signature(a.signature());
        let mut program = Program::new(&product);
        let roots = stars.iter().map(|s| program.add(s)).collect();
        Ok(RemarkEncoding {
            signature: a.signature().clone(),
            product,
            n_max,
            max_free_vars: a.max_free_vars(),
            stars,
            program,
            roots,
            last_failure: LastFailure::default(),
        })
    }

    pub fn stars(&self) -> &[Formula] {
        &self.stars
    }

    /// Smallest `n_max` for which the truncated conjunction loses nothing:
    /// one more than the largest possible finite count, `s^d` for universe
    /// size `s` (finite) or for the certificate bound `s` (periodic).
    pub fn lossless_bound(&self, m: &Structure, n: &Structure) -> u64 {
        let s = match (m, n) {
            (Structure::Finite(a), _) => a.size(),
            (Structure::Periodic(a), Structure::Periodic(b)) => a.finite_bound().max(b.finite_bound()),
            (Structure::Periodic(a), _) => a.finite_bound(),
        } as u64;
        s.saturating_pow(self.max_free_vars as u32).saturating_add(1)
    }

    /// Whether the product of `m` and `n` satisfies every `φ*`.
    pub fn check(&self, m: &Structure, n: &Structure) -> Result<bool, BorelError> {
        if m.signature() != &self.signature {
            return Err(BorelError::SignatureMismatch);
        }
        let required = self.lossless_bound(m, n);
        if self.n_max < required {
            return Err(BorelError::TruncationTooSmall {
                n_max: self.n_max,
                required,
            });
        }
        let product = ProductStructure::build(m, n, Cow::Borrowed(&self.product))?;
        if let Parts::Finite(..) = product.parts {
            let mut ev = FiniteEvaluator::new(&product, &self.program);
            let first = self
                .last_failure
                .0
                .load(Ordering::Relaxed)
                .min(self.roots.len().saturating_sub(1));
            let order = std::iter::once(first).chain((0..self.roots.len()).filter(|&i| i != first));
            for i in order.take(self.roots.len()) {
                if !ev.satisfies(self.roots[i], &[], &[]) {
                    self.last_failure.0.store(i, Ordering::Relaxed);
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        for star in &self.stars {
            if !product.satisfies(star)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `(M, N)` satisfies `⋀_{φ ∈ A} φ*` on their product.
pub fn remark_check(m: &Structure, n: &Structure, a: &FormulaSet, n_max: u64) -> Result<bool, BorelError> {
    RemarkEncoding::new(a, n_max)?.check(m, n)
}
