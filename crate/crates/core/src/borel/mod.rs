//! The set-theoretic description of E_A, evaluated with certified bounds.
//!
//! For each φ ∈ A the pair `(M, N)` must fall in one of two sets: either
//! there are `n` and injective `f, g : n → ^{<ω}ω` with
//! `(∀t)[t ∈ φ^M ⟺ g(f⁻¹(t)) ∈ φ^N]` (equal finite size), or both realization
//! sets satisfy `(∀n)(∃m > n) μ(m) ∈ X` (both infinite). The unbounded
//! quantifiers are cut down using the periodic certificates of the sets.
//!
//! [`remark_check`] decides the same relation a second way, as one
//! first-order sentence over the product of `M` and `N`.

mod mu;
mod remark;
mod witness;

pub use mu::{cantor_pair, cantor_unpair, mu, mu_inv};
pub use remark::{copy_name, product_signature, remark_check, star_encode, ProductStructure, RemarkEncoding};
pub use witness::{equal_finite_card_witness, InjectionWitness};

use crate::formulas::{Formula, FormulaSet};
use crate::semantics::{self, RealizationSet, SemanticsError};
use crate::structures::{Element, Structure};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BorelError {
    #[error("the code of {0:?} does not fit in 64 bits")]
    CodeOverflow(Vec<Element>),
    #[error("n_max must be at least 1")]
    ZeroTruncation,
    #[error("n_max = {n_max} is below the lossless bound {required}")]
    TruncationTooSmall { n_max: u64, required: u64 },
    #[error("the product needs a common universe, got sizes {0} and {1}")]
    UniverseMismatch(usize, usize),
    #[error("structures and formulas must share one signature")]
    SignatureMismatch,
    #[error("both structures must use the same backend")]
    BackendMismatch,
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// `(∀n)(∃m > n) μ(m) ∈ X`.
///
/// Every member inside the box `[0, finite_bound)^d` has a code at most `N`,
/// so `n = N` is the only instance of `∀n` that can fail; the `∃m` is then
/// searched among the tuples below the growth bound, where an infinite set
/// is certain to have a member outside the box.
pub fn is_infinite_via_mu(x: &RealizationSet) -> Result<bool, BorelError> {
    let d = x.arity();
    let inner = x.finite_bound();
    let mut threshold = 0;
    for t in x.members_below(inner).iter() {
        threshold = threshold.max(mu_inv(t)?);
    }
    let outer = x.growth_bound();
    if outer <= inner || d == 0 {
        return Ok(false);
    }
    let mut t = vec![0; d];
    loop {
        if t.iter().any(|&e| e >= inner) && x.contains(&t) && mu_inv(&t)? > threshold {
            return Ok(true);
        }
        if !semantics::next_tuple(&mut t, outer) {
            return Ok(false);
        }
    }
}

/// Which half of the per-formula union a pair falls in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Branch {
    /// Both sets finite, related by a verified witness.
    Finite(InjectionWitness),
    /// Both sets infinite.
    Infinite,
}

/// The branch `(φ^M, φ^N)` satisfies, if any.
pub fn branch(x: &RealizationSet, y: &RealizationSet) -> Result<Option<Branch>, BorelError> {
    match (is_infinite_via_mu(x)?, is_infinite_via_mu(y)?) {
        (true, true) => Ok(Some(Branch::Infinite)),
        (false, false) => {
            let (xs, ys) = (x.members_below(x.finite_bound()), y.members_below(y.finite_bound()));
            Ok(equal_finite_card_witness(&xs, &ys).map(Branch::Finite))
        }
        _ => Ok(None),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipStep {
    pub index: usize,
    pub formula: Formula,
    pub branch: Option<Branch>,
}

/// The per-formula steps of a membership check, stopping at the first failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    pub verdict: bool,
    pub steps: Vec<MembershipStep>,
}

pub fn membership(m: &Structure, n: &Structure, a: &FormulaSet) -> Result<Membership, BorelError> {
    if m.signature() != a.signature() || n.signature() != a.signature() {
        return Err(BorelError::SignatureMismatch);
    }
    if m.backend() != n.backend() {
        return Err(BorelError::BackendMismatch);
    }
    let mut steps = Vec::new();
    for (index, phi) in a.iter().enumerate() {
        let b = branch(&semantics::realizations(m, phi)?, &semantics::realizations(n, phi)?)?;
        let failed = b.is_none();
        steps.push(MembershipStep {
            index,
            formula: phi.clone(),
            branch: b,
        });
        if failed {
            return Ok(Membership { verdict: false, steps });
        }
    }
    Ok(Membership { verdict: true, steps })
}

/// Whether `(M, N)` lies in the intersection over `A` of the two-branch union.
pub fn borel_membership(m: &Structure, n: &Structure, a: &FormulaSet) -> Result<bool, BorelError> {
    Ok(membership(m, n, a)?.verdict)
}
