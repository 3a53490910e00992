//! Relational signatures and the two structure backends.
//!
//! [`FiniteStructure`] holds relations of any arity over `{0..n-1}`.
//! [`PeriodicUnaryStructure`] has universe ℕ and interprets every (unary)
//! relation as an ultimately periodic [`PeriodicSet`]. Both store their data
//! canonically, so derived equality is extensional equality.

mod count;
mod finite;
mod periodic;
mod signature;

pub use count::Count;
pub use finite::FiniteStructure;
pub use periodic::{ColorClass, PeriodicSet, PeriodicUnaryStructure};
pub use signature::{RelationSymbol, Signature};

use thiserror::Error;

/// Universe elements. Finite universes are `{0..n-1}`, the periodic backend uses ℕ.
pub type Element = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("relation name `{0}` must start with an uppercase letter and continue with letters, digits or `_`")]
    InvalidRelationName(String),
    #[error("relation `{0}` is declared twice")]
    DuplicateRelation(String),
    #[error("relation `{0}` must have arity at least 1")]
    ZeroArity(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("tuple {tuple:?} of `{relation}` has length {}, expected arity {expected}", tuple.len())]
    ArityMismatch {
        relation: String,
        tuple: Vec<Element>,
        expected: usize,
    },
    #[error("tuple {tuple:?} of `{relation}` leaves the universe {{0..{}}}", size.saturating_sub(1))]
    OutOfUniverse {
        relation: String,
        tuple: Vec<Element>,
        size: usize,
    },
    #[error("a finite universe must be nonempty")]
    EmptyUniverse,
    #[error("a periodic set needs a nonempty cycle")]
    EmptyCycle,
    #[error("periodic structures only support unary relations, `{relation}` has arity {arity}")]
    NotUnary { relation: String, arity: usize },
}

/// A structure on one of the two backends.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Structure {
    Finite(FiniteStructure),
    Periodic(PeriodicUnaryStructure),
}

impl Structure {
    pub fn signature(&self) -> &Signature {
        match self {
            Structure::Finite(m) => m.signature(),
            Structure::Periodic(m) => m.signature(),
        }
    }

    /// Short backend tag used in reports and error messages.
    pub fn backend(&self) -> &'static str {
        match self {
            Structure::Finite(_) => "finite",
            Structure::Periodic(_) => "periodic",
        }
    }

    /// Cardinality of the universe.
    pub fn universe_size(&self) -> Count {
        match self {
            Structure::Finite(m) => Count::Finite(m.size() as u64),
            Structure::Periodic(_) => Count::Infinite,
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteStructure> {
        match self {
            Structure::Finite(m) => Some(m),
            Structure::Periodic(_) => None,
        }
    }

    pub fn as_periodic(&self) -> Option<&PeriodicUnaryStructure> {
        match self {
            Structure::Periodic(m) => Some(m),
            Structure::Finite(_) => None,
        }
    }
}

impl From<FiniteStructure> for Structure {
    fn from(m: FiniteStructure) -> Self {
        Structure::Finite(m)
    }
}

impl From<PeriodicUnaryStructure> for Structure {
    fn from(m: PeriodicUnaryStructure) -> Self {
        Structure::Periodic(m)
    }
}

/// Builds a canonical finite structure; relations missing from `interp` are empty.
pub fn make_finite<I, S, T>(signature: &Signature, size: usize, interp: I) -> Result<FiniteStructure, StructureError>
where
    I: IntoIterator<Item = (S, T)>,
    S: AsRef<str>,
    T: IntoIterator<Item = Vec<Element>>,
{
    FiniteStructure::new(signature.clone(), size, interp)
}

/// Normal form of the set `{m : prefix[m]} ∪ {m ≥ p : cycle[(m-p) mod c]}`.
pub fn periodic_normalize(prefix: &[bool], cycle: &[bool]) -> Result<PeriodicSet, StructureError> {
    PeriodicSet::new(prefix.to_vec(), cycle.to_vec())
}

pub fn periodic_cardinality(set: &PeriodicSet) -> Count {
    set.cardinality()
}
