//! Comparing relational structures by how many tuples realize each formula.
//!
//! Two structures are *E_A-equivalent* when every formula of a family `A`
//! has the same number of realizations in both. The crate decides this
//! relation on finite structures and on countable structures whose unary
//! relations are ultimately periodic, next to isomorphism and `q`-round
//! Ehrenfeucht–Fraïssé equivalence, and evaluates the explicit set-theoretic
//! (Borel) description of E_A as an independent route to the same verdict.

pub mod borel;
pub mod equivalence;
pub mod formulas;
pub mod semantics;
pub mod structures;

pub use formulas::{Formula, FormulaSet, Var};
pub use structures::{Count, FiniteStructure, PeriodicSet, PeriodicUnaryStructure, Signature, Structure};
