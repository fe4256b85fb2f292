//! Symbolic dynamics on finite categories.
//!
//! States are endofunctors of a finite category `X`; towers of higher states
//! drive discrete flows; operators, mutations and state maps give a bra-ket
//! style calculus; labeled CW data measures how far a state moves the system;
//! generalized categories, derivation sets and cusps describe local flows;
//! and strings are equivalences between elements of laws.

pub mod braket;
pub mod cwdist;
pub mod fincat;
pub mod gencat;
pub mod strings;
pub mod tangent;
pub mod tower;

pub use fincat::{EndCategory, FinCatError, FinCategory, FinFunctor, Mor, NatTrans, Obj, ValidationReport, Violation};
