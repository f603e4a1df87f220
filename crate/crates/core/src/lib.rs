//! Executable finite category theory for the König/Ramsey correspondence.

pub mod corpus;
pub mod expansion;
pub mod fincat;
pub mod ramsey;
pub mod relstruct;
pub mod setdiag;
pub mod transfer;

pub use fincat::{ArrId, CategoryError, FinCategory, ObjId};
