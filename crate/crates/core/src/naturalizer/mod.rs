//! Naturalness filtering: duplicate-lexeme rejection and selectional
//! restriction checking with noun replacement.

pub mod caseframes;
pub mod check;

pub use caseframes::{CaseFrameList, FrameRole};
pub use check::{naturalize, selectional_violations, Outcome, Rejection, Violation};
