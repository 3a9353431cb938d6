//! Reference values, tolerance rules and independent oracles used by the
//! acceptance suite.

pub mod oracles;
pub mod reference;
pub mod tolerance;
