//! Exact jet calculus for differential invariants.

pub mod expr;
pub mod jet;
pub mod linalg;
pub mod prolong;
pub mod equation;
pub mod invariants;
pub mod orbitdim;
pub mod scenario;
pub mod corpus;
pub mod cli;
