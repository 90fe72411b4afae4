//! Exact and high-precision tools for two-generator subgroups of `PSL(2,R)`:
//! trace minimization under Nielsen moves, discreteness and freeness
//! classification, and criteria for when roots of generators still generate
//! a discrete free group.

pub mod scalar;
pub mod chebyshev;
pub mod psl2;
pub mod word;
pub mod nielsen;
pub mod tracemin;
pub mod decide;
