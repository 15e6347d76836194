//! Link-polynomial calculus for cut-resistant links, constructions of
//! m-resistant multipartite quantum states, and a numerical verification
//! engine (partial trace, PPT, separability search) that certifies the
//! resistance class of a state.

pub mod braid;
pub mod builders;
pub mod galois;
pub mod linkpoly;
pub mod orthoarray;
pub mod qstate;
pub mod resistance;
pub mod septest;

pub use linkpoly::LinkPolynomial;
pub use qstate::{DensityOperator, SparseKet};
pub use septest::{ToleranceConfig, Verdict};
