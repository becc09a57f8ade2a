//! Quantum SU(2) as a computational object: exact coordinate-algebra
//! arithmetic, corepresentation matrix coefficients, a C*-norm oracle,
//! the two-parameter Dirac pair and its seminorms, Schur multipliers on the
//! circle grading, the quantum Berezin transform with fuzzy spectral bands,
//! and Monge-Kantorovič distance estimation between explicit states.

pub mod algebra;
pub mod corep;
pub mod dirac;
pub mod schur;
pub mod berezin;
pub mod metric;
pub mod linalg;
pub mod qnum;
pub mod repnorm;

pub use algebra::{AlgebraElement, Gen, GenTag, GeneratorAction, Monomial, Side, TensorElement};
pub use qnum::{qint, qnum, ParamError, QParams};
pub use repnorm::{cstar_norm_element, cstar_norm_mat2, Mat2, NormEstimate, NormOptions};
