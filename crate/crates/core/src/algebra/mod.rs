//! Finite-field arithmetic over GF(2^m) and bit-matrix linear algebra over
//! GF(2), including the scalar/matrix and symbol/bit-vector mappings that make
//! a scalar linear network code act binary-linearly.

mod bitmatrix;
mod field;

pub use bitmatrix::BitMatrix;
pub use field::{schoolbook_mul, FieldContext, FieldElement, PRIMITIVE_POLYS};
