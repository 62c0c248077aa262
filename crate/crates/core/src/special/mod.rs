//! Special functions and numerical integration used by the vacuum model.

pub mod bessel;
pub mod quadrature;
