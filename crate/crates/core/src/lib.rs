//! Singular exponents, homogeneous solutions and barriers for fully nonlinear
//! uniformly elliptic equations `F(D²u, Du, x) = 0` in cones, with a monotone
//! wide-stencil finite-difference solver for annular sectors.

pub mod barriers;
pub mod cli;
pub mod cone;
pub mod fd;
pub mod io;
pub mod linalg;
pub mod numeric;
pub mod operators;
