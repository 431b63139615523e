//! High relative accuracy kernels for structured linear algebra and
//! polynomial evaluation, with an exact rounding-error simulator to check
//! them.

pub mod arith;
pub mod exprdag;
pub mod matrix;
pub mod exact;
pub mod poly;
pub mod polyeval;
pub mod structmat;
pub mod svd;
pub mod decide;
pub mod experiments;
pub mod io;
