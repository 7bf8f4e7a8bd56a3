//! Rigorous ball arithmetic and linear algebra over it.

pub mod ball;
pub mod cmat;
pub mod mag;

pub use ball::{bits_for_digits, CBall, CBallRepr, RBall};
pub use cmat::CMat;
pub use mag::Mag;
