//! Exact polynomial arithmetic, factorization and certified root isolation.

pub mod factor;
pub mod modp;
pub mod qmat;
pub mod qpoly;
pub mod roots;
pub mod zpoly;

pub use factor::{factor, is_irreducible};
pub use qmat::QMat;
pub use qpoly::{parse_rational, rational_height, QPoly, RationalFunction, RationalFunctionRepr};
pub use roots::{isolate_roots, isolate_roots_qpoly};
pub use zpoly::ZPoly;
