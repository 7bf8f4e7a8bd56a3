//! Regular-singular linear systems dX = Ω·X: rigorous power-series
//! solutions, analytic continuation, monodromy and local expansions.

pub mod expansion;
pub mod germ;
pub mod monodromy;
pub mod system;

pub use expansion::{ExponentBlock, LocalExpansion, LocalPoint};
pub use germ::SolutionGerm;
pub use monodromy::{MonodromyMatrix, QuasiUnipotency};
pub use system::{legendre_system, ConnectionSystem, SingularLocus, Singularity};
