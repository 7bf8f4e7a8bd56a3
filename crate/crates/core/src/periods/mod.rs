//! Hyperelliptic families, period matrices and Siegel points.

pub mod family;
pub mod quadrature;
pub mod tau;

pub use crate::siegel::SiegelPoint;
pub use family::{catalog, HyperellipticFamily, CATALOG};
pub use quadrature::{periods_at, periods_at_ordered, symplectic_basis, BigPeriodMatrix};
pub use tau::{hypergeometric_at_half, legendre_connection, tau_from_periods, tau_path, LegendreTau};
