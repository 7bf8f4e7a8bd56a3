//! Period maps of one-parameter families of Jacobians, CM specializations,
//! and effective counting of algebraic points on period curves.

pub mod arith;
pub mod cm;
pub mod connection;
pub mod counting;
pub mod error;
pub mod lattice;
pub mod periods;
pub mod poly;
pub mod siegel;

pub use error::{Error, Result};
