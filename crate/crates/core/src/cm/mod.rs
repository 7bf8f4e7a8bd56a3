//! Endomorphisms, CM/RM classification, discriminants, algebraic
//! recognition and heights.

pub mod algebraic;
pub mod certificate;
pub mod endo;
pub mod oracle;

pub use algebraic::{height, height_point, recognize_algebraic, AlgebraicNumber};
pub use certificate::{certify_cm, check_inequality_shapes, legendre_parameter, CmCertificate, InequalityReport};
pub use endo::{
    center_discriminant, detect_endomorphisms, detect_endomorphisms_at, detect_from_periods, minimal_polynomial,
    polarized_discriminant, Classification, DiscKind, Discriminant, EndomorphismData,
};
