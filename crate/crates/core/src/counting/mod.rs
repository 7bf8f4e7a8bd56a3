//! Counting algebraic points on images of analytic tuples: certified
//! interpolation by hypersurfaces on disc and cusp charts.

pub mod count;
pub mod cusp;
pub mod interpolate;
pub mod model;
pub mod oracle;
pub mod tuple;
pub mod valency;

pub use count::{count_points, CountOptions, CountReport, FoundPoint};
pub use cusp::{cover_plan, degenerate_interpolate, Chart, ChartCover, ChartShape, ChartTag, CuspData, Region};
pub use interpolate::{pvalent_interpolate, Constants, Hypersurface, InterpolationCertificate, InterpolateOptions};
pub use model::{mag_exp, Model};
pub use tuple::{AnalyticTuple, Disc, Func};
pub use valency::{spot_check, valency_bound, winding_number, ValencyReport};
