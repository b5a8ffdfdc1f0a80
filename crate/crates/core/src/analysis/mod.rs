//! Zero counts of interpolants, the bounded-multiplicity interval cover,
//! and the contour interpolant of the coefficients.

mod contour;
mod cover;
mod zeros;

pub use contour::{contour_interpolant, growth_check, integrate, BoundaryFunction, ContourSpec, GrowthRecord, PathKind};
pub use cover::{audit_cover, select_cover, CoverAudit, Interval, IntervalSet};
pub use zeros::{min_zero_bound, verify_zero_bound, SincInterpolant, ZeroVerification};
