//! Numerical singularity localization: Padé poles, growth along rays, and
//! the comparison with the predicted arc.

mod pade;
mod ray;
mod report;

pub use pade::{eval_poly, pade_poles, poly_roots, PadeResult};
pub use ray::{ray_growth, GrowthProfile, RayPoint};
pub use report::{
    arc_consistency, run_probe, wrap_angle, ArcConsistency, ArcForm, Detection, ProbeConfig, ProbeMethod, ProbeReport, ProbeRequest,
};
