//! The densities D1–D4, divergence classification for the regularization
//! integral, and Helly-limit extraction from window families.

mod divergence;
mod estimates;
mod selfsimilar;

pub use divergence::{
    classify_divergence, classify_growth_fit, classify_self_similar, classify_upper_divergence, lower_gap, truncated_integral,
    truncated_upper_integral, upper_gap, DivergenceVerdict, Evidence, LimitInput, Verdict,
};
pub use estimates::{
    d1_estimate, d2_estimate, d3_estimate, d4_estimate, density_report, family_report, helly_grid, helly_limits, liminf_ratio, D3Estimate,
    DensityReport, Estimate, EstimatorConfig, HellyCluster, HellyClusterDoc, SideReport,
};
pub use selfsimilar::{SelfSimilarDoc, SelfSimilarSpec};
