//! Coefficient sequences, sign changes, index sets and window families.

mod generate;
mod sequence;
mod signs;
mod windows;

pub use generate::{generate, sequence_from_window_limits, DeclaredWindow, Generated, GeneratorSpec, GroundTruth, FAMILIES};
pub use sequence::{ln_abs_complex, CoefficientSequence, ExactComplex, NormalizationCheck};
pub use signs::{sign_changes, sign_changes_f64, sign_changes_of_signs, sign_of, IndexSet};
pub use windows::{extract_windows, BetaPolicy, LambdaKind, Placement, Side, StepCounts, Window, WindowFamily, WindowPolicy};
