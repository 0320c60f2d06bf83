//! Finite-dimensional pseudo-bosons: representations of `[a, b] = 1 - n k`
//! with `k a = b k = 0`, the biorthogonal eigenbases of `h` and `h†` built by
//! ladder chains, the metric operators that intertwine them, and the
//! hermitization back to a truncated oscillator.

pub mod algebra;
pub mod chain;
pub mod doc;
pub mod error;
pub mod matrix;
pub mod metric;
pub mod models;
pub mod pipeline;
pub mod report;

pub use algebra::{
    buchdahl_rep, check_identities, derived_ops, random_s0, similarity_deform, validate_rep, DerivedOperators, FdpbRep,
    HermitianRep,
};
pub use chain::{build_system, verify_system, BiorthogonalSystem, Label};
pub use doc::{Meta, RepresentationDoc};
pub use error::{Error, Result};
pub use matrix::{c64, Matrix, Tolerance, Vector, C64};
pub use metric::{build_metrics, hermitize, verify_metrics, HermitianSystem, MetricPair};
pub use models::{
    n4_alpha, shifted_oscillator, swanson, swanson_spectrum_report, ComplexValue, ShiftedOscillator, SpectrumReport,
    SwansonModel,
};
pub use pipeline::{run_pipeline, PipelineOutput};
pub use report::{Check, ValidationReport};
