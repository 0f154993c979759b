//! Energy and discrepancy densities, Gaussian-weighted densities, the entropy
//! search and the monotonicity trace.

mod density;
mod entropy;
mod monotonicity;
mod report;

pub use density::{discrepancy, energy_measure, energy_measure_with, gaussian_density, kernel_leakage, DensityField, DensityKind};
pub use entropy::{entropy, entropy_search, EntropyResult, GaussianMeasure, SearchSpec};
pub use monotonicity::{monotonicity_trace, MonotonicityTrace};
pub use report::{DiagnosticsReport, ReportRow, REPORT_HEADER};
