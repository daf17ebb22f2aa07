//! Config-driven convergence studies: grids by oversampling rule, Sobolev
//! and field-point errors, slope fits and CSV/JSON tables.

pub mod config;
pub mod emit;
pub mod fit;
pub mod study;

use thiserror::Error;

pub use config::{
    BasisConfig, CaseConfig, DataConfig, ExperimentConfig, GeometryConfig, GridConfig, GridRule, MethodConfig,
    MetricConfig, OperatorConfig, OutputConfig, Placement, Rounding,
};
pub use emit::{emit, parse_json, to_csv, to_json, Format, StudyOutput, CSV_HEADER};
pub use fit::{fit_records, fit_slope, select, FitError, SlopeFit};
pub use study::{run_study, spacing_diagnostic, ConvergenceRecord, Problem, SPACING_METRIC};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("case failed: {0}")]
    Case(String),
    #[error("i/o: {0}")]
    Io(String),
}

/// `f64` fields that may hold `NaN`, written as `null` in JSON.
pub(crate) mod serde_nan {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}
