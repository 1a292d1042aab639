use hypineq_core::catalog::CatalogError;
use hypineq_core::quadrature::TermError;
use hypineq_core::sharpness::SharpnessError;
use hypineq_core::ProfileError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Admissibility(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Admissibility(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::Inadmissible { .. } | CatalogError::NotFinite { .. } => {
                CliError::Admissibility(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ProfileError> for CliError {
    fn from(e: ProfileError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SharpnessError> for CliError {
    fn from(e: SharpnessError) -> Self {
        match e {
            SharpnessError::Catalog(c) => c.into(),
            SharpnessError::Profile(p) => p.into(),
            SharpnessError::Term(TermError::BoundaryWeightSingularity { .. })
            | SharpnessError::ModelMismatch { .. }
            | SharpnessError::DimensionMismatch { .. } => CliError::Admissibility(e.to_string()),
            SharpnessError::NoSharpConstant(_)
            | SharpnessError::NoFamily(_)
            | SharpnessError::NotQuadratic { .. }
            | SharpnessError::ShapeList(_)
            | SharpnessError::Grid(_) => CliError::Usage(e.to_string()),
            SharpnessError::Term(_)
            | SharpnessError::ZeroDenominator
            | SharpnessError::Assembly(_)
            | SharpnessError::EigenStagnation { .. } => CliError::Numeric(e.to_string()),
        }
    }
}
