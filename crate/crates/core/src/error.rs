use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid ground station: {0}")]
    InvalidStation(String),

    #[error("invalid clustering parameters: {0}")]
    InvalidParams(String),

    #[error("malformed distance matrix: {0}")]
    MalformedMatrix(String),

    #[error("cluster has no members")]
    EmptyCluster,

    #[error("degenerate centroid: member unit vectors sum to zero")]
    DegenerateCentroid,

    #[error("invalid orbit: {0}")]
    InvalidOrbit(String),

    #[error("invalid physical constants: {0}")]
    InvalidConstants(String),

    #[error("kepler solver did not converge (M = {mean_anomaly}, e = {eccentricity})")]
    SolverFailure { mean_anomaly: f64, eccentricity: f64 },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("link model fit failed: {0}")]
    Fit(String),

    #[error("invalid link model: {0}")]
    InvalidLinkModel(String),

    #[error("infeasible ring: {0}")]
    InfeasibleRing(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

impl Error {
    /// Stable machine-readable identifier, used as the `error_code` prefix by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyInput(_) => "empty_input",
            Error::InvalidStation(_) => "invalid_station",
            Error::InvalidParams(_) => "invalid_params",
            Error::MalformedMatrix(_) => "malformed_matrix",
            Error::EmptyCluster => "empty_cluster",
            Error::DegenerateCentroid => "degenerate_centroid",
            Error::InvalidOrbit(_) => "invalid_orbit",
            Error::InvalidConstants(_) => "invalid_constants",
            Error::SolverFailure { .. } => "solver_failure",
            Error::DegenerateGeometry(_) => "degenerate_geometry",
            Error::Domain(_) => "domain_error",
            Error::Fit(_) => "fit_error",
            Error::InvalidLinkModel(_) => "invalid_link_model",
            Error::InfeasibleRing(_) => "infeasible_ring",
            Error::InvalidScenario(_) => "invalid_scenario",
        }
    }
}
