use thiserror::Error;

/// Every failure the library can report.
///
/// Angles in messages are in degrees.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("latitude {0}° outside [-90°, 90°] or not finite")]
    InvalidLatitude(f64),

    #[error("longitude is not finite")]
    InvalidLongitude,

    #[error("vector norm {0} deviates from 1")]
    NonUnitVector(f64),

    #[error("degenerate arc: endpoints are equal or antipodal")]
    DegenerateArc,

    #[error("degenerate spherical triangle: {0}")]
    DegenerateTriangle(&'static str),

    #[error("sample count {0} is below 2")]
    BadSampleCount(usize),

    #[error("parallel at latitude {0}° collapses to a pole")]
    PoleParallel(f64),

    #[error("invalid region: {0}")]
    BadRegion(String),

    #[error("invalid projection parameters: {0}")]
    BadProjection(String),

    #[error("point outside projection domain: {0}")]
    OutOfDomain(String),

    #[error("plane point not in projection image: {0}")]
    OutOfImage(String),

    #[error("finite-difference step {0} outside (0, 1e-3]")]
    BadStep(f64),

    #[error("point at latitude {0}° is too close to a pole for a local metric")]
    NearPole(f64),

    #[error("no grid point lies in the projection domain ({0} skipped)")]
    EmptyGrid(usize),

    #[error("invalid latitude window: {0}")]
    BadWindow(String),

    #[error("invalid standard parallels: {0}")]
    BadParallels(String),

    #[error("latitude {lat}° lies at or beyond the apex latitude {apex}°")]
    BeyondApex { lat: f64, apex: f64 },

    #[error("path set is empty")]
    EmptyPathSet,

    #[error("too few points to fit: {0}")]
    FitUnderdetermined(usize),

    #[error("projection spec: {0}")]
    SpecParse(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
