use thiserror::Error;

/// Every failure the solver can report. Payloads are `f64` views of the
/// offending values regardless of the scalar type the computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at non-positive integer {z}")]
    PoleAtNonPositiveInteger { z: f64 },
    #[error("argument |z| = {z} exceeds the ascending-series limit {limit}")]
    ArgumentTooLargeForSeries { z: f64, limit: f64 },
    #[error("{what} did not converge within {terms} terms")]
    NonConvergence { what: &'static str, terms: usize },
    #[error("near-integer order {nu_re}{nu_im:+}i: Richardson limit did not settle")]
    NearIntegerOrderLimitFailed { nu_re: f64, nu_im: f64 },
    #[error("quadrature did not converge (last difference {difference:e})")]
    QuadratureNonConvergence { difference: f64 },
    #[error("energy {energy} is at or below the well bottom -V0 = {bottom}")]
    EnergyBelowWellBottom { energy: f64, bottom: f64 },
    #[error("no classical turning points at energy {energy}")]
    NoClassicalTurningPoints { energy: f64 },
    #[error("root bracketing failed on [{lo}, {hi}]")]
    BracketingFailed { lo: f64, hi: f64 },
    #[error("found {found} states in range, {wanted} requested")]
    TooFewStatesInRange { found: usize, wanted: usize },
    #[error("even and odd roots do not interlace near E = {energy}")]
    InterlacingViolated { energy: f64 },
    #[error("position {x} lies beyond the evaluation cap {x_cap}")]
    ArgumentOutOfSpecfunDomain { x: f64, x_cap: f64 },
    #[error("well action requires E >= 0, got {energy}")]
    NegativeEnergyForWellAction { energy: f64 },
    #[error("barrier WKB requires E < 0, got {energy}")]
    EnergyNotBelowBarrierTop { energy: f64 },
    #[error("incident amplitude vanishes at E = {energy} (pole)")]
    PoleEncountered { energy: f64 },
    #[error("R - 1/2 has no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("Numerov step {h} exceeds the limit {limit}")]
    StepTooLarge { h: f64, limit: f64 },
    #[error("Numerov integration overflowed before x_max = {x_max}")]
    OverflowBeforeXmax { x_max: f64 },
    #[error("matching system is singular at E = {energy}")]
    SingularSystem { energy: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
