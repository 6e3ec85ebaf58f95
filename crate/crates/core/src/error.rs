use thiserror::Error;

/// Errors raised by the modelling and optimization layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("circuit cost {alpha:e} J cannot be served by a battery of capacity {capacity:e} J")]
    AlphaExceedsCapacity { alpha: f64, capacity: f64 },

    #[error(
        "energy threshold {chi:e} J is not on the battery lattice (nearest valid: {} J, {} J)",
        tidy(*below),
        tidy(*above)
    )]
    OffLatticeThreshold { chi: f64, below: f64, above: f64 },

    #[error("energy threshold level {chi_level} must lie in [{min}, {max}]")]
    ThresholdOutOfRange { chi_level: usize, min: usize, max: usize },

    #[error("stationary system is singular; the battery chain is not irreducible")]
    SingularSystem,

    #[error("{relays} relays exceed the exact enumeration bound of {max}")]
    TooManyRelays { relays: usize, max: usize },

    #[error("search space of {evaluations} evaluations exceeds the limit of {limit}")]
    SearchSpaceTooLarge { evaluations: u128, limit: u128 },
}

/// Scientific notation without trailing float noise.
fn tidy(x: f64) -> String {
    let rounded: f64 = format!("{x:.12e}").parse().unwrap_or(x);
    format!("{rounded:e}")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
