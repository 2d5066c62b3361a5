use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    #[error("invalid value for `{name}` ({value}): {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("array length {got} does not match grid ({expected})")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("non-finite amplitude at sample {0}")]
    NonFinite(usize),

    #[error("cannot normalize a zero-norm field")]
    ZeroNorm,

    #[error(
        "{method} propagation over z = {z} m aliases on this grid; \
         the kernel is sampled only for z {bound} {limit} m"
    )]
    Aliasing {
        method: &'static str,
        z: f64,
        bound: &'static str,
        limit: f64,
    },

    #[error("{feature} spans {samples:.2} samples, at least {required} are needed")]
    UnderResolved {
        feature: &'static str,
        samples: f64,
        required: usize,
    },

    #[error("{feature} of extent {extent} m does not fit in half the grid window ({half_window} m)")]
    Clipped {
        feature: &'static str,
        extent: f64,
        half_window: f64,
    },

    #[error("position {0} m lies outside the grid window")]
    OutsideWindow(f64),

    #[error("detection aperture contains no grid samples")]
    EmptyBucket,

    #[error("transverse wavevector {q} rad/m exceeds the Nyquist limit {nyquist} rad/m")]
    AboveNyquist { q: f64, nyquist: f64 },

    #[error("fit window of {window} m holds {samples} samples and {periods:.2} periods; need >= 64 and >= 3")]
    FitWindow {
        window: f64,
        samples: usize,
        periods: f64,
    },

    #[error("profile is identically zero inside the fit window")]
    ZeroProfile,

    #[error("profile has a negative or non-finite value at sample {0}")]
    BadProfile(usize),

    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),

    #[error("configuration key `{key}`: {reason}")]
    BadValue { key: String, reason: String },

    #[error("unknown profile `{0}`")]
    UnknownProfile(String),

    #[error("sweep values must be monotonic and at least two")]
    SweepValues,

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        source: Box<Error>,
    },

    #[error("sweep of `{param}` failed at {value}: {source}")]
    SweepPoint {
        param: String,
        value: f64,
        source: Box<Error>,
    },
}

impl Error {
    /// True for numerical guard failures (sampling, resolution, window),
    /// false for malformed configuration.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::InvalidParameter { .. }
            | Error::UnknownKey(_)
            | Error::BadValue { .. }
            | Error::UnknownProfile(_)
            | Error::SweepValues => false,
            Error::Stage { source, .. } | Error::SweepPoint { source, .. } => source.is_numerical(),
            _ => true,
        }
    }

    pub(crate) fn at_stage(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |e| Error::Stage {
            stage,
            source: Box::new(e),
        }
    }
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}
