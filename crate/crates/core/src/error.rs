use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid lattice parameters: {0}")]
    InvalidParams(String),

    #[error("zig-zag configuration requires an even number of sites, got N = {sites}")]
    OddZigZag { sites: usize },

    #[error("{what} did not converge (residual {residual:e})")]
    NoConvergence { what: &'static str, residual: f64 },

    /// A squared mode frequency is negative: the requested configuration is
    /// unstable at these parameters.
    #[error("imaginary frequency at mode l = {l:?} (radicand {radicand:e})")]
    ImaginaryFrequency { l: Option<usize>, radicand: f64 },

    /// A zero-frequency mode carries weight into a finite-dimensional
    /// moment that would otherwise be infinite.
    #[error("soft mode l = {l} makes the requested moments divergent")]
    SoftMode { l: usize },

    #[error("quadrature failed to reach tolerance (estimate {estimate:e}, error {error:e})")]
    QuadratureFailure { estimate: f64, error: f64 },

    #[error("integral diverges")]
    DivergentIntegral,

    #[error("dense oracle limited to N <= {max}, got N = {sites}")]
    SizeLimitExceeded { sites: usize, max: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Attach a Fourier index to a frequency error raised without one.
    pub(crate) fn at_mode(self, l: usize) -> Self {
        match self {
            Error::ImaginaryFrequency { l: None, radicand } => {
                Error::ImaginaryFrequency { l: Some(l), radicand }
            }
            other => other,
        }
    }
}
