use thiserror::Error;

pub type Result<T> = std::result::Result<T, FtnError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FtnError {
    #[error("non-finite value in {context} at x = {at}")]
    NonFinite { context: &'static str, at: f64 },

    #[error("invalid {name} = {value}: must satisfy {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        constraint: &'static str,
    },

    #[error("bracket [{lo}, {hi}] does not straddle a root: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    SameSignBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("matrix is not Hermitian: max |A - A^H| = {asymmetry:e}")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal {off:e})")]
    EigenNoConvergence { sweeps: usize, off: f64 },

    #[error(
        "oscillatory integral did not converge within {panels} panels: \
         accumulated {accumulated:e}, last panel {last_panel:e}"
    )]
    TailNoConvergence {
        panels: usize,
        accumulated: f64,
        last_panel: f64,
    },

    #[error("quadrature reached relative change {achieved:e}, target {target:e}")]
    QuadratureTolerance { achieved: f64, target: f64 },

    #[error("factorization breakdown at pivot {pivot} (value {value:e})")]
    FactorizationBreakdown { pivot: usize, value: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("frequency {0} lies outside the principal period [-1/2, 1/2]")]
    OutOfPeriod(f64),

    #[error("only {got} retained samples, need at least {need}")]
    InsufficientSamples { got: usize, need: usize },

    #[error("curve never drops to {p_out}: minimum attained probability {min_prob}")]
    NeverCrosses { p_out: f64, min_prob: f64 },

    #[error("malformed channel record on line {line}: {reason}")]
    ChannelFormat { line: usize, reason: String },
}

pub(crate) fn invalid(name: &'static str, value: impl ToString, constraint: &'static str) -> FtnError {
    FtnError::InvalidParameter {
        name,
        value: value.to_string(),
        constraint,
    }
}
