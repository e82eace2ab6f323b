use thiserror::Error;

/// Errors raised by the numerical routines and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{function}: pole at argument {argument}")]
    Pole { function: &'static str, argument: f64 },

    #[error("{function}: argument {argument} outside domain ({expected})")]
    Domain {
        function: &'static str,
        argument: f64,
        expected: &'static str,
    },

    #[error("{function}: series did not converge after {terms} terms")]
    NotConverged { function: &'static str, terms: usize },

    #[error("state index n={n} below the lowest admissible index {min}")]
    IndexOutOfRange { n: usize, min: usize },

    #[error("inadmissible parameters (a={a}, b={b}, m={m}): {violations}")]
    InvalidParameters {
        a: f64,
        b: f64,
        m: usize,
        violations: String,
    },

    #[error("normalization radicand for n={n} is negative; negative factors: {factors}")]
    NegativeRadicand { n: usize, factors: String },

    #[error("denominator polynomial vanishes at sin(kx)={u}")]
    Singular { u: f64 },

    #[error("moment of order {order} diverges at J=0 (integrand exponent {exponent} <= -1)")]
    DivergentMoment { order: usize, exponent: f64 },

    #[error("truncation at n={n_trunc} leaves tail bound {tail_bound:e} above limit {limit:e}")]
    Truncation {
        n_trunc: usize,
        tail_bound: f64,
        limit: f64,
    },

    #[error("signal does not cover the wavelet support; missing interval [{lo}, {hi}]")]
    SupportNotCovered { lo: f64, hi: f64 },

    #[error("quadrature failed to reach tolerance (estimate {estimate:e}, error {error:e})")]
    Quadrature { estimate: f64, error: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
