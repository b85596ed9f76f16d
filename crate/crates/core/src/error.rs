use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{op} does not accept the {family} family")]
    UnsupportedFamily {
        op: &'static str,
        family: &'static str,
    },

    #[error("{op} is limited to M <= {max} (got M = {m})")]
    TooLarge {
        op: &'static str,
        m: usize,
        max: usize,
    },

    #[error("site {0} appears more than once")]
    RepeatedSite(usize),

    #[error("site {site} is outside 0..{m}")]
    SiteOutOfRange { site: usize, m: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),

    #[error("singular linear system")]
    Singular,

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("Nystrom determinant did not settle after {doublings} doublings (last change {change:e})")]
    NystromNonConvergence { doublings: usize, change: f64 },

    #[error("truncation bound not reached: {0}")]
    Truncation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by bad input rather than by a numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::UnsupportedFamily { .. }
                | Error::TooLarge { .. }
                | Error::RepeatedSite(_)
                | Error::SiteOutOfRange { .. }
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
