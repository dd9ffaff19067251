use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the set where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A spherical derivative was requested where `beta_h = 0` on a stem
    /// that has no continuous extension there.
    #[error("singular point: beta_{var} = 0 is outside the domain of this stem function")]
    SingularPoint { var: usize },

    /// The operation needs exact structural knowledge the value does not carry.
    #[error("capability error: {0}")]
    Capability(String),

    #[error("mode error: {0}")]
    Mode(String),

    #[error("degree overflow: total degree {degree} exceeds the limit {limit}")]
    DegreeOverflow { degree: u32, limit: u32 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
