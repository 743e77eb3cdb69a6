use corrko_core::CoreError;
use corrko_detsolve::DetError;
use corrko_lp::LpError;

#[derive(Debug, thiserror::Error)]
pub enum CskoError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Det(#[from] DetError),
    #[error(transparent)]
    Lp(#[from] LpError),
    /// A structural property failed to hold on an extracted structure.
    #[error("property {name} violated: {detail}")]
    Property { name: &'static str, detail: String },
    #[error("instance is not in the required form: {0}")]
    NotCanonical(String),
    /// Some vertex alone is worth more than a quarter of the optimum.
    #[error("vertex {vertex} alone earns more than OPT/4; visit it directly")]
    SingleVertex { vertex: usize },
    #[error("{what} too large ({size} > {cap}); use a smaller instance")]
    TooLarge { what: &'static str, size: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, CskoError>;

pub(crate) fn property(name: &'static str, detail: impl Into<String>) -> CskoError {
    CskoError::Property {
        name,
        detail: detail.into(),
    }
}
