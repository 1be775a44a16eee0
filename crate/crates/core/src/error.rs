use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A point lies outside the region where the operation is defined.
    #[error("{what}: |z| = {modulus} is outside the admissible region")]
    Domain { what: &'static str, modulus: f64 },

    #[error("{0}: kernel is singular at z = w")]
    Singularity(&'static str),

    #[error("non-finite integrand sample at node {node}")]
    NonFinite { node: usize },

    #[error("quadrature did not converge: best value {best}, estimated error {est_error:e}")]
    NonConvergence { best: Complex64, est_error: f64 },

    /// A theorem hypothesis gate failed; `gate` names which one.
    #[error("hypothesis violated ({gate}): {detail}")]
    Hypothesis { gate: &'static str, detail: String },

    #[error("no sign change found for {0} before the bracket limit")]
    Bracket(&'static str),

    #[error("invalid majorant: {}", .0.join("; "))]
    InvalidMajorant(Vec<String>),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn hypothesis(gate: &'static str, detail: impl Into<String>) -> Self {
        Error::Hypothesis {
            gate,
            detail: detail.into(),
        }
    }
}

/// Rejects points with `|z| >= 1`.
pub(crate) fn check_open_disk(what: &'static str, z: Complex64) -> Result<()> {
    let m = z.norm();
    if m < 1.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what, modulus: m })
    }
}

/// Rejects points with `|z| > 1`.
pub(crate) fn check_closed_disk(what: &'static str, z: Complex64) -> Result<()> {
    let m = z.norm();
    if m <= 1.0 + 1e-14 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what, modulus: m })
    }
}
