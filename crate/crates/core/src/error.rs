//! Crate-wide error type.

use thiserror::Error;

use crate::bicrossed::BicrossedError;
use crate::channels::ChannelError;
use crate::dualcayley::DualCayleyError;
use crate::graphs::GraphError;
use crate::groups::GroupError;
use crate::numerics::NumericsError;
use crate::qgraphs::QuantumGraphError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    QuantumGraph(#[from] QuantumGraphError),
    #[error(transparent)]
    DualCayley(#[from] DualCayleyError),
    #[error(transparent)]
    Bicrossed(#[from] BicrossedError),
}

impl Error {
    /// True for a failed inequality or certificate, as opposed to bad input.
    pub fn is_check_failure(&self) -> bool {
        matches!(
            self,
            Error::Channel(ChannelError::CertificateViolated { .. })
                | Error::DualCayley(DualCayleyError::CertificateViolated { .. })
        )
    }
}
