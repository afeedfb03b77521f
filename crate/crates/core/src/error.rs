// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid topology: {0}")]
    InvalidSpec(String),
    #[error("graph is disconnected: nonzero index {index:?} has Laplacian eigenvalue {value:e}")]
    Disconnected { index: Vec<usize>, value: f64 },
    #[error("no closed form for mixed even/odd dimension sizes {0:?}")]
    UnsupportedParity(Vec<usize>),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("consensus iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("no feasible radius: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
