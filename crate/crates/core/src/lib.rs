// SPDX-License-Identifier: Apache-2.0

//! Optimal parameters and convergence times for average consensus on
//! r-nearest-neighbor cycles, tori and m-dimensional tori.
//!
//! * [`topology`] builds the networks as offset stencils and neighbor lists.
//! * [`spectra`] evaluates Laplacian and weight-matrix eigenvalues, in closed
//!   form and by full Fourier enumeration.
//! * [`optimal`] derives `h`, `gamma` and `T` from closed forms and from the
//!   enumerated spectrum.
//! * [`sim`] runs the synchronous consensus iteration.
//! * [`tradeoff`] scans the radius for the convergence-time/power trade-off.
//! * [`cli`] wires it all to the command line.

pub mod cli;
pub mod error;
pub mod optimal;
pub mod sim;
pub mod spectra;
pub mod topology;
pub mod tradeoff;

pub use error::{Error, Result};
pub use optimal::{Method, OptimalParams};
pub use spectra::{EigenIndex, SpectralSummary};
pub use topology::{Norm, Stencil, TopologySpec};
