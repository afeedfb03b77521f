// SPDX-License-Identifier: Apache-2.0

//! Optimal consensus parameter `h`, convergence parameter `gamma` and
//! convergence time `T`.
//!
//! Two independent routes are provided. [`oracle_optimal`] enumerates the
//! whole spectrum and applies `h = 2 / (lambda_2 + lambda_n)`,
//! `gamma = (lambda_n - lambda_2) / (lambda_n + lambda_2)`. The closed forms
//! ([`closed_form_h`], [`closed_form_gamma`]) evaluate trigonometric
//! expressions that assume specific extremal indices; they agree with the
//! oracle exactly when [`extremal_hypothesis`] holds.

mod closed_form;

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::spectra::{extremal_eigenvalues, laplacian_eigenvalue, EigenIndex, SpectralSummary};
use crate::topology::{Norm, TopologySpec};

/// `gamma` values at or below this magnitude are reported as exactly zero.
pub const GAMMA_ZERO_TOL: f64 = 1e-12;

/// Tolerance for matching a predicted extremal eigenvalue against enumeration.
pub const HYPOTHESIS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Oracle,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed-form",
            Method::Oracle => "oracle",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalParams {
    pub h: f64,
    pub gamma: f64,
    /// `1 / ln(1 / gamma)`, zero when `gamma` is zero.
    pub convergence_time: f64,
    pub method: Method,
}

fn snap_gamma(gamma: f64) -> f64 {
    if gamma.abs() <= GAMMA_ZERO_TOL {
        0.0
    } else {
        gamma
    }
}

/// Optimal parameters from a pair of extreme Laplacian eigenvalues.
pub fn from_extremes(lambda2: f64, lambda_n: f64) -> Result<OptimalParams> {
    let h = 2.0 / (lambda2 + lambda_n);
    let gamma = snap_gamma((lambda_n - lambda2) / (lambda_n + lambda2));
    Ok(OptimalParams {
        h,
        gamma,
        convergence_time: convergence_time(gamma)?,
        method: Method::Oracle,
    })
}

pub fn oracle_optimal(spec: &TopologySpec) -> Result<OptimalParams> {
    let s = extremal_eigenvalues(spec)?;
    from_extremes(s.lambda2, s.lambda_n)
}

/// Natural-log convergence time `1 / ln(1 / gamma)`, defined as 0 at `gamma = 0`.
pub fn convergence_time(gamma: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::OutOfRange(format!(
            "gamma = {gamma} is outside [0, 1)"
        )));
    }
    if gamma == 0.0 {
        return Ok(0.0);
    }
    Ok(-1.0 / gamma.ln())
}

/// `sin((r + 1/2) x) / sin(x / 2)`, i.e. `1 + 2 sum_{j=1..r} cos(j x)`.
///
/// The kernel is `2 pi`-periodic, so `x` is first reduced to `[-pi, pi]`.
/// Near zero, where the quotient is numerically singular, the cosine sum is
/// evaluated directly.
pub fn dirichlet_kernel(r: usize, x: f64) -> f64 {
    let mut x = x.rem_euclid(TAU);
    if x > PI {
        x -= TAU;
    }
    let half = (0.5 * x).sin();
    if half.abs() < 1e-8 {
        return 1.0 + 2.0 * (1..=r).map(|j| (j as f64 * x).cos()).sum::<f64>();
    }
    ((r as f64 + 0.5) * x).sin() / half
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

pub fn parity(spec: &TopologySpec) -> Result<Parity> {
    let dims = spec.dims();
    if dims.iter().all(|k| k % 2 == 0) {
        Ok(Parity::Even)
    } else if dims.iter().all(|k| k % 2 == 1) {
        Ok(Parity::Odd)
    } else {
        Err(Error::UnsupportedParity(dims.to_vec()))
    }
}

fn closed_form_preconditions(spec: &TopologySpec) -> Result<(Parity, usize)> {
    if spec.effective_norm() != Norm::PerAxis {
        return Err(Error::InvalidSpec(format!(
            "closed forms exist only for per-axis neighborhoods, not {}",
            spec.norm()
        )));
    }
    let parity = parity(spec)?;
    // The second-largest weight eigenvalue lives on the largest axis.
    let lead = spec
        .dims()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .expect("at least one axis");
    Ok((parity, lead))
}

pub fn closed_form_h(spec: &TopologySpec) -> Result<f64> {
    use closed_form::*;
    let (parity, lead) = closed_form_preconditions(spec)?;
    let dims = spec.dims();
    let r = spec.r();
    let k_lead = dims[lead];
    Ok(match (dims.len(), parity) {
        (1, Parity::Even) => cycle_even_h(k_lead, r),
        (1, Parity::Odd) => cycle_odd_h(k_lead, r),
        (2, Parity::Even) => torus_even_h(k_lead, r),
        (2, Parity::Odd) => torus_odd_h(dims[1 - lead], k_lead, r),
        (m, Parity::Even) => mtorus_even_h(m, k_lead, r),
        (_, Parity::Odd) => mtorus_odd_h(dims, k_lead, r),
    })
}

pub fn closed_form_gamma(spec: &TopologySpec) -> Result<f64> {
    use closed_form::*;
    let (parity, lead) = closed_form_preconditions(spec)?;
    let dims = spec.dims();
    let r = spec.r();
    let k_lead = dims[lead];
    let gamma = match (dims.len(), parity) {
        (1, Parity::Even) => cycle_even_gamma(k_lead, r),
        (1, Parity::Odd) => cycle_odd_gamma(k_lead, r),
        (2, Parity::Even) => torus_even_gamma(k_lead, r),
        (2, Parity::Odd) => torus_odd_gamma(dims[1 - lead], k_lead, r),
        (m, Parity::Even) => mtorus_even_gamma(m, k_lead, r),
        (_, Parity::Odd) => mtorus_odd_gamma(dims, k_lead, r),
    };
    Ok(snap_gamma(gamma))
}

pub fn closed_form_optimal(spec: &TopologySpec) -> Result<OptimalParams> {
    let h = closed_form_h(spec)?;
    let gamma = closed_form_gamma(spec)?;
    Ok(OptimalParams {
        h,
        gamma,
        convergence_time: convergence_time(gamma)?,
        method: Method::ClosedForm,
    })
}

/// Eigenvalue indices the closed forms assume are extremal.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedExtremes {
    /// Unit index on the largest axis; predicted to attain `lambda_2(L)`.
    pub second: EigenIndex,
    /// Centre index; predicted to attain `lambda_n(L)`.
    pub largest: EigenIndex,
}

pub fn predicted_extremes(spec: &TopologySpec) -> Result<PredictedExtremes> {
    let (parity, lead) = closed_form_preconditions(spec)?;
    let mut second = vec![0; spec.m()];
    second[lead] = 1;
    let largest = spec
        .dims()
        .iter()
        .map(|&k| match parity {
            Parity::Even => k / 2,
            Parity::Odd => (k - 1) / 2,
        })
        .collect();
    Ok(PredictedExtremes {
        second: EigenIndex::new(spec, second)?,
        largest: EigenIndex::new(spec, largest)?,
    })
}

/// Outcome of checking the closed-form extremal-index assumption against enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    pub predicted: PredictedExtremes,
    pub predicted_lambda2: f64,
    pub predicted_lambda_n: f64,
    pub enumerated: SpectralSummary,
}

impl HypothesisCheck {
    pub fn holds(&self) -> bool {
        (self.predicted_lambda2 - self.enumerated.lambda2).abs() <= HYPOTHESIS_TOL
            && (self.predicted_lambda_n - self.enumerated.lambda_n).abs() <= HYPOTHESIS_TOL
    }
}

pub fn extremal_hypothesis(spec: &TopologySpec) -> Result<HypothesisCheck> {
    let predicted = predicted_extremes(spec)?;
    let predicted_lambda2 = laplacian_eigenvalue(spec, &predicted.second)?;
    let predicted_lambda_n = laplacian_eigenvalue(spec, &predicted.largest)?;
    Ok(HypothesisCheck {
        predicted,
        predicted_lambda2,
        predicted_lambda_n,
        enumerated: extremal_eigenvalues(spec)?,
    })
}
