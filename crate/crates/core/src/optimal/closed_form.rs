// SPDX-License-Identifier: Apache-2.0

//! Closed-form optimal `h` and `gamma` for per-axis cycles and tori.
//!
//! Each formula equalizes `|lambda_2(W)|` and `|lambda_n(W)|` assuming the
//! second-largest weight eigenvalue sits at a single unit index on the
//! largest axis and the smallest one at the centre index (`k_i / 2` for even
//! sizes, `(k_i - 1) / 2` for odd sizes). Cosine sums are collapsed with the
//! Dirichlet kernel. `k_lead` is always the axis carrying the second-largest
//! eigenvalue.

use std::f64::consts::PI;

use super::dirichlet_kernel as dk;

/// `sin((2r+1) pi / k) / sin(pi / k)`.
fn lead_term(r: usize, k_lead: usize) -> f64 {
    dk(r, 2.0 * PI / k_lead as f64)
}

/// `sin((2r+1) pi (k-1) / 2k) / sin(pi (k-1) / 2k)`.
fn odd_centre_term(r: usize, k: usize) -> f64 {
    let k = k as f64;
    dk(r, PI * (k - 1.0) / k)
}

fn cos_pi_r(r: usize) -> f64 {
    (PI * r as f64).cos()
}

pub(super) fn cycle_even_h(n: usize, r: usize) -> f64 {
    let rf = r as f64;
    1.0 / (2.0 * rf + 1.0 - 0.5 * (lead_term(r, n) + cos_pi_r(r)))
}

pub(super) fn cycle_even_gamma(n: usize, r: usize) -> f64 {
    let rf = r as f64;
    let d = lead_term(r, n);
    (d - cos_pi_r(r)) / (4.0 * rf + 2.0 - (d + cos_pi_r(r)))
}

/// `cos(pi (2r+1) / 2n) / cos(pi / 2n)` carries a factor `cos(pi r)`; for odd
/// `r` that is the familiar minus sign.
fn cycle_odd_centre(n: usize, r: usize) -> f64 {
    let nf = n as f64;
    let rf = r as f64;
    cos_pi_r(r) * (PI * (2.0 * rf + 1.0) / (2.0 * nf)).cos() / (PI / (2.0 * nf)).cos()
}

pub(super) fn cycle_odd_h(n: usize, r: usize) -> f64 {
    let rf = r as f64;
    1.0 / (2.0 * rf + 1.0 - 0.5 * (lead_term(r, n) + cycle_odd_centre(n, r)))
}

pub(super) fn cycle_odd_gamma(n: usize, r: usize) -> f64 {
    let rf = r as f64;
    let d = lead_term(r, n);
    let c = cycle_odd_centre(n, r);
    (d - c) / (4.0 * rf + 2.0 - (d + c))
}

pub(super) fn torus_even_h(k_lead: usize, r: usize) -> f64 {
    let rf = r as f64;
    1.0 / (1.5 + 3.0 * rf - 0.5 * (lead_term(r, k_lead) + 2.0 * cos_pi_r(r)))
}

pub(super) fn torus_even_gamma(k_lead: usize, r: usize) -> f64 {
    let rf = r as f64;
    let d = lead_term(r, k_lead);
    let num = rf + 0.5 + 0.5 * (d - 2.0 * cos_pi_r(r));
    let den = 1.5 + 3.0 * rf - 0.5 * (d + 2.0 * cos_pi_r(r));
    num / den
}

pub(super) fn torus_odd_h(k_other: usize, k_lead: usize, r: usize) -> f64 {
    let rf = r as f64;
    let s = lead_term(r, k_lead) + odd_centre_term(r, k_other) + odd_centre_term(r, k_lead);
    1.0 / (1.5 + 3.0 * rf - 0.5 * s)
}

pub(super) fn torus_odd_gamma(k_other: usize, k_lead: usize, r: usize) -> f64 {
    let rf = r as f64;
    let d = lead_term(r, k_lead);
    let c = odd_centre_term(r, k_other) + odd_centre_term(r, k_lead);
    (rf + 0.5 + 0.5 * (d - c)) / (1.5 + 3.0 * rf - 0.5 * (d + c))
}

pub(super) fn mtorus_even_h(m: usize, k_lead: usize, r: usize) -> f64 {
    let (mf, rf) = (m as f64, r as f64);
    1.0 / ((mf + 1.0) * (rf + 0.5) - 0.5 * lead_term(r, k_lead) - 0.5 * mf * cos_pi_r(r))
}

pub(super) fn mtorus_even_gamma(m: usize, k_lead: usize, r: usize) -> f64 {
    let (mf, rf) = (m as f64, r as f64);
    let d = 0.5 * lead_term(r, k_lead);
    let c = 0.5 * mf * cos_pi_r(r);
    ((mf - 1.0) * (rf + 0.5) + d - c) / ((mf + 1.0) * (rf + 0.5) - d - c)
}

pub(super) fn mtorus_odd_h(dims: &[usize], k_lead: usize, r: usize) -> f64 {
    let (mf, rf) = (dims.len() as f64, r as f64);
    let centre: f64 = dims.iter().map(|&k| 0.5 * odd_centre_term(r, k)).sum();
    1.0 / ((mf + 1.0) * (rf + 0.5) - 0.5 * lead_term(r, k_lead) - centre)
}

pub(super) fn mtorus_odd_gamma(dims: &[usize], k_lead: usize, r: usize) -> f64 {
    let (mf, rf) = (dims.len() as f64, r as f64);
    let d = lead_term(r, k_lead);
    let c: f64 = dims.iter().map(|&k| odd_centre_term(r, k)).sum();
    ((mf - 1.0) * (rf + 0.5) + 0.5 * (d - c)) / ((mf + 1.0) * (rf + 0.5) - 0.5 * (d + c))
}
