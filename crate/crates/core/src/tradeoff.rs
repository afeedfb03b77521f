// SPDX-License-Identifier: Apache-2.0

//! Convergence time versus transmission power as the radius `r` grows.
//!
//! Node power follows `P = (r / sqrt(n))^alpha`. Both constrained programs
//! are solved by scanning every integer radius in `1..=r_max`; convergence
//! times come from the enumerated spectrum, so any parity or norm works.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::optimal::oracle_optimal;
use crate::topology::TopologySpec;

/// `(r / sqrt(n))^alpha`.
pub fn power(r: usize, n: usize, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::OutOfRange(format!(
            "path-loss exponent {alpha} must be positive"
        )));
    }
    if n == 0 {
        return Err(Error::OutOfRange("node count must be positive".into()));
    }
    // r^a / n^(a/2) keeps exact cases like r = 1, n = 400, a = 2 exact.
    Ok((r as f64).powf(alpha) / (n as f64).powf(0.5 * alpha))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierPoint {
    pub r: usize,
    pub convergence_time: f64,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffResult {
    pub r_star: usize,
    pub time_at_r: f64,
    pub power_at_r: f64,
    /// Every scanned radius, ascending.
    pub frontier: Vec<FrontierPoint>,
}

/// `(r, T(r), P(r))` for `r = 1..=r_max` with sizes and norm taken from `base`.
pub fn frontier(base: &TopologySpec, r_max: usize, alpha: f64) -> Result<Vec<FrontierPoint>> {
    if r_max == 0 {
        return Err(Error::OutOfRange("r_max must be at least 1".into()));
    }
    let specs = (1..=r_max)
        .map(|r| base.with_radius(r))
        .collect::<Result<Vec<_>>>()?;
    let n = base.n();
    specs
        .par_iter()
        .map(|spec| {
            Ok(FrontierPoint {
                r: spec.r(),
                convergence_time: oracle_optimal(spec)?.convergence_time,
                power: power(spec.r(), n, alpha)?,
            })
        })
        .collect()
}

/// Minimize `T` subject to `r <= r_max` and `P <= p_max`.
pub fn min_time_given_power(
    base: &TopologySpec,
    r_max: usize,
    p_max: f64,
    alpha: f64,
) -> Result<TradeoffResult> {
    let frontier = frontier(base, r_max, alpha)?;
    let best = frontier
        .iter()
        .filter(|p| p.power <= p_max)
        .min_by(|a, b| {
            a.convergence_time
                .total_cmp(&b.convergence_time)
                .then(a.r.cmp(&b.r))
        })
        .copied();
    finish(best, frontier, || {
        format!("no radius in 1..={r_max} has power <= {p_max}")
    })
}

/// Minimize `P` subject to `T <= t_max` and `r <= r_max`.
pub fn min_power_given_time(
    base: &TopologySpec,
    r_max: usize,
    t_max: f64,
    alpha: f64,
) -> Result<TradeoffResult> {
    let frontier = frontier(base, r_max, alpha)?;
    let best = frontier
        .iter()
        .filter(|p| p.convergence_time <= t_max)
        .min_by(|a, b| a.power.total_cmp(&b.power).then(a.r.cmp(&b.r)))
        .copied();
    finish(best, frontier, || {
        format!("no radius in 1..={r_max} reaches convergence time <= {t_max}")
    })
}

fn finish(
    best: Option<FrontierPoint>,
    frontier: Vec<FrontierPoint>,
    why: impl FnOnce() -> String,
) -> Result<TradeoffResult> {
    let best = best.ok_or_else(|| Error::Infeasible(why()))?;
    Ok(TradeoffResult {
        r_star: best.r,
        time_at_r: best.convergence_time,
        power_at_r: best.power,
        frontier,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_values() {
        assert_eq!(power(10, 100, 2.0).unwrap(), 1.0);
        assert!((power(1, 100, 2.0).unwrap() - 0.01).abs() < 1e-16);
        assert_eq!(power(5, 400, 4.0).unwrap(), 0.00390625);
        assert_eq!(power(1, 400, 2.0).unwrap(), 0.0025);
        assert!(matches!(power(1, 100, 0.0), Err(Error::OutOfRange(_))));
        assert!(matches!(power(1, 100, -2.0), Err(Error::OutOfRange(_))));
        let ps: Vec<f64> = (1..=20).map(|r| power(r, 400, 3.0).unwrap()).collect();
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn power_budget_picks_boundary_radius() {
        let cycle = TopologySpec::cycle(400, 1).unwrap();
        let res = min_time_given_power(&cycle, 20, 0.0025, 2.0).unwrap();
        assert_eq!(res.r_star, 1);
        assert_eq!(res.frontier.len(), 20);

        let slack = min_time_given_power(&cycle, 20, 1e9, 2.0).unwrap();
        assert_eq!(slack.r_star, 20);

        assert!(matches!(
            min_time_given_power(&cycle, 20, 0.0, 2.0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn time_budget_picks_smallest_radius() {
        let cycle = TopologySpec::cycle(400, 1).unwrap();
        let f = frontier(&cycle, 20, 2.0).unwrap();
        let res = min_power_given_time(&cycle, 20, f[0].convergence_time, 2.0).unwrap();
        assert_eq!(res.r_star, 1);
        let res = min_power_given_time(&cycle, 20, f[4].convergence_time, 2.0).unwrap();
        assert_eq!(res.r_star, 5);
        let too_tight = f[19].convergence_time * 0.999;
        assert!(matches!(
            min_power_given_time(&cycle, 20, too_tight, 2.0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn programs_are_consistent() {
        let cycle = TopologySpec::cycle(400, 1).unwrap();
        for p_max in [0.0025, 0.01, 0.2, 1.0] {
            let a = min_time_given_power(&cycle, 20, p_max, 2.0).unwrap();
            let b = min_power_given_time(&cycle, 20, a.time_at_r, 2.0).unwrap();
            assert!(b.r_star <= a.r_star);
        }
    }

    #[test]
    fn radius_beyond_axis_size_is_invalid() {
        let cycle = TopologySpec::cycle(20, 1).unwrap();
        assert!(matches!(
            frontier(&cycle, 10, 2.0),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            frontier(&cycle, 0, 2.0),
            Err(Error::OutOfRange(_))
        ));
    }

    fn assert_frontier_monotone(base: &TopologySpec, r_max: usize) {
        let f = frontier(base, r_max, 3.0).unwrap();
        assert_eq!(
            f.iter().map(|p| p.r).collect::<Vec<_>>(),
            (1..=r_max).collect::<Vec<_>>()
        );
        for w in f.windows(2) {
            assert!(
                w[1].convergence_time <= w[0].convergence_time,
                "T rises at r = {}",
                w[1].r
            );
            assert!(w[1].power > w[0].power);
        }
    }

    #[test]
    fn frontier_monotone_on_cycle_400() {
        assert_frontier_monotone(&TopologySpec::cycle(400, 1).unwrap(), 20);
    }

    #[test]
    fn frontier_monotone_on_torus_1000() {
        assert_frontier_monotone(&TopologySpec::torus(1000, 1000, 1).unwrap(), 30);
    }
}
