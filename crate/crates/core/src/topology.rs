// SPDX-License-Identifier: Apache-2.0

//! Translation-invariant r-nearest-neighbor networks on cycles and tori.
//!
//! A network is described by its per-axis sizes `k_1..k_m`, a radius `r`
//! and a neighborhood rule. Node `(j_1, .., j_m)` is encoded row-major into
//! `0..n`, so the last axis varies fastest. Because the graph is
//! translation invariant, the whole adjacency is captured by the set of
//! offsets of node zero (the [`Stencil`]).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which offsets count as neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    /// Neighbors differ in exactly one coordinate, by at most `r`. Degree `2mr`.
    PerAxis,
    /// Wrap-around L1 distance at most `r`.
    L1,
    /// Wrap-around L-infinity distance at most `r`.
    LInf,
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::PerAxis => "peraxis",
            Norm::L1 => "l1",
            Norm::LInf => "linf",
        })
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "peraxis" | "per-axis" | "axis" => Ok(Norm::PerAxis),
            "l1" => Ok(Norm::L1),
            "linf" | "l-inf" | "inf" => Ok(Norm::LInf),
            other => Err(Error::InvalidSpec(format!("unknown norm `{other}`"))),
        }
    }
}

/// A validated network description.
///
/// Construction enforces `m >= 1`, `r >= 1` and `k_i >= 2r + 1` on every
/// axis, so offsets never wrap onto each other or onto the node itself.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TopologySpec {
    dims: Vec<usize>,
    r: usize,
    norm: Norm,
}

impl TopologySpec {
    pub fn new(dims: Vec<usize>, r: usize, norm: Norm) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidSpec(
                "at least one dimension is required".into(),
            ));
        }
        if r == 0 {
            return Err(Error::InvalidSpec("radius r must be positive".into()));
        }
        if let Some(&k) = dims.iter().find(|&&k| k < 2 * r + 1) {
            return Err(Error::InvalidSpec(format!(
                "axis size {k} is below 2r+1 = {} for r = {r}",
                2 * r + 1
            )));
        }
        dims.iter()
            .try_fold(1usize, |acc, &k| acc.checked_mul(k))
            .ok_or_else(|| Error::InvalidSpec("node count overflows".into()))?;
        Ok(TopologySpec { dims, r, norm })
    }

    /// `n`-node r-nearest-neighbor cycle.
    pub fn cycle(n: usize, r: usize) -> Result<Self> {
        Self::new(vec![n], r, Norm::PerAxis)
    }

    /// `k1 x k2` r-nearest-neighbor torus with per-axis neighborhoods.
    pub fn torus(k1: usize, k2: usize, r: usize) -> Result<Self> {
        Self::new(vec![k1, k2], r, Norm::PerAxis)
    }

    /// Same sizes and norm, different radius.
    pub fn with_radius(&self, r: usize) -> Result<Self> {
        Self::new(self.dims.clone(), r, self.norm)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn m(&self) -> usize {
        self.dims.len()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    /// Total node count `k_1 * .. * k_m`.
    pub fn n(&self) -> usize {
        self.dims.iter().product()
    }

    /// Effective neighborhood rule; on a cycle all three rules coincide.
    pub fn effective_norm(&self) -> Norm {
        if self.m() == 1 {
            Norm::PerAxis
        } else {
            self.norm
        }
    }

    pub fn encode(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.m());
        coords
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&c, &k)| acc * k + c)
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut coords = vec![0; self.m()];
        for (c, &k) in coords.iter_mut().zip(&self.dims).rev() {
            *c = index % k;
            index /= k;
        }
        coords
    }
}

impl fmt::Display for TopologySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self.dims.iter().map(|k| k.to_string()).collect();
        write!(
            f,
            "{} r={} {}",
            dims.join("x"),
            self.r,
            self.effective_norm()
        )
    }
}

/// The neighbor offsets of node zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stencil {
    offsets: Vec<Vec<i64>>,
}

impl Stencil {
    pub fn offsets(&self) -> &[Vec<i64>] {
        &self.offsets
    }

    pub fn degree(&self) -> usize {
        self.offsets.len()
    }
}

pub fn build_stencil(spec: &TopologySpec) -> Stencil {
    let m = spec.m();
    let r = spec.r() as i64;
    let mut offsets = Vec::new();
    match spec.effective_norm() {
        Norm::PerAxis => {
            for axis in 0..m {
                for d in 1..=r {
                    for sign in [1, -1] {
                        let mut o = vec![0; m];
                        o[axis] = sign * d;
                        offsets.push(o);
                    }
                }
            }
        }
        norm @ (Norm::L1 | Norm::LInf) => {
            // Odometer over the cube [-r, r]^m.
            let mut o = vec![-r; m];
            loop {
                let within = match norm {
                    Norm::L1 => o.iter().map(|c| c.abs()).sum::<i64>() <= r,
                    _ => true,
                };
                if within && o.iter().any(|&c| c != 0) {
                    offsets.push(o.clone());
                }
                let mut axis = m;
                loop {
                    if axis == 0 {
                        return Stencil { offsets };
                    }
                    axis -= 1;
                    if o[axis] < r {
                        o[axis] += 1;
                        break;
                    }
                    o[axis] = -r;
                }
            }
        }
    }
    Stencil { offsets }
}

/// Flat adjacency lists, `degree` entries per node.
#[derive(Debug, Clone)]
pub struct NeighborList {
    degree: usize,
    targets: Vec<usize>,
}

impl NeighborList {
    pub fn node_count(&self) -> usize {
        self.targets.len().checked_div(self.degree).unwrap_or(0)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.targets[u * self.degree..(u + 1) * self.degree]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.targets.chunks(self.degree)
    }
}

pub fn neighbor_list(spec: &TopologySpec) -> NeighborList {
    let stencil = build_stencil(spec);
    let dims = spec.dims();
    let n = spec.n();
    let mut targets = Vec::with_capacity(n * stencil.degree());
    let mut coords = vec![0usize; spec.m()];
    for u in 0..n {
        for o in stencil.offsets() {
            let v = coords
                .iter()
                .zip(o)
                .zip(dims)
                .fold(0usize, |acc, ((&c, &d), &k)| {
                    let shifted = (c as i64 + d).rem_euclid(k as i64) as usize;
                    acc * k + shifted
                });
            targets.push(v);
        }
        debug_assert_eq!(spec.encode(&coords), u);
        increment(&mut coords, dims);
    }
    NeighborList {
        degree: stencil.degree(),
        targets,
    }
}

/// Row-major odometer step; returns false after wrapping past the last index.
pub(crate) fn increment(coords: &mut [usize], dims: &[usize]) -> bool {
    for (c, &k) in coords.iter_mut().zip(dims).rev() {
        *c += 1;
        if *c < k {
            return true;
        }
        *c = 0;
    }
    false
}
