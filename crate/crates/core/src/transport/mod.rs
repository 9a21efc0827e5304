//! Semi-discrete optimal transport on the flat cylinder `[R⁻, R⁺] × S¹`.
//!
//! Area is transported onto `n` point sites and the two boundary circles. The optimal partition
//! is a power diagram: each site `x_i` owns `{x : d(x, x_i)² − w_i` is minimal`}`, and the boundary
//! circles compete with `d(x, r = R^±)² − w_{N/S}`. Between two point sites the cell boundary is a
//! straight segment; between a site and a boundary circle it is a parabolic arc. Geometry is in
//! `f64`; [`canonical_area_one_graph`] snaps the result to an exact [`CylinderGraph`].
//!
//! [`CylinderGraph`]: crate::graph::CylinderGraph

mod canonical;
mod diagram;
mod solver;

pub use canonical::*;
pub use diagram::*;
pub use solver::*;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::GraphError;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("invalid transport problem: {0}")]
    InvalidProblem(String),
    #[error("degenerate configuration: {cells} cells meet near (r, q) = ({r:.6}, {q:.6}); perturb the sites slightly")]
    DegenerateConfiguration { r: f64, q: f64, cells: usize },
    #[error("no convergence after {iterations} iterations (area residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64, best: WeightVector },
    #[error("area repair failed: {0}")]
    Repair(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A point site `(r, q)`; `q` is read modulo 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub r: f64,
    pub q: f64,
}

impl Site {
    pub fn new(r: f64, q: f64) -> Self {
        Site { r, q: q.rem_euclid(1.0) }
    }
}

/// Weights of the sites and of the two boundary circles, defined up to a common constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub sites: Vec<f64>,
    pub north: f64,
    pub south: f64,
}

impl WeightVector {
    pub fn zeros(n: usize) -> Self {
        WeightVector { sites: vec![0.0; n], north: 0.0, south: 0.0 }
    }

    /// All weights plus `c`; the diagram is unchanged.
    pub fn shifted(&self, c: f64) -> Self {
        WeightVector { sites: self.sites.iter().map(|w| w + c).collect(), north: self.north + c, south: self.south + c }
    }

    /// Gauge-fixed so that the south weight is zero.
    pub fn normalized(&self) -> Self {
        self.shifted(-self.south)
    }

    /// `(1 − t)·self + t·other`.
    pub fn lerp(&self, other: &WeightVector, t: f64) -> Self {
        let mix = |a: f64, b: f64| (1.0 - t) * a + t * b;
        WeightVector {
            sites: self.sites.iter().zip(&other.sites).map(|(&a, &b)| mix(a, b)).collect(),
            north: mix(self.north, other.north),
            south: mix(self.south, other.south),
        }
    }

    /// Flat vector `[w_0, …, w_{n−1}, w_N, w_S]`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.sites.clone();
        v.push(self.north);
        v.push(self.south);
        v
    }

    pub fn from_slice(v: &[f64]) -> Self {
        let n = v.len() - 2;
        WeightVector { sites: v[..n].to_vec(), north: v[n], south: v[n + 1] }
    }
}

/// Cylinder, sites and the area each should receive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportProblem {
    pub r_minus: f64,
    pub r_plus: f64,
    pub sites: Vec<Site>,
    pub targets: Vec<f64>,
    pub north_target: f64,
    pub south_target: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_ITERATIONS: usize = 200;

impl TransportProblem {
    /// Unit area per site; the remaining `R⁺ − R⁻ − n` is split evenly between the two circles.
    pub fn new(r_minus: f64, r_plus: f64, sites: Vec<Site>) -> Result<Self, TransportError> {
        let n = sites.len() as f64;
        let boundary = 0.5 * (r_plus - r_minus - n);
        let targets = vec![1.0; sites.len()];
        Self::with_targets(r_minus, r_plus, sites, targets, boundary, boundary)
    }

    pub fn with_targets(r_minus: f64, r_plus: f64, sites: Vec<Site>, targets: Vec<f64>, north_target: f64, south_target: f64) -> Result<Self, TransportError> {
        let p = TransportProblem {
            r_minus,
            r_plus,
            sites: sites.into_iter().map(|s| Site::new(s.r, s.q)).collect(),
            targets,
            north_target,
            south_target,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// Targets as one vector in cell order: sites, north, south.
    pub fn all_targets(&self) -> Vec<f64> {
        let mut t = self.targets.clone();
        t.push(self.north_target);
        t.push(self.south_target);
        t
    }

    pub fn validate(&self) -> Result<(), TransportError> {
        let bad = |m: String| Err(TransportError::InvalidProblem(m));
        if !(self.r_minus.is_finite() && self.r_plus.is_finite() && self.r_minus < self.r_plus) {
            return bad(format!("cylinder bounds [{}, {}]", self.r_minus, self.r_plus));
        }
        if self.sites.is_empty() {
            return bad("no sites".into());
        }
        if self.targets.len() != self.sites.len() {
            return bad(format!("{} targets for {} sites", self.targets.len(), self.sites.len()));
        }
        for s in &self.sites {
            if !(s.r > self.r_minus && s.r < self.r_plus && s.q.is_finite()) {
                return bad(format!("site ({}, {}) is not inside the cylinder", s.r, s.q));
            }
        }
        for (i, a) in self.sites.iter().enumerate() {
            for b in &self.sites[..i] {
                let dq = (a.q - b.q).rem_euclid(1.0);
                if (a.r - b.r).abs() < 1e-12 && dq.min(1.0 - dq) < 1e-12 {
                    return bad(format!("sites {i} coincide with an earlier site"));
                }
            }
        }
        let all = self.all_targets();
        if all.iter().any(|t| !(*t > 0.0)) {
            return bad("every target area must be positive".into());
        }
        let total: f64 = all.iter().sum();
        let area = self.r_plus - self.r_minus;
        if (total - area).abs() > 1e-9 * area.max(1.0) {
            return bad(format!("targets sum to {total}, the cylinder has area {area}"));
        }
        Ok(())
    }
}
