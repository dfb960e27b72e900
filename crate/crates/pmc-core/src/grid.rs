//! Polar grids over geodesic balls and per-node scalar fields.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::GeometryError;

/// Cell-centered polar grid on the ball `B(o, R)`: radial nodes sit at
/// `(i + 1/2) * R/nr` (no node at the pole), angular nodes are uniform on
/// `[0, 2pi)` and periodic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarGrid {
    r_ball: f64,
    nr: usize,
    ntheta: usize,
}

impl PolarGrid {
    pub fn new(r_ball: f64, nr: usize, ntheta: usize) -> Result<Self, GeometryError> {
        if !(r_ball > 0.0) {
            return Err(GeometryError::InvalidInput("ball radius must be positive".to_string()));
        }
        if nr < 8 || ntheta < 8 || ntheta % 2 != 0 {
            return Err(GeometryError::InvalidInput(
                "need nr >= 8 and even ntheta >= 8".to_string(),
            ));
        }
        Ok(Self { r_ball, nr, ntheta })
    }

    pub fn r_ball(&self) -> f64 {
        self.r_ball
    }

    pub fn nr(&self) -> usize {
        self.nr
    }

    pub fn ntheta(&self) -> usize {
        self.ntheta
    }

    pub fn len(&self) -> usize {
        self.nr * self.ntheta
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dr(&self) -> f64 {
        self.r_ball / self.nr as f64
    }

    pub fn dtheta(&self) -> f64 {
        core::f64::consts::TAU / self.ntheta as f64
    }

    /// Radius of the cell-centered node ring `i`.
    pub fn node_r(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dr()
    }

    /// Radius of the face between rings `i-1` and `i` (face `0` is the pole).
    pub fn face_r(&self, i: usize) -> f64 {
        i as f64 * self.dr()
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.dtheta()
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.ntheta + j
    }

    #[inline]
    pub fn node_of(&self, idx: usize) -> (usize, usize) {
        (idx / self.ntheta, idx % self.ntheta)
    }

    /// Angular neighbor with wraparound.
    #[inline]
    pub fn jp(&self, j: usize) -> usize {
        if j + 1 == self.ntheta {
            0
        } else {
            j + 1
        }
    }

    #[inline]
    pub fn jm(&self, j: usize) -> usize {
        if j == 0 {
            self.ntheta - 1
        } else {
            j - 1
        }
    }

    /// Node on the diametrically opposite ray, same ring.
    #[inline]
    pub fn opposite(&self, j: usize) -> usize {
        (j + self.ntheta / 2) % self.ntheta
    }
}

/// One real value per grid node, with an optional Dirichlet ring holding
/// boundary data at `r = R`.
#[derive(Debug, Clone)]
pub struct DiscreteField {
    pub grid: PolarGrid,
    pub values: Vec<f64>,
    pub boundary: Option<Vec<f64>>,
}

impl DiscreteField {
    pub fn zeros(grid: PolarGrid) -> Self {
        Self { grid, values: vec![0.0; grid.len()], boundary: None }
    }

    pub fn constant(grid: PolarGrid, c: f64) -> Self {
        Self { grid, values: vec![c; grid.len()], boundary: None }
    }

    /// Samples `f(r, theta)` at every node.
    pub fn from_fn(grid: PolarGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nr() {
            let r = grid.node_r(i);
            for j in 0..grid.ntheta() {
                values.push(f(r, grid.theta(j)));
            }
        }
        Self { grid, values, boundary: None }
    }

    /// Attaches Dirichlet data sampled from `phi(theta)` on the boundary
    /// circle.
    pub fn with_boundary_fn(mut self, phi: impl Fn(f64) -> f64) -> Self {
        let ring = (0..self.grid.ntheta()).map(|j| phi(self.grid.theta(j))).collect();
        self.boundary = Some(ring);
        self
    }

    pub fn with_boundary(mut self, ring: Vec<f64>) -> Result<Self, GeometryError> {
        if ring.len() != self.grid.ntheta() {
            return Err(GeometryError::InvalidInput(
                "boundary ring length must equal ntheta".to_string(),
            ));
        }
        self.boundary = Some(ring);
        Ok(self)
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.grid.idx(i, j);
        self.values[k] = v;
    }

    pub fn boundary_at(&self, j: usize) -> f64 {
        self.boundary.as_ref().map(|b| b[j]).unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(libm::fabs(*v)))
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
            && self.boundary.as_ref().map_or(true, |b| b.iter().all(|v| v.is_finite()))
    }
}
