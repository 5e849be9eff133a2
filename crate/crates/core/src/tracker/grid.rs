use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::AnalyticField;
use crate::error::{Error, Result};
use crate::Vec3;

/// Rectilinear node lattice: node (i, j, k) sits at `origin + (i, j, k) ⊙ spacing`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid3 {
    pub origin: [f64; 3],
    pub spacing: [f64; 3],
    pub dims: [usize; 3],
}

impl Grid3 {
    pub fn new(origin: [f64; 3], spacing: [f64; 3], dims: [usize; 3]) -> Result<Self> {
        let g = Self { origin, spacing, dims };
        g.validate()?;
        Ok(g)
    }

    /// `n³` nodes spanning the cube `center ± half_width` (both faces included).
    pub fn cube(center: Vec3, half_width: f64, n: usize) -> Result<Self> {
        let h = 2.0 * half_width / (n.max(2) - 1) as f64;
        Self::new(
            [center.x - half_width, center.y - half_width, center.z - half_width],
            [h; 3],
            [n; 3],
        )
    }

    /// Periodic box `[−L/2, L/2)` per axis with `n` nodes, as used by the
    /// spectral propagator.
    pub fn periodic_cube(length: f64, n: usize) -> Result<Self> {
        let h = length / n as f64;
        Self::new([-length / 2.0; 3], [h; 3], [n; 3])
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.iter().any(|&d| d < 4) {
            return Err(Error::InvalidGrid(format!("dims must be ≥ 4 per axis, got {:?}", self.dims)));
        }
        if !self.spacing.iter().all(|&h| h.is_finite() && h > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {:?}", self.spacing)));
        }
        if !self.origin.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        if self.len().checked_mul(16).is_none() {
            return Err(Error::InvalidGrid("grid too large".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Linear index, x fastest.
    #[inline]
    pub fn index(&self, n: [usize; 3]) -> usize {
        n[0] + self.dims[0] * (n[1] + self.dims[1] * n[2])
    }

    #[inline]
    pub fn node_of(&self, idx: usize) -> [usize; 3] {
        let x = idx % self.dims[0];
        let r = idx / self.dims[0];
        [x, r % self.dims[1], r / self.dims[1]]
    }

    #[inline]
    pub fn point(&self, n: [usize; 3]) -> Vec3 {
        self.point_f([n[0] as f64, n[1] as f64, n[2] as f64])
    }

    /// Position at fractional node coordinates.
    #[inline]
    pub fn point_f(&self, f: [f64; 3]) -> Vec3 {
        Vec3::new(
            self.origin[0] + f[0] * self.spacing[0],
            self.origin[1] + f[1] * self.spacing[1],
            self.origin[2] + f[2] * self.spacing[2],
        )
    }

    pub fn cell_diagonal(&self) -> f64 {
        Vec3::from(self.spacing).norm()
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().cloned().fold(0.0, f64::max)
    }

    pub fn lower(&self) -> Vec3 {
        Vec3::from(self.origin)
    }

    pub fn upper(&self) -> Vec3 {
        self.point([self.dims[0] - 1, self.dims[1] - 1, self.dims[2] - 1])
    }

    /// Same box with node spacing divided by `factor` (dims scaled to match).
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let dims = self.dims.map(|d| (d - 1) * factor + 1);
        let spacing = self.spacing.map(|h| h / factor as f64);
        Self::new(self.origin, spacing, dims)
    }

    /// Distance from `p` to the nearest face of the box (negative outside).
    pub fn inset(&self, p: &Vec3) -> f64 {
        let (lo, hi) = (self.lower(), self.upper());
        (0..3).map(|a| (p[a] - lo[a]).min(hi[a] - p[a])).fold(f64::INFINITY, f64::min)
    }
}

/// Complex amplitudes on a grid at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    pub grid: Grid3,
    pub values: Vec<C64>,
    pub time: f64,
}

impl SampledField {
    pub fn new(grid: Grid3, values: Vec<C64>, time: f64) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if !values.iter().all(|z| z.is_finite()) {
            return Err(Error::NonFinite("field values"));
        }
        if !time.is_finite() {
            return Err(Error::NonFinite("time"));
        }
        Ok(Self { grid, values, time })
    }

    #[inline]
    pub fn at(&self, n: [usize; 3]) -> C64 {
        self.values[self.grid.index(n)]
    }

    /// Median |ψ| over the grid; the scale for zero tolerances.
    pub fn median_abs(&self) -> f64 {
        let mut a: Vec<f64> = self.values.iter().map(|z| z.norm()).collect();
        let mid = a.len() / 2;
        let (_, m, _) = a.select_nth_unstable_by(mid, |x, y| x.total_cmp(y));
        *m
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Evaluate the field at every node (parallel over z-slabs).
pub fn sample<F: AnalyticField + ?Sized>(field: &F, grid: &Grid3, t: f64) -> Result<SampledField> {
    grid.validate()?;
    if !t.is_finite() {
        return Err(Error::NonFinite("time"));
    }
    let [nx, ny, _] = grid.dims;
    let mut values = vec![C64::new(0.0, 0.0); grid.len()];
    values.par_chunks_mut(nx * ny).enumerate().for_each(|(k, slab)| {
        for j in 0..ny {
            for i in 0..nx {
                slab[i + nx * j] = field.value_at(&grid.point([i, j, k]), t);
            }
        }
    });
    SampledField::new(*grid, values, t)
}
