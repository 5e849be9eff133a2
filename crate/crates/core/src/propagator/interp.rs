use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::tracker::SampledField;
use crate::Vec3;

/// Band-limited (trigonometric) interpolant of a field sampled on a
/// periodic grid. Exact on the nodes; a point on a grid line costs O(n).
pub struct SpectralInterpolant<'a> {
    field: &'a SampledField,
}

/// Periodic Dirichlet kernel for `n` nodes at offset `s` (in cells).
fn kernel(s: f64, n: usize) -> f64 {
    let nf = n as f64;
    let a = PI * s / nf;
    if a.sin().abs() < 1e-15 {
        return 1.0;
    }
    if n % 2 == 0 {
        (PI * s).sin() / (nf * a.tan())
    } else {
        (PI * s).sin() / (nf * a.sin())
    }
}

fn weights(u: f64, n: usize) -> Vec<(usize, f64)> {
    let r = u.round();
    if (u - r).abs() < 1e-12 {
        return vec![((r as i64).rem_euclid(n as i64) as usize, 1.0)];
    }
    (0..n).map(|j| (j, kernel(u - j as f64, n))).collect()
}

impl<'a> SpectralInterpolant<'a> {
    pub fn new(field: &'a SampledField) -> Self {
        Self { field }
    }

    pub fn value_at(&self, r: &Vec3) -> C64 {
        let g = &self.field.grid;
        let w: Vec<Vec<(usize, f64)>> =
            (0..3).map(|a| weights((r[a] - g.origin[a]) / g.spacing[a], g.dims[a])).collect();
        let [nx, ny, _] = g.dims;
        let v = &self.field.values;
        let mut total = C64::new(0.0, 0.0);
        for &(k, wk) in &w[2] {
            for &(j, wj) in &w[1] {
                let base = nx * (j + ny * k);
                let mut row = C64::new(0.0, 0.0);
                for &(i, wi) in &w[0] {
                    row += v[base + i] * wi;
                }
                total += row * (wj * wk);
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracker::Grid3;

    #[test]
    fn reproduces_band_limited_modes() {
        let g = Grid3::periodic_cube(6.0, 12).unwrap();
        let k = [2.0 * PI / 6.0, 2.0 * 2.0 * PI / 6.0, -3.0 * 2.0 * PI / 6.0];
        let f = |r: &Vec3| C64::from_polar(1.0, k[0] * r.x + k[1] * r.y + k[2] * r.z);
        let values = (0..g.len()).map(|i| f(&g.point(g.node_of(i)))).collect();
        let field = SampledField { grid: g, time: 0.0, values };
        let s = SpectralInterpolant::new(&field);
        for p in [Vec3::new(0.31, -1.7, 2.2), Vec3::new(-2.9, 0.5, 0.0), g.point([3, 4, 5])] {
            assert!((s.value_at(&p) - f(&p)).norm() < 1e-12, "{p:?}");
        }
    }
}
