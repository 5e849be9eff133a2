use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{Grid3, SampledField};
use crate::Vec3;

/// Extra field evaluations available to the scan (exact values at
/// arbitrary points).
pub type Probe<'a> = &'a (dyn Fn(&Vec3) -> C64 + Sync);

/// Face perpendicular to `axis` whose lowest corner is `node`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FaceId {
    pub axis: u8,
    pub node: [usize; 3],
}

impl FaceId {
    pub fn axes(&self) -> (usize, usize, usize) {
        let a = self.axis as usize;
        (a, (a + 1) % 3, (a + 2) % 3)
    }

    pub fn is_boundary(&self, grid: &Grid3) -> bool {
        let a = self.axis as usize;
        self.node[a] == 0 || self.node[a] == grid.dims[a] - 1
    }

    pub fn center(&self, grid: &Grid3) -> Vec3 {
        let (_, b, c) = self.axes();
        let mut f = self.node.map(|v| v as f64);
        f[b] += 0.5;
        f[c] += 0.5;
        grid.point_f(f)
    }

    /// Corners in circulation order: n, n+e_b, n+e_b+e_c, n+e_c.
    pub fn corners(&self) -> [[usize; 3]; 4] {
        let (_, b, c) = self.axes();
        let n = self.node;
        let mut p1 = n;
        p1[b] += 1;
        let mut p2 = p1;
        p2[c] += 1;
        let mut p3 = n;
        p3[c] += 1;
        [n, p1, p2, p3]
    }
}

/// A face with non-zero phase winding, counted positive about `+e_axis`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiercedFace {
    pub face: FaceId,
    pub winding: i32,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanOptions {
    /// Nodes with |ψ| below `degeneracy_floor · median|ψ|` are treated as
    /// possibly on a line.
    pub degeneracy_floor: f64,
    /// Edge subdivision cap (2^n pieces) when a probe is available.
    pub max_doublings: u32,
    /// An edge increment within this of π is ambiguous.
    pub ambiguity_margin: f64,
    /// Faces touching a node with |ψ| below `noise_floor · max|ψ|` are
    /// skipped: the phase there is round-off. Zero disables masking.
    pub noise_floor: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { degeneracy_floor: 1e-8, max_doublings: 10, ambiguity_margin: 0.05, noise_floor: 0.0 }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FaceScan {
    pub pierced: Vec<PiercedFace>,
    pub ambiguous: Vec<FaceId>,
    /// Nodes that sat below the degeneracy floor.
    pub degenerate_nodes: usize,
    /// Faces skipped under the noise floor.
    pub masked_faces: usize,
}

/// Plaquette winding of every face of a sampled field.
pub fn detect_pierced_faces(field: &SampledField) -> FaceScan {
    detect_pierced_faces_with(field, None, &ScanOptions::default())
}

/// As [`detect_pierced_faces`], using `probe` to perturb degenerate nodes
/// and subdivide fast-turning edges.
pub fn detect_pierced_faces_with(field: &SampledField, probe: Option<Probe>, opts: &ScanOptions) -> FaceScan {
    let floor = opts.degeneracy_floor * field.median_abs();
    scan(&field.grid, &field.values, probe, opts, floor)
}

/// Offset used to move a degenerate node off the line, in cell units.
const NUDGE: [f64; 3] = [1.3e-3, 0.7e-3, 1.1e-3];

pub(crate) fn scan(grid: &Grid3, values: &[C64], probe: Option<Probe>, opts: &ScanOptions, floor: f64) -> FaceScan {
    let mut nodes = values.to_vec();
    let noise = opts.noise_floor * values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let masked: Vec<bool> = values.iter().map(|v| opts.noise_floor > 0.0 && v.norm() < noise).collect();
    let mut bad = vec![false; nodes.len()];
    let mut degenerate = 0;
    for idx in 0..nodes.len() {
        if nodes[idx].norm() > floor {
            continue;
        }
        degenerate += 1;
        if masked[idx] {
            bad[idx] = true;
            continue;
        }
        match probe {
            Some(f) => {
                let n = grid.node_of(idx).map(|v| v as f64);
                let p = grid.point_f([n[0] + NUDGE[0], n[1] + NUDGE[1], n[2] + NUDGE[2]]);
                nodes[idx] = f(&p);
                bad[idx] = !(nodes[idx].norm() > floor);
            }
            None => bad[idx] = true,
        }
    }

    let edges: Vec<Vec<f64>> = (0..3)
        .map(|a| {
            (0..grid.len())
                .into_par_iter()
                .map(|idx| {
                    let n = grid.node_of(idx);
                    if n[a] + 1 >= grid.dims[a] {
                        return f64::NAN;
                    }
                    let mut m = n;
                    m[a] += 1;
                    let jdx = grid.index(m);
                    if bad[idx] || bad[jdx] || masked[idx] || masked[jdx] {
                        return f64::NAN;
                    }
                    edge_increment(grid, n, a, nodes[idx], nodes[jdx], probe, opts)
                })
                .collect()
        })
        .collect();

    let faces: Vec<(FaceId, Option<i32>)> = (0..3u8)
        .flat_map(|axis| {
            let edges = &edges;
            let masked = &masked;
            (0..grid.len()).into_par_iter().filter_map(move |idx| {
                let face = FaceId { axis, node: grid.node_of(idx) };
                let (_, b, c) = face.axes();
                if face.node[b] + 1 >= grid.dims[b] || face.node[c] + 1 >= grid.dims[c] {
                    return None;
                }
                let corners = face.corners();
                if corners.iter().any(|&n| masked[grid.index(n)]) {
                    return Some((face, Some(0)));
                }
                let [p0, p1, _, p3] = corners;
                let s = edges[b][grid.index(p0)] + edges[c][grid.index(p1)]
                    - edges[b][grid.index(p3)]
                    - edges[c][grid.index(p0)];
                if s.is_nan() {
                    return Some((face, None));
                }
                let w = (s / TAU).round() as i32;
                (w != 0).then_some((face, Some(w)))
            })
            .collect::<Vec<_>>()
        })
        .collect();

    let mut out = FaceScan { degenerate_nodes: degenerate, ..Default::default() };
    for (face, w) in faces {
        match w {
            Some(0) => out.masked_faces += 1,
            Some(winding) => out.pierced.push(PiercedFace { face, winding }),
            None => out.ambiguous.push(face),
        }
    }
    out
}

/// Phase change along an edge; NaN when it cannot be resolved.
///
/// With a probe the edge is subdivided until every piece turns by less than
/// π/2; if a line runs through the edge itself, the path is retried with its
/// interior points nudged sideways.
fn edge_increment(
    grid: &Grid3,
    n: [usize; 3],
    axis: usize,
    v0: C64,
    v1: C64,
    probe: Option<Probe>,
    opts: &ScanOptions,
) -> f64 {
    let d = (v1 / v0).arg();
    if d.abs() <= FRAC_PI_2 {
        return d;
    }
    let Some(f) = probe else {
        return if d.abs() < PI - opts.ambiguity_margin { d } else { f64::NAN };
    };
    let nf = n.map(|v| v as f64);
    for nudge in [false, true] {
        let mut worst = d.abs();
        let mut total = d;
        for k in 1..=opts.max_doublings {
            let m = 1usize << k;
            let mut prev = v0;
            let (mut sum, mut mx) = (0.0, 0.0f64);
            for j in 1..=m {
                let v = if j == m {
                    v1
                } else {
                    let mut q = nf;
                    q[axis] += j as f64 / m as f64;
                    if nudge {
                        for (b, o) in NUDGE.iter().enumerate() {
                            if b != axis {
                                q[b] += 10.0 * o;
                            }
                        }
                    }
                    f(&grid.point_f(q))
                };
                let inc = (v / prev).arg();
                sum += inc;
                mx = mx.max(inc.abs());
                prev = v;
            }
            total = sum;
            worst = mx;
            if mx <= FRAC_PI_2 {
                return sum;
            }
        }
        if worst < PI - opts.ambiguity_margin {
            return total;
        }
    }
    f64::NAN
}

/// Zero of the bilinear interpolant over a face, in grid coordinates.
pub(crate) fn bilinear_crossing(grid: &Grid3, values: &[C64], face: &FaceId) -> Vec3 {
    let c = face.corners().map(|n| values[grid.index(n)]);
    let (u, v) = bilinear_root(c);
    let (_, b, cc) = face.axes();
    let mut f = face.node.map(|x| x as f64);
    f[b] += u;
    f[cc] += v;
    grid.point_f(f)
}

/// Root of `c0(1−u)(1−v) + c1 u(1−v) + c2 u v + c3 (1−u) v` in the unit
/// square (clamped); corners in circulation order.
pub(crate) fn bilinear_root(c: [C64; 4]) -> (f64, f64) {
    let f = |u: f64, v: f64| {
        c[0] * ((1.0 - u) * (1.0 - v)) + c[1] * (u * (1.0 - v)) + c[2] * (u * v) + c[3] * ((1.0 - u) * v)
    };
    let (mut u, mut v) = (0.5, 0.5);
    let mut best = (u, v, f(u, v).norm());
    for _ in 0..30 {
        let val = f(u, v);
        let fu = (c[1] - c[0]) * (1.0 - v) + (c[2] - c[3]) * v;
        let fv = (c[3] - c[0]) * (1.0 - u) + (c[2] - c[1]) * u;
        let det = fu.re * fv.im - fv.re * fu.im;
        if det.abs() < 1e-300 {
            break;
        }
        let du = -(val.re * fv.im - fv.re * val.im) / det;
        let dv = -(fu.re * val.im - val.re * fu.im) / det;
        u = (u + du).clamp(-0.5, 1.5);
        v = (v + dv).clamp(-0.5, 1.5);
        let r = f(u, v).norm();
        if r < best.2 {
            best = (u, v, r);
        }
        if du.abs() + dv.abs() < 1e-14 {
            break;
        }
    }
    (best.0.clamp(0.0, 1.0), best.1.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracker::grid::sample;
    use crate::{PhysicalConstants, PolynomialPrefactor, Solution, SolutionSpec, WaveVector};

    fn sol(spec: SolutionSpec) -> Solution {
        Solution::new(spec, PhysicalConstants::default()).unwrap()
    }

    fn cell_sums(grid: &Grid3, scan: &FaceScan) -> Vec<i32> {
        use std::collections::HashMap;
        let mut flux: HashMap<usize, i32> = HashMap::new();
        for p in &scan.pierced {
            let a = p.face.axis as usize;
            let n = p.face.node;
            if n[a] >= 1 {
                let mut c = n;
                c[a] -= 1;
                *flux.entry(grid.index(c)).or_default() += p.winding;
            }
            if n[a] + 1 < grid.dims[a] {
                *flux.entry(grid.index(n)).or_default() -= p.winding;
            }
        }
        flux.into_iter()
            .filter(|(idx, _)| {
                let n = grid.node_of(*idx);
                (0..3).all(|a| n[a] > 0 && n[a] + 2 < grid.dims[a])
            })
            .map(|(_, v)| v)
            .collect()
    }

    #[test]
    fn line_vortex_pierces_one_face_per_layer() {
        let s = sol(SolutionSpec::FreeLineVortex { chi: std::f64::consts::FRAC_PI_4, k: WaveVector::ZERO });
        // Offset so the axis runs through face centres.
        let g = Grid3::new([-1.05, -1.05, -1.0], [0.1; 3], [21, 21, 12]).unwrap();
        let f = sample(&s, &g, 0.0).unwrap();
        let scan = detect_pierced_faces(&f);
        assert!(scan.ambiguous.is_empty());
        assert_eq!(scan.pierced.len(), 12);
        for p in &scan.pierced {
            assert_eq!(p.face.axis, 2);
            assert_eq!(p.winding, 1);
            assert_eq!(&p.face.node[..2], &[10, 10]);
        }
    }

    #[test]
    fn line_vortex_through_nodes_is_nudged() {
        let s = sol(SolutionSpec::FreeLineVortex { chi: std::f64::consts::FRAC_PI_4, k: WaveVector::ZERO });
        let g = Grid3::cube(Vec3::zeros(), 1.0, 21).unwrap();
        let f = sample(&s, &g, 0.0).unwrap();
        let plain = detect_pierced_faces(&f);
        assert!(!plain.ambiguous.is_empty());
        let probe = |r: &Vec3| s.value(r, 0.0);
        let scan = detect_pierced_faces_with(&f, Some(&probe), &ScanOptions::default());
        assert!(scan.ambiguous.is_empty());
        assert_eq!(scan.degenerate_nodes, 21);
        let z: Vec<_> = scan.pierced.iter().filter(|p| p.face.axis == 2).collect();
        assert_eq!(z.len(), 21);
        assert!(z.iter().all(|p| p.winding == 1));
    }

    #[test]
    fn gaussian_packet_has_no_pierced_faces() {
        let s = sol(SolutionSpec::GaussianPacket { l: 1.0, k: WaveVector::new(0.3, 0.0, 0.1) });
        let g = Grid3::cube(Vec3::zeros(), 2.0, 24).unwrap();
        let scan = detect_pierced_faces(&sample(&s, &g, 0.4).unwrap());
        assert!(scan.pierced.is_empty() && scan.ambiguous.is_empty());
    }

    #[test]
    fn second_order_zero_has_winding_two() {
        let x = PolynomialPrefactor::linear([C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)], C64::new(0.0, 0.0));
        let poly = &x * &x;
        let s = sol(SolutionSpec::Generated {
            carrier: Box::new(SolutionSpec::FreePlaneWave { k: WaveVector::ZERO }),
            poly,
        });
        let g = Grid3::new([-1.05, -1.05, -0.5], [0.1; 3], [21, 21, 6]).unwrap();
        let f = sample(&s, &g, 0.0).unwrap();
        // Corner increments are exactly π here, so edges must be subdivided.
        assert!(!detect_pierced_faces(&f).ambiguous.is_empty());
        let probe = |r: &Vec3| s.value(r, 0.0);
        let scan = detect_pierced_faces_with(&f, Some(&probe), &ScanOptions::default());
        assert_eq!(scan.pierced.len(), 6);
        assert!(scan.pierced.iter().all(|p| p.winding == 2 && p.face.axis == 2));
    }

    #[test]
    fn cells_conserve_flux_for_ring() {
        let s = sol(SolutionSpec::FreeRingSphere { r: 1.0, a: 1.0, k: WaveVector::ZERO });
        let g = Grid3::cube(Vec3::new(0.01, -0.02, 0.03), 1.5, 32).unwrap();
        let f = sample(&s, &g, 0.1).unwrap();
        let probe = |r: &Vec3| s.value(r, 0.1);
        let scan = detect_pierced_faces_with(&f, Some(&probe), &ScanOptions::default());
        assert!(scan.ambiguous.is_empty());
        assert!(!scan.pierced.is_empty());
        assert!(cell_sums(&g, &scan).iter().all(|&v| v == 0));
    }

    #[test]
    fn noise_floor_masks_round_off_windings() {
        let s = sol(SolutionSpec::FreeLineVortex { chi: std::f64::consts::FRAC_PI_4, k: WaveVector::ZERO });
        let g = Grid3::new([-1.05, -1.05, -1.0], [0.1; 3], [21, 21, 12]).unwrap();
        let mut f = sample(&s, &g, 0.0).unwrap();
        // Replace the far half with pseudo-random round-off.
        let mut seed = 7u64;
        for (i, v) in f.values.iter_mut().enumerate() {
            if g.node_of(i)[0] >= 15 {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                *v = C64::from_polar(1e-15, (seed >> 11) as f64 * 1e-15);
            }
        }
        let plain = detect_pierced_faces(&f);
        assert!(!plain.ambiguous.is_empty());
        let opts = ScanOptions { noise_floor: 1e-10, ..Default::default() };
        let scan = detect_pierced_faces_with(&f, None, &opts);
        assert!(scan.ambiguous.is_empty());
        assert_eq!(scan.pierced.len(), 12);
        assert!(scan.masked_faces > 0);
    }

    #[test]
    fn bilinear_root_of_linear_field_is_exact() {
        // ψ = (u − 0.3) + i(v − 0.6) on the unit square.
        let c = |u: f64, v: f64| C64::new(u - 0.3, v - 0.6);
        let (u, v) = bilinear_root([c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)]);
        assert!((u - 0.3).abs() < 1e-12 && (v - 0.6).abs() < 1e-12);
    }
}
