use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::faces::{bilinear_crossing, scan, FaceId, FaceScan, PiercedFace, Probe, ScanOptions};
use super::grid::{Grid3, SampledField};
use crate::anatomy::local_data;
use crate::catalog::AnalyticField;
use crate::error::{Error, Result};
use crate::{CVec3, Vec3};

/// An extracted vortex line, oriented so that the phase winds
/// counter-clockwise (`winding > 0`) about its direction of travel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VortexPolyline {
    pub points: Vec<Vec3>,
    pub closed: bool,
    pub winding: i32,
    pub frame_time: f64,
    /// Open line whose ends both lie on the grid boundary.
    #[serde(default)]
    pub boundary: bool,
    /// Squeeze angle per point (analytic fields only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chi: Vec<f64>,
}

impl VortexPolyline {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn segments(&self) -> impl Iterator<Item = (&Vec3, &Vec3)> + '_ {
        let n = self.points.len();
        let extra = if self.closed && n > 1 { 1 } else { 0 };
        (0..n.saturating_sub(1) + extra).map(move |i| (&self.points[i], &self.points[(i + 1) % n]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    pub fn centroid(&self) -> Vec3 {
        self.points.iter().sum::<Vec3>() / self.points.len().max(1) as f64
    }

    /// Unit tangent at point `i` from its neighbours.
    pub fn tangent(&self, i: usize) -> Vec3 {
        let n = self.points.len();
        let (a, b) = if self.closed {
            ((i + n - 1) % n, (i + 1) % n)
        } else {
            (i.saturating_sub(1), (i + 1).min(n - 1))
        };
        (self.points[b] - self.points[a]).normalize()
    }

    /// Mean direction (end minus start for open lines).
    pub fn direction(&self) -> Vec3 {
        match (self.points.first(), self.points.last()) {
            (Some(a), Some(b)) if !self.closed && a != b => (b - a).normalize(),
            _ => Vec3::zeros(),
        }
    }

    /// Shortest distance from `p` to the polyline.
    pub fn distance_to(&self, p: &Vec3) -> f64 {
        if self.points.len() == 1 {
            return (p - self.points[0]).norm();
        }
        self.segments().map(|(a, b)| segment_distance(p, a, b)).fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn segment_distance(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let d = b - a;
    let l2 = d.norm_squared();
    let s = if l2 > 0.0 { ((p - a).dot(&d) / l2).clamp(0.0, 1.0) } else { 0.0 };
    (p - (a + d * s)).norm()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtractOptions {
    pub scan: ScanOptions,
    /// Refined points satisfy |ψ| < zero_tolerance · median|ψ|.
    pub zero_tolerance: f64,
    /// Sub-cells per axis when a cell is pierced by more than one line.
    pub subdivision: usize,
    pub max_depth: usize,
    pub max_iterations: usize,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            scan: ScanOptions::default(),
            zero_tolerance: 1e-9,
            subdivision: 4,
            max_depth: 2,
            max_iterations: 25,
        }
    }
}

/// Lines from one sampled field plus bookkeeping.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Extraction {
    pub lines: Vec<VortexPolyline>,
    pub pierced: usize,
    pub ambiguous: usize,
    /// Faces left without a partner (line ends inside the box).
    pub unpaired: usize,
    /// Crossings kept at their interpolated position.
    pub unrefined: usize,
}

/// Newton iteration for a zero of ψ in the plane through `seed` normal to
/// `normal`, using the exact gradient.
pub fn refine_point<F: AnalyticField + ?Sized>(
    field: &F,
    t: f64,
    seed: &Vec3,
    normal: &Vec3,
    tolerance: f64,
    max_iterations: usize,
) -> Result<Vec3> {
    let nn = normal.norm();
    if !(nn > 0.0) || !seed.iter().all(|v| v.is_finite()) || !t.is_finite() {
        return Err(Error::NonFinite("refine_point input"));
    }
    let n = normal / nn;
    let helper = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = (helper - n * n.dot(&helper)).normalize();
    let e2 = n.cross(&e1);
    let mut p = *seed;
    let mut residual = f64::INFINITY;
    for it in 0..=max_iterations {
        let j = field.jet_at(&p, t);
        residual = j.v.norm();
        if !residual.is_finite() {
            break;
        }
        if residual < tolerance {
            return Ok(p);
        }
        if it == max_iterations {
            break;
        }
        let g = CVec3::new(j.g[0], j.g[1], j.g[2]);
        let d1 = g.dot(&e1.map(|v| C64::new(v, 0.0)));
        let d2 = g.dot(&e2.map(|v| C64::new(v, 0.0)));
        let det = d1.re * d2.im - d2.re * d1.im;
        let scale = d1.norm() * d2.norm();
        if !(det.abs() > 1e-10 * scale) {
            return Err(Error::RefinementFailed { last: p.into(), residual, iterations: it });
        }
        let a = -(j.v.re * d2.im - d2.re * j.v.im) / det;
        let b = -(d1.re * j.v.im - j.v.re * d1.im) / det;
        p += e1 * a + e2 * b;
    }
    Err(Error::RefinementFailed { last: p.into(), residual, iterations: max_iterations })
}

/// Link pierced faces of a sampled field into polylines using interpolated
/// crossings only.
pub fn extract_lines(field: &SampledField, scan: &FaceScan) -> Vec<VortexPolyline> {
    extract_lines_with(field, scan, None, &ExtractOptions::default()).lines
}

/// As [`extract_lines`]; with an analytic field the crossings are refined on
/// the exact zero set and multiply-pierced cells are resolved on a finer
/// local grid.
pub fn extract_lines_with(
    field: &SampledField,
    scan: &FaceScan,
    analytic: Option<&dyn AnalyticField>,
    opts: &ExtractOptions,
) -> Extraction {
    let t = field.time;
    let probe_fn = analytic.map(|f| move |r: &Vec3| f.value_at(r, t));
    let probe: Option<Probe> = probe_fn.as_ref().map(|f| f as Probe);
    link_scan(field, scan, analytic, probe, opts)
}

fn link_scan(
    field: &SampledField,
    scan: &FaceScan,
    analytic: Option<&dyn AnalyticField>,
    probe: Option<Probe>,
    opts: &ExtractOptions,
) -> Extraction {
    let grid = &field.grid;
    let t = field.time;
    let median = field.median_abs();
    let tol = opts.zero_tolerance * median;

    let mut unrefined = 0;
    let mut positions: HashMap<FaceId, Vec3> = HashMap::with_capacity(scan.pierced.len());
    for p in &scan.pierced {
        let est = bilinear_crossing(grid, &field.values, &p.face);
        let pos = match analytic {
            Some(f) => match refine_in_face(f, t, grid, &p.face, est, tol, opts) {
                Some(r) => r,
                None => {
                    unrefined += 1;
                    est
                }
            },
            None => est,
        };
        positions.insert(p.face, pos);
    }

    let floor = opts.scan.degeneracy_floor * median;
    let ctx = Ctx { probe, opts, floor };
    let (succ, mut unpaired) = link(grid, &scan.pierced, &positions, &ctx, opts.max_depth);
    let chains = assemble(&scan.pierced, &succ);

    let mut lines = Vec::new();
    for (faces, closed) in chains {
        if faces.len() < if closed { 3 } else { 2 } {
            unpaired += faces.len();
            continue;
        }
        let winding = scan.pierced.iter().find(|p| p.face == faces[0]).map(|p| p.winding.abs()).unwrap_or(1);
        let points: Vec<Vec3> = faces.iter().map(|f| positions[f]).collect();
        let boundary = !closed && faces[0].is_boundary(grid) && faces[faces.len() - 1].is_boundary(grid);
        if !closed && !boundary {
            unpaired += 1;
        }
        let chi = match analytic {
            Some(f) => points
                .iter()
                .map(|p| {
                    let j = f.jet_at(p, t);
                    local_data(CVec3::new(j.g[0], j.g[1], j.g[2])).map(|d| d.chi).unwrap_or(f64::NAN)
                })
                .collect(),
            None => Vec::new(),
        };
        lines.push(VortexPolyline { points, closed, winding, frame_time: t, boundary, chi });
    }
    Extraction { lines, pierced: scan.pierced.len(), ambiguous: scan.ambiguous.len(), unpaired, unrefined }
}

/// Scan and extract in one step.
pub fn extract_frame(field: &SampledField, analytic: Option<&dyn AnalyticField>, opts: &ExtractOptions) -> Extraction {
    let t = field.time;
    let probe_fn = analytic.map(|f| move |r: &Vec3| f.value_at(r, t));
    let probe: Option<Probe> = probe_fn.as_ref().map(|f| f as Probe);
    let floor = opts.scan.degeneracy_floor * field.median_abs();
    let s = scan(&field.grid, &field.values, probe, &opts.scan, floor);
    link_scan(field, &s, analytic, probe, opts)
}

/// Scan and extract a field known only through samples, using `probe` (an
/// interpolant of the samples) to resolve edges and crowded cells.
/// Crossings stay at their bilinear estimates.
pub fn extract_frame_probed(field: &SampledField, probe: Probe, opts: &ExtractOptions) -> Extraction {
    let floor = opts.scan.degeneracy_floor * field.median_abs();
    let s = scan(&field.grid, &field.values, Some(probe), &opts.scan, floor);
    link_scan(field, &s, None, Some(probe), opts)
}

fn refine_in_face(
    f: &dyn AnalyticField,
    t: f64,
    grid: &Grid3,
    face: &FaceId,
    est: Vec3,
    tol: f64,
    opts: &ExtractOptions,
) -> Option<Vec3> {
    let a = face.axis as usize;
    let mut normal = Vec3::zeros();
    normal[a] = 1.0;
    let inside = |p: &Vec3| {
        let (_, b, c) = face.axes();
        let lo = grid.point(face.node);
        [b, c].iter().all(|&k| {
            let u = (p[k] - lo[k]) / grid.spacing[k];
            (-1e-3..=1.0 + 1e-3).contains(&u)
        })
    };
    for seed in [est, face.center(grid)] {
        if let Ok(p) = refine_point(f, t, &seed, &normal, tol, opts.max_iterations) {
            if inside(&p) {
                return Some(p);
            }
        }
    }
    None
}

struct Ctx<'a> {
    probe: Option<Probe<'a>>,
    opts: &'a ExtractOptions,
    floor: f64,
}

type Links = BTreeMap<FaceId, FaceId>;

/// Pair entering and leaving crossings inside every cell.
fn link(
    grid: &Grid3,
    pierced: &[PiercedFace],
    positions: &HashMap<FaceId, Vec3>,
    ctx: &Ctx,
    depth: usize,
) -> (Links, usize) {
    let mut cells: BTreeMap<usize, Vec<(FaceId, i32)>> = BTreeMap::new();
    for p in pierced {
        let a = p.face.axis as usize;
        let n = p.face.node;
        if n[a] >= 1 {
            let mut c = n;
            c[a] -= 1;
            cells.entry(grid.index(c)).or_default().push((p.face, p.winding));
        }
        if n[a] + 1 < grid.dims[a] {
            cells.entry(grid.index(n)).or_default().push((p.face, -p.winding));
        }
    }

    let mut succ = Links::new();
    let mut unpaired = 0;
    for (cell, faces) in cells {
        let ins: Vec<FaceId> = faces.iter().filter(|f| f.1 < 0).map(|f| f.0).collect();
        let outs: Vec<FaceId> = faces.iter().filter(|f| f.1 > 0).map(|f| f.0).collect();
        if ins.len() == 1 && outs.len() == 1 {
            succ.insert(ins[0], outs[0]);
            continue;
        }
        let resolved = if ctx.probe.is_some() && depth > 0 {
            resolve_cell(grid, grid.node_of(cell), &ins, &outs, ctx, depth)
        } else {
            None
        };
        let pairs = resolved.unwrap_or_else(|| nearest_pairs(&ins, &outs, positions));
        unpaired += ins.len() + outs.len() - 2 * pairs.len();
        succ.extend(pairs);
    }
    (succ, unpaired)
}

/// Pair crossings of one cell by tracing them through a finer local grid.
fn resolve_cell(
    grid: &Grid3,
    cell: [usize; 3],
    ins: &[FaceId],
    outs: &[FaceId],
    ctx: &Ctx,
    depth: usize,
) -> Option<Vec<(FaceId, FaceId)>> {
    let probe = ctx.probe?;
    let s = ctx.opts.subdivision.max(2);
    let sub = Grid3::new(grid.point(cell).into(), grid.spacing.map(|h| h / s as f64), [s + 1; 3]).ok()?;
    let values: Vec<C64> = (0..sub.len()).map(|i| probe(&sub.point(sub.node_of(i)))).collect();
    let fs = scan(&sub, &values, Some(probe), &ctx.opts.scan, ctx.floor);
    if !fs.ambiguous.is_empty() {
        return None;
    }
    let positions: HashMap<FaceId, Vec3> =
        fs.pierced.iter().map(|p| (p.face, bilinear_crossing(&sub, &values, &p.face))).collect();
    let (succ, _) = link(&sub, &fs.pierced, &positions, ctx, depth - 1);

    let parent = |f: &FaceId| -> Option<FaceId> {
        let a = f.axis as usize;
        let mut node = cell;
        match f.node[a] {
            0 => {}
            v if v == s => node[a] += 1,
            _ => return None,
        }
        Some(FaceId { axis: f.axis, node })
    };
    let mut pairs = Vec::new();
    for (chain, closed) in assemble(&fs.pierced, &succ) {
        if closed {
            continue;
        }
        let (a, b) = (parent(&chain[0])?, parent(chain.last()?)?);
        if a != b {
            pairs.push((a, b));
        }
    }
    let starts: BTreeSet<FaceId> = pairs.iter().map(|p| p.0).collect();
    let ends: BTreeSet<FaceId> = pairs.iter().map(|p| p.1).collect();
    let ok = pairs.len() == ins.len()
        && pairs.len() == outs.len()
        && starts == ins.iter().copied().collect()
        && ends == outs.iter().copied().collect();
    ok.then_some(pairs)
}

/// Pairing that minimises total distance between crossings.
fn nearest_pairs(ins: &[FaceId], outs: &[FaceId], positions: &HashMap<FaceId, Vec3>) -> Vec<(FaceId, FaceId)> {
    let pos = |f: &FaceId| positions.get(f).copied().unwrap_or_else(Vec3::zeros);
    let m = ins.len().min(outs.len());
    if m == 0 {
        return Vec::new();
    }
    if ins.len() == outs.len() && m <= 6 {
        let mut perm: Vec<usize> = (0..m).collect();
        let mut best = (f64::INFINITY, perm.clone());
        permute(&mut perm, 0, &mut |p| {
            let cost: f64 = p.iter().enumerate().map(|(i, &j)| (pos(&ins[i]) - pos(&outs[j])).norm()).sum();
            if cost < best.0 {
                best = (cost, p.to_vec());
            }
        });
        return best.1.iter().enumerate().map(|(i, &j)| (ins[i], outs[j])).collect();
    }
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for (i, a) in ins.iter().enumerate() {
        for (j, b) in outs.iter().enumerate() {
            cand.push(((pos(a) - pos(b)).norm(), i, j));
        }
    }
    cand.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (mut ui, mut uj) = (vec![false; ins.len()], vec![false; outs.len()]);
    let mut pairs = Vec::new();
    for (_, i, j) in cand {
        if !ui[i] && !uj[j] {
            ui[i] = true;
            uj[j] = true;
            pairs.push((ins[i], outs[j]));
        }
    }
    pairs
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// Follow successor links into open chains (from faces with no
/// predecessor) and then closed loops.
fn assemble(pierced: &[PiercedFace], succ: &Links) -> Vec<(Vec<FaceId>, bool)> {
    let has_pred: BTreeSet<FaceId> = succ.values().copied().collect();
    let mut faces: Vec<FaceId> = pierced.iter().map(|p| p.face).collect();
    faces.sort();
    let mut seen: BTreeSet<FaceId> = BTreeSet::new();
    let mut out = Vec::new();
    let walk = |start: FaceId, seen: &mut BTreeSet<FaceId>| {
        let mut chain = vec![start];
        seen.insert(start);
        let mut cur = start;
        let mut closed = false;
        while let Some(&next) = succ.get(&cur) {
            if next == start {
                closed = true;
                break;
            }
            if !seen.insert(next) {
                break;
            }
            chain.push(next);
            cur = next;
        }
        (chain, closed)
    };
    for &f in &faces {
        if !has_pred.contains(&f) && !seen.contains(&f) {
            out.push(walk(f, &mut seen));
        }
    }
    for &f in &faces {
        if !seen.contains(&f) {
            out.push(walk(f, &mut seen));
        }
    }
    out
}
