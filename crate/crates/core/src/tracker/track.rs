use serde::{Deserialize, Serialize};

use super::extract::{extract_frame, ExtractOptions, Extraction, VortexPolyline};
use super::grid::{sample, Grid3};
use crate::catalog::AnalyticField;
use crate::error::{invalid, Result};
use crate::Vec3;

/// Lines found at one time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub index: usize,
    pub time: f64,
    pub lines: Vec<VortexPolyline>,
    #[serde(default)]
    pub ambiguous: usize,
    #[serde(default)]
    pub unpaired: usize,
    #[serde(default)]
    pub unrefined: usize,
}

impl Frame {
    pub fn from_extraction(index: usize, time: f64, e: Extraction) -> Self {
        Self { index, time, lines: e.lines, ambiguous: e.ambiguous, unpaired: e.unpaired, unrefined: e.unrefined }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Creation,
    Annihilation,
    Reconnection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventDetails {
    pub description: String,
    /// Narrowest sub-interval in which the change was seen.
    pub refined: [f64; 2],
    /// Lines of the earlier frame involved in the event.
    pub lines: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub t_lo: f64,
    pub t_hi: f64,
    pub frames: [usize; 2],
    pub location: [f64; 3],
    pub details: EventDetails,
}

impl Event {
    pub fn contains(&self, t: f64) -> bool {
        self.t_lo <= t && t <= self.t_hi
    }

    pub fn width(&self) -> f64 {
        self.t_hi - self.t_lo
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Warning {
    pub frames: [usize; 2],
    pub t_lo: f64,
    pub t_hi: f64,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub events: Vec<Event>,
    pub warnings: Vec<Warning>,
}

impl EventLog {
    pub fn of_kind(&self, kind: EventKind) -> impl Iterator<Item = &Event> + '_ {
        self.events.iter().filter(move |e| e.kind == kind)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackOptions {
    pub extract: ExtractOptions,
    /// Matching cutoff, in cell diagonals.
    pub match_cutoff: f64,
    /// Loops shorter than this (cell diagonals) may annihilate or be created.
    pub small_loop: f64,
    /// Antiparallel lines closer than this (cell diagonals) form a pair.
    pub pair_distance: f64,
    /// Bisection depth below a frame interval.
    pub max_bisections: usize,
    /// Total number of extra frames bisection may extract.
    pub subframe_budget: usize,
}

impl Default for TrackOptions {
    fn default() -> Self {
        Self {
            extract: ExtractOptions::default(),
            match_cutoff: 3.0,
            small_loop: 4.0,
            pair_distance: 4.0,
            max_bisections: 10,
            subframe_budget: 160,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tracking {
    pub grid: Grid3,
    pub frames: Vec<Frame>,
    pub events: EventLog,
}

/// Frame times at interval midpoints, so consecutive frames are
/// `(t1 − t0)/n` apart.
pub fn frame_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    let dt = (t1 - t0) / n as f64;
    (0..n).map(|i| t0 + (i as f64 + 0.5) * dt).collect()
}

/// Sample, scan and extract one frame of an analytic field.
pub fn extract_at(field: &dyn AnalyticField, grid: &Grid3, t: f64, index: usize, opts: &ExtractOptions) -> Result<Frame> {
    let f = sample(field, grid, t)?;
    Ok(Frame::from_extraction(index, t, extract_frame(&f, Some(field), opts)))
}

/// Extract `n_frames` frames over `[t0, t1]` and classify what happens
/// between them, bisecting in time where the topology changes.
pub fn track(
    field: &dyn AnalyticField,
    grid: &Grid3,
    t0: f64,
    t1: f64,
    n_frames: usize,
    opts: &TrackOptions,
) -> Result<Tracking> {
    check_window(t0, t1, n_frames)?;
    grid.validate()?;
    let frames = frame_times(t0, t1, n_frames)
        .into_iter()
        .enumerate()
        .map(|(i, t)| extract_at(field, grid, t, i, &opts.extract))
        .collect::<Result<Vec<_>>>()?;
    let events = Tracker { grid, field: Some(field), opts }.events(&frames)?;
    Ok(Tracking { grid: *grid, frames, events })
}

/// Classify events in precomputed frames (no bisection).
pub fn track_frames(grid: &Grid3, frames: Vec<Frame>, opts: &TrackOptions) -> Result<Tracking> {
    if frames.len() < 3 {
        return Err(invalid("frames", "need at least 3 frames"));
    }
    if frames.windows(2).any(|w| !(w[0].time < w[1].time)) {
        return Err(invalid("frames", "times must increase"));
    }
    let events = Tracker { grid, field: None, opts }.events(&frames)?;
    Ok(Tracking { grid: *grid, frames, events })
}

fn check_window(t0: f64, t1: f64, n: usize) -> Result<()> {
    if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
        return Err(invalid("time_range", "need finite t0 < t1"));
    }
    if n < 3 {
        return Err(invalid("n_frames", "need at least 3 frames"));
    }
    Ok(())
}

/// Symmetric Hausdorff distance between two polylines.
pub fn hausdorff(a: &VortexPolyline, b: &VortexPolyline) -> f64 {
    let one = |x: &VortexPolyline, y: &VortexPolyline| x.points.iter().map(|p| y.distance_to(p)).fold(0.0, f64::max);
    one(a, b).max(one(b, a))
}

/// Greedy one-to-one matching by ascending Hausdorff distance.
pub fn match_lines(a: &[VortexPolyline], b: &[VortexPolyline], cutoff: f64) -> Vec<Option<usize>> {
    let mut cand = Vec::new();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if x.closed != y.closed || !bbox_close(x, y, cutoff) {
                continue;
            }
            let d = hausdorff(x, y);
            if d < cutoff {
                cand.push((d, i, j));
            }
        }
    }
    cand.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
    let mut out = vec![None; a.len()];
    let mut used = vec![false; b.len()];
    for (_, i, j) in cand {
        if out[i].is_none() && !used[j] {
            out[i] = Some(j);
            used[j] = true;
        }
    }
    out
}

fn bbox(l: &VortexPolyline) -> (Vec3, Vec3) {
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for p in &l.points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

fn bbox_close(a: &VortexPolyline, b: &VortexPolyline, cutoff: f64) -> bool {
    let (la, ha) = bbox(a);
    let (lb, hb) = bbox(b);
    (0..3).all(|k| (la[k] - lb[k]).abs() < cutoff && (ha[k] - hb[k]).abs() < cutoff)
}

struct Diff {
    lost: Vec<usize>,
    gained: Vec<usize>,
}

fn compare(a: &Frame, b: &Frame, cutoff: f64) -> (Diff, Vec<Option<usize>>) {
    let m = match_lines(&a.lines, &b.lines, cutoff);
    let mut used = vec![false; b.lines.len()];
    for j in m.iter().flatten() {
        used[*j] = true;
    }
    let d = Diff {
        lost: (0..a.lines.len()).filter(|&i| m[i].is_none()).collect(),
        gained: (0..b.lines.len()).filter(|&j| !used[j]).collect(),
    };
    (d, m)
}

struct Found {
    kind: EventKind,
    location: Vec3,
    t: [f64; 2],
    what: &'static str,
    lines: Vec<usize>,
}

struct Tracker<'a> {
    grid: &'a Grid3,
    field: Option<&'a dyn AnalyticField>,
    opts: &'a TrackOptions,
}

impl Tracker<'_> {
    fn diag(&self) -> f64 {
        self.grid.cell_diagonal()
    }

    fn cutoff(&self) -> f64 {
        self.opts.match_cutoff * self.diag()
    }

    fn events(&self, frames: &[Frame]) -> Result<EventLog> {
        let mut log = EventLog::default();
        let mut budget = self.opts.subframe_budget;
        let mut brackets = Vec::with_capacity(frames.len().saturating_sub(1));
        for w in frames.windows(2) {
            let mut notes = Vec::new();
            let (found, map) = self.bisect(&w[0], &w[1], 0, &mut budget, &mut notes)?;
            brackets.push((found, map, notes));
        }
        let maps: Vec<&[Option<usize>]> = brackets.iter().map(|b| b.1.as_slice()).collect();
        for (i, (found, _, notes)) in brackets.iter().enumerate() {
            let (a, b) = (&frames[i], &frames[i + 1]);
            let frames_ij = [a.index, b.index];
            let warn = |log: &mut EventLog, message: String| {
                log.warnings.push(Warning { frames: frames_ij, t_lo: a.time, t_hi: b.time, message })
            };
            if a.ambiguous > 0 || b.ambiguous > 0 {
                warn(&mut log, format!("ambiguous faces: {} and {}", a.ambiguous, b.ambiguous));
            }
            for n in notes {
                warn(&mut log, n.clone());
            }
            let mut accepted: Vec<Event> = Vec::new();
            for f in found {
                if let Some(msg) = history_problem(frames, &maps, i, f) {
                    warn(&mut log, msg);
                    continue;
                }
                let dup = accepted
                    .iter_mut()
                    .find(|e| e.kind == f.kind && (Vec3::from(e.location) - f.location).norm() < self.cutoff());
                if let Some(e) = dup {
                    e.details.refined[1] = f.t[1];
                    continue;
                }
                accepted.push(Event {
                    kind: f.kind,
                    t_lo: a.time,
                    t_hi: b.time,
                    frames: frames_ij,
                    location: f.location.into(),
                    details: EventDetails { description: f.what.to_string(), refined: f.t, lines: f.lines.clone() },
                });
            }
            log.events.extend(accepted);
        }
        Ok(log)
    }

    /// Narrow the interval until each change can be classified. Also returns
    /// which line of `b` each line of `a` continues into.
    fn bisect(
        &self,
        a: &Frame,
        b: &Frame,
        depth: usize,
        budget: &mut usize,
        notes: &mut Vec<String>,
    ) -> Result<(Vec<Found>, Vec<Option<usize>>)> {
        let (d, map) = compare(a, b, self.cutoff());
        if d.lost.is_empty() && d.gained.is_empty() {
            return Ok((Vec::new(), map));
        }
        let field = match self.field {
            Some(f) if depth < self.opts.max_bisections && *budget > 0 => f,
            _ => return Ok((self.classify(a, b, d, notes), map)),
        };
        *budget -= 1;
        let tm = 0.5 * (a.time + b.time);
        let m = extract_at(field, self.grid, tm, a.index, &self.opts.extract)?;
        let (mut out, left) = self.bisect(a, &m, depth + 1, budget, notes)?;
        let (more, right) = self.bisect(&m, b, depth + 1, budget, notes)?;
        out.extend(more);
        Ok((out, left.iter().map(|j| j.and_then(|j| right[j])).collect()))
    }

    fn classify(&self, a: &Frame, b: &Frame, d: Diff, notes: &mut Vec<String>) -> Vec<Found> {
        let t = [a.time, b.time];
        let diag = self.diag();
        let mut found = Vec::new();
        let mut lost = d.lost;
        let mut gained = d.gained;

        // Exchange of partners between open lines.
        let open_l: Vec<usize> = lost.iter().copied().filter(|&i| !a.lines[i].closed).collect();
        let open_g: Vec<usize> = gained.iter().copied().filter(|&j| !b.lines[j].closed).collect();
        if open_l.len() >= 2 && open_g.len() >= 2 {
            if let Some(owner) = self.endpoint_owners(a, &open_l, b, &open_g) {
                if owner.iter().any(|(x, y)| x != y) {
                    let (p, q) = closest_approach(&a.lines[open_l[0]], &a.lines[open_l[1]]);
                    found.push(Found {
                        kind: EventKind::Reconnection,
                        location: (p + q) / 2.0,
                        t,
                        what: "lines exchanged strands",
                        lines: open_l.clone(),
                    });
                    lost.retain(|i| !open_l.contains(i));
                    gained.retain(|j| !open_g.contains(j));
                }
            }
        }

        let small = self.opts.small_loop * diag;
        lost.retain(|&i| {
            let l = &a.lines[i];
            let hit = l.closed && l.length() < small;
            if hit {
                found.push(Found {
                    kind: EventKind::Annihilation,
                    location: l.centroid(),
                    t,
                    what: "loop shrank to a point",
                    lines: vec![i],
                });
            }
            !hit
        });
        gained.retain(|&j| {
            let l = &b.lines[j];
            let hit = l.closed && l.length() < small;
            if hit {
                found.push(Found {
                    kind: EventKind::Creation,
                    location: l.centroid(),
                    t,
                    what: "loop sprang from a point",
                    lines: vec![],
                });
            }
            !hit
        });

        let near = self.opts.pair_distance * diag;
        for (pairs, frame, kind) in [
            (pair_up(&a.lines, &mut lost, near), a, EventKind::Annihilation),
            (pair_up(&b.lines, &mut gained, near), b, EventKind::Creation),
        ] {
            for (i, j) in pairs {
                let (p, q) = closest_approach(&frame.lines[i], &frame.lines[j]);
                let what = if kind == EventKind::Creation { "antiparallel pair created" } else { "antiparallel pair annihilated" };
                let lines = if kind == EventKind::Annihilation { vec![i, j] } else { vec![] };
                found.push(Found { kind, location: (p + q) / 2.0, t, what, lines });
            }
        }

        for i in lost {
            notes.push(format!("line {i} at t={} has no match at t={}", a.time, b.time));
        }
        for j in gained {
            notes.push(format!("line {j} at t={} has no match at t={}", b.time, a.time));
        }
        found
    }

    /// For each endpoint of the new lines, the old line whose endpoint it
    /// continues; `(owner of start, owner of end)` per new line.
    fn endpoint_owners(&self, a: &Frame, old: &[usize], b: &Frame, new: &[usize]) -> Option<Vec<(usize, usize)>> {
        let ends: Vec<(usize, Vec3)> = old
            .iter()
            .flat_map(|&i| {
                let l = &a.lines[i];
                [(i, l.points[0]), (i, *l.points.last().unwrap())]
            })
            .collect();
        let owner = |p: &Vec3| -> Option<usize> {
            ends.iter()
                .map(|(i, q)| (*i, (p - q).norm()))
                .filter(|(_, d)| *d < self.cutoff())
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .map(|(i, _)| i)
        };
        new.iter()
            .map(|&j| {
                let l = &b.lines[j];
                Some((owner(&l.points[0])?, owner(l.points.last()?)?))
            })
            .collect()
    }

}

/// Loops must have shrunk over the two frames before vanishing (grown over
/// the two after appearing). `maps[i]` carries lines of frame i to i+1.
fn history_problem(frames: &[Frame], maps: &[&[Option<usize>]], i: usize, f: &Found) -> Option<String> {
    if !f.what.starts_with("loop") {
        return None;
    }
    let annihilation = f.kind == EventKind::Annihilation;
    let first = if annihilation { i } else { i + 1 };
    let ok_range = if annihilation { i >= 2 } else { i + 3 < frames.len() };
    if !ok_range {
        return Some("loop event too close to the end of the window".into());
    }
    let start = frames[first]
        .lines
        .iter()
        .enumerate()
        .filter(|(_, l)| l.closed)
        .min_by(|x, y| (x.1.centroid() - f.location).norm().total_cmp(&(y.1.centroid() - f.location).norm()))
        .map(|(k, _)| k);
    let Some(mut k) = start else {
        return Some("loop event with no loop in the bracketing frame".into());
    };
    let mut lengths = vec![frames[first].lines[k].length()];
    for step in 1..=2 {
        let next = if annihilation {
            let m = maps[first - step];
            m.iter().position(|&j| j == Some(k))
        } else {
            maps[first + step - 1][k]
        };
        let Some(n) = next else {
            return Some("loop history broken".into());
        };
        k = n;
        let fr = if annihilation { first - step } else { first + step };
        lengths.push(frames[fr].lines[k].length());
    }
    // Lengths run away from the event, so they must increase.
    if lengths.windows(2).all(|p| p[1] > p[0]) {
        None
    } else {
        Some(format!("loop length not monotone near event: {lengths:?}"))
    }
}

/// Pull antiparallel close pairs out of `idx`.
fn pair_up(lines: &[VortexPolyline], idx: &mut Vec<usize>, near: f64) -> Vec<(usize, usize)> {
    let mut cand = Vec::new();
    for (p, &i) in idx.iter().enumerate() {
        for &j in &idx[p + 1..] {
            let (x, y) = (&lines[i], &lines[j]);
            if x.closed || y.closed || x.direction().dot(&y.direction()) >= 0.0 {
                continue;
            }
            let d = hausdorff(x, y);
            if d < near {
                cand.push((d, i, j));
            }
        }
    }
    cand.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut used: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    for (_, i, j) in cand {
        if !used.contains(&i) && !used.contains(&j) {
            used.extend([i, j]);
            out.push((i, j));
        }
    }
    idx.retain(|k| !used.contains(k));
    out
}

fn closest_approach(a: &VortexPolyline, b: &VortexPolyline) -> (Vec3, Vec3) {
    let mut best = (f64::INFINITY, Vec3::zeros(), Vec3::zeros());
    for p in &a.points {
        for q in &b.points {
            let d = (p - q).norm();
            if d < best.0 {
                best = (d, *p, *q);
            }
        }
    }
    (best.1, best.2)
}

/// Speeds of the points of one line between two frames.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineSpeed {
    pub frames: [usize; 2],
    pub line: usize,
    pub matched: usize,
    pub dt: f64,
    pub speeds: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeSpeeds {
    pub lines: Vec<LineSpeed>,
    pub warnings: Vec<String>,
}

impl NodeSpeeds {
    pub fn all(&self) -> impl Iterator<Item = f64> + '_ {
        self.lines.iter().flat_map(|l| l.speeds.iter().copied())
    }

    pub fn mean(&self) -> Option<f64> {
        let (s, n) = self.all().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
        (n > 0).then(|| s / n as f64)
    }

    pub fn max(&self) -> Option<f64> {
        self.all().reduce(f64::max)
    }

    pub fn min(&self) -> Option<f64> {
        self.all().reduce(f64::min)
    }
}

/// Distance from each point to the matched line of the next frame, over Δt.
/// End points of open lines are skipped (they are clipped by the box).
pub fn node_speed(frames: &[Frame], cutoff: f64) -> Result<NodeSpeeds> {
    if frames.len() < 2 {
        return Err(invalid("frames", "need at least 2 frames"));
    }
    let mut out = NodeSpeeds::default();
    for w in frames.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let dt = b.time - a.time;
        if !(dt > 0.0) {
            return Err(invalid("frames", "times must increase"));
        }
        let m = match_lines(&a.lines, &b.lines, cutoff);
        for (i, l) in a.lines.iter().enumerate() {
            let Some(j) = m[i] else {
                out.warnings.push(format!("line {i} of frame {} unmatched", a.index));
                continue;
            };
            let range = if l.closed { 0..l.len() } else { 1..l.len().saturating_sub(1) };
            let speeds = l.points[range].iter().map(|p| b.lines[j].distance_to(p) / dt).collect();
            out.lines.push(LineSpeed { frames: [a.index, b.index], line: i, matched: j, dt, speeds });
        }
    }
    Ok(out)
}
