use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ScenarioConfig, SpeedTarget};
use crate::anatomy::{circulation, line_velocity, AnatomyOptions, Contour, Gauge};
use crate::catalog::{generate_from_polynomial, AnalyticField};
use crate::propagator::{evolve, l2_relative_error, norm, Hamiltonian, PropagatorConfig, SpectralInterpolant};
use crate::tracker::{
    extract_at, extract_frame, extract_frame_probed, hausdorff, node_speed, refine_point, sample, ExtractOptions, Frame, Tracking,
    VortexPolyline,
};
use crate::{Solution, SolutionSpec, Vec3};

/// Pinned pass thresholds. Lengths are in cell diagonals.
pub struct Tolerances;

impl Tolerances {
    pub const RESIDUAL: f64 = 1e-6;
    pub const CIRCULATION: f64 = 1e-4;
    pub const RING_LOCUS: f64 = 0.5;
    pub const LINE_LOCUS: f64 = 1.0;
    pub const ORACLE_L2: f64 = 1e-5;
    pub const ORACLE_TRACKER: f64 = 1.0;
    pub const NORM: f64 = 1e-10;
    pub const VELOCITY_LAW: f64 = 1e-4;
    pub const VELOCITY_DT: f64 = 1e-4;
    pub const GENERATION: f64 = 1e-5;
    /// Relative amplitude below which a propagated field is treated as noise.
    pub const NOISE_FLOOR: f64 = 1e-10;
    pub const GENERATION_POINTS: usize = 100;
    pub const RESIDUAL_POINTS: usize = 1000;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl CheckResult {
    fn below(name: impl Into<String>, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass: measured <= tolerance, measured, tolerance, detail: detail.into() }
    }

    fn failed(name: impl Into<String>, tolerance: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass: false, measured: f64::NAN, tolerance, detail: detail.into() }
    }
}

pub(crate) struct Ctx<'a> {
    pub cfg: &'a ScenarioConfig,
    pub sol: &'a Solution,
    pub frames: &'a [Frame],
    pub tracking: Option<&'a Tracking>,
    pub extract: ExtractOptions,
}

impl Ctx<'_> {
    fn diag(&self) -> f64 {
        self.cfg.grid.cell_diagonal()
    }

    fn frame_at(&self, t: f64, index: usize) -> crate::Result<Frame> {
        extract_at(self.sol, &self.cfg.grid, t, index, &self.extract)
    }
}

/// Families that only exist as plane-wave-carried closed forms and are
/// multiplied by a Gaussian window before numerical evolution.
pub(crate) fn needs_window(spec: &SolutionSpec) -> bool {
    matches!(spec, SolutionSpec::FreePlaneWave { .. }) || generation_carrier(spec).is_some()
}

/// Plane-wave carrier whose k-derivatives reproduce `spec`.
pub(crate) fn generation_carrier(spec: &SolutionSpec) -> Option<SolutionSpec> {
    use SolutionSpec::*;
    match spec {
        FreeLineVortex { k, .. }
        | FreeRingCylinder { k, .. }
        | FreeRingSphere { k, .. }
        | FreeTwoLines { k, .. }
        | FreeTwoLinesSymmetric { k, .. } => Some(FreePlaneWave { k: *k }),
        _ => None,
    }
}

fn random_points(cfg: &ScenarioConfig, seed: u64, n: usize) -> Vec<(Vec3, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (cfg.grid.lower(), cfg.grid.upper());
    let [t0, t1] = cfg.time_range;
    (0..n)
        .map(|_| {
            let r = Vec3::new(
                rng.random_range(lo.x..hi.x),
                rng.random_range(lo.y..hi.y),
                rng.random_range(lo.z..hi.z),
            );
            (r, rng.random_range(t0..t1))
        })
        .collect()
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

/// Interior points of a polyline, at most `k` of them, evenly spread.
fn sample_indices(line: &VortexPolyline, k: usize) -> Vec<usize> {
    let (lo, hi) = if line.closed { (0, line.len()) } else { (1, line.len().saturating_sub(1)) };
    if hi <= lo {
        return Vec::new();
    }
    let n = hi - lo;
    let k = k.min(n);
    (0..k).map(|i| lo + i * n / k).collect()
}

/// Max over both directions of the distance from each line of one set to
/// its nearest line in the other; infinite when the counts differ.
fn set_distance(a: &[VortexPolyline], b: &[VortexPolyline]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let one_way = |x: &[VortexPolyline], y: &[VortexPolyline]| {
        worst(x.iter().map(|l| y.iter().map(|m| hausdorff(l, m)).fold(f64::INFINITY, f64::min)))
    };
    one_way(a, b).max(one_way(b, a))
}

pub(crate) fn residual(ctx: &Ctx) -> Vec<CheckResult> {
    let n = ctx.cfg.expect.residual_points.unwrap_or(Tolerances::RESIDUAL_POINTS);
    let pts = random_points(ctx.cfg, ctx.cfg.seed, n);
    let r: Vec<f64> = pts.par_iter().map(|(r, t)| ctx.sol.pde_residual(r, *t).unwrap_or(f64::NAN)).collect();
    vec![CheckResult::below(
        "residual",
        worst(r),
        Tolerances::RESIDUAL,
        format!("max normalized residual over {n} points"),
    )]
}

pub(crate) fn circulation_check(ctx: &Ctx) -> Vec<CheckResult> {
    let q = ctx.sol.consts().circulation_quantum();
    let radius = 0.25 * ctx.cfg.grid.spacing.iter().cloned().fold(f64::INFINITY, f64::min);
    let opts = AnatomyOptions::default();
    let mut by_winding: BTreeMap<i32, (usize, f64)> = BTreeMap::new();
    for f in ctx.frames {
        for line in &f.lines {
            let errs: Vec<f64> = sample_indices(line, 6)
                .into_par_iter()
                .map(|i| {
                    let Ok(c) = Contour::new(line.points[i], line.tangent(i), radius, 64) else {
                        return f64::NAN;
                    };
                    let expected = line.winding as f64 * q;
                    match circulation(ctx.sol, &c, f.time, Gauge::Zero, &opts) {
                        Ok(g) => (g - expected).abs() / expected.abs(),
                        Err(_) => f64::NAN,
                    }
                })
                .collect();
            let e = by_winding.entry(line.winding.abs()).or_insert((0, 0.0));
            e.0 += errs.len();
            e.1 = worst(std::iter::once(e.1).chain(errs));
        }
    }
    if by_winding.values().all(|(n, _)| *n == 0) {
        return vec![CheckResult::failed("circulation", Tolerances::CIRCULATION, "no lines to integrate around")];
    }
    by_winding
        .into_iter()
        .map(|(n, (count, err))| {
            CheckResult::below(
                format!("circulation.n{n}"),
                err,
                Tolerances::CIRCULATION,
                format!("relative deviation from {n}·2πħ/m over {count} contours"),
            )
        })
        .collect()
}

pub(crate) fn events(ctx: &Ctx) -> Vec<CheckResult> {
    let Some(tr) = ctx.tracking else {
        return vec![CheckResult::failed("events", 0.0, "no tracking available")];
    };
    let cfg = ctx.cfg;
    let width = (cfg.time_range[1] - cfg.time_range[0]) / cfg.n_frames as f64;
    let mut used = vec![false; tr.events.events.len()];
    let mut out = Vec::new();
    for ex in cfg.expect.events.iter().flatten() {
        let name = format!("events.{}@{}", kind_name(ex.kind), ex.t);
        let hit = tr.events.events.iter().enumerate().find(|(i, e)| !used[*i] && e.kind == ex.kind && e.contains(ex.t));
        match hit {
            Some((i, e)) => {
                used[i] = true;
                out.push(CheckResult::below(
                    name,
                    e.width(),
                    width * (1.0 + 1e-9),
                    format!("bracket [{}, {}], refined [{}, {}]", e.t_lo, e.t_hi, e.details.refined[0], e.details.refined[1]),
                ));
            }
            None => out.push(CheckResult::failed(name, width, "no matching event bracket")),
        }
    }
    let extra: Vec<String> = tr
        .events
        .events
        .iter()
        .zip(&used)
        .filter(|(_, u)| !**u)
        .map(|(e, _)| format!("{} in [{}, {}]", kind_name(e.kind), e.t_lo, e.t_hi))
        .collect();
    let mut detail = extra.join(", ");
    if !tr.events.warnings.is_empty() {
        if !detail.is_empty() {
            detail.push_str("; ");
        }
        detail.push_str(&format!("{} tracking warnings", tr.events.warnings.len()));
    }
    out.push(CheckResult::below("events.unexpected", extra.len() as f64, 0.0, detail));
    out
}

fn kind_name(k: crate::tracker::EventKind) -> &'static str {
    match k {
        crate::tracker::EventKind::Creation => "creation",
        crate::tracker::EventKind::Annihilation => "annihilation",
        crate::tracker::EventKind::Reconnection => "reconnection",
    }
}

pub(crate) fn locus(ctx: &Ctx) -> Vec<CheckResult> {
    use SolutionSpec::*;
    let c = *ctx.sol.consts();
    let hm = c.hbar / c.mass;
    match ctx.sol.spec() {
        FreeRingSphere { r, a, k } => {
            let (r, v, s) = (*r, c.velocity(k), 3.0 * hm / a);
            ring_locus(ctx, |t| (v * t + Vec3::new(0.0, 0.0, -s * t), (r * r - (s * t).powi(2)).max(0.0).sqrt()))
        }
        FreeRingCylinder { r, a, k } => {
            let (r, v, s) = (*r, c.velocity(k), 2.0 * hm / a);
            ring_locus(ctx, |t| (v * t + Vec3::new(0.0, 0.0, -s * t), r))
        }
        FreeTwoLinesSymmetric { a, .. } => pair_separation(ctx, *a),
        MagneticLine { b, a, varphi } => magnetic_locus(ctx, c.charge * b / c.mass, *a, *varphi),
        TrapRing { omega, r } => trap_locus(ctx, *omega, *r),
        _ => vec![projection_locus(ctx)],
    }
}

/// Horizontal ring with centre and radius given as functions of time.
fn ring_locus(ctx: &Ctx, ring: impl Fn(f64) -> (Vec3, f64)) -> Vec<CheckResult> {
    let d = ctx.diag();
    let mut err: f64 = 0.0;
    let mut checked = 0;
    let mut problems = Vec::new();
    for f in ctx.frames {
        let (centre, rho) = ring(f.time);
        let expected = usize::from(rho > 0.0);
        if rho < 2.0 * d && rho > 0.0 {
            continue;
        }
        if f.lines.len() != expected {
            problems.push(format!("t={}: {} lines, expected {expected}", f.time, f.lines.len()));
            continue;
        }
        for p in f.lines.iter().flat_map(|l| &l.points) {
            let q = p - centre;
            let radial = (q.x.hypot(q.y) - rho).abs();
            err = err.max(radial.max(q.z.abs()));
        }
        checked += 1;
    }
    let measured = if problems.is_empty() { err / d } else { f64::INFINITY };
    let mut detail = format!("max distance to the ring in cell diagonals over {checked} frames");
    if !problems.is_empty() {
        detail = problems.join("; ");
    }
    vec![CheckResult::below("locus.ring", measured, Tolerances::RING_LOCUS, detail)]
}

fn pair_separation(ctx: &Ctx, a: f64) -> Vec<CheckResult> {
    let d = ctx.diag();
    let f = match ctx.frame_at(0.0, 0) {
        Ok(f) => f,
        Err(e) => return vec![CheckResult::failed("locus.separation", Tolerances::LINE_LOCUS, e.to_string())],
    };
    if f.lines.len() != 2 {
        return vec![CheckResult::failed(
            "locus.separation",
            Tolerances::LINE_LOCUS,
            format!("{} lines at t=0, expected 2", f.lines.len()),
        )];
    }
    let sep = f.lines[0].points.iter().map(|p| f.lines[1].distance_to(p)).fold(f64::INFINITY, f64::min);
    vec![CheckResult::below(
        "locus.separation",
        (sep - 2.0 * a).abs() / d,
        Tolerances::LINE_LOCUS,
        format!("distance between the lines at t=0 is {sep}, expected {}", 2.0 * a),
    )]
}

/// Distance from `p` to the printed parametric line at cyclotron phase θ.
fn magnetic_distance(p: &Vec3, theta: f64, a: f64, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    let den = 1.0 - s + (1.0 + s) * theta.cos();
    let p0 = Vec3::new(0.0, 2.0 * a / den, -a * theta.sin() * (1.0 / c + s / c) / den);
    let dir = Vec3::new(1.0, theta.sin() * (1.0 + s) / den, -2.0 * (s / c) / den).normalize();
    let q = p - p0;
    (q - dir * q.dot(&dir)).norm()
}

fn magnetic_locus(ctx: &Ctx, omega_c: f64, a: f64, phi: f64) -> Vec<CheckResult> {
    let d = ctx.diag();
    let period = std::f64::consts::TAU / omega_c.abs();
    let phases: Vec<usize> = (0..8).collect();
    let frames: Vec<crate::Result<Frame>> =
        phases.par_iter().map(|&j| ctx.frame_at(period * j as f64 / 8.0, j)).collect();
    let mut err: f64 = 0.0;
    let mut problems = Vec::new();
    for (j, f) in frames.iter().enumerate() {
        let theta = omega_c * period * j as f64 / 8.0;
        match f {
            Ok(f) if !f.lines.is_empty() => {
                for p in f.lines.iter().flat_map(|l| &l.points) {
                    err = err.max(magnetic_distance(p, theta, a, phi));
                }
            }
            Ok(_) => problems.push(format!("phase {j}/8: no line")),
            Err(e) => problems.push(format!("phase {j}/8: {e}")),
        }
    }
    let measured = if problems.is_empty() { err / d } else { f64::INFINITY };
    let detail = if problems.is_empty() {
        "max distance to the parametric line at 8 phases, in cell diagonals".to_string()
    } else {
        problems.join("; ")
    };
    let mut out = vec![CheckResult::below("locus.parametric", measured, Tolerances::LINE_LOCUS, detail)];
    out.push(periodicity(ctx, &[0.0, period / 8.0], period, Tolerances::LINE_LOCUS));
    out
}

fn trap_locus(ctx: &Ctx, omega: f64, r: f64) -> Vec<CheckResult> {
    let d = ctx.diag();
    let circle = match ctx.frame_at(0.0, 0) {
        Ok(f) if f.lines.len() == 1 && f.lines[0].closed => {
            let e = worst(f.lines[0].points.iter().map(|p| ((p.x - r).hypot(p.y) - r).hypot(p.z)));
            CheckResult::below(
                "locus.circle",
                e / d,
                Tolerances::RING_LOCUS,
                "max distance to (x−R)²+y²=R², z=0 at t=0, in cell diagonals",
            )
        }
        Ok(f) => CheckResult::failed(
            "locus.circle",
            Tolerances::RING_LOCUS,
            format!("{} lines at t=0, expected one closed ring", f.lines.len()),
        ),
        Err(e) => CheckResult::failed("locus.circle", Tolerances::RING_LOCUS, e.to_string()),
    };
    let period = std::f64::consts::TAU / omega;
    vec![circle, periodicity(ctx, &[0.0, period / 8.0, 3.0 * period / 8.0], period, Tolerances::RING_LOCUS)]
}

fn periodicity(ctx: &Ctx, times: &[f64], period: f64, tol: f64) -> CheckResult {
    let d = ctx.diag();
    let pairs: Vec<crate::Result<f64>> = times
        .par_iter()
        .map(|&t| {
            let a = ctx.frame_at(t, 0)?;
            let b = ctx.frame_at(t + period, 1)?;
            Ok(if a.lines.is_empty() { f64::INFINITY } else { set_distance(&a.lines, &b.lines) })
        })
        .collect();
    match pairs.into_iter().collect::<crate::Result<Vec<f64>>>() {
        Ok(v) => CheckResult::below(
            "locus.periodicity",
            worst(v) / d,
            tol,
            format!("locus at t vs t+{period} at {} times, in cell diagonals", times.len()),
        ),
        Err(e) => CheckResult::failed("locus.periodicity", tol, e.to_string()),
    }
}

/// Newton projection of extracted points onto the exact zero set.
fn projection_locus(ctx: &Ctx) -> CheckResult {
    let d = ctx.diag();
    let l = ctx.sol.length_scale();
    let mut dists = Vec::new();
    for f in ctx.frames {
        for line in &f.lines {
            for i in sample_indices(line, 16) {
                let p = line.points[i];
                let g = ctx.sol.jet_at(&p, f.time).g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let q = refine_point(ctx.sol, f.time, &p, &line.tangent(i), 1e-12 * g * l, 50);
                dists.push(q.map(|q| (q - p).norm()).unwrap_or(f64::NAN));
            }
        }
    }
    if dists.is_empty() {
        return CheckResult::failed("locus.projection", Tolerances::RING_LOCUS, "no lines extracted");
    }
    let n = dists.len();
    CheckResult::below(
        "locus.projection",
        worst(dists) / d,
        Tolerances::RING_LOCUS,
        format!("max distance to the exact zero set over {n} points, in cell diagonals"),
    )
}

/// Field actually evolved by the oracle check.
pub(crate) fn oracle_field(cfg: &ScenarioConfig, sol: &Solution) -> crate::Result<Solution> {
    if !needs_window(&cfg.spec) {
        return Ok(sol.clone());
    }
    let window = cfg.expect.window.unwrap_or(8.0 * sol.natural_length());
    let spec = SolutionSpec::Generated {
        carrier: Box::new(SolutionSpec::GaussianPacket { l: window, k: cfg.spec.wave_vector() }),
        poly: sol.prefactor(0.0)?,
    };
    Solution::new(spec, cfg.consts)
}

pub(crate) fn oracle(ctx: &Ctx) -> Vec<CheckResult> {
    let fail = |e: crate::Error| {
        vec![
            CheckResult::failed("oracle.l2", Tolerances::ORACLE_L2, e.to_string()),
            CheckResult::failed("oracle.tracker", Tolerances::ORACLE_TRACKER, "not run"),
        ]
    };
    match oracle_inner(ctx) {
        Ok(v) => v,
        Err(e) => fail(e),
    }
}

fn oracle_inner(ctx: &Ctx) -> crate::Result<Vec<CheckResult>> {
    let cfg = ctx.cfg;
    let field = oracle_field(cfg, ctx.sol)?;
    let [t0, t1] = cfg.time_range;
    let (hamiltonian, default_dt) = match cfg.spec.trap_frequency() {
        Some(omega) => (Hamiltonian::Harmonic { omega }, 0.005),
        None => (Hamiltonian::Free, 0.05),
    };
    let dt = cfg.expect.oracle_dt.unwrap_or(default_dt);
    let steps = ((t1 - t0) / dt - 1e-9).ceil().max(1.0) as usize;
    let prop = PropagatorConfig { grid: cfg.grid, dt: (t1 - t0) / steps as f64, steps, hamiltonian, consts: cfg.consts };
    prop.validate()?;
    prop.check_box(field.natural_length(), 8.0)?;
    let initial = sample(&field, &cfg.grid, t0)?;
    let numeric = evolve(&initial, &prop)?;
    let exact = sample(&field, &cfg.grid, numeric.time)?;
    let l2 = l2_relative_error(&exact, &numeric)?;
    let drift = (norm(&numeric) - norm(&initial)).abs() / norm(&initial);
    // Both sides share the mask so lines are compared over the same support.
    let mut num_opts = ctx.extract;
    num_opts.scan.noise_floor = Tolerances::NOISE_FLOOR;
    let interp = SpectralInterpolant::new(&numeric);
    let num_lines = extract_frame_probed(&numeric, &|r: &Vec3| interp.value_at(r), &num_opts).lines;
    let ana_lines = extract_frame(&exact, Some(&field), &num_opts).lines;
    let dist = if ana_lines.is_empty() { f64::INFINITY } else { set_distance(&num_lines, &ana_lines) };
    Ok(vec![
        CheckResult::below(
            "oracle.l2",
            l2,
            Tolerances::ORACLE_L2,
            format!("phase-optimized relative L2 at t={} after {steps} steps", numeric.time),
        ),
        CheckResult::below("oracle.norm", drift, Tolerances::NORM, "relative norm drift"),
        CheckResult::below(
            "oracle.tracker",
            dist / ctx.diag(),
            Tolerances::ORACLE_TRACKER,
            format!(
                "{} numeric vs {} analytic lines, max Hausdorff distance in cell diagonals",
                num_lines.len(),
                ana_lines.len()
            ),
        ),
    ])
}

struct VelocitySample {
    formula: Vec3,
    displacement: Vec3,
}

fn velocity_sample(sol: &Solution, p: &Vec3, tangent: &Vec3, t: f64, dt: f64) -> crate::Result<VelocitySample> {
    let l = sol.length_scale();
    let grad = |q: &Vec3, t: f64| sol.jet_at(q, t).g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let tol = |q: &Vec3, t: f64| 1e-13 * grad(q, t) * l;
    let p0 = refine_point(sol, t, p, tangent, tol(p, t), 50)?;
    let opts = AnatomyOptions::default();
    let u = line_velocity(sol, &p0, t, &opts)?;
    let fwd = p0 + u * dt;
    let back = p0 - u * dt;
    let pp = refine_point(sol, t + dt, &fwd, tangent, tol(&fwd, t + dt), 50)?;
    let pm = refine_point(sol, t - dt, &back, tangent, tol(&back, t - dt), 50)?;
    Ok(VelocitySample { formula: u, displacement: (pp - pm) / (2.0 * dt) })
}

pub(crate) fn node_speed_check(ctx: &Ctx) -> Vec<CheckResult> {
    let c = ctx.sol.consts();
    let floor = 1e-6 * c.hbar / (c.mass * ctx.sol.length_scale());
    let n = ctx.frames.len();
    let picks: Vec<usize> = (0..n.min(4)).map(|i| i * n / n.min(4)).collect();
    let mut jobs = Vec::new();
    for &fi in &picks {
        let f = &ctx.frames[fi];
        for line in &f.lines {
            for i in sample_indices(line, 6) {
                jobs.push((f.time, line.points[i], line.tangent(i)));
            }
        }
    }
    let samples: Vec<crate::Result<VelocitySample>> = jobs
        .par_iter()
        .map(|(t, p, tg)| velocity_sample(ctx.sol, p, tg, *t, Tolerances::VELOCITY_DT))
        .collect();
    let mut out = Vec::new();
    let errors: Vec<String> = samples.iter().filter_map(|s| s.as_ref().err().map(|e| e.to_string())).collect();
    let ok: Vec<&VelocitySample> = samples.iter().filter_map(|s| s.as_ref().ok()).collect();
    if ok.is_empty() || !errors.is_empty() {
        let why = if ok.is_empty() { "no line points".to_string() } else { errors[0].clone() };
        out.push(CheckResult::failed("node_speed.velocity_law", Tolerances::VELOCITY_LAW, why));
    } else {
        let law = worst(ok.iter().map(|s| (s.displacement - s.formula).norm() / s.formula.norm().max(floor)));
        out.push(CheckResult::below(
            "node_speed.velocity_law",
            law,
            Tolerances::VELOCITY_LAW,
            format!("formula vs central displacement (dt = {}) over {} points", Tolerances::VELOCITY_DT, ok.len()),
        ));
    }
    match ctx.cfg.expect.node_speed {
        Some(SpeedTarget::Exact { value, rel_tol }) => {
            let m = if ok.is_empty() {
                f64::NAN
            } else {
                worst(ok.iter().map(|s| (s.displacement.norm() - value).abs() / value))
            };
            out.push(CheckResult::below(
                "node_speed.value",
                m,
                rel_tol,
                format!("relative deviation of the displacement speed from {value}"),
            ));
        }
        Some(SpeedTarget::Range { min, max }) => {
            let r = node_speed(ctx.frames, 3.0 * ctx.diag());
            let mean = r.ok().and_then(|s| s.mean()).unwrap_or(f64::NAN);
            out.push(CheckResult {
                name: "node_speed.tracked".into(),
                pass: mean >= min && mean <= max,
                measured: mean,
                tolerance: 0.5 * (max - min),
                detail: format!("mean tracked node speed, required in [{min}, {max}]"),
            });
        }
        None => {}
    }
    out
}

pub(crate) fn generation(ctx: &Ctx) -> Vec<CheckResult> {
    let Some(carrier) = generation_carrier(&ctx.cfg.spec) else {
        return vec![CheckResult::failed("generation", Tolerances::GENERATION, "family has no plane-wave generator")];
    };
    let poly = match ctx.sol.prefactor(0.0) {
        Ok(p) => p,
        Err(e) => return vec![CheckResult::failed("generation", Tolerances::GENERATION, e.to_string())],
    };
    let pts = random_points(ctx.cfg, ctx.cfg.seed.wrapping_add(1), Tolerances::GENERATION_POINTS);
    let errs: Vec<f64> = pts
        .par_iter()
        .map(|(r, t)| {
            let g = generate_from_polynomial(&carrier, &poly, ctx.sol.consts(), r, *t, &Default::default());
            match (g, ctx.sol.eval(r, *t)) {
                (Ok(g), Ok(e)) => (g - e).norm() / e.norm(),
                _ => f64::NAN,
            }
        })
        .collect();
    vec![CheckResult::below(
        "generation",
        worst(errs),
        Tolerances::GENERATION,
        format!("relative deviation of numeric k-differentiation over {} points", pts.len()),
    )]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parametric_line_reduces_to_plane_at_zero_phase() {
        // At θ = 0 the line is y = a, z = −x tanφ.
        let (a, phi) = (1.0, 0.5f64);
        let p = Vec3::new(0.7, a, -0.7 * phi.tan());
        assert!(magnetic_distance(&p, 0.0, a, phi) < 1e-12);
        assert!((magnetic_distance(&Vec3::new(0.0, a + 0.5, 0.0), 0.0, a, phi) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sample_indices_skip_open_ends() {
        let l = VortexPolyline {
            points: (0..10).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect(),
            closed: false,
            winding: 1,
            frame_time: 0.0,
            boundary: true,
            chi: vec![],
        };
        let idx = sample_indices(&l, 4);
        assert_eq!(idx.len(), 4);
        assert!(idx.iter().all(|&i| i >= 1 && i <= 8));
        let closed = VortexPolyline { closed: true, ..l };
        assert_eq!(sample_indices(&closed, 20).len(), 10);
    }

    #[test]
    fn set_distance_requires_equal_counts() {
        let l = |z: f64| VortexPolyline {
            points: vec![Vec3::new(0.0, 0.0, z), Vec3::new(1.0, 0.0, z)],
            closed: false,
            winding: 1,
            frame_time: 0.0,
            boundary: false,
            chi: vec![],
        };
        assert!((set_distance(&[l(0.0), l(1.0)], &[l(1.1), l(0.0)]) - 0.1).abs() < 1e-12);
        assert!(set_distance(&[l(0.0)], &[l(0.0), l(1.0)]).is_infinite());
    }
}
