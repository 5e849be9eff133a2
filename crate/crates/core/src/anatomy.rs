//! Local anatomy of vortex lines: flow velocity, circulation and winding,
//! the `w` vector with its squeeze angle, and the velocity of the line.

use std::f64::consts::{PI, TAU};

use nalgebra::Matrix3x2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::catalog::{AnalyticField, Governing};
use crate::error::{invalid, Error, Result};
use crate::{CVec3, Vec3};

/// Tolerances shared by the anatomy operations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnatomyOptions {
    /// |ψ| below this (absolute) counts as a vortex core.
    pub amplitude_floor: f64,
    /// A point is on the line when |ψ| < zero_tolerance · |∇ψ| · L.
    pub zero_tolerance: f64,
    /// Maximum number of sample doublings when unwrapping phase.
    pub max_doublings: u32,
}

impl Default for AnatomyOptions {
    fn default() -> Self {
        Self { amplitude_floor: 1e-12, zero_tolerance: 1e-9, max_doublings: 6 }
    }
}

/// Vector potential used when converting phase gradients to velocities.
#[derive(Clone, Copy, Default)]
pub enum Gauge<'a> {
    /// Whatever the field's governing equation uses (none unless magnetic).
    #[default]
    Field,
    /// A ≡ 0.
    Zero,
    Custom(&'a (dyn Fn(&Vec3) -> Vec3 + Sync)),
}

impl Gauge<'_> {
    fn at<F: AnalyticField + ?Sized>(&self, field: &F, r: &Vec3) -> Vec3 {
        match self {
            Gauge::Field => field.potential(r).unwrap_or_else(Vec3::zeros),
            Gauge::Zero => Vec3::zeros(),
            Gauge::Custom(f) => f(r),
        }
    }
}

/// Circle used for circulation and winding integrals, traversed
/// counter-clockwise about `normal`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub center: Vec3,
    pub normal: Vec3,
    pub radius: f64,
    pub samples: usize,
}

impl Contour {
    pub fn new(center: Vec3, normal: Vec3, radius: f64, samples: usize) -> Result<Self> {
        let n = normal.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(invalid("normal", "must be a non-zero finite vector"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(invalid("radius", "must be positive"));
        }
        if samples < 16 || samples % 2 != 0 {
            return Err(invalid("samples", "must be even and at least 16"));
        }
        if !center.iter().all(|v| v.is_finite()) {
            return Err(invalid("center", "must be finite"));
        }
        Ok(Self { center, normal: normal / n, radius, samples })
    }

    /// The same circle traversed the other way.
    pub fn reversed(&self) -> Self {
        Self { normal: -self.normal, ..*self }
    }

    /// Orthonormal (e1, e2) with e1 × e2 = normal.
    pub fn basis(&self) -> (Vec3, Vec3) {
        let n = self.normal;
        let seed = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let e1 = (seed - n * n.dot(&seed)).normalize();
        (e1, n.cross(&e1))
    }

    pub fn point(&self, theta: f64) -> Vec3 {
        let (e1, e2) = self.basis();
        self.center + (e1 * theta.cos() + e2 * theta.sin()) * self.radius
    }
}

/// `w = ∇ψ` at a point of the line and what it implies locally.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalVortexData {
    pub w: CVec3,
    /// Unit tangent; the phase winds by +2π·winding_sign around it.
    pub tangent: Vec3,
    /// Squeeze angle in (0, π/4]; π/4 is circular flow.
    pub chi: f64,
    pub winding_sign: i32,
}

impl LocalVortexData {
    /// Flip the tangent to point along `reference` (sign flips with it).
    pub fn oriented_along(mut self, reference: &Vec3) -> Self {
        if self.tangent.dot(reference) < 0.0 {
            self.tangent = -self.tangent;
            self.winding_sign = -self.winding_sign;
        }
        self
    }
}

fn re(w: &CVec3) -> Vec3 {
    w.map(|z| z.re)
}

fn im(w: &CVec3) -> Vec3 {
    w.map(|z| z.im)
}

/// `v = (ħ/m) Im(ψ*∇ψ)/|ψ|² − (e/m)A`.
pub fn flow_velocity<F: AnalyticField + ?Sized>(
    field: &F,
    r: &Vec3,
    t: f64,
    gauge: Gauge<'_>,
    opts: &AnatomyOptions,
) -> Result<Vec3> {
    finite(r, t)?;
    let j = field.jet_at(r, t);
    let amp = j.v.norm();
    if amp < opts.amplitude_floor {
        return Err(Error::AtVortexCore { amplitude: amp });
    }
    let c = field.constants();
    let conj = j.v.conj();
    let current = Vec3::new((conj * j.g[0]).im, (conj * j.g[1]).im, (conj * j.g[2]).im);
    Ok(current * (c.hbar / (c.mass * amp * amp)) - gauge.at(field, r) * (c.charge / c.mass))
}

fn finite(r: &Vec3, t: f64) -> Result<()> {
    if r.iter().all(|v| v.is_finite()) && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("position/time"))
    }
}

/// Total phase change of ψ around the contour, refining until every
/// increment is below π/2.
fn unwrapped_phase<F: AnalyticField + ?Sized>(
    field: &F,
    contour: &Contour,
    t: f64,
    opts: &AnatomyOptions,
) -> Result<(f64, usize)> {
    let mut n = contour.samples;
    let mut last_max = 0.0;
    for _ in 0..=opts.max_doublings {
        let vals = (0..n)
            .map(|i| {
                let z = field.value_at(&contour.point(TAU * i as f64 / n as f64), t);
                if z.norm() < opts.amplitude_floor || !z.is_finite() {
                    Err(Error::AtVortexCore { amplitude: z.norm() })
                } else {
                    Ok(z)
                }
            })
            .collect::<Result<Vec<C64>>>()?;
        let mut total = 0.0;
        let mut max_inc: f64 = 0.0;
        for i in 0..n {
            let d = (vals[(i + 1) % n] / vals[i]).arg();
            max_inc = max_inc.max(d.abs());
            total += d;
        }
        if max_inc < PI / 2.0 {
            return Ok((total, n));
        }
        last_max = max_inc;
        n *= 2;
    }
    Err(Error::AmbiguousWinding { increment: last_max })
}

/// Γ = ∮ v·dl: exact phase part from unwrapping plus the trapezoid-rule
/// integral of −(e/m)A.
pub fn circulation<F: AnalyticField + ?Sized>(
    field: &F,
    contour: &Contour,
    t: f64,
    gauge: Gauge<'_>,
    opts: &AnatomyOptions,
) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::NonFinite("time"));
    }
    let c = field.constants();
    let (phase, n) = unwrapped_phase(field, contour, t, opts)?;
    let (e1, e2) = contour.basis();
    let mut a_int = 0.0;
    for i in 0..n {
        let th = TAU * i as f64 / n as f64;
        let dl = (e2 * th.cos() - e1 * th.sin()) * (contour.radius * TAU / n as f64);
        a_int += gauge.at(field, &contour.point(th)).dot(&dl);
    }
    Ok(c.hbar / c.mass * phase - c.charge / c.mass * a_int)
}

/// Integer phase winding around the contour.
pub fn winding_number<F: AnalyticField + ?Sized>(
    field: &F,
    contour: &Contour,
    t: f64,
    opts: &AnatomyOptions,
) -> Result<i32> {
    if !t.is_finite() {
        return Err(Error::NonFinite("time"));
    }
    let (phase, _) = unwrapped_phase(field, contour, t, opts)?;
    Ok((phase / TAU).round() as i32)
}

fn on_line<F: AnalyticField + ?Sized>(
    field: &F,
    p: &Vec3,
    t: f64,
    opts: &AnatomyOptions,
) -> Result<crate::Jet> {
    finite(p, t)?;
    let j = field.jet_at(p, t);
    let gn = j.g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let tol = opts.zero_tolerance * gn * field.length_scale();
    if !(j.v.norm() <= tol) {
        return Err(Error::NotOnLine { amplitude: j.v.norm(), tolerance: tol });
    }
    Ok(j)
}

/// Local data from `w = ∇ψ` at a point certified on the line.
pub fn w_vector<F: AnalyticField + ?Sized>(
    field: &F,
    point: &Vec3,
    t: f64,
    opts: &AnatomyOptions,
) -> Result<LocalVortexData> {
    let j = on_line(field, point, t, opts)?;
    let w = CVec3::new(j.g[0], j.g[1], j.g[2]);
    local_data(w)
}

/// Tangent, squeeze and sign from a gradient vector alone.
pub fn local_data(w: CVec3) -> Result<LocalVortexData> {
    let (a, b) = (re(&w), im(&w));
    let n = a.cross(&b);
    let scale = a.norm_squared() + b.norm_squared();
    if !(n.norm() > 1e-12 * scale) {
        return Err(Error::DegenerateVortex { cross: n.norm() });
    }
    let tangent = n.normalize();
    let sv = Matrix3x2::from_columns(&[a, b]).singular_values();
    let (smin, smax) = (sv.min(), sv.max());
    let chi = (smin / smax).atan();
    let winding_sign = if a.cross(&b).dot(&tangent) > 0.0 { 1 } else { -1 };
    Ok(LocalVortexData { w, tangent, chi, winding_sign })
}

/// `u = (w×w*)/|w×w*|² × (ψ_t* w − ψ_t w*)`, the velocity of the line normal
/// to its tangent.
pub fn line_velocity<F: AnalyticField + ?Sized>(
    field: &F,
    point: &Vec3,
    t: f64,
    opts: &AnatomyOptions,
) -> Result<Vec3> {
    let j = on_line(field, point, t, opts)?;
    let w = CVec3::new(j.g[0], j.g[1], j.g[2]);
    let d = local_data(w)?;
    let wc = w.map(|z| z.conj());
    let n = w.cross(&wc);
    let x = w * j.dt.conj() - wc * j.dt;
    let u = n.cross(&x) / C64::new(n.norm_squared(), 0.0);
    let u = re(&u);
    Ok(u - d.tangent * u.dot(&d.tangent))
}

/// The same velocity from the Laplacian, valid for Schrödinger equations with
/// a scalar potential: `u = (ħ/2mi)(w×w*)/|w×w*|² × (wΔψ* + w*Δψ)`.
///
/// With `include_potential` the Laplacian is replaced by `Δψ − (2m/ħ²)Vψ`,
/// which changes nothing on the line because ψ vanishes there.
pub fn line_velocity_laplacian<F: AnalyticField + ?Sized>(
    field: &F,
    point: &Vec3,
    t: f64,
    include_potential: bool,
    opts: &AnatomyOptions,
) -> Result<Vec3> {
    let c = *field.constants();
    let potential = match field.equation() {
        Governing::Free => 0.0,
        Governing::Trap { omega } => 0.5 * c.mass * omega * omega * point.norm_squared(),
        _ => return Err(invalid("family", "Laplacian form needs iħψ_t = (−ħ²Δ/2m + V)ψ")),
    };
    let j = on_line(field, point, t, opts)?;
    let w = CVec3::new(j.g[0], j.g[1], j.g[2]);
    let d = local_data(w)?;
    let mut lap = j.lap;
    if include_potential {
        lap -= 2.0 * c.mass / (c.hbar * c.hbar) * potential * j.v;
    }
    let wc = w.map(|z| z.conj());
    let n = w.cross(&wc);
    let x = (w * lap.conj() + wc * lap) * C64::new(0.0, -c.hbar / (2.0 * c.mass));
    let u = re(&(n.cross(&x) / C64::new(n.norm_squared(), 0.0)));
    Ok(u - d.tangent * u.dot(&d.tangent))
}
