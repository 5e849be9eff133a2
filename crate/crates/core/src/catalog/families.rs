//! Closed forms, written once over [`Scalar`] so the same code yields values,
//! exact derivatives (via [`crate::Jet`]) and symbolic prefactors.

use num_complex::Complex64 as C64;

use super::generate;
use super::spec::SolutionSpec;
use crate::consts::{PhysicalConstants, WaveVector};
use crate::jet::{Scalar, I};

/// Space-time point in scalar type `S`.
#[derive(Clone, Copy)]
pub(crate) struct Point<S> {
    pub r: [S; 3],
    pub t: S,
}

impl<S: Scalar> Point<S> {
    /// `r − v t`.
    pub fn comoving(&self, v: [f64; 3]) -> [S; 3] {
        [
            self.r[0] - self.t * v[0],
            self.r[1] - self.t * v[1],
            self.r[2] - self.t * v[2],
        ]
    }
}

/// The carrier solutions that can be differentiated with respect to k.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Carrier {
    Plane,
    Gaussian { l: f64 },
    Magnetic { b: f64 },
    Trap { omega: f64 },
    Relativistic,
}

impl Carrier {
    pub fn of(spec: &SolutionSpec) -> Option<(Carrier, WaveVector)> {
        match spec {
            SolutionSpec::FreePlaneWave { k } => Some((Carrier::Plane, *k)),
            SolutionSpec::GaussianPacket { l, k } => Some((Carrier::Gaussian { l: *l }, *k)),
            SolutionSpec::MagneticGenerator { b, k } => Some((Carrier::Magnetic { b: *b }, *k)),
            SolutionSpec::TrapGenerator { omega, k } => Some((Carrier::Trap { omega: *omega }, *k)),
            SolutionSpec::RelPlaneWave { k } => Some((Carrier::Relativistic, *k)),
            _ => None,
        }
    }

    /// Carrier that a vortex family rides on, with its wave vector.
    pub fn underlying(spec: &SolutionSpec) -> (Carrier, WaveVector) {
        use SolutionSpec::*;
        match spec {
            FreeLineVortex { k, .. }
            | FreeRingCylinder { k, .. }
            | FreeRingSphere { k, .. }
            | FreeTwoLines { k, .. }
            | FreeTwoLinesSymmetric { k, .. } => (Carrier::Plane, *k),
            GaussianLineVortex { l, k, .. } => (Carrier::Gaussian { l: *l }, *k),
            MagneticLine { b, .. } => (Carrier::Magnetic { b: *b }, WaveVector::ZERO),
            TrapRing { omega, .. } => (Carrier::Trap { omega: *omega }, WaveVector::ZERO),
            RelLineVortex { k, .. } | RelRingCylinder { k, .. } => (Carrier::Relativistic, *k),
            Generated { carrier, .. } => Carrier::of(carrier).expect("validated carrier"),
            bare => Carrier::of(bare).expect("bare carrier"),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Carrier::Plane => "FreePlaneWave",
            Carrier::Gaussian { .. } => "GaussianPacket",
            Carrier::Magnetic { .. } => "MagneticGenerator",
            Carrier::Trap { .. } => "TrapGenerator",
            Carrier::Relativistic => "RelPlaneWave",
        }
    }

    /// Length setting the k-step of the finite-difference generator.
    pub fn length(&self, consts: &PhysicalConstants) -> f64 {
        match *self {
            Carrier::Plane | Carrier::Relativistic => 1.0,
            Carrier::Gaussian { l } => l,
            Carrier::Magnetic { b } => (consts.hbar / (consts.charge * b.abs())).sqrt(),
            Carrier::Trap { omega } => (consts.hbar / (consts.mass * omega)).sqrt(),
        }
    }

    /// Carrier amplitude at wave vector `k`.
    pub fn eval<S: Scalar>(&self, k: [f64; 3], c: &PhysicalConstants, p: &Point<S>) -> S {
        let [x, y, z] = p.r;
        let t = p.t;
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let kr = x * k[0] + y * k[1] + z * k[2];
        match *self {
            Carrier::Plane => ((kr - t * (c.hbar * k2 / (2.0 * c.mass))) * I).exp(),
            Carrier::Relativistic => {
                let w = c.kg_frequency(&WaveVector::from_array(k));
                ((kr - t * w) * I).exp()
            }
            Carrier::Gaussian { l } => {
                let d = t * (I * (c.hbar / (c.mass * l * l))) + 1.0;
                let s = [x - I * (k[0] * l * l), y - I * (k[1] * l * l), z - I * (k[2] * l * l)];
                let ss = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
                (ss / (d * (-2.0 * l * l)) - d.ln() * 1.5 - k2 * l * l / 2.0).exp()
            }
            Carrier::Magnetic { b } => {
                let eb = c.charge * b;
                let wc = eb / c.mass;
                let e = (t * (-I * wc)).exp();
                let rho2 = x * x + y * y;
                let kp2 = k[0] * k[0] + k[1] * k[1];
                let expo = rho2 * (-eb / (4.0 * c.hbar)) - t * (I * (wc / 2.0))
                    + (e - 1.0) * (c.hbar * kp2 / (2.0 * eb))
                    + (e + 1.0) * (x * k[0] + y * k[1]) * (I * 0.5)
                    + (e - 1.0) * (x * k[1] - y * k[0]) * 0.5
                    + z * (I * k[2])
                    - t * (I * (c.hbar * k[2] * k[2] / (2.0 * c.mass)));
                expo.exp()
            }
            Carrier::Trap { omega } => {
                let e = (t * (-I * omega)).exp();
                let r2 = x * x + y * y + z * z;
                let sn = (t * omega).sin();
                let expo = t * (-1.5 * omega * I) - r2 * (c.mass * omega / (2.0 * c.hbar))
                    + e * I * (kr - sn * (c.hbar * k2 / (2.0 * c.mass * omega)));
                expo.exp()
            }
        }
    }

    /// For carriers whose k-Hessian of `ln C` is independent of k and
    /// diagonal: `A = −i∇_k ln C` and the diagonal `s = −i ∂A_j/∂k_j`.
    /// Then `(−i∂_k)^α C = C · Π_j h_{α_j}(A_j; s_j)`.
    pub fn expansion<S: Scalar>(
        &self,
        k: [f64; 3],
        c: &PhysicalConstants,
        p: &Point<S>,
    ) -> Option<([S; 3], [S; 3])> {
        let t = p.t;
        match *self {
            Carrier::Plane => {
                let v = c.velocity(&WaveVector::from_array(k));
                let s = t * (I * (c.hbar / c.mass));
                Some((p.comoving(v.into()), [s; 3]))
            }
            Carrier::Gaussian { l } => {
                let v = c.velocity(&WaveVector::from_array(k));
                let d = t * (I * (c.hbar / (c.mass * l * l))) + 1.0;
                let a = p.comoving(v.into());
                let s = t * (I * (c.hbar / c.mass)) / d;
                Some(([a[0] / d, a[1] / d, a[2] / d], [s; 3]))
            }
            Carrier::Trap { omega } => {
                let e = (t * (-I * omega)).exp();
                let sn = (t * omega).sin() * (c.hbar / (c.mass * omega));
                let a = [
                    e * (p.r[0] - sn * k[0]),
                    e * (p.r[1] - sn * k[1]),
                    e * (p.r[2] - sn * k[2]),
                ];
                let s = e * sn * I;
                Some((a, [s; 3]))
            }
            Carrier::Magnetic { b } => {
                let eb = c.charge * b;
                let e = (t * (-I * (eb / c.mass))).exp();
                let [x, y, z] = p.r;
                let q = c.hbar / eb;
                let ax = (e - 1.0) * (-I * q * k[0]) + (e + 1.0) * x * 0.5 + (e - 1.0) * y * (I * 0.5);
                let ay = (e - 1.0) * (-I * q * k[1]) + (e + 1.0) * y * 0.5 - (e - 1.0) * x * (I * 0.5);
                let az = z - t * (c.hbar * k[2] / c.mass);
                let sp = (e - 1.0) * (-q);
                let sz = t * (I * (c.hbar / c.mass));
                Some(([ax, ay, az], [sp, sp, sz]))
            }
            Carrier::Relativistic => None,
        }
    }
}

/// Polynomial prefactor of a family at point `p`; `None` for bare carriers
/// and for generated families without an exact expansion.
pub(crate) fn prefactor<S: Scalar>(
    spec: &SolutionSpec,
    c: &PhysicalConstants,
    p: &Point<S>,
) -> Option<S> {
    use SolutionSpec::*;
    let hm = c.hbar / c.mass;
    let v = |k: &WaveVector| -> [f64; 3] { c.velocity(k).into() };
    let out = match spec {
        FreePlaneWave { .. }
        | GaussianPacket { .. }
        | MagneticGenerator { .. }
        | TrapGenerator { .. }
        | RelPlaneWave { .. } => return None,
        FreeLineVortex { chi, k } => {
            let [x, y, _] = p.comoving(v(k));
            x * chi.cos() + y * (I * chi.sin())
        }
        RelLineVortex { chi, k } => {
            let [x, y, _] = p.comoving(c.kg_velocity(k).into());
            x * chi.cos() + y * (I * chi.sin())
        }
        FreeRingCylinder { r, a, k } => {
            let [x, y, z] = p.comoving(v(k));
            x * x + y * y - r * r + z * (I * *a) + p.t * (2.0 * hm * I)
        }
        FreeRingSphere { r, a, k } => {
            let [x, y, z] = p.comoving(v(k));
            x * x + y * y + z * z - r * r + z * (I * *a) + p.t * (3.0 * hm * I)
        }
        FreeTwoLines { w1, r1, w2, r2, k } => {
            let q = p.comoving(v(k));
            let lin = |w: &[C64; 3], r0: &[f64; 3]| {
                (q[0] - r0[0]) * w[0] + (q[1] - r0[1]) * w[1] + (q[2] - r0[2]) * w[2]
            };
            let w12 = w1[0] * w2[0] + w1[1] * w2[1] + w1[2] * w2[2];
            lin(w1, r1) * lin(w2, r2) + p.t * (w12 * I * hm)
        }
        FreeTwoLinesSymmetric { a, varphi, k } => {
            let [x, y, z] = p.comoving(v(k));
            let (s, co) = varphi.sin_cos();
            let w1 = x * co + y * s + (z + *a) * I;
            let w2 = x * co - y * s + (z - *a) * I;
            w1 * w2 - p.t * (2.0 * hm * s * s * I)
        }
        GaussianLineVortex { l, x0, k } => {
            let [x, y, _] = p.comoving(v(k));
            let tau = p.t * (hm / (l * l));
            let d = tau * I + 1.0;
            (x - *x0 + (y - tau * *x0) * I) / d
        }
        MagneticLine { b, a, varphi } => {
            let e = (p.t * (-I * (c.charge * b / c.mass))).exp();
            let [x, y, z] = p.r;
            let xm = (e + 1.0) * x * 0.5 + (e - 1.0) * y * (I * 0.5);
            let ym = (e + 1.0) * y * 0.5 - (e - 1.0) * x * (I * 0.5);
            let (s, co) = varphi.sin_cos();
            xm * s + z * co + (ym - *a) * I
        }
        TrapRing { omega, r } => {
            let e = (p.t * (-I * *omega)).exp();
            let q = c.hbar / (c.mass * omega);
            let [x, y, z] = p.r;
            e * e * (x * x + y * y - q) + q - e * (x * 2.0 - z * I) * *r
        }
        RelRingCylinder { r, a, k } => {
            let [x, y, z] = p.comoving(c.kg_velocity(k).into());
            let w = c.kg_frequency(k);
            let cc = c.light_speed * c.light_speed;
            let kp2 = k.kx * k.kx + k.ky * k.ky;
            let hk = c.hbar * k.norm_squared().sqrt() / c.light_speed;
            let shift = c.hbar * (2.0 - cc * kp2 / (w * w)) / (hk * hk + c.mass * c.mass).sqrt();
            x * x + y * y - r * r + z * (I * *a) + p.t * (shift * I)
        }
        Generated { carrier, poly } => {
            let (kind, k) = Carrier::of(carrier)?;
            let (a, s) = kind.expansion(k.as_array(), c, p)?;
            generate::expand(poly, a, s)
        }
    };
    Some(out)
}

/// Full amplitude `prefactor × carrier`, falling back to numeric
/// k-differentiation for generated families without an exact expansion.
pub(crate) fn amplitude<S: Scalar>(spec: &SolutionSpec, c: &PhysicalConstants, p: &Point<S>) -> S {
    let (kind, k) = Carrier::underlying(spec);
    match prefactor(spec, c, p) {
        Some(w) => w * kind.eval(k.as_array(), c, p),
        None => match spec {
            SolutionSpec::Generated { poly, .. } => {
                let h = generate::default_k_step(kind, c);
                generate::finite_difference(kind, k.as_array(), poly, c, p, h)
            }
            _ => kind.eval(k.as_array(), c, p),
        },
    }
}
