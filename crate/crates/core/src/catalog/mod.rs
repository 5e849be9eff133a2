//! Closed-form vortex solutions, their prefactors, the generating-function
//! construction and PDE residuals.

mod families;
mod generate;
mod spec;

pub use generate::{generate_from_polynomial, GenerateOptions};
pub use spec::SolutionSpec;

use num_complex::Complex64 as C64;

use crate::consts::PhysicalConstants;
use crate::error::{Error, Result};
use crate::jet::{Jet, I};
use crate::poly::{DensePoly, PolynomialPrefactor};
use crate::{CVec3, Vec3};
use families::Point;

/// Equation a family satisfies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Governing {
    /// `iħ∂tψ = −(ħ²/2m)Δψ`.
    Free,
    /// `iħ∂tψ = [−(ħ²/2m)Δ + mω²r²/2]ψ`.
    Trap { omega: f64 },
    /// Uniform field B along z in the symmetric gauge `A = (B/2)(y, −x, 0)`:
    /// `iħ∂tψ = [−(ħ²/2m)Δ − (iħeB/2m)(x∂y − y∂x) + e²B²(x²+y²)/8m]ψ`.
    Magnetic { b: f64 },
    /// `(1/c²)∂t²ψ − Δψ + (mc/ħ)²ψ = 0`.
    KleinGordon,
}

/// A complex field with exact derivatives, as consumed by the anatomy and
/// tracker code.
pub trait AnalyticField: Sync {
    /// Value with ∇, Δ, ∂t, ∂t² at (r, t).
    fn jet_at(&self, r: &Vec3, t: f64) -> Jet;

    fn value_at(&self, r: &Vec3, t: f64) -> C64 {
        self.jet_at(r, t).v
    }

    fn constants(&self) -> &PhysicalConstants;

    /// Typical length of the field's structures.
    fn length_scale(&self) -> f64;

    fn equation(&self) -> Governing;

    fn potential(&self, _r: &Vec3) -> Option<Vec3> {
        None
    }
}

impl AnalyticField for Solution {
    fn jet_at(&self, r: &Vec3, t: f64) -> Jet {
        self.jet_unchecked(r, t)
    }
    fn value_at(&self, r: &Vec3, t: f64) -> C64 {
        self.value(r, t)
    }
    fn constants(&self) -> &PhysicalConstants {
        &self.consts
    }
    fn length_scale(&self) -> f64 {
        self.natural_length()
    }
    fn equation(&self) -> Governing {
        self.governing()
    }
    fn potential(&self, r: &Vec3) -> Option<Vec3> {
        self.vector_potential(r)
    }
}

/// `factor · inner`; the anatomy of a field is invariant under this.
#[derive(Clone, Copy, Debug)]
pub struct Scaled<'a, F> {
    pub inner: &'a F,
    pub factor: C64,
}

impl<F: AnalyticField> AnalyticField for Scaled<'_, F> {
    fn jet_at(&self, r: &Vec3, t: f64) -> Jet {
        self.inner.jet_at(r, t) * self.factor
    }
    fn constants(&self) -> &PhysicalConstants {
        self.inner.constants()
    }
    fn length_scale(&self) -> f64 {
        self.inner.length_scale()
    }
    fn equation(&self) -> Governing {
        self.inner.equation()
    }
    fn potential(&self, r: &Vec3) -> Option<Vec3> {
        self.inner.potential(r)
    }
}

/// A validated family together with the constants it is evaluated with.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    spec: SolutionSpec,
    consts: PhysicalConstants,
}

fn finite_point(r: &Vec3, t: f64) -> Result<()> {
    if r.iter().all(|v| v.is_finite()) && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("position/time"))
    }
}

impl Solution {
    pub fn new(spec: SolutionSpec, consts: PhysicalConstants) -> Result<Self> {
        consts.validate()?;
        spec.validate()?;
        Ok(Self { spec, consts })
    }

    pub fn spec(&self) -> &SolutionSpec {
        &self.spec
    }

    pub fn consts(&self) -> &PhysicalConstants {
        &self.consts
    }

    pub fn governing(&self) -> Governing {
        if self.spec.is_relativistic() {
            Governing::KleinGordon
        } else if let Some(b) = self.spec.magnetic_field() {
            Governing::Magnetic { b }
        } else if let Some(omega) = self.spec.trap_frequency() {
            Governing::Trap { omega }
        } else {
            Governing::Free
        }
    }

    /// Vector potential of the governing equation, if any.
    pub fn vector_potential(&self, r: &Vec3) -> Option<Vec3> {
        self.spec.magnetic_field().map(|b| Vec3::new(r.y, -r.x, 0.0) * (b / 2.0))
    }

    /// Drift velocity of the underlying carrier: ħk/m, or the Klein-Gordon
    /// group velocity for relativistic families.
    pub fn classical_velocity(&self) -> Vec3 {
        let k = self.spec.wave_vector();
        if self.spec.is_relativistic() {
            self.consts.kg_velocity(&k)
        } else {
            self.consts.velocity(&k)
        }
    }

    pub fn natural_length(&self) -> f64 {
        self.spec.natural_length(&self.consts)
    }

    /// Amplitude without input checks; used in grid kernels.
    pub fn value(&self, r: &Vec3, t: f64) -> C64 {
        let c = |v: f64| C64::new(v, 0.0);
        let p = Point { r: [c(r.x), c(r.y), c(r.z)], t: c(t) };
        families::amplitude(&self.spec, &self.consts, &p)
    }

    pub fn eval(&self, r: &Vec3, t: f64) -> Result<C64> {
        finite_point(r, t)?;
        Ok(self.value(r, t))
    }

    /// Value with exact ∇, Δ, ∂t and ∂t².
    pub fn jet(&self, r: &Vec3, t: f64) -> Result<Jet> {
        finite_point(r, t)?;
        Ok(self.jet_unchecked(r, t))
    }

    pub(crate) fn jet_unchecked(&self, r: &Vec3, t: f64) -> Jet {
        let p = Point {
            r: [Jet::coord(0, r.x), Jet::coord(1, r.y), Jet::coord(2, r.z)],
            t: Jet::time(t),
        };
        families::amplitude(&self.spec, &self.consts, &p)
    }

    pub fn eval_gradient(&self, r: &Vec3, t: f64) -> Result<CVec3> {
        let j = self.jet(r, t)?;
        Ok(CVec3::new(j.g[0], j.g[1], j.g[2]))
    }

    pub fn eval_laplacian(&self, r: &Vec3, t: f64) -> Result<C64> {
        Ok(self.jet(r, t)?.lap)
    }

    pub fn eval_time_derivative(&self, r: &Vec3, t: f64) -> Result<C64> {
        Ok(self.jet(r, t)?.dt)
    }

    /// The carrier amplitude the prefactor multiplies.
    pub fn carrier_value(&self, r: &Vec3, t: f64) -> C64 {
        let (kind, k) = families::Carrier::underlying(&self.spec);
        let c = |v: f64| C64::new(v, 0.0);
        let p = Point { r: [c(r.x), c(r.y), c(r.z)], t: c(t) };
        kind.eval(k.as_array(), &self.consts, &p)
    }

    /// Exact complex polynomial in (x, y, z) whose zero set is the vortex
    /// locus at time `t`.
    pub fn prefactor(&self, t: f64) -> Result<PolynomialPrefactor> {
        if !t.is_finite() {
            return Err(Error::NonFinite("time"));
        }
        if self.spec.is_carrier() {
            return Err(Error::NoPrefactor(self.spec.family()));
        }
        let p = Point {
            r: [DensePoly::var(0), DensePoly::var(1), DensePoly::var(2)],
            t: <DensePoly as crate::Scalar>::real(t),
        };
        match families::prefactor(&self.spec, &self.consts, &p) {
            Some(poly) => poly.into_prefactor(),
            None => Err(Error::UnsupportedCarrier(families::Carrier::underlying(&self.spec).0.name())),
        }
    }

    /// Normalised residual of the governing equation:
    /// |sum of terms| / sum of |terms| (zero when every term vanishes).
    pub fn pde_residual(&self, r: &Vec3, t: f64) -> Result<f64> {
        let j = self.jet(r, t)?;
        let c = &self.consts;
        let kin = -(c.hbar * c.hbar / (2.0 * c.mass)) * j.lap;
        let terms: Vec<C64> = match self.governing() {
            Governing::Free => vec![I * c.hbar * j.dt, -kin],
            Governing::Trap { omega } => {
                let v = 0.5 * c.mass * omega * omega * r.norm_squared();
                vec![I * c.hbar * j.dt, -kin, -v * j.v]
            }
            Governing::Magnetic { b } => {
                let eb = c.charge * b;
                let rot = r.x * j.g[1] - r.y * j.g[0];
                let para = -(I * c.hbar * eb / (2.0 * c.mass)) * rot;
                let dia = eb * eb * (r.x * r.x + r.y * r.y) / (8.0 * c.mass) * j.v;
                vec![I * c.hbar * j.dt, -kin, -para, -dia]
            }
            Governing::KleinGordon => {
                let cc = c.light_speed * c.light_speed;
                let mu = c.mass * c.light_speed / c.hbar;
                vec![j.dtt / cc, -j.lap, mu * mu * j.v]
            }
        };
        let num = terms.iter().sum::<C64>().norm();
        let den: f64 = terms.iter().map(|z| z.norm()).sum();
        Ok(if den > 0.0 { num / den } else { 0.0 })
    }
}

#[cfg(test)]
mod tests;
