//! Scalar abstraction used to write each wave function once and evaluate it
//! either as a plain complex number or as a [`Jet`] carrying the exact
//! spatial gradient, Laplacian and first/second time derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

pub const I: C64 = C64::new(0.0, 1.0);

pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<C64, Output = Self>
    + Sub<C64, Output = Self>
    + Mul<C64, Output = Self>
    + Div<C64, Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn constant(c: C64) -> Self;
    fn exp(self) -> Self;
    /// Principal branch.
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;

    /// Principal-branch power `exp(p ln self)`.
    fn powf(self, p: f64) -> Self {
        (self.ln() * p).exp()
    }

    fn real(x: f64) -> Self {
        Self::constant(C64::new(x, 0.0))
    }

    fn sq(self) -> Self {
        self * self
    }
}

impl Scalar for C64 {
    fn constant(c: C64) -> Self {
        c
    }
    fn exp(self) -> Self {
        C64::exp(self)
    }
    fn ln(self) -> Self {
        C64::ln(self)
    }
    fn sqrt(self) -> Self {
        C64::sqrt(self)
    }
    fn sin(self) -> Self {
        C64::sin(self)
    }
    fn cos(self) -> Self {
        C64::cos(self)
    }
    fn powf(self, p: f64) -> Self {
        C64::powf(self, p)
    }
}

/// Value together with ∇, Δ, ∂t and ∂t² of a complex function of (x, y, z, t).
///
/// Only the Laplacian (not the full Hessian) is carried; it is closed under
/// products and smooth unary functions because
/// `Δ f(u) = f'(u) Δu + f''(u) ∇u·∇u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: C64,
    pub g: [C64; 3],
    pub dt: C64,
    pub lap: C64,
    pub dtt: C64,
}

const Z: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

impl Jet {
    pub fn constant(v: C64) -> Self {
        Jet { v, g: [Z; 3], dt: Z, lap: Z, dtt: Z }
    }

    /// Spatial coordinate `axis` with value `x`.
    pub fn coord(axis: usize, x: f64) -> Self {
        let mut g = [Z; 3];
        g[axis] = ONE;
        Jet { v: C64::new(x, 0.0), g, dt: Z, lap: Z, dtt: Z }
    }

    pub fn time(t: f64) -> Self {
        Jet { v: C64::new(t, 0.0), g: [Z; 3], dt: ONE, lap: Z, dtt: Z }
    }

    /// Chain rule for `f(self)` given `f`, `f'` and `f''` at `self.v`.
    fn chain(self, f0: C64, f1: C64, f2: C64) -> Self {
        let gg = self.g[0] * self.g[0] + self.g[1] * self.g[1] + self.g[2] * self.g[2];
        Jet {
            v: f0,
            g: [f1 * self.g[0], f1 * self.g[1], f1 * self.g[2]],
            dt: f1 * self.dt,
            lap: f1 * self.lap + f2 * gg,
            dtt: f1 * self.dtt + f2 * self.dt * self.dt,
        }
    }

    fn recip(self) -> Self {
        let r = ONE / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    fn scale(self, c: C64) -> Self {
        Jet {
            v: self.v * c,
            g: [self.g[0] * c, self.g[1] * c, self.g[2] * c],
            dt: self.dt * c,
            lap: self.lap * c,
            dtt: self.dtt * c,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite()
            && self.g.iter().all(|z| z.is_finite())
            && self.dt.is_finite()
            && self.lap.is_finite()
            && self.dtt.is_finite()
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet {
            v: self.v + o.v,
            g: [self.g[0] + o.g[0], self.g[1] + o.g[1], self.g[2] + o.g[2]],
            dt: self.dt + o.dt,
            lap: self.lap + o.lap,
            dtt: self.dtt + o.dtt,
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-ONE)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let gg = self.g[0] * o.g[0] + self.g[1] * o.g[1] + self.g[2] * o.g[2];
        Jet {
            v: self.v * o.v,
            g: [
                self.g[0] * o.v + self.v * o.g[0],
                self.g[1] * o.v + self.v * o.g[1],
                self.g[2] * o.v + self.v * o.g[2],
            ],
            dt: self.dt * o.v + self.v * o.dt,
            lap: self.lap * o.v + self.v * o.lap + 2.0 * gg,
            dtt: self.dtt * o.v + 2.0 * self.dt * o.dt + self.v * o.dtt,
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

macro_rules! jet_const_ops {
    ($t:ty, $lift:expr) => {
        impl Add<$t> for Jet {
            type Output = Jet;
            fn add(mut self, c: $t) -> Jet {
                self.v += $lift(c);
                self
            }
        }
        impl Sub<$t> for Jet {
            type Output = Jet;
            fn sub(mut self, c: $t) -> Jet {
                self.v -= $lift(c);
                self
            }
        }
        impl Mul<$t> for Jet {
            type Output = Jet;
            fn mul(self, c: $t) -> Jet {
                self.scale($lift(c))
            }
        }
        impl Div<$t> for Jet {
            type Output = Jet;
            fn div(self, c: $t) -> Jet {
                self.scale(ONE / $lift(c))
            }
        }
    };
}

jet_const_ops!(C64, |c: C64| c);
jet_const_ops!(f64, |c: f64| C64::new(c, 0.0));

impl Scalar for Jet {
    fn constant(c: C64) -> Self {
        Jet::constant(c)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let r = ONE / self.v;
        self.chain(self.v.ln(), r, -r * r)
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * s * s))
    }
    fn sin(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(c, -s, -c)
    }
    fn powf(self, p: f64) -> Self {
        let l = self.v.ln();
        let f0 = (l * p).exp();
        let f1 = p * (l * (p - 1.0)).exp();
        let f2 = p * (p - 1.0) * (l * (p - 2.0)).exp();
        self.chain(f0, f1, f2)
    }
}
