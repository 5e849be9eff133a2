//! Complex polynomials in (x, y, z): the vortex prefactors `W_R + i W_I`.

use std::collections::BTreeMap;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Scalar;
use crate::Vec3;

/// Default cap on prefactor degree used by the generating-function routes.
pub const DEFAULT_MAX_DEGREE: u32 = 4;

/// One term `cx · x^px y^py z^pz`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub cx: C64,
    pub px: u32,
    pub py: u32,
    pub pz: u32,
}

impl Monomial {
    pub fn new(cx: C64, px: u32, py: u32, pz: u32) -> Self {
        Self { cx, px, py, pz }
    }

    pub fn degree(&self) -> u32 {
        self.px + self.py + self.pz
    }

    pub fn exponents(&self) -> [u32; 3] {
        [self.px, self.py, self.pz]
    }
}

/// Sparse complex polynomial, kept normalised: exponent triples are unique,
/// exact zeros are dropped and terms are sorted by (degree, px, py, pz).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<Monomial>", into = "Vec<Monomial>")]
pub struct PolynomialPrefactor {
    terms: Vec<Monomial>,
}

impl From<Vec<Monomial>> for PolynomialPrefactor {
    fn from(terms: Vec<Monomial>) -> Self {
        Self::new(terms)
    }
}

impl From<PolynomialPrefactor> for Vec<Monomial> {
    fn from(p: PolynomialPrefactor) -> Self {
        p.terms
    }
}

impl PolynomialPrefactor {
    pub fn new(terms: impl IntoIterator<Item = Monomial>) -> Self {
        let mut map: BTreeMap<(u32, u32, u32, u32), C64> = BTreeMap::new();
        for m in terms {
            *map.entry((m.degree(), m.px, m.py, m.pz)).or_default() += m.cx;
        }
        let terms = map
            .into_iter()
            .filter(|(_, c)| *c != C64::new(0.0, 0.0))
            .map(|((_, px, py, pz), cx)| Monomial { cx, px, py, pz })
            .collect();
        Self { terms }
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn constant(c: C64) -> Self {
        Self::new([Monomial::new(c, 0, 0, 0)])
    }

    /// `c0 + c·r`.
    pub fn linear(c: [C64; 3], c0: C64) -> Self {
        Self::new([
            Monomial::new(c0, 0, 0, 0),
            Monomial::new(c[0], 1, 0, 0),
            Monomial::new(c[1], 0, 1, 0),
            Monomial::new(c[2], 0, 0, 1),
        ])
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn check_degree(&self, max: u32) -> Result<()> {
        let degree = self.degree();
        if degree > max {
            return Err(Error::DegreeTooHigh { degree, max });
        }
        Ok(())
    }

    pub fn coefficient(&self, px: u32, py: u32, pz: u32) -> C64 {
        self.terms
            .iter()
            .find(|m| m.px == px && m.py == py && m.pz == pz)
            .map_or(C64::new(0.0, 0.0), |m| m.cx)
    }

    pub fn eval_at(&self, r: &Vec3) -> C64 {
        let c = |v: f64| C64::new(v, 0.0);
        self.eval(c(r.x), c(r.y), c(r.z))
    }

    /// Evaluate with coordinates of any scalar type (e.g. a [`crate::Jet`]).
    pub fn eval<S: Scalar>(&self, x: S, y: S, z: S) -> S {
        let d = self.degree() as usize;
        let powers = |v: S| {
            let mut p = Vec::with_capacity(d + 1);
            p.push(S::real(1.0));
            for i in 0..d {
                let next = p[i] * v;
                p.push(next);
            }
            p
        };
        let (xp, yp, zp) = (powers(x), powers(y), powers(z));
        let mut acc = S::real(0.0);
        for m in &self.terms {
            acc = acc + xp[m.px as usize] * yp[m.py as usize] * zp[m.pz as usize] * m.cx;
        }
        acc
    }

    /// Largest |coefficient|; used to decide which terms are numerical noise.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.iter().map(|m| m.cx.norm()).fold(0.0, f64::max)
    }

    /// Drop terms whose magnitude is below `rel` times the largest coefficient.
    pub fn pruned(&self, rel: f64) -> Self {
        let cut = rel * self.max_abs_coefficient();
        Self::new(self.terms.iter().copied().filter(|m| m.cx.norm() > cut))
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self::new(self.terms.iter().map(|m| Monomial { cx: m.cx * c, ..*m }))
    }
}

impl Add for &PolynomialPrefactor {
    type Output = PolynomialPrefactor;
    fn add(self, o: &PolynomialPrefactor) -> PolynomialPrefactor {
        PolynomialPrefactor::new(self.terms.iter().chain(o.terms.iter()).copied())
    }
}

impl Sub for &PolynomialPrefactor {
    type Output = PolynomialPrefactor;
    fn sub(self, o: &PolynomialPrefactor) -> PolynomialPrefactor {
        self + &o.scaled(C64::new(-1.0, 0.0))
    }
}

impl Mul for &PolynomialPrefactor {
    type Output = PolynomialPrefactor;
    fn mul(self, o: &PolynomialPrefactor) -> PolynomialPrefactor {
        let mut out = Vec::with_capacity(self.terms.len() * o.terms.len());
        for a in &self.terms {
            for b in &o.terms {
                out.push(Monomial::new(a.cx * b.cx, a.px + b.px, a.py + b.py, a.pz + b.pz));
            }
        }
        PolynomialPrefactor::new(out)
    }
}

// Dense polynomials as a scalar type: lets every prefactor formula written
// against `Scalar` be expanded symbolically in (x, y, z) at a fixed time.

pub(crate) const DENSE_DEGREE: usize = 6;
const DENSE_LEN: usize = 84; // C(DENSE_DEGREE + 3, 3)

struct DenseTable {
    exps: Vec<[u8; 3]>,
    index: [[[u8; DENSE_DEGREE + 1]; DENSE_DEGREE + 1]; DENSE_DEGREE + 1],
}

fn table() -> &'static DenseTable {
    static TABLE: OnceLock<DenseTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut exps = Vec::with_capacity(DENSE_LEN);
        let mut index = [[[u8::MAX; DENSE_DEGREE + 1]; DENSE_DEGREE + 1]; DENSE_DEGREE + 1];
        for d in 0..=DENSE_DEGREE {
            for px in (0..=d).rev() {
                for py in (0..=d - px).rev() {
                    let pz = d - px - py;
                    index[px][py][pz] = exps.len() as u8;
                    exps.push([px as u8, py as u8, pz as u8]);
                }
            }
        }
        debug_assert_eq!(exps.len(), DENSE_LEN);
        DenseTable { exps, index }
    })
}

/// Dense polynomial of degree ≤ 6. Operations that leave the polynomial ring
/// (degree overflow, transcendental functions of non-constants, division by a
/// non-constant) set `invalid` instead of panicking.
#[derive(Clone, Copy, Debug)]
pub(crate) struct DensePoly {
    c: [C64; DENSE_LEN],
    invalid: bool,
}

impl DensePoly {
    fn zero() -> Self {
        Self { c: [C64::new(0.0, 0.0); DENSE_LEN], invalid: false }
    }

    pub(crate) fn var(axis: usize) -> Self {
        let mut p = Self::zero();
        let mut e = [0usize; 3];
        e[axis] = 1;
        p.c[table().index[e[0]][e[1]][e[2]] as usize] = C64::new(1.0, 0.0);
        p
    }

    fn is_constant(&self) -> bool {
        self.c[1..].iter().all(|z| *z == C64::new(0.0, 0.0))
    }

    fn unary(self, f: impl Fn(C64) -> C64) -> Self {
        let mut out = Self::constant(f(self.c[0]));
        out.invalid = self.invalid || !self.is_constant();
        out
    }

    pub(crate) fn into_prefactor(self) -> Result<PolynomialPrefactor> {
        if self.invalid {
            return Err(Error::DegreeTooHigh { degree: DENSE_DEGREE as u32 + 1, max: DENSE_DEGREE as u32 });
        }
        let t = table();
        Ok(PolynomialPrefactor::new(self.c.iter().enumerate().map(|(i, &cx)| {
            let e = t.exps[i];
            Monomial::new(cx, e[0] as u32, e[1] as u32, e[2] as u32)
        })))
    }
}

impl Add for DensePoly {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for (a, b) in self.c.iter_mut().zip(o.c.iter()) {
            *a += b;
        }
        self.invalid |= o.invalid;
        self
    }
}

impl Sub for DensePoly {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for DensePoly {
    type Output = Self;
    fn neg(mut self) -> Self {
        for a in self.c.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl Mul for DensePoly {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let t = table();
        let mut out = Self::zero();
        out.invalid = self.invalid || o.invalid;
        for (i, a) in self.c.iter().enumerate() {
            if *a == C64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if *b == C64::new(0.0, 0.0) {
                    continue;
                }
                let (ea, eb) = (t.exps[i], t.exps[j]);
                let e = [
                    (ea[0] + eb[0]) as usize,
                    (ea[1] + eb[1]) as usize,
                    (ea[2] + eb[2]) as usize,
                ];
                if e[0] + e[1] + e[2] > DENSE_DEGREE {
                    out.invalid = true;
                    continue;
                }
                out.c[t.index[e[0]][e[1]][e[2]] as usize] += a * b;
            }
        }
        out
    }
}

impl Div for DensePoly {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let mut out = self * Self::constant(C64::new(1.0, 0.0) / o.c[0]);
        out.invalid |= !o.is_constant();
        out
    }
}

macro_rules! dense_const_ops {
    ($t:ty, $lift:expr) => {
        impl Add<$t> for DensePoly {
            type Output = Self;
            fn add(mut self, c: $t) -> Self {
                self.c[0] += $lift(c);
                self
            }
        }
        impl Sub<$t> for DensePoly {
            type Output = Self;
            fn sub(mut self, c: $t) -> Self {
                self.c[0] -= $lift(c);
                self
            }
        }
        impl Mul<$t> for DensePoly {
            type Output = Self;
            fn mul(mut self, c: $t) -> Self {
                let c = $lift(c);
                for a in self.c.iter_mut() {
                    *a *= c;
                }
                self
            }
        }
        impl Div<$t> for DensePoly {
            type Output = Self;
            fn div(self, c: $t) -> Self {
                self * (C64::new(1.0, 0.0) / $lift(c))
            }
        }
    };
}

dense_const_ops!(C64, |c: C64| c);
dense_const_ops!(f64, |c: f64| C64::new(c, 0.0));

impl Scalar for DensePoly {
    fn constant(c: C64) -> Self {
        let mut p = Self::zero();
        p.c[0] = c;
        p
    }
    fn exp(self) -> Self {
        self.unary(C64::exp)
    }
    fn ln(self) -> Self {
        self.unary(C64::ln)
    }
    fn sqrt(self) -> Self {
        self.unary(C64::sqrt)
    }
    fn sin(self) -> Self {
        self.unary(C64::sin)
    }
    fn cos(self) -> Self {
        self.unary(C64::cos)
    }
    fn powf(self, p: f64) -> Self {
        self.unary(|z| z.powf(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn normalisation_merges_and_drops() {
        let p = PolynomialPrefactor::new([
            Monomial::new(c(1.0, 0.0), 1, 0, 0),
            Monomial::new(c(2.0, 1.0), 0, 0, 0),
            Monomial::new(c(-1.0, 0.0), 1, 0, 0),
            Monomial::new(c(0.0, 3.0), 0, 2, 0),
        ]);
        assert_eq!(p.terms().len(), 2);
        assert_eq!(p.coefficient(0, 0, 0), c(2.0, 1.0));
        assert_eq!(p.coefficient(0, 2, 0), c(0.0, 3.0));
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn degree_check() {
        let p = PolynomialPrefactor::new([Monomial::new(c(1.0, 0.0), 2, 2, 1)]);
        assert!(p.check_degree(4).is_err());
        assert!(p.check_degree(5).is_ok());
    }

    #[test]
    fn dense_expansion_of_product() {
        let x = DensePoly::var(0);
        let y = DensePoly::var(1);
        // (x + i y)^2 = x^2 - y^2 + 2i xy
        let w = x + y * c(0.0, 1.0);
        let p = (w * w).into_prefactor().unwrap();
        assert_eq!(p.coefficient(2, 0, 0), c(1.0, 0.0));
        assert_eq!(p.coefficient(0, 2, 0), c(-1.0, 0.0));
        assert_eq!(p.coefficient(1, 1, 0), c(0.0, 2.0));
        assert_eq!(p.terms().len(), 3);
    }

    #[test]
    fn dense_rejects_non_polynomial_operations() {
        let x = DensePoly::var(0);
        assert!(x.exp().into_prefactor().is_err());
        assert!((DensePoly::constant(c(1.0, 0.0)) / x).into_prefactor().is_err());
        let x3 = x * x * x;
        assert!((x3 * x3 * x).into_prefactor().is_err());
        assert!(DensePoly::constant(c(0.0, 0.3)).exp().into_prefactor().is_ok());
    }

    #[test]
    fn serde_list_form() {
        let p = PolynomialPrefactor::linear([c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)], c(-2.0, 0.0));
        let s = serde_json::to_string(&p).unwrap();
        let q: PolynomialPrefactor = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }

    proptest! {
        #[test]
        fn product_evaluates_pointwise(
            a in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0, 0u32..3, 0u32..3, 0u32..3), 1..5),
            b in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0, 0u32..3, 0u32..3, 0u32..3), 1..5),
            r in (-1.5f64..1.5, -1.5f64..1.5, -1.5f64..1.5),
        ) {
            let mk = |v: &Vec<(f64, f64, u32, u32, u32)>| PolynomialPrefactor::new(
                v.iter().map(|&(re, im, px, py, pz)| Monomial::new(c(re, im), px, py, pz)));
            let (pa, pb) = (mk(&a), mk(&b));
            let r = Vec3::new(r.0, r.1, r.2);
            let lhs = (&pa * &pb).eval_at(&r);
            let rhs = pa.eval_at(&r) * pb.eval_at(&r);
            prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
            let sum = (&pa + &pb).eval_at(&r);
            prop_assert!((sum - pa.eval_at(&r) - pb.eval_at(&r)).norm() <= 1e-9 * (1.0 + sum.norm()));
        }
    }
}
