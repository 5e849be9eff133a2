//! Generating-function construction: apply `P(−i∂/∂k)` to a carrier.

use num_complex::Complex64 as C64;

use super::families::{Carrier, Point};
use super::spec::SolutionSpec;
use crate::consts::PhysicalConstants;
use crate::error::{Error, Result};
use crate::jet::Scalar;
use crate::poly::{PolynomialPrefactor, DEFAULT_MAX_DEGREE};
use crate::Vec3;

/// Options of the finite-difference generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenerateOptions {
    /// k-space step; defaults to `1e-2 / L` with `L` the carrier length.
    pub k_step: Option<f64>,
    pub max_degree: u32,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        Self { k_step: None, max_degree: DEFAULT_MAX_DEGREE }
    }
}

/// `P(−i∂/∂k) ψ_k(r, t)` by central finite differences in k (fourth order),
/// evaluated at the carrier's own k.
pub fn generate_from_polynomial(
    carrier: &SolutionSpec,
    poly: &PolynomialPrefactor,
    consts: &PhysicalConstants,
    r: &Vec3,
    t: f64,
    opts: &GenerateOptions,
) -> Result<C64> {
    consts.validate()?;
    let (kind, k) = Carrier::of(carrier).ok_or(Error::UnsupportedCarrier(carrier.family()))?;
    carrier.validate()?;
    poly.check_degree(opts.max_degree)?;
    if !(r.iter().all(|v| v.is_finite()) && t.is_finite()) {
        return Err(Error::NonFinite("position/time"));
    }
    let h = opts.k_step.unwrap_or_else(|| default_k_step(kind, consts));
    if !(h.is_finite() && h > 0.0) {
        return Err(crate::error::invalid("k_step", "must be positive"));
    }
    let c = |v: f64| C64::new(v, 0.0);
    let p = Point { r: [c(r.x), c(r.y), c(r.z)], t: c(t) };
    Ok(finite_difference(kind, k.as_array(), poly, consts, &p, h))
}

pub(crate) fn default_k_step(kind: Carrier, consts: &PhysicalConstants) -> f64 {
    1e-2 / kind.length(consts)
}

/// Generic over the scalar type so that a [`crate::Jet`] carries exact space
/// and time derivatives through the (linear) stencil.
pub(crate) fn finite_difference<S: Scalar>(
    kind: Carrier,
    k: [f64; 3],
    poly: &PolynomialPrefactor,
    consts: &PhysicalConstants,
    p: &Point<S>,
    h: f64,
) -> S {
    let mut acc = S::real(0.0);
    for m in poly.terms() {
        let order = m.degree();
        let stencils: Vec<(Vec<i32>, Vec<f64>)> =
            m.exponents().iter().map(|&n| central_stencil(n as usize)).collect();
        let mut sum = S::real(0.0);
        for (i, wi) in stencils[0].0.iter().zip(&stencils[0].1) {
            for (j, wj) in stencils[1].0.iter().zip(&stencils[1].1) {
                for (l, wl) in stencils[2].0.iter().zip(&stencils[2].1) {
                    let w = wi * wj * wl;
                    if w == 0.0 {
                        continue;
                    }
                    let kk = [k[0] + *i as f64 * h, k[1] + *j as f64 * h, k[2] + *l as f64 * h];
                    sum = sum + kind.eval(kk, consts, p) * w;
                }
            }
        }
        // (−i)^n / h^n
        let scale = C64::new(0.0, -1.0).powu(order) / h.powi(order as i32);
        acc = acc + sum * (m.cx * scale);
    }
    acc
}

/// Offsets and weights of the central stencil for the `n`-th derivative with
/// fourth-order accuracy (unit spacing).
pub(crate) fn central_stencil(n: usize) -> (Vec<i32>, Vec<f64>) {
    if n == 0 {
        return (vec![0], vec![1.0]);
    }
    let half = (n + 1) / 2 + 1;
    let offsets: Vec<i32> = (-(half as i32)..=half as i32).collect();
    let nodes: Vec<f64> = offsets.iter().map(|&o| o as f64).collect();
    let w = fornberg(n, &nodes, 0.0);
    (offsets, w)
}

/// Fornberg's recursion for finite-difference weights of derivative `m` at
/// `x0` on the given nodes.
fn fornberg(m: usize, nodes: &[f64], x0: f64) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// `Σ c_α Π_j h_{α_j}(a_j; s_j)` with `h_{n+1} = a h_n + n s h_{n−1}`.
pub(crate) fn expand<S: Scalar>(poly: &PolynomialPrefactor, a: [S; 3], s: [S; 3]) -> S {
    let d = poly.degree() as usize;
    let table: Vec<Vec<S>> = (0..3)
        .map(|j| {
            let mut h = Vec::with_capacity(d + 1);
            h.push(S::real(1.0));
            if d >= 1 {
                h.push(a[j]);
            }
            for n in 1..d {
                let next = a[j] * h[n] + s[j] * h[n - 1] * n as f64;
                h.push(next);
            }
            h
        })
        .collect();
    let mut acc = S::real(0.0);
    for m in poly.terms() {
        acc = acc
            + table[0][m.px as usize] * table[1][m.py as usize] * table[2][m.pz as usize] * m.cx;
    }
    acc
}
