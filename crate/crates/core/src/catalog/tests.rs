use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::consts::WaveVector;
use crate::poly::Monomial;

fn nat() -> PhysicalConstants {
    PhysicalConstants::default()
}

fn sol(spec: SolutionSpec) -> Solution {
    Solution::new(spec, nat()).unwrap()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn random_point(rng: &mut ChaCha8Rng, s: &Solution) -> (Vec3, f64) {
    let l = s.natural_length().max(0.5);
    let r = Vec3::new(
        rng.random_range(-2.0..2.0) * l,
        rng.random_range(-2.0..2.0) * l,
        rng.random_range(-2.0..2.0) * l,
    );
    let t = if s.spec().is_magnetic() {
        rng.random_range(0.0..2.0 * PI)
    } else {
        rng.random_range(-1.0..1.0)
    };
    (r, t)
}

/// Fourth-order central differences of `eval`, step `h`.
fn fd(s: &Solution, r: &Vec3, t: f64, h: f64) -> ([C64; 3], C64, C64) {
    let f = |q: Vec3, tt: f64| s.eval(&q, tt).unwrap();
    let d1 = |e: Vec3, et: f64| {
        (-f(r + 2.0 * h * e, t + 2.0 * h * et) + 8.0 * f(r + h * e, t + h * et)
            - 8.0 * f(r - h * e, t - h * et)
            + f(r - 2.0 * h * e, t - 2.0 * h * et))
            / (12.0 * h)
    };
    let d2 = |e: Vec3| {
        (-f(r + 2.0 * h * e, t) + 16.0 * f(r + h * e, t) - 30.0 * f(*r, t) + 16.0 * f(r - h * e, t)
            - f(r - 2.0 * h * e, t))
            / (12.0 * h * h)
    };
    let ax = [Vec3::x(), Vec3::y(), Vec3::z()];
    let g = [d1(ax[0], 0.0), d1(ax[1], 0.0), d1(ax[2], 0.0)];
    let lap = d2(ax[0]) + d2(ax[1]) + d2(ax[2]);
    let dt = d1(Vec3::zeros(), 1.0);
    (g, lap, dt)
}

fn rel(a: C64, b: C64, scale: f64) -> f64 {
    (a - b).norm() / scale
}

#[test]
fn analytic_derivatives_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for spec in SolutionSpec::examples() {
        let s = sol(spec);
        let h = 1e-3 * s.natural_length();
        for _ in 0..20 {
            let (r, t) = random_point(&mut rng, &s);
            let j = s.jet(&r, t).unwrap();
            let (g, lap, dt) = fd(&s, &r, t, h);
            // Scale by the local size of the derivatives so zeros of a single
            // component do not blow up the relative error.
            let gs = j.g.iter().map(|z| z.norm()).fold(0.0, f64::max) + j.v.norm() / s.natural_length();
            for a in 0..3 {
                assert!(rel(j.g[a], g[a], gs) < 1e-8, "{} grad {a}", s.spec().family());
            }
            let ls = j.lap.norm() + gs / s.natural_length();
            assert!(rel(j.lap, lap, ls) < 1e-6, "{} lap", s.spec().family());
            let ts = j.dt.norm() + j.v.norm();
            assert!(rel(j.dt, dt, ts) < 1e-7, "{} dt", s.spec().family());
        }
    }
}

#[test]
fn gaussian_time_derivative_hundred_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s = sol(SolutionSpec::GaussianPacket { l: 1.3, k: WaveVector::new(0.4, 0.0, -0.2) });
    for _ in 0..100 {
        let (r, t) = random_point(&mut rng, &s);
        let j = s.jet(&r, t).unwrap();
        let (_, lap, dt) = fd(&s, &r, t, 1e-3 * 1.3);
        assert!(rel(j.dt, dt, j.dt.norm() + j.v.norm()) < 1e-7);
        assert!(rel(j.lap, lap, j.lap.norm() + j.v.norm()) < 1e-7);
    }
}

#[test]
fn residual_below_threshold_for_every_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for spec in SolutionSpec::examples() {
        let s = sol(spec);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let (r, t) = random_point(&mut rng, &s);
            worst = worst.max(s.pde_residual(&r, t).unwrap());
        }
        assert!(worst < 1e-6, "{}: {worst:e}", s.spec().family());
    }
}

#[test]
fn plane_wave_examples() {
    let s = sol(SolutionSpec::FreePlaneWave { k: WaveVector::ZERO });
    assert_eq!(s.eval(&Vec3::new(3.0, -1.0, 2.0), 5.0).unwrap(), c(1.0, 0.0));
    let k = WaveVector::new(0.5, -1.0, 0.25);
    let s = sol(SolutionSpec::FreePlaneWave { k });
    let r = Vec3::new(0.3, 0.2, -0.7);
    let j = s.jet(&r, 0.4).unwrap();
    let k2 = k.norm_squared();
    assert!((j.dt - c(0.0, -k2 / 2.0) * j.v).norm() < 1e-14);
    assert!((j.lap + k2 * j.v).norm() < 1e-14);
    for (a, kc) in k.as_array().iter().enumerate() {
        assert!((j.g[a] - c(0.0, *kc) * j.v).norm() < 1e-14);
    }
}

#[test]
fn line_vortex_gradient_at_origin() {
    let s = sol(SolutionSpec::FreeLineVortex { chi: FRAC_PI_4, k: WaveVector::ZERO });
    let g = s.eval_gradient(&Vec3::zeros(), 0.0).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((g[0] - c(h, 0.0)).norm() < 1e-15);
    assert!((g[1] - c(0.0, h)).norm() < 1e-15);
    assert!(g[2].norm() < 1e-15);
}

#[test]
fn non_finite_inputs_rejected() {
    let s = sol(SolutionSpec::FreePlaneWave { k: WaveVector::ZERO });
    assert!(s.eval(&Vec3::new(f64::NAN, 0.0, 0.0), 0.0).is_err());
    assert!(s.eval(&Vec3::zeros(), f64::INFINITY).is_err());
}

#[test]
fn sphere_ring_annihilation_point_is_a_zero() {
    let (rr, a) = (3.0, 1.0);
    let s = sol(SolutionSpec::FreeRingSphere { r: rr, a, k: WaveVector::ZERO });
    let ta = a * rr / 3.0;
    let z = s.eval(&Vec3::new(0.0, 0.0, -3.0 * ta / a), ta).unwrap();
    assert!(z.norm() < 1e-12, "{z}");
}

#[test]
fn trap_ring_prefactor_at_time_zero() {
    let rr = 1.3;
    let s = sol(SolutionSpec::TrapRing { omega: 0.7, r: rr });
    let p = s.prefactor(0.0).unwrap().pruned(1e-14);
    let expect = PolynomialPrefactor::new([
        Monomial::new(c(1.0, 0.0), 2, 0, 0),
        Monomial::new(c(1.0, 0.0), 0, 2, 0),
        Monomial::new(c(-2.0 * rr, 0.0), 1, 0, 0),
        Monomial::new(c(0.0, rr), 0, 0, 1),
    ]);
    assert_eq!(p.terms().len(), 4, "{p:?}");
    for m in expect.terms() {
        assert!((p.coefficient(m.px, m.py, m.pz) - m.cx).norm() < 1e-14);
    }
}

#[test]
fn cylinder_ring_prefactor_monomials() {
    let k = WaveVector::new(0.3, -0.5, 0.2);
    let (rr, a, t) = (1.5, 0.8, 0.6);
    let s = sol(SolutionSpec::FreeRingCylinder { r: rr, a, k });
    let p = s.prefactor(t).unwrap();
    let v = nat().velocity(&k);
    assert!((p.coefficient(2, 0, 0) - 1.0).norm() < 1e-14);
    assert!((p.coefficient(0, 2, 0) - 1.0).norm() < 1e-14);
    assert!((p.coefficient(1, 0, 0) - c(-2.0 * v.x * t, 0.0)).norm() < 1e-14);
    assert!((p.coefficient(0, 1, 0) - c(-2.0 * v.y * t, 0.0)).norm() < 1e-14);
    assert!((p.coefficient(0, 0, 1) - c(0.0, a)).norm() < 1e-14);
    let c0 = c((v.x * v.x + v.y * v.y) * t * t - rr * rr, -a * v.z * t + 2.0 * t);
    assert!((p.coefficient(0, 0, 0) - c0).norm() < 1e-13);
}

#[test]
fn two_line_prefactors() {
    let s = sol(SolutionSpec::FreeTwoLinesSymmetric { a: 1.0, varphi: 0.6, k: WaveVector::ZERO });
    let p = s.prefactor(0.0).unwrap();
    // Constant term of W1 W2 at t = 0 is (ia)(−ia) = a².
    assert!((p.coefficient(0, 0, 0) - c(1.0, 0.0)).norm() < 1e-14);
    let p1 = s.prefactor(0.5).unwrap();
    let shift = -2.0 * 0.5 * 0.6f64.sin().powi(2);
    assert!((p1.coefficient(0, 0, 0) - c(1.0, shift)).norm() < 1e-14);

    let w1 = [c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)];
    let w2 = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)];
    let s = sol(SolutionSpec::FreeTwoLines { w1, r1: [0.0; 3], w2, r2: [0.0; 3], k: WaveVector::ZERO });
    let t = 0.3;
    let p = s.prefactor(t).unwrap();
    let l1 = PolynomialPrefactor::linear(w1, c(0.0, 0.0));
    let l2 = PolynomialPrefactor::linear(w2, c(0.0, 0.0));
    let w12: C64 = w1.iter().zip(&w2).map(|(a, b)| a * b).sum();
    let expect = &(&l1 * &l2) + &PolynomialPrefactor::constant(c(0.0, t) * w12);
    assert_eq!(p, expect);
}

#[test]
fn carriers_have_no_prefactor() {
    let s = sol(SolutionSpec::GaussianPacket { l: 1.0, k: WaveVector::ZERO });
    assert!(matches!(s.prefactor(0.0), Err(Error::NoPrefactor(_))));
}

#[test]
fn value_is_prefactor_times_carrier() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for spec in SolutionSpec::examples() {
        let s = sol(spec);
        if s.spec().is_carrier() {
            continue;
        }
        for _ in 0..10 {
            let (r, t) = random_point(&mut rng, &s);
            let Ok(p) = s.prefactor(t) else {
                assert!(s.spec().is_relativistic());
                continue;
            };
            let lhs = s.eval(&r, t).unwrap();
            let rhs = p.eval_at(&r) * s.carrier_value(&r, t);
            assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1e-300) + 1e-300, "{}", s.spec().family());
        }
    }
}

fn with_k(spec: &SolutionSpec, k: WaveVector) -> SolutionSpec {
    let mut s = spec.clone();
    match &mut s {
        SolutionSpec::FreePlaneWave { k: kk }
        | SolutionSpec::FreeLineVortex { k: kk, .. }
        | SolutionSpec::FreeRingCylinder { k: kk, .. }
        | SolutionSpec::FreeRingSphere { k: kk, .. }
        | SolutionSpec::FreeTwoLines { k: kk, .. }
        | SolutionSpec::FreeTwoLinesSymmetric { k: kk, .. }
        | SolutionSpec::GaussianPacket { k: kk, .. }
        | SolutionSpec::GaussianLineVortex { k: kk, .. } => *kk = k,
        _ => unreachable!(),
    }
    s
}

#[test]
fn galilean_transport_for_free_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let k = WaveVector::new(0.35, -0.25, 0.5);
    for spec in SolutionSpec::examples().into_iter().filter(|s| s.is_free()) {
        if matches!(spec, SolutionSpec::Generated { .. }) {
            continue;
        }
        let moving = sol(with_k(&spec, k));
        let rest = sol(with_k(&spec, WaveVector::ZERO));
        let v = nat().velocity(&k);
        for _ in 0..20 {
            let (r, t) = random_point(&mut rng, &moving);
            let lhs = moving.eval(&r, t).unwrap();
            let phase = C64::new(0.0, k.to_vec3().dot(&r) - k.norm_squared() * t / 2.0).exp();
            let rhs = rest.eval(&(r - v * t), t).unwrap() * phase;
            assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()), "{}", spec.family());
        }
    }
}

fn line_poly(chi: f64) -> PolynomialPrefactor {
    PolynomialPrefactor::new([
        Monomial::new(c(chi.cos(), 0.0), 1, 0, 0),
        Monomial::new(c(0.0, chi.sin()), 0, 1, 0),
    ])
}

fn ring_poly(rr: f64, a: f64) -> PolynomialPrefactor {
    PolynomialPrefactor::new([
        Monomial::new(c(1.0, 0.0), 2, 0, 0),
        Monomial::new(c(1.0, 0.0), 0, 2, 0),
        Monomial::new(c(-rr * rr, 0.0), 0, 0, 0),
        Monomial::new(c(0.0, a), 0, 0, 1),
    ])
}

#[test]
fn finite_difference_generator_reproduces_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let k = WaveVector::new(0.2, -0.3, 0.1);
    let carrier = SolutionSpec::FreePlaneWave { k };
    let cases = [
        (line_poly(0.4), SolutionSpec::FreeLineVortex { chi: 0.4, k }),
        (ring_poly(1.5, 0.8), SolutionSpec::FreeRingCylinder { r: 1.5, a: 0.8, k }),
        (
            &ring_poly(1.0, 0.5) + &PolynomialPrefactor::new([Monomial::new(c(1.0, 0.0), 0, 0, 2)]),
            SolutionSpec::FreeRingSphere { r: 1.0, a: 0.5, k },
        ),
    ];
    for (poly, closed) in cases {
        let s = sol(closed);
        for _ in 0..100 {
            let (r, t) = random_point(&mut rng, &s);
            let g = generate_from_polynomial(&carrier, &poly, &nat(), &r, t, &Default::default()).unwrap();
            let e = s.eval(&r, t).unwrap();
            assert!((g - e).norm() <= 1e-5 * e.norm(), "{} {g} {e}", s.spec().family());
        }
    }
    // Gaussian and trap generators against their vortex families.
    let gl = sol(SolutionSpec::GaussianLineVortex { l: 2.0, x0: 0.5, k });
    let gpoly = PolynomialPrefactor::new([
        Monomial::new(c(1.0, 0.0), 1, 0, 0),
        Monomial::new(c(0.0, 1.0), 0, 1, 0),
        Monomial::new(c(-0.5, 0.0), 0, 0, 0),
    ]);
    let tr = sol(SolutionSpec::TrapRing { omega: 1.0, r: 1.0 });
    let tpoly = PolynomialPrefactor::new([
        Monomial::new(c(1.0, 0.0), 2, 0, 0),
        Monomial::new(c(1.0, 0.0), 0, 2, 0),
        Monomial::new(c(-2.0, 0.0), 1, 0, 0),
        Monomial::new(c(0.0, 1.0), 0, 0, 1),
    ]);
    for _ in 0..50 {
        let (r, t) = random_point(&mut rng, &gl);
        let g = generate_from_polynomial(
            &SolutionSpec::GaussianPacket { l: 2.0, k },
            &gpoly,
            &nat(),
            &r,
            t,
            &Default::default(),
        )
        .unwrap();
        let e = gl.eval(&r, t).unwrap();
        assert!((g - e).norm() <= 1e-5 * e.norm(), "gauss {g} {e}");
        let (r, t) = random_point(&mut rng, &tr);
        let carrier = SolutionSpec::TrapGenerator { omega: 1.0, k: WaveVector::ZERO };
        let g = generate_from_polynomial(&carrier, &tpoly, &nat(), &r, t, &Default::default()).unwrap();
        let e = tr.eval(&r, t).unwrap();
        assert!((g - e).norm() <= 1e-5 * e.norm(), "trap {g} {e}");
    }
}

#[test]
fn magnetic_line_matches_generator_first_derivatives() {
    let (a, phi) = (1.0, 0.5);
    let line = sol(SolutionSpec::MagneticLine { b: 1.0, a, varphi: phi });
    let poly = PolynomialPrefactor::new([
        Monomial::new(c(phi.sin(), 0.0), 1, 0, 0),
        Monomial::new(c(phi.cos(), 0.0), 0, 0, 1),
        Monomial::new(c(0.0, 1.0), 0, 1, 0),
        Monomial::new(c(0.0, -a), 0, 0, 0),
    ]);
    let carrier = SolutionSpec::MagneticGenerator { b: 1.0, k: WaveVector::ZERO };
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..50 {
        let (r, t) = random_point(&mut rng, &line);
        let g = generate_from_polynomial(&carrier, &poly, &nat(), &r, t, &Default::default()).unwrap();
        let e = line.eval(&r, t).unwrap();
        assert!((g - e).norm() <= 1e-6 * e.norm());
    }
}

#[test]
fn magnetic_line_zero_set_follows_parametric_curve() {
    let (a, phi) = (1.0, 0.4);
    let line = sol(SolutionSpec::MagneticLine { b: 1.0, a, varphi: phi });
    for step in 0..8 {
        let t = step as f64 * 2.0 * PI / 8.0 + 0.1;
        let (s, co) = (t.sin(), t.cos());
        let den = 1.0 - phi.sin() + (1.0 + phi.sin()) * co;
        for x in [-1.0, 0.0, 0.7] {
            let y = (2.0 * a + x * s * (1.0 + phi.sin())) / den;
            let z = -(2.0 * x * phi.tan() + a * s * (1.0 / phi.cos() + phi.tan())) / den;
            let p = line.prefactor(t).unwrap().eval_at(&Vec3::new(x, y, z));
            assert!(p.norm() < 1e-12, "t={t} x={x} {p}");
        }
    }
}

#[test]
fn exact_expansion_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let poly = PolynomialPrefactor::new([
        Monomial::new(c(1.0, 0.5), 2, 1, 0),
        Monomial::new(c(-0.3, 0.0), 0, 0, 3),
        Monomial::new(c(0.0, 1.0), 1, 1, 1),
        Monomial::new(c(0.2, 0.0), 0, 0, 0),
    ]);
    let k = WaveVector::new(0.1, 0.2, -0.1);
    for carrier in [
        SolutionSpec::FreePlaneWave { k },
        SolutionSpec::GaussianPacket { l: 1.5, k },
        SolutionSpec::MagneticGenerator { b: 0.8, k },
        SolutionSpec::TrapGenerator { omega: 1.2, k },
    ] {
        let s = sol(SolutionSpec::Generated { carrier: Box::new(carrier.clone()), poly: poly.clone() });
        for _ in 0..20 {
            let (r, t) = random_point(&mut rng, &s);
            let exact = s.eval(&r, t).unwrap();
            let g = generate_from_polynomial(&carrier, &poly, &nat(), &r, t, &Default::default()).unwrap();
            assert!((g - exact).norm() <= 1e-5 * exact.norm(), "{}", carrier.family());
        }
    }
}

#[test]
fn relativistic_ring_node_speed() {
    // With k = 0 the ring sits at z = −2ħt/(ma).
    let a = 4.0 / 3.0;
    let s = sol(SolutionSpec::RelRingCylinder { r: 1.0, a, k: WaveVector::ZERO });
    let t = 0.8;
    let z = -2.0 * t / a;
    assert!(s.eval(&Vec3::new(1.0, 0.0, z), t).unwrap().norm() < 1e-12);
}

#[test]
fn second_order_zero_prefactor() {
    let poly = PolynomialPrefactor::new([
        Monomial::new(c(1.0, 0.0), 2, 0, 0),
        Monomial::new(c(-1.0, 0.0), 0, 2, 0),
        Monomial::new(c(0.0, 2.0), 1, 1, 0),
    ]);
    let s = sol(SolutionSpec::Generated {
        carrier: Box::new(SolutionSpec::FreePlaneWave { k: WaveVector::ZERO }),
        poly: poly.clone(),
    });
    // (x+iy)² + iħt/m·(1 − 1) = (x+iy)²: the cross terms cancel.
    let p = s.prefactor(0.7).unwrap().pruned(1e-15);
    assert_eq!(p, poly);
}
