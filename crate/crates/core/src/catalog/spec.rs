use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::consts::WaveVector;
use crate::error::{invalid, Result};
use crate::poly::{PolynomialPrefactor, DEFAULT_MAX_DEGREE};

/// One closed-form wave-function family with its parameters.
///
/// Serialises as a table tagged by `family`; `R` and `B` keep their
/// conventional capitalisation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", deny_unknown_fields)]
pub enum SolutionSpec {
    FreePlaneWave {
        #[serde(default)]
        k: WaveVector,
    },
    FreeLineVortex {
        chi: f64,
        #[serde(default)]
        k: WaveVector,
    },
    FreeRingCylinder {
        #[serde(rename = "R")]
        r: f64,
        a: f64,
        #[serde(default)]
        k: WaveVector,
    },
    FreeRingSphere {
        #[serde(rename = "R")]
        r: f64,
        a: f64,
        #[serde(default)]
        k: WaveVector,
    },
    FreeTwoLines {
        w1: [C64; 3],
        r1: [f64; 3],
        w2: [C64; 3],
        r2: [f64; 3],
        #[serde(default)]
        k: WaveVector,
    },
    FreeTwoLinesSymmetric {
        a: f64,
        varphi: f64,
        #[serde(default)]
        k: WaveVector,
    },
    GaussianPacket {
        l: f64,
        #[serde(default)]
        k: WaveVector,
    },
    GaussianLineVortex {
        l: f64,
        x0: f64,
        #[serde(default)]
        k: WaveVector,
    },
    MagneticGenerator {
        #[serde(rename = "B")]
        b: f64,
        #[serde(default)]
        k: WaveVector,
    },
    MagneticLine {
        #[serde(rename = "B")]
        b: f64,
        a: f64,
        varphi: f64,
    },
    TrapGenerator {
        omega: f64,
        #[serde(default)]
        k: WaveVector,
    },
    TrapRing {
        omega: f64,
        #[serde(rename = "R")]
        r: f64,
    },
    RelPlaneWave {
        #[serde(default)]
        k: WaveVector,
    },
    RelLineVortex {
        chi: f64,
        #[serde(default)]
        k: WaveVector,
    },
    RelRingCylinder {
        #[serde(rename = "R")]
        r: f64,
        a: f64,
        #[serde(default)]
        k: WaveVector,
    },
    /// `poly(−i∂/∂k)` applied to a carrier, evaluated at the carrier's k.
    Generated {
        carrier: Box<SolutionSpec>,
        poly: PolynomialPrefactor,
    },
}

impl SolutionSpec {
    pub fn family(&self) -> &'static str {
        match self {
            Self::FreePlaneWave { .. } => "FreePlaneWave",
            Self::FreeLineVortex { .. } => "FreeLineVortex",
            Self::FreeRingCylinder { .. } => "FreeRingCylinder",
            Self::FreeRingSphere { .. } => "FreeRingSphere",
            Self::FreeTwoLines { .. } => "FreeTwoLines",
            Self::FreeTwoLinesSymmetric { .. } => "FreeTwoLinesSymmetric",
            Self::GaussianPacket { .. } => "GaussianPacket",
            Self::GaussianLineVortex { .. } => "GaussianLineVortex",
            Self::MagneticGenerator { .. } => "MagneticGenerator",
            Self::MagneticLine { .. } => "MagneticLine",
            Self::TrapGenerator { .. } => "TrapGenerator",
            Self::TrapRing { .. } => "TrapRing",
            Self::RelPlaneWave { .. } => "RelPlaneWave",
            Self::RelLineVortex { .. } => "RelLineVortex",
            Self::RelRingCylinder { .. } => "RelRingCylinder",
            Self::Generated { .. } => "Generated",
        }
    }

    /// Wave vector of the family (zero for families without one).
    pub fn wave_vector(&self) -> WaveVector {
        match self {
            Self::FreePlaneWave { k }
            | Self::FreeLineVortex { k, .. }
            | Self::FreeRingCylinder { k, .. }
            | Self::FreeRingSphere { k, .. }
            | Self::FreeTwoLines { k, .. }
            | Self::FreeTwoLinesSymmetric { k, .. }
            | Self::GaussianPacket { k, .. }
            | Self::GaussianLineVortex { k, .. }
            | Self::MagneticGenerator { k, .. }
            | Self::TrapGenerator { k, .. }
            | Self::RelPlaneWave { k }
            | Self::RelLineVortex { k, .. }
            | Self::RelRingCylinder { k, .. } => *k,
            Self::MagneticLine { .. } | Self::TrapRing { .. } => WaveVector::ZERO,
            Self::Generated { carrier, .. } => carrier.wave_vector(),
        }
    }

    /// Bare carriers carry no vortex prefactor.
    pub fn is_carrier(&self) -> bool {
        matches!(
            self,
            Self::FreePlaneWave { .. }
                | Self::GaussianPacket { .. }
                | Self::MagneticGenerator { .. }
                | Self::TrapGenerator { .. }
                | Self::RelPlaneWave { .. }
        )
    }

    pub fn is_free(&self) -> bool {
        match self {
            Self::FreePlaneWave { .. }
            | Self::FreeLineVortex { .. }
            | Self::FreeRingCylinder { .. }
            | Self::FreeRingSphere { .. }
            | Self::FreeTwoLines { .. }
            | Self::FreeTwoLinesSymmetric { .. }
            | Self::GaussianPacket { .. }
            | Self::GaussianLineVortex { .. } => true,
            Self::Generated { carrier, .. } => carrier.is_free(),
            _ => false,
        }
    }

    pub fn is_magnetic(&self) -> bool {
        match self {
            Self::MagneticGenerator { .. } | Self::MagneticLine { .. } => true,
            Self::Generated { carrier, .. } => carrier.is_magnetic(),
            _ => false,
        }
    }

    pub fn is_relativistic(&self) -> bool {
        match self {
            Self::RelPlaneWave { .. } | Self::RelLineVortex { .. } | Self::RelRingCylinder { .. } => {
                true
            }
            Self::Generated { carrier, .. } => carrier.is_relativistic(),
            _ => false,
        }
    }

    /// Trap frequency for families evolving in the harmonic trap.
    pub fn trap_frequency(&self) -> Option<f64> {
        match self {
            Self::TrapGenerator { omega, .. } | Self::TrapRing { omega, .. } => Some(*omega),
            Self::Generated { carrier, .. } => carrier.trap_frequency(),
            _ => None,
        }
    }

    pub fn magnetic_field(&self) -> Option<f64> {
        match self {
            Self::MagneticGenerator { b, .. } | Self::MagneticLine { b, .. } => Some(*b),
            Self::Generated { carrier, .. } => carrier.magnetic_field(),
            _ => None,
        }
    }

    /// Check the parameter invariants of the variant; every violation is
    /// reported with the offending field name.
    pub fn validate(&self) -> Result<()> {
        let errs = self.violations();
        match errs.into_iter().next() {
            None => Ok(()),
            Some((field, reason)) => Err(invalid(&field, reason)),
        }
    }

    /// All parameter violations, as (field, reason) pairs.
    pub fn violations(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        fn push(out: &mut Vec<(String, String)>, ok: bool, field: &str, reason: &str) {
            if !ok {
                out.push((field.to_string(), reason.to_string()));
            }
        }
        macro_rules! check {
            ($ok:expr, $field:expr, $reason:expr) => {
                push(&mut out, $ok, $field, $reason)
            };
        }
        let finite = |v: f64| v.is_finite();
        let k = self.wave_vector();
        check!(k.is_finite(), "k", "components must be finite");
        match self {
            Self::FreePlaneWave { .. } | Self::RelPlaneWave { .. } => {}
            Self::FreeLineVortex { chi, .. } | Self::RelLineVortex { chi, .. } => {
                check!(finite(*chi), "chi", "must be finite");
            }
            Self::FreeRingCylinder { r, a, .. }
            | Self::FreeRingSphere { r, a, .. }
            | Self::RelRingCylinder { r, a, .. } => {
                check!(finite(*r) && *r > 0.0, "R", "must be positive");
                check!(finite(*a) && *a != 0.0, "a", "must be finite and non-zero");
            }
            Self::FreeTwoLines { w1, r1, w2, r2, .. } => {
                let ok = |w: &[C64; 3]| w.iter().all(|c| c.is_finite());
                check!(ok(w1), "w1", "must be finite");
                check!(ok(w2), "w2", "must be finite");
                check!(r1.iter().all(|v| v.is_finite()), "r1", "must be finite");
                check!(r2.iter().all(|v| v.is_finite()), "r2", "must be finite");
                check!(!degenerate(w1), "w1", "w1 × w1* vanishes (degenerate node sheet)");
                check!(!degenerate(w2), "w2", "w2 × w2* vanishes (degenerate node sheet)");
            }
            Self::FreeTwoLinesSymmetric { a, varphi, .. } => {
                check!(finite(*a) && *a != 0.0, "a", "must be finite and non-zero");
                check!(finite(*varphi), "varphi", "must be finite");
            }
            Self::GaussianPacket { l, .. } => {
                check!(finite(*l) && *l > 0.0, "l", "must be positive");
            }
            Self::GaussianLineVortex { l, x0, .. } => {
                check!(finite(*l) && *l > 0.0, "l", "must be positive");
                check!(finite(*x0), "x0", "must be finite");
            }
            Self::MagneticGenerator { b, .. } => {
                check!(finite(*b) && *b != 0.0, "B", "must be finite and non-zero");
            }
            Self::MagneticLine { b, a, varphi } => {
                check!(finite(*b) && *b != 0.0, "B", "must be finite and non-zero");
                check!(finite(*a), "a", "must be finite");
                check!(finite(*varphi), "varphi", "must be finite");
            }
            Self::TrapGenerator { omega, .. } => {
                check!(finite(*omega) && *omega > 0.0, "omega", "must be positive");
            }
            Self::TrapRing { omega, r } => {
                check!(finite(*omega) && *omega > 0.0, "omega", "must be positive");
                check!(finite(*r) && *r > 0.0, "R", "must be positive");
            }
            Self::Generated { carrier, poly } => {
                if !carrier.is_carrier() {
                    check!(false, "carrier", "must be one of FreePlaneWave, GaussianPacket, MagneticGenerator, TrapGenerator, RelPlaneWave");
                } else {
                    for (f, r) in carrier.violations() {
                        out.push((format!("carrier.{f}"), r));
                    }
                }
                if poly.degree() > DEFAULT_MAX_DEGREE {
                    out.push((
                        "poly".into(),
                        format!("degree {} exceeds maximum {DEFAULT_MAX_DEGREE}", poly.degree()),
                    ));
                }
                if poly.terms().iter().any(|m| !m.cx.is_finite()) {
                    out.push(("poly".into(), "coefficients must be finite".into()));
                }
                if poly.is_zero() {
                    out.push(("poly".into(), "must not be identically zero".into()));
                }
            }
        }
        out
    }

    /// Natural length of the family, used for finite-difference steps and
    /// default grid extents.
    pub fn natural_length(&self, consts: &crate::PhysicalConstants) -> f64 {
        let kl = |k: &WaveVector| {
            let n = k.norm_squared().sqrt();
            if n > 0.0 {
                (1.0 / n).min(1.0)
            } else {
                1.0
            }
        };
        match self {
            Self::FreePlaneWave { k }
            | Self::RelPlaneWave { k }
            | Self::FreeLineVortex { k, .. }
            | Self::RelLineVortex { k, .. } => kl(k),
            Self::FreeRingCylinder { r, a, .. }
            | Self::FreeRingSphere { r, a, .. }
            | Self::RelRingCylinder { r, a, .. } => r.min(a.abs()),
            Self::FreeTwoLines { k, .. } => kl(k),
            Self::FreeTwoLinesSymmetric { a, .. } => a.abs(),
            Self::GaussianPacket { l, .. } | Self::GaussianLineVortex { l, .. } => *l,
            Self::MagneticGenerator { b, .. } | Self::MagneticLine { b, .. } => {
                (consts.hbar / (consts.charge * b.abs())).sqrt()
            }
            Self::TrapGenerator { omega, .. } => (consts.hbar / (consts.mass * omega)).sqrt(),
            Self::TrapRing { omega, r } => r.min((consts.hbar / (consts.mass * omega)).sqrt()),
            Self::Generated { carrier, .. } => carrier.natural_length(consts),
        }
    }

    /// A representative parameter set for every family, used by residual
    /// sweeps and documentation.
    pub fn examples() -> Vec<SolutionSpec> {
        let k = WaveVector::new(0.3, -0.2, 0.4);
        let c = |re: f64, im: f64| C64::new(re, im);
        vec![
            Self::FreePlaneWave { k },
            Self::FreeLineVortex { chi: FRAC_PI_6, k },
            Self::FreeRingCylinder { r: 1.5, a: 0.8, k },
            Self::FreeRingSphere { r: 3.0, a: 1.0, k },
            Self::FreeTwoLines {
                w1: [c(1.0, 0.0), c(0.0, 1.0), c(0.2, 0.0)],
                r1: [0.0, 0.0, 0.5],
                w2: [c(0.3, 0.0), c(0.0, 0.5), c(0.0, 1.0)],
                r2: [0.2, -0.1, -0.5],
                k,
            },
            Self::FreeTwoLinesSymmetric { a: 1.0, varphi: FRAC_PI_4, k },
            Self::GaussianPacket { l: 1.5, k },
            Self::GaussianLineVortex { l: 2.0, x0: 0.5, k },
            Self::MagneticGenerator { b: 1.0, k },
            Self::MagneticLine { b: 1.0, a: 1.0, varphi: FRAC_PI_6 },
            Self::TrapGenerator { omega: 1.0, k },
            Self::TrapRing { omega: 1.0, r: 1.0 },
            Self::RelPlaneWave { k },
            Self::RelLineVortex { chi: 0.4, k },
            Self::RelRingCylinder { r: 1.0, a: 4.0 / 3.0, k },
            Self::Generated {
                carrier: Box::new(Self::GaussianPacket { l: 1.5, k: WaveVector::ZERO }),
                poly: PolynomialPrefactor::new([
                    crate::Monomial::new(c(1.0, 0.0), 2, 0, 0),
                    crate::Monomial::new(c(-1.0, 0.0), 0, 2, 0),
                    crate::Monomial::new(c(0.0, 2.0), 1, 1, 0),
                ]),
            },
            Self::Generated {
                carrier: Box::new(Self::TrapGenerator { omega: 1.0, k: WaveVector::new(0.1, 0.0, 0.2) }),
                poly: PolynomialPrefactor::new([
                    crate::Monomial::new(c(1.0, 0.0), 1, 0, 1),
                    crate::Monomial::new(c(0.0, 1.0), 0, 1, 0),
                ]),
            },
            Self::Generated {
                carrier: Box::new(Self::MagneticGenerator { b: 1.0, k: WaveVector::ZERO }),
                poly: PolynomialPrefactor::new([
                    crate::Monomial::new(c(1.0, 0.0), 2, 0, 0),
                    crate::Monomial::new(c(1.0, 0.0), 0, 2, 0),
                    crate::Monomial::new(c(-1.0, 0.0), 0, 0, 0),
                    crate::Monomial::new(c(0.0, 1.0), 0, 0, 1),
                ]),
            },
            Self::Generated {
                carrier: Box::new(Self::RelPlaneWave { k: WaveVector::new(0.2, 0.0, 0.1) }),
                poly: PolynomialPrefactor::new([
                    crate::Monomial::new(c(1.0, 0.0), 1, 0, 0),
                    crate::Monomial::new(c(0.0, 1.0), 0, 1, 0),
                ]),
            },
        ]
    }
}

fn degenerate(w: &[C64; 3]) -> bool {
    let re = nalgebra::Vector3::new(w[0].re, w[1].re, w[2].re);
    let im = nalgebra::Vector3::new(w[0].im, w[1].im, w[2].im);
    re.cross(&im).norm() <= 1e-12 * (re.norm_squared() + im.norm_squared())
}
