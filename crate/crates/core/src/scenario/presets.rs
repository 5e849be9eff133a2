use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, TAU};
use std::path::PathBuf;

use serde::Serialize;

use super::{CheckKind, ExpectedEvent, Expectations, OutputConfig, ScenarioConfig, SpeedTarget, DEFAULT_SEED};
use crate::consts::{PhysicalConstants, WaveVector};
use crate::tracker::{EventKind, Grid3};
use crate::{C64, Monomial, PolynomialPrefactor, SolutionSpec, Vec3};

/// Default nodes per axis.
pub const DEFAULT_RESOLUTION: usize = 96;

/// Small offset keeping symmetric loci off grid planes.
const OFFSET: [f64; 3] = [0.0123, -0.0071, 0.0049];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PresetInfo {
    pub name: &'static str,
    pub description: &'static str,
}

const PRESETS: &[PresetInfo] = &[
    PresetInfo {
        name: "fig1",
        description: "Sphere ring created at a point at t=−maR/3ħ and annihilated at +maR/3ħ; radius √(R²−(3ħt/ma)²)",
    },
    PresetInfo {
        name: "fig2",
        description: "Antiparallel pair created at t=−ma²/ħ and annihilated at +ma²/ħ; separation 2a at t=0",
    },
    PresetInfo {
        name: "fig3",
        description: "Two oblique lines (φ=π/4) reconnect at |t| = ma²/(ħ sin²φ)",
    },
    PresetInfo {
        name: "fig3-parallel",
        description: "Two parallel lines (φ=0) keep their topology over the same window",
    },
    PresetInfo {
        name: "fig4",
        description: "Straight line precessing in a uniform field; parametric locus at 8 phases, period 2π/ω_c",
    },
    PresetInfo {
        name: "fig5",
        description: "Ring through the trap centre; circle (x−R)²+y²=R² at t=0, period 2π/ω",
    },
    PresetInfo {
        name: "cylinder",
        description: "Cylinder ring moving at 2ħ/(ma); line-velocity law against displacement",
    },
    PresetInfo {
        name: "gaussian-line",
        description: "Line vortex in a Gaussian packet; line-velocity law against displacement",
    },
    PresetInfo {
        name: "relativistic",
        description: "Klein-Gordon ring whose node speed 2ħ/(a√((ħk/c)²+m²)) exceeds c",
    },
    PresetInfo {
        name: "generation",
        description: "Numeric k-differentiation of the plane wave against the cylinder-ring closed form",
    },
    PresetInfo {
        name: "anatomy",
        description: "Circulation 4πħ/m around a second-order zero (x+iy)² in a Gaussian packet",
    },
    PresetInfo {
        name: "oracle",
        description: "Split-step evolution of a Gaussian-windowed cylinder ring against the closed form",
    },
    PresetInfo {
        name: "oracle-pair",
        description: "Split-step evolution of a Gaussian-windowed vortex pair against the closed form",
    },
];

pub fn list_presets() -> &'static [PresetInfo] {
    PRESETS
}

fn cube(half: f64) -> Grid3 {
    Grid3::cube(Vec3::from(OFFSET), half, DEFAULT_RESOLUTION).expect("preset grid")
}

fn periodic(length: f64) -> Grid3 {
    let mut g = Grid3::periodic_cube(length, DEFAULT_RESOLUTION).expect("preset grid");
    for a in 0..3 {
        g.origin[a] += OFFSET[a];
    }
    g
}

fn events(list: &[(EventKind, f64)]) -> Option<Vec<ExpectedEvent>> {
    Some(list.iter().map(|&(kind, t)| ExpectedEvent { kind, t }).collect())
}

fn ring_poly(r: f64, a: f64) -> PolynomialPrefactor {
    let one = C64::new(1.0, 0.0);
    PolynomialPrefactor::new([
        Monomial::new(one, 2, 0, 0),
        Monomial::new(one, 0, 2, 0),
        Monomial::new(C64::new(-r * r, 0.0), 0, 0, 0),
        Monomial::new(C64::new(0.0, a), 0, 0, 1),
    ])
}

pub fn preset(name: &str) -> Option<ScenarioConfig> {
    use CheckKind::*;
    use EventKind::*;
    let info = PRESETS.iter().find(|p| p.name == name)?;
    let base = |spec, grid, time_range, n_frames, checks: &[CheckKind], expect| ScenarioConfig {
        name: info.name.to_string(),
        description: info.description.to_string(),
        time_range,
        n_frames,
        checks: checks.to_vec(),
        seed: DEFAULT_SEED,
        spec,
        consts: PhysicalConstants::default(),
        grid,
        output: OutputConfig { dir: PathBuf::from(format!("qvortex-out/{}", info.name)), ..Default::default() },
        expect,
    };
    let z = WaveVector::ZERO;
    let cfg = match name {
        "fig1" => base(
            SolutionSpec::FreeRingSphere { r: 3.0, a: 1.0, k: z },
            cube(4.0),
            [-2.0, 2.0],
            64,
            &[Events, Locus, Circulation, Residual],
            Expectations { events: events(&[(Creation, -1.0), (Annihilation, 1.0)]), ..Default::default() },
        ),
        "fig2" => base(
            SolutionSpec::FreeTwoLinesSymmetric { a: 1.0, varphi: FRAC_PI_2, k: z },
            cube(2.5),
            [-2.0, 2.0],
            64,
            &[Events, Locus, Circulation, Residual],
            Expectations { events: events(&[(Creation, -1.0), (Annihilation, 1.0)]), ..Default::default() },
        ),
        "fig3" => base(
            SolutionSpec::FreeTwoLinesSymmetric { a: 1.0, varphi: FRAC_PI_4, k: z },
            cube(4.0),
            [-3.0, 3.0],
            64,
            &[Events, Circulation, Residual],
            Expectations {
                events: events(&[(Reconnection, -2.0), (Reconnection, 2.0)]),
                ..Default::default()
            },
        ),
        "fig3-parallel" => base(
            SolutionSpec::FreeTwoLinesSymmetric { a: 1.0, varphi: 0.0, k: z },
            cube(4.0),
            [-3.0, 3.0],
            64,
            &[Events, Circulation, Residual],
            Expectations { events: events(&[]), ..Default::default() },
        ),
        "fig4" => base(
            SolutionSpec::MagneticLine { b: 1.0, a: 1.0, varphi: FRAC_PI_6 },
            cube(4.0),
            [0.0, TAU],
            8,
            &[Locus, Circulation, Residual],
            Expectations::default(),
        ),
        "fig5" => base(
            SolutionSpec::TrapRing { omega: 1.0, r: 1.0 },
            cube(4.0),
            [0.0, TAU],
            16,
            &[Locus, NodeSpeed, Circulation, Residual],
            Expectations::default(),
        ),
        "cylinder" => base(
            SolutionSpec::FreeRingCylinder { r: 1.0, a: 0.8, k: z },
            cube(2.0),
            [0.0, 0.5],
            8,
            &[NodeSpeed, Locus, Circulation, Residual],
            Expectations {
                node_speed: Some(SpeedTarget::Exact { value: 2.0 / 0.8, rel_tol: 1e-4 }),
                ..Default::default()
            },
        ),
        "gaussian-line" => base(
            SolutionSpec::GaussianLineVortex { l: 2.0, x0: 0.5, k: WaveVector::new(0.3, 0.0, 0.1) },
            cube(3.0),
            [0.0, 2.0],
            8,
            &[NodeSpeed, Locus, Circulation, Residual],
            Expectations::default(),
        ),
        "relativistic" => base(
            SolutionSpec::RelRingCylinder { r: 1.0, a: 4.0 / 3.0, k: z },
            cube(2.0),
            [0.0, 0.1],
            4,
            &[NodeSpeed, Locus, Circulation, Residual],
            Expectations { node_speed: Some(SpeedTarget::Range { min: 1.4, max: 1.6 }), ..Default::default() },
        ),
        "generation" => base(
            SolutionSpec::FreeRingCylinder { r: 1.5, a: 0.8, k: WaveVector::new(0.2, -0.3, 0.1) },
            cube(3.0),
            [-1.0, 1.0],
            4,
            &[Generation, Residual, Locus],
            Expectations::default(),
        ),
        "anatomy" => {
            let (one, i2) = (C64::new(1.0, 0.0), C64::new(0.0, 2.0));
            let poly = PolynomialPrefactor::new([
                Monomial::new(one, 2, 0, 0),
                Monomial::new(-one, 0, 2, 0),
                Monomial::new(i2, 1, 1, 0),
            ]);
            base(
                SolutionSpec::Generated {
                    carrier: Box::new(SolutionSpec::GaussianPacket { l: 1.5, k: z }),
                    poly,
                },
                cube(2.0),
                [0.0, 1.0],
                4,
                &[Circulation, Locus, Residual],
                Expectations::default(),
            )
        }
        "oracle" => base(
            SolutionSpec::Generated {
                carrier: Box::new(SolutionSpec::GaussianPacket { l: 1.5, k: z }),
                poly: ring_poly(1.0, 1.0),
            },
            periodic(27.0),
            [0.0, 0.5],
            2,
            &[Oracle, Residual],
            Expectations { oracle_dt: Some(0.05), ..Default::default() },
        ),
        "oracle-pair" => base(
            SolutionSpec::FreeTwoLinesSymmetric { a: 1.0, varphi: FRAC_PI_2, k: z },
            periodic(27.0),
            [0.0, 0.5],
            2,
            &[Oracle],
            Expectations { window: Some(1.5), oracle_dt: Some(0.05), ..Default::default() },
        ),
        _ => return None,
    };
    Some(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_preset_exists_and_validates() {
        assert!(list_presets().len() >= 8);
        for p in list_presets() {
            let c = preset(p.name).unwrap();
            assert_eq!(c.name, p.name);
            assert!(c.validate().is_empty(), "{}: {:?}", p.name, c.validate());
        }
        assert!(preset("nope").is_none());
    }
}
