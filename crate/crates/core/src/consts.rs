use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::Vec3;

/// Physical constants entering every formula: ħ, m, e and c.
///
/// The default is natural units, all four equal to one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub mass: f64,
    pub charge: f64,
    pub light_speed: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            charge: 1.0,
            light_speed: 1.0,
        }
    }
}

impl PhysicalConstants {
    pub fn natural() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("hbar", self.hbar),
            ("mass", self.mass),
            ("charge", self.charge),
            ("light_speed", self.light_speed),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Circulation quantum 2πħ/m.
    pub fn circulation_quantum(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.hbar / self.mass
    }

    /// Classical velocity ħk/m.
    pub fn velocity(&self, k: &WaveVector) -> Vec3 {
        k.to_vec3() * (self.hbar / self.mass)
    }

    /// Klein-Gordon frequency c·sqrt(k² + (mc/ħ)²).
    pub fn kg_frequency(&self, k: &WaveVector) -> f64 {
        let mu = self.mass * self.light_speed / self.hbar;
        self.light_speed * (k.norm_squared() + mu * mu).sqrt()
    }

    /// Group velocity ħk / sqrt((ħk/c)² + m²) of a Klein-Gordon plane wave.
    pub fn kg_velocity(&self, k: &WaveVector) -> Vec3 {
        let c = self.light_speed;
        k.to_vec3() * (c * c / self.kg_frequency(k))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WaveVector {
    pub kx: f64,
    pub ky: f64,
    pub kz: f64,
}

impl WaveVector {
    pub const ZERO: WaveVector = WaveVector {
        kx: 0.0,
        ky: 0.0,
        kz: 0.0,
    };

    pub fn new(kx: f64, ky: f64, kz: f64) -> Self {
        Self { kx, ky, kz }
    }

    pub fn to_vec3(&self) -> Vec3 {
        Vec3::new(self.kx, self.ky, self.kz)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.kx, self.ky, self.kz]
    }

    pub fn from_array(k: [f64; 3]) -> Self {
        Self::new(k[0], k[1], k[2])
    }

    pub fn norm_squared(&self) -> f64 {
        self.kx * self.kx + self.ky * self.ky + self.kz * self.kz
    }

    pub fn is_finite(&self) -> bool {
        self.kx.is_finite() && self.ky.is_finite() && self.kz.is_finite()
    }
}
