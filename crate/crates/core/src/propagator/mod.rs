//! Strang split-step spectral evolution on a periodic box, used as an
//! independent check of the closed-form solutions.

mod checkpoint;
mod interp;
mod fft;

pub use checkpoint::{read_checkpoint, write_checkpoint};
pub use interp::SpectralInterpolant;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::consts::PhysicalConstants;
use crate::error::{invalid, Error, Result};
use crate::tracker::{Grid3, SampledField};
use fft::Fft3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Hamiltonian {
    Free,
    /// `V = mω²r²/2` about the origin.
    Harmonic { omega: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagatorConfig {
    /// Periodic box: node i sits at `origin + i·spacing`, and node `n`
    /// would coincide with node 0.
    pub grid: Grid3,
    pub dt: f64,
    pub steps: usize,
    pub hamiltonian: Hamiltonian,
    #[serde(default)]
    pub consts: PhysicalConstants,
}

/// Largest boundary-to-peak amplitude ratio accepted by [`evolve`].
pub const BOUNDARY_LIMIT: f64 = 1e-12;

/// True when `n` has no prime factors other than 2, 3 and 5.
pub fn is_fft_friendly(mut n: usize) -> bool {
    if n == 0 {
        return false;
    }
    for p in [2, 3, 5] {
        while n % p == 0 {
            n /= p;
        }
    }
    n == 1
}

impl PropagatorConfig {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.consts.validate()?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("dt", "must be positive"));
        }
        if let Some(&n) = self.grid.dims.iter().find(|&&n| !is_fft_friendly(n)) {
            return Err(invalid("grid.dims", format!("{n} is not a product of 2, 3 and 5")));
        }
        if let Hamiltonian::Harmonic { omega } = self.hamiltonian {
            if !(omega.is_finite() && omega > 0.0) {
                return Err(invalid("hamiltonian.omega", "must be positive"));
            }
        }
        Ok(())
    }

    /// Box edge lengths.
    pub fn box_lengths(&self) -> [f64; 3] {
        [0, 1, 2].map(|a| self.grid.dims[a] as f64 * self.grid.spacing[a])
    }

    /// Rejects boxes shorter than `factor · scale` along any axis.
    pub fn check_box(&self, scale: f64, factor: f64) -> Result<()> {
        let shortest = self.box_lengths().into_iter().fold(f64::INFINITY, f64::min);
        if shortest < factor * scale {
            return Err(invalid(
                "grid",
                format!("box length {shortest} is below {factor} × structure scale {scale}"),
            ));
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.steps as f64
    }
}

/// Discrete L2 norm `(Σ|ψ|² dV)^½`.
pub fn norm(f: &SampledField) -> f64 {
    let dv: f64 = f.grid.spacing.iter().product();
    (f.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * dv).sqrt()
}

/// `min_c ‖a − c·b‖ / ‖a‖` over complex `c`.
pub fn l2_relative_error(a: &SampledField, b: &SampledField) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    // Sequential sums keep the result independent of thread scheduling.
    let (mut ab, mut bb, mut aa) = (C64::new(0.0, 0.0), 0.0, 0.0);
    for (x, y) in a.values.iter().zip(&b.values) {
        ab += y.conj() * x;
        bb += y.norm_sqr();
        aa += x.norm_sqr();
    }
    if aa == 0.0 {
        return Ok(if bb == 0.0 { 0.0 } else { f64::INFINITY });
    }
    if bb == 0.0 {
        return Ok(1.0);
    }
    let c = ab / bb;
    let resid: f64 = a.values.iter().zip(&b.values).map(|(x, y)| (x - c * y).norm_sqr()).sum();
    Ok((resid / aa).sqrt())
}

/// Optimal `c` in `a ≈ c·b`.
pub fn best_multiplier(a: &SampledField, b: &SampledField) -> Result<C64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let ab: C64 = a.values.iter().zip(&b.values).map(|(x, y)| y.conj() * x).sum();
    let bb: f64 = b.values.iter().map(|y| y.norm_sqr()).sum();
    Ok(if bb > 0.0 { ab / bb } else { C64::new(0.0, 0.0) })
}

/// Largest |ψ| on the outer layer of nodes relative to the largest |ψ|.
pub fn boundary_ratio(f: &SampledField) -> f64 {
    let g = &f.grid;
    let peak = f.max_abs();
    if peak == 0.0 {
        return 0.0;
    }
    let edge = (0..g.len())
        .filter(|&i| {
            let n = g.node_of(i);
            (0..3).any(|a| n[a] == 0 || n[a] + 1 == g.dims[a])
        })
        .map(|i| f.values[i].norm())
        .fold(0.0, f64::max);
    edge / peak
}

/// Advance `initial` by `config.steps` Strang steps: half potential,
/// full kinetic in Fourier space, half potential.
pub fn evolve(initial: &SampledField, config: &PropagatorConfig) -> Result<SampledField> {
    config.validate()?;
    if initial.grid != config.grid {
        return Err(Error::GridMismatch);
    }
    let measured = boundary_ratio(initial);
    if !(measured < BOUNDARY_LIMIT) {
        return Err(Error::BoundaryDecay { measured, limit: BOUNDARY_LIMIT });
    }
    let mut psi = initial.values.clone();
    let time = initial.time + config.duration();
    if config.steps == 0 {
        return SampledField::new(initial.grid, psi, initial.time);
    }
    let g = config.grid;
    let c = config.consts;
    let fft = Fft3::new(g.dims);
    let kin = kinetic_phases(&g, &c, config.dt);
    let half_v = match config.hamiltonian {
        Hamiltonian::Free => None,
        Hamiltonian::Harmonic { omega } => Some(potential_phases(&g, &c, omega, config.dt / 2.0)),
    };
    for _ in 0..config.steps {
        if let Some(v) = &half_v {
            apply(&mut psi, v);
        }
        fft.forward(&mut psi);
        apply(&mut psi, &kin);
        fft.inverse(&mut psi);
        if let Some(v) = &half_v {
            apply(&mut psi, v);
        }
    }
    SampledField::new(g, psi, time)
}

fn apply(psi: &mut [C64], phase: &[C64]) {
    psi.par_iter_mut().zip(phase.par_iter()).for_each(|(p, f)| *p *= f);
}

/// Angular wave numbers in FFT order.
fn wave_numbers(n: usize, h: f64) -> Vec<f64> {
    let l = n as f64 * h;
    (0..n)
        .map(|i| {
            let m = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
            std::f64::consts::TAU * m / l
        })
        .collect()
}

fn kinetic_phases(g: &Grid3, c: &PhysicalConstants, dt: f64) -> Vec<C64> {
    let k: Vec<Vec<f64>> = (0..3).map(|a| wave_numbers(g.dims[a], g.spacing[a])).collect();
    let s = c.hbar * dt / (2.0 * c.mass);
    (0..g.len())
        .into_par_iter()
        .map(|i| {
            let n = g.node_of(i);
            let k2 = k[0][n[0]].powi(2) + k[1][n[1]].powi(2) + k[2][n[2]].powi(2);
            C64::from_polar(1.0, -s * k2)
        })
        .collect()
}

fn potential_phases(g: &Grid3, c: &PhysicalConstants, omega: f64, dt: f64) -> Vec<C64> {
    let s = 0.5 * c.mass * omega * omega * dt / c.hbar;
    (0..g.len())
        .into_par_iter()
        .map(|i| C64::from_polar(1.0, -s * g.point(g.node_of(i)).norm_squared()))
        .collect()
}
