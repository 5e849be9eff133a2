use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// In-place 3D transform over an x-fastest array; the inverse is
/// normalised.
pub(crate) struct Fft3 {
    dims: [usize; 3],
    fwd: [Arc<dyn Fft<f64>>; 3],
    inv: [Arc<dyn Fft<f64>>; 3],
}

impl Fft3 {
    pub fn new(dims: [usize; 3]) -> Self {
        let mut p = FftPlanner::new();
        Self {
            dims,
            fwd: dims.map(|n| p.plan_fft_forward(n)),
            inv: dims.map(|n| p.plan_fft_inverse(n)),
        }
    }

    pub fn forward(&self, data: &mut [C64]) {
        for a in 0..3 {
            self.axis(data, &self.fwd[a], a);
        }
    }

    pub fn inverse(&self, data: &mut [C64]) {
        for a in 0..3 {
            self.axis(data, &self.inv[a], a);
        }
        let s = 1.0 / data.len() as f64;
        data.par_iter_mut().for_each(|z| *z *= s);
    }

    fn axis(&self, data: &mut [C64], fft: &Arc<dyn Fft<f64>>, axis: usize) {
        let [nx, ny, nz] = self.dims;
        match axis {
            0 => data.par_chunks_mut(nx * ny).for_each(|slab| {
                let mut scratch = vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
                fft.process_with_scratch(slab, &mut scratch);
            }),
            1 => data.par_chunks_mut(nx * ny).for_each(|slab| {
                // Gather columns so each y-line is contiguous.
                let mut buf = vec![C64::new(0.0, 0.0); nx * ny];
                for y in 0..ny {
                    for x in 0..nx {
                        buf[x * ny + y] = slab[x + nx * y];
                    }
                }
                let mut scratch = vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
                fft.process_with_scratch(&mut buf, &mut scratch);
                for y in 0..ny {
                    for x in 0..nx {
                        slab[x + nx * y] = buf[x * ny + y];
                    }
                }
            }),
            _ => {
                let plane = nx * ny;
                let lines: Vec<Vec<C64>> = (0..plane)
                    .into_par_iter()
                    .with_min_len(nx)
                    .map(|i| {
                        let mut line: Vec<C64> = (0..nz).map(|z| data[i + plane * z]).collect();
                        let mut scratch = vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
                        fft.process_with_scratch(&mut line, &mut scratch);
                        line
                    })
                    .collect();
                for (i, line) in lines.into_iter().enumerate() {
                    for (z, v) in line.into_iter().enumerate() {
                        data[i + plane * z] = v;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_single_mode() {
        let dims = [6, 4, 5];
        let n = 120;
        let f = Fft3::new(dims);
        let orig: Vec<C64> = (0..n).map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
        let mut d = orig.clone();
        f.forward(&mut d);
        f.inverse(&mut d);
        for (a, b) in d.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
        // exp(2πi(x/6 + 2y/4 + 3z/5)) transforms to a single spike.
        let mut d: Vec<C64> = (0..n)
            .map(|i| {
                let (x, y, z) = (i % 6, (i / 6) % 4, i / 24);
                let ph = std::f64::consts::TAU * (x as f64 / 6.0 + 2.0 * y as f64 / 4.0 + 3.0 * z as f64 / 5.0);
                C64::from_polar(1.0, ph)
            })
            .collect();
        f.forward(&mut d);
        let spike = 1 + 6 * (2 + 4 * 3);
        for (i, v) in d.iter().enumerate() {
            let want = if i == spike { n as f64 } else { 0.0 };
            assert!((v - C64::new(want, 0.0)).norm() < 1e-9, "{i} {v}");
        }
    }
}
