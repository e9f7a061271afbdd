//! Fourier-side operators on the periodic grid: differentiation, the
//! periodic Hilbert transform and the half Laplacian.
//!
//! Conventions: the Hilbert transform has symbol -i*sgn(k) with the mean mode
//! and the Nyquist mode set to zero; d/dalpha has symbol ik with the Nyquist
//! mode zeroed; the half Laplacian has symbol |k|^{1/2} with the Nyquist mode
//! zeroed. With these choices H(H f) = -(f - mean f) and the composition of
//! two half Laplacians equals d_alpha H exactly at the symbol level.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub struct SpectralOps {
    pub n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl SpectralOps {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        SpectralOps { n, fwd, inv }
    }

    fn fft(&self, f: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.fwd.process(&mut buf);
        buf
    }

    fn ifft_real(&self, mut buf: Vec<Complex64>) -> Vec<f64> {
        self.inv.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    /// Signed frequency of bin j; the Nyquist bin reports n/2.
    #[inline]
    fn freq(&self, j: usize) -> i64 {
        let n = self.n as i64;
        let j = j as i64;
        if j <= n / 2 {
            j
        } else {
            j - n
        }
    }

    pub fn mean(&self, f: &[f64]) -> f64 {
        f.iter().sum::<f64>() / f.len() as f64
    }

    /// Spectral d/dalpha with the Nyquist mode zeroed.
    pub fn deriv_alpha(&self, f: &[f64]) -> Vec<f64> {
        let mut hat = self.fft(f);
        let n = self.n;
        for j in 0..n {
            let k = self.freq(j);
            if k.unsigned_abs() as usize * 2 == n {
                hat[j] = Complex64::new(0.0, 0.0);
            } else {
                hat[j] *= Complex64::new(0.0, k as f64);
            }
        }
        self.ifft_real(hat)
    }

    /// Periodic Hilbert transform, symbol -i*sgn(k), zero on mean and Nyquist.
    pub fn hilbert(&self, f: &[f64]) -> Vec<f64> {
        let mut hat = self.fft(f);
        let n = self.n;
        for j in 0..n {
            let k = self.freq(j);
            if k == 0 || k.unsigned_abs() as usize * 2 == n {
                hat[j] = Complex64::new(0.0, 0.0);
            } else {
                let s = if k > 0 { 1.0 } else { -1.0 };
                hat[j] *= Complex64::new(0.0, -s);
            }
        }
        self.ifft_real(hat)
    }

    /// Half Laplacian, symbol |k|^{1/2} (unit constant), zero on Nyquist.
    pub fn frac_laplacian_half(&self, f: &[f64]) -> Vec<f64> {
        let mut hat = self.fft(f);
        let n = self.n;
        for j in 0..n {
            let k = self.freq(j);
            if k.unsigned_abs() as usize * 2 == n {
                hat[j] = Complex64::new(0.0, 0.0);
            } else {
                hat[j] *= (k.abs() as f64).sqrt();
            }
        }
        self.ifft_real(hat)
    }

    /// Spectral antiderivative with zero mean output; the mean mode of the
    /// input is dropped (the caller fixes constants of integration).
    pub fn antideriv_alpha(&self, f: &[f64]) -> Vec<f64> {
        let mut hat = self.fft(f);
        let n = self.n;
        for j in 0..n {
            let k = self.freq(j);
            if k == 0 || k.unsigned_abs() as usize * 2 == n {
                hat[j] = Complex64::new(0.0, 0.0);
            } else {
                hat[j] /= Complex64::new(0.0, k as f64);
            }
        }
        self.ifft_real(hat)
    }

    pub fn deriv_alpha_complex(&self, f: &[Complex64]) -> Vec<Complex64> {
        let re: Vec<f64> = f.iter().map(|c| c.re).collect();
        let im: Vec<f64> = f.iter().map(|c| c.im).collect();
        let dre = self.deriv_alpha(&re);
        let dim = self.deriv_alpha(&im);
        dre.into_iter()
            .zip(dim)
            .map(|(a, b)| Complex64::new(a, b))
            .collect()
    }

    pub fn hilbert_complex(&self, f: &[Complex64]) -> Vec<Complex64> {
        let re: Vec<f64> = f.iter().map(|c| c.re).collect();
        let im: Vec<f64> = f.iter().map(|c| c.im).collect();
        let hre = self.hilbert(&re);
        let him = self.hilbert(&im);
        hre.into_iter()
            .zip(him)
            .map(|(a, b)| Complex64::new(a, b))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid_alpha(n: usize) -> Vec<f64> {
        (0..n).map(|j| -PI + 2.0 * PI * j as f64 / n as f64).collect()
    }

    #[test]
    fn hilbert_of_cos_is_sin() {
        let n = 256;
        let ops = SpectralOps::new(n);
        let a = grid_alpha(n);
        let f: Vec<f64> = a.iter().map(|&x| x.cos()).collect();
        let hf = ops.hilbert(&f);
        for (j, &x) in a.iter().enumerate() {
            assert!((hf[j] - x.sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn hilbert_of_constant_vanishes() {
        let ops = SpectralOps::new(64);
        let hf = ops.hilbert(&vec![2.5; 64]);
        assert!(hf.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn hilbert_squared_is_minus_identity_plus_mean() {
        let n = 256;
        let ops = SpectralOps::new(n);
        let a = grid_alpha(n);
        let f: Vec<f64> = a.iter().map(|&x| (x.sin()).exp() + 0.5 * (3.0 * x).cos()).collect();
        let hhf = ops.hilbert(&ops.hilbert(&f));
        let mean = ops.mean(&f);
        for j in 0..n {
            assert!((hhf[j] + (f[j] - mean)).abs() < 1e-12);
        }
    }

    #[test]
    fn half_laplacian_symbol_and_composition() {
        let n = 128;
        let ops = SpectralOps::new(n);
        let a = grid_alpha(n);
        // real and imaginary parts of e^{2 i alpha} scale by sqrt(2)
        let f: Vec<f64> = a.iter().map(|&x| (2.0 * x).cos()).collect();
        let lf = ops.frac_laplacian_half(&f);
        for j in 0..n {
            assert!((lf[j] - 2f64.sqrt() * f[j]).abs() < 1e-12);
        }
        // constants are annihilated
        let lc = ops.frac_laplacian_half(&vec![1.0; n]);
        assert!(lc.iter().all(|v| v.abs() < 1e-13));
        // composition equals d_alpha H on a generic smooth field
        let g: Vec<f64> = a.iter().map(|&x| (x.cos()).exp() * (2.0 * x).sin()).collect();
        let ll = ops.frac_laplacian_half(&ops.frac_laplacian_half(&g));
        let dh = ops.deriv_alpha(&ops.hilbert(&g));
        for j in 0..n {
            assert!((ll[j] - dh[j]).abs() < 1e-11);
        }
    }

    #[test]
    fn deriv_matches_analytic() {
        let n = 128;
        let ops = SpectralOps::new(n);
        let a = grid_alpha(n);
        let f: Vec<f64> = a.iter().map(|&x| (3.0 * x).sin()).collect();
        let df = ops.deriv_alpha(&f);
        for (j, &x) in a.iter().enumerate() {
            assert!((df[j] - 3.0 * (3.0 * x).cos()).abs() < 1e-11);
        }
    }

    #[test]
    fn antideriv_inverts_deriv_up_to_mean() {
        let n = 128;
        let ops = SpectralOps::new(n);
        let a = grid_alpha(n);
        let f: Vec<f64> = a.iter().map(|&x| (2.0 * x).cos() + 0.3 * (5.0 * x).sin()).collect();
        let g = ops.antideriv_alpha(&ops.deriv_alpha(&f));
        let mean = ops.mean(&f);
        for j in 0..n {
            assert!((g[j] - (f[j] - mean)).abs() < 1e-12);
        }
    }
}
