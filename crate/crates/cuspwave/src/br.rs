//! The principal-value Birkhoff-Rott integral and its corrected variants.
//!
//! The principal value is discretized by the alternating-node trapezoid rule:
//! the target node is skipped and the opposite-parity nodes carry weight 2h.
//! For smooth periodic integrands on non-degenerate curves the rule is
//! spectrally accurate; accuracy near the tips relies on the vorticity zeros
//! there rather than on kernel subtraction.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{CuspError, Result};
use crate::grid::Grid;
use crate::spectral::SpectralOps;
use crate::state::InterfaceState;

const PV_CLOSE: f64 = 1e-14;

/// pv sum of g(alpha')/(z(alpha) - z(alpha')) over alternating nodes with
/// weight 2h; `g` carries the full integrand sample (measure absorbed).
/// No 1/(2 pi i) prefactor.
pub fn cauchy_pv_raw(z: &[Complex64], g: &[Complex64], grid: &Grid) -> Result<Vec<Complex64>> {
    let n = grid.n;
    let w2h = 2.0 * grid.h;
    let rows: Vec<Result<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            let start = (i + 1) % 2;
            let mut j = start;
            while j < n {
                if (j + i) % 2 == 1 {
                    let d = z[i] - z[j];
                    let dn = d.norm();
                    if dn < PV_CLOSE {
                        if g[j].norm() < PV_CLOSE {
                            j += 2;
                            continue;
                        }
                        return Err(CuspError::SingularCurve(format!(
                            "|z({i}) - z({j})| = {dn:.3e} below resolution"
                        )));
                    }
                    acc += g[j] / d;
                }
                j += 2;
            }
            Ok(acc * w2h)
        })
        .collect();
    rows.into_iter().collect()
}

/// Conjugate Birkhoff-Rott velocity at every node:
/// (1/2 pi i) pv int w(alpha')/(z - z') ds'.
pub fn birkhoff_rott_star(
    z: &[Complex64],
    w: &[f64],
    state: &InterfaceState,
    grid: &Grid,
) -> Result<Vec<Complex64>> {
    let g: Vec<Complex64> = w
        .iter()
        .zip(&state.loglen)
        .map(|(&wj, &g)| Complex64::new(wj * g.exp(), 0.0))
        .collect();
    let raw = cauchy_pv_raw(z, &g, grid)?;
    let pref = Complex64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI));
    Ok(raw.into_iter().map(|v| pref * v).collect())
}

/// Same quadrature with a complex density.
pub fn birkhoff_rott_star_complex(
    z: &[Complex64],
    w: &[Complex64],
    state: &InterfaceState,
    grid: &Grid,
) -> Result<Vec<Complex64>> {
    let g: Vec<Complex64> = w
        .iter()
        .zip(&state.loglen)
        .map(|(&wj, &g)| wj * g.exp())
        .collect();
    let raw = cauchy_pv_raw(z, &g, grid)?;
    let pref = Complex64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI));
    Ok(raw.into_iter().map(|v| pref * v).collect())
}

/// Moment b_i(w) = (1/2 pi i) int w / z^{i+1} ds by the full trapezoid rule.
/// The singular nodes are skipped when the density vanishes there.
pub fn br_moment(
    z: &[Complex64],
    w: &[f64],
    state: &InterfaceState,
    grid: &Grid,
    order: usize,
) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..grid.n {
        let zn = z[j].norm();
        let wj = w[j];
        if zn < PV_CLOSE {
            if wj.abs() < PV_CLOSE {
                continue;
            }
            return Err(CuspError::NonFinite(format!(
                "moment integrand blows up at node {j}"
            )));
        }
        let den = z[j].powu(order as u32 + 1);
        let term = Complex64::new(wj * state.loglen[j].exp() * grid.h, 0.0) / den;
        if !term.re.is_finite() || !term.im.is_finite() {
            return Err(CuspError::NonFinite(format!("moment term at node {j}")));
        }
        acc += term;
    }
    Ok(acc * Complex64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI)))
}

/// Moment with positive powers: (1/2 pi i) int z^i w ds.
pub fn br_moment_positive(
    z: &[Complex64],
    w: &[f64],
    state: &InterfaceState,
    grid: &Grid,
    order: usize,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..grid.n {
        acc += z[j].powu(order as u32) * w[j] * state.loglen[j].exp() * grid.h;
    }
    acc * Complex64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI))
}

/// Corrected integrals in closed form. Negative k gives the variant bounded
/// on stronger weights (density divided by z'^{|k|}, result multiplied by
/// z^{|k|}); positive k the opposite. At the singular nodes the closed form
/// for positive k is replaced by the additive form.
pub fn br_corrected_closed(
    z: &[Complex64],
    w: &[f64],
    state: &InterfaceState,
    grid: &Grid,
    k: i32,
) -> Result<Vec<Complex64>> {
    assert!(k != 0);
    let p = k.unsigned_abs();
    if k < 0 {
        let g: Vec<Complex64> = (0..grid.n)
            .map(|j| {
                let zn = z[j].norm();
                if zn < PV_CLOSE {
                    Complex64::new(0.0, 0.0) // density must vanish there
                } else {
                    Complex64::new(w[j] * state.loglen[j].exp(), 0.0) / z[j].powu(p)
                }
            })
            .collect();
        let raw = cauchy_pv_raw(z, &g, grid)?;
        let pref = Complex64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI));
        Ok((0..grid.n).map(|i| pref * z[i].powu(p) * raw[i]).collect())
    } else {
        let g: Vec<Complex64> = (0..grid.n)
            .map(|j| z[j].powu(p) * w[j] * state.loglen[j].exp())
            .collect();
        let raw = cauchy_pv_raw(z, &g, grid)?;
        let pref = Complex64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI));
        let additive = br_corrected_additive(z, w, state, grid, k)?;
        Ok((0..grid.n)
            .map(|i| {
                if z[i].norm() < PV_CLOSE {
                    additive[i]
                } else {
                    pref * raw[i] / z[i].powu(p)
                }
            })
            .collect())
    }
}

/// Corrected integrals as plain Birkhoff-Rott plus moment corrections.
pub fn br_corrected_additive(
    z: &[Complex64],
    w: &[f64],
    state: &InterfaceState,
    grid: &Grid,
    k: i32,
) -> Result<Vec<Complex64>> {
    assert!(k != 0);
    let base = birkhoff_rott_star(z, w, state, grid)?;
    let p = k.unsigned_abs() as usize;
    if k < 0 {
        let moments: Vec<Complex64> = (0..p)
            .map(|i| br_moment(z, w, state, grid, i))
            .collect::<Result<_>>()?;
        Ok((0..grid.n)
            .map(|i| {
                let mut v = base[i];
                for (ord, &b) in moments.iter().enumerate() {
                    v += z[i].powu(ord as u32) * b;
                }
                v
            })
            .collect())
    } else {
        let moments: Vec<Complex64> = (0..p)
            .map(|i| br_moment_positive(z, w, state, grid, i))
            .collect();
        Ok((0..grid.n)
            .map(|i| {
                let mut v = base[i];
                if z[i].norm() >= PV_CLOSE {
                    for (ord, &b) in moments.iter().enumerate() {
                        v -= b / z[i].powu(ord as u32 + 1);
                    }
                }
                v
            })
            .collect())
    }
}

/// D_s f = d/ds (f / z_s) computed as e^{-i theta} (f_s - i theta_s f), so no
/// jump-carrying product is differentiated spectrally.
pub fn d_s_complex(
    f: &[Complex64],
    state: &InterfaceState,
    grid: &Grid,
    ops: &SpectralOps,
) -> Vec<Complex64> {
    let fs = {
        let d = ops.deriv_alpha_complex(f);
        d.iter()
            .zip(&state.loglen)
            .map(|(&v, &g)| v * (-g).exp())
            .collect::<Vec<_>>()
    };
    let ts = state.theta_s(grid, ops);
    (0..grid.n)
        .map(|j| {
            let phase = Complex64::from_polar(1.0, -state.theta[j]);
            phase * (fs[j] - Complex64::new(0.0, ts[j]) * f[j])
        })
        .collect()
}

pub fn d_s_real(
    f: &[f64],
    state: &InterfaceState,
    grid: &Grid,
    ops: &SpectralOps,
) -> Vec<Complex64> {
    let fc: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    d_s_complex(&fc, state, grid, ops)
}

/// Cancellation combination: (f/2z_s + BR(z,f)*) i z_alpha minus the Hilbert
/// transform of (f/2z_s + BR(z,f)*) z_alpha. One weighted order smoother than
/// either term separately.
pub fn cancellation_a(
    z: &[Complex64],
    f: &[f64],
    state: &InterfaceState,
    grid: &Grid,
    ops: &SpectralOps,
) -> Result<Vec<Complex64>> {
    let br = birkhoff_rott_star(z, f, state, grid)?;
    let zs = state.z_s();
    let za = state.z_alpha();
    let core: Vec<Complex64> = (0..grid.n)
        .map(|j| Complex64::new(0.5 * f[j], 0.0) / zs[j] + br[j])
        .collect();
    let prod: Vec<Complex64> = (0..grid.n).map(|j| core[j] * za[j]).collect();
    let hprod = ops.hilbert_complex(&prod);
    Ok((0..grid.n)
        .map(|j| core[j] * Complex64::new(0.0, 1.0) * za[j] - hprod[j])
        .collect())
}

/// Dense principal-value quadrature weights (no 1/2 pi i prefactor):
/// row i maps a density w to pv int w/(z_i - z') ds'.
pub struct BrKernelMatrix {
    pub n: usize,
    /// Row-major complex weights.
    pub entries: Vec<Complex64>,
    pub diagonal_rule: &'static str,
}

impl BrKernelMatrix {
    pub fn assemble(z: &[Complex64], state: &InterfaceState, grid: &Grid) -> Result<Self> {
        let n = grid.n;
        let w2h = 2.0 * grid.h;
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        let rows: Vec<Result<Vec<Complex64>>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![Complex64::new(0.0, 0.0); n];
                for j in 0..n {
                    if (i + j) % 2 == 1 {
                        let d = z[i] - z[j];
                        if d.norm() < PV_CLOSE {
                            // the weight is finite only because admissible
                            // densities vanish there; keep zero and let the
                            // apply-side guard take care of misuse
                            continue;
                        }
                        row[j] = Complex64::new(w2h * state.loglen[j].exp(), 0.0) / d;
                    }
                }
                Ok(row)
            })
            .collect();
        for (i, r) in rows.into_iter().enumerate() {
            let r = r?;
            entries[i * n..(i + 1) * n].copy_from_slice(&r);
        }
        Ok(BrKernelMatrix {
            n,
            entries,
            diagonal_rule: "alternating-node trapezoid, weight 2h, diagonal skipped",
        })
    }

    pub fn apply(&self, w: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| {
                let row = &self.entries[i * self.n..(i + 1) * self.n];
                row.iter().zip(w).map(|(a, b)| a * b).sum()
            })
            .collect()
    }
}
