//! Interface state in the tangent-angle formulation and the reconstruction
//! of physical positions.
//!
//! The tangent angle is stored as a continuous lift
//! `theta = theta_base + nu*J + psi` where `theta_base(alpha) = alpha + 3pi/2`
//! carries the affine part of the symmetry relations, `J` is the piecewise
//! linear jump compensator (corner mode, jump 2*nu at each singular value)
//! and `psi` is periodic, continuous and odd under both reflections.

use num_complex::Complex64;

use crate::error::{CuspError, Result};
use crate::grid::{
    project_symmetry, sawtooth_j, sawtooth_j_slope, theta_base, Grid, ALPHA_STAR,
};
use crate::spectral::SpectralOps;

#[derive(Debug, Clone)]
pub struct InterfaceState {
    /// Tangent angle, continuous lift (includes base and jump parts).
    pub theta: Vec<f64>,
    /// log |z_alpha|.
    pub loglen: Vec<f64>,
    /// Vorticity amplitude, odd w.r.t. both axes.
    pub omega: Vec<f64>,
    /// Evolved stretching rate (regularized systems); zero otherwise.
    pub phi_s: Vec<f64>,
    /// Auxiliary evolved field of the mollified system; zero otherwise.
    pub big_phi_s: Vec<f64>,
    /// Half-opening angle at the tip; 0 in cusp mode.
    pub nu: f64,
}

impl InterfaceState {
    pub fn zeros(n: usize) -> Self {
        InterfaceState {
            theta: vec![0.0; n],
            loglen: vec![0.0; n],
            omega: vec![0.0; n],
            phi_s: vec![0.0; n],
            big_phi_s: vec![0.0; n],
            nu: 0.0,
        }
    }

    /// The periodic odd/odd part of the tangent angle.
    pub fn psi(&self, grid: &Grid) -> Vec<f64> {
        grid.alpha
            .iter()
            .zip(&self.theta)
            .map(|(&a, &t)| t - theta_base(a) - self.nu * sawtooth_j(a))
            .collect()
    }

    pub fn metric(&self) -> Vec<f64> {
        self.loglen.iter().map(|&g| g.exp()).collect()
    }

    /// Arclength weights |z_alpha| * h for the trapezoid rule.
    pub fn ds_weights(&self, grid: &Grid) -> Vec<f64> {
        self.loglen.iter().map(|&g| g.exp() * grid.h).collect()
    }

    /// z_alpha = |z_alpha| e^{i theta}.
    pub fn z_alpha(&self) -> Vec<Complex64> {
        self.loglen
            .iter()
            .zip(&self.theta)
            .map(|(&g, &t)| Complex64::from_polar(g.exp(), t))
            .collect()
    }

    /// Unit tangent z_s = e^{i theta}.
    pub fn z_s(&self) -> Vec<Complex64> {
        self.theta
            .iter()
            .map(|&t| Complex64::from_polar(1.0, t))
            .collect()
    }

    /// d theta / d alpha: spectral derivative of the periodic part plus the
    /// analytic derivative of the base and jump parts. At the singular nodes
    /// the jump contribution uses the interior slope.
    pub fn theta_alpha(&self, grid: &Grid, ops: &SpectralOps) -> Vec<f64> {
        let psi = self.psi(grid);
        let dpsi = ops.deriv_alpha(&psi);
        dpsi.iter()
            .map(|&d| d + 1.0 + self.nu * sawtooth_j_slope())
            .collect()
    }

    /// theta_s = theta_alpha / |z_alpha|.
    pub fn theta_s(&self, grid: &Grid, ops: &SpectralOps) -> Vec<f64> {
        let ta = self.theta_alpha(grid, ops);
        ta.iter()
            .zip(&self.loglen)
            .map(|(&d, &g)| d * (-g).exp())
            .collect()
    }

    /// Arclength derivative of a smooth periodic nodal field.
    pub fn d_s(&self, ops: &SpectralOps, f: &[f64]) -> Vec<f64> {
        let df = ops.deriv_alpha(f);
        df.iter()
            .zip(&self.loglen)
            .map(|(&d, &g)| d * (-g).exp())
            .collect()
    }

    /// Repeated arclength derivatives: [f, d_s f, ..., d_s^k f].
    pub fn d_s_tower(&self, ops: &SpectralOps, f: &[f64], k: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(k + 1);
        out.push(f.to_vec());
        for j in 0..k {
            let next = self.d_s(ops, &out[j]);
            out.push(next);
        }
        out
    }

    /// One-sided limits of theta at alpha_*: (below, above).
    pub fn theta_at_tip(&self, grid: &Grid) -> (f64, f64) {
        let t_mid = self.theta[grid.istar_plus];
        (t_mid - self.nu, t_mid + self.nu)
    }

    /// Re-project all evolved fields onto their parity classes. The tangent
    /// angle is projected through its periodic odd/odd part.
    pub fn project_symmetries(&mut self, grid: &Grid) {
        let psi = self.psi(grid);
        let psi_p = project_symmetry(grid, &psi, -1, -1);
        for (j, t) in self.theta.iter_mut().enumerate() {
            *t = theta_base(grid.alpha[j]) + self.nu * sawtooth_j(grid.alpha[j]) + psi_p[j];
        }
        self.loglen = project_symmetry(grid, &self.loglen, 1, 1);
        self.omega = project_symmetry(grid, &self.omega, -1, -1);
        self.phi_s = project_symmetry(grid, &self.phi_s, 1, 1);
        self.big_phi_s = project_symmetry(grid, &self.big_phi_s, 1, 1);
    }

    pub fn max_abs(&self) -> f64 {
        let fields = [&self.theta, &self.loglen, &self.omega, &self.phi_s, &self.big_phi_s];
        fields
            .iter()
            .flat_map(|f| f.iter())
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        let fields = [&self.theta, &self.loglen, &self.omega, &self.phi_s, &self.big_phi_s];
        fields.iter().all(|f| f.iter().all(|v| v.is_finite()))
    }
}

/// Integrand of the position reconstruction with one-sided tip values:
/// w = |z_alpha| e^{i theta} with theta taken from the side `above_tip`.
fn integrand_one_sided(state: &InterfaceState, grid: &Grid, j: usize, above: bool) -> Complex64 {
    let mut t = state.theta[j];
    if grid.is_tip(j) {
        t += if above { state.nu } else { -state.nu };
    }
    Complex64::from_polar(state.loglen[j].exp(), t)
}

/// Cumulative integral of uniformly sampled values by integrating the local
/// cubic interpolant on each interval; fourth order at every node.
fn cumulative_cubic(f: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = f.len();
    assert!(n >= 4);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n - 1 {
        let seg = if j == 0 {
            (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]) / 24.0
        } else if j == n - 2 {
            (9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4]) / 24.0
        } else {
            (-f[j - 1] + 13.0 * f[j] + 13.0 * f[j + 1] - f[j + 2]) / 24.0
        };
        acc += seg * h;
        out[j + 1] = acc;
    }
    out
}

/// Reconstruct positions from (theta, log|z_alpha|) with z(alpha_*) = 0.
///
/// Cusp mode uses the Fourier antiderivative of the periodic integrand, so
/// the quadrature is spectrally accurate for smooth profiles. Corner mode
/// integrates arc by arc across the jump with a fourth-order cumulative rule
/// and one-sided integrand values at the tips.
pub fn reconstruct_z(state: &InterfaceState, grid: &Grid, ops: &SpectralOps) -> Vec<Complex64> {
    let n = grid.n;
    if state.nu == 0.0 {
        let w = state.z_alpha();
        let wre: Vec<f64> = w.iter().map(|c| c.re).collect();
        let wim: Vec<f64> = w.iter().map(|c| c.im).collect();
        let mean = Complex64::new(ops.mean(&wre), ops.mean(&wim));
        let pre = ops.antideriv_alpha(&wre);
        let pim = ops.antideriv_alpha(&wim);
        let istar = grid.istar_plus;
        let a_star = grid.alpha[istar];
        (0..n)
            .map(|j| {
                let prim = Complex64::new(pre[j] - pre[istar], pim[j] - pim[istar]);
                prim + mean * (grid.alpha[j] - a_star)
            })
            .collect()
    } else {
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        let ip = grid.istar_plus;
        let im = grid.istar_minus;
        // arc from alpha_* upward, wrapping through +-pi to -alpha_*
        let len_up = n / 2;
        let idx_up: Vec<usize> = (0..=len_up).map(|k| (ip + k) % n).collect();
        let mut w_up: Vec<Complex64> = idx_up
            .iter()
            .map(|&j| integrand_one_sided(state, grid, j, true))
            .collect();
        // the far endpoint is the lower tip approached from below
        let last = *idx_up.last().unwrap();
        w_up[len_up] = integrand_one_sided(state, grid, last, false);
        let cum_up = cumulative_cubic(&w_up, grid.h);
        for (k, &j) in idx_up.iter().enumerate() {
            z[j] = cum_up[k];
        }
        // arc from alpha_* downward to -alpha_*
        let len_dn = ip - im;
        let idx_dn: Vec<usize> = (0..=len_dn).map(|k| ip - k).collect();
        let mut w_dn: Vec<Complex64> = idx_dn
            .iter()
            .map(|&j| integrand_one_sided(state, grid, j, false))
            .collect();
        w_dn[len_dn] = integrand_one_sided(state, grid, im, true);
        let cum_dn = cumulative_cubic(&w_dn, grid.h);
        for (k, &j) in idx_dn.iter().enumerate() {
            if k > 0 && k < len_dn {
                z[j] = -cum_dn[k];
            }
        }
        // keep the upward value at the lower tip (closure defect is a monitor)
        z[ip] = Complex64::new(0.0, 0.0);
        z
    }
}

/// Arc-chord functional: sup over admissible node pairs of
/// |e^{i alpha} - e^{i beta}| / |z(alpha) - z(beta)| with diagonal value
/// 1/|z_alpha|. Pairs with one node within r of alpha_* and the other within
/// r of -alpha_* are excluded (there the two tips coincide by construction).
pub fn arc_chord(z: &[Complex64], state: &InterfaceState, grid: &Grid, r: f64) -> Result<f64> {
    assert!(r > 0.0 && r < std::f64::consts::FRAC_PI_4);
    let n = grid.n;
    let near_plus: Vec<bool> = grid
        .alpha
        .iter()
        .map(|&a| crate::grid::wrap_to_pi(a - ALPHA_STAR).abs() < r)
        .collect();
    let near_minus: Vec<bool> = grid
        .alpha
        .iter()
        .map(|&a| crate::grid::wrap_to_pi(a + ALPHA_STAR).abs() < r)
        .collect();
    let e: Vec<Complex64> = grid
        .alpha
        .iter()
        .map(|&a| Complex64::from_polar(1.0, a))
        .collect();
    let mut sup: f64 = 0.0;
    for i in 0..n {
        sup = sup.max((-state.loglen[i]).exp());
        for j in (i + 1)..n {
            let excluded = (near_plus[i] && near_minus[j]) || (near_minus[i] && near_plus[j]);
            if excluded {
                continue;
            }
            let denom = (z[i] - z[j]).norm();
            let numer = (e[i] - e[j]).norm();
            if denom == 0.0 {
                return Err(CuspError::NonFinite(format!(
                    "self-intersection: z({:.6}) = z({:.6})",
                    grid.alpha[i], grid.alpha[j]
                )));
            }
            let ratio = numer / denom;
            if !ratio.is_finite() {
                return Err(CuspError::NonFinite("arc-chord ratio overflow".into()));
            }
            sup = sup.max(ratio);
        }
    }
    Ok(sup)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TipMode {
    Cusp,
    Corner,
}

/// Interface norm combining the arc-chord functional with the lower bounds
/// on the tangent vector components near the tip. The singular nodes are
/// excluded from the sups (0/0 there).
pub fn interface_norm(
    state: &InterfaceState,
    z: &[Complex64],
    grid: &Grid,
    r: f64,
    mu: f64,
    mode: TipMode,
) -> Result<f64> {
    let f = arc_chord(z, state, grid, r)?;
    let za = state.z_alpha();
    let mut sup1: f64 = 0.0;
    let mut sup2: f64 = 0.0;
    for j in 0..grid.n {
        if grid.is_tip(j) || grid.tip_distance(j) >= r {
            continue;
        }
        let m = crate::grid::WeightFunction::eval(grid.alpha[j]);
        sup1 = sup1.max(1.0 / za[j].re.abs());
        let denom = za[j].im.abs();
        let s2 = match mode {
            TipMode::Cusp => m.powf(mu) / denom,
            TipMode::Corner => 1.0 / denom,
        };
        sup2 = sup2.max(s2);
    }
    let total = f + sup1 + sup2;
    if !total.is_finite() {
        return Err(CuspError::NonFinite("interface norm".into()));
    }
    Ok(total)
}
