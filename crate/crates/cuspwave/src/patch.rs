//! Local graph parametrization of the interface near the tip, and the change
//! of variables that sends the tip to infinity.
//!
//! Near the origin the curve splits into two branches x +- i kappa(x) with
//! kappa ~ |x|^{1+mu}. The map h solves h' = -rho(h) with rho = 2 kappa, so
//! h(tau) ~ (1+tau)^{-1/mu}; weighted estimates transported through h trade
//! the power weight m for mtilde(tau) = 1 + tau.

use crate::error::{CuspError, Result};
use crate::grid::Grid;
use crate::quad::{gl16, ls_slope};
use crate::spectral::SpectralOps;
use crate::state::{reconstruct_z, InterfaceState};

#[derive(Debug, Clone)]
enum PatchKind {
    /// kappa(x) = c |x|^{1+mu}
    Synthetic { c: f64 },
    /// monotone cubic interpolant of resampled branch heights
    Sampled { xs: Vec<f64>, ks: Vec<f64>, slopes: Vec<f64> },
}

/// Upper branch of the interface over (-2 delta_hat, 2 delta_hat).
#[derive(Debug, Clone)]
pub struct GraphPatch {
    pub delta_hat: f64,
    pub mu: f64,
    pub x: Vec<f64>,
    pub kappa: Vec<f64>,
    pub rho: Vec<f64>,
    kind: PatchKind,
}

impl GraphPatch {
    pub fn synthetic(mu: f64, c: f64, delta_hat: f64) -> Self {
        assert!(c > 0.0 && delta_hat > 0.0);
        let n = 257;
        let x: Vec<f64> = (0..n)
            .map(|j| -2.0 * delta_hat + 4.0 * delta_hat * j as f64 / (n - 1) as f64)
            .collect();
        let kappa: Vec<f64> = x.iter().map(|&v| c * v.abs().powf(1.0 + mu)).collect();
        let rho: Vec<f64> = kappa.iter().map(|&k| 2.0 * k).collect();
        GraphPatch {
            delta_hat,
            mu,
            x,
            kappa,
            rho,
            kind: PatchKind::Synthetic { c },
        }
    }

    /// Resample the upper branch of a cusp state near the tip. The window is
    /// chosen so that |x| < 2 delta_hat; the tangent must stay within the
    /// graph cone (no vertical tangents) there.
    pub fn from_state(
        state: &InterfaceState,
        grid: &Grid,
        ops: &SpectralOps,
        delta_hat: f64,
        mu: f64,
    ) -> Result<Self> {
        let z = reconstruct_z(state, grid, ops);
        // collect upper-branch nodes near the origin; the branch is a graph
        // over x when the tangent never turns vertical and x stays monotone
        // along the parameter on each near-tip arc
        let keep = |j: usize| -> bool {
            z[j].re.abs() < 2.0 * delta_hat && z[j].im > 1e-13 && !grid.is_tip(j)
        };
        let mut pairs: Vec<(f64, f64)> = Vec::new();
        let mut runs: Vec<Vec<usize>> = Vec::new();
        let mut j = 0;
        while j < grid.n {
            if keep(j) {
                let mut run = vec![j];
                let mut k = j + 1;
                while k < grid.n && keep(k) {
                    run.push(k);
                    k += 1;
                }
                runs.push(run);
                j = k;
            } else {
                j += 1;
            }
        }
        for run in &runs {
            let mut dir = 0.0;
            for w in run.windows(2) {
                let dx = z[w[1]].re - z[w[0]].re;
                if dx == 0.0 || (dir != 0.0 && dx.signum() != dir) {
                    return Err(CuspError::NotAGraph(format!(
                        "x not monotone along the branch near alpha = {:.4}",
                        grid.alpha[w[1]]
                    )));
                }
                dir = dx.signum();
            }
            for &jj in run {
                if state.theta[jj].cos().abs() < 0.02 {
                    return Err(CuspError::NotAGraph(format!(
                        "vertical tangent at alpha = {:.4}",
                        grid.alpha[jj]
                    )));
                }
                pairs.push((z[jj].re, z[jj].im));
            }
        }
        if pairs.len() < 8 {
            return Err(CuspError::NotAGraph(
                "too few branch samples in the requested window".into(),
            ));
        }
        pairs.push((0.0, 0.0));
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        pairs.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-14);
        if pairs.first().unwrap().0 > -1.5 * delta_hat || pairs.last().unwrap().0 < 1.5 * delta_hat
        {
            return Err(CuspError::NotAGraph(
                "branch does not span the requested window".into(),
            ));
        }
        let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let ks: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let slopes = monotone_slopes(&xs, &ks);
        let kind = PatchKind::Sampled {
            xs: xs.clone(),
            ks: ks.clone(),
            slopes,
        };
        // uniform resample for the public fields
        let n = 257;
        let xu: Vec<f64> = (0..n)
            .map(|j| -2.0 * delta_hat + 4.0 * delta_hat * j as f64 / (n - 1) as f64)
            .collect();
        let mut patch = GraphPatch {
            delta_hat,
            mu,
            x: xu.clone(),
            kappa: Vec::new(),
            rho: Vec::new(),
            kind,
        };
        patch.kappa = xu.iter().map(|&v| patch.kappa_at(v)).collect();
        patch.rho = patch.kappa.iter().map(|&k| 2.0 * k).collect();
        Ok(patch)
    }

    pub fn kappa_at(&self, x: f64) -> f64 {
        match &self.kind {
            PatchKind::Synthetic { c } => c * x.abs().powf(1.0 + self.mu),
            PatchKind::Sampled { xs, ks, slopes } => hermite_eval(xs, ks, slopes, x),
        }
    }

    pub fn kappa_prime_at(&self, x: f64) -> f64 {
        match &self.kind {
            PatchKind::Synthetic { c } => {
                c * (1.0 + self.mu) * x.abs().powf(self.mu) * x.signum()
            }
            PatchKind::Sampled { xs, ks, slopes } => hermite_deriv(xs, ks, slopes, x),
        }
    }

    pub fn kappa_pp_at(&self, x: f64) -> f64 {
        match &self.kind {
            PatchKind::Synthetic { c } => {
                c * (1.0 + self.mu) * self.mu * x.abs().powf(self.mu - 1.0)
            }
            PatchKind::Sampled { .. } => {
                let h = 1e-5 * self.delta_hat;
                (self.kappa_prime_at(x + h) - self.kappa_prime_at(x - h)) / (2.0 * h)
            }
        }
    }

    pub fn rho_at(&self, x: f64) -> f64 {
        2.0 * self.kappa_at(x)
    }

    pub fn rho_prime_at(&self, x: f64) -> f64 {
        2.0 * self.kappa_prime_at(x)
    }

    /// Least-squares exponent of kappa against |x|, fitted on the inner part
    /// of the patch where the tip behaviour dominates the smooth curvature.
    pub fn fitted_exponent(&self) -> f64 {
        let mut lx = Vec::new();
        let mut lk = Vec::new();
        for (&x, &k) in self.x.iter().zip(&self.kappa) {
            if x.abs() >= self.delta_hat / 20.0 && k > 0.0 && x.abs() <= self.delta_hat / 2.0 {
                lx.push(x.abs().ln());
                lk.push(k.ln());
            }
        }
        ls_slope(&lx, &lk)
    }
}

/// Fritsch-Carlson monotone cubic slopes.
fn monotone_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut d = vec![0.0; n - 1];
    for i in 0..n - 1 {
        d[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    }
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for i in 1..n - 1 {
        if d[i - 1] * d[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            m[i] = 0.5 * (d[i - 1] + d[i]);
        }
    }
    for i in 0..n - 1 {
        if d[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
        } else {
            let a = m[i] / d[i];
            let b = m[i + 1] / d[i];
            let s = a * a + b * b;
            if s > 9.0 {
                let t = 3.0 / s.sqrt();
                m[i] = t * a * d[i];
                m[i + 1] = t * b * d[i];
            }
        }
    }
    m
}

fn hermite_locate(xs: &[f64], x: f64) -> usize {
    match xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        Ok(i) => i.min(xs.len() - 2),
        Err(i) => i.clamp(1, xs.len() - 1) - 1,
    }
}

fn hermite_eval(xs: &[f64], ys: &[f64], ms: &[f64], x: f64) -> f64 {
    let i = hermite_locate(xs, x);
    let h = xs[i + 1] - xs[i];
    let t = (x - xs[i]) / h;
    let (t2, t3) = (t * t, t * t * t);
    ys[i] * (2.0 * t3 - 3.0 * t2 + 1.0)
        + ms[i] * h * (t3 - 2.0 * t2 + t)
        + ys[i + 1] * (-2.0 * t3 + 3.0 * t2)
        + ms[i + 1] * h * (t3 - t2)
}

fn hermite_deriv(xs: &[f64], ys: &[f64], ms: &[f64], x: f64) -> f64 {
    let i = hermite_locate(xs, x);
    let h = xs[i + 1] - xs[i];
    let t = (x - xs[i]) / h;
    let t2 = t * t;
    (ys[i] * (6.0 * t2 - 6.0 * t) / h)
        + ms[i] * (3.0 * t2 - 4.0 * t + 1.0)
        + ys[i + 1] * (-6.0 * t2 + 6.0 * t) / h
        + ms[i + 1] * (3.0 * t2 - 2.0 * t)
}

/// The change of variables h with h' = -rho(h), h(0) = 2 delta_hat, built by
/// quadrature of 1/rho and monotone inversion.
#[derive(Debug, Clone)]
pub struct HMap {
    pub tau: Vec<f64>,
    pub h: Vec<f64>,
    pub hprime: Vec<f64>,
    /// geometric u-grid and tabulated h^{-1}(u)
    u_table: Vec<f64>,
    hinv_table: Vec<f64>,
    patch: GraphPatch,
}

impl HMap {
    pub fn h_inv(&self, u: f64) -> f64 {
        assert!(u > 0.0 && u <= 2.0 * self.patch.delta_hat);
        // nearest table node below, then an exact correction integral
        let idx = match self
            .u_table
            .binary_search_by(|v| v.partial_cmp(&u).unwrap())
        {
            Ok(i) => i,
            Err(i) => i.clamp(1, self.u_table.len() - 1) - 1,
        };
        let u0 = self.u_table[idx];
        let base = self.hinv_table[idx];
        // integral from u to u0 of dv / rho(v), in log coordinates
        let corr = if (u - u0).abs() < 1e-300 {
            0.0
        } else {
            gl16(u.ln(), u0.ln(), |t| {
                let v = t.exp();
                v / self.patch.rho_at(v)
            })
        };
        base + corr
    }

    pub fn h_at(&self, tau: f64) -> f64 {
        assert!(tau >= 0.0);
        if tau == 0.0 {
            return 2.0 * self.patch.delta_hat;
        }
        // table bracket then Newton on h^{-1}(u) = tau
        let mut lo = 0usize;
        let mut hi = self.hinv_table.len() - 1;
        // hinv_table is decreasing in index? u_table increasing, hinv decreasing in u
        // find u with hinv(u) >= tau >= hinv(next)
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.hinv_table[mid] >= tau {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut u = 0.5 * (self.u_table[lo] + self.u_table[hi]);
        for _ in 0..60 {
            let g = self.h_inv(u) - tau;
            let du = g * self.patch.rho_at(u);
            let next = (u + du).clamp(
                self.u_table[0] * 0.5,
                2.0 * self.patch.delta_hat,
            );
            if (next - u).abs() <= 1e-16 * u {
                u = next;
                break;
            }
            u = next;
        }
        u
    }

    pub fn h_prime_at(&self, tau: f64) -> f64 {
        -self.patch.rho_at(self.h_at(tau))
    }

    pub fn h_pp_at(&self, tau: f64) -> f64 {
        let u = self.h_at(tau);
        self.patch.rho_prime_at(u) * self.patch.rho_at(u)
    }

    pub fn patch(&self) -> &GraphPatch {
        &self.patch
    }
}

pub fn build_h_map(patch: &GraphPatch, tau_max: f64, samples: usize) -> Result<HMap> {
    let dh2 = 2.0 * patch.delta_hat;
    // sanity: rho positive in the interior
    for &x in patch.x.iter().filter(|&&x| x > 1e-6 * dh2) {
        if patch.rho_at(x) <= 0.0 {
            return Err(CuspError::NonFinite(
                "rho vanishes in the interior of the patch".into(),
            ));
        }
    }
    // geometric u-grid from deep inside the cusp to the patch edge
    let u_min = dh2 * 1e-9;
    let levels = 2000usize;
    let mut u_table = Vec::with_capacity(levels + 1);
    for i in 0..=levels {
        let t = i as f64 / levels as f64;
        u_table.push(u_min * (dh2 / u_min).powf(t));
    }
    // cumulative integral of 1/rho from the top end downward
    let mut hinv_table = vec![0.0; u_table.len()];
    for i in (0..levels).rev() {
        let a = u_table[i];
        let b = u_table[i + 1];
        let seg = gl16(a.ln(), b.ln(), |t| {
            let v = t.exp();
            v / patch.rho_at(v)
        });
        hinv_table[i] = hinv_table[i + 1] + seg;
    }
    let mut map = HMap {
        tau: Vec::new(),
        h: Vec::new(),
        hprime: Vec::new(),
        u_table,
        hinv_table,
        patch: patch.clone(),
    };
    let mut tau = vec![0.0];
    let count = samples.max(8);
    for i in 1..count {
        let t = i as f64 / (count - 1) as f64;
        tau.push(tau_max * (((1.0 + tau_max).powf(t) - 1.0) / tau_max));
    }
    map.h = tau.iter().map(|&t| map.h_at(t)).collect();
    map.hprime = map.h.iter().map(|&u| -patch.rho_at(u)).collect();
    map.tau = tau;
    Ok(map)
}
