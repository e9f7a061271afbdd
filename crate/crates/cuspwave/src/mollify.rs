//! Convolution mollifiers: the cutoff pair B_delta / B_delta^*, their
//! self-adjoint composition, and the variable-step operator whose averaging
//! window shrinks linearly toward the singular values so growth rates m^lambda
//! are preserved.

use crate::error::{CuspError, Result};
use crate::grid::{wrap_to_pi, Grid, ALPHA_STAR};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MollifierKind {
    /// phi_delta * ((1 - chi) f)
    Fixed,
    /// (1 - chi) (phi_delta * f)
    Adjoint,
    /// composition of the previous two; self-adjoint
    Symmetric,
    /// variable step delta * eta(alpha)
    Varstep,
}

#[derive(Debug, Clone, Copy)]
pub struct MollifierSpec {
    pub delta: f64,
    pub kind: MollifierKind,
}

impl MollifierSpec {
    pub fn new(delta: f64, kind: MollifierKind) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(CuspError::Window(format!("delta = {delta} must lie in (0, 1)")));
        }
        Ok(MollifierSpec { delta, kind })
    }

    pub fn cutoff_radius(&self) -> f64 {
        2.0 * self.delta
    }
}

/// The standard bump, scaled to [-1, 1].
fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

/// Smooth transition: 1 for t <= 0, 0 for t >= 1.
fn smoothstep_down(t: f64) -> f64 {
    if t <= 0.0 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let e1 = (-1.0 / t).exp();
        let e2 = (-1.0 / (1.0 - t)).exp();
        e2 / (e1 + e2)
    }
}

/// Cutoff equal to 1 within 2 delta of either singular value, 0 beyond 4 delta.
pub fn chi_cutoff(alpha: f64, delta: f64) -> f64 {
    let d1 = wrap_to_pi(alpha - ALPHA_STAR).abs();
    let d2 = wrap_to_pi(alpha + ALPHA_STAR).abs();
    let d = d1.min(d2);
    smoothstep_down((d - 2.0 * delta) / (2.0 * delta))
}

/// Step profile of the variable-step operator: the periodic extension of
/// ||alpha| - alpha_*| smoothly saturated near 0 and +-pi so that it never
/// exceeds the distance to the nearest singular value.
pub fn eta(alpha: f64) -> f64 {
    let a = wrap_to_pi(alpha);
    let d = (a.abs() - ALPHA_STAR).abs();
    // soft minimum with the cap keeps eta <= d and smooths the kinks at 0, pi
    let cap = 1.2;
    let k = 40.0;
    -(1.0 / k) * ((-k * d).exp() + (-k * cap).exp()).ln()
}

/// Discrete periodic convolution with the bump of width delta, normalized so
/// that a constant maps to itself exactly.
fn convolve_bump(f: &[f64], delta: f64, grid: &Grid) -> Vec<f64> {
    let half = (delta / grid.h).ceil() as i64;
    let mut w = Vec::with_capacity((2 * half + 1) as usize);
    for l in -half..=half {
        w.push(bump(l as f64 * grid.h / delta));
    }
    let total: f64 = w.iter().sum();
    let n = grid.n as i64;
    (0..grid.n)
        .map(|i| {
            let mut acc = 0.0;
            for (idx, l) in (-half..=half).enumerate() {
                let j = ((i as i64 - l) % n + n) % n;
                acc += w[idx] * f[j as usize];
            }
            acc / total
        })
        .collect()
}

/// Linear interpolation of a periodic nodal field at an arbitrary parameter.
fn interp_periodic(f: &[f64], grid: &Grid, alpha: f64) -> f64 {
    let n = grid.n as f64;
    let t = (alpha - grid.alpha[0]) / grid.h;
    let j0 = t.floor();
    let frac = t - j0;
    let j = (j0 as i64).rem_euclid(grid.n as i64) as usize;
    let jp = (j + 1) % grid.n;
    let _ = n;
    (1.0 - frac) * f[j] + frac * f[jp]
}

/// Apply a mollifier to a nodal field.
pub fn mollify(f: &[f64], spec: &MollifierSpec, grid: &Grid) -> Vec<f64> {
    match spec.kind {
        MollifierKind::Fixed => {
            let cut: Vec<f64> = (0..grid.n)
                .map(|j| (1.0 - chi_cutoff(grid.alpha[j], spec.delta)) * f[j])
                .collect();
            convolve_bump(&cut, spec.delta, grid)
        }
        MollifierKind::Adjoint => {
            let conv = convolve_bump(f, spec.delta, grid);
            (0..grid.n)
                .map(|j| (1.0 - chi_cutoff(grid.alpha[j], spec.delta)) * conv[j])
                .collect()
        }
        MollifierKind::Symmetric => {
            let b = mollify(f, &MollifierSpec { delta: spec.delta, kind: MollifierKind::Fixed }, grid);
            mollify(&b, &MollifierSpec { delta: spec.delta, kind: MollifierKind::Adjoint }, grid)
        }
        MollifierKind::Varstep => {
            // fixed quadrature in the scaled variable; discrete normalization
            // keeps constants exact
            let q = 33usize;
            let ds = 2.0 / q as f64;
            let s: Vec<f64> = (0..q).map(|l| -1.0 + (l as f64 + 0.5) * ds).collect();
            let w: Vec<f64> = s.iter().map(|&x| bump(x)).collect();
            let total: f64 = w.iter().sum();
            (0..grid.n)
                .map(|i| {
                    let a = grid.alpha[i];
                    let step = spec.delta * eta(a);
                    if step == 0.0 {
                        return f[i];
                    }
                    let mut acc = 0.0;
                    for l in 0..q {
                        acc += w[l] * interp_periodic(f, grid, a - s[l] * step);
                    }
                    acc / total
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{parity_defect, project_symmetry, WeightFunction};
    use crate::norms::{weighted_norm, NormFlavor};
    use crate::spectral::SpectralOps;
    use crate::state::InterfaceState;

    #[test]
    fn spec_rejects_bad_delta() {
        assert!(MollifierSpec::new(0.0, MollifierKind::Fixed).is_err());
        assert!(MollifierSpec::new(1.0, MollifierKind::Varstep).is_err());
        assert!(MollifierSpec::new(0.1, MollifierKind::Fixed).is_ok());
    }

    #[test]
    fn varstep_preserves_constants_exactly() {
        let grid = Grid::new(256).unwrap();
        let spec = MollifierSpec::new(0.15, MollifierKind::Varstep).unwrap();
        let out = mollify(&vec![3.25; grid.n], &spec, &grid);
        for v in out {
            assert!((v - 3.25).abs() < 1e-13);
        }
    }

    #[test]
    fn fixed_kind_annihilates_near_tips() {
        let grid = Grid::new(512).unwrap();
        let delta = 0.1;
        let spec = MollifierSpec::new(delta, MollifierKind::Fixed).unwrap();
        let out = mollify(&vec![1.0; grid.n], &spec, &grid);
        for j in 0..grid.n {
            let d = grid.tip_distance(j);
            if d < delta {
                assert!(out[j].abs() < 1e-14, "node {j} at distance {d}: {}", out[j]);
            }
            if d > 6.0 * delta {
                assert!((out[j] - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eta_stays_below_tip_distance() {
        let grid = Grid::new(1024).unwrap();
        for &a in &grid.alpha {
            let d = (a.abs() - ALPHA_STAR).abs();
            assert!(eta(a) <= d + 1e-12);
            assert!(eta(a) >= 0.0);
        }
    }

    #[test]
    fn varstep_preserves_growth_rate() {
        let grid = Grid::new(1024).unwrap();
        let lam = 0.7;
        let f: Vec<f64> = grid
            .alpha
            .iter()
            .map(|&a| WeightFunction::eval(a).powf(lam))
            .collect();
        let spec = MollifierSpec::new(0.1, MollifierKind::Varstep).unwrap();
        let out = mollify(&f, &spec, &grid);
        for j in 0..grid.n {
            if grid.is_tip(j) {
                continue;
            }
            let ratio = out[j] / f[j];
            assert!(ratio > 0.5 && ratio < 2.0, "node {j}: ratio {ratio}");
        }
    }

    #[test]
    fn symmetric_kind_is_self_adjoint() {
        let grid = Grid::new(256).unwrap();
        let spec = MollifierSpec::new(0.12, MollifierKind::Symmetric).unwrap();
        let f: Vec<f64> = grid.alpha.iter().map(|&a| (3.0 * a).sin() + 0.2).collect();
        let g: Vec<f64> = grid.alpha.iter().map(|&a| (a.cos()).exp()).collect();
        let af = mollify(&f, &spec, &grid);
        let ag = mollify(&g, &spec, &grid);
        let ip1: f64 = af.iter().zip(&g).map(|(x, y)| x * y).sum::<f64>() * grid.h;
        let ip2: f64 = f.iter().zip(&ag).map(|(x, y)| x * y).sum::<f64>() * grid.h;
        assert!((ip1 - ip2).abs() < 1e-12 * ip1.abs().max(1.0), "{ip1} vs {ip2}");
    }

    #[test]
    fn mollifiers_respect_symmetries() {
        let grid = Grid::new(256).unwrap();
        let raw: Vec<f64> = grid.alpha.iter().map(|&a| (2.0 * a).sin() * a.cos()).collect();
        let f = project_symmetry(&grid, &raw, -1, -1);
        for kind in [
            MollifierKind::Fixed,
            MollifierKind::Adjoint,
            MollifierKind::Symmetric,
            MollifierKind::Varstep,
        ] {
            let spec = MollifierSpec::new(0.1, kind).unwrap();
            let out = mollify(&f, &spec, &grid);
            assert!(
                parity_defect(&grid, &out, -1, -1) < 1e-12,
                "{kind:?} broke parity"
            );
        }
    }

    #[test]
    fn varstep_converges_monotonically() {
        let grid = Grid::new(512).unwrap();
        let ops = SpectralOps::new(512);
        let st = InterfaceState::zeros(512);
        let m = WeightFunction::new(&grid, 1.0);
        let f: Vec<f64> = grid
            .alpha
            .iter()
            .map(|&a| (2.0 * a).sin() * a.cos() + 0.5 * (4.0 * a).sin())
            .collect();
        let mut errs = Vec::new();
        for &delta in &[0.2, 0.1, 0.05] {
            let spec = MollifierSpec::new(delta, MollifierKind::Varstep).unwrap();
            let out = mollify(&f, &spec, &grid);
            let diff: Vec<f64> = out.iter().zip(&f).map(|(a, b)| a - b).collect();
            errs.push(weighted_norm(
                &diff,
                &m,
                2,
                0.1,
                NormFlavor::Lk,
                &st,
                &grid,
                &ops,
            ));
        }
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "not monotone: {errs:?}");
    }
}
