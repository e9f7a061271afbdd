//! Uniform periodic grid on [-pi, pi) with the two singular parameter values
//! +-pi/2 landing exactly on nodes, the power weight vanishing there, and the
//! symmetry projections used throughout.
//!
//! Full symmetry means invariance under the two reflections
//! `alpha <-> -alpha` (x-axis) and `alpha_* - alpha <-> alpha_* + alpha`
//! (y-axis). On the grid these generate a 4-element abelian group acting on
//! node indices; parity projections average over that group with signs.

use crate::error::{CuspError, Result};

pub const ALPHA_STAR: f64 = std::f64::consts::FRAC_PI_2;

/// Uniform periodic sampling of the parameter interval.
#[derive(Debug, Clone)]
pub struct Grid {
    pub n: usize,
    pub h: f64,
    pub alpha: Vec<f64>,
    /// Node index of alpha_* = pi/2.
    pub istar_plus: usize,
    /// Node index of -alpha_*.
    pub istar_minus: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 {
            return Err(CuspError::InvalidGrid(format!("n = {n} must be >= 8")));
        }
        if n % 4 != 0 {
            return Err(CuspError::InvalidGrid(format!(
                "n = {n} must be divisible by 4 so that +-pi/2 are nodes"
            )));
        }
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let alpha: Vec<f64> = (0..n).map(|j| -std::f64::consts::PI + j as f64 * h).collect();
        Ok(Grid {
            n,
            h,
            alpha,
            istar_plus: 3 * n / 4,
            istar_minus: n / 4,
        })
    }

    /// Index of the node at -alpha_j (reflection across the x-axis).
    #[inline]
    pub fn reflect_x(&self, j: usize) -> usize {
        (self.n - j) % self.n
    }

    /// Index of the node at pi - alpha_j (reflection across the y-axis).
    #[inline]
    pub fn reflect_y(&self, j: usize) -> usize {
        (3 * self.n / 2 - j) % self.n
    }

    /// Composition of both reflections, alpha_j - pi.
    #[inline]
    pub fn reflect_xy(&self, j: usize) -> usize {
        (j + self.n / 2) % self.n
    }

    #[inline]
    pub fn is_tip(&self, j: usize) -> bool {
        j == self.istar_plus || j == self.istar_minus
    }

    /// Periodic distance from node j to the nearest singular node.
    pub fn tip_distance(&self, j: usize) -> f64 {
        let a = self.alpha[j];
        let d1 = wrap_to_pi(a - ALPHA_STAR).abs();
        let d2 = wrap_to_pi(a + ALPHA_STAR).abs();
        d1.min(d2)
    }
}

/// Wrap an angle into [-pi, pi).
pub fn wrap_to_pi(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut y = (x + std::f64::consts::PI).rem_euclid(two_pi) - std::f64::consts::PI;
    if y >= std::f64::consts::PI {
        y -= two_pi;
    }
    y
}

/// The symmetric power weight m(alpha) = |cos alpha|.
///
/// Smooth away from +-pi/2, exact simple zeros at the singular nodes, and
/// m(-alpha) = m(alpha), m(alpha_* - alpha) = m(alpha_* + alpha).
#[derive(Debug, Clone)]
pub struct WeightFunction {
    pub samples: Vec<f64>,
    pub mu: f64,
}

impl WeightFunction {
    pub fn new(grid: &Grid, mu: f64) -> Self {
        let mut samples: Vec<f64> = grid.alpha.iter().map(|&a| a.cos().abs()).collect();
        // cos(+-pi/2) is ~1e-17 in floating point; the zeros are exact by construction.
        samples[grid.istar_plus] = 0.0;
        samples[grid.istar_minus] = 0.0;
        WeightFunction { samples, mu }
    }

    #[inline]
    pub fn eval(alpha: f64) -> f64 {
        alpha.cos().abs()
    }
}

/// Projection of a nodal field onto the subspace with the given parities
/// under the two reflections (+1 even, -1 odd). Idempotent.
pub fn project_symmetry(grid: &Grid, f: &[f64], parity_x: i32, parity_y: i32) -> Vec<f64> {
    assert_eq!(f.len(), grid.n);
    let sx = parity_x as f64;
    let sy = parity_y as f64;
    (0..grid.n)
        .map(|j| {
            0.25 * (f[j]
                + sx * f[grid.reflect_x(j)]
                + sy * f[grid.reflect_y(j)]
                + sx * sy * f[grid.reflect_xy(j)])
        })
        .collect()
}

/// Maximum deviation of a field from the given parity class.
pub fn parity_defect(grid: &Grid, f: &[f64], parity_x: i32, parity_y: i32) -> f64 {
    let p = project_symmetry(grid, f, parity_x, parity_y);
    f.iter()
        .zip(&p)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Reference tangent angle of the symmetric two-lobe configuration,
/// theta_base(alpha) = alpha + 3*pi/2, as a continuous lift. Any admissible
/// tangent angle differs from it by a function odd under both reflections
/// (plus the jump compensator in corner mode).
#[inline]
pub fn theta_base(alpha: f64) -> f64 {
    alpha + 1.5 * std::f64::consts::PI
}

/// Jump compensator for corner mode: piecewise linear, periodic, odd under
/// both reflections, with unit jumps +2 at both singular values and the
/// compensating slope -2/pi. theta = theta_base + nu*J + (odd/odd smooth).
pub fn sawtooth_j(alpha: f64) -> f64 {
    let a = wrap_to_pi(alpha);
    let lin = -2.0 * a / std::f64::consts::PI;
    if a.abs() == ALPHA_STAR {
        // mid-jump value at the tips
        return 0.0;
    }
    if a < -ALPHA_STAR {
        lin - 2.0
    } else if a < ALPHA_STAR {
        lin
    } else {
        lin + 2.0
    }
}

/// Slope of the jump compensator away from the singular nodes.
#[inline]
pub fn sawtooth_j_slope() -> f64 {
    -2.0 / std::f64::consts::PI
}
