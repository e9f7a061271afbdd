//! Dense solver for the boundary integral equations (I +- S) phi = psi with
//! S phi = 2 BR(z, phi) . z_s, restricted to a parity subspace.
//!
//! The grid reflections generate a four-element group; a parity class is
//! spanned by signed orbit sums, so the operator restricted to the class is
//! a dense matrix of dimension about n/4. Solving in the reduced basis keeps
//! the parity of the solution exact and makes the conditioning of the class
//! visible (the full operator mixes classes with very different behaviour).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{CuspError, Result};
use crate::grid::Grid;
use crate::state::InterfaceState;

const PV_CLOSE: f64 = 1e-14;

/// Orthonormal signed-orbit basis of a parity class.
#[derive(Debug, Clone)]
struct ParityBasis {
    /// per basis vector: (node, coefficient) pairs, at most 4 entries
    columns: Vec<Vec<(usize, f64)>>,
}

fn parity_basis(grid: &Grid, parity_x: i32, parity_y: i32) -> ParityBasis {
    let n = grid.n;
    let sx = parity_x as f64;
    let sy = parity_y as f64;
    let mut seen = vec![false; n];
    let mut columns = Vec::new();
    for j in 0..n {
        if seen[j] {
            continue;
        }
        let orbit = [j, grid.reflect_x(j), grid.reflect_y(j), grid.reflect_xy(j)];
        let signs = [1.0, sx, sy, sx * sy];
        for &o in &orbit {
            seen[o] = true;
        }
        // accumulate signed contributions per distinct node
        let mut acc: Vec<(usize, f64)> = Vec::new();
        for (&o, &s) in orbit.iter().zip(&signs) {
            match acc.iter_mut().find(|(node, _)| *node == o) {
                Some((_, c)) => *c += s,
                None => acc.push((o, s)),
            }
        }
        acc.retain(|&(_, c)| c.abs() > 1e-12);
        if acc.is_empty() {
            continue; // parity forces zero on this orbit
        }
        let norm: f64 = acc.iter().map(|&(_, c)| c * c).sum::<f64>().sqrt();
        for e in acc.iter_mut() {
            e.1 /= norm;
        }
        columns.push(acc);
    }
    ParityBasis { columns }
}

impl ParityBasis {
    fn dim(&self) -> usize {
        self.columns.len()
    }

    fn restrict(&self, f: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            self.columns
                .iter()
                .map(|col| col.iter().map(|&(j, c)| c * f[j]).sum()),
        )
    }

    fn prolong(&self, v: &DVector<f64>, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (k, col) in self.columns.iter().enumerate() {
            for &(j, c) in col {
                out[j] += c * v[k];
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeumannSign {
    /// interior problem, I + S
    Plus,
    /// exterior problem, I - S
    Minus,
}

pub struct NeumannOperator {
    pub sign: NeumannSign,
    pub parity: (i32, i32),
    /// reduced matrix of I +- S on the parity class
    reduced: DMatrix<f64>,
    basis: ParityBasis,
    n: usize,
    /// arclength weights for the compatibility integrals
    ds: Vec<f64>,
    /// condition number estimate of the reduced matrix (filled on demand)
    pub condition: Option<f64>,
}

/// Dense matrix of phi -> 2 BR(z, phi) . z_s by the alternating-node rule.
fn assemble_s_matrix(
    z: &[Complex64],
    state: &InterfaceState,
    grid: &Grid,
) -> Result<DMatrix<f64>> {
    let n = grid.n;
    let zs = state.z_s();
    let mut s = DMatrix::<f64>::zeros(n, n);
    let w2h = 2.0 * grid.h;
    let pref = Complex64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI));
    for i in 0..n {
        for j in 0..n {
            if (i + j) % 2 == 1 {
                let d = z[i] - z[j];
                if d.norm() < PV_CLOSE {
                    return Err(CuspError::SingularCurve(format!(
                        "nodes {i} and {j} coincide"
                    )));
                }
                // BR(z, e_j)* quadrature weight; dotted with z_s via
                // v . z_s = Re(v* z_s)
                let wij = pref * Complex64::new(w2h * state.loglen[j].exp(), 0.0) / d;
                s[(i, j)] = 2.0 * (wij * zs[i]).re;
            }
        }
    }
    Ok(s)
}

pub fn assemble_neumann(
    z: &[Complex64],
    state: &InterfaceState,
    grid: &Grid,
    sign: NeumannSign,
    parity: (i32, i32),
) -> Result<NeumannOperator> {
    let s = assemble_s_matrix(z, state, grid)?;
    let basis = parity_basis(grid, parity.0, parity.1);
    let m = basis.dim();
    let sgn = match sign {
        NeumannSign::Plus => 1.0,
        NeumannSign::Minus => -1.0,
    };
    let mut reduced = DMatrix::<f64>::zeros(m, m);
    for (kcol, col) in basis.columns.iter().enumerate() {
        // (I +- S) applied to the basis column, then restricted
        let mut image = vec![0.0; grid.n];
        for &(j, c) in col {
            image[j] += c;
            for i in 0..grid.n {
                image[i] += sgn * s[(i, j)] * c;
            }
        }
        for (krow, row) in basis.columns.iter().enumerate() {
            reduced[(krow, kcol)] = row.iter().map(|&(j, c)| c * image[j]).sum();
        }
    }
    Ok(NeumannOperator {
        sign,
        parity,
        reduced,
        basis,
        n: grid.n,
        ds: state.ds_weights(grid),
        condition: None,
    })
}

impl NeumannOperator {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Apply the full-space operator to a nodal field of the right parity.
    pub fn apply(&self, phi: &[f64]) -> Vec<f64> {
        let v = self.basis.restrict(phi);
        let w = &self.reduced * v;
        self.basis.prolong(&w, self.n)
    }

    /// Estimated 2-norm condition number of the reduced matrix.
    pub fn condition_estimate(&mut self) -> f64 {
        if let Some(c) = self.condition {
            return c;
        }
        let svd = self.reduced.clone().svd(false, false);
        let smax = svd.singular_values.iter().cloned().fold(f64::MIN, f64::max);
        let smin = svd.singular_values.iter().cloned().fold(f64::MAX, f64::min);
        let c = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        self.condition = Some(c);
        c
    }

    /// Compatibility integral of the data: total for the exterior problem,
    /// per boundary component (each lobe) for the interior one.
    pub fn compatibility_defect(&self, psi: &[f64], grid: &Grid) -> f64 {
        let scale: f64 = psi
            .iter()
            .zip(&self.ds)
            .map(|(p, w)| p.abs() * w)
            .sum::<f64>()
            .max(1e-300);
        match self.sign {
            NeumannSign::Minus => {
                let total: f64 = psi.iter().zip(&self.ds).map(|(p, w)| p * w).sum();
                total.abs() / scale
            }
            NeumannSign::Plus => {
                // lobes split at the singular nodes
                let mut acc1 = 0.0;
                let mut acc2 = 0.0;
                for j in 0..grid.n {
                    if j > grid.istar_minus && j < grid.istar_plus {
                        acc1 += psi[j] * self.ds[j];
                    } else if !grid.is_tip(j) {
                        acc2 += psi[j] * self.ds[j];
                    }
                }
                (acc1.abs().max(acc2.abs())) / scale
            }
        }
    }

    /// Direct solve of (I +- S) phi = psi on the parity class.
    pub fn solve(&mut self, psi: &[f64], grid: &Grid) -> Result<Vec<f64>> {
        let defect = self.compatibility_defect(psi, grid);
        if defect > 1e-8 {
            return Err(CuspError::Solvability(format!(
                "compatibility integral defect {defect:.3e}"
            )));
        }
        let cond = self.condition_estimate();
        if cond > 1e12 {
            return Err(CuspError::IllConditioned(cond));
        }
        let rhs = self.basis.restrict(psi);
        let lu = self.reduced.clone().lu();
        let sol = lu
            .solve(&rhs)
            .ok_or_else(|| CuspError::IllConditioned(f64::INFINITY))?;
        Ok(self.basis.prolong(&sol, self.n))
    }
}
