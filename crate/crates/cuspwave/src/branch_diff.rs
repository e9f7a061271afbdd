//! The branch-difference operator: the difference of one-sided conjugate
//! Birkhoff-Rott traces across the two graph branches near the tip, together
//! with the least-squares verification of its asymptotic expansion.
//!
//! On a synthetic patch every integral is evaluated with panel quadrature
//! graded toward the principal-value point, the opposite-branch near-diagonal
//! peak, and the tip, so the operator values are accurate enough to expose
//! the decay rate of the expansion remainders. Patch-only evaluation is a
//! truncation of the closed-curve operator; the moment corrections are
//! computed over the same truncated arc so the expansion stays consistent.

use num_complex::Complex64;

use crate::error::{CuspError, Result};
use crate::grid::Grid;
use crate::patch::GraphPatch;
use crate::quad::{gl_complex_graded, log_spaced, ls_slope};
use crate::spectral::SpectralOps;
use crate::state::InterfaceState;

/// Scalar field given on the two branches of the patch.
pub struct BranchField<'a> {
    pub plus: Box<dyn Fn(f64) -> f64 + 'a>,
    pub minus: Box<dyn Fn(f64) -> f64 + 'a>,
}

impl<'a> BranchField<'a> {
    pub fn new(
        plus: impl Fn(f64) -> f64 + 'a,
        minus: impl Fn(f64) -> f64 + 'a,
    ) -> Self {
        BranchField {
            plus: Box::new(plus),
            minus: Box::new(minus),
        }
    }
}

fn q_plus(patch: &GraphPatch, u: f64) -> Complex64 {
    Complex64::new(u, patch.kappa_at(u))
}

fn q_minus(patch: &GraphPatch, u: f64) -> Complex64 {
    Complex64::new(u, -patch.kappa_at(u))
}

fn speed(patch: &GraphPatch, u: f64) -> f64 {
    let kp = patch.kappa_prime_at(u);
    (1.0 + kp * kp).sqrt()
}

/// Refinement floor for the graded panels at a target abscissa: deep enough
/// to resolve both the near-diagonal peak (width rho) and the pv residue
/// scale, without collapsing panels to rounding level.
fn min_width_at(patch: &GraphPatch, x: f64) -> f64 {
    let rho = patch.rho_at(x).abs();
    (1e-2 * rho).min(1e-5 * x.abs()).max(1e-18)
}

/// Integral of f(q)/(w - q) ds over one branch with the target on the same
/// branch at parameter x: the 1/(x-u) singularity is subtracted analytically.
fn pv_same_branch(
    patch: &GraphPatch,
    f: &dyn Fn(f64) -> f64,
    upper: bool,
    x: f64,
) -> Complex64 {
    let d2 = 2.0 * patch.delta_hat;
    let q = |u: f64| if upper { q_plus(patch, u) } else { q_minus(patch, u) };
    let w = q(x);
    let zp = if upper {
        Complex64::new(1.0, patch.kappa_prime_at(x))
    } else {
        Complex64::new(1.0, -patch.kappa_prime_at(x))
    };
    let g = f(x) * speed(patch, x) / zp;
    let integrand = |u: f64| -> Complex64 {
        let ker = Complex64::new(f(u) * speed(patch, u), 0.0) / (w - q(u));
        ker - g / (x - u)
    };
    let mw = min_width_at(patch, x);
    let tip_mw = 1e-9 * d2;
    // split at the tip and the target; grade toward both
    let mut acc = Complex64::new(0.0, 0.0);
    if x > 0.0 {
        acc += gl_complex_graded(-d2, 0.0, false, true, tip_mw, integrand);
        acc += gl_complex_graded(0.0, x, true, true, mw.min(tip_mw), integrand);
        acc += gl_complex_graded(x, d2, true, false, mw, integrand);
    } else {
        acc += gl_complex_graded(-d2, x, false, true, mw, integrand);
        acc += gl_complex_graded(x, 0.0, true, true, mw.min(tip_mw), integrand);
        acc += gl_complex_graded(0.0, d2, true, false, tip_mw, integrand);
    }
    // principal value of the subtracted pole over the truncated arc
    acc + g * ((x + d2) / (d2 - x)).abs().ln()
}

/// Integral of f(q)/(w - q) ds over the branch opposite to the target.
fn near_branch(
    patch: &GraphPatch,
    f: &dyn Fn(f64) -> f64,
    upper_source: bool,
    w: Complex64,
    x: f64,
) -> Complex64 {
    let d2 = 2.0 * patch.delta_hat;
    let q = |u: f64| if upper_source { q_plus(patch, u) } else { q_minus(patch, u) };
    let integrand =
        |u: f64| -> Complex64 { Complex64::new(f(u) * speed(patch, u), 0.0) / (w - q(u)) };
    let mw = min_width_at(patch, x);
    let tip_mw = 1e-9 * d2;
    let mut acc = Complex64::new(0.0, 0.0);
    if x > 0.0 {
        acc += gl_complex_graded(-d2, 0.0, false, true, tip_mw, integrand);
        acc += gl_complex_graded(0.0, x, true, true, mw.min(tip_mw), integrand);
        acc += gl_complex_graded(x, d2, true, false, mw, integrand);
    } else {
        acc += gl_complex_graded(-d2, x, false, true, mw, integrand);
        acc += gl_complex_graded(x, 0.0, true, true, mw.min(tip_mw), integrand);
        acc += gl_complex_graded(0.0, d2, true, false, tip_mw, integrand);
    }
    acc
}

/// Conjugate Birkhoff-Rott trace at a point of the truncated two-branch
/// curve: (1/2 pi i) pv int f/(w - q) ds.
fn br_trace(patch: &GraphPatch, field: &BranchField, upper_target: bool, x: f64) -> Complex64 {
    let w = if upper_target { q_plus(patch, x) } else { q_minus(patch, x) };
    let own = if upper_target { &field.plus } else { &field.minus };
    let other = if upper_target { &field.minus } else { &field.plus };
    let i_same = pv_same_branch(patch, own.as_ref(), upper_target, x);
    let i_opp = near_branch(patch, other.as_ref(), !upper_target, w, x);
    (i_same + i_opp) * Complex64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI))
}

/// Branch-difference operator at the requested abscissae (truncated-patch
/// evaluation). At each x:
///   D(f)(x) = (i f_+ / 2 + i z_+' BR*) + (i f_- / 2 - i z_-' BR*).
pub fn branch_difference_synthetic(
    patch: &GraphPatch,
    field: &BranchField,
    xs: &[f64],
) -> Vec<Complex64> {
    xs.iter()
        .map(|&x| {
            let kp = patch.kappa_prime_at(x);
            let zp_plus = Complex64::new(1.0, kp);
            let zp_minus = Complex64::new(1.0, -kp);
            let br_p = br_trace(patch, field, true, x);
            let br_m = br_trace(patch, field, false, x);
            let jump = Complex64::new(0.0, 0.5 * ((field.plus)(x) + (field.minus)(x)));
            jump + Complex64::new(0.0, 1.0) * (zp_plus * br_p - zp_minus * br_m)
        })
        .collect()
}

/// Moment of order i over the truncated two-branch curve, evaluated with the
/// symmetric pairing that realizes the principal value at the tip.
pub fn branch_moment_synthetic(patch: &GraphPatch, field: &BranchField, order: u32) -> Complex64 {
    let d2 = 2.0 * patch.delta_hat;
    let term = |u: f64| -> Complex64 {
        let s = speed(patch, u);
        let mut acc = Complex64::new(0.0, 0.0);
        for sign in [1.0, -1.0] {
            let v = sign * u;
            acc += (field.plus)(v) * s / q_plus(patch, v).powu(order + 1);
            acc += (field.minus)(v) * s / q_minus(patch, v).powu(order + 1);
        }
        acc
    };
    let val = gl_complex_graded(0.0, d2, true, false, 1e-12 * d2, term);
    val * Complex64::new(0.0, -1.0 / (2.0 * std::f64::consts::PI))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeadingPart {
    /// real part, first-order expansion (bounded fields)
    RealLeading,
    /// imaginary part, second-order expansion (fields vanishing with their
    /// first derivative at the tip)
    ImagLeading,
}

#[derive(Debug, Clone, Copy)]
pub enum FitOutcome {
    /// residual identically zero, nothing to fit
    Exact,
    Exponent { p: f64, r_squared: f64 },
}

/// Subtract the displayed leading terms of the expansion and fit the decay
/// exponent of the residual on log-log axes over the given abscissae.
pub fn d_asymptotics_fit(
    patch: &GraphPatch,
    field: &BranchField,
    which: LeadingPart,
    xs: &[f64],
) -> Result<FitOutcome> {
    let dvals = branch_difference_synthetic(patch, field, xs);
    let b0 = branch_moment_synthetic(patch, field, 0);
    let b1 = branch_moment_synthetic(patch, field, 1);
    let mut lx = Vec::new();
    let mut lr = Vec::new();
    let mut maxres: f64 = 0.0;
    let mut residuals = Vec::new();
    for (&x, &d) in xs.iter().zip(&dvals) {
        let kp = patch.kappa_prime_at(x);
        let zp_plus = Complex64::new(1.0, kp);
        let zp_minus = Complex64::new(1.0, -kp);
        let dz = zp_plus - zp_minus;
        let res = match which {
            LeadingPart::RealLeading => {
                let lead = -patch.rho_prime_at(x) * 0.5 * ((field.plus)(x) - (field.minus)(x))
                    + (dz * b0).im;
                d.re - lead
            }
            LeadingPart::ImagLeading => {
                let dzz = zp_plus * q_plus(patch, x) - zp_minus * q_minus(patch, x);
                let lead = -(dz * b0 + dzz * b1).re;
                d.im - lead
            }
        };
        residuals.push(res);
        maxres = maxres.max(res.abs());
    }
    let scale: f64 = dvals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if maxres <= 1e-13 * scale.max(1e-300) {
        return Ok(FitOutcome::Exact);
    }
    for (&x, &r) in xs.iter().zip(&residuals) {
        if r.abs() > 0.0 {
            lx.push(x.ln());
            lr.push(r.abs().ln());
        }
    }
    if lx.len() < 6 || (lx.last().unwrap() - lx[0]).abs() < std::f64::consts::LN_10 {
        return Err(CuspError::FitUnstable(
            "need at least a decade of abscissae".into(),
        ));
    }
    let p = ls_slope(&lx, &lr);
    // correlation quality guards against preasymptotic or oscillatory data
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = lr.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&lr).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = lr.iter().map(|b| (b - my) * (b - my)).sum();
    let r2 = sxy * sxy / (sxx * syy).max(1e-300);
    if r2 < 0.8 {
        return Err(CuspError::FitUnstable(format!(
            "log-log correlation r^2 = {r2:.3}"
        )));
    }
    Ok(FitOutcome::Exponent { p, r_squared: r2 })
}

/// Branch-difference values extracted from a full closed-curve state: the
/// upper-branch nodes pair with their mirror nodes across the x-axis, and
/// the principal values use the closed-curve alternating-node rule. Returns
/// (x, D(f)(x)) for nodes within the window around the tip.
pub fn branch_difference_on_curve(
    z: &[Complex64],
    f: &[f64],
    state: &InterfaceState,
    grid: &Grid,
    ops: &SpectralOps,
    window: f64,
) -> Result<Vec<(f64, Complex64)>> {
    let _ = ops;
    let br = crate::br::birkhoff_rott_star(z, f, state, grid)?;
    let za = state.z_alpha();
    let mut out = Vec::new();
    for j in 0..grid.n {
        if grid.is_tip(j) || z[j].im <= 1e-13 || z[j].re.abs() > window {
            continue;
        }
        let k = grid.reflect_x(j);
        // dz/dx along the branch: z_alpha / d(x)/d(alpha)
        let zp_plus = za[j] / za[j].re;
        let zp_minus = za[k] / za[k].re;
        let x = z[j].re;
        let val = Complex64::new(0.0, 0.5 * (f[j] + f[k]))
            + Complex64::new(0.0, 1.0) * (zp_plus * br[j] - zp_minus * br[k]);
        out.push((x, val));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_gives_zero() {
        let patch = GraphPatch::synthetic(0.8, 0.6, 0.5);
        let field = BranchField::new(|_| 0.0, |_| 0.0);
        let xs = [0.01, 0.1];
        let d = branch_difference_synthetic(&patch, &field, &xs);
        assert!(d.iter().all(|v| v.norm() < 1e-14));
        match d_asymptotics_fit(&patch, &field, LeadingPart::RealLeading, &xs).unwrap() {
            FitOutcome::Exact => {}
            FitOutcome::Exponent { .. } => panic!("expected exact"),
        }
    }

    #[test]
    fn even_field_real_leading_vanishes() {
        // f equal on both branches: the jump term drops and the real part is
        // governed by the moment correction alone
        let patch = GraphPatch::synthetic(1.0, 0.7, 0.5);
        let f = |u: f64| 1.0 + 0.3 * u;
        let field = BranchField::new(f, f);
        let xs = log_spaced(3e-3, 0.2, 16);
        let d = branch_difference_synthetic(&patch, &field, &xs);
        let b0 = branch_moment_synthetic(&patch, &field, 0);
        // b0 of an even field is purely imaginary so Im((z+'-z-')b0) = -Re b0 rho' ~ 0
        assert!(b0.re.abs() < 1e-10, "Re b0 = {}", b0.re);
        for (&x, &v) in xs.iter().zip(&d) {
            let lead = (Complex64::new(0.0, patch.rho_prime_at(x)) * b0).im;
            let res = (v.re - lead).abs();
            assert!(res < 0.2 * x.powf(1.0), "x={x}: residual {res}");
        }
    }

    #[test]
    fn quadratic_field_matches_moment_correction() {
        // f = Re(z^2) on the branches: compare the real part of D against
        // the displayed moment correction
        let patch = GraphPatch::synthetic(0.8, 0.6, 0.5);
        let kp = |u: f64| patch.kappa_at(u);
        let fp = move |u: f64| u * u - kp(u) * kp(u);
        let fm = fp;
        let field = BranchField::new(fp, fm);
        let xs = log_spaced(1e-2, 0.1, 8);
        let d = branch_difference_synthetic(&patch, &field, &xs);
        let b0 = branch_moment_synthetic(&patch, &field, 0);
        for (&x, &v) in xs.iter().zip(&d) {
            let dz = Complex64::new(0.0, patch.rho_prime_at(x));
            let lead = (dz * b0).im;
            assert!(
                (v.re - lead).abs() < 0.5 * x.powf(0.8),
                "x={x}: {} vs {lead}",
                v.re
            );
        }
    }

    #[test]
    fn real_leading_rate_for_bounded_fields() {
        // generic bounded branch fields: residual decays like x^{mu + lambda}
        for &mu in &[0.6, 0.8, 1.0] {
            let patch = GraphPatch::synthetic(mu, 0.6, 0.5);
            let field = BranchField::new(
                |u: f64| 1.0 + 0.5 * u + 0.3 * u * u,
                |u: f64| 0.7 - 0.2 * u + 0.1 * u * u,
            );
            let xs = log_spaced(1e-4, 2e-3, 16);
            let lambda = 0.5;
            match d_asymptotics_fit(&patch, &field, LeadingPart::RealLeading, &xs).unwrap() {
                FitOutcome::Exponent { p, .. } => {
                    assert!(p >= mu + lambda - 0.15, "mu={mu}: fitted {p}");
                }
                FitOutcome::Exact => panic!("unexpected exact fit"),
            }
        }
    }

    #[test]
    fn imag_leading_rate_for_vanishing_fields() {
        // fields vanishing to second order: residual of the imaginary part
        // after the two-moment correction decays like x^{1 + mu + lambda}
        let mu = 0.8;
        let patch = GraphPatch::synthetic(mu, 0.6, 0.5);
        let field = BranchField::new(
            |u: f64| u * u + 0.5 * u * u * u,
            |u: f64| 0.5 * u * u,
        );
        let xs = log_spaced(1e-4, 2e-3, 16);
        let lambda = 0.5;
        match d_asymptotics_fit(&patch, &field, LeadingPart::ImagLeading, &xs).unwrap() {
            FitOutcome::Exponent { p, .. } => {
                assert!(p >= 1.0 + mu + lambda - 0.2, "fitted {p}");
            }
            FitOutcome::Exact => panic!("unexpected exact fit"),
        }
    }
}
