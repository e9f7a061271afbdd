//! Small quadrature and fitting helpers used by the kernel validators:
//! Gauss-Legendre panels (graded toward singular endpoints) and least-squares
//! slope fits on log-log data.

/// 16-point Gauss-Legendre nodes and weights on [-1, 1].
const GL16_X: [f64; 8] = [
    0.0950125098376374,
    0.2816035507792589,
    0.4580167776572274,
    0.6178762444026438,
    0.7554044083550030,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const GL16_W: [f64; 8] = [
    0.1894506104550685,
    0.1826034150449236,
    0.1691565193950025,
    0.1495959888165767,
    0.1246289712555339,
    0.0951585116824928,
    0.0622535239386479,
    0.0271524594117541,
];

/// Integrate f over [a, b] with a single 16-point Gauss-Legendre rule.
pub fn gl16<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..8 {
        acc += GL16_W[i] * (f(c + hw * GL16_X[i]) + f(c - hw * GL16_X[i]));
    }
    acc * hw
}

/// Integrate over [a, b] with panels geometrically graded toward `a`.
/// The first panel has width (b-a)*ratio^(panels-1).
pub fn gl_graded_left<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    assert!(panels >= 1);
    let ratio: f64 = 0.5;
    let total = b - a;
    let mut acc = 0.0;
    let mut right = b;
    for p in 0..panels {
        let left = if p + 1 == panels {
            a
        } else {
            a + total * ratio.powi(p as i32 + 1)
        };
        acc += gl16(left, right, &mut f);
        right = left;
    }
    acc
}

/// Integrate over [a, b] with panels graded toward both endpoints.
pub fn gl_graded_both<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    let mid = 0.5 * (a + b);
    let left = gl_graded_left(a, mid, panels, |x| f(a + mid - x)); // reflect so grading hugs `a`
    let right = gl_graded_left(mid, b, panels, &mut f);
    // gl_graded_left grades toward its first argument; for the left half we
    // integrated the reflected integrand on [a, mid] graded toward a.
    left + right
}

/// Panel bounds on [a, b] geometrically refined toward the selected
/// endpoints until the panel width falls below `min_width` (interior panels
/// stay coarse).
pub fn panels_graded(
    a: f64,
    b: f64,
    at_a: bool,
    at_b: bool,
    min_width: f64,
) -> Vec<(f64, f64)> {
    assert!(b > a);
    let len = b - a;
    let mw = min_width.max(1e-13 * len);
    let levels = ((len / mw).log2().ceil() as usize).clamp(1, 60);
    let ratio: f64 = 0.5;
    let mut cuts = vec![a, b];
    if at_a && at_b {
        for p in 1..=levels {
            let w = 0.5 * len * ratio.powi(p as i32);
            if w < mw {
                break;
            }
            cuts.push(a + w);
            cuts.push(b - w);
        }
        cuts.push(0.5 * (a + b));
    } else if at_a {
        for p in 1..=levels {
            let w = len * ratio.powi(p as i32);
            if w < mw {
                break;
            }
            cuts.push(a + w);
        }
    } else if at_b {
        for p in 1..=levels {
            let w = len * ratio.powi(p as i32);
            if w < mw {
                break;
            }
            cuts.push(b - w);
        }
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    cuts.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[0], w[1]))
        .collect()
}

/// Complex-valued integral over graded panels with 16-point Gauss-Legendre.
pub fn gl_complex_graded<F: FnMut(f64) -> num_complex::Complex64>(
    a: f64,
    b: f64,
    at_a: bool,
    at_b: bool,
    min_width: f64,
    mut f: F,
) -> num_complex::Complex64 {
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for (lo, hi) in panels_graded(a, b, at_a, at_b, min_width) {
        let c = 0.5 * (lo + hi);
        let hw = 0.5 * (hi - lo);
        for i in 0..8 {
            acc += (f(c + hw * GL16_X[i]) + f(c - hw * GL16_X[i])) * GL16_W[i] * hw;
        }
    }
    acc
}

/// Least-squares slope of y against x.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

/// Geometrically spaced samples in [lo, hi].
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let l0 = lo.ln();
    let l1 = hi.ln();
    (0..count)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
