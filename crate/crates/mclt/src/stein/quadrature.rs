//! Gauss rules backing the Stein equation solver.
//!
//! Nodes are computed once by Newton iteration on the orthogonal-polynomial
//! recurrences and cached. The adaptive integrator bisects 20-point
//! Gauss-Legendre panels until the refinement correction drops below the
//! requested absolute tolerance, which piecewise-smooth integrands reach in
//! a handful of splits.

use crate::{Error, Result};
use std::sync::OnceLock;

/// Newton solve for the n-point Gauss-Legendre rule on [-1, 1].
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * pp * pp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Newton solve for the n-point Gauss-Hermite rule: ∫ e^{-x²} f = Σ w f(x).
fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let pim4 = 0.751_125_544_464_942_5; // π^{-1/4}
    let m = n.div_ceil(2);
    // roots stored largest first, then mirrored
    let mut root = vec![0.0; m];
    let mut weight = vec![0.0; m];
    for i in 0..m {
        let nf = n as f64;
        let mut z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => root[0] - 1.14 * nf.powf(0.426) / root[0],
            2 => 1.86 * root[1] - 0.86 * root[0],
            3 => 1.91 * root[2] - 0.91 * root[1],
            _ => 2.0 * root[i - 1] - root[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-14 {
                break;
            }
        }
        root[i] = z;
        weight[i] = 2.0 / (pp * pp);
    }
    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 0..m {
        x.push(-root[i]);
        w.push(weight[i]);
    }
    // ascending order; for odd n the middle root is z = 0 and must not repeat
    for i in (0..n - m).rev() {
        x.push(root[i]);
        w.push(weight[i]);
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    (
        idx.iter().map(|&i| x[i]).collect(),
        idx.iter().map(|&i| w[i]).collect(),
    )
}

fn gl20_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    CACHE.get_or_init(|| gauss_legendre(20))
}

fn gh64_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    CACHE.get_or_init(|| gauss_hermite(64))
}

/// One 20-point Gauss-Legendre panel over [lo, hi].
pub(crate) fn gl20(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let (x, w) = gl20_rule();
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut acc = 0.0;
    for i in 0..x.len() {
        acc += w[i] * f(mid + half * x[i]);
    }
    acc * half
}

/// E f(Y) for Y ~ N(0,1) by 64-node Gauss-Hermite. Exact for polynomials up
/// to degree 127 and superexponentially accurate for entire integrands.
pub(crate) fn normal_expectation_gh(f: &dyn Fn(f64) -> f64) -> f64 {
    let (x, w) = gh64_rule();
    let scale = std::f64::consts::PI.sqrt().recip();
    let mut acc = 0.0;
    for i in 0..x.len() {
        acc += w[i] * f(std::f64::consts::SQRT_2 * x[i]);
    }
    acc * scale
}

fn refine(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, whole: f64, depth: u32) -> Result<f64> {
    let mid = 0.5 * (lo + hi);
    let left = gl20(f, lo, mid);
    let right = gl20(f, mid, hi);
    let better = left + right;
    if (better - whole).abs() <= tol {
        return Ok(better);
    }
    if depth == 0 {
        return Err(Error::QuadratureFailure(format!(
            "requested absolute tolerance not met on [{lo:.6}, {hi:.6}]"
        )));
    }
    Ok(refine(f, lo, mid, 0.5 * tol, left, depth - 1)?
        + refine(f, mid, hi, 0.5 * tol, right, depth - 1)?)
}

/// ∫_lo^hi f to absolute tolerance `tol` by adaptive panel bisection.
pub(crate) fn integrate(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if lo == hi {
        return Ok(0.0);
    }
    refine(f, lo, hi, tol, gl20(f, lo, hi), 40)
}

/// ∫_lo^hi f with forced panel breaks at the interior points of `cuts`
/// (integrand kinks), each segment integrated adaptively.
pub(crate) fn integrate_split(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    cuts: &[f64],
    tol: f64,
) -> Result<f64> {
    let mut edges = vec![lo];
    let mut interior: Vec<f64> = cuts.iter().copied().filter(|&c| c > lo && c < hi).collect();
    interior.sort_by(f64::total_cmp);
    edges.extend(interior);
    edges.push(hi);
    let per = tol / (edges.len() - 1) as f64;
    let mut acc = 0.0;
    for pair in edges.windows(2) {
        acc += integrate(f, pair[0], pair[1], per)?;
    }
    Ok(acc)
}
