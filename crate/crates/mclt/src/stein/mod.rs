//! Solver and verifier for the Stein equation behind the smoothing step.
//!
//! For a 1-Lipschitz test function h and smoothing scale t at center s, the
//! equation `t²·f'(w) - (w-s)·f(w) = h(w) - E h(tY+s)` (Y standard normal)
//! has a bounded solution whose derivative norms control how test-function
//! expectations move under convolution. Substituting w = s + t·x reduces
//! everything to the unit problem `g'(x) - x·g(x) = h̃(x) - μ` with
//! h̃(x) = h(tx+s)/t and μ = E h̃(Y); then f(w) = g((w-s)/t) solves the
//! original equation with no extra scaling.
//!
//! `solve_stein_unit` evaluates g by quadrature in a form that never
//! multiplies the huge e^{x²/2} prefactor against a tiny integral:
//! substituting u = x - v (x ≤ 0) or u = x + v (x > 0) turns the classical
//! expression into `∫_0^∞ e^{xv - v²/2}·(h̃(x-v) - μ) dv` and its mirror,
//! whose integrands are bounded by |h̃| + |μ|.
//!
//! `verify_stein_bounds` checks the solution on a grid: the equation
//! residual with an independently finite-differenced f', and the derivative
//! norms against ‖f'‖ ≤ ‖h'‖/t, ‖f''‖ ≤ 2‖h'‖/t². Derivatives are only
//! evaluated away from the kinks of h, where they exist classically.

mod quadrature;

use crate::{Error, Result};
use quadrature::{integrate_split, normal_expectation_gh};

/// Effective infinity for the exponential-kernel integrals: beyond v = 12
/// the kernel is below e^{-72}.
const V_CUT: f64 = 12.0;

/// Absolute tolerance for every quadrature behind a g evaluation.
const QUAD_TOL: f64 = 1e-12;

/// Relative half-width (in units of t) of the exclusion zone around kinks
/// of h when evaluating derivatives on the verification grid.
const KINK_BUFFER: f64 = 1e-3;

/// Finite-difference step for f' and f'', in units of t.
const FD_STEP: f64 = 1e-4;

/// 1-Lipschitz test functions the verifier sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestFunction {
    /// h(x) = x
    Linear,
    /// h(x) = |x|
    Abs,
    /// h(x) = sin x
    Sin,
    /// h(x) = clamp(x, -1, 1)
    ClippedRamp,
}

impl TestFunction {
    pub const ALL: [TestFunction; 4] = [
        TestFunction::Linear,
        TestFunction::Abs,
        TestFunction::Sin,
        TestFunction::ClippedRamp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestFunction::Linear => "linear",
            TestFunction::Abs => "abs",
            TestFunction::Sin => "sin",
            TestFunction::ClippedRamp => "clipped_ramp",
        }
    }

    pub fn value(self, x: f64) -> f64 {
        match self {
            TestFunction::Linear => x,
            TestFunction::Abs => x.abs(),
            TestFunction::Sin => x.sin(),
            TestFunction::ClippedRamp => x.clamp(-1.0, 1.0),
        }
    }

    /// h'(x) where it exists (callers must stay off the kinks).
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            TestFunction::Linear => 1.0,
            TestFunction::Abs => {
                if x >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            TestFunction::Sin => x.cos(),
            TestFunction::ClippedRamp => {
                if (-1.0..1.0).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Points where h' jumps.
    pub fn kinks(self) -> &'static [f64] {
        match self {
            TestFunction::Linear | TestFunction::Sin => &[],
            TestFunction::Abs => &[0.0],
            TestFunction::ClippedRamp => &[-1.0, 1.0],
        }
    }

    pub fn lipschitz_constant(self) -> f64 {
        1.0
    }
}

/// The unit-scale Stein problem for h̃(x) = h(tx+s)/t, with μ precomputed.
pub struct SteinSolver {
    h: TestFunction,
    s: f64,
    t: f64,
    mu: f64,
}

impl SteinSolver {
    /// Set up the unit problem; computes μ = E h̃(Y) by Gauss-Hermite for
    /// smooth h and by kink-split adaptive quadrature otherwise.
    pub fn new(h: TestFunction, s: f64, t: f64) -> Result<Self> {
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::Domain(format!(
                "smoothing scale t must be finite and > 0, got {t}"
            )));
        }
        if !s.is_finite() {
            return Err(Error::Domain(format!("shift s must be finite, got {s}")));
        }
        let h_tilde = move |x: f64| h.value(t * x + s) / t;
        let mu = if h.kinks().is_empty() {
            normal_expectation_gh(&h_tilde)
        } else {
            let cuts: Vec<f64> = h.kinks().iter().map(|&k| (k - s) / t).collect();
            let inv = (2.0 * std::f64::consts::PI).sqrt().recip();
            integrate_split(
                &|y: f64| inv * (-0.5 * y * y).exp() * h_tilde(y),
                -V_CUT,
                V_CUT,
                &cuts,
                QUAD_TOL,
            )?
        };
        Ok(SteinSolver { h, s, t, mu })
    }

    /// μ = E h̃(Y).
    pub fn mu(&self) -> f64 {
        self.mu
    }

    fn h_tilde(&self, x: f64) -> f64 {
        self.h.value(self.t * x + self.s) / self.t
    }

    /// Kinks of h̃ in unit coordinates.
    fn unit_kinks(&self) -> Vec<f64> {
        self.h
            .kinks()
            .iter()
            .map(|&k| (k - self.s) / self.t)
            .collect()
    }

    /// g(x): the bounded solution of g'(x) - x·g(x) = h̃(x) - μ.
    pub fn g(&self, x: f64) -> Result<f64> {
        let kinks = self.unit_kinks();
        if x <= 0.0 {
            // cuts where h̃(x - v) crosses a kink
            let cuts: Vec<f64> = kinks.iter().map(|&k| x - k).collect();
            integrate_split(
                &|v: f64| (x * v - 0.5 * v * v).exp() * (self.h_tilde(x - v) - self.mu),
                0.0,
                V_CUT,
                &cuts,
                QUAD_TOL,
            )
        } else {
            let cuts: Vec<f64> = kinks.iter().map(|&k| k - x).collect();
            Ok(-integrate_split(
                &|v: f64| (-x * v - 0.5 * v * v).exp() * (self.h_tilde(x + v) - self.mu),
                0.0,
                V_CUT,
                &cuts,
                QUAD_TOL,
            )?)
        }
    }

    /// g'(x) through the defining equation, given a quadrature value of g.
    pub fn g_prime(&self, x: f64) -> Result<f64> {
        Ok(x * self.g(x)? + self.h_tilde(x) - self.mu)
    }
}

/// Evaluate the bounded solution of the unit Stein equation for
/// h̃(x) = h(tx+s)/t at the point `x`.
pub fn solve_stein_unit(h: TestFunction, s: f64, t: f64, x: f64) -> Result<f64> {
    SteinSolver::new(h, s, t)?.g(x)
}

/// f, f', f'' of the scaled Stein solution at `w`, where
/// `t²f' - (w-s)f = h(w) - E h(tY+s)`. Derivatives are central differences
/// with step `1e-4·t` (analytic for the linear test function, whose
/// solution is the constant -1).
pub fn stein_transform(h: TestFunction, s: f64, t: f64, w: f64) -> Result<(f64, f64, f64)> {
    if h == TestFunction::Linear {
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::Domain(format!(
                "smoothing scale t must be finite and > 0, got {t}"
            )));
        }
        return Ok((-1.0, 0.0, 0.0));
    }
    let solver = SteinSolver::new(h, s, t)?;
    let u = (w - s) / t;
    let g0 = solver.g(u)?;
    let gp = solver.g(u + FD_STEP)?;
    let gm = solver.g(u - FD_STEP)?;
    let step_w = FD_STEP * t;
    Ok((
        g0,
        (gp - gm) / (2.0 * step_w),
        (gp - 2.0 * g0 + gm) / (step_w * step_w),
    ))
}

/// Outcome of sweeping the Stein solution over the verification grid.
#[derive(Clone, Debug)]
pub struct SteinReport {
    pub test_function: &'static str,
    pub s: f64,
    pub t: f64,
    /// sup over the grid of |t²f' - (w-s)f - h(w) + E h(tY+s)|.
    pub max_residual: f64,
    /// sup |f'| over the grid.
    pub norm_fprime: f64,
    /// sup |f''| over the grid.
    pub norm_fsecond: f64,
    /// Grid points actually evaluated (kink-adjacent ones are skipped).
    pub grid_points: usize,
    /// Tolerance the norms were checked against.
    pub tol: f64,
    pub pass: bool,
}

/// Sweep w = s + t·x over x ∈ linspace(-8, 8, 2001), checking the equation
/// residual with an independently differenced f' and the derivative norm
/// bounds ‖f'‖ ≤ ‖h'‖/t, ‖f''‖ ≤ 2‖h'‖/t². Points within `1e-3` (unit
/// coordinates) of a kink of h are excluded: the classical derivatives do
/// not exist there.
pub fn verify_stein_bounds(h: TestFunction, s: f64, t: f64) -> Result<SteinReport> {
    let solver = SteinSolver::new(h, s, t)?;
    let e_h = t * solver.mu();
    let kinks = solver.unit_kinks();
    let m = 2001;
    let grid_h = 16.0 * t / (m as f64 - 1.0);
    let tol = 1e-6 + 1e-3 * grid_h * grid_h;
    let mut max_residual = 0.0f64;
    let mut norm_fprime = 0.0f64;
    let mut norm_fsecond = 0.0f64;
    let mut grid_points = 0usize;
    for i in 0..m {
        let x = -8.0 + 16.0 * i as f64 / (m as f64 - 1.0);
        if kinks.iter().any(|&k| (x - k).abs() < KINK_BUFFER) {
            continue;
        }
        grid_points += 1;
        let w = s + t * x;
        let g0 = solver.g(x)?;
        let gp = solver.g(x + FD_STEP)?;
        let gm = solver.g(x - FD_STEP)?;
        let step_w = FD_STEP * t;
        let fp = (gp - gm) / (2.0 * step_w);
        let fpp = (gp - 2.0 * g0 + gm) / (step_w * step_w);
        let residual = (t * t * fp - (w - s) * g0 - h.value(w) + e_h).abs();
        max_residual = max_residual.max(residual);
        norm_fprime = norm_fprime.max(fp.abs());
        norm_fsecond = norm_fsecond.max(fpp.abs());
    }
    let lip = h.lipschitz_constant();
    let pass = max_residual <= tol
        && norm_fprime <= lip / t + tol
        && norm_fsecond <= 2.0 * lip / (t * t) + tol;
    Ok(SteinReport {
        test_function: h.name(),
        s,
        t,
        max_residual,
        norm_fprime,
        norm_fsecond,
        grid_points,
        tol,
        pass,
    })
}
