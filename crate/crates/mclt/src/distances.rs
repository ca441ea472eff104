//! Distances to the standard normal, and the special functions behind them.
//!
//! The Wasserstein distance between a law `M` with distribution function `F`
//! and the standard normal is `∫ |F(x) - Φ(x)| dx`. For an empirical or
//! finitely supported `M` the integrand is `|c - Φ(x)|` on each plateau
//! between support points, so the integral has a closed form in terms of the
//! antiderivative `A(x) = x·Φ(x) + φ(x)` (note `A' = Φ`), splitting each
//! plateau at the point where `Φ` crosses its level `c`. No quadrature grid,
//! no truncation: the only error is floating-point rounding.
//!
//! The Kolmogorov distance of an atomic law against `Φ` is attained at a
//! support point, from the left or the right, so it is an exact max over
//! `2·M` candidates.

use crate::rng::{stream, LANE_BOOTSTRAP};
use crate::sum::{pairwise_mean, sd_and_stderr};
use crate::{Error, Result};
use rand::Rng;
use rayon::prelude::*;

/// 1/√(2π).
const FRAC_1_SQRT_2PI: f64 = 0.398942280401432677939946059934;

/// Number of bootstrap resamples used by the `_with_stderr` variants.
pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// Standard normal density φ(x).
pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal distribution function Φ(x), absolute error below 1e-14.
///
/// Evaluated as `erfc(-x/√2)/2`; the complementary form keeps full relative
/// accuracy in the left tail.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Standard normal survival function 1 - Φ(x), accurate in the right tail.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Inverse of [`normal_cdf`] on (0, 1); `|Φ(x) - p| ≤ 1e-13`.
///
/// Acklam's rational approximation gives ~9 correct digits; two Newton
/// corrections against the erfc-based CDF push the residual to rounding
/// level. Exact at p = 1/2.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "normal_quantile needs 0 < p < 1, got {p}"
        )));
    }
    // Work on (0, 1/2] and mirror, so the tail expansion always sees the
    // small side of the split at full precision.
    if p > 0.5 {
        return Ok(-quantile_lower(1.0 - p));
    }
    Ok(quantile_lower(p))
}

/// Quantile for p in (0, 1/2].
fn quantile_lower(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let mut x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    for _ in 0..2 {
        let d = normal_pdf(x);
        if d <= 1e-280 {
            break;
        }
        x -= (normal_cdf(x) - p) / d;
    }
    x
}

/// Which metric a [`DistanceEstimate`] carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceKind {
    Wasserstein,
    Kolmogorov,
}

/// A distance value together with how it was obtained.
///
/// `stderr` is 0 for the plain (non-bootstrapped) variants: the value is
/// exact for the given sample, the uncertainty lives in the sample itself.
#[derive(Clone, Debug)]
pub struct DistanceEstimate {
    pub kind: DistanceKind,
    pub value: f64,
    /// Sample (or support) size the value was computed from.
    pub reps: usize,
    /// Bootstrap standard error, when requested; 0 otherwise.
    pub stderr: f64,
}

/// Per-support-point normal function values used by the piecewise engine.
struct SupportTables {
    x: Vec<f64>,
    cdf: Vec<f64>,
    /// A(x) = x·Φ(x) + φ(x), the antiderivative of Φ.
    a: Vec<f64>,
    /// J(x) = φ(x) - x·(1-Φ(x)), the antiderivative of -(1-Φ).
    j: Vec<f64>,
}

impl SupportTables {
    fn new(sorted: Vec<f64>) -> Self {
        let m = sorted.len();
        let mut cdf = vec![0.0; m];
        let mut a = vec![0.0; m];
        let mut j = vec![0.0; m];
        for (i, &x) in sorted.iter().enumerate() {
            let c = normal_cdf(x);
            let s = normal_sf(x);
            let d = normal_pdf(x);
            cdf[i] = c;
            a[i] = x * c + d;
            j[i] = d - x * s;
        }
        SupportTables {
            x: sorted,
            cdf,
            a,
            j,
        }
    }

    fn len(&self) -> usize {
        self.x.len()
    }
}

/// ∫_l^r Φ(x) dx given A and J at both ends. The two algebraically equal
/// forms `A(r)-A(l)` and `(r-l) + J(r)-J(l)` are picked by the side of the
/// origin, so neither tail suffers cancellation.
#[inline]
fn int_phi(l: f64, al: f64, jl: f64, r: f64, ar: f64, jr: f64) -> f64 {
    if l + r <= 0.0 {
        ar - al
    } else {
        (r - l) + (jr - jl)
    }
}

/// Exact `∫ |F - Φ|` for the plateau function with level `cum(i)` after the
/// i-th support point (`cum` is non-decreasing, `cum(m-1) = 1`).
fn wasserstein_plateaus(t: &SupportTables, cum: &dyn Fn(usize) -> f64) -> f64 {
    let m = t.len();
    // (-∞, x_0): F = 0, contributes ∫ Φ = A(x_0).
    let mut total = t.a[0];
    for i in 0..m - 1 {
        let (l, r) = (t.x[i], t.x[i + 1]);
        if r <= l {
            continue; // duplicate support points: zero-length plateau
        }
        let c = cum(i);
        let (cl, cr) = (t.cdf[i], t.cdf[i + 1]);
        if c <= cl {
            // Φ ≥ c on the whole plateau
            total += int_phi(l, t.a[i], t.j[i], r, t.a[i + 1], t.j[i + 1]) - c * (r - l);
        } else if c >= cr {
            total += c * (r - l) - int_phi(l, t.a[i], t.j[i], r, t.a[i + 1], t.j[i + 1]);
        } else {
            // Φ crosses level c inside: split at the quantile.
            let q = normal_quantile(c)
                .expect("plateau level strictly inside (0,1)")
                .clamp(l, r);
            let dq = normal_pdf(q);
            let aq = q * c + dq;
            let jq = dq - q * (1.0 - c);
            total += c * (q - l) - int_phi(l, t.a[i], t.j[i], q, aq, jq);
            total += int_phi(q, aq, jq, r, t.a[i + 1], t.j[i + 1]) - c * (r - q);
        }
    }
    // (x_{m-1}, ∞): F = 1, contributes ∫ (1 - Φ) = J(x_{m-1}).
    total += t.j[m - 1];
    total.max(0.0)
}

/// Exact Kolmogorov distance for the same plateau function: the sup is
/// attained at a support point, approached from the left or the right.
fn kolmogorov_plateaus(t: &SupportTables, cum: &dyn Fn(usize) -> f64) -> f64 {
    let m = t.len();
    let mut best = 0.0_f64;
    let mut before = 0.0;
    for i in 0..m {
        let after = cum(i);
        let phi = t.cdf[i];
        best = best.max((before - phi).abs()).max((after - phi).abs());
        before = after;
    }
    best
}

fn checked_sorted(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("samples must be finite".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    Ok(xs)
}

/// Exact Wasserstein distance between the empirical law of `samples` and the
/// standard normal.
pub fn wasserstein_empirical_vs_normal(samples: &[f64]) -> Result<DistanceEstimate> {
    let t = SupportTables::new(checked_sorted(samples)?);
    let m = t.len() as f64;
    let value = wasserstein_plateaus(&t, &|i| (i + 1) as f64 / m);
    Ok(DistanceEstimate {
        kind: DistanceKind::Wasserstein,
        value,
        reps: t.len(),
        stderr: 0.0,
    })
}

/// [`wasserstein_empirical_vs_normal`] plus a bootstrap standard error
/// ([`BOOTSTRAP_RESAMPLES`] resamples, deterministic in `seed`).
pub fn wasserstein_empirical_vs_normal_with_stderr(
    samples: &[f64],
    seed: u64,
) -> Result<DistanceEstimate> {
    let t = SupportTables::new(checked_sorted(samples)?);
    let m = t.len() as f64;
    let value = wasserstein_plateaus(&t, &|i| (i + 1) as f64 / m);
    let stderr = bootstrap_stderr(&t, DistanceKind::Wasserstein, seed);
    Ok(DistanceEstimate {
        kind: DistanceKind::Wasserstein,
        value,
        reps: t.len(),
        stderr,
    })
}

/// Exact Kolmogorov distance between the empirical law of `samples` and the
/// standard normal.
pub fn kolmogorov_empirical_vs_normal(samples: &[f64]) -> Result<DistanceEstimate> {
    let t = SupportTables::new(checked_sorted(samples)?);
    let m = t.len() as f64;
    let value = kolmogorov_plateaus(&t, &|i| (i + 1) as f64 / m);
    Ok(DistanceEstimate {
        kind: DistanceKind::Kolmogorov,
        value,
        reps: t.len(),
        stderr: 0.0,
    })
}

/// [`kolmogorov_empirical_vs_normal`] plus a bootstrap standard error.
pub fn kolmogorov_empirical_vs_normal_with_stderr(
    samples: &[f64],
    seed: u64,
) -> Result<DistanceEstimate> {
    let t = SupportTables::new(checked_sorted(samples)?);
    let m = t.len() as f64;
    let value = kolmogorov_plateaus(&t, &|i| (i + 1) as f64 / m);
    let stderr = bootstrap_stderr(&t, DistanceKind::Kolmogorov, seed);
    Ok(DistanceEstimate {
        kind: DistanceKind::Kolmogorov,
        value,
        reps: t.len(),
        stderr,
    })
}

fn checked_atoms(atoms: &[f64], probs: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if atoms.is_empty() {
        return Err(Error::EmptySample);
    }
    if atoms.len() != probs.len() {
        return Err(Error::LengthMismatch(atoms.len(), probs.len()));
    }
    if atoms.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("atoms must be finite".into()));
    }
    if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(Error::Domain("probabilities must be non-negative".into()));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "probabilities must sum to 1, got {total}"
        )));
    }
    let mut pairs: Vec<(f64, f64)> = atoms.iter().copied().zip(probs.iter().copied()).collect();
    pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

/// Exact Wasserstein distance between a finitely supported law and the
/// standard normal. `probs` must be non-negative and sum to 1 (within 1e-9).
pub fn wasserstein_discrete_vs_normal(atoms: &[f64], probs: &[f64]) -> Result<f64> {
    let (xs, ps) = checked_atoms(atoms, probs)?;
    let t = SupportTables::new(xs);
    let cum = cumulative(&ps);
    Ok(wasserstein_plateaus(&t, &|i| cum[i]))
}

/// Exact Kolmogorov distance between a finitely supported law and the
/// standard normal.
pub fn kolmogorov_discrete_vs_normal(atoms: &[f64], probs: &[f64]) -> Result<f64> {
    let (xs, ps) = checked_atoms(atoms, probs)?;
    let t = SupportTables::new(xs);
    let cum = cumulative(&ps);
    Ok(kolmogorov_plateaus(&t, &|i| cum[i]))
}

/// Running totals of `ps`, with the final entry forced to exactly 1 so the
/// right tail closes regardless of rounding in the partial sums.
fn cumulative(ps: &[f64]) -> Vec<f64> {
    let mut cum = Vec::with_capacity(ps.len());
    let mut run = 0.0;
    for &p in ps {
        run += p;
        cum.push(run.min(1.0));
    }
    *cum.last_mut().expect("nonempty") = 1.0;
    cum
}

/// Exact Wasserstein distance between two empirical laws on samples of equal
/// size: the mean absolute difference of order statistics.
pub fn wasserstein_sample_vs_sample(xs: &[f64], ys: &[f64]) -> Result<DistanceEstimate> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    let xs = checked_sorted(xs)?;
    let ys = checked_sorted(ys)?;
    let gaps: Vec<f64> = xs.iter().zip(&ys).map(|(a, b)| (a - b).abs()).collect();
    Ok(DistanceEstimate {
        kind: DistanceKind::Wasserstein,
        value: pairwise_mean(&gaps),
        reps: xs.len(),
        stderr: 0.0,
    })
}

/// Seed for bootstrap resampling, derived from the run seed and the sample
/// size so it never collides with path-simulation streams.
pub fn derive_bootstrap_seed(run_seed: u64, len: usize) -> u64 {
    crate::rng::derive_seed(run_seed, 0xB007 ^ (len as u64).rotate_left(17))
}

/// Bootstrap standard error of a plateau distance: resample multiplicities
/// over the fixed sorted support, recompute, take the standard deviation.
/// Resamples are keyed streams, so the result is thread-count independent.
fn bootstrap_stderr(t: &SupportTables, kind: DistanceKind, seed: u64) -> f64 {
    let m = t.len();
    let values: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(seed, r as u64, 0, LANE_BOOTSTRAP);
            let mut counts = vec![0u32; m];
            for _ in 0..m {
                counts[rng.gen_range(0..m)] += 1;
            }
            let mut cum = Vec::with_capacity(m);
            let mut run = 0u64;
            for &c in &counts {
                run += c as u64;
                cum.push(run as f64 / m as f64);
            }
            match kind {
                DistanceKind::Wasserstein => wasserstein_plateaus(t, &|i| cum[i]),
                DistanceKind::Kolmogorov => kolmogorov_plateaus(t, &|i| cum[i]),
            }
        })
        .collect();
    sd_and_stderr(&values).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::LANE_MODEL;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    /// Independent oracle for Φ: Taylor series for erf near 0, Legendre
    /// continued fraction for erfc in the tails, both summed well past f64
    /// precision. Only used to cross-check `normal_cdf`.
    fn cdf_oracle(x: f64) -> f64 {
        let z = x / std::f64::consts::SQRT_2;
        if z < 0.0 {
            return 1.0 - cdf_oracle(-x);
        }
        if z < 1.5 {
            // erf(z) = 2/√π · Σ (-1)^k z^(2k+1) / (k! (2k+1))
            let mut term = z;
            let mut sum = z;
            let mut comp = 0.0; // Kahan compensation
            for k in 1..200 {
                term *= -z * z / k as f64;
                let add = term / (2 * k + 1) as f64;
                let y = add - comp;
                let t = sum + y;
                comp = (t - sum) - y;
                sum = t;
                if add.abs() < 1e-20 * sum.abs() {
                    break;
                }
            }
            let erf = 2.0 / std::f64::consts::PI.sqrt() * sum;
            0.5 + 0.5 * erf
        } else {
            // erfc(z) = e^{-z²}/√π · 1/(z + 1/2/(z + 2/2/(z + 3/2/(z + ...))))
            let mut f = 0.0;
            for k in (1..=120).rev() {
                f = 0.5 * k as f64 / (z + f);
            }
            let erfc = (-z * z).exp() / std::f64::consts::PI.sqrt() / (z + f);
            1.0 - 0.5 * erfc
        }
    }

    #[test]
    fn cdf_matches_series_oracle_everywhere() {
        let mut worst = 0.0_f64;
        let mut i = 0;
        let mut x = -8.0;
        while x <= 8.0 {
            let err = (normal_cdf(x) - cdf_oracle(x)).abs();
            worst = worst.max(err);
            i += 1;
            x = -8.0 + 0.037 * i as f64;
        }
        assert!(worst <= 1e-14, "worst |cdf - oracle| = {worst:.3e}");
    }

    #[test]
    fn cdf_frozen_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.0) - 0.841344746).abs() < 1e-9);
        assert!((normal_cdf(-1.0) - 0.158655254).abs() < 1e-9);
    }

    #[test]
    fn cdf_symmetry() {
        for &x in &[0.1, 0.5, 1.0, 2.0, 3.3, 5.0, 7.5] {
            assert!(
                (normal_cdf(x) + normal_cdf(-x) - 1.0).abs() < 1e-15,
                "symmetry fails at {x}"
            );
        }
    }

    #[test]
    fn quantile_frozen_values() {
        assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
        assert!((normal_quantile(0.975).unwrap() - 1.95996398).abs() < 1e-7);
        let x = normal_quantile(normal_cdf(1.3)).unwrap();
        assert!((x - 1.3).abs() < 1e-12, "roundtrip gave {x}");
    }

    #[test]
    fn quantile_rejects_out_of_domain() {
        for p in [0.0, 1.0, -0.2, 1.7, f64::NAN] {
            assert!(matches!(normal_quantile(p), Err(Error::Domain(_))));
        }
    }

    proptest! {
        #[test]
        fn quantile_inverts_cdf(p in 1e-12..=0.999_999_999_999_f64) {
            let x = normal_quantile(p).unwrap();
            prop_assert!((normal_cdf(x) - p).abs() <= 1e-13);
        }

        #[test]
        fn wasserstein_is_translation_lipschitz(
            xs in prop::collection::vec(-3.0..3.0_f64, 1..40),
            c in -1.0..1.0_f64,
        ) {
            let base = wasserstein_empirical_vs_normal(&xs).unwrap().value;
            let shifted: Vec<f64> = xs.iter().map(|v| v + c).collect();
            let moved = wasserstein_empirical_vs_normal(&shifted).unwrap().value;
            prop_assert!((moved - base).abs() <= c.abs() + 1e-9);
        }

        #[test]
        fn kolmogorov_matches_dense_grid_brute_force(
            xs in prop::collection::vec(-4.0..4.0_f64, 1..10),
        ) {
            let fast = kolmogorov_empirical_vs_normal(&xs).unwrap().value;
            // Brute force: evaluate |F_M - Φ| on a dense grid plus both
            // sides of every jump.
            let mut sorted = xs.clone();
            sorted.sort_unstable_by(f64::total_cmp);
            let m = sorted.len() as f64;
            let emp = |x: f64| sorted.iter().filter(|&&s| s <= x).count() as f64 / m;
            let mut candidates: Vec<f64> = (0..2000).map(|i| -5.0 + i as f64 * 0.005).collect();
            for &s in &sorted {
                candidates.push(s);
                candidates.push(s - 1e-13);
            }
            let brute = candidates
                .iter()
                .map(|&x| (emp(x) - normal_cdf(x)).abs())
                .fold(0.0_f64, f64::max);
            prop_assert!((fast - brute).abs() <= 1e-12, "fast {fast} brute {brute}");
        }
    }

    #[test]
    fn wasserstein_single_point_at_origin() {
        // ∫|1[x≥0] - Φ| = 2φ(0) = E|Z|
        let d = wasserstein_empirical_vs_normal(&[0.0]).unwrap();
        assert!((d.value - 0.7978845608).abs() < 1e-9, "got {}", d.value);
        assert_eq!(d.reps, 1);
        assert_eq!(d.stderr, 0.0);
    }

    #[test]
    fn wasserstein_symmetric_pair() {
        // Hand-split integral: 2[(φ(1) - Φ(-1)) + (Φ(1) + φ(1) - φ(0) - 1/2)]
        let d = wasserstein_empirical_vs_normal(&[-1.0, 1.0]).unwrap().value;
        assert!((d - 0.5353772).abs() < 1e-6, "got {d}");
        let exact = 2.0
            * ((normal_pdf(1.0) - normal_cdf(-1.0))
                + (normal_cdf(1.0) + normal_pdf(1.0) - normal_pdf(0.0) - 0.5));
        assert!((d - exact).abs() < 1e-12, "got {d}, closed form {exact}");
    }

    #[test]
    fn wasserstein_quantile_grid_is_small() {
        let m = 10_000;
        let xs: Vec<f64> = (1..=m)
            .map(|i| normal_quantile((i as f64 - 0.5) / m as f64).unwrap())
            .collect();
        let d = wasserstein_empirical_vs_normal(&xs).unwrap().value;
        // within-cell deviations integrate to about (x_max - x_min)/(4m)
        // plus the two tails beyond the extreme atoms, about 2.2e-4 here
        assert!(d < 3e-4, "quantile grid distance {d}");
        assert!(d > 1e-4, "quantile grid distance {d}");
    }

    #[test]
    fn wasserstein_large_normal_sample_is_small() {
        let xs: Vec<f64> = (0..1_000_000)
            .map(|i| {
                let mut r = stream(99, i, 0, LANE_MODEL);
                r.sample(StandardNormal)
            })
            .collect();
        let d = wasserstein_empirical_vs_normal(&xs).unwrap().value;
        assert!(d < 0.005, "distance {d}");
        let k = kolmogorov_empirical_vs_normal(&xs).unwrap().value;
        assert!(k < 0.002, "kolmogorov {k}");
    }

    #[test]
    fn two_independent_normal_samples_are_close() {
        let draw = |salt: u64| -> Vec<f64> {
            (0..1_000_000)
                .map(|i| {
                    let mut r = stream(salt, i, 0, LANE_MODEL);
                    r.sample(StandardNormal)
                })
                .collect()
        };
        let d = wasserstein_sample_vs_sample(&draw(1), &draw(2)).unwrap();
        assert!(d.value < 0.005, "distance {}", d.value);
    }

    #[test]
    fn duplicates_match_the_atomic_law() {
        let emp = wasserstein_empirical_vs_normal(&[1.0, 1.0, 1.0])
            .unwrap()
            .value;
        let atom = wasserstein_discrete_vs_normal(&[1.0], &[1.0]).unwrap();
        assert!((emp - atom).abs() < 1e-15);
    }

    #[test]
    fn discrete_law_matches_empirical_with_uniform_weights() {
        let xs = [-1.3, -0.2, 0.4, 2.2];
        let emp = wasserstein_empirical_vs_normal(&xs).unwrap().value;
        let disc = wasserstein_discrete_vs_normal(&xs, &[0.25; 4]).unwrap();
        assert!((emp - disc).abs() < 1e-14);
        let ke = kolmogorov_empirical_vs_normal(&xs).unwrap().value;
        let kd = kolmogorov_discrete_vs_normal(&xs, &[0.25; 4]).unwrap();
        assert!((ke - kd).abs() < 1e-14);
    }

    #[test]
    fn kolmogorov_frozen_values() {
        assert_eq!(kolmogorov_empirical_vs_normal(&[0.0]).unwrap().value, 0.5);
        let k = kolmogorov_empirical_vs_normal(&[-1.0, 1.0]).unwrap().value;
        assert!((k - 0.341344746).abs() < 1e-9, "got {k}");
    }

    #[test]
    fn sample_vs_sample_frozen_values() {
        let same = wasserstein_sample_vs_sample(&[0.3, -1.2, 4.0], &[0.3, -1.2, 4.0]).unwrap();
        assert_eq!(same.value, 0.0);
        let shift = wasserstein_sample_vs_sample(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(shift.value, 1.0);
        let interleaved = wasserstein_sample_vs_sample(&[0.0, 2.0], &[1.0, 3.0]).unwrap();
        assert_eq!(interleaved.value, 1.0);
    }

    #[test]
    fn error_cases() {
        assert!(matches!(
            wasserstein_empirical_vs_normal(&[]),
            Err(Error::EmptySample)
        ));
        assert!(matches!(
            wasserstein_sample_vs_sample(&[1.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch(1, 2))
        ));
        assert!(matches!(
            wasserstein_empirical_vs_normal(&[f64::INFINITY]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            wasserstein_discrete_vs_normal(&[0.0, 1.0], &[0.7, 0.7]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn bootstrap_is_deterministic_and_sane() {
        let xs: Vec<f64> = (0..2_000)
            .map(|i| {
                let mut r = stream(7, i, 0, LANE_MODEL);
                r.sample(StandardNormal)
            })
            .collect();
        let a = wasserstein_empirical_vs_normal_with_stderr(&xs, 123).unwrap();
        let b = wasserstein_empirical_vs_normal_with_stderr(&xs, 123).unwrap();
        assert_eq!(a.stderr, b.stderr);
        assert!(a.stderr > 0.0);
        // Bootstrap noise for a 2000-point sample is of order 1/sqrt(2000).
        assert!(a.stderr < 0.05, "stderr {}", a.stderr);
        let c = wasserstein_empirical_vs_normal_with_stderr(&xs, 124).unwrap();
        assert_ne!(a.stderr, c.stderr);
    }
}
