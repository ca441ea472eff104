//! Gaussian completion: embed a martingale with random total conditional
//! variance into one whose V² is constant by construction.
//!
//! The wrapper runs the base model while its running variance stays at or
//! below the target s², truncating at the last such step τ, then spends the
//! leftover s² - V_τ² in Gaussian fill steps: whole fills of variance
//! β^(2/3), one remainder fill, and zero-variance padding out to 2n steps.
//! The completed sums can then be fed to any bound that insists on constant
//! total variance.
//!
//! Fill draws come from a dedicated stream lane keyed by the same
//! `(seed, replicate, step)` as the base draws, so a completed path and its
//! base path share the base segment exactly. That coupling is what
//! `coupling_check` measures.

use crate::models::{
    check_martingale_property, simulate_path, MartingaleCheck, MartingaleModel,
    ModelCertificates, PathRecord, PathSim, NORMAL_ABS3,
};
use crate::rng::{stream, LANE_FILL};
use crate::sum::sd_and_stderr;
use crate::{fold_paths, Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;

/// Replicates used to pin the variance target when the base model has no
/// closed-form s². Fixed so that two completions of the same base agree.
const TARGET_REPS: usize = 100_000;
const TARGET_SEED: u64 = 0x7A26_57E1;

/// A base model plus its Gaussian fill schedule. Total length is `2n`.
#[derive(Clone, Debug)]
pub struct CompletedModel {
    base: MartingaleModel,
    beta: f64,
    n2: usize,
    s2_target: f64,
}

/// Wrap `base` so that every path ends with total conditional variance
/// exactly `s²` (the base's exact value, or a pinned high-replicate estimate
/// when no closed form exists). `beta` sets the fill granularity β^(2/3);
/// paths whose fill schedule cannot fit in the 2n available steps fail at
/// simulation time with a "beta too small" error.
pub fn complete_to_constant_variance(
    base: MartingaleModel,
    beta: f64,
) -> Result<CompletedModel> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::InvalidParam {
            param: "beta".into(),
            reason: format!("need a finite beta > 0, got {beta}"),
        });
    }
    let s2_target = match base.exact_s2() {
        Some(v) => v,
        None => {
            let sum = fold_paths(
                &base,
                TARGET_REPS,
                TARGET_SEED,
                || 0.0,
                |acc, _, p| *acc += p.v2_end(),
                |a, b| a + b,
            );
            sum / TARGET_REPS as f64
        }
    };
    Ok(CompletedModel {
        n2: 2 * base.n(),
        base,
        beta,
        s2_target,
    })
}

impl CompletedModel {
    pub fn base(&self) -> &MartingaleModel {
        &self.base
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The constant total conditional variance every completed path hits.
    pub fn s2_target(&self) -> f64 {
        self.s2_target
    }

    /// Variance of a whole fill step.
    pub fn fill_variance(&self) -> f64 {
        self.beta.powf(2.0 / 3.0)
    }

    /// Truncation step and fill schedule for one base path: the largest
    /// τ with V_τ² ≤ s², then (τ, whole fills, remainder variance).
    fn schedule(&self, base_path: &PathRecord) -> (usize, usize, f64) {
        let v2 = &base_path.v2;
        let mut tau = 0;
        for m in (0..v2.len()).rev() {
            if v2[m] <= self.s2_target {
                tau = m;
                break;
            }
        }
        let leftover = self.s2_target - v2[tau];
        let vf = self.fill_variance();
        let whole = (leftover / vf).floor() as usize;
        let rem = leftover - whole as f64 * vf;
        (tau, whole, rem)
    }

    /// Simulate, reporting schedule overflow instead of panicking.
    pub fn try_sim_into(&self, seed: u64, replicate: u64, path: &mut PathRecord) -> Result<()> {
        let base_path = simulate_path(&self.base, replicate, seed);
        let (tau, whole, rem) = self.schedule(&base_path);
        let needed = tau + whole + usize::from(rem > 0.0);
        if needed > self.n2 {
            return Err(Error::BetaTooSmall {
                replicate,
                tau,
                needed,
            });
        }
        path.clear();
        for k in 0..tau {
            path.push(base_path.x[k], base_path.sigma2[k]);
        }
        let vf = self.fill_variance();
        for k in tau..self.n2 {
            let v = if k < tau + whole {
                vf
            } else if k == tau + whole && rem > 0.0 {
                rem
            } else {
                0.0
            };
            let x = if v > 0.0 {
                let mut rng = stream(seed, replicate, k as u64, LANE_FILL);
                let z: f64 = rng.sample(StandardNormal);
                z * v.sqrt()
            } else {
                0.0
            };
            path.push(x, v);
        }
        path.finalize();
        Ok(())
    }
}

impl PathSim for CompletedModel {
    fn id(&self) -> &str {
        "completed"
    }

    fn steps(&self) -> usize {
        self.n2
    }

    fn certificates(&self) -> ModelCertificates {
        let base = self.base.certificates();
        // fills satisfy E|fill|³ = v^{3/2}·E|Z|³ ≤ min(1.6β, 1.6β^{1/3}·v)
        let fill_third = 1.6 * self.beta;
        let fill_slope = 1.6 * self.beta.powf(1.0 / 3.0);
        ModelCertificates {
            satisfies_condition2: true,
            martingale: base.martingale,
            // padding steps have σ² = 0
            alpha: 0.0,
            gamma: None,
            beta: base.beta.map(|b| b.max(fill_third)),
            delta: base.delta.map(|d| d.max(fill_slope)),
        }
    }

    fn exact_s2(&self) -> Option<f64> {
        Some(self.s2_target)
    }

    fn exact_moments(&self) -> Option<crate::models::ModelMoments> {
        // per-step moments depend on the distribution of τ
        None
    }

    fn sim_into(&self, seed: u64, replicate: u64, path: &mut PathRecord) {
        if let Err(e) = self.try_sim_into(seed, replicate, path) {
            panic!("{e}");
        }
    }
}

/// What `verify_completion` measured.
#[derive(Clone, Debug)]
pub struct CompletionReport {
    /// max over paths of |V²/s² - 1|; must be ≤ 1e-9.
    pub max_rel_dev: f64,
    /// max over fill steps of E|fill|³ / min(1.6β, max(1.6β^{1/3}, δ)·v);
    /// must be ≤ 1.
    pub worst_fill_ratio: f64,
    pub martingale: MartingaleCheck,
    pub reps_used: usize,
}

/// Check the completion invariants over a fresh ensemble: every path's
/// total conditional variance hits the target to within 1e-9 relative,
/// every fill step's third moment respects the inflated certificate, and
/// the completed increments still pass the martingale check.
pub fn verify_completion(
    model: &CompletedModel,
    reps: usize,
    seed: u64,
) -> Result<CompletionReport> {
    if reps < 1000 {
        return Err(Error::InsufficientReplicates {
            context: "completion verification",
            got: reps,
            need: 1000,
        });
    }
    let s2 = model.s2_target();
    let third_cap = 1.6 * model.beta();
    let slope = (1.6 * model.beta().powf(1.0 / 3.0))
        .max(model.base().certificates().delta.unwrap_or(0.0));
    let mut max_rel_dev = 0.0f64;
    let mut worst_fill_ratio = 0.0f64;
    let mut cpath = PathRecord::default();
    for r in 0..reps as u64 {
        let bpath = simulate_path(model.base(), r, seed);
        let (tau, _, _) = model.schedule(&bpath);
        model.try_sim_into(seed, r, &mut cpath)?;
        let dev = (cpath.v2_end() / s2 - 1.0).abs();
        max_rel_dev = max_rel_dev.max(dev);
        if dev > 1e-9 {
            return Err(Error::CompletionInvariant {
                replicate: r,
                what: format!("total conditional variance off target by {dev:.3e} relative"),
            });
        }
        for (k, (&x, &v)) in cpath.x.iter().zip(&cpath.sigma2).enumerate() {
            if !x.is_finite() {
                return Err(Error::CompletionInvariant {
                    replicate: r,
                    what: format!("non-finite increment at step {}", k + 1),
                });
            }
            if v == 0.0 && x != 0.0 {
                return Err(Error::CompletionInvariant {
                    replicate: r,
                    what: format!("zero-variance step {} drew {x}", k + 1),
                });
            }
            if k >= tau && v > 0.0 {
                // a Gaussian fill of variance v has third moment
                // v^{3/2}·E|Z|³, which the inflated certificate must cover
                let ratio = v.powf(1.5) * NORMAL_ABS3 / third_cap.min(slope * v);
                worst_fill_ratio = worst_fill_ratio.max(ratio);
                if ratio > 1.0 {
                    return Err(Error::CompletionInvariant {
                        replicate: r,
                        what: format!(
                            "fill step {} third moment exceeds its certificate by factor {ratio:.6}",
                            k + 1
                        ),
                    });
                }
            }
        }
    }
    let martingale = check_martingale_property(model, reps.max(10_000), seed)?;
    Ok(CompletionReport {
        max_rel_dev,
        worst_fill_ratio,
        martingale,
        reps_used: reps,
    })
}

/// Empirical sides of the coupling inequality
/// `E|S_n - S̃_2n| ≤ √2·(E|V_n² - s_n²|)^{1/2}`.
#[derive(Clone, Debug)]
pub struct CouplingStats {
    /// Mean absolute gap between coupled base and completed sums.
    pub mean_abs_gap: f64,
    /// Monte Carlo standard error of the gap mean.
    pub stderr: f64,
    /// `√2·(E|V_n² - s²|)^{1/2}`, estimated from the same paths.
    pub rhs: f64,
    pub reps_used: usize,
}

/// Simulate coupled (base, completed) path pairs sharing every base draw
/// and measure both sides of the coupling inequality.
pub fn coupling_check(
    base: &MartingaleModel,
    beta: f64,
    reps: usize,
    seed: u64,
) -> Result<CouplingStats> {
    if reps == 0 {
        return Err(Error::InsufficientReplicates {
            context: "coupling check",
            got: 0,
            need: 1,
        });
    }
    let completed = complete_to_constant_variance(base.clone(), beta)?;
    let s2 = completed.s2_target();
    let mut gaps = Vec::with_capacity(reps);
    let mut v_dev_sum = 0.0;
    let mut cpath = PathRecord::default();
    for r in 0..reps as u64 {
        let bpath = simulate_path(base, r, seed);
        completed.try_sim_into(seed, r, &mut cpath)?;
        gaps.push((bpath.s_end - cpath.s_end).abs());
        v_dev_sum += (bpath.v2_end() - s2).abs();
    }
    let (_, stderr) = sd_and_stderr(&gaps);
    Ok(CouplingStats {
        mean_abs_gap: crate::pairwise_sum(&gaps) / reps as f64,
        stderr,
        rhs: (2.0 * v_dev_sum / reps as f64).sqrt(),
        reps_used: reps,
    })
}
