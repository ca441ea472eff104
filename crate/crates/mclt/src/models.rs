//! Martingale difference models with known moment structure.
//!
//! Each model produces increments `X_1, ..., X_n` adapted to their own
//! history, with conditional variances `σ_k² = E(X_k² | F_{k-1})` available
//! *before* the step is drawn (the completion construction needs that peek).
//! Everything about a model that a bound may legitimately use is exposed as
//! data: per-step moments where they have closed forms, and
//! [`ModelCertificates`] naming the structural assumptions the model
//! actually satisfies.
//!
//! Simulation is deterministic: step `k` of replicate `r` reads from the
//! counter stream keyed `(seed, r, k)`, so ensembles are reproducible
//! bit-for-bit at any thread count, and a wrapper that replays a base path
//! sees identical draws.

use crate::rng::{stream, StreamRng, LANE_MODEL};
use crate::{Error, Result};
use rand::Rng;
use rayon::prelude::*;

/// E|Z|³ for standard normal Z, i.e. 2·√(2/π).
pub const NORMAL_ABS3: f64 = 1.5957691216057308;

/// Structural assumptions a model certifies, consumed by bound dispatch.
///
/// `alpha` is a uniform lower bound on every conditional variance (0 means
/// "no certificate"). `gamma` bounds the unconditional third moment
/// `E|X_k|³`. `beta` and `delta` bound the *conditional* third moment:
/// `E(|X_k|³ | F_{k-1}) ≤ min(beta, delta·σ_k²)`.
#[derive(Clone, Copy, Debug)]
pub struct ModelCertificates {
    /// Total conditional variance is a.s. constant: `V_n² = s_n²`.
    pub satisfies_condition2: bool,
    /// Increments are honestly centered given the past.
    pub martingale: bool,
    pub alpha: f64,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub delta: Option<f64>,
}

/// Unconditional per-step quantities (all arrays have one entry per step).
#[derive(Clone, Debug)]
pub struct ModelMoments {
    /// σ̄_k² = E σ_k².
    pub sigma_bar2: Vec<f64>,
    /// s_n² = Σ σ̄_k².
    pub s2: f64,
    /// ρ̄_k² = Σ_{i≥k} σ̄_i² (so `rho_bar2[0]` = s2 exactly).
    pub rho_bar2: Vec<f64>,
    /// E|X_k|³.
    pub abs3: Vec<f64>,
    /// E|σ_k² - σ̄_k²|.
    pub var_dev: Vec<f64>,
    /// E|V_n²/s_n² - 1|.
    pub cond2_dev: f64,
    /// Replicates consumed (0 when analytic).
    pub reps_used: usize,
    /// True when the arrays are exact model constants.
    pub analytic: bool,
}

impl ModelMoments {
    /// Assemble from per-step arrays, deriving `rho_bar2` by suffix sums so
    /// that `rho_bar2[0] = s2` holds exactly.
    pub fn from_steps(
        sigma_bar2: Vec<f64>,
        abs3: Vec<f64>,
        var_dev: Vec<f64>,
        cond2_dev: f64,
        reps_used: usize,
        analytic: bool,
    ) -> Self {
        let n = sigma_bar2.len();
        let mut rho_bar2 = vec![0.0; n];
        let mut run = 0.0;
        for k in (0..n).rev() {
            run += sigma_bar2[k];
            rho_bar2[k] = run;
        }
        ModelMoments {
            s2: rho_bar2.first().copied().unwrap_or(0.0),
            sigma_bar2,
            rho_bar2,
            abs3,
            var_dev,
            cond2_dev,
            reps_used,
            analytic,
        }
    }
}

/// One simulated trajectory with full conditional-variance bookkeeping.
///
/// `v2` holds the running sums V_k² with `v2[0] = 0`; `rho2[k]` is the
/// remaining-variance tail `V_n² - V_k²` ahead of step k+1, defined as
/// `v2[n] - v2[k]` exactly.
#[derive(Clone, Debug, Default)]
pub struct PathRecord {
    pub x: Vec<f64>,
    pub sigma2: Vec<f64>,
    pub v2: Vec<f64>,
    pub rho2: Vec<f64>,
    pub s_end: f64,
}

impl PathRecord {
    pub(crate) fn clear(&mut self) {
        self.x.clear();
        self.sigma2.clear();
        self.v2.clear();
        self.rho2.clear();
        self.s_end = 0.0;
    }

    pub(crate) fn push(&mut self, x: f64, sigma2: f64) {
        self.x.push(x);
        self.sigma2.push(sigma2);
    }

    /// Fill `v2`, `rho2`, `s_end` from the recorded steps.
    pub(crate) fn finalize(&mut self) {
        let n = self.x.len();
        self.v2.clear();
        self.v2.push(0.0);
        let mut run = 0.0;
        for &s in &self.sigma2 {
            run += s;
            self.v2.push(run);
        }
        let total = self.v2[n];
        self.rho2.clear();
        self.rho2.extend((0..n).map(|k| total - self.v2[k]));
        self.s_end = self.x.iter().sum();
    }

    /// Realized total conditional variance V_n².
    pub fn v2_end(&self) -> f64 {
        *self.v2.last().unwrap_or(&0.0)
    }
}

/// Anything that can simulate paths reproducibly and describe itself to the
/// bound layer. Implemented by [`MartingaleModel`] and the completion
/// wrapper.
pub trait PathSim: Sync {
    fn id(&self) -> &str;
    /// Path length (the completion wrapper pads beyond the base model's n).
    fn steps(&self) -> usize;
    fn certificates(&self) -> ModelCertificates;
    /// s_n², when it has a closed form.
    fn exact_s2(&self) -> Option<f64>;
    /// Per-step moments, when they have closed forms.
    fn exact_moments(&self) -> Option<ModelMoments>;
    /// Simulate one full path into `path` (clearing it first).
    fn sim_into(&self, seed: u64, replicate: u64, path: &mut PathRecord);
}

/// Simulate one path. Deterministic in `(model, replicate_index, seed)`,
/// independent of execution order.
pub fn simulate_path<M: PathSim + ?Sized>(model: &M, replicate_index: u64, seed: u64) -> PathRecord {
    let mut p = PathRecord::default();
    model.sim_into(seed, replicate_index, &mut p);
    p
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    Rademacher,
    PairSwap { u: f64 },
    Drifting { theta: f64 },
    Asymmetric { p: f64 },
    Biased { bias: f64 },
    TwoStep { v_hi: f64, v_lo: f64 },
}

/// A member of the model zoo. Build through the named constructors, which
/// validate parameters.
#[derive(Clone, Debug)]
pub struct MartingaleModel {
    kind: Kind,
    n: usize,
}

/// Evolving per-path state. `cond_variance` reads it, `advance` consumes one
/// step of randomness and updates it.
#[derive(Clone, Debug)]
pub enum SimState {
    Iid { k: usize },
    /// `t` is the running sum of the ±1 innovations; `eps` the variance
    /// swap sign for the current pair.
    PairSwap { k: usize, t: i64, eps: f64 },
    /// `s` is the running martingale sum.
    Drifting { k: usize, s: f64 },
    TwoStep { k: usize, sigma2: f64 },
}

impl SimState {
    /// Index of the next step to draw (0-based).
    pub fn step(&self) -> usize {
        match self {
            SimState::Iid { k }
            | SimState::PairSwap { k, .. }
            | SimState::Drifting { k, .. }
            | SimState::TwoStep { k, .. } => *k,
        }
    }
}

fn rademacher_draw(rng: &mut StreamRng) -> f64 {
    if rng.gen::<bool>() {
        1.0
    } else {
        -1.0
    }
}

fn require(cond: bool, param: &str, reason: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParam {
            param: param.into(),
            reason: reason.into(),
        })
    }
}

/// P(symmetric ±1 walk of length m sits at 0) = C(m, m/2)·2^(-m) for even m.
fn walk_at_zero(m: usize) -> f64 {
    if m == 0 {
        return 1.0;
    }
    if m % 2 == 1 {
        return 0.0;
    }
    let mf = m as f64;
    let ln_choose = libm::lgamma(mf + 1.0) - 2.0 * libm::lgamma(mf / 2.0 + 1.0);
    (ln_choose - mf * std::f64::consts::LN_2).exp()
}

impl MartingaleModel {
    /// Independent ±1 steps: σ_k² ≡ 1, V_n² = s_n² = n on every path.
    pub fn rademacher(n: usize) -> Result<Self> {
        require(n >= 1, "n", "need n >= 1")?;
        Ok(MartingaleModel {
            kind: Kind::Rademacher,
            n,
        })
    }

    /// Steps come in consecutive pairs sharing a variance budget of 2.
    /// Within pair j the first slot takes σ² = 1 + u·ε and the second
    /// 1 - u·ε, where ε is the sign of the running ±1 innovation sum at the
    /// pair boundary (+1 at zero), and X_k = ±σ_k equiprobable. Conditional
    /// variances are genuinely random from the second pair on, yet
    /// V_n² = n always.
    pub fn pairswap(n: usize, u: f64) -> Result<Self> {
        require(
            n >= 2 && n % 2 == 0,
            "n",
            "pairswap pairs steps, need even n >= 2",
        )?;
        require(u.is_finite() && (0.0..1.0).contains(&u), "u", "need 0 <= u < 1")?;
        Ok(MartingaleModel {
            kind: Kind::PairSwap { u },
            n,
        })
    }

    /// X_k = ±(1 + θ·1[S_{k-1} > 0]) equiprobable: the step variance jumps
    /// whenever the partial sum is positive. Violates condition 2.
    pub fn drifting_variance(n: usize, theta: f64) -> Result<Self> {
        require(n >= 1, "n", "need n >= 1")?;
        require(
            theta.is_finite() && theta >= 0.0,
            "theta",
            "need theta >= 0",
        )?;
        Ok(MartingaleModel {
            kind: Kind::Drifting { theta },
            n,
        })
    }

    /// Independent steps on {-p, 1-p} with probabilities {1-p, p}, scaled
    /// to unit variance: skewed third moments, deterministic σ_k² = 1.
    pub fn asymmetric_two_point(n: usize, p: f64) -> Result<Self> {
        require(n >= 1, "n", "need n >= 1")?;
        require(p.is_finite() && p > 0.0 && p < 1.0, "p", "need 0 < p < 1")?;
        Ok(MartingaleModel {
            kind: Kind::Asymmetric { p },
            n,
        })
    }

    /// Deliberately broken fixture: steps ε_k + bias are *not* conditionally
    /// centered. Exists to exercise the martingale property check; its
    /// declared variances pretend σ_k² = 1.
    pub fn biased(n: usize, bias: f64) -> Result<Self> {
        require(n >= 1, "n", "need n >= 1")?;
        require(bias.is_finite() && bias >= 0.0, "bias", "need bias >= 0")?;
        Ok(MartingaleModel {
            kind: Kind::Biased { bias },
            n,
        })
    }

    /// Two steps: X_1 = ±1, then X_2 = ±√(v_hi) if X_1 went up, ±√(v_lo) if
    /// down. The smallest model where V_2² is random; s² = 1 + (v_hi+v_lo)/2.
    pub fn two_step(v_hi: f64, v_lo: f64) -> Result<Self> {
        for (name, v) in [("v_hi", v_hi), ("v_lo", v_lo)] {
            if !v.is_finite() {
                return Err(Error::InvalidParam {
                    param: name.into(),
                    reason: "must be finite".into(),
                });
            }
            if v <= 0.0 {
                return Err(Error::DegenerateModel { step: 2, sigma2: v });
            }
        }
        Ok(MartingaleModel {
            kind: Kind::TwoStep { v_hi, v_lo },
            n: 2,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Fresh state for step 1.
    pub fn start(&self) -> SimState {
        match self.kind {
            Kind::Rademacher | Kind::Asymmetric { .. } | Kind::Biased { .. } => {
                SimState::Iid { k: 0 }
            }
            Kind::PairSwap { .. } => SimState::PairSwap {
                k: 0,
                t: 0,
                eps: 1.0,
            },
            Kind::Drifting { .. } => SimState::Drifting { k: 0, s: 0.0 },
            Kind::TwoStep { .. } => SimState::TwoStep { k: 0, sigma2: 1.0 },
        }
    }

    /// σ² of the *next* step, readable before any randomness is consumed.
    pub fn cond_variance(&self, st: &SimState) -> f64 {
        match (self.kind, st) {
            (Kind::Rademacher, _) | (Kind::Asymmetric { .. }, _) | (Kind::Biased { .. }, _) => 1.0,
            (Kind::PairSwap { u }, SimState::PairSwap { k, eps, .. }) => {
                if k % 2 == 0 {
                    1.0 + u * eps
                } else {
                    1.0 - u * eps
                }
            }
            (Kind::Drifting { theta }, SimState::Drifting { s, .. }) => {
                let scale = if *s > 0.0 { 1.0 + theta } else { 1.0 };
                scale * scale
            }
            (Kind::TwoStep { .. }, SimState::TwoStep { sigma2, .. }) => *sigma2,
            _ => unreachable!("state built by a different model"),
        }
    }

    /// Draw the next increment from `rng`, updating the state. The caller
    /// supplies the stream for the current `(seed, replicate, step)`.
    pub fn advance(&self, st: &mut SimState, rng: &mut StreamRng) -> f64 {
        let sigma2 = self.cond_variance(st);
        match (self.kind, st) {
            (Kind::Rademacher, SimState::Iid { k }) => {
                *k += 1;
                rademacher_draw(rng)
            }
            (Kind::Asymmetric { p }, SimState::Iid { k }) => {
                *k += 1;
                let scale = (p * (1.0 - p)).sqrt();
                if rng.gen::<f64>() < p {
                    (1.0 - p) / scale
                } else {
                    -p / scale
                }
            }
            (Kind::Biased { bias }, SimState::Iid { k }) => {
                *k += 1;
                rademacher_draw(rng) + bias
            }
            (Kind::PairSwap { .. }, SimState::PairSwap { k, t, eps }) => {
                let eta = rademacher_draw(rng);
                let x = eta * sigma2.sqrt();
                *t += eta as i64;
                *k += 1;
                if *k % 2 == 0 {
                    *eps = if *t >= 0 { 1.0 } else { -1.0 };
                }
                x
            }
            (Kind::Drifting { .. }, SimState::Drifting { k, s }) => {
                let x = rademacher_draw(rng) * sigma2.sqrt();
                *s += x;
                *k += 1;
                x
            }
            (Kind::TwoStep { v_hi, v_lo }, SimState::TwoStep { k, sigma2: s2 }) => {
                let eps = rademacher_draw(rng);
                *s2 = if eps > 0.0 { v_hi } else { v_lo };
                *k += 1;
                eps * sigma2.sqrt()
            }
            _ => unreachable!("state built by a different model"),
        }
    }

    fn static_id(&self) -> &'static str {
        match self.kind {
            Kind::Rademacher => "rademacher",
            Kind::PairSwap { .. } => "pairswap",
            Kind::Drifting { .. } => "drifting-variance",
            Kind::Asymmetric { .. } => "asymmetric-two-point",
            Kind::Biased { .. } => "biased",
            Kind::TwoStep { .. } => "twostep",
        }
    }
}

impl PathSim for MartingaleModel {
    fn id(&self) -> &str {
        self.static_id()
    }

    fn steps(&self) -> usize {
        self.n
    }

    fn certificates(&self) -> ModelCertificates {
        match self.kind {
            Kind::Rademacher => ModelCertificates {
                satisfies_condition2: true,
                martingale: true,
                alpha: 1.0,
                gamma: Some(1.0),
                beta: Some(1.0),
                delta: Some(1.0),
            },
            Kind::PairSwap { u } => ModelCertificates {
                satisfies_condition2: true,
                martingale: true,
                alpha: 1.0 - u,
                gamma: Some((1.0 + u).powf(1.5)),
                beta: Some((1.0 + u).powf(1.5)),
                delta: Some((1.0 + u).sqrt()),
            },
            Kind::Drifting { theta } => ModelCertificates {
                satisfies_condition2: false,
                martingale: true,
                alpha: 1.0,
                gamma: Some((1.0 + theta).powi(3)),
                beta: Some((1.0 + theta).powi(3)),
                delta: Some(1.0 + theta),
            },
            Kind::Asymmetric { p } => {
                let m3 = (p * p + (1.0 - p) * (1.0 - p)) / (p * (1.0 - p)).sqrt();
                ModelCertificates {
                    satisfies_condition2: true,
                    martingale: true,
                    alpha: 1.0,
                    gamma: Some(m3),
                    beta: Some(m3),
                    delta: Some(m3),
                }
            }
            Kind::Biased { bias } => {
                let m3 = 0.5 * ((1.0 + bias).powi(3) + (1.0 - bias).abs().powi(3));
                ModelCertificates {
                    satisfies_condition2: true,
                    martingale: false,
                    alpha: 1.0,
                    gamma: Some(m3),
                    beta: Some(m3),
                    delta: Some(m3),
                }
            }
            Kind::TwoStep { v_hi, v_lo } => ModelCertificates {
                satisfies_condition2: false,
                martingale: true,
                alpha: v_hi.min(v_lo).min(1.0),
                gamma: Some(0.5 * (v_hi.powf(1.5) + v_lo.powf(1.5)).max(2.0)),
                beta: Some(v_hi.powf(1.5).max(v_lo.powf(1.5)).max(1.0)),
                delta: Some(v_hi.sqrt().max(v_lo.sqrt()).max(1.0)),
            },
        }
    }

    fn exact_s2(&self) -> Option<f64> {
        match self.kind {
            Kind::Drifting { .. } => None,
            Kind::TwoStep { v_hi, v_lo } => Some(1.0 + 0.5 * (v_hi + v_lo)),
            _ => Some(self.n as f64),
        }
    }

    fn exact_moments(&self) -> Option<ModelMoments> {
        let n = self.n;
        let (sigma_bar2, abs3, var_dev, cond2_dev) = match self.kind {
            Kind::Rademacher => (vec![1.0; n], vec![1.0; n], vec![0.0; n], 0.0),
            Kind::Asymmetric { p } => {
                let m3 = (p * p + (1.0 - p) * (1.0 - p)) / (p * (1.0 - p)).sqrt();
                (vec![1.0; n], vec![m3; n], vec![0.0; n], 0.0)
            }
            Kind::Biased { bias } => {
                let m3 = 0.5 * ((1.0 + bias).powi(3) + (1.0 - bias).abs().powi(3));
                (vec![1.0; n], vec![m3; n], vec![0.0; n], 0.0)
            }
            Kind::PairSwap { u } => {
                let hi = (1.0 + u).powf(1.5);
                let lo = (1.0 - u).powf(1.5);
                let mut sb = Vec::with_capacity(n);
                let mut a3 = Vec::with_capacity(n);
                let mut dv = Vec::with_capacity(n);
                for j in 0..n / 2 {
                    // ε for pair j+1 is the sign of the innovation walk
                    // after 2j steps: E ε = P(walk = 0) by symmetry.
                    let q = walk_at_zero(2 * j);
                    let p_plus = 0.5 * (1.0 + q);
                    let p_minus = 1.0 - p_plus;
                    sb.push(1.0 + u * q);
                    sb.push(1.0 - u * q);
                    a3.push(p_plus * hi + p_minus * lo);
                    a3.push(p_plus * lo + p_minus * hi);
                    let dev = u * (1.0 - q * q);
                    dv.push(dev);
                    dv.push(dev);
                }
                (sb, a3, dv, 0.0)
            }
            Kind::Drifting { .. } => return None,
            Kind::TwoStep { v_hi, v_lo } => {
                let s2 = 1.0 + 0.5 * (v_hi + v_lo);
                (
                    vec![1.0, 0.5 * (v_hi + v_lo)],
                    vec![1.0, 0.5 * (v_hi.powf(1.5) + v_lo.powf(1.5))],
                    vec![0.0, 0.5 * (v_hi - v_lo).abs()],
                    0.5 * (v_hi - v_lo).abs() / s2,
                )
            }
        };
        Some(ModelMoments::from_steps(
            sigma_bar2, abs3, var_dev, cond2_dev, 0, true,
        ))
    }

    fn sim_into(&self, seed: u64, replicate: u64, path: &mut PathRecord) {
        path.clear();
        let mut st = self.start();
        for k in 0..self.n {
            let sigma2 = self.cond_variance(&st);
            let mut rng = stream(seed, replicate, k as u64, LANE_MODEL);
            let x = self.advance(&mut st, &mut rng);
            path.push(x, sigma2);
        }
        path.finalize();
    }
}

/// Replicates per parallel work unit. Fixed so that reductions associate the
/// same way at every thread count.
const CHUNK: usize = 256;

/// Fold an accumulator over `reps` simulated paths, in parallel, with a
/// deterministic merge order. `step` sees the replicate index and the
/// freshly simulated path; `merge` combines chunk accumulators left to
/// right in chunk order.
pub fn fold_paths<M, T, I, S, G>(model: &M, reps: usize, seed: u64, init: I, step: S, merge: G) -> T
where
    M: PathSim + ?Sized,
    T: Send,
    I: Fn() -> T + Sync,
    S: Fn(&mut T, u64, &PathRecord) + Sync,
    G: Fn(T, T) -> T,
{
    let chunks = reps.div_ceil(CHUNK);
    let partials: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            let mut path = PathRecord::default();
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(reps);
            for r in lo..hi {
                model.sim_into(seed, r as u64, &mut path);
                step(&mut acc, r as u64, &path);
            }
            acc
        })
        .collect();
    partials.into_iter().reduce(merge).unwrap_or_else(init)
}

/// Simulate `reps` paths and return their partial sums S_n, in replicate
/// order.
pub fn sample_sums<M: PathSim + ?Sized>(model: &M, reps: usize, seed: u64) -> Vec<f64> {
    let chunks = reps.div_ceil(CHUNK);
    let nested: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut path = PathRecord::default();
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(reps);
            let mut out = Vec::with_capacity(hi - lo);
            for r in lo..hi {
                model.sim_into(seed, r as u64, &mut path);
                out.push(path.s_end);
            }
            out
        })
        .collect();
    nested.into_iter().flatten().collect()
}

/// Per-step moments: closed forms when the model has them (`reps` ignored),
/// otherwise a Monte Carlo estimate needing at least 100 replicates.
pub fn model_moments<M: PathSim + ?Sized>(model: &M, reps: usize, seed: u64) -> Result<ModelMoments> {
    if let Some(m) = model.exact_moments() {
        return Ok(m);
    }
    if reps < 100 {
        return Err(Error::InsufficientReplicates {
            context: "moment estimation",
            got: reps,
            need: 100,
        });
    }
    Ok(model_moments_mc(model, reps, seed))
}

/// Monte Carlo per-step moments. Two passes over the same deterministic
/// ensemble: means first, then mean absolute deviations around them.
pub fn model_moments_mc<M: PathSim + ?Sized>(model: &M, reps: usize, seed: u64) -> ModelMoments {
    let n = model.steps();
    let zero = || (vec![0.0; n], vec![0.0; n]);
    let add = |mut a: (Vec<f64>, Vec<f64>), b: (Vec<f64>, Vec<f64>)| {
        for k in 0..n {
            a.0[k] += b.0[k];
            a.1[k] += b.1[k];
        }
        a
    };
    let (sum_s2, sum_a3) = fold_paths(
        model,
        reps,
        seed,
        zero,
        |acc, _, path| {
            for k in 0..n {
                acc.0[k] += path.sigma2[k];
                acc.1[k] += path.x[k].abs().powi(3);
            }
        },
        add,
    );
    let rf = reps as f64;
    let sigma_bar2: Vec<f64> = sum_s2.iter().map(|v| v / rf).collect();
    let abs3: Vec<f64> = sum_a3.iter().map(|v| v / rf).collect();
    let s2 = crate::pairwise_sum(&sigma_bar2);
    let (sum_dev, sum_c2) = fold_paths(
        model,
        reps,
        seed,
        zero,
        |acc, _, path| {
            for k in 0..n {
                acc.0[k] += (path.sigma2[k] - sigma_bar2[k]).abs();
            }
            acc.1[0] += (path.v2_end() / s2 - 1.0).abs();
        },
        add,
    );
    let var_dev: Vec<f64> = sum_dev.iter().map(|v| v / rf).collect();
    ModelMoments::from_steps(sigma_bar2, abs3, var_dev, sum_c2[0] / rf, reps, false)
}

/// Result of the conditional-centering check.
#[derive(Clone, Debug)]
pub struct MartingaleCheck {
    /// Largest |mean| / stderr over all (step, history bucket) cells.
    pub worst_z: f64,
    /// 1-based step of the worst cell.
    pub step: usize,
    /// Sign history of the worst cell, oldest first (e.g. `+-`).
    pub bucket: String,
    /// Cells with enough mass to be tested.
    pub buckets_tested: usize,
    /// worst_z within the acceptance threshold of 4.
    pub pass: bool,
}

/// Tests E[X_k | F_{k-1}] = 0 empirically: replicates are bucketed by the
/// sign pattern of the preceding (up to two) increments, and each bucket's
/// mean increment is compared against its own standard error. Scores above
/// 4 fail the check; above 6 the model is reported as broken outright.
pub fn check_martingale_property<M: PathSim + ?Sized>(
    model: &M,
    reps: usize,
    seed: u64,
) -> Result<MartingaleCheck> {
    const NEED: usize = 10_000;
    const HIST: usize = 2;
    const MIN_BUCKET: u64 = 50;
    if reps < NEED {
        return Err(Error::InsufficientReplicates {
            context: "martingale property check",
            got: reps,
            need: NEED,
        });
    }
    let n = model.steps();
    type Cell = (u64, f64, f64);
    let zero = || vec![[(0u64, 0.0f64, 0.0f64); 1 << HIST]; n];
    let acc = fold_paths(
        model,
        reps,
        seed,
        zero,
        |acc, _, path| {
            for k in 0..n {
                let b = k.min(HIST);
                let mut pat = 0usize;
                for j in k - b..k {
                    pat = (pat << 1) | (path.x[j] > 0.0) as usize;
                }
                let cell: &mut Cell = &mut acc[k][pat];
                cell.0 += 1;
                cell.1 += path.x[k];
                cell.2 += path.x[k] * path.x[k];
            }
        },
        |mut a, b| {
            for k in 0..n {
                for p in 0..(1 << HIST) {
                    a[k][p].0 += b[k][p].0;
                    a[k][p].1 += b[k][p].1;
                    a[k][p].2 += b[k][p].2;
                }
            }
            a
        },
    );
    let mut worst = MartingaleCheck {
        worst_z: 0.0,
        step: 0,
        bucket: String::new(),
        buckets_tested: 0,
        pass: true,
    };
    for k in 0..n {
        let b = k.min(HIST);
        for pat in 0..(1usize << b) {
            let (m, sum, sumsq) = acc[k][pat];
            if m < MIN_BUCKET {
                continue;
            }
            worst.buckets_tested += 1;
            let mf = m as f64;
            let mean = sum / mf;
            let var = ((sumsq - sum * sum / mf) / (mf - 1.0)).max(0.0);
            let z = if var == 0.0 {
                if mean == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                mean.abs() / (var / mf).sqrt()
            };
            if z > worst.worst_z {
                worst.worst_z = z;
                worst.step = k + 1;
                worst.bucket = (0..b)
                    .rev()
                    .map(|j| if (pat >> j) & 1 == 1 { '+' } else { '-' })
                    .collect();
            }
        }
    }
    worst.pass = worst.worst_z <= 4.0;
    if worst.worst_z > 6.0 {
        return Err(Error::MartingaleViolation {
            worst_z: worst.worst_z,
            step: worst.step,
            bucket: worst.bucket,
        });
    }
    Ok(worst)
}

/// Catalog entry for the CLI's `models list`.
pub struct ModelInfo {
    pub id: &'static str,
    pub summary: &'static str,
    /// (name, default, meaning)
    pub params: &'static [(&'static str, f64, &'static str)],
}

/// Everything buildable from a run configuration.
pub fn catalog() -> &'static [ModelInfo] {
    &[
        ModelInfo {
            id: "rademacher",
            summary: "independent +-1 steps; sigma_k^2 = 1, V_n^2 = n exactly",
            params: &[],
        },
        ModelInfo {
            id: "pairswap",
            summary: "paired steps swapping a shared variance budget; V_n^2 = n exactly (even n)",
            params: &[("u", 0.5, "fraction of the pair budget swapped, 0 <= u < 1")],
        },
        ModelInfo {
            id: "drifting-variance",
            summary: "steps +-(1 + theta) while the partial sum is positive; V_n^2 random",
            params: &[("theta", 0.5, "extra step scale on the positive side, theta >= 0")],
        },
        ModelInfo {
            id: "asymmetric-two-point",
            summary: "independent skewed two-point steps scaled to sigma_k^2 = 1",
            params: &[("p", 0.25, "probability of the positive branch, 0 < p < 1")],
        },
        ModelInfo {
            id: "biased",
            summary: "broken fixture: conditionally non-centered steps (for the martingale check)",
            params: &[("bias", 0.1, "mean offset added to each +-1 draw, bias >= 0")],
        },
        ModelInfo {
            id: "twostep",
            summary: "n = 2; second variance depends on the first sign; V_2^2 random",
            params: &[
                ("v_hi", 2.0, "second-step variance after an up first step"),
                ("v_lo", 1.0, "second-step variance after a down first step"),
            ],
        },
        ModelInfo {
            id: "completed",
            summary: "gaussian completion of a base model (base.* keys) to constant V^2",
            params: &[("beta", 0.0, "fill granularity (0 = base model's beta certificate)")],
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builders_reject_bad_parameters() {
        assert!(matches!(
            MartingaleModel::pairswap(5, 0.5),
            Err(Error::InvalidParam { .. })
        ));
        assert!(matches!(
            MartingaleModel::pairswap(4, 1.0),
            Err(Error::InvalidParam { .. })
        ));
        assert!(matches!(
            MartingaleModel::asymmetric_two_point(8, 0.0),
            Err(Error::InvalidParam { .. })
        ));
        assert!(matches!(
            MartingaleModel::drifting_variance(8, f64::NAN),
            Err(Error::InvalidParam { .. })
        ));
        assert!(matches!(
            MartingaleModel::two_step(2.0, 0.0),
            Err(Error::DegenerateModel { step: 2, .. })
        ));
        assert!(MartingaleModel::rademacher(1).is_ok());
    }

    #[test]
    fn rademacher_bookkeeping_by_hand() {
        let m = MartingaleModel::rademacher(4).unwrap();
        let p = simulate_path(&m, 0, 99);
        assert_eq!(p.sigma2, vec![1.0; 4]);
        assert_eq!(p.v2, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(p.rho2, vec![4.0, 3.0, 2.0, 1.0]);
        assert_eq!(p.s_end, p.x.iter().sum::<f64>());
        assert!(p.x.iter().all(|&x| x == 1.0 || x == -1.0));
    }

    #[test]
    fn path_identities_hold_for_every_model() {
        let zoo: Vec<MartingaleModel> = vec![
            MartingaleModel::rademacher(16).unwrap(),
            MartingaleModel::pairswap(16, 0.5).unwrap(),
            MartingaleModel::drifting_variance(16, 0.5).unwrap(),
            MartingaleModel::asymmetric_two_point(16, 0.25).unwrap(),
            MartingaleModel::two_step(2.0, 1.0).unwrap(),
        ];
        for m in &zoo {
            for rep in 0..50 {
                let p = simulate_path(m, rep, 5);
                let n = m.steps();
                assert_eq!(p.v2[0], 0.0);
                assert_eq!(p.rho2[0], p.v2[n], "{}", m.id());
                for k in 0..n {
                    assert_eq!(p.rho2[k], p.v2[n] - p.v2[k], "{} step {k}", m.id());
                    let recur = p.sigma2[k] + if k + 1 < n { p.rho2[k + 1] } else { 0.0 };
                    assert!(
                        (p.rho2[k] - recur).abs() <= 1e-12 * p.v2[n].max(1.0),
                        "{} step {k}: {} vs {recur}",
                        m.id(),
                        p.rho2[k]
                    );
                    assert!(p.v2[k + 1] >= p.v2[k]);
                }
            }
        }
    }

    #[test]
    fn pairswap_moments_match_the_hand_enumeration() {
        // n = 4, u = 0.5: pair one is (1.5, 0.5) deterministically; pair two
        // sees the innovation walk at 0 with probability 1/2, so its swap
        // sign is +1 with probability 3/4.
        let m = MartingaleModel::pairswap(4, 0.5).unwrap();
        let mom = m.exact_moments().unwrap();
        let want = [1.5, 0.5, 1.25, 0.75];
        for k in 0..4 {
            assert!(
                (mom.sigma_bar2[k] - want[k]).abs() < 1e-14,
                "k={k}: {} vs {}",
                mom.sigma_bar2[k],
                want[k]
            );
        }
        assert_eq!(mom.var_dev[0], 0.0);
        assert!(mom.var_dev[2] > 0.0);
        assert!((mom.s2 - 4.0).abs() < 1e-12);
        assert_eq!(mom.rho_bar2[0], mom.s2);
        assert!(mom.analytic);
        assert_eq!(mom.cond2_dev, 0.0);
    }

    #[test]
    fn condition2_models_have_constant_v2() {
        for m in [
            MartingaleModel::rademacher(16).unwrap(),
            MartingaleModel::pairswap(16, 0.7).unwrap(),
            MartingaleModel::asymmetric_two_point(16, 0.2).unwrap(),
        ] {
            let s2 = m.exact_s2().unwrap();
            for rep in 0..10_000 {
                let p = simulate_path(&m, rep, 42);
                assert!(
                    (p.v2_end() / s2 - 1.0).abs() <= 1e-9,
                    "{} rep {rep}: V^2 = {}",
                    m.id(),
                    p.v2_end()
                );
            }
        }
    }

    #[test]
    fn drifting_variance_violates_condition2() {
        let m = MartingaleModel::drifting_variance(16, 0.5).unwrap();
        let mom = model_moments(&m, 20_000, 11).unwrap();
        assert!(!mom.analytic);
        assert_eq!(mom.reps_used, 20_000);
        assert!(mom.cond2_dev > 0.01, "cond2_dev = {}", mom.cond2_dev);
        // steps are +-1 or +-1.5, so per-step moments sit between the pure
        // branches
        for k in 1..16 {
            assert!(mom.sigma_bar2[k] >= 1.0 && mom.sigma_bar2[k] <= 2.25);
            assert!(mom.abs3[k] >= 1.0 && mom.abs3[k] <= 3.375);
        }
        // first step has S_0 = 0, variance exactly 1
        assert!((mom.sigma_bar2[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mc_moments_agree_with_closed_forms() {
        let m = MartingaleModel::pairswap(8, 0.5).unwrap();
        let exact = m.exact_moments().unwrap();
        let mc = model_moments_mc(&m, 40_000, 3);
        for k in 0..8 {
            assert!(
                (exact.sigma_bar2[k] - mc.sigma_bar2[k]).abs() < 0.01,
                "sigma_bar2 k={k}: {} vs {}",
                exact.sigma_bar2[k],
                mc.sigma_bar2[k]
            );
            assert!((exact.abs3[k] - mc.abs3[k]).abs() < 0.02, "abs3 k={k}");
            assert!((exact.var_dev[k] - mc.var_dev[k]).abs() < 0.01, "var_dev k={k}");
        }
        assert!((mc.cond2_dev).abs() < 1e-12, "pairswap pins V^2");
    }

    #[test]
    fn moments_require_replicates_only_without_closed_forms() {
        let m = MartingaleModel::rademacher(4).unwrap();
        assert!(model_moments(&m, 1, 0).is_ok());
        let d = MartingaleModel::drifting_variance(4, 0.5).unwrap();
        assert!(matches!(
            model_moments(&d, 99, 0),
            Err(Error::InsufficientReplicates { .. })
        ));
    }

    #[test]
    fn walk_at_zero_matches_enumeration() {
        for m in 0..=12usize {
            let mut hits = 0u64;
            for mask in 0u32..(1 << m) {
                if 2 * mask.count_ones() as i64 == m as i64 {
                    hits += 1;
                }
            }
            let exact = hits as f64 / (1u64 << m) as f64;
            assert!(
                (walk_at_zero(m) - exact).abs() < 1e-12,
                "m={m}: {} vs {exact}",
                walk_at_zero(m)
            );
        }
    }

    #[test]
    fn simulation_is_deterministic_and_replicates_differ() {
        let m = MartingaleModel::drifting_variance(16, 0.3).unwrap();
        let a = sample_sums(&m, 500, 7);
        let b = sample_sums(&m, 500, 7);
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
        let c = sample_sums(&m, 500, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn fold_paths_is_chunk_order_deterministic() {
        let m = MartingaleModel::rademacher(8).unwrap();
        let total = |reps: usize| {
            fold_paths(
                &m,
                reps,
                5,
                || 0.0,
                |acc, _, p| *acc += p.s_end,
                |a, b| a + b,
            )
        };
        assert_eq!(total(1000), total(1000));
    }

    #[test]
    fn twostep_paths_enumerate_four_branches() {
        let m = MartingaleModel::two_step(2.0, 1.0).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for rep in 0..200 {
            let p = simulate_path(&m, rep, 1);
            assert_eq!(p.sigma2[0], 1.0);
            if p.x[0] > 0.0 {
                assert_eq!(p.sigma2[1], 2.0);
            } else {
                assert_eq!(p.sigma2[1], 1.0);
            }
            seen.insert(format!("{:.3},{:.3}", p.x[0], p.x[1]));
        }
        assert_eq!(seen.len(), 4, "four equally likely branches: {seen:?}");
        assert_eq!(m.exact_s2().unwrap(), 2.5);
        let mom = m.exact_moments().unwrap();
        assert_eq!(mom.cond2_dev, 0.5 / 2.5);
    }

    #[test]
    fn martingale_check_passes_honest_models() {
        for m in [
            MartingaleModel::pairswap(16, 0.5).unwrap(),
            MartingaleModel::drifting_variance(16, 0.5).unwrap(),
        ] {
            let chk = check_martingale_property(&m, 20_000, 13).unwrap();
            assert!(
                chk.pass,
                "{}: worst z {} at step {} [{}]",
                m.id(),
                chk.worst_z,
                chk.step,
                chk.bucket
            );
            assert!(chk.buckets_tested > 16);
        }
    }

    #[test]
    fn martingale_check_flags_the_biased_fixture() {
        // bias 0.1 at 10^5 replicates puts the first-step z near
        // 0.1·sqrt(10^5) ≈ 31.6
        let m = MartingaleModel::biased(4, 0.1).unwrap();
        let err = check_martingale_property(&m, 100_000, 13).unwrap_err();
        match err {
            Error::MartingaleViolation { worst_z, .. } => {
                assert!((20.0..45.0).contains(&worst_z), "z = {worst_z}")
            }
            other => panic!("expected martingale violation, got {other:?}"),
        }
    }

    #[test]
    fn martingale_check_needs_replicates() {
        let m = MartingaleModel::rademacher(4).unwrap();
        assert!(matches!(
            check_martingale_property(&m, 100, 0),
            Err(Error::InsufficientReplicates { .. })
        ));
    }

    #[test]
    fn rademacher_moment_estimates_are_exact() {
        // σ_k² and |X_k| are both constant for this model, so even the MC
        // path must reproduce them to rounding.
        let m = MartingaleModel::rademacher(4).unwrap();
        let mc = model_moments_mc(&m, 100_000, 21);
        for k in 0..4 {
            assert!((mc.sigma_bar2[k] - 1.0).abs() < 1e-12);
            assert!((mc.abs3[k] - 1.0).abs() < 1e-12);
            assert!(mc.var_dev[k].abs() < 1e-12);
        }
        assert!(mc.cond2_dev.abs() < 1e-12);
    }

    #[test]
    fn catalog_ids_are_unique() {
        let ids: Vec<_> = catalog().iter().map(|m| m.id).collect();
        let mut dedup = ids.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(ids.len(), dedup.len());
        assert!(ids.contains(&"rademacher"));
        assert!(ids.contains(&"drifting-variance"));
        assert!(ids.contains(&"completed"));
    }
}
