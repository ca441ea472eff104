//! Quantitative central limit bounds for martingales, checked by simulation.
//!
//! A square-integrable martingale difference sequence `X_1, ..., X_n` with
//! conditional variances `σ_k² = E(X_k² | F_{k-1})` has a partial sum `S_n`
//! whose normalized law approaches the standard normal. This crate evaluates
//! explicit Wasserstein-distance bounds on that approximation error and
//! verifies them against exact distance computations on simulated ensembles:
//!
//! * [`models`]: a small zoo of martingale difference models with known
//!   moment certificates, plus deterministic path simulation and
//!   moment estimation.
//! * [`distances`]: high-precision normal special functions and *exact*
//!   1-D Wasserstein / Kolmogorov distances between an empirical (or finitely
//!   supported) law and the standard normal.
//! * [`bounds`]: the smoothing-parameter bound fed by per-path conditional
//!   variance tails, its unconditional variant, and three closed-form
//!   corollary rates, plus golden-section tuning of the smoothing parameter.
//! * [`completion`]: the Gaussian completion construction that pads a
//!   martingale with independent normal steps until the total conditional
//!   variance is constant, with coupling diagnostics.
//! * [`stein`]: a quadrature solver for the Stein equation
//!   `g'(x) - x g(x) = h(x) - E h(Y)` and residual/derivative-norm checks
//!   on the scaled transforms used by the bound proofs.
//! * [`harness`]: run configuration, ensemble orchestration, CSV reports,
//!   and rate scans over a grid of `n`.
//!
//! The primary interface is the `examples/` directory (one runnable example
//! per capability):
//!
//! ```text
//! cargo run --example simulate_models     # path bookkeeping for the model zoo
//! cargo run --example exact_wasserstein   # closed-form distance engine
//! cargo run --example evaluate_bounds     # bound evaluation + smoothing tuning
//! cargo run --example gaussian_completion # variance completion + coupling
//! cargo run --example stein_residuals     # Stein equation residual sweep
//! cargo run --example rate_scan           # decay-rate fit over a grid of n
//! ```
//!
//! A thin `mclt` binary exposes the same flows as subcommands
//! (`verify`, `rate-scan`, `stein-check`, `models list`).
//!
//! Every random draw derives from a counter-based stream keyed by
//! `(seed, replicate, step)`, so results are bit-identical regardless of
//! thread count (`MCLT_THREADS` caps the worker pool).

pub mod bounds;
pub mod completion;
pub mod distances;
pub mod harness;
pub mod models;
pub mod rng;
pub mod stein;

mod sum;

pub use models::{
    check_martingale_property, fold_paths, model_moments, sample_sums, simulate_path,
    MartingaleModel, ModelCertificates, ModelMoments, PathRecord, PathSim,
};
pub use sum::pairwise_sum;

/// Crate-wide error type.
///
/// Variants map onto process exit codes via [`Error::exit_code`]:
/// configuration problems exit 1, numerical or I/O failures exit 2.
/// (Exit 3, a verification row with `pass = false`, is not an error.)
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid config: {0}")]
    Config(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("unknown parameter `{param}` for model `{model}`")]
    UnknownParam { model: String, param: String },

    #[error("invalid parameter `{param}`: {reason}")]
    InvalidParam { param: String, reason: String },

    #[error("condition2 violated: bound `{bound}` requires V_n^2 = s_n^2 a.s., which model `{model}` does not certify")]
    Condition2Violated { bound: String, model: String },

    #[error("missing certificate `{certificate}`: bound `{bound}` is not applicable to model `{model}`")]
    MissingCertificate {
        bound: String,
        model: String,
        certificate: &'static str,
    },

    #[error("n_grid too short: rate scans need at least 3 grid points, got {0}")]
    NGridTooShort(usize),

    #[error("degenerate model: conditional variance {sigma2} < 0 at step {step}")]
    DegenerateModel { step: usize, sigma2: f64 },

    #[error("insufficient replicates for {context}: got {got}, need at least {need}")]
    InsufficientReplicates {
        context: &'static str,
        got: usize,
        need: usize,
    },

    #[error("martingale violation: |z| = {worst_z:.1} > 6 at step {step}, history bucket `{bucket}`")]
    MartingaleViolation {
        worst_z: f64,
        step: usize,
        bucket: String,
    },

    #[error("empty sample")]
    EmptySample,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("domain: {0}")]
    Domain(String),

    #[error("singular term: rho_k^2 = 0 at step {step} with a = 0")]
    SingularTerm { step: usize },

    #[error("beta too small: fill schedule exceeds 2n steps on replicate {replicate} (need {needed} fill steps after stopping index {tau})")]
    BetaTooSmall {
        replicate: u64,
        tau: usize,
        needed: usize,
    },

    #[error("completion invariant violated on replicate {replicate}: {what}")]
    CompletionInvariant { replicate: u64, what: String },

    #[error("model invariant violated: {0}")]
    InvariantViolated(String),

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this error (1 = bad configuration, 2 = numerical
    /// or I/O failure).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::UnknownModel(_)
            | Error::UnknownParam { .. }
            | Error::InvalidParam { .. }
            | Error::Condition2Violated { .. }
            | Error::MissingCertificate { .. }
            | Error::NGridTooShort(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
