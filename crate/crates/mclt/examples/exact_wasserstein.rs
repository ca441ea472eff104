//! Exercise the exact distance engine: closed-form Wasserstein and
//! Kolmogorov distances between discrete laws (or samples) and the standard
//! normal, plus the bootstrap uncertainty attached to sampled estimates.
//!
//!     cargo run --example exact_wasserstein

use mclt::distances::{
    kolmogorov_discrete_vs_normal, kolmogorov_empirical_vs_normal, normal_quantile,
    wasserstein_discrete_vs_normal, wasserstein_empirical_vs_normal,
    wasserstein_empirical_vs_normal_with_stderr, wasserstein_sample_vs_sample,
};
use mclt::models::{sample_sums, MartingaleModel};

fn main() -> mclt::Result<()> {
    // a point mass at 0 is at W1 distance E|N(0,1)| = sqrt(2/pi) from the
    // normal; the engine integrates |F - Phi| in closed form, no sampling
    let d = wasserstein_empirical_vs_normal(&[0.0])?.value;
    println!("W1(delta_0, N(0,1))        = {d:.16}");
    println!("sqrt(2/pi)                 = {:.16}\n", (2.0 / std::f64::consts::PI).sqrt());

    let d = wasserstein_empirical_vs_normal(&[-1.0, 1.0])?.value;
    let k = kolmogorov_empirical_vs_normal(&[-1.0, 1.0])?.value;
    println!("W1(uniform{{-1,1}}, N(0,1)) = {d:.16}");
    println!("K (uniform{{-1,1}}, N(0,1)) = {k:.16}\n");

    // weighted atoms: the exact law of a 4-step +-1 walk, scaled to unit
    // variance
    let s4 = 2.0;
    let atoms: Vec<f64> = [-4.0, -2.0, 0.0, 2.0, 4.0].iter().map(|x| x / s4).collect();
    let probs = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];
    let dw = wasserstein_discrete_vs_normal(&atoms, &probs)?;
    let dk = kolmogorov_discrete_vs_normal(&atoms, &probs)?;
    println!("4-step +-1 walk, exact law on 5 atoms:");
    println!("  W1 = {dw:.16}");
    println!("  K  = {dk:.16}\n");

    // quantile grids converge at rate ~ 1/m
    println!("midpoint quantile grids:");
    for m in [100usize, 1000, 10_000] {
        let xs: Vec<f64> = (1..=m)
            .map(|i| normal_quantile((i as f64 - 0.5) / m as f64))
            .collect::<mclt::Result<_>>()?;
        let d = wasserstein_empirical_vs_normal(&xs)?.value;
        println!("  m = {m:>6}: W1 = {d:.3e}");
    }
    println!();

    // sampled sums carry a bootstrap standard error
    let model = MartingaleModel::rademacher(64)?;
    let s_n = 8.0;
    for reps in [1000usize, 10_000, 100_000] {
        let sums = sample_sums(&model, reps, 11);
        let normalized: Vec<f64> = sums.iter().map(|s| s / s_n).collect();
        let est = wasserstein_empirical_vs_normal_with_stderr(&normalized, 11)?;
        println!(
            "rademacher n = 64, reps = {reps:>6}: W1 = {:.5} +- {:.5}",
            est.value, est.stderr
        );
    }
    println!();

    // two samples of the same law should be close in W1
    let a = sample_sums(&model, 20_000, 1);
    let b = sample_sums(&model, 20_000, 2);
    let d = wasserstein_sample_vs_sample(&a, &b)?;
    println!("W1 between two 20k ensembles of the same model: {:.4}", d.value);
    Ok(())
}
