//! Pad a martingale with independent normal steps until every path reaches
//! the same total conditional variance, then check the construction and the
//! coupling between the original and completed sums.
//!
//!     cargo run --example gaussian_completion

use mclt::completion::{complete_to_constant_variance, coupling_check, verify_completion};
use mclt::models::{simulate_path, MartingaleModel, PathSim};

fn main() -> mclt::Result<()> {
    // the two-step model stops with V_2^2 = 3 after an up first step and
    // V_2^2 = 2 after a down one; completion truncates to the last step
    // that fits under s^2 = 2.5 and fills the rest with N(0, v) draws
    let base = MartingaleModel::two_step(2.0, 1.0)?;
    let completed = complete_to_constant_variance(base, 1.0)?;
    println!(
        "twostep completed: 2n = {} steps, target s^2 = {}, fill variance = {}",
        completed.steps(),
        completed.s2_target(),
        completed.fill_variance()
    );
    for replicate in [0u64, 1, 2, 3] {
        let p = simulate_path(&completed, replicate, 5);
        println!(
            "  replicate {replicate}: x = [{}], sigma^2 = {:?}, V^2 = {}",
            p.x.iter().map(|x| format!("{x:+.3}")).collect::<Vec<_>>().join(", "),
            p.sigma2,
            p.v2_end()
        );
    }
    println!();

    // every path must land on s^2 exactly and every fill step must respect
    // the inherited third-moment certificates
    let report = verify_completion(&completed, 5000, 5)?;
    println!("verification over {} paths:", report.reps_used);
    println!("  max |V^2/s^2 - 1|    = {:.2e}", report.max_rel_dev);
    println!("  worst fill ratio     = {:.3}", report.worst_fill_ratio);
    println!(
        "  martingale check     = {} (worst |z| = {:.2})\n",
        if report.martingale.pass { "ok" } else { "failed" },
        report.martingale.worst_z
    );

    // the completed certificates promise constant variance but inflate the
    // third-moment constants to cover the fill steps
    let certs = completed.certificates();
    println!("inherited certificates:");
    println!("  condition2 = {}, beta = {:?}, delta = {:?}\n", certs.satisfies_condition2, certs.beta, certs.delta);

    // coupled runs share every random draw, so |S_n - S~_2n| measures only
    // what completion adds; compare against sqrt(2 E|V^2 - s^2|)
    let base = MartingaleModel::drifting_variance(64, 0.5)?;
    let stats = coupling_check(&base, 3.375, 20_000, 5)?;
    println!("coupling for drifting-variance n = 64, beta = 3.375:");
    println!("  E|S_n - S~_2n|          = {:.4} +- {:.4}", stats.mean_abs_gap, stats.stderr);
    println!("  sqrt(2 E|V^2 - s^2|)    = {:.4}", stats.rhs);
    println!(
        "  inequality {}",
        if stats.mean_abs_gap <= stats.rhs + 3.0 * stats.stderr { "holds" } else { "FAILS" }
    );
    Ok(())
}
