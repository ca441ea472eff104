//! Evaluate the Wasserstein bounds on concrete models: the per-step
//! simulated bound, its moment-table variant, the three closed-form rates,
//! and the golden-section search over the smoothing parameter.
//!
//!     cargo run --example evaluate_bounds

use mclt::bounds::{
    cor1_bound, cor2_bound, cor3_bound, dw_to_dk, thm1_bound, thm1_bound_auto, thm2_bound,
};
use mclt::models::{model_moments, MartingaleModel, PathSim};

fn main() -> mclt::Result<()> {
    // n = 4 is small enough to check by hand: rho_k^2 = 4, 3, 2, 1 and
    // every |X_k|^3 = 1, so the unsmoothed total is
    // (3/2)(1/4 + 1/3 + 1/2 + 1) = 3.125
    let m4 = MartingaleModel::rademacher(4)?;
    let report = thm1_bound(&m4, 0.0, 2000, 1)?;
    println!("rademacher n = 4, a = 0:");
    println!("  per-step terms  {:?}", report.per_k);
    println!("  total           {}", report.total);
    println!("  mc stderr       {:.2e}  (deterministic functional)\n", report.mc_stderr);

    // sweep the smoothing parameter: a trades the per-step denominators
    // against the +2a/s_n offset
    let m = MartingaleModel::rademacher(64)?;
    println!("rademacher n = 64, smoothing sweep:");
    for a in [0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0] {
        let r = thm1_bound(&m, a, 2000, 1)?;
        println!("  a = {a:>4.1}: bound = {:.4}", r.total);
    }
    let auto = thm1_bound_auto(&m, 2000, 1)?;
    println!("  auto : a* = {:.4}, bound = {:.4}\n", auto.a, auto.total);

    // the moment-table bound agrees with the per-path bound whenever the
    // conditional moments are deterministic
    let mom = model_moments(&m, 2000, 1)?;
    let t2 = thm2_bound(&mom, auto.a)?;
    println!("moment-table bound at a*: {:.4} (per-path gave {:.4})\n", t2.total, auto.total);

    // closed forms need only the certificates
    println!("closed-form rates for rademacher (alpha = gamma = 1):");
    println!("  {:>6} {:>10} {:>10}", "n", "cor1", "cor2");
    for n in [16usize, 64, 256, 1024] {
        let c1 = cor1_bound(1.0, 1.0, n)?;
        let c2 = cor2_bound(1.0, 1.0, n as f64, n)?;
        println!("  {n:>6} {c1:>10.4} {c2:>10.4}");
    }
    println!();

    // a model without the constant-variance property pays an extra
    // 1.5*sqrt(E|V^2/s^2 - 1|) in the third closed form
    let drifting = MartingaleModel::drifting_variance(64, 0.5)?;
    let mom = model_moments(&drifting, 50_000, 1)?;
    let certs = drifting.certificates();
    let (beta, delta) = (certs.beta.unwrap(), certs.delta.unwrap());
    let c3 = cor3_bound(beta, delta, mom.s2, 64, mom.cond2_dev)?;
    println!("drifting-variance n = 64: cond2 deviation = {:.4}", mom.cond2_dev);
    println!("  cor3 bound = {c3:.4}");
    println!("  cor3 at zero deviation would be {:.4}\n", cor3_bound(beta, delta, mom.s2, 64, 0.0)?);

    // any Wasserstein bound converts to a Kolmogorov bound
    let eps = auto.total;
    println!("dw = {:.4} converts to dk <= {:.4}", eps, dw_to_dk(eps)?);
    Ok(())
}
