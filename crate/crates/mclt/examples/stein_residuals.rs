//! Solve the Stein equation g'(x) - x g(x) = h~(x) - E h~(Y) for shifted,
//! scaled test functions and verify the residual and derivative-norm
//! guarantees on a dense grid.
//!
//!     cargo run --example stein_residuals

use mclt::stein::{solve_stein_unit, stein_transform, verify_stein_bounds, TestFunction};

fn main() -> mclt::Result<()> {
    // profile of the unit-problem solution for h(x) = |x|: odd, bounded,
    // with bounded slope
    println!("g(x) for h = |x| (s = 0, t = 1):");
    for x in [-4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0] {
        let g = solve_stein_unit(TestFunction::Abs, 0.0, 1.0, x)?;
        println!("  g({x:>4.1}) = {g:>8.5}");
    }
    println!();

    // the scaled transform satisfies t^2 f' - (w - s) f = h(w) - E h(tY + s);
    // check it pointwise for a smooth h
    let (s, t): (f64, f64) = (1.0, 2.0);
    println!("pointwise residuals for h = sin, s = {s}, t = {t}:");
    // E sin(tY + s) = sin(s) exp(-t^2/2)
    let mu = s.sin() * (-t * t / 2.0).exp();
    for w in [-3.0f64, -0.5, 1.0, 2.5, 6.0] {
        let (f, fp, _) = stein_transform(TestFunction::Sin, s, t, w)?;
        let residual = t * t * fp - (w - s) * f - (w.sin() - mu);
        println!("  w = {w:>4.1}: residual = {residual:+.2e}");
    }
    println!();

    // full sweep: residual plus the two derivative-norm bounds
    // |f'| <= L/t and |f''| <= 2L/t^2 for Lipschitz(L) test functions
    println!(
        "{:<13} {:>4} {:>4} {:>11} {:>9} {:>9} {:>8} {:>6}",
        "function", "s", "t", "residual", "|f'|", "|f''|", "points", "pass"
    );
    let mut all = true;
    for h in TestFunction::ALL {
        for s in [0.0, 1.0, 2.0] {
            for t in [0.5, 1.0, 2.0] {
                let r = verify_stein_bounds(h, s, t)?;
                all &= r.pass;
                println!(
                    "{:<13} {:>4} {:>4} {:>11.2e} {:>9.5} {:>9.5} {:>8} {:>6}",
                    r.test_function, s, t, r.max_residual, r.norm_fprime, r.norm_fsecond,
                    r.grid_points, r.pass
                );
            }
        }
    }
    println!("\nall combinations pass: {all}");
    Ok(())
}
