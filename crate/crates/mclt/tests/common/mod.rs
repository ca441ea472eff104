//! Brute-force oracles: enumerate every sign path of a small model straight
//! from its definition, with exact weights. Nothing here touches the
//! library's simulator, so agreement between the two is a real check.
#![allow(dead_code)]

/// A fully enumerated model: one entry per sign path.
pub struct Enumeration {
    pub n: usize,
    pub weights: Vec<f64>,
    pub x: Vec<Vec<f64>>,
    pub sigma2: Vec<Vec<f64>>,
}

impl Enumeration {
    fn from_paths(n: usize, paths: Vec<(f64, Vec<f64>, Vec<f64>)>) -> Self {
        let mut e = Enumeration {
            n,
            weights: Vec::with_capacity(paths.len()),
            x: Vec::with_capacity(paths.len()),
            sigma2: Vec::with_capacity(paths.len()),
        };
        for (w, x, s2) in paths {
            assert_eq!(x.len(), n);
            assert_eq!(s2.len(), n);
            e.weights.push(w);
            e.x.push(x);
            e.sigma2.push(s2);
        }
        let total: f64 = e.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12, "weights sum to {total}");
        e
    }

    fn mean_over_paths(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(p, w)| w * f(p))
            .sum()
    }

    /// E σ_k² per step.
    pub fn sigma_bar2(&self) -> Vec<f64> {
        (0..self.n)
            .map(|k| self.mean_over_paths(|p| self.sigma2[p][k]))
            .collect()
    }

    /// E |X_k|³ per step.
    pub fn abs3(&self) -> Vec<f64> {
        (0..self.n)
            .map(|k| self.mean_over_paths(|p| self.x[p][k].abs().powi(3)))
            .collect()
    }

    /// E |σ_k² - E σ_k²| per step.
    pub fn var_dev(&self) -> Vec<f64> {
        let bar = self.sigma_bar2();
        (0..self.n)
            .map(|k| self.mean_over_paths(|p| (self.sigma2[p][k] - bar[k]).abs()))
            .collect()
    }

    /// s² = Σ_k E σ_k² = Var S_n.
    pub fn s2(&self) -> f64 {
        self.sigma_bar2().iter().sum()
    }

    /// ρ̄_k² = Σ_{i ≥ k} E σ_i².
    pub fn rho_bar2(&self) -> Vec<f64> {
        let bar = self.sigma_bar2();
        let mut out = vec![0.0; self.n];
        let mut run = 0.0;
        for k in (0..self.n).rev() {
            run += bar[k];
            out[k] = run;
        }
        out
    }

    /// E |V_n²/s² - 1|.
    pub fn cond2_dev(&self) -> f64 {
        let s2 = self.s2();
        self.mean_over_paths(|p| (self.sigma2[p].iter().sum::<f64>() / s2 - 1.0).abs())
    }

    /// E Σ_k |X_k|³ / (ρ_k² + a²) with the per-path tail ρ_k² = V_n² - V_{k-1}².
    pub fn smoothed_functional(&self, a: f64) -> f64 {
        self.mean_over_paths(|p| {
            let v_end: f64 = self.sigma2[p].iter().sum();
            let mut v_prev = 0.0;
            let mut total = 0.0;
            for k in 0..self.n {
                let rho2 = v_end - v_prev;
                total += self.x[p][k].abs().powi(3) / (rho2 + a * a);
                v_prev += self.sigma2[p][k];
            }
            total
        })
    }

    /// The full per-path bound: (3/s)·E Σ |X|³/(ρ² + a²) + 2a/s.
    pub fn per_path_bound(&self, a: f64) -> f64 {
        let s = self.s2().sqrt();
        3.0 / s * self.smoothed_functional(a) + 2.0 * a / s
    }

    /// The moment-table bound: (1/s)·Σ_k (3 E|X_k|³ + E|σ_k² - σ̄_k²|)/(ρ̄_k² + a²) + 2a/s.
    pub fn moment_bound(&self, a: f64) -> f64 {
        let s = self.s2().sqrt();
        let abs3 = self.abs3();
        let vdev = self.var_dev();
        let rho = self.rho_bar2();
        let sum: f64 = (0..self.n)
            .map(|k| (3.0 * abs3[k] + vdev[k]) / (rho[k] + a * a))
            .sum();
        sum / s + 2.0 * a / s
    }

    /// Per-step exactness of E X_k = 0 (weighted over paths).
    pub fn worst_mean_step(&self) -> f64 {
        (0..self.n)
            .map(|k| self.mean_over_paths(|p| self.x[p][k]).abs())
            .fold(0.0, f64::max)
    }

    /// The exact law of S_n as (atoms, probabilities), merging equal sums.
    pub fn sum_law(&self) -> (Vec<f64>, Vec<f64>) {
        let mut pairs: Vec<(f64, f64)> = self
            .weights
            .iter()
            .enumerate()
            .map(|(p, &w)| (self.x[p].iter().sum::<f64>(), w))
            .collect();
        pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms = Vec::new();
        let mut probs: Vec<f64> = Vec::new();
        for (v, w) in pairs {
            if atoms.last() == Some(&v) {
                *probs.last_mut().unwrap() += w;
            } else {
                atoms.push(v);
                probs.push(w);
            }
        }
        (atoms, probs)
    }
}

fn signs(mask: usize, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| if mask >> k & 1 == 1 { 1.0 } else { -1.0 })
        .collect()
}

/// Independent ±1 steps, all 2^n paths equally likely.
pub fn enumerate_rademacher(n: usize) -> Enumeration {
    let w = 0.5f64.powi(n as i32);
    let paths = (0..1usize << n)
        .map(|m| (w, signs(m, n), vec![1.0; n]))
        .collect();
    Enumeration::from_paths(n, paths)
}

/// Paired steps: within pair j the variances are 1 ± u·ε where ε is the
/// sign of the running ±1 innovation sum before the pair (+1 at zero), and
/// each step is the innovation scaled by its conditional standard deviation.
pub fn enumerate_pairswap(n: usize, u: f64) -> Enumeration {
    assert!(n % 2 == 0);
    let w = 0.5f64.powi(n as i32);
    let paths = (0..1usize << n)
        .map(|m| {
            let eta = signs(m, n);
            let mut x = Vec::with_capacity(n);
            let mut sigma2 = Vec::with_capacity(n);
            let mut t = 0.0f64; // innovation walk
            for j in 0..n / 2 {
                let eps = if t >= 0.0 { 1.0 } else { -1.0 };
                for (slot, v) in [(2 * j, 1.0 + u * eps), (2 * j + 1, 1.0 - u * eps)] {
                    x.push(eta[slot] * v.sqrt());
                    sigma2.push(v);
                    t += eta[slot];
                }
            }
            (w, x, sigma2)
        })
        .collect();
    Enumeration::from_paths(n, paths)
}

/// Steps of ±(1 + θ) while the partial sum is strictly positive, ±1
/// otherwise; the sign is a fair coin either way.
pub fn enumerate_drifting(n: usize, theta: f64) -> Enumeration {
    let w = 0.5f64.powi(n as i32);
    let paths = (0..1usize << n)
        .map(|m| {
            let eta = signs(m, n);
            let mut x = Vec::with_capacity(n);
            let mut sigma2 = Vec::with_capacity(n);
            let mut s = 0.0f64;
            for &e in &eta {
                let scale = if s > 0.0 { 1.0 + theta } else { 1.0 };
                x.push(e * scale);
                sigma2.push(scale * scale);
                s += e * scale;
            }
            (w, x, sigma2)
        })
        .collect();
    Enumeration::from_paths(n, paths)
}

/// Independent two-point steps: (1-p)/c with probability p, -p/c with
/// probability 1-p, where c = sqrt(p(1-p)) normalizes each variance to 1.
pub fn enumerate_asymmetric(n: usize, p: f64) -> Enumeration {
    let c = (p * (1.0 - p)).sqrt();
    let paths = (0..1usize << n)
        .map(|m| {
            let mut w = 1.0;
            let mut x = Vec::with_capacity(n);
            for k in 0..n {
                if m >> k & 1 == 1 {
                    w *= p;
                    x.push((1.0 - p) / c);
                } else {
                    w *= 1.0 - p;
                    x.push(-p / c);
                }
            }
            (w, x, vec![1.0; n])
        })
        .collect();
    Enumeration::from_paths(n, paths)
}

/// The two-step model: X_1 = ±1, then X_2 = ±√v_hi after an up step and
/// ±√v_lo after a down step.
pub fn enumerate_twostep(v_hi: f64, v_lo: f64) -> Enumeration {
    let mut paths = Vec::new();
    for s1 in [1.0f64, -1.0] {
        let v = if s1 > 0.0 { v_hi } else { v_lo };
        for s2 in [1.0f64, -1.0] {
            paths.push((0.25, vec![s1, s2 * v.sqrt()], vec![1.0, v]));
        }
    }
    Enumeration::from_paths(2, paths)
}

#[cfg(test)]
mod self_checks {
    use super::*;

    #[test]
    fn rademacher_tables_by_hand() {
        let e = enumerate_rademacher(4);
        assert_eq!(e.sigma_bar2(), vec![1.0; 4]);
        assert_eq!(e.abs3(), vec![1.0; 4]);
        assert_eq!(e.var_dev(), vec![0.0; 4]);
        assert_eq!(e.rho_bar2(), vec![4.0, 3.0, 2.0, 1.0]);
        assert_eq!(e.s2(), 4.0);
        assert_eq!(e.cond2_dev(), 0.0);
        // (3/2)(1/4 + 1/3 + 1/2 + 1)
        assert!((e.per_path_bound(0.0) - 3.125).abs() < 1e-15);
        let (atoms, probs) = e.sum_law();
        assert_eq!(atoms, vec![-4.0, -2.0, 0.0, 2.0, 4.0]);
        assert_eq!(probs, vec![1.0 / 16.0, 0.25, 0.375, 0.25, 1.0 / 16.0]);
    }

    #[test]
    fn pairswap_tables_by_hand() {
        let e = enumerate_pairswap(4, 0.5);
        let bar = e.sigma_bar2();
        for (got, want) in bar.iter().zip([1.5, 0.5, 1.25, 0.75]) {
            assert!((got - want).abs() < 1e-12, "{bar:?}");
        }
        assert!((e.s2() - 4.0).abs() < 1e-12);
        assert!(e.cond2_dev() < 1e-12);
        assert!(e.worst_mean_step() < 1e-15);
    }

    #[test]
    fn twostep_tables_by_hand() {
        let e = enumerate_twostep(2.0, 1.0);
        assert_eq!(e.s2(), 2.5);
        assert_eq!(e.sigma_bar2(), vec![1.0, 1.5]);
        // E|V²/s² - 1| = 0.5·(0.5/2.5) + 0.5·(0.5/2.5)
        assert!((e.cond2_dev() - 0.2).abs() < 1e-15);
    }
}
