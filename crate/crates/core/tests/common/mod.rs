pub fn rate(sigma: &[f64], tau: &[f64]) -> f64 {
    sigma.iter().zip(tau).map(|(s, t)| (1.0 + s * t).log2()).sum()
}

/// Best split on a simplex grid, then pairwise power exchanges by golden
/// section until nothing moves.
pub fn search_oracle(tau: &[f64], p: f64) -> f64 {
    let k = tau.len();
    let steps = match k {
        1 => 1,
        2 => 100_000,
        3 => 300,
        _ => 60,
    };
    let mut best = vec![0.0; k];
    let mut best_rate = f64::NEG_INFINITY;
    let mut idx = vec![0usize; k];
    loop {
        let used: usize = idx[..k - 1].iter().sum();
        if used <= steps {
            let mut s: Vec<f64> = idx[..k - 1].iter().map(|&i| p * i as f64 / steps as f64).collect();
            s.push(p * (steps - used) as f64 / steps as f64);
            let r = rate(&s, tau);
            if r > best_rate {
                best_rate = r;
                best = s;
            }
        }
        let mut d = 0;
        loop {
            if d == k - 1 {
                break;
            }
            idx[d] += 1;
            if idx[d] <= steps {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == k - 1 {
            break;
        }
    }
    for _ in 0..200 {
        let mut moved = false;
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                // Move x from j to i, x in [-best[i], best[j]].
                let (lo0, hi0) = (-best[i], best[j]);
                let f = |x: f64| {
                    let mut s = best.clone();
                    s[i] += x;
                    s[j] -= x;
                    rate(&s, tau)
                };
                let g = 0.5 * (5f64.sqrt() - 1.0);
                let (mut lo, mut hi) = (lo0, hi0);
                for _ in 0..200 {
                    let a = hi - g * (hi - lo);
                    let b = lo + g * (hi - lo);
                    if f(a) < f(b) {
                        lo = a;
                    } else {
                        hi = b;
                    }
                }
                let x = 0.5 * (lo + hi);
                if f(x) > rate(&best, tau) + 1e-15 {
                    best[i] += x;
                    best[j] -= x;
                    moved = true;
                }
            }
        }
        if !moved {
            break;
        }
    }
    rate(&best, tau)
}
