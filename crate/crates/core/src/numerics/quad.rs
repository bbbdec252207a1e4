//! Composite Gauss-Legendre quadrature and a panel-summing integrator for
//! semi-infinite oscillatory integrands.

use crate::error::{invalid, FtnError, Result};
use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            // Tricomi initial guess for the i-th largest root.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Iterates `(abscissa, weight)` pairs mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    /// Single-panel integral over `[a, b]`, no finiteness checks.
    pub fn panel<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule: `panels` equal sub-intervals with
/// `points` nodes each.
#[derive(Debug, Clone)]
pub struct Quadrature {
    panels: usize,
    rule: GaussLegendre,
}

impl Quadrature {
    pub fn new(panels: usize, points: usize) -> Result<Self> {
        if panels == 0 {
            return Err(invalid("panels", panels, "panels >= 1"));
        }
        if points == 0 {
            return Err(invalid("points", points, "points >= 1"));
        }
        Ok(Self {
            panels,
            rule: GaussLegendre::new(points),
        })
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn points(&self) -> usize {
        self.rule.len()
    }

    pub fn rule(&self) -> &GaussLegendre {
        &self.rule
    }

    /// Same rule with twice as many panels.
    pub fn refined(&self) -> Self {
        Self {
            panels: 2 * self.panels,
            rule: self.rule.clone(),
        }
    }

    /// Iterates all `(abscissa, weight)` pairs of the composite rule on `[a, b]`.
    pub fn nodes_on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = (b - a) / self.panels as f64;
        (0..self.panels).flat_map(move |i| {
            let lo = a + i as f64 * h;
            self.rule.mapped(lo, lo + h)
        })
    }
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            panels: 16,
            rule: GaussLegendre::new(16),
        }
    }
}

/// Composite Gauss-Legendre estimate of the integral of `f` over `[a, b]`.
///
/// A non-finite sample aborts with the offending abscissa.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, q: &Quadrature) -> Result<f64> {
    if !(a <= b) {
        return Err(invalid("interval", format!("[{a}, {b}]"), "a <= b"));
    }
    let mut sum = 0.0;
    for (x, w) in q.nodes_on(a, b) {
        let y = f(x);
        if !y.is_finite() {
            return Err(FtnError::NonFinite {
                context: "integrand",
                at: x,
            });
        }
        sum += w * y;
    }
    Ok(sum)
}

/// Integral estimate together with the effect of doubling the panel count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    /// Value at the refined (doubled) resolution.
    pub value: f64,
    /// |refined - coarse| / max(|refined|, tiny).
    pub relative_change: f64,
}

/// [`integrate`] at `q` and at twice the panel count.
pub fn integrate_checked<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    q: &Quadrature,
) -> Result<QuadEstimate> {
    let coarse = integrate(&mut f, a, b, q)?;
    let fine = integrate(&mut f, a, b, &q.refined())?;
    let scale = fine.abs().max(f64::MIN_POSITIVE);
    Ok(QuadEstimate {
        value: fine,
        relative_change: (fine - coarse).abs() / scale,
    })
}

/// Parameters for [`integrate_semi_infinite_oscillatory_with`].
#[derive(Debug, Clone)]
pub struct OscillatoryTail {
    /// Panel width, normally the zero spacing of the oscillating factor.
    pub zero_spacing: f64,
    /// Width of the first panel; `None` uses `zero_spacing`.
    pub first_panel: Option<f64>,
    /// Stop once this many consecutive panels each contribute less than `tail_tol`.
    pub quiet_panels: usize,
    pub tail_tol: f64,
    pub panel_cap: usize,
    pub points: usize,
}

impl OscillatoryTail {
    pub fn new(zero_spacing: f64, tail_tol: f64) -> Self {
        Self {
            zero_spacing,
            first_panel: None,
            quiet_panels: 3,
            tail_tol,
            panel_cap: 20_000,
            points: 16,
        }
    }
}

/// Integral of `f` over `[0, inf)` by summing panels of width `zero_spacing`
/// until three consecutive panels each contribute less than `tail_tol`.
pub fn integrate_semi_infinite_oscillatory<F: FnMut(f64) -> f64>(
    f: F,
    zero_spacing: f64,
    tail_tol: f64,
) -> Result<f64> {
    let rule = GaussLegendre::new(16);
    integrate_semi_infinite_oscillatory_with(f, &OscillatoryTail::new(zero_spacing, tail_tol), &rule)
}

/// As [`integrate_semi_infinite_oscillatory`], with a caller-supplied rule
/// (`rule.len()` overrides `params.points`).
pub fn integrate_semi_infinite_oscillatory_with<F: FnMut(f64) -> f64>(
    mut f: F,
    params: &OscillatoryTail,
    rule: &GaussLegendre,
) -> Result<f64> {
    if !(params.zero_spacing > 0.0) || !params.zero_spacing.is_finite() {
        return Err(invalid("zero_spacing", params.zero_spacing, "finite and > 0"));
    }
    if !(params.tail_tol > 0.0) {
        return Err(invalid("tail_tol", params.tail_tol, "> 0"));
    }
    let mut total = 0.0;
    let mut quiet = 0;
    let mut lo = 0.0;
    let mut last = 0.0;
    for k in 0..params.panel_cap {
        let width = match (k, params.first_panel) {
            (0, Some(w)) => w,
            _ => params.zero_spacing,
        };
        let hi = lo + width;
        let mut contrib = 0.0;
        for (x, w) in rule.mapped(lo, hi) {
            let y = f(x);
            if !y.is_finite() {
                return Err(FtnError::NonFinite {
                    context: "oscillatory integrand",
                    at: x,
                });
            }
            contrib += w * y;
        }
        total += contrib;
        last = contrib;
        if contrib.abs() < params.tail_tol {
            quiet += 1;
            if quiet >= params.quiet_panels {
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
        lo = hi;
    }
    Err(FtnError::TailNoConvergence {
        panels: params.panel_cap,
        accumulated: total,
        last_panel: last.abs(),
    })
}
