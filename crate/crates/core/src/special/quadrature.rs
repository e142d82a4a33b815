//! Gauss–Legendre nodes and the polar product rule used for phase-space integrals.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 1 {
        return (x, 1.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn compute_rule(n: usize) -> GaussLegendre {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n / 2 {
        // Tricomi's initial guess, refined by Newton.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        let (_, dp) = legendre_with_derivative(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (dp * dp);
    }
    GaussLegendre { nodes, weights }
}

/// Cached `n`-point Gauss–Legendre rule.
pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(compute_rule(n)))
        .clone()
}

/// Gauss–Legendre nodes on `[a, b]` after the smoothstep map
/// `x = a + (b - a)(3t² - 2t³)`, which flattens algebraic endpoint
/// singularities such as `(b - x)^{3/2}` at both ends of the panel.
pub fn graded_panel(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = gauss_legendre(n);
    let len = b - a;
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &wt)| {
            let t = 0.5 * (x + 1.0);
            let s = t * t * (3.0 - 2.0 * t);
            let ds = 6.0 * t * (1.0 - t);
            (a + len * s, 0.5 * wt * len * ds)
        })
        .unzip()
}

/// Product rule for `∫ d²β f(β)` over a disc of radius `R`:
/// graded Gauss–Legendre panels in the radius times the trapezoid rule in angle.
///
/// `radial_weights` already include the area element `r dr`.
#[derive(Clone, Debug)]
pub struct PolarRule {
    pub radii: Vec<f64>,
    pub radial_weights: Vec<f64>,
    pub angles: Vec<f64>,
    pub angle_weight: f64,
}

impl PolarRule {
    /// `breaks` are the interior radii where the integrand is not smooth;
    /// each of the resulting panels gets `per_panel` nodes.
    pub fn new(radius: f64, breaks: &[f64], per_panel: usize, angular: usize) -> Self {
        let mut edges = vec![0.0];
        for &b in breaks {
            if b > 0.0 && b < radius && b > *edges.last().unwrap() {
                edges.push(b);
            }
        }
        edges.push(radius);
        let mut radii = Vec::new();
        let mut radial_weights = Vec::new();
        for pair in edges.windows(2) {
            let (r, w) = graded_panel(pair[0], pair[1], per_panel);
            for (ri, wi) in r.into_iter().zip(w) {
                radii.push(ri);
                radial_weights.push(wi * ri);
            }
        }
        let angles = (0..angular)
            .map(|j| 2.0 * PI * j as f64 / angular as f64)
            .collect();
        Self {
            radii,
            radial_weights,
            angles,
            angle_weight: 2.0 * PI / angular as f64,
        }
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        for n in [1, 2, 5, 16, 64, 257] {
            let rule = gauss_legendre(n);
            let deg = 2 * n - 1;
            for p in [0, 1, deg.min(40)] {
                let sum: f64 = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(x, w)| w * x.powi(p as i32))
                    .sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                if p <= deg {
                    assert!((sum - exact).abs() < 1e-13, "n={n} p={p} sum={sum}");
                }
            }
        }
    }

    #[test]
    fn polar_rule_disc_area_and_gaussian() {
        let rule = PolarRule::new(2.0, &[1.0], 32, 8);
        let mut area = 0.0;
        let mut gauss = 0.0;
        for (r, w) in rule.radii.iter().zip(&rule.radial_weights) {
            area += w * rule.angle_weight * rule.angles.len() as f64;
            gauss += w * (-r * r).exp() * 2.0 * PI;
        }
        assert!((area - 4.0 * PI).abs() < 1e-12);
        let exact = PI * (1.0 - (-4.0f64).exp());
        assert!((gauss - exact).abs() < 1e-12);
    }

    #[test]
    fn graded_panel_handles_three_halves_singularity() {
        // ∫_0^1 (1-x)^{3/2} dx = 2/5
        let (x, w) = graded_panel(0.0, 1.0, 48);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * (1.0 - x).powf(1.5)).sum();
        assert!((s - 0.4).abs() < 1e-13, "{s}");
    }
}
