//! The universal witness `Ŵ_w(α)` built from the disc filter.
//!
//! Its Fock-diagonal elements at `α = 0` are
//! `W_nn(w) = (w²/16) Σ_{m≤n} (-w²/4)^m C(2m+2, m) / ((m+1)!)² · n!/(n-m)!`,
//! a polynomial in `w²` whose terms cancel catastrophically once `n w²` is
//! large. Each element is therefore evaluated two ways, by the term-ratio
//! recurrence and by the radial integral
//! `W_nn = (1/π) ∫₀^{w²} Ω_1(√t/w) L_n(t) dt`, and the route with the smaller
//! error estimate wins.
//!
//! Displaced witnesses reduce to `W_w(α) = Σ_n W_nn p_n(-α)`, where
//! `p_n(-α)` are the photon statistics of `D(-α) ρ D(α)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::filters::disc_overlap;
use crate::fock::{CharBands, DensityMatrix};
use crate::point::ComplexPoint;
use crate::special::{bessel_j1, gauss_legendre};

/// Largest `n` for which the power series is tried at all.
const SERIES_MAX_N: usize = 400;
const PANELS_PER_GROUP: usize = 16;

/// Width and displacement of one witness.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WitnessSpec {
    w: f64,
    alpha: ComplexPoint,
}

impl WitnessSpec {
    pub fn new(w: f64, alpha: ComplexPoint) -> Result<Self> {
        check_width(w)?;
        Ok(Self { w, alpha })
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn alpha(&self) -> ComplexPoint {
        self.alpha
    }
}

fn check_width(w: f64) -> Result<()> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(domain(format!("width {w} must be positive")));
    }
    Ok(())
}

/// Power series with a rounding-error estimate `ε Σ (m+2)|t_m|`.
fn diag_series(n: usize, w: f64) -> (f64, f64) {
    let q = -0.25 * w * w;
    let mut term = w * w / 16.0;
    let mut sum = term;
    let mut abs_sum = 2.0 * term.abs();
    for m in 0..n {
        let mf = m as f64;
        term *= q * (n - m) as f64 * (2.0 * mf + 4.0) * (2.0 * mf + 3.0)
            / ((mf + 1.0) * (mf + 3.0) * (mf + 2.0) * (mf + 2.0));
        sum += term;
        abs_sum += (mf + 3.0) * term.abs();
    }
    (sum, f64::EPSILON * abs_sum)
}

/// Integral route for all `n < len` at once: values and error estimates.
///
/// Every panel carries a 32-point and a 24-point Gauss–Legendre rule; the
/// Laguerre recurrence runs over all nodes of a panel side by side, which
/// hides the latency of the serial recurrence in `n`.
fn diag_integral_table(len: usize, w: f64) -> (Vec<f64>, Vec<f64>) {
    let panels = (4.0 * w * ((len as f64).sqrt()) / (2.0 * PI)).ceil() as usize + 2;
    let width = 1.0 / panels as f64;
    let groups: Vec<(usize, usize)> = (0..panels)
        .step_by(PANELS_PER_GROUP)
        .map(|start| (start, (start + PANELS_PER_GROUP).min(panels)))
        .collect();
    let fine = gauss_legendre(32);
    let coarse = gauss_legendre(24);
    let pref = 4.0 * w * w / PI;
    // L_{n+1}(x) = (a_n - c_n x) L_n(x) - b_n L_{n-1}(x)
    let coef: Vec<(f64, f64, f64)> = (0..len)
        .map(|n| {
            let nf = n as f64;
            ((2.0 * nf + 1.0) / (nf + 1.0), nf / (nf + 1.0), 1.0 / (nf + 1.0))
        })
        .collect();
    // [fine values, coarse values, Σ|fine terms|] per group, summed in order
    let partials: Vec<[Vec<f64>; 3]> = groups
        .par_iter()
        .map(|&(p0, p1)| {
            let mut acc = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
            for p in p0..p1 {
                let a = p as f64 * width;
                let mut xs = Vec::with_capacity(56);
                let mut wf = Vec::with_capacity(56);
                let mut wc = Vec::with_capacity(56);
                for (is_fine, rule) in [(true, &fine), (false, &coarse)] {
                    for (&x, &wt) in rule.nodes.iter().zip(&rule.weights) {
                        let u = a + 0.5 * width * (x + 1.0);
                        let s = 1.0 - u * u;
                        let weight = pref * 0.5 * width * wt * disc_overlap(s) * s * u;
                        xs.push(w * w * s * s);
                        wf.push(if is_fine { weight } else { 0.0 });
                        wc.push(if is_fine { 0.0 } else { weight });
                    }
                }
                let k = xs.len();
                let mut prev = vec![0.0; k];
                let mut cur = vec![1.0; k];
                let mut next = vec![0.0; k];
                for n in 0..len {
                    let (mut f, mut c, mut ab) = (0.0, 0.0, 0.0);
                    for j in 0..k {
                        let t = wf[j] * cur[j];
                        f += t;
                        ab += t.abs();
                        c += wc[j] * cur[j];
                    }
                    acc[0][n] += f;
                    acc[1][n] += c;
                    acc[2][n] += ab;
                    let (an, bn, cn) = coef[n];
                    for j in 0..k {
                        next[j] = (an - cn * xs[j]) * cur[j] - bn * prev[j];
                    }
                    std::mem::swap(&mut prev, &mut cur);
                    std::mem::swap(&mut cur, &mut next);
                }
            }
            acc
        })
        .collect();
    let mut fine_sum = vec![0.0; len];
    let mut coarse_sum = vec![0.0; len];
    let mut abs_sum = vec![0.0; len];
    for part in &partials {
        for n in 0..len {
            fine_sum[n] += part[0][n];
            coarse_sum[n] += part[1][n];
            abs_sum[n] += part[2][n];
        }
    }
    let err = (0..len)
        .map(|n| (fine_sum[n] - coarse_sum[n]).abs() + 64.0 * f64::EPSILON * abs_sum[n])
        .collect();
    (fine_sum, err)
}

/// `⟨n|Ŵ_w(0)|n⟩` for `n = 0..len`, each with its error estimate.
pub fn witness_diag_table_with_error(len: usize, w: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_width(w)?;
    if len == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let (mut values, mut errors) = diag_integral_table(len, w);
    let series_len = len.min(SERIES_MAX_N + 1);
    let series: Vec<(f64, f64)> = (0..series_len)
        .into_par_iter()
        .map(|n| diag_series(n, w))
        .collect();
    for (n, (v, e)) in series.into_iter().enumerate() {
        if e <= errors[n] {
            values[n] = v;
            errors[n] = e;
        }
    }
    Ok((values, errors))
}

/// `⟨n|Ŵ_w(0)|n⟩` for `n = 0..len`.
pub fn witness_diag_table(len: usize, w: f64) -> Result<Vec<f64>> {
    Ok(witness_diag_table_with_error(len, w)?.0)
}

/// `⟨n|Ŵ_w(0)|n⟩` for the unnormalised disc filter.
pub fn witness_diag(n: usize, w: f64) -> Result<f64> {
    check_width(w)?;
    if n == 0 {
        return Ok(w * w / 16.0);
    }
    let (series, series_err) = if n <= SERIES_MAX_N {
        diag_series(n, w)
    } else {
        (f64::NAN, f64::INFINITY)
    };
    if series_err < 1e-15 * series.abs().max(1e-300) {
        return Ok(series);
    }
    let (values, errors) = diag_integral_table(n + 1, w);
    Ok(if series_err <= errors[n] {
        series
    } else {
        values[n]
    })
}

/// `⟨α₀|Ŵ_w(0)|α₀⟩ = J1(w r)² / (4r²)` with `r = |α₀|`.
pub fn witness_coherent_closed_form(r: f64, w: f64) -> Result<f64> {
    check_width(w)?;
    if !(r >= 0.0) {
        return Err(domain(format!("distance {r} must be nonnegative")));
    }
    if r == 0.0 {
        return Ok(w * w / 16.0);
    }
    let j = bessel_j1(w * r);
    Ok(j * j / (4.0 * r * r))
}

/// Trace of the normalised disc witness (filter divided by `π/4`) over the
/// first `dim` Fock states. The untruncated trace is `1/π`; the partial sums
/// approach it like `dim^{-1/2}`.
pub fn witness_trace(w: f64, dim: usize) -> Result<f64> {
    if dim == 0 {
        return Err(Error::Dimension("trace needs at least one Fock state".into()));
    }
    let table = witness_diag_table(dim, w)?;
    Ok(table.iter().sum::<f64>() * 4.0 / PI)
}

/// Witness expectation with its truncation diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpectationReport {
    pub value: f64,
    /// `max_{dim ≤ n < 4 dim} |W_nn| × tail_mass`.
    pub truncation_bound: f64,
    pub terms_used: usize,
    pub dim_used: usize,
    /// The sign of `value` is certified: `truncation_bound < |value|`.
    pub certified: bool,
}

/// Photon statistics of `D(-α) ρ D(α)` with the tail mass, left unnormalised
/// so that weight pushed past the truncation stays in the tail.
fn displaced_statistics(rho: &DensityMatrix, alpha: ComplexPoint) -> Result<(Vec<f64>, f64)> {
    let (block, tail) = rho.displaced_block(-alpha)?;
    let probs = (0..rho.dim())
        .map(|n| {
            let p = block[(n, n)].re;
            if p >= 0.0 {
                Ok(p)
            } else if p >= -crate::fock::NEGATIVITY_CLAMP {
                Ok(0.0)
            } else {
                Err(Error::NumericalNegativity { index: n, value: p })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((probs, tail))
}

fn report(probs: &[f64], tail: f64, table: &[f64]) -> ExpectationReport {
    let dim = probs.len();
    let value: f64 = probs.iter().zip(table).map(|(p, w)| p * w).sum();
    let probe = table[dim..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let truncation_bound = probe * tail;
    ExpectationReport {
        value,
        truncation_bound,
        terms_used: probs.iter().filter(|p| **p != 0.0).count(),
        dim_used: dim,
        certified: truncation_bound < value.abs(),
    }
}

/// `⟨Ŵ_w(α)⟩ = Σ_n W_nn(w) p_n(-α)`.
pub fn expectation(rho: &DensityMatrix, spec: &WitnessSpec) -> Result<ExpectationReport> {
    let (probs, tail) = displaced_statistics(rho, spec.alpha)?;
    let table = witness_diag_table(4 * rho.dim(), spec.w)?;
    Ok(report(&probs, tail, &table))
}

/// Sign change located by a width scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Detection {
    /// Refined crossing width, when a certified positive-to-negative bracket exists.
    pub w_star: Option<f64>,
    /// Last certified positive and first certified negative grid widths.
    pub bracket: Option<(f64, f64)>,
    /// Width of the first certified negative value.
    pub first_negative: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WidthScan {
    pub points: Vec<(f64, ExpectationReport)>,
    pub detection: Option<Detection>,
}

impl WidthScan {
    pub fn detected(&self) -> bool {
        self.detection.is_some()
    }

    pub fn w_star(&self) -> Option<f64> {
        self.detection.and_then(|d| d.w_star)
    }

    pub fn min(&self) -> Option<(f64, f64)> {
        self.points
            .iter()
            .map(|(w, r)| (*w, r.value))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Evaluates the witness along `w_grid` at fixed `α` and refines the first
/// certified positive-to-negative crossing by bisection to `w_tol`.
pub fn scan_width(rho: &DensityMatrix, alpha: ComplexPoint, w_grid: &[f64], w_tol: f64) -> Result<WidthScan> {
    if w_grid.is_empty() {
        return Err(domain("width grid is empty"));
    }
    for pair in w_grid.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(domain("width grid must be strictly increasing"));
        }
    }
    for &w in w_grid {
        check_width(w)?;
    }
    if !(w_tol > 0.0) {
        return Err(domain(format!("bisection tolerance {w_tol} must be positive")));
    }
    let (probs, tail) = displaced_statistics(rho, alpha)?;
    let dim = probs.len();
    let points = w_grid
        .iter()
        .map(|&w| Ok((w, report(&probs, tail, &witness_diag_table(4 * dim, w)?))))
        .collect::<Result<Vec<_>>>()?;

    let mut last_positive = None;
    let mut detection = None;
    for &(w, r) in &points {
        if !r.certified {
            continue;
        }
        if r.value > 0.0 {
            last_positive = Some(w);
        } else {
            let bracket = last_positive.map(|a| (a, w));
            let w_star = match bracket {
                Some((a, b)) => Some(bisect(&probs, a, b, w_tol)?),
                None => None,
            };
            detection = Some(Detection {
                w_star,
                bracket,
                first_negative: w,
            });
            break;
        }
    }
    Ok(WidthScan { points, detection })
}

fn bisect(probs: &[f64], mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let value = |w: f64| -> Result<f64> {
        let table = witness_diag_table(probs.len(), w)?;
        Ok(probs.iter().zip(&table).map(|(p, t)| p * t).sum())
    };
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if value(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Mandel parameter `Q = (⟨n²⟩ - ⟨n⟩² - ⟨n⟩) / ⟨n⟩`.
pub fn mandel_q(rho: &DensityMatrix) -> Result<f64> {
    let stats = rho.photon_statistics()?;
    let mean = stats.mean();
    if mean <= 0.0 {
        return Err(Error::Undefined(
            "Mandel Q needs a nonzero mean photon number".into(),
        ));
    }
    Ok((stats.second_moment() - mean * mean - mean) / mean)
}

/// Variance of `x̂_φ = â e^{-iφ} + â† e^{iφ}`; the vacuum gives 1.
pub fn quadrature_variance(rho: &DensityMatrix, phase: f64) -> Result<f64> {
    let mean_n = rho.photon_statistics()?.mean();
    let rot = num_complex::Complex64::from_polar(1.0, -phase);
    let a = rho.expect_a();
    let a2 = rho.expect_a2();
    let x_mean = 2.0 * (a * rot).re;
    Ok(2.0 * (a2 * rot * rot).re + 2.0 * mean_n + 1.0 - x_mean * x_mean)
}

/// Smallest quadrature variance over `phases` equally spaced angles in `[0, π)`.
pub fn min_quadrature_variance(rho: &DensityMatrix, phases: usize) -> Result<(f64, f64)> {
    let phases = phases.max(1);
    let mut best = (f64::INFINITY, 0.0);
    for j in 0..phases {
        let phi = PI * j as f64 / phases as f64;
        let v = quadrature_variance(rho, phi)?;
        if v < best.0 {
            best = (v, phi);
        }
    }
    Ok(best)
}

/// Tolerance on `|Φ| - 1` in [`first_order_char_test`].
pub const FIRST_ORDER_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FirstOrderReport {
    pub max_modulus: f64,
    pub argmax: ComplexPoint,
    pub witnessed: bool,
}

/// Largest `|Φ(β)|` over `beta_grid`; any value above one certifies
/// nonclassicality.
pub fn first_order_char_test(rho: &DensityMatrix, beta_grid: &[ComplexPoint]) -> Result<FirstOrderReport> {
    let bands = CharBands::new(rho);
    let values = beta_grid
        .par_iter()
        .map(|&b| Ok((b, bands.eval(b)?.norm())))
        .collect::<Result<Vec<_>>>()?;
    let (argmax, max_modulus) =
        values
            .into_iter()
            .fold((ComplexPoint::ZERO, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
    Ok(FirstOrderReport {
        max_modulus,
        argmax,
        witnessed: max_modulus > 1.0 + FIRST_ORDER_TOL,
    })
}

/// Polar grid of `radial × angular` points with radii in `(0, radius]`
/// plus the origin.
pub fn polar_grid(radius: f64, radial: usize, angular: usize) -> Vec<ComplexPoint> {
    let mut grid = vec![ComplexPoint::ZERO];
    for i in 1..=radial {
        let r = radius * i as f64 / radial as f64;
        for j in 0..angular {
            let t = 2.0 * PI * j as f64 / angular as f64;
            grid.push(ComplexPoint {
                re: r * t.cos(),
                im: r * t.sin(),
            });
        }
    }
    grid
}
