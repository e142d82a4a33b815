//! Nonclassicality filters `Ω_w(β)`: kernels, autocorrelation, width
//! scaling, sampled checks of the filter conditions and the construction of
//! a filter family from a single witness.
//!
//! Conditions checked by [`verify_filter_conditions`]:
//! * C1: `Ω_w(β) e^{|β|²/2}` integrable (sampled decay evidence only),
//! * C2: the Fourier transform of `Ω_w` is nonnegative,
//! * C3: `Ω_w(0)` and the approach to the `w → ∞` limit.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::point::ComplexPoint;
use crate::special::{gauss_legendre, PolarRule};
use crate::transform::{LeveledSampler, QuadConfig, SpectralSampler};

type KernelFn = Arc<dyn Fn(ComplexPoint) -> f64 + Send + Sync>;
type FamilyFn = Arc<dyn Fn(ComplexPoint, f64) -> Complex64 + Send + Sync>;
type CharFn = Arc<dyn Fn(ComplexPoint) -> Complex64 + Send + Sync>;

/// `Ω_1` of the disc kernel at separation `s`: the overlap area of two discs
/// of radius 1/2, `½ arccos s - (s/2)√(1 - s²)`.
pub fn disc_overlap(s: f64) -> f64 {
    let s = s.abs();
    if s >= 1.0 {
        0.0
    } else {
        0.5 * s.acos() - 0.5 * s * (1.0 - s * s).sqrt()
    }
}

/// `Ω′(0)` for the quartic kernel: `∫ e^{-2|β|⁴} d²β = (π/2)√(π/2)`.
pub const QUARTIC_AUTOCORRELATION_ORIGIN: f64 = 1.968_701_243_215_302_2;

/// A real kernel `ω_1(β)`.
#[derive(Clone)]
pub struct FilterKernel {
    eval: KernelFn,
    support_radius: Option<f64>,
    radial: bool,
}

impl fmt::Debug for FilterKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FilterKernel")
            .field("support_radius", &self.support_radius)
            .field("radial", &self.radial)
            .finish()
    }
}

impl FilterKernel {
    /// `support_radius = None` means unbounded support.
    pub fn new(
        eval: impl Fn(ComplexPoint) -> f64 + Send + Sync + 'static,
        support_radius: Option<f64>,
        radial: bool,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            support_radius,
            radial,
        }
    }

    /// Indicator of the disc `|β| < 1/2`.
    pub fn disc() -> Self {
        Self::new(|b| if b.norm() < 0.5 { 1.0 } else { 0.0 }, Some(0.5), true)
    }

    /// `ω′(β) = e^{-|β|⁴}`.
    pub fn quartic() -> Self {
        Self::new(|b| (-b.norm_sqr().powi(2)).exp(), None, true)
    }

    pub fn eval(&self, beta: ComplexPoint) -> f64 {
        (self.eval)(beta)
    }

    pub fn support_radius(&self) -> Option<f64> {
        self.support_radius
    }

    pub fn is_radial(&self) -> bool {
        self.radial
    }
}

/// Tensor Gauss–Legendre settings for [`autocorrelate`]. The result is
/// accepted when orders `order` and `2·order` agree to `tol`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelQuad {
    pub order: usize,
    pub tol: f64,
}

impl Default for KernelQuad {
    fn default() -> Self {
        Self {
            order: 64,
            tol: 1e-10,
        }
    }
}

/// `Ω_1(β) = ∫ ω_1(β′) ω_1(β + β′) d²β′`.
///
/// Compact kernels are integrated over the lens where both supports
/// overlap, parametrised so that the boundary square roots disappear.
/// Unbounded kernels use a rectangle around the midpoint `-β/2`, shrunk
/// until the integrand at its edges is below `1e-18` of the centre value.
pub fn autocorrelate(kernel: &FilterKernel, beta: ComplexPoint, cfg: &KernelQuad) -> Result<f64> {
    let s = beta.norm();
    let (c, sn) = if s > 0.0 {
        (beta.re / s, beta.im / s)
    } else {
        (1.0, 0.0)
    };
    // local frame: x along β, origin at -β/2
    let to_global = move |x: f64, y: f64| ComplexPoint {
        re: -0.5 * beta.re + x * c - y * sn,
        im: -0.5 * beta.im + x * sn + y * c,
    };
    let integrand = |x: f64, y: f64| {
        let b1 = to_global(x, y);
        let b2 = ComplexPoint {
            re: b1.re + beta.re,
            im: b1.im + beta.im,
        };
        kernel.eval(b1) * kernel.eval(b2)
    };

    let rule_value = |order: usize| -> f64 {
        match kernel.support_radius {
            Some(radius) => lens_integral(&integrand, radius, s, order),
            None => rectangle_integral(&integrand, order),
        }
    };

    if let Some(radius) = kernel.support_radius {
        if s >= 2.0 * radius {
            return Ok(0.0);
        }
    }
    let coarse = rule_value(cfg.order);
    let fine = rule_value(2 * cfg.order);
    let delta = (fine - coarse).abs();
    if delta > cfg.tol * fine.abs().max(1.0) {
        return Err(Error::Accuracy {
            estimate: delta,
            tolerance: cfg.tol,
        });
    }
    Ok(fine)
}

fn lens_integral(f: &impl Fn(f64, f64) -> f64, radius: f64, s: f64, order: usize) -> f64 {
    // Right half of the lens: x + s/2 = R cos φ, φ ∈ [0, acos(s/2R)],
    // y = v R sin φ, v ∈ [-1, 1]; area element R² sin²φ dφ dv.
    let phi_max = (0.5 * s / radius).min(1.0).acos();
    let rule = gauss_legendre(order);
    let mut total = 0.0;
    for (&tp, &wp) in rule.nodes.iter().zip(&rule.weights) {
        let phi = 0.5 * phi_max * (tp + 1.0);
        let (sp, cp) = phi.sin_cos();
        let x = radius * cp - 0.5 * s;
        let half_height = radius * sp;
        let jac = 0.5 * phi_max * wp * radius * radius * sp * sp;
        let mut inner = 0.0;
        for (&tv, &wv) in rule.nodes.iter().zip(&rule.weights) {
            let y = tv * half_height;
            inner += wv * (f(x, y) + f(-x, y));
        }
        total += jac * inner;
    }
    total
}

fn rectangle_integral(f: &impl Fn(f64, f64) -> f64, order: usize) -> f64 {
    let centre = f(0.0, 0.0);
    if centre == 0.0 {
        return 0.0;
    }
    let negligible = |v: f64| v.abs() < 1e-18 * centre.abs();
    let mut hx: f64 = 64.0;
    while hx > 1e-6 && negligible(f(0.8 * hx, 0.0)) && negligible(f(-0.8 * hx, 0.0)) {
        hx *= 0.8;
    }
    let mut hy: f64 = 64.0;
    while hy > 1e-6 && negligible(f(0.0, 0.8 * hy)) && negligible(f(0.0, -0.8 * hy)) {
        hy *= 0.8;
    }
    let rule = gauss_legendre(order);
    let mut total = 0.0;
    for (&tx, &wx) in rule.nodes.iter().zip(&rule.weights) {
        let mut inner = 0.0;
        for (&ty, &wy) in rule.nodes.iter().zip(&rule.weights) {
            inner += wy * f(tx * hx, ty * hy);
        }
        total += wx * inner;
    }
    total * hx * hy
}

/// A one-parameter family `Ω_w(β)`.
///
/// `support` and `breaks` are given at `w = 1` and scale linearly with `w`;
/// `breaks` are radii where `Ω_w` is not smooth, used to place quadrature
/// panels.
#[derive(Clone)]
pub struct FilterFamily {
    eval: FamilyFn,
    normalized: bool,
    support: Option<f64>,
    breaks: Vec<f64>,
    radial: bool,
    label: String,
}

impl fmt::Debug for FilterFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FilterFamily")
            .field("label", &self.label)
            .field("normalized", &self.normalized)
            .field("support", &self.support)
            .field("breaks", &self.breaks)
            .field("radial", &self.radial)
            .finish()
    }
}

impl FilterFamily {
    pub fn new(
        label: impl Into<String>,
        eval: impl Fn(ComplexPoint, f64) -> Complex64 + Send + Sync + 'static,
        normalized: bool,
        support: Option<f64>,
        breaks: Vec<f64>,
        radial: bool,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            normalized,
            support,
            breaks,
            radial,
            label: label.into(),
        }
    }

    /// Autocorrelation of the disc kernel, `Ω_w(β) = Ω_1(β/w)` with
    /// `Ω_1(0) = π/4`. Kept unnormalised so that witness elements carry the
    /// plain polynomial coefficients.
    pub fn disc() -> Self {
        Self::new(
            "disc",
            |b, w| Complex64::new(disc_overlap(b.norm() / w), 0.0),
            false,
            Some(1.0),
            Vec::new(),
            true,
        )
    }

    /// The disc family divided by `π/4`.
    pub fn disc_normalized() -> Self {
        Self::new(
            "disc-normalized",
            |b, w| Complex64::new(disc_overlap(b.norm() / w) * 4.0 / PI, 0.0),
            true,
            Some(1.0),
            Vec::new(),
            true,
        )
    }

    /// `Ω_w(β) = Ω_1(β/w)` with `Ω_1` the quadrature autocorrelation of
    /// `kernel`, optionally divided by its value at the origin. Evaluation
    /// failures surface as NaN.
    pub fn autocorrelation(kernel: FilterKernel, cfg: KernelQuad, normalize: bool) -> Result<Self> {
        let origin = autocorrelate(&kernel, ComplexPoint::ZERO, &cfg)?;
        if !(origin > 0.0) {
            return Err(domain("kernel autocorrelation vanishes at the origin"));
        }
        let scale = if normalize { 1.0 / origin } else { 1.0 };
        let support = kernel.support_radius.map(|r| 2.0 * r);
        let radial = kernel.radial;
        let k = kernel.clone();
        Ok(Self::new(
            "autocorrelation",
            move |b, w| {
                let v = autocorrelate(&k, b.scale(1.0 / w), &cfg).unwrap_or(f64::NAN);
                Complex64::new(v * scale, 0.0)
            },
            normalize,
            support,
            Vec::new(),
            radial,
        ))
    }

    /// Normalised autocorrelation of the quartic kernel `e^{-|β|⁴}`:
    /// the auxiliary filter used in the witness-to-filter construction.
    pub fn reference() -> Self {
        let kernel = FilterKernel::quartic();
        let cfg = KernelQuad::default();
        Self::new(
            "reference",
            move |b, w| {
                let v = autocorrelate(&kernel, b.scale(1.0 / w), &cfg).unwrap_or(f64::NAN);
                Complex64::new(v / QUARTIC_AUTOCORRELATION_ORIGIN, 0.0)
            },
            true,
            None,
            Vec::new(),
            true,
        )
    }

    pub fn eval(&self, beta: ComplexPoint, w: f64) -> Complex64 {
        (self.eval)(beta, w)
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn is_radial(&self) -> bool {
        self.radial
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Support radius of `Ω_w`, if compact.
    pub fn support_radius(&self, w: f64) -> Option<f64> {
        self.support.map(|r| r * w)
    }

    pub fn breaks(&self, w: f64) -> Vec<f64> {
        self.breaks.iter().map(|b| b * w).collect()
    }

    /// Largest of `|Ω_w|` over a few directions at radius `r`.
    pub fn radial_max(&self, r: f64, w: f64) -> f64 {
        let directions: &[f64] = if self.radial {
            &[0.0]
        } else {
            &[
                0.0,
                0.25 * PI,
                0.5 * PI,
                0.75 * PI,
                PI,
                1.25 * PI,
                1.5 * PI,
                1.75 * PI,
            ]
        };
        directions
            .iter()
            .map(|&t| {
                self.eval(ComplexPoint::from_polar(r, t).unwrap_or(ComplexPoint::ZERO), w)
                    .norm()
            })
            .fold(0.0, f64::max)
    }

    /// Radius beyond which `|Ω_w(β)| · growth(|β|)` stays below `cutoff`
    /// on a scan with step `w/4` out to `limit`. Compact families return
    /// their support.
    pub fn integration_radius(&self, w: f64, growth: impl Fn(f64) -> f64, cutoff: f64, limit: f64) -> f64 {
        if let Some(r) = self.support_radius(w) {
            return r;
        }
        let step = 0.25 * w;
        let mut last = step;
        let mut r = step;
        while r <= limit {
            if self.radial_max(r, w) * growth(r) >= cutoff {
                last = r;
            }
            r += step;
        }
        (last + step).min(limit)
    }

    /// Polar rule adapted to `Ω_w` on a disc of radius `radius`.
    pub fn polar_rule(&self, w: f64, radius: f64, per_panel: usize, angular: usize) -> PolarRule {
        let mut breaks = self.breaks(w);
        if let Some(r) = self.support_radius(w) {
            breaks.push(r);
        }
        // keep panels no wider than w so oscillations stay resolved
        let mut b = w;
        while b < radius {
            breaks.push(b);
            b += w;
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * w);
        PolarRule::new(radius, &breaks, per_panel, angular)
    }
}

/// `F_a` with `F_a.eval(β, w) = F.eval(β, a·w)`, so `scale_width(F, a)`
/// evaluated at `w = 1` is `Ω_a`.
pub fn scale_width(family: &FilterFamily, a: f64) -> Result<FilterFamily> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain(format!("width {a} must be positive")));
    }
    let inner = Arc::clone(&family.eval);
    Ok(FilterFamily {
        eval: Arc::new(move |b, w| inner(b, a * w)),
        normalized: family.normalized,
        support: family.support.map(|r| r * a),
        breaks: family.breaks.iter().map(|x| x * a).collect(),
        radial: family.radial,
        label: family.label.clone(),
    })
}

/// Characteristic function `Φ^{(Q)}_Ŵ(β)` of a witness with `Tr Ŵ = 1/π`,
/// so that `Φ^{(Q)}_Ŵ(0) = 1`.
#[derive(Clone)]
pub struct WitnessCharFn {
    eval: CharFn,
    support: Option<f64>,
    label: String,
}

impl fmt::Debug for WitnessCharFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WitnessCharFn")
            .field("label", &self.label)
            .field("support", &self.support)
            .finish()
    }
}

impl WitnessCharFn {
    pub fn new(
        label: impl Into<String>,
        eval: impl Fn(ComplexPoint) -> Complex64 + Send + Sync + 'static,
        support: Option<f64>,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            support,
            label: label.into(),
        }
    }

    /// The disc witness of width `w0`, scaled to unit value at the origin.
    pub fn disc(w0: f64) -> Result<Self> {
        if !(w0 > 0.0) {
            return Err(domain(format!("width {w0} must be positive")));
        }
        Ok(Self::new(
            format!("disc(w={w0})"),
            move |b| Complex64::new(disc_overlap(b.norm() / w0) * 4.0 / PI, 0.0),
            Some(w0),
        ))
    }

    /// `e^{-c|β|²/2}`; `c > 1` keeps `Φ^{(Q)} e^{|β|²/2}` integrable.
    pub fn gaussian(c: f64) -> Result<Self> {
        if !(c > 1.0) {
            return Err(domain(format!("gaussian witness needs c > 1, got {c}")));
        }
        Ok(Self::new(
            format!("gaussian(c={c})"),
            move |b| Complex64::new((-0.5 * c * b.norm_sqr()).exp(), 0.0),
            None,
        ))
    }

    pub fn eval(&self, beta: ComplexPoint) -> Complex64 {
        (self.eval)(beta)
    }

    pub fn support_radius(&self) -> Option<f64> {
        self.support
    }
}

/// Weight of the witness term, `f(w) = e^{-(w-1)²}`.
pub fn appendix_weight(w: f64) -> f64 {
    (-(w - 1.0) * (w - 1.0)).exp()
}

/// Damping exponent of the witness term, `g(w) = max{1 - 1/w², 0}`.
pub fn appendix_damping(w: f64) -> f64 {
    (1.0 - 1.0 / (w * w)).max(0.0)
}

fn check_appendix_width(w: f64) -> Result<()> {
    if !(w >= 1.0) || !w.is_finite() {
        return Err(domain(format!(
            "the witness-to-filter construction is defined for w >= 1, got {w}"
        )));
    }
    Ok(())
}

/// `Ω_w(β) = f(w) Φ^{(Q)}(β/w) e^{-g(w)|β|²/2} + (1 - f(w)) Ω′_w(β)`.
pub fn filter_from_witness(
    phi_q: &WitnessCharFn,
    reference: &FilterFamily,
    w: f64,
    beta: ComplexPoint,
) -> Result<Complex64> {
    check_appendix_width(w)?;
    Ok(appendix_value(phi_q, reference, w, beta, appendix_damping))
}

fn appendix_value(
    phi_q: &WitnessCharFn,
    reference: &FilterFamily,
    w: f64,
    beta: ComplexPoint,
    damping: impl Fn(f64) -> f64,
) -> Complex64 {
    let f = appendix_weight(w);
    let witness_term = if f > 0.0 {
        phi_q.eval(beta.scale(1.0 / w)) * (f * (-0.5 * damping(w) * beta.norm_sqr()).exp())
    } else {
        Complex64::new(0.0, 0.0)
    };
    if f == 1.0 {
        return witness_term;
    }
    witness_term + reference.eval(beta, w) * (1.0 - f)
}

/// The constructed family as a [`FilterFamily`]; `w < 1` evaluates to NaN.
pub fn appendix_family(phi_q: &WitnessCharFn, reference: &FilterFamily) -> FilterFamily {
    appendix_family_with_damping(phi_q, reference, appendix_damping)
}

/// Same construction with a caller-chosen damping exponent `g(w)`; used to
/// show what goes wrong when `g` violates `g(w) ≥ 1 - 1/w²`.
pub fn appendix_family_with_damping(
    phi_q: &WitnessCharFn,
    reference: &FilterFamily,
    damping: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> FilterFamily {
    let phi = phi_q.clone();
    let reference = reference.clone();
    let radial = reference.radial;
    let breaks = phi_q.support.into_iter().collect();
    FilterFamily::new(
        format!("appendix[{}]", phi_q.label),
        move |b, w| {
            if check_appendix_width(w).is_err() {
                return Complex64::new(f64::NAN, f64::NAN);
            }
            appendix_value(&phi, &reference, w, b, &damping)
        },
        true,
        None,
        breaks,
        radial,
    )
}

/// Sampling settings for [`verify_filter_conditions`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConditionConfig {
    /// Radial samples on `(0, 8w]` for the decay proxy.
    pub radial_samples: usize,
    /// Transform evaluation radii on `[0, transform_extent / w]`.
    pub transform_samples: usize,
    pub transform_extent: f64,
    /// Tolerance on negative transform values.
    pub transform_tol: f64,
    /// Decay proxy passes when `r·|Ω_w|e^{r²/2}` at the end of the range is
    /// this small relative to its maximum.
    pub tail_ratio_tol: f64,
    pub quad: QuadConfig,
}

impl Default for ConditionConfig {
    fn default() -> Self {
        Self {
            radial_samples: 256,
            transform_samples: 41,
            transform_extent: 8.0,
            transform_tol: 1e-8,
            tail_ratio_tol: 1e-8,
            quad: QuadConfig {
                radial: 96,
                angular: 128,
                tol: 1e-10,
                max_doublings: 2,
            },
        }
    }
}

/// Decay evidence for `|Ω_w(β)| e^{|β|²/2}` on `|β| ≤ 8w`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub pass: bool,
    /// All samples in the outer quarter of the range are exactly zero.
    pub finite_support: bool,
    /// Least-squares slope of `ln(r |Ω_w| e^{r²/2})` over the outer quarter.
    pub decay_slope: f64,
    /// `r |Ω_w| e^{r²/2}` at the outermost sample over its maximum.
    pub tail_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransformReport {
    pub pass: bool,
    pub min_value: f64,
    pub argmin: ComplexPoint,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitReport {
    pub pass: bool,
    pub value_at_origin: f64,
    /// Estimate of `lim_{w→∞} Ω_w(β)`, taken as `Ω_{2¹⁰ w}(0)`.
    pub limit: f64,
    /// Whether `|Ω_{2^k w}(β) - limit|` was nonincreasing in `k = 0..5` at every sample.
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WidthConditions {
    pub w: f64,
    pub c1: DecayReport,
    pub c2: TransformReport,
    pub c3: LimitReport,
}

impl WidthConditions {
    pub fn all_pass(&self) -> bool {
        self.c1.pass && self.c2.pass && self.c3.pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub family: String,
    pub normalized: bool,
    pub widths: Vec<WidthConditions>,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        self.widths.iter().all(WidthConditions::all_pass)
    }
}

/// Sampled evidence for C1–C3 at each width in `w_list`.
pub fn verify_filter_conditions(
    family: &FilterFamily,
    w_list: &[f64],
    cfg: &ConditionConfig,
) -> Result<ConditionReport> {
    let widths = w_list
        .iter()
        .map(|&w| {
            if !(w > 0.0) {
                return Err(domain(format!("width {w} must be positive")));
            }
            Ok(WidthConditions {
                w,
                c1: decay_proxy(family, w, cfg),
                c2: transform_minimum(family, w, cfg)?,
                c3: limit_check(family, w),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConditionReport {
        family: family.label.clone(),
        normalized: family.normalized,
        widths,
    })
}

/// C1 proxy on its own.
pub fn decay_proxy(family: &FilterFamily, w: f64, cfg: &ConditionConfig) -> DecayReport {
    let n = cfg.radial_samples.max(8);
    let r_max = 8.0 * w;
    let samples: Vec<(f64, f64)> = (1..=n)
        .map(|j| {
            let r = r_max * j as f64 / n as f64;
            let m = family.radial_max(r, w);
            // log space: e^{r²/2} alone overflows for wide filters
            let log_m = if m > 0.0 {
                m.ln() + 0.5 * r * r + r.ln()
            } else {
                f64::NEG_INFINITY
            };
            (r, log_m)
        })
        .collect();
    let outer = &samples[3 * n / 4..];
    let finite_support = outer.iter().all(|(_, l)| *l == f64::NEG_INFINITY);
    if samples.iter().any(|(_, l)| l.is_nan()) {
        return DecayReport {
            pass: false,
            finite_support: false,
            decay_slope: f64::NAN,
            tail_ratio: f64::NAN,
        };
    }
    let peak = samples.iter().map(|(_, l)| *l).fold(f64::NEG_INFINITY, f64::max);
    let last = samples[n - 1].1;
    let tail_ratio = if last == f64::NEG_INFINITY {
        0.0
    } else {
        (last - peak).exp()
    };
    let fit: Vec<&(f64, f64)> = outer.iter().filter(|(_, l)| l.is_finite()).collect();
    let decay_slope = if fit.len() >= 2 {
        let k = fit.len() as f64;
        let mx = fit.iter().map(|(r, _)| r).sum::<f64>() / k;
        let my = fit.iter().map(|(_, l)| l).sum::<f64>() / k;
        let sxy: f64 = fit.iter().map(|(r, l)| (r - mx) * (l - my)).sum();
        let sxx: f64 = fit.iter().map(|(r, _)| (r - mx) * (r - mx)).sum();
        sxy / sxx
    } else {
        f64::NEG_INFINITY
    };
    let pass = finite_support || (tail_ratio < cfg.tail_ratio_tol && decay_slope < 0.0);
    DecayReport {
        pass,
        finite_support,
        decay_slope,
        tail_ratio,
    }
}

/// Transform `(1/π²) ∫ Ω_w(β) e^{αβ* - α*β} d²β` with the integrand cached
/// on a polar rule.
pub struct FilterTransform {
    sampler: LeveledSampler<Box<dyn Fn(usize, usize) -> SpectralSampler + Send + Sync>>,
}

impl FilterTransform {
    pub fn new(family: &FilterFamily, w: f64, quad: &QuadConfig) -> Self {
        let radius = family.integration_radius(w, |_| 1.0, 1e-16, 64.0 * w);
        let family = family.clone();
        let build = Box::new(move |nr: usize, na: usize| {
            let rule = family.polar_rule(w, radius, nr, na);
            SpectralSampler::build(&rule, |r, angles| {
                if family.radial {
                    let v = family.eval(ComplexPoint::real(r), w);
                    vec![v; angles.len()]
                } else {
                    angles
                        .iter()
                        .map(|&t| {
                            family.eval(
                                ComplexPoint {
                                    re: r * t.cos(),
                                    im: r * t.sin(),
                                },
                                w,
                            )
                        })
                        .collect()
                }
            })
        }) as Box<dyn Fn(usize, usize) -> SpectralSampler + Send + Sync>;
        Self {
            sampler: LeveledSampler::new(*quad, build),
        }
    }

    pub fn eval(&self, alpha: ComplexPoint) -> Result<Complex64> {
        Ok(self.sampler.eval(alpha)?.value)
    }
}

fn transform_minimum(family: &FilterFamily, w: f64, cfg: &ConditionConfig) -> Result<TransformReport> {
    let transform = FilterTransform::new(family, w, &cfg.quad);
    let extent = cfg.transform_extent / w;
    let n = cfg.transform_samples.max(2);
    let directions: &[f64] = if family.radial {
        &[0.0, 0.3]
    } else {
        &[0.0, 0.25 * PI, 0.5 * PI, 0.75 * PI]
    };
    let mut min_value = f64::INFINITY;
    let mut argmin = ComplexPoint::ZERO;
    let mut samples = 0;
    for j in 0..n {
        let rad = extent * j as f64 / (n - 1) as f64;
        for &t in directions {
            let alpha = ComplexPoint {
                re: rad * t.cos(),
                im: rad * t.sin(),
            };
            let v = transform.eval(alpha)?.re;
            samples += 1;
            if v < min_value {
                min_value = v;
                argmin = alpha;
            }
            if j == 0 {
                break;
            }
        }
    }
    Ok(TransformReport {
        pass: min_value >= -cfg.transform_tol,
        min_value,
        argmin,
        samples,
    })
}

fn limit_check(family: &FilterFamily, w: f64) -> LimitReport {
    let origin = family.eval(ComplexPoint::ZERO, w).re;
    let limit = family.eval(ComplexPoint::ZERO, w * 1024.0).re;
    let probes = [
        ComplexPoint::real(0.5),
        ComplexPoint { re: 0.0, im: 1.0 },
        ComplexPoint { re: 1.2, im: 1.2 },
        ComplexPoint::real(3.0),
    ];
    let monotone = probes.iter().all(|&b| {
        let dist: Vec<f64> = (0..=5)
            .map(|k| (family.eval(b, w * f64::from(1 << k)).re - limit).abs())
            .collect();
        dist.windows(2).all(|d| d[1] <= d[0] + 1e-12)
    });
    LimitReport {
        pass: origin.is_finite() && monotone,
        value_at_origin: origin,
        limit,
        monotone,
    }
}
