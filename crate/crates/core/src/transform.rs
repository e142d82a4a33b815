//! Phase-space Fourier transforms `(1/π²) ∫ d²β f(β) e^{αβ* - α*β}` by polar quadrature.
//!
//! The integrand is tabulated once on the nodes of a [`PolarRule`]; every
//! further evaluation point `α` only costs one pass over the cached values.
//! Self-convergence is checked by doubling both the radial and the angular
//! order.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::ComplexPoint;
use crate::special::PolarRule;

const CHUNK: usize = 8192;

/// Settings of the polar quadrature: Gauss–Legendre nodes per radial panel,
/// trapezoid nodes in angle, the self-convergence tolerance and how many
/// times the orders may be doubled to meet it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub radial: usize,
    pub angular: usize,
    pub tol: f64,
    pub max_doublings: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            radial: 128,
            angular: 256,
            tol: 1e-8,
            max_doublings: 2,
        }
    }
}

impl QuadConfig {
    pub fn coarse() -> Self {
        Self {
            radial: 48,
            angular: 96,
            tol: 1e-7,
            max_doublings: 3,
        }
    }

    pub(crate) fn level(&self, level: u32) -> (usize, usize) {
        (self.radial << level, self.angular << level)
    }
}

/// Integrand values cached on the nodes of one polar rule, already
/// multiplied by the quadrature weights and `1/π²`.
pub(crate) struct SpectralSampler {
    nodes: Vec<(f64, f64)>,
    values: Vec<Complex64>,
}

impl SpectralSampler {
    /// `row(r, angles)` returns the integrand at radius `r` for every angle.
    pub(crate) fn build<F>(rule: &PolarRule, row: F) -> Self
    where
        F: Fn(f64, &[f64]) -> Vec<Complex64> + Sync,
    {
        let scale = rule.angle_weight / (PI * PI);
        let rows: Vec<Vec<(f64, f64, Complex64)>> = rule
            .radii
            .par_iter()
            .zip(&rule.radial_weights)
            .map(|(&r, &wr)| {
                let vals = row(r, &rule.angles);
                rule.angles
                    .iter()
                    .zip(vals)
                    .filter(|(_, v)| *v != Complex64::new(0.0, 0.0))
                    .map(|(&t, v)| (r * t.cos(), r * t.sin(), v * (wr * scale)))
                    .collect()
            })
            .collect();
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        for row in rows {
            for (x, y, v) in row {
                nodes.push((x, y));
                values.push(v);
            }
        }
        Self { nodes, values }
    }

    /// Sum over fixed-size chunks combined in order, so the result does not
    /// depend on the thread count.
    pub(crate) fn eval(&self, alpha: ComplexPoint) -> Complex64 {
        // αβ* - α*β = 2i (α_im β_re - α_re β_im)
        let (ar, ai) = (2.0 * alpha.re, 2.0 * alpha.im);
        let partials: Vec<Complex64> = self
            .nodes
            .par_chunks(CHUNK)
            .zip(self.values.par_chunks(CHUNK))
            .map(|(nodes, values)| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (&(br, bi), v) in nodes.iter().zip(values) {
                    let (s, c) = (ai * br - ar * bi).sin_cos();
                    acc += v * Complex64::new(c, s);
                }
                acc
            })
            .collect();
        partials.into_iter().sum()
    }
}

/// Result of a self-converged transform evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformEstimate {
    pub value: Complex64,
    /// Change between the two finest orders that were compared.
    pub delta: f64,
    /// Number of doublings used (0 means the base order was never accepted alone).
    pub doublings: u32,
}

/// Samplers at successively doubled orders, built lazily.
pub(crate) struct LeveledSampler<B> {
    levels: Vec<OnceLock<SpectralSampler>>,
    build: B,
    cfg: QuadConfig,
}

impl<B> LeveledSampler<B>
where
    B: Fn(usize, usize) -> SpectralSampler + Sync,
{
    pub(crate) fn new(cfg: QuadConfig, build: B) -> Self {
        let levels = (0..=cfg.max_doublings.max(1)).map(|_| OnceLock::new()).collect();
        Self { levels, build, cfg }
    }

    fn level(&self, l: u32) -> &SpectralSampler {
        self.levels[l as usize].get_or_init(|| {
            let (nr, na) = self.cfg.level(l);
            (self.build)(nr, na)
        })
    }

    pub(crate) fn eval(&self, alpha: ComplexPoint) -> Result<TransformEstimate> {
        let mut prev = self.level(0).eval(alpha);
        let mut delta = f64::INFINITY;
        for l in 1..=self.cfg.max_doublings.max(1) {
            let cur = self.level(l).eval(alpha);
            delta = (cur - prev).norm();
            if delta < self.cfg.tol {
                return Ok(TransformEstimate {
                    value: cur,
                    delta,
                    doublings: l,
                });
            }
            prev = cur;
        }
        Err(Error::Accuracy {
            estimate: delta,
            tolerance: self.cfg.tol,
        })
    }
}
