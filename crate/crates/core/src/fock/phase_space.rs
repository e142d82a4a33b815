//! Characteristic function `Φ(β) = Tr{ρ e^{βa†} e^{-β*a}}` and the Wigner function.
//!
//! With `β = r e^{iθ}` the normally ordered displacement has Fock elements
//! `⟨n+k|·|n⟩ = e^{ikθ} h_n^{(k)}(r)` and `⟨n|·|n+k⟩ = (-1)^k e^{-ikθ} h_n^{(k)}(r)`,
//! so `Φ = a_0 + Σ_{k≥1} [z_k + (-1)^k z_k*]` with `z_k = a_k(r) e^{ikθ}`
//! and `a_k(r) = Σ_n ρ_{n,n+k} h_n^{(k)}(r)`.

use std::sync::Arc;

use num_complex::Complex64;

use super::DensityMatrix;
use crate::error::{Error, Result};
use crate::point::ComplexPoint;
use crate::special::{laguerre_band, PolarRule};
use crate::transform::{LeveledSampler, QuadConfig, SpectralSampler};

/// Largest `|β|` at which `Φ` is evaluated: the Fock elements grow like
/// `e^{|β|²/2}` and overflow beyond `|β|² = 1400`.
pub const MAX_CHAR_MODULUS: f64 = 37.416573867739416;

const WIGNER_IMAG_BOUND: f64 = 1e-8;
const WIGNER_ENVELOPE_CUTOFF: f64 = 1e-17;
const WIGNER_PANEL: f64 = 2.0;

/// The non-zero bands `ρ_{n,n+k}` of a state, ready for evaluating `Φ`.
#[derive(Clone, Debug)]
pub struct CharBands {
    dim: usize,
    bands: Vec<(usize, Vec<Complex64>)>,
}

impl CharBands {
    pub fn new(rho: &DensityMatrix) -> Self {
        let dim = rho.dim();
        let bands = (0..dim)
            .filter_map(|k| {
                let band: Vec<Complex64> = (0..dim - k).map(|n| rho.element(n, n + k)).collect();
                band.iter()
                    .any(|v| *v != Complex64::new(0.0, 0.0))
                    .then_some((k, band))
            })
            .collect();
        Self { dim, bands }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_range(r: f64) -> Result<()> {
        if r > MAX_CHAR_MODULUS || !r.is_finite() {
            return Err(Error::Range {
                beta: r,
                max_beta: MAX_CHAR_MODULUS,
            });
        }
        Ok(())
    }

    /// `(k, a_k(r))` for every non-zero band.
    pub fn coefficients(&self, r: f64) -> Result<Vec<(usize, Complex64)>> {
        Self::check_range(r)?;
        let mut h = vec![0.0; self.dim];
        Ok(self
            .bands
            .iter()
            .map(|(k, band)| {
                let h = &mut h[..band.len()];
                laguerre_band(*k, r, h);
                let a = band.iter().zip(h.iter()).map(|(rho, hn)| rho * *hn).sum();
                (*k, a)
            })
            .collect())
    }

    fn combine(coeffs: &[(usize, Complex64)], theta: f64) -> Complex64 {
        let step = Complex64::from_polar(1.0, theta);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut phase = Complex64::new(1.0, 0.0);
        let mut k_at = 0;
        for &(k, a) in coeffs {
            while k_at < k {
                phase *= step;
                k_at += 1;
            }
            if k == 0 {
                acc += a;
                continue;
            }
            // exact cis for the phase would be costlier and no more accurate at these k
            let z = a * phase;
            if k % 2 == 0 {
                acc += 2.0 * z.re;
            } else {
                acc += Complex64::new(0.0, 2.0 * z.im);
            }
        }
        acc
    }

    /// `Φ` at radius `r` for each angle in `angles`.
    pub fn eval_row(&self, r: f64, angles: &[f64]) -> Result<Vec<Complex64>> {
        let coeffs = self.coefficients(r)?;
        Ok(angles.iter().map(|&t| Self::combine(&coeffs, t)).collect())
    }

    pub fn eval(&self, beta: ComplexPoint) -> Result<Complex64> {
        if beta.is_zero() {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let coeffs = self.coefficients(beta.norm())?;
        Ok(Self::combine(&coeffs, beta.arg()))
    }

    /// Upper bound for `|Φ|` on the circle of radius `r`.
    pub fn envelope(&self, r: f64) -> Result<f64> {
        Ok(self
            .coefficients(r)?
            .iter()
            .map(|(k, a)| if *k == 0 { a.norm() } else { 2.0 * a.norm() })
            .sum())
    }
}

impl DensityMatrix {
    /// `Φ(β) = e^{|β|²/2} Tr{ρ D(β)}`.
    pub fn char_function(&self, beta: ComplexPoint) -> Result<Complex64> {
        CharBands::new(self).eval(beta)
    }

    /// `W(α)` by polar quadrature of `e^{-|β|²/2} Φ(β)`.
    pub fn wigner(&self, alpha: ComplexPoint, cfg: &QuadConfig) -> Result<f64> {
        WignerMap::new(self, cfg)?.eval(alpha)
    }
}

type RowBuilder = Box<dyn Fn(usize, usize) -> SpectralSampler + Send + Sync>;

/// Wigner function of one state with the integrand cached, for evaluation
/// on many phase-space points.
pub struct WignerMap {
    sampler: LeveledSampler<RowBuilder>,
    radius: f64,
}

impl WignerMap {
    pub fn new(rho: &DensityMatrix, cfg: &QuadConfig) -> Result<Self> {
        let bands = Arc::new(CharBands::new(rho));
        // Last radius where the Gaussian-damped envelope is still visible;
        // the envelope itself may vanish at isolated radii.
        let mut radius: f64 = 0.5;
        let mut r: f64 = 0.5;
        while r <= MAX_CHAR_MODULUS {
            if (-0.5 * r * r).exp() * bands.envelope(r)? >= WIGNER_ENVELOPE_CUTOFF {
                radius = r + 0.5;
            }
            r += 0.5;
        }
        let radius = radius.min(MAX_CHAR_MODULUS);
        let breaks: Vec<f64> = (1..)
            .map(|i| i as f64 * WIGNER_PANEL)
            .take_while(|b| *b < radius)
            .collect();
        let build: RowBuilder = Box::new(move |nr, na| {
            let rule = PolarRule::new(radius, &breaks, nr, na);
            let bands = Arc::clone(&bands);
            SpectralSampler::build(&rule, move |r, angles| {
                let g = (-0.5 * r * r).exp();
                bands
                    .eval_row(r, angles)
                    .expect("radius is within range")
                    .into_iter()
                    .map(|v| v * g)
                    .collect()
            })
        });
        Ok(Self {
            sampler: LeveledSampler::new(*cfg, build),
            radius,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn eval(&self, alpha: ComplexPoint) -> Result<f64> {
        let est = self.sampler.eval(alpha)?;
        if est.value.im.abs() > WIGNER_IMAG_BOUND {
            return Err(Error::SymmetryViolation {
                residue: est.value.im.abs(),
                bound: WIGNER_IMAG_BOUND,
            });
        }
        Ok(est.value.re)
    }
}
