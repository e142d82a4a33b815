//! Nonclassicality-filtered P function
//! `P_w(α) = (1/π²) ∫ d²β Φ(β) Ω_w(β) e^{αβ* - α*β}` by direct quadrature.
//!
//! This route never touches the witness diagonal elements and serves as the
//! independent check of [`crate::witness::expectation`].

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::filters::FilterFamily;
use crate::fock::{CharBands, DensityMatrix, MAX_CHAR_MODULUS};
use crate::point::ComplexPoint;
use crate::transform::{LeveledSampler, QuadConfig, SpectralSampler};

/// Bound on the imaginary part of an accepted value.
pub const NFP_IMAG_BOUND: f64 = 1e-7;
/// Unbounded filters are cut where `|Ω_w| · max|Φ|` drops below this.
const RADIUS_CUTOFF: f64 = 1e-14;

/// Values, minimum, argmin and the worst (delta, residue, doublings).
type Sweep = (Vec<Vec<f64>>, f64, ComplexPoint, (f64, f64, u32));

type Builder = Box<dyn Fn(usize, usize) -> SpectralSampler + Send + Sync>;

/// One accepted quadrature value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NfpValue {
    pub value: f64,
    pub imag_residue: f64,
    /// Change between the two finest orders compared.
    pub delta: f64,
    pub doublings: u32,
}

/// `Φ Ω_w` cached on the quadrature nodes of one state and width.
pub struct NfpMap {
    sampler: LeveledSampler<Builder>,
    radius: f64,
    w: f64,
}

impl NfpMap {
    pub fn new(rho: &DensityMatrix, family: &FilterFamily, w: f64, cfg: &QuadConfig) -> Result<Self> {
        if !(w > 0.0) || !w.is_finite() {
            return Err(domain(format!("width {w} must be positive")));
        }
        let bands = Arc::new(CharBands::new(rho));
        let radius = match family.support_radius(w) {
            Some(r) => r,
            None => {
                let env = Arc::clone(&bands);
                family.integration_radius(
                    w,
                    move |r| env.envelope(r).unwrap_or(f64::INFINITY),
                    RADIUS_CUTOFF,
                    MAX_CHAR_MODULUS,
                )
            }
        };
        if radius > MAX_CHAR_MODULUS {
            return Err(Error::Range {
                beta: radius,
                max_beta: MAX_CHAR_MODULUS,
            });
        }
        let family = family.clone();
        let build: Builder = Box::new(move |nr, na| {
            let rule = family.polar_rule(w, radius, nr, na);
            SpectralSampler::build(&rule, |r, angles| {
                let phi = bands
                    .eval_row(r, angles)
                    .expect("radius checked against the range limit");
                if family.is_radial() {
                    let omega = family.eval(ComplexPoint::real(r), w);
                    phi.into_iter().map(|p| p * omega).collect()
                } else {
                    phi.into_iter()
                        .zip(angles)
                        .map(|(p, &t)| {
                            p * family.eval(
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
        });
        Ok(Self {
            sampler: LeveledSampler::new(*cfg, build),
            radius,
            w,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn eval(&self, alpha: ComplexPoint) -> Result<NfpValue> {
        let est = self.sampler.eval(alpha)?;
        let residue = est.value.im.abs();
        if residue > NFP_IMAG_BOUND {
            return Err(Error::SymmetryViolation {
                residue,
                bound: NFP_IMAG_BOUND,
            });
        }
        Ok(NfpValue {
            value: est.value.re,
            imag_residue: residue,
            delta: est.delta,
            doublings: est.doublings,
        })
    }

    /// Unchecked complex value at a fixed quadrature level; for diagnostics.
    pub fn raw(&self, alpha: ComplexPoint) -> Result<Complex64> {
        Ok(self.sampler.eval(alpha)?.value)
    }
}

/// `P_w(α)` at a single point.
pub fn nfp_point(
    rho: &DensityMatrix,
    family: &FilterFamily,
    w: f64,
    alpha: ComplexPoint,
    cfg: &QuadConfig,
) -> Result<f64> {
    Ok(NfpMap::new(rho, family, w, cfg)?.eval(alpha)?.value)
}

/// Rectangular grid of phase-space points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl GridSpec {
    /// `n × n` points on `[-extent, extent]²`.
    pub fn square(extent: f64, n: usize) -> Result<Self> {
        let g = Self {
            re_min: -extent,
            re_max: extent,
            im_min: -extent,
            im_max: extent,
            n_re: n,
            n_im: n,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(domain("grid bounds must be finite"));
        }
        for (lo, hi, n) in [
            (self.re_min, self.re_max, self.n_re),
            (self.im_min, self.im_max, self.n_im),
        ] {
            if n == 0 {
                return Err(domain("grid needs at least one point per axis"));
            }
            if n > 1 && !(hi > lo) {
                return Err(domain("grid axes must be strictly increasing"));
            }
        }
        Ok(())
    }

    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![0.5 * (lo + hi)];
        }
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn re_axis(&self) -> Vec<f64> {
        Self::axis(self.re_min, self.re_max, self.n_re)
    }

    pub fn im_axis(&self) -> Vec<f64> {
        Self::axis(self.im_min, self.im_max, self.n_im)
    }
}

/// Accuracy metadata of a grid evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadReport {
    pub radius: f64,
    pub max_delta: f64,
    pub max_imag_residue: f64,
    pub max_doublings: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NfpGrid {
    pub w: f64,
    pub re_axis: Vec<f64>,
    pub im_axis: Vec<f64>,
    /// `values[i][j]` at `re_axis[j] + i·im_axis[i]`.
    pub values: Vec<Vec<f64>>,
    pub min: f64,
    pub argmin: ComplexPoint,
    pub quad: QuadReport,
}

/// Evaluates any per-point map over a grid, row by row.
pub(crate) fn sweep_grid(
    grid: &GridSpec,
    mut eval: impl FnMut(ComplexPoint) -> Result<(f64, f64, f64, u32)>,
) -> Result<Sweep> {
    grid.validate()?;
    let re_axis = grid.re_axis();
    let im_axis = grid.im_axis();
    let mut values = Vec::with_capacity(im_axis.len());
    let mut min = f64::INFINITY;
    let mut argmin = ComplexPoint::ZERO;
    let mut diag = (0.0f64, 0.0f64, 0u32);
    for &im in &im_axis {
        let mut row = Vec::with_capacity(re_axis.len());
        for &re in &re_axis {
            let alpha = ComplexPoint { re, im };
            let (v, delta, residue, doublings) = eval(alpha)?;
            diag = (diag.0.max(delta), diag.1.max(residue), diag.2.max(doublings));
            if v < min {
                min = v;
                argmin = alpha;
            }
            row.push(v);
        }
        values.push(row);
    }
    Ok((values, min, argmin, diag))
}

/// `P_w` over a rectangular grid, with the global minimum.
pub fn nfp_grid(
    rho: &DensityMatrix,
    family: &FilterFamily,
    w: f64,
    grid: &GridSpec,
    cfg: &QuadConfig,
) -> Result<NfpGrid> {
    let map = NfpMap::new(rho, family, w, cfg)?;
    let (values, min, argmin, diag) = sweep_grid(grid, |alpha| {
        let v = map.eval(alpha)?;
        Ok((v.value, v.delta, v.imag_residue, v.doublings))
    })?;
    Ok(NfpGrid {
        w,
        re_axis: grid.re_axis(),
        im_axis: grid.im_axis(),
        values,
        min,
        argmin,
        quad: QuadReport {
            radius: map.radius(),
            max_delta: diag.0,
            max_imag_residue: diag.1,
            max_doublings: diag.2,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockSpace;
    use crate::witness::{expectation, WitnessSpec};

    #[test]
    fn vacuum_with_unnormalized_disc() {
        let s = FockSpace::new(8).unwrap();
        for &w in &[0.7, 2.0, 4.5] {
            let v = nfp_point(
                &s.vacuum(),
                &FilterFamily::disc(),
                w,
                ComplexPoint::ZERO,
                &QuadConfig::default(),
            )
            .unwrap();
            assert!((v - w * w / 16.0).abs() < 1e-7, "w={w} v={v}");
        }
    }

    #[test]
    fn fock_one_negative_at_origin() {
        let s = FockSpace::new(8).unwrap();
        let v = nfp_point(
            &s.fock(1).unwrap(),
            &FilterFamily::disc(),
            3.0,
            ComplexPoint::ZERO,
            &QuadConfig::default(),
        )
        .unwrap();
        assert!((v - 9.0 / 16.0 * (1.0 - 9.0 / 4.0)).abs() < 1e-8);
    }

    #[test]
    fn matches_fock_route_for_displaced_state() {
        let s = FockSpace::new(40).unwrap();
        let rho = s.spats(0.6, 0.7).unwrap();
        let alpha = ComplexPoint::new(0.4, -0.3).unwrap();
        let quad = nfp_point(&rho, &FilterFamily::disc(), 3.2, alpha, &QuadConfig::default()).unwrap();
        let fock = expectation(&rho, &WitnessSpec::new(3.2, alpha).unwrap())
            .unwrap()
            .value;
        assert!((quad - fock).abs() < 1e-8, "{quad} vs {fock}");
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::square(1.0, 0).is_err());
        let g = GridSpec::square(2.0, 5).unwrap();
        assert_eq!(g.re_axis(), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
    }
}
