//! Displacement of truncated states, `ρ ↦ D(α) ρ D(α)†`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::DensityMatrix;
use crate::error::{Error, Result};
use crate::point::ComplexPoint;
use crate::special::laguerre_band;

/// Kept block of the displacement operator,
/// `D_{mn}(α) = √(n!/m!) α^{m-n} e^{-|α|²/2} L_n^{(m-n)}(|α|²)` for `m ≥ n`
/// and `D_{nm}(α) = (-α*)^{m-n} …` above the diagonal.
pub fn displacement_matrix(alpha: ComplexPoint, dim: usize) -> DMatrix<Complex64> {
    let r = alpha.norm();
    let theta = alpha.arg();
    let env = (-0.5 * r * r).exp();
    let mut d = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    let mut h = vec![0.0; dim];
    for k in 0..dim {
        let len = dim - k;
        laguerre_band(k, r, &mut h[..len]);
        let phase = Complex64::from_polar(env, k as f64 * theta);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        for n in 0..len {
            d[(n + k, n)] = phase * h[n];
            if k > 0 {
                d[(n, n + k)] = phase.conj() * (sign * h[n]);
            }
        }
    }
    d
}

impl DensityMatrix {
    /// `D(α) ρ D(α)†` on the kept block.
    ///
    /// Weight pushed above the truncation is added to the tail mass; the
    /// result is rejected when the tail exceeds the state's tolerance and
    /// renormalised otherwise. `α = 0` returns an exact copy.
    pub fn displace(&self, alpha: ComplexPoint) -> Result<DensityMatrix> {
        if alpha.is_zero() {
            return Ok(self.clone());
        }
        let (out, tail) = self.displaced_block(alpha)?;
        Ok(DensityMatrix::assemble(out, tail, self.tail_tol))
    }

    /// Unnormalised displaced block and the updated tail mass.
    pub(crate) fn displaced_block(&self, alpha: ComplexPoint) -> Result<(DMatrix<Complex64>, f64)> {
        if alpha.is_zero() {
            return Ok((self.rho.clone(), self.tail_mass));
        }
        let d = displacement_matrix(alpha, self.dim());
        let out = &d * &self.rho * d.adjoint();
        let kept: f64 = (0..self.dim()).map(|n| out[(n, n)].re).sum();
        let tail = self.tail_mass + (1.0 - kept).max(0.0);
        if tail > self.tail_tol {
            return Err(Error::Truncation {
                tail_mass: tail,
                tolerance: self.tail_tol,
                dim: self.dim(),
            });
        }
        Ok((out, tail))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockSpace;

    #[test]
    fn zero_displacement_is_exact_copy() {
        let s = FockSpace::new(48).unwrap();
        let rho = s.spats(0.7, 0.6).unwrap();
        let out = rho.displace(ComplexPoint::ZERO).unwrap();
        assert_eq!(out.matrix(), rho.matrix());
        assert_eq!(out.tail_mass(), rho.tail_mass());
    }

    #[test]
    fn displaced_vacuum_is_coherent() {
        let s = FockSpace::new(48).unwrap();
        let alpha = ComplexPoint::new(1.3, -0.8).unwrap();
        let out = s.vacuum().displace(alpha).unwrap();
        let want = s.coherent(alpha).unwrap();
        assert!((out.matrix() - want.matrix()).camax() < 1e-12);
    }

    #[test]
    fn small_matrix_entries() {
        // ⟨1|D(α)|0⟩ = α e^{-|α|²/2}, ⟨0|D(α)|1⟩ = -α* e^{-|α|²/2}, ⟨1|D|1⟩ = (1-|α|²) e^{-|α|²/2}
        let a = Complex64::new(0.4, 0.3);
        let d = displacement_matrix(ComplexPoint::new(0.4, 0.3).unwrap(), 3);
        let env = (-0.5 * a.norm_sqr()).exp();
        assert!((d[(1, 0)] - a * env).norm() < 1e-15);
        assert!((d[(0, 1)] + a.conj() * env).norm() < 1e-15);
        assert!((d[(1, 1)] - (1.0 - a.norm_sqr()) * env).norm() < 1e-15);
    }

    #[test]
    fn inverse_displacement_roundtrip() {
        let s = FockSpace::new(64).unwrap();
        let rho = s.spats(0.5, 0.7).unwrap();
        let alpha = ComplexPoint::new(0.9, 0.4).unwrap();
        let back = rho.displace(alpha).unwrap().displace(-alpha).unwrap();
        assert!((back.matrix() - rho.matrix()).camax() < 1e-9);
    }

    #[test]
    fn overflowing_displacement_is_rejected() {
        let s = FockSpace::new(16).unwrap();
        let err = s.vacuum().displace(ComplexPoint::real(4.0)).unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }));
    }
}
