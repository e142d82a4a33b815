//! Truncated Fock-basis states, channels and phase-space functions.
//!
//! Every state carries the probability weight its ideal, untruncated
//! counterpart places at or above the truncation (`tail_mass`). Kept blocks
//! are renormalised to unit trace; operations refuse to continue once the
//! tail exceeds the configured tolerance instead of silently truncating.
//!
//! Quadrature convention: `x̂_φ = â e^{-iφ} + â† e^{iφ}`, so the vacuum
//! variance is 1.

mod displacement;
mod phase_space;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::point::ComplexPoint;

pub use displacement::displacement_matrix;
pub use phase_space::{CharBands, WignerMap, MAX_CHAR_MODULUS};

/// Default tolerance on the truncated probability weight.
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;

/// Diagonal elements below this are treated as roundoff and clamped to zero.
pub const NEGATIVITY_CLAMP: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// A truncated Fock space: the dimension `N` (states `|0⟩ … |N-1⟩`) and the
/// largest tail mass any state built in it may carry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FockSpace {
    dim: usize,
    tail_tol: f64,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("Fock dimension must be positive".into()));
        }
        Ok(Self {
            dim,
            tail_tol: DEFAULT_TAIL_TOL,
        })
    }

    pub fn with_tail_tol(mut self, tol: f64) -> Self {
        self.tail_tol = tol;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    fn check_tail(&self, tail_mass: f64) -> Result<()> {
        if tail_mass > self.tail_tol {
            return Err(Error::Truncation {
                tail_mass,
                tolerance: self.tail_tol,
                dim: self.dim,
            });
        }
        Ok(())
    }

    fn diagonal(&self, probs: &[f64], tail_mass: f64) -> DensityMatrix {
        let mut rho = DMatrix::from_element(self.dim, self.dim, ZERO);
        for (n, &p) in probs.iter().enumerate() {
            rho[(n, n)] = Complex64::new(p, 0.0);
        }
        DensityMatrix::assemble(rho, tail_mass, self.tail_tol)
    }

    /// Number state `|n⟩⟨n|`.
    pub fn fock(&self, n: usize) -> Result<DensityMatrix> {
        if n >= self.dim {
            return Err(Error::Dimension(format!(
                "photon number {n} does not fit in dimension {}",
                self.dim
            )));
        }
        let mut probs = vec![0.0; self.dim];
        probs[n] = 1.0;
        Ok(self.diagonal(&probs, 0.0))
    }

    pub fn vacuum(&self) -> DensityMatrix {
        self.fock(0).expect("vacuum fits in every dimension")
    }

    /// Coherent state `|α⟩⟨α|` with `c_n = e^{-|α|²/2} αⁿ/√n!`.
    pub fn coherent(&self, alpha: ComplexPoint) -> Result<DensityMatrix> {
        let x = alpha.norm_sqr();
        let tail = poisson_tail(x, self.dim);
        self.check_tail(tail)?;
        let a = alpha.to_complex();
        let mut c = vec![ZERO; self.dim];
        c[0] = Complex64::new((-0.5 * x).exp(), 0.0);
        for n in 1..self.dim {
            c[n] = c[n - 1] * a / (n as f64).sqrt();
        }
        let rho = DMatrix::from_fn(self.dim, self.dim, |m, n| c[m] * c[n].conj());
        Ok(DensityMatrix::assemble(rho, tail, self.tail_tol))
    }

    /// Thermal state with mean photon number `nbar`.
    pub fn thermal(&self, nbar: f64) -> Result<DensityMatrix> {
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(domain(format!("thermal mean photon number {nbar} must be >= 0")));
        }
        let q = nbar / (1.0 + nbar);
        let tail = q.powi(self.dim as i32);
        self.check_tail(tail)?;
        let probs: Vec<f64> = (0..self.dim).map(|n| (1.0 - q) * q.powi(n as i32)).collect();
        Ok(self.diagonal(&probs, tail))
    }

    /// Single-photon-added thermal state `â†ρ_th â / Tr(·)`, followed by the
    /// pure-loss channel with efficiency `eta`.
    pub fn spats(&self, nbar: f64, eta: f64) -> Result<DensityMatrix> {
        check_efficiency(eta)?;
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(domain(format!("thermal mean photon number {nbar} must be >= 0")));
        }
        let q = nbar / (1.0 + nbar);
        let big_n = self.dim as f64;
        // Σ_{n≥N} n (1-q)² q^{n-1}
        let tail = if q == 0.0 {
            if self.dim > 1 {
                0.0
            } else {
                1.0
            }
        } else {
            big_n * q.powi(self.dim as i32 - 1) * (1.0 - q) + q.powi(self.dim as i32)
        };
        self.check_tail(tail)?;
        let probs: Vec<f64> = (0..self.dim).map(|n| (1.0 - q) * q.powi(n as i32)).collect();
        let thermal = self.diagonal(&probs, 0.0);
        let mut added = thermal.add_photon();
        added.tail_mass = tail;
        added.apply_loss(eta)
    }
}

fn check_efficiency(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(domain(format!("efficiency {eta} outside [0, 1]")));
    }
    Ok(())
}

/// `Σ_{n≥N} e^{-x} xⁿ/n!`, summed directly so tiny tails stay accurate.
fn poisson_tail(x: f64, big_n: usize) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let ln_first = -x + big_n as f64 * x.ln() - ln_factorial(big_n);
    if ln_first < -745.0 && (big_n as f64) > x {
        return 0.0;
    }
    if (big_n as f64) <= x {
        // Tail is not small; take the complement.
        let mut p = (-x).exp();
        let mut head = 0.0;
        for n in 0..big_n {
            head += p;
            p *= x / (n + 1) as f64;
        }
        return (1.0 - head).max(0.0);
    }
    let mut term = ln_first.exp();
    let mut sum: f64 = 0.0;
    let mut n = big_n;
    while term > 1e-30 * sum.max(1e-300) {
        sum += term;
        n += 1;
        term *= x / n as f64;
    }
    sum
}

/// A density operator on a truncated Fock space.
///
/// Hermitian by construction, unit trace on the kept block, plus the
/// recorded `tail_mass` above the truncation.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    rho: DMatrix<Complex64>,
    tail_mass: f64,
    tail_tol: f64,
}

impl DensityMatrix {
    /// Hermitian-symmetrises and normalises. Internal constructors only.
    fn assemble(mut rho: DMatrix<Complex64>, tail_mass: f64, tail_tol: f64) -> Self {
        let dim = rho.nrows();
        for m in 0..dim {
            rho[(m, m)] = Complex64::new(rho[(m, m)].re, 0.0);
            for n in (m + 1)..dim {
                let avg = 0.5 * (rho[(m, n)] + rho[(n, m)].conj());
                rho[(m, n)] = avg;
                rho[(n, m)] = avg.conj();
            }
        }
        let tr: f64 = (0..dim).map(|n| rho[(n, n)].re).sum();
        if tr > 0.0 && tr != 1.0 {
            rho.unscale_mut(tr);
        }
        Self {
            rho,
            tail_mass: tail_mass.max(0.0),
            tail_tol,
        }
    }

    /// Wraps a user-supplied matrix. It must be square and Hermitian to
    /// `1e-10`; it is symmetrised exactly and scaled to unit trace.
    pub fn from_matrix(rho: DMatrix<Complex64>, tail_mass: f64) -> Result<Self> {
        if rho.nrows() != rho.ncols() || rho.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "density matrix must be square and non-empty, got {}x{}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let defect = (&rho - rho.adjoint()).camax();
        if defect > 1e-10 {
            return Err(domain(format!("matrix is not Hermitian (defect {defect:.3e})")));
        }
        let tr: f64 = (0..rho.nrows()).map(|n| rho[(n, n)].re).sum();
        if !(tr > 0.0) {
            return Err(domain("density matrix trace must be positive"));
        }
        if tail_mass > DEFAULT_TAIL_TOL {
            return Err(Error::Truncation {
                tail_mass,
                tolerance: DEFAULT_TAIL_TOL,
                dim: rho.nrows(),
            });
        }
        Ok(Self::assemble(rho, tail_mass, DEFAULT_TAIL_TOL))
    }

    /// Convex combination of states of equal dimension. Weights are
    /// normalised; the tail masses combine linearly.
    pub fn mixture(components: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| domain("mixture needs at least one component"))?
            .1;
        let dim = first.dim();
        let total: f64 = components.iter().map(|(p, _)| *p).sum();
        if components.iter().any(|(p, _)| !(*p >= 0.0)) || !(total > 0.0) {
            return Err(domain("mixture weights must be nonnegative with positive sum"));
        }
        let mut rho = DMatrix::from_element(dim, dim, ZERO);
        let mut tail = 0.0;
        let mut tol: f64 = 0.0;
        for (p, state) in components {
            if state.dim() != dim {
                return Err(Error::Dimension(format!(
                    "cannot mix dimensions {dim} and {}",
                    state.dim()
                )));
            }
            rho += &state.rho * Complex64::new(p / total, 0.0);
            tail += p / total * state.tail_mass;
            tol = tol.max(state.tail_tol);
        }
        Ok(Self::assemble(rho, tail, tol))
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn element(&self, m: usize, n: usize) -> Complex64 {
        self.rho[(m, n)]
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|n| self.rho[(n, n)].re).sum()
    }

    /// Largest `|ρ_{mn} - ρ_{nm}*|`; zero for every state built here.
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.rho - self.rho.adjoint()).camax()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.rho
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.rho.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// True when every off-diagonal element is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        let dim = self.dim();
        (0..dim).all(|m| (0..dim).all(|n| m == n || self.rho[(m, n)] == ZERO))
    }

    /// Photon-number distribution `p_n = ρ_{nn}`.
    pub fn photon_statistics(&self) -> Result<PhotonStatistics> {
        let probs = (0..self.dim())
            .map(|n| {
                let p = self.rho[(n, n)].re;
                if p >= 0.0 {
                    Ok(p)
                } else if p >= -NEGATIVITY_CLAMP {
                    Ok(0.0)
                } else {
                    Err(Error::NumericalNegativity { index: n, value: p })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PhotonStatistics {
            probs,
            tail_mass: self.tail_mass,
        })
    }

    /// `⟨â⟩`
    pub fn expect_a(&self) -> Complex64 {
        (1..self.dim())
            .map(|n| self.rho[(n, n - 1)] * (n as f64).sqrt())
            .sum()
    }

    /// `⟨â²⟩`
    pub fn expect_a2(&self) -> Complex64 {
        (2..self.dim())
            .map(|n| self.rho[(n, n - 2)] * ((n * (n - 1)) as f64).sqrt())
            .sum()
    }

    /// `â† ρ â`, renormalised. The tail is left for the caller to set.
    fn add_photon(&self) -> DensityMatrix {
        let dim = self.dim();
        let rho = DMatrix::from_fn(dim, dim, |m, n| {
            if m == 0 || n == 0 {
                ZERO
            } else {
                self.rho[(m - 1, n - 1)] * ((m * n) as f64).sqrt()
            }
        });
        Self::assemble(rho, self.tail_mass, self.tail_tol)
    }

    /// Pure-loss (beamsplitter-to-vacuum) channel with transmissivity `eta`,
    /// in Kraus form `K_k = Σ_n √(C(n,k) η^{n-k} (1-η)^k) |n-k⟩⟨n|`.
    ///
    /// Loss only moves weight downwards, so the recorded tail is kept as is.
    pub fn apply_loss(&self, eta: f64) -> Result<DensityMatrix> {
        check_efficiency(eta)?;
        if eta == 1.0 {
            return Ok(self.clone());
        }
        let dim = self.dim();
        let ln_fact: Vec<f64> = {
            let mut v = vec![0.0; dim + 1];
            for i in 1..=dim {
                v[i] = v[i - 1] + (i as f64).ln();
            }
            v
        };
        // amp[n][k] = √(C(n,k) η^{n-k} (1-η)^k)
        let amp: Vec<Vec<f64>> = (0..dim)
            .map(|n| {
                (0..=n)
                    .map(|k| {
                        let binom = (ln_fact[n] - ln_fact[k] - ln_fact[n - k]).exp();
                        (binom * eta.powi((n - k) as i32) * (1.0 - eta).powi(k as i32)).sqrt()
                    })
                    .collect()
            })
            .collect();
        let out = DMatrix::from_fn(dim, dim, |m, mp| {
            let kmax = dim - m.max(mp);
            (0..kmax)
                .map(|k| self.rho[(m + k, mp + k)] * (amp[m + k][k] * amp[mp + k][k]))
                .sum()
        });
        Ok(Self::assemble(out, self.tail_mass, self.tail_tol))
    }
}

/// Photon-number distribution of a truncated state.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonStatistics {
    pub probs: Vec<f64>,
    pub tail_mass: f64,
}

impl PhotonStatistics {
    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(n, p)| (n * n) as f64 * p)
            .sum()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}
