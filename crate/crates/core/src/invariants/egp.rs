//! Ensemble geometric phase along the `kx` loop.
//!
//! With `B_k = β·diag(E₊, E₋)` and link matrices `O_k = 𝒰†_{k+δ}𝒰_k`, the loop
//! product is `M = Π e^{−B_k} O_k` and `φ_E = Im ln det(1 + M)`. For any
//! appreciable `β` the entries of `M` under- or overflow, so every factor is
//! rescaled by `e^{β E_min(k)}` and the scalar prefactor `e^{P}` is kept in
//! log form. The determinant then factorizes over the eigenvalues `λ₁, λ₂` of
//! the rescaled product as `(1 + e^P λ₁)(1 + e^P λ₂)`, and each phase is
//! evaluated in whichever regime `e^P |λ|` falls.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::field::OverlapField;
use crate::error::{Error, Result};
use crate::linalg::{det2, CMatrix};
use crate::model::{Band, ModelParams};
use crate::scalar::{c, principal_arg, wrap_phase, Real};

/// Beyond this `|ln x|`, `1 + x` is indistinguishable from `1` or `x`.
const LOG_SATURATION: f64 = 40.0;

/// Optional global sign on the loop product.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LoopSign {
    /// `M` as accumulated.
    #[default]
    Plain,
    /// `(−1)^{N_L+1}` times the product, the fermionic ordering sign.
    FermionOrdering,
}

impl LoopSign {
    fn flips(self, n_links: usize) -> bool {
        matches!(self, LoopSign::FermionOrdering) && n_links.is_multiple_of(2)
    }
}

/// One link of the loop: energies at the starting point and the transport
/// matrix `O[a][b] = ⟨Ψ_a(k+δ)|Ψ_b(k)⟩` (plus = 0, minus = 1).
#[derive(Clone, Debug, PartialEq)]
pub struct EgpLink<T> {
    pub energies: [T; 2],
    pub transport: CMatrix<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EgpProfile<T> {
    pub ky: Vec<T>,
    pub phi_e: Vec<T>,
    pub beta: T,
    pub n_l: usize,
}

fn ln_abs<T: Real>(z: Complex<T>) -> T {
    z.norm().ln()
}

/// `arg(1 + e^{log_scale} z)` for `z ≠ 0`.
fn shifted_phase<T: Real>(log_scale: T, z: Complex<T>) -> T {
    if z.is_zero() {
        return T::zero();
    }
    let lz = log_scale + ln_abs(z);
    let sat = T::lit(LOG_SATURATION);
    if lz > sat {
        principal_arg(z)
    } else if lz < -sat {
        T::zero()
    } else {
        let w = z.unscale(z.norm()) * lz.exp();
        principal_arg(Complex::<T>::one() + w)
    }
}

/// `arg(1 + e^{log_scale} · e^{log_mag + i·arg})`, with the number given in
/// log-polar form so that it may lie far outside floating-point range.
fn shifted_phase_polar<T: Real>(log_scale: T, log_mag: T, arg: T) -> T {
    if log_mag == T::neg_infinity() {
        return T::zero();
    }
    let lz = log_scale + log_mag;
    let sat = T::lit(LOG_SATURATION);
    if lz > sat {
        wrap_phase(arg)
    } else if lz < -sat {
        T::zero()
    } else {
        let m = lz.exp();
        principal_arg(c(T::one() + m * arg.cos(), m * arg.sin()))
    }
}

/// `φ_E` for one loop at inverse temperature `beta`.
pub fn egp<T: Real>(links: &[EgpLink<T>], beta: T, sign: LoopSign) -> Result<T> {
    if links.is_empty() {
        return Err(Error::InvalidParameter("EGP loop needs at least one link".into()));
    }
    if !(beta > T::zero()) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be positive (got {beta})")));
    }
    let mut m = CMatrix::<T>::identity(2);
    let mut log_prefactor = T::zero();
    let mut log_det = T::zero();
    let mut arg_det = T::zero();
    for link in links {
        let e_min = link.energies[0].min(link.energies[1]);
        let mut l = link.transport.clone();
        for s in 0..2 {
            let w = c((-beta * (link.energies[s] - e_min)).exp(), T::zero());
            l[(s, 0)] = l[(s, 0)] * w;
            l[(s, 1)] = l[(s, 1)] * w;
        }
        log_prefactor = log_prefactor - beta * e_min;
        // The determinant is tracked separately: it may underflow in `m`.
        let d = det2(&link.transport);
        let spread = (link.energies[0] - link.energies[1]).abs();
        log_det = log_det - beta * spread + ln_abs(d);
        arg_det = arg_det + principal_arg(d);
        m = l.matmul(&m);
        // Keep `m` in range; the scale goes into the prefactor.
        let norm = m.as_slice().iter().fold(T::zero(), |a, z| a.max(z.norm()));
        if norm > T::zero() && norm.is_finite() {
            m = m.scale(c(T::one() / norm, T::zero()));
            log_prefactor = log_prefactor + norm.ln();
            log_det = log_det - (norm.ln() + norm.ln());
        }
    }
    if sign.flips(links.len()) {
        m = m.scale(c(-T::one(), T::zero()));
    }

    let tr = m.trace();
    let det = if log_det == T::neg_infinity() {
        Complex::zero()
    } else {
        Complex::from_polar(log_det.exp(), arg_det)
    };
    let disc = (tr * tr - det * c(T::lit(4.0), T::zero())).sqrt();
    let (r1, r2) = (tr + disc, tr - disc);
    let lambda1 = if r1.norm() >= r2.norm() { r1 } else { r2 }.unscale(T::lit(2.0));
    if lambda1.is_zero() {
        return Ok(T::zero());
    }
    let phase1 = shifted_phase(log_prefactor, lambda1);
    // λ₂ = det/λ₁ in log-polar form; `det` itself may have underflowed.
    let log_l2 = log_det - ln_abs(lambda1);
    let arg_l2 = arg_det - principal_arg(lambda1);
    let phase2 = shifted_phase_polar(log_prefactor, log_l2, arg_l2);
    Ok(wrap_phase(phase1 + phase2))
}

/// EGP links of row `j`, from an overlap field holding all four band pairs on
/// the `x` links.
pub fn egp_links<T: Real>(
    u: &OverlapField<T>,
    p: &ModelParams<T>,
    j: usize,
) -> Result<Vec<EgpLink<T>>> {
    let mesh = u.mesh();
    (0..mesh.n_kx)
        .map(|i| {
            let k = mesh.point(i, j);
            Ok(EgpLink {
                energies: [p.energy(k, Band::Plus), p.energy(k, Band::Minus)],
                transport: u.transport_matrix(i, j)?,
            })
        })
        .collect()
}

pub fn egp_profile<T: Real>(
    u: &OverlapField<T>,
    p: &ModelParams<T>,
    beta: T,
    sign: LoopSign,
) -> Result<EgpProfile<T>> {
    let mesh = u.mesh();
    let phi_e = (0..mesh.n_ky)
        .map(|j| egp(&egp_links(u, p, j)?, beta, sign))
        .collect::<Result<Vec<_>>>()?;
    Ok(EgpProfile {
        ky: (0..mesh.n_ky).map(|j| mesh.ky(j)).collect(),
        phi_e,
        beta,
        n_l: mesh.n_kx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cis;

    fn diag_link(e: [f64; 2], phases: [f64; 2]) -> EgpLink<f64> {
        let mut t = CMatrix::zeros(2);
        t[(0, 0)] = cis(phases[0]);
        t[(1, 1)] = cis(phases[1]);
        EgpLink {
            energies: e,
            transport: t,
        }
    }

    #[test]
    fn large_beta_selects_lower_band_phase() {
        // Lower-band link phases sum to 0.9; Im ln det(1+M) → 0.9.
        let links: Vec<_> = (0..3).map(|_| diag_link([1.0, -1.0], [0.2, 0.3])).collect();
        let phi = egp(&links, 50.0, LoopSign::Plain).unwrap();
        assert!((phi - 0.9).abs() < 1e-12);
        // Extreme β stays finite.
        let phi = egp(&links, 1e4, LoopSign::Plain).unwrap();
        assert!((phi - 0.9).abs() < 1e-12);
    }

    #[test]
    fn small_product_matches_direct_formula() {
        let links = vec![diag_link([0.5, -0.5], [0.4, -0.7]), diag_link([0.3, -0.3], [0.1, 1.2])];
        let beta = 0.8;
        let mut m = CMatrix::identity(2);
        for l in &links {
            let mut f = l.transport.clone();
            for s in 0..2 {
                let w = c((-beta * l.energies[s]).exp(), 0.0);
                f[(s, 0)] *= w;
                f[(s, 1)] *= w;
            }
            m = f.matmul(&m);
        }
        let direct = principal_arg(det2(&CMatrix::identity(2).add(&m)));
        let phi = egp(&links, beta, LoopSign::Plain).unwrap();
        assert!((phi - direct).abs() < 1e-12);
    }

    #[test]
    fn fermion_sign_applies_to_even_loops() {
        let links = vec![diag_link([0.5, -0.5], [0.4, -0.7]); 2];
        let a = egp(&links, 1.0, LoopSign::Plain).unwrap();
        let b = egp(&links, 1.0, LoopSign::FermionOrdering).unwrap();
        assert!((a - b).abs() > 1e-3);
        let odd = vec![diag_link([0.5, -0.5], [0.4, -0.7]); 3];
        assert_eq!(
            egp(&odd, 1.0, LoopSign::Plain).unwrap(),
            egp(&odd, 1.0, LoopSign::FermionOrdering).unwrap()
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(egp::<f64>(&[], 1.0, LoopSign::Plain).is_err());
        let links = vec![diag_link([1.0, -1.0], [0.0, 0.0])];
        assert!(egp(&links, 0.0, LoopSign::Plain).is_err());
        assert!(egp(&links, f64::NAN, LoopSign::Plain).is_err());
    }
}
