//! Two-band Bloch Hamiltonian of the chiral p-wave superconductor.
//!
//! `H(k) = Δ sin ky σx + Δ sin kx σy − [t (cos kx + cos ky) + μ] σz`
//!
//! With `t = Δ = 1` the gap closes at `μ ∈ {−2, 0, 2}`; the lower band carries
//! Chern number `sign(μ)` for `|μ| < 2` and zero otherwise.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner, CMatrix};
use crate::scalar::{c, cis, Real};

/// Default threshold on `E₊` below which the gap is treated as closed.
pub const GAP_TOLERANCE: f64 = 1e-9;

/// Hopping `t`, pairing `Δ` and chemical-potential parameter `μ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams<T> {
    pub t: T,
    pub delta: T,
    pub mu: T,
    pub gap_tolerance: T,
}

impl<T: Real> ModelParams<T> {
    /// `t = Δ = 1`, phases tuned by `μ` alone.
    pub fn with_mu(mu: T) -> Self {
        Self {
            t: T::one(),
            delta: T::one(),
            mu,
            gap_tolerance: T::lit(GAP_TOLERANCE),
        }
    }

    pub fn new(t: T, delta: T, mu: T) -> Result<Self> {
        if !(t > T::zero()) || !(delta > T::zero()) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "need t > 0, delta > 0 and finite mu (got t={t}, delta={delta}, mu={mu})"
            )));
        }
        Ok(Self {
            t,
            delta,
            mu,
            gap_tolerance: T::lit(GAP_TOLERANCE),
        })
    }

    /// Mass term `t (cos kx + cos ky) + μ` multiplying `−σz`.
    fn mass(&self, k: MomentumPoint<T>) -> T {
        self.t * (k.kx.cos() + k.ky.cos()) + self.mu
    }

    pub fn hamiltonian(&self, k: MomentumPoint<T>) -> CMatrix<T> {
        let m = self.mass(k);
        let (sx, sy) = (self.delta * k.kx.sin(), self.delta * k.ky.sin());
        let z = T::zero();
        CMatrix::from_rows(&[&[c(-m, z), c(sy, -sx)], &[c(sy, sx), c(m, z)]])
    }

    /// `(E₊, E₋)` with `E₋ = −E₊`.
    pub fn spectrum(&self, k: MomentumPoint<T>) -> (T, T) {
        let (sx, sy) = (k.kx.sin(), k.ky.sin());
        let m = self.mass(k);
        let e = (self.delta * self.delta * (sx * sx + sy * sy) + m * m).sqrt();
        (e, -e)
    }

    pub fn energy(&self, k: MomentumPoint<T>, band: Band) -> T {
        let (ep, em) = self.spectrum(k);
        match band {
            Band::Plus => ep,
            Band::Minus => em,
        }
    }

    fn check_gap(&self, k: MomentumPoint<T>) -> Result<T> {
        let (e, _) = self.spectrum(k);
        if e < self.gap_tolerance {
            return Err(Error::GapClosed {
                kx: k.kx.to_f64().unwrap_or(f64::NAN),
                ky: k.ky.to_f64().unwrap_or(f64::NAN),
                energy: e.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(e)
    }

    pub fn bloch_angles(&self, k: MomentumPoint<T>) -> Result<BlochAngles<T>> {
        let e = self.check_gap(k)?;
        let ratio = (self.mass(k) / e).max(-T::one()).min(T::one());
        let theta = ratio.acos();
        let (sx, sy) = (k.kx.sin(), k.ky.sin());
        // sin(±π) is ~1e-16, not 0; below this floor the azimuth is pure gauge.
        let floor = T::lit(64.0) * T::epsilon();
        let phi = if sx.abs() <= floor && sy.abs() <= floor {
            T::zero()
        } else {
            let a = sx.atan2(sy);
            if a < T::zero() {
                a + T::PI() + T::PI()
            } else {
                a
            }
        };
        Ok(BlochAngles { theta, phi })
    }

    /// Band eigenvector in the `(c, d)` orbital basis.
    ///
    /// `Ψ₊ = (sin θ/2, e^{iφ} cos θ/2)`, `Ψ₋ = (−e^{−iφ} cos θ/2, sin θ/2)`.
    /// These are the vectors the state-preparation circuit produces, so the
    /// oracle and the circuit share one gauge.
    pub fn eigenstate(&self, k: MomentumPoint<T>, band: Band) -> Result<[Complex<T>; 2]> {
        let BlochAngles { theta, phi } = self.bloch_angles(k)?;
        let half = theta / T::lit(2.0);
        let (s, co) = (half.sin(), half.cos());
        Ok(match band {
            Band::Plus => [c(s, T::zero()), cis(phi) * co],
            Band::Minus => [-cis(-phi) * co, c(s, T::zero())],
        })
    }

    /// `⟨Ψ_bra(k) | Ψ_ket(k2)⟩`.
    pub fn exact_overlap(
        &self,
        k: MomentumPoint<T>,
        k2: MomentumPoint<T>,
        band_bra: Band,
        band_ket: Band,
    ) -> Result<Complex<T>> {
        let a = self.eigenstate(k, band_bra)?;
        let b = self.eigenstate(k2, band_ket)?;
        Ok(inner(&a, &b))
    }
}

impl<T: Real> Default for ModelParams<T> {
    fn default() -> Self {
        Self::with_mu(T::one())
    }
}

/// Point of the Brillouin-zone torus, stored in `[−π, π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentumPoint<T> {
    pub kx: T,
    pub ky: T,
}

impl<T: Real> MomentumPoint<T> {
    pub fn new(kx: T, ky: T) -> Self {
        Self {
            kx: wrap_bz(kx),
            ky: wrap_bz(ky),
        }
    }

    /// Shift by `(dx, dy)` modulo `2π`.
    pub fn shifted(self, dx: T, dy: T) -> Self {
        Self::new(self.kx + dx, self.ky + dy)
    }
}

fn wrap_bz<T: Real>(k: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut y = (k + T::PI()) % two_pi;
    if y < T::zero() {
        y = y + two_pi;
    }
    // Rounding can leave y == 2π exactly.
    if y >= two_pi {
        y = y - two_pi;
    }
    y - T::PI()
}

/// Polar and azimuthal angles of the Bloch vector at one momentum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochAngles<T> {
    /// `arccos(m / E₊)`, in `[0, π]`.
    pub theta: T,
    /// `atan2(sin kx, sin ky)`, in `[0, 2π)`.
    pub phi: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Plus,
    Minus,
}

impl Band {
    pub const ALL: [Band; 2] = [Band::Plus, Band::Minus];

    pub fn other(self) -> Band {
        match self {
            Band::Plus => Band::Minus,
            Band::Minus => Band::Plus,
        }
    }

    /// Row/column index in `(plus, minus)` ordering.
    pub fn index(self) -> usize {
        match self {
            Band::Plus => 0,
            Band::Minus => 1,
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Band::Plus => "plus",
            Band::Minus => "minus",
        })
    }
}

impl std::str::FromStr for Band {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "plus" | "+" => Ok(Band::Plus),
            "minus" | "-" => Ok(Band::Minus),
            other => Err(Error::InvalidParameter(format!("unknown band '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn k(kx: f64, ky: f64) -> MomentumPoint<f64> {
        MomentumPoint::new(kx, ky)
    }

    #[test]
    fn hamiltonian_vanishes_at_gap_closing_point() {
        let h = ModelParams::with_mu(-2.0).hamiltonian(k(0.0, 0.0));
        assert!(h.max_abs_diff(&CMatrix::zeros(2)) < 1e-15);
    }

    #[test]
    fn hamiltonian_direct_substitutions() {
        let p = ModelParams::with_mu(0.0);
        let h = p.hamiltonian(k(FRAC_PI_2, FRAC_PI_2));
        // σx + σy
        let expected = CMatrix::from_rows(&[
            &[c(0.0, 0.0), c(1.0, -1.0)],
            &[c(1.0, 1.0), c(0.0, 0.0)],
        ]);
        assert!(h.max_abs_diff(&expected) < 1e-15);

        let h0 = p.hamiltonian(k(0.0, 0.0));
        let minus_two_z =
            CMatrix::from_rows(&[&[c(-2.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(2.0, 0.0)]]);
        assert!(h0.max_abs_diff(&minus_two_z) < 1e-15);
    }

    #[test]
    fn spectrum_examples() {
        let (ep, em) = ModelParams::with_mu(0.0).spectrum(k(FRAC_PI_2, FRAC_PI_2));
        assert!((ep - 2f64.sqrt()).abs() < 1e-15 && (em + 2f64.sqrt()).abs() < 1e-15);
        let (ep, em) = ModelParams::with_mu(-2.0).spectrum(k(0.0, 0.0));
        assert_eq!((ep, em), (0.0, -0.0));
    }

    #[test]
    fn bloch_angles_examples() {
        let p = ModelParams::with_mu(0.0);
        let a = p.bloch_angles(k(0.0, 0.0)).unwrap();
        assert_eq!((a.theta, a.phi), (0.0, 0.0));
        let a = p.bloch_angles(k(FRAC_PI_2, 0.0)).unwrap();
        assert!((a.theta - FRAC_PI_4).abs() < 1e-14);
        assert!((a.phi - FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn gap_closed_is_reported() {
        let err = ModelParams::with_mu(-2.0)
            .bloch_angles(k(0.0, 0.0))
            .unwrap_err();
        assert!(matches!(err, Error::GapClosed { .. }));
        assert!(ModelParams::with_mu(-2.0)
            .eigenstate(k(0.0, 0.0), Band::Minus)
            .is_err());
    }

    #[test]
    fn phi_is_gauge_fixed_on_sine_zeros() {
        let p = ModelParams::with_mu(1.0);
        for (kx, ky) in [(-PI, -PI), (-PI, 0.0), (0.0, -PI)] {
            assert_eq!(p.bloch_angles(k(kx, ky)).unwrap().phi, 0.0);
        }
    }

    #[test]
    fn eigenstates_at_north_pole() {
        // H = −2σz at k = 0, μ = 0: the upper band is the d orbital.
        let p = ModelParams::with_mu(0.0);
        let plus = p.eigenstate(k(0.0, 0.0), Band::Plus).unwrap();
        let minus = p.eigenstate(k(0.0, 0.0), Band::Minus).unwrap();
        assert_eq!(plus, [c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(minus, [c(-1.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn exact_overlap_trivial_cases() {
        let p = ModelParams::with_mu(1.9);
        let q = k(0.3, -1.1);
        assert!((p.exact_overlap(q, q, Band::Minus, Band::Minus).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(p.exact_overlap(q, q, Band::Plus, Band::Minus).unwrap().norm() < 1e-15);
    }

    #[test]
    fn momentum_wraps_onto_torus() {
        let q = k(PI, 3.0 * PI + 0.25);
        assert!((q.kx + PI).abs() < 1e-15);
        assert!((q.ky - (-PI + 0.25)).abs() < 1e-12);
        let r = k(-PI, 0.0).shifted(-0.5, 2.0 * PI);
        assert!((r.kx - (PI - 0.5)).abs() < 1e-12 && r.ky.abs() < 1e-12);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(ModelParams::new(0.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, -1.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let p = ModelParams::<f32>::with_mu(1.9);
        let q = MomentumPoint::new(0.4f32, -0.9);
        let v = p.eigenstate(q, Band::Minus).unwrap();
        let hv = p.hamiltonian(q).apply(&v);
        let e = p.energy(q, Band::Minus);
        for i in 0..2 {
            assert!((hv[i] - v[i] * e).norm() < 1e-5);
        }
    }
}
