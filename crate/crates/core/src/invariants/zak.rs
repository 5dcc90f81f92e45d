use num_complex::Complex;
use num_traits::One;

use super::field::{Direction, OverlapField};
use crate::error::{Error, Result};
use crate::scalar::{principal_arg, wrap_phase, Real};

/// Increments closer than this to `±π` make the winding untrustworthy.
pub const WINDING_GUARD: f64 = 0.2;

/// Zak phase of the lower band for every `ky` row.
#[derive(Clone, Debug, PartialEq)]
pub struct ZakProfile<T> {
    pub ky: Vec<T>,
    pub phi: Vec<T>,
}

impl<T: Real> ZakProfile<T> {
    /// Largest `|Δφ|` between the zone-edge row (`ky = −π ≡ π`) and its two
    /// neighbours; a topological profile jumps by nearly `π` on each side.
    pub fn zone_edge_jump(&self) -> T {
        zone_edge_jump(&self.phi)
    }
}

/// Largest wrapped increment touching row 0 (`ky = −π`).
pub fn zone_edge_jump<T: Real>(phi: &[T]) -> T {
    let n = phi.len();
    if n < 2 {
        return T::zero();
    }
    let before = wrap_phase(phi[0] - phi[n - 1]).abs();
    let after = wrap_phase(phi[1] - phi[0]).abs();
    before.max(after)
}

/// Berry phase along the `kx` loop at row `j`: `−arg Π_i U_x(k_ij)`.
///
/// Equivalently `i ln Π U`, the discrete form of `i∮⟨u|∂u⟩`; with this sign the
/// winding over `ky` equals the Chern number.
pub fn zak_phase<T: Real>(u: &OverlapField<T>, j: usize) -> Result<T> {
    let mesh = u.mesh();
    let mut prod = Complex::<T>::one();
    for i in 0..mesh.n_kx {
        prod = prod * u.normalized(i, j, Direction::X)?;
    }
    Ok(wrap_phase(-principal_arg(prod)))
}

pub fn zak_profile<T: Real>(u: &OverlapField<T>) -> Result<ZakProfile<T>> {
    let mesh = u.mesh();
    let phi = (0..mesh.n_ky)
        .map(|j| zak_phase(u, j))
        .collect::<Result<Vec<_>>>()?;
    Ok(ZakProfile {
        ky: (0..mesh.n_ky).map(|j| mesh.ky(j)).collect(),
        phi,
    })
}

/// `(1/2π) Σ wrap(φ(ky + δky) − φ(ky))` around the closed `ky` loop.
pub fn zak_winding<T: Real>(phi: &[T]) -> Result<i64> {
    let n = phi.len();
    let limit = T::PI() - T::lit(WINDING_GUARD);
    let mut total = T::zero();
    for row in 0..n {
        let inc = wrap_phase(phi[(row + 1) % n] - phi[row]);
        if inc.abs() > limit {
            return Err(Error::AmbiguousWinding {
                row,
                increment: inc.to_f64().unwrap_or(f64::NAN),
            });
        }
        total = total + inc;
    }
    let w = total / (T::PI() + T::PI());
    Ok(w.round().to_i64().expect("winding fits in i64"))
}
