//! Lattice Chern number from normalized link overlaps.
//!
//! Each plaquette contributes the principal logarithm of its four-link
//! holonomy; the sum over the torus is `2πi` times an integer because every
//! link enters twice with opposite orientation. Splitting each plaquette
//! logarithm into link logarithms leaves an integer field `n(k)` that carries
//! the whole Chern number.

use num_complex::Complex;

use super::field::{Direction, MeshGrid, OverlapField};
use crate::error::{Error, Result};
use crate::scalar::{c, principal_arg, Real};

/// Rounding tolerance for the Chern sum and for each `n(k)`.
pub const INTEGER_TOLERANCE: f64 = 0.01;
/// Required distance of every `|𝓕(k)|` from `π` for a run to count as admissible.
pub const ADMISSIBILITY_MARGIN: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChernOptions<T> {
    pub integer_tolerance: T,
    pub admissibility_margin: T,
}

impl<T: Real> Default for ChernOptions<T> {
    fn default() -> Self {
        Self {
            integer_tolerance: T::lit(INTEGER_TOLERANCE),
            admissibility_margin: T::lit(ADMISSIBILITY_MARGIN),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChernResult<T> {
    pub chern: i64,
    /// `𝓕(k)` per plaquette, row-major with `i` fastest.
    pub field: Vec<Complex<T>>,
    /// `n(k)` per plaquette, same layout as `field`.
    pub n: Vec<i64>,
    pub admissible: bool,
    /// `|Σ𝓕 / 2πi − C|`.
    pub residual: T,
    pub mesh: MeshGrid,
}

impl<T: Real> ChernResult<T> {
    pub fn n_at(&self, i: usize, j: usize) -> i64 {
        self.n[j * self.mesh.n_kx + i]
    }

    pub fn max_abs_n(&self) -> i64 {
        self.n.iter().map(|v| v.abs()).max().unwrap_or(0)
    }
}

/// Principal logarithm with the imaginary part in `(−π, π]`.
fn principal_ln<T: Real>(z: Complex<T>) -> Complex<T> {
    c(z.norm().ln(), principal_arg(z))
}

struct Plaquette<T> {
    /// `U_x(k)`, `U_y(k + x̂)`, `U_x(k + ŷ)`, `U_y(k)`.
    links: [Complex<T>; 4],
}

fn plaquette<T: Real>(u: &OverlapField<T>, i: usize, j: usize) -> Result<Plaquette<T>> {
    let mesh = u.mesh();
    let (ix, jx) = mesh.neighbor(i, j, Direction::X);
    let (iy, jy) = mesh.neighbor(i, j, Direction::Y);
    Ok(Plaquette {
        links: [
            u.normalized(i, j, Direction::X)?,
            u.normalized(ix, jx, Direction::Y)?,
            u.normalized(iy, jy, Direction::X)?,
            u.normalized(i, j, Direction::Y)?,
        ],
    })
}

impl<T: Real> Plaquette<T> {
    fn holonomy(&self) -> Complex<T> {
        let [a, b, cc, d] = self.links;
        a * b / cc / d
    }
}

/// `𝓕(k) = Log[U_x(k) U_y(k+x̂) U_x(k+ŷ)⁻¹ U_y(k)⁻¹]` on the principal branch.
pub fn plaquette_field<T: Real>(u: &OverlapField<T>, i: usize, j: usize) -> Result<Complex<T>> {
    Ok(principal_ln(plaquette(u, i, j)?.holonomy()))
}

fn round_checked<T: Real>(x: T, tol: T, at: Option<(usize, usize)>) -> Result<(i64, T)> {
    let r = x.round();
    let residual = (x - r).abs();
    if !(residual < tol) {
        return Err(Error::NotQuantized {
            value: x.to_f64().unwrap_or(f64::NAN),
            at,
        });
    }
    Ok((r.to_i64().expect("rounded value fits in i64"), residual))
}

/// Integer field `n(k)`: the plaquette logarithm minus the four link logarithms,
/// in units of `2πi`.
pub fn integer_field<T: Real>(u: &OverlapField<T>, opts: &ChernOptions<T>) -> Result<Vec<i64>> {
    let mesh = u.mesh();
    let two_pi = T::PI() + T::PI();
    mesh.indices()
        .map(|(i, j)| {
            let pl = plaquette(u, i, j)?;
            let f = principal_ln(pl.holonomy()).im;
            let [ux, uy_x, ux_y, uy] = pl.links.map(|z| principal_arg(z));
            let rest = (ux - ux_y) + (uy_x - uy);
            round_checked((f - rest) / two_pi, opts.integer_tolerance, Some((i, j)))
                .map(|(n, _)| n)
        })
        .collect()
}

/// Chern number of the lower band from its link overlaps.
pub fn chern<T: Real>(u: &OverlapField<T>, opts: &ChernOptions<T>) -> Result<ChernResult<T>> {
    let mesh = u.mesh();
    let field = mesh
        .indices()
        .map(|(i, j)| plaquette_field(u, i, j))
        .collect::<Result<Vec<_>>>()?;
    let two_pi = T::PI() + T::PI();
    let total = field.iter().fold(T::zero(), |acc, f| acc + f.im) / two_pi;
    let (chern, residual) = round_checked(total, opts.integer_tolerance, None)?;
    let bound = T::PI() - opts.admissibility_margin;
    let admissible = field.iter().all(|f| f.im.abs() < bound);
    let n = integer_field(u, opts)?;
    debug_assert_eq!(n.iter().sum::<i64>(), chern);
    Ok(ChernResult {
        chern,
        field,
        n,
        admissible,
        residual,
        mesh,
    })
}
