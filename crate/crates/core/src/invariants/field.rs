use std::fmt;
use std::io::{Read, Write};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Band, ModelParams, MomentumPoint};
use crate::scalar::{c, Real};

/// Default rejection threshold on `|U_raw|` before normalization.
pub const MODULUS_FLOOR: f64 = 0.05;

/// Uniform `n_kx × n_ky` discretization of the Brillouin-zone torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MeshGrid {
    pub n_kx: usize,
    pub n_ky: usize,
}

impl MeshGrid {
    pub fn new(n_kx: usize, n_ky: usize) -> Result<Self> {
        if n_kx < 2 || n_ky < 2 {
            return Err(Error::InvalidParameter(format!(
                "mesh needs at least 2 points per direction (got {n_kx}x{n_ky})"
            )));
        }
        Ok(Self { n_kx, n_ky })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    /// `k_ij = (−π + 2πi/n_kx, −π + 2πj/n_ky)`.
    pub fn point<T: Real>(&self, i: usize, j: usize) -> MomentumPoint<T> {
        MomentumPoint::new(self.kx(i), self.ky(j))
    }

    pub fn kx<T: Real>(&self, i: usize) -> T {
        grid_coordinate(i, self.n_kx)
    }

    pub fn ky<T: Real>(&self, j: usize) -> T {
        grid_coordinate(j, self.n_ky)
    }

    /// Index of the neighbour of `(i, j)` in direction `d`, wrapping on the torus.
    pub fn neighbor(&self, i: usize, j: usize, d: Direction) -> (usize, usize) {
        match d {
            Direction::X => ((i + 1) % self.n_kx, j),
            Direction::Y => (i, (j + 1) % self.n_ky),
        }
    }

    pub fn len(&self) -> usize {
        self.n_kx * self.n_ky
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major `(i, j)` pairs, `i` fastest.
    pub fn indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_ky).flat_map(move |j| (0..self.n_kx).map(move |i| (i, j)))
    }

    /// Errors if any mesh point sits on a gap closing of `p`.
    pub fn check_gap<T: Real>(&self, p: &ModelParams<T>) -> Result<()> {
        for (i, j) in self.indices() {
            p.bloch_angles(self.point(i, j))?;
        }
        Ok(())
    }
}

impl Default for MeshGrid {
    fn default() -> Self {
        Self { n_kx: 8, n_ky: 8 }
    }
}

fn grid_coordinate<T: Real>(i: usize, n: usize) -> T {
    let two_pi = T::PI() + T::PI();
    -T::PI() + two_pi * T::from_usize(i).expect("index fits") / T::from_usize(n).expect("n fits")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    X,
    Y,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::X, Direction::Y];

    pub fn index(self) -> usize {
        match self {
            Direction::X => 0,
            Direction::Y => 1,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Direction::X => 'x',
            Direction::Y => 'y',
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Link overlaps `U_raw = ⟨Ψ_bra(k_ij) | Ψ_ket(k_ij + δk_d)⟩` on a mesh.
///
/// Entries may be absent; consumers report [`Error::MissingLink`] for any
/// link they need but cannot find.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapField<T> {
    mesh: MeshGrid,
    values: Vec<Option<Complex<T>>>,
    pub modulus_floor: T,
}

impl<T: Real> OverlapField<T> {
    pub fn new(mesh: MeshGrid) -> Self {
        Self {
            mesh,
            values: vec![None; mesh.len() * 2 * 4],
            modulus_floor: T::lit(MODULUS_FLOOR),
        }
    }

    pub fn mesh(&self) -> MeshGrid {
        self.mesh
    }

    fn slot(&self, i: usize, j: usize, d: Direction, bra: Band, ket: Band) -> usize {
        assert!(i < self.mesh.n_kx && j < self.mesh.n_ky, "mesh index out of range");
        ((d.index() * self.mesh.n_ky + j) * self.mesh.n_kx + i) * 4 + bra.index() * 2 + ket.index()
    }

    pub fn set(&mut self, i: usize, j: usize, d: Direction, bra: Band, ket: Band, u: Complex<T>) {
        let s = self.slot(i, j, d, bra, ket);
        self.values[s] = Some(u);
    }

    pub fn raw(&self, i: usize, j: usize, d: Direction, bra: Band, ket: Band) -> Option<Complex<T>> {
        self.values[self.slot(i, j, d, bra, ket)]
    }

    fn require(&self, i: usize, j: usize, d: Direction, bra: Band, ket: Band) -> Result<Complex<T>> {
        self.raw(i, j, d, bra, ket).ok_or(Error::MissingLink {
            i,
            j,
            direction: d.as_char(),
        })
    }

    /// Unimodular lower-band link `U / |U|`.
    pub fn normalized(&self, i: usize, j: usize, d: Direction) -> Result<Complex<T>> {
        let u = self.require(i, j, d, Band::Minus, Band::Minus)?;
        let m = u.norm();
        if !(m >= self.modulus_floor) {
            return Err(Error::DegenerateLink {
                i,
                j,
                direction: d.as_char(),
                modulus: m.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(u / m)
    }

    /// `[a][b] = ⟨Ψ_a(k + δkx) | Ψ_b(k)⟩`, rows and columns in `(plus, minus)`
    /// order, taken from the stored `x` links without normalization.
    pub fn transport_matrix(&self, i: usize, j: usize) -> Result<crate::linalg::CMatrix<T>> {
        let mut m = crate::linalg::CMatrix::zeros(2);
        for a in Band::ALL {
            for b in Band::ALL {
                m[(a.index(), b.index())] = self.require(i, j, Direction::X, b, a)?.conj();
            }
        }
        Ok(m)
    }

    /// Every stored entry, ordered by `(direction, j, i, bra, ket)`.
    pub fn records(&self) -> Vec<OverlapRecord> {
        let mut out = Vec::new();
        for d in Direction::BOTH {
            for j in 0..self.mesh.n_ky {
                for i in 0..self.mesh.n_kx {
                    for bra in Band::ALL {
                        for ket in Band::ALL {
                            if let Some(u) = self.raw(i, j, d, bra, ket) {
                                out.push(OverlapRecord {
                                    i,
                                    j,
                                    direction: d,
                                    band_bra: bra,
                                    band_ket: ket,
                                    re: u.re.to_f64().unwrap_or(f64::NAN),
                                    im: u.im.to_f64().unwrap_or(f64::NAN),
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Writes `i,j,direction,band_bra,band_ket,re,im` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        for r in self.records() {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }

    /// Reads a field recorded elsewhere (e.g. on hardware).
    pub fn read_csv<R: Read>(mesh: MeshGrid, reader: R) -> Result<Self> {
        let mut field = Self::new(mesh);
        let mut rdr = csv::Reader::from_reader(reader);
        for row in rdr.deserialize() {
            let r: OverlapRecord = row?;
            if r.i >= mesh.n_kx || r.j >= mesh.n_ky {
                return Err(Error::Csv(format!(
                    "mesh index ({}, {}) outside {}x{} mesh",
                    r.i, r.j, mesh.n_kx, mesh.n_ky
                )));
            }
            let (re, im) = (T::from_f64(r.re), T::from_f64(r.im));
            let u = match (re, im) {
                (Some(re), Some(im)) if re.is_finite() && im.is_finite() => c(re, im),
                _ => return Err(Error::Csv(format!("non-finite overlap at ({}, {})", r.i, r.j))),
            };
            field.set(r.i, r.j, r.direction, r.band_bra, r.band_ket, u);
        }
        Ok(field)
    }
}

/// One CSV row of an overlap field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapRecord {
    pub i: usize,
    pub j: usize,
    pub direction: Direction,
    pub band_bra: Band,
    pub band_ket: Band,
    pub re: f64,
    pub im: f64,
}
