#![allow(dead_code)]

use holonomy::invariants::{Direction, MeshGrid, OverlapField};
use holonomy::linalg::CMatrix;
use holonomy::{Band, ModelParams, MomentumPoint};
use nalgebra::{Complex, DMatrix, Matrix2, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C64 = Complex<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_k(r: &mut impl Rng) -> MomentumPoint<f64> {
    use std::f64::consts::PI;
    MomentumPoint::new(r.gen_range(-PI..PI), r.gen_range(-PI..PI))
}

pub fn to_na(m: &CMatrix<f64>) -> DMatrix<C64> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| m[(i, j)])
}

pub fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hermitian eigen-decomposition of `H(k)`, eigenvalues ascending.
pub fn oracle_eigen(p: &ModelParams<f64>, k: MomentumPoint<f64>) -> ([f64; 2], Matrix2<C64>) {
    let h = p.hamiltonian(k);
    let m = Matrix2::new(h[(0, 0)], h[(0, 1)], h[(1, 0)], h[(1, 1)]);
    let eig = SymmetricEigen::new(m);
    let (a, b) = (eig.eigenvalues[0], eig.eigenvalues[1]);
    if a <= b {
        ([a, b], eig.eigenvectors)
    } else {
        let v = eig.eigenvectors;
        ([b, a], Matrix2::from_columns(&[v.column(1).into_owned(), v.column(0).into_owned()]))
    }
}

/// Oracle eigenvector of `band` (ascending order: minus = column 0).
pub fn oracle_state(p: &ModelParams<f64>, k: MomentumPoint<f64>, band: Band) -> [C64; 2] {
    let (_, v) = oracle_eigen(p, k);
    let col = match band {
        Band::Minus => 0,
        Band::Plus => 1,
    };
    [v[(0, col)], v[(1, col)]]
}

pub fn inner(a: &[C64; 2], b: &[C64; 2]) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// Overlap field built from eigensolver vectors, each point multiplied by
/// `gauge(i, j, band)`.
pub fn oracle_field(
    p: &ModelParams<f64>,
    mesh: MeshGrid,
    mut gauge: impl FnMut(usize, usize, Band) -> C64,
) -> OverlapField<f64> {
    let mut states = vec![[[C64::new(0.0, 0.0); 2]; 2]; mesh.len()];
    for (i, j) in mesh.indices() {
        for band in Band::ALL {
            let g = gauge(i, j, band);
            let v = oracle_state(p, mesh.point(i, j), band);
            states[j * mesh.n_kx + i][band.index()] = [v[0] * g, v[1] * g];
        }
    }
    let mut field = OverlapField::new(mesh);
    for (i, j) in mesh.indices() {
        for d in Direction::BOTH {
            let (ni, nj) = mesh.neighbor(i, j, d);
            for bra in Band::ALL {
                for ket in Band::ALL {
                    let a = &states[j * mesh.n_kx + i][bra.index()];
                    let b = &states[nj * mesh.n_kx + ni][ket.index()];
                    field.set(i, j, d, bra, ket, inner(a, b));
                }
            }
        }
    }
    field
}
