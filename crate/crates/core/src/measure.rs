//! Overlap fields from the three measurement back ends.
//!
//! For a given model and noise level the density matrix at the end of every
//! Hadamard test is deterministic, so the exact ancilla expectations are
//! computed once per link and cached in [`LinkExpectations`]. Trials then
//! differ only in their shot sampling, each link drawing from its own seed.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{Direction, MeshGrid, OverlapField};
use crate::model::{Band, ModelParams};
use crate::scalar::{c, Real};
use crate::sim::{overlap_expectations, sampled_overlap, NoiseModel, ShotPlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Overlaps straight from the analytic eigenvectors.
    ExactOracle,
    /// Exact ancilla expectations of the untranspiled circuits, no shots.
    NoiseFreeCircuit,
    /// Transpiled circuits under depolarizing noise, read out with shots.
    NoisyCircuit,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::ExactOracle, Mode::NoiseFreeCircuit, Mode::NoisyCircuit];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::ExactOracle => "exact-oracle",
            Mode::NoiseFreeCircuit => "noise-free-circuit",
            Mode::NoisyCircuit => "noisy-circuit",
        }
    }

    pub fn is_sampled(self) -> bool {
        self == Mode::NoisyCircuit
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown mode `{s}`")))
    }
}

/// Which links an invariant needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinkSet {
    /// Lower-band links in both directions (Chern number, Zak phase).
    LowerBand,
    /// All four band pairs on the `x` links (ensemble geometric phase).
    TransportX,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LinkKey {
    pub i: usize,
    pub j: usize,
    pub direction: Direction,
    pub bra: Band,
    pub ket: Band,
}

impl LinkKey {
    fn tag(&self, trial: u64) -> [u64; 6] {
        [
            self.i as u64,
            self.j as u64,
            self.direction.index() as u64,
            self.bra.index() as u64,
            self.ket.index() as u64,
            trial,
        ]
    }
}

impl LinkSet {
    /// Keys in a fixed order: direction, then `j`, then `i`, then band pair.
    pub fn keys(self, mesh: MeshGrid) -> Vec<LinkKey> {
        let (dirs, pairs): (&[Direction], Vec<(Band, Band)>) = match self {
            LinkSet::LowerBand => (&Direction::BOTH, vec![(Band::Minus, Band::Minus)]),
            LinkSet::TransportX => (
                &[Direction::X],
                Band::ALL
                    .iter()
                    .flat_map(|&a| Band::ALL.iter().map(move |&b| (a, b)))
                    .collect(),
            ),
        };
        let mut keys = Vec::new();
        for &direction in dirs {
            for j in 0..mesh.n_ky {
                for i in 0..mesh.n_kx {
                    for &(bra, ket) in &pairs {
                        keys.push(LinkKey {
                            i,
                            j,
                            direction,
                            bra,
                            ket,
                        });
                    }
                }
            }
        }
        keys
    }
}

/// Exact `(Re, Im)` ancilla expectations (or oracle overlaps) per link.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkExpectations<T> {
    mesh: MeshGrid,
    mode: Mode,
    entries: Vec<(LinkKey, [T; 2])>,
}

impl<T: Real> LinkExpectations<T> {
    /// Evaluates every link of `set`; runs in parallel, result order is fixed.
    pub fn compute(
        p: &ModelParams<T>,
        mesh: MeshGrid,
        mode: Mode,
        noise: &NoiseModel<T>,
        set: LinkSet,
    ) -> Result<Self> {
        mesh.check_gap(p)?;
        let noise = match mode {
            Mode::NoisyCircuit => *noise,
            _ => NoiseModel::noiseless(),
        };
        let entries = set
            .keys(mesh)
            .into_par_iter()
            .map(|key| {
                let k = mesh.point(key.i, key.j);
                let (ni, nj) = mesh.neighbor(key.i, key.j, key.direction);
                let k2 = mesh.point(ni, nj);
                let v = match mode {
                    Mode::ExactOracle => {
                        let z = p.exact_overlap(k, k2, key.bra, key.ket)?;
                        [z.re, z.im]
                    }
                    _ => overlap_expectations(k, k2, key.bra, key.ket, p, &noise)?,
                };
                Ok((key, v))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { mesh, mode, entries })
    }

    pub fn mesh(&self) -> MeshGrid {
        self.mesh
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn entries(&self) -> &[(LinkKey, [T; 2])] {
        &self.entries
    }

    /// Overlap field for one trial. Sampled modes need `plan`; each link and
    /// part draws from `plan.derive([i, j, direction, bra, ket, trial, part])`.
    pub fn field(&self, plan: Option<&ShotPlan>, trial: u64) -> Result<OverlapField<T>> {
        let plan = match (self.mode.is_sampled(), plan) {
            (true, None) => {
                return Err(Error::InvalidParameter(format!(
                    "{} mode needs a shot plan",
                    self.mode
                )))
            }
            (true, Some(p)) => Some(p),
            (false, _) => None,
        };
        let mut field = OverlapField::new(self.mesh);
        for (key, exp) in &self.entries {
            let u: Complex<T> = match plan {
                None => c(exp[0], exp[1]),
                Some(plan) => sampled_overlap(*exp, &plan.derive(&key.tag(trial))),
            };
            field.set(key.i, key.j, key.direction, key.bra, key.ket, u);
        }
        Ok(field)
    }
}
