//! Noisy quantum-circuit measurement of band topology in a chiral p-wave
//! superconductor.
//!
//! The crate is generic over the scalar type (`f32` or `f64`); the aliases at
//! the bottom fix it to `f64`.
//!
//! ```
//! use holonomy::{chern, LinkExpectations64, LinkSet, MeshGrid, Mode, ModelParams64, NoiseModel64, ShotPlan};
//!
//! # fn main() -> holonomy::Result<()> {
//! let p = ModelParams64::with_mu(1.9);
//! let noise = NoiseModel64::coupled(0.002)?;
//! let links = LinkExpectations64::compute(&p, MeshGrid::default(), Mode::NoisyCircuit, &noise, LinkSet::LowerBand)?;
//! let plan = ShotPlan::new(5120, 7)?;
//! let field = links.field(Some(&plan), 0)?;
//! let result = chern(&field, &Default::default())?;
//! assert_eq!(result.chern, 1);
//! assert_eq!(result.n.iter().sum::<i64>(), 1);
//! # Ok(())
//! # }
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0)` also rejects NaN

pub mod circuit;
pub mod error;
pub mod invariants;
pub mod linalg;
pub mod measure;
pub mod model;
pub mod rng;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use invariants::{
    chern, egp_profile, integer_field, zak_profile, zak_winding, ChernOptions, ChernResult,
    Direction, EgpProfile, LoopSign, MeshGrid, OverlapField, ZakProfile,
};
pub use measure::{LinkExpectations, LinkSet, Mode};
pub use model::{Band, BlochAngles, ModelParams, MomentumPoint};
pub use scalar::Real;
pub use sim::{DensityMatrix, NoiseModel, ShotPlan};

pub type ModelParams64 = ModelParams<f64>;
pub type MomentumPoint64 = MomentumPoint<f64>;
pub type Circuit64 = circuit::Circuit<f64>;
pub type Gate64 = circuit::Gate<f64>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type NoiseModel64 = NoiseModel<f64>;
pub type OverlapField64 = OverlapField<f64>;
pub type ChernResult64 = ChernResult<f64>;
pub type LinkExpectations64 = LinkExpectations<f64>;
