//! Topological diagnostics computed from link overlaps on the Brillouin-zone mesh.

mod chern;
mod egp;
mod field;
mod zak;

pub use chern::{
    chern, integer_field, plaquette_field, ChernOptions, ChernResult, ADMISSIBILITY_MARGIN,
    INTEGER_TOLERANCE,
};
pub use egp::{egp, egp_links, egp_profile, EgpLink, EgpProfile, LoopSign};
pub use field::{Direction, MeshGrid, OverlapField, OverlapRecord, MODULUS_FLOOR};
pub use zak::{zak_phase, zak_profile, zak_winding, zone_edge_jump, ZakProfile, WINDING_GUARD};
