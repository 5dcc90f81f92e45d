use super::{Circuit, Gate, ANCILLA, F_MODE, G_MODE, WIDTH};
use crate::error::Result;
use crate::model::{Band, BlochAngles, ModelParams, MomentumPoint};
use crate::scalar::Real;

/// Which component of `⟨ψ|𝒰|ψ⟩` a Hadamard test reads out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HadamardPart {
    Real,
    Imag,
}

impl HadamardPart {
    pub const BOTH: [HadamardPart; 2] = [HadamardPart::Real, HadamardPart::Imag];

    pub fn index(self) -> usize {
        match self {
            HadamardPart::Real => 0,
            HadamardPart::Imag => 1,
        }
    }
}

/// Two-mode rotation `U(θ, φ)` on the `(f, g)` qubits.
///
/// Identity on `|00⟩` and `|11⟩`; on `(|1_f 0_g⟩, |0_f 1_g⟩)` it acts as
/// `[[cos θ/2, −e^{−iφ} sin θ/2], [e^{iφ} sin θ/2, cos θ/2]]`.
pub fn prep_unitary<T: Real>(angles: &BlochAngles<T>) -> Vec<Gate<T>> {
    vec![
        Gate::cnot(G_MODE, F_MODE),
        Gate::cu3(angles.theta, angles.phi, -angles.phi, F_MODE, G_MODE),
        Gate::cnot(G_MODE, F_MODE),
    ]
}

/// Rotation angles that carry the band basis onto the eigenvectors of
/// [`ModelParams::eigenstate`]: the polar angle is measured from the lower
/// orbital, hence `π − θ`.
fn rotation_angles<T: Real>(p: &ModelParams<T>, k: MomentumPoint<T>) -> Result<BlochAngles<T>> {
    let a = p.bloch_angles(k)?;
    Ok(BlochAngles {
        theta: T::PI() - a.theta,
        phi: a.phi,
    })
}

/// Qubit flipped to occupy `band` in the band basis.
fn occupation_qubit(band: Band) -> usize {
    match band {
        Band::Plus => F_MODE,
        Band::Minus => G_MODE,
    }
}

/// Prepares `Ψ_band(k)` on the system qubits from `|000⟩`.
pub fn build_state_prep<T: Real>(
    k: MomentumPoint<T>,
    band: Band,
    p: &ModelParams<T>,
) -> Result<Circuit<T>> {
    let angles = rotation_angles(p, k)?;
    let mut circ = Circuit::new(WIDTH);
    circ.push(Gate::x(occupation_qubit(band)))?;
    circ.extend(prep_unitary(&angles))?;
    Ok(circ)
}

/// Ancilla-controlled `U(θ, φ)` (or its adjoint), with the doubly-controlled
/// rotation sandwiched between Toffolis.
fn controlled_rotation<T: Real>(angles: &BlochAngles<T>, adjoint: bool) -> Vec<Gate<T>> {
    let theta = if adjoint { -angles.theta } else { angles.theta };
    vec![
        Gate::ccx(ANCILLA, G_MODE, F_MODE),
        Gate::ccu3(theta, angles.phi, -angles.phi, ANCILLA, F_MODE, G_MODE),
        Gate::ccx(ANCILLA, G_MODE, F_MODE),
    ]
}

/// Ancilla-controlled map `Ψ_{band_from}(k_from) → Ψ_{band_to}(k_to)`.
///
/// `CU(k_to) · [CXX] · CU†(k_from)`, the `CXX` swapping the two
/// single-excitation states when the bands differ.
pub fn build_controlled_evolution<T: Real>(
    k_from: MomentumPoint<T>,
    k_to: MomentumPoint<T>,
    band_from: Band,
    band_to: Band,
    p: &ModelParams<T>,
) -> Result<Circuit<T>> {
    let from = rotation_angles(p, k_from)?;
    let to = rotation_angles(p, k_to)?;
    let mut circ = Circuit::new(WIDTH);
    circ.extend(controlled_rotation(&from, true))?;
    if band_from != band_to {
        circ.push(Gate::cxx(ANCILLA, F_MODE, G_MODE))?;
    }
    circ.extend(controlled_rotation(&to, false))?;
    Ok(circ)
}

/// Full Hadamard test: `⟨Z_ancilla⟩` equals `Re` or `Im` of `⟨ψ|𝒰|ψ⟩`.
pub fn build_hadamard_test<T: Real>(
    prep: &Circuit<T>,
    evolution: &Circuit<T>,
    part: HadamardPart,
) -> Result<Circuit<T>> {
    let mut circ = Circuit::new(WIDTH);
    circ.append(prep)?;
    circ.push(Gate::h(ANCILLA))?;
    circ.append(evolution)?;
    if part == HadamardPart::Imag {
        circ.push(Gate::sdg(ANCILLA))?;
    }
    circ.push(Gate::h(ANCILLA))?;
    circ.measure(ANCILLA)?;
    Ok(circ)
}

/// Hadamard test for `⟨Ψ_{band_from}(k_from) | Ψ_{band_to}(k_to)⟩`.
pub fn build_overlap_circuit<T: Real>(
    k_from: MomentumPoint<T>,
    k_to: MomentumPoint<T>,
    band_from: Band,
    band_to: Band,
    p: &ModelParams<T>,
    part: HadamardPart,
) -> Result<Circuit<T>> {
    let prep = build_state_prep(k_from, band_from, p)?;
    let evolution = build_controlled_evolution(k_from, k_to, band_from, band_to, p)?;
    build_hadamard_test(&prep, &evolution, part)
}
