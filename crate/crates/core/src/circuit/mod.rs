//! Gate-level circuit IR for the three-qubit overlap circuits.
//!
//! Basis ordering is little-endian: qubit `q` contributes `2^q` to the basis
//! index. Within a gate, the first listed qubit is the least significant local
//! bit, so a `CU3` on `[control, target]` has the familiar
//! `diag(1, ·, 1, ·)` block layout.

mod build;
mod decompose;
mod transpile;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{c, cis, Real};

pub use build::{
    build_controlled_evolution, build_hadamard_test, build_overlap_circuit, build_state_prep,
    prep_unitary, HadamardPart,
};
pub use decompose::{ccu3_decomposition, controlled_unitary, principal_sqrt, u3_parameters};
pub use transpile::{cnot_count, transpile};

/// Ancilla of the Hadamard test.
pub const ANCILLA: usize = 0;
/// Qubit holding the `f` (upper-band) occupation.
pub const F_MODE: usize = 1;
/// Qubit holding the `g` (lower-band) occupation.
pub const G_MODE: usize = 2;
/// Width of every circuit built by this crate.
pub const WIDTH: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind<T> {
    X,
    H,
    SDag,
    /// `[[cos ϑ/2, −e^{iλ} sin ϑ/2], [e^{iφ} sin ϑ/2, e^{i(λ+φ)} cos ϑ/2]]`.
    U3 { theta: T, phi: T, lambda: T },
    Cnot,
    Cu3 { theta: T, phi: T, lambda: T },
    Ccx,
    Ccu3 { theta: T, phi: T, lambda: T },
    /// One control, `X ⊗ X` on two targets.
    Cxx,
}

impl<T: Real> GateKind<T> {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::H => "h",
            GateKind::SDag => "sdg",
            GateKind::U3 { .. } => "u3",
            GateKind::Cnot => "cx",
            GateKind::Cu3 { .. } => "cu3",
            GateKind::Ccx => "ccx",
            GateKind::Ccu3 { .. } => "ccu3",
            GateKind::Cxx => "cxx",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            GateKind::X | GateKind::H | GateKind::SDag | GateKind::U3 { .. } => 1,
            GateKind::Cnot | GateKind::Cu3 { .. } => 2,
            GateKind::Ccx | GateKind::Ccu3 { .. } | GateKind::Cxx => 3,
        }
    }

    fn angles(&self) -> Option<[T; 3]> {
        match *self {
            GateKind::U3 { theta, phi, lambda }
            | GateKind::Cu3 { theta, phi, lambda }
            | GateKind::Ccu3 { theta, phi, lambda } => Some([theta, phi, lambda]),
            _ => None,
        }
    }
}

/// `U3(ϑ, φ, λ)` as a 2×2 matrix.
pub fn u3_matrix<T: Real>(theta: T, phi: T, lambda: T) -> CMatrix<T> {
    let half = theta / T::lit(2.0);
    let (s, co) = (half.sin(), half.cos());
    CMatrix::from_rows(&[
        &[c(co, T::zero()), -cis(lambda) * s],
        &[cis(phi) * s, cis(lambda + phi) * co],
    ])
}

/// Embeds `u` as the target block of a gate with `n_controls` low-order controls.
fn controlled_block<T: Real>(u: &CMatrix<T>, n_controls: usize) -> CMatrix<T> {
    let dim = 1 << (n_controls + 1);
    let mask = (1 << n_controls) - 1;
    let mut m = CMatrix::identity(dim);
    let (lo, hi) = (mask, mask | (1 << n_controls));
    m[(lo, lo)] = u[(0, 0)];
    m[(lo, hi)] = u[(0, 1)];
    m[(hi, lo)] = u[(1, 0)];
    m[(hi, hi)] = u[(1, 1)];
    m
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate<T> {
    pub kind: GateKind<T>,
    /// Controls first, target(s) last.
    pub qubits: Vec<usize>,
}

impl<T: Real> Gate<T> {
    pub fn new(kind: GateKind<T>, qubits: &[usize]) -> Self {
        Self {
            kind,
            qubits: qubits.to_vec(),
        }
    }

    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, &[q])
    }
    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, &[q])
    }
    pub fn sdg(q: usize) -> Self {
        Self::new(GateKind::SDag, &[q])
    }
    pub fn u3(theta: T, phi: T, lambda: T, q: usize) -> Self {
        Self::new(GateKind::U3 { theta, phi, lambda }, &[q])
    }
    /// Diagonal phase `diag(1, e^{iλ})`.
    pub fn phase(lambda: T, q: usize) -> Self {
        Self::u3(T::zero(), T::zero(), lambda, q)
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Self::new(GateKind::Cnot, &[control, target])
    }
    pub fn cu3(theta: T, phi: T, lambda: T, control: usize, target: usize) -> Self {
        Self::new(GateKind::Cu3 { theta, phi, lambda }, &[control, target])
    }
    pub fn ccx(c1: usize, c2: usize, target: usize) -> Self {
        Self::new(GateKind::Ccx, &[c1, c2, target])
    }
    pub fn ccu3(theta: T, phi: T, lambda: T, c1: usize, c2: usize, target: usize) -> Self {
        Self::new(GateKind::Ccu3 { theta, phi, lambda }, &[c1, c2, target])
    }
    pub fn cxx(control: usize, t1: usize, t2: usize) -> Self {
        Self::new(GateKind::Cxx, &[control, t1, t2])
    }

    /// True for the `{U3, CNOT}` transpilation basis.
    pub fn is_elementary(&self) -> bool {
        matches!(self.kind, GateKind::U3 { .. } | GateKind::Cnot)
    }

    /// Local `2^arity` matrix in the gate's own qubit order.
    pub fn matrix(&self) -> CMatrix<T> {
        let z = Complex::<T>::zero();
        let o = Complex::<T>::one();
        let r = T::FRAC_1_SQRT_2();
        match self.kind {
            GateKind::X => CMatrix::from_rows(&[&[z, o], &[o, z]]),
            GateKind::H => CMatrix::from_rows(&[&[c(r, T::zero()), c(r, T::zero())], &[
                c(r, T::zero()),
                c(-r, T::zero()),
            ]]),
            GateKind::SDag => CMatrix::from_rows(&[&[o, z], &[z, c(T::zero(), -T::one())]]),
            GateKind::U3 { theta, phi, lambda } => u3_matrix(theta, phi, lambda),
            GateKind::Cnot => controlled_block(&Gate::<T>::x(0).matrix(), 1),
            GateKind::Cu3 { theta, phi, lambda } => {
                controlled_block(&u3_matrix(theta, phi, lambda), 1)
            }
            GateKind::Ccx => controlled_block(&Gate::<T>::x(0).matrix(), 2),
            GateKind::Ccu3 { theta, phi, lambda } => {
                controlled_block(&u3_matrix(theta, phi, lambda), 2)
            }
            GateKind::Cxx => {
                // Control is local bit 0; targets are bits 1 and 2.
                let mut m = CMatrix::zeros(8);
                for i in 0..8usize {
                    let j = if i & 1 == 1 { i ^ 0b110 } else { i };
                    m[(j, i)] = o;
                }
                m
            }
        }
    }

    /// Full `2^width` operator of this gate.
    pub fn embed(&self, width: usize) -> CMatrix<T> {
        let local = self.matrix();
        let dim = 1usize << width;
        let k = self.qubits.len();
        let mut out = CMatrix::zeros(dim);
        for col in 0..dim {
            let lc = self
                .qubits
                .iter()
                .enumerate()
                .fold(0, |acc, (b, &q)| acc | (((col >> q) & 1) << b));
            let rest = self.qubits.iter().fold(col, |acc, &q| acc & !(1 << q));
            for lr in 0..(1usize << k) {
                let a = local[(lr, lc)];
                if a.is_zero() {
                    continue;
                }
                let row = self
                    .qubits
                    .iter()
                    .enumerate()
                    .fold(rest, |acc, (b, &q)| acc | (((lr >> b) & 1) << q));
                out[(row, col)] = a;
            }
        }
        out
    }

    fn validate(&self, width: usize) -> Result<()> {
        if self.qubits.len() != self.kind.arity() {
            return Err(Error::InvalidCircuit(format!(
                "{} expects {} qubits, got {:?}",
                self.kind.name(),
                self.kind.arity(),
                self.qubits
            )));
        }
        for (i, &q) in self.qubits.iter().enumerate() {
            if q >= width {
                return Err(Error::InvalidCircuit(format!(
                    "{} acts on qubit {q} outside width {width}",
                    self.kind.name()
                )));
            }
            if self.qubits[..i].contains(&q) {
                return Err(Error::InvalidCircuit(format!(
                    "{} repeats qubit {q}",
                    self.kind.name()
                )));
            }
        }
        if let Some(a) = self.kind.angles() {
            if a.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidCircuit(format!(
                    "{} has non-finite angles",
                    self.kind.name()
                )));
            }
        }
        Ok(())
    }
}

/// Ordered gate program with an optional terminal Z measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T> {
    width: usize,
    gates: Vec<Gate<T>>,
    measured: Option<usize>,
}

impl<T: Real> Circuit<T> {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            gates: Vec::new(),
            measured: None,
        }
    }

    pub fn from_gates(width: usize, gates: Vec<Gate<T>>) -> Result<Self> {
        let mut c = Self::new(width);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Qubit read out in the Z basis at the end, if any.
    pub fn measured_qubit(&self) -> Option<usize> {
        self.measured
    }

    pub fn measure(&mut self, q: usize) -> Result<()> {
        if q >= self.width {
            return Err(Error::InvalidCircuit(format!(
                "measured qubit {q} outside width {}",
                self.width
            )));
        }
        self.measured = Some(q);
        Ok(())
    }

    pub fn push(&mut self, gate: Gate<T>) -> Result<()> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend<I: IntoIterator<Item = Gate<T>>>(&mut self, gates: I) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    pub fn append(&mut self, other: &Circuit<T>) -> Result<()> {
        if other.width > self.width {
            return Err(Error::InvalidCircuit(format!(
                "cannot append width-{} circuit to width-{}",
                other.width, self.width
            )));
        }
        self.extend(other.gates.iter().cloned())
    }

    /// Composed unitary, later gates multiplied on the left.
    pub fn unitary(&self) -> CMatrix<T> {
        self.gates
            .iter()
            .fold(CMatrix::identity(1 << self.width), |acc, g| {
                g.embed(self.width).matmul(&acc)
            })
    }

    pub fn to_records(&self) -> Vec<GateRecord> {
        self.gates
            .iter()
            .map(|g| GateRecord {
                kind: g.kind.name().to_string(),
                qubits: g.qubits.clone(),
                angles: g
                    .kind
                    .angles()
                    .map(|a| a.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
                    .unwrap_or_default(),
            })
            .collect()
    }

    /// JSON array of `{kind, qubits, angles}` records, one per gate.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_records()).expect("gate records serialize")
    }

    pub fn from_records(width: usize, records: &[GateRecord]) -> Result<Self> {
        let mut circuit = Self::new(width);
        for r in records {
            let angle = |i: usize| -> Result<T> {
                r.angles
                    .get(i)
                    .and_then(|&x| T::from_f64(x))
                    .ok_or_else(|| Error::InvalidCircuit(format!("{} needs 3 angles", r.kind)))
            };
            let kind = match r.kind.as_str() {
                "x" => GateKind::X,
                "h" => GateKind::H,
                "sdg" => GateKind::SDag,
                "cx" => GateKind::Cnot,
                "ccx" => GateKind::Ccx,
                "cxx" => GateKind::Cxx,
                "u3" | "cu3" | "ccu3" => {
                    let (theta, phi, lambda) = (angle(0)?, angle(1)?, angle(2)?);
                    match r.kind.as_str() {
                        "u3" => GateKind::U3 { theta, phi, lambda },
                        "cu3" => GateKind::Cu3 { theta, phi, lambda },
                        _ => GateKind::Ccu3 { theta, phi, lambda },
                    }
                }
                other => return Err(Error::UnsupportedGate(other.to_string())),
            };
            circuit.push(Gate::new(kind, &r.qubits))?;
        }
        Ok(circuit)
    }

    pub fn from_json(width: usize, json: &str) -> Result<Self> {
        let records: Vec<GateRecord> = serde_json::from_str(json)
            .map_err(|e| Error::InvalidCircuit(format!("bad gate JSON: {e}")))?;
        Self::from_records(width, &records)
    }
}

/// Serializable form of one gate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub kind: String,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub angles: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cu3_matches_reference_layout() {
        let (t, p, l) = (0.7, -1.2, 2.3);
        let m = Gate::cu3(t, p, l, 0, 1).matrix();
        let (s, co) = ((t / 2.0f64).sin(), (t / 2.0f64).cos());
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let expected = CMatrix::from_rows(&[
            &[o, z, z, z],
            &[z, c(co, 0.0), z, -cis(l) * s],
            &[z, z, o, z],
            &[z, cis(p) * s, z, cis(l + p) * co],
        ]);
        assert!(m.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn embed_respects_qubit_order() {
        // CNOT with control 2, target 0 maps |100> (index 4) to |101> (index 5).
        let m = Gate::<f64>::cnot(2, 0).embed(3);
        assert_eq!(m[(5, 4)], c(1.0, 0.0));
        assert_eq!(m[(4, 4)], c(0.0, 0.0));
        assert_eq!(m[(1, 1)], c(1.0, 0.0));
    }

    #[test]
    fn cxx_swaps_single_excitations_when_control_set() {
        let m = Gate::<f64>::cxx(0, 1, 2).embed(3);
        // |a=1, f=1, g=0> = 0b011 -> |a=1, f=0, g=1> = 0b101
        assert_eq!(m[(0b101, 0b011)], c(1.0, 0.0));
        assert_eq!(m[(0b010, 0b010)], c(1.0, 0.0));
    }

    #[test]
    fn push_rejects_bad_qubits() {
        let mut circ = Circuit::<f64>::new(3);
        assert!(circ.push(Gate::cnot(1, 1)).is_err());
        assert!(circ.push(Gate::x(3)).is_err());
        assert!(circ.push(Gate::new(GateKind::Cnot, &[0])).is_err());
        assert!(circ
            .push(Gate::u3(f64::INFINITY, 0.0, 0.0, 0))
            .is_err());
    }

    #[test]
    fn json_round_trip_and_unknown_kind() {
        let mut circ = Circuit::<f64>::new(3);
        circ.extend([Gate::h(0), Gate::cu3(0.1, 0.2, 0.3, 1, 2), Gate::cxx(0, 1, 2)])
            .unwrap();
        let back = Circuit::<f64>::from_json(3, &circ.to_json()).unwrap();
        assert_eq!(back, circ);
        let err = Circuit::<f64>::from_json(3, r#"[{"kind":"swap","qubits":[0,1]}]"#);
        assert!(matches!(err, Err(Error::UnsupportedGate(_))));
    }
}
