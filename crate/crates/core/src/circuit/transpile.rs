use super::{ccu3_decomposition, Circuit, Gate, GateKind};
use crate::error::Result;
use crate::scalar::Real;

/// Lowers every gate to the `{U3, CNOT}` basis.
///
/// The composed unitary is preserved exactly (not merely up to global phase).
pub fn transpile<T: Real>(c: &Circuit<T>) -> Result<Circuit<T>> {
    let mut out = Circuit::new(c.width());
    for g in c.gates() {
        lower(g, &mut out)?;
    }
    if let Some(q) = c.measured_qubit() {
        out.measure(q)?;
    }
    Ok(out)
}

fn lower<T: Real>(g: &Gate<T>, out: &mut Circuit<T>) -> Result<()> {
    let q = &g.qubits;
    let pi = T::PI();
    let half = |x: T| x / T::lit(2.0);
    match g.kind {
        GateKind::U3 { .. } | GateKind::Cnot => out.push(g.clone()),
        GateKind::X => out.push(Gate::u3(pi, T::zero(), pi, q[0])),
        GateKind::H => out.push(Gate::u3(half(pi), T::zero(), pi, q[0])),
        GateKind::SDag => out.push(Gate::phase(-half(pi), q[0])),
        GateKind::Cu3 { theta, phi, lambda } => {
            // C-U3 = (phase on control) · A X B X C on the target, ABC = I.
            let (ctl, tgt) = (q[0], q[1]);
            out.extend([
                Gate::phase(half(lambda + phi), ctl),
                Gate::phase(half(lambda - phi), tgt),
                Gate::cnot(ctl, tgt),
                Gate::u3(-half(theta), T::zero(), -half(phi + lambda), tgt),
                Gate::cnot(ctl, tgt),
                Gate::u3(half(theta), phi, T::zero(), tgt),
            ])
        }
        GateKind::Ccu3 { theta, phi, lambda } => {
            for sub in ccu3_decomposition(theta, phi, lambda, q[0], q[1], q[2]) {
                lower(&sub, out)?;
            }
            Ok(())
        }
        GateKind::Ccx => {
            for sub in ccu3_decomposition(pi, T::zero(), pi, q[0], q[1], q[2]) {
                lower(&sub, out)?;
            }
            Ok(())
        }
        GateKind::Cxx => out.extend([Gate::cnot(q[0], q[1]), Gate::cnot(q[0], q[2])]),
    }
}

/// Number of CNOT gates in a transpiled circuit.
pub fn cnot_count<T: Real>(c: &Circuit<T>) -> usize {
    c.gates()
        .iter()
        .filter(|g| matches!(g.kind, GateKind::Cnot))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_circuit_passes_through() {
        let c = Circuit::from_gates(
            3,
            vec![Gate::u3(0.1, 0.2, 0.3, 0), Gate::cnot(0, 2), Gate::cnot(1, 0)],
        )
        .unwrap();
        assert_eq!(transpile(&c).unwrap(), c);
    }

    #[test]
    fn counting() {
        assert_eq!(cnot_count(&Circuit::<f64>::new(3)), 0);
        let one = Circuit::from_gates(2, vec![Gate::<f64>::cnot(0, 1)]).unwrap();
        assert_eq!(cnot_count(&one), 1);
    }

    #[test]
    fn single_cu3_uses_two_cnots() {
        let c = Circuit::from_gates(2, vec![Gate::cu3(0.4, -1.0, 2.2, 1, 0)]).unwrap();
        let t = transpile(&c).unwrap();
        assert_eq!(cnot_count(&t), 2);
        assert!(t.gates().iter().all(Gate::is_elementary));
        assert!(t.unitary().max_abs_diff(&c.unitary()) < 1e-12);
    }

    #[test]
    fn toffoli_lowers_to_eight_cnots() {
        let c = Circuit::from_gates(3, vec![Gate::<f64>::ccx(0, 1, 2)]).unwrap();
        let t = transpile(&c).unwrap();
        assert_eq!(cnot_count(&t), 8);
        assert!(t.unitary().phase_distance(&c.unitary()) < 1e-10);
    }
}
