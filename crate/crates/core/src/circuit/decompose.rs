use num_complex::Complex;

use super::Gate;
use crate::linalg::CMatrix;
use crate::scalar::{principal_arg, Real};

/// Principal square root of a 2×2 unitary.
///
/// Eigenphases are halved into `(−π/2, π/2]`, so `W² = U` and `W` is the
/// root closest to the identity.
pub fn principal_sqrt<T: Real>(u: &CMatrix<T>) -> CMatrix<T> {
    debug_assert_eq!(u.dim(), 2);
    let two = T::lit(2.0);
    let tr = u.trace();
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let disc = (tr * tr - det * Complex::from(T::lit(4.0))).sqrt();
    let l1 = (tr + disc) / two;
    let l2 = (tr - disc) / two;
    let (s1, s2) = (principal_root(l1), principal_root(l2));
    let sum = s1 + s2;
    if sum.norm() > T::lit(1e-6) {
        // For 2×2 matrices (U + s1 s2 I) / (s1 + s2) squares to U.
        let mut w = u.clone();
        w[(0, 0)] = w[(0, 0)] + s1 * s2;
        w[(1, 1)] = w[(1, 1)] + s1 * s2;
        return w.scale(Complex::from(T::one()) / sum);
    }
    // Roots nearly cancel (eigenvalues straddling −1): Sylvester projectors.
    let id = CMatrix::identity(2);
    let diff = l1 - l2;
    let p1 = u.sub(&id.scale(l2)).scale(Complex::from(T::one()) / diff);
    let p2 = id.sub(&p1);
    p1.scale(s1).add(&p2.scale(s2))
}

/// Square root with the eigenphase taken from `(−π, π]`.
fn principal_root<T: Real>(z: Complex<T>) -> Complex<T> {
    let (r, a) = (z.norm(), principal_arg(z));
    Complex::from_polar(r.sqrt(), a / T::lit(2.0))
}

/// Splits a 2×2 unitary as `e^{iγ} U3(ϑ, φ, λ)`; returns `(γ, ϑ, φ, λ)`.
pub fn u3_parameters<T: Real>(w: &CMatrix<T>) -> (T, T, T, T) {
    let tol = T::lit(1e-12);
    let (a, b) = (w[(0, 0)].norm(), w[(1, 0)].norm());
    let theta = T::lit(2.0) * b.atan2(a);
    let arg = |z: Complex<T>| z.im.atan2(z.re);
    if b <= tol {
        // Diagonal: φ is free.
        let gamma = arg(w[(0, 0)]);
        return (gamma, theta, T::zero(), arg(w[(1, 1)]) - gamma);
    }
    if a <= tol {
        // Anti-diagonal: γ is free.
        let gamma = arg(w[(1, 0)]);
        return (gamma, theta, T::zero(), arg(-w[(0, 1)]) - gamma);
    }
    let gamma = arg(w[(0, 0)]);
    (
        gamma,
        theta,
        arg(w[(1, 0)]) - gamma,
        arg(-w[(0, 1)]) - gamma,
    )
}

/// Controlled-`W` for an arbitrary 2×2 unitary, as a phase on the control
/// followed by a `CU3`. The phase gate is dropped when `γ = 0`.
pub fn controlled_unitary<T: Real>(w: &CMatrix<T>, control: usize, target: usize) -> Vec<Gate<T>> {
    let (gamma, theta, phi, lambda) = u3_parameters(w);
    let mut out = Vec::with_capacity(2);
    if !gamma.is_zero() {
        out.push(Gate::phase(gamma, control));
    }
    out.push(Gate::cu3(theta, phi, lambda, control, target));
    out
}

/// Doubly-controlled `U3(ϑ, φ, λ)` from two-qubit gates.
///
/// With `W² = U`: `C_{c2}W · CNOT(c1→c2) · C_{c2}W† · CNOT(c1→c2) · C_{c1}W`
/// (listed in time order). Each controlled-`W` is emitted via
/// [`controlled_unitary`].
pub fn ccu3_decomposition<T: Real>(
    theta: T,
    phi: T,
    lambda: T,
    c1: usize,
    c2: usize,
    target: usize,
) -> Vec<Gate<T>> {
    let u = super::u3_matrix(theta, phi, lambda);
    let w = principal_sqrt(&u);
    let w_dag = w.adjoint();
    let mut gates = controlled_unitary(&w, c2, target);
    gates.push(Gate::cnot(c1, c2));
    gates.extend(controlled_unitary(&w_dag, c2, target));
    gates.push(Gate::cnot(c1, c2));
    gates.extend(controlled_unitary(&w, c1, target));
    gates
}
