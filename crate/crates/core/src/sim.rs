//! Density-matrix simulation with per-gate depolarizing noise.
//!
//! Noise is attached to elementary gates only: after a `U3` the touched qubit
//! is depolarized with probability `eps1`, after a `CNOT` the touched pair with
//! probability `eps2`. Readout is an ideal Z measurement followed by binomial
//! shot sampling.

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::distributions::{Bernoulli, Distribution};
use serde::Serialize;

use crate::circuit::{build_overlap_circuit, transpile, Circuit, Gate, GateKind, HadamardPart};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::model::{Band, ModelParams, MomentumPoint};
use crate::rng::{derive_seed, generator};
use crate::scalar::{c, Real};

/// Mixed state of `width` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    width: usize,
    rho: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// `|0…0⟩⟨0…0|`.
    pub fn zero_state(width: usize) -> Self {
        let mut rho = CMatrix::zeros(1 << width);
        rho[(0, 0)] = Complex::one();
        Self { width, rho }
    }

    pub fn maximally_mixed(width: usize) -> Self {
        let dim = 1 << width;
        let w = T::one() / T::from_usize(dim).expect("dimension fits");
        Self {
            width,
            rho: CMatrix::identity(dim).scale(c(w, T::zero())),
        }
    }

    /// `|ψ⟩⟨ψ|`; `psi` must have length `2^width`.
    pub fn from_pure(width: usize, psi: &[Complex<T>]) -> Self {
        let dim = 1 << width;
        assert_eq!(psi.len(), dim);
        let mut rho = CMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                rho[(i, j)] = psi[i] * psi[j].conj();
            }
        }
        Self { width, rho }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.rho
    }

    pub fn trace(&self) -> Complex<T> {
        self.rho.trace()
    }

    /// `ρ → U ρ U†` for a full-width operator.
    pub fn conjugate(&mut self, u: &CMatrix<T>) {
        self.rho = u.matmul(&self.rho).matmul(&u.adjoint());
    }

    pub fn apply_gate(&mut self, gate: &Gate<T>) {
        self.conjugate(&gate.embed(self.width));
    }

    /// `ρ → (1−ε) ρ + ε · (I/2^n ⊗ Tr_S ρ)` on the qubit set `S`.
    pub fn depolarize(&mut self, qubits: &[usize], eps: T) {
        if eps.is_zero() {
            return;
        }
        let dim = 1usize << self.width;
        let mask = qubits.iter().fold(0usize, |m, &q| m | (1 << q));
        let patterns: Vec<usize> = (0..(1usize << qubits.len()))
            .map(|s| {
                qubits
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (b, &q)| acc | (((s >> b) & 1) << q))
            })
            .collect();
        let inv_d = T::one() / T::from_usize(patterns.len()).expect("pattern count fits");
        let keep = c(T::one() - eps, T::zero());
        let mut out = self.rho.scale(keep);
        for i in 0..dim {
            for j in 0..dim {
                if i & mask != j & mask {
                    continue;
                }
                let (ri, rj) = (i & !mask, j & !mask);
                let reduced = patterns
                    .iter()
                    .fold(Complex::<T>::zero(), |acc, &s| acc + self.rho[(ri | s, rj | s)]);
                out[(i, j)] = out[(i, j)] + reduced * c(eps * inv_d, T::zero());
            }
        }
        self.rho = out;
    }

    /// `Tr(ρ Z_q)`.
    pub fn expectation_z(&self, qubit: usize) -> T {
        let dim = 1usize << self.width;
        (0..dim).fold(T::zero(), |acc, i| {
            let p = self.rho[(i, i)].re;
            if (i >> qubit) & 1 == 0 {
                acc + p
            } else {
                acc - p
            }
        })
    }

    /// Hermitian, unit trace and positive semidefinite, each to `tol`.
    pub fn is_valid(&self, tol: T) -> bool {
        self.rho.hermiticity_defect() <= tol
            && (self.trace() - Complex::one()).norm() <= tol
            && self.is_psd(tol)
    }

    /// Cholesky of `ρ + tol·I` succeeds iff every eigenvalue exceeds `−tol`.
    fn is_psd(&self, tol: T) -> bool {
        let n = self.rho.dim();
        let mut l = CMatrix::<T>::zeros(n);
        for j in 0..n {
            let mut d = self.rho[(j, j)].re + tol;
            for k in 0..j {
                d = d - l[(j, k)].norm_sqr();
            }
            if !(d > T::zero()) {
                return false;
            }
            let djj = d.sqrt();
            l[(j, j)] = c(djj, T::zero());
            for i in (j + 1)..n {
                let mut s = self.rho[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        true
    }

    /// `{"width": n, "re": [[..]], "im": [[..]]}` for debugging dumps.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Dump {
            width: usize,
            re: Vec<Vec<f64>>,
            im: Vec<Vec<f64>>,
        }
        let n = self.rho.dim();
        let part = |f: fn(&Complex<T>) -> T| -> Vec<Vec<f64>> {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| f(&self.rho[(i, j)]).to_f64().unwrap_or(f64::NAN))
                        .collect()
                })
                .collect()
        };
        serde_json::to_string(&Dump {
            width: self.width,
            re: part(|z| z.re),
            im: part(|z| z.im),
        })
        .expect("density matrix serializes")
    }
}

/// Depolarizing probabilities after single-qubit and two-qubit gates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel<T> {
    pub eps1: T,
    pub eps2: T,
}

impl<T: Real> NoiseModel<T> {
    pub fn noiseless() -> Self {
        Self {
            eps1: T::zero(),
            eps2: T::zero(),
        }
    }

    /// Two-qubit error ten times the single-qubit one.
    pub fn coupled(eps1: T) -> Result<Self> {
        Self::new(eps1, eps1 * T::lit(10.0))
    }

    pub fn new(eps1: T, eps2: T) -> Result<Self> {
        let ok = |e: T| e >= T::zero() && e <= T::one();
        if !ok(eps1) || !ok(eps2) {
            return Err(Error::InvalidParameter(format!(
                "depolarizing probabilities must lie in [0, 1] (eps1={eps1}, eps2={eps2})"
            )));
        }
        Ok(Self { eps1, eps2 })
    }

    pub fn is_noiseless(&self) -> bool {
        self.eps1.is_zero() && self.eps2.is_zero()
    }
}

impl<T: Real> Default for NoiseModel<T> {
    fn default() -> Self {
        Self::noiseless()
    }
}

/// Shot budget and seed for one sampled expectation value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShotPlan {
    shots: u32,
    pub seed: u64,
}

impl ShotPlan {
    pub fn new(shots: u32, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::InvalidParameter("shots must be at least 1".into()));
        }
        Ok(Self { shots, seed })
    }

    pub fn shots(&self) -> u32 {
        self.shots
    }

    /// Same budget, seed mixed with `tag`.
    pub fn derive(&self, tag: &[u64]) -> Self {
        Self {
            shots: self.shots,
            seed: derive_seed(self.seed, tag),
        }
    }
}

/// Simulates `c` from `|0…0⟩`, applying depolarizing noise after each gate.
pub fn run<T: Real>(c: &Circuit<T>, noise: &NoiseModel<T>) -> Result<DensityMatrix<T>> {
    let mut rho = DensityMatrix::zero_state(c.width());
    let noisy = !noise.is_noiseless();
    for g in c.gates() {
        if noisy && !g.is_elementary() {
            return Err(Error::UntranspiledCircuit(g.kind.name().to_string()));
        }
        rho.apply_gate(g);
        match g.kind {
            GateKind::U3 { .. } => rho.depolarize(&g.qubits, noise.eps1),
            GateKind::Cnot => rho.depolarize(&g.qubits, noise.eps2),
            _ => {}
        }
    }
    Ok(rho)
}

/// Pure-state simulation, used as the independent noiseless reference.
pub fn statevector<T: Real>(c: &Circuit<T>) -> Vec<Complex<T>> {
    let mut psi = vec![Complex::zero(); 1 << c.width()];
    psi[0] = Complex::one();
    for g in c.gates() {
        psi = g.embed(c.width()).apply(&psi);
    }
    psi
}

/// `Tr(ρ Z_qubit)`.
pub fn exact_expectation_z<T: Real>(rho: &DensityMatrix<T>, qubit: usize) -> T {
    rho.expectation_z(qubit)
}

/// Shot estimate of `⟨Z_qubit⟩`: `(n₊ − n₋) / shots`.
pub fn sample_expectation_z<T: Real>(rho: &DensityMatrix<T>, qubit: usize, plan: &ShotPlan) -> T {
    sample_from_expectation(rho.expectation_z(qubit), plan)
}

/// Shot estimate given the exact expectation; the outcome distribution of a Z
/// readout depends on `ρ` only through it.
pub fn sample_from_expectation<T: Real>(expectation: T, plan: &ShotPlan) -> T {
    let p_plus = ((T::one() + expectation) / T::lit(2.0))
        .max(T::zero())
        .min(T::one())
        .to_f64()
        .unwrap_or(0.5);
    let coin = Bernoulli::new(p_plus).expect("probability clamped to [0, 1]");
    let mut rng = generator(plan.seed);
    let plus = (0..plan.shots()).filter(|_| coin.sample(&mut rng)).count() as i64;
    let minus = plan.shots() as i64 - plus;
    T::from_i64(plus - minus).expect("count fits") / T::from_u32(plan.shots()).expect("shots fit")
}

/// Exact ancilla expectations `(Re, Im)` of the Hadamard test for one overlap.
pub fn overlap_expectations<T: Real>(
    k_from: MomentumPoint<T>,
    k_to: MomentumPoint<T>,
    band_from: Band,
    band_to: Band,
    p: &ModelParams<T>,
    noise: &NoiseModel<T>,
) -> Result<[T; 2]> {
    let mut out = [T::zero(); 2];
    for part in HadamardPart::BOTH {
        let circuit = build_overlap_circuit(k_from, k_to, band_from, band_to, p, part)?;
        let circuit = if noise.is_noiseless() {
            circuit
        } else {
            transpile(&circuit)?
        };
        let rho = run(&circuit, noise)?;
        let q = circuit.measured_qubit().expect("Hadamard test measures the ancilla");
        out[part.index()] = rho.expectation_z(q);
    }
    Ok(out)
}

/// Hadamard-test estimate of `⟨Ψ_{band_from}(k_from) | Ψ_{band_to}(k_to)⟩`.
///
/// With `plan = None` the exact expectations are returned. Otherwise each part
/// is sampled with its own sub-seed `plan.derive([part])`.
pub fn estimate_overlap<T: Real>(
    k_from: MomentumPoint<T>,
    k_to: MomentumPoint<T>,
    band_from: Band,
    band_to: Band,
    p: &ModelParams<T>,
    noise: &NoiseModel<T>,
    plan: Option<&ShotPlan>,
) -> Result<Complex<T>> {
    let exp = overlap_expectations(k_from, k_to, band_from, band_to, p, noise)?;
    Ok(match plan {
        None => c(exp[0], exp[1]),
        Some(plan) => sampled_overlap(exp, plan),
    })
}

/// Samples both parts of an overlap from its exact expectations.
pub fn sampled_overlap<T: Real>(expectations: [T; 2], plan: &ShotPlan) -> Complex<T> {
    let re = sample_from_expectation(expectations[0], &plan.derive(&[0]));
    let im = sample_from_expectation(expectations[1], &plan.derive(&[1]));
    c(re, im)
}
