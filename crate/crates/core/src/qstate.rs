//! Dense state vectors for registers of at most [`MAX_QUBITS`] qubits.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI, TAU};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 12;

/// Tolerance used when checking that public operations kept the norm at 1.
pub const NORM_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// An azimuthal angle on the equator of the Bloch sphere, kept in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct EquatorAngle(f64);

impl EquatorAngle {
    pub const ZERO: EquatorAngle = EquatorAngle(0.0);

    pub fn new(radians: f64) -> Self {
        let r = radians.rem_euclid(TAU);
        // rem_euclid rounds tiny negative inputs up to exactly 2π
        EquatorAngle(if r >= TAU { 0.0 } else { r })
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::new(rng.random::<f64>() * TAU)
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// The antipodal angle φ + π.
    pub fn bar(self) -> Self {
        Self::new(self.0 + PI)
    }

    pub fn shifted(self, delta: f64) -> Self {
        Self::new(self.0 + delta)
    }

    /// Amplitudes of (|↑⟩ + e^{iφ}|↓⟩)/√2.
    pub fn ket(self) -> [Complex64; 2] {
        [
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::from_polar(FRAC_1_SQRT_2, self.0),
        ]
    }
}

impl From<f64> for EquatorAngle {
    fn from(radians: f64) -> Self {
        Self::new(radians)
    }
}

impl fmt::Display for EquatorAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Result of a two-outcome projective measurement: `Plus` is the +1
/// eigenvalue (|φ⟩ for equator measurements, |↑⟩ for σ^z).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn sign(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }
}

pub fn make_equator_state(phi: EquatorAngle) -> StateVector {
    StateVector::equator(phi)
}

/// A normalized pure state of `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |↑…↑⟩ on `n` qubits.
    pub fn zero_state(n: usize) -> Result<Self> {
        Self::basis_state(n, 0)
    }

    pub fn basis_state(n: usize, index: usize) -> Result<Self> {
        check_size(n)?;
        if index >= 1 << n {
            return Err(Error::arg(format!("basis index {index} out of range for {n} qubits")));
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        Ok(StateVector { num_qubits: n, amps })
    }

    pub fn up() -> Self {
        StateVector { num_qubits: 1, amps: vec![ONE, ZERO] }
    }

    pub fn down() -> Self {
        StateVector { num_qubits: 1, amps: vec![ZERO, ONE] }
    }

    pub fn equator(phi: EquatorAngle) -> Self {
        StateVector { num_qubits: 1, amps: phi.ket().to_vec() }
    }

    /// Normalizes the given amplitudes. The length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::arg(format!("amplitude count {len} is not a power of two")));
        }
        let n = len.trailing_zeros() as usize;
        check_size(n)?;
        let norm = l2_norm(&amps);
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::State("zero or non-finite norm".into()));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(StateVector { num_qubits: n, amps })
    }

    /// Tensor product of the given states; the first factor takes the lowest qubits.
    pub fn product(factors: &[StateVector]) -> Result<Self> {
        let mut out = StateVector { num_qubits: 0, amps: vec![ONE] };
        for f in factors {
            out = out.tensor(f)?;
        }
        Ok(out)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amps)
    }

    /// `self ⊗ other`, with `self` on the low qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.num_qubits + other.num_qubits;
        check_size(n)?;
        let mut amps = Vec::with_capacity(1 << n);
        for b in &other.amps {
            for a in &self.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector { num_qubits: n, amps })
    }

    /// Appends `extra` as the new highest qubits and returns the index of the
    /// first appended qubit.
    pub fn append(&mut self, extra: &StateVector) -> Result<usize> {
        let first = self.num_qubits;
        *self = self.tensor(extra)?;
        Ok(first)
    }

    /// ⟨self|other⟩.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        self.same_dims(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// |⟨self|other⟩|², insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner_product(other)?.norm_sqr())
    }

    pub fn apply_single(&mut self, q: usize, m: &[[Complex64; 2]; 2]) -> Result<()> {
        self.check_qubit(q)?;
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(())
    }

    /// Applies a 4×4 matrix to qubits `(q1, q2)`; matrix index = bit(q1) + 2·bit(q2).
    pub fn apply_two(&mut self, q1: usize, q2: usize, m: &[[Complex64; 4]; 4]) -> Result<()> {
        self.check_pair(q1, q2)?;
        let (b1, b2) = (1 << q1, 1 << q2);
        for i in 0..self.amps.len() {
            if i & (b1 | b2) == 0 {
                let idx = [i, i | b1, i | b2, i | b1 | b2];
                let v = idx.map(|k| self.amps[k]);
                for (r, &k) in idx.iter().enumerate() {
                    self.amps[k] = (0..4).map(|c| m[r][c] * v[c]).sum();
                }
            }
        }
        Ok(())
    }

    /// Applies a unitary on an arbitrary ordered qubit list; matrix index bit
    /// `j` is `qubits[j]`.
    pub fn apply_operator(&mut self, qubits: &[usize], op: &DMatrix<Complex64>) -> Result<()> {
        let k = qubits.len();
        let d = 1usize << k;
        if op.nrows() != d || op.ncols() != d {
            return Err(Error::DimensionMismatch { left: op.nrows(), right: d });
        }
        self.check_distinct(qubits)?;
        let dev = (op.adjoint() * op - DMatrix::<Complex64>::identity(d, d)).camax();
        if dev > 1e-9 {
            return Err(Error::arg(format!("operator is not unitary (deviation {dev:e})")));
        }
        let mask: usize = qubits.iter().map(|&q| 1 << q).sum();
        let scatter = |base: usize, local: usize| {
            qubits.iter().enumerate().fold(base, |acc, (j, &q)| acc | (((local >> j) & 1) << q))
        };
        let mut v = vec![ZERO; d];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (l, slot) in v.iter_mut().enumerate() {
                *slot = self.amps[scatter(base, l)];
            }
            for r in 0..d {
                self.amps[scatter(base, r)] = (0..d).map(|c| op[(r, c)] * v[c]).sum();
            }
        }
        Ok(())
    }

    /// The quantum Faraday rotation exp[−i(π/4) σ^z_control σ^z_target].
    pub fn apply_qfr(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_pair(control, target)?;
        let same = Complex64::from_polar(1.0, -FRAC_PI_4);
        let diff = Complex64::from_polar(1.0, FRAC_PI_4);
        for (i, a) in self.amps.iter_mut().enumerate() {
            let parity = ((i >> control) ^ (i >> target)) & 1;
            *a *= if parity == 0 { same } else { diff };
        }
        Ok(())
    }

    pub fn apply_pauli_x(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                self.amps.swap(i, i | bit);
            }
        }
        Ok(())
    }

    pub fn apply_pauli_z(&mut self, q: usize) -> Result<()> {
        self.apply_phase(q, -ONE)
    }

    /// diag(1, e^{iθ}): moves an equator state |φ⟩ to |φ+θ⟩.
    pub fn rotate_equator(&mut self, q: usize, theta: f64) -> Result<()> {
        self.apply_phase(q, Complex64::from_polar(1.0, theta))
    }

    fn apply_phase(&mut self, q: usize, phase: Complex64) -> Result<()> {
        self.check_qubit(q)?;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i >> q) & 1 == 1 {
                *a *= phase;
            }
        }
        Ok(())
    }

    /// Born probability of finding qubit `q` in the normalized 1-qubit state `ket`.
    pub fn probability(&self, q: usize, ket: [Complex64; 2]) -> Result<f64> {
        self.check_qubit(q)?;
        let bit = 1 << q;
        let mut p = 0.0;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                p += (ket[0].conj() * self.amps[i] + ket[1].conj() * self.amps[i | bit]).norm_sqr();
            }
        }
        Ok(p)
    }

    /// Projects qubit `q` onto `ket` and renormalizes; returns the probability
    /// of that outcome. Fails if the outcome is impossible.
    pub fn project(&mut self, q: usize, ket: [Complex64; 2]) -> Result<f64> {
        let p = self.probability(q, ket)?;
        if p < 1e-300 {
            return Err(Error::State(format!("projection of qubit {q} has zero probability")));
        }
        let bit = 1 << q;
        let scale = 1.0 / p.sqrt();
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let c = (ket[0].conj() * self.amps[i] + ket[1].conj() * self.amps[i | bit]) * scale;
                self.amps[i] = ket[0] * c;
                self.amps[i | bit] = ket[1] * c;
            }
        }
        Ok(p)
    }

    /// Measures qubit `q` in the basis {ket, ket⊥}; `Plus` means `ket`.
    pub fn measure_in_basis<R: Rng + ?Sized>(
        &mut self,
        q: usize,
        ket: [Complex64; 2],
        rng: &mut R,
    ) -> Result<Outcome> {
        let p_plus = self.probability(q, ket)?;
        let outcome = if rng.random::<f64>() < p_plus { Outcome::Plus } else { Outcome::Minus };
        let target = match outcome {
            Outcome::Plus => ket,
            Outcome::Minus => [-ket[1].conj(), ket[0].conj()],
        };
        self.project(q, target)?;
        Ok(outcome)
    }

    /// Measures S_φ = cos φ σ^x + sin φ σ^y on qubit `q`.
    pub fn measure_equator<R: Rng + ?Sized>(
        &mut self,
        q: usize,
        phi: EquatorAngle,
        rng: &mut R,
    ) -> Result<Outcome> {
        self.measure_in_basis(q, phi.ket(), rng)
    }

    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<Outcome> {
        self.measure_in_basis(q, [ONE, ZERO], rng)
    }

    /// Partial trace onto `keep`; reduced index bit `j` is `keep[j]`.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::arg("reduced_density needs at least one qubit to keep"));
        }
        self.check_distinct(keep)?;
        let rest: Vec<usize> = (0..self.num_qubits).filter(|q| !keep.contains(q)).collect();
        let gather = |idx: usize, qs: &[usize]| {
            qs.iter().enumerate().fold(0usize, |acc, (j, &q)| acc | (((idx >> q) & 1) << j))
        };
        let mut m = DMatrix::<Complex64>::zeros(1 << keep.len(), 1 << rest.len());
        for (idx, a) in self.amps.iter().enumerate() {
            m[(gather(idx, keep), gather(idx, &rest))] = *a;
        }
        Ok(DensityMatrix { m: &m * m.adjoint() })
    }

    fn same_dims(&self, other: &StateVector) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch { left: self.num_qubits, right: other.num_qubits });
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::QubitOutOfRange { index: q, num_qubits: self.num_qubits });
        }
        Ok(())
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::arg(format!("two-qubit gate needs distinct qubits, got {a} twice")));
        }
        Ok(())
    }

    fn check_distinct(&self, qubits: &[usize]) -> Result<()> {
        for (i, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..i].contains(&q) {
                return Err(Error::arg(format!("qubit {q} listed twice")));
            }
        }
        Ok(())
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    Ok(())
}

fn l2_norm(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    a.tensor(b)
}

pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    a.inner_product(b)
}

pub fn fidelity_up_to_global_phase(a: &StateVector, b: &StateVector) -> Result<f64> {
    a.fidelity(b)
}

/// Fidelities of `b` against `a` before and after removing a diagonal phase
/// frame diag(1, e^{iθ_k}) on each of `frame_qubits`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameFidelity {
    pub raw: f64,
    pub aligned: f64,
    /// e^{iθ_k} per frame qubit, in the order given.
    pub phases: Vec<Complex64>,
}

/// Compares two states up to local z-phases on `frame_qubits`.
///
/// Such phases are unobservable when those qubits are only ever measured in
/// σ^z. The frame is read off the overlap of the branch with the largest
/// weight and its single-flip neighbours, then applied to every branch.
pub fn fidelity_modulo_phase_frame(
    a: &StateVector,
    b: &StateVector,
    frame_qubits: &[usize],
) -> Result<FrameFidelity> {
    a.same_dims(b)?;
    a.check_distinct(frame_qubits)?;
    let k = frame_qubits.len();
    let config = |idx: usize| {
        frame_qubits.iter().enumerate().fold(0usize, |acc, (j, &q)| acc | (((idx >> q) & 1) << j))
    };
    let mut branch = vec![ZERO; 1 << k];
    for (idx, (x, y)) in a.amps.iter().zip(&b.amps).enumerate() {
        branch[config(idx)] += x.conj() * y;
    }
    let raw = branch.iter().sum::<Complex64>().norm_sqr();

    let base = (0..branch.len())
        .max_by(|&i, &j| branch[i].norm().total_cmp(&branch[j].norm()))
        .unwrap_or(0);
    let phases: Vec<Complex64> = (0..k)
        .map(|j| {
            let (with, without) = (branch[base | (1 << j)], branch[base & !(1 << j)]);
            // an empty neighbour leaves the phase undetermined; keep it at 1
            if with.norm() < 1e-12 || without.norm() < 1e-12 {
                return ONE;
            }
            let z = with * without.conj();
            z / z.norm()
        })
        .collect();
    let aligned = branch
        .iter()
        .enumerate()
        .map(|(cfg, r)| {
            let frame: Complex64 =
                (0..k).filter(|j| (cfg >> j) & 1 == 1).map(|j| phases[j]).product();
            r * frame.conj()
        })
        .sum::<Complex64>()
        .norm_sqr();
    Ok(FrameFidelity { raw, aligned, phases })
}

/// A density matrix on `log2(dim)` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity to 1e-10.
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { left: m.nrows(), right: m.ncols() });
        }
        let (evals, _) = hermitian_eigen(&m)?;
        let tr: f64 = evals.iter().sum();
        if (tr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::State(format!("trace {tr} is not 1")));
        }
        if let Some(&neg) = evals.iter().find(|&&e| e < -NORM_TOLERANCE) {
            return Err(Error::State(format!("negative eigenvalue {neg}")));
        }
        Ok(DensityMatrix { m })
    }

    pub fn pure(psi: &StateVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        DensityMatrix { m: &v * v.adjoint() }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        check_size(num_qubits)?;
        let d = 1 << num_qubits;
        Ok(DensityMatrix { m: DMatrix::identity(d, d) / Complex64::new(d as f64, 0.0) })
    }

    /// Convex mixture Σ w_i ρ_i; weights must be non-negative and sum to 1.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::arg("empty mixture"))?;
        let d = first.1.dim();
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for (w, rho) in parts {
            if rho.dim() != d {
                return Err(Error::DimensionMismatch { left: rho.dim(), right: d });
            }
            m += &rho.m * Complex64::new(*w, 0.0);
        }
        Self::from_matrix(m)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.m).map(|(e, _)| e).unwrap_or_default()
    }

    /// Tr(ρ · op).
    pub fn expectation(&self, op: &DMatrix<Complex64>) -> Result<Complex64> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { left: op.nrows(), right: self.dim() });
        }
        Ok((&self.m * op).trace())
    }

    /// ⟨ψ|ρ|ψ⟩.
    pub fn fidelity_with_pure(&self, psi: &StateVector) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch { left: psi.dim(), right: self.dim() });
        }
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        Ok((v.adjoint() * &self.m * &v)[(0, 0)].re)
    }

    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        trace_distance(self, other)
    }
}

/// (1/2) Σ |λ_i(ρ − σ)|.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: sigma.dim() });
    }
    let (evals, _) = hermitian_eigen(&(&rho.m - &sigma.m))?;
    Ok(0.5 * evals.iter().map(|e| e.abs()).sum::<f64>())
}

/// Eigenvalues (ascending) and eigenvectors (as columns) of a Hermitian matrix.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let dev = (m - m.adjoint()).camax();
    if dev > NORM_TOLERANCE * m.nrows().max(1) as f64 {
        return Err(Error::NotHermitian(dev));
    }
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}
