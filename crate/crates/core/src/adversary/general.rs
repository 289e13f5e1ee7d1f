//! The incoherent attack with one ancilla qubit per channel crossing.
//!
//! On each leg Eve couples a fresh ancilla |0⟩ to the travel qubit:
//! the basis state labelled 0 leaves the ancilla in |0⟩ (ε00 or η00), the one
//! labelled 1 rotates it to c|0⟩ + √(1−c²)|1⟩ (ε11 or η11). Forward legs use
//! Eve's basis {|γ⟩, |γ̄⟩}; return legs use its image under the Faraday
//! rotation, {|γ+π/2⟩, |γ−π/2⟩}.
//!
//! Ancillae are appended in hook order, so with all four legs attacked the
//! register reads A, B, C, D, E, F, E′, F′.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Vector4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::protocol::{ChannelHook, HookList, Leg, Tap};
use crate::qstate::{EquatorAngle, StateVector};

/// Register positions of the ancillae when every leg is attacked.
pub mod layout {
    pub const E: usize = 4;
    pub const F: usize = 5;
    pub const E_PRIME: usize = 6;
    pub const F_PRIME: usize = 7;
}

/// Parameters of the ancilla-coupling attack.
///
/// `overlap_c_x` = ⟨ε00|ε11⟩ (forward legs), `overlap_c_y` = ⟨η00|η11⟩
/// (return legs). When `symmetric` is false the D-legs get ancillae with
/// overlap 1, which decouple from the travel qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralAttackSpec {
    gamma: EquatorAngle,
    overlap_c_x: f64,
    overlap_c_y: f64,
    symmetric: bool,
}

impl GeneralAttackSpec {
    pub fn new(gamma: EquatorAngle, overlap_c_x: f64, overlap_c_y: f64, symmetric: bool) -> Result<Self> {
        check_overlap(overlap_c_x)?;
        check_overlap(overlap_c_y)?;
        Ok(GeneralAttackSpec { gamma, overlap_c_x, overlap_c_y, symmetric })
    }

    pub fn balanced(gamma: EquatorAngle, c: f64) -> Result<Self> {
        Self::new(gamma, c, c, true)
    }

    pub fn gamma(&self) -> EquatorAngle {
        self.gamma
    }

    pub fn with_gamma(self, gamma: EquatorAngle) -> Self {
        GeneralAttackSpec { gamma, ..self }
    }

    pub fn overlap_c_x(&self) -> f64 {
        self.overlap_c_x
    }

    pub fn overlap_c_y(&self) -> f64 {
        self.overlap_c_y
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    /// Overlaps used on the D legs.
    pub fn primed_overlaps(&self) -> (f64, f64) {
        if self.symmetric {
            (self.overlap_c_x, self.overlap_c_y)
        } else {
            (1.0, 1.0)
        }
    }

    fn overlap(&self, leg: Leg) -> f64 {
        let (cx, cy) = match leg {
            Leg::CForward | Leg::CReturn => (self.overlap_c_x, self.overlap_c_y),
            Leg::DForward | Leg::DReturn => self.primed_overlaps(),
        };
        if leg.is_forward() {
            cx
        } else {
            cy
        }
    }
}

fn check_overlap(c: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::Domain { value: c, domain: "[0, 1]" });
    }
    Ok(())
}

/// (|0⟩, c|0⟩ + √(1−c²)|1⟩).
pub fn make_ancilla_pair(c: f64) -> Result<(StateVector, StateVector)> {
    check_overlap(c)?;
    let v1 = StateVector::from_amplitudes(vec![
        Complex64::new(c, 0.0),
        Complex64::new((1.0 - c * c).sqrt(), 0.0),
    ])?;
    Ok((StateVector::up(), v1))
}

/// Eve's label-0 basis state on `leg`; label 1 is its antipode.
pub fn leg_basis(leg: Leg, gamma: EquatorAngle) -> EquatorAngle {
    if leg.is_forward() {
        gamma
    } else {
        gamma.shifted(FRAC_PI_2)
    }
}

/// α̃ = α − γ + π/2 (and likewise β̃).
pub fn relative_angle(angle: EquatorAngle, gamma: EquatorAngle) -> f64 {
    angle.radians() - gamma.radians() + FRAC_PI_2
}

/// Exact mismatch probability of K_{2n−1} under the attack, averaged over
/// uniform α and β: [1 − ((1 + c_x c_y)/2)²]/2.
pub fn model_detection_probability(c_x: f64, c_y: f64) -> Result<f64> {
    check_overlap(c_x)?;
    check_overlap(c_y)?;
    let q = (1.0 + c_x * c_y) / 2.0;
    Ok((1.0 - q * q) / 2.0)
}

/// Hook coupling a fresh ancilla to the travel qubit of one leg.
#[derive(Debug, Clone, PartialEq)]
pub struct AncillaProbe {
    leg: Leg,
    basis: EquatorAngle,
    overlap: f64,
}

impl AncillaProbe {
    pub fn new(leg: Leg, basis: EquatorAngle, overlap: f64) -> Result<Self> {
        check_overlap(overlap)?;
        Ok(AncillaProbe { leg, basis, overlap })
    }

    /// P0 ⊗ 1 + P1 ⊗ R on (travel, ancilla); index = travel + 2·ancilla.
    fn unitary(&self) -> [[Complex64; 4]; 4] {
        let k0 = self.basis.ket();
        let k1 = self.basis.bar().ket();
        let proj = |k: [Complex64; 2], r: usize, c: usize| k[r] * k[c].conj();
        let (c, s) = (self.overlap, (1.0 - self.overlap * self.overlap).sqrt());
        let rot = [[c, -s], [s, c]];
        let mut u = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (row, u_row) in u.iter_mut().enumerate() {
            for (col, entry) in u_row.iter_mut().enumerate() {
                let (tr, ar) = (row & 1, row >> 1);
                let (tc, ac) = (col & 1, col >> 1);
                let identity = if ar == ac { proj(k0, tr, tc) } else { Complex64::new(0.0, 0.0) };
                *entry = identity + proj(k1, tr, tc) * rot[ar][ac];
            }
        }
        u
    }
}

impl ChannelHook for AncillaProbe {
    fn leg(&self) -> Leg {
        self.leg
    }

    fn transform(&self, state: &mut StateVector, tap: &mut Tap<'_>) -> Result<()> {
        let ancilla = state.append(&StateVector::up())?;
        state.apply_two(self.leg.travel_qubit(), ancilla, &self.unitary())?;
        tap.log.ancillae.push((self.leg, ancilla));
        Ok(())
    }
}

pub fn general_attack_hooks(spec: &GeneralAttackSpec) -> HookList {
    Leg::ALL
        .iter()
        .map(|&leg| {
            let probe = AncillaProbe {
                leg,
                basis: leg_basis(leg, spec.gamma),
                overlap: spec.overlap(leg),
            };
            Box::new(probe) as Box<dyn ChannelHook>
        })
        .collect()
}

/// A vector on two ancillae; index = first + 2·second.
pub type PairVector = Vector4<Complex64>;

/// The six unnormalized ancilla-pair vectors |1⟩ … |6⟩ for one relative angle.
#[derive(Debug, Clone, PartialEq)]
pub struct AncillaSextet {
    vectors: [PairVector; 6],
}

impl AncillaSextet {
    pub fn new(theta: f64, c_x: f64, c_y: f64) -> Result<Self> {
        let (e00, e11) = make_ancilla_pair(c_x)?;
        let (n00, n11) = make_ancilla_pair(c_y)?;
        let pair = |e: &StateVector, n: &StateVector| -> Result<PairVector> {
            Ok(PairVector::from_column_slice(e.tensor(n)?.amplitudes()))
        };
        let (p00_00, p11_11) = (pair(&e00, &n00)?, pair(&e11, &n11)?);
        let (p00_11, p11_00) = (pair(&e00, &n11)?, pair(&e11, &n00)?);
        let cc = Complex64::new((theta / 2.0).cos().powi(2), 0.0);
        let ss = Complex64::new((theta / 2.0).sin().powi(2), 0.0);
        Ok(AncillaSextet {
            vectors: [
                p00_00 - p11_11,
                p00_00 * ss + p11_11 * cc,
                p00_00 * cc + p11_11 * ss,
                p00_11 - p11_00,
                p00_11 * cc + p11_00 * ss,
                p00_11 * ss + p11_00 * cc,
            ],
        })
    }

    /// |i⟩ for i in 1..=6.
    pub fn get(&self, i: usize) -> &PairVector {
        assert!((1..=6).contains(&i), "sextet index {i} outside 1..=6");
        &self.vectors[i - 1]
    }

    /// ⟨i|j⟩.
    pub fn overlap(&self, i: usize, j: usize) -> Complex64 {
        self.get(i).dotc(self.get(j))
    }

    /// ⟨i|j⟩ / √(⟨i|i⟩⟨j|j⟩); `None` if either vector vanishes.
    pub fn normalized_overlap(&self, i: usize, j: usize) -> Option<Complex64> {
        let d = (self.overlap(i, i).re * self.overlap(j, j).re).sqrt();
        (d > 1e-15).then(|| self.overlap(i, j) / d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EveSubspaceDecomposition {
    pub alpha_tilde: f64,
    pub beta_tilde: f64,
    /// On (E, F).
    pub unprimed: AncillaSextet,
    /// On (E′, F′).
    pub primed: AncillaSextet,
}

pub fn build_subspace_decomposition(
    alpha_tilde: f64,
    beta_tilde: f64,
    spec: &GeneralAttackSpec,
) -> Result<EveSubspaceDecomposition> {
    let (pcx, pcy) = spec.primed_overlaps();
    Ok(EveSubspaceDecomposition {
        alpha_tilde,
        beta_tilde,
        unprimed: AncillaSextet::new(alpha_tilde, spec.overlap_c_x, spec.overlap_c_y)?,
        primed: AncillaSextet::new(beta_tilde, pcx, pcy)?,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::protocol::{evolve, measure_round, EveLog};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn ancilla_pair_overlaps() {
        let (v0, v1) = make_ancilla_pair(1.0).unwrap();
        assert_eq!(v0, v1);
        let (v0, v1) = make_ancilla_pair(0.0).unwrap();
        assert!(v0.inner_product(&v1).unwrap().norm() < 1e-15);
        let (v0, v1) = make_ancilla_pair(0.6).unwrap();
        assert!((v0.inner_product(&v1).unwrap() - c(0.6)).norm() < 1e-15);
        assert!(matches!(make_ancilla_pair(1.2), Err(Error::Domain { .. })));
        assert!(make_ancilla_pair(-0.1).is_err());
        assert!(GeneralAttackSpec::new(EquatorAngle::ZERO, 0.5, 1.5, true).is_err());
    }

    #[test]
    fn probe_is_unitary_and_acts_as_documented() {
        let mut r = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let basis = EquatorAngle::random(&mut r);
            let overlap: f64 = r.random();
            let probe = AncillaProbe::new(Leg::CForward, basis, overlap).unwrap();
            let (e00, e11) = make_ancilla_pair(overlap).unwrap();
            for (ket, anc) in [(basis, &e00), (basis.bar(), &e11)] {
                let mut s = StateVector::equator(ket).tensor(&StateVector::up()).unwrap();
                s.apply_two(0, 1, &probe.unitary()).unwrap();
                let want = StateVector::equator(ket).tensor(anc).unwrap();
                assert!((s.inner_product(&want).unwrap() - c(1.0)).norm() < 1e-12);
            }
        }
    }

    fn run_attacked(spec: &GeneralAttackSpec, rounds: u64, seed: u64) -> f64 {
        let hooks = general_attack_hooks(spec);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let mut mismatches = 0;
        for n in 0..rounds {
            let (a, b) = (EquatorAngle::random(&mut r), EquatorAngle::random(&mut r));
            let mut log = EveLog::default();
            let mut s = evolve(a, b, &hooks, &mut r, &mut log).unwrap();
            assert_eq!(s.num_qubits(), 8);
            assert!((s.norm() - 1.0).abs() < 1e-10);
            let t = measure_round(n, a, b, &mut s, &mut r).unwrap();
            mismatches += usize::from(t.first_bits_differ());
        }
        mismatches as f64 / rounds as f64
    }

    #[test]
    fn transparent_ancillae_cause_no_errors() {
        let spec = GeneralAttackSpec::balanced(EquatorAngle::new(0.4), 1.0).unwrap();
        assert_eq!(run_attacked(&spec, 10_000, 2), 0.0);
    }

    #[test]
    fn orthogonal_ancillae_reach_three_eighths() {
        let spec = GeneralAttackSpec::balanced(EquatorAngle::new(1.3), 0.0).unwrap();
        let n = 100_000;
        let p = run_attacked(&spec, n, 3);
        assert!((p - 0.375).abs() < 0.01, "{p}");
    }

    /// Detection probability of the 8-qubit model by exact quadrature over a
    /// grid of (α, β); the integrand is a trigonometric polynomial of low
    /// degree, so a 12×12 grid is exact.
    fn quadrature_detection(spec: &GeneralAttackSpec) -> f64 {
        let hooks = general_attack_hooks(spec);
        let k = 12;
        let mut r = ChaCha8Rng::seed_from_u64(0);
        let mut total = 0.0;
        for i in 0..k {
            for j in 0..k {
                let a = EquatorAngle::new(2.0 * PI * i as f64 / k as f64 + 0.1);
                let b = EquatorAngle::new(2.0 * PI * j as f64 / k as f64 + 0.2);
                let s = evolve(a, b, &hooks, &mut r, &mut EveLog::default()).unwrap();
                for (ka, kb) in [(a, b.bar()), (a.bar(), b)] {
                    let mut t = s.clone();
                    if let Ok(p) = t.project(2, ka.ket()) {
                        total += p * t.probability(3, kb.ket()).unwrap();
                    }
                }
            }
        }
        total / (k * k) as f64
    }

    #[test]
    fn exact_detection_probability_of_the_model() {
        for (cx, cy) in [(0.0, 0.0), (0.5, 0.5), (0.5, 0.8), (1.0, 0.0), (0.3, 0.9)] {
            let spec = GeneralAttackSpec::new(EquatorAngle::new(0.7), cx, cy, true).unwrap();
            let q = quadrature_detection(&spec);
            assert!((q - model_detection_probability(cx, cy).unwrap()).abs() < 1e-12, "{cx} {cy}");
        }
    }

    #[test]
    fn unbalanced_monte_carlo_matches_model_not_closed_form() {
        // The closed form 3/8 − (c_x² + c_y² + c_x²c_y²)/8 gives 0.24375 here;
        // the simulated attack gives 0.255.
        let spec = GeneralAttackSpec::new(EquatorAngle::new(0.2), 0.5, 0.8, true).unwrap();
        let n = 100_000;
        let p = run_attacked(&spec, n, 4);
        let model = model_detection_probability(0.5, 0.8).unwrap();
        let sigma = (model * (1.0 - model) / n as f64).sqrt();
        assert!((model - 0.255).abs() < 1e-12);
        assert!((p - model).abs() < 3.0 * sigma, "{p}");
        let closed = crate::analysis::detection_probability(0.5, 0.8).unwrap();
        assert!((closed - 0.24375).abs() < 1e-12);
        assert!((p - closed).abs() > 3.0 * sigma);
    }

    #[test]
    fn model_equals_closed_form_when_balanced() {
        for i in 0..=10 {
            let c = i as f64 / 10.0;
            let a = model_detection_probability(c, c).unwrap();
            let b = crate::analysis::detection_probability(c, c).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn sextet_overlap_closed_forms() {
        let mut r = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let theta = r.random::<f64>() * 2.0 * PI;
            let (cx, cy): (f64, f64) = (r.random(), r.random());
            let s = AncillaSextet::new(theta, cx, cy).unwrap();
            assert!((s.overlap(1, 4) - c(2.0 * (cy - cx))).norm() < 1e-12);
            assert!((s.overlap(1, 5) - c(theta.cos() * (cy - cx))).norm() < 1e-12);
            assert!((s.overlap(1, 6) + c(theta.cos() * (cy - cx))).norm() < 1e-12);
            let balanced = AncillaSextet::new(theta, cx, cx).unwrap();
            for (i, j) in [(1, 4), (1, 5), (1, 6), (4, 1), (4, 2), (4, 3)] {
                assert!(balanced.overlap(i, j).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn normalized_overlaps_bounded_by_smaller_overlap() {
        let mut r = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let theta = r.random::<f64>() * 2.0 * PI;
            let (cx, cy): (f64, f64) = (r.random(), r.random());
            let s = AncillaSextet::new(theta, cx, cy).unwrap();
            for (i, j) in [(2, 5), (3, 6), (2, 6), (3, 5)] {
                let o = s.normalized_overlap(i, j).unwrap();
                assert!(o.re >= cx.min(cy) - 1e-10, "{i}{j}: {o} < min({cx},{cy})");
            }
        }
    }

    #[test]
    fn orthogonal_ancillae_give_product_vectors() {
        let s = AncillaSextet::new(PI / 2.0, 0.0, 0.0).unwrap();
        // ε00 = |0⟩, ε11 = |1⟩: pair index = e + 2f
        let basis = |e: usize, f: usize| {
            let mut v = PairVector::zeros();
            v[e + 2 * f] = c(1.0);
            v
        };
        let half = c(0.5);
        let expect = [
            (2, basis(0, 0) * half + basis(1, 1) * half),
            (3, basis(0, 0) * half + basis(1, 1) * half),
            (5, basis(0, 1) * half + basis(1, 0) * half),
            (6, basis(0, 1) * half + basis(1, 0) * half),
        ];
        for (i, v) in expect {
            assert!((s.get(i) - v).norm() < 1e-12, "|{i}⟩");
        }
        for (i, j) in [(2, 5), (2, 6), (3, 5), (3, 6)] {
            assert!(s.overlap(i, j).norm() < 1e-12);
        }
    }
}
