//! Eve's measurement on her ancillae after the legitimate parties finish.
//!
//! For each ancilla pair Eve discriminates the two home values of the partner
//! qubit it was entangled with: (E, F) carries B, (E′, F′) carries A. The
//! conditional ensembles are averaged over the secret angle, so the
//! measurement does not depend on α or β.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::protocol::{evolve, layout as base, EveLog, Leg};
use crate::qstate::{hermitian_eigen, EquatorAngle, Outcome, StateVector};

use super::general::{general_attack_hooks, AncillaSextet, GeneralAttackSpec};

type CMatrix = DMatrix<Complex64>;

/// Angle grid used to average the conditional ancilla states; the averaged
/// quantities are trigonometric polynomials of degree ≤ 4, so 16 points are exact.
const ANGLE_GRID: usize = 16;

/// Eve's guess of the two home qubits (σ^z values before Bob's step-9 flip).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EveGuess {
    pub alice_home: Outcome,
    pub bob_home: Outcome,
}

impl EveGuess {
    /// Guess of K_{2n−1}: the key bit is 1 exactly when the homes differ.
    pub fn odd_key_bit(&self) -> bool {
        self.alice_home != self.bob_home
    }
}

/// A two-stage measurement deciding between ρ↑ and ρ↓ on a small space.
///
/// Stage one projects onto fixed vectors that each favour one hypothesis;
/// stage two is the minimum-error measurement on what remains.
#[derive(Debug, Clone)]
pub struct HomeDiscriminator {
    elements: Vec<(CMatrix, Outcome)>,
}

impl HomeDiscriminator {
    /// `rho_up` and `rho_down` are the subnormalized conditional states
    /// (their traces are the prior probabilities).
    pub fn build(rho_up: &CMatrix, rho_down: &CMatrix, stage_one: &[nalgebra::DVector<Complex64>]) -> Result<Self> {
        let d = rho_up.nrows();
        if rho_down.nrows() != d {
            return Err(Error::DimensionMismatch { left: rho_down.nrows(), right: d });
        }
        let mut elements = Vec::new();
        let mut rest = CMatrix::identity(d, d);
        for v in stage_one {
            let n = v.norm();
            if n < 1e-12 {
                continue;
            }
            let u = v / Complex64::new(n, 0.0);
            let p = &u * u.adjoint();
            let up = (&p * rho_up).trace().re;
            let down = (&p * rho_down).trace().re;
            let guess = if up >= down { Outcome::Plus } else { Outcome::Minus };
            rest -= &p;
            elements.push((p, guess));
        }
        let diff = &rest * (rho_up - rho_down) * &rest;
        let (evals, evecs) = hermitian_eigen(&diff)?;
        let mut plus = CMatrix::zeros(d, d);
        for (k, &e) in evals.iter().enumerate() {
            if e > 1e-13 {
                let v = evecs.column(k);
                plus += v * v.adjoint();
            }
        }
        let minus = &rest - &plus;
        elements.push((plus, Outcome::Plus));
        elements.push((minus, Outcome::Minus));
        Ok(HomeDiscriminator { elements })
    }

    /// Probability of a correct guess on the ensemble it was built for.
    pub fn success_probability(&self, rho_up: &CMatrix, rho_down: &CMatrix) -> f64 {
        let total = rho_up.trace().re + rho_down.trace().re;
        self.elements
            .iter()
            .map(|(m, g)| {
                let rho = if *g == Outcome::Plus { rho_up } else { rho_down };
                (m * rho).trace().re
            })
            .sum::<f64>()
            / total
    }

    pub fn elements(&self) -> &[(CMatrix, Outcome)] {
        &self.elements
    }
}

/// Eve's complete measurement for a given ancilla attack.
#[derive(Debug, Clone)]
pub struct EveStrategy {
    spec: GeneralAttackSpec,
    /// Acts on (E, F), guesses B.
    pub bob_home: HomeDiscriminator,
    /// Acts on (E′, F′), guesses A.
    pub alice_home: HomeDiscriminator,
    /// Whether stage one projected onto |1⟩ and |4⟩ (they must be orthogonal).
    pub uses_orthogonal_stage: bool,
}

/// Conditional (E,F | B) and (E′,F′ | A) states averaged over α, β ∈ grid.
pub fn conditional_ancilla_states(spec: &GeneralAttackSpec) -> Result<[[CMatrix; 2]; 2]> {
    use super::general::layout::{E, E_PRIME, F, F_PRIME};
    let hooks = general_attack_hooks(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut acc = [[CMatrix::zeros(4, 4), CMatrix::zeros(4, 4)], [CMatrix::zeros(4, 4), CMatrix::zeros(4, 4)]];
    for k in 0..ANGLE_GRID {
        let angle = EquatorAngle::new(TAU * k as f64 / ANGLE_GRID as f64);
        let s = evolve(angle, angle, &hooks, &mut rng, &mut EveLog::default())?;
        for (slot, home, pair) in [(0, base::B, [E, F]), (1, base::A, [E_PRIME, F_PRIME])] {
            let rho = s.reduced_density(&[home, pair[0], pair[1]])?;
            for value in 0..2 {
                let block = CMatrix::from_fn(4, 4, |r, c| rho.matrix()[(value + 2 * r, value + 2 * c)]);
                acc[slot][value] += block / Complex64::new(ANGLE_GRID as f64, 0.0);
            }
        }
    }
    Ok(acc)
}

impl EveStrategy {
    pub fn for_spec(spec: &GeneralAttackSpec) -> Result<Self> {
        let [bob, alice] = conditional_ancilla_states(spec)?;
        let (pcx, pcy) = spec.primed_overlaps();
        let stage = |cx: f64, cy: f64| -> Result<Vec<nalgebra::DVector<Complex64>>> {
            // |1⟩ and |4⟩ do not depend on the angle
            let s = AncillaSextet::new(0.0, cx, cy)?;
            if s.overlap(1, 4).norm() < 1e-12 {
                Ok([1, 4].iter().map(|&i| nalgebra::DVector::from_column_slice(s.get(i).as_slice())).collect())
            } else {
                Ok(Vec::new())
            }
        };
        let stage_bob = stage(spec.overlap_c_x(), spec.overlap_c_y())?;
        let stage_alice = stage(pcx, pcy)?;
        Ok(EveStrategy {
            spec: *spec,
            uses_orthogonal_stage: !stage_bob.is_empty(),
            bob_home: HomeDiscriminator::build(&bob[0], &bob[1], &stage_bob)?,
            alice_home: HomeDiscriminator::build(&alice[0], &alice[1], &stage_alice)?,
        })
    }

    pub fn spec(&self) -> &GeneralAttackSpec {
        &self.spec
    }
}

/// Samples Eve's joint measurement on (E, F, E′, F′) of a post-round register.
pub fn eve_infer_keys<R: Rng + ?Sized>(
    state: &StateVector,
    log: &EveLog,
    strategy: &EveStrategy,
    rng: &mut R,
) -> Result<EveGuess> {
    let q = |leg| log.ancilla(leg).ok_or_else(|| Error::State(format!("no ancilla on leg {leg}")));
    let keep = [q(Leg::CForward)?, q(Leg::CReturn)?, q(Leg::DForward)?, q(Leg::DReturn)?];
    let rho = state.reduced_density(&keep)?;
    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    let mut last = None;
    for (mb, gb) in strategy.bob_home.elements() {
        for (ma, ga) in strategy.alice_home.elements() {
            // reduced index = ef + 4·e′f′, so the (E′,F′) factor is the high one
            let joint = ma.kronecker(mb);
            cumulative += rho.expectation(&joint)?.re;
            let guess = EveGuess { alice_home: *ga, bob_home: *gb };
            if u < cumulative {
                return Ok(guess);
            }
            last = Some(guess);
        }
    }
    last.ok_or_else(|| Error::State("empty measurement".into()))
}
