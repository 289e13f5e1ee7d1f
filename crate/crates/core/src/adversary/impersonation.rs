//! Impersonation: Eve cuts the channel and plays each party's partner.

use rand::Rng;

use crate::error::{Error, Result};
use crate::protocol::run_round;
use crate::qstate::{EquatorAngle, Outcome, StateVector};

/// Register of the one-home scenario: homes A, B, E then travel qubits C, D, E′.
pub mod layout {
    pub const A: usize = 0;
    pub const B: usize = 1;
    pub const E: usize = 2;
    pub const C: usize = 3;
    pub const D: usize = 4;
    pub const E_PRIME: usize = 5;
}

/// Odd key bits of one impersonated round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImpersonationRound {
    pub alice: bool,
    pub bob: bool,
    /// Eve's bit from her exchange with Alice.
    pub eve_with_alice: bool,
    /// Eve's bit from her exchange with Bob, when she runs one.
    pub eve_with_bob: Option<bool>,
}

impl ImpersonationRound {
    pub fn detected(&self) -> bool {
        self.alice != self.bob
    }
}

/// Eve keeps two homes and runs an honest session with each party.
pub fn two_homes_round<R: Rng>(round_index: u64, rng: &mut R) -> Result<ImpersonationRound> {
    let with_alice = run_round(round_index, rng, &[])?;
    let with_bob = run_round(round_index, rng, &[])?;
    Ok(ImpersonationRound {
        alice: with_alice.alice.first,
        bob: with_bob.bob.first,
        eve_with_alice: with_alice.bob.first,
        eve_with_bob: Some(with_bob.alice.first),
    })
}

/// The one-home register just before the travel-qubit measurements.
///
/// C: U_{A;C} then U_{E;C}. D: U_{B;D} then U_{E;D}. E′: U_{E;E′} then U_{A;E′}.
pub fn one_home_state(alpha: EquatorAngle, beta: EquatorAngle, epsilon: EquatorAngle) -> StateVector {
    use layout::*;
    let home = StateVector::equator(EquatorAngle::ZERO);
    let mut s = StateVector::product(&[
        home.clone(),
        home.clone(),
        home,
        StateVector::equator(alpha),
        StateVector::equator(beta),
        StateVector::equator(epsilon),
    ])
    .expect("six qubits fit the register");
    for (h, t) in [(A, C), (E, C), (B, D), (E, D), (E, E_PRIME), (A, E_PRIME)] {
        s.apply_qfr(h, t).expect("valid qubit pair");
    }
    s
}

pub fn one_home_round<R: Rng>(rng: &mut R) -> Result<ImpersonationRound> {
    let alpha = EquatorAngle::random(rng);
    let beta = EquatorAngle::random(rng);
    let epsilon = EquatorAngle::random(rng);
    let mut s = one_home_state(alpha, beta, epsilon);
    let plus = |o: Outcome| o == Outcome::Plus;
    let alice = plus(s.measure_equator(layout::C, alpha, rng)?);
    let bob = plus(s.measure_equator(layout::D, beta, rng)?);
    let eve = plus(s.measure_equator(layout::E_PRIME, epsilon, rng)?);
    Ok(ImpersonationRound { alice, bob, eve_with_alice: eve, eve_with_bob: None })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImpersonationReport {
    pub compared_bits: usize,
    pub mismatches: usize,
    pub detection_frequency: f64,
    pub detection_sigma: f64,
    pub eve_alice_agreement: f64,
    pub eve_bob_agreement: Option<f64>,
    /// Pearson correlation of Alice's and Bob's odd bits.
    pub alice_bob_correlation: f64,
}

impl ImpersonationReport {
    pub fn from_rounds(rounds: &[ImpersonationRound]) -> Result<Self> {
        let n = rounds.len();
        if n == 0 {
            return Err(Error::arg("no rounds to summarize"));
        }
        let nf = n as f64;
        let mismatches = rounds.iter().filter(|r| r.detected()).count();
        let p = mismatches as f64 / nf;
        let frac = |f: &dyn Fn(&ImpersonationRound) -> bool| rounds.iter().filter(|r| f(r)).count() as f64 / nf;
        let eve_bob_agreement = rounds
            .iter()
            .all(|r| r.eve_with_bob.is_some())
            .then(|| frac(&|r| r.eve_with_bob == Some(r.bob)));
        Ok(ImpersonationReport {
            compared_bits: n,
            mismatches,
            detection_frequency: p,
            detection_sigma: (p * (1.0 - p) / nf).sqrt(),
            eve_alice_agreement: frac(&|r| r.eve_with_alice == r.alice),
            eve_bob_agreement,
            alice_bob_correlation: correlation(rounds),
        })
    }
}

fn correlation(rounds: &[ImpersonationRound]) -> f64 {
    let n = rounds.len() as f64;
    let x: Vec<f64> = rounds.iter().map(|r| f64::from(u8::from(r.alice))).collect();
    let y: Vec<f64> = rounds.iter().map(|r| f64::from(u8::from(r.bob))).collect();
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let cov: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        0.0
    } else {
        cov / (vx * vy).sqrt()
    }
}

pub fn impersonation_two_homes<R: Rng>(rng: &mut R, rounds: usize) -> Result<ImpersonationReport> {
    let rs = (0..rounds as u64).map(|i| two_homes_round(i, rng)).collect::<Result<Vec<_>>>()?;
    ImpersonationReport::from_rounds(&rs)
}

pub fn impersonation_one_home<R: Rng>(rng: &mut R, rounds: usize) -> Result<ImpersonationReport> {
    let rs = (0..rounds).map(|_| one_home_round(rng)).collect::<Result<Vec<_>>>()?;
    ImpersonationReport::from_rounds(&rs)
}
