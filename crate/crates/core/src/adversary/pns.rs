//! Photon-number splitting: each travel pulse carries extra photons in the
//! same polarization state, and Eve siphons copies off at the interception
//! points. Each siphoned photon is rotated by +π/2 about z before storage.
//!
//! Eve waits for the legitimate measurements, then discriminates her
//! conditional states for the two key values. The discrimination is
//! information-theoretic (optimal for the actual α, β), which bounds what any
//! physical test, such as an interferometric comparison of photon pairs, can do.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::qstate::{hermitian_eigen, trace_distance, EquatorAngle, Outcome, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PnsVariant {
    /// Three-photon pulses against the two-home protocol.
    ThreePhoton,
    /// Three-photon pulses against the four-home variant of the protocol.
    FourHome,
}

/// Which qubits play which role in a PNS register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PnsLayout {
    pub alice_homes: Vec<usize>,
    pub bob_homes: Vec<usize>,
    pub c: usize,
    pub d: usize,
    /// E1, E2, E1′, E2′.
    pub eve: [usize; 4],
}

impl PnsLayout {
    /// A 0, B 1, C 2, D 3, E1 4, E2 5, E1′ 6, E2′ 7. C, E1 and E1′ share the
    /// α pulse; D, E2 and E2′ share the β pulse.
    pub fn three_photon() -> Self {
        PnsLayout { alice_homes: vec![0], bob_homes: vec![1], c: 2, d: 3, eve: [4, 5, 6, 7] }
    }

    /// A1 0, A2 1, B1 2, B2 3, C 4, D 5, E1 6, E2 7, E1′ 8, E2′ 9. C, E1 and
    /// E2 share the α pulse; D, E1′ and E2′ share the β pulse.
    pub fn four_home() -> Self {
        PnsLayout { alice_homes: vec![0, 1], bob_homes: vec![2, 3], c: 4, d: 5, eve: [6, 7, 8, 9] }
    }

    pub fn homes(&self) -> Vec<usize> {
        self.alice_homes.iter().chain(&self.bob_homes).copied().collect()
    }

    pub fn num_qubits(&self) -> usize {
        self.alice_homes.len() + self.bob_homes.len() + 6
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PnsScenario {
    pub variant: PnsVariant,
    pub alpha: EquatorAngle,
    pub beta: EquatorAngle,
    pub layout: PnsLayout,
    /// Register before Alice and Bob measure.
    pub state: StateVector,
}

fn qfr_all(s: &mut StateVector, home: usize, targets: &[usize]) {
    for &t in targets {
        s.apply_qfr(home, t).expect("valid qubit pair");
    }
}

fn siphon(s: &mut StateVector, photon: usize) {
    s.rotate_equator(photon, FRAC_PI_2).expect("valid qubit");
}

pub fn pns_build(variant: PnsVariant, alpha: EquatorAngle, beta: EquatorAngle) -> PnsScenario {
    let layout = match variant {
        PnsVariant::ThreePhoton => PnsLayout::three_photon(),
        PnsVariant::FourHome => PnsLayout::four_home(),
    };
    let home = StateVector::equator(EquatorAngle::ZERO);
    let (a, b) = (StateVector::equator(alpha), StateVector::equator(beta));
    let state = match variant {
        PnsVariant::ThreePhoton => {
            let [e1, e2, e1p, e2p] = layout.eve;
            let (ha, hb, c, d) = (0, 1, layout.c, layout.d);
            let mut s = StateVector::product(&[home.clone(), home, a.clone(), b.clone(), a.clone(), b.clone(), a, b])
                .expect("eight qubits fit the register");
            // Alice's pulse: E1 taken on the way to Bob, E1′ on the way back
            qfr_all(&mut s, ha, &[c, e1, e1p]);
            siphon(&mut s, e1);
            qfr_all(&mut s, hb, &[c, e1p]);
            // Bob's pulse: E2 taken on the way to Alice, E2′ on the way back
            qfr_all(&mut s, hb, &[d, e2, e2p]);
            siphon(&mut s, e2);
            qfr_all(&mut s, ha, &[d, e2p]);
            s
        }
        PnsVariant::FourHome => {
            let [e1, e2, e1p, e2p] = layout.eve;
            let (a1, a2, b1, b2, c, d) = (0, 1, 2, 3, layout.c, layout.d);
            let mut factors = vec![home; 4];
            factors.extend([a.clone(), b.clone(), a.clone(), a, b.clone(), b]);
            let mut s = StateVector::product(&factors).expect("ten qubits fit the register");
            // Alice's pulse: A1 → (E2 taken) → B1, B2 → (E1 taken) → A2
            qfr_all(&mut s, a1, &[c, e1, e2]);
            siphon(&mut s, e2);
            qfr_all(&mut s, b1, &[c, e1]);
            qfr_all(&mut s, b2, &[c, e1]);
            siphon(&mut s, e1);
            qfr_all(&mut s, a2, &[c]);
            // Bob's pulse: B1 → (E2′ taken) → A1, A2 → (E1′ taken) → B2
            qfr_all(&mut s, b1, &[d, e1p, e2p]);
            siphon(&mut s, e2p);
            qfr_all(&mut s, a1, &[d, e1p]);
            qfr_all(&mut s, a2, &[d, e1p]);
            siphon(&mut s, e1p);
            qfr_all(&mut s, b2, &[d]);
            s
        }
    };
    PnsScenario { variant, alpha, beta, layout, state }
}

/// How much of the siphoned light Eve gets to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EveAccess {
    AllPhotons,
    /// Control case: Eve's photons are discarded and she guesses blindly.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PnsRound {
    pub alpha: EquatorAngle,
    pub beta: EquatorAngle,
    pub alice_key: bool,
    pub bob_key: bool,
    pub eve_guess: bool,
    /// Trace distance between Eve's states conditioned on Alice's key bit.
    pub trace_distance: f64,
}

impl PnsScenario {
    /// Eve's reduced state and its probability, given Alice's outcome on C.
    fn eve_branch(&self, key: bool) -> Result<(f64, DMatrix<Complex64>)> {
        let mut s = self.state.clone();
        let ket = if key { self.alpha.ket() } else { self.alpha.bar().ket() };
        match s.project(self.layout.c, ket) {
            Ok(p) => Ok((p, s.reduced_density(&self.layout.eve)?.matrix() * Complex64::new(p, 0.0))),
            Err(Error::State(_)) => {
                let d = 1 << self.layout.eve.len();
                Ok((0.0, DMatrix::zeros(d, d)))
            }
            Err(e) => Err(e),
        }
    }
}

pub fn pns_round<R: Rng>(variant: PnsVariant, access: EveAccess, rng: &mut R) -> Result<PnsRound> {
    let alpha = EquatorAngle::random(rng);
    let beta = EquatorAngle::random(rng);
    let scenario = pns_build(variant, alpha, beta);
    let (p1, w1) = scenario.eve_branch(true)?;
    let (p0, w0) = scenario.eve_branch(false)?;
    let normalize = |p: f64, w: &DMatrix<Complex64>| {
        if p > 0.0 { w / Complex64::new(p, 0.0) } else { w.clone() }
    };
    let distance = trace_distance(
        &crate::qstate::DensityMatrix::from_matrix(normalize(p0, &w0))?,
        &crate::qstate::DensityMatrix::from_matrix(normalize(p1, &w1))?,
    )?;
    // Helstrom: guess 1 on the positive part of p1ρ1 − p0ρ0
    let (evals, evecs) = hermitian_eigen(&(&w1 - &w0))?;
    let d = w1.nrows();
    let mut guess_one = DMatrix::<Complex64>::zeros(d, d);
    for (k, &e) in evals.iter().enumerate() {
        if e > 0.0 {
            let v = evecs.column(k);
            guess_one += v * v.adjoint();
        }
    }

    let mut s = scenario.state;
    let plus = |o: Outcome| o == Outcome::Plus;
    let alice_key = plus(s.measure_equator(scenario.layout.c, alpha, rng)?);
    let bob_key = plus(s.measure_equator(scenario.layout.d, beta, rng)?);
    let eve_guess = match access {
        EveAccess::AllPhotons => {
            let rho = s.reduced_density(&scenario.layout.eve)?;
            rng.random::<f64>() < rho.expectation(&guess_one)?.re
        }
        EveAccess::None => rng.random::<bool>(),
    };
    Ok(PnsRound { alpha, beta, alice_key, bob_key, eve_guess, trace_distance: distance })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PnsLeakageReport {
    pub rounds: usize,
    pub eve_key_accuracy: f64,
    pub detection_frequency: f64,
    pub trace_distance_min: f64,
    pub trace_distance_max: f64,
}

impl PnsLeakageReport {
    pub fn from_rounds(rounds: &[PnsRound]) -> Result<Self> {
        if rounds.is_empty() {
            return Err(Error::arg("no rounds to summarize"));
        }
        let n = rounds.len() as f64;
        let frac = |f: &dyn Fn(&PnsRound) -> bool| rounds.iter().filter(|r| f(r)).count() as f64 / n;
        Ok(PnsLeakageReport {
            rounds: rounds.len(),
            eve_key_accuracy: frac(&|r| r.eve_guess == r.alice_key),
            detection_frequency: frac(&|r| r.alice_key != r.bob_key),
            trace_distance_min: rounds.iter().map(|r| r.trace_distance).fold(f64::INFINITY, f64::min),
            trace_distance_max: rounds.iter().map(|r| r.trace_distance).fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

pub fn pns_leakage<R: Rng>(
    variant: PnsVariant,
    access: EveAccess,
    rng: &mut R,
    rounds: usize,
) -> Result<PnsLeakageReport> {
    let rs = (0..rounds).map(|_| pns_round(variant, access, rng)).collect::<Result<Vec<_>>>()?;
    PnsLeakageReport::from_rounds(&rs)
}
