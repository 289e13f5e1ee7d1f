//! The twelve-step protocol: one round is steps 1–10, verification is step 12.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::qstate::{EquatorAngle, Outcome, StateVector};

/// Register positions of the honest protocol. Adversary ancillae are
/// appended after [`layout::BASE_QUBITS`] in the order the hooks run.
pub mod layout {
    pub const A: usize = 0;
    pub const B: usize = 1;
    pub const C: usize = 2;
    pub const D: usize = 3;
    pub const BASE_QUBITS: usize = 4;
}

/// The four channel crossings of a round, in protocol order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Leg {
    /// C on its way from Alice to Bob (step 3).
    CForward,
    /// C on its way back to Alice (step 4).
    CReturn,
    /// D on its way from Bob to Alice (step 6).
    DForward,
    /// D on its way back to Bob (step 7).
    DReturn,
}

impl Leg {
    pub const ALL: [Leg; 4] = [Leg::CForward, Leg::CReturn, Leg::DForward, Leg::DReturn];

    pub fn travel_qubit(self) -> usize {
        match self {
            Leg::CForward | Leg::CReturn => layout::C,
            Leg::DForward | Leg::DReturn => layout::D,
        }
    }

    /// First crossing of the travel qubit (as opposed to its return).
    pub fn is_forward(self) -> bool {
        matches!(self, Leg::CForward | Leg::DForward)
    }
}

impl fmt::Display for Leg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Leg::CForward => "C:A->B",
            Leg::CReturn => "C:B->A",
            Leg::DForward => "D:B->A",
            Leg::DReturn => "D:A->B",
        })
    }
}

/// What an eavesdropper leaves behind during one round.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EveLog {
    /// Register index of each ancilla appended, with the leg that appended it.
    pub ancillae: Vec<(Leg, usize)>,
    /// Outcomes of measurements made directly on travel qubits.
    pub outcomes: Vec<(Leg, Outcome)>,
}

impl EveLog {
    pub fn ancilla(&self, leg: Leg) -> Option<usize> {
        self.ancillae.iter().find(|(l, _)| *l == leg).map(|(_, q)| *q)
    }

    pub fn outcome(&self, leg: Leg) -> Option<Outcome> {
        self.outcomes.iter().find(|(l, _)| *l == leg).map(|(_, o)| *o)
    }
}

/// Randomness and bookkeeping handed to a hook.
pub struct Tap<'a> {
    pub rng: &'a mut dyn RngCore,
    pub log: &'a mut EveLog,
}

/// A channel transformation applied while a travel qubit crosses `leg`.
///
/// Implementations must act as isometries on the register; they may append
/// ancillae but must not reorder existing qubits.
pub trait ChannelHook: Send + Sync + fmt::Debug {
    fn leg(&self) -> Leg;
    fn transform(&self, state: &mut StateVector, tap: &mut Tap<'_>) -> Result<()>;
}

pub type HookList = Vec<Box<dyn ChannelHook>>;

/// Points at which [`evolve_observed`] reports the register, each taken just
/// before the travel qubit enters the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Step3,
    Step4,
    Step6,
    Step7,
}

/// Key bits produced by one party in one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KeyBits {
    /// K_{2n−1}, from the travel-qubit measurement.
    pub first: bool,
    /// K_{2n}, from the home-qubit σ^z measurement.
    pub second: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTranscript {
    pub round_index: u64,
    pub alpha: EquatorAngle,
    pub beta: EquatorAngle,
    pub outcome_alice_c: Outcome,
    pub outcome_bob_d: Outcome,
    pub outcome_alice_a_z: Outcome,
    /// Measured after Bob's step-9 correction.
    pub outcome_bob_b_z: Outcome,
    pub alice: KeyBits,
    pub bob: KeyBits,
    pub used_for_test: bool,
}

impl RoundTranscript {
    pub fn first_bits_differ(&self) -> bool {
        self.alice.first != self.bob.first
    }

    pub fn keys_agree(&self) -> bool {
        self.alice == self.bob
    }

    /// σ^z of B before the step-9 flip.
    pub fn bob_home_before_correction(&self) -> Outcome {
        if self.bob.first {
            self.outcome_bob_b_z.flipped()
        } else {
            self.outcome_bob_b_z
        }
    }
}

/// Full record of one round, including the final register.
#[derive(Debug, Clone)]
pub struct RoundRecord {
    pub transcript: RoundTranscript,
    /// Register after all measurements (collapsed).
    pub state: StateVector,
    pub eve: EveLog,
}

/// Steps 1–2 and 5: |0⟩_A |0⟩_B |α⟩_C |β⟩_D.
pub fn initial_state(alpha: EquatorAngle, beta: EquatorAngle) -> StateVector {
    let home = StateVector::equator(EquatorAngle::ZERO);
    StateVector::product(&[
        home.clone(),
        home,
        StateVector::equator(alpha),
        StateVector::equator(beta),
    ])
    .expect("four qubits fit the register")
}

/// The (A, C) state on the A→B leg, with A as qubit 0 and C as qubit 1.
pub fn state_after_step3(alpha: EquatorAngle) -> StateVector {
    let mut s = StateVector::equator(EquatorAngle::ZERO)
        .tensor(&StateVector::equator(alpha))
        .expect("two qubits fit the register");
    s.apply_qfr(0, 1).expect("valid qubit pair");
    s
}

/// Steps 3–7 with the given hooks. Returns the register entering step 8.
pub fn evolve<R: Rng>(
    alpha: EquatorAngle,
    beta: EquatorAngle,
    hooks: &[Box<dyn ChannelHook>],
    rng: &mut R,
    eve: &mut EveLog,
) -> Result<StateVector> {
    evolve_observed(alpha, beta, hooks, rng, eve, &mut |_, _| {})
}

pub fn evolve_observed<R: Rng>(
    alpha: EquatorAngle,
    beta: EquatorAngle,
    hooks: &[Box<dyn ChannelHook>],
    rng: &mut R,
    eve: &mut EveLog,
    observer: &mut dyn FnMut(Stage, &StateVector),
) -> Result<StateVector> {
    use layout::{A, B, C, D};
    let mut state = initial_state(alpha, beta);
    let steps = [
        (A, C, Stage::Step3, Leg::CForward),
        (B, C, Stage::Step4, Leg::CReturn),
        (B, D, Stage::Step6, Leg::DForward),
        (A, D, Stage::Step7, Leg::DReturn),
    ];
    for (home, travel, stage, leg) in steps {
        state.apply_qfr(home, travel)?;
        observer(stage, &state);
        for hook in hooks.iter().filter(|h| h.leg() == leg) {
            let mut tap = Tap { rng: &mut *rng, log: &mut *eve };
            hook.transform(&mut state, &mut tap)?;
        }
    }
    Ok(state)
}

/// Steps 8–10 on a register whose first four qubits are A, B, C, D.
pub fn measure_round<R: Rng + ?Sized>(
    round_index: u64,
    alpha: EquatorAngle,
    beta: EquatorAngle,
    state: &mut StateVector,
    rng: &mut R,
) -> Result<RoundTranscript> {
    use layout::{A, B, C, D};
    let outcome_alice_c = state.measure_equator(C, alpha, rng)?;
    let outcome_bob_d = state.measure_equator(D, beta, rng)?;
    let alice_first = outcome_alice_c == Outcome::Plus;
    let bob_first = outcome_bob_d == Outcome::Plus;
    if bob_first {
        state.apply_pauli_x(B)?;
    }
    let outcome_alice_a_z = state.measure_z(A, rng)?;
    let outcome_bob_b_z = state.measure_z(B, rng)?;
    Ok(RoundTranscript {
        round_index,
        alpha,
        beta,
        outcome_alice_c,
        outcome_bob_d,
        outcome_alice_a_z,
        outcome_bob_b_z,
        alice: KeyBits { first: alice_first, second: outcome_alice_a_z == Outcome::Minus },
        bob: KeyBits { first: bob_first, second: outcome_bob_b_z == Outcome::Minus },
        used_for_test: false,
    })
}

/// One complete round (steps 1–10); α and β are drawn first, in that order.
pub fn execute_round<R: Rng>(
    round_index: u64,
    rng: &mut R,
    hooks: &[Box<dyn ChannelHook>],
) -> Result<RoundRecord> {
    let alpha = EquatorAngle::random(rng);
    let beta = EquatorAngle::random(rng);
    let mut eve = EveLog::default();
    let mut state = evolve(alpha, beta, hooks, rng, &mut eve)?;
    let transcript = measure_round(round_index, alpha, beta, &mut state, rng)?;
    Ok(RoundRecord { transcript, state, eve })
}

pub fn run_round<R: Rng>(
    round_index: u64,
    rng: &mut R,
    hooks: &[Box<dyn ChannelHook>],
) -> Result<RoundTranscript> {
    execute_round(round_index, rng, hooks).map(|r| r.transcript)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub detected: bool,
    pub mismatches: usize,
    /// Positions in the transcript slice, ascending.
    pub tested: Vec<usize>,
}

/// Step 12: compares `m` randomly chosen K_{2k−1} bits and marks those rounds.
pub fn verify_keys<R: Rng + ?Sized>(
    transcripts: &mut [RoundTranscript],
    m: usize,
    rng: &mut R,
) -> Result<Verification> {
    if m > transcripts.len() {
        return Err(Error::arg(format!(
            "cannot test {m} bits out of {} rounds",
            transcripts.len()
        )));
    }
    let mut tested = rand::seq::index::sample(rng, transcripts.len(), m).into_vec();
    tested.sort_unstable();
    let mut mismatches = 0;
    for &i in &tested {
        transcripts[i].used_for_test = true;
        mismatches += usize::from(transcripts[i].first_bits_differ());
    }
    Ok(Verification { detected: mismatches > 0, mismatches, tested })
}

/// Both parties' raw keys plus the tested positions.
///
/// Key positions are 1-based as in K_1 … K_{2N}; tested positions are odd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyLedger {
    alice_key: Vec<bool>,
    bob_key: Vec<bool>,
    test_indices: BTreeSet<usize>,
    detected: bool,
}

impl KeyLedger {
    pub fn new(
        alice_key: Vec<bool>,
        bob_key: Vec<bool>,
        test_indices: BTreeSet<usize>,
        detected: bool,
    ) -> Result<Self> {
        if alice_key.len() != bob_key.len() || alice_key.len() % 2 != 0 {
            return Err(Error::arg("keys must have equal, even length"));
        }
        if let Some(bad) = test_indices.iter().find(|&&k| k % 2 == 0 || k > alice_key.len()) {
            return Err(Error::arg(format!("test index {bad} is not an odd key position")));
        }
        Ok(KeyLedger { alice_key, bob_key, test_indices, detected })
    }

    pub fn from_transcripts(transcripts: &[RoundTranscript], verification: &Verification) -> Self {
        let flatten = |pick: fn(&RoundTranscript) -> KeyBits| {
            transcripts.iter().flat_map(|t| [pick(t).first, pick(t).second]).collect()
        };
        KeyLedger {
            alice_key: flatten(|t| t.alice),
            bob_key: flatten(|t| t.bob),
            test_indices: verification.tested.iter().map(|&i| 2 * i + 1).collect(),
            detected: verification.detected,
        }
    }

    pub fn alice_key(&self) -> &[bool] {
        &self.alice_key
    }

    pub fn bob_key(&self) -> &[bool] {
        &self.bob_key
    }

    pub fn test_indices(&self) -> &BTreeSet<usize> {
        &self.test_indices
    }

    pub fn detected(&self) -> bool {
        self.detected
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinalKeys {
    pub alice: Vec<bool>,
    pub bob: Vec<bool>,
}

/// Drops every tested K_{2k−1} together with its partner K_{2k}.
pub fn final_key(ledger: &KeyLedger) -> Result<FinalKeys> {
    if ledger.detected {
        return Err(Error::State("verification detected an attack; no key is issued".into()));
    }
    let keep = |key: &[bool]| {
        key.iter()
            .enumerate()
            .filter(|(i, _)| {
                let odd_position = i - i % 2 + 1;
                !ledger.test_indices.contains(&odd_position)
            })
            .map(|(_, &b)| b)
            .collect()
    };
    Ok(FinalKeys { alice: keep(&ledger.alice_key), bob: keep(&ledger.bob_key) })
}
