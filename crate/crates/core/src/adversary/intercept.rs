//! Intercept-and-resend: Eve measures every travel qubit and forwards the
//! collapsed state. Each leg uses the same bases as the ancilla attack.

use crate::error::Result;
use crate::protocol::{ChannelHook, EveLog, HookList, Leg, Tap};
use crate::qstate::{EquatorAngle, Outcome, StateVector};

use super::eve::EveGuess;
use super::general::leg_basis;

#[derive(Debug, Clone, PartialEq)]
pub struct InterceptResend {
    leg: Leg,
    basis: EquatorAngle,
}

impl InterceptResend {
    pub fn new(leg: Leg, basis: EquatorAngle) -> Self {
        InterceptResend { leg, basis }
    }
}

impl ChannelHook for InterceptResend {
    fn leg(&self) -> Leg {
        self.leg
    }

    fn transform(&self, state: &mut StateVector, tap: &mut Tap<'_>) -> Result<()> {
        let outcome = state.measure_equator(self.leg.travel_qubit(), self.basis, &mut *tap.rng)?;
        tap.log.outcomes.push((self.leg, outcome));
        Ok(())
    }
}

pub fn intercept_resend_hooks(gamma: EquatorAngle) -> HookList {
    Leg::ALL
        .iter()
        .map(|&leg| Box::new(InterceptResend::new(leg, leg_basis(leg, gamma))) as Box<dyn ChannelHook>)
        .collect()
}

/// Equal labels on the two crossings of C mean B was ↑; likewise D and A.
pub fn intercept_guess(log: &EveLog) -> Option<EveGuess> {
    let home = |first: Leg, second: Leg| -> Option<Outcome> {
        let same = log.outcome(first)? == log.outcome(second)?;
        Some(if same { Outcome::Plus } else { Outcome::Minus })
    };
    Some(EveGuess {
        bob_home: home(Leg::CForward, Leg::CReturn)?,
        alice_home: home(Leg::DForward, Leg::DReturn)?,
    })
}
