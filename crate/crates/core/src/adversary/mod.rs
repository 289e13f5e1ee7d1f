//! Eavesdropping models: ancilla-coupling attacks, intercept-and-resend,
//! impersonation and photon-number splitting, plus Eve's inference.

pub mod eve;
pub mod general;
pub mod impersonation;
pub mod intercept;
pub mod pns;

pub use eve::{eve_infer_keys, EveGuess, EveStrategy, HomeDiscriminator};
pub use general::{
    build_subspace_decomposition, general_attack_hooks, leg_basis, make_ancilla_pair,
    model_detection_probability, relative_angle, AncillaProbe, AncillaSextet,
    EveSubspaceDecomposition, GeneralAttackSpec, PairVector,
};
pub use impersonation::{
    impersonation_one_home, impersonation_two_homes, one_home_round, one_home_state,
    two_homes_round, ImpersonationReport, ImpersonationRound,
};
pub use intercept::{intercept_guess, intercept_resend_hooks, InterceptResend};
pub use pns::{
    pns_build, pns_leakage, pns_round, EveAccess, PnsLayout, PnsLeakageReport, PnsRound,
    PnsScenario, PnsVariant,
};
