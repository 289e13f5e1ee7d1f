//! Benchmarks live in `benches/`; this library only holds shared fixtures.

use faraday_qkd::adversary::GeneralAttackSpec;
use faraday_qkd::EquatorAngle;

pub fn balanced_spec(c: f64) -> GeneralAttackSpec {
    GeneralAttackSpec::balanced(EquatorAngle::new(0.7), c).expect("overlap in [0, 1]")
}
