//! Runs N independent rounds of a scenario and aggregates them.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::adversary::{
    eve_infer_keys, general_attack_hooks, intercept_guess, intercept_resend_hooks, one_home_round,
    pns_round, two_homes_round, EveAccess, EveGuess, EveStrategy, GeneralAttackSpec, PnsVariant,
};
use crate::analysis::{contingency, empirical_mutual_information};
use crate::error::{Error, Result};
use crate::protocol::{execute_round, HookList, RoundRecord};
use crate::qstate::EquatorAngle;

use super::config::{AttackSpec, ExperimentConfig, GammaChoice};
use super::csv::CsvTable;
use super::rng::{round_rng, verification_rng};

pub const ROUND_COLUMNS: [&str; 10] = [
    "round", "alpha", "beta", "alice_odd", "alice_even", "bob_odd", "bob_even", "eve_odd", "eve_home_hits",
    "tested",
];

/// Placeholder written to the CSV for quantities a scenario does not produce.
pub const ABSENT: f64 = -1.0;

/// One round as it appears in the per-round CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRow {
    pub round: u64,
    pub alpha: Option<EquatorAngle>,
    pub beta: Option<EquatorAngle>,
    pub alice_odd: bool,
    pub alice_even: Option<bool>,
    pub bob_odd: bool,
    pub bob_even: Option<bool>,
    /// Eve's guess of Alice's K_{2n−1}.
    pub eve_odd: Option<bool>,
    /// How many of the two home qubits Eve guessed right.
    pub eve_home_hits: Option<u8>,
    pub trace_distance: Option<f64>,
    pub tested: bool,
}

impl RoundRow {
    fn values(&self) -> [f64; 10] {
        let bit = |b: bool| f64::from(u8::from(b));
        let opt_bit = |b: Option<bool>| b.map_or(ABSENT, bit);
        [
            self.round as f64,
            self.alpha.map_or(ABSENT, |a| a.radians()),
            self.beta.map_or(ABSENT, |b| b.radians()),
            bit(self.alice_odd),
            opt_bit(self.alice_even),
            bit(self.bob_odd),
            opt_bit(self.bob_even),
            opt_bit(self.eve_odd),
            self.eve_home_hits.map_or(ABSENT, f64::from),
            bit(self.tested),
        ]
    }

    fn from_record(rec: &RoundRecord, guess: Option<EveGuess>) -> Self {
        let t = &rec.transcript;
        let hits = guess.map(|g| {
            u8::from(g.alice_home == t.outcome_alice_a_z) + u8::from(g.bob_home == t.bob_home_before_correction())
        });
        RoundRow {
            round: t.round_index,
            alpha: Some(t.alpha),
            beta: Some(t.beta),
            alice_odd: t.alice.first,
            alice_even: Some(t.alice.second),
            bob_odd: t.bob.first,
            bob_even: Some(t.bob.second),
            eve_odd: guess.map(|g| g.odd_key_bit()),
            eve_home_hits: hits,
            trace_distance: None,
            tested: false,
        }
    }
}

pub fn rows_table(rows: &[RoundRow]) -> Result<CsvTable> {
    let mut t = CsvTable::new(ROUND_COLUMNS)?;
    for r in rows {
        t.push_row(&r.values())?;
    }
    Ok(t)
}

/// Per-run data shared read-only by all workers.
enum Plan {
    Honest,
    General { spec: GeneralAttackSpec, per_round_gamma: bool, hooks: HookList, strategy: EveStrategy },
    Intercept { gamma: GammaChoice, hooks: HookList },
    ImpersonateOneHome,
    ImpersonateTwoHomes,
    Pns(PnsVariant),
}

impl Plan {
    fn new(attack: &AttackSpec) -> Result<Self> {
        Ok(match *attack {
            AttackSpec::None => Plan::Honest,
            AttackSpec::General { c_x, c_y, gamma } => {
                let fixed = match gamma {
                    GammaChoice::Fixed(g) => g,
                    GammaChoice::PerRound => EquatorAngle::ZERO,
                };
                let spec = GeneralAttackSpec::new(fixed, c_x, c_y, true)?;
                Plan::General {
                    spec,
                    per_round_gamma: gamma == GammaChoice::PerRound,
                    hooks: general_attack_hooks(&spec),
                    strategy: EveStrategy::for_spec(&spec)?,
                }
            }
            AttackSpec::Intercept { gamma } => {
                let g = if let GammaChoice::Fixed(g) = gamma { g } else { EquatorAngle::ZERO };
                Plan::Intercept { gamma, hooks: intercept_resend_hooks(g) }
            }
            AttackSpec::ImpersonateOneHome => Plan::ImpersonateOneHome,
            AttackSpec::ImpersonateTwoHomes => Plan::ImpersonateTwoHomes,
            AttackSpec::Pns(v) => Plan::Pns(v),
        })
    }

    fn round(&self, master_seed: u64, index: u64) -> Result<RoundRow> {
        let mut rng = round_rng(master_seed, index);
        let rng = &mut rng;
        match self {
            Plan::Honest => Ok(RoundRow::from_record(&execute_round(index, rng, &[])?, None)),
            Plan::General { spec, per_round_gamma, hooks, strategy } => {
                let rec = if *per_round_gamma {
                    let g = EquatorAngle::random(rng);
                    execute_round(index, rng, &general_attack_hooks(&spec.with_gamma(g)))?
                } else {
                    execute_round(index, rng, hooks)?
                };
                let guess = eve_infer_keys(&rec.state, &rec.eve, strategy, rng)?;
                Ok(RoundRow::from_record(&rec, Some(guess)))
            }
            Plan::Intercept { gamma, hooks } => {
                let rec = match gamma {
                    GammaChoice::PerRound => {
                        let g = EquatorAngle::random(rng);
                        execute_round(index, rng, &intercept_resend_hooks(g))?
                    }
                    GammaChoice::Fixed(_) => execute_round(index, rng, hooks)?,
                };
                Ok(RoundRow::from_record(&rec, intercept_guess(&rec.eve)))
            }
            Plan::ImpersonateOneHome | Plan::ImpersonateTwoHomes => {
                let r = if matches!(self, Plan::ImpersonateOneHome) {
                    one_home_round(rng)?
                } else {
                    two_homes_round(index, rng)?
                };
                Ok(RoundRow {
                    round: index,
                    alpha: None,
                    beta: None,
                    alice_odd: r.alice,
                    alice_even: None,
                    bob_odd: r.bob,
                    bob_even: None,
                    eve_odd: Some(r.eve_with_alice),
                    eve_home_hits: None,
                    trace_distance: None,
                    tested: false,
                })
            }
            Plan::Pns(variant) => {
                let r = pns_round(*variant, EveAccess::AllPhotons, rng)?;
                Ok(RoundRow {
                    round: index,
                    alpha: Some(r.alpha),
                    beta: Some(r.beta),
                    alice_odd: r.alice_key,
                    alice_even: None,
                    bob_odd: r.bob_key,
                    bob_even: None,
                    eve_odd: Some(r.eve_guess),
                    eve_home_hits: None,
                    trace_distance: Some(r.trace_distance),
                    tested: false,
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub tested_bits: usize,
    pub mismatches: usize,
    /// Mismatch rate among the tested K_{2n−1} bits.
    pub detection_frequency: f64,
    pub detection_sigma: f64,
    pub detected: bool,
    pub eve_key_accuracy: Option<f64>,
    pub eve_home_accuracy: Option<f64>,
    pub mutual_info_ab: f64,
    pub mutual_info_ae: Option<f64>,
    /// Smallest trace distance between Eve's key-conditional states.
    pub min_trace_distance: Option<f64>,
    pub final_key_length: usize,
    pub wall_time: Duration,
}

pub const SUMMARY_COLUMNS: [&str; 12] = [
    "rounds", "test_bits", "mismatches", "detection_frequency", "detection_sigma", "detected",
    "eve_key_accuracy", "eve_home_accuracy", "mi_ab", "mi_ae", "min_trace_distance", "final_key_length",
];

impl RunReport {
    /// Aggregate figures as a one-row table; wall time is left out so that the
    /// file is reproducible.
    pub fn summary_table(&self) -> Result<CsvTable> {
        let mut t = CsvTable::new(SUMMARY_COLUMNS)?;
        t.push_row(&[
            self.config.rounds as f64,
            self.config.test_bits as f64,
            self.mismatches as f64,
            self.detection_frequency,
            self.detection_sigma,
            f64::from(u8::from(self.detected)),
            self.eve_key_accuracy.unwrap_or(ABSENT),
            self.eve_home_accuracy.unwrap_or(ABSENT),
            self.mutual_info_ab,
            self.mutual_info_ae.unwrap_or(ABSENT),
            self.min_trace_distance.unwrap_or(ABSENT),
            self.final_key_length as f64,
        ])?;
        Ok(t)
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        writeln!(f, "attack            {}", c.attack)?;
        writeln!(f, "rounds            {}", c.rounds)?;
        writeln!(f, "seed              {}", c.master_seed)?;
        writeln!(
            f,
            "detection         {:.6} ± {:.6} ({} of {} tested bits differ)",
            self.detection_frequency, self.detection_sigma, self.mismatches, self.tested_bits
        )?;
        writeln!(f, "attack detected   {}", self.detected)?;
        if let Some(a) = self.eve_key_accuracy {
            writeln!(f, "eve key accuracy  {a:.6}")?;
        }
        if let Some(a) = self.eve_home_accuracy {
            writeln!(f, "eve home accuracy {a:.6}")?;
        }
        writeln!(f, "I(A,B)            {:.6}", self.mutual_info_ab)?;
        if let Some(i) = self.mutual_info_ae {
            writeln!(f, "I(A,E)            {i:.6}")?;
        }
        if let Some(d) = self.min_trace_distance {
            writeln!(f, "min trace dist    {d:.9}")?;
        }
        writeln!(f, "final key length  {}", self.final_key_length)?;
        write!(f, "wall time         {:.3} s", self.wall_time.as_secs_f64())
    }
}

/// Simulates every round; output order is the round order for any worker count.
pub fn run_rows(cfg: &ExperimentConfig) -> Result<Vec<RoundRow>> {
    cfg.validate()?;
    let plan = Plan::new(&cfg.attack)?;
    let work = || -> Result<Vec<RoundRow>> {
        (0..cfg.rounds).into_par_iter().map(|i| plan.round(cfg.master_seed, i)).collect()
    };
    let mut rows = match cfg.workers {
        Some(1) => (0..cfg.rounds).map(|i| plan.round(cfg.master_seed, i)).collect::<Result<Vec<_>>>()?,
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::State(format!("cannot start worker pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let mut vrng = verification_rng(cfg.master_seed);
    for i in rand::seq::index::sample(&mut vrng, rows.len(), cfg.test_bits as usize) {
        rows[i].tested = true;
    }
    Ok(rows)
}

pub fn summarize(cfg: &ExperimentConfig, rows: &[RoundRow], wall_time: Duration) -> Result<RunReport> {
    let n = rows.len() as f64;
    let tested: Vec<&RoundRow> = rows.iter().filter(|r| r.tested).collect();
    let mismatches = tested.iter().filter(|r| r.alice_odd != r.bob_odd).count();
    let (p, sigma) = if tested.is_empty() {
        (0.0, 0.0)
    } else {
        let p = mismatches as f64 / tested.len() as f64;
        (p, (p * (1.0 - p) / tested.len() as f64).sqrt())
    };
    let detected = mismatches > 0;
    let eve: Option<Vec<bool>> = rows.iter().map(|r| r.eve_odd).collect();
    let mutual_info_ae = match &eve {
        Some(e) => Some(empirical_mutual_information(contingency(rows.iter().map(|r| r.alice_odd).zip(e.iter().copied())))?),
        None => None,
    };
    let eve_key_accuracy =
        eve.as_ref().map(|e| rows.iter().zip(e).filter(|(r, g)| r.alice_odd == **g).count() as f64 / n);
    let hits: Option<Vec<u8>> = rows.iter().map(|r| r.eve_home_hits).collect();
    let eve_home_accuracy = hits.map(|h| h.iter().map(|&x| f64::from(x)).sum::<f64>() / (2.0 * n));
    let distances: Option<Vec<f64>> = rows.iter().map(|r| r.trace_distance).collect();
    Ok(RunReport {
        config: cfg.clone(),
        tested_bits: tested.len(),
        mismatches,
        detection_frequency: p,
        detection_sigma: sigma,
        detected,
        eve_key_accuracy,
        eve_home_accuracy,
        mutual_info_ab: empirical_mutual_information(contingency(rows.iter().map(|r| (r.alice_odd, r.bob_odd))))?,
        mutual_info_ae,
        min_trace_distance: distances.map(|d| d.into_iter().fold(f64::INFINITY, f64::min)),
        final_key_length: if detected { 0 } else { 2 * (rows.len() - tested.len()) },
        wall_time,
    })
}

/// Runs the configured experiment and writes the requested CSV files.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    let start = Instant::now();
    let rows = run_rows(cfg)?;
    let report = summarize(cfg, &rows, start.elapsed())?;
    if let Some(path) = &cfg.output_path {
        rows_table(&rows)?.write(path)?;
    }
    if let Some(path) = &cfg.summary_path {
        report.summary_table()?.write(path)?;
    }
    Ok(report)
}
