//! Monte-Carlo simulation of prepare-and-measure key distribution
//! sessions, with or without an eavesdropper in the line.
//!
//! Each signal is drawn from its own counter-based random substream, so
//! sessions are reproducible bit-for-bit for a fixed seed, and skipping
//! the unused draws of discarded rounds cannot shift later rounds.
//!
//! The simulated eavesdropper attaches a probe via the intercept
//! isometry, forwards the signal qubit, and reads her probe in the
//! computational basis; her record is kept for the rounds sifted in the
//! Z basis, where that readout is the optimal one.

use crate::attack::{build_one_bit_probe, build_optimal_probe, eve_conditional_states, ConditionalBranch};
use crate::error::{Error, Result};
use crate::info::{mutual_information, JointDistribution};
use crate::quantum::Basis;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Minimum number of records required for an empirical mutual-information
/// estimate.
pub const MIN_RECORDS: usize = 1000;

/// How many signal states the sender draws from: four (Z and X bases) or
/// six (Z, X and Y).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateCount {
    /// Two mutually unbiased bases, four signal states.
    Four,
    /// Three mutually unbiased bases, six signal states.
    Six,
}

impl StateCount {
    /// The preparation/measurement bases in use.
    pub fn bases(self) -> &'static [Basis] {
        match self {
            StateCount::Four => &[Basis::Z, Basis::X],
            StateCount::Six => &[Basis::Z, Basis::X, Basis::Y],
        }
    }

    /// Number of distinct signal states.
    pub fn states(self) -> u8 {
        match self {
            StateCount::Four => 4,
            StateCount::Six => 6,
        }
    }

    /// Parses a signal-state count (4 or 6).
    pub fn from_states(n: u8) -> Result<Self> {
        match n {
            4 => Ok(StateCount::Four),
            6 => Ok(StateCount::Six),
            other => Err(Error::InvalidConfig(format!(
                "unsupported state count {other}; expected 4 or 6"
            ))),
        }
    }
}

/// Eavesdropping strategy applied to every transmitted signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackKind {
    /// Clean channel: no probe is attached and the line is noiseless.
    None,
    /// Optimal two-qubit-probe attack at the configured disturbance.
    OptimalTwoBit,
    /// Optimal single-qubit-probe attack at the configured disturbance.
    OptimalOneBit,
}

/// Parameters of one simulated session.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionConfig {
    /// Number of signals the sender transmits (at least 1).
    pub n_signals: u64,
    /// Signal-state alphabet (four- or six-state protocol).
    pub states: StateCount,
    /// Channel disturbance the eavesdropper induces, in [0, 0.5].
    /// Ignored by [`AttackKind::None`], which leaves the line noiseless,
    /// but validated regardless.
    pub disturbance: f64,
    /// Eavesdropping strategy.
    pub attack: AttackKind,
    /// Seed for the session's random substreams.
    pub seed: u64,
}

impl SessionConfig {
    /// Checks the configuration invariants.
    pub fn validate(&self) -> Result<()> {
        if self.n_signals == 0 {
            return Err(Error::InvalidConfig(
                "a session needs at least one signal".into(),
            ));
        }
        if !self.disturbance.is_finite() || !(0.0..=0.5).contains(&self.disturbance) {
            return Err(Error::OutOfRange {
                name: "disturbance",
                value: self.disturbance,
                min: 0.0,
                max: 0.5,
            });
        }
        Ok(())
    }
}

/// Aggregated outcome of a simulated session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionStats {
    /// Rounds in which sender and receiver used the same basis.
    pub sifted_count: u64,
    /// `sifted_count` divided by the number of signals.
    pub sift_rate: f64,
    /// Error fraction among sifted rounds (0 when nothing was sifted).
    pub qber: f64,
    /// Error fraction among sifted rounds, per basis.
    pub per_basis_qber: Vec<(Basis, f64)>,
    /// Plug-in estimate of the sender–receiver mutual information from
    /// the sifted records; `None` with fewer than [`MIN_RECORDS`] records.
    pub empirical_i_ab: Option<f64>,
    /// Plug-in estimate of the sender–eavesdropper mutual information
    /// from the Z-sifted probe readouts; `None` without an attack or with
    /// fewer than [`MIN_RECORDS`] records.
    pub empirical_i_ae: Option<f64>,
}

/// Plug-in mutual-information estimate from paired discrete records.
///
/// # Errors
/// [`Error::InsufficientData`] with fewer than [`MIN_RECORDS`] records;
/// estimates from tiny samples are dominated by bias and are refused
/// rather than silently returned.
pub fn empirical_mutual_information(records: &[(u8, u8)]) -> Result<f64> {
    if records.len() < MIN_RECORDS {
        return Err(Error::InsufficientData {
            needed: MIN_RECORDS,
            got: records.len(),
        });
    }
    let rows = usize::from(records.iter().map(|r| r.0).max().unwrap()) + 1;
    let cols = usize::from(records.iter().map(|r| r.1).max().unwrap()) + 1;
    let mut counts = vec![vec![0u64; cols]; rows];
    for (a, b) in records {
        counts[usize::from(*a)][usize::from(*b)] += 1;
    }
    let joint = JointDistribution::from_counts(&counts)?;
    Ok(mutual_information(&joint))
}

/// Outcome branches for each (basis, sender bit) pair under the active
/// attack, or `None` for a clean line.
type BranchTable = Option<Vec<(Basis, [[ConditionalBranch; 2]; 2])>>;

fn build_branches(config: &SessionConfig) -> Result<BranchTable> {
    let probe = match config.attack {
        AttackKind::None => return Ok(None),
        AttackKind::OptimalTwoBit => build_optimal_probe(config.disturbance)?,
        AttackKind::OptimalOneBit => build_one_bit_probe(config.disturbance)?,
    };
    let mut table = Vec::new();
    for &basis in config.states.bases() {
        table.push((basis, eve_conditional_states(&probe, basis)?));
    }
    Ok(Some(table))
}

/// Runs one session and aggregates its statistics.
///
/// Per signal, the sender draws a basis and a bit and the receiver draws
/// a basis, uniformly; rounds with mismatched bases are discarded.  On a
/// clean line the receiver's sifted bit always matches the sender's.
/// Under attack, the receiver's outcome is drawn from the intercepted
/// qubit's conditional distribution, and on Z-sifted rounds the
/// eavesdropper's computational readout of her probe is recorded.
pub fn run_session(config: &SessionConfig) -> Result<SessionStats> {
    config.validate()?;
    let bases = config.states.bases();
    let branches = build_branches(config)?;

    let mut sifted = 0u64;
    let mut errors = 0u64;
    let mut basis_total = vec![0u64; bases.len()];
    let mut basis_errors = vec![0u64; bases.len()];
    let mut ab_records: Vec<(u8, u8)> = Vec::new();
    let mut ae_records: Vec<(u8, u8)> = Vec::new();

    for signal in 0..config.n_signals {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(signal);

        let alice_basis = rng.gen_range(0..bases.len());
        let alice_bit = rng.gen_range(0..2u8);
        let bob_basis = rng.gen_range(0..bases.len());
        if alice_basis != bob_basis {
            continue;
        }

        sifted += 1;
        basis_total[alice_basis] += 1;

        let bob_bit = match &branches {
            None => alice_bit,
            Some(table) => {
                let row = &table[alice_basis].1[usize::from(alice_bit)];
                let u: f64 = rng.gen();
                let bob_bit = u8::from(u >= row[0].probability);
                if bases[alice_basis] == Basis::Z {
                    let eve = sample_readout(&mut rng, &row[usize::from(bob_bit)]);
                    ae_records.push((alice_bit, eve));
                }
                bob_bit
            }
        };

        if bob_bit != alice_bit {
            errors += 1;
            basis_errors[alice_basis] += 1;
        }
        ab_records.push((alice_bit, bob_bit));
    }

    let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let per_basis_qber = bases
        .iter()
        .enumerate()
        .map(|(i, &b)| (b, ratio(basis_errors[i], basis_total[i])))
        .collect();
    let empirical = |records: &Vec<(u8, u8)>| {
        (records.len() >= MIN_RECORDS)
            .then(|| empirical_mutual_information(records))
            .transpose()
    };

    Ok(SessionStats {
        sifted_count: sifted,
        sift_rate: ratio(sifted, config.n_signals),
        qber: ratio(errors, sifted),
        per_basis_qber,
        empirical_i_ab: empirical(&ab_records)?,
        empirical_i_ae: empirical(&ae_records)?,
    })
}

/// Samples the eavesdropper's computational-basis readout of the probe
/// state attached to one branch.
fn sample_readout(rng: &mut ChaCha8Rng, branch: &ConditionalBranch) -> u8 {
    let Some(state) = &branch.eve_state else {
        return 0;
    };
    let u: f64 = rng.gen();
    let mut cumulative = 0.0;
    let dim = state.dim();
    for o in 0..dim {
        cumulative += state.amplitude(o).norm_sqr();
        if u < cumulative {
            return o as u8;
        }
    }
    (dim - 1) as u8
}
