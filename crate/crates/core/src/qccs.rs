//! Four-party communication complexity scenario.
//!
//! Parties A, B, C, D receive two-bit values X, Y, Z, K with the promise
//! that X + Y + Z + K is even, and each must output
//! F = ½[(X + Y + Z + K) mod 4] after broadcasting a single bit. With a
//! shared four-qubit state every party rotates its qubit by R(x) or R(y)
//! depending on its low input bit, measures in H/V and broadcasts
//! `high_bit ⊕ outcome`; the XOR of the four broadcasts is the answer.
//!
//! Parties map onto detector modes A→c, B→d, C→e, D→f.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::ExactComplex;
use crate::mode::Mode;
use crate::polarimetry::binomial_std_error;
use crate::state::{
    ExactState, ExactUnitary, LocalUnitary, Measurable, MeasurementBasis, PureState,
};

/// Detector mode held by each party, in party order A, B, C, D.
pub const PARTY_MODES: [Mode; 4] = [Mode::C, Mode::D, Mode::E, Mode::F];
pub const PARTY_NAMES: [&str; 4] = ["A", "B", "C", "D"];

/// One party's input X = 2·high + low.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PartyInput {
    pub high: u8,
    pub low: u8,
}

impl PartyInput {
    pub fn new(value: u8) -> Result<Self> {
        if value > 3 {
            return Err(Error::InvalidArgument(format!(
                "party input {value} is not a two-bit value"
            )));
        }
        Ok(PartyInput {
            high: value >> 1,
            low: value & 1,
        })
    }

    pub fn value(&self) -> u8 {
        2 * self.high + self.low
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct QccsInputs {
    pub parties: [PartyInput; 4],
}

impl QccsInputs {
    /// Inputs without checking the promise.
    pub fn new(values: [u8; 4]) -> Result<Self> {
        let mut parties = [PartyInput { high: 0, low: 0 }; 4];
        for (p, v) in parties.iter_mut().zip(values) {
            *p = PartyInput::new(v)?;
        }
        Ok(QccsInputs { parties })
    }

    /// Inputs that must satisfy the promise.
    pub fn strict(values: [u8; 4]) -> Result<Self> {
        let inputs = QccsInputs::new(values)?;
        if !promise_holds(&inputs) {
            return Err(Error::PromiseViolated { sum: inputs.sum() });
        }
        Ok(inputs)
    }

    pub fn from_bits(high: [u8; 4], low: LowBits) -> Self {
        let mut parties = [PartyInput { high: 0, low: 0 }; 4];
        for (i, p) in parties.iter_mut().enumerate() {
            *p = PartyInput {
                high: high[i] & 1,
                low: low.bit(i),
            };
        }
        QccsInputs { parties }
    }

    pub fn values(&self) -> [u8; 4] {
        self.parties.map(|p| p.value())
    }

    pub fn sum(&self) -> u32 {
        self.parties.iter().map(|p| p.value() as u32).sum()
    }

    pub fn low_bits(&self) -> LowBits {
        LowBits::from_bits(self.parties.map(|p| p.low))
    }

    pub fn high_bits(&self) -> [u8; 4] {
        self.parties.map(|p| p.high)
    }
}

/// Low input bits x₀y₀z₀k₀, written with A's bit leftmost.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LowBits(u8);

impl LowBits {
    /// The eight even-parity patterns in the row order of the protocol table.
    pub const TABLE_ORDER: [LowBits; 8] = [
        LowBits(0b0000),
        LowBits(0b1111),
        LowBits(0b0011),
        LowBits(0b1100),
        LowBits(0b0110),
        LowBits(0b1001),
        LowBits(0b0101),
        LowBits(0b1010),
    ];

    pub fn new(pattern: u8) -> Result<Self> {
        if pattern > 0b1111 {
            return Err(Error::InvalidArgument(format!(
                "low-bit pattern {pattern} exceeds four bits"
            )));
        }
        Ok(LowBits(pattern))
    }

    pub fn from_bits(bits: [u8; 4]) -> Self {
        LowBits(bits.iter().fold(0, |acc, b| (acc << 1) | (b & 1)))
    }

    pub fn pattern(&self) -> u8 {
        self.0
    }

    /// Bit of party `i` (0 = A).
    pub fn bit(&self, party: usize) -> u8 {
        (self.0 >> (3 - party)) & 1
    }

    pub fn bits(&self) -> [u8; 4] {
        [self.bit(0), self.bit(1), self.bit(2), self.bit(3)]
    }

    pub fn weight(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_even(&self) -> bool {
        self.weight().is_multiple_of(2)
    }
}

impl fmt::Display for LowBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04b}", self.0)
    }
}

impl FromStr for LowBits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() != 4 || !s.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::InvalidArgument(format!(
                "'{s}' is not a four-bit pattern such as 0011"
            )));
        }
        LowBits::new(u8::from_str_radix(s, 2).expect("validated binary"))
    }
}

impl Serialize for LowBits {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub fn promise_holds(inputs: &QccsInputs) -> bool {
    inputs.sum().is_multiple_of(2)
}

/// F = ½[(X + Y + Z + K) mod 4].
pub fn target_f(inputs: &QccsInputs) -> Result<u8> {
    if !promise_holds(inputs) {
        return Err(Error::PromiseViolated { sum: inputs.sum() });
    }
    Ok(((inputs.sum() % 4) / 2) as u8)
}

/// F₀ = ½[(x₀ + y₀ + z₀ + k₀) mod 4]: 0 for 0000 and 1111, 1 for the other even patterns.
pub fn f0(low: LowBits) -> Result<u8> {
    if !low.is_even() {
        return Err(Error::OddParityPattern(low.to_string()));
    }
    Ok(((low.weight() % 4) / 2) as u8)
}

/// (x₁ ⊕ y₁ ⊕ z₁ ⊕ k₁, F₀); their XOR is F.
pub fn decompose_f(inputs: &QccsInputs) -> Result<(u8, u8)> {
    if !promise_holds(inputs) {
        return Err(Error::PromiseViolated { sum: inputs.sum() });
    }
    let high = inputs.high_bits().iter().fold(0, |acc, b| acc ^ b);
    Ok((high, f0(inputs.low_bits())?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rotation {
    /// (1/√2)[[1, 1], [1, −1]]
    Rx,
    /// (1/√2)[[1, i], [i, 1]]
    Ry,
}

impl Rotation {
    pub fn exact(self) -> ExactUnitary {
        match self {
            Rotation::Rx => ExactUnitary::rx(),
            Rotation::Ry => ExactUnitary::ry(),
        }
    }

    pub fn local(self) -> LocalUnitary {
        match self {
            Rotation::Rx => crate::state::rotation_rx(),
            Rotation::Ry => crate::state::rotation_ry(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Rotation::Rx => "R(x)",
            Rotation::Ry => "R(y)",
        }
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Rotation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// R(x) for a low bit of 0, R(y) for 1, in party order.
pub fn assign_rotations(low: LowBits) -> [Rotation; 4] {
    low.bits()
        .map(|b| if b == 0 { Rotation::Rx } else { Rotation::Ry })
}

pub fn rotations_label(rotations: &[Rotation; 4]) -> String {
    rotations
        .iter()
        .map(|r| r.name())
        .collect::<Vec<_>>()
        .join("⊗")
}

fn require_party_modes(modes: &[Mode]) -> Result<()> {
    if modes != PARTY_MODES {
        return Err(Error::ModeMismatch {
            expected: PARTY_MODES.to_vec(),
            found: modes.to_vec(),
        });
    }
    Ok(())
}

fn rotated_exact(low: LowBits, state: &ExactState) -> Result<ExactState> {
    require_party_modes(state.modes())?;
    let ops = assign_rotations(low).map(Rotation::exact);
    state.apply_locals(&ops)
}

/// P(a ⊕ b ⊕ c ⊕ d = F₀) after the assigned rotations, exactly.
pub fn quantum_success_probability(low: LowBits, state: &ExactState) -> Result<BigRational> {
    let target = f0(low)?;
    rotated_exact(low, state)?.parity_probability_rational(target)
}

fn rotated_bases(low: LowBits) -> [MeasurementBasis; 4] {
    assign_rotations(low).map(|r| MeasurementBasis::rotated_computational(&r.local()))
}

/// Floating-point success probability for any measurable state (pure or noisy).
pub fn success_probability<S: Measurable + ?Sized>(low: LowBits, state: &S) -> Result<f64> {
    let target = f0(low)?;
    require_party_modes(state.modes())?;
    Ok(state
        .born_distribution(&rotated_bases(low))?
        .parity_probability(target))
}

/// Uniform average over the eight even low-bit patterns.
pub fn average_success_exact(state: &ExactState) -> Result<BigRational> {
    let mut total = BigRational::zero();
    for low in LowBits::TABLE_ORDER {
        total += quantum_success_probability(low, state)?;
    }
    Ok(total / BigRational::from_integer(BigInt::from(8)))
}

pub fn average_success<S: Measurable + ?Sized>(state: &S) -> Result<f64> {
    let mut total = 0.0;
    for low in LowBits::TABLE_ORDER {
        total += success_probability(low, state)?;
    }
    Ok(total / 8.0)
}

/// |Φ⁺⟩_AB ⊗ |Φ⁺⟩_CD with |Φ⁺⟩ = (|00⟩ + |11⟩)/√2, unnormalized.
pub fn two_epr_exact() -> ExactState {
    let amps = (0..16usize)
        .map(|i| match i {
            0b0000 | 0b0011 | 0b1100 | 0b1111 => ExactComplex::one(),
            _ => ExactComplex::zero(),
        })
        .collect();
    ExactState::new(PARTY_MODES.to_vec(), amps).expect("sixteen amplitudes")
}

pub fn two_epr_state() -> PureState {
    two_epr_exact().to_pure()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub inputs: QccsInputs,
    /// Measurement results a, b, c, d.
    pub measured: [u8; 4],
    /// high bit ⊕ measured bit, per party.
    pub broadcasts: [u8; 4],
    pub decoded: u8,
    pub correct: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialSummary {
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub std_error: f64,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

impl TrialSummary {
    fn from_records(records: Vec<TrialRecord>) -> Self {
        let trials = records.len() as u64;
        let successes = records.iter().filter(|r| r.correct).count() as u64;
        let rate = if trials == 0 {
            0.0
        } else {
            successes as f64 / trials as f64
        };
        TrialSummary {
            trials,
            successes,
            rate,
            std_error: binomial_std_error(rate, trials),
            records,
        }
    }
}

/// Cumulative distribution sampler over outcome indices.
struct OutcomeSampler {
    cumulative: Vec<f64>,
}

impl OutcomeSampler {
    fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        OutcomeSampler { cumulative }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty");
        let u: f64 = rng.random::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= u);
        i.min(self.cumulative.len() - 1)
    }
}

fn play(inputs: QccsInputs, outcome: usize) -> Result<TrialRecord> {
    let measured = [0usize, 1, 2, 3].map(|k| ((outcome >> (3 - k)) & 1) as u8);
    let high = inputs.high_bits();
    let broadcasts = [0usize, 1, 2, 3].map(|k| high[k] ^ measured[k]);
    let decoded = broadcasts.iter().fold(0, |acc, b| acc ^ b);
    let correct = decoded == target_f(&inputs)?;
    Ok(TrialRecord {
        inputs,
        measured,
        broadcasts,
        decoded,
        correct,
    })
}

/// Runs `n` rounds of the protocol on fixed inputs.
pub fn run_protocol_trials<S: Measurable + ?Sized>(
    inputs: &QccsInputs,
    state: &S,
    n: u64,
    seed: u64,
) -> Result<TrialSummary> {
    if !promise_holds(inputs) {
        return Err(Error::PromiseViolated { sum: inputs.sum() });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    require_party_modes(state.modes())?;
    let dist = state.born_distribution(&rotated_bases(inputs.low_bits()))?;
    let sampler = OutcomeSampler::new(dist.probabilities());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records = (0..n)
        .map(|_| play(*inputs, sampler.sample(&mut rng)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialSummary::from_records(records))
}

/// Runs `n` rounds for one low-bit case, drawing the high bits uniformly per round.
pub fn run_case_trials<S: Measurable + ?Sized>(
    low: LowBits,
    state: &S,
    n: u64,
    seed: u64,
) -> Result<TrialSummary> {
    f0(low)?;
    require_party_modes(state.modes())?;
    let dist = state.born_distribution(&rotated_bases(low))?;
    let sampler = OutcomeSampler::new(dist.probabilities());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let records = (0..n)
        .map(|_| {
            let high_pattern: u8 = rng.random_range(0..16);
            let high = [3, 2, 1, 0].map(|s| (high_pattern >> s) & 1);
            let inputs = QccsInputs::from_bits(high, low);
            play(inputs, sampler.sample(&mut rng))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialSummary::from_records(records))
}

/// Distinct per-case seed derived from a base seed.
pub fn case_seed(seed: u64, case: usize) -> u64 {
    seed ^ (case as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

// ---------------------------------------------------------------------------
// Classical one-bit broadcast strategies

/// Scoring rule for a classical strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scoring {
    /// Every party outputs the correct F.
    AllCorrect,
    /// The least successful party's success rate.
    WorstParty,
}

impl fmt::Display for Scoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scoring::AllCorrect => "all-correct",
            Scoring::WorstParty => "worst-party",
        })
    }
}

impl FromStr for Scoring {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-correct" => Ok(Scoring::AllCorrect),
            "worst-party" => Ok(Scoring::WorstParty),
            other => Err(Error::InvalidArgument(format!("unknown scoring rule '{other}'"))),
        }
    }
}

/// Deterministic simultaneous-broadcast strategy.
///
/// `broadcast[i]` is party i's truth table: bit `v` is the bit broadcast on
/// input value `v`. `answers[i]` is indexed by `own_value * 8 + others`,
/// where `others` packs the other three parties' broadcast bits in party
/// order (earliest party most significant).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClassicalStrategy {
    pub broadcast: [u8; 4],
    pub answers: [u32; 4],
}

impl ClassicalStrategy {
    pub fn broadcast_bit(&self, party: usize, value: u8) -> u8 {
        (self.broadcast[party] >> value) & 1
    }

    pub fn answer(&self, party: usize, own_value: u8, others: u8) -> u8 {
        ((self.answers[party] >> (own_value as u32 * 8 + others as u32)) & 1) as u8
    }
}

/// Packs the broadcasts of every party except `party`.
fn others_index(bits: [u8; 4], party: usize) -> u8 {
    (0..4)
        .filter(|&j| j != party)
        .fold(0, |acc, j| (acc << 1) | bits[j])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StrategyScore {
    pub all_correct: u64,
    pub per_party: [u64; 4],
    pub inputs: u64,
}

impl StrategyScore {
    pub fn count(&self, scoring: Scoring) -> u64 {
        match scoring {
            Scoring::AllCorrect => self.all_correct,
            Scoring::WorstParty => *self.per_party.iter().min().expect("four parties"),
        }
    }
}

/// Plays a strategy on every input and counts the correct answers.
pub fn score_strategy(strategy: &ClassicalStrategy, inputs: &[QccsInputs]) -> Result<StrategyScore> {
    let mut score = StrategyScore {
        all_correct: 0,
        per_party: [0; 4],
        inputs: inputs.len() as u64,
    };
    for inp in inputs {
        let f = target_f(inp)?;
        let values = inp.values();
        let bits = [0, 1, 2, 3].map(|i| strategy.broadcast_bit(i, values[i]));
        let mut all = true;
        for (i, hits) in score.per_party.iter_mut().enumerate() {
            let ok = strategy.answer(i, values[i], others_index(bits, i)) == f;
            *hits += ok as u64;
            all &= ok;
        }
        score.all_correct += all as u64;
    }
    Ok(score)
}

/// Every promise-consistent input, optionally restricted to some low-bit patterns.
pub fn promise_inputs(low_filter: Option<&[LowBits]>) -> Vec<QccsInputs> {
    let mut out = Vec::new();
    for x in 0..4u8 {
        for y in 0..4u8 {
            for z in 0..4u8 {
                for k in 0..4u8 {
                    let inp = QccsInputs::new([x, y, z, k]).expect("two-bit values");
                    if !promise_holds(&inp) {
                        continue;
                    }
                    if let Some(filter) = low_filter {
                        if !filter.contains(&inp.low_bits()) {
                            continue;
                        }
                    }
                    out.push(inp);
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RuleOptimum {
    pub scoring: Scoring,
    pub correct: u64,
    pub inputs: u64,
    #[serde(serialize_with = "crate::io::serialize_rational")]
    pub probability: BigRational,
    /// Index b_A + 16·b_B + 256·b_C + 4096·b_D of the broadcast combination.
    pub combination: u32,
    pub witness: ClassicalStrategy,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalBound {
    pub all_correct: RuleOptimum,
    pub worst_party: RuleOptimum,
    pub combinations_visited: u64,
}

impl ClassicalBound {
    pub fn rule(&self, scoring: Scoring) -> &RuleOptimum {
        match scoring {
            Scoring::AllCorrect => &self.all_correct,
            Scoring::WorstParty => &self.worst_party,
        }
    }
}

pub const BROADCAST_COMBINATIONS: u32 = 1 << 16;

/// Majority-answer strategy for one broadcast combination, with its score.
fn evaluate_combination(
    combination: u32,
    table: &[([u8; 4], u8)],
) -> (ClassicalStrategy, StrategyScore) {
    let broadcast = [0, 4, 8, 12].map(|s| ((combination >> s) & 0xF) as u8);
    // votes[i][cell][answer]
    let mut votes = [[[0u32; 2]; 32]; 4];
    let mut cells = Vec::with_capacity(table.len());
    for &(values, f) in table {
        let bits = [0, 1, 2, 3].map(|i| (broadcast[i] >> values[i]) & 1);
        let cell = [0, 1, 2, 3].map(|i| values[i] as usize * 8 + others_index(bits, i) as usize);
        for i in 0..4 {
            votes[i][cell[i]][f as usize] += 1;
        }
        cells.push(cell);
    }
    let mut answers = [0u32; 4];
    for i in 0..4 {
        for (c, v) in votes[i].iter().enumerate() {
            // ties go to 0
            if v[1] > v[0] {
                answers[i] |= 1 << c;
            }
        }
    }
    let mut score = StrategyScore {
        all_correct: 0,
        per_party: [0; 4],
        inputs: table.len() as u64,
    };
    for (&(_, f), cell) in table.iter().zip(&cells) {
        let mut all = true;
        for i in 0..4 {
            let ok = ((answers[i] >> cell[i]) & 1) as u8 == f;
            score.per_party[i] += ok as u64;
            all &= ok;
        }
        score.all_correct += all as u64;
    }
    (ClassicalStrategy { broadcast, answers }, score)
}

#[derive(Clone, Copy)]
struct Best {
    count: u64,
    combination: u32,
    strategy: ClassicalStrategy,
}

impl Best {
    /// Higher count wins; equal counts go to the lower combination index.
    fn better(self, other: Best) -> Best {
        if other.count > self.count
            || (other.count == self.count && other.combination < self.combination)
        {
            other
        } else {
            self
        }
    }
}

/// Exhaustive search over all 16⁴ broadcast combinations, each completed
/// with per-cell majority answers, for the given input set.
///
/// The strategy space is split into chunks of `chunk` combinations that are
/// searched in parallel; the result does not depend on the chunk size.
pub fn classical_search(inputs: &[QccsInputs], chunk: usize) -> Result<ClassicalBound> {
    if inputs.is_empty() {
        return Err(Error::InvalidArgument("empty input set".into()));
    }
    let chunk = chunk.clamp(1, BROADCAST_COMBINATIONS as usize) as u32;
    let table = inputs
        .iter()
        .map(|inp| Ok((inp.values(), target_f(inp)?)))
        .collect::<Result<Vec<_>>>()?;
    let n_chunks = BROADCAST_COMBINATIONS.div_ceil(chunk);
    let (best_all, best_worst, visited) = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk;
            let end = (start + chunk).min(BROADCAST_COMBINATIONS);
            let mut best: Option<(Best, Best)> = None;
            for combination in start..end {
                let (strategy, score) = evaluate_combination(combination, &table);
                let a = Best {
                    count: score.count(Scoring::AllCorrect),
                    combination,
                    strategy,
                };
                let w = Best {
                    count: score.count(Scoring::WorstParty),
                    combination,
                    strategy,
                };
                best = Some(match best {
                    None => (a, w),
                    Some((ba, bw)) => (ba.better(a), bw.better(w)),
                });
            }
            let (a, w) = best.expect("non-empty chunk");
            (a, w, (end - start) as u64)
        })
        .reduce_with(|(a1, w1, n1), (a2, w2, n2)| (a1.better(a2), w1.better(w2), n1 + n2))
        .expect("at least one chunk");
    let total = inputs.len() as u64;
    let optimum = |scoring, b: Best| RuleOptimum {
        scoring,
        correct: b.count,
        inputs: total,
        probability: BigRational::new(BigInt::from(b.count), BigInt::from(total)),
        combination: b.combination,
        witness: b.strategy,
    };
    Ok(ClassicalBound {
        all_correct: optimum(Scoring::AllCorrect, best_all),
        worst_party: optimum(Scoring::WorstParty, best_worst),
        combinations_visited: visited,
    })
}

/// The classical limit on the full promise-consistent input set.
pub fn classical_optimal_success() -> ClassicalBound {
    classical_search(&promise_inputs(None), 1024).expect("128 valid inputs")
}

// ---------------------------------------------------------------------------
// Protocol table

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseReport {
    pub pattern: LowBits,
    pub rotations: [Rotation; 4],
    pub f0: u8,
    /// Noise-free success probability.
    #[serde(serialize_with = "crate::io::serialize_rational")]
    pub p_exact: BigRational,
    /// Success probability under the white-noise weight (equal to `p_exact` at weight 1).
    pub p_model: f64,
    pub monte_carlo: Option<MonteCarloEstimate>,
    /// Every outcome a, b, c, d whose parity equals F₀.
    pub success_outcomes: Vec<String>,
    /// The subset of `success_outcomes` with nonzero probability after rotation.
    pub success_components: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableOptions {
    pub noise_weight: f64,
    pub trials: u64,
    pub seed: u64,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions {
            noise_weight: 1.0,
            trials: 0,
            seed: 0,
        }
    }
}

pub fn case_report(
    low: LowBits,
    state: &ExactState,
    opts: &TableOptions,
    case_index: usize,
) -> Result<CaseReport> {
    let target = f0(low)?;
    let rotated = rotated_exact(low, state)?;
    let p_exact = rotated.parity_probability_rational(target)?;
    let v = opts.noise_weight;
    let noisy = crate::state::mix_with_white_noise(&state.to_pure(), v)?;
    let p_exact_f = crate::io::rational_to_f64(&p_exact);
    let p_model = v * p_exact_f + (1.0 - v) / 2.0;
    let probs = rotated.probabilities();
    let success: Vec<usize> = (0..16usize)
        .filter(|i| (i.count_ones() as u8 & 1) == target)
        .collect();
    let success_outcomes = success.iter().map(|&i| crate::mode::bit_label(i, 4)).collect();
    let success_components = success
        .iter()
        .filter(|&&i| !probs[i].is_zero())
        .map(|&i| crate::mode::bit_label(i, 4))
        .collect();
    let monte_carlo = if opts.trials > 0 {
        let s = run_case_trials(low, &noisy, opts.trials, case_seed(opts.seed, case_index))?;
        Some(MonteCarloEstimate {
            trials: s.trials,
            successes: s.successes,
            rate: s.rate,
            std_error: s.std_error,
        })
    } else {
        None
    };
    Ok(CaseReport {
        pattern: low,
        rotations: assign_rotations(low),
        f0: target,
        p_exact,
        p_model,
        monte_carlo,
        success_outcomes,
        success_components,
    })
}

/// All eight rows of the protocol table, in table order.
pub fn table_one(state: &ExactState, opts: &TableOptions) -> Result<Vec<CaseReport>> {
    LowBits::TABLE_ORDER
        .par_iter()
        .enumerate()
        .map(|(i, &low)| case_report(low, state, opts, i))
        .collect()
}

pub fn average_exact(reports: &[CaseReport]) -> BigRational {
    if reports.is_empty() {
        return BigRational::zero();
    }
    let sum = reports
        .iter()
        .fold(BigRational::zero(), |acc, r| acc + &r.p_exact);
    sum / BigRational::from_integer(BigInt::from(reports.len()))
}

/// v·p + (1 − v)/2: success under white noise given the noise-free value.
pub fn noisy_success(p_pure: f64, weight: f64) -> f64 {
    weight * p_pure + (1.0 - weight) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::fock::four_photon_state;

    fn inputs(v: [u8; 4]) -> QccsInputs {
        QccsInputs::new(v).unwrap()
    }

    fn low(s: &str) -> LowBits {
        s.parse().unwrap()
    }

    #[test]
    fn promise_examples() {
        assert!(promise_holds(&inputs([0, 0, 0, 0])));
        assert!(promise_holds(&inputs([1, 2, 3, 0])));
        assert!(!promise_holds(&inputs([1, 0, 0, 0])));
        assert!(matches!(
            QccsInputs::strict([1, 0, 0, 0]),
            Err(Error::PromiseViolated { sum: 1 })
        ));
        assert!(QccsInputs::new([4, 0, 0, 0]).is_err());
    }

    #[test]
    fn target_examples() {
        assert_eq!(target_f(&inputs([0, 0, 0, 0])).unwrap(), 0);
        assert_eq!(target_f(&inputs([1, 1, 0, 0])).unwrap(), 1);
        assert_eq!(target_f(&inputs([3, 3, 3, 3])).unwrap(), 0);
        assert!(target_f(&inputs([1, 0, 0, 0])).is_err());
    }

    #[test]
    fn f0_examples() {
        assert_eq!(f0(low("0000")).unwrap(), 0);
        assert_eq!(f0(low("1111")).unwrap(), 0);
        assert_eq!(f0(low("0011")).unwrap(), 1);
        assert_eq!(f0(low("0101")).unwrap(), 1);
        assert!(matches!(f0(low("0001")), Err(Error::OddParityPattern(_))));
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose_f(&inputs([2, 2, 0, 0])).unwrap(), (0, 0));
        assert_eq!(decompose_f(&inputs([3, 1, 0, 0])).unwrap(), (1, 1));
        assert_eq!(target_f(&inputs([3, 1, 0, 0])).unwrap(), 0);
    }

    #[test]
    fn rotation_assignment() {
        use Rotation::*;
        assert_eq!(assign_rotations(low("0000")), [Rx, Rx, Rx, Rx]);
        assert_eq!(assign_rotations(low("0011")), [Rx, Rx, Ry, Ry]);
        assert_eq!(assign_rotations(low("1010")), [Ry, Rx, Ry, Rx]);
    }

    #[test]
    fn table_probabilities_for_derived_state() {
        let s = four_photon_state().exact;
        assert_eq!(quantum_success_probability(low("0000"), &s).unwrap(), ratio(1, 1));
        assert_eq!(quantum_success_probability(low("0011"), &s).unwrap(), ratio(5, 6));
        assert_eq!(quantum_success_probability(low("0101"), &s).unwrap(), ratio(2, 3));
        assert_eq!(average_success_exact(&s).unwrap(), ratio(5, 6));
    }

    #[test]
    fn two_epr_probabilities() {
        let s = two_epr_exact();
        let amps = two_epr_state();
        for (i, a) in amps.amplitudes().iter().enumerate() {
            let expect = if [0, 3, 12, 15].contains(&i) { 0.5 } else { 0.0 };
            assert!((a.re - expect).abs() < 1e-12 && a.im.abs() < 1e-12);
        }
        assert_eq!(quantum_success_probability(low("0000"), &s).unwrap(), ratio(1, 1));
        assert_eq!(quantum_success_probability(low("0101"), &s).unwrap(), ratio(1, 2));
        assert_eq!(average_success_exact(&s).unwrap(), ratio(3, 4));
    }

    #[test]
    fn float_and_exact_paths_agree() {
        let exact = four_photon_state().exact;
        let pure = exact.to_pure();
        for l in LowBits::TABLE_ORDER {
            let e = crate::io::rational_to_f64(&quantum_success_probability(l, &exact).unwrap());
            let f = success_probability(l, &pure).unwrap();
            assert!((e - f).abs() < 1e-12, "{l}");
        }
    }

    #[test]
    fn maximally_mixed_average_is_half() {
        let noisy = crate::state::mix_with_white_noise(&four_photon_state().state, 0.0).unwrap();
        assert!((average_success(&noisy).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn deterministic_case_always_succeeds() {
        let s = four_photon_state().state;
        let inp = QccsInputs::from_bits([1, 0, 1, 1], low("0000"));
        let summary = run_protocol_trials(&inp, &s, 500, 9).unwrap();
        assert_eq!(summary.successes, 500);
        for r in &summary.records {
            assert_eq!(r.decoded, r.broadcasts.iter().fold(0, |a, b| a ^ b));
        }
        assert!(run_protocol_trials(&inputs([1, 0, 0, 0]), &s, 10, 0).is_err());
        assert!(run_protocol_trials(&inp, &s, 0, 0).is_err());
    }

    #[test]
    fn restricted_classical_search_is_perfect() {
        let restricted = promise_inputs(Some(&[low("0000"), low("1111")]));
        assert_eq!(restricted.len(), 32);
        let b = classical_search(&restricted, 4096).unwrap();
        assert_eq!(b.all_correct.probability, ratio(1, 1));
    }

    #[test]
    fn promise_input_count() {
        assert_eq!(promise_inputs(None).len(), 128);
    }

    #[test]
    fn table_components_row_0000() {
        let rows = table_one(&four_photon_state().exact, &TableOptions::default()).unwrap();
        let outcomes = &rows[0].success_outcomes;
        for c in ["0000", "0011", "0101", "0110"] {
            assert!(outcomes.iter().any(|x| x == c), "{c}");
        }
        // the rotated state equals the unrotated one, whose support has no 0101 term
        let support = ["0000", "0011", "0110", "1001", "1100", "1111"];
        assert_eq!(rows[0].success_components, support.map(String::from).to_vec());
        let odd = ["0001", "0010", "0100", "0111", "1000", "1011", "1101", "1110"];
        assert_eq!(rows[2].pattern, low("0011"));
        assert_eq!(rows[2].success_outcomes, odd.map(String::from).to_vec());
        assert!(rows[2]
            .success_components
            .iter()
            .all(|c| odd.contains(&c.as_str())));
        assert_eq!(average_exact(&rows), ratio(5, 6));
    }
}
