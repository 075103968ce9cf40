//! Dense n-qubit polarization states, local unitaries and Born-rule statistics.
//!
//! Outcome and amplitude indices put the first listed mode in the most
//! significant bit: for modes `(c, d, e, f)` index `0b0011` is `|HHVV⟩`.

use num_complex::Complex64;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::exact::{ExactComplex, Surd};
use crate::mode::Mode;

pub const EXACT_TOL: f64 = 1e-12;
pub const PIPELINE_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Position of mode `k` (0-based, in `mode_order`) within an outcome index.
#[inline]
pub fn bit_of(index: usize, k: usize, n: usize) -> usize {
    (index >> (n - 1 - k)) & 1
}

fn check_modes(modes: &[Mode]) -> Result<()> {
    for (i, m) in modes.iter().enumerate() {
        if modes[..i].contains(m) {
            return Err(Error::InvalidArgument(format!("mode {m} listed twice")));
        }
    }
    Ok(())
}

/// A normalized pure state over polarization qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    modes: Vec<Mode>,
    amps: Vec<Complex64>,
}

impl PureState {
    /// Builds a state, requiring unit norm within `EXACT_TOL`.
    pub fn new(modes: Vec<Mode>, amps: Vec<Complex64>) -> Result<Self> {
        check_modes(&modes)?;
        let dim = 1usize << modes.len();
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amps.len(),
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > EXACT_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(PureState { modes, amps })
    }

    /// Builds a state after rescaling `amps` to unit norm.
    pub fn normalized(modes: Vec<Mode>, mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        PureState::new(modes, amps)
    }

    /// Product basis state, `bits[k]` the polarization bit of mode `k`.
    pub fn basis(modes: Vec<Mode>, index: usize) -> Result<Self> {
        let dim = 1usize << modes.len();
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index + 1,
            });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        PureState::new(modes, amps)
    }

    /// Four-qubit GHZ state (|HHHH⟩ + |VVVV⟩)/√2 over `modes`.
    pub fn ghz(modes: Vec<Mode>) -> Result<Self> {
        let dim = 1usize << modes.len();
        let mut amps = vec![ZERO; dim];
        amps[0] = ONE;
        amps[dim - 1] = ONE;
        PureState::normalized(modes, amps)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.modes.len()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn position(&self, mode: Mode) -> Option<usize> {
        self.modes.iter().position(|&m| m == mode)
    }

    /// ⟨self|other⟩; both states must list the same modes in the same order.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.modes != other.modes {
            return Err(Error::ModeMismatch {
                expected: self.modes.clone(),
                found: other.modes.clone(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Multiplies every amplitude by e^{iα}.
    pub fn with_global_phase(&self, alpha: f64) -> PureState {
        let p = Complex64::from_polar(1.0, alpha);
        PureState {
            modes: self.modes.clone(),
            amps: self.amps.iter().map(|a| a * p).collect(),
        }
    }

    /// Reorders the qubits so that they follow `order`, which must be a
    /// permutation of the current modes.
    pub fn permuted(&self, order: &[Mode]) -> Result<PureState> {
        let n = self.modes.len();
        let mut sorted_self = self.modes.clone();
        let mut sorted_new = order.to_vec();
        sorted_self.sort();
        sorted_new.sort();
        if sorted_self != sorted_new {
            return Err(Error::ModeMismatch {
                expected: self.modes.clone(),
                found: order.to_vec(),
            });
        }
        // source position of each target position
        let src: Vec<usize> = order
            .iter()
            .map(|m| self.modes.iter().position(|x| x == m).unwrap())
            .collect();
        let mut amps = vec![ZERO; self.amps.len()];
        for (new_index, slot) in amps.iter_mut().enumerate() {
            let old_index = (0..n).fold(0usize, |acc, k| {
                acc | (bit_of(new_index, k, n) << (n - 1 - src[k]))
            });
            *slot = self.amps[old_index];
        }
        Ok(PureState {
            modes: order.to_vec(),
            amps,
        })
    }

    /// Tensor product, `self` modes first.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let mut modes = self.modes.clone();
        modes.extend_from_slice(&other.modes);
        check_modes(&modes)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(PureState { modes, amps })
    }
}

/// A 2×2 single-qubit unitary, rows indexed by output bit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalUnitary {
    m: [[Complex64; 2]; 2],
}

impl LocalUnitary {
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let u = LocalUnitary { m };
        let deviation = u.unitarity_deviation();
        if deviation > EXACT_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(u)
    }

    pub fn identity() -> Self {
        LocalUnitary {
            m: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn dagger(&self) -> Self {
        let m = self.m;
        LocalUnitary {
            m: [
                [m[0][0].conj(), m[1][0].conj()],
                [m[0][1].conj(), m[1][1].conj()],
            ],
        }
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &LocalUnitary) -> Self {
        let (a, b) = (self.m, rhs.m);
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        LocalUnitary { m: out }
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// max |(U†U − I)_ij|
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.dagger().compose(self);
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((p.m[i][j] - target).norm());
            }
        }
        worst
    }
}

/// R(x) = (1/√2)[[1, 1], [1, −1]].
pub fn rotation_rx() -> LocalUnitary {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    LocalUnitary {
        m: [[h, h], [h, -h]],
    }
}

/// R(y) = (1/√2)[[1, i], [i, 1]].
pub fn rotation_ry() -> LocalUnitary {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let ih = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    LocalUnitary {
        m: [[h, ih], [ih, h]],
    }
}

/// Applies `ops[k]` to qubit `k` of `state`.
pub fn apply_locals(state: &PureState, ops: &[LocalUnitary]) -> Result<PureState> {
    let n = state.num_qubits();
    if ops.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: ops.len(),
        });
    }
    let mut amps = state.amps.clone();
    for (k, op) in ops.iter().enumerate() {
        let stride = 1usize << (n - 1 - k);
        for i in 0..amps.len() {
            if i & stride == 0 {
                let [a0, a1] = op.apply([amps[i], amps[i | stride]]);
                amps[i] = a0;
                amps[i | stride] = a1;
            }
        }
    }
    Ok(PureState {
        modes: state.modes.clone(),
        amps,
    })
}

/// Orthonormal measurement basis for one qubit. Outcome bit `b` is the
/// projection onto `vectors[b]` (components in H, V order).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementBasis {
    vectors: [[Complex64; 2]; 2],
}

impl MeasurementBasis {
    pub fn new(vectors: [[Complex64; 2]; 2]) -> Result<Self> {
        let dot = |u: [Complex64; 2], v: [Complex64; 2]| u[0].conj() * v[0] + u[1].conj() * v[1];
        let [u, v] = vectors;
        let ok = (dot(u, u).re - 1.0).abs() <= EXACT_TOL
            && (dot(v, v).re - 1.0).abs() <= EXACT_TOL
            && dot(u, v).norm() <= EXACT_TOL;
        if !ok {
            return Err(Error::NonOrthonormalBasis { index: 0 });
        }
        Ok(MeasurementBasis { vectors })
    }

    /// H (outcome 0) / V (outcome 1).
    pub fn computational() -> Self {
        MeasurementBasis {
            vectors: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    /// + = (H+V)/√2 (outcome 0) / − = (H−V)/√2 (outcome 1).
    pub fn diagonal() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        MeasurementBasis {
            vectors: [
                [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
                [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
            ],
        }
    }

    /// Linear polarizer at angle `alpha` from H (outcome 0) and its orthogonal partner.
    pub fn linear(alpha: f64) -> Self {
        let (s, c) = alpha.sin_cos();
        MeasurementBasis {
            vectors: [
                [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
                [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)],
            ],
        }
    }

    /// Measuring in this basis after applying `u` is the same as measuring
    /// in the basis `u†|b⟩`.
    pub fn rotated_computational(u: &LocalUnitary) -> Self {
        let d = u.dagger().matrix();
        MeasurementBasis {
            vectors: [[d[0][0], d[1][0]], [d[0][1], d[1][1]]],
        }
    }

    pub fn vectors(&self) -> [[Complex64; 2]; 2] {
        self.vectors
    }

    /// Unitary whose row `b` is ⟨v_b|, so that its action followed by a
    /// computational measurement reproduces this basis.
    fn analysis_unitary(&self) -> LocalUnitary {
        let [u, v] = self.vectors;
        LocalUnitary {
            m: [[u[0].conj(), u[1].conj()], [v[0].conj(), v[1].conj()]],
        }
    }
}

/// Probabilities of all 2^n joint outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    modes: Vec<Mode>,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(modes: Vec<Mode>, probs: Vec<f64>) -> Result<Self> {
        let dim = 1usize << modes.len();
        if probs.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: probs.len(),
            });
        }
        if probs
            .iter()
            .any(|p| !p.is_finite() || *p < -PIPELINE_TOL || *p > 1.0 + PIPELINE_TOL)
        {
            return Err(Error::InvalidArgument(
                "probabilities must lie in [0, 1]".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PIPELINE_TOL {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let probs = probs.into_iter().map(|p| p.clamp(0.0, 1.0)).collect();
        Ok(OutcomeDistribution { modes, probs })
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, index: usize) -> f64 {
        self.probs[index]
    }

    pub fn num_qubits(&self) -> usize {
        self.modes.len()
    }

    /// Probability that the XOR of all outcome bits equals `parity`.
    pub fn parity_probability(&self, parity: u8) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(i, _)| (i.count_ones() as u8 & 1) == (parity & 1))
            .map(|(_, p)| p)
            .sum()
    }

    /// Σ (−1)^{number of 1 bits} P, the ±1-valued product expectation.
    pub fn parity_expectation(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, p)| if i.count_ones() % 2 == 0 { *p } else { -*p })
            .sum()
    }
}

/// Anything that yields Born-rule statistics for product measurements.
pub trait Measurable {
    fn modes(&self) -> &[Mode];

    /// Joint outcome distribution with one basis per mode.
    fn born_distribution(&self, bases: &[MeasurementBasis]) -> Result<OutcomeDistribution>;

    /// Probability of the single product outcome ⊗ₖ|vₖ⟩ (unit vectors).
    fn product_probability(&self, vectors: &[[Complex64; 2]]) -> Result<f64>;
}

impl Measurable for PureState {
    fn modes(&self) -> &[Mode] {
        &self.modes
    }

    fn born_distribution(&self, bases: &[MeasurementBasis]) -> Result<OutcomeDistribution> {
        let ops: Vec<LocalUnitary> = bases.iter().map(|b| b.analysis_unitary()).collect();
        let rotated = apply_locals(self, &ops)?;
        OutcomeDistribution::new(
            self.modes.clone(),
            rotated.amps.iter().map(|a| a.norm_sqr()).collect(),
        )
    }

    fn product_probability(&self, vectors: &[[Complex64; 2]]) -> Result<f64> {
        let n = self.num_qubits();
        if vectors.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: vectors.len(),
            });
        }
        let overlap: Complex64 = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                vectors
                    .iter()
                    .enumerate()
                    .fold(*a, |acc, (k, v)| acc * v[bit_of(i, k, n)].conj())
            })
            .sum();
        Ok(overlap.norm_sqr())
    }
}

/// ρ = weight·|ψ⟩⟨ψ| + (1 − weight)·I/2ⁿ.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisyState {
    pure: PureState,
    weight: f64,
}

impl NoisyState {
    pub fn pure_part(&self) -> &PureState {
        &self.pure
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Applies the same local unitaries to the pure part; white noise is invariant.
    pub fn apply_locals(&self, ops: &[LocalUnitary]) -> Result<NoisyState> {
        Ok(NoisyState {
            pure: apply_locals(&self.pure, ops)?,
            weight: self.weight,
        })
    }
}

pub fn mix_with_white_noise(state: &PureState, weight: f64) -> Result<NoisyState> {
    if !(0.0..=1.0).contains(&weight) {
        return Err(Error::WeightOutOfRange(weight));
    }
    Ok(NoisyState {
        pure: state.clone(),
        weight,
    })
}

impl Measurable for NoisyState {
    fn modes(&self) -> &[Mode] {
        self.pure.modes()
    }

    fn born_distribution(&self, bases: &[MeasurementBasis]) -> Result<OutcomeDistribution> {
        let pure = self.pure.born_distribution(bases)?;
        let uniform = 1.0 / pure.probs.len() as f64;
        let probs = pure
            .probs
            .iter()
            .map(|p| self.weight * p + (1.0 - self.weight) * uniform)
            .collect();
        OutcomeDistribution::new(pure.modes, probs)
    }

    fn product_probability(&self, vectors: &[[Complex64; 2]]) -> Result<f64> {
        let p = self.pure.product_probability(vectors)?;
        Ok(self.weight * p + (1.0 - self.weight) / self.pure.dim() as f64)
    }
}

/// Single-qubit unitary with exact entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactUnitary {
    m: [[ExactComplex; 2]; 2],
}

impl ExactUnitary {
    pub fn new(m: [[ExactComplex; 2]; 2]) -> Self {
        ExactUnitary { m }
    }

    pub fn rx() -> Self {
        let h = ExactComplex::real(Surd::inv_sqrt2());
        ExactUnitary::new([[h.clone(), h.clone()], [h.clone(), -h]])
    }

    pub fn ry() -> Self {
        let h = ExactComplex::real(Surd::inv_sqrt2());
        let ih = ExactComplex::new(Surd::zero(), Surd::inv_sqrt2());
        ExactUnitary::new([[h.clone(), ih.clone()], [ih, h]])
    }

    pub fn matrix(&self) -> &[[ExactComplex; 2]; 2] {
        &self.m
    }

    pub fn to_local(&self) -> LocalUnitary {
        let c = |z: &ExactComplex| z.to_complex64();
        LocalUnitary {
            m: [
                [c(&self.m[0][0]), c(&self.m[0][1])],
                [c(&self.m[1][0]), c(&self.m[1][1])],
            ],
        }
    }
}

/// A state with exact, possibly unnormalized amplitudes. Probabilities are
/// always taken relative to `norm_sqr`, so the normalization constant never
/// has to be represented (it may lie outside ℚ(√2), e.g. 1/√3).
#[derive(Clone, Debug, PartialEq)]
pub struct ExactState {
    modes: Vec<Mode>,
    amps: Vec<ExactComplex>,
}

impl ExactState {
    pub fn new(modes: Vec<Mode>, amps: Vec<ExactComplex>) -> Result<Self> {
        check_modes(&modes)?;
        let dim = 1usize << modes.len();
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amps.len(),
            });
        }
        if amps.iter().all(ExactComplex::is_zero) {
            return Err(Error::NotNormalized { norm: 0.0 });
        }
        Ok(ExactState { modes, amps })
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn amplitudes(&self) -> &[ExactComplex] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> Surd {
        self.amps
            .iter()
            .fold(Surd::zero(), |acc, a| &acc + &a.norm_sqr())
    }

    pub fn apply_locals(&self, ops: &[ExactUnitary]) -> Result<ExactState> {
        let n = self.modes.len();
        if ops.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: ops.len(),
            });
        }
        let mut amps = self.amps.clone();
        for (k, op) in ops.iter().enumerate() {
            let stride = 1usize << (n - 1 - k);
            let m = &op.m;
            for i in 0..amps.len() {
                if i & stride == 0 {
                    let (a0, a1) = (amps[i].clone(), amps[i | stride].clone());
                    amps[i] = &(&m[0][0] * &a0) + &(&m[0][1] * &a1);
                    amps[i | stride] = &(&m[1][0] * &a0) + &(&m[1][1] * &a1);
                }
            }
        }
        Ok(ExactState {
            modes: self.modes.clone(),
            amps,
        })
    }

    /// Exact computational-basis probabilities, relative to the state norm.
    pub fn probabilities(&self) -> Vec<Surd> {
        let norm = self.norm_sqr();
        self.amps
            .iter()
            .map(|a| a.norm_sqr().div(&norm).expect("nonzero norm"))
            .collect()
    }

    /// Exact probability that the computational outcome has the given parity.
    pub fn parity_probability(&self, parity: u8) -> Surd {
        let norm = self.norm_sqr();
        let kept = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i.count_ones() as u8 & 1) == (parity & 1))
            .fold(Surd::zero(), |acc, (_, a)| &acc + &a.norm_sqr());
        kept.div(&norm).expect("nonzero norm")
    }

    /// Same as `parity_probability` but insisting on a rational value.
    pub fn parity_probability_rational(&self, parity: u8) -> Result<BigRational> {
        self.parity_probability(parity).to_rational().ok_or_else(|| {
            Error::InvalidArgument("parity probability is irrational".into())
        })
    }

    pub fn to_pure(&self) -> PureState {
        let norm = self.norm_sqr().to_f64().sqrt();
        let amps = self.amps.iter().map(|a| a.to_complex64() / norm).collect();
        PureState::normalized(self.modes.clone(), amps).expect("exact state has nonzero norm")
    }
}
