//! Polarization analysis: phase-parameterized analyzers, the four-fold
//! correlation function, fringe scans, sinusoid fits and simulated counts.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use crate::error::{Error, Result};
use crate::mode::Mode;
use crate::state::{apply_locals, LocalUnitary, Measurable, MeasurementBasis, PureState};

/// Minimum grid size for anything that is later fitted.
pub const MIN_FIT_POINTS: usize = 4;

/// Analyzer with eigenvectors |l, φ⟩ = (|V⟩ + l·e^{−iφ}|H⟩)/√2, l = ±1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyzerSetting {
    pub phi: f64,
}

impl AnalyzerSetting {
    pub fn new(phi: f64) -> Self {
        AnalyzerSetting { phi }
    }

    /// Components in (H, V) order. `l` is taken by sign.
    pub fn eigenvector(&self, l: i8) -> [Complex64; 2] {
        let sign = if l >= 0 { 1.0 } else { -1.0 };
        let h = Complex64::from_polar(sign * FRAC_1_SQRT_2, -self.phi);
        [h, Complex64::new(FRAC_1_SQRT_2, 0.0)]
    }

    /// Outcome bit 0 is l = +1, bit 1 is l = −1.
    pub fn basis(&self) -> MeasurementBasis {
        MeasurementBasis::new([self.eigenvector(1), self.eigenvector(-1)])
            .expect("analyzer eigenvectors are orthonormal")
    }

    /// Rank-one projectors onto |+1, φ⟩ and |−1, φ⟩.
    pub fn projectors(&self) -> [[[Complex64; 2]; 2]; 2] {
        let outer = |v: [Complex64; 2]| {
            [
                [v[0] * v[0].conj(), v[0] * v[1].conj()],
                [v[1] * v[0].conj(), v[1] * v[1].conj()],
            ]
        };
        [outer(self.eigenvector(1)), outer(self.eigenvector(-1))]
    }

    /// The ±1-valued observable Σ l·|l, φ⟩⟨l, φ|, written out directly.
    pub fn observable(&self) -> LocalUnitary {
        let zero = Complex64::new(0.0, 0.0);
        LocalUnitary::new([
            [zero, Complex64::from_polar(1.0, -self.phi)],
            [Complex64::from_polar(1.0, self.phi), zero],
        ])
        .expect("observable is a reflection")
    }
}

/// One analyzer phase per detector mode, addressed by name so the
/// (c, e, d, f) argument order of the correlation function cannot be
/// confused with the (c, d, e, f) order of the state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Phases {
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl Phases {
    pub fn zero() -> Self {
        Phases::default()
    }

    pub fn get(&self, mode: Mode) -> Result<f64> {
        match mode {
            Mode::C => Ok(self.c),
            Mode::D => Ok(self.d),
            Mode::E => Ok(self.e),
            Mode::F => Ok(self.f),
            other => Err(Error::UnknownMode {
                mode: other,
                context: "analyzers sit on detector modes c, d, e, f",
            }),
        }
    }

    pub fn with(mut self, mode: Mode, phi: f64) -> Result<Self> {
        match mode {
            Mode::C => self.c = phi,
            Mode::D => self.d = phi,
            Mode::E => self.e = phi,
            Mode::F => self.f = phi,
            other => {
                return Err(Error::UnknownMode {
                    mode: other,
                    context: "analyzers sit on detector modes c, d, e, f",
                })
            }
        }
        Ok(self)
    }

    /// Analyzer bases in the mode order of `modes`.
    pub fn bases_for(&self, modes: &[Mode]) -> Result<Vec<MeasurementBasis>> {
        modes
            .iter()
            .map(|&m| Ok(AnalyzerSetting::new(self.get(m)?).basis()))
            .collect()
    }
}

/// E = Σ l_c l_e l_d l_f · P_{l_c l_e l_d l_f}, from the Born distribution.
pub fn correlation<S: Measurable + ?Sized>(state: &S, phases: &Phases) -> Result<f64> {
    let bases = phases.bases_for(state.modes())?;
    let dist = state.born_distribution(&bases)?;
    Ok(dist.parity_expectation())
}

/// ⟨ψ| O_c ⊗ O_d ⊗ O_e ⊗ O_f |ψ⟩ with O_φ = [[0, e^{−iφ}], [e^{iφ}, 0]].
pub fn correlation_expectation(state: &PureState, phases: &Phases) -> Result<f64> {
    let ops = state
        .modes()
        .iter()
        .map(|&m| Ok(AnalyzerSetting::new(phases.get(m)?).observable()))
        .collect::<Result<Vec<_>>>()?;
    let transformed = apply_locals(state, &ops)?;
    Ok(state.inner(&transformed)?.re)
}

/// Whether a curve holds probabilities or ±1-valued correlations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Probability,
    Correlation,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FringeCurve {
    pub kind: CurveKind,
    pub angles: Vec<f64>,
    pub values: Vec<f64>,
    pub counts: Option<Vec<u64>>,
    pub errors: Option<Vec<f64>>,
}

impl FringeCurve {
    pub fn new(kind: CurveKind, angles: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if angles.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: angles.len(),
                found: values.len(),
            });
        }
        if angles.iter().any(|a| !a.is_finite()) || angles.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::GridNotIncreasing);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("curve values must be finite".into()));
        }
        Ok(FringeCurve {
            kind,
            angles,
            values,
            counts: None,
            errors: None,
        })
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// `points` angles starting at `start`, evenly spaced over the half-open
/// interval [start, stop).
pub fn uniform_grid(start: f64, stop: f64, points: usize) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite()) || stop <= start {
        return Err(Error::GridNotIncreasing);
    }
    let step = (stop - start) / points as f64;
    Ok((0..points).map(|i| start + step * i as f64).collect())
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < MIN_FIT_POINTS {
        return Err(Error::GridTooSmall {
            points: grid.len(),
            min: MIN_FIT_POINTS,
        });
    }
    Ok(())
}

/// E as a function of one analyzer phase, the other three held at 0.
pub fn correlation_scan<S: Measurable + ?Sized>(
    state: &S,
    varying: Mode,
    grid: &[f64],
) -> Result<FringeCurve> {
    check_grid(grid)?;
    let values = grid
        .iter()
        .map(|&phi| correlation(state, &Phases::zero().with(varying, phi)?))
        .collect::<Result<Vec<_>>>()?;
    FringeCurve::new(CurveKind::Correlation, grid.to_vec(), values)
}

/// Four-fold probability with c, d, e projected on + (+45°) and f on the linear
/// polarization at angle θ from +, for every θ in `grid`.
pub fn fringe_scan_linear<S: Measurable + ?Sized>(state: &S, grid: &[f64]) -> Result<FringeCurve> {
    let plus = [Complex64::new(FRAC_1_SQRT_2, 0.0); 2];
    let modes = state.modes().to_vec();
    let mut sorted = modes.clone();
    sorted.sort();
    if sorted != Mode::DETECTORS {
        return Err(Error::ModeMismatch {
            expected: Mode::DETECTORS.to_vec(),
            found: modes,
        });
    }
    let values = grid
        .iter()
        .map(|&theta| {
            let alpha = FRAC_PI_4 + theta;
            let aligned = [Complex64::new(alpha.cos(), 0.0), Complex64::new(alpha.sin(), 0.0)];
            let vectors: Vec<[Complex64; 2]> = modes
                .iter()
                .map(|&m| if m == Mode::F { aligned } else { plus })
                .collect();
            state.product_probability(&vectors)
        })
        .collect::<Result<Vec<_>>>()?;
    FringeCurve::new(CurveKind::Probability, grid.to_vec(), values)
}

/// offset + amplitude·cos(k·θ + phase), fitted by linear least squares.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub harmonic: u32,
    pub offset: f64,
    pub amplitude: f64,
    pub phase: f64,
    /// amplitude/offset for probability curves, amplitude for correlation curves.
    pub visibility: f64,
    pub residual_rms: f64,
}

impl FitResult {
    pub fn evaluate(&self, theta: f64) -> f64 {
        self.offset + self.amplitude * (self.harmonic as f64 * theta + self.phase).cos()
    }
}

pub fn fit_sinusoid(curve: &FringeCurve, harmonic: u32) -> Result<FitResult> {
    check_grid(&curve.angles)?;
    if harmonic == 0 {
        return Err(Error::InvalidArgument("harmonic must be at least 1".into()));
    }
    let k = harmonic as f64;
    let n = curve.len();
    // offset + p·cos kθ + q·sin kθ, with p = A cos φ and q = −A sin φ
    let design = DMatrix::from_fn(n, 3, |i, j| {
        let t = k * curve.angles[i];
        match j {
            0 => 1.0,
            1 => t.cos(),
            _ => t.sin(),
        }
    });
    let y = DVector::from_column_slice(&curve.values);
    let svd = design.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    if s_max == 0.0 || s_min / s_max < 1e-10 {
        return Err(Error::DegenerateFit);
    }
    let coef = svd.solve(&y, 0.0).map_err(|_| Error::DegenerateFit)?;
    let (offset, p, q) = (coef[0], coef[1], coef[2]);
    let amplitude = p.hypot(q);
    let phase = if amplitude == 0.0 { 0.0 } else { (-q).atan2(p) };
    let residual = &y - &design * &coef;
    let residual_rms = (residual.norm_squared() / n as f64).sqrt();
    let visibility = match curve.kind {
        CurveKind::Correlation => amplitude,
        CurveKind::Probability => {
            if offset <= 0.0 {
                return Err(Error::UndefinedVisibility { offset });
            }
            amplitude / offset
        }
    };
    Ok(FitResult {
        harmonic,
        offset,
        amplitude,
        phase,
        visibility,
        residual_rms,
    })
}

/// Simulated detection counts over all joint outcomes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountSample {
    pub counts: Vec<u64>,
    pub total: u64,
    /// √count per outcome.
    pub std_errors: Vec<f64>,
}

impl CountSample {
    pub fn frequencies(&self) -> Vec<f64> {
        if self.total == 0 {
            return vec![0.0; self.counts.len()];
        }
        self.counts
            .iter()
            .map(|&c| c as f64 / self.total as f64)
            .collect()
    }
}

/// Multinomial draw of `n` events from `probs`, reproducible for a given seed.
pub fn sample_multinomial(probs: &[f64], n: u64, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = n;
    let mut mass: f64 = probs.iter().sum();
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == probs.len() {
            counts[i] = remaining;
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = if q >= 1.0 {
            remaining
        } else if q <= 0.0 {
            0
        } else {
            Binomial::new(remaining, q)
                .expect("q in (0, 1)")
                .sample(&mut rng)
        };
        counts[i] = draw;
        remaining -= draw;
        mass -= p;
    }
    counts
}

pub fn sample_counts(dist: &crate::state::OutcomeDistribution, n: u64, seed: u64) -> CountSample {
    let counts = sample_multinomial(dist.probabilities(), n, seed);
    let std_errors = counts.iter().map(|&c| (c as f64).sqrt()).collect();
    CountSample {
        counts,
        total: n,
        std_errors,
    }
}

/// Binomial standard error √(p̂(1 − p̂)/n) of an empirical frequency.
pub fn binomial_std_error(p_hat: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (p_hat * (1.0 - p_hat) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::four_photon_state;
    use crate::state::{mix_with_white_noise, PIPELINE_TOL};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn eq2() -> PureState {
        four_photon_state().state
    }

    #[test]
    fn analyzer_at_zero_is_diagonal_basis() {
        let v = AnalyzerSetting::new(0.0).basis().vectors();
        let d = MeasurementBasis::diagonal().vectors();
        assert!((v[0][0] - d[0][0]).norm() < 1e-15 && (v[0][1] - d[0][1]).norm() < 1e-15);
        // −1 eigenvector is (V − H)/√2 = −(H − V)/√2
        assert!((v[1][0] + d[1][0]).norm() < 1e-15 && (v[1][1] + d[1][1]).norm() < 1e-15);
    }

    #[test]
    fn analyzer_at_pi_swaps_labels() {
        let a = AnalyzerSetting::new(0.0).projectors();
        let b = AnalyzerSetting::new(PI).projectors();
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[0][i][j] - b[1][i][j]).norm() < 1e-12);
                assert!((a[1][i][j] - b[0][i][j]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn analyzer_at_half_pi_is_circular() {
        let s = AnalyzerSetting::new(FRAC_PI_2);
        let plus = s.eigenvector(1);
        assert!((plus[0] - Complex64::new(0.0, -FRAC_1_SQRT_2)).norm() < 1e-15);
        let minus = s.eigenvector(-1);
        assert!((minus[0] - Complex64::new(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn correlation_at_special_phases() {
        let s = eq2();
        let e = |c| correlation(&s, &Phases { c, ..Phases::zero() }).unwrap();
        assert!((e(0.0) - 1.0).abs() < 1e-12);
        assert!((e(PI) + 1.0).abs() < 1e-12);
        assert!(e(FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn correlation_scan_on_ghz_is_cosine() {
        let ghz = PureState::ghz(Mode::DETECTORS.to_vec()).unwrap();
        let grid = uniform_grid(0.0, 2.0 * PI, 16).unwrap();
        for mode in Mode::DETECTORS {
            let curve = correlation_scan(&ghz, mode, &grid).unwrap();
            for (phi, e) in curve.angles.iter().zip(&curve.values) {
                assert!((e - phi.cos()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn correlation_scan_on_product_state_is_flat() {
        let hhhh = PureState::basis(Mode::DETECTORS.to_vec(), 0).unwrap();
        let grid = uniform_grid(0.0, 2.0 * PI, 8).unwrap();
        let curve = correlation_scan(&hhhh, Mode::C, &grid).unwrap();
        assert!(curve.values.iter().all(|e| e.abs() < 1e-12));
    }

    #[test]
    fn scans_reject_short_grids() {
        let err = correlation_scan(&eq2(), Mode::C, &[0.0, FRAC_PI_2, PI]).unwrap_err();
        assert!(matches!(err, Error::GridTooSmall { points: 3, .. }));
        assert!(correlation_scan(&eq2(), Mode::A, &[0.0, 1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn linear_fringe_endpoints() {
        let c = fringe_scan_linear(&eq2(), &[0.0, FRAC_PI_2]).unwrap();
        assert!((c.values[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!(c.values[1].abs() < 1e-12);
    }

    #[test]
    fn fit_recovers_cos_squared() {
        let grid = uniform_grid(0.0, PI, 12).unwrap();
        let values = grid.iter().map(|t| t.cos().powi(2) / 3.0).collect();
        let curve = FringeCurve::new(CurveKind::Probability, grid, values).unwrap();
        let fit = fit_sinusoid(&curve, 2).unwrap();
        assert!((fit.visibility - 1.0).abs() < 1e-9);
        assert!((fit.offset - 1.0 / 6.0).abs() < 1e-9);
        assert!((fit.amplitude - 1.0 / 6.0).abs() < 1e-9);
        assert!(fit.phase.abs() < 1e-9);
        assert!(fit.residual_rms < 1e-12);
    }

    #[test]
    fn fit_of_flat_curve() {
        let grid = uniform_grid(0.0, PI, 8).unwrap();
        let curve = FringeCurve::new(CurveKind::Probability, grid, vec![0.25; 8]).unwrap();
        let fit = fit_sinusoid(&curve, 2).unwrap();
        assert!(fit.amplitude < 1e-12 && fit.visibility < 1e-12);
        assert!((fit.offset - 0.25).abs() < 1e-12);
    }

    #[test]
    fn fit_degenerate_and_invalid() {
        // every angle a multiple of π makes sin 2θ vanish identically
        let curve = FringeCurve::new(
            CurveKind::Probability,
            vec![0.0, PI, 2.0 * PI, 3.0 * PI],
            vec![0.1, 0.2, 0.1, 0.2],
        )
        .unwrap();
        assert!(matches!(fit_sinusoid(&curve, 2), Err(Error::DegenerateFit)));
        assert!(FringeCurve::new(CurveKind::Probability, vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        let zero = FringeCurve::new(CurveKind::Probability, vec![0.0, 0.5, 1.0, 1.5], vec![0.0; 4])
            .unwrap();
        assert!(matches!(
            fit_sinusoid(&zero, 2),
            Err(Error::UndefinedVisibility { .. })
        ));
    }

    #[test]
    fn fit_of_noisy_fringe_matches_closed_form() {
        // closed form: v/3·cos²θ + (1−v)/16 = [v/6 + (1−v)/16] + (v/6)·cos 2θ
        let grid = uniform_grid(0.0, PI, 24).unwrap();
        for v in [0.0, 0.3, 0.9, 1.0] {
            let noisy = mix_with_white_noise(&eq2(), v).unwrap();
            let fit = fit_sinusoid(&fringe_scan_linear(&noisy, &grid).unwrap(), 2).unwrap();
            let expected = (v / 6.0) / (v / 6.0 + (1.0 - v) / 16.0);
            assert!((fit.visibility - expected).abs() < PIPELINE_TOL, "v={v}");
        }
    }

    #[test]
    fn sample_edge_cases() {
        assert_eq!(sample_multinomial(&[0.5, 0.5], 0, 3), vec![0, 0]);
        assert_eq!(sample_multinomial(&[0.0, 1.0, 0.0], 1000, 3), vec![0, 1000, 0]);
        assert_eq!(sample_multinomial(&[1.0, 0.0, 0.0], 1000, 3), vec![1000, 0, 0]);
        let a = sample_multinomial(&[0.2, 0.3, 0.5], 10_000, 42);
        assert_eq!(a, sample_multinomial(&[0.2, 0.3, 0.5], 10_000, 42));
        assert_eq!(a.iter().sum::<u64>(), 10_000);
    }
}
