use std::f64::consts::PI;

use fourphoton::mode::Mode;
use fourphoton::polarimetry::{
    correlation_expectation, uniform_grid, CurveKind, FringeCurve, MIN_FIT_POINTS,
};
use fourphoton::qccs::{self, LowBits, QccsInputs};
use fourphoton::state::{NoisyState, EXACT_TOL};
use fourphoton::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn su2(alpha: f64, beta: f64, gamma: f64, theta: f64) -> LocalUnitary {
    let g = Complex64::from_polar(1.0, alpha);
    let (c, s) = (theta.cos(), theta.sin());
    LocalUnitary::new([
        [g * Complex64::from_polar(c, beta), g * Complex64::from_polar(s, gamma)],
        [-g * Complex64::from_polar(s, -gamma), g * Complex64::from_polar(c, -beta)],
    ])
    .unwrap()
}

fn unitary() -> impl Strategy<Value = LocalUnitary> {
    (0.0..2.0 * PI, 0.0..2.0 * PI, 0.0..2.0 * PI, 0.0..PI).prop_map(|(a, b, g, t)| su2(a, b, g, t))
}

fn state() -> impl Strategy<Value = PureState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16)
        .prop_filter("nonzero", |v| v.iter().any(|(r, i)| r.abs() + i.abs() > 1e-3))
        .prop_map(|v| {
            let amps = v.into_iter().map(|(r, i)| Complex64::new(r, i)).collect();
            PureState::normalized(Mode::DETECTORS.to_vec(), amps).unwrap()
        })
}

fn phases() -> impl Strategy<Value = Phases> {
    prop::array::uniform4(-PI..PI).prop_map(|p| Phases {
        c: p[0],
        d: p[1],
        e: p[2],
        f: p[3],
    })
}

fn eq2() -> PureState {
    four_photon_state().state
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn local_unitaries_preserve_norm(psi in state(), us in prop::collection::vec(unitary(), 4)) {
        for u in &us {
            prop_assert!(u.unitarity_deviation() < EXACT_TOL);
        }
        let out = apply_locals(&psi, &us).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < EXACT_TOL);
    }

    #[test]
    fn global_phase_is_unobservable(psi in state(), alpha in 0.0..2.0 * PI, p in phases()) {
        let bases = p.bases_for(psi.modes()).unwrap();
        let a = psi.born_distribution(&bases).unwrap();
        let b = psi.with_global_phase(alpha).born_distribution(&bases).unwrap();
        for (x, y) in a.probabilities().iter().zip(b.probabilities()) {
            prop_assert!((x - y).abs() < EXACT_TOL);
        }
        prop_assert!((a.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn analyzer_projectors_are_complete(phi in -10.0..10.0f64) {
        let [p, m] = AnalyzerSetting::new(phi).projectors();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!(((p[i][j] + m[i][j]) - Complex64::new(want, 0.0)).norm() < EXACT_TOL);
            }
        }
    }

    #[test]
    fn correlation_two_routes_agree(psi in state(), p in phases()) {
        let born = correlation(&psi, &p).unwrap();
        let direct = correlation_expectation(&psi, &p).unwrap();
        prop_assert!(born.abs() <= 1.0 + 1e-12);
        prop_assert!((born - direct).abs() < 1e-9);
    }

    #[test]
    fn single_phase_shift_flips_correlation(p in phases(), k in 0usize..4, v in 0.0..=1.0f64) {
        let rho = mix_with_white_noise(&eq2(), v).unwrap();
        let mode = Mode::DETECTORS[k];
        let shifted = p.with(mode, p.get(mode).unwrap() + PI).unwrap();
        let e = correlation(&rho, &p).unwrap();
        let f = correlation(&rho, &shifted).unwrap();
        prop_assert!((e + f).abs() < 1e-9);
    }

    #[test]
    fn fit_recovers_model_parameters(
        offset in 0.5..2.0f64,
        amp in 0.0..0.5f64,
        phase in -3.0..3.0f64,
        k in 1u32..4,
        points in MIN_FIT_POINTS + 4..40,
    ) {
        let grid = uniform_grid(0.0, 2.0 * PI, points).unwrap();
        let values = grid.iter().map(|t| offset + amp * (k as f64 * t + phase).cos()).collect();
        let curve = FringeCurve::new(CurveKind::Probability, grid, values).unwrap();
        let fit = fit_sinusoid(&curve, k).unwrap();
        prop_assert!((fit.offset - offset).abs() < 1e-9);
        prop_assert!((fit.amplitude - amp).abs() < 1e-9);
        prop_assert!((fit.visibility - amp / offset).abs() < 1e-9);
        if amp > 1e-3 {
            let d = (fit.phase - phase).rem_euclid(2.0 * PI);
            prop_assert!(d.min(2.0 * PI - d) < 1e-9);
        }
    }

    #[test]
    fn noise_closed_form_for_parity_events(v in 0.0..=1.0f64, p in phases()) {
        let pure = eq2();
        let rho: NoisyState = mix_with_white_noise(&pure, v).unwrap();
        let bases = p.bases_for(pure.modes()).unwrap();
        let dp = pure.born_distribution(&bases).unwrap();
        let dn = rho.born_distribution(&bases).unwrap();
        for parity in 0..2 {
            let want = v * dp.parity_probability(parity) + (1.0 - v) * 8.0 / 16.0;
            prop_assert!((dn.parity_probability(parity) - want).abs() < 1e-12);
        }
        prop_assert!((dn.parity_probability(0) + dn.parity_probability(1) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn success_depends_only_on_low_bits() {
    let exact = four_photon_state().exact;
    for low in LowBits::TABLE_ORDER {
        let reference = quantum_success_probability(low, &exact).unwrap();
        for high in 0..16u8 {
            let bits = [(high >> 3) & 1, (high >> 2) & 1, (high >> 1) & 1, high & 1];
            let inputs = QccsInputs::from_bits(bits, low);
            assert_eq!(inputs.low_bits(), low);
            let p = quantum_success_probability(inputs.low_bits(), &exact).unwrap();
            assert_eq!(p, reference);
        }
    }
}

#[test]
fn decomposition_identity_on_all_promise_inputs() {
    let inputs = qccs::promise_inputs(None);
    assert_eq!(inputs.len(), 128);
    for i in &inputs {
        let (h, f0) = qccs::decompose_f(i).unwrap();
        assert_eq!(h ^ f0, qccs::target_f(i).unwrap());
        assert_eq!(qccs::target_f(i).unwrap() as u32, (i.sum() % 4) / 2);
    }
}

#[test]
fn parity_complement_for_every_rotated_case() {
    let pure = eq2();
    for low in LowBits::TABLE_ORDER {
        let ops: Vec<_> = qccs::assign_rotations(low).iter().map(|r| r.local()).collect();
        let rotated = apply_locals(&pure, &ops).unwrap();
        let d = rotated
            .born_distribution(&vec![MeasurementBasis::computational(); 4])
            .unwrap();
        assert!((d.parity_probability(0) + d.parity_probability(1) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn noisy_success_monotone_in_weight() {
    let pure = eq2();
    for low in LowBits::TABLE_ORDER {
        let p = qccs::success_probability(low, &pure).unwrap();
        assert!(p > 0.5);
        let mut last = f64::INFINITY;
        for step in (0..=10).rev() {
            let v = step as f64 / 10.0;
            let rho = mix_with_white_noise(&pure, v).unwrap();
            let s = qccs::success_probability(low, &rho).unwrap();
            assert!((s - (v * p + (1.0 - v) / 2.0)).abs() < 1e-12);
            assert!(s <= last + 1e-15);
            last = s;
        }
    }
}
