//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fourphoton::exact::{ratio, ExactComplex, Surd};
use fourphoton::polarimetry::{binomial_std_error, uniform_grid};
use fourphoton::qccs::{
    self, average_exact, average_success_exact, classical_search, promise_inputs, table_one,
    LowBits, QccsInputs, Scoring, TableOptions,
};
use fourphoton::*;
use num_rational::BigRational;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(limit: Duration, elapsed: Duration) -> Result<(), String> {
    check(
        elapsed < limit,
        format!("took {:.2}s, limit {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64()),
    )
}

fn table_expected() -> Vec<(u8, BigRational)> {
    vec![
        (0b0000, ratio(1, 1)),
        (0b1111, ratio(1, 1)),
        (0b0011, ratio(5, 6)),
        (0b1100, ratio(5, 6)),
        (0b0110, ratio(5, 6)),
        (0b1001, ratio(5, 6)),
        (0b0101, ratio(2, 3)),
        (0b1010, ratio(2, 3)),
    ]
}

fn state_derivation() -> Outcome {
    let t = Instant::now();
    let ps = four_photon_state();
    // unnormalized amplitudes relative to |HHHH⟩, and the squared norm in those units
    let amps = ps.exact.amplitudes();
    let expected: [(usize, BigRational); 6] = [
        (0b0000, ratio(1, 1)),
        (0b0011, ratio(1, 2)),
        (0b0110, ratio(1, 2)),
        (0b1001, ratio(1, 2)),
        (0b1100, ratio(1, 2)),
        (0b1111, ratio(1, 1)),
    ];
    let base = amps[0].clone();
    check(!base.is_zero(), "HHHH amplitude vanishes")?;
    for (i, a) in amps.iter().enumerate() {
        let want = expected
            .iter()
            .find(|(k, _)| *k == i)
            .map(|(_, r)| ExactComplex::real(Surd::from_rational(r.clone())))
            .unwrap_or_else(ExactComplex::zero);
        check(
            *a == &base * &want,
            format!("amplitude {i} is {a}, expected {want} × {base}"),
        )?;
    }
    let norm = ps.exact.norm_sqr().div(&base.norm_sqr()).expect("nonzero");
    check(norm == Surd::from_int(3), format!("norm² ratio {norm}, expected 3"))?;
    check(
        ps.weight.to_rational() == Some(ratio(1, 4)),
        format!("post-selection weight {}", ps.weight),
    )?;

    let d = ghz_epr_decompose(&ps.state).map_err(|e| e.to_string())?;
    let (g, e) = ((2.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt());
    check(
        (d.ghz.norm() - g).abs() < 1e-12 && (d.epr.norm() - e).abs() < 1e-12,
        format!("overlaps ({}, {})", d.ghz.norm(), d.epr.norm()),
    )?;
    within(Duration::from_secs(1), t.elapsed())?;
    Ok(format!(
        "amplitudes exact, norm² 3, overlaps ({:.15}, {:.15})",
        d.ghz.norm(),
        d.epr.norm()
    ))
}

fn table_theoretical() -> Outcome {
    let t = Instant::now();
    let exact = four_photon_state().exact;
    for (pattern, want) in table_expected() {
        let low = LowBits::new(pattern).unwrap();
        let p = quantum_success_probability(low, &exact).map_err(|e| e.to_string())?;
        check(p == want, format!("{low}: {p}, expected {want}"))?;
    }
    let avg = average_success_exact(&exact).map_err(|e| e.to_string())?;
    check(avg == ratio(5, 6), format!("average {avg}"))?;
    within(Duration::from_secs(1), t.elapsed())?;
    Ok("eight cases exact, average 5/6".into())
}

fn two_epr_baseline() -> Outcome {
    let t = Instant::now();
    let avg = average_success_exact(&two_epr_exact()).map_err(|e| e.to_string())?;
    check(avg == ratio(3, 4), format!("average {avg}, expected 3/4"))?;
    within(Duration::from_secs(1), t.elapsed())?;
    Ok("average exactly 3/4".into())
}

fn classical_limit() -> Outcome {
    let t = Instant::now();
    let inputs = promise_inputs(None);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| e.to_string())?;
    let bound = pool
        .install(|| classical_search(&inputs, 1024))
        .map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    check(
        bound.combinations_visited == 65536,
        format!("visited {}", bound.combinations_visited),
    )?;
    let rule = bound.rule(Scoring::AllCorrect);
    let rescored = qccs::score_strategy(&rule.witness, &inputs).map_err(|e| e.to_string())?;
    check(
        rescored.count(Scoring::AllCorrect) == rule.correct,
        "witness does not re-score to the reported maximum",
    )?;
    within(Duration::from_secs(60), elapsed)?;
    check(
        rule.probability == ratio(1, 2),
        format!(
            "all-correct maximum is {} (witness broadcasts {:?}), expected 1/2",
            fourphoton::io::rational_string(&rule.probability),
            rule.witness.broadcast
        ),
    )?;
    Ok(format!("all-correct maximum 1/2 in {:.2}s", elapsed.as_secs_f64()))
}

fn correlation_visibility() -> Outcome {
    let pure = four_photon_state().state;
    let e0 = correlation(&pure, &Phases::zero()).map_err(|e| e.to_string())?;
    check((e0 - 1.0).abs() < 1e-12, format!("E(0,0,0,0) = {e0}"))?;

    let grid = uniform_grid(0.0, PI, 24).unwrap();
    let fit = |v: f64| -> Result<f64, String> {
        let rho = mix_with_white_noise(&pure, v).map_err(|e| e.to_string())?;
        let curve = fringe_scan_linear(&rho, &grid).map_err(|e| e.to_string())?;
        Ok(fit_sinusoid(&curve, 2).map_err(|e| e.to_string())?.visibility)
    };
    let v1 = fit(1.0)?;
    check((v1 - 1.0).abs() < 1e-9, format!("fitted fringe visibility {v1}"))?;

    let exact = four_photon_state().exact;
    let mut last_vis = f64::INFINITY;
    let mut last_success = [f64::INFINITY; 8];
    for step in (0..=10).rev() {
        let v = step as f64 / 10.0;
        let vis = fit(v)?;
        let closed = (v / 6.0) / (v / 6.0 + (1.0 - v) / 16.0);
        check(
            (vis - closed).abs() < 1e-9,
            format!("v={v}: visibility {vis}, closed form {closed}"),
        )?;
        check(vis <= last_vis + 1e-12, format!("visibility rises at v={v}"))?;
        last_vis = vis;

        let rho = mix_with_white_noise(&pure, v).map_err(|e| e.to_string())?;
        for (k, low) in LowBits::TABLE_ORDER.iter().enumerate() {
            let p = fourphoton::io::rational_to_f64(
                &quantum_success_probability(*low, &exact).map_err(|e| e.to_string())?,
            );
            let s = qccs::success_probability(*low, &rho).map_err(|e| e.to_string())?;
            let want = v * p + (1.0 - v) / 2.0;
            check((s - want).abs() < 1e-9, format!("{low} at v={v}: {s} vs {want}"))?;
            check(s <= last_success[k] + 1e-12, format!("{low} success rises at v={v}"))?;
            last_success[k] = s;
        }
    }
    Ok(format!("E = {e0:.15}, V = {v1:.12}, 11-point noise sweep matches closed forms"))
}

fn monte_carlo() -> Outcome {
    let t = Instant::now();
    let exact = four_photon_state().exact;
    let opts = TableOptions {
        noise_weight: 1.0,
        trials: 100_000,
        seed: 2005,
    };
    let first = table_one(&exact, &opts).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let mut worst = 0.0f64;
    for r in &first {
        let mc = r.monte_carlo.as_ref().ok_or("missing Monte Carlo estimate")?;
        let p = fourphoton::io::rational_to_f64(&r.p_exact);
        let sigma = binomial_std_error(p, mc.trials);
        let dev = (mc.rate - p).abs();
        if sigma == 0.0 {
            check(dev == 0.0, format!("{}: rate {} for a certain outcome", r.pattern, mc.rate))?;
        } else {
            worst = worst.max(dev / sigma);
            check(
                dev <= 5.0 * sigma,
                format!("{}: rate {} vs {p}, {:.2} σ", r.pattern, mc.rate, dev / sigma),
            )?;
        }
    }
    let second = table_one(&exact, &opts).map_err(|e| e.to_string())?;
    check(first == second, "seeded rerun differs")?;
    within(Duration::from_secs(10), elapsed)?;
    check(average_exact(&first) == ratio(5, 6), "table average is not 5/6")?;
    Ok(format!(
        "10^5 trials per case, worst deviation {worst:.2} σ, rerun identical"
    ))
}

fn function_identities() -> Outcome {
    let t = Instant::now();
    let inputs = promise_inputs(None);
    check(inputs.len() == 128, format!("{} promise inputs", inputs.len()))?;
    for i in &inputs {
        let (h, f0) = qccs::decompose_f(i).map_err(|e| e.to_string())?;
        let f = qccs::target_f(i).map_err(|e| e.to_string())?;
        check(h ^ f0 == f, format!("{:?}: {h}⊕{f0} ≠ {f}", i.values()))?;
    }
    let exact = four_photon_state().exact;
    let mut checked = 0;
    for low in LowBits::TABLE_ORDER {
        let reference = quantum_success_probability(low, &exact).map_err(|e| e.to_string())?;
        for high in 0..16u8 {
            let bits = [(high >> 3) & 1, (high >> 2) & 1, (high >> 1) & 1, high & 1];
            let i = QccsInputs::from_bits(bits, low);
            check(qccs::promise_holds(&i), "constructed input violates the promise")?;
            let p = quantum_success_probability(i.low_bits(), &exact).map_err(|e| e.to_string())?;
            check(p == reference, format!("{:?} breaks high-bit invariance", i.values()))?;
            checked += 1;
        }
    }
    within(Duration::from_secs(1), t.elapsed())?;
    Ok(format!("128 inputs agree; {checked} high/low combinations invariant"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("state derivation", state_derivation),
        ("protocol table, theoretical column", table_theoretical),
        ("two-EPR baseline", two_epr_baseline),
        ("classical limit", classical_limit),
        ("correlation and visibility", correlation_visibility),
        ("Monte Carlo consistency", monte_carlo),
        ("function identities", function_identities),
    ];
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", n + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
