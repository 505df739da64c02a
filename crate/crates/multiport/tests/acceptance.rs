//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line with the numbers that decided it. Run with
//! `cargo test -p multiport --test acceptance -- --nocapture` to see every
//! line.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, TAU};
use std::time::Instant;

use multiport::sweep::{sweep_magnitude, sweep_phase_grid_three_port};
use multiport::{
    exact_condition_residuals, interferometer, output_amplitudes, phase_modulus_residuals,
    polygon_inequalities, propagate, synthesize_search, synthesize_three_port, transfer_matrix,
    two_photon_target_basis, two_photon_same_port_conditions, AmplitudeVector, FockState,
    PhaseVector, ProbabilityDistribution, SearchConfig, SynthesisOutcome, Verdict,
};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn even_split_phases() -> PhaseVector {
    PhaseVector::from_angles(&[FRAC_PI_2, -FRAC_PI_6, -FRAC_PI_6]).unwrap()
}

fn random_phases(rng: &mut ChaCha8Rng, d: usize) -> PhaseVector {
    let angles: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * TAU).collect();
    PhaseVector::from_angles(&angles).unwrap()
}

fn random_simplex(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..d)
        .map(|_| -(rng.random::<f64>().max(f64::MIN_POSITIVE)).ln())
        .collect();
    let total: f64 = draws.iter().sum();
    draws.iter().map(|x| x / total).collect()
}

fn random_normalized_state(rng: &mut ChaCha8Rng, d: usize) -> AmplitudeVector {
    loop {
        let raw: Vec<Complex64> = (0..d)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        if raw.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3 {
            return AmplitudeVector::normalized(raw).unwrap();
        }
    }
}

/// Criterion 1: the worked bunched-pair example. With phase shifts
/// (π/2, −π/6, −π/6), two photons entering port 0 of a 3-port leave with
/// P(200) = P(020) = P(002) = 1/15 and P(110) = P(101) = P(011) = 4/15.
#[test]
fn criterion_01_worked_two_photon_example() {
    let start = Instant::now();
    let v = transfer_matrix(&even_split_phases());
    let input = FockState::new(vec![2, 0, 0]).unwrap();
    let fv = propagate(&input, &v).unwrap();
    let expected = [
        1.0 / 15.0,
        1.0 / 15.0,
        1.0 / 15.0,
        4.0 / 15.0,
        4.0 / 15.0,
        4.0 / 15.0,
    ];
    let mut worst = 0.0f64;
    for (occ, want) in two_photon_target_basis().iter().zip(expected) {
        let got = fv.amplitude_of(occ).unwrap().norm_sqr();
        worst = worst.max((got - want).abs());
        assert!(
            (got - want).abs() <= 1e-9,
            "P({occ:?}) = {got}, expected {want}"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "criterion 1: PASS — |200> through (π/2, −π/6, −π/6) gives (1/15, 4/15) pattern, max deviation {worst:.2e}, {elapsed:?}"
    );
}

/// Criterion 2: the violating two-photon distribution (1/9 pure, 2/9
/// mixed) is rejected by the bunching conditions with the named violation
/// 2·√(1/9) ≠ √(2/9).
#[test]
fn criterion_02_violating_two_photon_example() {
    let start = Instant::now();
    let target = ProbabilityDistribution::new(vec![
        1.0 / 9.0,
        1.0 / 9.0,
        1.0 / 9.0,
        2.0 / 9.0,
        2.0 / 9.0,
        2.0 / 9.0,
    ])
    .unwrap();
    let report = two_photon_same_port_conditions(&target, 1e-9).unwrap();
    assert_eq!(report.verdict, Verdict::Infeasible);
    let margin = &report.product_margins[0];
    assert!((margin.expected - 2.0 / 3.0).abs() < 1e-12);
    assert!((margin.actual - (2.0f64 / 9.0).sqrt()).abs() < 1e-12);
    assert!(report.notes.contains("bunching condition violated"));
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "criterion 2: PASS — (1/9,2/9) distribution rejected: required {:.6}, actual {:.6} ({elapsed:?})",
        margin.expected, margin.actual
    );
}

/// Criterion 3: exhaustive 200×200 three-port phase grid (θ_0 = 0 gauge)
/// contains no output with exactly two magnitudes above 1e-6 and one
/// below — the grid form of the odd-d two-mode impossibility theorem.
#[test]
fn criterion_03_odd_port_phase_grid() {
    let start = Instant::now();
    let rows = sweep_phase_grid_three_port(200, 1e-6).unwrap();
    assert_eq!(rows.len(), 40_000);
    let offenders = rows.iter().filter(|r| r.two_mode_pattern).count();
    assert_eq!(offenders, 0, "{offenders} grid points show a two-mode output");
    println!(
        "criterion 3: PASS — 200² = 40000 phase settings, zero two-mode output patterns ({:?})",
        start.elapsed()
    );
}

/// Criterion 4: the even-d half-ring target (1/2, 0, 1/2, 0) synthesizes
/// at d = 4 with residual ≤ 1e-9 and the achieved magnitudes match
/// (1/√2, 0, 1/√2, 0).
#[test]
fn criterion_04_even_port_half_ring_target() {
    let target = ProbabilityDistribution::new(vec![0.5, 0.0, 0.5, 0.0]).unwrap();
    let outcome = synthesize_search(&target, &SearchConfig::default()).unwrap();
    let result = outcome.success().expect("half-ring target is producible");
    assert!(result.residual <= 1e-9, "residual {}", result.residual);
    let mags = result.achieved.magnitudes();
    let s = 0.5f64.sqrt();
    for (got, want) in mags.iter().zip([s, 0.0, s, 0.0]) {
        assert!((got - want).abs() <= 1e-9);
    }
    println!(
        "criterion 4: PASS — d=4 target (1/2, 0, 1/2, 0) synthesized, residual {:.2e}",
        result.residual
    );
}

/// Criterion 5: on 10⁴ random three-outcome distributions, the closed-form
/// synthesis succeeds exactly when the triangle inequalities pass, and
/// every success round-trips with magnitude error ≤ 1e-9.
#[test]
fn criterion_05_three_port_sufficiency() {
    let mut rng = ChaCha8Rng::seed_from_u64(501);
    let mut successes = 0usize;
    let mut worst_residual = 0.0f64;
    for _ in 0..10_000 {
        let target = ProbabilityDistribution::new(random_simplex(&mut rng, 3)).unwrap();
        let triangle_ok = polygon_inequalities(&target).verdict == Verdict::NecessaryPassed;
        match synthesize_three_port(&target, 1e-9).unwrap() {
            SynthesisOutcome::Success(result) => {
                assert!(triangle_ok, "synthesis succeeded on a triangle violation");
                assert!(result.residual <= 1e-9);
                worst_residual = worst_residual.max(result.residual);
                successes += 1;
            }
            SynthesisOutcome::Infeasible(_) => {
                assert!(!triangle_ok, "synthesis failed though the triangle closes");
            }
            SynthesisOutcome::NotFound(_) => unreachable!("closed form never searches"),
        }
    }
    println!(
        "criterion 5: PASS — 10000 random targets, {successes} feasible, success ⇔ triangle, worst round-trip {worst_residual:.2e}"
    );
}

/// Criterion 6: the cyclic-autocorrelation residuals and the per-phase
/// modulus residuals classify the same states as producible, on 10⁴ random
/// normalized vectors per dimension 2..=8 and on constructed producible
/// states.
#[test]
fn criterion_06_residual_form_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(601);
    let mut checked = 0usize;
    for d in 2..=8 {
        for _ in 0..10_000 {
            let c = random_normalized_state(&mut rng, d);
            let auto_max = exact_condition_residuals(&c)
                .iter()
                .map(|r| r.norm())
                .fold(0.0, f64::max);
            let kform_max = phase_modulus_residuals(&c)
                .iter()
                .map(|r| r.norm())
                .fold(0.0, f64::max);
            assert_eq!(
                auto_max <= 1e-9,
                kform_max <= 1e-9,
                "forms disagree at d={d}: {auto_max:.3e} vs {kform_max:.3e}"
            );
            checked += 1;
        }
        // Producible states: both forms must vanish together.
        for _ in 0..200 {
            let c = output_amplitudes(&random_phases(&mut rng, d), 0).unwrap();
            let auto_max = exact_condition_residuals(&c)
                .iter()
                .map(|r| r.norm())
                .fold(0.0, f64::max);
            let kform_max = phase_modulus_residuals(&c)
                .iter()
                .map(|r| r.norm())
                .fold(0.0, f64::max);
            assert!(auto_max <= 1e-9 && kform_max <= 1e-9);
            checked += 1;
        }
    }
    println!(
        "criterion 6: PASS — residual forms agree on {checked} states across d = 2..8"
    );
}

/// Criterion 7: permanent-based propagation of |200⟩ and |110⟩ matches the
/// closed-form coefficient vectors (including the symmetrized split-input
/// form) within 1e-10 over 200 random phase settings.
#[test]
fn criterion_07_two_photon_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(701);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let lambda = random_phases(&mut rng, 3);
        let v = transfer_matrix(&lambda);
        let c = output_amplitudes(&lambda, 0).unwrap();
        let cs = c.as_slice();

        let bunched_raw = [
            cs[0] * cs[0],
            cs[1] * cs[1],
            cs[2] * cs[2],
            2.0 * cs[0] * cs[1],
            2.0 * cs[0] * cs[2],
            2.0 * cs[1] * cs[2],
        ];
        let split_raw = [
            cs[0] * cs[1],
            cs[1] * cs[2],
            cs[2] * cs[0],
            cs[0] * cs[2] + cs[1] * cs[1],
            cs[1] * cs[2] + cs[0] * cs[0],
            cs[0] * cs[1] + cs[2] * cs[2],
        ];
        for (occ_in, raw) in [(vec![2, 0, 0], bunched_raw), (vec![1, 1, 0], split_raw)] {
            let fv = propagate(&FockState::new(occ_in).unwrap(), &v).unwrap();
            let norm: f64 = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for (occ, expected) in two_photon_target_basis().iter().zip(raw) {
                let got = fv.amplitude_of(occ).unwrap();
                let dev = (got - expected / norm).norm();
                worst = worst.max(dev);
                assert!(dev <= 1e-10, "deviation {dev:.3e} at {occ:?}");
            }
        }
    }
    println!(
        "criterion 7: PASS — 200 random settings, both closed forms matched, worst deviation {worst:.2e}"
    );
}

/// Criterion 8: for d = 2..8 and 10³ random settings each, the
/// interferometer and transfer matrices are unitary within 1e-10 and
/// propagated two-photon states stay normalized within 1e-10.
#[test]
fn criterion_08_unitarity_and_normalization() {
    let mut rng = ChaCha8Rng::seed_from_u64(801);
    let mut worst_defect = 0.0f64;
    let mut worst_norm = 0.0f64;
    for d in 2..=8 {
        let bunched = FockState::new({
            let mut occ = vec![0; d];
            occ[0] = 2;
            occ
        })
        .unwrap();
        let split = FockState::new({
            let mut occ = vec![0; d];
            occ[0] = 1;
            occ[1] = 1;
            occ
        })
        .unwrap();
        for _ in 0..1000 {
            let lambda = random_phases(&mut rng, d);
            let u = interferometer(&lambda);
            let v = transfer_matrix(&lambda);
            worst_defect = worst_defect
                .max(u.unitarity_defect())
                .max(v.matrix().unitarity_defect());
            assert!(u.unitarity_defect() <= 1e-10);
            assert!(v.matrix().unitarity_defect() <= 1e-10);
            for input in [&bunched, &split] {
                let fv = propagate(input, &v).unwrap();
                let norm_err = (fv
                    .amplitudes()
                    .iter()
                    .map(|a| a.norm_sqr())
                    .sum::<f64>()
                    - 1.0)
                    .abs();
                worst_norm = worst_norm.max(norm_err);
                assert!(norm_err <= 1e-10);
            }
        }
    }
    println!(
        "criterion 8: PASS — 7000 settings: worst unitarity defect {worst_defect:.2e}, worst norm error {worst_norm:.2e}"
    );
}

/// Criterion 9: every two-outcome distribution synthesizes (100 random
/// targets, residual ≤ 1e-9), while at d = 3 the spread (0.9, 0.09, 0.01)
/// is rejected — the Mach-Zehnder universality does not survive d > 2.
#[test]
fn criterion_09_two_port_universality_contrast() {
    let mut rng = ChaCha8Rng::seed_from_u64(901);
    let config = SearchConfig::default();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p: f64 = rng.random();
        let target = ProbabilityDistribution::new(vec![p, 1.0 - p]).unwrap();
        let outcome = synthesize_search(&target, &config).unwrap();
        let result = outcome
            .success()
            .unwrap_or_else(|| panic!("two-outcome target ({p}, {}) must synthesize", 1.0 - p));
        assert!(result.residual <= 1e-9, "residual {:.3e}", result.residual);
        worst = worst.max(result.residual);
    }
    let spread = ProbabilityDistribution::new(vec![0.9, 0.09, 0.01]).unwrap();
    let rejected = matches!(
        synthesize_three_port(&spread, 1e-9).unwrap(),
        SynthesisOutcome::Infeasible(_)
    );
    assert!(rejected, "(0.9, 0.09, 0.01) must be rejected at d = 3");
    println!(
        "criterion 9: PASS — 100 two-outcome targets synthesized (worst residual {worst:.2e}); (0.9, 0.09, 0.01) rejected at d=3"
    );
}

/// Criterion 10, as specified: a d = 4 magnitude sweep must contain at
/// least one point that passes every polygon inequality yet resists a
/// 256-restart search above residual 1e-4.
///
/// Extensive probing (see the d = 5 supplement below for the contrast)
/// finds the d = 4 gap between the polygon set and the reachable set to be
/// real but everywhere shallower than ~2e-6, so this criterion fails as
/// stated against a converging search. The assertion is kept faithful to
/// the stated threshold rather than tuned until it passes.
#[test]
fn criterion_10_four_port_sufficiency_gap() {
    let config = SearchConfig {
        restarts: 256,
        seed: 0,
        ..SearchConfig::default()
    };
    let step = 0.05;
    let rows = sweep_magnitude(4, step, &config).unwrap();
    let passing = rows.iter().filter(|r| r.polygon_passed).count();
    let evidence: Vec<_> = rows
        .iter()
        .filter(|r| r.is_sufficiency_gap_evidence(1e-4))
        .collect();
    let worst = rows
        .iter()
        .filter_map(|r| r.search_residual)
        .fold(0.0f64, f64::max);
    if evidence.is_empty() {
        println!(
            "criterion 10: FAIL — d=4 sweep (step {step}, seed {}, {} restarts): {passing} polygon-passing points, none with residual > 1e-4 (worst {worst:.2e}); the d=4 gap is genuine but shallower than the stated threshold",
            config.seed, config.restarts
        );
    } else {
        println!(
            "criterion 10: PASS — d=4 sweep found {} gap points, e.g. {:?} at residual {:.2e} (seed {}, {} restarts; evidence, not proof)",
            evidence.len(),
            evidence[0].target,
            evidence[0].search_residual.unwrap(),
            config.seed,
            config.restarts
        );
    }
    assert!(
        !evidence.is_empty(),
        "no d=4 grid point passed the polygon conditions with search residual > 1e-4 (worst {worst:.2e} over {passing} polygon-passing points)"
    );
}

/// Supplement to criterion 10: the same sweep at d = 5 exhibits the
/// sufficiency gap dramatically — grid points (typically with one vanishing
/// output) pass every polygon inequality while the search stalls at
/// residuals around 1e-1. Reported as evidence with provenance, not proof.
#[test]
fn criterion_10_supplement_five_port_gap() {
    let config = SearchConfig {
        restarts: 256,
        seed: 0,
        ..SearchConfig::default()
    };
    let step = 0.2;
    let rows = sweep_magnitude(5, step, &config).unwrap();
    let evidence: Vec<_> = rows
        .iter()
        .filter(|r| r.is_sufficiency_gap_evidence(1e-4))
        .collect();
    assert!(
        !evidence.is_empty(),
        "the d=5 sufficiency gap should be visible even on a coarse grid"
    );
    let deepest = evidence
        .iter()
        .max_by(|a, b| a.search_residual.unwrap().total_cmp(&b.search_residual.unwrap()))
        .unwrap();
    println!(
        "criterion 10 supplement: PASS — d=5 sweep (step {step}, seed {}, {} restarts) found {} polygon-passing points with residual > 1e-4; deepest {:?} at {:.2e} (evidence, not proof)",
        config.seed,
        config.restarts,
        evidence.len(),
        deepest.target,
        deepest.search_residual.unwrap()
    );
}
