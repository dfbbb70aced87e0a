use bb84_core::montecarlo::{compare_to_closed_form, run, SimConfig, SimEstimate};
use bb84_core::{AttackChain, ChannelNoise};

fn noise(p: f64) -> ChannelNoise {
    ChannelNoise::new(p).unwrap()
}

fn chain(omegas: &[f64], qs: &[f64]) -> AttackChain {
    AttackChain::new(omegas.to_vec(), qs.to_vec()).unwrap()
}

fn simulate(photons: u64, seed: u64, p: f64, c: &AttackChain) -> SimEstimate {
    run(
        SimConfig {
            n_photons: photons,
            seed,
        },
        noise(p),
        c,
    )
    .unwrap()
}

/// `|a - b|` in units of the pooled standard error.
fn pooled_z(a: bb84_core::montecarlo::Estimate, b: bb84_core::montecarlo::Estimate) -> f64 {
    (a.value - b.value) / (a.stderr.powi(2) + b.stderr.powi(2)).sqrt()
}

#[test]
fn single_certain_interception_noiseless() {
    let est = simulate(1_000_000, 11, 0.0, &chain(&[1.0], &[0.5, 0.5]));
    let z = (est.bob_agreement.value - 0.75) / est.bob_agreement.stderr;
    assert!(z.abs() <= 5.0, "{est:?}");
}

#[test]
fn eve_agreement_with_noise_before_her() {
    let est = simulate(1_000_000, 12, 0.3, &chain(&[1.0], &[1.0, 0.0]));
    let e = est.eve_agreements[0];
    assert!(((e.value - 0.65) / e.stderr).abs() <= 5.0, "{est:?}");
}

#[test]
fn two_certain_interceptions() {
    let third = 1.0 / 3.0;
    let est = simulate(
        1_000_000,
        13,
        0.0,
        &chain(&[1.0, 1.0], &[third, third, third]),
    );
    let b = est.bob_agreement;
    assert!(((b.value - 0.625) / b.stderr).abs() <= 5.0, "{est:?}");
}

#[test]
fn closed_forms_hold_for_mixed_chains() {
    let cases: [(f64, &[f64], &[f64]); 4] = [
        (0.1, &[0.6], &[0.5, 0.5]),
        (0.3, &[0.2, 0.9], &[0.1, 0.6, 0.3]),
        (0.05, &[0.7, 0.4, 1.0], &[0.25, 0.25, 0.25, 0.25]),
        (0.9, &[0.5, 0.5], &[0.0, 1.0, 0.0]),
    ];
    for (i, (p, omegas, qs)) in cases.into_iter().enumerate() {
        let c = chain(omegas, qs);
        let est = simulate(400_000, 100 + i as u64, p, &c);
        let report = compare_to_closed_form(&est, noise(p), &c).unwrap();
        assert!(!report.any_flagged(), "case {i}: {report:?}");
    }
}

#[test]
fn bob_does_not_see_noise_location() {
    let a = simulate(1_000_000, 21, 0.2, &chain(&[0.8], &[1.0, 0.0]));
    let b = simulate(1_000_000, 22, 0.2, &chain(&[0.8], &[0.0, 1.0]));
    let z = pooled_z(a.bob_agreement, b.bob_agreement);
    assert!(z.abs() <= 5.0, "z = {z}");
}

#[test]
fn eve_sees_noise_location() {
    let before = simulate(1_000_000, 31, 0.3, &chain(&[1.0], &[1.0, 0.0]));
    let after = simulate(1_000_000, 32, 0.3, &chain(&[1.0], &[0.0, 1.0]));
    let gap = after.eve_agreements[0].value - before.eve_agreements[0].value;
    // Expected gap pω/3 = 0.1.
    let z = pooled_z(after.eve_agreements[0], before.eve_agreements[0]);
    assert!(z > 5.0, "z = {z}");
    let stderr =
        (after.eve_agreements[0].stderr.powi(2) + before.eve_agreements[0].stderr.powi(2)).sqrt();
    assert!(((gap - 0.1) / stderr).abs() <= 5.0, "gap = {gap}");
}

#[test]
fn half_of_the_photons_survive_sifting() {
    let est = simulate(1_000_000, 41, 0.1, &chain(&[0.5, 0.5], &[0.3, 0.3, 0.4]));
    let rate = est.sifting_rate();
    assert!(((rate.value - 0.5) / rate.stderr).abs() <= 5.0, "{rate:?}");
}

#[test]
fn same_seed_same_estimate_across_thread_counts() {
    let c = chain(&[0.6, 0.3], &[0.2, 0.3, 0.5]);
    let config = SimConfig {
        n_photons: 300_000,
        seed: 42,
    };
    let on = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run(config, noise(0.1), &c).unwrap())
    };
    let one = on(1);
    assert_eq!(one, on(3));
    assert_eq!(one, on(8));
    let other_seed = run(SimConfig { seed: 43, ..config }, noise(0.1), &c).unwrap();
    assert_ne!(one, other_seed);
}
