//! Randomized cross-checks of the product forms against the literal
//! enumerations and the single-eavesdropper expressions.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::AnalysisError;
use crate::model::{
    bob_agreement, eve_agreement, noiseless_bob_agreement, AttackChain, ChannelNoise,
};
use crate::oracle::{eve_agreement_bruteforce, noiseless_bob_agreement_bruteforce};
use crate::table::SweepTable;

/// Largest absolute disagreement tolerated between two exact routes.
pub const EXACT_TOLERANCE: f64 = 1e-12;

pub const VERIFY_COLUMNS: [&str; 5] = ["check", "n_eves", "trials", "max_abs_diff", "passed"];

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub check: &'static str,
    pub n_eves: usize,
    pub trials: usize,
    pub max_abs_diff: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.max_abs_diff <= EXACT_TOLERANCE
    }
}

/// Random chain of `n` eavesdroppers with a random noise-location
/// distribution.
pub fn random_chain<R: Rng + ?Sized>(n: usize, rng: &mut R) -> AttackChain {
    let omegas = (0..n).map(|_| rng.random::<f64>()).collect();
    let raw: Vec<f64> = (0..=n).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    AttackChain::new(omegas, raw.iter().map(|q| q / total).collect())
        .expect("normalized random chain")
}

/// For each chain length `1..=max_eves`, `trials` random draws comparing the
/// product forms with the enumerations; for `N = 1` also the expanded
/// single-eavesdropper expressions.
pub fn run_crosschecks(max_eves: usize, trials: usize, seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = Vec::new();
    for n in 1..=max_eves {
        let mut bob = 0.0f64;
        let mut eve = 0.0f64;
        let mut n1_bob = 0.0f64;
        let mut n1_eve = 0.0f64;
        for _ in 0..trials {
            let chain = random_chain(n, &mut rng);
            let channel = ChannelNoise::new(rng.random()).expect("p in [0, 1)");
            let brute = noiseless_bob_agreement_bruteforce(chain.omegas())
                .expect("enumeration within limit");
            bob = bob.max((brute.value() - noiseless_bob_agreement(chain.omegas()).value()).abs());
            for m in 1..=n {
                let closed = eve_agreement(m, channel, &chain).expect("index in range");
                let literal =
                    eve_agreement_bruteforce(m, channel, &chain).expect("enumeration within limit");
                eve = eve.max((closed.value() - literal.value()).abs());
            }
            if n == 1 {
                let (p, w, q1) = (channel.p(), chain.omegas()[0], chain.qs()[0]);
                let b = bob_agreement(channel, chain.omegas()).value();
                n1_bob = n1_bob.max((b - single_eve_bob(p, w)).abs());
                let e = eve_agreement(1, channel, &chain)
                    .expect("one eavesdropper")
                    .value();
                n1_eve = n1_eve.max((e - single_eve_eve(p, w, q1)).abs());
            }
        }
        results.push(CheckResult {
            check: "bob_product_vs_enumeration",
            n_eves: n,
            trials,
            max_abs_diff: bob,
        });
        results.push(CheckResult {
            check: "eve_product_vs_enumeration",
            n_eves: n,
            trials,
            max_abs_diff: eve,
        });
        if n == 1 {
            results.push(CheckResult {
                check: "bob_single_eve_expression",
                n_eves: 1,
                trials,
                max_abs_diff: n1_bob,
            });
            results.push(CheckResult {
                check: "eve_single_eve_expression",
                n_eves: 1,
                trials,
                max_abs_diff: n1_eve,
            });
        }
    }
    results
}

/// `(1 - 2p/3)(1 - ω/4) + ωp/6`.
pub fn single_eve_bob(p: f64, omega: f64) -> f64 {
    (1.0 - 2.0 * p / 3.0) * (1.0 - omega / 4.0) + omega * p / 6.0
}

/// `1/2 + ω/4 - pωq_1/3`.
pub fn single_eve_eve(p: f64, omega: f64, q1: f64) -> f64 {
    0.5 + omega / 4.0 - p * omega * q1 / 3.0
}

pub fn crosscheck_table(results: &[CheckResult]) -> Result<SweepTable, AnalysisError> {
    let mut table = SweepTable::new(VERIFY_COLUMNS);
    for r in results {
        table.push_row(vec![
            r.check.into(),
            (r.n_eves as f64).into(),
            (r.trials as f64).into(),
            r.max_abs_diff.into(),
            if r.passed() { "true" } else { "false" }.into(),
        ])?;
    }
    Ok(table)
}
