//! Literal subset-sum forms of the agreement probabilities.
//!
//! These enumerate every interception pattern and weight it by the
//! coefficient `(2^j + 1) / 2^(j+1)` for `j` interceptions, exactly as the
//! sums are written before any simplification. They are exponential in the
//! number of eavesdroppers and exist to cross-check the product forms in
//! [`crate::model`].

use crate::error::ModelError;
use crate::model::{Agreement, AttackChain, ChannelNoise};

/// Largest chain the enumerations accept.
pub const MAX_ENUMERATED_EVES: usize = 20;

/// Noiseless agreement of a measurement made after `j` interceptions:
/// `(2^j + 1) / 2^(j+1)`. Exact in binary floating point for `j ≤ 52`.
pub fn interception_coefficient(j: u32) -> f64 {
    let pow = (j as f64).exp2();
    (pow + 1.0) / (2.0 * pow)
}

fn check_size(n: usize) -> Result<(), ModelError> {
    if n > MAX_ENUMERATED_EVES {
        Err(ModelError::TooManyEavesdroppers {
            n,
            limit: MAX_ENUMERATED_EVES,
        })
    } else {
        Ok(())
    }
}

/// Probability of one interception pattern: bit `i` of `mask` set means
/// eavesdropper `i` intercepted.
fn pattern_weight(omegas: &[f64], mask: u32) -> f64 {
    omegas
        .iter()
        .enumerate()
        .map(|(i, &w)| if mask >> i & 1 == 1 { w } else { 1.0 - w })
        .product()
}

/// `Σ_patterns Π ω (interceptors) Π (1 - ω) (others) · (2^j + 1) / 2^(j+1)`.
pub fn noiseless_bob_agreement_bruteforce(omegas: &[f64]) -> Result<Agreement, ModelError> {
    check_size(omegas.len())?;
    let sum: f64 = (0..1u32 << omegas.len())
        .map(|mask| pattern_weight(omegas, mask) * interception_coefficient(mask.count_ones()))
        .sum();
    Agreement::new(sum.clamp(0.0, 1.0))
}

/// Eavesdropper `m`'s agreement from the unsimplified two-branch expression:
/// with probability `Q_m` the noise precedes her measurement, otherwise it
/// does not. The intercepted contribution `S` sums over which of the
/// upstream eavesdroppers `1..m-1` intercepted, with `ω_m` a factor of every
/// term; `k` non-interceptors leave `m - k` interceptions counting her own.
pub fn eve_agreement_bruteforce(
    m: usize,
    channel: ChannelNoise,
    chain: &AttackChain,
) -> Result<Agreement, ModelError> {
    let n = chain.n_eves();
    if m == 0 || m > n {
        return Err(ModelError::EveIndex { m, n_eves: n });
    }
    check_size(m)?;
    let upstream = &chain.omegas()[..m - 1];
    let omega_m = chain.omegas()[m - 1];
    let p = channel.p();

    let s: f64 = (0..1u32 << upstream.len())
        .map(|mask| {
            let interceptions = mask.count_ones() + 1;
            interception_coefficient(interceptions) * pattern_weight(upstream, mask) * omega_m
        })
        .sum();

    let q_m: f64 = chain.qs()[..m].iter().sum();
    let noisy = (1.0 - 4.0 * p / 3.0) * s + (1.0 - omega_m) / 2.0 + 2.0 * p * omega_m / 3.0;
    let clean = (1.0 - omega_m) / 2.0 + s;
    Agreement::new((noisy * q_m + clean * (1.0 - q_m)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::noiseless_bob_agreement;

    #[test]
    fn coefficients_are_exact() {
        assert_eq!(interception_coefficient(0), 1.0);
        assert_eq!(interception_coefficient(1), 0.75);
        assert_eq!(interception_coefficient(2), 0.625);
        assert_eq!(interception_coefficient(3), 0.5625);
    }

    #[test]
    fn bob_enumeration_values() {
        assert_eq!(
            noiseless_bob_agreement_bruteforce(&[0.5]).unwrap().value(),
            0.875
        );
        assert_eq!(
            noiseless_bob_agreement_bruteforce(&[1.0, 1.0, 1.0])
                .unwrap()
                .value(),
            0.5625
        );
        let brute = noiseless_bob_agreement_bruteforce(&[0.3, 0.7])
            .unwrap()
            .value();
        assert!((brute - noiseless_bob_agreement(&[0.3, 0.7]).value()).abs() < 1e-12);
    }

    #[test]
    fn enumeration_size_limit() {
        assert!(matches!(
            noiseless_bob_agreement_bruteforce(&[0.1; 21]),
            Err(ModelError::TooManyEavesdroppers { n: 21, limit: 20 })
        ));
        let chain = AttackChain::with_uniform_noise(vec![0.1; 21]).unwrap();
        assert!(eve_agreement_bruteforce(21, ChannelNoise::NOISELESS, &chain).is_err());
        assert!(eve_agreement_bruteforce(20, ChannelNoise::NOISELESS, &chain).is_ok());
    }

    #[test]
    fn eve_enumeration_at_m1_is_single_eve_form() {
        for (w, q, p) in [(1.0, 1.0, 0.3), (0.4, 0.25, 0.1), (0.9, 0.0, 0.7)] {
            let chain = AttackChain::new(vec![w], vec![q, 1.0 - q]).unwrap();
            let brute = eve_agreement_bruteforce(1, ChannelNoise::new(p).unwrap(), &chain)
                .unwrap()
                .value();
            assert!((brute - (0.5 + w / 4.0 - p * w * q / 3.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn second_eve_after_certain_interception() {
        let third = 1.0 / 3.0;
        let chain = AttackChain::new(vec![1.0, 1.0], vec![third, third, third]).unwrap();
        let a = eve_agreement_bruteforce(2, ChannelNoise::NOISELESS, &chain).unwrap();
        assert_eq!(a.value(), 0.625);
    }
}
