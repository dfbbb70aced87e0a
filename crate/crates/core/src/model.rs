//! Closed-form agreement probabilities and information quantities.
//!
//! Every receiver in the chain sees Alice's sifted bit through a binary
//! symmetric channel, so a single agreement probability `P(0|0) = P(1|1)`
//! describes it completely. The interception sums over `2^N` patterns reduce
//! to products because each intercepting eavesdropper halves the remaining
//! bias independently: `E[2^-M] = Π (1 - ω_i / 2)` for independent
//! interception indicators. [`crate::oracle`] keeps the literal enumerations.

use crate::entropy::{entropy_in_domain, mutual_information};
use crate::error::ModelError;
use crate::Q_SUM_TOLERANCE;

fn check_probability(name: &'static str, value: f64) -> Result<f64, ModelError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(ModelError::NotAProbability { name, value })
    }
}

/// Depolarizing channel: identity with probability `1 - p`, each Pauli
/// operator with probability `p / 3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelNoise {
    p: f64,
}

impl ChannelNoise {
    pub const NOISELESS: ChannelNoise = ChannelNoise { p: 0.0 };

    pub fn new(p: f64) -> Result<Self, ModelError> {
        check_probability("p", p).map(|p| ChannelNoise { p })
    }

    pub fn p(self) -> f64 {
        self.p
    }

    /// Bit-flip rate `δ = 2p/3` seen in the photon's own basis.
    pub fn flip_probability(self) -> f64 {
        2.0 * self.p / 3.0
    }

    /// `1 - 4p/3`: one pass through the channel multiplies the bias
    /// `2 P(0|0) - 1` by this factor.
    pub fn contraction(self) -> f64 {
        1.0 - 4.0 * self.p / 3.0
    }
}

/// Interception probabilities `ω_1..ω_N` and the distribution `q_1..q_{N+1}`
/// of the segment where the single depolarizing event strikes.
///
/// Segment `i` lies between eavesdropper `i - 1` and eavesdropper `i`
/// (Alice is eavesdropper 0, Bob closes segment `N + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct AttackChain {
    omegas: Vec<f64>,
    qs: Vec<f64>,
}

impl AttackChain {
    pub fn new(omegas: Vec<f64>, qs: Vec<f64>) -> Result<Self, ModelError> {
        if qs.len() != omegas.len() + 1 {
            return Err(ModelError::QArity {
                n_eves: omegas.len(),
                expected: omegas.len() + 1,
                got: qs.len(),
            });
        }
        for &w in &omegas {
            check_probability("omega", w)?;
        }
        for &q in &qs {
            check_probability("q", q)?;
        }
        let sum: f64 = qs.iter().sum();
        if (sum - 1.0).abs() > Q_SUM_TOLERANCE {
            return Err(ModelError::QSum { sum });
        }
        Ok(AttackChain { omegas, qs })
    }

    /// No eavesdroppers; the noise necessarily strikes the only segment.
    pub fn no_attack() -> Self {
        AttackChain {
            omegas: Vec::new(),
            qs: vec![1.0],
        }
    }

    /// Noise equally likely in each of the `N + 1` segments.
    pub fn with_uniform_noise(omegas: Vec<f64>) -> Result<Self, ModelError> {
        let qs = uniform_qs(omegas.len());
        AttackChain::new(omegas, qs)
    }

    pub fn n_eves(&self) -> usize {
        self.omegas.len()
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn qs(&self) -> &[f64] {
        &self.qs
    }

    /// `Q_m = Σ_{i ≤ m} q_i`: probability that the noise strikes before
    /// eavesdropper `m` (1-based) measures.
    pub fn noise_before(&self, m: usize) -> f64 {
        self.qs[..m].iter().sum()
    }
}

/// `q_i = 1 / (N + 1)` for every segment.
pub fn uniform_qs(n_eves: usize) -> Vec<f64> {
    vec![1.0 / (n_eves + 1) as f64; n_eves + 1]
}

/// Probability that a receiver's sifted bit equals Alice's, `P(0|0) = P(1|1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Agreement(f64);

impl Agreement {
    pub fn new(value: f64) -> Result<Self, ModelError> {
        check_probability("agreement", value).map(Agreement)
    }

    /// Closed forms land a few ulps outside `[0, 1]` at the extremes.
    pub(crate) fn from_closed_form(value: f64) -> Self {
        debug_assert!((-1e-12..=1.0 + 1e-12).contains(&value), "{value}");
        Agreement(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `P(1|0) = P(0|1) = 1 - P(0|0)`.
    pub fn disagreement(self) -> f64 {
        1.0 - self.0
    }
}

/// Every quantity of the security rule at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct SecurityAssessment {
    pub i_ab: f64,
    pub i_ae_per_eve: Vec<f64>,
    /// Largest entry of `i_ae_per_eve`, 0 without eavesdroppers.
    pub i_ae_max: f64,
    pub h_delta: f64,
    /// `i_ae_max + h_delta`.
    pub i_lost: f64,
    pub added_error: f64,
    /// `i_ab > i_lost`; equality counts as unsecured.
    pub secured: bool,
}

impl SecurityAssessment {
    /// `i_ab - i_lost`, positive exactly when secured.
    pub fn margin(&self) -> f64 {
        self.i_ab - self.i_lost
    }
}

pub fn flip_probability(channel: ChannelNoise) -> f64 {
    channel.flip_probability()
}

/// Alice–Bob agreement with a perfect channel:
/// `1/2 + 1/2 Π (1 - ω_i / 2)`.
///
/// Each `ω_i` must lie in `[0, 1]`.
pub fn noiseless_bob_agreement(omegas: &[f64]) -> Agreement {
    debug_assert!(omegas.iter().all(|w| (0.0..=1.0).contains(w)));
    Agreement::from_closed_form(0.5 + 0.5 * surviving_bias(omegas))
}

/// `Π (1 - ω_i / 2)`, the fraction of Alice's bias left after the chain.
fn surviving_bias(omegas: &[f64]) -> f64 {
    omegas.iter().map(|w| 1.0 - 0.5 * w).product()
}

/// Alice–Bob agreement through the noisy attacked channel:
/// `B (1 - 4p/3) + 2p/3`. Where the noise strikes is irrelevant to Bob, so
/// the segment distribution is not an input.
pub fn bob_agreement(channel: ChannelNoise, omegas: &[f64]) -> Agreement {
    let b = noiseless_bob_agreement(omegas).value();
    Agreement::from_closed_form(b * channel.contraction() + channel.flip_probability())
}

/// Agreement of eavesdropper `m` (1-based) with Alice.
pub fn eve_agreement(
    m: usize,
    channel: ChannelNoise,
    chain: &AttackChain,
) -> Result<Agreement, ModelError> {
    let n = chain.n_eves();
    if m == 0 || m > n {
        return Err(ModelError::EveIndex { m, n_eves: n });
    }
    let upstream = surviving_bias(&chain.omegas()[..m - 1]);
    Ok(eve_agreement_from_parts(
        chain.omegas()[m - 1],
        upstream,
        chain.noise_before(m),
        channel,
    ))
}

/// Agreements of all eavesdroppers in chain order, in `O(N)`.
pub fn eve_agreements(channel: ChannelNoise, chain: &AttackChain) -> Vec<Agreement> {
    let mut upstream = 1.0;
    let mut noise_before = 0.0;
    chain
        .omegas()
        .iter()
        .zip(chain.qs())
        .map(|(&w, &q)| {
            noise_before += q;
            let a = eve_agreement_from_parts(w, upstream, noise_before, channel);
            upstream *= 1.0 - 0.5 * w;
            a
        })
        .collect()
}

/// `Q [(1 - 4p/3) A + (1 - ω)/2 + 2pω/3] + (1 - Q) [(1 - ω)/2 + A]` with
/// `A = ω (1/2 + upstream / 4)`.
fn eve_agreement_from_parts(
    omega: f64,
    upstream: f64,
    noise_before: f64,
    channel: ChannelNoise,
) -> Agreement {
    let intercepted = omega * (0.5 + 0.25 * upstream);
    let idle = 0.5 * (1.0 - omega);
    let noisy = channel.contraction() * intercepted + idle + 2.0 * channel.p() * omega / 3.0;
    let clean = idle + intercepted;
    Agreement::from_closed_form(noise_before * noisy + (1.0 - noise_before) * clean)
}

/// `max_m I(A, E_m) + H(δ)`; just `H(δ)` without eavesdroppers.
pub fn lost_information(channel: ChannelNoise, chain: &AttackChain) -> f64 {
    max_eve_information(&eve_informations(channel, chain)) + noise_entropy(channel)
}

fn eve_informations(channel: ChannelNoise, chain: &AttackChain) -> Vec<f64> {
    eve_agreements(channel, chain)
        .into_iter()
        .map(mutual_information)
        .collect()
}

fn max_eve_information(per_eve: &[f64]) -> f64 {
    per_eve.iter().copied().fold(0.0, f64::max)
}

fn noise_entropy(channel: ChannelNoise) -> f64 {
    entropy_in_domain(channel.flip_probability())
}

/// Error probability the eavesdroppers add on top of the channel noise:
/// Bob's disagreement at the given `ω` minus his disagreement at `ω = 0`,
/// which simplifies to `(1 - B) (1 - 4p/3)`.
pub fn added_error(channel: ChannelNoise, omegas: &[f64]) -> f64 {
    noiseless_bob_agreement(omegas).disagreement() * channel.contraction()
}

pub fn assess(channel: ChannelNoise, chain: &AttackChain) -> SecurityAssessment {
    let i_ab = mutual_information(bob_agreement(channel, chain.omegas()));
    let i_ae_per_eve = eve_informations(channel, chain);
    let i_ae_max = max_eve_information(&i_ae_per_eve);
    let h_delta = noise_entropy(channel);
    let i_lost = i_ae_max + h_delta;
    SecurityAssessment {
        i_ab,
        i_ae_per_eve,
        i_ae_max,
        h_delta,
        i_lost,
        added_error: added_error(channel, chain.omegas()),
        secured: i_ab > i_lost,
    }
}
