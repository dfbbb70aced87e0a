//! Photon-level simulation of the attacked transmission chain.
//!
//! A photon is one of the four BB84 states. Alice prepares it, a single
//! depolarizing event strikes one of the `N + 1` segments (drawn from the
//! chain's `q` distribution), each eavesdropper in turn intercepts with
//! probability `ω_i` and re-prepares what she measured, and Bob measures in
//! a random basis. Only positions where Bob's basis equals Alice's are kept.
//!
//! Photons are processed in fixed blocks of [`BLOCK_SIZE`]; block `b` draws
//! from ChaCha8 stream `b` of the configured seed, so the result does not
//! depend on how blocks are scheduled across threads.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::SimError;
use crate::model::{bob_agreement, eve_agreements, AttackChain, ChannelNoise};

/// Photons per independently seeded block.
pub const BLOCK_SIZE: u64 = 1 << 16;

/// `|z|` above which an estimate is flagged as inconsistent.
pub const Z_FLAG: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Computational basis `|0⟩, |1⟩`.
    Z,
    /// Diagonal basis `|+⟩, |−⟩`.
    X,
}

impl Basis {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.random::<bool>() {
            Basis::X
        } else {
            Basis::Z
        }
    }
}

/// One of the four BB84 states, global phase ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhotonState {
    pub basis: Basis,
    pub bit: bool,
}

impl PhotonState {
    pub fn new(basis: Basis, bit: bool) -> Self {
        PhotonState { basis, bit }
    }

    /// Ideal projective measurement: the encoded bit when the bases agree,
    /// a fair coin otherwise.
    pub fn measure<R: Rng + ?Sized>(self, basis: Basis, rng: &mut R) -> bool {
        if basis == self.basis {
            self.bit
        } else {
            rng.random()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliOperator {
    I,
    X,
    Y,
    Z,
}

impl PauliOperator {
    pub const ALL: [PauliOperator; 4] = [
        PauliOperator::I,
        PauliOperator::X,
        PauliOperator::Y,
        PauliOperator::Z,
    ];
}

/// `σ|ψ⟩` up to global phase. `X` flips `|0⟩ ↔ |1⟩` and fixes `|±⟩`, `Z` does
/// the opposite, `Y` flips both.
pub fn apply_pauli(state: PhotonState, op: PauliOperator) -> PhotonState {
    let flips = match op {
        PauliOperator::I => false,
        PauliOperator::X => state.basis == Basis::Z,
        PauliOperator::Z => state.basis == Basis::X,
        PauliOperator::Y => true,
    };
    PhotonState {
        bit: state.bit ^ flips,
        ..state
    }
}

/// Draws `I` with probability `1 - p` and each of `X`, `Y`, `Z` with `p / 3`.
pub fn sample_pauli<R: Rng + ?Sized>(p: f64, rng: &mut R) -> PauliOperator {
    let u: f64 = rng.random();
    if u >= p {
        PauliOperator::I
    } else {
        // u / p is uniform on [0, 1) given u < p.
        match (3.0 * u / p) as u32 {
            0 => PauliOperator::X,
            1 => PauliOperator::Y,
            _ => PauliOperator::Z,
        }
    }
}

pub fn apply_depolarizing<R: Rng + ?Sized>(state: PhotonState, p: f64, rng: &mut R) -> PhotonState {
    apply_pauli(state, sample_pauli(p, rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EveRecord {
    pub intercepted: bool,
    /// Measured bit when intercepting, a filler coin flip otherwise.
    pub bit: bool,
}

/// Everything recorded about one photon's trip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub alice: PhotonState,
    pub eves: Vec<EveRecord>,
    /// Segment `0..=N` where the depolarizing event struck.
    pub noise_segment: usize,
    pub bob_basis: Basis,
    pub bob_bit: bool,
}

impl Transcript {
    fn blank(n_eves: usize) -> Self {
        Transcript {
            alice: PhotonState::new(Basis::Z, false),
            eves: Vec::with_capacity(n_eves),
            noise_segment: 0,
            bob_basis: Basis::Z,
            bob_bit: false,
        }
    }

    pub fn sifted(&self) -> bool {
        self.bob_basis == self.alice.basis
    }
}

/// Reusable per-photon machinery for one (channel, chain) pair.
struct Transmitter<'a> {
    channel: ChannelNoise,
    chain: &'a AttackChain,
    segments: Option<WeightedIndex<f64>>,
}

impl<'a> Transmitter<'a> {
    fn new(channel: ChannelNoise, chain: &'a AttackChain) -> Self {
        let segments = match chain.qs() {
            [_] => None,
            qs => Some(WeightedIndex::new(qs).expect("validated q distribution")),
        };
        Transmitter {
            channel,
            chain,
            segments,
        }
    }

    fn transmit<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Transcript) {
        let alice = PhotonState::new(Basis::random(rng), rng.random());
        let noise_segment = self.segments.as_ref().map_or(0, |d| d.sample(rng));
        let p = self.channel.p();

        let mut photon = alice;
        out.eves.clear();
        for (i, &omega) in self.chain.omegas().iter().enumerate() {
            if noise_segment == i {
                photon = apply_depolarizing(photon, p, rng);
            }
            let record = if rng.random::<f64>() < omega {
                let basis = Basis::random(rng);
                let bit = photon.measure(basis, rng);
                photon = PhotonState::new(basis, bit);
                EveRecord {
                    intercepted: true,
                    bit,
                }
            } else {
                EveRecord {
                    intercepted: false,
                    bit: rng.random(),
                }
            };
            out.eves.push(record);
        }
        if noise_segment == self.chain.n_eves() {
            photon = apply_depolarizing(photon, p, rng);
        }
        let bob_basis = Basis::random(rng);
        out.alice = alice;
        out.noise_segment = noise_segment;
        out.bob_basis = bob_basis;
        out.bob_bit = photon.measure(bob_basis, rng);
    }
}

/// Sends one photon from Alice to Bob through the noisy attacked chain.
pub fn transmit_photon<R: Rng + ?Sized>(
    channel: ChannelNoise,
    chain: &AttackChain,
    rng: &mut R,
) -> Transcript {
    let mut out = Transcript::blank(chain.n_eves());
    Transmitter::new(channel, chain).transmit(rng, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub n_photons: u64,
    pub seed: u64,
}

/// Sample proportion with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    fn from_counts(hits: u64, trials: u64) -> Self {
        let n = trials as f64;
        let value = hits as f64 / n;
        Estimate {
            value,
            stderr: (value * (1.0 - value) / n).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimEstimate {
    pub n_photons: u64,
    pub sifted_count: u64,
    pub bob_agreement: Estimate,
    /// One per eavesdropper, in chain order, over the sifted positions.
    pub eve_agreements: Vec<Estimate>,
}

impl SimEstimate {
    /// Fraction of photons kept after sifting.
    pub fn sifting_rate(&self) -> Estimate {
        Estimate::from_counts(self.sifted_count, self.n_photons)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Tally {
    sifted: u64,
    bob_agree: u64,
    eve_agree: Vec<u64>,
}

impl Tally {
    fn zero(n_eves: usize) -> Self {
        Tally {
            sifted: 0,
            bob_agree: 0,
            eve_agree: vec![0; n_eves],
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.sifted += other.sifted;
        self.bob_agree += other.bob_agree;
        for (a, b) in self.eve_agree.iter_mut().zip(other.eve_agree) {
            *a += b;
        }
        self
    }
}

fn run_block(transmitter: &Transmitter<'_>, seed: u64, block: u64, photons: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    let mut tally = Tally::zero(transmitter.chain.n_eves());
    let mut t = Transcript::blank(transmitter.chain.n_eves());
    for _ in 0..photons {
        transmitter.transmit(&mut rng, &mut t);
        if !t.sifted() {
            continue;
        }
        tally.sifted += 1;
        tally.bob_agree += u64::from(t.bob_bit == t.alice.bit);
        for (count, eve) in tally.eve_agree.iter_mut().zip(&t.eves) {
            *count += u64::from(eve.bit == t.alice.bit);
        }
    }
    tally
}

/// Simulates `config.n_photons` photons and estimates every receiver's
/// agreement with Alice on the sifted key. Identical inputs give identical
/// output regardless of thread count.
pub fn run(
    config: SimConfig,
    channel: ChannelNoise,
    chain: &AttackChain,
) -> Result<SimEstimate, SimError> {
    if config.n_photons == 0 {
        return Err(SimError::NoPhotons);
    }
    let transmitter = Transmitter::new(channel, chain);
    let blocks = config.n_photons.div_ceil(BLOCK_SIZE);
    let block_len = |b: u64| BLOCK_SIZE.min(config.n_photons - b * BLOCK_SIZE);
    let zero = || Tally::zero(chain.n_eves());

    #[cfg(feature = "parallel")]
    let tally = {
        use rayon::prelude::*;
        (0..blocks)
            .into_par_iter()
            .map(|b| run_block(&transmitter, config.seed, b, block_len(b)))
            .reduce(zero, Tally::merge)
    };
    #[cfg(not(feature = "parallel"))]
    let tally = (0..blocks)
        .map(|b| run_block(&transmitter, config.seed, b, block_len(b)))
        .fold(zero(), Tally::merge);

    if tally.sifted == 0 {
        return Err(SimError::NothingSifted(config.n_photons));
    }
    Ok(SimEstimate {
        n_photons: config.n_photons,
        sifted_count: tally.sifted,
        bob_agreement: Estimate::from_counts(tally.bob_agree, tally.sifted),
        eve_agreements: tally
            .eve_agree
            .iter()
            .map(|&k| Estimate::from_counts(k, tally.sifted))
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Bob,
    /// 1-based position in the chain.
    Eve(usize),
}

impl std::fmt::Display for Party {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Party::Bob => f.write_str("bob"),
            Party::Eve(m) => write!(f, "eve{m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZScore {
    pub party: Party,
    pub estimate: Estimate,
    pub expected: f64,
    pub z: f64,
}

impl ZScore {
    pub fn flagged(&self) -> bool {
        self.z.abs() > Z_FLAG
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub bob: ZScore,
    pub eves: Vec<ZScore>,
}

impl ComparisonReport {
    pub fn all(&self) -> impl Iterator<Item = &ZScore> {
        std::iter::once(&self.bob).chain(&self.eves)
    }

    pub fn any_flagged(&self) -> bool {
        self.all().any(ZScore::flagged)
    }

    pub fn max_abs_z(&self) -> f64 {
        self.all().map(|z| z.z.abs()).fold(0.0, f64::max)
    }
}

fn z_score(party: Party, estimate: Estimate, expected: f64) -> Result<ZScore, SimError> {
    let gap = estimate.value - expected;
    let z = if estimate.stderr > 0.0 {
        gap / estimate.stderr
    } else if gap.abs() <= 1e-12 {
        0.0
    } else {
        return Err(SimError::DegenerateStderr {
            party: party.to_string(),
            hat: estimate.value,
            expected,
        });
    };
    Ok(ZScore {
        party,
        estimate,
        expected,
        z,
    })
}

/// `z = (estimate - closed form) / stderr` for Bob and every eavesdropper.
pub fn compare_to_closed_form(
    estimate: &SimEstimate,
    channel: ChannelNoise,
    chain: &AttackChain,
) -> Result<ComparisonReport, SimError> {
    let bob = z_score(
        Party::Bob,
        estimate.bob_agreement,
        bob_agreement(channel, chain.omegas()).value(),
    )?;
    let eves = estimate
        .eve_agreements
        .iter()
        .zip(eve_agreements(channel, chain))
        .enumerate()
        .map(|(i, (est, exact))| z_score(Party::Eve(i + 1), *est, exact.value()))
        .collect::<Result<_, _>>()?;
    Ok(ComparisonReport { bob, eves })
}
