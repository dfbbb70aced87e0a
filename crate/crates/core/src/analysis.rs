//! Secured/unsecured boundaries, QBER thresholds and the parameter sweeps
//! built on them.
//!
//! Every root search here is a bisection along a direction in which the
//! security margin `I(A,B) - I_lost` is monotone:
//!
//! - raising a common `ω` lowers `I(A,B)` and raises the information of the
//!   first eavesdropper, which holds the largest share whenever the noise
//!   location distribution is cumulative in chain order;
//! - raising `ω_3` alone lowers `I(A,B)`, raises `I(A,E_3)` and leaves the
//!   upstream eavesdroppers untouched.
//!
//! The bracket ends are always evaluated first and a sentinel is returned
//! when they do not straddle zero.

use std::fmt;

use crate::entropy::entropy_in_domain;
use crate::error::{AnalysisError, ModelError};
use crate::model::{
    added_error, assess, uniform_qs, AttackChain, ChannelNoise, SecurityAssessment,
};
use crate::table::{Cell, SweepTable};

/// Bisection stops once the bracket is narrower than this.
pub const ROOT_TOLERANCE: f64 = 1e-10;

/// A margin this close to zero at a bracket end makes that end the root.
/// Needed where the boundary sits exactly on the bracket, e.g. `ω* = 1` for a
/// single noiseless eavesdropper, and the two sides of the margin are
/// computed along different arithmetic paths.
pub const MARGIN_ZERO: f64 = 1e-12;

/// Status label of a row whose boundary is a numeric root.
pub const STATUS_OK: &str = "ok";

/// How the noise-location probabilities of a symmetric chain are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum QRule {
    /// `q_i = 1 / (N + 1)`.
    Uniform,
    /// Explicit `q_1..q_{N+1}`.
    Explicit(Vec<f64>),
}

impl QRule {
    pub fn qs(&self, n_eves: usize) -> Result<Vec<f64>, ModelError> {
        match self {
            QRule::Uniform => Ok(uniform_qs(n_eves)),
            QRule::Explicit(qs) if qs.len() == n_eves + 1 => Ok(qs.clone()),
            QRule::Explicit(qs) => Err(ModelError::QArity {
                n_eves,
                expected: n_eves + 1,
                got: qs.len(),
            }),
        }
    }
}

/// Outcome of a boundary search along one parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    Root(f64),
    /// Secured over the whole bracket.
    AllSecured,
    /// Unsecured over the whole bracket.
    AllUnsecured,
}

impl Boundary {
    pub fn root(self) -> Option<f64> {
        match self {
            Boundary::Root(x) => Some(x),
            _ => None,
        }
    }

    pub fn status(self) -> &'static str {
        match self {
            Boundary::Root(_) => STATUS_OK,
            Boundary::AllSecured => "ALL_SECURED",
            Boundary::AllUnsecured => "ALL_UNSECURED",
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Root(x) => write!(f, "{x}"),
            other => f.write_str(other.status()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBoundaryPoint {
    pub p: f64,
    pub omega_star: Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QberPoint {
    pub p: f64,
    pub qber: f64,
    pub omega_star: f64,
}

/// `I(A,B) - I_lost`; positive exactly when the key is secured.
pub fn security_margin(channel: ChannelNoise, chain: &AttackChain) -> f64 {
    assess(channel, chain).margin()
}

/// Root of a margin that is positive at `lo` and decreases toward `hi`.
fn bisect_decreasing(margin: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Boundary {
    if margin(lo) <= 0.0 {
        return Boundary::AllUnsecured;
    }
    let at_hi = margin(hi);
    if at_hi.abs() <= MARGIN_ZERO {
        return Boundary::Root(hi);
    }
    if at_hi > 0.0 {
        return Boundary::AllSecured;
    }
    while hi - lo >= ROOT_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if margin(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Boundary::Root(0.5 * (lo + hi))
}

/// Symmetric attack `ω_i = ω` on `n_eves` eavesdroppers.
#[derive(Debug, Clone)]
struct SymmetricAttack {
    channel: ChannelNoise,
    n_eves: usize,
    qs: Vec<f64>,
}

impl SymmetricAttack {
    fn new(p: f64, n_eves: usize, q_rule: &QRule) -> Result<Self, AnalysisError> {
        if n_eves == 0 {
            return Err(AnalysisError::NoEavesdroppers(n_eves));
        }
        let channel = ChannelNoise::new(p)?;
        let qs = q_rule.qs(n_eves)?;
        // Validates the q vector once; later chains reuse it.
        AttackChain::new(vec![0.0; n_eves], qs.clone())?;
        Ok(SymmetricAttack {
            channel,
            n_eves,
            qs,
        })
    }

    fn chain(&self, omega: f64) -> AttackChain {
        AttackChain::new(vec![omega; self.n_eves], self.qs.clone())
            .expect("validated q vector and omega in [0, 1]")
    }

    fn assess(&self, omega: f64) -> SecurityAssessment {
        assess(self.channel, &self.chain(omega))
    }

    fn boundary(&self) -> Boundary {
        bisect_decreasing(|w| self.assess(w).margin(), 0.0, 1.0)
    }
}

/// Common interception probability at which the symmetric attack turns the
/// key from secured to unsecured.
pub fn critical_omega(
    p: f64,
    n_eves: usize,
    q_rule: &QRule,
) -> Result<PhaseBoundaryPoint, AnalysisError> {
    let attack = SymmetricAttack::new(p, n_eves, q_rule)?;
    Ok(PhaseBoundaryPoint {
        p,
        omega_star: attack.boundary(),
    })
}

/// Eavesdropper-added error at the secured/unsecured boundary.
pub fn qber_at(p: f64, n_eves: usize, q_rule: &QRule) -> Result<QberPoint, AnalysisError> {
    let attack = SymmetricAttack::new(p, n_eves, q_rule)?;
    match attack.boundary() {
        Boundary::Root(omega_star) => Ok(QberPoint {
            p,
            qber: added_error(attack.channel, &vec![omega_star; n_eves]),
            omega_star,
        }),
        boundary => Err(AnalysisError::NoThreshold { p, boundary }),
    }
}

fn check_grid(grid: &[f64]) -> Result<(), AnalysisError> {
    if grid.is_empty() {
        return Err(AnalysisError::EmptyGrid);
    }
    if let Some(i) = grid
        .windows(2)
        .position(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(AnalysisError::UnorderedGrid(i + 1));
    }
    Ok(())
}

/// `steps` evenly spaced points from `min` to `max`, both included.
pub fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let last = steps - 1;
            (0..steps)
                .map(|i| {
                    if i == last {
                        max
                    } else {
                        min + (max - min) * i as f64 / last as f64
                    }
                })
                .collect()
        }
    }
}

pub const QBER_COLUMNS: [&str; 7] = [
    "p",
    "omega_star",
    "qber",
    "i_ab",
    "i_ae_max",
    "h_delta",
    "status",
];

/// QBER threshold against `p` for the symmetric attack. Rows without a
/// threshold keep `p` and `h_delta` and carry the sentinel in `status`.
pub fn qber_curve(
    p_grid: &[f64],
    n_eves: usize,
    q_rule: &QRule,
) -> Result<SweepTable, AnalysisError> {
    check_grid(p_grid)?;
    let mut table = SweepTable::new(QBER_COLUMNS);
    for &p in p_grid {
        let attack = SymmetricAttack::new(p, n_eves, q_rule)?;
        let boundary = attack.boundary();
        let row = match boundary {
            Boundary::Root(w) => {
                let a = attack.assess(w);
                vec![
                    p.into(),
                    w.into(),
                    a.added_error.into(),
                    a.i_ab.into(),
                    a.i_ae_max.into(),
                    a.h_delta.into(),
                    boundary.status().into(),
                ]
            }
            _ => vec![
                p.into(),
                Cell::Missing,
                Cell::Missing,
                Cell::Missing,
                Cell::Missing,
                entropy_in_domain(attack.channel.flip_probability()).into(),
                boundary.status().into(),
            ],
        };
        table.push_row(row)?;
    }
    Ok(table)
}

pub const LOST_INFO_COLUMNS: [&str; 3] = ["p", "q1", "i_lost"];

/// Lost information of a single eavesdropper against `p`, one curve per
/// noise-location probability `q_1`.
pub fn lost_info_curve(
    p_grid: &[f64],
    omega: f64,
    q1_values: &[f64],
) -> Result<SweepTable, AnalysisError> {
    check_grid(p_grid)?;
    if q1_values.is_empty() {
        return Err(AnalysisError::EmptyGrid);
    }
    let mut table = SweepTable::new(LOST_INFO_COLUMNS);
    for &q1 in q1_values {
        let chain = AttackChain::new(vec![omega], vec![q1, 1.0 - q1])?;
        for &p in p_grid {
            let a = assess(ChannelNoise::new(p)?, &chain);
            table.push_row(vec![p.into(), q1.into(), a.i_lost.into()])?;
        }
    }
    Ok(table)
}

pub const PHASE_2D_COLUMNS: [&str; 3] = ["p", "omega_star", "status"];

/// Boundary `ω*(p)` of the symmetric attack.
pub fn phase_boundary_2d(
    p_grid: &[f64],
    n_eves: usize,
    q_rule: &QRule,
) -> Result<SweepTable, AnalysisError> {
    check_grid(p_grid)?;
    let mut table = SweepTable::new(PHASE_2D_COLUMNS);
    for &p in p_grid {
        let point = critical_omega(p, n_eves, q_rule)?;
        table.push_row(vec![
            p.into(),
            point.omega_star.root().into(),
            point.omega_star.status().into(),
        ])?;
    }
    Ok(table)
}

pub const PHASE_3D_COLUMNS: [&str; 4] = ["omega1", "omega2", "omega3_star", "status"];

/// Boundary `ω_3*(ω_1, ω_2)` of a three-eavesdropper chain at fixed `p`.
pub fn phase_surface_3d(
    omega1_grid: &[f64],
    omega2_grid: &[f64],
    p: f64,
    qs: &[f64],
) -> Result<SweepTable, AnalysisError> {
    check_grid(omega1_grid)?;
    check_grid(omega2_grid)?;
    let channel = ChannelNoise::new(p)?;
    AttackChain::new(vec![0.0; 3], qs.to_vec())?;
    let mut table = SweepTable::new(PHASE_3D_COLUMNS);
    for &w1 in omega1_grid {
        for &w2 in omega2_grid {
            let margin = |w3: f64| -> Result<f64, ModelError> {
                let chain = AttackChain::new(vec![w1, w2, w3], qs.to_vec())?;
                Ok(assess(channel, &chain).margin())
            };
            // Surfaces the omega validation before bisecting infallibly.
            margin(0.0)?;
            let boundary = bisect_decreasing(|w3| margin(w3).expect("validated chain"), 0.0, 1.0);
            table.push_row(vec![
                w1.into(),
                w2.into(),
                boundary.root().into(),
                boundary.status().into(),
            ])?;
        }
    }
    Ok(table)
}

/// Noise level above which no key is secured even without eavesdroppers:
/// the root of `H(2p/3) = 1/2`.
pub fn critical_noise_no_attack() -> f64 {
    // Entropy of the flip rate increases on [0, 3/4], where 2p/3 reaches 1/2.
    match bisect_decreasing(|p| 0.5 - entropy_in_domain(2.0 * p / 3.0), 0.0, 0.75) {
        Boundary::Root(p) => p,
        other => unreachable!("H(2p/3) - 1/2 changes sign on [0, 3/4], got {other}"),
    }
}
