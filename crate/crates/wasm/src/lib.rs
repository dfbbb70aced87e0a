//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every chain here is symmetric (`ω_i = ω`) with the noise location uniform
//! over the `N + 1` segments. Curves come back as flat interleaved arrays so
//! they cross the JS boundary as a single `Float64Array`; `NaN` marks grid
//! points without a boundary.

use bb84_core::analysis::{critical_noise_no_attack, critical_omega, linspace, qber_at, Boundary};
use bb84_core::montecarlo::{compare_to_closed_form, run, SimConfig};
use bb84_core::{assess, AnalysisError, AttackChain, ChannelNoise, QRule};
use wasm_bindgen::prelude::*;

/// Largest photon count the page may request in one call.
pub const MAX_PHOTONS: u64 = 5_000_000;

fn grid(p_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    if !(0.0..=1.0).contains(&p_max) || p_max == 0.0 {
        return Err(format!("p_max = {p_max} must lie in (0, 1]"));
    }
    if !(2..=10_000).contains(&steps) {
        return Err(format!("steps = {steps} must lie in 2..=10000"));
    }
    Ok(linspace(0.0, p_max, steps))
}

fn message(e: AnalysisError) -> String {
    e.to_string()
}

/// `[p0, ω*0, p1, ω*1, ...]`; `ω* = NaN` where no attack leaves the key
/// secured, 1 where every attack does.
pub fn phase_boundary_points(n_eves: usize, p_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    let mut out = Vec::with_capacity(2 * steps);
    for p in grid(p_max, steps)? {
        let point = critical_omega(p, n_eves, &QRule::Uniform).map_err(message)?;
        let w = match point.omega_star {
            Boundary::Root(w) => w,
            Boundary::AllSecured => 1.0,
            Boundary::AllUnsecured => f64::NAN,
        };
        out.extend([p, w]);
    }
    Ok(out)
}

/// `[p0, qber0, p1, qber1, ...]`; `NaN` where no threshold exists.
pub fn qber_points(n_eves: usize, p_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    let mut out = Vec::with_capacity(2 * steps);
    for p in grid(p_max, steps)? {
        let qber = match qber_at(p, n_eves, &QRule::Uniform) {
            Ok(point) => point.qber,
            Err(AnalysisError::NoThreshold { .. }) => f64::NAN,
            Err(e) => return Err(message(e)),
        };
        out.extend([p, qber]);
    }
    Ok(out)
}

fn symmetric_chain(omega: f64, n_eves: usize) -> Result<AttackChain, String> {
    AttackChain::with_uniform_noise(vec![omega; n_eves]).map_err(|e| e.to_string())
}

/// `[i_ab, i_ae_max, h_delta, i_lost, p_err, secured (0 or 1)]`.
pub fn assess_values(p: f64, omega: f64, n_eves: usize) -> Result<Vec<f64>, String> {
    let channel = ChannelNoise::new(p).map_err(|e| e.to_string())?;
    let a = assess(channel, &symmetric_chain(omega, n_eves)?);
    Ok(vec![
        a.i_ab,
        a.i_ae_max,
        a.h_delta,
        a.i_lost,
        a.added_error,
        f64::from(u8::from(a.secured)),
    ])
}

/// Per party (Bob first, then each eavesdropper):
/// `[estimate, stderr, closed form, z]`, concatenated.
pub fn simulation_values(
    p: f64,
    omega: f64,
    n_eves: usize,
    photons: u64,
    seed: u64,
) -> Result<Vec<f64>, String> {
    if !(1..=MAX_PHOTONS).contains(&photons) {
        return Err(format!("photons must lie in 1..={MAX_PHOTONS}"));
    }
    let channel = ChannelNoise::new(p).map_err(|e| e.to_string())?;
    let chain = symmetric_chain(omega, n_eves)?;
    let estimate = run(
        SimConfig {
            n_photons: photons,
            seed,
        },
        channel,
        &chain,
    )
    .map_err(|e| e.to_string())?;
    let report = compare_to_closed_form(&estimate, channel, &chain).map_err(|e| e.to_string())?;
    Ok(report
        .all()
        .flat_map(|z| [z.estimate.value, z.estimate.stderr, z.expected, z.z])
        .collect())
}

#[wasm_bindgen]
pub fn phase_boundary(n_eves: usize, p_max: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    phase_boundary_points(n_eves, p_max, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn qber_curve(n_eves: usize, p_max: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    qber_points(n_eves, p_max, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn assess_point(p: f64, omega: f64, n_eves: usize) -> Result<Vec<f64>, JsError> {
    assess_values(p, omega, n_eves).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn simulate(
    p: f64,
    omega: f64,
    n_eves: usize,
    photons: u32,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    simulation_values(p, omega, n_eves, u64::from(photons), u64::from(seed))
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn critical_p() -> f64 {
    critical_noise_no_attack()
}
