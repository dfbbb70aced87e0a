//! Binary Shannon entropy and the mutual information of a binary symmetric
//! channel.

use crate::error::ModelError;
use crate::model::Agreement;

/// `H(x) = -(1-x) log2(1-x) - x log2(x)`, with `0 log2 0 = 0`.
pub fn binary_entropy(x: f64) -> Result<f64, ModelError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(ModelError::NotAProbability {
            name: "x",
            value: x,
        });
    }
    Ok(entropy_in_domain(x))
}

pub(crate) fn entropy_in_domain(x: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&x));
    xlog2x(x) + xlog2x(1.0 - x)
}

#[inline]
fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Mutual information between Alice and a receiver whose bit agrees with
/// hers with probability `agreement`: `1 - H(agreement)`.
///
/// The receiver's view is a binary symmetric channel, so this is the same
/// quantity as `1 + P(0|0) log2 P(0|0) + P(1|0) log2 P(1|0)`.
pub fn mutual_information(agreement: Agreement) -> f64 {
    1.0 - entropy_in_domain(agreement.value())
}
