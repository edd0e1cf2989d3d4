//! Mutual informations, the one-way secret-key yield, threshold solving, and
//! the large-n approximation.
//!
//! All informations are in base-n units, one unit per n-letter symbol, with
//! the convention 0·log 0 = 0 (needed at both ends of the noise range).

use serde::Serialize;

use crate::attack::{betting_comparison, srm_parameters, Verdict};
use crate::channel::ChannelParams;
use crate::error::{Error, Result};

fn log_n(n: usize, x: f64) -> f64 {
    x.ln() / (n as f64).ln()
}

/// `coeff · log_n(arg)` with the 0·log 0 convention: a vanishing coefficient
/// kills the term no matter what the argument is.
fn weighted_log(n: usize, coeff: f64, arg: f64) -> f64 {
    if coeff == 0.0 {
        0.0
    } else {
        coeff * log_n(n, arg)
    }
}

/// 1 + β₀ log_n β₀ + (1−β₀) log_n β₁ for any β₀, β₁ ∈ [0,1]; also serves the
/// plug-in estimators, which may sit outside the accepted parameter range.
pub fn info_ab_components(n: usize, beta0: f64, beta1: f64) -> f64 {
    1.0 + weighted_log(n, beta0, beta0) + weighted_log(n, 1.0 - beta0, beta1)
}

/// 1 + β₀[η₀ log_n η₀ + (1−η₀) log_n η₁], same conventions.
pub fn info_ae_components(n: usize, beta0: f64, eta0: f64, eta1: f64) -> f64 {
    1.0 + beta0 * (weighted_log(n, eta0, eta0) + weighted_log(n, 1.0 - eta0, eta1))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SecurityReport {
    pub n: usize,
    pub beta0: f64,
    /// I(A&B) in base-n units.
    pub i_ab: f64,
    /// I(A&E) in base-n units.
    pub i_ae: f64,
    /// ν = I(A&B) − I(A&E); a secure key of length ν·L is extractable from L
    /// raw nits when ν > 0.
    pub nu: f64,
    /// max{0, ν}.
    pub ck_yield: f64,
    /// β₀ > 2β₁ — whether two-way distillation can still help.
    pub distillable: bool,
    pub betting_verdict: Verdict,
}

/// I(A&B) = 1 + β₀ log_n β₀ + (1−β₀) log_n β₁.
pub fn mutual_info_ab(p: &ChannelParams) -> f64 {
    info_ab_components(p.n, p.beta0, p.beta1)
}

/// I(A&E) = 1 + β₀[η₀ log_n η₀ + (1−η₀) log_n η₁].
pub fn mutual_info_ae(p: &ChannelParams) -> f64 {
    let s = srm_parameters(p);
    info_ae_components(p.n, p.beta0, s.eta0, s.eta1)
}

/// The capacity of the matched-basis channel from Alice to Bob. The channel
/// is weakly symmetric, so uniform input attains it and the value coincides
/// with the mutual information.
pub fn channel_capacity_ab(p: &ChannelParams) -> f64 {
    mutual_info_ab(p)
}

/// Strict β₀ > 2β₁, the regime where two-way distillation remains possible.
pub fn distillable(p: &ChannelParams) -> bool {
    p.beta0 > 2.0 * p.beta1
}

pub fn ck_yield(p: &ChannelParams) -> SecurityReport {
    let i_ab = mutual_info_ab(p);
    let i_ae = mutual_info_ae(p);
    let nu = i_ab - i_ae;
    SecurityReport {
        n: p.n,
        beta0: p.beta0,
        i_ab,
        i_ae,
        nu,
        ck_yield: nu.max(0.0),
        distillable: distillable(p),
        betting_verdict: betting_comparison(p).verdict,
    }
}

fn nu_of(n: usize, beta0: f64) -> f64 {
    let p = ChannelParams::new(n, beta0).expect("bisection stays inside [1/n, 1]");
    mutual_info_ab(&p) - mutual_info_ae(&p)
}

/// One row of the threshold table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThresholdPoint {
    pub n: usize,
    pub nu_target: f64,
    pub beta0: f64,
    pub n_beta1_over_beta0: f64,
    pub eta1_over_eta0: f64,
}

/// Solve ν(β₀) = nu_target by bisection on [1/n, 1]. ν is continuous and
/// strictly increasing from −1 to +1, so the root exists and is unique.
pub fn threshold_beta0(n: usize, nu_target: f64) -> Result<ThresholdPoint> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("n must be ≥ 2, got {n}")));
    }
    if !nu_target.is_finite() || !(0.0..1.0).contains(&nu_target) {
        return Err(Error::InvalidParams(format!(
            "nu target must lie in [0, 1), got {nu_target}"
        )));
    }
    let mut lo = 1.0 / n as f64;
    let mut hi = 1.0;
    for _ in 0..200 {
        if hi - lo <= 1e-10 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if nu_of(n, mid) < nu_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let beta0 = 0.5 * (lo + hi);
    let p = ChannelParams::new(n, beta0)?;
    let s = srm_parameters(&p);
    Ok(ThresholdPoint {
        n,
        nu_target,
        beta0,
        n_beta1_over_beta0: n as f64 * p.beta1 / p.beta0,
        eta1_over_eta0: s.eta1 / s.eta0,
    })
}

/// Closed-form approximation to the threshold:
/// β₀ ≈ (1 + ν + log_n(2/(1−ν))) / (2 + log_n((1+ν)/(1−ν))).
pub fn beta0_approx(n: usize, nu: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("n must be ≥ 2, got {n}")));
    }
    if !nu.is_finite() || !(0.0..1.0).contains(&nu) {
        return Err(Error::InvalidParams(format!(
            "nu must lie in [0, 1), got {nu}"
        )));
    }
    Ok((1.0 + nu + log_n(n, 2.0 / (1.0 - nu))) / (2.0 + log_n(n, (1.0 + nu) / (1.0 - nu))))
}
