//! Deterministic report assembly: threshold tables, yield curves, and the
//! end-to-end simulation report.
//!
//! Everything here is a pure function of its inputs — no timestamps, no
//! environment probes — so a fixed seed and flag set produce byte-identical
//! output files. Floats are rounded to a fixed number of significant digits
//! before they reach CSV or JSON.

use serde::Serialize;
use serde_json::{json, Value};

use crate::attack::{betting_comparison, srm_parameters};
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::security::{beta0_approx, ck_yield, info_ae_components, threshold_beta0};
use crate::sim::{empirical_mutual_info, eve_accuracy, ProtocolTranscript};
use crate::tomography::TomographyResult;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SIG_DIGITS: usize = 6;

/// Round to `sig` significant digits; used on every float that lands in a
/// JSON report so that precision is a flag, not an accident.
pub fn round_sig(x: f64, sig: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", sig.saturating_sub(1), x)
        .parse()
        .expect("scientific notation round-trips")
}

/// Fixed significant-digit decimal formatting for CSV cells, switching to
/// scientific notation outside a readable exponent range.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let epos = sci.find('e').expect("scientific notation has an exponent");
    let exp: i32 = sci[epos + 1..].parse().expect("exponent parses");
    if exp < -4 || exp >= sig as i32 {
        sci
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    }
}

/// Provenance block carried by every output file: JSON reports embed it,
/// CSV tables get it as a sibling `.manifest.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    pub seed: Option<u64>,
    /// Full flag echo, defaults included.
    pub config: Value,
    /// Paths written by the run, in write order.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: "tomoqkd",
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed: None,
            config,
            outputs: Vec::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn record_output(&mut self, path: &str) {
        self.outputs.push(path.to_string());
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("manifest serializes")
    }
}

/// One row of the threshold table: the exact zero-yield (or target-yield)
/// noise parameters next to the closed-form approximation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThresholdRow {
    pub n: usize,
    pub nu: f64,
    pub beta0: f64,
    pub n_beta1_over_beta0: f64,
    pub eta1_over_eta0: f64,
    pub beta0_approx: f64,
    pub approx_rel_error: f64,
}

pub const THRESHOLDS_HEADER: &str =
    "n,nu,beta0,n_beta1_over_beta0,eta1_over_eta0,beta0_approx,approx_rel_error";

/// Solve the threshold for every (n, ν) combination, n-major so rows group
/// the way the printed table does.
pub fn threshold_table(n_list: &[usize], nu_list: &[f64]) -> Result<Vec<ThresholdRow>> {
    let mut rows = Vec::with_capacity(n_list.len() * nu_list.len());
    for &n in n_list {
        for &nu in nu_list {
            let t = threshold_beta0(n, nu)?;
            let approx = beta0_approx(n, nu)?;
            rows.push(ThresholdRow {
                n,
                nu,
                beta0: t.beta0,
                n_beta1_over_beta0: t.n_beta1_over_beta0,
                eta1_over_eta0: t.eta1_over_eta0,
                beta0_approx: approx,
                approx_rel_error: (approx - t.beta0).abs() / t.beta0,
            });
        }
    }
    Ok(rows)
}

pub fn thresholds_csv(rows: &[ThresholdRow], sig: usize) -> String {
    let mut out = String::from(THRESHOLDS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            fmt_sig(r.nu, sig),
            fmt_sig(r.beta0, sig),
            fmt_sig(r.n_beta1_over_beta0, sig),
            fmt_sig(r.eta1_over_eta0, sig),
            fmt_sig(r.beta0_approx, sig),
            fmt_sig(r.approx_rel_error, sig),
        ));
    }
    out
}

pub fn thresholds_json(rows: &[ThresholdRow], sig: usize, manifest: &RunManifest) -> Value {
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "nu": round_sig(r.nu, sig),
                "beta0": round_sig(r.beta0, sig),
                "n_beta1_over_beta0": round_sig(r.n_beta1_over_beta0, sig),
                "eta1_over_eta0": round_sig(r.eta1_over_eta0, sig),
                "beta0_approx": round_sig(r.beta0_approx, sig),
                "approx_rel_error": round_sig(r.approx_rel_error, sig),
            })
        })
        .collect();
    json!({ "manifest": manifest.to_json(), "rows": rows })
}

/// One sample of the secret-key yield curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct YieldPoint {
    pub beta0: f64,
    pub nu: f64,
    pub ck_yield: f64,
}

pub const YIELD_HEADER: &str = "beta0,nu,ck_yield";

/// Sample ν(β₀) on a uniform grid over [1/n, 1], both endpoints included.
pub fn yield_curve(n: usize, points: usize) -> Result<Vec<YieldPoint>> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("n must be ≥ 2, got {n}")));
    }
    if points < 2 {
        return Err(Error::InvalidParams(format!(
            "a curve needs at least 2 points, got {points}"
        )));
    }
    let lo = 1.0 / n as f64;
    let mut out = Vec::with_capacity(points);
    for i in 0..points {
        let frac = i as f64 / (points - 1) as f64;
        let beta0 = lo + (1.0 - lo) * frac;
        let p = ChannelParams::new(n, beta0)?;
        let r = ck_yield(&p);
        out.push(YieldPoint {
            beta0,
            nu: r.nu,
            ck_yield: r.ck_yield,
        });
    }
    Ok(out)
}

pub fn yield_csv(points: &[YieldPoint], sig: usize) -> String {
    let mut out = String::from(YIELD_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_sig(p.beta0, sig),
            fmt_sig(p.nu, sig),
            fmt_sig(p.ck_yield, sig),
        ));
    }
    out
}

pub fn yield_json(n: usize, points: &[YieldPoint], sig: usize, manifest: &RunManifest) -> Value {
    let pts: Vec<Value> = points
        .iter()
        .map(|p| {
            json!({
                "beta0": round_sig(p.beta0, sig),
                "nu": round_sig(p.nu, sig),
                "ck_yield": round_sig(p.ck_yield, sig),
            })
        })
        .collect();
    json!({ "manifest": manifest.to_json(), "n": n, "points": pts })
}

/// Assemble the end-to-end simulation report: configured channel, analytic
/// attack/security quantities, raw simulation statistics, plug-in empirical
/// estimates, and the tomography verdict.
///
/// The empirical ν̂ charges Eve with the optimal attack consistent with the
/// observed noise — I(A&E) evaluated at β̂₀ — rather than with her simulated
/// hit rate, so the reported key length stays conservative. The secure key
/// length is ⌊max(0, ν̂) · (sifted − sacrificed)⌋ in n-ary units.
pub fn simulate_report(
    t: &ProtocolTranscript,
    fit: &TomographyResult,
    manifest: &RunManifest,
    sig: usize,
) -> Value {
    let r = |x: f64| round_sig(x, sig);
    let p = &t.params;
    let analytic = ck_yield(p);
    let srm = srm_parameters(p);
    let betting = betting_comparison(p);

    let sifted = t.sifted_len();
    let net = t.net_key_length();
    let eve_stats = eve_accuracy(t).ok();

    let empirical = match empirical_mutual_info(t) {
        Err(_) => Value::Null,
        Ok(mi) => {
            let beta0_assumed = mi.beta0_hat.clamp(1.0 / p.n as f64, 1.0);
            let assumed = ChannelParams::new(p.n, beta0_assumed)
                .expect("clamped parameter is in range");
            let s = srm_parameters(&assumed);
            let i_ae_assumed = info_ae_components(p.n, beta0_assumed, s.eta0, s.eta1);
            let nu_hat = mi.i_ab_hat - i_ae_assumed;
            let yield_hat = nu_hat.max(0.0);
            let secure_key_nits = (yield_hat * net as f64).floor() as u64;
            json!({
                "beta0_hat": r(mi.beta0_hat),
                "eta0_hat": mi.eta0_hat.map(r),
                "i_ab_hat": r(mi.i_ab_hat),
                "i_ae_hat": mi.i_ae_hat.map(r),
                "i_ae_assumed": r(i_ae_assumed),
                "nu_hat": r(nu_hat),
                "ck_yield_hat": r(yield_hat),
                "secure_key_nits": secure_key_nits,
                "insufficient_data": mi.insufficient_data,
            })
        }
    };

    json!({
        "manifest": manifest.to_json(),
        "channel": {
            "n": p.n,
            "beta0": r(p.beta0),
            "beta1": r(p.beta1),
            "noise_ratio": r(p.ratio()),
        },
        "analytic": {
            "i_ab": r(analytic.i_ab),
            "i_ae": r(analytic.i_ae),
            "nu": r(analytic.nu),
            "ck_yield": r(analytic.ck_yield),
            "distillable": analytic.distillable,
            "betting_verdict": betting.verdict,
            "eta0": r(srm.eta0),
            "eta1": r(srm.eta1),
            "eve_overall_accuracy": r(1.0 - p.beta0 + p.beta0 * srm.eta0),
        },
        "simulation": {
            "pairs": t.pairs,
            "seed": t.seed,
            "eve_enabled": t.eve_enabled,
            "sacrifice_fraction": r(t.sacrifice_fraction),
            "overridden": t.overridden,
            "sifted": sifted,
            "sacrificed": t.sacrificed_rounds,
            "net_key_length": net,
            "matched_fraction": r(sifted as f64 / t.pairs as f64),
            "same_value_rate": t.same_value_rate().map(r),
            "tomography_pool": t.tomo_counts.total(),
            "eve": eve_stats.map(|e| json!({
                "p_correct_overall": r(e.p_correct_overall),
                "p_correct_given_equal": r(e.p_correct_given_equal),
            })),
        },
        "empirical": empirical,
        "tomography": {
            "beta0_hat": r(fit.beta0_hat),
            "residual": r(fit.residual),
            "sigma_scale": r(fit.sigma_scale),
            "threshold_k": r(fit.threshold_k),
            "verdict": if fit.accepted { "accept" } else { "reject" },
            "pair_deviations": (0..=p.n).flat_map(|a| (0..=p.n).map(move |b| (a, b)))
                .map(|(a, b)| json!({
                    "alice_basis": a,
                    "bob_basis": b,
                    "max_deviation": r(fit.pair_deviation(a, b)),
                }))
                .collect::<Vec<_>>(),
        },
        "verdict": if fit.accepted { "accept" } else { "reject" },
    })
}
