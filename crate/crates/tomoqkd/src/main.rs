//! Command-line front end: threshold tables, yield curves, basis dumps, and
//! end-to-end protocol simulation with the tomographic acceptance test.
//!
//! Exit codes are part of the interface: 0 on success/acceptance, 1 on usage
//! or configuration errors, 2 when tomography rejects the observed state.
//! Given the same seed and flags, output files are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use tomoqkd::channel::ChannelParams;
use tomoqkd::error::Error;
use tomoqkd::linalg::CMatrix;
use tomoqkd::mub::build_basis_family;
use tomoqkd::report::{
    simulate_report, threshold_table, thresholds_csv, thresholds_json, yield_csv, yield_curve,
    yield_json, RunManifest, DEFAULT_SIG_DIGITS,
};
use tomoqkd::sim::{run_protocol, SimConfig};
use tomoqkd::tomography::acceptance_pipeline;

#[derive(Parser)]
#[command(name = "tomoqkd", version, about = "Tomographic qunit QKD: tables, curves, and protocol simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the threshold noise parameters on a grid of dimensions and
    /// target yields.
    Thresholds {
        /// Dimensions, comma-separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 3, 4, 5, 10, 30, 50, 100])]
        n: Vec<usize>,
        /// Target yields in [0, 1), comma-separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.5])]
        nu: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Output path. Defaults to stdout, or to a file under
        /// $TOMOQKD_OUT_DIR when that is set.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Significant digits in printed numbers.
        #[arg(long, default_value_t = DEFAULT_SIG_DIGITS)]
        precision: usize,
    },
    /// Sample the secret-key yield as a function of the channel noise.
    YieldCurve {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SIG_DIGITS)]
        precision: usize,
    },
    /// Run the protocol end to end: simulate, reconstruct the state from the
    /// discarded rounds, test family membership, and report the key yield.
    #[command(group(ArgGroup::new("noise").required(true).multiple(false)))]
    Simulate {
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Same-value probability β₀ of the channel, in [1/n, 1].
        #[arg(long, group = "noise")]
        beta0: Option<f64>,
        /// Noise ratio β₁/β₀ in [0, 1]; an alternative to --beta0.
        #[arg(long, alias = "beta0-ratio", group = "noise")]
        ratio: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        pairs: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fraction of matched rounds sacrificed to tomography.
        #[arg(long, default_value_t = 0.1)]
        sacrifice: f64,
        #[arg(long, value_enum, default_value_t = Toggle::On)]
        eve: Toggle,
        /// Replace the source by a state read from a JSON file: a row-major
        /// list of n²×n² [re, im] pairs.
        #[arg(long)]
        override_state: Option<PathBuf>,
        /// Report path. Defaults to stdout, or to a file under
        /// $TOMOQKD_OUT_DIR when that is set.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also dump the full outcome count tensor as CSV.
        #[arg(long)]
        counts_csv: Option<PathBuf>,
        /// Also dump per-round records as CSV (capped at 100000 rows).
        #[arg(long)]
        rounds_csv: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SIG_DIGITS)]
        precision: usize,
    },
    /// Dump the measurement bases for one dimension as JSON.
    Bases {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap uses exit code 2 for usage errors; this tool reserves 2
            // for tomography rejection.
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Fall back to $TOMOQKD_OUT_DIR/<default_name> when no path was given.
fn resolve_out(out: Option<PathBuf>, default_name: &str) -> Option<PathBuf> {
    out.or_else(|| {
        std::env::var_os("TOMOQKD_OUT_DIR").map(|dir| PathBuf::from(dir).join(default_name))
    })
}

fn manifest_sibling(path: &Path) -> PathBuf {
    path.with_extension("manifest.json")
}

fn write_or_print(path: Option<&Path>, content: &str) -> tomoqkd::Result<()> {
    match path {
        Some(p) => fs::write(p, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

/// A CSV written to a file is accompanied by `<stem>.manifest.json`; on
/// stdout the table stands alone.
fn emit_table(
    path: Option<PathBuf>,
    format: Format,
    manifest: &mut RunManifest,
    csv: impl FnOnce() -> String,
    json_doc: impl FnOnce(&RunManifest) -> Value,
) -> tomoqkd::Result<()> {
    match format {
        Format::Csv => {
            if let Some(p) = &path {
                let sibling = manifest_sibling(p);
                manifest.record_output(&p.display().to_string());
                manifest.record_output(&sibling.display().to_string());
                fs::write(p, csv())?;
                fs::write(&sibling, json_text(&manifest.to_json()))?;
            } else {
                print!("{}", csv());
            }
        }
        Format::Json => {
            if let Some(p) = &path {
                manifest.record_output(&p.display().to_string());
            }
            let doc = json_text(&json_doc(manifest));
            write_or_print(path.as_deref(), &doc)?;
        }
    }
    Ok(())
}

fn load_override_state(path: &Path, n: usize) -> tomoqkd::Result<CMatrix> {
    let text = fs::read_to_string(path)?;
    let entries: Vec<[f64; 2]> = serde_json::from_str(&text)?;
    let d = n * n;
    if entries.len() != d * d {
        return Err(Error::InvalidConfig(format!(
            "override state for n={n} needs {} entries, file has {}",
            d * d,
            entries.len()
        )));
    }
    let data = entries.into_iter().map(|[re, im]| C64::new(re, im)).collect();
    Ok(CMatrix::from_data(d, d, data))
}

fn run(command: Command) -> tomoqkd::Result<ExitCode> {
    match command {
        Command::Thresholds {
            n,
            nu,
            format,
            out,
            precision,
        } => {
            let rows = threshold_table(&n, &nu)?;
            let default_name = match format {
                Format::Csv => "thresholds.csv",
                Format::Json => "thresholds.json",
            };
            let path = resolve_out(out, default_name);
            let mut manifest = RunManifest::new(
                "thresholds",
                json!({ "n": n, "nu": nu, "precision": precision }),
            );
            emit_table(
                path,
                format,
                &mut manifest,
                || thresholds_csv(&rows, precision),
                |m| thresholds_json(&rows, precision, m),
            )?;
            Ok(ExitCode::SUCCESS)
        }

        Command::YieldCurve {
            n,
            points,
            format,
            out,
            precision,
        } => {
            let curve = yield_curve(n, points)?;
            let default_name = match format {
                Format::Csv => format!("yield_curve_n{n}.csv"),
                Format::Json => format!("yield_curve_n{n}.json"),
            };
            let path = resolve_out(out, &default_name);
            let mut manifest = RunManifest::new(
                "yield-curve",
                json!({ "n": n, "points": points, "precision": precision }),
            );
            emit_table(
                path,
                format,
                &mut manifest,
                || yield_csv(&curve, precision),
                |m| yield_json(n, &curve, precision, m),
            )?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Simulate {
            n,
            beta0,
            ratio,
            pairs,
            seed,
            sacrifice,
            eve,
            override_state,
            out,
            counts_csv,
            rounds_csv,
            precision,
        } => {
            let params = match (beta0, ratio) {
                (Some(b), None) => ChannelParams::new(n, b)?,
                (None, Some(r)) => ChannelParams::params_from_ratio(n, r)?,
                // clap's required group rules both other cases out
                _ => unreachable!("exactly one of --beta0/--ratio"),
            };
            let mut cfg = SimConfig::new(params, pairs, seed)?
                .with_sacrifice(sacrifice)?
                .with_eve(eve == Toggle::On);
            if let Some(p) = &override_state {
                cfg = cfg.with_override(load_override_state(p, n)?)?;
            }

            let family = build_basis_family(n)?;
            let transcript = run_protocol(&cfg)?;
            let fit = acceptance_pipeline(&transcript, &family)?;

            let mut manifest = RunManifest::new(
                "simulate",
                json!({
                    "n": n,
                    "beta0": beta0,
                    "ratio": ratio,
                    "pairs": pairs,
                    "seed": seed,
                    "sacrifice": sacrifice,
                    "eve": matches!(eve, Toggle::On),
                    "override_state": override_state.as_ref().map(|p| p.display().to_string()),
                    "precision": precision,
                }),
            )
            .with_seed(seed);

            let path = resolve_out(out, &format!("simulate_n{n}_seed{seed}.json"));
            if let Some(p) = &path {
                manifest.record_output(&p.display().to_string());
            }
            if let Some(p) = &counts_csv {
                manifest.record_output(&p.display().to_string());
            }
            if let Some(p) = &rounds_csv {
                manifest.record_output(&p.display().to_string());
            }

            let report = simulate_report(&transcript, &fit, &manifest, precision);
            write_or_print(path.as_deref(), &json_text(&report))?;

            if let Some(p) = &counts_csv {
                let mut file = fs::File::create(p)?;
                transcript.counts.write_csv(&mut file)?;
            }
            if let Some(p) = &rounds_csv {
                let mut file = fs::File::create(p)?;
                transcript.write_rounds_csv(&mut file, None)?;
            }

            Ok(if fit.accepted {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }

        Command::Bases { n, out } => {
            let family = build_basis_family(n)?;
            let path = resolve_out(out, &format!("bases_n{n}.json"));
            let mut manifest = RunManifest::new("bases", json!({ "n": n }));
            if let Some(p) = &path {
                manifest.record_output(&p.display().to_string());
            }
            let doc = json!({ "manifest": manifest.to_json(), "bases": family.to_json() });
            write_or_print(path.as_deref(), &json_text(&doc))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
