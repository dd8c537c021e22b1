use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bcc_wef::bounds::{default_truncation, min_distance_bound, sweep};
use bcc_wef::ensemble::{ensemble_wef, EnsembleKind};
use bcc_wef::oracle::{
    exhaustive_ensemble_average, exhaustive_terminated_wef, random_folding_trials, FoldingCheck,
    MAX_EXHAUSTIVE_BCC_N,
};
use bcc_wef::polywef::{terminated_wef, UNBOUNDED};
use bcc_wef::trellis::{build_transfer_matrix, build_trellis, GeneratorSpec};
use bcc_wef::{Error, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

const DEFAULT_PCC_GEN: &str = "1,5/7";
const DEFAULT_BCC_GEN: &str = "1,0,1/7;0,1,5/7";

/// Exact weight enumerators and ML bounds for PCC and braided
/// convolutional code ensembles.
#[derive(Parser)]
#[command(name = "bccwef", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Pcc,
    Bcc,
}

impl From<Kind> for EnsembleKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Pcc => EnsembleKind::Pcc,
            Kind::Bcc => EnsembleKind::Bcc,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Terminated-trellis weight enumerator of one component encoder.
    Wef {
        /// Generator, e.g. "1,5/7" or "1,0,1/7;0,1,5/7" (octal, D^0 first).
        #[arg(long)]
        gen: String,
        /// Number of trellis sections.
        #[arg(long)]
        n: u32,
        /// Drop terms of total weight above this value.
        #[arg(long)]
        wmax: Option<u32>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Union bounds on BER and FER over an Eb/N0 grid.
    Bound {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Upper (and, unless --gen-lower is given, lower) generator.
        #[arg(long)]
        gen: Option<String>,
        #[arg(long)]
        gen_lower: Option<String>,
        /// Permutation size.
        #[arg(long)]
        n: u32,
        /// Truncation weight; defaults to a Gilbert-Varshamov based value.
        #[arg(long)]
        wmax: Option<u32>,
        /// Eb/N0 grid in dB as start:stop:step, endpoints included.
        #[arg(long, default_value = "0:6:0.25")]
        snr: String,
        /// Also report the expurgated BER bound keeping this fraction of codes.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimum-distance bounds of the BCC ensemble.
    Mindist {
        #[arg(long)]
        gen: Option<String>,
        #[arg(long)]
        gen_lower: Option<String>,
        /// Comma-separated permutation sizes.
        #[arg(long, value_delimiter = ',', default_value = "32,64,128,256")]
        ns: Vec<u32>,
        /// Comma-separated fractions of retained codes, each in [0, 1).
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,0.95")]
        alphas: Vec<f64>,
        #[arg(long)]
        wmax: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive small-size checks of the enumerators and of codeword folding.
    Verify {
        /// Permutation size for the exhaustive checks.
        #[arg(long, default_value_t = 3)]
        n: u32,
        /// Coupling length for the folding checks.
        #[arg(long, default_value_t = 2)]
        l: u32,
        #[arg(long, default_value_t = 20)]
        trials: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_gen(text: &str) -> Result<GeneratorSpec> {
    text.parse()
}

/// Inclusive grid `start, start + step, ...` up to `stop`.
fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Error::Usage(format!("bad grid {text:?}, expected start:stop:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(bad());
    }
    if step <= 0.0 {
        return Err(Error::Usage(format!(
            "grid step must be positive, got {step}"
        )));
    }
    if stop < start {
        return Err(Error::Usage(format!("empty grid {text:?}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Usage(format!(
            "alpha must satisfy 0 <= alpha < 1, got {alpha}"
        )));
    }
    Ok(())
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Usage("N must be at least 1".into()));
    }
    Ok(())
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_text(out: &Option<PathBuf>, text: &str) -> Result<()> {
    let mut w = sink(out)?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

fn components(
    kind: EnsembleKind,
    gen: Option<String>,
    gen_lower: Option<String>,
) -> Result<(GeneratorSpec, GeneratorSpec)> {
    let default = match kind {
        EnsembleKind::Pcc => DEFAULT_PCC_GEN,
        EnsembleKind::Bcc => DEFAULT_BCC_GEN,
    };
    let upper = parse_gen(gen.as_deref().unwrap_or(default))?;
    let lower = match gen_lower {
        Some(text) => parse_gen(&text)?,
        None => upper.clone(),
    };
    Ok((upper, lower))
}

fn cmd_wef(
    gen: &str,
    n: u32,
    wmax: Option<u32>,
    format: Format,
    out: &Option<PathBuf>,
) -> Result<()> {
    check_n(n)?;
    let spec = parse_gen(gen)?;
    let table = terminated_wef(
        &build_transfer_matrix(&build_trellis(&spec)),
        n,
        wmax.unwrap_or(UNBOUNDED),
    )?;
    match format {
        Format::Json => write_text(out, &table.to_json()?),
        Format::Csv => {
            let mut w = sink(out)?;
            table.write_csv(&mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_bound(
    kind: EnsembleKind,
    gen: Option<String>,
    gen_lower: Option<String>,
    n: u32,
    wmax: Option<u32>,
    snr: &str,
    alpha: Option<f64>,
    format: Format,
    out: &Option<PathBuf>,
) -> Result<()> {
    check_n(n)?;
    let grid = parse_grid(snr)?;
    if let Some(a) = alpha {
        check_alpha(a)?;
    }
    let (upper, lower) = components(kind, gen, gen_lower)?;
    let w = match wmax {
        Some(w) => w,
        None => default_truncation(kind, n)?,
    };
    let e = ensemble_wef(kind, &upper, &lower, n, w)?;
    let mut curve = sweep(&e, &grid, alpha)?;
    curve.generators = vec![upper.to_string(), lower.to_string()];
    match format {
        Format::Json => write_text(out, &curve.to_json()?),
        Format::Csv => {
            let mut w = sink(out)?;
            curve.write_csv(&mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn cmd_mindist(
    gen: Option<String>,
    gen_lower: Option<String>,
    ns: &[u32],
    alphas: &[f64],
    wmax: Option<u32>,
    out: &Option<PathBuf>,
) -> Result<()> {
    if ns.is_empty() || alphas.is_empty() {
        return Err(Error::Usage("--ns and --alphas must be non-empty".into()));
    }
    for &a in alphas {
        check_alpha(a)?;
    }
    for &n in ns {
        check_n(n)?;
    }
    let (upper, lower) = components(EnsembleKind::Bcc, gen, gen_lower)?;
    let mut rows = vec!["n,alpha,w_max,d_hat,lower_bound_only".to_string()];
    for &n in ns {
        let w = match wmax {
            Some(w) => w,
            None => default_truncation(EnsembleKind::Bcc, n)?,
        };
        let spectrum = ensemble_wef(EnsembleKind::Bcc, &upper, &lower, n, w)?.total_weight();
        for &a in alphas {
            let r = min_distance_bound(&spectrum, a)?;
            rows.push(format!(
                "{n},{a},{},{},{}",
                spectrum.w_max, r.d_hat, r.lower_bound_only
            ));
        }
    }
    write_text(out, &rows.join("\n"))
}

#[derive(Serialize)]
struct NamedCheck {
    name: String,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
struct VerifyReport {
    #[serde(rename = "N")]
    n: u32,
    #[serde(rename = "L")]
    l: u32,
    seed: u64,
    trials: u32,
    checks: Vec<NamedCheck>,
    folding: Vec<FoldingCheck>,
    passed: bool,
}

fn cmd_verify(n: u32, l: u32, trials: u32, seed: u64, out: &Option<PathBuf>) -> Result<bool> {
    if n == 0 || n > MAX_EXHAUSTIVE_BCC_N {
        return Err(Error::Usage(format!(
            "exhaustive verification supports 1 <= N <= {MAX_EXHAUSTIVE_BCC_N}, got {n}"
        )));
    }
    if l == 0 {
        return Err(Error::Usage("coupling length must be at least 1".into()));
    }
    let mut checks = Vec::new();
    for text in [DEFAULT_PCC_GEN, DEFAULT_BCC_GEN] {
        let spec = parse_gen(text)?;
        let analytic = terminated_wef(&build_transfer_matrix(&build_trellis(&spec)), n, UNBOUNDED)?;
        let brute = exhaustive_terminated_wef(&spec, n)?;
        checks.push(NamedCheck {
            name: format!("terminated enumerator {spec}"),
            passed: analytic.coefficients() == brute.coefficients(),
            detail: format!("{} coefficients", brute.coefficients().len()),
        });
    }
    for (kind, text) in [
        (EnsembleKind::Pcc, DEFAULT_PCC_GEN),
        (EnsembleKind::Bcc, DEFAULT_BCC_GEN),
    ] {
        let g = parse_gen(text)?;
        let formula = ensemble_wef(kind, &g, &g, n, UNBOUNDED)?;
        let brute = exhaustive_ensemble_average(kind, &g, &g, n)?;
        checks.push(NamedCheck {
            name: format!("{kind} ensemble average"),
            passed: formula.coefficients() == brute.coefficients(),
            detail: format!("{} exhaustive codes", brute.ensemble_size()),
        });
    }
    let g = parse_gen(DEFAULT_BCC_GEN)?;
    let folding = random_folding_trials(&g, &g, n as usize, l as usize, trials as usize, seed)?;
    let passed = checks.iter().all(|c| c.passed) && folding.iter().all(FoldingCheck::passed);
    let report = VerifyReport {
        n,
        l,
        seed,
        trials,
        checks,
        folding,
        passed,
    };
    write_text(
        out,
        &serde_json::to_string_pretty(&report).map_err(Error::from)?,
    )?;
    Ok(passed)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Wef {
            gen,
            n,
            wmax,
            format,
            out,
        } => cmd_wef(&gen, n, wmax, format, &out).map(|_| true),
        Command::Bound {
            kind,
            gen,
            gen_lower,
            n,
            wmax,
            snr,
            alpha,
            format,
            out,
        } => cmd_bound(
            kind.into(),
            gen,
            gen_lower,
            n,
            wmax,
            &snr,
            alpha,
            format,
            &out,
        )
        .map(|_| true),
        Command::Mindist {
            gen,
            gen_lower,
            ns,
            alphas,
            wmax,
            out,
        } => cmd_mindist(gen, gen_lower, &ns, &alphas, wmax, &out).map(|_| true),
        Command::Verify {
            n,
            l,
            trials,
            seed,
            out,
        } => cmd_verify(n, l, trials, seed, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("bccwef: verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("bccwef: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_include_both_endpoints() {
        assert_eq!(parse_grid("0:6:0.25").unwrap().len(), 25);
        let g = parse_grid("0:1:0.1").unwrap();
        assert_eq!(g.len(), 11);
        assert!((g[10] - 1.0).abs() < 1e-12);
        assert_eq!(parse_grid("2:2:1").unwrap(), vec![2.0]);
        assert_eq!(parse_grid("0:1:0.3").unwrap().len(), 4);
    }

    #[test]
    fn bad_grids_are_usage_errors() {
        for text in ["1:0:0.5", "0:1:-1", "0:1", "0:inf:1", "x:1:1"] {
            assert!(parse_grid(text).unwrap_err().is_usage(), "{text}");
        }
    }
}
