use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zzqec::closedform::{estimate_delta_dipole, threshold};
use zzqec::curve::CurveRequest;
use zzqec::{CodeKind, Engine, FailureResult};

mod validate;

/// Failure probabilities of ZZ-coupled encoded qubits under ideal error correction
#[derive(Parser, Debug)]
#[command(name = "zzqec", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample P(δt) over a range and write CSV
    Curve(CurveArgs),
    /// Cross-check the engines against each other and the closed forms
    Validate(ValidateArgs),
    /// Print the concatenation thresholds on (δt)²
    Threshold,
    /// Estimate the dipolar coupling rate for a given spin separation
    EstimateDelta(EstimateArgs),
}

#[derive(Args, Debug)]
struct CurveArgs {
    /// steane7 or laflamme5
    #[arg(long)]
    code: CodeKind,

    /// Concatenation depth (1 = plain code)
    #[arg(long, default_value_t = 1)]
    depth: u32,

    /// brute, factorized, closed or perturbative
    #[arg(long, default_value = "closed")]
    engine: Engine,

    /// |α|² of the encoded state
    #[arg(long, default_value_t = 0.5)]
    alpha_sq: f64,

    /// δt range in radians, as lo:hi
    #[arg(long, default_value = "0:1.5707963267948966", value_parser = parse_range)]
    range: (f64, f64),

    /// Number of evenly spaced samples, endpoints included
    #[arg(long, default_value_t = 200)]
    samples: usize,

    /// Output CSV path (stdout when omitted)
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// δt points per sweep
    #[arg(long, default_value_t = 100)]
    grid: usize,

    /// Tolerance for depth-2 engine agreement
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,

    /// Write the JSON report here
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// Separation between neighbouring spins, in metres
    #[arg(long, allow_hyphen_values = true)]
    distance: f64,

    /// Duration of one elementary gate, in seconds
    #[arg(long, default_value_t = 1e-5)]
    gate_time: f64,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let lo = lo
        .trim()
        .parse::<f64>()
        .map_err(|e| format!("bad lower bound: {e}"))?;
    let hi = hi
        .trim()
        .parse::<f64>()
        .map_err(|e| format!("bad upper bound: {e}"))?;
    Ok((lo, hi))
}

fn write_csv(
    rows: &[FailureResult],
    out: Box<dyn Write>,
) -> Result<(), Box<dyn std::error::Error>> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["delta_t", "p_fail", "engine", "code", "depth", "alpha_sq"])?;
    for r in rows {
        w.write_record([
            format!("{:.16e}", r.delta_t),
            format!("{:.16e}", r.p_fail),
            r.engine.to_string(),
            r.code.to_string(),
            r.depth.to_string(),
            format!("{:.16e}", r.alpha_sq),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn curve(args: CurveArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let request = CurveRequest {
        code: args.code,
        depth: args.depth,
        engine: args.engine,
        alpha_sq: args.alpha_sq,
        lo: args.range.0,
        hi: args.range.1,
        samples: args.samples,
    };
    let rows = request.run()?;
    let out: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(io::BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    write_csv(&rows, out)?;
    if let Some(path) = &args.output {
        log::info!("wrote {} rows to {}", rows.len(), path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn print_thresholds() {
    for kind in CodeKind::ALL {
        let t = threshold(kind);
        println!(
            "{kind}: C({},2) = {}, depth-1 coefficient {}, {}",
            kind.n_physical(),
            t.block_pairs,
            t.depth_one_coefficient,
            t.display()
        );
    }
}

fn estimate(args: EstimateArgs) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let delta = estimate_delta_dipole(args.distance)?;
    let per_gate = delta * args.gate_time;
    println!("distance      {:e} m", args.distance);
    println!("delta         {delta:.3e} s^-1");
    println!("delta*t_gate  {per_gate:.3e}");
    for kind in CodeKind::ALL {
        let t = threshold(kind);
        // t = c_n · t_gate stays below threshold while (δ c_n t_gate)² < 1/denominator
        let max_steps = t.threshold.sqrt() / per_gate;
        println!("{kind}: below threshold for c_n < {max_steps:.3e} gate times");
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Curve(args) => curve(args),
        Command::Validate(args) => validate::run(args.grid, args.tolerance, args.json.as_deref()),
        Command::Threshold => {
            print_thresholds();
            Ok(ExitCode::SUCCESS)
        }
        Command::EstimateDelta(args) => estimate(args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
