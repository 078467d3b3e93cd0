use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{ArgMatches, Args};

use fourier_greeks::fourier::{Method, Payoff};
use fourier_greeks::models::ModelSpec;

use crate::args::{EngineArgs, FdArgs, MethodName, ModelArgs, PayoffName};
use crate::output::{ensure_parent, resolve, RunManifest};
use crate::pricing::Pricing;
use crate::Usage;

pub const HEADER: [&str; 7] = ["s0", "method", "payoff", "price", "delta", "gamma", "warnings"];

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0.75)]
    pub strike: f64,
    /// Payoffs to sweep; repeat or separate with commas.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [PayoffName::Call, PayoffName::DigitalPut])]
    pub payoff: Vec<PayoffName>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [MethodName::Fd, MethodName::CarrMadan, MethodName::Cos, MethodName::Lewis])]
    pub method: Vec<MethodName>,
    #[arg(long, default_value_t = 0.60)]
    pub s0_min: f64,
    #[arg(long, default_value_t = 0.90)]
    pub s0_max: f64,
    /// Grid points including both ends; 1 evaluates `--s0-min` only.
    #[arg(long, default_value_t = 61)]
    pub steps: usize,
    /// CSV path, relative to the output directory unless absolute.
    #[arg(long, default_value = "sweep.csv")]
    pub output: PathBuf,
    #[command(flatten)]
    pub engines: EngineArgs,
    #[command(flatten)]
    pub fd: FdArgs,
}

pub fn grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>, Usage> {
    if steps == 0 {
        return Err(Usage("--steps must be at least 1".into()));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    if !(min < max) {
        return Err(Usage(format!("--s0-min {min} must be below --s0-max {max}")));
    }
    let step = (max - min) / (steps - 1) as f64;
    Ok((0..steps).map(|i| if i + 1 == steps { max } else { min + step * i as f64 }).collect())
}

/// One row per grid point, payoff and method, in that nesting order.
pub fn write_sweep(
    path: &Path,
    model: &ModelSpec<f64>,
    args: &SweepArgs,
    spots: &[f64],
) -> Result<usize> {
    let fd = args.fd.config()?;
    let pricings = args
        .payoff
        .iter()
        .map(|&p| {
            let payoff = Payoff::from(p);
            Pricing::new(model, args.strike, payoff, args.engines.engines(payoff), fd, args.fd.fd_base.into())
        })
        .collect::<Result<Vec<_>>>()?;
    let methods: Vec<Method> = args.method.iter().map(|&m| m.into()).collect();
    for p in &pricings {
        for &m in &methods {
            p.check_supported(m)?;
        }
    }
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    w.write_record(HEADER)?;
    let mut rows = 0;
    for &s0 in spots {
        for p in &pricings {
            for &m in &methods {
                let r = p.row(m, s0)?;
                w.write_record([
                    s0.to_string(),
                    m.name().to_string(),
                    p.payoff.name().to_string(),
                    r.price.to_string(),
                    r.delta.to_string(),
                    r.gamma.to_string(),
                    r.warnings.join(";"),
                ])?;
                rows += 1;
            }
        }
    }
    w.flush()?;
    Ok(rows)
}

pub fn run(args: &SweepArgs, out_dir: &Path, argv: &[OsString], matches: &ArgMatches) -> Result<()> {
    let model = args.model.spec()?;
    let spots = grid(args.s0_min, args.s0_max, args.steps)?;
    let path = resolve(out_dir, &args.output);
    let rows = write_sweep(&path, &model, args, &spots)?;
    RunManifest::new(argv, matches, None).write_beside(&path)?;
    println!("wrote {rows} rows to {}", path.display());
    Ok(())
}
