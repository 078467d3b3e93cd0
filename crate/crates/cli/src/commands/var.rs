use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{ArgMatches, Args, ValueEnum};

use fourier_greeks::distributions::RngStream;
use fourier_greeks::fourier::{CosExpansion, Method, Payoff};
use fourier_greeks::models::{MeDigital, ModelSpec};
use fourier_greeks::risk::{
    delta_gamma_pnl, empirical_var, full_mc_pnl, simulate_scenarios, FnPricer, ScenarioSet, SpotPricer, VaRConfig,
};

use crate::args::{EngineArgs, FdArgs, MarketArgs, MethodName, ModelArgs, PayoffName, PricerName};
use crate::output::{ensure_parent, resolve, RunManifest};
use crate::pricing::Pricing;
use crate::Usage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Approach {
    FullMc,
    DeltaGamma,
}

#[derive(Debug, Args)]
pub struct VarArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub market: MarketArgs,
    #[arg(long, value_enum, default_value_t = PayoffName::DigitalPut)]
    pub payoff: PayoffName,
    #[arg(long, value_enum, default_value_t = Approach::FullMc)]
    pub approach: Approach,
    /// Full-MC repricer; defaults to the closed form for the ME digital and to cached COS otherwise.
    #[arg(long, value_enum)]
    pub pricer: Option<PricerName>,
    /// Source of Delta and Gamma for the Taylor approximation.
    #[arg(long, value_enum, default_value_t = MethodName::Fd)]
    pub greeks: MethodName,
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Tail probability.
    #[arg(long, default_value_t = 0.01)]
    pub level: f64,
    #[arg(long, default_value_t = 1.0)]
    pub horizon_days: f64,
    /// Days per year used to turn `--horizon-days` into years.
    #[arg(long, default_value_t = 365.0)]
    pub day_count: f64,
    /// Also write the simulated pnl, one value per line.
    #[arg(long)]
    pub pnl_csv: Option<PathBuf>,
    #[command(flatten)]
    pub engines: EngineArgs,
    #[command(flatten)]
    pub fd: FdArgs,
}

impl VarArgs {
    pub fn var_config(&self) -> Result<VaRConfig<f64>, Usage> {
        if !(self.day_count > 0.0) {
            return Err(Usage(format!("--day-count must be positive, got {}", self.day_count)));
        }
        let cfg = VaRConfig {
            level: self.level,
            horizon: self.horizon_days / self.day_count,
            paths: self.paths,
            rng: RngStream::new(self.seed, self.stream),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Full-MC repricer by name. COS uses the cached expansion around `s0`.
pub fn scenario_pricer<'a>(
    name: PricerName,
    pricing: &'a Pricing<'a>,
    model: &ModelSpec<f64>,
    s0: f64,
) -> Result<Box<dyn SpotPricer<f64> + 'a>> {
    Ok(match name {
        PricerName::Analytic => {
            pricing.check_supported(Method::Analytic)?;
            Box::new(MeDigital::new(model, pricing.strike)?)
        }
        PricerName::Cos => {
            let mk = fourier_greeks::MarketSetup::new(s0, pricing.strike)?;
            let cfg = pricing.engines.cos.clone().unwrap_or_default();
            Box::new(CosExpansion::new(model, &mk, pricing.payoff, &cfg)?)
        }
        other => {
            let method = Method::from(other);
            Box::new(FnPricer {
                name: method.name().to_string(),
                f: move |s: f64| {
                    pricing.price_at(method, s).map_err(|e| fourier_greeks::Error::InvalidParameter {
                        name: "pricer",
                        reason: e.to_string(),
                    })
                },
            })
        }
    })
}

pub struct VarRun {
    pub var: f64,
    pub source: String,
    pub pnl: Vec<f64>,
}

pub fn compute(args: &VarArgs, model: &ModelSpec<f64>, scenarios: &ScenarioSet<f64>, level: f64) -> Result<VarRun> {
    let payoff = Payoff::from(args.payoff);
    let pricing = Pricing::new(
        model,
        args.market.strike,
        payoff,
        args.engines.engines(payoff),
        args.fd.config()?,
        args.fd.fd_base.into(),
    )?;
    let (source, pnl) = match args.approach {
        Approach::FullMc => {
            let default = if pricing.check_supported(Method::Analytic).is_ok() {
                PricerName::Analytic
            } else {
                PricerName::Cos
            };
            let pricer = scenario_pricer(args.pricer.unwrap_or(default), &pricing, model, scenarios.s0)?;
            (pricer.name(), full_mc_pnl(scenarios, pricer.as_ref())?)
        }
        Approach::DeltaGamma => {
            let method = Method::from(args.greeks);
            pricing.check_supported(method)?;
            let row = pricing.row(method, scenarios.s0)?;
            let source = format!("{} (delta {}, gamma {})", method.name(), row.delta, row.gamma);
            (source, delta_gamma_pnl(scenarios, row.delta, row.gamma)?)
        }
    };
    let var = empirical_var(&pnl, level)?;
    Ok(VarRun { var, source, pnl })
}

pub fn run(args: &VarArgs, out_dir: &Path, argv: &[OsString], matches: &ArgMatches) -> Result<()> {
    let model = args.model.spec()?;
    let mk = args.market.setup()?;
    let cfg = args.var_config()?;
    let scenarios = simulate_scenarios(&model, mk.s0, &cfg)?;
    let out = compute(args, &model, &scenarios, cfg.level)?;
    let approach = match args.approach {
        Approach::FullMc => "full-mc",
        Approach::DeltaGamma => "delta-gamma",
    };
    println!("var       {}", out.var);
    println!("approach  {approach}");
    println!("source    {}", out.source);
    println!("paths     {}", cfg.paths);
    println!("seed      {} (stream {})", cfg.rng.seed, cfg.rng.stream);
    println!("level     {}", cfg.level);
    println!("horizon   {} days / {} per year", args.horizon_days, args.day_count);
    if let Some(file) = &args.pnl_csv {
        let path = resolve(out_dir, file);
        ensure_parent(&path)?;
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("opening {}", path.display()))?;
        w.write_record(["path", "spot", "pnl"])?;
        for (i, (s, p)) in scenarios.prices.iter().zip(&out.pnl).enumerate() {
            w.write_record([i.to_string(), s.to_string(), p.to_string()])?;
        }
        w.flush()?;
        RunManifest::new(argv, matches, Some(cfg.rng.seed)).write_beside(&path)?;
        println!("pnl       {}", path.display());
    }
    Ok(())
}
