use anyhow::Result;
use clap::Args;

use fourier_greeks::fourier::{Method, Payoff};

use crate::args::{EngineArgs, FdArgs, MarketArgs, MethodName, ModelArgs, PayoffName};
use crate::output::{num, table};
use crate::pricing::Pricing;

#[derive(Debug, Args)]
pub struct GreeksArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub market: MarketArgs,
    #[arg(long, value_enum, default_value_t = PayoffName::DigitalPut)]
    pub payoff: PayoffName,
    /// Methods to run; repeat or separate with commas.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [MethodName::CarrMadan, MethodName::Cos, MethodName::Lewis])]
    pub method: Vec<MethodName>,
    #[command(flatten)]
    pub engines: EngineArgs,
    #[command(flatten)]
    pub fd: FdArgs,
}

pub fn run(args: &GreeksArgs) -> Result<()> {
    let model = args.model.spec()?;
    let mk = args.market.setup()?;
    let payoff = Payoff::from(args.payoff);
    let pricing = Pricing::new(
        &model,
        mk.strike,
        payoff,
        args.engines.engines(payoff),
        args.fd.config()?,
        args.fd.fd_base.into(),
    )?;
    let methods: Vec<Method> = args.method.iter().map(|&m| m.into()).collect();
    for &m in &methods {
        pricing.check_supported(m)?;
    }
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for &m in &methods {
        let r = pricing.row(m, mk.s0)?;
        let label = match m {
            Method::FiniteDifference => format!("fd({}, h={})", args.fd.fd_base_name(), args.fd.fd_step),
            other => other.name().to_string(),
        };
        for w in &r.warnings {
            warnings.push(format!("WARNING {label}: {w}"));
        }
        rows.push(vec![label, num(r.price), num(r.delta), num(r.gamma), r.warnings.join(";")]);
    }
    println!(
        "{} {} | S0 = {} K = {} T = {} r = {}",
        model.name(),
        payoff,
        mk.s0,
        mk.strike,
        model.maturity,
        model.rate
    );
    print!("{}", table(&["method", "price", "delta", "gamma", "warnings"], &rows));
    for w in warnings {
        println!("{w}");
    }
    Ok(())
}

impl FdArgs {
    pub fn fd_base_name(&self) -> &'static str {
        Method::from(self.fd_base).name()
    }
}
