use clap::{Args, ValueEnum};

use fourier_greeks::fdgreeks::{FdConfig, StepMode};
use fourier_greeks::fourier::{CarrMadanConfig, CosConfig, EngineSet, LewisConfig, Method, Payoff};
use fourier_greeks::models::{MarketSetup, ModelSpec, VgParams};

use crate::Usage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    Me,
    Vg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PayoffName {
    Call,
    DigitalPut,
}

impl From<PayoffName> for Payoff {
    fn from(p: PayoffName) -> Self {
        match p {
            PayoffName::Call => Payoff::Call,
            PayoffName::DigitalPut => Payoff::DigitalPut,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodName {
    Analytic,
    Fd,
    CarrMadan,
    Cos,
    Lewis,
}

impl From<MethodName> for Method {
    fn from(m: MethodName) -> Self {
        match m {
            MethodName::Analytic => Method::Analytic,
            MethodName::Fd => Method::FiniteDifference,
            MethodName::CarrMadan => Method::CarrMadan,
            MethodName::Cos => Method::Cos,
            MethodName::Lewis => Method::Lewis,
        }
    }
}

/// Pricers usable underneath finite differences or for scenario repricing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PricerName {
    Analytic,
    CarrMadan,
    Cos,
    Lewis,
}

impl From<PricerName> for Method {
    fn from(p: PricerName) -> Self {
        match p {
            PricerName::Analytic => Method::Analytic,
            PricerName::CarrMadan => Method::CarrMadan,
            PricerName::Cos => Method::Cos,
            PricerName::Lewis => Method::Lewis,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelName::Me)]
    pub model: ModelName,
    /// ME rate of the negative-side exponential.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// ME rate of the positive-side exponential.
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.13)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.4)]
    pub nu: f64,
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    /// Option maturity in years.
    #[arg(long, default_value_t = 1.0 / 12.0)]
    pub maturity: f64,
    #[arg(long, default_value_t = 0.0)]
    pub rate: f64,
}

impl ModelArgs {
    pub fn spec(&self) -> Result<ModelSpec<f64>, Usage> {
        let spec = match self.model {
            ModelName::Me => ModelSpec::me(self.eta, self.lambda, self.maturity, self.rate),
            ModelName::Vg => VgParams::new(self.sigma, self.nu, self.theta)
                .and_then(|p| ModelSpec::vg(p, self.maturity, self.rate)),
        };
        spec.map_err(Usage::from)
    }
}

#[derive(Debug, Clone, Args)]
pub struct MarketArgs {
    #[arg(long, default_value_t = 0.75)]
    pub s0: f64,
    #[arg(long, default_value_t = 0.75)]
    pub strike: f64,
}

impl MarketArgs {
    pub fn setup(&self) -> Result<MarketSetup<f64>, Usage> {
        MarketSetup::new(self.s0, self.strike).map_err(Usage::from)
    }
}

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    #[arg(long, default_value_t = 0.1)]
    pub cm_alpha: f64,
    #[arg(long, default_value_t = 4800.0)]
    pub cm_truncation: f64,
    /// Simpson nodes, odd.
    #[arg(long, default_value_t = (1 << 17) + 1)]
    pub cm_points: usize,
    #[arg(long, default_value_t = 60.0)]
    pub cos_width: f64,
    #[arg(long, default_value_t = 100_000)]
    pub cos_terms: usize,
    /// Midpoint of the COS interval in log-moneyness; defaults to the mean.
    #[arg(long)]
    pub cos_center: Option<f64>,
    /// Defaults to 1.1 for calls and -0.1 for digital puts.
    #[arg(long, allow_negative_numbers = true)]
    pub lewis_alpha: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    pub lewis_order: usize,
}

impl EngineArgs {
    pub fn engines(&self, payoff: Payoff) -> EngineSet<f64> {
        let mut lewis = LewisConfig::for_payoff(payoff);
        lewis.order = self.lewis_order;
        if let Some(a) = self.lewis_alpha {
            lewis.alpha = a;
        }
        EngineSet {
            carr_madan: Some(CarrMadanConfig {
                alpha: self.cm_alpha,
                truncation: self.cm_truncation,
                grid_points: self.cm_points,
            }),
            cos: Some(CosConfig {
                range_width: self.cos_width,
                terms: self.cos_terms,
                center: self.cos_center,
            }),
            lewis: Some(lewis),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FdArgs {
    /// Central-difference step.
    #[arg(long, default_value_t = 0.01)]
    pub fd_step: f64,
    /// Treat the step as a fraction of the spot.
    #[arg(long)]
    pub fd_relative: bool,
    /// Pricer differenced by `fd`.
    #[arg(long, value_enum, default_value_t = PricerName::CarrMadan)]
    pub fd_base: PricerName,
}

impl FdArgs {
    pub fn config(&self) -> Result<FdConfig<f64>, Usage> {
        let cfg = FdConfig {
            step: self.fd_step,
            pricing_error: None,
            mode: if self.fd_relative { StepMode::Relative } else { StepMode::Absolute },
        };
        cfg.validate().map_err(Usage::from)?;
        Ok(cfg)
    }
}
