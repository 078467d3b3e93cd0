use anyhow::Result;

use fourier_greeks::diagnostics::{check_conditions, estimate_decay, ConditionReport};
use fourier_greeks::fdgreeks::{fd_greeks, FdConfig};
use fourier_greeks::fourier::{cm_value, cos_value, fourier_greeks, lewis_value, EngineSet, Method, Order, Payoff};
use fourier_greeks::models::{MarketSetup, MeDigital, ModelKind, ModelSpec};
use fourier_greeks::Error;

use crate::Usage;

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub price: f64,
    pub delta: f64,
    pub gamma: f64,
    pub warnings: Vec<String>,
}

/// Everything needed to evaluate any method for one model, strike and payoff.
pub struct Pricing<'a> {
    pub model: &'a ModelSpec<f64>,
    pub strike: f64,
    pub payoff: Payoff,
    pub engines: EngineSet<f64>,
    pub fd: FdConfig<f64>,
    pub fd_base: Method,
    conditions: ConditionReport,
}

impl<'a> Pricing<'a> {
    pub fn new(
        model: &'a ModelSpec<f64>,
        strike: f64,
        payoff: Payoff,
        engines: EngineSet<f64>,
        fd: FdConfig<f64>,
        fd_base: Method,
    ) -> Result<Self> {
        let estimate = estimate_decay(model, 0.0)?;
        Ok(Self {
            model,
            strike,
            payoff,
            engines,
            fd,
            fd_base,
            conditions: check_conditions(model, payoff, &estimate),
        })
    }

    fn has_closed_form(&self) -> bool {
        matches!(self.model.kind, ModelKind::Me { .. }) && self.payoff == Payoff::DigitalPut
    }

    /// Rejects method choices that cannot be evaluated for this model and payoff.
    pub fn check_supported(&self, method: Method) -> Result<(), Usage> {
        let needs_closed_form =
            method == Method::Analytic || (method == Method::FiniteDifference && self.fd_base == Method::Analytic);
        if needs_closed_form && !self.has_closed_form() {
            return Err(Usage(format!(
                "no closed form for a {} under {}; only the ME digital put has one",
                self.payoff,
                self.model.name()
            )));
        }
        if self.fd_base == Method::FiniteDifference {
            return Err(Usage("fd cannot difference itself".into()));
        }
        Ok(())
    }

    fn market(&self, s0: f64) -> Result<MarketSetup<f64>> {
        Ok(MarketSetup::new(s0, self.strike)?)
    }

    /// Price alone by a non-difference method.
    pub fn price_at(&self, method: Method, s0: f64) -> Result<f64> {
        let mk = self.market(s0)?;
        let e = &self.engines;
        Ok(match method {
            Method::Analytic => MeDigital::new(self.model, self.strike)?.price(s0),
            Method::CarrMadan => cm_value(
                self.model,
                &mk,
                self.payoff,
                &e.carr_madan.clone().unwrap_or_default(),
                Order::Price,
            )?,
            Method::Cos => cos_value(self.model, &mk, self.payoff, &e.cos.clone().unwrap_or_default(), Order::Price)?,
            Method::Lewis => lewis_value(
                self.model,
                &mk,
                self.payoff,
                &e.lewis
                    .clone()
                    .unwrap_or_else(|| fourier_greeks::LewisConfig::for_payoff(self.payoff)),
                Order::Price,
            )?,
            Method::FiniteDifference => anyhow::bail!("fd has no price of its own"),
        })
    }

    pub fn row(&self, method: Method, s0: f64) -> Result<Row> {
        self.check_supported(method)?;
        match method {
            Method::Analytic => {
                let d = MeDigital::new(self.model, self.strike)?;
                let mut warnings = Vec::new();
                let mut at_jump = |r: fourier_greeks::Result<f64>, what: &str| match r {
                    Ok(v) => Ok(v),
                    Err(Error::UndefinedAtJump { .. }) => {
                        warnings.push(format!("{what}-undefined-at-jump"));
                        Ok(f64::NAN)
                    }
                    Err(e) => Err(e),
                };
                let delta = at_jump(d.delta(s0), "delta")?;
                let gamma = at_jump(d.gamma(s0), "gamma")?;
                Ok(Row {
                    price: d.price(s0),
                    delta,
                    gamma,
                    warnings,
                })
            }
            Method::FiniteDifference => {
                let [price, delta, gamma] = fd_greeks(
                    |s| self.price_at(self.fd_base, s).map_err(into_lib_error),
                    s0,
                    &self.fd,
                )?;
                Ok(Row {
                    price,
                    delta,
                    gamma,
                    warnings: Vec::new(),
                })
            }
            _ => {
                let [price, delta, gamma] = fourier_greeks(self.model, &self.market(s0)?, self.payoff, method, &self.engines)?;
                Ok(Row {
                    price,
                    delta,
                    gamma,
                    warnings: self.conditions.warnings(method).iter().map(|w| w.to_string()).collect(),
                })
            }
        }
    }
}

fn into_lib_error(e: anyhow::Error) -> Error {
    match e.downcast::<Error>() {
        Ok(lib) => lib,
        Err(other) => Error::InvalidParameter {
            name: "pricer",
            reason: other.to_string(),
        },
    }
}
