//! Fourier pricing engines (Carr-Madan, COS, Lewis) for calls and digital puts.
//!
//! Each engine returns the price or, by differentiating its integrand/series in
//! `S0` before integrating, the Delta or Gamma. Whether that interchange is
//! legitimate is exactly what [`crate::diagnostics`] checks; the numbers are
//! always produced and carry the diagnostic warnings alongside.

mod carr_madan;
mod cos;
mod lewis;

use std::collections::BTreeMap;
use std::fmt;

pub use carr_madan::{cm_value, CarrMadanConfig};
pub use cos::{cos_value, CosConfig, CosExpansion};
pub use lewis::{lewis_value, LewisConfig};

use crate::diagnostics::{check_conditions, estimate_decay, ConditionWarning};
use crate::error::Result;
use crate::models::{MarketSetup, ModelSpec};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Payoff {
    /// `(S_T - K)^+`
    Call,
    /// `1{S_T < K}`
    DigitalPut,
}

impl Payoff {
    pub fn name(&self) -> &'static str {
        match self {
            Payoff::Call => "call",
            Payoff::DigitalPut => "digital-put",
        }
    }
}

impl fmt::Display for Payoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Derivative order in `S0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    Price,
    Delta,
    Gamma,
}

impl Order {
    pub const ALL: [Order; 3] = [Order::Price, Order::Delta, Order::Gamma];

    pub fn degree(&self) -> u8 {
        match self {
            Order::Price => 0,
            Order::Delta => 1,
            Order::Gamma => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Order::Price => "price",
            Order::Delta => "delta",
            Order::Gamma => "gamma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Analytic,
    FiniteDifference,
    CarrMadan,
    Cos,
    Lewis,
}

impl Method {
    pub const FOURIER: [Method; 3] = [Method::CarrMadan, Method::Cos, Method::Lewis];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::FiniteDifference => "fd",
            Method::CarrMadan => "carr-madan",
            Method::Cos => "cos",
            Method::Lewis => "lewis",
        }
    }

    pub fn is_fourier(&self) -> bool {
        Self::FOURIER.contains(self)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreeksReport<T> {
    pub price: T,
    pub delta: T,
    pub gamma: T,
    pub method: Method,
    pub warnings: Vec<ConditionWarning>,
}

/// Engine settings for [`price_all`]; absent engines are skipped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EngineSet<T> {
    pub carr_madan: Option<CarrMadanConfig<T>>,
    pub cos: Option<CosConfig<T>>,
    pub lewis: Option<LewisConfig<T>>,
}

impl<T: Scalar> EngineSet<T> {
    /// All three engines at their reference settings for `payoff`.
    pub fn reference(payoff: Payoff) -> Self {
        Self {
            carr_madan: Some(CarrMadanConfig::default()),
            cos: Some(CosConfig::default()),
            lewis: Some(LewisConfig::for_payoff(payoff)),
        }
    }
}

/// Price, Delta and Gamma from one Fourier engine.
pub fn fourier_greeks<T: Scalar>(
    model: &ModelSpec<T>,
    mk: &MarketSetup<T>,
    payoff: Payoff,
    method: Method,
    engines: &EngineSet<T>,
) -> Result<[T; 3]> {
    let mut out = [T::zero(); 3];
    match method {
        Method::CarrMadan => {
            let cfg = engines.carr_madan.clone().unwrap_or_default();
            for (slot, order) in out.iter_mut().zip(Order::ALL) {
                *slot = cm_value(model, mk, payoff, &cfg, order)?;
            }
        }
        Method::Cos => {
            let cfg = engines.cos.clone().unwrap_or_default();
            let exp = CosExpansion::new(model, mk, payoff, &cfg)?;
            for (slot, order) in out.iter_mut().zip(Order::ALL) {
                *slot = exp.value(mk.s0, order);
            }
        }
        Method::Lewis => {
            let cfg = engines
                .lewis
                .clone()
                .unwrap_or_else(|| LewisConfig::for_payoff(payoff));
            for (slot, order) in out.iter_mut().zip(Order::ALL) {
                *slot = lewis_value(model, mk, payoff, &cfg, order)?;
            }
        }
        Method::Analytic | Method::FiniteDifference => {
            return Err(crate::error::invalid("method", format!("{method} is not a Fourier engine")));
        }
    }
    Ok(out)
}

/// One report per configured engine. An engine's failure does not stop the others.
pub fn price_all<T: Scalar>(
    model: &ModelSpec<T>,
    mk: &MarketSetup<T>,
    payoff: Payoff,
    engines: &EngineSet<T>,
) -> BTreeMap<Method, Result<GreeksReport<T>>> {
    let mut out = BTreeMap::new();
    let configured = [
        (Method::CarrMadan, engines.carr_madan.is_some()),
        (Method::Cos, engines.cos.is_some()),
        (Method::Lewis, engines.lewis.is_some()),
    ];
    if configured.iter().all(|(_, on)| !on) {
        return out;
    }
    let conditions = estimate_decay(model, T::zero()).map(|est| check_conditions(model, payoff, &est));
    for (method, on) in configured {
        if !on {
            continue;
        }
        let report = fourier_greeks(model, mk, payoff, method, engines).and_then(|[price, delta, gamma]| {
            let warnings = conditions.clone()?.warnings(method);
            Ok(GreeksReport {
                price,
                delta,
                gamma,
                method,
                warnings,
            })
        });
        out.insert(method, report);
    }
    out
}

/// `S0`-derivative factor `(c0 + iv)` products shared by the integrand-based engines.
pub(crate) fn chain_factor<T: Scalar>(
    first: num_complex::Complex<T>,
    second: num_complex::Complex<T>,
    s0: T,
    order: Order,
) -> num_complex::Complex<T> {
    match order {
        Order::Price => num_complex::Complex::from(T::one()),
        Order::Delta => first / s0,
        Order::Gamma => first * second / (s0 * s0),
    }
}
