//! Fourier pricing of calls and digital puts under the variance gamma (VG) and
//! mixture-exponential (ME) models, Greeks by differentiated Fourier integrands
//! and by finite differences, diagnostics of when the former are justified,
//! and the effect on Delta-Gamma versus full Monte Carlo VaR.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the usual double-precision choice.
//!
//! ```
//! use fourier_greeks::{MarketSetup64, MeDigital64, ModelSpec64};
//!
//! let model = ModelSpec64::me(1.0, 2.0, 1.0 / 12.0, 0.0)?;
//! let digital = MeDigital64::new(&model, 0.75)?;
//! assert!((digital.price(0.75) - 0.4537).abs() < 1e-4);
//! # let _ = MarketSetup64::new(0.75, 0.75)?;
//! # Ok::<(), fourier_greeks::Error>(())
//! ```

pub mod diagnostics;
pub mod distributions;
pub mod error;
pub mod fdgreeks;
pub mod fourier;
pub mod models;
pub mod quadrature;
pub mod risk;
pub mod scalar;

pub use diagnostics::{check_conditions, estimate_decay, ConditionReport, ConditionStatus, ConditionWarning, DecayEstimate};
pub use distributions::{GammaParams, MeParams, RngStream};
pub use error::{Error, Result};
pub use fdgreeks::{choose_step, fd_delta, fd_gamma, fd_greeks, FdConfig, StepMode};
pub use fourier::{
    cm_value, cos_value, lewis_value, price_all, CarrMadanConfig, CosConfig, CosExpansion, EngineSet, GreeksReport,
    LewisConfig, Method, Order, Payoff,
};
pub use models::{MarketSetup, MeDigital, ModelKind, ModelSpec, VgParams};
pub use risk::{
    delta_gamma_var, empirical_var, full_mc_var, simulate_scenarios, ScenarioSet, SpotPricer, VaRConfig, VaRResult,
};
pub use scalar::Scalar;

pub type ModelSpec64 = ModelSpec<f64>;
pub type VgParams64 = VgParams<f64>;
pub type MarketSetup64 = MarketSetup<f64>;
pub type MeParams64 = MeParams<f64>;
pub type MeDigital64 = MeDigital<f64>;
pub type CarrMadanConfig64 = CarrMadanConfig<f64>;
pub type CosConfig64 = CosConfig<f64>;
pub type LewisConfig64 = LewisConfig<f64>;
pub type GreeksReport64 = GreeksReport<f64>;
pub type VaRConfig64 = VaRConfig<f64>;
pub type VaRResult64 = VaRResult<f64>;
