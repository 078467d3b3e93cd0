//! One-day VaR of a single-option position: full Monte Carlo repricing versus
//! the Delta-Gamma approximation, on one shared set of spot scenarios.
//!
//! Scenarios are generated in fixed blocks of [`BLOCK_SIZE`] paths; block `b`
//! draws from `rng.substream(b)`, so a run is reproducible from its seed and
//! independent of how many worker threads rayon uses.

use std::fmt;

use rayon::prelude::*;

use crate::distributions::{GammaParams, RngStream, GENERATOR_ID};
use crate::error::{invalid, Error, Result};
use crate::fourier::{CosExpansion, Order};
use crate::models::{MeDigital, ModelKind, ModelSpec};
use crate::scalar::Scalar;

pub const BLOCK_SIZE: usize = 8192;

#[derive(Debug, Clone, PartialEq)]
pub struct VaRConfig<T> {
    /// Tail probability `p`.
    pub level: T,
    /// Horizon in years.
    pub horizon: T,
    pub paths: usize,
    pub rng: RngStream,
}

impl<T: Scalar> Default for VaRConfig<T> {
    fn default() -> Self {
        Self {
            level: T::lit(0.01),
            horizon: T::lit(1.0 / 365.0),
            paths: 100_000,
            rng: RngStream::new(2024, 0),
        }
    }
}

impl<T: Scalar> VaRConfig<T> {
    pub fn validate(&self) -> Result<()> {
        check_level(self.level, self.paths)?;
        if !(self.horizon > T::zero() && self.horizon.is_finite()) {
            return Err(invalid("horizon", format!("must be positive, got {}", self.horizon)));
        }
        Ok(())
    }
}

fn check_level<T: Scalar>(level: T, count: usize) -> Result<()> {
    if !(level > T::zero() && level < T::one()) {
        return Err(Error::QuantileLevel(level.as_f64()));
    }
    if count == 0 {
        return Err(Error::Empty);
    }
    // p N >= 1, up to rounding in the product
    if level.as_f64() * (count as f64) < 1.0 - 1e-9 {
        return Err(Error::InsufficientSamples {
            level: level.as_f64(),
            count,
        });
    }
    Ok(())
}

/// `k = ceil(p N)`, treating `p N` within rounding of an integer as that integer.
fn quantile_index(level: f64, count: usize) -> usize {
    let raw = level * count as f64;
    let near = raw.round();
    if (raw - near).abs() <= 1e-9 * near.max(1.0) {
        near as usize
    } else {
        raw.ceil() as usize
    }
}

/// Simulated horizon spots with the provenance needed to regenerate them.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet<T> {
    pub prices: Vec<T>,
    pub model: &'static str,
    pub s0: T,
    pub seed: u64,
    pub stream: u64,
    pub horizon: T,
}

impl<T> ScenarioSet<T> {
    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }
}

/// `S_t = s0 exp(r t + m_t + X_t)` under the risk-neutral law at horizon `t`.
/// ME increments come from the inverse cdf, VG increments as a difference of gammas.
pub fn simulate_scenarios<T: Scalar>(model: &ModelSpec<T>, s0: T, cfg: &VaRConfig<T>) -> Result<ScenarioSet<T>> {
    cfg.validate()?;
    if !(s0 > T::zero() && s0.is_finite()) {
        return Err(invalid("s0", format!("must be positive, got {s0}")));
    }
    let at = model.with_maturity(cfg.horizon)?;
    let drift = at.drift();
    let blocks = cfg.paths.div_ceil(BLOCK_SIZE);
    let sampler = match at.kind {
        ModelKind::Me { .. } => Sampler::Me(at.me_horizon_law().expect("ME model has a horizon law")),
        ModelKind::Vg(vg) => {
            let shape = cfg.horizon / vg.nu;
            let (up, down) = vg.gamma_scales();
            Sampler::Vg(GammaParams::new(shape, up)?, GammaParams::new(shape, down)?)
        }
    };
    let prices: Vec<T> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let n = BLOCK_SIZE.min(cfg.paths - b * BLOCK_SIZE);
            let mut gen = cfg.rng.substream(b as u64).generator();
            let xs = match &sampler {
                Sampler::Me(law) => law.sample_with(&mut gen, n),
                Sampler::Vg(up, down) => {
                    let g1 = up.sample_with(&mut gen, n);
                    let g2 = down.sample_with(&mut gen, n);
                    g1.into_iter().zip(g2).map(|(a, b)| a - b).collect()
                }
            };
            xs.into_iter().map(|x| s0 * (drift + x).exp()).collect::<Vec<T>>()
        })
        .flatten()
        .collect();
    if let Some(bad) = prices.iter().position(|p| !(*p > T::zero() && p.is_finite())) {
        return Err(invalid("scenario", format!("simulated spot {} at path {bad}", prices[bad])));
    }
    Ok(ScenarioSet {
        prices,
        model: model.name(),
        s0,
        seed: cfg.rng.seed,
        stream: cfg.rng.stream,
        horizon: cfg.horizon,
    })
}

enum Sampler<T> {
    Me(crate::distributions::MeParams<T>),
    Vg(GammaParams<T>, GammaParams<T>),
}

/// `-(k-th smallest pnl)` with `k = ceil(p N)`; no interpolation.
pub fn empirical_var<T: Scalar>(pnl: &[T], level: T) -> Result<T> {
    check_level(level, pnl.len())?;
    if let Some(i) = pnl.iter().position(|v| v.is_nan()) {
        return Err(invalid("pnl", format!("NaN at index {i}")));
    }
    let k = quantile_index(level.as_f64(), pnl.len());
    let mut sorted = pnl.to_vec();
    let (_, kth, _) = sorted.select_nth_unstable_by(k - 1, |a, b| a.partial_cmp(b).expect("NaN filtered"));
    Ok(-*kth)
}

/// Option value as a function of the current spot.
pub trait SpotPricer<T: Scalar>: Sync {
    fn name(&self) -> String;

    fn price(&self, s0: T) -> Result<T>;

    /// Prices in input order; failures name the offending index.
    fn prices(&self, spots: &[T]) -> Result<Vec<T>> {
        spots
            .iter()
            .enumerate()
            .map(|(index, &s)| {
                self.price(s).map_err(|e| Error::ScenarioPricing {
                    index,
                    source: Box::new(e),
                })
            })
            .collect()
    }
}

impl<T: Scalar> SpotPricer<T> for MeDigital<T> {
    fn name(&self) -> String {
        "analytic".into()
    }

    fn price(&self, s0: T) -> Result<T> {
        Ok(MeDigital::price(self, s0))
    }
}

impl<T: Scalar> SpotPricer<T> for CosExpansion<T> {
    fn name(&self) -> String {
        format!("cos (cached coefficients, {} terms)", self.terms())
    }

    fn price(&self, s0: T) -> Result<T> {
        Ok(self.value(s0, Order::Price))
    }

    fn prices(&self, spots: &[T]) -> Result<Vec<T>> {
        let out = CosExpansion::prices(self, spots);
        match out.iter().position(|p| !p.is_finite()) {
            Some(index) => Err(Error::ScenarioPricing {
                index,
                source: Box::new(invalid("price", "non-finite COS value")),
            }),
            None => Ok(out),
        }
    }
}

/// Adapts any closure to [`SpotPricer`].
pub struct FnPricer<F> {
    pub name: String,
    pub f: F,
}

impl<T: Scalar, F: Fn(T) -> Result<T> + Sync> SpotPricer<T> for FnPricer<F> {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn price(&self, s0: T) -> Result<T> {
        (self.f)(s0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VaRApproach {
    FullMonteCarlo,
    DeltaGamma,
}

impl fmt::Display for VaRApproach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VaRApproach::FullMonteCarlo => "full-mc",
            VaRApproach::DeltaGamma => "delta-gamma",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VaRResult<T> {
    pub var: T,
    pub approach: VaRApproach,
    /// Pricer name for full MC, `delta=..,gamma=..` for Delta-Gamma.
    pub pricer: String,
    pub paths: usize,
    pub quantile_index: usize,
    pub level: T,
    pub horizon: T,
    pub seed: u64,
    pub stream: u64,
    pub generator: &'static str,
}

impl<T: Scalar> VaRResult<T> {
    fn new(var: T, approach: VaRApproach, pricer: String, scenarios: &ScenarioSet<T>, level: T) -> Self {
        Self {
            var,
            approach,
            pricer,
            paths: scenarios.len(),
            quantile_index: quantile_index(level.as_f64(), scenarios.len()),
            level,
            horizon: scenarios.horizon,
            seed: scenarios.seed,
            stream: scenarios.stream,
            generator: GENERATOR_ID,
        }
    }
}

/// `pnl_i = pi(S_t,i) - pi(s0)` in scenario order.
pub fn full_mc_pnl<T: Scalar, P: SpotPricer<T> + ?Sized>(scenarios: &ScenarioSet<T>, pricer: &P) -> Result<Vec<T>> {
    let base = pricer.price(scenarios.s0)?;
    let chunks: Vec<Vec<T>> = scenarios
        .prices
        .par_chunks(BLOCK_SIZE)
        .enumerate()
        .map(|(b, chunk)| {
            pricer.prices(chunk).map_err(|e| match e {
                Error::ScenarioPricing { index, source } => Error::ScenarioPricing {
                    index: b * BLOCK_SIZE + index,
                    source,
                },
                other => other,
            })
        })
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().map(|p| p - base).collect())
}

pub fn full_mc_var_on<T: Scalar, P: SpotPricer<T> + ?Sized>(
    scenarios: &ScenarioSet<T>,
    pricer: &P,
    level: T,
) -> Result<VaRResult<T>> {
    check_level(level, scenarios.len())?;
    let pnl = full_mc_pnl(scenarios, pricer)?;
    let var = empirical_var(&pnl, level)?;
    Ok(VaRResult::new(var, VaRApproach::FullMonteCarlo, pricer.name(), scenarios, level))
}

pub fn full_mc_var<T: Scalar, P: SpotPricer<T> + ?Sized>(
    model: &ModelSpec<T>,
    s0: T,
    pricer: &P,
    cfg: &VaRConfig<T>,
) -> Result<VaRResult<T>> {
    let scenarios = simulate_scenarios(model, s0, cfg)?;
    full_mc_var_on(&scenarios, pricer, cfg.level)
}

/// Second-order Taylor pnl `delta dS + gamma dS^2 / 2` on each scenario.
pub fn delta_gamma_pnl<T: Scalar>(scenarios: &ScenarioSet<T>, delta: T, gamma: T) -> Result<Vec<T>> {
    if !(delta.is_finite() && gamma.is_finite()) {
        return Err(invalid("greeks", format!("delta {delta} and gamma {gamma} must be finite")));
    }
    let half = T::lit(0.5);
    Ok(scenarios
        .prices
        .iter()
        .map(|&s| {
            let ds = s - scenarios.s0;
            delta * ds + half * gamma * ds * ds
        })
        .collect())
}

pub fn delta_gamma_var_on<T: Scalar>(scenarios: &ScenarioSet<T>, delta: T, gamma: T, level: T) -> Result<VaRResult<T>> {
    let pnl = delta_gamma_pnl(scenarios, delta, gamma)?;
    let var = empirical_var(&pnl, level)?;
    Ok(VaRResult::new(
        var,
        VaRApproach::DeltaGamma,
        format!("delta={delta},gamma={gamma}"),
        scenarios,
        level,
    ))
}

pub fn delta_gamma_var<T: Scalar>(delta: T, gamma: T, model: &ModelSpec<T>, s0: T, cfg: &VaRConfig<T>) -> Result<VaRResult<T>> {
    let scenarios = simulate_scenarios(model, s0, cfg)?;
    delta_gamma_var_on(&scenarios, delta, gamma, cfg.level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::VgParams;
    use proptest::prelude::*;

    fn me_ref() -> ModelSpec<f64> {
        ModelSpec::me(1.0, 2.0, 1.0 / 12.0, 0.0).unwrap()
    }

    fn vg_ref() -> ModelSpec<f64> {
        ModelSpec::vg(VgParams::new(0.13, 0.4, 0.0).unwrap(), 1.0 / 12.0, 0.0).unwrap()
    }

    fn cfg(paths: usize, seed: u64) -> VaRConfig<f64> {
        VaRConfig {
            paths,
            rng: RngStream::new(seed, 0),
            ..Default::default()
        }
    }

    #[test]
    fn order_statistic_convention() {
        let pnl: Vec<f64> = (-3..=96).map(f64::from).collect();
        assert_eq!(empirical_var(&pnl, 0.01).unwrap(), 3.0);
        let sym: Vec<f64> = [-1.0, 1.0].repeat(50);
        assert_eq!(empirical_var(&sym, 0.5).unwrap(), 1.0);
        assert!(empirical_var(&[0.5, 2.0, 3.0], 0.5).unwrap() <= 0.0);
        // 0.07 * 100 is 7.000000000000001 in floating point
        let ramp: Vec<f64> = (0..100).map(f64::from).collect();
        assert_eq!(empirical_var(&ramp, 0.07).unwrap(), -6.0);
    }

    #[test]
    fn var_input_errors() {
        assert_eq!(empirical_var::<f64>(&[], 0.01), Err(Error::Empty));
        assert!(matches!(empirical_var(&[1.0; 50], 0.01), Err(Error::InsufficientSamples { .. })));
        assert!(matches!(empirical_var(&[1.0; 50], 1.0), Err(Error::QuantileLevel(_))));
        assert!(empirical_var(&[1.0, f64::NAN], 0.5).is_err());
        let bad = VaRConfig { horizon: 0.0, ..cfg(1000, 1) };
        assert!(simulate_scenarios(&me_ref(), 0.75, &bad).is_err());
    }

    #[test]
    fn horizon_must_keep_me_moments() {
        // lambda / sqrt(t) must exceed 1
        let m = ModelSpec::me(1.0, 1.05, 1.0 / 12.0, 0.0).unwrap();
        let long = VaRConfig { horizon: 1.2, ..cfg(1000, 1) };
        assert!(simulate_scenarios(&m, 0.75, &long).is_err());
    }

    #[test]
    fn vg_horizon_moments() {
        let c = cfg(1_000_000, 11);
        let set = simulate_scenarios(&vg_ref(), 0.65, &c).unwrap();
        let drift = vg_ref().with_maturity(c.horizon).unwrap().drift();
        let xs: Vec<f64> = set.prices.iter().map(|s| (s / 0.65).ln() - drift).collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
        assert!(mean.abs() < 3.0 * (var / n).sqrt(), "{mean}");
        let target = 0.13f64.powi(2) * c.horizon;
        let se = ((m4 - var * var) / n).sqrt();
        assert!((var - target).abs() < 3.0 * se, "{var} vs {target} (se {se})");
    }

    #[test]
    fn me_horizon_median() {
        let c = cfg(1_000_000, 12);
        let set = simulate_scenarios(&me_ref(), 0.75, &c).unwrap();
        let drift = me_ref().with_maturity(c.horizon).unwrap().drift();
        let below = set.prices.iter().filter(|s| (*s / 0.75).ln() - drift <= 0.0).count();
        let frac = below as f64 / set.len() as f64;
        assert!((frac - 0.5).abs() < 0.002, "{frac}");
    }

    #[test]
    fn deterministic_and_thread_count_independent() {
        let c = cfg(3 * BLOCK_SIZE + 17, 5);
        let a = simulate_scenarios(&vg_ref(), 0.65, &c).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| simulate_scenarios(&vg_ref(), 0.65, &c).unwrap());
        assert_eq!(a.len(), c.paths);
        assert!(a.prices.iter().zip(&b.prices).all(|(x, y)| x.to_bits() == y.to_bits()));
        let other = simulate_scenarios(&vg_ref(), 0.65, &cfg(c.paths, 6)).unwrap();
        assert_ne!(a.prices, other.prices);
    }

    #[test]
    fn vanishing_horizon_has_no_risk() {
        let c = VaRConfig { horizon: 1e-14, ..cfg(10_000, 3) };
        let d = MeDigital::new(&me_ref(), 0.75).unwrap();
        // spot away from the jump so the price is smooth in S0
        let r = full_mc_var(&me_ref(), 0.9, &d, &c).unwrap();
        assert!(r.var.abs() < 1e-5, "{}", r.var);
    }

    #[test]
    fn linear_delta_gamma_is_spot_quantile() {
        let c = cfg(20_000, 9);
        let set = simulate_scenarios(&me_ref(), 0.75, &c).unwrap();
        let r = delta_gamma_var_on(&set, -2.0, 0.0, 0.01).unwrap();
        let mut s = set.prices.clone();
        s.sort_by(f64::total_cmp);
        let upper = s[s.len() - 200];
        assert!((r.var - 2.0 * (upper - 0.75)).abs() < 1e-12);
        assert_eq!(r.quantile_index, 200);
        assert_eq!(r.approach, VaRApproach::DeltaGamma);
    }

    #[test]
    fn scenario_failures_carry_index() {
        let c = cfg(BLOCK_SIZE + 100, 4);
        let set = simulate_scenarios(&me_ref(), 0.75, &c).unwrap();
        let target = set.prices[BLOCK_SIZE + 42];
        let pricer = FnPricer {
            name: "flaky".into(),
            f: move |s: f64| if s == target { Err(Error::Empty) } else { Ok(s) },
        };
        let err = full_mc_var_on(&set, &pricer, 0.01).unwrap_err();
        assert!(matches!(err, Error::ScenarioPricing { index, .. } if index == BLOCK_SIZE + 42), "{err:?}");
    }

    #[test]
    fn batch_cos_pricer_matches_pointwise() {
        let mk = crate::models::MarketSetup::new(0.65, 0.75).unwrap();
        let cfg_cos = crate::fourier::CosConfig { terms: 2000, ..Default::default() };
        let cos = CosExpansion::new(&vg_ref(), &mk, crate::fourier::Payoff::DigitalPut, &cfg_cos).unwrap();
        let set = simulate_scenarios(&vg_ref(), 0.65, &cfg(5000, 8)).unwrap();
        let batch = full_mc_var_on(&set, &cos, 0.01).unwrap();
        let pointwise = FnPricer {
            name: "pointwise".into(),
            f: |s: f64| Ok(cos.value(s, Order::Price)),
        };
        let single = full_mc_var_on(&set, &pointwise, 0.01).unwrap();
        assert!((batch.var - single.var).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn var_non_increasing_in_level(
            pnl in prop::collection::vec(-10.0f64..10.0, 100..300),
            p in 0.01f64..0.5,
            q in 0.01f64..0.5,
        ) {
            let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
            prop_assert!(empirical_var(&pnl, lo).unwrap() >= empirical_var(&pnl, hi).unwrap());
        }
    }
}
