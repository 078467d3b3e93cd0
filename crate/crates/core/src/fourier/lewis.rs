use num_complex::Complex;

use super::{chain_factor, Order, Payoff};
use crate::error::{invalid, Error, Result};
use crate::models::{MarketSetup, ModelSpec};
use crate::quadrature::shared_laguerre_rule;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct LewisConfig<T> {
    /// Contour height: above 1 for calls, below 0 for digital puts.
    pub alpha: T,
    /// Gauss-Laguerre order.
    pub order: usize,
}

impl<T: Scalar> LewisConfig<T> {
    pub fn for_payoff(payoff: Payoff) -> Self {
        let alpha = match payoff {
            Payoff::Call => T::lit(1.1),
            Payoff::DigitalPut => T::lit(-0.1),
        };
        Self { alpha, order: 2000 }
    }
}

/// Payoff transform `w(z) = \int e^{izx} w(e^x) dx` on its half-plane.
pub fn payoff_transform<T: Scalar>(payoff: Payoff, strike: T, z: Complex<T>) -> Complex<T> {
    let iz = Complex::<T>::i() * z;
    let k = strike.ln();
    match payoff {
        Payoff::Call => (( iz + T::one()) * k).exp() / (iz * (iz + T::one())),
        Payoff::DigitalPut => (iz * k).exp() / iz,
    }
}

/// `e^{-rT}/pi \int_0^inf Re{ S0^{a-iv} phi(-ia - v) w(v + ia) } dv` by Gauss-Laguerre,
/// with `(a - iv)/S0` (Delta) or `(a - iv)(a - 1 - iv)/S0^2` (Gamma) inserted.
pub fn lewis_value<T: Scalar>(
    model: &ModelSpec<T>,
    mk: &MarketSetup<T>,
    payoff: Payoff,
    cfg: &LewisConfig<T>,
    order: Order,
) -> Result<T> {
    let alpha = cfg.alpha;
    let admissible = match payoff {
        Payoff::Call => alpha > T::one(),
        Payoff::DigitalPut => alpha < T::zero(),
    };
    if !admissible {
        return Err(invalid(
            "alpha",
            format!("{alpha} is outside the payoff transform's half-plane for a {payoff}"),
        ));
    }
    let (lower, upper) = model.strip();
    if !(-alpha > lower && -alpha < upper) {
        return Err(Error::OutsideStrip {
            im: (-alpha).as_f64(),
            lower: lower.as_f64(),
            upper: upper.as_f64(),
        });
    }
    let rule = shared_laguerre_rule(cfg.order)?;
    let i = Complex::<T>::i();
    let s = mk.s0.ln();
    let mut acc = T::zero();
    for (&node, &weight) in rule.nodes().iter().zip(rule.modified_weights()) {
        let v = T::lit(node);
        let phi = model.cf(Complex::new(-v, -alpha))?;
        let spot = ((Complex::from(alpha) - i * v) * s).exp();
        let w = payoff_transform(payoff, mk.strike, Complex::new(v, alpha));
        let factor = chain_factor(Complex::new(alpha, -v), Complex::new(alpha - T::one(), -v), mk.s0, order);
        let g = (spot * phi * w * factor).re;
        if !g.is_finite() {
            return Err(Error::NonFiniteIntegrand { node });
        }
        acc = acc + T::lit(weight) * g;
    }
    Ok((-model.rate * model.maturity).exp() / T::PI() * acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::me_digital_price;

    fn me_ref() -> ModelSpec<f64> {
        ModelSpec::me(1.0, 2.0, 1.0 / 12.0, 0.0).unwrap()
    }

    #[test]
    fn transforms_match_numerical_integrals() {
        let k: f64 = 0.75;
        let lk = k.ln();
        // \int_{lk}^{lk+L} (e^x - K) e^{izx} dx with Im z = 2, tail below 1e-12
        let z = Complex::new(0.8, 2.0);
        let n = 400_000;
        let hi = lk + 40.0;
        let h = (hi - lk) / n as f64;
        let call: Complex<f64> = (0..n)
            .map(|j| {
                let x = lk + h * (j as f64 + 0.5);
                (Complex::<f64>::i() * z * x).exp() * (x.exp() - k)
            })
            .sum::<Complex<f64>>()
            * h;
        let exact = payoff_transform(Payoff::Call, k, z);
        assert!((call - exact).norm() < 1e-6, "{call} vs {exact}");

        let z = Complex::new(1.3, -0.5);
        let lo = lk - 60.0;
        let h = (lk - lo) / n as f64;
        let dig: Complex<f64> = (0..n)
            .map(|j| (Complex::<f64>::i() * z * (lo + h * (j as f64 + 0.5))).exp())
            .sum::<Complex<f64>>()
            * h;
        let exact = payoff_transform(Payoff::DigitalPut, k, z);
        assert!((dig - exact).norm() < 1e-6, "{dig} vs {exact}");
    }

    #[test]
    fn digital_price_close_to_closed_form() {
        let mk = MarketSetup::new(0.75, 0.75).unwrap();
        let cfg = LewisConfig::for_payoff(Payoff::DigitalPut);
        let p = lewis_value(&me_ref(), &mk, Payoff::DigitalPut, &cfg, Order::Price).unwrap();
        assert!((p - me_digital_price(&me_ref(), &mk).unwrap()).abs() < 5e-3, "{p}");
    }

    #[test]
    fn inadmissible_alpha() {
        let mk = MarketSetup::new(0.75, 0.75).unwrap();
        let cfg = LewisConfig { alpha: 0.5, order: 64 };
        assert!(lewis_value(&me_ref(), &mk, Payoff::Call, &cfg, Order::Price).is_err());
        assert!(lewis_value(&me_ref(), &mk, Payoff::DigitalPut, &cfg, Order::Price).is_err());
        // E[S_T^{alpha}] infinite for alpha sqrt(T) >= lambda
        let cfg = LewisConfig { alpha: 8.0, order: 64 };
        assert!(matches!(
            lewis_value(&me_ref(), &mk, Payoff::Call, &cfg, Order::Price),
            Err(Error::OutsideStrip { .. })
        ));
    }
}
