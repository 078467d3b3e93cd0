use num_complex::Complex;

use super::{chain_factor, Order, Payoff};
use crate::error::{invalid, Error, Result};
use crate::models::{MarketSetup, ModelSpec};
use crate::quadrature::{simpson_integrate, SimpsonGrid};
use crate::scalar::Scalar;

/// Damped Carr-Madan integral truncated at `truncation` and integrated with
/// composite Simpson on `grid_points` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CarrMadanConfig<T> {
    pub alpha: T,
    pub truncation: T,
    /// Odd, so the composite rule closes; the reference grid is `2^17 + 1`.
    pub grid_points: usize,
}

impl<T: Scalar> Default for CarrMadanConfig<T> {
    fn default() -> Self {
        Self {
            alpha: T::lit(0.1),
            truncation: T::lit(4800.0),
            grid_points: (1 << 17) + 1,
        }
    }
}

impl<T: Scalar> CarrMadanConfig<T> {
    fn grid(&self) -> Result<SimpsonGrid<T>> {
        if !(self.alpha > T::zero()) {
            return Err(invalid("alpha", format!("damping must be positive, got {}", self.alpha)));
        }
        SimpsonGrid::new(self.truncation, self.grid_points)
    }
}

/// Price (order 0), Delta or Gamma by Carr-Madan.
///
/// Call: `e^{-a k - rT}/pi \int Re{ e^{-ivk} phi(v - i(a+1)) S0^{a+1+iv} / (a^2 + a - v^2 + i(2a+1)v) } dv`.
/// Digital put: `-e^{a k - rT}/pi \int Re{ e^{-ivk} phi(v + ia) S0^{-a+iv} / (iv - a) } dv`.
/// Greeks differentiate the `S0` power inside the integral.
pub fn cm_value<T: Scalar>(
    model: &ModelSpec<T>,
    mk: &MarketSetup<T>,
    payoff: Payoff,
    cfg: &CarrMadanConfig<T>,
    order: Order,
) -> Result<T> {
    let grid = cfg.grid()?;
    let alpha = cfg.alpha;
    let k = mk.strike.ln();
    let s = mk.s0.ln();
    let discount = (-model.rate * model.maturity).exp();
    let i = Complex::<T>::i();
    let one = T::one();

    // the damping moves the cf argument off the real axis by a constant amount
    let shift = match payoff {
        Payoff::Call => -(alpha + one),
        Payoff::DigitalPut => alpha,
    };
    let (lower, upper) = model.strip();
    if !(shift > lower && shift < upper) {
        return Err(Error::OutsideStrip {
            im: shift.as_f64(),
            lower: lower.as_f64(),
            upper: upper.as_f64(),
        });
    }

    let integral = match payoff {
        Payoff::Call => simpson_integrate(&grid, |v| {
            let iv = i * v;
            let Ok(phi) = model.cf(Complex::new(v, shift)) else {
                return T::nan();
            };
            // S0^{a+1+iv} e^{-ivk} = S0^{a+1} e^{iv(s-k)}
            let spot = (iv * (s - k)).exp() * mk.s0.powf(alpha + one);
            let den = Complex::new(alpha * alpha + alpha - v * v, (T::lit(2.0) * alpha + one) * v);
            let factor = chain_factor(iv + (alpha + one), iv + alpha, mk.s0, order);
            (phi * spot * factor / den).re
        })?,
        Payoff::DigitalPut => simpson_integrate(&grid, |v| {
            let iv = i * v;
            let Ok(phi) = model.cf(Complex::new(v, shift)) else {
                return T::nan();
            };
            let spot = (iv * (s - k)).exp() * mk.s0.powf(-alpha);
            let den = iv - alpha;
            let factor = chain_factor(iv - alpha, iv - alpha - one, mk.s0, order);
            (phi * spot * factor / den).re
        })?,
    };
    let pre = match payoff {
        Payoff::Call => (-alpha * k).exp() / T::PI(),
        Payoff::DigitalPut => -(alpha * k).exp() / T::PI(),
    };
    Ok(pre * discount * integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{me_digital_price, VgParams};

    fn me_ref() -> ModelSpec<f64> {
        ModelSpec::me(1.0, 2.0, 1.0 / 12.0, 0.0).unwrap()
    }

    #[test]
    fn me_digital_reference_values() {
        let mk = MarketSetup::new(0.75, 0.75).unwrap();
        let cfg = CarrMadanConfig::default();
        let p = cm_value(&me_ref(), &mk, Payoff::DigitalPut, &cfg, Order::Price).unwrap();
        let analytic = me_digital_price(&me_ref(), &mk).unwrap();
        assert!((p - analytic).abs() < 5e-3, "{p} vs {analytic}");
        let d = cm_value(&me_ref(), &mk, Payoff::DigitalPut, &cfg, Order::Delta).unwrap();
        assert!((d - (-2.09)).abs() < 0.02, "{d}");
    }

    #[test]
    fn digital_with_rate_matches_closed_form() {
        let m = ModelSpec::<f64>::me(1.3, 1.8, 0.5, 0.04).unwrap();
        let mk = MarketSetup::new(0.9, 1.0).unwrap();
        let p = cm_value(&m, &mk, Payoff::DigitalPut, &CarrMadanConfig::default(), Order::Price).unwrap();
        assert!((p - me_digital_price(&m, &mk).unwrap()).abs() < 1e-3);
    }

    #[test]
    fn damping_outside_strip_is_rejected() {
        let mk = MarketSetup::new(0.75, 0.75).unwrap();
        // E[S_T^{1+alpha}] needs (1+alpha) sqrt(T) < lambda
        let cfg = CarrMadanConfig { alpha: 6.0, ..Default::default() };
        let err = cm_value(&me_ref(), &mk, Payoff::Call, &cfg, Order::Price).unwrap_err();
        assert!(matches!(err, Error::OutsideStrip { .. }));
        let bad = CarrMadanConfig { alpha: -0.1, ..Default::default() };
        assert!(cm_value(&me_ref(), &mk, Payoff::Call, &bad, Order::Price).is_err());
        let even = CarrMadanConfig { grid_points: 1 << 10, ..Default::default() };
        assert!(cm_value(&me_ref(), &mk, Payoff::Call, &even, Order::Price).is_err());
    }

    #[test]
    fn vg_call_is_positive_and_below_spot() {
        let m = ModelSpec::vg(VgParams::new(0.13, 0.4, 0.0).unwrap(), 1.0 / 12.0, 0.0).unwrap();
        let mk = MarketSetup::new(0.75, 0.75).unwrap();
        let p = cm_value(&m, &mk, Payoff::Call, &CarrMadanConfig::default(), Order::Price).unwrap();
        assert!(p > 0.0 && p < 0.75, "{p}");
    }
}
