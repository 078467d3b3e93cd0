//! Central finite-difference Delta and Gamma over any pricing function.

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepMode {
    /// `h` in units of `S0`.
    #[default]
    Absolute,
    /// `h * S0`.
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig<T> {
    pub step: T,
    /// Accuracy of the underlying pricer, if known.
    pub pricing_error: Option<T>,
    pub mode: StepMode,
}

impl<T: Scalar> Default for FdConfig<T> {
    fn default() -> Self {
        Self {
            step: T::lit(0.01),
            pricing_error: None,
            mode: StepMode::Absolute,
        }
    }
}

impl<T: Scalar> FdConfig<T> {
    pub fn with_step(step: T) -> Result<Self> {
        let cfg = Self { step, ..Self::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Step balanced against a known pricing error.
    pub fn for_pricing_error(pricing_error: T) -> Result<Self> {
        Ok(Self {
            step: choose_step(pricing_error)?,
            pricing_error: Some(pricing_error),
            mode: StepMode::Absolute,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > T::zero() && self.step.is_finite()) {
            return Err(invalid("step", format!("must be positive, got {}", self.step)));
        }
        if let Some(err) = self.pricing_error {
            if !(err > T::zero()) {
                return Err(invalid("pricing_error", format!("must be positive, got {err}")));
            }
            let ratio = self.step / err.cbrt();
            if !(ratio >= T::lit(0.1) && ratio <= T::lit(10.0)) {
                return Err(invalid(
                    "step",
                    format!("{} is not within a factor 10 of the cube root of {err}", self.step),
                ));
            }
        }
        Ok(())
    }

    /// Absolute step at spot `s0`.
    pub fn step_at(&self, s0: T) -> T {
        match self.mode {
            StepMode::Absolute => self.step,
            StepMode::Relative => self.step * s0,
        }
    }
}

/// Cube root of the pricing error, rounded to one significant figure.
pub fn choose_step<T: Scalar>(pricing_error: T) -> Result<T> {
    if !(pricing_error > T::zero() && pricing_error.is_finite()) {
        return Err(invalid("pricing_error", format!("must be positive, got {pricing_error}")));
    }
    let root = pricing_error.as_f64().cbrt();
    let mut exp = root.log10().floor() as i32;
    let mut digit = (root / 10f64.powi(exp)).round();
    if digit >= 10.0 {
        digit = 1.0;
        exp += 1;
    }
    // divide for negative exponents so 0.01 comes out as the nearest double
    let h = if exp < 0 {
        digit / 10f64.powi(-exp)
    } else {
        digit * 10f64.powi(exp)
    };
    Ok(T::lit(h))
}

fn check_step<T: Scalar>(s0: T, h: T) -> Result<()> {
    if !(h > T::zero() && h.is_finite()) {
        return Err(invalid("step", format!("must be positive, got {h}")));
    }
    if !(s0 - h > T::zero()) {
        return Err(invalid("step", format!("s0 - h = {} must stay positive", s0 - h)));
    }
    Ok(())
}

/// `(pi(s0 + h) - pi(s0 - h)) / 2h`
pub fn fd_delta<T: Scalar>(price: impl Fn(T) -> Result<T>, s0: T, h: T) -> Result<T> {
    check_step(s0, h)?;
    Ok((price(s0 + h)? - price(s0 - h)?) / (h + h))
}

/// `(pi(s0 + h) - 2 pi(s0) + pi(s0 - h)) / h^2`
pub fn fd_gamma<T: Scalar>(price: impl Fn(T) -> Result<T>, s0: T, h: T) -> Result<T> {
    check_step(s0, h)?;
    let (up, mid, down) = (price(s0 + h)?, price(s0)?, price(s0 - h)?);
    Ok((up - (mid + mid) + down) / (h * h))
}

/// Price, Delta and Gamma from three price evaluations.
pub fn fd_greeks<T: Scalar>(price: impl Fn(T) -> Result<T>, s0: T, cfg: &FdConfig<T>) -> Result<[T; 3]> {
    cfg.validate()?;
    let h = cfg.step_at(s0);
    check_step(s0, h)?;
    let (up, mid, down) = (price(s0 + h)?, price(s0)?, price(s0 - h)?);
    Ok([mid, (up - down) / (h + h), (up - (mid + mid) + down) / (h * h)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::models::{MarketSetup, MeDigital, ModelSpec};

    fn me_digital() -> MeDigital<f64> {
        MeDigital::new(&ModelSpec::me(1.0, 2.0, 1.0 / 12.0, 0.0).unwrap(), 0.75).unwrap()
    }

    #[test]
    fn step_rule() {
        assert_eq!(choose_step(1e-6).unwrap(), 0.01);
        assert_eq!(choose_step(1e-15).unwrap(), 1e-5);
        assert_eq!(choose_step(8e-6).unwrap(), 0.02);
        assert_eq!(choose_step(0.9e-3).unwrap(), 0.1);
        assert_eq!(choose_step(1e3).unwrap(), 10.0);
        assert!(choose_step(0.0).is_err());
        assert!(choose_step(-1e-6).is_err());
    }

    #[test]
    fn config_invariants() {
        assert!(FdConfig::with_step(0.0).is_err());
        assert!(FdConfig::for_pricing_error(1e-6).unwrap().validate().is_ok());
        let off = FdConfig { step: 1.0, pricing_error: Some(1e-6), mode: StepMode::Absolute };
        assert!(off.validate().is_err());
        let rel = FdConfig { step: 0.01, pricing_error: None, mode: StepMode::Relative };
        assert_eq!(rel.step_at(2.0), 0.02);
    }

    #[test]
    fn exact_on_polynomials() {
        for h in [0.3, 0.01, 1e-3] {
            let d = fd_delta(|s: f64| Ok(3.0 * s - 1.0), 2.0, h).unwrap();
            assert!((d - 3.0).abs() < 1e-12, "{d}");
            let g = fd_gamma(|s: f64| Ok(s * s + 4.0 * s), 2.0, h).unwrap();
            // cancellation in the second difference scales with 1/h^2
            assert!((g - 2.0).abs() < 1e-12_f64.max(1e-14 / (h * h)), "{g}");
        }
    }

    #[test]
    fn step_must_keep_spot_positive() {
        assert!(fd_delta(|s: f64| Ok(s), 0.01, 0.02).is_err());
        assert!(fd_gamma(|s: f64| Ok(s), 0.5, -0.1).is_err());
    }

    #[test]
    fn pricing_errors_propagate() {
        let err = fd_gamma(|_: f64| Err::<f64, _>(Error::Empty), 1.0, 0.1).unwrap_err();
        assert_eq!(err, Error::Empty);
    }

    #[test]
    fn me_digital_closed_form_differences() {
        let d = me_digital();
        let price = |s| Ok(d.price(s));
        let delta = fd_delta(price, 0.75, 0.01).unwrap();
        assert!((delta - (-2.10)).abs() < 0.005, "{delta}");
        for (h, want) in [(0.01, 12.4795), (0.005, 12.4746)] {
            let g = fd_gamma(price, 0.75, h).unwrap();
            assert!((g - want).abs() < 1e-3, "{h}: {g}");
        }
    }

    #[test]
    fn second_order_convergence() {
        let d = me_digital();
        let exact = d.delta(0.80).unwrap();
        let err = |h| (fd_delta(|s| Ok(d.price(s)), 0.80, h).unwrap() - exact).abs();
        for (coarse, fine) in [(0.02, 0.01), (0.01, 0.005)] {
            let ratio = err(coarse) / err(fine);
            assert!((ratio - 4.0).abs() < 0.5, "{ratio}");
        }
    }

    #[test]
    fn greeks_bundle() {
        let mk = MarketSetup::new(0.75, 0.75).unwrap();
        let d = me_digital();
        let [p, delta, gamma] = fd_greeks(|s| Ok(d.price(s)), mk.s0, &FdConfig::default()).unwrap();
        assert_eq!(p, d.price(0.75));
        assert_eq!(delta, fd_delta(|s| Ok(d.price(s)), 0.75, 0.01).unwrap());
        assert_eq!(gamma, fd_gamma(|s| Ok(d.price(s)), 0.75, 0.01).unwrap());
    }
}
