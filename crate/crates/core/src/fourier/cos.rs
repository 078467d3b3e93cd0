use num_complex::Complex;

use super::{Order, Payoff};
use crate::error::{invalid, Error, Result};
use crate::models::{MarketSetup, ModelSpec};
use crate::scalar::Scalar;

/// COS expansion on `[center - width/2, center + width/2]` in `y = log(S_T / K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosConfig<T> {
    pub range_width: T,
    pub terms: usize,
    /// Interval midpoint; `None` centres on `E[y]`.
    pub center: Option<T>,
}

impl<T: Scalar> Default for CosConfig<T> {
    fn default() -> Self {
        Self {
            range_width: T::lit(60.0),
            terms: 100_000,
            center: None,
        }
    }
}

/// Cached COS series `sum' Re{c_k e^{i u_k x}}` with `x = log(S0 / K)`.
///
/// The coefficients `c_k = phi(u_k) e^{-i u_k a} V_k` are fixed once; every
/// other spot (and every `S0` derivative) only changes the phase factor.
#[derive(Debug, Clone)]
pub struct CosExpansion<T> {
    a: T,
    b: T,
    du: T,
    strike: T,
    discount: T,
    parity: bool,
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> CosExpansion<T> {
    pub fn new(model: &ModelSpec<T>, mk: &MarketSetup<T>, payoff: Payoff, cfg: &CosConfig<T>) -> Result<Self> {
        if !(cfg.range_width > T::zero() && cfg.range_width.is_finite()) {
            return Err(invalid("range_width", "must be positive"));
        }
        if cfg.terms < 2 {
            return Err(invalid("terms", format!("need at least 2, got {}", cfg.terms)));
        }
        let center = cfg
            .center
            .unwrap_or_else(|| mk.log_moneyness() + model.drift() + model.mean_x());
        let half = cfg.range_width * T::lit(0.5);
        let (a, b) = (center - half, center + half);
        if payoff == Payoff::DigitalPut && !(a < T::zero() && b > T::zero()) {
            return Err(Error::IntervalExcludesStrike {
                a: a.as_f64(),
                b: b.as_f64(),
            });
        }
        let width = b - a;
        let du = T::PI() / width;
        let norm = T::lit(2.0) / width;
        let mut coeffs = Vec::with_capacity(cfg.terms);
        for k in 0..cfg.terms {
            let u = du * T::from_usize_lossy(k);
            let v_k = match payoff {
                Payoff::DigitalPut => norm * psi(u, a, a, T::zero()),
                // calls are priced through the put: the call coefficients
                // carry e^b and cancel catastrophically for wide intervals
                Payoff::Call => {
                    let hi = b.min(T::zero());
                    if hi <= a {
                        T::zero()
                    } else {
                        norm * mk.strike * (psi(u, a, a, hi) - chi(u, a, a, hi))
                    }
                }
            };
            let phi = model.cf(Complex::new(u, T::zero()))?;
            let mut c = phi * Complex::new(T::zero(), -u * a).exp() * v_k;
            if k == 0 {
                c = c * T::lit(0.5);
            }
            coeffs.push(c);
        }
        Ok(Self {
            a,
            b,
            du,
            strike: mk.strike,
            discount: (-model.rate * model.maturity).exp(),
            parity: payoff == Payoff::Call,
            coeffs,
        })
    }

    pub fn interval(&self) -> (T, T) {
        (self.a, self.b)
    }

    pub fn terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Price, Delta or Gamma at spot `s0`, interval held fixed.
    pub fn value(&self, s0: T, order: Order) -> T {
        let x = (s0 / self.strike).ln();
        let mut acc = T::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            let u = self.du * T::from_usize_lossy(k);
            let (sin, cos) = (u * x).sin_cos();
            let term = *c * Complex::new(cos, sin);
            acc = acc + match order {
                Order::Price => term.re,
                // Re{term * iu}
                Order::Delta => -term.im * u,
                // Re{term * ((iu)^2 - iu)}
                Order::Gamma => -term.re * u * u + term.im * u,
            };
        }
        let scale = match order {
            Order::Price => T::one(),
            Order::Delta => s0.recip(),
            Order::Gamma => (s0 * s0).recip(),
        };
        let series = self.discount * acc * scale;
        if !self.parity {
            return series;
        }
        // C = P + S0 - K e^{-rT}
        match order {
            Order::Price => series + s0 - self.strike * self.discount,
            Order::Delta => series + T::one(),
            Order::Gamma => series,
        }
    }

    /// Prices at many spots. The phase `e^{i u_k x}` advances by a per-spot
    /// rotation, re-anchored exactly every `ANCHOR` terms; spots are processed
    /// in cache-sized tiles so the inner loop over spots vectorizes.
    pub fn prices(&self, spots: &[T]) -> Vec<T> {
        const TILE: usize = 256;
        const ANCHOR: usize = 512;
        let mut out = Vec::with_capacity(spots.len());
        let mut zr = [T::zero(); TILE];
        let mut zi = [T::zero(); TILE];
        let mut wr = [T::zero(); TILE];
        let mut wi = [T::zero(); TILE];
        let mut acc = [T::zero(); TILE];
        let mut xs = [T::zero(); TILE];
        for chunk in spots.chunks(TILE) {
            let n = chunk.len();
            for (j, &s) in chunk.iter().enumerate() {
                xs[j] = (s / self.strike).ln();
                let (sin, cos) = (self.du * xs[j]).sin_cos();
                wr[j] = cos;
                wi[j] = sin;
                acc[j] = T::zero();
            }
            for (block, cs) in self.coeffs.chunks(ANCHOR).enumerate() {
                let u0 = self.du * T::from_usize_lossy(block * ANCHOR);
                for j in 0..n {
                    let (sin, cos) = (u0 * xs[j]).sin_cos();
                    zr[j] = cos;
                    zi[j] = sin;
                }
                for c in cs {
                    let (cr, ci) = (c.re, c.im);
                    for j in 0..n {
                        acc[j] = acc[j] + cr * zr[j] - ci * zi[j];
                        let r = zr[j] * wr[j] - zi[j] * wi[j];
                        zi[j] = zr[j] * wi[j] + zi[j] * wr[j];
                        zr[j] = r;
                    }
                }
            }
            out.extend(acc[..n].iter().zip(chunk).map(|(&v, &s)| {
                let p = self.discount * v;
                if self.parity {
                    p + s - self.strike * self.discount
                } else {
                    p
                }
            }));
        }
        out
    }
}

/// `\int_c^d cos(u (y - a)) dy`
fn psi<T: Scalar>(u: T, a: T, c: T, d: T) -> T {
    if u == T::zero() {
        d - c
    } else {
        ((u * (d - a)).sin() - (u * (c - a)).sin()) / u
    }
}

/// `\int_c^d e^y cos(u (y - a)) dy`
fn chi<T: Scalar>(u: T, a: T, c: T, d: T) -> T {
    let (sd, cd) = (u * (d - a)).sin_cos();
    let (sc, cc) = (u * (c - a)).sin_cos();
    let (ed, ec) = (d.exp(), c.exp());
    (cd * ed - cc * ec + u * (sd * ed - sc * ec)) / (T::one() + u * u)
}

/// Price, Delta or Gamma by the COS method with the interval centred for `mk.s0`.
pub fn cos_value<T: Scalar>(
    model: &ModelSpec<T>,
    mk: &MarketSetup<T>,
    payoff: Payoff,
    cfg: &CosConfig<T>,
    order: Order,
) -> Result<T> {
    Ok(CosExpansion::new(model, mk, payoff, cfg)?.value(mk.s0, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::me_digital_price;

    fn me_ref() -> ModelSpec<f64> {
        ModelSpec::me(1.0, 2.0, 1.0 / 12.0, 0.0).unwrap()
    }

    // midpoint-rule oracle for the cosine integrals
    fn numeric(f: impl Fn(f64) -> f64, c: f64, d: f64) -> f64 {
        let n = 200_000;
        let h = (d - c) / n as f64;
        (0..n).map(|i| f(c + h * (i as f64 + 0.5))).sum::<f64>() * h
    }

    #[test]
    fn cosine_integrals_match_quadrature() {
        let (a, c, d) = (-3.0, -0.5, 1.2);
        for u in [0.0, 0.7, 5.3] {
            let p = numeric(|y| (u * (y - a)).cos(), c, d);
            let x = numeric(|y| y.exp() * (u * (y - a)).cos(), c, d);
            assert!((psi(u, a, c, d) - p).abs() < 1e-9);
            assert!((chi(u, a, c, d) - x).abs() < 1e-9);
        }
    }

    #[test]
    fn digital_price_matches_closed_form() {
        let mk = MarketSetup::new(0.75, 0.75).unwrap();
        let p = cos_value(&me_ref(), &mk, Payoff::DigitalPut, &CosConfig::default(), Order::Price).unwrap();
        assert!((p - me_digital_price(&me_ref(), &mk).unwrap()).abs() < 1e-3, "{p}");
    }

    #[test]
    fn call_agrees_with_put_and_engines() {
        let mk = MarketSetup::new(0.75, 0.75).unwrap();
        let c = cos_value(&me_ref(), &mk, Payoff::Call, &CosConfig::default(), Order::Price).unwrap();
        let cm = crate::fourier::cm_value(
            &me_ref(),
            &mk,
            Payoff::Call,
            &crate::fourier::CarrMadanConfig::default(),
            Order::Price,
        )
        .unwrap();
        assert!((c - cm).abs() < 1e-3, "{c} vs {cm}");
        let cfg = CosConfig { terms: 3000, ..Default::default() };
        let e = CosExpansion::new(&me_ref(), &mk, Payoff::Call, &cfg).unwrap();
        let batch = e.prices(&[0.7, 0.75, 0.8]);
        for (s, b) in [0.7, 0.75, 0.8].iter().zip(&batch) {
            assert!((e.value(*s, Order::Price) - b).abs() < 1e-11);
        }
    }

    #[test]
    fn batch_matches_single() {
        let mk = MarketSetup::new(0.75, 0.75).unwrap();
        let cfg = CosConfig { terms: 3000, ..Default::default() };
        let e = CosExpansion::new(&me_ref(), &mk, Payoff::DigitalPut, &cfg).unwrap();
        let spots: Vec<f64> = (0..700).map(|i| 0.6 + 0.3 * i as f64 / 699.0).collect();
        let batch = e.prices(&spots);
        for (s, b) in spots.iter().zip(&batch) {
            assert!((e.value(*s, Order::Price) - b).abs() < 1e-11);
        }
    }

    #[test]
    fn config_errors() {
        let mk = MarketSetup::new(0.75, 0.75).unwrap();
        let few = CosConfig { terms: 1, ..Default::default() };
        assert!(cos_value(&me_ref(), &mk, Payoff::DigitalPut, &few, Order::Price).is_err());
        let off = CosConfig { center: Some(40.0), ..Default::default() };
        assert!(matches!(
            cos_value(&me_ref(), &mk, Payoff::DigitalPut, &off, Order::Price),
            Err(Error::IntervalExcludesStrike { .. })
        ));
    }
}
