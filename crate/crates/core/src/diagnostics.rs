//! Tail-decay diagnostics for differentiated Fourier integrands.
//!
//! If `|phi(u)| ~ u^{-p}`, each engine's order-`n` integrand decays like a
//! known power of `v` involving `p`; integrability of that power (and, for COS,
//! smoothness of the density) is the sufficient condition for differentiating
//! under the integral. These checks flag the Greeks that are not covered.

use std::fmt;

use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::fourier::{Method, Order, Payoff};
use crate::models::{ModelKind, ModelSpec};
use crate::scalar::Scalar;

/// Half-width of the band around a threshold reported as borderline.
pub const BORDERLINE_BAND: f64 = 0.05;

const FIT_POINTS: usize = 50;
const FIT_LO: f64 = 1e3;
const FIT_HI: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayEstimate<T> {
    /// `p` in `|phi(u)| ~ u^{-p}`.
    pub exponent: T,
    pub fit_range: (T, T),
    /// Root-mean-square residual of the log-log fit.
    pub residual: T,
}

/// Fit `p` from `|phi(u + i shift)|` on a geometric grid over `[1e3, 1e6]`.
pub fn estimate_decay<T: Scalar>(model: &ModelSpec<T>, contour_shift: T) -> Result<DecayEstimate<T>> {
    fit_decay(|u| Ok(model.cf(Complex::new(u, contour_shift))?.norm()))
}

/// Least-squares slope of `log |f(u)|` against `log u`, for any modulus `f`.
pub fn fit_decay<T: Scalar>(modulus: impl Fn(T) -> Result<T>) -> Result<DecayEstimate<T>> {
    let (lo, hi) = (T::lit(FIT_LO), T::lit(FIT_HI));
    let step = (hi / lo).ln() / T::from_usize_lossy(FIT_POINTS - 1);
    let mut xs = Vec::with_capacity(FIT_POINTS);
    let mut ys = Vec::with_capacity(FIT_POINTS);
    for j in 0..FIT_POINTS {
        let x = lo.ln() + step * T::from_usize_lossy(j);
        let m = modulus(x.exp())?;
        if !(m > T::zero() && m.is_finite()) {
            return Err(invalid("modulus", format!("|phi| = {m} at u = {} is not positive", x.exp())));
        }
        xs.push(x);
        ys.push(m.ln());
    }
    let n = T::from_usize_lossy(FIT_POINTS);
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxy: T = xs.iter().zip(&ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let sse: T = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| {
            let e = y - my - slope * (x - mx);
            e * e
        })
        .sum();
    Ok(DecayEstimate {
        exponent: -slope,
        fit_range: (lo, hi),
        residual: (sse / n).sqrt(),
    })
}

/// Ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConditionStatus {
    Satisfied,
    Borderline,
    Violated,
}

impl ConditionStatus {
    pub fn name(&self) -> &'static str {
        match self {
            ConditionStatus::Satisfied => "satisfied",
            ConditionStatus::Borderline => "borderline",
            ConditionStatus::Violated => "violated",
        }
    }

    fn classify(p: f64, threshold: f64) -> Self {
        if (p - threshold).abs() <= BORDERLINE_BAND {
            ConditionStatus::Borderline
        } else if p > threshold {
            ConditionStatus::Satisfied
        } else {
            ConditionStatus::Violated
        }
    }
}

impl fmt::Display for ConditionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Warning attached to a Greek whose condition is not plainly satisfied,
/// rendered as e.g. `gamma-condition-violated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConditionWarning {
    pub order: Order,
    pub status: ConditionStatus,
}

impl fmt::Display for ConditionWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-condition-{}", self.order.name(), self.status)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionFlag {
    pub method: Method,
    pub payoff: Payoff,
    pub order: Order,
    pub status: ConditionStatus,
    /// `p` must exceed this.
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub exponent: f64,
    pub flags: Vec<ConditionFlag>,
    pub rationale: String,
}

impl ConditionReport {
    pub fn status(&self, method: Method, order: Order) -> Option<ConditionStatus> {
        self.flags
            .iter()
            .find(|f| f.method == method && f.order == order)
            .map(|f| f.status)
    }

    /// Non-satisfied flags for one engine, in increasing order.
    pub fn warnings(&self, method: Method) -> Vec<ConditionWarning> {
        self.flags
            .iter()
            .filter(|f| f.method == method && f.status != ConditionStatus::Satisfied)
            .map(|f| ConditionWarning {
                order: f.order,
                status: f.status,
            })
            .collect()
    }
}

/// Integrand thresholds for Carr-Madan and Lewis. A call integrand carries
/// an extra `v^{-1}` relative to the digital (CM denominator `~v^2`,
/// `w_call ~ v^{-2}` vs `w_digital ~ v^{-1}`); each `S0` derivative adds `v^1`.
fn integrand_threshold(payoff: Payoff, order: Order) -> f64 {
    let n = order.degree() as f64;
    match payoff {
        Payoff::Call => n - 1.0,
        Payoff::DigitalPut => n,
    }
}

/// Flags for every Fourier engine and order, for one payoff.
///
/// COS Greeks need a continuously differentiable density, proxied by `p > 2`.
/// For VG the exponent is known exactly (`2T/nu`) and replaces the fit; its
/// density is unbounded outright when `T < nu/2`.
pub fn check_conditions<T: Scalar>(model: &ModelSpec<T>, payoff: Payoff, estimate: &DecayEstimate<T>) -> ConditionReport {
    let p = estimate.exponent.as_f64();
    let mut flags = Vec::with_capacity(9);
    for method in Method::FOURIER {
        for order in Order::ALL {
            let (threshold, status) = match (method, order) {
                (Method::Cos, Order::Price) => (0.0, ConditionStatus::classify(p, 0.0)),
                (Method::Cos, _) => match model.kind {
                    ModelKind::Vg(vg) => {
                        let exact = (T::lit(2.0) * model.maturity / vg.nu).as_f64();
                        let status = if model.maturity < vg.nu * T::lit(0.5) {
                            ConditionStatus::Violated
                        } else {
                            ConditionStatus::classify(exact, 2.0)
                        };
                        (2.0, status)
                    }
                    ModelKind::Me { .. } => (2.0, ConditionStatus::classify(p, 2.0)),
                },
                _ => {
                    let t = integrand_threshold(payoff, order);
                    (t, ConditionStatus::classify(p, t))
                }
            };
            flags.push(ConditionFlag {
                method,
                payoff,
                order,
                status,
                threshold,
            });
        }
    }
    let mut rationale = format!(
        "|phi(u)| ~ u^-{p:.3} (fit on [{:.0e}, {:.0e}], rms residual {:.2e}); \
         carr-madan/lewis {payoff} order n needs p > {}; cos greeks need p > 2",
        estimate.fit_range.0.as_f64(),
        estimate.fit_range.1.as_f64(),
        estimate.residual.as_f64(),
        match payoff {
            Payoff::Call => "n - 1",
            Payoff::DigitalPut => "n",
        },
    );
    if let ModelKind::Vg(vg) = model.kind {
        let exact = (T::lit(2.0) * model.maturity / vg.nu).as_f64();
        rationale.push_str(&format!("; vg exponent 2T/nu = {exact:.4}"));
        if model.maturity < vg.nu * T::lit(0.5) {
            rationale.push_str(", density unbounded since T < nu/2");
        }
    }
    ConditionReport {
        exponent: p,
        flags,
        rationale,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::VgParams;

    fn me_ref() -> ModelSpec<f64> {
        ModelSpec::me(1.0, 2.0, 1.0 / 12.0, 0.0).unwrap()
    }

    fn vg_ref(t: f64) -> ModelSpec<f64> {
        ModelSpec::vg(VgParams::new(0.13, 0.4, 0.0).unwrap(), t, 0.0).unwrap()
    }

    #[test]
    fn model_exponents() {
        let me = estimate_decay(&me_ref(), 0.0).unwrap();
        assert!((me.exponent - 1.0).abs() < 0.05, "{me:?}");
        let vg = estimate_decay(&vg_ref(1.0 / 12.0), 0.0).unwrap();
        assert!((vg.exponent - 2.0 / 12.0 / 0.4).abs() < 0.02, "{vg:?}");
        let vg = estimate_decay(&vg_ref(0.4), 0.0).unwrap();
        assert!((vg.exponent - 2.0).abs() < 0.05, "{vg:?}");
        assert!(vg.residual >= 0.0 && vg.fit_range.0 < vg.fit_range.1);
    }

    #[test]
    fn synthetic_exponents() {
        for q in [0.5, 1.0, 3.0] {
            let est = fit_decay(|u: f64| Ok((1.0 + u * u).powf(-q / 2.0))).unwrap();
            assert!((est.exponent - q).abs() < 0.02, "{q}: {est:?}");
        }
    }

    #[test]
    fn me_digital_gamma_violated_everywhere() {
        let m = me_ref();
        let r = check_conditions(&m, Payoff::DigitalPut, &estimate_decay(&m, 0.0).unwrap());
        for method in Method::FOURIER {
            assert_eq!(r.status(method, Order::Gamma), Some(ConditionStatus::Violated));
            assert_eq!(r.status(method, Order::Price), Some(ConditionStatus::Satisfied));
            assert!(r.warnings(method).iter().any(|w| w.to_string() == "gamma-condition-violated"));
        }
        // p ~ 1 sits on the digital Delta threshold
        assert_eq!(r.status(Method::CarrMadan, Order::Delta), Some(ConditionStatus::Borderline));
    }

    #[test]
    fn vg_flags() {
        let m = vg_ref(1.0 / 12.0);
        let r = check_conditions(&m, Payoff::DigitalPut, &estimate_decay(&m, 0.0).unwrap());
        assert_eq!(r.status(Method::CarrMadan, Order::Delta), Some(ConditionStatus::Violated));
        assert_eq!(r.status(Method::Cos, Order::Delta), Some(ConditionStatus::Violated));
        assert!(r.rationale.contains("unbounded"));

        let m = vg_ref(0.3);
        let r = check_conditions(&m, Payoff::Call, &estimate_decay(&m, 0.0).unwrap());
        assert_eq!(r.status(Method::Lewis, Order::Gamma), Some(ConditionStatus::Satisfied));
    }

    #[test]
    fn flags_monotone_in_order() {
        for m in [me_ref(), vg_ref(1.0 / 12.0), vg_ref(0.3), vg_ref(1.0)] {
            let est = estimate_decay(&m, 0.0).unwrap();
            for payoff in [Payoff::Call, Payoff::DigitalPut] {
                let r = check_conditions(&m, payoff, &est);
                for method in Method::FOURIER {
                    let s: Vec<_> = Order::ALL.iter().map(|&o| r.status(method, o).unwrap()).collect();
                    assert!(s.windows(2).all(|w| w[0] <= w[1]), "{method} {payoff}: {s:?}");
                }
            }
        }
    }

    #[test]
    fn me_flags_ignore_location_and_spot() {
        let a = ModelSpec::me(1.0, 2.0, 1.0 / 12.0, 0.0).unwrap();
        let b = ModelSpec::me(1.0, 2.0, 1.0 / 12.0, 0.05).unwrap();
        let fa = check_conditions(&a, Payoff::DigitalPut, &estimate_decay(&a, 0.0).unwrap()).flags;
        let fb = check_conditions(&b, Payoff::DigitalPut, &estimate_decay(&b, 0.0).unwrap()).flags;
        assert_eq!(fa, fb);
    }
}
