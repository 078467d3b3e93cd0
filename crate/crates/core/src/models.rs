//! Risk-neutral model layer: `S_T = S0 exp(rT + m + X_T)` with `X_T` either
//! VG or ME, the mean-correcting term `m`, the characteristic function of
//! `log(S_T / S0)` and closed-form ME digital-put analytics.

use num_complex::Complex;

use crate::distributions::MeParams;
use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VgParams<T> {
    pub sigma: T,
    pub nu: T,
    pub theta: T,
}

impl<T: Scalar> VgParams<T> {
    pub fn new(sigma: T, nu: T, theta: T) -> Result<Self> {
        if !(sigma > T::zero() && sigma.is_finite()) {
            return Err(invalid("sigma", format!("must be positive, got {sigma}")));
        }
        if !(nu > T::zero() && nu.is_finite()) {
            return Err(invalid("nu", format!("must be positive, got {nu}")));
        }
        if !theta.is_finite() {
            return Err(invalid("theta", "must be finite"));
        }
        let p = Self { sigma, nu, theta };
        if p.log_base_at_one() <= T::zero() {
            return Err(invalid(
                "theta",
                "1 - theta*nu - sigma^2*nu/2 must be positive for the mean correction to exist",
            ));
        }
        Ok(p)
    }

    fn log_base_at_one(&self) -> T {
        T::one() - self.theta * self.nu - self.sigma * self.sigma * self.nu * T::lit(0.5)
    }

    /// Scales `nu * mu_p`, `nu * mu_n` of the gamma pair whose difference is VG.
    pub fn gamma_scales(&self) -> (T, T) {
        let half = T::lit(0.5);
        let root = (self.theta * self.theta + T::lit(2.0) * self.sigma * self.sigma / self.nu).sqrt();
        let mu_p = half * root + half * self.theta;
        let mu_n = half * root - half * self.theta;
        (self.nu * mu_p, self.nu * mu_n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind<T> {
    /// Unit-horizon rates; the law of `X_T` is ME(0, eta/sqrt(T), lambda/sqrt(T)).
    Me { eta: T, lambda: T },
    Vg(VgParams<T>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec<T> {
    pub kind: ModelKind<T>,
    pub maturity: T,
    pub rate: T,
}

impl<T: Scalar> ModelSpec<T> {
    pub fn me(eta: T, lambda: T, maturity: T, rate: T) -> Result<Self> {
        Self::new(ModelKind::Me { eta, lambda }, maturity, rate)
    }

    pub fn vg(params: VgParams<T>, maturity: T, rate: T) -> Result<Self> {
        Self::new(ModelKind::Vg(params), maturity, rate)
    }

    pub fn new(kind: ModelKind<T>, maturity: T, rate: T) -> Result<Self> {
        if !(maturity > T::zero() && maturity.is_finite()) {
            return Err(invalid("maturity", format!("must be positive, got {maturity}")));
        }
        if !rate.is_finite() {
            return Err(invalid("rate", "must be finite"));
        }
        match kind {
            ModelKind::Me { eta, lambda } => {
                MeParams::new(T::zero(), eta, lambda)?;
                if lambda <= maturity.sqrt() {
                    return Err(invalid(
                        "lambda",
                        format!("must exceed sqrt(T) = {} for the mean correction", maturity.sqrt()),
                    ));
                }
            }
            ModelKind::Vg(p) => {
                VgParams::new(p.sigma, p.nu, p.theta)?;
            }
        }
        Ok(Self { kind, maturity, rate })
    }

    /// Same parameters over a different horizon.
    pub fn with_maturity(&self, maturity: T) -> Result<Self> {
        Self::new(self.kind, maturity, self.rate)
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ModelKind::Me { .. } => "me",
            ModelKind::Vg(_) => "vg",
        }
    }

    /// Law of `X_T` in the ME model.
    pub fn me_horizon_law(&self) -> Option<MeParams<T>> {
        match self.kind {
            ModelKind::Me { eta, lambda } => {
                let rt = self.maturity.sqrt();
                Some(MeParams {
                    mu: T::zero(),
                    eta: eta / rt,
                    lambda: lambda / rt,
                })
            }
            ModelKind::Vg(_) => None,
        }
    }

    pub fn mean_correction(&self) -> T {
        match self.kind {
            ModelKind::Me { eta, lambda } => {
                let rt = self.maturity.sqrt();
                -(T::lit(0.5) * (lambda / (lambda - rt) + eta / (eta + rt))).ln()
            }
            ModelKind::Vg(p) => self.maturity / p.nu * p.log_base_at_one().ln(),
        }
    }

    /// `E[X_T]`.
    pub fn mean_x(&self) -> T {
        match self.kind {
            ModelKind::Me { .. } => self.me_horizon_law().map(|l| l.mean()).unwrap_or_default(),
            ModelKind::Vg(p) => p.theta * self.maturity,
        }
    }

    /// `rT + m`, the deterministic part of `log(S_T / S0)`.
    pub fn drift(&self) -> T {
        self.rate * self.maturity + self.mean_correction()
    }

    /// Open interval of `Im(u)` on which the characteristic function is finite.
    pub fn strip(&self) -> (T, T) {
        match self.kind {
            ModelKind::Me { .. } => self.me_horizon_law().map(|l| l.strip()).unwrap_or_default(),
            ModelKind::Vg(p) => {
                // moment generating function exists for z in (z-, z+), the roots of
                // 1 - theta nu z - sigma^2 nu z^2 / 2; Im(u) = -z
                let s2n = p.sigma * p.sigma * p.nu;
                let tn = p.theta * p.nu;
                let disc = (tn * tn + T::lit(2.0) * s2n).sqrt();
                let z_lo = (-tn - disc) / s2n;
                let z_hi = (-tn + disc) / s2n;
                (-z_hi, -z_lo)
            }
        }
    }

    /// Characteristic function of `log(S_T / S0)`, including the `exp(iu(rT + m))` phase.
    pub fn cf(&self, u: Complex<T>) -> Result<Complex<T>> {
        let (lower, upper) = self.strip();
        if !(u.im > lower && u.im < upper) {
            return Err(Error::OutsideStrip {
                im: u.im.as_f64(),
                lower: lower.as_f64(),
                upper: upper.as_f64(),
            });
        }
        let iu = Complex::<T>::i() * u;
        let phase = (iu * self.drift()).exp();
        match self.kind {
            ModelKind::Me { .. } => {
                let law = self.me_horizon_law().expect("ME model");
                Ok(phase * law.cf_unchecked(u))
            }
            ModelKind::Vg(p) => {
                let base = Complex::from(T::one()) - iu * (p.theta * p.nu)
                    + u * u * (p.sigma * p.sigma * p.nu * T::lit(0.5));
                if base.re <= T::zero() {
                    return Err(Error::BranchCut {
                        real: base.re.as_f64(),
                        u_re: u.re.as_f64(),
                        u_im: u.im.as_f64(),
                    });
                }
                // principal branch of base^(-T/nu)
                Ok(phase * (base.ln() * (-self.maturity / p.nu)).exp())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketSetup<T> {
    pub s0: T,
    pub strike: T,
}

impl<T: Scalar> MarketSetup<T> {
    pub fn new(s0: T, strike: T) -> Result<Self> {
        if !(s0 > T::zero() && s0.is_finite()) {
            return Err(invalid("s0", format!("must be positive, got {s0}")));
        }
        if !(strike > T::zero() && strike.is_finite()) {
            return Err(invalid("strike", format!("must be positive, got {strike}")));
        }
        Ok(Self { s0, strike })
    }

    pub fn with_spot(&self, s0: T) -> Result<Self> {
        Self::new(s0, self.strike)
    }

    /// `log(S0 / K)`.
    pub fn log_moneyness(&self) -> T {
        (self.s0 / self.strike).ln()
    }
}

/// Where the ME digital-put Delta jumps, and the offset `d` of the current spot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeDigitalGeometry<T> {
    pub s0_star: T,
    pub d: T,
}

impl<T: Scalar> MeDigitalGeometry<T> {
    pub fn at_jump(&self) -> bool {
        self.d == T::zero()
    }
}

/// Closed-form digital put (pays 1 if `S_T < K`) in the ME model.
#[derive(Debug, Clone, Copy)]
pub struct MeDigital<T> {
    eta_t: T,
    lambda_t: T,
    discount: T,
    drift: T,
    strike: T,
}

impl<T: Scalar> MeDigital<T> {
    pub fn new(model: &ModelSpec<T>, strike: T) -> Result<Self> {
        let law = model
            .me_horizon_law()
            .ok_or_else(|| invalid("model", "closed-form digital analytics exist only for ME"))?;
        if !(strike > T::zero()) {
            return Err(invalid("strike", "must be positive"));
        }
        Ok(Self {
            eta_t: law.eta,
            lambda_t: law.lambda,
            discount: (-model.rate * model.maturity).exp(),
            drift: model.drift(),
            strike,
        })
    }

    pub fn s0_star(&self) -> T {
        self.strike * (-self.drift).exp()
    }

    pub fn geometry(&self, s0: T) -> MeDigitalGeometry<T> {
        let s0_star = self.s0_star();
        let d = if s0 == s0_star {
            T::zero()
        } else {
            (self.strike / s0).ln() - self.drift
        };
        MeDigitalGeometry { s0_star, d }
    }

    pub fn price(&self, s0: T) -> T {
        let g = self.geometry(s0);
        let half = T::lit(0.5);
        if s0 >= g.s0_star {
            half * self.discount * (self.eta_t * g.d).exp()
        } else {
            self.discount * (T::one() - half * (-self.lambda_t * g.d).exp())
        }
    }

    pub fn delta(&self, s0: T) -> Result<T> {
        let g = self.geometry(s0);
        if g.at_jump() && self.eta_t != self.lambda_t {
            return Err(Error::UndefinedAtJump {
                s0_star: g.s0_star.as_f64(),
            });
        }
        Ok(self.delta_branch(s0, g.d, s0 >= g.s0_star))
    }

    fn delta_branch(&self, s0: T, d: T, upper: bool) -> T {
        let half = T::lit(0.5);
        if upper {
            -half * self.eta_t / s0 * self.discount * (self.eta_t * d).exp()
        } else {
            -half * self.lambda_t / s0 * self.discount * (-self.lambda_t * d).exp()
        }
    }

    /// One-sided Delta limits `(left, right)` at `S0*`.
    pub fn delta_limits(&self) -> (T, T) {
        let s = self.s0_star();
        (
            self.delta_branch(s, T::zero(), false),
            self.delta_branch(s, T::zero(), true),
        )
    }

    pub fn gamma(&self, s0: T) -> Result<T> {
        let g = self.geometry(s0);
        if g.at_jump() {
            return Err(Error::UndefinedAtJump {
                s0_star: g.s0_star.as_f64(),
            });
        }
        Ok(self.gamma_branch(s0, g.d, s0 > g.s0_star))
    }

    fn gamma_branch(&self, s0: T, d: T, upper: bool) -> T {
        let half = T::lit(0.5);
        let scale = half / (s0 * s0) * self.discount;
        if upper {
            let e = self.eta_t;
            scale * (e * e + e) * (e * d).exp()
        } else {
            let l = self.lambda_t;
            scale * (l - l * l) * (-l * d).exp()
        }
    }

    /// One-sided Gamma limits `(left, right)` at `S0*`.
    pub fn gamma_limits(&self) -> (T, T) {
        let s = self.s0_star();
        (
            self.gamma_branch(s, T::zero(), false),
            self.gamma_branch(s, T::zero(), true),
        )
    }
}

pub fn me_digital_price<T: Scalar>(model: &ModelSpec<T>, mk: &MarketSetup<T>) -> Result<T> {
    Ok(MeDigital::new(model, mk.strike)?.price(mk.s0))
}

pub fn me_digital_delta<T: Scalar>(model: &ModelSpec<T>, mk: &MarketSetup<T>) -> Result<T> {
    MeDigital::new(model, mk.strike)?.delta(mk.s0)
}

pub fn me_digital_gamma<T: Scalar>(model: &ModelSpec<T>, mk: &MarketSetup<T>) -> Result<T> {
    MeDigital::new(model, mk.strike)?.gamma(mk.s0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const T: f64 = 1.0 / 12.0;

    fn me_ref() -> ModelSpec<f64> {
        ModelSpec::me(1.0, 2.0, T, 0.0).unwrap()
    }

    fn vg_ref() -> ModelSpec<f64> {
        ModelSpec::vg(VgParams::new(0.13, 0.4, 0.0).unwrap(), T, 0.0).unwrap()
    }

    #[test]
    fn constructor_invariants() {
        assert!(ModelSpec::me(1.0, 0.2, 0.25, 0.0).is_err()); // lambda <= sqrt(T)
        assert!(ModelSpec::me(1.0, 2.0, 0.0, 0.0).is_err());
        assert!(VgParams::new(0.13, 0.4, 3.0).is_err()); // 1 - theta nu - ... < 0
        assert!(VgParams::new(-0.1, 0.4, 0.0).is_err());
        assert!(MarketSetup::new(0.0, 1.0).is_err());
    }

    #[test]
    fn mean_corrections() {
        // -log((2/(2-s) + 1/(1+s))/2), s = sqrt(1/12)
        assert!((me_ref().mean_correction() - 0.028_051_830_547_171_6).abs() < 1e-12);
        // (T/nu) log(1 - sigma^2 nu / 2)
        assert!((vg_ref().mean_correction() - (-7.053_593_967_100_78e-4)).abs() < 1e-12);
        let tiny = ModelSpec::<f64>::me(1.5, 1.5, 1e-12, 0.0).unwrap();
        assert!(tiny.mean_correction().abs() < 1e-10);
    }

    #[test]
    fn cf_at_zero_and_martingale_point() {
        for m in [me_ref(), vg_ref()] {
            let one = m.cf(Complex::new(0.0, 0.0)).unwrap();
            assert_relative_eq!(one.re, 1.0, epsilon = 1e-15);
            let mart = m.cf(Complex::new(0.0, -1.0)).unwrap();
            assert!((mart.re - 1.0).abs() < 1e-12 && mart.im.abs() < 1e-12);
        }
        let with_rate = ModelSpec::me(1.0, 2.0, 0.5, 0.03).unwrap();
        let v = with_rate.cf(Complex::new(0.0, -1.0)).unwrap();
        assert!((v.re - (0.03f64 * 0.5).exp()).abs() < 1e-12);
    }

    #[test]
    fn vg_cf_tail_slope() {
        let m = vg_ref();
        let n = 40;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            let lu = (1e3f64).ln() + (1e6f64 / 1e3).ln() * i as f64 / (n - 1) as f64;
            let ly = m.cf(Complex::new(lu.exp(), 0.0)).unwrap().norm().ln();
            sx += lu;
            sy += ly;
            sxx += lu * lu;
            sxy += lu * ly;
        }
        let nf = n as f64;
        let slope = (nf * sxy - sx * sy) / (nf * sxx - sx * sx);
        assert!((slope + 0.4167).abs() < 0.02, "{slope}");
    }

    #[test]
    fn cf_strip_rejections() {
        let m = me_ref();
        let (lo, hi) = m.strip();
        assert_relative_eq!(lo, -2.0 / T.sqrt());
        assert_relative_eq!(hi, 1.0 / T.sqrt());
        assert!(m.cf(Complex::new(1.0, hi)).is_err());
        assert!(m.cf(Complex::new(1.0, lo - 0.1)).is_err());
        let v = vg_ref();
        let (lo, hi) = v.strip();
        assert!(lo < -1.0 && hi > 1.0);
        assert!(matches!(v.cf(Complex::new(0.0, hi + 1.0)), Err(Error::OutsideStrip { .. })));
    }

    #[test]
    fn digital_reference_values() {
        let mk = MarketSetup::new(0.75, 0.75).unwrap();
        let m = me_ref();
        let p = me_digital_price(&m, &mk).unwrap();
        let d = me_digital_delta(&m, &mk).unwrap();
        let g = me_digital_gamma(&m, &mk).unwrap();
        assert_eq!(format!("{p:.2}"), "0.45");
        assert_eq!(format!("{d:.2}"), "-2.10");
        assert_eq!(format!("{g:.2}"), "12.47");
        assert!((p - 0.453_698_874_937_116_6).abs() < 1e-14);
    }

    #[test]
    fn digital_at_jump() {
        let m = ModelSpec::me(1.0, 2.0, T, 0.02).unwrap();
        let dig = MeDigital::new(&m, 0.75).unwrap();
        let s = dig.s0_star();
        assert_relative_eq!(dig.price(s), 0.5 * (-0.02 * T).exp(), epsilon = 1e-15);
        assert!(matches!(dig.delta(s), Err(Error::UndefinedAtJump { .. })));
        assert!(matches!(dig.gamma(s), Err(Error::UndefinedAtJump { .. })));
        assert!(dig.geometry(s).at_jump());

        let r = me_ref();
        let dig = MeDigital::new(&r, 0.75).unwrap();
        assert!((dig.s0_star() - 0.729_253_476_514_668_4).abs() < 1e-12);
        let (left, right) = dig.delta_limits();
        assert!((right - (-2.375_101_200_541_261)).abs() < 1e-10);
        assert!((left - (-4.750_202_401_082_522)).abs() < 1e-10);
        assert_relative_eq!(left / right, 2.0, epsilon = 1e-14);
        // d = 0+ branch of the Gamma
        let (_, g_right) = dig.gamma_limits();
        let s = dig.s0_star();
        assert_relative_eq!(g_right, (12.0 + 12f64.sqrt()) / (2.0 * s * s), epsilon = 1e-12);
    }

    #[test]
    fn laplace_delta_continuous() {
        let m = ModelSpec::me(1.5, 1.5, T, 0.0).unwrap();
        let dig = MeDigital::new(&m, 0.75).unwrap();
        let (l, r) = dig.delta_limits();
        assert_relative_eq!(l, r, epsilon = 1e-14);
        assert!(dig.delta(dig.s0_star()).is_ok());
        assert!(dig.gamma(dig.s0_star()).is_err());
    }

    #[test]
    fn digital_limits_in_spot() {
        let m = ModelSpec::me(1.0, 2.0, T, 0.05).unwrap();
        let dig = MeDigital::new(&m, 0.75).unwrap();
        assert!(dig.price(1e6) < 1e-12);
        assert!((dig.price(1e-9) - (-0.05 * T).exp()).abs() < 1e-12);
    }

    #[test]
    fn gamma_matches_fd_of_delta() {
        let dig = MeDigital::new(&me_ref(), 0.75).unwrap();
        let h = 1e-5;
        let s = 0.80;
        let fd = (dig.delta(s + h).unwrap() - dig.delta(s - h).unwrap()) / (2.0 * h);
        let g = dig.gamma(s).unwrap();
        assert!(((fd - g) / g).abs() < 1e-4);
    }

    #[test]
    fn gamma_signs() {
        let dig = MeDigital::new(&me_ref(), 0.75).unwrap();
        assert!(dig.gamma(0.8).unwrap() > 0.0);
        // lambda_T = 2 sqrt(12) > 1, so (1 - lambda_T) < 0 left of the jump
        assert!(dig.gamma(0.7).unwrap() < 0.0);
        assert!(dig.delta(0.7).unwrap() < 0.0 && dig.delta(0.8).unwrap() < 0.0);
    }

    #[test]
    fn price_strictly_decreasing() {
        let dig = MeDigital::new(&me_ref(), 0.75).unwrap();
        let grid: Vec<f64> = (0..200).map(|i| 0.3 + 0.9 * i as f64 / 199.0).collect();
        for w in grid.windows(2) {
            assert!(dig.price(w[1]) < dig.price(w[0]));
        }
    }

    #[test]
    fn single_precision_model() {
        let m = ModelSpec::<f32>::me(1.0, 2.0, 1.0 / 12.0, 0.0).unwrap();
        let mk = MarketSetup::new(0.75f32, 0.75).unwrap();
        let p = me_digital_price(&m, &mk).unwrap();
        assert!((p - 0.453_698_9).abs() < 1e-5);
    }

    fn random_model() -> impl Strategy<Value = ModelSpec<f64>> {
        prop_oneof![
            (0.2f64..5.0, 0.6f64..5.0, 0.01f64..0.3, -0.05f64..0.1)
                .prop_map(|(e, l, t, r)| ModelSpec::me(e, l, t, r).unwrap()),
            (0.05f64..0.5, 0.05f64..1.0, -0.3f64..0.3, 0.01f64..2.0, -0.05f64..0.1)
                .prop_map(|(s, n, th, t, r)| ModelSpec::vg(VgParams::new(s, n, th).unwrap(), t, r)
                    .unwrap()),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn martingale_identity(m in random_model()) {
            let v = m.cf(Complex::new(0.0, -1.0)).unwrap();
            let target = (m.rate * m.maturity).exp();
            prop_assert!((v.re - target).abs() < 1e-12 && v.im.abs() < 1e-12);
        }

        #[test]
        fn hermitian_symmetry(m in random_model(), u in 0.01f64..500.0) {
            let a = m.cf(Complex::new(u, 0.0)).unwrap();
            let b = m.cf(Complex::new(-u, 0.0)).unwrap();
            prop_assert!((a - b.conj()).norm() < 1e-13);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn price_is_discounted_horizon_cdf(s0 in 0.2f64..2.0, k in 0.2f64..2.0) {
            let m = ModelSpec::me(1.0, 2.0, T, 0.01).unwrap();
            let mk = MarketSetup::new(s0, k).unwrap();
            let law = m.me_horizon_law().unwrap();
            let d = (k / s0).ln() - m.drift();
            let expected = (-0.01 * T).exp() * law.cdf(d);
            prop_assert!((me_digital_price(&m, &mk).unwrap() - expected).abs() < 1e-14);
        }

        #[test]
        fn greeks_match_finite_differences(s0 in 0.4f64..1.2) {
            let dig = MeDigital::new(&me_ref(), 0.75).unwrap();
            prop_assume!((s0 - dig.s0_star()).abs() > 1e-3);
            let h = 1e-6;
            let fd_delta = (dig.price(s0 + h) - dig.price(s0 - h)) / (2.0 * h);
            let delta = dig.delta(s0).unwrap();
            prop_assert!(((fd_delta - delta) / delta).abs() < 1e-5);
            let h = 1e-4;
            let fd_gamma = (dig.price(s0 + h) - 2.0 * dig.price(s0) + dig.price(s0 - h)) / (h * h);
            let gamma = dig.gamma(s0).unwrap();
            prop_assert!(((fd_gamma - gamma) / gamma).abs() < 1e-5, "{} vs {}", fd_gamma, gamma);
        }
    }
}
