//! Mixture-exponential (two-sided exponential) law and the gamma variates
//! used to simulate VG increments.
//!
//! ME(mu, eta, lambda) has density `eta/2 exp(eta (x - mu))` left of `mu` and
//! `lambda/2 exp(-lambda (x - mu))` from `mu` on. The Laplace law is the case
//! `eta == lambda`; otherwise the density jumps at `mu`.

use num_complex::Complex;
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Identity of the uniform generator behind every [`RngStream`].
pub const GENERATOR_ID: &str = "ChaCha20 (rand_chacha 0.9), seed_from_u64 + set_stream";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeParams<T> {
    pub mu: T,
    pub eta: T,
    pub lambda: T,
}

impl<T: Scalar> MeParams<T> {
    pub fn new(mu: T, eta: T, lambda: T) -> Result<Self> {
        if !mu.is_finite() {
            return Err(invalid("mu", format!("must be finite, got {mu}")));
        }
        if !(eta > T::zero() && eta.is_finite()) {
            return Err(invalid("eta", format!("must be positive, got {eta}")));
        }
        if !(lambda > T::zero() && lambda.is_finite()) {
            return Err(invalid("lambda", format!("must be positive, got {lambda}")));
        }
        Ok(Self { mu, eta, lambda })
    }

    /// Density; right-continuous at `mu`, where it takes the value `lambda / 2`.
    pub fn pdf(&self, x: T) -> T {
        let half = T::lit(0.5);
        if x < self.mu {
            half * self.eta * (self.eta * (x - self.mu)).exp()
        } else {
            half * self.lambda * (-self.lambda * (x - self.mu)).exp()
        }
    }

    pub fn cdf(&self, x: T) -> T {
        let half = T::lit(0.5);
        if x <= self.mu {
            half * (self.eta * (x - self.mu)).exp()
        } else {
            T::one() - half * (-self.lambda * (x - self.mu)).exp()
        }
    }

    /// Inverse cdf. The lambda branch covers `0.5 <= y < 1`, so `quantile(0.5) == mu`.
    pub fn quantile(&self, y: T) -> Result<T> {
        if !(y > T::zero() && y < T::one()) {
            return Err(Error::QuantileLevel(y.as_f64()));
        }
        let two = T::lit(2.0);
        if y < T::lit(0.5) {
            Ok((two * y).ln() / self.eta + self.mu)
        } else {
            Ok(-(two * (T::one() - y)).ln() / self.lambda + self.mu)
        }
    }

    pub fn mean(&self) -> T {
        self.mu + T::lit(0.5) * (self.lambda.recip() - self.eta.recip())
    }

    /// Open interval of `Im(u)` on which the characteristic function is finite.
    ///
    /// `E[exp(-Im(u) X)]` needs `-lambda < Im(u) < eta`.
    pub fn strip(&self) -> (T, T) {
        (-self.lambda, self.eta)
    }

    /// Characteristic function `E[exp(iuX)]`, extended into the complex strip.
    pub fn cf(&self, u: Complex<T>) -> Result<Complex<T>> {
        let (lower, upper) = self.strip();
        if !(u.im > lower && u.im < upper) {
            return Err(Error::OutsideStrip {
                im: u.im.as_f64(),
                lower: lower.as_f64(),
                upper: upper.as_f64(),
            });
        }
        Ok(self.cf_unchecked(u))
    }

    #[inline]
    pub(crate) fn cf_unchecked(&self, u: Complex<T>) -> Complex<T> {
        let i = Complex::<T>::i();
        let iu = i * u;
        let lam = Complex::from(self.lambda);
        let eta = Complex::from(self.eta);
        (iu * self.mu).exp() * T::lit(0.5) * (lam / (lam - iu) + eta / (iu + eta))
    }

    /// `n` draws by inverse transform of open-interval uniforms.
    pub fn sample(&self, rng: &RngStream, n: usize) -> Vec<T> {
        let mut gen = rng.generator();
        self.sample_with(&mut gen, n)
    }

    pub(crate) fn sample_with<R: Rng>(&self, gen: &mut R, n: usize) -> Vec<T> {
        (0..n)
            .map(|_| {
                let y: f64 = gen.sample(Open01);
                // y in (0, 1) so the quantile is defined
                self.quantile(T::lit(y)).unwrap_or(self.mu)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams<T> {
    pub shape: T,
    pub scale: T,
}

impl<T: Scalar> GammaParams<T> {
    pub fn new(shape: T, scale: T) -> Result<Self> {
        if !(shape > T::zero() && shape.is_finite()) {
            return Err(invalid("shape", format!("must be positive, got {shape}")));
        }
        if !(scale > T::zero() && scale.is_finite()) {
            return Err(invalid("scale", format!("must be positive, got {scale}")));
        }
        Ok(Self { shape, scale })
    }

    pub fn mean(&self) -> T {
        self.shape * self.scale
    }

    pub fn variance(&self) -> T {
        self.shape * self.scale * self.scale
    }

    pub fn sample(&self, rng: &RngStream, n: usize) -> Vec<T> {
        let mut gen = rng.generator();
        self.sample_with(&mut gen, n)
    }

    pub(crate) fn sample_with<R: Rng>(&self, gen: &mut R, n: usize) -> Vec<T> {
        let shape = self.shape.as_f64();
        let scale = self.scale.as_f64();
        (0..n)
            .map(|_| T::lit(standard_gamma(gen, shape) * scale))
            .collect()
    }
}

/// Marsaglia-Tsang squeeze/rejection for shape >= 1; shapes below one are
/// boosted to `shape + 1` and scaled by `U^(1/shape)` (in log space).
fn standard_gamma<R: Rng>(gen: &mut R, shape: f64) -> f64 {
    if shape < 1.0 {
        let boosted = standard_gamma(gen, shape + 1.0);
        let u: f64 = gen.sample(Open01);
        return (boosted.ln() + u.ln() / shape).exp();
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = gen.sample(StandardNormal);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = gen.sample(Open01);
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Reproducible random stream: the same `(seed, stream)` pair always yields
/// the same variates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn generator(&self) -> ChaCha20Rng {
        let mut gen = ChaCha20Rng::seed_from_u64(self.seed);
        gen.set_stream(self.stream);
        gen
    }

    /// Child stream for block `index`, used to split work across workers.
    pub fn substream(&self, index: u64) -> Self {
        Self {
            seed: self.seed,
            stream: self
                .stream
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add(index.wrapping_add(1)),
        }
    }
}
