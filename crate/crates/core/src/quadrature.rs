//! Composite Simpson rule on `[0, upper]` and Gauss-Laguerre rules for `[0, inf)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpsonGrid<T> {
    upper: T,
    points: usize,
}

impl<T: Scalar> SimpsonGrid<T> {
    pub fn new(upper: T, points: usize) -> Result<Self> {
        if !(upper > T::zero() && upper.is_finite()) {
            return Err(invalid("upper", format!("must be positive, got {upper}")));
        }
        if points < 3 || points % 2 == 0 {
            return Err(invalid(
                "points",
                format!("composite Simpson needs an odd count >= 3, got {points}"),
            ));
        }
        Ok(Self { upper, points })
    }

    pub fn upper(&self) -> T {
        self.upper
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> T {
        self.upper / T::from_usize_lossy(self.points - 1)
    }

    pub fn node(&self, i: usize) -> T {
        self.spacing() * T::from_usize_lossy(i)
    }
}

/// Composite Simpson estimate of `\int_0^upper f`, summed left to right.
pub fn simpson_integrate<T: Scalar>(grid: &SimpsonGrid<T>, f: impl Fn(T) -> T) -> Result<T> {
    let h = grid.spacing();
    let last = grid.points - 1;
    let (two, four) = (T::lit(2.0), T::lit(4.0));
    let mut acc = T::zero();
    for i in 0..grid.points {
        let x = h * T::from_usize_lossy(i);
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::NonFiniteIntegrand { node: x.as_f64() });
        }
        let w = if i == 0 || i == last {
            T::one()
        } else if i % 2 == 1 {
            four
        } else {
            two
        };
        acc = acc + w * y;
    }
    Ok(acc * h / T::lit(3.0))
}

/// Gauss-Laguerre rule for `\int_0^inf g(x) dx` with weights pre-multiplied by `e^x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaguerreRule<T> {
    order: usize,
    nodes: Vec<T>,
    modified_weights: Vec<T>,
    log_weights: Vec<f64>,
}

impl<T: Scalar> LaguerreRule<T> {
    pub fn new(order: usize) -> Result<Self> {
        laguerre_rule(order)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// `w_i exp(x_i)`.
    pub fn modified_weights(&self) -> &[T] {
        &self.modified_weights
    }

    /// Plain weights `w_i` for `\int_0^inf e^{-x} f(x) dx`; they underflow to zero at large nodes.
    pub fn plain_weights(&self) -> Vec<T> {
        self.log_weights.iter().map(|&l| T::lit(l.exp())).collect()
    }

    /// `\sum w_i f(x_i)`, i.e. the classical form with the `e^{-x}` weight built in.
    pub fn integrate_weighted(&self, f: impl Fn(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.log_weights)
            .map(|(&x, &lw)| {
                let fx = f(x);
                if fx == T::zero() {
                    return T::zero();
                }
                // combine in log space so tiny weights times huge f do not underflow
                let sign = fx.signum();
                sign * T::lit((lw + fx.abs().as_f64().ln()).exp())
            })
            .fold(T::zero(), |a, b| a + b)
    }
}

/// Double-double value `hi + lo`, enough headroom for the order-2000 recurrence
/// whose plain `f64` evaluation loses about `n^2 eps` near the smallest roots.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn quick(s: f64, e: f64) -> Self {
        let hi = s + e;
        Self { hi, lo: e - (hi - s) }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        Self {
            hi: s,
            lo: (a - (s - bb)) + (b - bb),
        }
    }

    fn split(a: f64) -> (f64, f64) {
        let c = 134_217_729.0 * a;
        let hi = c - (c - a);
        (hi, a - hi)
    }

    fn two_prod(a: f64, b: f64) -> Self {
        let p = a * b;
        let (ah, al) = Self::split(a);
        let (bh, bl) = Self::split(b);
        Self {
            hi: p,
            lo: ((ah * bh - p) + ah * bl + al * bh) + al * bl,
        }
    }

    fn add(self, o: Self) -> Self {
        let s = Self::two_sum(self.hi, o.hi);
        Self::quick(s.hi, s.lo + self.lo + o.lo)
    }

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn mul(self, o: Self) -> Self {
        let p = Self::two_prod(self.hi, o.hi);
        Self::quick(p.hi, p.lo + self.hi * o.lo + self.lo * o.hi)
    }

    fn mul_f64(self, b: f64) -> Self {
        let p = Self::two_prod(self.hi, b);
        Self::quick(p.hi, p.lo + self.lo * b)
    }

    fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self.add(Self::two_prod(q1, b).neg());
        Self::quick(q1, r.hi / b)
    }

    /// Exact scaling by a power of two.
    fn scale(self, f: f64) -> Self {
        Self {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }
}

// 2^500, so rescaling is exact
const BIG: f64 = 3.273_390_607_896_142e150;

/// Scaled three-term recurrence in plain `f64`, good enough for bracketing.
/// Returns `(L_n, L_{n-1}, log_scale)` where the true values are the first two
/// multiplied by `exp(log_scale)`.
fn laguerre_fast(n: usize, x: f64) -> (f64, f64, f64) {
    if n == 0 {
        return (1.0, 0.0, 0.0);
    }
    let mut prev = 1.0;
    let mut cur = 1.0 - x;
    let mut log_scale = 0.0;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
            log_scale += 500.0 * std::f64::consts::LN_2;
        }
    }
    (cur, prev, log_scale)
}

/// Same recurrence in double-double arithmetic.
fn laguerre_scaled(n: usize, x: f64) -> (f64, f64, f64) {
    if n == 0 {
        return (1.0, 0.0, 0.0);
    }
    let mut prev = Dd::new(1.0);
    let mut cur = Dd::two_sum(1.0, -x);
    let mut log_scale = 0.0;
    for k in 1..n {
        let kf = k as f64;
        let coef = Dd::two_sum(2.0 * kf + 1.0, -x);
        let next = coef.mul(cur).add(prev.mul_f64(-kf)).div_f64(kf + 1.0);
        prev = cur;
        cur = next;
        if cur.hi.abs() > BIG {
            cur = cur.scale(1.0 / BIG);
            prev = prev.scale(1.0 / BIG);
            log_scale += 500.0 * std::f64::consts::LN_2;
        }
    }
    (cur.hi + cur.lo, prev.hi + prev.lo, log_scale)
}

/// Nodes are the roots of `L_n`, found left to right: each root is bracketed by
/// stepping from the previous one (Laguerre root spacing grows monotonically),
/// then polished by Newton iteration with a bisection fallback.
pub fn laguerre_rule<T: Scalar>(order: usize) -> Result<LaguerreRule<T>> {
    if order == 0 {
        return Err(invalid("order", "must be at least 1"));
    }
    let n = order;
    let nf = n as f64;
    let value = |x: f64| laguerre_fast(n, x).0;
    let mut roots: Vec<f64> = Vec::with_capacity(n);

    for i in 0..n {
        // sign of L_n just right of the previous root (L_n(0) = 1)
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let prev = roots.last().copied().unwrap_or(0.0);
        let spacing = match roots.len() {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => roots[0],
            k => roots[k - 1] - roots[k - 2],
        };
        let mut step = 0.5 * spacing;
        let (mut lo, mut hi);
        let mut tries = 0;
        loop {
            // the first probe must stay on the sign of the previous root's right side
            let probe = prev + step;
            if value(probe) * sign <= 0.0 {
                step *= 0.5;
                tries += 1;
                if tries > 60 {
                    return Err(Error::RootNotConverged { order: n, index: i });
                }
                continue;
            }
            lo = probe;
            hi = probe + step;
            let mut scans = 0;
            while value(hi) * sign > 0.0 {
                lo = hi;
                hi += step;
                scans += 1;
                if scans > 10_000 {
                    return Err(Error::RootNotConverged { order: n, index: i });
                }
            }
            break;
        }
        let root = polish(n, lo, hi, sign).ok_or(Error::RootNotConverged { order: n, index: i })?;
        roots.push(root);
    }

    let mut nodes = Vec::with_capacity(n);
    let mut modified = Vec::with_capacity(n);
    let mut log_weights = Vec::with_capacity(n);
    for &x in &roots {
        // w = x / (n^2 L_{n-1}(x)^2)
        let (_, lm1, log_scale) = laguerre_scaled(n, x);
        let lw = x.ln() - 2.0 * nf.ln() - 2.0 * (lm1.abs().ln() + log_scale);
        let mw = (lw + x).exp();
        if !(mw.is_finite() && mw > 0.0) {
            return Err(Error::NonFiniteIntegrand { node: x });
        }
        nodes.push(T::lit(x));
        modified.push(T::lit(mw));
        log_weights.push(lw);
    }
    Ok(LaguerreRule {
        order: n,
        nodes,
        modified_weights: modified,
        log_weights,
    })
}

/// Safeguarded Newton on a bracket where `sign * L_n(lo) > 0 >= sign * L_n(hi)`,
/// finished with a few double-double Newton steps.
fn polish(n: usize, mut lo: f64, mut hi: f64, sign: f64) -> Option<f64> {
    let nf = n as f64;
    let mut x = 0.5 * (lo + hi);
    let mut converged = false;
    for _ in 0..200 {
        let (ln, lm1, _) = laguerre_fast(n, x);
        if ln == 0.0 {
            converged = true;
            break;
        }
        if ln * sign > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        // L_n' = n (L_n - L_{n-1}) / x; the common scale cancels in the ratio
        let deriv = nf * (ln - lm1) / x;
        let newton = x - ln / deriv;
        let next = if deriv != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let done = (next - x).abs() <= 4.0 * f64::EPSILON * x || hi - lo <= 4.0 * f64::EPSILON * x;
        x = next;
        if done {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    for _ in 0..4 {
        let (ln, lm1, _) = laguerre_scaled(n, x);
        let deriv = nf * (ln - lm1) / x;
        if ln == 0.0 || deriv == 0.0 {
            break;
        }
        let dx = ln / deriv;
        x -= dx;
        if dx.abs() <= f64::EPSILON * x {
            break;
        }
    }
    Some(x)
}

/// Process-wide cache of double-precision rules; construction at order 2000
/// costs on the order of a second.
pub fn shared_laguerre_rule(order: usize) -> Result<Arc<LaguerreRule<f64>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<LaguerreRule<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&order) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(laguerre_rule::<f64>(order)?);
    cache
        .lock()
        .expect("rule cache poisoned")
        .insert(order, Arc::clone(&rule));
    Ok(rule)
}

/// `\sum modified_weight_i g(node_i)` over ascending nodes.
pub fn laguerre_integrate<T: Scalar>(rule: &LaguerreRule<T>, g: impl Fn(T) -> T) -> Result<T> {
    let mut acc = T::zero();
    for (&x, &w) in rule.nodes.iter().zip(&rule.modified_weights) {
        let y = g(x);
        if !y.is_finite() {
            return Err(Error::NonFiniteIntegrand { node: x.as_f64() });
        }
        acc = acc + w * y;
    }
    Ok(acc)
}
