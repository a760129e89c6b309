//! Lévy densities of the jump measure, entering the surplus process with a negative sign.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_li};

use crate::error::{invalid, Result};
use crate::quadrature::{integrate, integrate_to_infinity, integrate_with_breaks, QuadOptions};

const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

/// Family tag, serialised in model files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    None,
    Erlang,
    Exponential,
    Hyperexponential,
    Pareto,
    Weibull,
    Stable,
    TemperedStable,
    GammaProcess,
    InverseGaussian,
    Custom,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::None => "none",
            Family::Erlang => "erlang",
            Family::Exponential => "exponential",
            Family::Hyperexponential => "hyperexponential",
            Family::Pareto => "pareto",
            Family::Weibull => "weibull",
            Family::Stable => "stable",
            Family::TemperedStable => "tempered_stable",
            Family::GammaProcess => "gamma_process",
            Family::InverseGaussian => "inverse_gaussian",
            Family::Custom => "custom",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Whether the density is completely monotone, and how that is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "source", content = "value")]
pub enum Monotonicity {
    /// Known from the closed form of the family.
    Analytic(bool),
    /// Declared by the user for a custom density; never verified.
    Asserted(bool),
}

impl Monotonicity {
    pub fn holds(self) -> bool {
        match self {
            Monotonicity::Analytic(b) | Monotonicity::Asserted(b) => b,
        }
    }
}

/// Tabulated jump density: linear interpolation on `x`, constant below the first node
/// and a power-law tail `mu_n (y / x_n)^{-tail_exponent}` beyond the last one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomDensity {
    pub x: Vec<f64>,
    pub mu: Vec<f64>,
    pub tail_exponent: f64,
    #[serde(default)]
    pub completely_monotone: bool,
}

impl CustomDensity {
    fn validate(&self) -> Result<()> {
        if self.x.len() < 2 || self.x.len() != self.mu.len() {
            return Err(invalid("custom.x", "need at least two nodes and one value per node"));
        }
        if !(self.x[0] > 0.0) || self.x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("custom.x", "nodes must be positive and strictly increasing"));
        }
        if self.mu.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(invalid("custom.mu", "density values must be finite and nonnegative"));
        }
        if !(self.tail_exponent > 1.0) {
            return Err(invalid("custom.tail_exponent", "must exceed 1 for an integrable tail"));
        }
        if self.mu.iter().all(|m| *m == 0.0) {
            return Err(invalid("custom.mu", "density is identically zero"));
        }
        Ok(())
    }

    fn last(&self) -> (f64, f64) {
        (*self.x.last().unwrap(), *self.mu.last().unwrap())
    }

    fn eval(&self, y: f64) -> f64 {
        if y <= self.x[0] {
            return self.mu[0];
        }
        let (xn, mn) = self.last();
        if y >= xn {
            return mn * (y / xn).powf(-self.tail_exponent);
        }
        let i = self.x.partition_point(|&v| v <= y) - 1;
        let t = (y - self.x[i]) / (self.x[i + 1] - self.x[i]);
        self.mu[i] + t * (self.mu[i + 1] - self.mu[i])
    }

    fn power_tail(&self, y: f64) -> f64 {
        let (xn, mn) = self.last();
        mn * xn / (self.tail_exponent - 1.0) * (y / xn).powf(1.0 - self.tail_exponent)
    }

    fn tail(&self, y: f64) -> f64 {
        let (xn, _) = self.last();
        let mut total = self.power_tail(y.max(xn));
        for i in 0..self.x.len() - 1 {
            let (a, b) = (self.x[i], self.x[i + 1]);
            if b <= y {
                continue;
            }
            let lo = a.max(y);
            total += 0.5 * (self.eval(lo) + self.mu[i + 1]) * (b - lo);
        }
        if y < self.x[0] {
            total += self.mu[0] * (self.x[0] - y);
        }
        total
    }

    /// ∫_0^∞ e^{-s y} μ(y) dy for Re s ≥ 0.
    fn transform(&self, s: Complex64) -> Complex64 {
        let mut total = Complex64::new(self.mu[0] * self.x[0], 0.0) * phi1(s * self.x[0]);
        for i in 0..self.x.len() - 1 {
            let (a, b) = (self.x[i], self.x[i + 1]);
            let h = b - a;
            let z = s * h;
            let seg = phi1(z) * self.mu[i] + phi2(z) * (self.mu[i + 1] - self.mu[i]);
            total += (-s * a).exp() * seg * h;
        }
        let (xn, mn) = self.last();
        let p = self.tail_exponent;
        let tail = if s.norm() == 0.0 {
            Complex64::new(mn * xn / (p - 1.0), 0.0)
        } else {
            let omega = s.conj() / s.norm();
            let scale = s.norm().max(1.0 / xn);
            let g = |v: f64| {
                let tau = v / scale;
                (-s.norm() * tau).exp() * (Complex64::new(1.0, 0.0) + omega * (tau / xn)).powf(-p)
            };
            let q = integrate_to_infinity(g, 0.0, QuadOptions::with_rel_tol(1e-12))
                .map(|q| q.value)
                .unwrap_or_else(|_| Complex64::new(f64::NAN, f64::NAN));
            (-s * xn).exp() * omega * q * (mn / scale)
        };
        total + tail
    }
}

/// (1 - e^{-z}) / z, with its series near the origin.
fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..20 {
            term = term * (-z) / (k as f64 + 1.0);
            sum += term;
        }
        sum
    } else {
        (Complex64::new(1.0, 0.0) - (-z).exp()) / z
    }
}

/// (1 - (1 + z) e^{-z}) / z^2, with its series near the origin.
fn phi2(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        // Σ (-z)^k (k+1)/(k+2)!
        let mut pow = Complex64::new(1.0, 0.0);
        let mut fact = 2.0;
        let mut sum = Complex64::new(0.5, 0.0);
        for k in 1..20 {
            pow *= -z;
            fact *= k as f64 + 2.0;
            sum += pow * ((k as f64 + 1.0) / fact);
        }
        sum
    } else {
        let one = Complex64::new(1.0, 0.0);
        (one - (one + z) * (-z).exp()) / (z * z)
    }
}

/// Density μ of the Lévy measure ν(dy) = μ(y) dy on (0, ∞).
///
/// `rate`/`lambda` is the total jump intensity for the finite-activity families (the
/// claim density is multiplied by it) and the scale of the density otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum LevyDensity {
    /// No jumps (Brownian motion with drift).
    None,
    Exponential { rate: f64, beta: f64 },
    Erlang { rate: f64, shape: u32, alpha: f64 },
    Hyperexponential { rate: f64, weights: Vec<f64>, betas: Vec<f64> },
    Pareto { rate: f64, alpha: f64 },
    Weibull { rate: f64, scale: f64, shape: f64 },
    Stable { lambda: f64, alpha: f64 },
    TemperedStable { lambda: f64, alpha: f64, beta: f64 },
    GammaProcess { lambda: f64, beta: f64 },
    InverseGaussian { lambda: f64, beta: f64 },
    Custom(CustomDensity),
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be a positive finite real, got {v}")))
    }
}

/// Γ(-α) for non-integer α ∈ (-1, 2), via Γ(-α) = Γ(2-α) / (α(α-1)).
fn gamma_neg(alpha: f64) -> f64 {
    if alpha < 0.0 {
        gamma(-alpha)
    } else {
        gamma(2.0 - alpha) / (alpha * (alpha - 1.0))
    }
}

impl LevyDensity {
    pub fn validate(&self) -> Result<()> {
        match self {
            LevyDensity::None => Ok(()),
            LevyDensity::Exponential { rate, beta } => {
                positive("lambda", *rate)?;
                positive("beta", *beta)
            }
            LevyDensity::Erlang { rate, shape, alpha } => {
                positive("lambda", *rate)?;
                positive("alpha", *alpha)?;
                if *shape == 0 {
                    return Err(invalid("shape", "must be at least 1"));
                }
                Ok(())
            }
            LevyDensity::Hyperexponential {
                rate,
                weights,
                betas,
            } => {
                positive("lambda", *rate)?;
                if weights.is_empty() || weights.len() != betas.len() {
                    return Err(invalid("weights", "need one weight per rate, at least one"));
                }
                for (w, b) in weights.iter().zip(betas) {
                    positive("weight", *w)?;
                    positive("beta", *b)?;
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(invalid("weights", format!("must sum to 1, got {total}")));
                }
                Ok(())
            }
            LevyDensity::Pareto { rate, alpha } => {
                positive("lambda", *rate)?;
                positive("alpha", *alpha)
            }
            LevyDensity::Weibull { rate, scale, shape } => {
                positive("lambda", *rate)?;
                positive("c", *scale)?;
                positive("r", *shape)
            }
            LevyDensity::Stable { lambda, alpha } => {
                positive("lambda", *lambda)?;
                if !(*alpha > 0.0 && *alpha < 2.0) {
                    return Err(invalid("alpha", "stable index must lie in (0, 2)"));
                }
                Ok(())
            }
            LevyDensity::TemperedStable {
                lambda,
                alpha,
                beta,
            } => {
                positive("lambda", *lambda)?;
                positive("beta", *beta)?;
                if !(*alpha >= -1.0 && *alpha < 2.0) {
                    return Err(invalid("alpha", "tempered stable index must lie in [-1, 2)"));
                }
                Ok(())
            }
            LevyDensity::GammaProcess { lambda, beta }
            | LevyDensity::InverseGaussian { lambda, beta } => {
                positive("lambda", *lambda)?;
                positive("beta", *beta)
            }
            LevyDensity::Custom(c) => c.validate(),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            LevyDensity::None => Family::None,
            LevyDensity::Exponential { .. } => Family::Exponential,
            LevyDensity::Erlang { .. } => Family::Erlang,
            LevyDensity::Hyperexponential { .. } => Family::Hyperexponential,
            LevyDensity::Pareto { .. } => Family::Pareto,
            LevyDensity::Weibull { .. } => Family::Weibull,
            LevyDensity::Stable { .. } => Family::Stable,
            LevyDensity::TemperedStable { .. } => Family::TemperedStable,
            LevyDensity::GammaProcess { .. } => Family::GammaProcess,
            LevyDensity::InverseGaussian { .. } => Family::InverseGaussian,
            LevyDensity::Custom(_) => Family::Custom,
        }
    }

    /// Tempered-stable view `(λ, α, β)` of the gamma and inverse Gaussian families.
    fn tempered(&self) -> Option<(f64, f64, f64)> {
        match *self {
            LevyDensity::TemperedStable {
                lambda,
                alpha,
                beta,
            } => Some((lambda, alpha, beta)),
            LevyDensity::GammaProcess { lambda, beta } => Some((lambda, 0.0, beta)),
            LevyDensity::InverseGaussian { lambda, beta } => Some((lambda, 0.5, beta)),
            _ => None,
        }
    }

    /// Families whose jumps are a compound Poisson stream of claims with a known density.
    pub(crate) fn is_claim_family(&self) -> bool {
        matches!(
            self,
            LevyDensity::Exponential { .. }
                | LevyDensity::Erlang { .. }
                | LevyDensity::Hyperexponential { .. }
                | LevyDensity::Pareto { .. }
                | LevyDensity::Weibull { .. }
                | LevyDensity::Custom(_)
        )
    }

    pub fn completely_monotone(&self) -> Monotonicity {
        match self {
            LevyDensity::None => Monotonicity::Analytic(true),
            LevyDensity::Erlang { shape, .. } => Monotonicity::Analytic(*shape == 1),
            LevyDensity::Weibull { shape, .. } => Monotonicity::Analytic(*shape <= 1.0),
            LevyDensity::Custom(c) => Monotonicity::Asserted(c.completely_monotone),
            _ => Monotonicity::Analytic(true),
        }
    }

    /// μ(y) for y > 0.
    pub fn density(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match self {
            LevyDensity::None => 0.0,
            LevyDensity::Exponential { rate, beta } => rate * beta * (-beta * y).exp(),
            LevyDensity::Erlang { rate, shape, alpha } => {
                let n = *shape as f64;
                rate * alpha.powf(n) * y.powf(n - 1.0) * (-alpha * y).exp() / gamma(n)
            }
            LevyDensity::Hyperexponential {
                rate,
                weights,
                betas,
            } => {
                rate * weights
                    .iter()
                    .zip(betas)
                    .map(|(w, b)| w * b * (-b * y).exp())
                    .sum::<f64>()
            }
            LevyDensity::Pareto { rate, alpha } => rate * alpha * (1.0 + y).powf(-alpha - 1.0),
            LevyDensity::Weibull { rate, scale, shape } => {
                rate * scale * shape * y.powf(shape - 1.0) * (-scale * y.powf(*shape)).exp()
            }
            LevyDensity::Stable { lambda, alpha } => lambda * y.powf(-1.0 - alpha),
            LevyDensity::Custom(c) => c.eval(y),
            _ => {
                let (lambda, alpha, beta) = self.tempered().unwrap();
                lambda * y.powf(-1.0 - alpha) * (-beta * y).exp()
            }
        }
    }

    /// Total mass ν(0, ∞) when finite.
    pub fn total_rate(&self) -> Option<f64> {
        match self {
            LevyDensity::None => Some(0.0),
            LevyDensity::Exponential { rate, .. }
            | LevyDensity::Erlang { rate, .. }
            | LevyDensity::Hyperexponential { rate, .. }
            | LevyDensity::Pareto { rate, .. }
            | LevyDensity::Weibull { rate, .. } => Some(*rate),
            LevyDensity::Custom(c) => Some(c.tail(0.0)),
            LevyDensity::Stable { .. } => None,
            _ => {
                let (lambda, alpha, beta) = self.tempered().unwrap();
                (alpha < 0.0).then(|| lambda * gamma(-alpha) * beta.powf(alpha))
            }
        }
    }

    pub fn is_finite_activity(&self) -> bool {
        self.total_rate().is_some()
    }

    /// ν(x, ∞) for x > 0.
    pub fn tail(&self, x: f64) -> f64 {
        match self {
            LevyDensity::None => 0.0,
            LevyDensity::Exponential { rate, beta } => rate * (-beta * x).exp(),
            LevyDensity::Erlang { rate, shape, alpha } => {
                // λ e^{-αx} Σ_{k<n} (αx)^k / k!
                let ax = alpha * x;
                let mut term = 1.0;
                let mut sum = 1.0;
                for k in 1..*shape {
                    term *= ax / k as f64;
                    sum += term;
                }
                rate * (-ax).exp() * sum
            }
            LevyDensity::Hyperexponential {
                rate,
                weights,
                betas,
            } => {
                rate * weights
                    .iter()
                    .zip(betas)
                    .map(|(w, b)| w * (-b * x).exp())
                    .sum::<f64>()
            }
            LevyDensity::Pareto { rate, alpha } => rate * (1.0 + x).powf(-alpha),
            LevyDensity::Weibull { rate, scale, shape } => rate * (-scale * x.powf(*shape)).exp(),
            LevyDensity::Stable { lambda, alpha } => lambda * x.powf(-alpha) / alpha,
            LevyDensity::Custom(c) => c.tail(x),
            _ => integrate_to_infinity(|y| self.density(y), x, QuadOptions::with_rel_tol(1e-12))
                .map(|q| q.value)
                .unwrap_or(f64::NAN),
        }
    }

    /// ∫_a^b y^k μ(y) dy with 0 ≤ a < b ≤ ∞. Returns infinity when the integral diverges
    /// at the origin.
    pub fn moment(&self, k: i32, a: f64, b: f64) -> Result<f64> {
        if !(b > a) {
            return Ok(0.0);
        }
        if let LevyDensity::None = self {
            return Ok(0.0);
        }
        if let LevyDensity::Stable { lambda, alpha } = *self {
            let p = k as f64 - alpha;
            if a == 0.0 && p <= 0.0 {
                return Ok(f64::INFINITY);
            }
            if b.is_infinite() && p >= 0.0 {
                return Ok(f64::INFINITY);
            }
            return Ok(if p == 0.0 {
                lambda * (b / a).ln()
            } else {
                lambda * (b.powf(p) - a.powf(p)) / p
            });
        }
        if let Some((lambda, alpha, beta)) = self.tempered() {
            if a == 0.0 {
                let p = k as f64 - alpha;
                if p <= 0.0 {
                    return Ok(f64::INFINITY);
                }
                if b.is_finite() {
                    return Ok(lambda * beta.powf(-p) * gamma_li(p, beta * b));
                }
                return Ok(lambda * beta.powf(-p) * gamma(p));
            }
        }
        let f = |y: f64| y.powi(k) * self.density(y);
        let opts = QuadOptions::with_rel_tol(1e-12);
        let q = if b.is_infinite() {
            integrate_to_infinity(f, a, opts)?
        } else if a == 0.0 {
            // Weibull-type integrable singularities at the origin converge faster with
            // geometrically graded breaks.
            let mut pts = vec![0.0];
            let mut t = b * 1e-8;
            while t < b {
                pts.push(t);
                t *= 10.0;
            }
            pts.push(b);
            integrate_with_breaks(f, &pts, opts)?
        } else {
            integrate(f, a, b, opts)?
        };
        Ok(q.value)
    }

    /// ∫_0^1 y μ(y) dy, finite exactly for bounded-variation jump parts.
    pub fn small_jump_mean(&self) -> Result<f64> {
        self.moment(1, 0.0, 1.0)
    }

    /// ∫_0^∞ e^{-s y} μ(y) dy / λ for the claim families (Re s ≥ 0).
    pub(crate) fn claim_transform(&self, s: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        if s.norm() == 0.0 {
            return one;
        }
        match self {
            LevyDensity::Exponential { beta, .. } => *beta / (s + beta),
            LevyDensity::Erlang { shape, alpha, .. } => (*alpha / (s + alpha)).powu(*shape),
            LevyDensity::Hyperexponential { weights, betas, .. } => weights
                .iter()
                .zip(betas)
                .map(|(w, b)| w * b / (s + b))
                .sum(),
            LevyDensity::Pareto { alpha, .. } => {
                // Rotate the integration ray so that e^{-s y} stops oscillating.
                let m = s.norm();
                let omega = s.conj() / m;
                let scale = m.max(1.0);
                let g = |v: f64| {
                    let tau = v / scale;
                    (-m * tau).exp() * (one + omega * tau).powf(-alpha - 1.0)
                };
                let q = integrate_to_infinity(g, 0.0, QuadOptions::with_rel_tol(1e-12));
                match q {
                    Ok(q) => omega * q.value * (*alpha / scale),
                    Err(_) => Complex64::new(f64::NAN, f64::NAN),
                }
            }
            LevyDensity::Weibull { scale, shape, .. } => {
                // y = τ ω, u = τ^r:  ∫ c ω^r e^{-c ω^r u} e^{-|s| u^{1/r}} du
                let m = s.norm();
                let omega = s.conj() / m;
                let wr = omega.powf(*shape);
                let kappa = m.powf(*shape).max(*scale);
                let g = |v: f64| {
                    let u = v / kappa;
                    (-wr * (scale * u)).exp() * (-m * u.powf(1.0 / shape)).exp()
                };
                let q = integrate_to_infinity(g, 0.0, QuadOptions::with_rel_tol(1e-12));
                match q {
                    Ok(q) => wr * q.value * (*scale / kappa),
                    Err(_) => Complex64::new(f64::NAN, f64::NAN),
                }
            }
            LevyDensity::Custom(c) => c.transform(s) / c.tail(0.0),
            _ => unreachable!("claim transform requested for a non-claim family"),
        }
    }

    /// Jump part of the Laplace exponent, ∫ (e^{-s y} - 1 + s y 1{y<1}) μ(y) dy, for the
    /// families that are not claim streams. `tempered_far_mean` must be
    /// ∫_1^∞ y^{-α} e^{-β y} dy for tempered families.
    pub(crate) fn levy_jump_exponent(&self, s: Complex64, tempered_far_mean: f64) -> Complex64 {
        match *self {
            LevyDensity::None => Complex64::new(0.0, 0.0),
            LevyDensity::Stable { lambda, alpha } => {
                let core = if alpha == 1.0 {
                    s * s.ln() + s * (EULER_MASCHERONI - 1.0)
                } else if alpha < 1.0 {
                    s.powf(alpha) * gamma_neg(alpha) + s / (1.0 - alpha)
                } else {
                    s.powf(alpha) * gamma_neg(alpha) - s / (alpha - 1.0)
                };
                core * lambda
            }
            _ => {
                let (lambda, alpha, beta) = self.tempered().expect("tempered family");
                let sb = s + beta;
                // ∫ (e^{-(s+β)y} - e^{-βy} + s y e^{-βy}) y^{-1-α} dy
                let core = if alpha == 0.0 {
                    -(sb / beta).ln() + s / beta
                } else if alpha == 1.0 {
                    sb * (sb / beta).ln() - s
                } else {
                    (sb.powf(alpha) - beta.powf(alpha) - s * (alpha * beta.powf(alpha - 1.0)))
                        * gamma_neg(alpha)
                };
                (core - s * tempered_far_mean) * lambda
            }
        }
    }

    /// ∫_1^∞ y^{-α} e^{-β y} dy for tempered families, zero otherwise.
    pub(crate) fn tempered_far_mean(&self) -> Result<f64> {
        match self.tempered() {
            Some((_, alpha, beta)) => Ok(integrate_to_infinity(
                |y: f64| y.powf(-alpha) * (-beta * y).exp(),
                1.0,
                QuadOptions::with_rel_tol(1e-13),
            )?
            .value),
            None => Ok(0.0),
        }
    }

    /// Draw one claim size from the normalised density of a finite-activity family.
    pub(crate) fn sample_claim<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
        match self {
            LevyDensity::Exponential { beta, .. } => -u.ln() / beta,
            LevyDensity::Erlang { shape, alpha, .. } => {
                let mut prod = u;
                for _ in 1..*shape {
                    prod *= 1.0 - rng.random::<f64>();
                }
                -prod.ln() / alpha
            }
            LevyDensity::Hyperexponential { weights, betas, .. } => {
                let pick: f64 = rng.random();
                let mut acc = 0.0;
                let mut j = weights.len() - 1;
                for (i, w) in weights.iter().enumerate() {
                    acc += w;
                    if pick < acc {
                        j = i;
                        break;
                    }
                }
                -u.ln() / betas[j]
            }
            LevyDensity::Pareto { alpha, .. } => u.powf(-1.0 / alpha) - 1.0,
            LevyDensity::Weibull { scale, shape, .. } => (-u.ln() / scale).powf(1.0 / shape),
            _ => self.invert_tail(u),
        }
    }

    /// Smallest y with ν(y, ∞) ≤ u·ν(0, ∞), by bisection on the tail.
    fn invert_tail(&self, u: f64) -> f64 {
        let total = self.total_rate().expect("finite activity");
        let target = u * total;
        let mut hi = 1.0;
        while self.tail(hi) > target {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let t = if mid == 0.0 { total } else { self.tail(mid) };
            if t > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}
