//! Spectrally negative Lévy risk models.
//!
//! A model is the triplet (γ, σ, ν) together with the discount rate q. The surplus
//! process drifts up at rate γ (compensated at y = 1), diffuses with volatility σ and
//! jumps down according to ν(dy) = μ(y) dy. Cramér–Lundberg style models can be built
//! from the premium rate c instead, with γ = c − ∫_(0,1) y ν(dy).

mod catalogue;
mod density;
mod file;

pub use catalogue::{preset, preset_names};
pub use density::{CustomDensity, Family, LevyDensity, Monotonicity};
pub use file::ModelFile;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::poly::Poly;

/// Immutable spectrally negative Lévy model with its discount rate.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyModel {
    gamma: f64,
    sigma: f64,
    density: LevyDensity,
    q: f64,
    /// ∫_(0,1) y ν(dy); infinite for unbounded-variation jump parts.
    small_jump_mean: f64,
    tempered_far_mean: f64,
}

impl LevyModel {
    /// Build from the Lévy triplet (γ, σ, ν) and the discount rate q.
    pub fn from_triplet(gamma: f64, sigma: f64, density: LevyDensity, q: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(invalid("gamma", "must be finite"));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(invalid("sigma", "must be a nonnegative real"));
        }
        if !(q.is_finite() && q > 0.0) {
            return Err(invalid("q", "discount rate must be strictly positive"));
        }
        density.validate()?;
        let small_jump_mean = density.small_jump_mean()?;
        let tempered_far_mean = density.tempered_far_mean()?;
        let model = LevyModel {
            gamma,
            sigma,
            density,
            q,
            small_jump_mean,
            tempered_far_mean,
        };
        model.reject_monotone_paths()?;
        if let LevyDensity::Custom(_) = model.density {
            model.check_integrability()?;
            model.check_convexity_grid()?;
        }
        Ok(model)
    }

    /// Build from the premium rate c: γ = c − ∫_(0,1) y ν(dy).
    pub fn cramer_lundberg(c: f64, sigma: f64, density: LevyDensity, q: f64) -> Result<Self> {
        density.validate()?;
        let m = density.small_jump_mean()?;
        if !m.is_finite() {
            return Err(invalid(
                "c",
                "a premium rate needs ∫(0,1) y ν(dy) < ∞; give gamma instead",
            ));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(invalid("c", "premium rate must be strictly positive"));
        }
        Self::from_triplet(c - m, sigma, density, q)
    }

    fn reject_monotone_paths(&self) -> Result<()> {
        if self.sigma > 0.0 {
            return Ok(());
        }
        if let LevyDensity::None = self.density {
            return Err(Error::MonotonePaths(
                "no Gaussian part and no jumps: the process is a pure drift".into(),
            ));
        }
        if self.is_bounded_variation() {
            let d = self.gamma + self.small_jump_mean;
            if !(d > 0.0) {
                return Err(Error::MonotonePaths(format!(
                    "bounded variation with drift {d} ≤ 0: the process is a decreasing subordinator"
                )));
            }
        }
        Ok(())
    }

    fn check_integrability(&self) -> Result<()> {
        let near = self.density.moment(2, 0.0, 1.0)?;
        let far = self.density.tail(1.0);
        if !(near.is_finite() && far.is_finite()) {
            return Err(invalid("custom", "∫(1 ∧ y²) ν(dy) is not finite"));
        }
        Ok(())
    }

    fn check_convexity_grid(&self) -> Result<()> {
        let h = 0.05;
        let vals: Vec<f64> = (0..=60).map(|k| self.psi_real(k as f64 * h)).collect();
        for (k, w) in vals.windows(3).enumerate() {
            let second = w[0] - 2.0 * w[1] + w[2];
            if !(second > -1e-12 * (w[1].abs() + 1.0)) {
                return Err(invalid(
                    "custom",
                    format!("Laplace exponent fails convexity near θ = {}", (k + 1) as f64 * h),
                ));
            }
        }
        Ok(())
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn density(&self) -> &LevyDensity {
        &self.density
    }

    pub fn family(&self) -> Family {
        self.density.family()
    }

    /// ∫_(0,1) y ν(dy), possibly infinite.
    pub fn small_jump_mean(&self) -> f64 {
        self.small_jump_mean
    }

    /// Premium rate c = γ + ∫_(0,1) y ν(dy) when the small jumps have finite mean.
    pub fn premium(&self) -> Option<f64> {
        self.small_jump_mean
            .is_finite()
            .then_some(self.gamma + self.small_jump_mean)
    }

    pub fn is_bounded_variation(&self) -> bool {
        self.sigma == 0.0 && self.small_jump_mean.is_finite()
    }

    pub fn is_finite_activity(&self) -> bool {
        self.density.is_finite_activity()
    }

    /// Drift of a bounded-variation model, `None` otherwise.
    pub fn bv_drift(&self) -> Option<f64> {
        self.is_bounded_variation()
            .then_some(self.gamma + self.small_jump_mean)
    }

    /// Copy of the model with a different discount rate.
    pub fn with_q(&self, q: f64) -> Result<Self> {
        Self::from_triplet(self.gamma, self.sigma, self.density.clone(), q)
    }

    /// Copy of the model with a different Gaussian coefficient, keeping γ.
    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::from_triplet(self.gamma, sigma, self.density.clone(), self.q)
    }

    /// ψ(θ) = log E e^{θ X_1} for θ ≥ 0.
    pub fn laplace_exponent(&self, theta: f64) -> Result<f64> {
        if !(theta >= 0.0) {
            return Err(Error::NegativeArgument(theta));
        }
        let v = self.psi_real(theta);
        if !v.is_finite() {
            return Err(invalid(
                "density",
                format!("jump integral failed to converge at θ = {theta}"),
            ));
        }
        Ok(v)
    }

    pub(crate) fn psi_real(&self, theta: f64) -> f64 {
        self.psi(Complex64::new(theta, 0.0)).re
    }

    /// ψ continued analytically to Re s ≥ 0.
    pub fn psi(&self, s: Complex64) -> Complex64 {
        if s.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let gauss = s * s * (0.5 * self.sigma * self.sigma);
        if self.density.is_claim_family() {
            let rate = self.density.total_rate().unwrap_or(0.0);
            let c = self.gamma + self.small_jump_mean;
            s * c + gauss + (self.density.claim_transform(s) - 1.0) * rate
        } else {
            s * self.gamma + gauss + self.density.levy_jump_exponent(s, self.tempered_far_mean)
        }
    }

    /// ψ′(θ) by complex-step differentiation, exact to rounding for analytic ψ.
    pub fn psi_derivative(&self, theta: f64) -> f64 {
        let h = 1e-20 * theta.max(1e-3);
        self.psi(Complex64::new(theta, h)).im / h
    }

    /// Φ(q) for the model's own discount rate.
    pub fn phi(&self) -> f64 {
        self.phi_at(self.q).expect("model discount rate is positive")
    }

    /// Φ(q) = sup{θ ≥ 0 : ψ(θ) = q}: geometric bracketing, bisection, Newton polish.
    pub fn phi_at(&self, q: f64) -> Result<f64> {
        if !(q > 0.0) {
            return Err(Error::NonPositiveArgument(q));
        }
        let mut hi = 1.0;
        while self.psi_real(hi) <= q {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(invalid("model", "ψ does not exceed q"));
            }
        }
        // ψ(0) = 0 < q and ψ is convex, so ψ - q has one sign change on (0, ∞).
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.psi_real(mid) > q {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-13 * hi {
                break;
            }
        }
        let mut theta = 0.5 * (lo + hi);
        for _ in 0..4 {
            let f = self.psi_real(theta) - q;
            let d = self.psi_derivative(theta);
            if !(d > 0.0) {
                break;
            }
            let next = theta - f / d;
            if !(next >= lo && next <= hi) {
                break;
            }
            if (next - theta).abs() <= 1e-16 * theta {
                theta = next;
                break;
            }
            theta = next;
        }
        Ok(theta)
    }

    /// ν(x, ∞) for x > 0.
    pub fn levy_tail(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::NonPositiveArgument(x));
        }
        Ok(self.density.tail(x))
    }

    /// Numerator and denominator of (ψ(u) − q)·Q(u) = N(u) when the claim transform is
    /// rational with denominator Q, so that 1/(ψ(u) − q) = Q(u)/N(u).
    pub(crate) fn rational_form(&self) -> Option<(Poly, Poly)> {
        let sig2 = 0.5 * self.sigma * self.sigma;
        // λ L(u) = P(u)/Q(u)
        let (p, q_den, rate) = match &self.density {
            LevyDensity::None => (Poly::constant(0.0), Poly::constant(1.0), 0.0),
            LevyDensity::Exponential { rate, beta } => {
                (Poly::constant(rate * beta), Poly::linear(*beta), *rate)
            }
            LevyDensity::Erlang { rate, shape, alpha } => (
                Poly::constant(rate * alpha.powi(*shape as i32)),
                Poly::linear(*alpha).pow(*shape),
                *rate,
            ),
            LevyDensity::Hyperexponential {
                rate,
                weights,
                betas,
            } => {
                let q_den = betas
                    .iter()
                    .fold(Poly::constant(1.0), |acc, b| acc.mul(&Poly::linear(*b)));
                let mut p = Poly::constant(0.0);
                for (j, (w, b)) in weights.iter().zip(betas).enumerate() {
                    let others = betas
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != j)
                        .fold(Poly::constant(rate * w * b), |acc, (_, bk)| {
                            acc.mul(&Poly::linear(*bk))
                        });
                    p = p.add(&others);
                }
                (p, q_den, *rate)
            }
            _ => return None,
        };
        let c = self.gamma + self.small_jump_mean;
        let outer = Poly::new(vec![-rate - self.q, c, sig2]);
        Some((outer.mul(&q_den).add(&p), q_den))
    }

    pub fn is_rational(&self) -> bool {
        self.rational_form().is_some()
    }
}
