//! W^(q)(x) = Σ_j D_j e^{θ_j x} for rational Laplace exponents.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::levy_model::LevyModel;
use crate::poly::{min_relative_separation, Poly};

/// Roots closer than this (relative) are treated as a double root.
pub const CONFLUENT_SEPARATION: f64 = 1e-8;
/// Roots closer than this (relative) make the residues ill-conditioned.
pub const WARN_SEPARATION: f64 = 1e-4;

/// One exponential term D e^{θx}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    #[serde(serialize_with = "ser_complex")]
    pub theta: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub residue: Complex64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpSum {
    pub(crate) terms: Vec<Term>,
    pub(crate) min_separation: f64,
}

impl ExpSum {
    /// Residues D_j = Q(θ_j) / (lead(N) ∏_{k≠j} (θ_j − θ_k)) of Q/N at the roots of N.
    pub(crate) fn build(model: &LevyModel) -> Result<Self> {
        let (num, den) = model
            .rational_form()
            .ok_or_else(|| Error::NonRational(model.family().to_string()))?;
        Self::from_rational(&num, &den)
    }

    pub(crate) fn from_rational(num: &Poly, den: &Poly) -> Result<Self> {
        let roots = num.roots();
        let separation = if roots.len() > 1 {
            min_relative_separation(&roots)
        } else {
            f64::INFINITY
        };
        if separation <= CONFLUENT_SEPARATION {
            return Err(Error::ConfluentRoots { separation });
        }
        let lead = num.leading();
        let terms = roots
            .iter()
            .enumerate()
            .map(|(j, &theta)| {
                let prod = roots
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .fold(Complex64::new(lead, 0.0), |acc, (_, &r)| acc * (theta - r));
                Term {
                    theta,
                    residue: den.eval_complex(theta) / prod,
                }
            })
            .collect();
        Ok(ExpSum {
            terms,
            min_separation: separation,
        })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Smallest relative distance between two roots.
    pub fn min_separation(&self) -> f64 {
        self.min_separation
    }

    /// Σ D_j θ_j^order e^{θ_j x} before discarding the imaginary part.
    pub fn eval_complex(&self, x: f64, order: usize) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.residue * t.theta.powu(order as u32) * (t.theta * x).exp())
            .sum()
    }

    /// The real root with the largest real part, which is Φ(q).
    pub fn leading_root(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.theta.im == 0.0)
            .map(|t| t.theta.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}
