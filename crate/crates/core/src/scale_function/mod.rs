//! q-scale functions W^(q) and their derivatives up to order 3.
//!
//! Rational Laplace exponents get the exact exponential-sum form from partial
//! fractions of 1/(ψ − q). Everything else is tabulated by Laplace inversion of the
//! Esscher-tilted transform, W^(q)(x) = e^{Φ(q)x} W_Φ(q)(x).

mod euler;
mod exp_sum;
mod tabulated;

use std::io::Write;

use serde::Serialize;
use serde_json::json;

pub use exp_sum::{ExpSum, Term, CONFLUENT_SEPARATION, WARN_SEPARATION};
pub use tabulated::{Tabulated, INVERSION_TOLERANCE};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::levy_model::LevyModel;

#[derive(Debug, Clone)]
pub enum Representation {
    ExpSum(ExpSum),
    Tabulated(Box<Tabulated>),
}

/// A derivative value together with its accuracy class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub value: f64,
    /// Set for tabulated order-3 values, which carry O(h²) finite-difference error.
    pub degraded: bool,
}

/// Evaluable W^(q) bound to its model.
#[derive(Debug, Clone)]
pub struct ScaleFunction {
    model: LevyModel,
    phi: f64,
    repr: Representation,
    warnings: Vec<String>,
}

impl ScaleFunction {
    /// Exponential-sum form for rational ψ (Erlang, exponential, hyperexponential
    /// claims, or no jumps at all).
    pub fn partial_fractions(model: &LevyModel) -> Result<Self> {
        let es = ExpSum::build(model)?;
        let mut warnings = Vec::new();
        if es.min_separation() <= WARN_SEPARATION {
            warnings.push(format!(
                "near-confluent roots (relative separation {:.3e}); residues are ill-conditioned",
                es.min_separation()
            ));
        }
        Ok(ScaleFunction {
            model: model.clone(),
            phi: model.phi(),
            repr: Representation::ExpSum(es),
            warnings,
        })
    }

    /// Tabulated form on a uniform grid of [0, x_max] with `n_grid` steps.
    pub fn numeric_inversion(model: &LevyModel, x_max: f64, n_grid: usize) -> Result<Self> {
        Self::numeric_inversion_with(model, x_max, n_grid, Execution::default())
    }

    pub fn numeric_inversion_with(
        model: &LevyModel,
        x_max: f64,
        n_grid: usize,
        exec: Execution,
    ) -> Result<Self> {
        if !(x_max.is_finite() && x_max > 0.0) {
            return Err(Error::InvalidParameter {
                name: "x_max".into(),
                reason: format!("must be a positive finite real, got {x_max}"),
            });
        }
        if n_grid < 64 {
            return Err(Error::InvalidParameter {
                name: "n_grid".into(),
                reason: format!("need at least 64 grid steps, got {n_grid}"),
            });
        }
        let tab = Tabulated::build(model, x_max, n_grid, exec)?;
        Ok(ScaleFunction {
            model: model.clone(),
            phi: tab.phi(),
            repr: Representation::Tabulated(Box::new(tab)),
            warnings: Vec::new(),
        })
    }

    /// Exponential sum when ψ is rational, otherwise a table on [0, x_max].
    pub fn for_model(model: &LevyModel, x_max: f64, n_grid: usize) -> Result<Self> {
        if model.is_rational() {
            Self::partial_fractions(model)
        } else {
            Self::numeric_inversion(model, x_max, n_grid)
        }
    }

    pub fn model(&self) -> &LevyModel {
        &self.model
    }

    pub fn q(&self) -> f64 {
        self.model.q()
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn kind(&self) -> &'static str {
        match self.repr {
            Representation::ExpSum(_) => "exp_sum",
            Representation::Tabulated(_) => "tabulated",
        }
    }

    /// Upper end of the evaluable domain (infinite for exponential sums).
    pub fn x_max(&self) -> f64 {
        match &self.repr {
            Representation::ExpSum(_) => f64::INFINITY,
            Representation::Tabulated(t) => t.x_max(),
        }
    }

    /// Smallest positive abscissa at which derivatives are resolved: the grid step for
    /// tables, zero for exponential sums.
    pub fn resolution(&self) -> f64 {
        match &self.repr {
            Representation::ExpSum(_) => 0.0,
            Representation::Tabulated(t) => t.step(),
        }
    }

    /// Whether derivatives of this order are only finite-difference accurate.
    pub fn is_degraded(&self, order: usize) -> bool {
        order == 3 && matches!(self.repr, Representation::Tabulated(_))
    }

    /// W^(q) derivative of the given order at x; zero for x < 0. At x = 0 derivatives
    /// are right limits (the grid step stands in for 0+ on tables).
    pub fn eval(&self, x: f64, order: usize) -> Result<f64> {
        if order > 3 {
            return Err(Error::InvalidOrder(order));
        }
        if x.is_nan() {
            return Err(Error::InvalidParameter {
                name: "x".into(),
                reason: "NaN".into(),
            });
        }
        if x < 0.0 {
            return Ok(0.0);
        }
        if x == 0.0 && order == 0 {
            return Ok(self.w_at_zero());
        }
        match &self.repr {
            Representation::ExpSum(es) => Ok(es.eval_complex(x, order).re),
            Representation::Tabulated(t) => t.eval(x, order),
        }
    }

    /// As [`eval`](Self::eval), with the degraded-accuracy marker attached.
    pub fn evaluate(&self, x: f64, order: usize) -> Result<Evaluation> {
        Ok(Evaluation {
            value: self.eval(x, order)?,
            degraded: self.is_degraded(order),
        })
    }

    pub fn w(&self, x: f64) -> Result<f64> {
        self.eval(x, 0)
    }

    pub fn w1(&self, x: f64) -> Result<f64> {
        self.eval(x, 1)
    }

    /// W^(q)(0), which is 1/d for bounded variation with drift d and 0 otherwise.
    pub fn w_at_zero(&self) -> f64 {
        self.model.bv_drift().map_or(0.0, |d| 1.0 / d)
    }

    /// Write `x,w,w1,w2,w3` rows at 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W, xs: &[f64]) -> Result<()> {
        writeln!(out, "x,w,w1,w2,w3")?;
        for &x in xs {
            write!(out, "{x:.16e}")?;
            for order in 0..=3 {
                write!(out, ",{:.16e}", self.eval(x, order)?)?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Machine-readable description of the representation.
    pub fn describe(&self) -> serde_json::Value {
        let mut doc = json!({
            "representation": self.kind(),
            "family": self.model.family().name(),
            "q": self.q(),
            "phi": self.phi,
            "w0": self.w_at_zero(),
            "warnings": self.warnings,
        });
        match &self.repr {
            Representation::ExpSum(es) => {
                doc["terms"] = json!(es.terms());
                doc["min_root_separation"] = json!(es.min_separation());
            }
            Representation::Tabulated(t) => {
                doc["x_max"] = json!(t.x_max());
                doc["n_grid"] = json!(t.n_grid());
                doc["max_inversion_residual"] = json!(t.max_residual());
                doc["pointwise_below"] = json!(t.direct_below());
                doc["inversion_tolerance"] = json!(INVERSION_TOLERANCE);
                doc["order3_degraded"] = json!(true);
            }
        }
        doc
    }
}
