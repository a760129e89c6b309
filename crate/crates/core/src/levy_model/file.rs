//! JSON model files.
//!
//! ```json
//! {"family": "erlang", "params": {"lambda": 10, "alpha": 1, "shape": 2},
//!  "c": 21.4, "sigma": 2.0, "q": 0.1}
//! ```
//!
//! Exactly one of `c` (premium rate) or `gamma` (linear triplet coefficient) is given.
//! Unknown keys, unknown parameter names and missing parameters are all errors.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CustomDensity, Family, LevyDensity, LevyModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub family: Family,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub sigma: f64,
    pub q: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<CustomDensity>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::ModelFile(msg.into())
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            bad(format!(
                "line {}, column {}: {}",
                e.line(),
                e.column(),
                e
            ))
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| match e {
            Error::ModelFile(m) => bad(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model file serialises")
    }

    fn take_params(&self, required: &[&str], optional: &[&str]) -> Result<BTreeMap<String, f64>> {
        for key in self.params.keys() {
            if !required.contains(&key.as_str()) && !optional.contains(&key.as_str()) {
                return Err(bad(format!(
                    "params.{key}: unknown parameter for family `{}`",
                    self.family
                )));
            }
        }
        for key in required {
            if !self.params.contains_key(*key) {
                return Err(bad(format!(
                    "params.{key}: required for family `{}`",
                    self.family
                )));
            }
        }
        Ok(self.params.clone())
    }

    fn density(&self) -> Result<LevyDensity> {
        if self.family != Family::Custom && self.custom.is_some() {
            return Err(bad("custom: only allowed with family `custom`"));
        }
        let d = match self.family {
            Family::None => {
                self.take_params(&[], &[])?;
                LevyDensity::None
            }
            Family::Exponential => {
                let p = self.take_params(&["lambda", "beta"], &[])?;
                LevyDensity::Exponential {
                    rate: p["lambda"],
                    beta: p["beta"],
                }
            }
            Family::Erlang => {
                let p = self.take_params(&["lambda", "alpha"], &["shape"])?;
                let shape = p.get("shape").copied().unwrap_or(2.0);
                if shape.fract() != 0.0 || !(1.0..=64.0).contains(&shape) {
                    return Err(bad("params.shape: must be an integer in 1..=64"));
                }
                LevyDensity::Erlang {
                    rate: p["lambda"],
                    shape: shape as u32,
                    alpha: p["alpha"],
                }
            }
            Family::Hyperexponential => {
                let mut n = 0;
                while self.params.contains_key(&format!("weight{}", n + 1)) {
                    n += 1;
                }
                let names: Vec<String> = (1..=n)
                    .flat_map(|j| [format!("weight{j}"), format!("beta{j}")])
                    .chain(std::iter::once("lambda".to_string()))
                    .collect();
                let required: Vec<&str> = names.iter().map(String::as_str).collect();
                let p = self.take_params(&required, &[])?;
                if n == 0 {
                    return Err(bad("params.weight1: at least one phase is required"));
                }
                LevyDensity::Hyperexponential {
                    rate: p["lambda"],
                    weights: (1..=n).map(|j| p[&format!("weight{j}")]).collect(),
                    betas: (1..=n).map(|j| p[&format!("beta{j}")]).collect(),
                }
            }
            Family::Pareto => {
                let p = self.take_params(&["lambda", "alpha"], &[])?;
                LevyDensity::Pareto {
                    rate: p["lambda"],
                    alpha: p["alpha"],
                }
            }
            Family::Weibull => {
                let p = self.take_params(&["lambda", "c", "r"], &[])?;
                LevyDensity::Weibull {
                    rate: p["lambda"],
                    scale: p["c"],
                    shape: p["r"],
                }
            }
            Family::Stable => {
                let p = self.take_params(&["lambda", "alpha"], &[])?;
                LevyDensity::Stable {
                    lambda: p["lambda"],
                    alpha: p["alpha"],
                }
            }
            Family::TemperedStable => {
                let p = self.take_params(&["lambda", "alpha", "beta"], &[])?;
                LevyDensity::TemperedStable {
                    lambda: p["lambda"],
                    alpha: p["alpha"],
                    beta: p["beta"],
                }
            }
            Family::GammaProcess => {
                let p = self.take_params(&["lambda", "beta"], &[])?;
                LevyDensity::GammaProcess {
                    lambda: p["lambda"],
                    beta: p["beta"],
                }
            }
            Family::InverseGaussian => {
                let p = self.take_params(&["lambda", "beta"], &[])?;
                LevyDensity::InverseGaussian {
                    lambda: p["lambda"],
                    beta: p["beta"],
                }
            }
            Family::Custom => {
                self.take_params(&[], &[])?;
                let c = self
                    .custom
                    .clone()
                    .ok_or_else(|| bad("custom: required for family `custom`"))?;
                LevyDensity::Custom(c)
            }
        };
        Ok(d)
    }

    pub fn to_model(&self) -> Result<LevyModel> {
        let density = self.density()?;
        match (self.c, self.gamma) {
            (Some(c), None) => LevyModel::cramer_lundberg(c, self.sigma, density, self.q),
            (None, Some(g)) => LevyModel::from_triplet(g, self.sigma, density, self.q),
            (Some(_), Some(_)) => Err(bad("give either `c` or `gamma`, not both")),
            (None, None) => Err(bad("one of `c` or `gamma` is required")),
        }
    }

    /// File describing an existing model (γ form, so it round-trips for every family).
    pub fn describe(model: &LevyModel) -> Self {
        let mut params = BTreeMap::new();
        let mut custom = None;
        match model.density() {
            LevyDensity::None => {}
            LevyDensity::Exponential { rate, beta } => {
                params.insert("lambda".into(), *rate);
                params.insert("beta".into(), *beta);
            }
            LevyDensity::Erlang { rate, shape, alpha } => {
                params.insert("lambda".into(), *rate);
                params.insert("alpha".into(), *alpha);
                params.insert("shape".into(), *shape as f64);
            }
            LevyDensity::Hyperexponential {
                rate,
                weights,
                betas,
            } => {
                params.insert("lambda".into(), *rate);
                for (j, (w, b)) in weights.iter().zip(betas).enumerate() {
                    params.insert(format!("weight{}", j + 1), *w);
                    params.insert(format!("beta{}", j + 1), *b);
                }
            }
            LevyDensity::Pareto { rate, alpha } => {
                params.insert("lambda".into(), *rate);
                params.insert("alpha".into(), *alpha);
            }
            LevyDensity::Weibull { rate, scale, shape } => {
                params.insert("lambda".into(), *rate);
                params.insert("c".into(), *scale);
                params.insert("r".into(), *shape);
            }
            LevyDensity::Stable { lambda, alpha } => {
                params.insert("lambda".into(), *lambda);
                params.insert("alpha".into(), *alpha);
            }
            LevyDensity::TemperedStable {
                lambda,
                alpha,
                beta,
            } => {
                params.insert("lambda".into(), *lambda);
                params.insert("alpha".into(), *alpha);
                params.insert("beta".into(), *beta);
            }
            LevyDensity::GammaProcess { lambda, beta }
            | LevyDensity::InverseGaussian { lambda, beta } => {
                params.insert("lambda".into(), *lambda);
                params.insert("beta".into(), *beta);
            }
            LevyDensity::Custom(c) => custom = Some(c.clone()),
        }
        ModelFile {
            family: model.family(),
            params,
            c: None,
            gamma: Some(model.gamma()),
            sigma: model.sigma(),
            q: model.q(),
            custom,
        }
    }
}
