//! Named presets: the Erlang(2) perturbed Cramér–Lundberg example and one model per
//! catalogue family, optionally perturbed by Brownian motion (`-bm` suffix).

use super::{LevyDensity, LevyModel};

const PRESETS: &[&str] = &[
    "erlang2-sigma1.4",
    "erlang2-sigma2",
    "erlang2-sigma0",
    "brownian",
    "exponential",
    "exponential-bm",
    "hyperexponential",
    "hyperexponential-bm",
    "pareto",
    "pareto-bm",
    "weibull",
    "weibull-bm",
    "stable",
    "stable-bm",
    "tempered-stable",
    "tempered-stable-bm",
    "gamma",
    "inverse-gaussian",
];

/// Diffusion coefficient used by the `-bm` variants.
const PERTURBATION_SIGMA: f64 = 0.5;

pub fn preset_names() -> &'static [&'static str] {
    PRESETS
}

/// Look up a preset by name.
pub fn preset(name: &str) -> Option<LevyModel> {
    let (base, sigma) = match name.strip_suffix("-bm") {
        Some(base) => (base, PERTURBATION_SIGMA),
        None => (name, 0.0),
    };
    let q = 0.1;
    let erlang = |sigma: f64| {
        LevyModel::cramer_lundberg(
            21.4,
            sigma,
            LevyDensity::Erlang {
                rate: 10.0,
                shape: 2,
                alpha: 1.0,
            },
            q,
        )
    };
    let model = match base {
        "erlang2-sigma1.4" if sigma == 0.0 => erlang(1.4),
        "erlang2-sigma2" if sigma == 0.0 => erlang(2.0),
        "erlang2-sigma0" if sigma == 0.0 => erlang(0.0),
        "brownian" if sigma == 0.0 => LevyModel::from_triplet(1.0, 1.0, LevyDensity::None, q),
        "exponential" => LevyModel::cramer_lundberg(
            1.5,
            sigma,
            LevyDensity::Exponential {
                rate: 1.0,
                beta: 1.0,
            },
            q,
        ),
        "hyperexponential" => LevyModel::cramer_lundberg(
            1.5,
            sigma,
            LevyDensity::Hyperexponential {
                rate: 1.0,
                weights: vec![0.4, 0.6],
                betas: vec![0.5, 2.0],
            },
            q,
        ),
        "pareto" => LevyModel::cramer_lundberg(
            1.0,
            sigma,
            LevyDensity::Pareto {
                rate: 1.0,
                alpha: 3.0,
            },
            q,
        ),
        "weibull" => LevyModel::cramer_lundberg(
            2.5,
            sigma,
            LevyDensity::Weibull {
                rate: 1.0,
                scale: 1.0,
                shape: 0.5,
            },
            q,
        ),
        "stable" => LevyModel::from_triplet(
            1.0,
            sigma,
            LevyDensity::Stable {
                lambda: 1.0,
                alpha: 1.5,
            },
            q,
        ),
        "tempered-stable" => LevyModel::from_triplet(
            1.0,
            sigma,
            LevyDensity::TemperedStable {
                lambda: 1.0,
                alpha: 0.5,
                beta: 1.0,
            },
            q,
        ),
        "gamma" if sigma == 0.0 => LevyModel::from_triplet(
            1.0,
            0.0,
            LevyDensity::GammaProcess {
                lambda: 1.0,
                beta: 1.0,
            },
            q,
        ),
        "inverse-gaussian" if sigma == 0.0 => LevyModel::from_triplet(
            1.0,
            0.0,
            LevyDensity::InverseGaussian {
                lambda: 1.0,
                beta: 1.0,
            },
            q,
        ),
        _ => return None,
    };
    Some(model.expect("presets are valid"))
}
