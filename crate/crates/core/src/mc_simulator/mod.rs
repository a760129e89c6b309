//! Monte Carlo estimates of barrier value functions for finite-activity models.
//!
//! Discounting is represented by independent exponential killing:
//! E ∫_0^{σ} e^{−qt} dL_t = E L_{σ ∧ e_q} with e_q ~ Exp(q). The killing time is capped
//! at a horizon T, and the dividends lost beyond it are bounded by
//! e^{−qT}(c/q + σ/√(2q)).
//!
//! Between claim epochs the free process moves as c t + σB_t on steps of length Δt.
//! Each step samples the endpoint and the bridge maximum exactly; the maximum drives
//! the reflection at a. Ruin between steps uses the Brownian-bridge crossing
//! probability exp(−2 d₁ d₂ / (σ² Δt)), and ruin by a claim is exact. With σ = 0 the
//! path is piecewise linear and is simulated event by event without any step.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{map_range, pairwise_sum, Execution};
use crate::levy_model::LevyModel;

/// Simulation settings for one barrier and starting point.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub model: LevyModel,
    pub barrier: f64,
    pub x: f64,
    pub paths: usize,
    /// Diffusion step; defaults to 1/(20λ) (or 0.05 without jumps).
    pub dt: Option<f64>,
    /// Killing-time cap; defaults to the horizon whose tail bound is 0.1 × target_se.
    pub horizon: Option<f64>,
    /// Standard error the tail bound is measured against; defaults to 1e−3 × (c/q + σ/√(2q)).
    pub target_se: Option<f64>,
    pub seed: u64,
    pub exec: Execution,
}

impl SimConfig {
    pub fn new(model: &LevyModel, barrier: f64, x: f64) -> Self {
        SimConfig {
            model: model.clone(),
            barrier,
            x,
            paths: 100_000,
            dt: None,
            horizon: None,
            target_se: None,
            seed: 42,
            exec: Execution::default(),
        }
    }

    pub fn paths(mut self, n: usize) -> Self {
        self.paths = n;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_barrier(&self, barrier: f64) -> Self {
        SimConfig {
            barrier,
            ..self.clone()
        }
    }

    pub fn with_x(&self, x: f64) -> Self {
        SimConfig { x, ..self.clone() }
    }
}

/// Validated parameters shared by all paths.
#[derive(Debug, Clone, Copy)]
struct Plan {
    c: f64,
    sigma: f64,
    rate: f64,
    q: f64,
    a: f64,
    x: f64,
    dt: f64,
    horizon: f64,
    tail_bound: f64,
}

impl Plan {
    fn new(cfg: &SimConfig) -> Result<Self> {
        let m = &cfg.model;
        let rate = m.density().total_rate().ok_or(Error::NotFiniteActivity)?;
        let c = m.premium().ok_or(Error::NotFiniteActivity)?;
        if !(cfg.barrier.is_finite() && cfg.barrier >= 0.0) {
            return Err(Error::NegativeArgument(cfg.barrier));
        }
        if !cfg.x.is_finite() {
            return Err(Error::InvalidParameter {
                name: "x".into(),
                reason: "must be finite".into(),
            });
        }
        if cfg.paths < 2 {
            return Err(Error::InvalidParameter {
                name: "paths".into(),
                reason: "need at least two paths for a standard error".into(),
            });
        }
        let limit = if rate > 0.0 { 1.0 / (10.0 * rate) } else { f64::INFINITY };
        let dt = cfg.dt.unwrap_or(if rate > 0.0 { 1.0 / (20.0 * rate) } else { 0.05 });
        if !(dt > 0.0) {
            return Err(Error::NonPositiveArgument(dt));
        }
        if dt >= limit {
            return Err(Error::StepTooLarge { dt, limit });
        }
        let (q, sigma) = (m.q(), m.sigma());
        let scale = c.max(0.0) / q + sigma / (2.0 * q).sqrt();
        let target = cfg.target_se.unwrap_or(1e-3 * scale);
        let horizon = cfg
            .horizon
            .unwrap_or_else(|| (scale / (0.1 * target)).ln().max(0.0) / q);
        Ok(Plan {
            c,
            sigma,
            rate,
            q,
            a: cfg.barrier,
            x: cfg.x,
            dt,
            horizon,
            tail_bound: (-q * horizon).exp() * scale,
        })
    }
}

/// Monte Carlo estimate of v_a(x).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub estimate: f64,
    pub stderr: f64,
    pub paths: usize,
    pub seed: u64,
    pub ruin_fraction: f64,
    pub dt: f64,
    pub horizon: f64,
    /// Upper bound on the dividends lost to the horizon cap.
    pub tail_bound: f64,
    pub bridge_correction: bool,
    pub barrier: f64,
    pub x: f64,
}

/// Outcome of one path: dividends paid before killing or ruin, and whether ruin came first.
#[derive(Debug, Clone, Copy)]
struct PathOutcome {
    dividends: f64,
    ruined: bool,
}

fn exp_draw<R: Rng>(rng: &mut R, rate: f64) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln() / rate
}

fn simulate_path(plan: &Plan, model: &LevyModel, seed: u64, index: u64) -> PathOutcome {
    // Jumps and killing on stream 2i, diffusion on 2i + 1: common random numbers stay
    // aligned across barriers and starting points.
    let mut jumps = ChaCha8Rng::seed_from_u64(seed);
    jumps.set_stream(2 * index);
    let mut diffusion = ChaCha8Rng::seed_from_u64(seed);
    diffusion.set_stream(2 * index + 1);

    let kill = exp_draw(&mut jumps, plan.q).min(plan.horizon);
    let mut next_jump = if plan.rate > 0.0 {
        exp_draw(&mut jumps, plan.rate)
    } else {
        f64::INFINITY
    };
    let (a, c) = (plan.a, plan.c);
    let mut dividends = 0.0;
    let mut u = plan.x;
    if u < 0.0 {
        return PathOutcome {
            dividends,
            ruined: true,
        };
    }
    if u > a {
        dividends += u - a;
        u = a;
    }
    let mut t = 0.0;
    loop {
        let end = if plan.sigma > 0.0 {
            (t + plan.dt).min(next_jump).min(kill)
        } else {
            next_jump.min(kill)
        };
        let tau = end - t;
        if plan.sigma > 0.0 {
            let z: f64 = diffusion.sample(StandardNormal);
            let v: f64 = 1.0 - diffusion.random::<f64>();
            let w: f64 = diffusion.random();
            let s2t = plan.sigma * plan.sigma * tau;
            let x1 = u + c * tau + s2t.sqrt() * z;
            let top = 0.5 * (u + x1 + ((x1 - u).powi(2) - 2.0 * s2t * v.ln()).sqrt());
            let paid = (top - a).max(0.0);
            let u1 = x1 - paid;
            let crossed = u1 < 0.0 || w < (-2.0 * u * u1 / s2t).exp();
            if crossed {
                return PathOutcome {
                    dividends,
                    ruined: true,
                };
            }
            dividends += paid;
            u = u1;
        } else {
            let rise = c * tau;
            let paid = (u + rise - a).max(0.0);
            dividends += paid;
            u = u + rise - paid;
        }
        t = end;
        if t >= kill {
            return PathOutcome {
                dividends,
                ruined: false,
            };
        }
        if t >= next_jump {
            u -= model.density().sample_claim(&mut jumps);
            if u < 0.0 {
                return PathOutcome {
                    dividends,
                    ruined: true,
                };
            }
            next_jump = t + exp_draw(&mut jumps, plan.rate);
        }
    }
}

/// Estimate v_a(x) from `cfg.paths` independent paths.
pub fn simulate_barrier(cfg: &SimConfig) -> Result<SimResult> {
    let plan = Plan::new(cfg)?;
    let outcomes = map_range(cfg.paths, cfg.exec, |i| {
        simulate_path(&plan, &cfg.model, cfg.seed, i as u64)
    });
    let n = outcomes.len() as f64;
    let values: Vec<f64> = outcomes.iter().map(|o| o.dividends).collect();
    let mean = pairwise_sum(&values) / n;
    let squares: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    let var = pairwise_sum(&squares) / (n - 1.0);
    let ruined = outcomes.iter().filter(|o| o.ruined).count();
    Ok(SimResult {
        estimate: mean,
        stderr: (var / n).sqrt(),
        paths: cfg.paths,
        seed: cfg.seed,
        ruin_fraction: ruined as f64 / n,
        dt: plan.dt,
        horizon: plan.horizon,
        tail_bound: plan.tail_bound,
        bridge_correction: plan.sigma > 0.0,
        barrier: plan.a,
        x: plan.x,
    })
}

/// Common-random-number estimates over a family of barriers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyComparison {
    pub rows: Vec<SimResult>,
    pub argmax: f64,
    /// Whether the candidate barrier is within three combined standard errors of the
    /// best estimate; `None` when no candidate was given.
    pub candidate_attains_max: Option<bool>,
}

impl PolicyComparison {
    /// Write `barrier,estimate,stderr` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "barrier,estimate,stderr")?;
        for r in &self.rows {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", r.barrier, r.estimate, r.stderr)?;
        }
        Ok(())
    }
}

/// Simulate every barrier with the same seed. A `candidate` barrier missing from the
/// list is simulated as well.
pub fn compare_policies(template: &SimConfig, barriers: &[f64], candidate: Option<f64>) -> Result<PolicyComparison> {
    if barriers.is_empty() {
        return Err(Error::InvalidParameter {
            name: "barriers".into(),
            reason: "need at least one barrier".into(),
        });
    }
    let mut levels = barriers.to_vec();
    if let Some(a) = candidate {
        if !levels.contains(&a) {
            levels.push(a);
        }
    }
    let rows = levels
        .iter()
        .map(|&a| simulate_barrier(&template.with_barrier(a)))
        .collect::<Result<Vec<_>>>()?;
    let best = rows
        .iter()
        .fold(&rows[0], |acc, r| if r.estimate > acc.estimate { r } else { acc });
    let candidate_attains_max = candidate.map(|a| {
        let r = rows.iter().find(|r| r.barrier == a).expect("candidate simulated");
        r.estimate + 3.0 * (r.stderr.powi(2) + best.stderr.powi(2)).sqrt() >= best.estimate
    });
    Ok(PolicyComparison {
        argmax: best.barrier,
        rows,
        candidate_attains_max,
    })
}
