//! The generator Γ applied to barrier value functions, and the HJB checks built on it.
//!
//! Γf(x) = γf′(x) + ½σ²f″(x) + ∫_(0,∞) [f(x−y) − f(x) + f′(x) y 1{y<1}] ν(dy).
//!
//! For v = v_a the jump integral is split three ways. Jumps in (0, ε] use the Taylor
//! expansion ½v″ m₂(ε) − ⅙v‴ m₃(ε). Jumps in (ε, x) go to adaptive quadrature, broken
//! at y = min(1, x) and at the kink y = x − a. Jumps of size at least x land on
//! negative surplus where v vanishes, which leaves −v(x)ν(x,∞) + v′(x)∫_x^1 y ν(dy).
//! Bounded-variation models skip the Taylor part and integrate (0, x) directly.

use std::io::Write;

use serde::Serialize;

use crate::barrier_policy::BarrierPolicy;
use crate::error::Result;
use crate::exec::{try_map_range, Execution};
use crate::quadrature::{integrate_with_breaks, QuadOptions};
use crate::scale_function::{Representation, ScaleFunction};

/// Pass band for (Γ−q)v and 1 − v′: tolerance × (1 + |v(x)|).
pub const HJB_TOLERANCE: f64 = 1e-5;

/// Quadrature settings for the jump integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorQuadrature {
    /// ε = eps_factor · min(1, x), capped at (x − a)/2 just above the barrier.
    pub eps_factor: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for GeneratorQuadrature {
    fn default() -> Self {
        GeneratorQuadrature {
            eps_factor: 1e-4,
            rel_tol: 1e-9,
            abs_tol: 1e-13,
        }
    }
}

impl GeneratorQuadrature {
    /// Defaults for exponential sums. Tables carry ~1e−14 rounding noise from the
    /// inversion, which the compensated bracket divides by y² near y = ε; there ε and
    /// the tolerances are raised so that noise and Taylor remainder both stay near 1e−8.
    pub fn for_scale_function(sf: &ScaleFunction) -> Self {
        match sf.representation() {
            Representation::ExpSum(_) => Self::default(),
            Representation::Tabulated(_) => GeneratorQuadrature {
                eps_factor: 1e-3,
                rel_tol: 1e-7,
                abs_tol: 1e-9,
            },
        }
    }

    pub fn epsilon(&self, x: f64, a: f64) -> f64 {
        let eps = self.eps_factor * x.min(1.0);
        if a < x {
            eps.min(0.5 * (x - a))
        } else {
            eps
        }
    }

    /// Break points of the (ε, x) integral.
    pub fn split_points(&self, x: f64, a: f64) -> Vec<f64> {
        let eps = self.epsilon(x, a);
        let mut pts = graded_breaks(eps, x, a);
        pts.retain(|&p| p >= eps);
        pts
    }
}

/// Breaks on [lo, x]: decades away from lo (singular ν at 0), decades towards x (W
/// may behave like a fractional power at 0+), y = min(1, x), and the kink y = x − a.
fn graded_breaks(lo: f64, x: f64, a: f64) -> Vec<f64> {
    let mut pts = vec![lo, x.min(1.0), x];
    let mut y = 10.0 * lo;
    while y < x {
        pts.push(y);
        y *= 10.0;
    }
    for k in 1..=12 {
        pts.push(x - x * 10f64.powi(-k));
    }
    if a > 0.0 && a < x {
        pts.push(x - a);
    }
    pts.retain(|&p| p >= lo && p <= x);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// (Γ − q)v_a(x) for x > 0, with left limits at x = a.
pub fn apply_generator(policy: &BarrierPolicy, x: f64, quad: &GeneratorQuadrature) -> Result<f64> {
    let model = policy.scale_function().model();
    let density = model.density();
    let a = policy.level();
    let v = policy.value(x)?;
    let v1 = policy.derivative(x, 1)?;
    let sig2 = 0.5 * model.sigma() * model.sigma();
    let v2 = if sig2 > 0.0 || !model.is_bounded_variation() {
        policy.derivative(x, 2)?
    } else {
        0.0
    };
    let opts = QuadOptions {
        abs_tol: quad.abs_tol * (1.0 + v.abs()),
        rel_tol: quad.rel_tol,
        max_intervals: 4000,
    };
    let tail = -v * model.levy_tail(x)?;
    let jumps = if model.is_bounded_variation() {
        // ∫_(0,x) [v(x−y) − v(x)] ν(dy) − v(x)ν(x,∞) + v′(x)∫_(0,1) y ν(dy).
        let mut pts = graded_breaks(1e-12 * x, x, a);
        pts.insert(0, 0.0);
        let body = integrate_with_breaks(
            |y: f64| (policy.value(x - y).unwrap_or(f64::NAN) - v) * density.density(y),
            &pts,
            opts,
        )?;
        body.value + tail + v1 * model.small_jump_mean()
    } else {
        let eps = quad.epsilon(x, a);
        let v3 = policy.derivative(x, 3)?;
        let small = 0.5 * v2 * density.moment(2, 0.0, eps)? - v3 / 6.0 * density.moment(3, 0.0, eps)?;
        let body = integrate_with_breaks(
            |y: f64| {
                let comp = if y < 1.0 { v1 * y } else { 0.0 };
                (policy.value(x - y).unwrap_or(f64::NAN) - v + comp) * density.density(y)
            },
            &quad.split_points(x, a),
            opts,
        )?;
        let near = if x < 1.0 { v1 * density.moment(1, x, 1.0)? } else { 0.0 };
        small + body.value + tail + near
    };
    Ok(model.gamma() * v1 + sig2 * v2 + jumps - model.q() * v)
}

/// One grid point of a verification run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridValue {
    pub x: f64,
    pub v: f64,
    pub gen_minus_q_v: f64,
    pub one_minus_vprime: f64,
}

/// Verdicts of the HJB inequality, the interior identity and (Γ−q)v ≤ 0 beyond the barrier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub barrier: f64,
    pub tolerance: f64,
    pub eps_factor: f64,
    pub quad_rel_tol: f64,
    pub grid_points: usize,
    /// max over x < a of |(Γ−q)v(x)| / (1 + |v(x)|).
    pub interior_residual: f64,
    pub interior_holds: bool,
    /// (Γ−q)v ≤ tol on x > a.
    pub condition3_holds: bool,
    pub worst_excursion: f64,
    pub worst_excursion_x: Option<f64>,
    pub hjb_holds: bool,
    #[serde(skip)]
    pub points: Vec<GridValue>,
}

impl VerificationReport {
    /// Write `x,gen_minus_q_v,one_minus_vprime` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,gen_minus_q_v,one_minus_vprime")?;
        for p in &self.points {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", p.x, p.gen_minus_q_v, p.one_minus_vprime)?;
        }
        Ok(())
    }
}

/// `n` uniform points of (0, x_hi], minus those within one step of the barrier.
pub fn default_grid(a: f64, x_hi: f64, n: usize) -> Vec<f64> {
    let step = x_hi / n as f64;
    (1..=n)
        .map(|i| step * i as f64)
        .filter(|x| (x - a).abs() > step)
        .collect()
}

/// Evaluate (Γ−q)v_a and 1 − v_a′ on the grid and collect the verdicts.
pub fn verify_hjb(
    policy: &BarrierPolicy,
    grid: &[f64],
    quad: &GeneratorQuadrature,
    exec: Execution,
) -> Result<VerificationReport> {
    let a = policy.level();
    let points = try_map_range(grid.len(), exec, |i| {
        let x = grid[i];
        let v = policy.value(x)?;
        let one_minus = if x > a { 0.0 } else { 1.0 - policy.derivative(x, 1)? };
        Ok::<_, crate::Error>(GridValue {
            x,
            v,
            gen_minus_q_v: apply_generator(policy, x, quad)?,
            one_minus_vprime: one_minus,
        })
    })?;
    let mut report = VerificationReport {
        barrier: a,
        tolerance: HJB_TOLERANCE,
        eps_factor: quad.eps_factor,
        quad_rel_tol: quad.rel_tol,
        grid_points: points.len(),
        interior_residual: 0.0,
        interior_holds: true,
        condition3_holds: true,
        worst_excursion: 0.0,
        worst_excursion_x: None,
        hjb_holds: true,
        points: Vec::new(),
    };
    for p in &points {
        let band = HJB_TOLERANCE * (1.0 + p.v.abs());
        if p.x < a {
            report.interior_residual = report.interior_residual.max(p.gen_minus_q_v.abs() / (1.0 + p.v.abs()));
        } else if p.gen_minus_q_v > band {
            report.condition3_holds = false;
        }
        if p.x > a && p.gen_minus_q_v > report.worst_excursion {
            report.worst_excursion = p.gen_minus_q_v;
            report.worst_excursion_x = Some(p.x);
        }
        if p.gen_minus_q_v > band || p.one_minus_vprime > band {
            report.hjb_holds = false;
        }
    }
    report.interior_holds = report.interior_residual <= HJB_TOLERANCE;
    report.points = points;
    Ok(report)
}

/// Barrier-shift diagnostic: lim_{y↑x} (Γ−q)(v_{a*} − v_x)(y) at each x > a*, using
/// left limits at the barrier of v_x. Not part of any verdict.
pub fn barrier_shift_diagnostic(
    best: &BarrierPolicy,
    xs: &[f64],
    quad: &GeneratorQuadrature,
    exec: Execution,
) -> Result<Vec<(f64, f64)>> {
    let sf = best.scale_function();
    try_map_range(xs.len(), exec, |i| {
        let x = xs[i];
        let other = BarrierPolicy::new(sf, x)?;
        let d = apply_generator(best, x, quad)? - apply_generator(&other, x, quad)?;
        Ok::<_, crate::Error>((x, d))
    })
}

#[cfg(test)]
mod tests;
