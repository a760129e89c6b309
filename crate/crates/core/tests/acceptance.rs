//! Acceptance criteria. Prints one PASS/FAIL line per criterion with its runtime and
//! exits nonzero if any criterion fails or overruns its budget.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use definetti::barrier_policy::{
    auto_x_hi, bracketed_scale_function, check_condition2, certify, optimal_barrier, BarrierPolicy,
};
use definetti::hjb_verifier::{apply_generator, GeneratorQuadrature};
use definetti::levy_model::preset;
use definetti::mc_simulator::{simulate_barrier, SimConfig};
use definetti::quadrature::{integrate_with_breaks, QuadOptions};
use definetti::{Execution, LevyDensity, LevyModel, Result, ScaleFunction};

const EXEC: Execution = Execution::Parallel;
const GRID: usize = 2048;

fn erlang(sigma: f64) -> LevyModel {
    let claims = LevyDensity::Erlang {
        rate: 10.0,
        shape: 2,
        alpha: 1.0,
    };
    LevyModel::cramer_lundberg(21.4, sigma, claims, 0.1).unwrap()
}

fn a_star(sf: &ScaleFunction) -> Result<f64> {
    let x_hi = auto_x_hi(sf, GRID, EXEC)?;
    Ok(optimal_barrier(sf, x_hi, GRID, EXEC)?.a_star)
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn low_volatility_example() -> Result<Outcome> {
    let sf = ScaleFunction::partial_fractions(&erlang(1.4))?;
    let x_hi = auto_x_hi(&sf, GRID, EXEC)?;
    let a = optimal_barrier(&sf, x_hi, GRID, EXEC)?.a_star;
    let c2 = check_condition2(&sf, a, x_hi, GRID, EXEC)?;
    let policy = BarrierPolicy::new(&sf, a)?;
    let quad = GeneratorQuadrature::for_scale_function(&sf);
    let mut worst = f64::NEG_INFINITY;
    for i in 1..=1000 {
        let x = a + (40.0 - a) * i as f64 / 1000.0;
        worst = worst.max(apply_generator(&policy, x, &quad)?);
    }
    outcome(
        (a - 0.4).abs() <= 0.1 && !c2.holds && worst > 1e-4,
        format!("a*={a:.4} condition2={} max (Γ−q)v beyond a* = {worst:.3e}", c2.holds),
    )
}

fn high_volatility_example() -> Result<Outcome> {
    let sf = ScaleFunction::partial_fractions(&erlang(2.0))?;
    let x_hi = auto_x_hi(&sf, GRID, EXEC)?;
    let a = optimal_barrier(&sf, x_hi, GRID, EXEC)?.a_star;
    let c2 = check_condition2(&sf, a, x_hi, GRID, EXEC)?;
    let policy = BarrierPolicy::new(&sf, a)?;
    let quad = GeneratorQuadrature::for_scale_function(&sf);
    let mut worst = f64::NEG_INFINITY;
    for i in 1..=1000 {
        let x = a + (40.0 - a) * i as f64 / 1000.0;
        let g = apply_generator(&policy, x, &quad)?;
        worst = worst.max(g / (1e-5 * (1.0 + policy.value(x)?.abs())));
    }
    outcome(
        (a - 10.5).abs() <= 0.1 && c2.holds && worst <= 1.0,
        format!("a*={a:.4} condition2={} max (Γ−q)v/band = {worst:.3e}", c2.holds),
    )
}

/// Worst relative error of ∫ e^{−θx} W(x) dx against 1/(ψ(θ) − q) at 12 θ > Φ.
fn laplace_error(sf: &ScaleFunction) -> Result<f64> {
    let m = sf.model();
    let phi = sf.phi();
    let mut worst = 0.0f64;
    for k in 0..12 {
        let theta = phi + 0.5 + 11.5 * k as f64 / 11.0;
        let gap = theta - phi;
        let mut x_end = 5.0;
        while x_end < sf.x_max() && (-gap * x_end).exp() * sf.w(x_end)? * (-phi * x_end).exp() / gap >= 1e-12 {
            x_end *= 1.5;
        }
        let x_end = x_end.min(sf.x_max());
        let breaks: Vec<f64> = (0..=64).map(|i| x_end * (i as f64 / 64.0).powi(2)).collect();
        let integral = integrate_with_breaks(
            |x: f64| (-theta * x).exp() * sf.w(x).unwrap(),
            &breaks,
            QuadOptions::with_rel_tol(1e-10),
        )?
        .value;
        let exact = 1.0 / (m.laplace_exponent(theta)? - m.q());
        worst = worst.max((integral / exact - 1.0).abs());
    }
    Ok(worst)
}

fn laplace_round_trip() -> Result<Outcome> {
    let mut cases = vec![
        ("erlang σ=1.4", ScaleFunction::partial_fractions(&erlang(1.4))?),
        ("erlang σ=2", ScaleFunction::partial_fractions(&erlang(2.0))?),
    ];
    for name in ["exponential-bm", "hyperexponential"] {
        cases.push((name, ScaleFunction::partial_fractions(&preset(name).unwrap())?));
    }
    cases.push((
        "tempered-stable",
        ScaleFunction::numeric_inversion(&preset("tempered-stable").unwrap(), 60.0, 1024)?,
    ));
    let mut worst = 0.0f64;
    let mut detail = Vec::new();
    for (name, sf) in &cases {
        let e = laplace_error(sf)?;
        worst = worst.max(e);
        detail.push(format!("{name} {e:.1e}"));
    }
    outcome(worst <= 1e-6, detail.join(", "))
}

fn interior_identity() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for sigma in [1.4, 2.0] {
        let sf = ScaleFunction::partial_fractions(&erlang(sigma))?;
        let quad = GeneratorQuadrature::for_scale_function(&sf);
        for a in [0.7, 3.0, 12.0] {
            let policy = BarrierPolicy::new(&sf, a)?;
            for i in 1..200 {
                let x = a * i as f64 / 200.0;
                let r = apply_generator(&policy, x, &quad)?.abs() / (1.0 + policy.value(x)?.abs());
                worst = worst.max(r / 1e-5);
            }
        }
    }
    outcome(worst <= 1.0, format!("max |(Γ−q)v|/band on (0, a) = {worst:.3e}"))
}

fn completely_monotone_catalogue() -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut count = 0;
    for base in ["exponential", "hyperexponential", "pareto", "weibull", "stable", "tempered-stable"] {
        for name in [base.to_string(), format!("{base}-bm")] {
            let model = preset(&name).unwrap();
            let (sf, x_hi) = bracketed_scale_function(&model, GRID, None, EXEC)?;
            let cert = certify(&sf, x_hi, GRID, EXEC)?;
            count += 1;
            if !(cert.convexity_holds && cert.condition2_holds) {
                failures.push(format!(
                    "{name} (convexity={}, condition2={})",
                    cert.convexity_holds, cert.condition2_holds
                ));
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("{count} models convex with W′ nondecreasing beyond a*")
    } else {
        format!("failed: {}", failures.join(", "))
    };
    outcome(failures.is_empty(), detail)
}

fn monte_carlo_oracle() -> Result<Outcome> {
    let mut worst_z = 0.0f64;
    let mut worst_rel = 0.0f64;
    for (name, model) in [("erlang σ=2", erlang(2.0)), ("exponential", preset("exponential").unwrap())] {
        let sf = ScaleFunction::partial_fractions(&model)?;
        let a = a_star(&sf)?;
        for (x, barrier) in [(5.0, a), (0.5 * a, a), (1.0, 2.0), (a + 2.0, a)] {
            let r = simulate_barrier(&SimConfig::new(&model, barrier, x).paths(200_000).seed(20_240_601))?;
            let exact = BarrierPolicy::new(&sf, barrier)?.value(x)?;
            let z = (r.estimate - exact).abs() / r.stderr;
            worst_z = worst_z.max(z);
            worst_rel = worst_rel.max(r.stderr / r.estimate);
            if z > 3.0 {
                eprintln!("  {name}: x={x} a={barrier}: MC {} ± {} vs {exact}", r.estimate, r.stderr);
            }
        }
    }
    outcome(
        worst_z <= 3.0 && worst_rel < 0.01,
        format!("max |MC − v|/se = {worst_z:.2}, max se/estimate = {worst_rel:.2e}"),
    )
}

fn property_suite() -> Result<Outcome> {
    let mut failed = Vec::new();
    let sf = ScaleFunction::partial_fractions(&erlang(2.0))?;

    // Central differences converge at O(h²): halving h cuts the error by about 4.
    let mut ratio_ok = true;
    for order in 0..3 {
        for &x in &[0.5, 3.0, 12.0] {
            let err = |h: f64| -> Result<f64> {
                let fd = (sf.eval(x + h, order)? - sf.eval(x - h, order)?) / (2.0 * h);
                Ok((fd - sf.eval(x, order + 1)?).abs())
            };
            let (e1, e2) = (err(1e-2)?, err(5e-3)?);
            ratio_ok &= e1 / e2 > 3.5 && e1 / e2 < 4.5;
        }
    }
    if !ratio_ok {
        failed.push("finite-difference order");
    }

    let xs: Vec<f64> = (1..=400).map(|i| 0.1 * i as f64).collect();
    let w: Vec<f64> = xs.iter().map(|&x| sf.w(x).unwrap()).collect();
    if !(w[0] > 0.0 && w.windows(2).all(|p| p[1] > p[0])) {
        failed.push("W positive and increasing");
    }

    let a = a_star(&sf)?;
    let best = BarrierPolicy::new(&sf, a)?;
    if !xs.iter().all(|&x| best.derivative(x, 1).unwrap() >= 1.0 - 1e-9) {
        failed.push("v′ ≥ 1");
    }
    let mut dominated = true;
    for k in 0..20 {
        let other = BarrierPolicy::new(&sf, 0.1 + 1.2 * k as f64)?;
        for &x in &xs {
            let (vb, vo) = (best.value(x)?, other.value(x)?);
            dominated &= vb >= vo - 1e-10 * vb.abs().max(1.0);
        }
    }
    if !dominated {
        failed.push("barrier dominance");
    }

    let cfg = SimConfig::new(&erlang(2.0), a, 5.0).paths(20_000).seed(3);
    let r1 = simulate_barrier(&cfg.clone().exec(Execution::Sequential))?;
    let r2 = simulate_barrier(&cfg.exec(Execution::Parallel))?;
    if r1 != r2 {
        failed.push("deterministic simulation");
    }

    let x_hi = auto_x_hi(&sf, GRID, EXEC)?;
    let coarse = optimal_barrier(&sf, x_hi, GRID, EXEC)?.a_star;
    let fine = optimal_barrier(&sf, x_hi, 4 * GRID, EXEC)?.a_star;
    if (coarse - fine).abs() > 1e-6 {
        failed.push("a* refinement stability");
    }

    let detail = if failed.is_empty() {
        "all properties hold".to_string()
    } else {
        format!("failed: {}", failed.join(", "))
    };
    outcome(failed.is_empty(), detail)
}

type Criterion = (&'static str, u64, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 low-volatility example: a*≈0.4, W′ not monotone beyond a*, (Γ−q)v > 1e-4", 10, low_volatility_example),
        ("2 high-volatility example: a*≈10.5, W′ monotone beyond a*, (Γ−q)v ≤ band", 30, high_volatility_example),
        ("3 Laplace round-trip to 1e-6", 10, laplace_round_trip),
        ("4 interior identity on (0, a)", 60, interior_identity),
        ("5 completely monotone catalogue: convexity and monotonicity of W′", 60, completely_monotone_catalogue),
        ("6 Monte Carlo agrees with closed form", 300, monte_carlo_oracle),
        ("7 property suite", 60, property_suite),
    ];
    let mut all = true;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_budget = elapsed <= Duration::from_secs(budget);
        let (passed, detail) = match result {
            Ok(o) => (o.passed && in_budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        all &= passed;
        println!(
            "{} criterion {name} [{:.1}s / {budget}s] {detail}",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
