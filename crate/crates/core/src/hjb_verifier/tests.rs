use super::*;
use crate::barrier_policy::{auto_x_hi, optimal_barrier};
use crate::levy_model::{preset, LevyDensity, LevyModel};
use crate::scale_function::ScaleFunction;

const PAR: Execution = Execution::Parallel;

fn erlang_sf(sigma: f64) -> ScaleFunction {
    let m = LevyModel::cramer_lundberg(
        21.4,
        sigma,
        LevyDensity::Erlang {
            rate: 10.0,
            shape: 2,
            alpha: 1.0,
        },
        0.1,
    )
    .unwrap();
    ScaleFunction::partial_fractions(&m).unwrap()
}

fn a_star(sf: &ScaleFunction) -> f64 {
    let x_hi = auto_x_hi(sf, 2048, PAR).unwrap();
    optimal_barrier(sf, x_hi, 2048, PAR).unwrap().a_star
}

#[test]
fn interior_identity_for_several_barriers() {
    let quad = GeneratorQuadrature::default();
    for sigma in [1.4, 2.0, 0.0] {
        let sf = erlang_sf(sigma);
        for a in [0.7, 3.0, 12.0] {
            let p = BarrierPolicy::new(&sf, a).unwrap();
            for i in 1..200 {
                let x = a * (1.0 - 1.0 / 200.0) * i as f64 / 199.0;
                let g = apply_generator(&p, x, &quad).unwrap();
                let v = p.value(x).unwrap();
                assert!(g.abs() <= 1e-5 * (1.0 + v.abs()), "σ={sigma} a={a} x={x}: {g}");
            }
        }
    }
}

#[test]
fn interior_identity_for_exponential_claims() {
    let quad = GeneratorQuadrature::default();
    for name in ["exponential", "hyperexponential-bm", "brownian"] {
        let sf = ScaleFunction::partial_fractions(&preset(name).unwrap()).unwrap();
        let p = BarrierPolicy::new(&sf, 2.0).unwrap();
        for i in 1..40 {
            let x = 0.05 * i as f64;
            let g = apply_generator(&p, x, &quad).unwrap();
            assert!(g.abs() <= 1e-5 * (1.0 + p.value(x).unwrap()), "{name} x={x}: {g}");
        }
    }
}

#[test]
fn sign_patterns_of_the_erlang_examples() {
    let quad = GeneratorQuadrature::default();
    let sf = erlang_sf(2.0);
    let a = a_star(&sf);
    let p = BarrierPolicy::new(&sf, a).unwrap();
    let report = verify_hjb(&p, &default_grid(a, 40.0, 400), &quad, PAR).unwrap();
    assert!(report.hjb_holds && report.condition3_holds && report.interior_holds, "{report:?}");

    let sf = erlang_sf(1.4);
    let a = a_star(&sf);
    let p = BarrierPolicy::new(&sf, a).unwrap();
    let report = verify_hjb(&p, &default_grid(a, 40.0, 400), &quad, PAR).unwrap();
    assert!(!report.hjb_holds && !report.condition3_holds);
    assert!(report.worst_excursion > 1e-4 && report.worst_excursion_x.unwrap() > a);
}

#[test]
fn halving_epsilon_and_tolerance_is_stable() {
    let fine = GeneratorQuadrature {
        eps_factor: 5e-5,
        rel_tol: 5e-10,
        abs_tol: 5e-14,
    };
    for sigma in [1.4, 2.0] {
        let sf = erlang_sf(sigma);
        let p = BarrierPolicy::new(&sf, a_star(&sf)).unwrap();
        for i in 1..60 {
            let x = 0.5 * i as f64;
            let a = apply_generator(&p, x, &GeneratorQuadrature::default()).unwrap();
            let b = apply_generator(&p, x, &fine).unwrap();
            assert!((a - b).abs() <= 5e-6, "x={x}: {a} vs {b}");
        }
    }
}

#[test]
fn infinite_activity_interior_identity() {
    for name in ["stable", "tempered-stable-bm", "gamma"] {
        let m = preset(name).unwrap();
        let sf = ScaleFunction::numeric_inversion(&m, 20.0, 2048).unwrap();
        let quad = GeneratorQuadrature::for_scale_function(&sf);
        let p = BarrierPolicy::new(&sf, 3.0).unwrap();
        for i in 1..30 {
            let x = 0.1 * i as f64;
            let g = apply_generator(&p, x, &quad).unwrap_or_else(|e| panic!("{name} x={x}: {e}"));
            assert!(g.abs() <= 1e-5 * (1.0 + p.value(x).unwrap()), "{name} x={x}: {g}");
        }
    }
}

#[test]
fn barrier_shift_diagnostic_runs() {
    let sf = erlang_sf(2.0);
    let best = BarrierPolicy::new(&sf, a_star(&sf)).unwrap();
    let xs: Vec<f64> = (1..10).map(|i| best.level() + i as f64).collect();
    let d = barrier_shift_diagnostic(&best, &xs, &GeneratorQuadrature::default(), PAR).unwrap();
    assert_eq!(d.len(), xs.len());
    assert!(d.iter().all(|(_, v)| v.is_finite()));
}

#[test]
fn report_csv_has_header_and_rows() {
    let sf = erlang_sf(2.0);
    let p = BarrierPolicy::new(&sf, 5.0).unwrap();
    let r = verify_hjb(&p, &[1.0, 2.0, 7.0], &GeneratorQuadrature::default(), PAR).unwrap();
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("x,gen_minus_q_v,one_minus_vprime\n"));
    assert_eq!(text.lines().count(), 4);
    let json = serde_json::to_value(&r).unwrap();
    assert!(json.get("points").is_none() && json.get("eps_factor").is_some());
}

