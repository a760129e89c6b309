use super::*;
use crate::levy_model::{preset, LevyDensity};

const SEQ: Execution = Execution::Sequential;

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

#[test]
fn value_function_branches_meet_at_barrier() {
    let sf = erlang_sf(2.0);
    for a in [0.0, 0.5, 3.0, 10.0] {
        let p = BarrierPolicy::new(&sf, a).unwrap();
        let below = sf.w(a).unwrap() / sf.w1(a).unwrap();
        assert_eq!(p.value(a).unwrap(), below);
        let above = p.value(a + 1e-9).unwrap();
        assert!((above - below).abs() < 1e-8);
        assert_eq!(p.value(-0.5).unwrap(), 0.0);
        assert_eq!(p.derivative(a + 1.0, 1).unwrap(), 1.0);
    }
    assert!(BarrierPolicy::new(&sf, -1.0).is_err());
}

#[test]
fn erlang_barriers() {
    let sf = erlang_sf(1.4);
    let x_hi = auto_x_hi(&sf, 2048, SEQ).unwrap();
    let s = optimal_barrier(&sf, x_hi, 2048, SEQ).unwrap();
    assert!((s.a_star - 0.4).abs() <= 0.1, "{}", s.a_star);
    assert!(!check_condition2(&sf, s.a_star, x_hi, 2048, SEQ).unwrap().holds);
    assert!(!check_convexity(&sf, x_hi, 2048, SEQ).unwrap().holds);

    let sf = erlang_sf(2.0);
    let x_hi = auto_x_hi(&sf, 2048, SEQ).unwrap();
    let s = optimal_barrier(&sf, x_hi, 2048, SEQ).unwrap();
    assert!((s.a_star - 10.5).abs() <= 0.1, "{}", s.a_star);
    assert!(check_condition2(&sf, s.a_star, x_hi, 2048, SEQ).unwrap().holds);
}

#[test]
fn a_star_is_stable_under_grid_refinement() {
    for sigma in [1.4, 2.0] {
        let sf = erlang_sf(sigma);
        let x_hi = auto_x_hi(&sf, 2048, SEQ).unwrap();
        let a = optimal_barrier(&sf, x_hi, 2048, SEQ).unwrap().a_star;
        let b = optimal_barrier(&sf, x_hi, 4096, SEQ).unwrap().a_star;
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
}

#[test]
fn heavy_discounting_puts_barrier_at_zero() {
    // Negative drift: W″(0) ∝ θ₁² − θ₂² > 0, so W′ increases from the origin.
    let m = LevyModel::from_triplet(-1.0, 1.0, LevyDensity::None, 5.0).unwrap();
    let sf = ScaleFunction::partial_fractions(&m).unwrap();
    let x_hi = auto_x_hi(&sf, 2048, SEQ).unwrap();
    assert_eq!(optimal_barrier(&sf, x_hi, 2048, SEQ).unwrap().a_star, 0.0);
}

#[test]
fn brownian_and_completely_monotone_claims_are_convex() {
    for name in ["brownian", "exponential", "hyperexponential", "exponential-bm"] {
        let sf = ScaleFunction::partial_fractions(&preset(name).unwrap()).unwrap();
        let cert = certify(&sf, auto_x_hi(&sf, 2048, SEQ).unwrap(), 2048, SEQ).unwrap();
        assert!(cert.convexity_holds && cert.condition2_holds, "{name}: {cert:?}");
    }
}

#[test]
fn tabulated_convexity_for_stable() {
    let m = preset("stable").unwrap();
    let (sf, x_hi) = bracketed_scale_function(&m, 2048, None, Execution::Parallel).unwrap();
    let cert = certify(&sf, x_hi, 2048, Execution::Parallel).unwrap();
    assert!(cert.convexity_holds && cert.condition2_holds, "{cert:?}");
}

#[test]
fn a_star_dominates_other_barriers_and_vprime_at_least_one() {
    let sf = erlang_sf(2.0);
    let x_hi = auto_x_hi(&sf, 2048, SEQ).unwrap();
    let a_star = optimal_barrier(&sf, x_hi, 2048, SEQ).unwrap().a_star;
    let best = BarrierPolicy::new(&sf, a_star).unwrap();
    for k in 0..20 {
        let a = 0.25 + 1.5 * k as f64;
        let other = BarrierPolicy::new(&sf, a).unwrap();
        for i in 0..=50 {
            let x = a.min(a_star) * i as f64 / 50.0;
            let (vb, vo) = (best.value(x).unwrap(), other.value(x).unwrap());
            assert!(vb >= vo * (1.0 - 1e-12), "a={a} a*={a_star} x={x}: {vb} < {vo}");
        }
    }
    for i in 1..=400 {
        let x = 0.05 * i as f64;
        assert!(best.derivative(x, 1).unwrap() >= 1.0 - 1e-12, "x={x}");
    }
}

#[test]
fn certificate_serialises_flat() {
    let sf = erlang_sf(1.4);
    let cert = certify(&sf, 30.0, 2048, SEQ).unwrap();
    let v = serde_json::to_value(&cert).unwrap();
    for key in ["a_star", "condition2_holds", "convexity_holds", "worst_violation", "violation_x", "grid_points"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert!(cert.violation_x.unwrap() > cert.a_star);
}
