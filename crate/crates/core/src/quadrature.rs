//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The integrator keeps a heap of subintervals and always bisects the one with the
//! largest error estimate, in the spirit of QUADPACK's QAG. Integrands may be real or
//! complex valued. Semi-infinite ranges are mapped onto `[0, 1)` with
//! `y = a + t / (1 - t)`; the Kronrod nodes never touch the endpoints.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Tolerances and limits for a single adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-10,
            max_intervals: 4000,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

/// Outcome of an integration: value plus the summed Kronrod error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Quad<T> {
    pub value: T,
    pub error: f64,
    pub intervals: usize,
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kron = kron + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).magnitude();
    (value, error)
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<Quad<T>> {
    integrate_with_breaks(f, &[a, b], opts)
}

/// Integrate over `[points[0], points[last]]`, starting from the given subdivision.
/// Break points mark kinks or singularities the integrand is known to have.
pub fn integrate_with_breaks<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    points: &[f64],
    opts: QuadOptions,
) -> Result<Quad<T>> {
    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut total_err = 0.0;
    for w in points.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (value, error) = kronrod(&f, w[0], w[1]);
        total = total + value;
        total_err += error;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.magnitude());
        if total_err <= target {
            break;
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::QuadratureFailed {
                residual: total_err,
                requested: target,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in floating point.
            heap.push(worst);
            return Err(Error::QuadratureFailed {
                residual: total_err,
                requested: target,
            });
        }
        let (lv, le) = kronrod(&f, worst.a, mid);
        let (rv, re) = kronrod(&f, mid, worst.b);
        total = total - worst.value + lv + rv;
        total_err += le + re - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
    }
    // Re-sum to shed the drift of the running updates.
    let mut value = T::zero();
    let mut error = 0.0;
    let intervals = heap.len();
    for s in heap {
        value = value + s.value;
        error += s.error;
    }
    Ok(Quad {
        value,
        error,
        intervals,
    })
}

/// Integrate `f` over `[a, ∞)`.
pub fn integrate_to_infinity<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    opts: QuadOptions,
) -> Result<Quad<T>> {
    let g = |t: f64| {
        let s = 1.0 - t;
        let y = a + t / s;
        let v = f(y);
        if v.magnitude() == 0.0 {
            T::zero()
        } else {
            v * (1.0 / (s * s))
        }
    };
    // Extra breaks concentrate the initial nodes near the start of the range.
    integrate_with_breaks(g, &[0.0, 0.5, 0.9, 0.99, 1.0], opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate(|x: f64| x.powi(5) - 2.0 * x, 0.0, 2.0, QuadOptions::default()).unwrap();
        assert!((q.value - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity_converges() {
        // ∫_0^1 x^{-1/2} dx = 2
        let q = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, QuadOptions::default()).unwrap();
        assert!((q.value - 2.0).abs() < 1e-9, "{}", q.value);
    }

    #[test]
    fn semi_infinite_exponential() {
        let q = integrate_to_infinity(|x: f64| (-3.0 * x).exp(), 1.0, QuadOptions::default())
            .unwrap();
        assert!((q.value - (-3.0f64).exp() / 3.0).abs() < 1e-14);
    }

    #[test]
    fn complex_oscillation() {
        // ∫_0^∞ e^{-(1+2i)x} dx = 1/(1+2i)
        let s = Complex64::new(1.0, 2.0);
        let q = integrate_to_infinity(|x: f64| (-s * x).exp(), 0.0, QuadOptions::default())
            .unwrap();
        assert!((q.value - 1.0 / s).norm() < 1e-12);
    }

    #[test]
    fn kink_with_break_point() {
        let q = integrate_with_breaks(
            |x: f64| (x - 0.3).abs(),
            &[0.0, 0.3, 1.0],
            QuadOptions::default(),
        )
        .unwrap();
        assert!((q.value - (0.045 + 0.245)).abs() < 1e-14);
        assert!(q.intervals <= 2);
    }

    #[test]
    fn divergent_integral_is_reported() {
        let opts = QuadOptions {
            max_intervals: 50,
            ..QuadOptions::default()
        };
        let err = integrate(|x: f64| 1.0 / x, 0.0, 1.0, opts).unwrap_err();
        assert!(matches!(err, Error::QuadratureFailed { .. }));
    }
}
