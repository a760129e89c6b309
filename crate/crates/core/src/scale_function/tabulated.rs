//! Tabulated W_Φ(q) from Euler inversion of θ ↦ 1/(ψ(θ + Φ(q)) − q).
//!
//! The tilted function W_Φ(x) = e^{−Φx} W(x) is bounded (it tends to 1/ψ′(Φ)), which
//! is what keeps the inversion well conditioned on long ranges. Values use cubic
//! Hermite interpolation of the W_Φ and W_Φ′ tables; first and second derivatives
//! come from a clamped cubic spline through the W_Φ′ table. Near the origin, where W
//! may behave like a fractional power or carry fast transients, the transform is
//! inverted pointwise instead. That region extends at least 16 steps and further
//! until interpolation agrees with direct inversion at every later interval midpoint.

use super::euler::Euler;
use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};
use crate::levy_model::LevyModel;

/// Relative residual above which an inverted table entry is rejected.
pub const INVERSION_TOLERANCE: f64 = 1e-8;

/// Minimum number of grid steps from the origin inverted pointwise.
const NEAR_ZERO_STEPS: usize = 16;
/// Midpoint mismatch that pushes the pointwise region further out.
const INTERPOLATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Tabulated {
    model: LevyModel,
    phi: f64,
    w0: f64,
    /// W_Φ′(0+) when finite.
    dw0: Option<f64>,
    h: f64,
    x_max: f64,
    /// W_Φ at x_i = i h, i = 0..=n.
    f: Vec<f64>,
    /// W_Φ′ at the same nodes; entry 0 is unused.
    df: Vec<f64>,
    /// Spline moments of the W_Φ′ table on nodes 1..=n.
    moments: Vec<f64>,
    /// Values below this abscissa are inverted pointwise.
    direct_below: f64,
    max_residual: f64,
    euler: Euler,
}

impl Tabulated {
    pub(crate) fn build(model: &LevyModel, x_max: f64, n_grid: usize, exec: Execution) -> Result<Self> {
        let phi = model.phi();
        let w0 = model.bv_drift().map_or(0.0, |d| 1.0 / d);
        let dw0 = derivative_at_zero(model).map(|d| d - phi * w0);
        let h = x_max / n_grid as f64;
        let euler = Euler::default();
        let mut tab = Tabulated {
            model: model.clone(),
            phi,
            w0,
            dw0,
            h,
            x_max,
            f: Vec::new(),
            df: Vec::new(),
            moments: Vec::new(),
            direct_below: NEAR_ZERO_STEPS as f64 * h,
            max_residual: 0.0,
            euler,
        };
        let nodes = map_range(n_grid, exec, |i| tab.invert((i + 1) as f64 * h));
        let mut f = Vec::with_capacity(n_grid + 1);
        let mut df = Vec::with_capacity(n_grid + 1);
        f.push(w0);
        df.push(f64::NAN);
        let mut worst = 0.0f64;
        for node in nodes {
            let (v, dv, rel) = node;
            worst = worst.max(rel);
            f.push(v);
            df.push(dv);
        }
        if !(worst <= INVERSION_TOLERANCE) {
            return Err(Error::InversionFailed {
                residual: worst,
                tolerance: INVERSION_TOLERANCE,
            });
        }
        tab.moments = clamped_spline_moments(&df[1..], h);
        tab.f = f;
        tab.df = df;
        tab.max_residual = worst;
        let first = NEAR_ZERO_STEPS.min(n_grid - 1);
        let mismatch = map_range(n_grid - first, exec, |k| {
            let x = (first + k) as f64 * h + 0.5 * h;
            let (v, dv, _) = tab.invert(x);
            let [vi, dvi, _] = tab.interpolate(x);
            let scale = dv.abs().max(phi * v.abs());
            ((v - vi).abs() / v.abs()).max((dv - dvi).abs() / scale)
        });
        if let Some(k) = mismatch.iter().rposition(|&e| !(e <= INTERPOLATION_TOLERANCE)) {
            tab.direct_below = tab.direct_below.max((first + k + 1) as f64 * h);
        }
        Ok(tab)
    }

    /// (W_Φ(t), W_Φ′(t), relative residual) by direct inversion.
    fn invert(&self, t: f64) -> (f64, f64, f64) {
        let (phi, q, w0) = (self.phi, self.model.q(), self.w0);
        let r = self.euler.invert(t, |s| {
            let f = 1.0 / (self.model.psi(s + phi) - q);
            [f, s * f - w0]
        });
        let [v, dv] = r.value;
        let rel_v = r.residual[0] / v.abs();
        let rel_dv = r.residual[1] / dv.abs().max(phi * v.abs());
        (v, dv, rel_v.max(rel_dv))
    }

    /// W_Φ″(t) from s²F(s) − s W_Φ(0) − W_Φ′(0+).
    fn invert_second(&self, t: f64, dw0: f64) -> f64 {
        let (phi, q, w0) = (self.phi, self.model.q(), self.w0);
        self.euler
            .invert(t, |s| [s * s / (self.model.psi(s + phi) - q) - s * w0 - dw0])
            .value[0]
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn n_grid(&self) -> usize {
        self.f.len() - 1
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Largest relative inversion residual over the table.
    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    /// Abscissa below which values are inverted pointwise rather than interpolated.
    pub fn direct_below(&self) -> f64 {
        self.direct_below
    }

    /// Tabulated W_Φ values (node i sits at x = i·step).
    pub fn tilted_values(&self) -> &[f64] {
        &self.f
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if x > self.x_max * (1.0 + 1e-12) {
            return Err(Error::OutOfDomain {
                x,
                x_max: self.x_max,
            });
        }
        Ok(())
    }

    /// W_Φ and its first two derivatives at x ∈ (0, x_max].
    fn tilted(&self, x: f64, order: usize) -> [f64; 3] {
        if x < self.direct_below {
            let (v, dv, _) = self.invert(x);
            let d2 = if order < 2 {
                0.0
            } else if let Some(d0) = self.dw0 {
                self.invert_second(x, d0)
            } else {
                // W′(0+) = ∞: Richardson-extrapolated centred differences.
                let delta = 0.25 * x.min(self.h);
                let cd = |d: f64| (self.invert(x + d).1 - self.invert(x - d).1) / (2.0 * d);
                (4.0 * cd(0.5 * delta) - cd(delta)) / 3.0
            };
            return [v, dv, d2];
        }
        self.interpolate(x)
    }

    fn interpolate(&self, x: f64) -> [f64; 3] {
        let n = self.n_grid();
        let i = ((x / self.h).floor() as usize).min(n - 1);
        let (x0, h) = (i as f64 * self.h, self.h);
        let b = (x - x0) / h;
        let a = 1.0 - b;
        // Cubic Hermite for W_Φ.
        let (f0, f1, d0, d1) = (self.f[i], self.f[i + 1], self.df[i], self.df[i + 1]);
        let v = f0 * (1.0 + 2.0 * b) * a * a
            + d0 * h * b * a * a
            + f1 * (3.0 - 2.0 * b) * b * b
            - d1 * h * b * b * a;
        // Spline of W_Φ′ on nodes 1..=n (moment index k ↔ node k + 1).
        let (m0, m1) = (self.moments[i - 1], self.moments[i]);
        let dv = a * d0 + b * d1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d2 = (d1 - d0) / h - (3.0 * a * a - 1.0) / 6.0 * h * m0
            + (3.0 * b * b - 1.0) / 6.0 * h * m1;
        [v, dv, d2]
    }

    /// W^(q) derivative of the given order (0..=2) at x > 0, untilted.
    pub(crate) fn eval_smooth(&self, x: f64, order: usize) -> Result<f64> {
        self.check_domain(x)?;
        let [f, df, d2f] = self.tilted(x, order);
        let p = self.phi;
        let g = (p * x).exp();
        Ok(match order {
            0 => g * f,
            1 => g * (p * f + df),
            _ => g * (p * p * f + 2.0 * p * df + d2f),
        })
    }

    /// W^(q)(x) for x ≥ 0, derivatives of order ≤ 3. Order 3 is a centred difference of
    /// order-2 values with the grid step (one-sided at the ends).
    pub(crate) fn eval(&self, x: f64, order: usize) -> Result<f64> {
        self.check_domain(x)?;
        if x == 0.0 {
            return if order == 0 { Ok(self.w0) } else { self.eval(self.h, order) };
        }
        if order <= 2 {
            return self.eval_smooth(x, order);
        }
        let h = self.h;
        let lo = (x - h).max(0.5 * x);
        let hi = (x + h).min(self.x_max);
        Ok((self.eval_smooth(hi, 2)? - self.eval_smooth(lo, 2)?) / (hi - lo))
    }

    /// W^(q)′ at the grid nodes 1..=n, straight from the table.
    pub(crate) fn derivative_table(&self) -> Vec<(f64, f64)> {
        (1..self.f.len())
            .map(|i| {
                let x = i as f64 * self.h;
                (x, (self.phi * x).exp() * (self.phi * self.f[i] + self.df[i]))
            })
            .collect()
    }
}

/// W^(q)′(0+): 2/σ² with a Gaussian part, (q + ν(0,∞))/d² for bounded variation with
/// finite activity, infinite (None) otherwise.
fn derivative_at_zero(model: &LevyModel) -> Option<f64> {
    if model.sigma() > 0.0 {
        return Some(2.0 / (model.sigma() * model.sigma()));
    }
    let d = model.bv_drift()?;
    let rate = model.density().total_rate()?;
    Some((model.q() + rate) / (d * d))
}

/// Moments (second derivatives) of the clamped cubic spline through `y` on a uniform
/// grid. End slopes come from fourth-order one-sided differences.
fn clamped_spline_moments(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len() - 1;
    let slope_l = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) / (12.0 * h);
    let slope_r =
        (25.0 * y[n] - 48.0 * y[n - 1] + 36.0 * y[n - 2] - 16.0 * y[n - 3] + 3.0 * y[n - 4]) / (12.0 * h);
    let mut sub = vec![1.0; n + 1];
    let mut diag = vec![4.0; n + 1];
    let mut sup = vec![1.0; n + 1];
    let mut rhs = vec![0.0; n + 1];
    diag[0] = 2.0;
    diag[n] = 2.0;
    sub[0] = 0.0;
    sup[n] = 0.0;
    rhs[0] = 6.0 * ((y[1] - y[0]) / h - slope_l) / h;
    rhs[n] = 6.0 * (slope_r - (y[n] - y[n - 1]) / h) / h;
    for i in 1..n {
        rhs[i] = 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h);
    }
    // Thomas algorithm.
    for i in 1..=n {
        let w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    let mut m = vec![0.0; n + 1];
    m[n] = rhs[n] / diag[n];
    for i in (0..n).rev() {
        m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
    }
    m
}
