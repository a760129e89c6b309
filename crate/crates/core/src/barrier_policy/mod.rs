//! Barrier strategies: the candidate optimal level a*, barrier value functions and the
//! grid checks of the sufficient optimality conditions.
//!
//! a* is the largest global minimiser of W^(q)′. The monotonicity condition asks W^(q)′ to be
//! nondecreasing beyond a*; strict convexity of W^(q)′ implies it.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{map_range, try_map_range, Execution};
use crate::levy_model::LevyModel;
use crate::scale_function::{Representation, ScaleFunction};

/// Minimum number of grid points in the coarse a* scan.
pub const MIN_SCAN_POINTS: usize = 2048;
/// Relative slack that puts a grid point in the argmin set.
pub const ARGMIN_TOLERANCE: f64 = 1e-9;
/// Absolute tolerance on a*.
pub const BARRIER_TOLERANCE: f64 = 1e-8;
/// Relative slack in the monotonicity test.
pub const MONOTONE_TOLERANCE: f64 = 1e-9;

/// Barrier strategy at level `a` with its value function v_a.
#[derive(Debug, Clone, Copy)]
pub struct BarrierPolicy<'a> {
    sf: &'a ScaleFunction,
    a: f64,
    w_a: f64,
    w1_a: f64,
}

impl<'a> BarrierPolicy<'a> {
    pub fn new(sf: &'a ScaleFunction, a: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::NegativeArgument(a));
        }
        let w1_a = sf.w1(a)?;
        if !(w1_a > 0.0) {
            return Err(Error::InvalidParameter {
                name: "a".into(),
                reason: format!("W′(a) = {w1_a} is not positive"),
            });
        }
        Ok(BarrierPolicy {
            sf,
            a,
            w_a: sf.w(a)?,
            w1_a,
        })
    }

    pub fn level(&self) -> f64 {
        self.a
    }

    pub fn scale_function(&self) -> &'a ScaleFunction {
        self.sf
    }

    /// v_a(x): W(x)/W′(a) up to the barrier, x − a + W(a)/W′(a) above it.
    pub fn value(&self, x: f64) -> Result<f64> {
        self.derivative(x, 0)
    }

    /// v_a^{(order)}(x) for order ≤ 3. At x = a derivatives are left limits.
    pub fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        if x < 0.0 {
            return Ok(0.0);
        }
        if x <= self.a {
            return Ok(self.sf.eval(x, order)? / self.w1_a);
        }
        Ok(match order {
            0 => x - self.a + self.w_a / self.w1_a,
            1 => 1.0,
            _ => 0.0,
        })
    }
}

/// Outcome of the a* search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BarrierSearch {
    pub a_star: f64,
    pub x_hi: f64,
    pub grid_points: usize,
    /// min over the scan of W^(q)′.
    pub min_w1: f64,
}

/// A grid check with its worst offending point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridCheck {
    pub holds: bool,
    pub worst_violation: f64,
    pub violation_x: Option<f64>,
    pub grid_points: usize,
}

/// Flat summary of the optimality checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalityCertificate {
    pub a_star: f64,
    pub condition2_holds: bool,
    pub convexity_holds: bool,
    pub worst_violation: f64,
    pub violation_x: Option<f64>,
    pub grid_points: usize,
    pub x_hi: f64,
}

fn uniform(lo: f64, hi: f64, n: usize) -> impl Fn(usize) -> f64 {
    move |i| if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 }
}

/// W^(q)′ on n + 1 uniform points of [lo, hi].
fn w1_grid(sf: &ScaleFunction, lo: f64, hi: f64, n: usize, exec: Execution) -> Result<Vec<(f64, f64)>> {
    let at = uniform(lo, hi, n);
    try_map_range(n + 1, exec, |i| {
        let x = at(i);
        Ok::<_, Error>((x, sf.w1(x)?))
    })
}

/// Whether [0, x_hi] brackets a*: W′(x_hi) exceeds twice the scanned minimum and W′
/// increases over the last tenth of the grid.
fn brackets(grid: &[(f64, f64)]) -> bool {
    let min = grid.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let last = grid.last().unwrap().1;
    let tail = &grid[grid.len() - grid.len() / 10 - 1..];
    last > 2.0 * min && tail.windows(2).all(|w| w[1].1 > w[0].1)
}

/// First guess for the search range.
pub fn initial_x_hi(model: &LevyModel) -> f64 {
    4.0 / model.phi() + 10.0
}

/// Grow x_hi geometrically from [`initial_x_hi`] until it brackets a*.
pub fn auto_x_hi(sf: &ScaleFunction, grid: usize, exec: Execution) -> Result<f64> {
    let mut x_hi = initial_x_hi(sf.model());
    loop {
        let hi = x_hi.min(sf.x_max());
        if brackets(&w1_grid(sf, 0.0, hi, grid, exec)?) {
            return Ok(hi);
        }
        if hi >= sf.x_max() || x_hi > 1e6 {
            return Err(Error::InvalidParameter {
                name: "x_max".into(),
                reason: format!("W′ is not bracketed on [0, {hi}]; enlarge the domain"),
            });
        }
        x_hi *= 2.0;
    }
}

/// Scale function on a domain that brackets a*, together with that bracket. Rational
/// models get an exponential sum; others are tabulated on [0, x_max] with x_max doubled
/// until the bracket holds, unless `x_max` is given.
pub fn bracketed_scale_function(
    model: &LevyModel,
    grid: usize,
    x_max: Option<f64>,
    exec: Execution,
) -> Result<(ScaleFunction, f64)> {
    if model.is_rational() {
        let sf = ScaleFunction::partial_fractions(model)?;
        let x_hi = match x_max {
            Some(x) => x,
            None => auto_x_hi(&sf, grid, exec)?,
        };
        return Ok((sf, x_hi));
    }
    if let Some(x) = x_max {
        let sf = ScaleFunction::numeric_inversion_with(model, x, grid, exec)?;
        return Ok((sf, x));
    }
    let mut x = initial_x_hi(model);
    loop {
        let sf = ScaleFunction::numeric_inversion_with(model, x, grid, exec)?;
        if brackets(&w1_grid(&sf, 0.0, x, grid, exec)?) {
            return Ok((sf, x));
        }
        if x > 1e6 {
            return Err(Error::InvalidParameter {
                name: "x_max".into(),
                reason: "W′ could not be bracketed".into(),
            });
        }
        x *= 2.0;
    }
}

/// Rightmost global minimiser of W^(q)′ on [0, x_hi].
pub fn optimal_barrier(sf: &ScaleFunction, x_hi: f64, grid: usize, exec: Execution) -> Result<BarrierSearch> {
    let n = grid.max(MIN_SCAN_POINTS);
    let scan = w1_grid(sf, 0.0, x_hi, n, exec)?;
    let min = scan.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let j = scan
        .iter()
        .rposition(|p| p.1 <= min * (1.0 + ARGMIN_TOLERANCE))
        .expect("scan is nonempty");
    let lo = scan[j.saturating_sub(1)].0;
    let hi = scan[(j + 1).min(n)].0;
    let a_star = refine_minimum(sf, lo, hi)?;
    Ok(BarrierSearch {
        a_star,
        x_hi,
        grid_points: n + 1,
        min_w1: min,
    })
}

/// Locate the minimiser of W′ inside [lo, hi]: bisection on the sign change of W″ when
/// there is one (a root of W″ is resolved to rounding), golden section otherwise.
fn refine_minimum(sf: &ScaleFunction, lo: f64, hi: f64) -> Result<f64> {
    let d_lo = sf.eval(lo, 2)?;
    let d_hi = sf.eval(hi, 2)?;
    if lo == 0.0 && d_lo >= 0.0 {
        // W′ already increasing at the origin.
        return Ok(0.0);
    }
    if d_lo < 0.0 && d_hi > 0.0 {
        let (mut a, mut b) = (lo, hi);
        while b - a > 1e-14 * b.max(1.0) {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if sf.eval(mid, 2)? < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        return Ok(0.5 * (a + b));
    }
    golden_section(|x| sf.w1(x), lo, hi)
}

fn golden_section<F: Fn(f64) -> Result<f64>>(f: F, lo: f64, hi: f64) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > BARRIER_TOLERANCE {
        // Ties move right, in keeping with the supremum in the definition of a*.
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    // Endpoint minima are returned exactly.
    let candidates = [(lo, f(lo)?), (x, f(x)?), (hi, f(hi)?)];
    let best = candidates
        .iter()
        .fold(candidates[0], |acc, &p| if p.1 <= acc.1 { p } else { acc });
    Ok(best.0)
}

/// Monotonicity condition: W^(q)′ nondecreasing on [a*, x_hi], up to relative slack 1e−9.
pub fn check_condition2(sf: &ScaleFunction, a_star: f64, x_hi: f64, grid: usize, exec: Execution) -> Result<GridCheck> {
    let n = grid.max(2);
    let pts = w1_grid(sf, a_star, x_hi.max(a_star), n, exec)?;
    let mut check = GridCheck {
        holds: true,
        worst_violation: 0.0,
        violation_x: None,
        grid_points: n + 1,
    };
    for w in pts.windows(2) {
        let (x0, v0) = w[0];
        let v1 = w[1].1;
        if v1 < v0 - MONOTONE_TOLERANCE * (1.0 + v0.abs()) {
            check.holds = false;
            if v0 - v1 > check.worst_violation {
                check.worst_violation = v0 - v1;
                check.violation_x = Some(x0);
            }
        }
    }
    Ok(check)
}

/// Strict convexity of W^(q)′ on (0, x_hi]: W‴ > 0 on the grid for exponential sums,
/// positive second differences of the W′ table for tabulated functions.
pub fn check_convexity(sf: &ScaleFunction, x_hi: f64, grid: usize, exec: Execution) -> Result<GridCheck> {
    let values: Vec<(f64, f64)> = match sf.representation() {
        Representation::ExpSum(_) => {
            let n = grid.max(2);
            let at = uniform(0.0, x_hi, n);
            try_map_range(n, exec, |i| {
                let x = at(i + 1);
                Ok::<_, Error>((x, sf.eval(x, 3)?))
            })?
        }
        Representation::Tabulated(t) => {
            let table: Vec<(f64, f64)> = t
                .derivative_table()
                .into_iter()
                .filter(|p| p.0 <= x_hi * (1.0 + 1e-12))
                .collect();
            map_range(table.len().saturating_sub(2), exec, |i| {
                (table[i + 1].0, table[i].1 - 2.0 * table[i + 1].1 + table[i + 2].1)
            })
        }
    };
    let mut check = GridCheck {
        holds: true,
        worst_violation: 0.0,
        violation_x: None,
        grid_points: values.len(),
    };
    for (x, v) in values {
        if !(v > 0.0) {
            check.holds = false;
            if -v >= check.worst_violation {
                check.worst_violation = -v;
                check.violation_x = Some(x);
            }
        }
    }
    Ok(check)
}

/// Run the a* search and both checks.
pub fn certify(sf: &ScaleFunction, x_hi: f64, grid: usize, exec: Execution) -> Result<OptimalityCertificate> {
    let search = optimal_barrier(sf, x_hi, grid, exec)?;
    let c2 = check_condition2(sf, search.a_star, x_hi, grid, exec)?;
    let cv = check_convexity(sf, x_hi, grid, exec)?;
    Ok(OptimalityCertificate {
        a_star: search.a_star,
        condition2_holds: c2.holds,
        convexity_holds: cv.holds,
        worst_violation: c2.worst_violation,
        violation_x: c2.violation_x,
        grid_points: search.grid_points,
        x_hi,
    })
}

/// Write `x,w1` rows at 17 significant digits.
pub fn write_w1_csv<W: Write>(sf: &ScaleFunction, mut out: W, xs: &[f64]) -> Result<()> {
    writeln!(out, "x,w1")?;
    for &x in xs {
        writeln!(out, "{x:.16e},{:.16e}", sf.w1(x)?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests;
