//! Euler (Abate–Whitt) Fourier-series inversion of Laplace transforms.
//!
//! f(t) ≈ e^{A/2}/t · [½ Re F(A/2t) + Σ_{k≥1} (−1)^k Re F((A + 2kπi)/2t)], with the
//! alternating tail summed by binomial averaging of the partial sums n..n+m.
//! The discretisation error is about e^{−A} times the size of f on [t, ∞), so the
//! transform should belong to a bounded function (the tilted scale function does).

use std::f64::consts::PI;

use num_complex::Complex64;

/// Node set and weights for one inversion scheme.
#[derive(Debug, Clone)]
pub(crate) struct Euler {
    a: f64,
    n: usize,
    weights: Vec<f64>,
}

/// Inverted values of several transforms sharing the same nodes.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Inverted<const K: usize> {
    pub value: [f64; K],
    /// |E(n+1, m) − E(n, m)| per transform.
    pub residual: [f64; K],
}

impl Default for Euler {
    fn default() -> Self {
        Self::new(25.0, 30, 15)
    }
}

impl Euler {
    pub(crate) fn new(a: f64, n: usize, m: usize) -> Self {
        let mut weights = vec![1.0; m + 1];
        for j in 1..=m {
            weights[j] = weights[j - 1] * (m + 1 - j) as f64 / j as f64;
        }
        let norm = 0.5f64.powi(m as i32);
        weights.iter_mut().for_each(|w| *w *= norm);
        Euler { a, n, weights }
    }

    fn terms(&self) -> usize {
        self.n + self.weights.len() + 1
    }

    /// Invert `K` transforms at `t > 0`. `transforms(s)` returns all of them at `s`
    /// so that expensive shared work (here ψ) is done once per node.
    pub(crate) fn invert<const K: usize, F>(&self, t: f64, transforms: F) -> Inverted<K>
    where
        F: Fn(Complex64) -> [Complex64; K],
    {
        let m = self.weights.len() - 1;
        let mut partial = [0.0; K];
        let mut sums = vec![[0.0; K]; self.terms()];
        for (k, slot) in sums.iter_mut().enumerate() {
            let s = Complex64::new(self.a, 2.0 * PI * k as f64) / (2.0 * t);
            let f = transforms(s);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let factor = if k == 0 { 0.5 } else { sign };
            for i in 0..K {
                partial[i] += factor * f[i].re;
            }
            *slot = partial;
        }
        let scale = (0.5 * self.a).exp() / t;
        let euler = |start: usize, i: usize| -> f64 {
            (0..=m).map(|j| self.weights[j] * sums[start + j][i]).sum::<f64>() * scale
        };
        let mut value = [0.0; K];
        let mut residual = [0.0; K];
        for i in 0..K {
            value[i] = euler(self.n, i);
            residual[i] = (euler(self.n + 1, i) - value[i]).abs();
        }
        Inverted { value, residual }
    }
}
