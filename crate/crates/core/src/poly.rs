//! Real-coefficient polynomials and their complex roots.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Polynomial with real coefficients stored in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    /// `u + root_shift`, i.e. the linear factor vanishing at `-root_shift`.
    pub fn linear(root_shift: f64) -> Self {
        Poly(vec![root_shift, 1.0])
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        *self.0.last().unwrap_or(&0.0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let c = (0..n)
            .map(|i| self.0.get(i).copied().unwrap_or(0.0) + other.0.get(i).copied().unwrap_or(0.0))
            .collect();
        Poly::new(c)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut c = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    pub fn scale(&self, k: f64) -> Poly {
        Poly::new(self.0.iter().map(|c| c * k).collect())
    }

    pub fn pow(&self, n: u32) -> Poly {
        (0..n).fold(Poly::constant(1.0), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly::constant(0.0);
        }
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        )
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// All complex roots: eigenvalues of the companion matrix, each polished by Newton
    /// steps on the polynomial itself. Returned roots are conjugate-symmetric: real roots
    /// carry an exactly zero imaginary part and complex roots come in exact pairs.
    pub fn roots(&self) -> Vec<Complex64> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = self.leading();
        let mut companion = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            companion[(i, n - 1)] = -self.0[i] / lead;
        }
        let raw = companion.complex_eigenvalues();
        let deriv = self.derivative();
        let mut polished: Vec<Complex64> = raw.iter().map(|&z| self.newton(&deriv, z)).collect();
        symmetrize(&mut polished);
        polished.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        polished
    }

    fn newton(&self, deriv: &Poly, mut z: Complex64) -> Complex64 {
        for _ in 0..8 {
            let p = self.eval_complex(z);
            let dp = deriv.eval_complex(z);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            let next = z - step;
            // Reject steps that do not reduce the residual (already at rounding level).
            if self.eval_complex(next).norm() >= p.norm() {
                break;
            }
            z = next;
            if step.norm() <= 1e-16 * z.norm().max(1.0) {
                break;
            }
        }
        z
    }
}

fn symmetrize(roots: &mut [Complex64]) {
    let n = roots.len();
    let mut paired = vec![false; n];
    for i in 0..n {
        if paired[i] {
            continue;
        }
        let z = roots[i];
        let scale = z.norm().max(1.0);
        if z.im.abs() <= 1e-12 * scale {
            roots[i] = Complex64::new(z.re, 0.0);
            paired[i] = true;
            continue;
        }
        // Closest unpaired conjugate partner.
        let partner = (0..n)
            .filter(|&j| j != i && !paired[j])
            .min_by(|&a, &b| {
                (roots[a] - z.conj())
                    .norm()
                    .total_cmp(&(roots[b] - z.conj()).norm())
            });
        if let Some(j) = partner {
            let re = 0.5 * (z.re + roots[j].re);
            let im = 0.5 * (z.im.abs() + roots[j].im.abs());
            roots[i] = Complex64::new(re, im.copysign(z.im));
            roots[j] = roots[i].conj();
            paired[i] = true;
            paired[j] = true;
        }
    }
}

/// Smallest pairwise distance between roots, relative to their magnitude.
pub fn min_relative_separation(roots: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            let scale = roots[i].norm().max(roots[j].norm()).max(1.0);
            best = best.min((roots[i] - roots[j]).norm() / scale);
        }
    }
    best
}
