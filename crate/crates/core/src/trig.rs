//! Hermitian trigonometric (Laurent) polynomials restricted to the unit
//! circle: `R(z) = c_0 + sum_{k>=1} (c_k z^k + conj(c_k) z^{-k})`.

use num_complex::Complex64;

use crate::poly::{Poly, TRIM_TOL};

/// Hermitian Laurent polynomial on `|z| = 1`. Storage forces the values to
/// be real: only the coefficients for nonnegative powers are kept and `c_0`
/// is real.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    /// `c[k]` multiplies `z^k` (and implicitly `conj(c[k])` multiplies
    /// `z^{-k}`); `c[0].im == 0`.
    c: Vec<Complex64>,
}

impl TrigPoly {
    pub fn new(mut c: Vec<Complex64>) -> Self {
        if c.is_empty() {
            c.push(Complex64::new(0.0, 0.0));
        }
        c[0] = Complex64::new(c[0].re, 0.0);
        let mut t = TrigPoly { c };
        t.trim();
        t
    }

    pub fn zero() -> Self {
        TrigPoly {
            c: vec![Complex64::new(0.0, 0.0)],
        }
    }

    pub fn constant(v: f64) -> Self {
        TrigPoly {
            c: vec![Complex64::new(v, 0.0)],
        }
    }

    /// `|p(z)|^2` on the circle: `c_k = sum_j phat_{j+k} conj(phat_j)`.
    pub fn from_modulus_squared(p: &Poly) -> Self {
        let n = p.coeffs().len();
        if n == 0 {
            return TrigPoly::zero();
        }
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        for (k, slot) in c.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n - k {
                acc += p.coeff(j + k) * p.coeff(j).conj();
            }
            *slot = acc;
        }
        TrigPoly::new(c)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.c
    }

    /// Highest stored power (the trigonometric order).
    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        let n = self.c.len().max(other.c.len());
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        for (k, slot) in c.iter_mut().enumerate() {
            let a = self.c.get(k).copied().unwrap_or_default();
            let b = other.c.get(k).copied().unwrap_or_default();
            *slot = a + b;
        }
        TrigPoly::new(c)
    }

    pub fn scale(&self, s: f64) -> TrigPoly {
        TrigPoly::new(self.c.iter().map(|&v| v * s).collect())
    }

    /// Value at a point of the unit circle (real by construction).
    pub fn eval(&self, z: Complex64) -> f64 {
        let mut acc = self.c[0].re;
        let mut zk = Complex64::new(1.0, 0.0);
        for &ck in self.c.iter().skip(1) {
            zk *= z;
            acc += 2.0 * (ck * zk).re;
        }
        acc
    }

    pub fn eval_angle(&self, theta: f64) -> f64 {
        self.eval(Complex64::from_polar(1.0, theta))
    }

    /// The lift `z^n R(z)` as an ordinary polynomial of degree `2n`.
    pub fn lift(&self) -> Poly {
        let n = self.order();
        let mut d = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
        for k in 0..=n {
            d[n + k] = self.c[k];
            d[n - k] = self.c[k].conj();
        }
        Poly::new(d)
    }

    /// `(min, max)` over equally spaced circle samples.
    pub fn circle_range(&self, samples: usize) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..samples {
            let v = self.eval_angle(2.0 * std::f64::consts::PI * k as f64 / samples as f64);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    fn trim(&mut self) {
        let max = self.c.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let tol = TRIM_TOL * max;
        while self.c.len() > 1 {
            if self.c.last().unwrap().norm() <= tol {
                self.c.pop();
            } else {
                break;
            }
        }
    }
}
