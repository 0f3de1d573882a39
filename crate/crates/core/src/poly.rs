//! Dense complex polynomials in ascending powers of `z`.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative tolerance below which trailing coefficients are trimmed away.
pub const TRIM_TOL: f64 = 1e-12;

/// A polynomial with complex coefficients, `coeffs[k]` multiplying `z^k`.
///
/// The zero polynomial is the empty coefficient vector. Trailing coefficients
/// whose modulus falls below `TRIM_TOL` relative to the largest coefficient
/// are removed on construction, so `degree` is well defined.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Poly::new(vec![c])
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The monomial `z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); k + 1];
        c[k] = Complex64::new(1.0, 0.0);
        Poly { coeffs: c }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut p = Poly::one();
        for &r in roots {
            p = p.mul(&Poly::new(vec![-r, Complex64::new(1.0, 0.0)]));
        }
        p
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^k`, zero beyond the stored length.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn max_coeff_modulus(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn trim(&mut self) {
        let max = self.max_coeff_modulus();
        if max == 0.0 {
            self.coeffs.clear();
            return;
        }
        let tol = TRIM_TOL * max;
        while let Some(last) = self.coeffs.last() {
            if last.norm() <= tol {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        if self.coeffs.iter().all(|c| c.norm() <= tol) {
            self.coeffs.clear();
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        for (k, slot) in c.iter_mut().enumerate() {
            *slot = self.coeff(k) + other.coeff(k);
        }
        Poly::new(c)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    /// Multiplication by `z^k`.
    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Complex64::new(0.0, 0.0); k];
        c.extend_from_slice(&self.coeffs);
        Poly { coeffs: c }
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn pow(&self, k: usize) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Synthetic division by `(z - w)`: returns `(quotient, remainder)` with
    /// `self = quotient * (z - w) + remainder`.
    pub fn div_linear(&self, w: Complex64) -> (Poly, Complex64) {
        if self.coeffs.is_empty() {
            return (Poly::zero(), Complex64::new(0.0, 0.0));
        }
        let n = self.coeffs.len();
        let mut q = vec![Complex64::new(0.0, 0.0); n.saturating_sub(1)];
        let mut carry = Complex64::new(0.0, 0.0);
        for k in (0..n).rev() {
            let value = self.coeffs[k] + carry * w;
            if k == 0 {
                return (Poly::new(q), value);
            }
            q[k - 1] = value;
            carry = value;
        }
        unreachable!()
    }

    /// Coefficients of the expansion of `self` in powers of `(z - w)`,
    /// i.e. the full Taylor coefficient list at `w` (exact, Horner shifts).
    pub fn taylor_at(&self, w: Complex64) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut rest = self.clone();
        while !rest.is_zero() {
            let (q, r) = rest.div_linear(w);
            out.push(r);
            rest = q;
        }
        if out.is_empty() {
            out.push(Complex64::new(0.0, 0.0));
        }
        out
    }

    /// Rebuild an ascending-power polynomial from Taylor coefficients at `w`:
    /// `sum_k t[k] (z - w)^k`.
    pub fn from_taylor_at(t: &[Complex64], w: Complex64) -> Poly {
        let mut acc = Poly::zero();
        let lin = Poly::new(vec![-w, Complex64::new(1.0, 0.0)]);
        for &c in t.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(c));
        }
        acc
    }

    /// Entrywise complex conjugation of the coefficients, i.e. `conj(p(conj(z)))`.
    pub fn conj_coeffs(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// Coefficient reversal with respect to length `n + 1` (no conjugation),
    /// i.e. `z^n p(1/z)`.
    pub fn reverse(&self, n: usize) -> Result<Poly> {
        let deg = self.degree().unwrap_or(0);
        if deg > n {
            return Err(Error::InvalidDegree { degree: deg, n });
        }
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in 0..=n {
            c[n - k] = self.coeff(k);
        }
        Ok(Poly::new(c))
    }
}

/// The conjugate reciprocal `p~(z) = z^n conj(p(1 / conj(z)))`: the length
/// `n + 1` coefficient vector of `p`, reversed and entrywise conjugated.
pub fn conjugate_reciprocal(p: &Poly, n: usize) -> Result<Poly> {
    if let Some(deg) = p.degree() {
        if deg > n {
            return Err(Error::InvalidDegree { degree: deg, n });
        }
    }
    let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
    for k in 0..=n {
        c[n - k] = p.coeff(k).conj();
    }
    Ok(Poly::new(c))
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(deserializer)?;
        for p in &pairs {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(D::Error::custom("non-finite polynomial coefficient"));
            }
        }
        Ok(Poly::new(
            pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trims_trailing_noise() {
        let p = Poly::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(1e-15, 0.0)]);
        assert_eq!(p.degree(), Some(1));
        let z = Poly::new(vec![c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(z.is_zero());
        // trim is relative: a uniformly tiny polynomial is not the zero one
        let tiny = Poly::new(vec![c(0.0, 0.0), c(1e-30, 0.0)]);
        assert_eq!(tiny.degree(), Some(1));
    }

    #[test]
    fn degree_multiplies() {
        let p = Poly::from_real(&[1.0, 2.0, 3.0]);
        let q = Poly::from_real(&[-1.0, 1.0]);
        assert_eq!(
            p.mul(&q).degree().unwrap(),
            p.degree().unwrap() + q.degree().unwrap()
        );
    }

    #[test]
    fn conjugate_reciprocal_examples() {
        // p = z, n = 1 -> 1
        let p = Poly::from_real(&[0.0, 1.0]);
        let r = conjugate_reciprocal(&p, 1).unwrap();
        assert_eq!(r.coeffs(), &[c(1.0, 0.0)]);

        // p = i z^2, n = 2 -> -i
        let p = Poly::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        let r = conjugate_reciprocal(&p, 2).unwrap();
        assert_eq!(r.coeffs(), &[c(0.0, -1.0)]);
    }

    #[test]
    fn conjugate_reciprocal_is_involution() {
        let p = Poly::new(vec![c(0.5, -0.25), c(0.0, 2.0), c(-1.0, 1.0)]);
        let twice = conjugate_reciprocal(&conjugate_reciprocal(&p, 4).unwrap(), 4).unwrap();
        for k in 0..5 {
            assert!((twice.coeff(k) - p.coeff(k)).norm() < 1e-15);
        }
    }

    #[test]
    fn conjugate_reciprocal_rejects_large_degree() {
        let p = Poly::from_real(&[1.0, 1.0, 1.0]);
        assert!(matches!(
            conjugate_reciprocal(&p, 1),
            Err(Error::InvalidDegree { .. })
        ));
    }

    #[test]
    fn conjugate_reciprocal_preserves_circle_modulus() {
        let p = Poly::new(vec![c(0.3, -1.2), c(2.0, 0.7), c(-0.4, 0.1), c(1.0, 1.0)]);
        let r = conjugate_reciprocal(&p, 3).unwrap();
        for k in 0..128 {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 128.0;
            let z = Complex64::from_polar(1.0, t);
            assert!((p.eval(z).norm() - r.eval(z).norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn taylor_shift_round_trip() {
        let p = Poly::new(vec![c(1.0, 2.0), c(-0.5, 0.0), c(3.0, -1.0), c(0.0, 0.25)]);
        let w = c(0.6, -0.8);
        let t = p.taylor_at(w);
        let back = Poly::from_taylor_at(&t, w);
        for k in 0..4 {
            assert!((back.coeff(k) - p.coeff(k)).norm() < 1e-12);
        }
    }

    #[test]
    fn div_linear_reconstructs() {
        let p = Poly::from_real(&[2.0, -3.0, 0.0, 1.0]);
        let w = c(1.5, 0.5);
        let (q, r) = p.div_linear(w);
        let back = q.mul(&Poly::new(vec![-w, c(1.0, 0.0)])).add(&Poly::constant(r));
        for k in 0..4 {
            assert!((back.coeff(k) - p.coeff(k)).norm() < 1e-12);
        }
    }

    #[test]
    fn serde_round_trip() {
        let p = Poly::new(vec![c(1.0, -2.0), c(0.5, 0.0)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[[1.0,-2.0],[0.5,0.0]]");
        let q: Poly = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }
}
