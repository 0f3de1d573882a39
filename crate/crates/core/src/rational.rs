//! Rational functions with all poles outside the closed unit disc, and the
//! Hardy-space machinery built on them: Taylor sections, deflation by powers
//! of `(z - w)`, and the H^2 pairing through Maclaurin coefficients.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::roots::poly_roots;

/// Margin by which denominator roots must clear the closed unit disc.
pub const POLE_MARGIN: f64 = 1e-9;

/// Series cap for the H^2 pairing; beyond it a warning is attached.
pub const SERIES_CAP: usize = 100_000;

/// A quotient of polynomials whose denominator has no zeros in
/// `|z| <= 1 + POLE_MARGIN`, so evaluation anywhere on the closed disc is
/// finite and Maclaurin coefficients decay geometrically.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
    /// Smallest modulus among denominator roots; `f64::INFINITY` for
    /// constant denominators.
    rho: f64,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::PoleInClosedDisc {
                root: "denominator is identically zero".into(),
                modulus: 0.0,
            });
        }
        let mut rho = f64::INFINITY;
        if den.degree().unwrap_or(0) > 0 {
            for root in poly_roots(&den)? {
                let m = root.norm();
                if m <= 1.0 + POLE_MARGIN {
                    return Err(Error::PoleInClosedDisc {
                        root: format!("{root}"),
                        modulus: m,
                    });
                }
                rho = rho.min(m);
            }
        }
        Ok(RationalFn { num, den, rho })
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFn {
            num: p,
            den: Poly::one(),
            rho: f64::INFINITY,
        }
    }

    pub fn zero() -> Self {
        RationalFn::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        RationalFn::from_poly(Poly::one())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    /// Smallest denominator root modulus (`INFINITY` for polynomials).
    pub fn pole_radius(&self) -> f64 {
        self.rho
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    pub fn scale(&self, s: Complex64) -> RationalFn {
        RationalFn {
            num: self.num.scale(s),
            den: self.den.clone(),
            rho: self.rho,
        }
    }

    /// Multiply by a polynomial (poles unchanged).
    pub fn mul_poly(&self, p: &Poly) -> RationalFn {
        RationalFn {
            num: self.num.mul(p),
            den: self.den.clone(),
            rho: self.rho,
        }
    }

    /// Multiply by `z^k`.
    pub fn shift_up(&self, k: usize) -> RationalFn {
        RationalFn {
            num: self.num.shift_up(k),
            den: self.den.clone(),
            rho: self.rho,
        }
    }

    pub fn add(&self, other: &RationalFn) -> Result<RationalFn> {
        if self.den == other.den {
            return Ok(RationalFn {
                num: self.num.add(&other.num),
                den: self.den.clone(),
                rho: self.rho,
            });
        }
        RationalFn::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &RationalFn) -> Result<RationalFn> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &RationalFn) -> Result<RationalFn> {
        RationalFn::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    /// The backward shift `(f - f(0)) / z`; exact because the shifted
    /// numerator vanishes at the origin by construction.
    pub fn backward_shift(&self) -> RationalFn {
        let f0 = self.eval(Complex64::new(0.0, 0.0));
        let shifted = self.num.sub(&self.den.scale(f0));
        let (q, _r) = shifted.div_linear(Complex64::new(0.0, 0.0));
        RationalFn {
            num: q,
            den: self.den.clone(),
            rho: self.rho,
        }
    }

    /// Taylor coefficients `f^(j)(w) / j!` for `j < m` at a point where the
    /// denominator does not vanish, via power-series division of the two
    /// shifted polynomials.
    pub fn taylor_coeffs(&self, w: Complex64, m: usize) -> Result<Vec<Complex64>> {
        let den_at_w = self.den.eval(w);
        if den_at_w.norm() < 1e-13 * self.den.max_coeff_modulus().max(1.0) {
            return Err(Error::PoleAtExpansionPoint {
                point: format!("{w}"),
            });
        }
        let num_t = self.num.taylor_at(w);
        let den_t = self.den.taylor_at(w);
        let mut out = vec![Complex64::new(0.0, 0.0); m];
        let b0 = den_t[0];
        for k in 0..m {
            let mut acc = num_t.get(k).copied().unwrap_or_default();
            for j in 1..=k {
                if let Some(&bj) = den_t.get(j) {
                    acc -= bj * out[k - j];
                }
            }
            out[k] = acc / b0;
        }
        Ok(out)
    }

    /// `f^(j)(w)` for `j < m`.
    pub fn derivatives_at(&self, w: Complex64, m: usize) -> Result<Vec<Complex64>> {
        let t = self.taylor_coeffs(w, m)?;
        let mut fact = 1.0;
        Ok(t.into_iter()
            .enumerate()
            .map(|(j, c)| {
                if j > 0 {
                    fact *= j as f64;
                }
                c * fact
            })
            .collect())
    }

    /// Maclaurin coefficients `f^(k)(0)/k!` for `k = 0..count`.
    pub fn maclaurin(&self, count: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); count];
        let b0 = self.den.coeff(0);
        let den_len = self.den.coeffs().len();
        for k in 0..count {
            let mut acc = self.num.coeff(k);
            for j in 1..den_len.min(k + 1) {
                acc -= self.den.coeff(j) * out[k - j];
            }
            out[k] = acc / b0;
        }
        out
    }
}

/// The `(m-1)`-th order Taylor polynomial of `f` at `w`, expanded into
/// ascending powers of `z`.
pub fn taylor_polynomial(f: &RationalFn, w: Complex64, m: usize) -> Result<Poly> {
    assert!(m >= 1, "taylor_polynomial needs a positive order");
    let t = f.taylor_coeffs(w, m)?;
    Ok(Poly::from_taylor_at(&t, w))
}

/// `(f - T_{m-1}(f, w)) / (z - w)^m`: subtract the Taylor polynomial and
/// divide out the exact root of order `m`.
///
/// The synthetic division residual must stay below `1e-10` relative to the
/// working numerator scale; a larger residual means the input was
/// inconsistent and is reported as `DeflationResidual`.
pub fn deflate(f: &RationalFn, w: Complex64, m: usize) -> Result<RationalFn> {
    assert!(m >= 1, "deflate needs a positive order");
    let taylor = taylor_polynomial(f, w, m)?;
    let mut num = f.num().sub(&taylor.mul(f.den()));
    let scale = num.max_coeff_modulus().max(f.num().max_coeff_modulus());
    if scale == 0.0 {
        return Ok(RationalFn {
            num: Poly::zero(),
            den: f.den().clone(),
            rho: f.rho,
        });
    }
    let tol = 1e-10 * scale;
    for _ in 0..m {
        let (q, r) = num.div_linear(w);
        if r.norm() > tol {
            return Err(Error::DeflationResidual {
                residual: r.norm(),
                tolerance: tol,
            });
        }
        num = q;
    }
    Ok(RationalFn {
        num,
        den: f.den().clone(),
        rho: f.rho,
    })
}

/// Value of the H^2 pairing together with an accuracy flag.
#[derive(Debug, Clone, Copy)]
pub struct H2Inner {
    pub value: Complex64,
    /// Set when the series hit `SERIES_CAP` before the tail bound fired.
    pub truncated: bool,
}

/// `sum_k fhat(k) conj(ghat(k))` over Maclaurin coefficients.
///
/// Coefficients decay like `rho^{-k}` with `rho` the smallest pole modulus,
/// so the series is truncated once the geometric tail bound drops below
/// `1e-14` of the accumulated norm scale.
pub fn h2_inner_checked(f: &RationalFn, g: &RationalFn) -> H2Inner {
    if f.is_zero() || g.is_zero() {
        return H2Inner {
            value: Complex64::new(0.0, 0.0),
            truncated: false,
        };
    }
    let rho = f.pole_radius().min(g.pole_radius());
    let fin = finite_series_len(f).max(finite_series_len(g));
    if rho.is_infinite() {
        // Both are polynomials: the sum is exact and finite.
        let n = fin;
        let fc = f.maclaurin(n);
        let gc = g.maclaurin(n);
        let value = fc
            .iter()
            .zip(gc.iter())
            .map(|(a, b)| a * b.conj())
            .sum();
        return H2Inner {
            value,
            truncated: false,
        };
    }
    let log_rho = rho.ln();
    // 1 / (1 - rho^{-2}) for the geometric tail.
    let tail_factor = 1.0 / (1.0 - (-2.0 * log_rho).exp());
    let block = 64usize;
    let mut fc_state = SeriesState::new(f);
    let mut gc_state = SeriesState::new(g);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut norm_f_sq = 0.0f64;
    let mut norm_g_sq = 0.0f64;
    let mut log_c = f64::NEG_INFINITY;
    let mut k = 0usize;
    loop {
        for _ in 0..block {
            let a = fc_state.next_coeff();
            let b = gc_state.next_coeff();
            sum += a * b.conj();
            norm_f_sq += a.norm_sqr();
            norm_g_sq += b.norm_sqr();
            let prod = a.norm() * b.norm();
            if prod > 0.0 {
                log_c = log_c.max(prod.ln() + 2.0 * k as f64 * log_rho);
            }
            k += 1;
        }
        if k >= SERIES_CAP {
            return H2Inner {
                value: sum,
                truncated: true,
            };
        }
        if k > fin {
            let log_tail = log_c - 2.0 * k as f64 * log_rho + tail_factor.ln();
            let scale = (norm_f_sq.sqrt() * norm_g_sq.sqrt()).max(1e-300);
            if log_tail < (1e-14 * scale).ln() {
                return H2Inner {
                    value: sum,
                    truncated: false,
                };
            }
        }
    }
}

/// The H^2 pairing value; accuracy warnings are dropped (see
/// `h2_inner_checked` when the flag matters).
pub fn h2_inner(f: &RationalFn, g: &RationalFn) -> Complex64 {
    h2_inner_checked(f, g).value
}

pub fn h2_norm_sq(f: &RationalFn) -> f64 {
    h2_inner(f, f).re
}

fn finite_series_len(f: &RationalFn) -> usize {
    f.num().degree().map_or(0, |d| d + 1)
}

/// Incremental Maclaurin coefficient generator.
struct SeriesState<'a> {
    f: &'a RationalFn,
    // ring buffer of the last deg(den) coefficients
    history: Vec<Complex64>,
    k: usize,
}

impl<'a> SeriesState<'a> {
    fn new(f: &'a RationalFn) -> Self {
        SeriesState {
            f,
            history: Vec::new(),
            k: 0,
        }
    }

    fn next_coeff(&mut self) -> Complex64 {
        let b0 = self.f.den().coeff(0);
        let den_len = self.f.den().coeffs().len();
        let mut acc = self.f.num().coeff(self.k);
        for j in 1..den_len.min(self.k + 1) {
            acc -= self.f.den().coeff(j) * self.history[self.k - j];
        }
        let c = acc / b0;
        self.history.push(c);
        self.k += 1;
        c
    }
}

impl Serialize for RationalFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            num: &'a Poly,
            den: &'a Poly,
        }
        Repr {
            num: &self.num,
            den: &self.den,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            num: Poly,
            den: Poly,
        }
        let r = Repr::deserialize(d)?;
        RationalFn::new(r.num, r.den).map_err(serde::de::Error::custom)
    }
}
