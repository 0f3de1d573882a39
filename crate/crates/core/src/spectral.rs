//! Fejér-Riesz spectral factorization of strictly positive trigonometric
//! polynomials and the mate computations built on it.

use num_complex::Complex64;
use serde::Serialize;

use crate::dirichlet::SpaceSpec;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::RationalFn;
use crate::roots::poly_roots;
use crate::trig::TrigPoly;

/// Circle samples used for the positivity precheck and scale matching.
const POSITIVITY_SAMPLES: usize = 512;

/// Relative min/max ratio below which the factorization is refused.
const DEGENERATE_RATIO: f64 = 1e-12;

/// Relative min/max ratio below which the result carries a warning.
const NEAR_DEGENERATE_RATIO: f64 = 1e-9;

/// Root pairing tolerance for the lifted polynomial.
const PAIRING_TOL: f64 = 1e-6;

/// Outcome of a Fejér-Riesz factorization: `|q|^2 = R` on the circle with
/// all roots of `q` outside the closed disc. The phase of `q` is arbitrary
/// here; mate constructors normalize it through `a(0) > 0`.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub q: Poly,
    pub warnings: Vec<String>,
}

/// The mate data of a constructed space: `a = p_A / q` with `a(0) > 0`.
#[derive(Debug, Clone, Serialize)]
pub struct MateResult {
    #[serde(rename = "p_A")]
    pub p_a: Poly,
    pub q: Poly,
    pub a: RationalFn,
    pub warnings: Vec<String>,
}

/// Factor a strictly positive trigonometric polynomial as `|q(z)|^2` with
/// `q` zero-free in the closed unit disc.
///
/// The lift `z^n R(z)` has roots in pairs `(rho, 1/conj(rho))`; the factor
/// takes one root per pair (the one outside the circle) and fixes the
/// positive scale by matching `R` at its largest sample.
pub fn fejer_riesz(r: &TrigPoly) -> Result<Factorization> {
    let mut warnings = Vec::new();
    let (lo, hi) = r.circle_range(POSITIVITY_SAMPLES);
    if !(hi > 0.0) || lo <= DEGENERATE_RATIO * hi {
        return Err(Error::DegenerateFactorization {
            detail: format!("circle samples range [{lo:.3e}, {hi:.3e}]"),
        });
    }
    if lo <= NEAR_DEGENERATE_RATIO * hi {
        warnings.push(format!(
            "near-degenerate factorization: min/max circle ratio {:.3e}",
            lo / hi
        ));
    }
    let n = r.order();
    if n == 0 {
        return Ok(Factorization {
            q: Poly::constant(Complex64::new(r.coeffs()[0].re.sqrt(), 0.0)),
            warnings,
        });
    }
    let lift = r.lift();
    let roots = poly_roots(&lift)?;
    let mut outside: Vec<Complex64> = Vec::new();
    let mut inside: Vec<Complex64> = Vec::new();
    for root in roots {
        if root.norm() > 1.0 {
            outside.push(root);
        } else {
            inside.push(root);
        }
    }
    if outside.len() != n || inside.len() != n {
        return Err(Error::RootPairingFailure {
            detail: format!(
                "lift of order {n} split into {} outside / {} inside roots",
                outside.len(),
                inside.len()
            ),
        });
    }
    // Every outside root must see its reflected partner among the inside
    // roots; each partner is consumed once.
    let mut unused = inside;
    for &rho in &outside {
        let mirror = 1.0 / rho.conj();
        let best = unused
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - mirror).norm().total_cmp(&(b.1 - mirror).norm()));
        match best {
            Some((idx, &cand)) if (cand - mirror).norm() <= PAIRING_TOL * (1.0 + mirror.norm()) => {
                unused.swap_remove(idx);
            }
            _ => {
                return Err(Error::RootPairingFailure {
                    detail: format!("no partner within {PAIRING_TOL:.1e} for root {rho}"),
                });
            }
        }
    }
    // Positive scale from the best-conditioned sample (where R is largest).
    let mut best_z = Complex64::new(1.0, 0.0);
    let mut best_v = f64::NEG_INFINITY;
    for k in 0..POSITIVITY_SAMPLES {
        let z = Complex64::from_polar(
            1.0,
            2.0 * std::f64::consts::PI * k as f64 / POSITIVITY_SAMPLES as f64,
        );
        let v = r.eval(z);
        if v > best_v {
            best_v = v;
            best_z = z;
        }
    }
    let monic = Poly::from_roots(&outside);
    let s = (best_v / monic.eval(best_z).norm_sqr()).sqrt();
    let q = monic.scale(Complex64::new(s, 0.0));
    // Sanity: the factorization must reproduce R on the sample grid.
    let mut max_rel: f64 = 0.0;
    for k in 0..POSITIVITY_SAMPLES {
        let z = Complex64::from_polar(
            1.0,
            2.0 * std::f64::consts::PI * k as f64 / POSITIVITY_SAMPLES as f64,
        );
        let rv = r.eval(z);
        max_rel = max_rel.max((q.eval(z).norm_sqr() - rv).abs() / hi);
    }
    if max_rel > 1e-6 {
        return Err(Error::Internal {
            detail: format!("factorization residual {max_rel:.3e} on circle samples"),
        });
    }
    if max_rel > 1e-9 {
        warnings.push(format!(
            "factorization residual {max_rel:.3e} exceeds the nominal 1e-9 target"
        ));
    }
    Ok(Factorization { q, warnings })
}

/// `p_A = prod (z - w_j)^{m_j}` for a spec.
pub fn characteristic_factor(spec: &SpaceSpec) -> Poly {
    let mut p = Poly::one();
    for pt in &spec.points {
        p = p.mul(&Poly::from_roots(&[pt.point()]).pow(pt.m));
    }
    p
}

/// The right side of the mate identity as a trigonometric polynomial:
/// `R = |p_A|^2 + sum_j |p_A/(z-w_j)^{m_j}|^2 sum_i |p_ij|^2`.
pub fn mate_modulus_data(spec: &SpaceSpec) -> TrigPoly {
    let p_a = characteristic_factor(spec);
    let mut r = TrigPoly::from_modulus_squared(&p_a);
    for (j, pt) in spec.points.iter().enumerate() {
        // cofactor prod_{t != j} (z - w_t)^{m_t}
        let mut h = Poly::one();
        for (t, other) in spec.points.iter().enumerate() {
            if t != j {
                h = h.mul(&Poly::from_roots(&[other.point()]).pow(other.m));
            }
        }
        for p in &pt.weights {
            r = r.add(&TrigPoly::from_modulus_squared(&h.mul(p)));
        }
    }
    r
}

/// Mate of the space defined by `spec`: factor the modulus identity, then
/// normalize the phase of `q` so that `a(0) = p_A(0)/q(0)` is real positive.
pub fn mate_from_spec(spec: &SpaceSpec) -> Result<MateResult> {
    for (j, pt) in spec.points.iter().enumerate() {
        if !pt.is_strict() {
            return Err(Error::DegenerateFactorization {
                detail: format!(
                    "all weights vanish at point {j}; the modulus identity degenerates on the circle"
                ),
            });
        }
    }
    let p_a = characteristic_factor(spec);
    let r = mate_modulus_data(spec);
    let fact = fejer_riesz(&r)?;
    finish_mate(p_a, fact)
}

fn finish_mate(p_a: Poly, fact: Factorization) -> Result<MateResult> {
    let q0 = fact.q.eval(Complex64::new(0.0, 0.0));
    let u = p_a.eval(Complex64::new(0.0, 0.0)) / q0;
    let phase = u / u.norm();
    let q = fact.q.scale(phase);
    let a = RationalFn::new(p_a.clone(), q.clone())?;
    Ok(MateResult {
        p_a,
        q,
        a,
        warnings: fact.warnings,
    })
}

/// The strict `2m`-isometry normal form at a single circle point:
/// `|q|^2 = |p|^2 + |z - w|^{2m}` with `b = p/q`, `a = (z-w)^m/q`, `a(0) > 0`.
///
/// `b` comes out with the phase inherited from the normalized `q`; it is
/// only meaningful up to a unimodular constant.
pub fn mate_rank_one(w: Complex64, m: usize, p: &Poly) -> Result<(RationalFn, RationalFn, Poly)> {
    if (w.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidSpec {
            detail: format!("rank-one point {w} is not on the unit circle"),
        });
    }
    if m == 0 {
        return Err(Error::InvalidSpec {
            detail: "rank-one order m must be positive".into(),
        });
    }
    let scale = p.max_coeff_modulus();
    if p.degree().unwrap_or(0) > m {
        return Err(Error::InvalidSpec {
            detail: format!("degree of p exceeds m = {m}"),
        });
    }
    if scale == 0.0 || p.eval(Complex64::new(0.0, 0.0)).norm() > 1e-10 * scale {
        return Err(Error::InvalidSpec {
            detail: "rank-one numerator must satisfy p(0) = 0 and p != 0".into(),
        });
    }
    if p.eval(w).norm() <= 1e-10 * scale {
        return Err(Error::NotStrict);
    }
    let zw_m = Poly::from_roots(&[w]).pow(m);
    let r = TrigPoly::from_modulus_squared(p).add(&TrigPoly::from_modulus_squared(&zw_m));
    let fact = fejer_riesz(&r)?;
    let mate = finish_mate(zw_m, fact)?;
    let b = RationalFn::new(p.clone(), mate.q.clone())?;
    Ok((b, mate.a, mate.q))
}

/// Theorem 1.2 route to the mate: from the characteristic polynomial `p` of
/// `T*|_N` (roots in the closed disc) and the characteristic polynomial `q`
/// of `L|_N` (roots in the open disc), form
/// `a(z) = a0 prod(1 - w_i z) / prod(1 - alpha_i z)`.
pub fn mate_from_char_polys(p: &Poly, q: &Poly, a0: f64) -> Result<RationalFn> {
    if a0 <= 0.0 {
        return Err(Error::InvalidSpec {
            detail: "mate normalization a(0) must be positive".into(),
        });
    }
    let (Some(dp), Some(dq)) = (p.degree(), q.degree()) else {
        return Err(Error::ZeroPolynomial);
    };
    if dp != dq {
        return Err(Error::DimensionMismatch {
            detail: format!("characteristic polynomials have degrees {dp} and {dq}"),
        });
    }
    for root in poly_roots(p)? {
        if root.norm() > 1.0 + 1e-8 {
            return Err(Error::InvalidSpectrum {
                detail: format!("root {root} of char(T*|N) leaves the closed disc"),
            });
        }
    }
    for root in poly_roots(q)? {
        if root.norm() >= 1.0 - 1e-9 {
            return Err(Error::InvalidSpectrum {
                detail: format!("root {root} of char(L|N) leaves the open disc"),
            });
        }
    }
    // prod(1 - w_i z) is the plain coefficient reversal of the monic p.
    let p_monic = p.scale(Complex64::new(1.0, 0.0) / p.coeff(dp));
    let q_monic = q.scale(Complex64::new(1.0, 0.0) / q.coeff(dq));
    let num = p_monic.reverse(dp)?.scale(Complex64::new(a0, 0.0));
    let den = q_monic.reverse(dq)?;
    RationalFn::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::SpacePoint;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn circle(k: usize, n: usize) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64)
    }

    fn two_point_spec() -> SpaceSpec {
        SpaceSpec::new(vec![
            SpacePoint {
                theta: 0.0,
                m: 1,
                weights: vec![Poly::from_real(&[0.75])],
            },
            SpacePoint {
                theta: std::f64::consts::PI,
                m: 1,
                weights: vec![Poly::from_real(&[0.75])],
            },
        ])
        .unwrap()
    }

    #[test]
    fn factors_the_paper_trig_polynomial() {
        // R = 17/4 - 2 Re z^2  ->  q = (z^2 - 4)/2 up to a unimodular factor
        let r = TrigPoly::new(vec![c(4.25, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let fact = fejer_riesz(&r).unwrap();
        assert!(fact.warnings.is_empty());
        let expect = Poly::from_real(&[-2.0, 0.0, 0.5]);
        let ratio = fact.q.coeff(2) / expect.coeff(2);
        assert!((ratio.norm() - 1.0).abs() < 1e-10, "unimodular ratio");
        for k in 0..3 {
            assert!((fact.q.coeff(k) - expect.coeff(k) * ratio).norm() < 1e-10);
        }
    }

    #[test]
    fn factors_constants() {
        let r = TrigPoly::constant(4.0);
        let fact = fejer_riesz(&r).unwrap();
        assert_eq!(fact.q.degree(), Some(0));
        assert!((fact.q.coeff(0) - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn round_trips_a_known_factor() {
        let q0 = Poly::from_real(&[1.0, 0.5]); // 1 + z/2, root at -2
        let r = TrigPoly::from_modulus_squared(&q0);
        let fact = fejer_riesz(&r).unwrap();
        for k in 0..128 {
            let z = circle(k, 128);
            assert!((fact.q.eval(z).norm() - q0.eval(z).norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_nonpositive_data() {
        // |z - 1|^2 vanishes on the circle
        let r = TrigPoly::from_modulus_squared(&Poly::from_real(&[-1.0, 1.0]));
        assert!(matches!(
            fejer_riesz(&r),
            Err(Error::DegenerateFactorization { .. })
        ));
    }

    #[test]
    fn near_degenerate_attaches_warning() {
        // |z - 1|^2 + tiny: strictly positive but close to the boundary case
        let base = TrigPoly::from_modulus_squared(&Poly::from_real(&[-1.0, 1.0]));
        let r = base.add(&TrigPoly::constant(4e-10));
        let fact = fejer_riesz(&r).unwrap();
        assert!(!fact.warnings.is_empty());
    }

    #[test]
    fn mate_of_the_two_point_space() {
        let mate = mate_from_spec(&two_point_spec()).unwrap();
        // p_A = z^2 - 1
        assert!((mate.p_a.coeff(0) - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((mate.p_a.coeff(2) - c(1.0, 0.0)).norm() < 1e-14);
        // q = (z^2 - 4)/2 exactly (phase fixed by a(0) = 1/2 > 0)
        let expect_q = Poly::from_real(&[-2.0, 0.0, 0.5]);
        for k in 0..3 {
            assert!(
                (mate.q.coeff(k) - expect_q.coeff(k)).norm() < 1e-9,
                "q coefficient {k}: {}",
                mate.q.coeff(k)
            );
        }
        // a = 2(z^2-1)/(z^2-4)
        let expect_a = RationalFn::new(
            Poly::from_real(&[-2.0, 0.0, 2.0]),
            Poly::from_real(&[-4.0, 0.0, 1.0]),
        )
        .unwrap();
        for k in 0..32 {
            let z = Complex64::from_polar(0.8 * ((k % 4) as f64 + 1.0) / 4.0, 0.7 * k as f64);
            assert!((mate.a.eval(z) - expect_a.eval(z)).norm() < 1e-9);
        }
        let a0 = mate.a.eval(c(0.0, 0.0));
        assert!(a0.re > 0.0 && a0.im.abs() < 1e-12);
    }

    #[test]
    fn mate_of_the_empty_space() {
        let mate = mate_from_spec(&SpaceSpec::empty()).unwrap();
        assert_eq!(mate.q.degree(), Some(0));
        for k in 0..8 {
            let z = Complex64::from_polar(0.5, k as f64);
            assert!((mate.a.eval(z) - c(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn mate_of_single_point_space() {
        // {w = 1, m = 1, p = 1/sqrt(2)}: |q|^2 = |z-1|^2 + 1/2 on the circle
        let spec = SpaceSpec::new(vec![SpacePoint {
            theta: 0.0,
            m: 1,
            weights: vec![Poly::from_real(&[std::f64::consts::FRAC_1_SQRT_2])],
        }])
        .unwrap();
        let mate = mate_from_spec(&spec).unwrap();
        let a0 = mate.a.eval(c(0.0, 0.0));
        assert!((a0 - c(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-10);
        for k in 0..64 {
            let z = circle(k, 64);
            let lhs = mate.q.eval(z).norm_sqr();
            let rhs = (z - c(1.0, 0.0)).norm_sqr() + 0.5;
            assert!((lhs - rhs).abs() < 1e-10);
        }
        // a = (1-z)/(sqrt(2) (1 - z/2)) as displayed
        let expect = RationalFn::new(
            Poly::from_real(&[1.0, -1.0]),
            Poly::from_real(&[2.0f64.sqrt(), -std::f64::consts::FRAC_1_SQRT_2]),
        )
        .unwrap();
        for k in 0..16 {
            let z = Complex64::from_polar(0.6, 0.9 * k as f64);
            assert!((mate.a.eval(z) - expect.eval(z)).norm() < 1e-10);
        }
    }

    #[test]
    fn mate_identity_on_circle() {
        let spec = two_point_spec();
        let mate = mate_from_spec(&spec).unwrap();
        let r = mate_modulus_data(&spec);
        for k in 0..256 {
            let z = circle(k, 256);
            let a2 = mate.a.eval(z).norm_sqr();
            let rest = (r.eval(z) - mate.p_a.eval(z).norm_sqr()) / mate.q.eval(z).norm_sqr();
            assert!((a2 + rest - 1.0).abs() < 1e-9);
            assert!(mate.a.eval(z).norm() <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn degenerate_point_is_reported() {
        // the single weight vanishes at its own point
        let spec = SpaceSpec::new(vec![SpacePoint {
            theta: 0.0,
            m: 2,
            weights: vec![Poly::from_real(&[-1.0, 1.0])],
        }])
        .unwrap();
        match mate_from_spec(&spec) {
            Err(Error::DegenerateFactorization { detail }) => {
                assert!(detail.contains("point 0"), "{detail}");
            }
            other => panic!("expected degenerate factorization, got {other:?}"),
        }
    }

    #[test]
    fn rank_one_normal_form() {
        // w = 1, m = 1, p = z/sqrt(2): |b| = |z/(2-z)|, a = (1-z)/(sqrt2 (1-z/2))
        let p = Poly::from_real(&[0.0, std::f64::consts::FRAC_1_SQRT_2]);
        let (b, a, q) = mate_rank_one(c(1.0, 0.0), 1, &p).unwrap();
        let expect_b = RationalFn::new(Poly::from_real(&[0.0, 1.0]), Poly::from_real(&[2.0, -1.0]))
            .unwrap();
        for k in 0..64 {
            let z = circle(k, 64);
            assert!((b.eval(z).norm() - expect_b.eval(z).norm()).abs() < 1e-10);
            // unit row identity
            let unit = b.eval(z).norm_sqr() + a.eval(z).norm_sqr();
            assert!((unit - 1.0).abs() < 1e-9);
            // |q|^2 = |p|^2 + |z - 1|^2
            let lhs = q.eval(z).norm_sqr();
            let rhs = p.eval(z).norm_sqr() + (z - c(1.0, 0.0)).norm_sqr();
            assert!((lhs - rhs).abs() < 1e-10);
        }
        assert!(a.eval(c(0.0, 0.0)).re > 0.0);
    }

    #[test]
    fn rank_one_rejects_vanishing_at_point() {
        let p = Poly::from_real(&[0.0, -1.0, 1.0]); // z(z - 1)
        assert!(matches!(
            mate_rank_one(c(1.0, 0.0), 2, &p),
            Err(Error::NotStrict)
        ));
    }

    #[test]
    fn rank_one_rotation_covariance() {
        let p0 = Poly::new(vec![c(0.0, 0.0), c(0.4, 0.3), c(0.35, -0.1)]);
        let (b0, a0, _q0) = mate_rank_one(c(1.0, 0.0), 2, &p0).unwrap();
        let w = Complex64::from_polar(1.0, 0.9);
        // p(z) = p0(conj(w) z)
        let rotated: Vec<Complex64> = p0
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, &ck)| ck * w.conj().powu(k as u32))
            .collect();
        let p = Poly::new(rotated);
        let (b, a, _q) = mate_rank_one(w, 2, &p).unwrap();
        for k in 0..32 {
            let z = Complex64::from_polar(0.75, 0.41 * k as f64);
            let zr = w.conj() * z;
            assert!((a.eval(z) - a0.eval(zr)).norm() < 1e-9, "mate rotates");
            assert!((b.eval(z).norm() - b0.eval(zr).norm()).abs() < 1e-9);
        }
        assert!((a.eval(c(0.0, 0.0)) - a0.eval(c(0.0, 0.0))).norm() < 1e-10);
    }

    #[test]
    fn rank_one_eq_11_weight() {
        // Eq.-(1.1)-style b with r = 1/2, t = 0 at w = 1 corresponds to
        // p = z/sqrt(2); the induced Dirichlet weight is |p~|^2 = 1/2.
        let p = Poly::from_real(&[0.0, std::f64::consts::FRAC_1_SQRT_2]);
        let ptilde = crate::poly::conjugate_reciprocal(&p, 1).unwrap();
        assert_eq!(ptilde.degree(), Some(0));
        assert!((ptilde.coeff(0).norm_sqr() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn char_poly_route_matches_the_paper_mate() {
        let a = mate_from_char_polys(
            &Poly::from_real(&[-1.0, 0.0, 1.0]),
            &Poly::from_real(&[-0.25, 0.0, 1.0]),
            0.5,
        )
        .unwrap();
        let expect = RationalFn::new(
            Poly::from_real(&[-2.0, 0.0, 2.0]),
            Poly::from_real(&[-4.0, 0.0, 1.0]),
        )
        .unwrap();
        for k in 0..64 {
            let z = Complex64::from_polar(0.9 * ((k % 8) as f64) / 8.0, 0.3 * k as f64);
            assert!((a.eval(z) - expect.eval(z)).norm() < 1e-12);
        }
        assert!((a.eval(c(0.0, 0.0)) - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn char_poly_route_identity_case() {
        let p = Poly::from_real(&[0.3, -1.1, 1.0]);
        // same polynomial up and down -> a == a0 == 1... requires roots in
        // the open disc for the denominator, so use one with such roots.
        let q = Poly::from_real(&[0.06, -0.5, 1.0]); // roots 0.2, 0.3
        let a = mate_from_char_polys(&q, &q, 1.0).unwrap();
        for k in 0..16 {
            let z = Complex64::from_polar(0.7, k as f64);
            assert!((a.eval(z) - c(1.0, 0.0)).norm() < 1e-12);
        }
        // and the rank-one cross-check: p = z-1, q = z-1/2, a0 = 1/sqrt(2)
        let a = mate_from_char_polys(
            &Poly::from_real(&[-1.0, 1.0]),
            &Poly::from_real(&[-0.5, 1.0]),
            std::f64::consts::FRAC_1_SQRT_2,
        )
        .unwrap();
        let expect = RationalFn::new(
            Poly::from_real(&[1.0, -1.0]),
            Poly::from_real(&[2.0f64.sqrt(), -std::f64::consts::FRAC_1_SQRT_2]),
        )
        .unwrap();
        for k in 0..16 {
            let z = Complex64::from_polar(0.8, 0.5 * k as f64);
            assert!((a.eval(z) - expect.eval(z)).norm() < 1e-12);
        }
        let _ = p;
    }

    #[test]
    fn char_poly_route_rejects_bad_spectra() {
        // root of p outside the closed disc
        let bad = mate_from_char_polys(
            &Poly::from_real(&[-2.0, 1.0]),
            &Poly::from_real(&[-0.5, 1.0]),
            1.0,
        );
        assert!(matches!(bad, Err(Error::InvalidSpectrum { .. })));
        // root of q on the circle
        let bad = mate_from_char_polys(
            &Poly::from_real(&[-1.0, 1.0]),
            &Poly::from_real(&[-1.0, 1.0]),
            1.0,
        );
        assert!(matches!(bad, Err(Error::InvalidSpectrum { .. })));
    }

    #[test]
    fn weight_phase_invariance() {
        // multiplying all weights by a unimodular constant leaves q and a
        // unchanged
        let base = two_point_spec();
        let phase = Complex64::from_polar(1.0, 1.234);
        let spun = SpaceSpec::new(
            base.points
                .iter()
                .map(|pt| SpacePoint {
                    theta: pt.theta,
                    m: pt.m,
                    weights: pt.weights.iter().map(|p| p.scale(phase)).collect(),
                })
                .collect(),
        )
        .unwrap();
        let m1 = mate_from_spec(&base).unwrap();
        let m2 = mate_from_spec(&spun).unwrap();
        for k in 0..3 {
            assert!((m1.q.coeff(k) - m2.q.coeff(k)).norm() < 1e-10);
        }
    }
}
