//! Polynomial root finding via balanced companion matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, CMatrix};
use crate::poly::Poly;

/// Cluster radius below which computed roots are reported as one root with
/// multiplicity.
pub const CLUSTER_TOL: f64 = 1e-7;

/// All roots of `p`, with multiplicity, in no particular order.
///
/// Eigenvalues of the balanced companion matrix, each polished by a few
/// Newton steps (kept only when the residual improves). A constant nonzero
/// polynomial has no roots; the zero polynomial is rejected.
pub fn poly_roots(p: &Poly) -> Result<Vec<Complex64>> {
    let Some(degree) = p.degree() else {
        return Err(Error::ZeroPolynomial);
    };
    if degree == 0 {
        return Ok(Vec::new());
    }
    if degree == 1 {
        return Ok(vec![-p.coeff(0) / p.coeff(1)]);
    }
    if degree == 2 {
        let (a, b, c) = (p.coeff(2), p.coeff(1), p.coeff(0));
        let disc = (b * b - 4.0 * a * c).sqrt();
        // Pick the larger-magnitude branch first to avoid cancellation.
        let q = if (b + disc).norm() >= (b - disc).norm() {
            -0.5 * (b + disc)
        } else {
            -0.5 * (b - disc)
        };
        let r1 = q / a;
        let r2 = if q.norm() > 0.0 { c / q } else { -r1 - b / a };
        return Ok(vec![r1, r2]);
    }
    let lead = p.coeff(degree);
    let companion = CMatrix::from_fn(degree, degree, |i, j| {
        if j + 1 == degree {
            -p.coeff(i) / lead
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let raw = eigenvalues(&companion);
    // Newton-polish as a set: per-root polishing can break the symmetric
    // error cancellation around a multiple root, so keep the polished set
    // only when the whole polynomial reconstructs better.
    let polished: Vec<Complex64> = raw.iter().map(|&r| polish_root(p, r)).collect();
    if reconstruction_error(p, &polished) <= reconstruction_error(p, &raw) {
        Ok(polished)
    } else {
        Ok(raw)
    }
}

fn reconstruction_error(p: &Poly, roots: &[Complex64]) -> f64 {
    let lead = p.coeff(p.degree().unwrap_or(0));
    let back = Poly::from_roots(roots).scale(lead);
    let mut err: f64 = 0.0;
    for k in 0..p.coeffs().len().max(back.coeffs().len()) {
        err = err.max((back.coeff(k) - p.coeff(k)).norm());
    }
    err
}

/// Group roots into `(representative, multiplicity)` clusters of radius
/// `CLUSTER_TOL`; representatives are coordinate means of their clusters.
pub fn cluster_roots(roots: &[Complex64]) -> Vec<(Complex64, usize)> {
    let mut remaining: Vec<Complex64> = roots.to_vec();
    let mut out = Vec::new();
    while let Some(seed) = remaining.pop() {
        let mut members = vec![seed];
        let mut i = 0;
        while i < remaining.len() {
            if (remaining[i] - seed).norm() < CLUSTER_TOL {
                members.push(remaining.swap_remove(i));
            } else {
                i += 1;
            }
        }
        let mean = members.iter().sum::<Complex64>() / members.len() as f64;
        out.push((mean, members.len()));
    }
    out
}

fn polish_root(p: &Poly, z0: Complex64) -> Complex64 {
    let dp = p.derivative();
    let mut z = z0;
    let mut best = z0;
    let mut best_val = p.eval(z0).norm();
    for _ in 0..3 {
        let d = dp.eval(z);
        if d.norm() < 1e-300 {
            break;
        }
        z -= p.eval(z) / d;
        let v = p.eval(z).norm();
        if v < best_val {
            best_val = v;
            best = z;
        }
    }
    best
}
