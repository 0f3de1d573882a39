//! Small dense complex matrices and the eigen/solve routines the finite
//! models need. Sizes here are tiny (N = sum of point multiplicities), so
//! everything favors robustness over asymptotics: partial-pivot LU, cyclic
//! Jacobi for Hermitian problems, and a shifted Hessenberg QR iteration for
//! general spectra.

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        CMatrix {
            n_rows,
            n_cols,
            data: vec![ZERO; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(n_rows, n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n_cols, other.n_rows, "matrix product shape mismatch");
        let mut out = CMatrix::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.n_cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.n_cols, v.len());
        (0..self.n_rows)
            .map(|i| (0..self.n_cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= *b;
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.n_cols, self.n_rows, |i, j| self[(j, i)].conj())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Deviation from Hermitian symmetry, as a max-abs residual.
    pub fn hermitian_residual(&self) -> f64 {
        assert!(self.is_square());
        let mut r: f64 = 0.0;
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                r = r.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        r
    }

    /// `(A + A^H) / 2`.
    pub fn hermitian_part(&self) -> CMatrix {
        assert!(self.is_square());
        CMatrix::from_fn(self.n_rows, self.n_cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn pow(&self, k: usize) -> CMatrix {
        assert!(self.is_square());
        let mut acc = CMatrix::identity(self.n_rows);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Solve `A x = b` by partial-pivot LU. Errors if the pivot collapses.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        assert!(self.is_square());
        assert_eq!(self.n_rows, b.len());
        let n = self.n_rows;
        let mut a = self.clone();
        let mut x = b.to_vec();
        let scale = self.max_abs().max(1e-300);
        for col in 0..n {
            let (pivot_row, pivot_abs) = (col..n)
                .map(|r| (r, a[(r, col)].norm()))
                .max_by(|u, v| u.1.total_cmp(&v.1))
                .unwrap();
            if pivot_abs < 1e-14 * scale {
                return Err(Error::Internal {
                    detail: format!("singular linear system (pivot {pivot_abs:.3e})"),
                });
            }
            if pivot_row != col {
                for j in 0..n {
                    let t = a[(col, j)];
                    a[(col, j)] = a[(pivot_row, j)];
                    a[(pivot_row, j)] = t;
                }
                x.swap(col, pivot_row);
            }
            let inv = Complex64::new(1.0, 0.0) / a[(col, col)];
            for r in col + 1..n {
                let factor = a[(r, col)] * inv;
                if factor == ZERO {
                    continue;
                }
                for j in col..n {
                    let v = a[(col, j)];
                    a[(r, j)] -= factor * v;
                }
                let xc = x[col];
                x[r] -= factor * xc;
            }
        }
        for row in (0..n).rev() {
            let mut acc = x[row];
            for j in row + 1..n {
                acc -= a[(row, j)] * x[j];
            }
            x[row] = acc / a[(row, row)];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<CMatrix> {
        assert!(self.is_square());
        let n = self.n_rows;
        let mut out = CMatrix::zeros(n, n);
        for col in 0..n {
            let mut e = vec![ZERO; n];
            e[col] = Complex64::new(1.0, 0.0);
            let x = self.solve(&e)?;
            for row in 0..n {
                out[(row, col)] = x[row];
            }
        }
        Ok(out)
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n_cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n_cols + j]
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
///
/// Returns eigenvalues ascending and the unitary matrix whose columns are the
/// matching eigenvectors, so `A = V diag(w) V^H`.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    assert!(a.is_square());
    let n = a.n_rows();
    let mut h = a.hermitian_part();
    let mut v = CMatrix::identity(n);
    if n == 0 {
        return (Vec::new(), v);
    }
    let scale = h.max_abs().max(1e-300);
    for _sweep in 0..60 {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(h[(p, q)].norm());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = h[(p, q)];
                if apq.norm() <= 1e-300 {
                    continue;
                }
                // Unitary 2x2 [[c, s], [-conj(s), c]] annihilating h[p][q].
                let app = h[(p, p)].re;
                let aqq = h[(q, q)].re;
                let abs = apq.norm();
                let phase = apq / abs;
                let tau = (aqq - app) / (2.0 * abs);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = phase * (t * c);
                // Apply J^H H J with J acting on columns p, q.
                for k in 0..n {
                    let hkp = h[(k, p)];
                    let hkq = h[(k, q)];
                    h[(k, p)] = hkp * c - hkq * s.conj();
                    h[(k, q)] = hkp * s + hkq * c;
                }
                for k in 0..n {
                    let hpk = h[(p, k)];
                    let hqk = h[(q, k)];
                    h[(p, k)] = hpk * c - hqk * s;
                    h[(q, k)] = hpk * s.conj() + hqk * c;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * s.conj();
                    v[(k, q)] = vkp * s + vkq * c;
                }
                h[(p, q)] = ZERO;
                h[(q, p)] = ZERO;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let evals: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    order.sort_by(|&i, &j| evals[i].total_cmp(&evals[j]));
    let sorted_vals: Vec<f64> = order.iter().map(|&i| evals[i]).collect();
    let sorted_vecs = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    (sorted_vals, sorted_vecs)
}

/// `A^{-1/2}` for a Hermitian positive definite matrix.
pub fn hermitian_inv_sqrt(a: &CMatrix) -> Result<CMatrix> {
    let (vals, vecs) = hermitian_eigen(a);
    let n = a.n_rows();
    let largest = vals.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let floor = largest * 1e-15;
    let mut d = CMatrix::zeros(n, n);
    for i in 0..n {
        if vals[i] <= floor {
            let condition = if vals[i] > 0.0 {
                largest / vals[i]
            } else {
                f64::INFINITY
            };
            return Err(Error::IllConditionedGrammian { condition });
        }
        d[(i, i)] = Complex64::new(1.0 / vals[i].sqrt(), 0.0);
    }
    Ok(vecs.mul(&d).mul(&vecs.adjoint()))
}

/// Eigenvalues of a general complex matrix: Householder reduction to upper
/// Hessenberg form, then an explicitly shifted QR iteration with Wilkinson
/// shifts and occasional exceptional shifts.
pub fn eigenvalues(a: &CMatrix) -> Vec<Complex64> {
    assert!(a.is_square());
    let n = a.n_rows();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![a[(0, 0)]];
    }
    let mut h = hessenberg(a);
    balance_in_place(&mut h);
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n; // active block is rows/cols 0..hi
    let scale = h.max_abs().max(1e-300);
    let mut stalled = 0usize;
    let mut total_iter = 0usize;
    let max_total = 80 * n;
    while hi > 0 {
        if hi == 1 {
            eigs.push(h[(0, 0)]);
            hi = 0;
            continue;
        }
        // Deflate trailing negligible subdiagonals.
        let sub = h[(hi - 1, hi - 2)].norm();
        let local = h[(hi - 1, hi - 1)].norm() + h[(hi - 2, hi - 2)].norm();
        if sub <= f64::EPSILON * local.max(1e-3 * scale) {
            eigs.push(h[(hi - 1, hi - 1)]);
            hi -= 1;
            stalled = 0;
            continue;
        }
        if total_iter >= max_total {
            // Accept the diagonal of whatever is left; QR has stopped making
            // progress, which for these tiny matrices only happens on inputs
            // far outside the intended scale.
            for i in 0..hi {
                eigs.push(h[(i, i)]);
            }
            break;
        }
        // Find the start of the active block.
        let mut lo = hi - 1;
        while lo > 0 {
            let s = h[(lo, lo - 1)].norm();
            let d = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if s <= f64::EPSILON * d.max(1e-3 * scale) {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        let shift = if stalled > 0 && stalled % 12 == 0 {
            // Exceptional shift to break symmetry-induced stalls.
            h[(hi - 1, hi - 1)] + Complex64::new(sub, sub * 0.5)
        } else {
            wilkinson_shift(
                h[(hi - 2, hi - 2)],
                h[(hi - 2, hi - 1)],
                h[(hi - 1, hi - 2)],
                h[(hi - 1, hi - 1)],
            )
        };
        qr_step(&mut h, lo, hi, shift);
        stalled += 1;
        total_iter += 1;
    }
    eigs
}

fn hessenberg(a: &CMatrix) -> CMatrix {
    let n = a.n_rows();
    let mut h = a.clone();
    for col in 0..n.saturating_sub(2) {
        // Householder vector annihilating h[col+2.., col].
        let norm_x: f64 = (col + 1..n).map(|i| h[(i, col)].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = h[(col + 1, col)];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * norm_x;
        let mut v: Vec<Complex64> = (col + 1..n).map(|i| h[(i, col)]).collect();
        v[0] -= alpha;
        let vnorm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if vnorm < 1e-300 {
            continue;
        }
        for c in v.iter_mut() {
            *c /= vnorm;
        }
        // H <- (I - 2 v v^H) H (left), columns col..n.
        for j in col..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(k, &vk)| vk.conj() * h[(col + 1 + k, j)])
                .sum();
            for (k, &vk) in v.iter().enumerate() {
                h[(col + 1 + k, j)] -= 2.0 * vk * dot;
            }
        }
        // H <- H (I - 2 v v^H) (right), all rows.
        for i in 0..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(k, &vk)| h[(i, col + 1 + k)] * vk)
                .sum();
            for (k, &vk) in v.iter().enumerate() {
                h[(i, col + 1 + k)] -= 2.0 * dot * vk.conj();
            }
        }
        for i in col + 2..n {
            h[(i, col)] = ZERO;
        }
    }
    h
}

/// Parlett-Reinsch style balancing restricted to powers of two, preserving
/// the Hessenberg profile.
fn balance_in_place(h: &mut CMatrix) {
    let n = h.n_rows();
    for _ in 0..8 {
        let mut converged = true;
        for i in 0..n {
            let mut row: f64 = 0.0;
            let mut col: f64 = 0.0;
            for j in 0..n {
                if j != i {
                    row += h[(i, j)].norm();
                    col += h[(j, i)].norm();
                }
            }
            if row == 0.0 || col == 0.0 {
                continue;
            }
            let mut f = 1.0f64;
            let s = row + col;
            while col < row / 2.0 {
                col *= 2.0;
                row /= 2.0;
                f *= 2.0;
            }
            while col >= row * 2.0 {
                col /= 2.0;
                row *= 2.0;
                f /= 2.0;
            }
            if (row + col) < 0.95 * s && f != 1.0 {
                converged = false;
                for j in 0..n {
                    h[(i, j)] = h[(i, j)] / f;
                }
                for j in 0..n {
                    h[(j, i)] = h[(j, i)] * f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    // Eigenvalue of [[a, b], [c, d]] closest to d.
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let l1 = (tr + disc) * 0.5;
    let l2 = (tr - disc) * 0.5;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit shifted QR step on the active Hessenberg block `lo..hi`.
fn qr_step(h: &mut CMatrix, lo: usize, hi: usize, shift: Complex64) {
    let n = h.n_cols();
    let m = hi - lo;
    if m < 2 {
        return;
    }
    let mut rotations: Vec<(f64, Complex64)> = Vec::with_capacity(m - 1);
    for i in lo..hi {
        h[(i, i)] -= shift;
    }
    // Left Givens sweep: zero the subdiagonal.
    for i in lo..hi - 1 {
        let x = h[(i, i)];
        let y = h[(i + 1, i)];
        let (c, s) = givens(x, y);
        rotations.push((c, s));
        for j in i..n {
            let a = h[(i, j)];
            let b = h[(i + 1, j)];
            h[(i, j)] = a * c + s * b;
            h[(i + 1, j)] = -s.conj() * a + b * c;
        }
    }
    // Right sweep: form R Q by applying the adjoint rotations on columns.
    for (k, &(c, s)) in rotations.iter().enumerate() {
        let i = lo + k;
        let top = if i + 2 < hi { i + 2 } else { hi };
        for r in 0..top {
            let a = h[(r, i)];
            let b = h[(r, i + 1)];
            h[(r, i)] = a * c + b * s.conj();
            h[(r, i + 1)] = -a * s + b * c;
        }
    }
    for i in lo..hi {
        h[(i, i)] += shift;
    }
}

fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        // Pure swap with phase.
        return (0.0, y.conj() / ay);
    }
    let d = (ax * ax + ay * ay).sqrt();
    let c = ax / d;
    let s = (x / ax) * y.conj() / d;
    (c, s)
}
