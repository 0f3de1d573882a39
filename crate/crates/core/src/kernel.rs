//! The dual-basis construction of the reproducing kernel: biorthogonal
//! rational functions, their Grammian, the kernel section, and recovery of
//! a rational row Schur function `B` with `B(0) = 0`.

use num_complex::Complex64;
use serde::Serialize;

use crate::dirichlet::{delta_form, hb_inner, SpaceSpec};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_inv_sqrt, CMatrix};
use crate::poly::Poly;
use crate::rational::RationalFn;
use crate::spectral::{mate_from_spec, MateResult};

/// Grammian condition numbers above this attach a warning to the model.
pub const CONDITION_WARN: f64 = 1e10;

/// Relative eigenvalue cutoff separating analytic zeros of the defect from
/// genuine small defects.
pub const RANK_CUTOFF: f64 = 1e-10;

/// Flat index layout of the kernel derivative span: point-major,
/// derivative-order-minor.
pub fn flat_indices(spec: &SpaceSpec) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (j, pt) in spec.points.iter().enumerate() {
        for i in 0..pt.m {
            out.push((j, i));
        }
    }
    out
}

/// The constructed model: dual basis `f_ij`, Grammian `F`, its inverse, and
/// the kernel basis representing the kernel derivatives at the spec points.
#[derive(Debug, Clone)]
pub struct KernelModel {
    pub spec: SpaceSpec,
    pub mate: MateResult,
    /// `f_ij`, flattened point-major / derivative-minor.
    pub dual_basis: Vec<RationalFn>,
    /// `F[r][c] = <f_r, f_c>` in the `H(B)` inner product.
    pub grammian: CMatrix,
    pub grammian_inverse: CMatrix,
    /// Condition number estimate of `F`.
    pub condition: f64,
    /// Row `r` represents the kernel derivative paired with `f_r`.
    pub kernel_basis: Vec<RationalFn>,
    pub warnings: Vec<String>,
}

/// A rational row Schur function together with its mate.
#[derive(Debug, Clone, Serialize)]
pub struct SchurFunction {
    pub components: Vec<RationalFn>,
    pub mate: RationalFn,
    pub rank: usize,
}

impl SchurFunction {
    /// Unit-row residual `max | sum |b_i|^2 + |a|^2 - 1 |` over circle
    /// samples.
    pub fn unit_row_residual(&self, samples: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..samples {
            let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / samples as f64);
            let total: f64 = self.components.iter().map(|b| b.eval(z).norm_sqr()).sum::<f64>()
                + self.mate.eval(z).norm_sqr();
            worst = worst.max((total - 1.0).abs());
        }
        worst
    }

    /// `sum_i b_i(z) conj(b_i(w))`.
    pub fn sum_bb(&self, z: Complex64, w: Complex64) -> Complex64 {
        self.components
            .iter()
            .map(|b| b.eval(z) * b.eval(w).conj())
            .sum()
    }

    /// Kernel value `(1 - sum b_i(z) conj(b_i(w))) / (1 - z conj(w))`.
    pub fn kernel(&self, z: Complex64, w: Complex64) -> Complex64 {
        (Complex64::new(1.0, 0.0) - self.sum_bb(z, w)) / (Complex64::new(1.0, 0.0) - z * w.conj())
    }

    fn validate_unit_row(&self) -> Result<()> {
        let residual = self.unit_row_residual(256);
        if residual > 1e-5 {
            return Err(Error::Internal {
                detail: format!("Schur unit-row identity violated by {residual:.3e}"),
            });
        }
        for k in 0..64 {
            let z = Complex64::from_polar(0.95 * ((k % 8) as f64 + 1.0) / 8.0, 0.7 * k as f64);
            let s: f64 = self.components.iter().map(|b| b.eval(z).norm_sqr()).sum();
            if s >= 1.0 {
                return Err(Error::Internal {
                    detail: format!("Schur row norm {s:.6} >= 1 inside the disc at {z}"),
                });
            }
        }
        Ok(())
    }
}

/// The biorthogonal functions `f_ij = a(z)/(z - w_j)^{m_j - i} g_ij(z)`,
/// where `g_ij` (degree `<= m_j - 1 - i`) solves the triangular system of
/// derivative conditions `f_ij^{(i)}(w_j) = 1`, `f_ij^{(l)}(w_j) = 0` for
/// `i < l <= m_j - 1`.
pub fn dual_basis(spec: &SpaceSpec, mate: &MateResult) -> Result<Vec<RationalFn>> {
    let q = &mate.q;
    let mut out = Vec::new();
    for (j, pt) in spec.points.iter().enumerate() {
        let w = pt.point();
        // cofactor of this point inside p_A
        let mut h = Poly::one();
        for (t, other) in spec.points.iter().enumerate() {
            if t != j {
                h = h.mul(&Poly::from_roots(&[other.point()]).pow(other.m));
            }
        }
        // Taylor coefficients of phi = h/q at w; phi(w) != 0 structurally.
        let phi = RationalFn::new(h.clone(), q.clone())?;
        let c = phi.taylor_coeffs(w, pt.m)?;
        if c[0].norm() < 1e-12 * phi.num().max_coeff_modulus().max(1.0) {
            return Err(Error::DegenerateDualBasis { point: j });
        }
        let mut factorial = 1.0; // i!
        for i in 0..pt.m {
            if i > 0 {
                factorial *= i as f64;
            }
            // Lower-triangular Toeplitz solve for the Taylor coefficients of
            // g_ij at w: (phi g)(w)-coefficients must be [1/i!, 0, .., 0].
            let d = pt.m - 1 - i;
            let mut gamma = vec![Complex64::new(0.0, 0.0); d + 1];
            gamma[0] = Complex64::new(1.0 / factorial, 0.0) / c[0];
            for r in 1..=d {
                let mut acc = Complex64::new(0.0, 0.0);
                for s in 0..r {
                    acc += c[r - s] * gamma[s];
                }
                gamma[r] = -acc / c[0];
            }
            let g = Poly::from_taylor_at(&gamma, w);
            let num = Poly::from_roots(&[w]).pow(i).mul(&h).mul(&g);
            out.push(RationalFn::new(num, q.clone())?);
        }
    }
    Ok(out)
}

/// The Grammian `F[r][c] = <f_r, f_c>_{H(B)}`, symmetrized and checked for
/// positive definiteness.
pub fn grammian(dual: &[RationalFn], spec: &SpaceSpec) -> Result<CMatrix> {
    let n = dual.len();
    let mut f = CMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..=r {
            let v = hb_inner(&dual[r], &dual[c], spec)?;
            f[(r, c)] = v;
            f[(c, r)] = v.conj();
        }
    }
    let f = f.hermitian_part();
    let (vals, _) = hermitian_eigen(&f);
    if let Some(&smallest) = vals.first() {
        if smallest <= 0.0 {
            let condition = if smallest > 0.0 {
                vals[n - 1] / smallest
            } else {
                f64::INFINITY
            };
            return Err(Error::IllConditionedGrammian { condition });
        }
    }
    Ok(f)
}

impl KernelModel {
    /// Run the construction: mate, dual basis, Grammian and its inverse by
    /// Hermitian eigendecomposition, kernel basis.
    pub fn build(spec: SpaceSpec) -> Result<Self> {
        let mate = mate_from_spec(&spec)?;
        Self::build_with_mate(spec, mate)
    }

    pub fn build_with_mate(spec: SpaceSpec, mate: MateResult) -> Result<Self> {
        let mut warnings = mate.warnings.clone();
        let dual = dual_basis(&spec, &mate)?;
        let n = dual.len();
        let f = grammian(&dual, &spec)?;
        let (vals, vecs) = hermitian_eigen(&f);
        let condition = if n == 0 { 1.0 } else { vals[n - 1] / vals[0] };
        if condition > CONDITION_WARN {
            warnings.push(format!(
                "Grammian condition number {condition:.3e} exceeds {CONDITION_WARN:.0e}"
            ));
        }
        let mut inv = CMatrix::zeros(n, n);
        for k in 0..n {
            inv[(k, k)] = Complex64::new(1.0 / vals[k], 0.0);
        }
        let inv = vecs.mul(&inv).mul(&vecs.adjoint());
        let mut kernel_basis = Vec::with_capacity(n);
        for r in 0..n {
            let mut num = Poly::zero();
            for c in 0..n {
                num = num.add(&dual[c].num().scale(inv[(r, c)]));
            }
            kernel_basis.push(RationalFn::new(num, mate.q.clone())?);
        }
        Ok(KernelModel {
            spec,
            mate,
            dual_basis: dual,
            grammian: f,
            grammian_inverse: inv,
            condition,
            kernel_basis,
            warnings,
        })
    }

    pub fn dim(&self) -> usize {
        self.dual_basis.len()
    }

    /// The kernel as a rational section in `z` for a fixed interior `w`:
    /// `K_w = sum_r conj(k_r(w)) f_r + a conj(a(w)) / (1 - conj(w) z)`.
    pub fn kernel_section(&self, w: Complex64) -> Result<RationalFn> {
        if w.norm() >= 1.0 {
            return Err(Error::OutOfDomain {
                point: format!("{w}"),
            });
        }
        let q = &self.mate.q;
        // common denominator q(z) (1 - conj(w) z)
        let tail_den = Poly::new(vec![Complex64::new(1.0, 0.0), -w.conj()]);
        let mut num = Poly::zero();
        for (kfun, ffun) in self.kernel_basis.iter().zip(self.dual_basis.iter()) {
            num = num.add(&ffun.num().scale(kfun.eval(w).conj()));
        }
        num = num.mul(&tail_den);
        let a_w = self.mate.a.eval(w).conj();
        num = num.add(&self.mate.p_a.scale(a_w));
        RationalFn::new(num, q.mul(&tail_den))
    }

    /// Kernel value `K(z, w) = <K_w, K_z>`.
    pub fn kernel_at(&self, w: Complex64, z: Complex64) -> Result<Complex64> {
        if z.norm() >= 1.0 {
            return Err(Error::OutOfDomain {
                point: format!("{z}"),
            });
        }
        Ok(self.kernel_section(w)?.eval(z))
    }

    /// Defect form on the dual basis: `Q[r][c] = <Delta f_c, f_r>`.
    pub fn delta_form_matrix(&self) -> Result<CMatrix> {
        let n = self.dim();
        let mut q = CMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                q[(r, c)] = delta_form(&self.dual_basis[c], &self.dual_basis[r], &self.spec)?;
            }
        }
        Ok(q.hermitian_part())
    }

    /// Numerical Gram matrix in the dual basis, `G[r][c] = <f_c, f_r>`,
    /// i.e. the entrywise conjugate of the stored paper-convention `F`.
    pub fn dual_gram(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |r, c| self.grammian[(r, c)].conj())
    }
}

/// Eigen-decompose the defect restricted to the model space and build
/// `b_i = z sqrt(t_i / (1 + t_i)) e_i` from its nonzero eigenpairs, with
/// `||e_i||_{H(B)} = 1`.
///
/// Eigenvector phases are fixed so the first nonvanishing Maclaurin
/// coefficient of each `b_i` is real positive.
pub fn recover_schur(model: &KernelModel) -> Result<SchurFunction> {
    let n = model.dim();
    if n == 0 {
        return Ok(SchurFunction {
            components: Vec::new(),
            mate: model.mate.a.clone(),
            rank: 0,
        });
    }
    let q_form = model.delta_form_matrix()?;
    let g = model.dual_gram();
    let g_inv_sqrt = hermitian_inv_sqrt(&g)?;
    let m = g_inv_sqrt.mul(&q_form).mul(&g_inv_sqrt).hermitian_part();
    let (vals, vecs) = hermitian_eigen(&m);
    let t_max = vals.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    if t_max == 0.0 {
        return Ok(SchurFunction {
            components: Vec::new(),
            mate: model.mate.a.clone(),
            rank: 0,
        });
    }
    if vals[0] < -1e-9 * t_max {
        return Err(Error::NotPositiveDefect {
            eigenvalue: vals[0],
        });
    }
    let mut components = Vec::new();
    for (idx, &t) in vals.iter().enumerate() {
        if t <= RANK_CUTOFF * t_max {
            continue;
        }
        let y: Vec<Complex64> = (0..n).map(|r| vecs[(r, idx)]).collect();
        let v = g_inv_sqrt.mul_vec(&y);
        let mut num = Poly::zero();
        for c in 0..n {
            num = num.add(&model.dual_basis[c].num().scale(v[c]));
        }
        let kappa = (t / (1.0 + t)).sqrt();
        let num = num.shift_up(1).scale(Complex64::new(kappa, 0.0));
        let b = RationalFn::new(num, model.mate.q.clone())?;
        components.push(fix_phase(b)?);
    }
    // Largest defect direction first, matching the eigenvalue order.
    components.reverse();
    let rank = components.len();
    let schur = SchurFunction {
        components,
        mate: model.mate.a.clone(),
        rank,
    };
    schur.validate_unit_row()?;
    for b in &schur.components {
        let b0 = b.eval(Complex64::new(0.0, 0.0)).norm();
        if b0 > 1e-10 {
            return Err(Error::Internal {
                detail: format!("recovered component violates b(0) = 0 by {b0:.3e}"),
            });
        }
    }
    Ok(schur)
}

fn fix_phase(b: RationalFn) -> Result<RationalFn> {
    let len = b.num().coeffs().len() + 4;
    let series = b.maclaurin(len);
    let largest = series.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if largest == 0.0 {
        return Ok(b);
    }
    let first = series
        .iter()
        .find(|c| c.norm() > 1e-12 * largest)
        .copied()
        .unwrap();
    let phase = first.conj() / first.norm();
    Ok(b.scale(phase))
}

/// Apply the ball automorphism `phi_alpha` of the unit ball componentwise:
/// `C(z) = phi_alpha(B(z))`, with the mate transported by
/// `a_alpha = sqrt(1 - |alpha|^2) a / (1 - <B, alpha>)`.
pub fn mobius_normalize(b: &SchurFunction, alpha: &[Complex64]) -> Result<SchurFunction> {
    if alpha.len() != b.components.len() {
        return Err(Error::DimensionMismatch {
            detail: format!(
                "alpha has dimension {}, Schur function has rank {}",
                alpha.len(),
                b.components.len()
            ),
        });
    }
    let norm_sq: f64 = alpha.iter().map(|a| a.norm_sqr()).sum();
    if norm_sq >= (1.0 - 1e-9) * (1.0 - 1e-9) {
        return Err(Error::OutOfBall {
            norm: norm_sq.sqrt(),
        });
    }
    if norm_sq == 0.0 {
        // phi_0 = -identity
        return Ok(SchurFunction {
            components: b
                .components
                .iter()
                .map(|bi| bi.scale(Complex64::new(-1.0, 0.0)))
                .collect(),
            mate: b.mate.clone(),
            rank: b.rank,
        });
    }
    let q = match b.components.first() {
        Some(first) => first.den().clone(),
        None => {
            return Err(Error::DimensionMismatch {
                detail: "cannot apply a nonzero Moebius move to the zero Schur function".into(),
            })
        }
    };
    for bi in &b.components {
        if bi.den() != &q {
            return Err(Error::DimensionMismatch {
                detail: "Schur components do not share a common denominator".into(),
            });
        }
    }
    let s = (1.0 - norm_sq).sqrt();
    // u = <B, alpha> numerator over q
    let mut u = Poly::zero();
    for (bi, ai) in b.components.iter().zip(alpha.iter()) {
        u = u.add(&bi.num().scale(ai.conj()));
    }
    let new_den = q.sub(&u);
    let mut components = Vec::with_capacity(b.components.len());
    for (bi, &ai) in b.components.iter().zip(alpha.iter()) {
        // alpha_i q - (u alpha_i)/|alpha|^2 - s (p_i - (u alpha_i)/|alpha|^2)
        let proj = u.scale(ai / norm_sq);
        let num = q
            .scale(ai)
            .sub(&proj)
            .sub(&bi.num().sub(&proj).scale(Complex64::new(s, 0.0)));
        components.push(RationalFn::new(num, new_den.clone())?);
    }
    // mate: s * a / (1 - <B, alpha>), with a = p_A/q sharing the same q
    if b.mate.den() != &q {
        return Err(Error::DimensionMismatch {
            detail: "mate does not share the components' denominator".into(),
        });
    }
    let mate = RationalFn::new(b.mate.num().scale(Complex64::new(s, 0.0)), new_den.clone())?;
    let out = SchurFunction {
        components,
        mate,
        rank: b.rank,
    };
    out.validate_unit_row()?;
    Ok(out)
}
