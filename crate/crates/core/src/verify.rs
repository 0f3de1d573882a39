//! The named verification battery: every structural identity the model is
//! supposed to satisfy, evaluated on one spec with seeded random probes,
//! reported as `(name, residual, tolerance, pass)` rows.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dirichlet::{
    aleman_malman_quadrature, hb_inner, local_dirichlet, SpaceSpec,
};
use crate::error::Result;
use crate::kernel::{flat_indices, mobius_normalize, recover_schur, KernelModel, SchurFunction};
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::operator::{
    backward_shift_spectrum_in_disc, beta_form, build_operator_model, delta_decomposition,
    eigenvector_for, generalized_hermitian_eigenvalues, isometry_order, theorem12_crosscheck,
    IsometryReport, OperatorModel, RANK_CUTOFF,
};
use crate::poly::{conjugate_reciprocal, Poly};
use crate::rational::{deflate, h2_inner, taylor_polynomial, RationalFn};
use crate::roots::poly_roots;
use crate::spectral::{fejer_riesz, mate_from_spec};
use crate::trig::TrigPoly;

/// One row of the verification report.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, residual: f64, tolerance: f64) -> Self {
        Check {
            name: name.to_string(),
            residual,
            tolerance,
            pass: residual < tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    /// Probe degree for the beta-form sweeps; `None` picks
    /// `N + 2 max_order + 4`.
    pub degree_cap: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 42,
            samples: 512,
            tol: 1e-8,
            degree_cap: None,
        }
    }
}

/// Everything the verification run produced, including the constructed
/// model so callers can serialize it.
pub struct VerifyOutcome {
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub model: KernelModel,
    pub operator: OperatorModel,
    pub schur: SchurFunction,
    pub isometry: IsometryReport,
}

impl VerifyOutcome {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn rand_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn rand_poly(rng: &mut ChaCha8Rng, degree: usize) -> Poly {
    Poly::new((0..=degree).map(|_| rand_unit(rng)).collect())
}

/// A random rational function with poles of modulus in [1.3, 4].
fn rand_rational(rng: &mut ChaCha8Rng, num_degree: usize, poles: usize) -> RationalFn {
    let num = rand_poly(rng, num_degree);
    let mut den = Poly::one();
    for _ in 0..poles {
        let rho = Complex64::from_polar(
            rng.gen_range(1.3..4.0),
            rng.gen_range(0.0..2.0 * std::f64::consts::PI),
        );
        den = den.mul(&Poly::new(vec![Complex64::new(1.0, 0.0), -1.0 / rho]));
    }
    RationalFn::new(num, den).expect("poles chosen outside the disc")
}

fn interior_point(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    Complex64::from_polar(
        rng.gen_range(0.0..radius),
        rng.gen_range(0.0..2.0 * std::f64::consts::PI),
    )
}

/// Run the full invariant suite for one spec. The spec is reduced to its
/// strict presentation first (with warnings) so that the mate exists.
pub fn run_verification(spec: &SpaceSpec, opts: &VerifyOptions) -> Result<VerifyOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let (spec, mut warnings) = spec.reduced();
    let skip_strictness = !warnings.is_empty();

    let model = KernelModel::build(spec.clone())?;
    warnings.extend(model.warnings.clone());
    let operator = build_operator_model(&model)?;
    let schur = recover_schur(&model)?;
    let max_order = (2 * spec.max_multiplicity()).max(2) + 2;
    let probe_degree = opts
        .degree_cap
        .unwrap_or(spec.total_multiplicity() + 2 * max_order + 4);
    let isometry = isometry_order(&spec, max_order, probe_degree)?;

    let mut checks = Vec::new();

    // --- polynomial / Hardy layer ---------------------------------------
    {
        let mut worst: f64 = 0.0;
        for _ in 0..8 {
            let f = rand_rational(&mut rng, 4, 2);
            let g = rand_rational(&mut rng, 3, 2);
            let h = rand_rational(&mut rng, 4, 1);
            let alpha = rand_unit(&mut rng);
            let lin = h2_inner(&f.scale(alpha).add(&g)?, &h);
            let split = alpha * h2_inner(&f, &h) + h2_inner(&g, &h);
            worst = worst.max((lin - split).norm());
            let sym = (h2_inner(&f, &g) - h2_inner(&g, &f).conj()).norm();
            worst = worst.max(sym);
        }
        checks.push(Check::new("h2_sesquilinearity", worst, 1e-10));
    }
    {
        let mut worst: f64 = 0.0;
        for _ in 0..6 {
            let f = rand_rational(&mut rng, 5, 2);
            let w = Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * std::f64::consts::PI));
            let m = rng.gen_range(1..4usize);
            let g = deflate(&f, w, m)?;
            let t = taylor_polynomial(&f, w, m)?;
            let back = g
                .mul_poly(&Poly::from_roots(&[w]).pow(m))
                .add(&RationalFn::from_poly(t))?;
            for _ in 0..64 {
                let z = interior_point(&mut rng, 0.95);
                worst = worst.max((back.eval(z) - f.eval(z)).norm());
            }
        }
        checks.push(Check::new("deflate_reconstruction", worst, 1e-9));
    }
    {
        // Step 1e-5 limits the check to first derivatives: the roundoff
        // floor of a second central difference is already eps/h^2 = 1e-6.
        let mut worst: f64 = 0.0;
        for _ in 0..6 {
            let f = rand_rational(&mut rng, 4, 2);
            let w = Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * std::f64::consts::PI));
            let derivs = f.derivatives_at(w, 2)?;
            let h = 1e-5;
            for (l, &exact) in derivs.iter().enumerate() {
                let fd = central_difference(&f, w, l, h);
                worst = worst.max((fd - exact).norm() / exact.norm().max(1.0));
            }
        }
        checks.push(Check::new("derivative_finite_difference", worst, 1e-6));
    }
    {
        let mut worst: f64 = 0.0;
        for _ in 0..4 {
            let deg = rng.gen_range(1..5usize);
            let p = rand_poly(&mut rng, deg);
            let r = conjugate_reciprocal(&p, deg)?;
            for k in 0..128 {
                let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 128.0);
                worst = worst.max((p.eval(z).norm() - r.eval(z).norm()).abs());
            }
        }
        checks.push(Check::new("conjugate_reciprocal_modulus", worst, 1e-12));
    }

    // --- spectral factorization ------------------------------------------
    {
        let mut worst_rel: f64 = 0.0;
        let mut worst_root: f64 = f64::INFINITY;
        for _ in 0..4 {
            let deg = rng.gen_range(1..5usize);
            let mut q0 = Poly::one();
            for _ in 0..deg {
                let rho = Complex64::from_polar(
                    rng.gen_range(1.1..3.0),
                    rng.gen_range(0.0..2.0 * std::f64::consts::PI),
                );
                q0 = q0.mul(&Poly::new(vec![-rho, Complex64::new(1.0, 0.0)]));
            }
            let r = TrigPoly::from_modulus_squared(&q0).add(&TrigPoly::constant(0.05));
            let fact = fejer_riesz(&r)?;
            let (_, hi) = r.circle_range(opts.samples.max(16));
            for k in 0..opts.samples.max(16) {
                let z = Complex64::from_polar(
                    1.0,
                    2.0 * std::f64::consts::PI * k as f64 / opts.samples.max(16) as f64,
                );
                worst_rel = worst_rel.max((fact.q.eval(z).norm_sqr() - r.eval(z)).abs() / hi);
            }
            for root in poly_roots(&fact.q)? {
                worst_root = worst_root.min(root.norm());
            }
        }
        checks.push(Check::new("fejer_riesz_roundtrip", worst_rel, 1e-9));
        checks.push(Check::new(
            "fejer_riesz_roots_outside",
            (1.0 - worst_root).max(0.0),
            1e-9,
        ));
    }
    {
        // root pairing on the lift of this spec's own modulus data
        let r = crate::spectral::mate_modulus_data(&spec);
        let mut worst: f64 = 0.0;
        if r.order() > 0 {
            let roots = poly_roots(&r.lift())?;
            for &rho in roots.iter().filter(|r| r.norm() > 1.0) {
                let mirror = 1.0 / rho.conj();
                let best = roots
                    .iter()
                    .filter(|r| r.norm() <= 1.0)
                    .map(|r| (r - mirror).norm())
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(best / (1.0 + mirror.norm()));
            }
        }
        checks.push(Check::new("root_pairing", worst, 1e-6));
    }
    {
        // scaling all weights by a unimodular constant leaves q unchanged
        let phase = Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * std::f64::consts::PI));
        let spun = SpaceSpec::new(
            spec.points
                .iter()
                .map(|pt| crate::dirichlet::SpacePoint {
                    theta: pt.theta,
                    m: pt.m,
                    weights: pt.weights.iter().map(|p| p.scale(phase)).collect(),
                })
                .collect(),
        )?;
        let m2 = mate_from_spec(&spun)?;
        let mut worst: f64 = 0.0;
        let scale = model.mate.q.max_coeff_modulus();
        for k in 0..model.mate.q.coeffs().len().max(m2.q.coeffs().len()) {
            worst = worst.max((model.mate.q.coeff(k) - m2.q.coeff(k)).norm() / scale);
        }
        checks.push(Check::new("weight_phase_invariance", worst, 1e-10));
    }

    // --- Dirichlet layer ---------------------------------------------------
    {
        // D_w^m(zf) - D_w^m(f) = |top Taylor coefficient|^2 at each point
        let mut worst: f64 = 0.0;
        for _ in 0..6 {
            let f = rand_rational(&mut rng, 3, 2);
            for pt in &spec.points {
                let w = pt.point();
                let lhs = local_dirichlet(&f.shift_up(1), w, pt.m)?
                    - local_dirichlet(&f, w, pt.m)?;
                let top = f.taylor_coeffs(w, pt.m)?[pt.m - 1];
                worst = worst.max((lhs - top.norm_sqr()).abs() / (1.0 + lhs.abs()));
            }
        }
        checks.push(Check::new("shift_recurrence", worst, 1e-9));
    }
    {
        // D_w^m((z-w)^k p1 f) = D_w^{m-k}(p1 f)
        let mut worst: f64 = 0.0;
        for _ in 0..6 {
            let f = rand_rational(&mut rng, 3, 2);
            let p1 = rand_poly(&mut rng, 1);
            let w = Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * std::f64::consts::PI));
            let m = rng.gen_range(2..4usize);
            for k in 1..m {
                let lifted = f.mul_poly(&p1).mul_poly(&Poly::from_roots(&[w]).pow(k));
                let lhs = local_dirichlet(&lifted, w, m)?;
                let rhs = local_dirichlet(&f.mul_poly(&p1), w, m - k)?;
                worst = worst.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
            }
        }
        checks.push(Check::new("order_reduction", worst, 1e-9));
    }
    {
        let mut worst: f64 = 0.0;
        for _ in 0..8 {
            let f = rand_rational(&mut rng, 4, 2);
            let hb = hb_inner(&f, &f, &spec)?.re;
            let h2 = h2_inner(&f, &f).re;
            worst = worst.max((h2 - hb) / (1.0 + h2));
        }
        checks.push(Check::new("hb_expansivity", worst.max(0.0), 1e-12));
    }
    {
        // beta form of order 2 m_max vanishes on monomials z^0..z^30
        let m = spec.max_multiplicity().max(1);
        let mut worst: f64 = 0.0;
        for r in 0..=30usize {
            let zr = RationalFn::from_poly(Poly::monomial(r));
            let v = beta_form(&spec, 2 * m, &zr)?;
            let scale = hb_inner(&zr, &zr, &spec)?.re;
            worst = worst.max(v.abs() / scale);
        }
        checks.push(Check::new("beta_vanishing_2m", worst, 1e-8));
    }
    if spec.is_empty() {
        warnings.push("empty spec: the shift is an isometry; strictness checks degenerate".into());
    } else if skip_strictness {
        warnings.push(
            "beta_strictness skipped at the original order: a strictness flag was false".into(),
        );
    } else {
        // the (2 m_max - 2)-form must be nonzero somewhere
        let m = spec.max_multiplicity();
        let mut largest: f64 = 0.0;
        if 2 * m >= 4 {
            for r in 0..=probe_degree {
                let zr = RationalFn::from_poly(Poly::monomial(r));
                let v = beta_form(&spec, 2 * m - 2, &zr)?;
                let scale = hb_inner(&zr, &zr, &spec)?.re;
                largest = largest.max(v.abs() / scale);
            }
        } else {
            // beta_0 is the squared norm itself
            largest = 1.0;
        }
        checks.push(Check::new(
            "beta_strictness",
            if largest > 1e-8 { 0.0 } else { 1.0 },
            0.5,
        ));
    }
    {
        let mut worst: f64 = 0.0;
        for _ in 0..3 {
            let g = rand_poly(&mut rng, 6);
            let gr = RationalFn::from_poly(g.clone());
            let expect = hb_inner(&gr, &gr, &spec)?.re - h2_inner(&gr, &gr).re;
            let got = aleman_malman_quadrature(&g, &spec, opts.samples.max(16))?;
            worst = worst.max((got - expect).abs() / (1.0 + expect));
        }
        checks.push(Check::new("aleman_malman_quadrature", worst, 1e-6));
    }

    // --- kernel layer ------------------------------------------------------
    {
        let f = &model.grammian;
        checks.push(Check::new(
            "grammian_hermitian",
            f.hermitian_residual(),
            1e-10,
        ));
        let (vals, _) = hermitian_eigen(f);
        let min_eig = vals.first().copied().unwrap_or(1.0);
        checks.push(Check::new(
            "grammian_positive_definite",
            (-min_eig).max(0.0),
            1e-15,
        ));
    }
    {
        let idx = flat_indices(&spec);
        let mut worst: f64 = 0.0;
        for (col, ffun) in model.dual_basis.iter().enumerate() {
            for (row, &(t, l)) in idx.iter().enumerate() {
                let w = spec.points[t].point();
                let d = ffun.derivatives_at(w, l + 1)?[l];
                let expect = if row == col { 1.0 } else { 0.0 };
                worst = worst.max((d - Complex64::new(expect, 0.0)).norm());
            }
        }
        checks.push(Check::new("dual_basis_biorthogonality", worst, 1e-8));
    }
    {
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let f = RationalFn::from_poly(rand_poly(&mut rng, 8));
            for _ in 0..20 {
                let w = interior_point(&mut rng, 0.9);
                let section = model.kernel_section(w)?;
                let got = hb_inner(&f, &section, &spec)?;
                let expect = f.eval(w);
                worst = worst.max((got - expect).norm() / (1.0 + expect.norm()));
            }
        }
        checks.push(Check::new("reproducing_property", worst, opts.tol));
    }
    {
        let idx = flat_indices(&spec);
        let mut worst: f64 = 0.0;
        for _ in 0..6 {
            let f = RationalFn::from_poly(rand_poly(&mut rng, 6));
            for (r, &(j, i)) in idx.iter().enumerate() {
                let w = spec.points[j].point();
                let got = hb_inner(&f, &model.kernel_basis[r], &spec)?;
                let expect = f.derivatives_at(w, i + 1)?[i];
                worst = worst.max((got - expect).norm() / (1.0 + expect.norm()));
            }
        }
        checks.push(Check::new("derivative_reproducing", worst, opts.tol));
    }
    {
        let nodes: Vec<Complex64> = (0..8).map(|_| interior_point(&mut rng, 0.9)).collect();
        let mut gram = CMatrix::zeros(8, 8);
        for r in 0..8 {
            for s in 0..8 {
                gram[(r, s)] = model.kernel_at(nodes[s], nodes[r])?;
            }
        }
        let (vals, _) = hermitian_eigen(&gram.hermitian_part());
        checks.push(Check::new(
            "kernel_positive_semidefinite",
            (-vals[0]).max(0.0),
            1e-9,
        ));
    }
    {
        let mut worst: f64 = 0.0;
        let mut worst_norm: f64 = 0.0;
        let mut worst_sym: f64 = 0.0;
        for _ in 0..64 {
            let z = interior_point(&mut rng, 0.9);
            let w = interior_point(&mut rng, 0.9);
            let via_model = model.kernel_at(w, z)?;
            let via_schur = schur.kernel(z, w);
            worst = worst.max((via_model - via_schur).norm());
            worst_norm =
                worst_norm.max((model.kernel_at(Complex64::new(0.0, 0.0), z)? - 1.0).norm());
            worst_sym = worst_sym.max((model.kernel_at(w, z)? - model.kernel_at(z, w)?.conj()).norm());
        }
        checks.push(Check::new("kernel_two_routes_agree", worst, opts.tol));
        checks.push(Check::new("kernel_normalization_at_origin", worst_norm, 1e-9));
        checks.push(Check::new("kernel_hermitian_symmetry", worst_sym, 1e-9));
    }
    {
        checks.push(Check::new(
            "schur_unit_row",
            schur.unit_row_residual(256),
            opts.tol,
        ));
        let mut worst: f64 = 0.0;
        for _ in 0..64 {
            let z = interior_point(&mut rng, 0.95);
            let s: f64 = schur.components.iter().map(|b| b.eval(z).norm_sqr()).sum();
            worst = worst.max(s);
        }
        checks.push(Check::new(
            "schur_interior_bound",
            (worst - 1.0).max(0.0),
            1e-12,
        ));
        let mut origin: f64 = 0.0;
        for b in &schur.components {
            origin = origin.max(b.eval(Complex64::new(0.0, 0.0)).norm());
        }
        checks.push(Check::new("schur_vanishes_at_origin", origin, 1e-10));
    }
    if schur.rank > 0 {
        let half = Complex64::new(0.5, 0.0);
        let alpha: Vec<Complex64> = schur
            .components
            .iter()
            .map(|b| b.eval(half) * 0.3)
            .collect();
        let norm_sq: f64 = alpha.iter().map(|a| a.norm_sqr()).sum();
        let moved = mobius_normalize(&schur, &alpha)?;
        let mut worst: f64 = 0.0;
        for _ in 0..32 {
            let z = interior_point(&mut rng, 0.85);
            let w = interior_point(&mut rng, 0.85);
            let fz = Complex64::new(1.0, 0.0)
                - schur
                    .components
                    .iter()
                    .zip(alpha.iter())
                    .map(|(b, a)| b.eval(z) * a.conj())
                    .sum::<Complex64>();
            let fw = Complex64::new(1.0, 0.0)
                - alpha
                    .iter()
                    .zip(schur.components.iter())
                    .map(|(a, b)| a * b.eval(w).conj())
                    .sum::<Complex64>();
            let lhs = moved.kernel(z, w) * fz * fw;
            let rhs = schur.kernel(z, w) * (1.0 - norm_sq);
            worst = worst.max((lhs - rhs).norm());
        }
        checks.push(Check::new("mobius_kernel_identity", worst, opts.tol));
    }
    {
        // deg(den of B) = deg q = N for strict specs
        let n = spec.total_multiplicity();
        let mate_deg = model.mate.q.degree().unwrap_or(0);
        let schur_deg = schur
            .components
            .first()
            .map(|b| b.den().degree().unwrap_or(0))
            .unwrap_or(mate_deg);
        let ok = mate_deg == n && schur_deg == n;
        checks.push(Check::new(
            "mate_degree_accounting",
            if ok { 0.0 } else { 1.0 },
            0.5,
        ));
    }

    // --- operator layer ------------------------------------------------------
    {
        let p_a = &model.mate.p_a;
        let mut worst: f64 = 0.0;
        let scale = p_a.max_coeff_modulus();
        for k in 0..p_a.coeffs().len().max(operator.char_a.coeffs().len()) {
            worst = worst.max((operator.char_a.coeff(k) - p_a.coeff(k)).norm() / scale);
        }
        checks.push(Check::new("char_a_matches_p_a", worst, 1e-8));
        checks.push(Check::new(
            "char_l_roots_in_disc",
            if backward_shift_spectrum_in_disc(&operator)? {
                0.0
            } else {
                1.0
            },
            0.5,
        ));
    }
    if operator.n_dim > 0 {
        let n = operator.n_dim;
        let mut worst: f64 = 0.0;
        for _ in 0..6 {
            let x: Vec<Complex64> = (0..n).map(|_| rand_unit(&mut rng)).collect();
            let y: Vec<Complex64> = (0..n).map(|_| rand_unit(&mut rng)).collect();
            let ax = operator.a_matrix.mul_vec(&x);
            let asy = operator.astar_matrix.mul_vec(&y);
            let lhs = operator.metric_inner(&ax, &y);
            let rhs = operator.metric_inner(&x, &asy);
            worst = worst.max((lhs - rhs).norm());
        }
        checks.push(Check::new("gram_adjoint_consistency", worst, 1e-10));
    }
    {
        let mut worst: f64 = 0.0;
        for _ in 0..4 {
            let f = rand_rational(&mut rng, 3, 2);
            for order in 1..=6usize {
                let lhs = beta_form(&spec, order + 1, &f)?;
                let rhs = beta_form(&spec, order, &f.shift_up(1))? - beta_form(&spec, order, &f)?;
                worst = worst.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
            }
        }
        checks.push(Check::new("beta_telescoping", worst, 1e-9));
    }
    {
        // rank Delta <= N and N <= m_max rank Delta (even case), plus the
        // construction bound rank <= sum min(m_j, n_j)
        let rank = operator.delta_rank()?;
        let n_dim = operator.n_dim;
        let m = spec.max_multiplicity();
        let ok = rank <= n_dim && n_dim <= m * rank && rank <= spec.rank_bound();
        checks.push(Check::new("rank_bounds", if ok { 0.0 } else { 1.0 }, 0.5));
    }
    {
        // detected strict order is even, beta at strict order + 1 vanishes,
        // and at strict order - 1 does not
        let mut residual = 0.0;
        if let Some(so) = isometry.strict_order {
            if so % 2 != 0 {
                residual = 1.0;
            }
            let mut worst_even: f64 = 0.0;
            let mut best_odd_below: f64 = 0.0;
            for r in 0..=probe_degree.min(16) {
                let zr = RationalFn::from_poly(Poly::monomial(r));
                let scale = hb_inner(&zr, &zr, &spec)?.re;
                worst_even = worst_even.max(beta_form(&spec, so + 1, &zr)?.abs() / scale);
                if so >= 2 && !isometry.isometric {
                    best_odd_below =
                        best_odd_below.max(beta_form(&spec, so - 1, &zr)?.abs() / scale);
                }
            }
            if worst_even > 1e-7 {
                residual = 1.0;
            }
            if so >= 2 && !isometry.isometric && best_odd_below < 1e-8 {
                residual = 1.0;
            }
        }
        checks.push(Check::new("odd_order_collapse", residual, 0.5));
    }
    if !spec.is_empty() && !skip_strictness {
        let expect = 2 * spec.max_multiplicity();
        let ok = isometry.strict_order == Some(expect);
        checks.push(Check::new(
            "strict_order_matches_max_multiplicity",
            if ok { 0.0 } else { 1.0 },
            0.5,
        ));
    }
    {
        let crosscheck = theorem12_crosscheck(&operator, &model.mate)?;
        checks.push(Check::new(
            "theorem12_crosscheck",
            crosscheck.max_rel_deviation,
            1e-7,
        ));
    }
    {
        let blocks = delta_decomposition(&operator)?;
        let scale = operator.delta_matrix.max_abs().max(1.0);
        let mut sum = CMatrix::zeros(operator.n_dim, operator.n_dim);
        for b in &blocks {
            sum = sum.add(b);
        }
        checks.push(Check::new(
            "delta_decomposition_sum",
            sum.sub(&operator.delta_matrix).max_abs() / scale,
            1e-10,
        ));
        let mut worst_psd: f64 = 0.0;
        let mut worst_nilp: f64 = 0.0;
        let mut rank_total = 0usize;
        let top = operator
            .delta_eigenvalues()?
            .last()
            .copied()
            .unwrap_or(0.0)
            .max(1e-300);
        for (j, dj) in blocks.iter().enumerate() {
            let form = operator.kernel_gram.mul(dj).hermitian_part();
            let vals = generalized_hermitian_eigenvalues(&form, &operator.kernel_gram)?;
            if let Some(&low) = vals.first() {
                worst_psd = worst_psd.max((-low).max(0.0) / scale);
            }
            rank_total += vals.iter().filter(|&&v| v > RANK_CUTOFF * top).count();
            let w = spec.points[j].point();
            let mut shifted = operator.astar_matrix.clone();
            for i in 0..operator.n_dim {
                shifted[(i, i)] -= w.conj();
            }
            let res = shifted.pow(spec.points[j].m).mul(dj).max_abs();
            worst_nilp = worst_nilp.max(res / dj.max_abs().max(1.0));
        }
        checks.push(Check::new("delta_decomposition_psd", worst_psd, 1e-9));
        checks.push(Check::new("delta_decomposition_nilpotency", worst_nilp, opts.tol));
        let rank = operator.delta_rank()?;
        checks.push(Check::new(
            "delta_rank_accounting",
            if rank_total == rank { 0.0 } else { 1.0 },
            0.5,
        ));
    }
    if !spec.is_empty() {
        let mut worst = f64::INFINITY;
        for pt in &spec.points {
            if !pt.is_strict() {
                continue;
            }
            let w = pt.point();
            let x = eigenvector_for(&operator.a_matrix, w)?;
            let dx = operator.delta_matrix.mul_vec(&x);
            let val = operator.metric_inner(&dx, &x).re;
            let xnorm = operator.metric_inner(&x, &x).re;
            worst = worst.min(val / xnorm);
        }
        if worst.is_finite() {
            checks.push(Check::new(
                "eigenvector_nondegeneracy",
                if worst > 1e-10 { 0.0 } else { 1.0 },
                0.5,
            ));
        }
    }

    Ok(VerifyOutcome {
        checks,
        warnings,
        model,
        operator,
        schur,
        isometry,
    })
}

fn central_difference(f: &RationalFn, w: Complex64, order: usize, h: f64) -> Complex64 {
    match order {
        0 => f.eval(w),
        1 => (f.eval(w + h) - f.eval(w - h)) / (2.0 * h),
        2 => (f.eval(w + h) - 2.0 * f.eval(w) + f.eval(w - h)) / (h * h),
        _ => {
            // central difference of the derivative, recursively
            let up = central_difference(f, w + h, order - 2, h);
            let mid = central_difference(f, w, order - 2, h);
            let dn = central_difference(f, w - h, order - 2, h);
            (up - 2.0 * mid + dn) / (h * h)
        }
    }
}
