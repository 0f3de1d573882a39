pub mod dirichlet;
pub mod kernel;
pub mod error;
pub mod linalg;
pub mod operator;
pub mod poly;
pub mod rational;
pub mod report;
pub mod roots;
pub mod spectral;
pub mod verify;
pub mod trig;

pub use dirichlet::{aleman_malman_quadrature, delta_form, hb_inner, local_dirichlet, SpacePoint, SpaceSpec};
pub use error::{Error, Result};
pub use kernel::{dual_basis, grammian, mobius_normalize, recover_schur, KernelModel, SchurFunction};
pub use operator::{beta_form, build_operator_model, delta_decomposition, isometry_order, theorem12_crosscheck, OperatorModel};
pub use poly::{conjugate_reciprocal, Poly};
pub use rational::{deflate, h2_inner, h2_norm_sq, taylor_polynomial, RationalFn};
pub use report::{MateReport, Report, SchurReport};
pub use roots::poly_roots;
pub use spectral::{fejer_riesz, mate_from_char_polys, mate_from_spec, mate_rank_one, MateResult};
pub use trig::TrigPoly;
pub use verify::{run_verification, Check, VerifyOptions, VerifyOutcome};
