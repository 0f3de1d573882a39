//! The structured result document the CLI emits: the constructed objects,
//! the named checks with residuals, and the collected warnings.

use serde::{Deserialize, Serialize};

use crate::dirichlet::SpaceSpec;
use crate::linalg::CMatrix;
use crate::poly::Poly;
use crate::rational::RationalFn;
use crate::verify::{Check, VerifyOutcome};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MateReport {
    #[serde(rename = "p_A")]
    pub p_a: Poly,
    pub q: Poly,
    pub a: RationalFn,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SchurReport {
    pub components: Vec<RationalFn>,
    pub mate: RationalFn,
    pub rank: usize,
    /// How the unimodular freedom of each component was resolved.
    pub phase_convention: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub spec: SpaceSpec,
    pub mate: MateReport,
    /// Row-major, entries as [re, im].
    pub grammian: Vec<Vec<[f64; 2]>>,
    pub grammian_inverse: Vec<Vec<[f64; 2]>>,
    pub grammian_condition: f64,
    pub dual_basis: Vec<RationalFn>,
    pub kernel_basis: Vec<RationalFn>,
    pub schur: SchurReport,
    #[serde(rename = "char_A")]
    pub char_a: Poly,
    #[serde(rename = "char_L")]
    pub char_l: Poly,
    /// Least even order whose beta form vanishes on the probe family;
    /// absent when nothing up to the cap was detected.
    pub strict_order: Option<usize>,
    /// True when the defect vanishes entirely (H^2 itself).
    pub isometric: bool,
    pub checks: Vec<Check>,
    pub overall_pass: bool,
    pub warnings: Vec<String>,
}

pub fn matrix_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.n_rows())
        .map(|r| {
            (0..m.n_cols())
                .map(|c| {
                    let v = m[(r, c)];
                    [v.re, v.im]
                })
                .collect()
        })
        .collect()
}

impl Report {
    pub fn from_outcome(outcome: &VerifyOutcome) -> Report {
        let overall_pass = outcome.all_pass();
        Report {
            spec: outcome.model.spec.clone(),
            mate: MateReport {
                p_a: outcome.model.mate.p_a.clone(),
                q: outcome.model.mate.q.clone(),
                a: outcome.model.mate.a.clone(),
                warnings: outcome.model.mate.warnings.clone(),
            },
            grammian: matrix_rows(&outcome.model.grammian),
            grammian_inverse: matrix_rows(&outcome.model.grammian_inverse),
            grammian_condition: outcome.model.condition,
            dual_basis: outcome.model.dual_basis.clone(),
            kernel_basis: outcome.model.kernel_basis.clone(),
            schur: SchurReport {
                components: outcome.schur.components.clone(),
                mate: outcome.schur.mate.clone(),
                rank: outcome.schur.rank,
                phase_convention:
                    "first nonvanishing Maclaurin coefficient of each component is real positive"
                        .to_string(),
            },
            char_a: outcome.operator.char_a.clone(),
            char_l: outcome.operator.char_l.clone(),
            strict_order: outcome.isometry.strict_order,
            isometric: outcome.isometry.isometric,
            checks: outcome.checks.clone(),
            overall_pass,
            warnings: outcome.warnings.clone(),
        }
    }
}
