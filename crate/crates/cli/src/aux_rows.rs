//! Evaluating the auxiliary-function reference rows at a chosen `ξ_C`.
//!
//! Their source does not state the inner boundary, so agreement is only
//! informative and never affects an exit code.

use threecenter_core::auxiliary::{aux_general_direct, aux_reduced};
use threecenter_core::precision::format_sci;
use threecenter_core::{AuxParams, OrbitalIndices, PrecisionContext};

use crate::config::{AuxKind, AuxReference};
use crate::error::{BenchError, Result};
use crate::runner::agreeing_digits;

#[derive(Clone, Debug, PartialEq)]
pub struct AuxComparison {
    pub id: String,
    pub j: String,
    pub k: String,
    pub j_digits: u32,
    pub k_digits: u32,
}

pub fn evaluate_aux(row: &AuxReference, xi_c: &str, digits: u32) -> Result<AuxComparison> {
    let ctx = PrecisionContext::new(digits).map_err(|e| BenchError::Invalid(e.to_string()))?;
    let numerical = |source| BenchError::Numerical {
        case: row.id.clone(),
        source,
    };
    let num = |s: &str| ctx.parse(s).map_err(numerical);
    let tol = ctx.default_tolerance();
    let params = |p1: &str, p2: &str| -> Result<AuxParams> {
        AuxParams::new(num(p1)?, num(p2)?, num(xi_c)?).map_err(numerical)
    };
    let pair = match &row.kind {
        AuxKind::Reduced { l, lambda, q, n1, n2, p1, p2 } => {
            aux_reduced(*l, *lambda, *q, &num(n1)?, &num(n2)?, &params(p1, p2)?, &tol, &ctx).map_err(numerical)?
        }
        AuxKind::General { l, m, a, b, p1, p2 } => {
            let oa = OrbitalIndices::new(num(&a.0)?, a.1, a.2).map_err(numerical)?;
            let ob = OrbitalIndices::new(num(&b.0)?, b.1, b.2).map_err(numerical)?;
            aux_general_direct(*l, *m, &oa, &ob, &params(p1, p2)?, &tol, &ctx).map_err(numerical)?
        }
    };
    Ok(AuxComparison {
        id: row.id.clone(),
        j_digits: agreeing_digits(&pair.j_value, &row.j),
        k_digits: agreeing_digits(&pair.k_value, &row.k),
        j: format_sci(&pair.j_value, digits as usize),
        k: format_sci(&pair.k_value, digits as usize),
    })
}
