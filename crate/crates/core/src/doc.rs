//! Serializable document for a representation and its provenance.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::FdpbRep;
use crate::error::Result;
use crate::matrix::Matrix;
use crate::report::ValidationReport;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub generator: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// `{"n", "a", "b", "k", "meta"}` plus the validation report written at
/// build time, if any.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepresentationDoc {
    pub n: usize,
    pub a: Matrix,
    pub b: Matrix,
    pub k: Matrix,
    pub meta: Meta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<ValidationReport>,
}

impl RepresentationDoc {
    pub fn new(rep: &FdpbRep, meta: Meta) -> Self {
        RepresentationDoc {
            n: rep.n(),
            a: rep.a().clone(),
            b: rep.b().clone(),
            k: rep.k().clone(),
            meta,
            report: None,
        }
    }

    /// Rebuilds the triple, checking that `n` agrees with the matrices.
    pub fn to_rep(&self) -> Result<FdpbRep> {
        let rep = FdpbRep::new(self.a.clone(), self.b.clone(), self.k.clone())?;
        if rep.n() != self.n {
            return Err(crate::error::Error::DimensionMismatch {
                expected: self.n,
                found: rep.n(),
            });
        }
        Ok(rep)
    }
}
