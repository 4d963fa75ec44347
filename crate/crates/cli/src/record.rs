//! The one-line JSON result record.

use serde::Serialize;
use vnentropy::{AssumptionCheck, EstimateReport};

#[derive(Debug, Clone, Serialize)]
pub struct Assumptions {
    pub u_ge_p1: &'static str,
    pub ell_le_pmin: &'static str,
    pub rank_le_k: &'static str,
}

impl From<AssumptionCheck> for Assumptions {
    fn from(c: AssumptionCheck) -> Self {
        Self { u_ge_p1: c.u_ge_p1.as_str(), ell_le_pmin: c.ell_le_pmin.as_str(), rank_le_k: c.rank_le_k.as_str() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateRecord {
    pub method: &'static str,
    pub n: usize,
    pub nnz: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p1_tilde: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nte: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proj: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    pub seed: u64,
    pub estimate: f64,
    /// `null` under `--no-timing`.
    pub wall_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_err: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_err: Option<f64>,
    pub assumptions: Assumptions,
    pub warnings: Vec<String>,
}

impl EstimateRecord {
    pub fn bare(method: &'static str, n: usize, nnz: usize, seed: u64, estimate: f64) -> Self {
        Self {
            method,
            n,
            nnz,
            m: None,
            s: None,
            u: None,
            p1_tilde: None,
            u_mode: None,
            nte: None,
            proj: None,
            rank: None,
            probs: None,
            seed,
            estimate,
            wall_ms: None,
            exact: None,
            rel_err: None,
            abs_err: None,
            assumptions: AssumptionCheck::unknown().into(),
            warnings: Vec::new(),
        }
    }

    pub fn from_report(report: EstimateReport, n: usize, nnz: usize, u_mode: String) -> Self {
        Self {
            m: report.m_used,
            s: report.s_used,
            u: report.u_used,
            p1_tilde: report.p1_tilde,
            u_mode: Some(u_mode),
            nte: Some(report.nte),
            wall_ms: Some(report.wall_ms),
            exact: report.exact,
            rel_err: report.rel_err,
            abs_err: report.abs_err,
            assumptions: report.assumptions.into(),
            warnings: report.warnings,
            ..Self::bare(report.method.as_str(), n, nnz, report.seed, report.estimate)
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record is serializable")
    }
}
