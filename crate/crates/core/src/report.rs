//! Structured pass/fail records for machine-checked claims.

use serde::Serialize;
use std::fmt;

use crate::value::ValOrInf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Pass => write!(f, "pass"),
            Status::Fail => write!(f, "fail"),
            Status::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// A reported numeric value; infinity serializes as the string "inf".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportValue(pub ValOrInf);

impl Serialize for ReportValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            ValOrInf::Fin(n) => s.serialize_u64(n),
            ValOrInf::Inf => s.serialize_str("inf"),
        }
    }
}

impl From<u64> for ReportValue {
    fn from(n: u64) -> Self {
        ReportValue(ValOrInf::Fin(n))
    }
}

impl From<ValOrInf> for ReportValue {
    fn from(v: ValOrInf) -> Self {
        ReportValue(v)
    }
}

/// One checked claim: a label, the outcome, optional compared values and a
/// witness on failure.
#[derive(Debug, Clone, Serialize)]
pub struct ClaimRecord {
    pub claim: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<ReportValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<ReportValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl ClaimRecord {
    pub fn pass(claim: impl Into<String>) -> ClaimRecord {
        ClaimRecord {
            claim: claim.into(),
            status: Status::Pass,
            lhs: None,
            rhs: None,
            detail: None,
            witness: None,
        }
    }

    pub fn fail(claim: impl Into<String>, witness: impl Into<String>) -> ClaimRecord {
        ClaimRecord {
            claim: claim.into(),
            status: Status::Fail,
            lhs: None,
            rhs: None,
            detail: None,
            witness: Some(witness.into()),
        }
    }

    pub fn inconclusive(claim: impl Into<String>, detail: impl Into<String>) -> ClaimRecord {
        ClaimRecord {
            claim: claim.into(),
            status: Status::Inconclusive,
            lhs: None,
            rhs: None,
            detail: Some(detail.into()),
            witness: None,
        }
    }

    pub fn compared(
        claim: impl Into<String>,
        lhs: ValOrInf,
        rhs: ValOrInf,
        witness_on_fail: impl Into<String>,
    ) -> ClaimRecord {
        let status = if lhs == rhs { Status::Pass } else { Status::Fail };
        ClaimRecord {
            claim: claim.into(),
            status,
            lhs: Some(lhs.into()),
            rhs: Some(rhs.into()),
            detail: None,
            witness: if lhs == rhs {
                None
            } else {
                Some(witness_on_fail.into())
            },
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> ClaimRecord {
        self.detail = Some(detail.into());
        self
    }

    pub fn is_pass(&self) -> bool {
        self.status == Status::Pass
    }
}

/// A bundle of claim records produced by one verification operation.
#[derive(Debug, Clone, Serialize, Default)]
pub struct VerificationReport {
    pub claims: Vec<ClaimRecord>,
}

impl VerificationReport {
    pub fn new() -> VerificationReport {
        VerificationReport { claims: Vec::new() }
    }

    pub fn push(&mut self, c: ClaimRecord) {
        self.claims.push(c);
    }

    pub fn all_pass(&self) -> bool {
        self.claims.iter().all(ClaimRecord::is_pass)
    }
}
