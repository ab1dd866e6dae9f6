use serde_json::{json, Value};
use tractor_symm::canon_symm::CanonError;
use tractor_symm::ckt_solve::CktError;
use tractor_symm::symm_algebra::AlgebraError;

use crate::config::{ConfigError, RunConfig};

pub const SCHEMA: &str = "tractor-symm/1";

/// What a subcommand produced: a result for each output format and whether
/// every verdict in it passed.
pub struct Outcome {
    pub text: String,
    pub result: Value,
    pub passed: bool,
}

impl Outcome {
    pub fn new(text: String, result: Value, passed: bool) -> Self {
        Outcome { text, result, passed }
    }

    pub fn envelope(&self, command: &str, cfg: &RunConfig) -> Value {
        json!({
            "schema": SCHEMA,
            "command": command,
            "config": cfg,
            "verdict": verdict(self.passed),
            "result": self.result,
        })
    }
}

pub fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

/// Why a run stopped before producing an outcome.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Resource(String),
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Verification(_) => 2,
            Failure::Resource(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Resource(m) | Failure::Verification(m) => m,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<CktError> for Failure {
    fn from(e: CktError) -> Self {
        match e {
            CktError::NoStabilization(_) => Failure::Resource(e.to_string()),
            CktError::RankMismatch { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Verification(e.to_string()),
        }
    }
}

impl From<CanonError> for Failure {
    fn from(e: CanonError) -> Self {
        match e {
            CanonError::Ckt(inner) => inner.into(),
            CanonError::NoTermination(_) => Failure::Resource(e.to_string()),
            CanonError::DOutOfRange { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Verification(e.to_string()),
        }
    }
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::Ckt(inner) => inner.into(),
            AlgebraError::Canon(inner) => inner.into(),
            AlgebraError::Infeasible { .. } => Failure::Resource(e.to_string()),
            _ => Failure::Verification(e.to_string()),
        }
    }
}
