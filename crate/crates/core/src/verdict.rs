use serde::Serialize;

use crate::scalar::{serde_exact, Scalar};

/// Outcome of a single pass/fail criterion.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct Verdict<T> {
    pub pass: bool,
    /// The clause that decided the outcome.
    pub clause: String,
    #[serde(with = "serde_exact")]
    pub value: T,
    #[serde(skip_serializing_if = "Option::is_none", with = "serde_exact::option")]
    pub threshold: Option<T>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub bound_limited: bool,
}

impl<T: Scalar> Verdict<T> {
    pub fn new(pass: bool, clause: impl Into<String>, value: T) -> Self {
        Verdict { pass, clause: clause.into(), value, threshold: None, bound_limited: false }
    }

    pub fn with_threshold(mut self, t: T) -> Self {
        self.threshold = Some(t);
        self
    }
}
