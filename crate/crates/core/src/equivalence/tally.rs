use serde::Serialize;

use crate::scalar::Scalar;

/// Running record of pointwise checks `lhs <= rhs * (1 + tol)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityTally {
    pub name: String,
    pub passed: bool,
    /// Largest `lhs / rhs`; infinity when `rhs = 0 < lhs`.
    pub worst_ratio: f64,
    pub worst_at: Option<String>,
    pub evaluated: usize,
    /// Cases with `lhs = rhs = 0`.
    pub skipped: usize,
    pub failure_count: usize,
    pub tol: f64,
}

impl InequalityTally {
    pub fn new(name: impl Into<String>, tol: f64) -> Self {
        Self {
            name: name.into(),
            passed: true,
            worst_ratio: 0.0,
            worst_at: None,
            evaluated: 0,
            skipped: 0,
            failure_count: 0,
            tol,
        }
    }

    /// Records one comparison; returns the ratio (0 when both sides vanish).
    pub fn push<T: Scalar>(&mut self, lhs: T, rhs: T, at: impl FnOnce() -> String) -> f64 {
        self.evaluated += 1;
        let (l, r) = (lhs.to_f64_lossy(), rhs.to_f64_lossy());
        let ratio = if r > 0.0 {
            l / r
        } else if l > 0.0 {
            f64::INFINITY
        } else {
            self.skipped += 1;
            return 0.0;
        };
        let ok = ratio <= 1.0 + self.tol;
        if ratio > self.worst_ratio || (self.worst_at.is_none() && !ok) {
            self.worst_ratio = ratio;
            self.worst_at = Some(at());
        }
        if !ok {
            self.passed = false;
            self.failure_count += 1;
        }
        ratio
    }

    pub fn merge(&mut self, other: &Self) {
        self.evaluated += other.evaluated;
        self.skipped += other.skipped;
        self.failure_count += other.failure_count;
        self.passed &= other.passed;
        if other.worst_ratio > self.worst_ratio {
            self.worst_ratio = other.worst_ratio;
            self.worst_at = other.worst_at.clone();
        }
    }
}

pub(crate) fn fmt_point<T: Scalar>(x: &[T]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{}", v.to_f64_lossy())).collect();
    format!("({})", parts.join(", "))
}
