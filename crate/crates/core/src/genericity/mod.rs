//! Genericity certificates for a pencil and its critical data.

mod checks;
mod critical;
mod spec;
mod stratum;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use checks::{check_smooth, check_transversal};
pub use critical::{certify, critical_points, critical_set_A, CriticalData, ExceptionalValue};
pub use spec::{PencilSpec, SpecFile};
pub use stratum::{singularity_stratum, Stratum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Outcome of one certificate, with witness points for failures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub verdict: Verdict,
    pub witnesses: Vec<[Complex64; 3]>,
    pub note: String,
}

impl CheckResult {
    pub fn pass(note: impl Into<String>) -> Self {
        Self { verdict: Verdict::Pass, witnesses: Vec::new(), note: note.into() }
    }

    pub fn fail(witnesses: Vec<[Complex64; 3]>, note: impl Into<String>) -> Self {
        Self { verdict: Verdict::Fail, witnesses, note: note.into() }
    }

    pub fn inconclusive(note: impl Into<String>) -> Self {
        Self { verdict: Verdict::Inconclusive, witnesses: Vec::new(), note: note.into() }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub smooth_f: CheckResult,
    pub smooth_g: CheckResult,
    pub transversal: CheckResult,
    pub nondegenerate: CheckResult,
    pub distinct_values: CheckResult,
}

impl GenericityReport {
    pub fn checks(&self) -> [(&'static str, &CheckResult); 5] {
        [
            ("smooth_F", &self.smooth_f),
            ("smooth_G", &self.smooth_g),
            ("transversal", &self.transversal),
            ("nondegenerate", &self.nondegenerate),
            ("distinct_values", &self.distinct_values),
        ]
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|(_, c)| c.passed())
    }

    /// `Fail` dominates `Inconclusive`, which dominates `Pass`.
    pub fn verdict(&self) -> Verdict {
        let vs: Vec<Verdict> = self.checks().iter().map(|(_, c)| c.verdict).collect();
        if vs.contains(&Verdict::Fail) {
            Verdict::Fail
        } else if vs.contains(&Verdict::Inconclusive) {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        }
    }
}

/// Working precision for refinement of critical data.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    #[default]
    Double,
    DoubleDouble,
}
