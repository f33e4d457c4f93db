use num_complex::Complex64;
use pencil_core::fiber::{FiberModel, PointKind};
use pencil_core::genericity::{CriticalData, GenericityReport};
use pencil_core::lattice::IntMatrix;
use pencil_core::monodromy::{MonodromyAudit, MonodromyRep};
use pencil_core::theorems::VerificationReport;
use serde::Serialize;

use crate::config::Tolerances;

/// Bumped whenever the layout of a report or cached payload changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub spec_hash: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub stages: Stages,
}

#[derive(Default, Serialize)]
pub struct Stages {
    pub genericity: Option<GenericityReport>,
    pub critical: Option<CriticalData>,
    pub fiber: Option<FiberSummary>,
    pub monodromy: Option<MonodromyStage>,
    pub verify: Option<VerificationReport>,
}

#[derive(Serialize)]
pub struct FiberSummary {
    pub b: Complex64,
    pub x0: Complex64,
    pub degree: usize,
    pub genus: usize,
    pub rank: usize,
    pub branch_points: usize,
    pub punctures: usize,
    pub intersection: IntMatrix,
}

impl FiberSummary {
    pub fn new(model: &FiberModel) -> Self {
        let punctures = model.points.iter().filter(|p| matches!(p.kind, PointKind::Puncture { .. })).count();
        Self {
            b: model.b,
            x0: model.x0,
            degree: model.degree,
            genus: model.genus,
            rank: model.rank(),
            branch_points: model.points.len() - punctures,
            punctures,
            intersection: model.intersection_matrix().clone(),
        }
    }
}

#[derive(Serialize)]
pub struct MonodromyStage {
    #[serde(flatten)]
    pub rep: MonodromyRep,
    pub audit: MonodromyAudit,
}
