//! The stages chained together: critical data, a fiber model over a
//! regular value, and the monodromy along a distinguished path system.

use num_complex::Complex64;

use crate::error::Result;
use crate::fiber::{build_fiber, FiberModel};
use crate::genericity::{critical_points, CriticalData, PencilSpec, Precision};
use crate::monodromy::{choose_base, monodromy, MonodromyRep};
use crate::numsolve::TrackerConfig;

#[derive(Clone, Debug)]
pub struct Analysis {
    pub data: CriticalData,
    pub model: FiberModel,
    pub rep: MonodromyRep,
}

/// Regular base value for the path system, clear of the critical values and
/// of zero when zero is exceptional.
pub fn base_value(spec: &PencilSpec, data: &CriticalData, seed: u64) -> Complex64 {
    let avoid = if spec.p() > 1 { vec![Complex64::new(0.0, 0.0)] } else { Vec::new() };
    choose_base(&data.values, &avoid, seed)
}

pub fn analyze(spec: &PencilSpec, seed: u64, precision: Precision, cfg: &TrackerConfig) -> Result<Analysis> {
    let data = critical_points(spec, seed, precision)?;
    let base = base_value(spec, &data, seed);
    let model = build_fiber(spec, base, &data.base_points, seed, cfg)?;
    let rep = monodromy(spec, &model, &data.values, cfg)?;
    Ok(Analysis { data, model, rep })
}
