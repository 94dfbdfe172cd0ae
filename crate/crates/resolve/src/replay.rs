//! Re-deriving shipped charts with the generic blow-up engine.

use resolve_core::chart::{blowup_step, compare_charts, compose_parent, restrict_to_open, ChartComparison, ChartPresentation};
use resolve_core::ideal::Budget;
use resolve_core::poly::parse;

use crate::data::{CenterEntry, Dataset, StepEntry};
use crate::Error;

/// The base chart of a step, restricted to the step's open set if any.
pub fn base_chart(ds: &Dataset, step: &StepEntry) -> Result<ChartPresentation, Error> {
    let c = ds.tower.get(&step.chart)?;
    match &step.open {
        None => Ok(c.clone()),
        Some(f) => Ok(restrict_to_open(c, &parse(f, &c.reg)?)?),
    }
}

/// Runs one sequence of centers from the base chart; intermediate charts are
/// composed away so the result's parent is the base chart.
pub fn run_order(base: &ChartPresentation, order: &[CenterEntry], budget: &Budget) -> Result<ChartPresentation, Error> {
    let mut cur = base.clone();
    for (i, center) in order.iter().enumerate() {
        let spec = center.spec(&cur)?;
        let mut next = blowup_step(&cur, &spec, budget)?;
        next.name = center.result.clone();
        if i > 0 {
            next = compose_parent(base, &cur, &next)?;
        }
        cur = next;
    }
    Ok(cur)
}

/// Engine output for every listed order of `step`, compared to the shipped
/// result chart.
pub fn replay_step(ds: &Dataset, step: &StepEntry, budget: &Budget) -> Result<Vec<ChartComparison>, Error> {
    let base = base_chart(ds, step)?;
    let shipped = ds.tower.get(&step.result)?;
    step.orders
        .iter()
        .map(|order| {
            let engine = run_order(&base, order, budget)?;
            Ok(compare_charts(&engine, shipped, budget)?)
        })
        .collect()
}
