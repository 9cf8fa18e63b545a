//! Serial-search selection of per-cell switch states that cancels the
//! co-polar field in a commanded direction.

use num_complex::Complex64;

use crate::farfield::Direction;
use crate::model::{CellAssignment, ImsModel};
use crate::parallel;
use crate::scattering::SwitchState;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NullSpec {
    pub direction: Direction,
    pub state_set: Vec<SwitchState>,
}

impl NullSpec {
    pub fn new(direction: Direction) -> Result<Self> {
        NullSpec::with_states(direction, SwitchState::BOTH.to_vec())
    }

    pub fn with_states(direction: Direction, state_set: Vec<SwitchState>) -> Result<Self> {
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&direction.theta_z) || !direction.phi.is_finite() {
            return Err(Error::Domain(format!(
                "null direction theta_z = {} rad outside the forward hemisphere",
                direction.theta_z
            )));
        }
        if state_set.is_empty() {
            return Err(Error::Domain("null state set is empty".into()));
        }
        Ok(NullSpec { direction, state_set })
    }
}

/// Designed switch map and the field it leaves at the null.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchConfig {
    /// One state per cell in tessellation order.
    pub states: Vec<SwitchState>,
    /// Total co-polar field at the null after the last cell, V.
    pub residual: Complex64,
    /// `|T_i|` after each cell.
    pub history: Vec<f64>,
}

/// Co-polar contribution of every cell under every selectable state.
#[derive(Debug, Clone, PartialEq)]
pub struct ContributionTable {
    pub states: Vec<SwitchState>,
    /// `values[cell][k]` is the contribution of `cell` in `states[k]`.
    pub values: Vec<Vec<Complex64>>,
}

/// Picks one state per cell given the starting field and the contributions.
pub trait StateSelector {
    fn select(&self, table: &ContributionTable, t0: Complex64) -> SwitchConfig;
}

/// Single pass in cell order, each cell minimizing the running total.
#[derive(Debug, Clone, Copy, Default)]
pub struct SerialSearch;

impl StateSelector for SerialSearch {
    fn select(&self, table: &ContributionTable, t0: Complex64) -> SwitchConfig {
        serial_search(table, t0)
    }
}

/// Greedy single pass: cell `i` takes `argmin_s |T_{i-1} + c_i(s)|`; exact
/// ties go to `Off`, otherwise to the earlier state in the set.
pub fn serial_search(table: &ContributionTable, t0: Complex64) -> SwitchConfig {
    let mut total = t0;
    let mut states = Vec::with_capacity(table.values.len());
    let mut history = Vec::with_capacity(table.values.len());
    for row in &table.values {
        let mut best: Option<(usize, f64)> = None;
        for (k, c) in row.iter().enumerate() {
            let mag = (total + c).norm();
            best = match best {
                None => Some((k, mag)),
                Some((_, m)) if mag < m => Some((k, mag)),
                Some((_, m)) if mag == m && table.states[k] == SwitchState::Off => Some((k, mag)),
                keep => keep,
            };
        }
        let (k, mag) = best.expect("contribution row is non-empty");
        total += row[k];
        states.push(table.states[k]);
        history.push(mag);
    }
    SwitchConfig {
        states,
        residual: total,
        history,
    }
}

/// Co-polar field of the reflector portion at `dir`.
pub fn reflector_field_at(model: &ImsModel, dir: Direction) -> Result<Complex64> {
    model.reflector_field(dir)
}

/// Co-polar field of one cell in `state` at `dir`.
pub fn cell_contribution(model: &ImsModel, cell: usize, state: SwitchState, dir: Direction) -> Result<Complex64> {
    let dyad = model.cell_dyad(cell, state)?;
    model.cell_field(cell, &dyad, dir)
}

/// Every cell's contribution at the null under every state of the set.
pub fn contributions(model: &ImsModel, null: &NullSpec) -> Result<ContributionTable> {
    let idx: Vec<usize> = (0..model.cells().len()).collect();
    let values = parallel::map(&idx, |&i| {
        null.state_set
            .iter()
            .map(|&s| cell_contribution(model, i, s, null.direction))
            .collect::<Result<Vec<_>>>()
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(ContributionTable {
        states: null.state_set.clone(),
        values,
    })
}

/// Full design with the default selector.
pub fn design(model: &ImsModel, null: &NullSpec) -> Result<SwitchConfig> {
    design_with(model, null, &SerialSearch)
}

pub fn design_with(model: &ImsModel, null: &NullSpec, selector: &dyn StateSelector) -> Result<SwitchConfig> {
    let t0 = reflector_field_at(model, null.direction)?;
    let table = contributions(model, null)?;
    Ok(selector.select(&table, t0))
}

/// Dyad of each cell's selected state.
pub fn apply_states(model: &ImsModel, states: &[SwitchState]) -> Result<CellAssignment> {
    if states.len() != model.cells().len() {
        return Err(Error::Contract(format!(
            "switch map has {} states for {} cells",
            states.len(),
            model.cells().len()
        )));
    }
    states.iter().enumerate().map(|(i, &s)| model.cell_dyad(i, s)).collect()
}
