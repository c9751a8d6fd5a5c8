//! Solution CSV and functional JSON records.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{FemError, Result};
use crate::space::Space;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionRow {
    pub node: usize,
    pub x: f64,
    pub y: f64,
    pub u1: f64,
    pub u2: f64,
}

pub fn write_solution_csv<W: Write>(space: &Space, u: &[f64], w: W) -> Result<()> {
    if u.len() != space.n_dofs() {
        return Err(FemError::Mismatch("field does not belong to this space".into()));
    }
    let mut out = csv::Writer::from_writer(w);
    for (node, p) in space.points.iter().enumerate() {
        out.serialize(SolutionRow { node, x: p[0], y: p[1], u1: u[2 * node], u2: u[2 * node + 1] })?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_solution_csv<R: Read>(r: R) -> Result<Vec<SolutionRow>> {
    let mut rd = csv::Reader::from_reader(r);
    Ok(rd.deserialize().collect::<std::result::Result<Vec<SolutionRow>, _>>()?)
}

/// One computed functional value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalRecord {
    pub epsilon: f64,
    pub quantity: String,
    pub indices: Vec<usize>,
    pub value: f64,
    pub mesh_h: f64,
    pub dofs: usize,
}

pub fn write_records_json<W: Write>(records: &[FunctionalRecord], w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, records)?;
    Ok(())
}

pub fn read_records_json<R: Read>(r: R) -> Result<Vec<FunctionalRecord>> {
    Ok(serde_json::from_reader(r)?)
}
