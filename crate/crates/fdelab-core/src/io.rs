//! Deterministic serialization of trajectories and tables.
//!
//! Floats print with 17 significant digits in a canonical scientific form,
//! which round-trips f64 exactly: parsing an emitted file and re-emitting
//! it reproduces the bytes. Two trajectory containers exist — long-format
//! CSV (`t,r,u`) and a compact binary column format:
//!
//!   bytes 0..8   magic "FDETRJ01"
//!   bytes 8..12  u32 LE: number of nodes
//!   bytes 12..16 u32 LE: number of stored times
//!   then nodes, times, and states (time-major), all f64 LE.

use std::io::{Read, Write};
use std::sync::Arc;

use crate::elliptic::DecayTable;
use crate::error::{Error, Result};
use crate::geometry::{RadialField, RadialGrid};
use crate::parabolic::SpaceTimeField;

pub const TRAJECTORY_MAGIC: &[u8; 8] = b"FDETRJ01";

/// Canonical float formatting: 17 significant digits, scientific.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_float(s: &str, what: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::Parse(format!("{what}: bad float '{s}'")))
}

/// Write a trajectory as long-format CSV with header `t,r,u`.
pub fn write_trajectory_csv<W: Write>(mut w: W, traj: &SpaceTimeField) -> Result<()> {
    writeln!(w, "t,r,u")?;
    let nodes = traj.grid().nodes();
    for (ti, t) in traj.times().iter().enumerate() {
        let state = &traj.states()[ti];
        for (ni, r) in nodes.iter().enumerate() {
            writeln!(
                w,
                "{},{},{}",
                format_float(*t),
                format_float(*r),
                format_float(state.values()[ni])
            )?;
        }
    }
    Ok(())
}

/// Parse a trajectory written by [`write_trajectory_csv`].
pub fn read_trajectory_csv<R: Read>(mut r: R) -> Result<SpaceTimeField> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let mut lines = text.lines();
    match lines.next() {
        Some("t,r,u") => {}
        other => {
            return Err(Error::Parse(format!(
                "trajectory csv: expected header 't,r,u', got {other:?}"
            )))
        }
    }
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let t = parse_float(parts.next().unwrap_or(""), "t")?;
        let r = parse_float(
            parts
                .next()
                .ok_or_else(|| Error::Parse(format!("row {}: missing r", i + 2)))?,
            "r",
        )?;
        let u = parse_float(
            parts
                .next()
                .ok_or_else(|| Error::Parse(format!("row {}: missing u", i + 2)))?,
            "u",
        )?;
        if parts.next().is_some() {
            return Err(Error::Parse(format!("row {}: too many fields", i + 2)));
        }
        rows.push((t, r, u));
    }
    if rows.is_empty() {
        return Err(Error::Parse("trajectory csv: no data rows".into()));
    }

    // The node block length is the run of rows sharing the first time.
    let t0 = rows[0].0;
    let nn = rows.iter().take_while(|row| row.0 == t0).count();
    if nn < 2 || rows.len() % nn != 0 {
        return Err(Error::Parse(format!(
            "trajectory csv: {} rows do not tile into blocks of {nn}",
            rows.len()
        )));
    }
    let nodes: Vec<f64> = rows[..nn].iter().map(|row| row.1).collect();
    let grid = RadialGrid::from_nodes(nodes.clone())?;

    let nt = rows.len() / nn;
    let mut times = Vec::with_capacity(nt);
    let mut states = Vec::with_capacity(nt);
    for block in 0..nt {
        let chunk = &rows[block * nn..(block + 1) * nn];
        let t = chunk[0].0;
        for (i, row) in chunk.iter().enumerate() {
            if row.0 != t {
                return Err(Error::Parse(format!("block {block}: time changed mid-block")));
            }
            if row.1 != nodes[i] {
                return Err(Error::Parse(format!(
                    "block {block}: node {i} is {} but the grid has {}",
                    row.1, nodes[i]
                )));
            }
        }
        times.push(t);
        states.push(RadialField::new(
            Arc::clone(&grid),
            chunk.iter().map(|row| row.2).collect(),
        )?);
    }
    SpaceTimeField::new(grid, times, states)
}

/// Write the compact binary column format.
pub fn write_trajectory_bin<W: Write>(mut w: W, traj: &SpaceTimeField) -> Result<()> {
    w.write_all(TRAJECTORY_MAGIC)?;
    let nn = traj.grid().num_nodes() as u32;
    let nt = traj.times().len() as u32;
    w.write_all(&nn.to_le_bytes())?;
    w.write_all(&nt.to_le_bytes())?;
    for &x in traj.grid().nodes() {
        w.write_all(&x.to_le_bytes())?;
    }
    for &t in traj.times() {
        w.write_all(&t.to_le_bytes())?;
    }
    for state in traj.states() {
        for &v in state.values() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Parse the binary column format.
pub fn read_trajectory_bin<R: Read>(mut r: R) -> Result<SpaceTimeField> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != TRAJECTORY_MAGIC {
        return Err(Error::Parse(format!(
            "trajectory bin: bad magic {magic:?}, expected {TRAJECTORY_MAGIC:?}"
        )));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let nn = u32::from_le_bytes(u32buf) as usize;
    r.read_exact(&mut u32buf)?;
    let nt = u32::from_le_bytes(u32buf) as usize;
    if nn < 2 || nt == 0 || nn.saturating_mul(nt) > 1 << 30 {
        return Err(Error::Parse(format!(
            "trajectory bin: implausible shape {nn} x {nt}"
        )));
    }
    let mut read_f64s = |count: usize| -> Result<Vec<f64>> {
        let mut buf = vec![0u8; count * 8];
        r.read_exact(&mut buf)?;
        Ok(buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    };
    let nodes = read_f64s(nn)?;
    let times = read_f64s(nt)?;
    let grid = RadialGrid::from_nodes(nodes)?;
    let mut states = Vec::with_capacity(nt);
    for _ in 0..nt {
        states.push(RadialField::new(Arc::clone(&grid), read_f64s(nn)?)?);
    }
    SpaceTimeField::new(grid, times, states)
}

/// Decay-table CSV with the fixed column set.
pub fn write_decay_csv<W: Write>(mut w: W, table: &DecayTable) -> Result<()> {
    writeln!(w, "R,sup_barrier,sup_solution,newton_iters,residual")?;
    for row in &table.rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            format_float(row.domain_radius),
            format_float(row.sup_barrier),
            format_float(row.sup_solution),
            row.newton_iterations,
            format_float(row.residual)
        )?;
    }
    Ok(())
}

/// Parse a decay-table CSV (failure annotations are not round-tripped; a
/// NaN column marks a failed row).
pub fn read_decay_csv<R: Read>(mut r: R, probe_radius: f64) -> Result<DecayTable> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let mut lines = text.lines();
    match lines.next() {
        Some("R,sup_barrier,sup_solution,newton_iters,residual") => {}
        other => return Err(Error::Parse(format!("decay csv: bad header {other:?}"))),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 5 {
            return Err(Error::Parse(format!("decay csv row {}: bad field count", i + 2)));
        }
        rows.push(crate::elliptic::DecayRow {
            domain_radius: parse_float(parts[0], "R")?,
            sup_barrier: parse_float(parts[1], "sup_barrier")?,
            sup_solution: parse_float(parts[2], "sup_solution")?,
            newton_iterations: parts[3]
                .parse()
                .map_err(|_| Error::Parse(format!("decay csv row {}: bad iters", i + 2)))?,
            residual: parse_float(parts[4], "residual")?,
            failure: None,
        });
    }
    Ok(DecayTable {
        probe_radius,
        rows,
    })
}
