use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::extract::VortexPolyline;
use super::track::{EventLog, Frame};
use crate::error::{Error, Result};
use crate::Vec3;

/// One line of the polyline stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolylineRecord {
    pub frame: usize,
    pub t: f64,
    pub line_id: usize,
    pub closed: bool,
    pub winding: i32,
    #[serde(default)]
    pub boundary: bool,
    /// Flat x, y, z triplets.
    pub points: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chi: Vec<f64>,
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

fn fmt_err(e: impl std::fmt::Display) -> Error {
    Error::Format(e.to_string())
}

pub fn records(frames: &[Frame]) -> impl Iterator<Item = PolylineRecord> + '_ {
    frames.iter().flat_map(|f| {
        f.lines.iter().enumerate().map(move |(id, l)| PolylineRecord {
            frame: f.index,
            t: f.time,
            line_id: id,
            closed: l.closed,
            winding: l.winding,
            boundary: l.boundary,
            points: l.points.iter().flat_map(|p| [p.x, p.y, p.z]).collect(),
            chi: l.chi.clone(),
        })
    })
}

/// JSON Lines, one record per line per frame.
pub fn write_polylines_jsonl<W: Write>(frames: &[Frame], mut w: W) -> Result<()> {
    for r in records(frames) {
        serde_json::to_writer(&mut w, &r).map_err(fmt_err)?;
        w.write_all(b"\n").map_err(io_err)?;
    }
    Ok(())
}

/// Inverse of [`write_polylines_jsonl`]; frames without lines are not
/// represented in the stream and are not restored.
pub fn read_polylines_jsonl<R: BufRead>(r: R) -> Result<Vec<Frame>> {
    let mut frames: Vec<Frame> = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: PolylineRecord = serde_json::from_str(&line).map_err(|e| fmt_err(format!("line {}: {e}", n + 1)))?;
        if rec.points.len() % 3 != 0 {
            return Err(fmt_err(format!("line {}: point list not a multiple of 3", n + 1)));
        }
        let points = rec.points.chunks(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect();
        let poly = VortexPolyline {
            points,
            closed: rec.closed,
            winding: rec.winding,
            frame_time: rec.t,
            boundary: rec.boundary,
            chi: rec.chi,
        };
        match frames.last_mut() {
            Some(f) if f.index == rec.frame => f.lines.push(poly),
            _ => frames.push(Frame {
                index: rec.frame,
                time: rec.t,
                lines: vec![poly],
                ambiguous: 0,
                unpaired: 0,
                unrefined: 0,
            }),
        }
    }
    Ok(frames)
}

#[derive(Serialize)]
struct PointRow {
    frame: usize,
    t: f64,
    line_id: usize,
    closed: bool,
    winding: i32,
    point: usize,
    x: f64,
    y: f64,
    z: f64,
}

/// Tabular variant: one point per row.
pub fn write_polylines_csv<W: Write>(frames: &[Frame], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for f in frames {
        for (id, l) in f.lines.iter().enumerate() {
            for (k, p) in l.points.iter().enumerate() {
                out.serialize(PointRow {
                    frame: f.index,
                    t: f.time,
                    line_id: id,
                    closed: l.closed,
                    winding: l.winding,
                    point: k,
                    x: p.x,
                    y: p.y,
                    z: p.z,
                })
                .map_err(fmt_err)?;
            }
        }
    }
    out.flush().map_err(io_err)
}

pub fn write_events_json<W: Write>(log: &EventLog, w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, log).map_err(fmt_err)
}

pub fn read_events_json<R: std::io::Read>(r: R) -> Result<EventLog> {
    serde_json::from_reader(r).map_err(fmt_err)
}
