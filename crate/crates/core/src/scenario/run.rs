use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::{self, CheckResult, Ctx};
use super::{svg, CheckKind, OutputFormat, ScenarioConfig};
use crate::error::{Error, Result};
use crate::tracker::io::{write_events_json, write_polylines_csv, write_polylines_jsonl};
use crate::tracker::{extract_at, frame_times, track, EventLog, Frame, TrackOptions, Tracking};
use crate::Solution;

/// Machine-readable verification summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: String,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub summary: Summary,
    pub frames: Vec<Frame>,
    pub events: EventLog,
    /// Files written, in writing order.
    pub artifacts: Vec<PathBuf>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

fn finish(mut w: BufWriter<File>) -> Result<()> {
    w.flush().map_err(Error::from)
}

/// Sample, extract and track, run every requested check, then write
/// artifacts to `cfg.output.dir`. Check failures are reported in the
/// summary, not as errors.
pub fn run(cfg: &ScenarioConfig) -> Result<RunReport> {
    cfg.check()?;
    let sol = Solution::new(cfg.spec.clone(), cfg.consts)?;
    let [t0, t1] = cfg.time_range;
    let opts = TrackOptions::default();
    let tracking: Option<Tracking> = if cfg.n_frames >= 3 {
        Some(track(&sol, &cfg.grid, t0, t1, cfg.n_frames, &opts)?)
    } else {
        None
    };
    let frames: Vec<Frame> = match &tracking {
        Some(t) => t.frames.clone(),
        None => frame_times(t0, t1, cfg.n_frames)
            .into_par_iter()
            .enumerate()
            .map(|(i, t)| extract_at(&sol, &cfg.grid, t, i, &opts.extract))
            .collect::<Result<_>>()?,
    };
    let ctx = Ctx { cfg, sol: &sol, frames: &frames, tracking: tracking.as_ref(), extract: opts.extract };
    let results: Vec<Vec<CheckResult>> = cfg
        .checks
        .par_iter()
        .map(|c| match c {
            CheckKind::Residual => checks::residual(&ctx),
            CheckKind::Circulation => checks::circulation_check(&ctx),
            CheckKind::Locus => checks::locus(&ctx),
            CheckKind::Events => checks::events(&ctx),
            CheckKind::Oracle => checks::oracle(&ctx),
            CheckKind::NodeSpeed => checks::node_speed_check(&ctx),
            CheckKind::Generation => checks::generation(&ctx),
        })
        .collect();
    let results: Vec<CheckResult> = results.into_iter().flatten().collect();
    let summary = Summary { name: cfg.name.clone(), pass: results.iter().all(|r| r.pass), checks: results };
    let events = tracking.map(|t| t.events).unwrap_or_default();
    let artifacts = write_artifacts(cfg, &frames, &events, &summary)?;
    Ok(RunReport { summary, frames, events, artifacts })
}

fn write_artifacts(cfg: &ScenarioConfig, frames: &[Frame], events: &EventLog, summary: &Summary) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output.dir;
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut out = Vec::new();

    let p = dir.join("polylines.jsonl");
    let mut w = create(&p)?;
    write_polylines_jsonl(frames, &mut w)?;
    finish(w)?;
    out.push(p);

    match cfg.output.format {
        OutputFormat::Text => {}
        OutputFormat::Table => {
            let p = dir.join("polylines.csv");
            let mut w = create(&p)?;
            write_polylines_csv(frames, &mut w)?;
            finish(w)?;
            out.push(p);
        }
        OutputFormat::Svg => {
            let sub = dir.join("frames");
            fs::create_dir_all(&sub).map_err(|e| Error::Io(format!("{}: {e}", sub.display())))?;
            for f in frames {
                let p = sub.join(format!("frame_{:04}.svg", f.index));
                let mut w = create(&p)?;
                w.write_all(svg::render_frame_svg(&cfg.grid, f).as_bytes())?;
                finish(w)?;
                out.push(p);
            }
        }
    }

    let p = dir.join("events.json");
    let mut w = create(&p)?;
    write_events_json(events, &mut w)?;
    finish(w)?;
    out.push(p);

    let p = dir.join("summary.json");
    let mut w = create(&p)?;
    serde_json::to_writer_pretty(&mut w, summary).map_err(|e| Error::Format(e.to_string()))?;
    finish(w)?;
    out.push(p);
    Ok(out)
}
