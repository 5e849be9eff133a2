//! Vortex-line extraction from sampled fields and tracking across frames.
//!
//! Faces of the grid are scanned for phase winding, crossings are refined
//! on the zero set and linked cell by cell into polylines; frames are then
//! matched by Hausdorff distance and topology changes classified as
//! creation, annihilation or reconnection.

mod extract;
mod faces;
mod grid;
pub mod io;
mod track;

pub use extract::{
    extract_frame, extract_frame_probed, extract_lines, extract_lines_with, refine_point, ExtractOptions, Extraction, VortexPolyline,
};
pub use faces::{detect_pierced_faces, detect_pierced_faces_with, FaceId, FaceScan, PiercedFace, Probe, ScanOptions};
pub use grid::{sample, Grid3, SampledField};
pub use track::{
    extract_at, frame_times, hausdorff, match_lines, node_speed, track, track_frames, Event, EventDetails,
    EventKind, EventLog, Frame, LineSpeed, NodeSpeeds, TrackOptions, Tracking, Warning,
};
