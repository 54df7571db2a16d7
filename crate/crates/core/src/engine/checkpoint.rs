//! Checkpoint files.
//!
//! Layout, one item per line:
//!
//! ```text
//! MICROSIM-CHECKPOINT
//! {"format_version":1,"scenario":"M1","year":2030,"master_seed":7}
//! <SimState as JSON>
//! sha256:<hex digest of the header line, a newline, and the body line>
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::SimState;
use crate::error::{Error, Result};
use crate::rates::IntlScenario;

pub const CHECKPOINT_MAGIC: &str = "MICROSIM-CHECKPOINT";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub format_version: u32,
    pub scenario: IntlScenario,
    pub year: i32,
    pub master_seed: u64,
}

fn digest(header: &str, body: &str) -> String {
    let mut h = Sha256::new();
    h.update(header.as_bytes());
    h.update(b"\n");
    h.update(body.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn checkpoint(state: &SimState, path: &Path) -> Result<()> {
    let header = CheckpointHeader {
        format_version: FORMAT_VERSION,
        scenario: state.scenario.intl_scenario,
        year: state.year,
        master_seed: state.master_seed,
    };
    let header = serde_json::to_string(&header).map_err(|e| Error::Checkpoint(e.to_string()))?;
    let body = serde_json::to_string(state).map_err(|e| Error::Checkpoint(e.to_string()))?;
    let sum = digest(&header, &body);
    let tmp = path.with_extension("tmp");
    let write = || -> std::io::Result<()> {
        let mut f = std::io::BufWriter::new(fs::File::create(&tmp)?);
        writeln!(f, "{CHECKPOINT_MAGIC}")?;
        writeln!(f, "{header}")?;
        writeln!(f, "{body}")?;
        writeln!(f, "sha256:{sum}")?;
        f.into_inner()?.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| Error::io(path, e))
}

fn split(text: &str) -> Result<(&str, &str, &str)> {
    let mut lines = text.split('\n');
    if lines.next() != Some(CHECKPOINT_MAGIC) {
        return Err(Error::Checkpoint("not a checkpoint file".into()));
    }
    match (lines.next(), lines.next(), lines.next()) {
        (Some(h), Some(b), Some(s)) if !h.is_empty() && !b.is_empty() => Ok((h, b, s)),
        _ => Err(Error::Checkpoint("truncated checkpoint".into())),
    }
}

fn parse_header(line: &str) -> Result<CheckpointHeader> {
    let header: CheckpointHeader =
        serde_json::from_str(line).map_err(|e| Error::Checkpoint(format!("bad header: {e}")))?;
    if header.format_version != FORMAT_VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported format version {} (expected {FORMAT_VERSION})",
            header.format_version
        )));
    }
    Ok(header)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::io(path, e),
    })
}

pub fn read_checkpoint_header(path: &Path) -> Result<CheckpointHeader> {
    let text = read(path)?;
    let (header, _, _) = split(&text)?;
    parse_header(header)
}

/// Loads a checkpoint, verifying its checksum before parsing the body.
pub fn restore(path: &Path) -> Result<SimState> {
    let text = read(path)?;
    let (header_line, body, sum) = split(&text)?;
    let header = parse_header(header_line)?;
    let expected = sum
        .strip_prefix("sha256:")
        .ok_or_else(|| Error::Checkpoint("truncated checkpoint".into()))?;
    if digest(header_line, body) != expected {
        return Err(Error::Checkpoint("checksum mismatch".into()));
    }
    let state: SimState = serde_json::from_str(body).map_err(|e| Error::Checkpoint(format!("bad body: {e}")))?;
    if state.year != header.year || state.master_seed != header.master_seed || state.scenario.intl_scenario != header.scenario {
        return Err(Error::Checkpoint("header does not match body".into()));
    }
    Ok(state)
}
