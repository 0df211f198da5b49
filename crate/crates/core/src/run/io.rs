use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SNAPSHOT_MAGIC: &str = "HWSNAP1";
pub const SNAPSHOT_HEADER_LEN: usize = 64;

/// Seventeen significant digits: enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// One CSV cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::I(v as i64)
    }
}

/// Render a numeric table with a header row.
pub fn csv_string(header: &[impl AsRef<str>], rows: impl IntoIterator<Item = Vec<Cell>>) -> String {
    let mut out = header.iter().map(|h| h.as_ref()).collect::<Vec<_>>().join(",");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::F(v) => fmt_f64(*v),
                Cell::I(v) => v.to_string(),
            })
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Parse a numeric CSV produced by [`csv_string`].
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let bad = |reason: String| Error::Parse { what: "csv".into(), reason };
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().ok_or_else(|| bad("empty file".into()))?.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|c| c.parse::<f64>().map_err(|e| bad(format!("row {}: {e}", k + 1))))
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != header.len() {
            return Err(bad(format!("row {} has {} cells, header has {}", k + 1, row.len(), header.len())));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

/// Frames of a 2D field on an `nx` by `ny` lattice, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotStack {
    pub nx: usize,
    pub ny: usize,
    pub run_id: String,
    pub frames: Vec<Vec<f64>>,
}

impl SnapshotStack {
    /// 64-byte ASCII header, then each frame as little-endian `f64`.
    pub fn encode(&self) -> Result<Vec<u8>> {
        let n = self.nx * self.ny;
        if let Some(f) = self.frames.iter().find(|f| f.len() != n) {
            return Err(Error::GeometryMismatch(format!("frame of {} values for a {}x{} lattice", f.len(), self.nx, self.ny)));
        }
        let mut header = format!("{SNAPSHOT_MAGIC} nx={} ny={} count={} dtype=f64le run={}", self.nx, self.ny, self.frames.len(), self.run_id);
        if header.len() > SNAPSHOT_HEADER_LEN - 1 || !header.is_ascii() || self.run_id.contains(char::is_whitespace) {
            return Err(Error::config(format!("snapshot header does not fit in {SNAPSHOT_HEADER_LEN} bytes: {header}")));
        }
        while header.len() < SNAPSHOT_HEADER_LEN - 1 {
            header.push(' ');
        }
        header.push('\n');
        let mut out = Vec::with_capacity(SNAPSHOT_HEADER_LEN + 8 * n * self.frames.len());
        out.extend_from_slice(header.as_bytes());
        for f in &self.frames {
            for v in f {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let bad = |reason: String| Error::Parse { what: "snapshot file".into(), reason };
        if bytes.len() < SNAPSHOT_HEADER_LEN {
            return Err(bad(format!("{} bytes is shorter than the header", bytes.len())));
        }
        let header = std::str::from_utf8(&bytes[..SNAPSHOT_HEADER_LEN]).map_err(|e| bad(e.to_string()))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some(SNAPSHOT_MAGIC) {
            return Err(bad("bad magic".into()));
        }
        let (mut nx, mut ny, mut count, mut run_id, mut dtype) = (None, None, None, String::new(), None);
        for f in fields {
            let (k, v) = f.split_once('=').ok_or_else(|| bad(format!("malformed header field `{f}`")))?;
            let num = || v.parse::<usize>().map_err(|e| bad(format!("{k}: {e}")));
            match k {
                "nx" => nx = Some(num()?),
                "ny" => ny = Some(num()?),
                "count" => count = Some(num()?),
                "dtype" => dtype = Some(v.to_string()),
                "run" => run_id = v.to_string(),
                _ => return Err(bad(format!("unknown header field `{k}`"))),
            }
        }
        let (nx, ny, count) = match (nx, ny, count) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(bad("header lacks nx, ny or count".into())),
        };
        if dtype.as_deref() != Some("f64le") {
            return Err(bad(format!("unsupported dtype {dtype:?}")));
        }
        let body = &bytes[SNAPSHOT_HEADER_LEN..];
        if body.len() != 8 * nx * ny * count {
            return Err(bad(format!("expected {} payload bytes, found {}", 8 * nx * ny * count, body.len())));
        }
        let values: Vec<f64> = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        let frames = if nx * ny == 0 { vec![vec![]; count] } else { values.chunks(nx * ny).map(<[f64]>::to_vec).collect() };
        Ok(Self { nx, ny, run_id, frames })
    }
}

pub fn read_snapshots(path: &Path) -> Result<SnapshotStack> {
    SnapshotStack::decode(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
