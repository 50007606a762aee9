use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::mesh::{Mesh, MeshSpec};

pub const SNAPSHOT_HEADER: &str = "x,y,value";

/// Version stamp written into every sidecar.
pub const CODE_VERSION: &str = concat!("electroconvection ", env!("CARGO_PKG_VERSION"));

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn diagnostics_csv(records: &[DiagnosticsRecord]) -> String {
    let mut out = String::with_capacity(64 + records.len() * 16 * 24);
    out.push_str(DiagnosticsRecord::HEADER);
    out.push('\n');
    for r in records {
        let row: Vec<String> = r.values().iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_diagnostics(records: &[DiagnosticsRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Format {
            path: path.into(),
            message: "refusing to write an empty diagnostics table".into(),
        });
    }
    write_file(path, &diagnostics_csv(records))
}

pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |message: String| Error::Format {
        path: path.into(),
        message,
    };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == DiagnosticsRecord::HEADER => {}
        Some(h) => return Err(bad(format!("unexpected header `{h}`"))),
        None => return Err(bad("empty file".into())),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let vals: Vec<f64> = line
                .split(',')
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| bad(format!("line {}: {e}", i + 2)))?;
            let arr: [f64; 16] = vals.try_into().map_err(|v: Vec<f64>| {
                bad(format!("line {}: {} columns, expected 16", i + 2, v.len()))
            })?;
            Ok(DiagnosticsRecord::from_values(arr))
        })
        .collect()
}

pub fn write_diagnostics_json(records: &[DiagnosticsRecord], path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(records).expect("records serialize");
    write_file(path, &text)
}

/// Sidecar JSON describing a snapshot CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotMeta {
    pub time: f64,
    pub field_name: String,
    pub mesh_params: MeshSpec,
    pub code_version: String,
}

/// Path of the sidecar belonging to a snapshot CSV.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Write `x,y,value` rows in node order plus the sidecar next to it.
pub fn write_snapshot(
    field: &[f64],
    field_name: &str,
    time: f64,
    mesh: &Mesh,
    path: &Path,
) -> Result<()> {
    mesh.check_len(field)?;
    let mut out = String::with_capacity(32 + field.len() * 72);
    out.push_str(SNAPSHOT_HEADER);
    out.push('\n');
    for (p, v) in mesh.points().iter().zip(field) {
        writeln!(out, "{},{},{}", fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(*v)).unwrap();
    }
    write_file(path, &out)?;
    let meta = SnapshotMeta {
        time,
        field_name: field_name.into(),
        mesh_params: *mesh.spec(),
        code_version: CODE_VERSION.into(),
    };
    write_file(
        &sidecar_path(path),
        &serde_json::to_string_pretty(&meta).expect("sidecar serializes"),
    )
}

/// A snapshot read back from disk.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotFile {
    pub points: Vec<[f64; 2]>,
    pub values: Vec<f64>,
    pub meta: SnapshotMeta,
}

pub fn read_snapshot(path: &Path) -> Result<SnapshotFile> {
    let bad = |p: &Path, message: String| Error::Format {
        path: p.into(),
        message,
    };
    let side = sidecar_path(path);
    let meta_text = fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    let meta: SnapshotMeta =
        serde_json::from_str(&meta_text).map_err(|e| bad(&side, e.to_string()))?;
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(SNAPSHOT_HEADER) {
        return Err(bad(path, format!("expected header `{SNAPSHOT_HEADER}`")));
    }
    let mut points = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(bad(path, format!("line {}: expected 3 columns", i + 2)));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| bad(path, format!("line {}: {e}", i + 2)))
        };
        points.push([parse(cols[0])?, parse(cols[1])?]);
        values.push(parse(cols[2])?);
    }
    let expected = meta
        .mesh_params
        .build()
        .map_err(|e| bad(&side, e.to_string()))?
        .dimension();
    if values.len() != expected {
        return Err(bad(
            path,
            format!(
                "{} rows but the sidecar mesh has {expected} nodes",
                values.len()
            ),
        ));
    }
    Ok(SnapshotFile {
        points,
        values,
        meta,
    })
}

/// Generic numeric table with a fixed header, used for sweep reports.
pub fn write_table(header: &[&str], rows: &[Vec<f64>], path: &Path) -> Result<()> {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        assert_eq!(row.len(), header.len());
        let cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    write_file(path, &out)
}
