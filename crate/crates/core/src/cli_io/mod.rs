//! Run configuration, output files and run orchestration.
//!
//! File formats:
//!
//! * `diagnostics.csv`: header [`DiagnosticsRecord::HEADER`], one row per
//!   recorded step, every float with 17 significant digits.
//! * `snapshot_<field>_<k>.csv`: `x,y,value` in node order, with a sidecar
//!   `snapshot_<field>_<k>.json` holding [`SnapshotMeta`].

mod config;
mod output;

use std::path::{Path, PathBuf};

pub use config::{
    dirichlet_basis, parse_config, stokes_basis_cached, InitialData, Modes, OutputConfig,
    OutputFormat, Preset, RunConfig, TimeConfig, ToggleConfig, FULL_GRID_LIMIT,
};
pub use output::{
    diagnostics_csv, fmt_f64, read_diagnostics, read_snapshot, sidecar_path, write_diagnostics,
    write_diagnostics_json, write_snapshot, write_table, SnapshotFile, SnapshotMeta, CODE_VERSION,
    SNAPSHOT_HEADER,
};

use crate::dynamics::{DiagnosticsRecord, Trajectory};
use crate::eigensolver::EigenCache;
use crate::error::{Error, Result};
use crate::mesh::MeshSpec;

/// Parse a `--mesh` override: `square`, `square:N`, `rect:NX:NY:LX:LY` or
/// `annulus:NR:NTHETA[:R_IN:R_OUT]`.
pub fn parse_mesh_flag(text: &str) -> Result<MeshSpec> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Error::config("--mesh", format!("cannot parse `{text}`"));
    let int = |s: &str| s.parse::<usize>().map_err(|_| bad());
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
    let spec = match parts[..] {
        ["square"] => MeshSpec::unit_square(32),
        ["square", n] => MeshSpec::unit_square(int(n)?),
        ["rect", nx, ny, lx, ly] => MeshSpec::Rectangle {
            nx: int(nx)?,
            ny: int(ny)?,
            lx: num(lx)?,
            ly: num(ly)?,
        },
        ["annulus", nr, nt] => MeshSpec::Annulus {
            nr: int(nr)?,
            ntheta: int(nt)?,
            r_inner: 0.5,
            r_outer: 1.0,
        },
        ["annulus", nr, nt, a, b] => MeshSpec::Annulus {
            nr: int(nr)?,
            ntheta: int(nt)?,
            r_inner: num(a)?,
            r_outer: num(b)?,
        },
        _ => return Err(bad()),
    };
    spec.build()
        .map_err(|e| Error::config("--mesh", e.to_string()))?;
    Ok(spec)
}

/// Files produced by [`run_simulation`].
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub trajectory: Trajectory,
    pub files: Vec<PathBuf>,
}

/// Build the system, integrate and write every requested output under the
/// configured directory.
pub fn run_simulation(cfg: &RunConfig, cache: Option<&EigenCache>) -> Result<RunOutput> {
    let sys = cfg.build_system(cache)?;
    let init = cfg.initial_state(&sys)?;
    let dir = &cfg.output.directory;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let effective = dir.join("config.effective.json");
    std::fs::write(
        &effective,
        serde_json::to_string_pretty(cfg).expect("config serializes"),
    )
    .map_err(|e| Error::io(&effective, e))?;
    let mut files = vec![effective];

    let result = sys.run(&init, &cfg.settings());
    let trajectory = match result {
        Ok(t) => t,
        Err(Error::BlowUp {
            time,
            reason,
            last_good,
        }) => {
            if let Some(rec) = last_good.as_ref() {
                let p = dir.join("diagnostics.last_good.csv");
                write_diagnostics(std::slice::from_ref(rec), &p)?;
            }
            return Err(Error::BlowUp {
                time,
                reason,
                last_good,
            });
        }
        Err(e) => return Err(e),
    };
    files.extend(write_outputs(cfg, &sys, &trajectory, dir)?);
    Ok(RunOutput { trajectory, files })
}

fn write_outputs(
    cfg: &RunConfig,
    sys: &crate::dynamics::GalerkinSystem,
    traj: &Trajectory,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    if cfg.output.formats.contains(&OutputFormat::Csv) {
        let p = dir.join("diagnostics.csv");
        write_diagnostics(&traj.records, &p)?;
        files.push(p);
        let mut counter = std::collections::HashMap::<&str, usize>::new();
        for snap in &traj.snapshots {
            let k = counter.entry(&snap.field_name).or_default();
            let p = dir.join(format!("snapshot_{}_{:03}.csv", snap.field_name, k));
            *k += 1;
            write_snapshot(&snap.values, &snap.field_name, snap.time, sys.mesh(), &p)?;
            files.push(sidecar_path(&p));
            files.push(p);
        }
    }
    if cfg.output.formats.contains(&OutputFormat::Json) {
        let p = dir.join("diagnostics.json");
        write_diagnostics_json(&traj.records, &p)?;
        files.push(p);
    }
    Ok(files)
}

/// Last diagnostics row, if any.
pub fn final_record(traj: &Trajectory) -> Option<&DiagnosticsRecord> {
    traj.records.last()
}
