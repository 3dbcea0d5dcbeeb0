//! CSV files of a run directory.
//!
//! ```text
//! <run>/config.toml        resolved configuration with [derived]
//! <run>/snap_<step>.csv    x,rho,u,p,T,s,zeta
//! <run>/snapshots.csv      step,t,file
//! <run>/diag.csv           t,total_mass,total_momentum,total_energy,total_entropy
//! <run>/summary.toml
//! ```

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fields::{Macroscopic, Totals};
use crate::gas::GasModel;

pub const SNAPSHOT_COLUMNS: [&str; 7] = ["x", "rho", "u", "p", "T", "s", "zeta"];
pub const DIAG_COLUMNS: [&str; 5] = ["t", "total_mass", "total_momentum", "total_energy", "total_entropy"];
pub const INDEX_FILE: &str = "snapshots.csv";
pub const DIAG_FILE: &str = "diag.csv";

/// 17 significant digits.
#[inline]
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn snapshot_name(step: usize) -> String {
    format!("snap_{step:06}.csv")
}

fn data_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Data {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    data_err(path, e.to_string())
}

/// Columns of one snapshot file.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub t: Vec<f64>,
    pub s: Vec<f64>,
    pub zeta: Vec<f64>,
}

impl Snapshot {
    pub fn from_fields(fields: &Macroscopic, gas: &GasModel) -> Result<Self> {
        let n = fields.len();
        let mut snap = Snapshot {
            x: fields.x(),
            rho: fields.rho.clone(),
            u: fields.velocity(),
            p: Vec::with_capacity(n),
            t: Vec::with_capacity(n),
            s: Vec::with_capacity(n),
            zeta: fields.zeta.clone(),
        };
        for c in 0..n {
            let st = gas.eos(fields.rho[c], fields.zeta[c]).map_err(|e| e.at_cell(c))?;
            snap.p.push(st.p);
            snap.t.push(st.t);
            snap.s.push(st.s);
        }
        Ok(snap)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn columns(&self) -> [&Vec<f64>; 7] {
        [&self.x, &self.rho, &self.u, &self.p, &self.t, &self.s, &self.zeta]
    }

    pub fn column(&self, name: &str) -> Option<&Vec<f64>> {
        SNAPSHOT_COLUMNS
            .iter()
            .position(|c| *c == name)
            .map(|i| self.columns()[i])
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
        w.write_record(SNAPSHOT_COLUMNS).map_err(|e| csv_err(path, e))?;
        let cols = self.columns();
        for i in 0..self.len() {
            w.write_record(cols.iter().map(|c| fmt_num(c[i])))
                .map_err(|e| csv_err(path, e))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let rows = read_table(path, &SNAPSHOT_COLUMNS)?;
        let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
        Ok(Snapshot {
            x: col(0),
            rho: col(1),
            u: col(2),
            p: col(3),
            t: col(4),
            s: col(5),
            zeta: col(6),
        })
    }
}

/// Numeric CSV with an exact header.
fn read_table(path: &Path, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let got: Vec<String> = r
        .headers()
        .map_err(|e| csv_err(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if got != header {
        return Err(data_err(path, format!("header {got:?}, expected {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let row = rec
            .iter()
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| data_err(path, format!("row {}: {e}", i + 2)))?;
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexEntry {
    pub step: usize,
    pub t: f64,
    pub file: String,
}

pub fn write_index(dir: &Path, entries: &[IndexEntry]) -> Result<()> {
    let path = dir.join(INDEX_FILE);
    let mut w = csv::Writer::from_path(&path).map_err(|e| csv_err(&path, e))?;
    w.write_record(["step", "t", "file"]).map_err(|e| csv_err(&path, e))?;
    for e in entries {
        w.write_record([e.step.to_string(), fmt_num(e.t), e.file.clone()])
            .map_err(|err| csv_err(&path, err))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_index(dir: &Path) -> Result<Vec<IndexEntry>> {
    let path = dir.join(INDEX_FILE);
    let mut r = csv::Reader::from_path(&path).map_err(|e| csv_err(&path, e))?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_err(&path, e))?;
        if rec.len() != 3 {
            return Err(data_err(&path, format!("expected 3 columns, got {}", rec.len())));
        }
        let step = rec[0].parse().map_err(|e| data_err(&path, format!("step: {e}")))?;
        let t = rec[1].parse().map_err(|e| data_err(&path, format!("t: {e}")))?;
        out.push(IndexEntry {
            step,
            t,
            file: rec[2].to_string(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagRecord {
    pub t: f64,
    pub totals: Totals,
}

pub fn write_diag(path: &Path, records: &[DiagRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(DIAG_COLUMNS).map_err(|e| csv_err(path, e))?;
    for r in records {
        let t = &r.totals;
        w.write_record([r.t, t.mass, t.momentum, t.energy, t.entropy].map(fmt_num))
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_diag(path: &Path) -> Result<Vec<DiagRecord>> {
    Ok(read_table(path, &DIAG_COLUMNS)?
        .into_iter()
        .map(|r| DiagRecord {
            t: r[0],
            totals: Totals {
                mass: r[1],
                momentum: r[2],
                energy: r[3],
                entropy: r[4],
            },
        })
        .collect())
}

/// A snapshot file and its time, from a run directory (last entry) or a
/// snapshot file listed in its directory's index.
pub fn locate_snapshot(path: &Path) -> Result<(PathBuf, f64)> {
    if path.is_dir() {
        let idx = read_index(path)?;
        let last = idx.last().ok_or_else(|| data_err(path, "empty snapshot index"))?;
        return Ok((path.join(&last.file), last.t));
    }
    let dir = path.parent().unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| data_err(path, "not a file name"))?;
    let idx =
        read_index(dir).map_err(|_| data_err(path, format!("no {INDEX_FILE} beside the snapshot, time unknown")))?;
    let entry = idx
        .iter()
        .find(|e| e.file == name)
        .ok_or_else(|| data_err(path, format!("not listed in {INDEX_FILE}")))?;
    Ok((path.to_path_buf(), entry.t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::acoustic_wave;

    #[test]
    fn snapshot_round_trip_is_exact() {
        let gas = GasModel::from_sound_speed(1.4, 1.0, 1.0, 0.5, 0.0).unwrap();
        let f = acoustic_wave(16, &gas, 0.1);
        let snap = Snapshot::from_fields(&f, &gas).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join(snapshot_name(7));
        snap.write(&p).unwrap();
        assert_eq!(p.file_name().unwrap(), "snap_000007.csv");
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("x,rho,u,p,T,s,zeta\n"));
        assert_eq!(Snapshot::read(&p).unwrap(), snap);
        for i in 0..snap.len() {
            let prt = snap.rho[i] * gas.r * snap.t[i];
            assert!((snap.p[i] - prt).abs() <= 1e-10 * snap.p[i]);
        }
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_num(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn index_and_diag_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let idx = vec![
            IndexEntry {
                step: 0,
                t: 0.0,
                file: snapshot_name(0),
            },
            IndexEntry {
                step: 40,
                t: 1.0,
                file: snapshot_name(40),
            },
        ];
        write_index(dir.path(), &idx).unwrap();
        assert_eq!(read_index(dir.path()).unwrap(), idx);
        let (p, t) = locate_snapshot(dir.path()).unwrap();
        assert_eq!((p.file_name().unwrap().to_str().unwrap(), t), ("snap_000040.csv", 1.0));

        let totals = Totals {
            mass: 1.0,
            momentum: 0.0,
            energy: 0.4,
            entropy: 0.0,
        };
        let d = vec![DiagRecord { t: 0.0, totals }, DiagRecord { t: 0.025, totals }];
        let p = dir.path().join(DIAG_FILE);
        write_diag(&p, &d).unwrap();
        assert_eq!(read_diag(&p).unwrap(), d);
    }

    #[test]
    fn wrong_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        std::fs::write(&p, "x,rho\n0,1\n").unwrap();
        assert!(matches!(Snapshot::read(&p), Err(Error::Data { .. })));
    }
}
