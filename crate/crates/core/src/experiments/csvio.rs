//! CSV artifacts. Numbers are written with 17 significant digits so every
//! table reads back to the same `f64` values.

use std::path::Path;

use crate::construct::{Side, WaveSystem};
use crate::error::{Error, Result};
use crate::solver::{Diagnostic, StateField, Trajectory};
use crate::wave::{BracketStep, FrontTrajectory};

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Numerical(format!("csv: {other:?}")),
    }
}

/// Write a numeric table.
pub fn write_table<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| fmt_f64(v))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a numeric table; returns the header and the rows.
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Numerical(format!("bad number {s:?}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

fn expect_header(found: &[String], want: &[&str], path: &Path) -> Result<()> {
    if found.iter().map(String::as_str).ne(want.iter().copied()) {
        return Err(Error::Numerical(format!("{}: header {found:?}, expected {want:?}", path.display())));
    }
    Ok(())
}

pub const SNAPSHOT_HEADER: [&str; 6] = ["t", "x", "E", "F", "M", "Ms"];

pub fn write_snapshots(path: &Path, traj: &Trajectory) -> Result<()> {
    let g = &traj.grid;
    write_table(
        path,
        &SNAPSHOT_HEADER,
        traj.snapshots
            .iter()
            .flat_map(|s| (0..s.len()).map(move |i| vec![s.t, g.x(i), s.e[i], s.f[i], s.m[i], s.ms[i]])),
    )
}

/// Node positions and snapshots, grouped by time in file order.
pub fn read_snapshots(path: &Path) -> Result<(Vec<f64>, Vec<StateField>)> {
    let (header, rows) = read_table(path)?;
    expect_header(&header, &SNAPSHOT_HEADER, path)?;
    let mut xs = Vec::new();
    let mut out: Vec<StateField> = Vec::new();
    for row in rows {
        if out.last().is_none_or(|s| s.t != row[0]) {
            out.push(StateField { t: row[0], e: vec![], f: vec![], m: vec![], ms: vec![] });
        }
        if out.len() == 1 {
            xs.push(row[1]);
        }
        let s = out.last_mut().unwrap();
        s.e.push(row[2]);
        s.f.push(row[3]);
        s.m.push(row[4]);
        s.ms.push(row[5]);
    }
    Ok((xs, out))
}

pub const DIAGNOSTICS_HEADER: [&str; 3] = ["t", "clipped_mass", "dt"];

pub fn write_diagnostics(path: &Path, diags: &[Diagnostic]) -> Result<()> {
    write_table(path, &DIAGNOSTICS_HEADER, diags.iter().map(|d| vec![d.t, d.clipped_mass, d.dt]))
}

pub fn read_diagnostics(path: &Path) -> Result<Vec<Diagnostic>> {
    let (header, rows) = read_table(path)?;
    expect_header(&header, &DIAGNOSTICS_HEADER, path)?;
    Ok(rows.into_iter().map(|r| Diagnostic { t: r[0], clipped_mass: r[1], dt: r[2] }).collect())
}

pub const FRONT_HEADER: [&str; 2] = ["t", "front_x"];

/// Extinct fronts are written as `-inf`.
pub fn write_front(path: &Path, ft: &FrontTrajectory) -> Result<()> {
    write_table(path, &FRONT_HEADER, ft.times.iter().zip(&ft.positions).map(|(&t, &x)| vec![t, x]))
}

pub fn read_front(path: &Path, threshold: f64) -> Result<FrontTrajectory> {
    let (header, rows) = read_table(path)?;
    expect_header(&header, &FRONT_HEADER, path)?;
    Ok(FrontTrajectory {
        times: rows.iter().map(|r| r[0]).collect(),
        positions: rows.iter().map(|r| r[1]).collect(),
        threshold,
    })
}

pub const PROFILE_HEADER: [&str; 5] = ["x", "phiE", "phiF", "phiM", "phi_control"];

pub fn write_profiles<W: WaveSystem>(path: &Path, w: &W, xs: &[f64]) -> Result<()> {
    write_table(
        path,
        &PROFILE_HEADER,
        xs.iter().map(|&x| {
            let [e, f, m] = w.jets(x, Side::Right);
            vec![x, e.v, f.v, m.v, w.control(x)]
        }),
    )
}

pub fn read_profiles(path: &Path) -> Result<Vec<[f64; 5]>> {
    let (header, rows) = read_table(path)?;
    expect_header(&header, &PROFILE_HEADER, path)?;
    Ok(rows.into_iter().map(|r| [r[0], r[1], r[2], r[3], r[4]]).collect())
}

pub const BRACKET_HEADER: [&str; 7] = ["iteration", "lo", "hi", "probe", "kind", "measured_speed", "fallback"];

pub fn write_bracket_history(path: &Path, steps: &[BracketStep]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(BRACKET_HEADER).map_err(csv_err)?;
    for s in steps {
        w.write_record([
            s.iteration.to_string(),
            fmt_f64(s.lo),
            fmt_f64(s.hi),
            fmt_f64(s.probe),
            s.kind.as_str().to_string(),
            s.measured_speed.map(fmt_f64).unwrap_or_default(),
            s.fallback.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
