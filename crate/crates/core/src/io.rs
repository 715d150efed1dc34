//! File formats. Every file carries the format version and the resolved run
//! configuration: CSV and mesh files in leading `#` comment lines, JSON files
//! in an envelope object.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::Value;

use crate::continuation::ContinuationRecord;
use crate::dynamics::{Mesh, OrbitRecord, SlicePoint};
use crate::homoclinic::DistanceProfile;

pub const FORMAT_VERSION: u32 = 1;

/// Seventeen significant digits, enough to round-trip any binary64 value.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub format_version: u32,
    pub config: &'a Value,
    pub data: &'a T,
}

pub fn write_json<W: Write, T: Serialize>(mut w: W, config: &Value, data: &T) -> io::Result<()> {
    let env = Envelope {
        format_version: FORMAT_VERSION,
        config,
        data,
    };
    serde_json::to_writer_pretty(&mut w, &env)?;
    w.write_all(b"\n")
}

fn preamble<W: Write>(w: &mut W, kind: &str, config: &Value) -> io::Result<()> {
    writeln!(w, "# henon {kind} format_version={FORMAT_VERSION}")?;
    writeln!(w, "# config {}", serde_json::to_string(config)?)
}

/// A CSV table with a header row; cells are preformatted.
pub fn write_csv<W: Write>(
    mut w: W,
    kind: &str,
    config: &Value,
    header: &[String],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> io::Result<()> {
    preamble(&mut w, kind, config)?;
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("{prefix}{k}")).collect()
}

/// Columns: param, root parameters, point, residual, det. Rows without a
/// solution leave those cells empty.
pub fn write_continuation_csv<W: Write>(w: W, config: &Value, records: &[ContinuationRecord]) -> io::Result<()> {
    let dim = records
        .iter()
        .find_map(|r| r.solution.as_ref())
        .map_or(0, |s| s.point.len());
    let mut header = vec!["param".to_string(), "step".to_string()];
    header.extend(names("s", dim));
    header.extend(names("p", dim));
    header.extend(["residual".to_string(), "det".to_string()]);
    let width = header.len();
    let rows = records.iter().map(|r| {
        let mut row = vec![fmt_f64(r.param_value), fmt_f64(r.step_used)];
        match &r.solution {
            Some(s) => {
                row.extend(s.root_params.iter().copied().map(fmt_f64));
                row.extend(s.point.iter().copied().map(fmt_f64));
                row.push(fmt_f64(s.residual));
                row.push(fmt_f64(s.transversality_det));
            }
            None => row.resize(width, String::new()),
        }
        row
    });
    write_csv(w, "continuation", config, &header, rows)
}

pub fn write_distance_csv<W: Write>(w: W, config: &Value, profile: &DistanceProfile) -> io::Result<()> {
    let rows = profile
        .entries
        .iter()
        .map(|&(n, d)| vec![n.to_string(), fmt_f64(d)]);
    write_csv(w, "distance", config, &["n".into(), "d_n".into()], rows)
}

/// Columns: seed, index, coordinates, escaped flag of the orbit.
pub fn write_orbits_csv<W: Write>(w: W, config: &Value, orbits: &[OrbitRecord]) -> io::Result<()> {
    let dim = orbits.first().map_or(0, |o| o.points[0].len());
    let coords: Vec<String> = if dim == 4 {
        ["x1", "y1", "x2", "y2"].map(String::from).to_vec()
    } else {
        ["x", "y"].map(String::from).to_vec()
    };
    let mut header = vec!["seed".to_string(), "n".to_string()];
    header.extend(coords);
    header.push("escaped".into());
    let rows = orbits.iter().enumerate().flat_map(|(seed, o)| {
        o.points.iter().enumerate().map(move |(n, p)| {
            let mut row = vec![seed.to_string(), n.to_string()];
            row.extend(p.iter().copied().map(fmt_f64));
            row.push(u8::from(o.escape_index == Some(n)).to_string());
            row
        })
    });
    write_csv(w, "orbit", config, &header, rows)
}

pub fn write_slice_csv<W: Write>(w: W, config: &Value, points: &[SlicePoint]) -> io::Result<()> {
    let header = ["seed", "n", "x1", "y1", "x2"].map(String::from);
    let rows = points.iter().map(|p| {
        vec![
            p.seed_index.to_string(),
            p.source_index.to_string(),
            fmt_f64(p.x1),
            fmt_f64(p.y1),
            fmt_f64(p.x2),
        ]
    });
    write_csv(w, "slice", config, &header, rows)
}

pub fn write_points_csv<W: Write>(w: W, kind: &str, config: &Value, points: &[[f64; 2]]) -> io::Result<()> {
    let rows = points.iter().map(|p| vec![fmt_f64(p[0]), fmt_f64(p[1])]);
    write_csv(w, kind, config, &["x".into(), "y".into()], rows)
}

/// Header lines `rows`, `cols` and `bounds`, then one comma-separated record
/// per node in row-major order: parameters followed by the point.
pub fn write_mesh<W: Write>(mut w: W, config: &Value, mesh: &Mesh) -> io::Result<()> {
    preamble(&mut w, "mesh", config)?;
    writeln!(w, "rows {}", mesh.rows)?;
    writeln!(w, "cols {}", mesh.cols)?;
    let bounds: Vec<String> = mesh
        .bounds
        .iter()
        .flat_map(|(lo, hi)| [fmt_f64(*lo), fmt_f64(*hi)])
        .collect();
    writeln!(w, "bounds {}", bounds.join(" "))?;
    let header = if mesh.bounds.len() == 2 {
        "u,v,x1,y1,x2,y2"
    } else {
        "t,x,y"
    };
    writeln!(w, "{header}")?;
    for r in &mesh.records {
        let cells: Vec<String> = r.iter().copied().map(fmt_f64).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}
