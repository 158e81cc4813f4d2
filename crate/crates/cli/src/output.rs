//! CSV and JSON emission. Files are written to a temporary sibling and
//! renamed into place.

use std::io::Write;
use std::path::Path;

use dipolecav::analysis::{EnhancementSeries, SweepResult, SweepSpec};
use dipolecav::tensor::{Component, Tensor3};
use serde_json::{json, Map, Value};

use crate::oracle::OracleRow;
use crate::CliError;

/// Shortest text that parses back to the same `f64`.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn csv_bytes(header: Vec<String>, rows: Vec<Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(&header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn comp(t: &Tensor3, c: Component) -> (f64, f64) {
    let v = c.get(t);
    (v.re, v.im)
}

pub fn sweep_csv(r: &SweepResult) -> Result<Vec<u8>, CliError> {
    let mut header = vec!["X".to_string()];
    for c in &r.spec.components {
        for col in ["re", "im", "rd_re", "rd_im", "nrd_re", "nrd_im", "abs", "n"] {
            header.push(format!("{c}_{col}"));
        }
    }
    header.push("status".into());
    let rows = r
        .x
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let pt = &r.points[k];
            let mut row = vec![num(x)];
            for (ci, &c) in r.spec.components.iter().enumerate() {
                let (re, im) = comp(&pt.total, c);
                let (rd_re, rd_im) = comp(&pt.rd, c);
                let (nrd_re, nrd_im) = comp(&pt.nrd, c);
                let abs = c.get(&pt.total).norm();
                for v in [re, im, rd_re, rd_im, nrd_re, nrd_im, abs, r.exponents[ci].n[k]] {
                    row.push(num(v));
                }
            }
            row.push(pt.status.to_string());
            row
        })
        .collect();
    csv_bytes(header, rows)
}

pub fn exponent_csv(r: &SweepResult) -> Result<Vec<u8>, CliError> {
    let mut header = vec!["X".to_string()];
    for c in &r.spec.components {
        header.push(format!("{c}_abs"));
        header.push(format!("{c}_n"));
    }
    header.push("status".into());
    let rows = r
        .x
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let mut row = vec![num(x)];
            for (ci, &c) in r.spec.components.iter().enumerate() {
                row.push(num(c.get(&r.points[k].total).norm()));
                row.push(num(r.exponents[ci].n[k]));
            }
            row.push(r.points[k].status.to_string());
            row
        })
        .collect();
    csv_bytes(header, rows)
}

/// First failing status across components at each grid point.
pub fn combined_status(series: &[EnhancementSeries]) -> Vec<&'static str> {
    let n = series.first().map_or(0, |s| s.x.len());
    (0..n).map(|k| series.iter().map(|s| s.status[k]).find(|s| *s != "ok").unwrap_or("ok")).collect()
}

pub fn enhance_csv(series: &[EnhancementSeries]) -> Result<Vec<u8>, CliError> {
    let mut header = vec!["X".to_string()];
    header.extend(series.iter().map(|s| format!("{}_ratio", s.component)));
    header.push("status".into());
    let status = combined_status(series);
    let rows = (0..status.len())
        .map(|k| {
            let mut row = vec![num(series[0].x[k])];
            row.extend(series.iter().map(|s| num(s.ratio[k])));
            row.push(status[k].to_string());
            row
        })
        .collect();
    csv_bytes(header, rows)
}

const ORACLE_COLUMNS: [&str; 18] = [
    "case", "L", "a", "b", "X", "xA", "yA", "zA", "xD", "yD", "zD", "component", "closed_re", "closed_im",
    "oracle_re", "oracle_im", "rel_err", "status",
];

pub fn oracle_csv(rows: &[OracleRow]) -> Result<Vec<u8>, CliError> {
    let header = ORACLE_COLUMNS.iter().map(|s| s.to_string()).collect();
    let opt = |v: Option<f64>| v.map_or(String::new(), num);
    let body = rows
        .iter()
        .map(|r| {
            let c = &r.case;
            vec![
                c.index.to_string(),
                opt(c.l),
                opt(c.a),
                opt(c.b),
                num(c.separation()),
                num(c.r_a[0]),
                num(c.r_a[1]),
                num(c.r_a[2]),
                num(c.r_d[0]),
                num(c.r_d[1]),
                num(c.r_d[2]),
                r.component.to_string(),
                num(r.closed.re),
                num(r.closed.im),
                num(r.oracle.re),
                num(r.oracle.im),
                num(r.rel_err),
                r.status.to_string(),
            ]
        })
        .collect();
    csv_bytes(header, body)
}

fn meta(spec: &SweepSpec, command: &str, extra: &[(&str, Value)]) -> Value {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("geometry".into(), json!(spec.geometry));
    m.insert("p".into(), json!(spec.p));
    m.insert("positions".into(), json!(spec.placement));
    m.insert("ctrl".into(), json!(spec.ctrl));
    m.insert("window".into(), json!(spec.window));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    for (k, v) in extra {
        m.insert((*k).into(), v.clone());
    }
    Value::Object(m)
}

fn to_bytes(v: &Value) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

fn part(points: impl Iterator<Item = (f64, f64)>) -> Value {
    let (re, im): (Vec<f64>, Vec<f64>) = points.unzip();
    json!({ "re": re, "im": im })
}

pub fn sweep_json(r: &SweepResult, command: &str) -> Result<Vec<u8>, CliError> {
    let mut comps = Map::new();
    for (ci, &c) in r.spec.components.iter().enumerate() {
        let total = part(r.points.iter().map(|p| comp(&p.total, c)));
        let abs: Vec<f64> = r.points.iter().map(|p| c.get(&p.total).norm()).collect();
        comps.insert(
            c.to_string(),
            json!({
                "re": total["re"],
                "im": total["im"],
                "rd": part(r.points.iter().map(|p| comp(&p.rd, c))),
                "nrd": part(r.points.iter().map(|p| comp(&p.nrd, c))),
                "abs": abs,
                "n": r.exponents[ci].n,
            }),
        );
    }
    let status: Vec<&str> = r.points.iter().map(|p| p.status).collect();
    let terms: Vec<u64> = r.points.iter().map(|p| p.terms_used).collect();
    to_bytes(&json!({
        "meta": meta(&r.spec, command, &[("wall_distance", json!(r.wall_distance))]),
        "grid": r.x,
        "components": comps,
        "status": status,
        "terms_used": terms,
    }))
}

pub fn enhance_json(spec: &SweepSpec, series: &[EnhancementSeries]) -> Result<Vec<u8>, CliError> {
    let mut comps = Map::new();
    for s in series {
        comps.insert(s.component.to_string(), json!({ "ratio": s.ratio }));
    }
    let grid = series.first().map(|s| s.x.clone()).unwrap_or_default();
    to_bytes(&json!({
        "meta": meta(spec, "enhance", &[]),
        "grid": grid,
        "components": comps,
        "status": combined_status(series),
    }))
}

pub fn oracle_json(rows: &[OracleRow], meta: Value) -> Result<Vec<u8>, CliError> {
    to_bytes(&json!({ "meta": meta, "rows": rows }))
}

/// Writes `bytes` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
