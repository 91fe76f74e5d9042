//! CSV and JSON writers. Both carry the resolved configuration and the
//! scan metadata ahead of the data.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::profiles::GridScan;

use super::config::Format;
use super::verify::Check;

pub const UNITS_NOTE: &str = "atomic (hbar = m_e = e = a0 = 1); *_au keys and data columns in atomic units, angles in rad, xi = p_perp0 r";

/// Header lines: resolved configuration, then scan kind, axes and physics.
pub fn header(scan: &GridScan, config: &[(String, String)]) -> Vec<(String, String)> {
    let mut out = vec![
        ("generator".to_string(), "twistbeam".to_string()),
        ("units".to_string(), UNITS_NOTE.to_string()),
    ];
    out.extend(config.iter().cloned());
    out.push(("scan".to_string(), scan.kind.name().to_string()));
    for a in &scan.axes {
        out.push((
            format!("axis.{}", a.name),
            format!("{:?}..{:?} ({} samples)", a.start, a.end, a.samples),
        ));
    }
    out.extend(scan.metadata.iter().cloned());
    out
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(w: &mut W, scan: &GridScan, config: &[(String, String)]) -> std::io::Result<()> {
    for (k, v) in header(scan, config) {
        writeln!(w, "# {k}={v}")?;
    }
    writeln!(w, "{}", scan.columns.join(","))?;
    for row in &scan.rows {
        let cells: Vec<String> = row.iter().map(|&v| csv_value(v)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn scan_json(scan: &GridScan, config: &[(String, String)]) -> Value {
    let metadata: Map<String, Value> = header(scan, config)
        .into_iter()
        .map(|(k, v)| (k, Value::String(v)))
        .collect();
    json!({
        "metadata": metadata,
        "columns": scan.columns,
        "rows": scan.rows,
    })
}

fn write_value<W: Write>(w: &mut W, value: &Value) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)
}

/// `out.csv` with three times becomes `out_t0.csv`, `out_t1.csv`, ...
pub fn indexed_path(base: &Path, index: usize, count: usize) -> PathBuf {
    if count <= 1 {
        return base.to_path_buf();
    }
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}_t{index}.{}", ext.to_string_lossy()),
        None => format!("{stem}_t{index}"),
    };
    base.with_file_name(name)
}

/// Writes each scan to its own file, or all of them to stdout.
pub fn emit(scans: &[GridScan], config: &[(String, String)], format: Format, out: Option<&Path>) -> Result<Vec<PathBuf>> {
    match out {
        Some(base) => {
            let mut written = Vec::with_capacity(scans.len());
            for (i, scan) in scans.iter().enumerate() {
                let path = indexed_path(base, i, scans.len());
                let file = File::create(&path).map_err(io_err(&path))?;
                let mut w = BufWriter::new(file);
                match format {
                    Format::Csv => write_csv(&mut w, scan, config),
                    Format::Json => write_value(&mut w, &scan_json(scan, config)),
                }
                .and_then(|_| w.flush())
                .map_err(io_err(&path))?;
                written.push(path);
            }
            Ok(written)
        }
        None => {
            let stdout = Path::new("<stdout>");
            let mut w = BufWriter::new(std::io::stdout().lock());
            match format {
                Format::Csv => scans.iter().enumerate().try_for_each(|(i, scan)| {
                    if i > 0 {
                        writeln!(w)?;
                    }
                    write_csv(&mut w, scan, config)
                }),
                Format::Json if scans.len() == 1 => write_value(&mut w, &scan_json(&scans[0], config)),
                Format::Json => write_value(
                    &mut w,
                    &Value::Array(scans.iter().map(|s| scan_json(s, config)).collect()),
                ),
            }
            .and_then(|_| w.flush())
            .map_err(io_err(stdout))?;
            Ok(Vec::new())
        }
    }
}

pub fn write_report<W: Write>(w: &mut W, checks: &[Check], config: &[(String, String)], format: Format) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(w, "# generator=twistbeam")?;
            for (k, v) in config {
                writeln!(w, "# {k}={v}")?;
            }
            writeln!(w, "check,max_error,threshold,status,seconds")?;
            for c in checks {
                writeln!(
                    w,
                    "{},{:e},{:e},{},{:.3}",
                    c.name,
                    c.max_error,
                    c.threshold,
                    c.status(),
                    c.seconds
                )?;
            }
            Ok(())
        }
        Format::Json => {
            let metadata: Map<String, Value> = config.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
            let rows: Vec<Value> = checks
                .iter()
                .map(|c| {
                    json!({
                        "check": c.name,
                        "max_error": c.max_error,
                        "threshold": c.threshold,
                        "status": c.status(),
                        "seconds": c.seconds,
                    })
                })
                .collect();
            write_value(w, &json!({ "metadata": metadata, "checks": rows }))
        }
    }
}

pub fn emit_report(checks: &[Check], config: &[(String, String)], format: Format, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(io_err(path))?;
            let mut w = BufWriter::new(file);
            write_report(&mut w, checks, config, format)
                .and_then(|_| w.flush())
                .map_err(io_err(path))
        }
        None => {
            let mut w = BufWriter::new(std::io::stdout().lock());
            write_report(&mut w, checks, config, format)
                .and_then(|_| w.flush())
                .map_err(io_err(Path::new("<stdout>")))
        }
    }
}
