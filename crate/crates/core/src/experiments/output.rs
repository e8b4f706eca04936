//! CSV and summary files. Floats are written with 17 significant digits so
//! that parsing them back is exact; nothing time-dependent is written.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{invalid, Error, Result};

use super::config::RunConfig;
use super::point::ResultRow;

pub const CSV_COLUMNS: [&str; 27] = [
    "L_over_T",
    "T",
    "N",
    "k",
    "q",
    "R",
    "m",
    "eps0_A",
    "eps0_B",
    "Omega_A",
    "Omega_B",
    "X0",
    "nEA2",
    "nEB2",
    "EAB",
    "nX2",
    "negativity",
    "negativity_approx",
    "M",
    "eta_opt",
    "M_filtered",
    "chsh_max_filtered",
    "eq11_lhs",
    "eq11_rhs",
    "success_prob",
    "error_budget",
    "status",
];

pub fn csv_header() -> String {
    CSV_COLUMNS.join(",")
}

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_line(row: &ResultRow) -> String {
    let v = row.values();
    let mut fields: Vec<String> = Vec::with_capacity(CSV_COLUMNS.len());
    for (i, x) in v.iter().enumerate() {
        // k and q are integers
        if i == 3 || i == 4 {
            fields.push(format!("{}", *x as u64));
        } else {
            fields.push(fmt_float(*x));
        }
    }
    fields.push(row.status.to_string());
    fields.join(",")
}

pub fn render_csv(rows: &[ResultRow]) -> String {
    let mut out = csv_header();
    out.push('\n');
    for row in rows {
        out.push_str(&csv_line(row));
        out.push('\n');
    }
    out
}

/// One parsed CSV line: the 26 numeric columns and the status tag.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRecord {
    pub values: Vec<f64>,
    pub status: String,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRecord>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| invalid("empty CSV"))?;
    if header != csv_header() {
        return Err(invalid(format!("unexpected CSV header '{header}'")));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let mut fields: Vec<&str> = line.split(',').collect();
            if fields.len() != CSV_COLUMNS.len() {
                return Err(invalid(format!("CSV line {} has {} fields", i + 2, fields.len())));
            }
            let status = fields.pop().unwrap_or_default().to_string();
            let values = fields
                .iter()
                .map(|f| f.parse::<f64>().map_err(|e| invalid(format!("CSV line {}: {e}", i + 2))))
                .collect::<Result<Vec<_>>>()?;
            Ok(CsvRecord { values, status })
        })
        .collect()
}

/// Summary sidecar path: `out.csv` → `out.summary.txt`.
pub fn summary_path(csv: &Path) -> PathBuf {
    let stem = match csv.extension() {
        Some(e) if e == "csv" => csv.with_extension(""),
        _ => csv.to_path_buf(),
    };
    let mut s = stem.into_os_string();
    s.push(".summary.txt");
    PathBuf::from(s)
}

pub fn render_summary(cfg: &RunConfig, command: &str, rows: &[ResultRow], extra: &[(String, String)]) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: &str| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(v);
        out.push('\n');
    };
    kv("library", env!("CARGO_PKG_NAME"));
    kv("version", env!("CARGO_PKG_VERSION"));
    kv("command", command);
    for (k, v) in cfg.echo() {
        kv(&format!("config.{k}"), &v);
    }
    kv("convention.units", "natural, c = hbar = 1");
    kv("convention.normalization", cfg.design.normalization_tag());
    kv("convention.pair_smearing", "R^2 = (R_A^2 + R_B^2)/2");
    kv("convention.basis", "up-up, up-down, down-up, down-down");
    kv("convention.eta_modulus", "eta^2 = |<0|X_AB>|");
    kv("convention.complex_columns", "X0 and EAB columns hold real parts");
    kv("rows", &rows.len().to_string());
    kv("rows_failed", &rows.iter().filter(|r| !r.status.is_ok()).count().to_string());
    for (i, r) in rows.iter().enumerate() {
        let p = format!("row.{}", i + 1);
        kv(&format!("{p}.status"), &r.status.to_string());
        if let super::point::Status::Failed { message, .. } = &r.status {
            kv(&format!("{p}.error"), message);
        }
        kv(&format!("{p}.window_A"), &r.window_a);
        kv(&format!("{p}.window_B"), &r.window_b);
        kv(&format!("{p}.normalization"), r.normalization);
        kv(&format!("{p}.X0_im"), &fmt_float(r.amplitudes.x0.im));
        kv(&format!("{p}.EAB_im"), &fmt_float(r.amplitudes.eab.im));
        kv(&format!("{p}.eta_modulus"), &fmt_float(r.report.eta_modulus));
        kv(&format!("{p}.chsh_max"), &fmt_float(r.report.chsh_max));
        kv(&format!("{p}.eq11_holds"), &r.report.eq11_holds.to_string());
        if let Some(eta) = r.fixed_eta {
            kv(&format!("{p}.fixed_eta"), &fmt_float(eta));
        }
    }
    for (k, v) in extra {
        kv(k, v);
    }
    out
}

/// Writes through a temporary file in the target directory, then renames;
/// on failure nothing is left at `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name = path.file_name().ok_or_else(|| invalid(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = dir.join(tmp_name);
    let result = (|| -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::Io(e));
    }
    Ok(())
}

/// CSV at `path` plus the summary sidecar; returns the summary path.
pub fn emit_results(
    rows: &[ResultRow],
    cfg: &RunConfig,
    command: &str,
    extra: &[(String, String)],
    path: &Path,
) -> Result<PathBuf> {
    if rows.is_empty() {
        return Err(invalid("no rows to emit"));
    }
    let summary = summary_path(path);
    write_atomic(path, &render_csv(rows))?;
    if let Err(e) = write_atomic(&summary, &render_summary(cfg, command, rows, extra)) {
        let _ = fs::remove_file(path);
        return Err(e);
    }
    Ok(summary)
}
