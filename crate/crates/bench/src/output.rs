//! Result files: a CSV table, field dumps and grayscale heatmaps.

use std::fs;
use std::path::{Path, PathBuf};

use transport_core::ScalarField2D;

use crate::error::{BenchError, Result};
use crate::table::Experiment;

/// Default base directory for results when neither the config nor the
/// environment says otherwise.
pub const DEFAULT_OUTPUT_BASE: &str = "results";
/// Environment variable naming the base results directory.
pub const OUTPUT_ENV: &str = "TRANSPORT_BENCH_OUT";

pub fn default_output_base() -> PathBuf {
    std::env::var_os(OUTPUT_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_BASE))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes the table as comma-separated values with a header row.
pub fn write_table(exp: &Experiment, path: &Path) -> Result<()> {
    let csv_err = |source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    };
    exp.check()?;
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(&exp.columns).map_err(csv_err)?;
    for row in &exp.rows {
        w.write_record(row.values().map(|v| v.to_string())).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_field(field: &ScalarField2D, path: &Path) -> Result<()> {
    fs::write(path, field.to_dump()).map_err(io_err(path))
}

/// Maps `[min, max]` linearly onto `0..=255`; a constant field is mid-gray.
pub fn gray_levels(field: &ScalarField2D) -> Vec<u8> {
    let (lo, hi) = (field.min(), field.max());
    let g = field.grid();
    let mut out = Vec::with_capacity(g.len());
    // top image row is the largest y
    for j in (0..g.ny).rev() {
        for &v in field.row(j) {
            let level = if hi > lo {
                ((v - lo) / (hi - lo) * 255.0).round()
            } else {
                128.0
            };
            out.push(level.clamp(0.0, 255.0) as u8);
        }
    }
    out
}

/// Binary PGM (P5).
pub fn write_pgm(field: &ScalarField2D, path: &Path) -> Result<()> {
    let g = field.grid();
    let mut bytes = format!("P5\n{} {}\n255\n", g.nx, g.ny).into_bytes();
    bytes.extend(gray_levels(field));
    fs::write(path, bytes).map_err(io_err(path))
}

/// Writes `<name>.csv`, then `<field>.field` and `<field>.pgm` for every
/// field, into `dir`. Returns the paths written.
pub fn emit_outputs(exp: &Experiment, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::with_capacity(1 + 2 * exp.fields.len());
    let table = dir.join(format!("{}.csv", exp.name));
    write_table(exp, &table)?;
    written.push(table);
    for (name, field) in &exp.fields {
        let dump = dir.join(format!("{name}.field"));
        write_field(field, &dump)?;
        let pgm = dir.join(format!("{name}.pgm"));
        write_pgm(field, &pgm)?;
        written.push(dump);
        written.push(pgm);
    }
    Ok(written)
}
