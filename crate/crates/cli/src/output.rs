//! CSV and plot-script emission. Everything is assembled in grid order on a
//! single thread, so output bytes do not depend on the worker count.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::Matrix3;
use optomech::{ScatteringResult, SweepTable};

use crate::error::CliError;

pub const MODES: [&str; 3] = ["a", "b", "c"];

pub const SWEEP_HEADER: &str =
    "omega,T_aa,T_ab,T_ac,T_ba,T_bb,T_bc,T_ca,T_cb,T_cc,svac_a,svac_b,svac_c,stable_flag";

/// Point solved on a stable model.
pub const FLAG_OK: i32 = 1;
/// Model unstable; values are formal.
pub const FLAG_UNSTABLE: i32 = 0;
/// Point singular; numeric columns are NaN.
pub const FLAG_SINGULAR: i32 = -1;

/// Twelve significant digits.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return format!("{:.11e}", 0.0);
    }
    format!("{x:.11e}")
}

fn element_names(prefix: &str) -> Vec<String> {
    let mut names = Vec::with_capacity(9);
    for out in MODES {
        for inp in MODES {
            names.push(format!("{prefix}_{out}{inp}"));
        }
    }
    names
}

fn push_matrix(line: &mut String, t: &Matrix3<f64>) {
    for r in 0..3 {
        for k in 0..3 {
            let _ = write!(line, ",{}", num(t[(r, k)]));
        }
    }
}

fn push_nan(line: &mut String, n: usize) {
    for _ in 0..n {
        line.push_str(",NaN");
    }
}

fn row_flag<T>(row: &optomech::Result<T>, stable: bool) -> i32 {
    match (row, stable) {
        (Err(_), _) => FLAG_SINGULAR,
        (Ok(_), true) => FLAG_OK,
        (Ok(_), false) => FLAG_UNSTABLE,
    }
}

pub fn sweep_csv(table: &SweepTable, stable: bool) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for (omega, row) in table.grid.iter().zip(&table.rows) {
        let mut line = num(*omega);
        match row {
            Ok(r) => {
                push_matrix(&mut line, &r.t);
                for s in r.s_vac.iter() {
                    let _ = write!(line, ",{}", num(*s));
                }
            }
            Err(_) => push_nan(&mut line, 12),
        }
        let _ = writeln!(line, ",{}", row_flag(row, stable));
        out.push_str(&line);
    }
    out
}

pub fn circulator_header() -> String {
    let mut cols = vec!["omega".to_string()];
    cols.extend(element_names("T"));
    cols.extend(element_names("Trwa"));
    cols.extend(MODES.map(|m| format!("svac_{m}")));
    cols.push("stable_flag".into());
    cols.join(",")
}

pub fn circulator_csv(full: &SweepTable, rwa: &SweepTable, stable: bool) -> String {
    let mut out = circulator_header();
    out.push('\n');
    for ((omega, f), r) in full.grid.iter().zip(&full.rows).zip(&rwa.rows) {
        let mut line = num(*omega);
        match f {
            Ok(f) => push_matrix(&mut line, &f.t),
            Err(_) => push_nan(&mut line, 9),
        }
        match r {
            Ok(r) => push_matrix(&mut line, &r.t),
            Err(_) => push_nan(&mut line, 9),
        }
        match f {
            Ok(ScatteringResult { s_vac, .. }) => {
                for s in s_vac.iter() {
                    let _ = write!(line, ",{}", num(*s));
                }
            }
            Err(_) => push_nan(&mut line, 3),
        }
        let flag = if r.is_err() { FLAG_SINGULAR } else { row_flag(f, stable) };
        let _ = writeln!(line, ",{flag}");
        out.push_str(&line);
    }
    out
}

pub fn deviation_csv(report: &optomech::DeviationReport) -> String {
    let mut cols = vec!["omega".to_string()];
    cols.extend(element_names("dT"));
    cols.push("max_dev".into());
    let mut out = cols.join(",");
    out.push('\n');
    for (k, (omega, dev)) in report.grid.iter().zip(&report.per_point).enumerate() {
        let mut line = num(*omega);
        push_matrix(&mut line, dev);
        let _ = writeln!(line, ",{}", num(report.max_at(k)));
        out.push_str(&line);
    }
    out
}

/// What a written CSV holds, for the plot script.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsvKind {
    Sweep,
    Circulator,
    Deviation,
}

#[derive(Debug, Clone)]
pub struct Written {
    pub path: PathBuf,
    pub kind: CsvKind,
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// gnuplot script with one plot per CSV; paths are relative to `dir`.
pub fn plot_script(dir: &Path, files: &[Written]) -> String {
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\nset xlabel 'omega'\n");
    s.push_str("set terminal pngcairo size 900,600\n");
    for w in files {
        let rel = w.path.strip_prefix(dir).unwrap_or(&w.path).display().to_string();
        let png = format!("{}.png", rel.trim_end_matches(".csv"));
        // Column numbers are 1-based; omega is column 1.
        let cols: Vec<usize> = match w.kind {
            CsvKind::Sweep => vec![3, 5, 11, 12, 13],
            CsvKind::Circulator => (2..=10).collect(),
            CsvKind::Deviation => vec![11],
        };
        let _ = writeln!(s, "set output '{png}'");
        let series: Vec<String> = cols
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let file = if i == 0 { format!("'{rel}'") } else { "''".into() };
                format!("{file} using 1:{c} with lines")
            })
            .collect();
        let _ = writeln!(s, "plot {}", series.join(", \\\n     "));
    }
    s
}
