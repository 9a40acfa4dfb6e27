//! CSV and JSON writers. Every file is assembled in memory and written once.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use spinbath_core::Series;

use crate::error::CliError;

/// `git describe` of the source tree when available, else the crate version.
pub const VERSION: &str = match option_env!("SPINBATH_GIT_DESCRIBE") {
    Some(v) => v,
    None => env!("CARGO_PKG_VERSION"),
};

/// Seventeen significant digits, enough to round-trip an `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Columns `t, sz_<e>..., re_rho10_<e>..., im_rho10_<e>...`.
pub fn trajectory_csv(series: &[Series]) -> Result<String, CliError> {
    let first = series
        .first()
        .ok_or_else(|| CliError::Usage("no trajectories to write".into()))?;
    let times = first.times();
    if series.iter().any(|s| s.times() != times) {
        return Err(CliError::Usage("trajectories are on different grids".into()));
    }
    let mut out = String::from("t");
    for prefix in ["sz", "re_rho10", "im_rho10"] {
        for s in series {
            write!(out, ",{prefix}_{}", s.engine).unwrap();
        }
    }
    out.push('\n');
    for (j, t) in times.iter().enumerate() {
        out.push_str(&fmt_f64(*t));
        for s in series {
            write!(out, ",{}", fmt_f64(s.points[j].sz)).unwrap();
        }
        for s in series {
            write!(out, ",{}", fmt_f64(s.points[j].rho10.re)).unwrap();
        }
        for s in series {
            write!(out, ",{}", fmt_f64(s.points[j].rho10.im)).unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

/// Generic table; `None` cells are left empty.
pub fn table_csv(header: &[&str], rows: &[Vec<Option<f64>>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| c.map(fmt_f64).unwrap_or_default()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn write_csv(series: &[Series], path: &Path) -> Result<(), CliError> {
    write_file(path, &trajectory_csv(series)?)
}

pub fn write_summary<S: Serialize>(summary: &S, path: &Path) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(summary).expect("summary is plain data");
    text.push('\n');
    write_file(path, &text)
}

/// Resolves an output name against the output directory.
pub fn resolve(out_dir: &Path, name: Option<&str>, default: &str) -> PathBuf {
    out_dir.join(name.unwrap_or(default))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use spinbath_core::trajectory::{Trajectory, TrajectoryPoint};
    use spinbath_core::{Engine, State};

    fn series(engine: Engine, sz: f64) -> Series {
        let state = State::from_sz_coherence(sz, Complex::new(0.25, -0.125));
        Trajectory {
            engine,
            fingerprint: "x".into(),
            points: vec![TrajectoryPoint::from_state(0.0, state)],
        }
    }

    #[test]
    fn header_and_digits() {
        let csv = trajectory_csv(&[series(Engine::Oracle, 1.0), series(Engine::ConfigSum, 0.1)]).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "t,sz_oracle,sz_configsum,re_rho10_oracle,re_rho10_configsum,im_rho10_oracle,im_rho10_configsum"
        );
        assert_eq!(lines.len(), 2);
        let cells: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cells[1], "1.0000000000000000e0");
        for c in &cells {
            let mantissa = c.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
            let _: f64 = c.parse().unwrap();
        }
        for x in [0.1, -1.0 / 3.0, 6.02e23, 5e-324] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn mismatched_grids_rejected() {
        let mut b = series(Engine::ConfigSum, 1.0);
        b.points[0].t = 1.0;
        assert!(trajectory_csv(&[series(Engine::Oracle, 1.0), b]).is_err());
        assert!(trajectory_csv(&[]).is_err());
    }

    #[test]
    fn empty_cells() {
        let csv = table_csv(&["a", "b"], &[vec![Some(0.5), None]]);
        assert_eq!(csv, "a,b\n5.0000000000000000e-1,\n");
    }
}
