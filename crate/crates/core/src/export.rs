//! Plain CSV output: 17 significant digits, `.` separator, LF line endings.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::ode::VelocityTrajectory;
use crate::solver::{ConservationReport, Snapshot};
use crate::tail::TailRecord;

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a header line and numeric rows.
pub fn write_csv<W, I, R>(mut w: W, header: &[&str], rows: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = R>,
    R: AsRef<[f64]>,
{
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.as_ref().iter().map(|&v| format_number(v)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()
}

pub fn write_csv_file<I, R>(path: &Path, header: &[&str], rows: I) -> io::Result<()>
where
    I: IntoIterator<Item = R>,
    R: AsRef<[f64]>,
{
    write_csv(BufWriter::new(File::create(path)?), header, rows)
}

pub fn snapshot_file_name(t: f64) -> String {
    format!("snap_t{t:.1}.csv")
}

pub fn write_snapshot(dir: &Path, snap: &Snapshot) -> io::Result<PathBuf> {
    let path = dir.join(snapshot_file_name(snap.t));
    let f = &snap.field;
    write_csv_file(&path, &["x", "u"], (0..f.len()).map(|j| [f.x(j), f.values()[j]]))?;
    Ok(path)
}

pub const CONSERVATION_HEADER: [&str; 5] = ["t", "mass", "momentum", "max_u", "peak_x"];

pub fn write_conservation<W: Write>(w: W, report: &ConservationReport) -> io::Result<()> {
    write_csv(
        w,
        &CONSERVATION_HEADER,
        report.rows.iter().map(|r| [r.t, r.mass, r.momentum, r.max_u, r.peak_x]),
    )
}

pub const TAIL_HEADER: [&str; 7] = ["t", "c_est", "X", "A_num", "A_adb", "uT_pred", "uT_meas"];

pub fn write_tail_records<W: Write>(w: W, records: &[TailRecord]) -> io::Result<()> {
    write_csv(
        w,
        &TAIL_HEADER,
        records
            .iter()
            .map(|r| [r.t, r.c_est, r.x, r.a_num, r.a_adb, r.ut_pred, r.ut_meas]),
    )
}

/// `t,c,amplitude` for every trajectory sample.
pub fn write_trajectory<W: Write>(w: W, tr: &VelocityTrajectory) -> io::Result<()> {
    let n = tr.n;
    write_csv(
        w,
        &["t", "c", "amplitude"],
        tr.samples
            .iter()
            .map(|s| [s.t, s.c, (2.0 * n * s.c / (n + 1.0)).powf(1.0 / (n - 1.0))]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut out = Vec::new();
        write_csv(&mut out, &["a", "b"], [[1.0, -0.1], [1e-300, 2.5]]).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert_eq!(
            s,
            "a,b\n1.0000000000000000e0,-1.0000000000000001e-1\n1.0000000000000000e-300,2.5000000000000000e0\n"
        );
        for line in s.lines().skip(1) {
            for cell in line.split(',') {
                let v: f64 = cell.parse().unwrap();
                assert_eq!(format_number(v), cell);
            }
        }
    }

    #[test]
    fn snapshot_names() {
        assert_eq!(snapshot_file_name(0.0), "snap_t0.0.csv");
        assert_eq!(snapshot_file_name(1900.0), "snap_t1900.0.csv");
        assert_eq!(snapshot_file_name(12.349999), "snap_t12.3.csv");
    }
}
