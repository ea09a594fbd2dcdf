use std::fmt::Write as _;
use std::path::Path;

use super::CliError;
use crate::dynamics::{var_name, SectionSurvey, SweepRow, Trajectory};

/// Shortest representation that reads back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Serializes a header and rows as RFC 4180 CSV with `\n` terminators.
fn csv_text<I>(header: &[String], rows: I) -> String
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for r in rows {
        w.write_record(&r).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("fields are UTF-8")
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Trajectory CSV: `t, q.., p.., drift.., status`. Rows read `ok` except the
/// last, which carries the run status. Monitors absent from the run leave
/// their column empty.
pub fn trajectory_csv(traj: &Trajectory, n: usize) -> String {
    let mut cols = vec!["t".to_string()];
    cols.extend((0..2 * n).map(|i| var_name(i, n)));
    let mut drift_names = vec!["H".to_string(), "I".to_string()];
    drift_names.extend((2..n).map(|m| format!("C{m}")));
    cols.extend(drift_names.iter().map(|d| format!("drift{d}")));
    cols.push("status".into());
    let index: Vec<Option<usize>> = drift_names
        .iter()
        .map(|d| traj.monitor_names.iter().position(|m| m == d))
        .collect();
    let last = traj.times.len().saturating_sub(1);
    let rows = traj.times.iter().zip(&traj.states).enumerate().map(|(j, (t, x))| {
        let mut row = vec![num(*t)];
        row.extend(x.iter().map(|v| num(*v)));
        row.extend(index.iter().map(|k| opt(k.map(|k| traj.drift[k][j]))));
        row.push(if j == last { traj.status.label().into() } else { "ok".into() });
        row
    });
    csv_text(&cols, rows)
}

pub fn trajectory_plot(csv: &str, traj: &Trajectory) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set xlabel 't'");
    let _ = writeln!(s, "set ylabel 'relative drift'");
    let _ = writeln!(s, "set logscale y");
    let _ = writeln!(s, "set format y '%.0e'");
    let curves: Vec<String> = traj
        .monitor_names
        .iter()
        .map(|m| format!("'{csv}' using 1:(column('drift{m}') > 0 ? column('drift{m}') : NaN) with lines title 'drift {m}'"))
        .collect();
    let _ = writeln!(s, "plot {}", curves.join(", \\\n     "));
    s
}

/// Section CSV: `orbit, t, q.., p.., residual`.
pub fn section_csv(survey: &SectionSurvey, n: usize) -> String {
    let mut cols = vec!["orbit".to_string(), "t".to_string()];
    cols.extend((0..2 * n).map(|i| var_name(i, n)));
    cols.push("residual".into());
    let rows = survey.sections.iter().enumerate().flat_map(|(k, sec)| {
        sec.times.iter().zip(&sec.points).zip(&sec.residuals).map(move |((t, x), r)| {
            let mut row = vec![k.to_string(), num(*t)];
            row.extend(x.iter().map(|v| num(*v)));
            row.push(num(*r));
            row
        })
    });
    csv_text(&cols, rows)
}

pub fn section_plot(csv: &str, n: usize) -> String {
    let (a, b) = (var_name(1, n), var_name(n + 1, n));
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set xlabel '{a}'");
    let _ = writeln!(s, "set ylabel '{b}'");
    let _ = writeln!(s, "unset key");
    let _ = writeln!(
        s,
        "plot '{csv}' every ::1 using (column('{a}')):(column('{b}')):(column('orbit')) with points pt 7 ps 0.3 lc variable"
    );
    s
}

/// Sweep CSV: grid coordinates, then the row results.
pub fn sweep_csv(axes: &[String], rows: &[SweepRow], n: usize) -> String {
    let mut cols: Vec<String> = axes.to_vec();
    cols.extend(["model", "integrable", "status", "driftH", "driftI"].map(String::from));
    cols.extend((2..n).map(|m| format!("driftC{m}")));
    cols.extend(["section_points", "section_statistic"].map(String::from));
    let rows = rows.iter().map(|r| {
        let mut row: Vec<String> = r.coords.iter().map(|(_, v)| v.clone()).collect();
        row.push(r.model.clone());
        row.push(r.integrable.to_string());
        row.push(r.status.clone());
        row.push(opt(r.drift_h));
        row.push(opt(r.drift_i));
        for m in 0..n.saturating_sub(2) {
            row.push(opt(r.drift_c.get(m).copied()));
        }
        row.push(r.section_points.to_string());
        row.push(opt(r.section_statistic));
        row
    });
    csv_text(&cols, rows)
}

pub fn sweep_plot(csv: &str, axes: &[String]) -> String {
    let x = axes.first().cloned().unwrap_or_else(|| "row".into());
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set xlabel '{x}'");
    let _ = writeln!(s, "set ylabel 'max relative drift'");
    let _ = writeln!(s, "set logscale y");
    let _ = writeln!(
        s,
        "plot '{csv}' using 0:(column('driftH')):xticlabels(1) with linespoints title 'driftH', \\\n     '' using 0:(column('driftI')):xticlabels(1) with linespoints title 'driftI'"
    );
    s
}
