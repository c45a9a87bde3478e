//! CSV table and run-record files.

use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::run::{NamedSeries, RunOutput, RunRecord};

/// Shortest representation that parses back to the same `f64`.
fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        ryu::Buffer::new().format_finite(x).to_owned()
    } else {
        x.to_string()
    }
}

/// Column names: `t`, then per series the real and imaginary part of every
/// entry in row-major order, its purity and its trace distance to the
/// exact series.
pub fn header(series: &[NamedSeries]) -> Vec<String> {
    let mut cols = vec!["t".to_owned()];
    for s in series {
        let d = s.series.dim();
        for i in 0..d {
            for j in 0..d {
                cols.push(format!("{}_rho_{i}_{j}_re", s.name));
                cols.push(format!("{}_rho_{i}_{j}_im", s.name));
            }
        }
        cols.push(format!("{}_purity", s.name));
        cols.push(format!("{}_trace_distance", s.name));
    }
    cols
}

pub fn csv_bytes(out: &RunOutput) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header(&out.series))?;
    let times = out.series[0].series.times();
    for (k, &t) in times.iter().enumerate() {
        let mut row = vec![fmt_f64(t)];
        for s in &out.series {
            let rho = &s.series.states()[k];
            for z in rho.as_matrix().as_slice() {
                row.push(fmt_f64(z.re));
                row.push(fmt_f64(z.im));
            }
            row.push(fmt_f64(rho.purity()));
            row.push(fmt_f64(s.distances[k]));
        }
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// `results.csv` → `results.record.json`.
pub fn record_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("record.json")
}

pub fn record_json(record: &RunRecord) -> String {
    crate::json::to_string(record)
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the table to `csv_path` and the record next to it.
pub fn write_outputs(out: &RunOutput, csv_path: &Path) -> Result<PathBuf, CliError> {
    let bytes = csv_bytes(out).map_err(|e| CliError::Io {
        path: csv_path.to_path_buf(),
        source: std::io::Error::other(e),
    })?;
    write(csv_path, &bytes)?;
    let record = record_path(csv_path);
    write(&record, record_json(&out.record).as_bytes())?;
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demo;
    use crate::run::run;
    use crate::scenario::Scenario;

    #[test]
    fn header_lists_every_column() {
        let mut file = demo::two_point_breakdown();
        file.t_final = 0.1;
        let out = run(&Scenario::resolve(file).unwrap()).unwrap();
        let h = header(&out.series);
        assert_eq!(h.len(), 1 + 3 * (8 + 2));
        assert_eq!(&h[..4], ["t", "exact_rho_0_0_re", "exact_rho_0_0_im", "exact_rho_0_1_re"]);
        assert!(h.contains(&"redfield_rho_0_1_im".to_owned()));
        assert_eq!(h.last().unwrap(), "dephasing_trace_distance");

        let text = String::from_utf8(csv_bytes(&out).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + 11);
        assert_eq!(lines[0], h.join(","));
        assert!(lines[1].starts_with("0.0,0.5,"));
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-17, 0.0, 12345.678] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn record_path_replaces_extension() {
        assert_eq!(record_path(Path::new("out/a.csv")), PathBuf::from("out/a.record.json"));
    }
}
