//! CSV and JSON input/output for the file formats the tools exchange:
//! observation ingestion, sample batches with JSON sidecars, convergence
//! tables, derivative-error tables, and rate tables.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! rerun with identical inputs produces byte-identical files.

use std::io::{Read, Write};
use std::path::Path;

use crate::identities::RateTable;
use crate::operator::{ConvergenceRow, DerivativeErrorRow};
use crate::sampler::SampleBatch;
use crate::{Error, Result};

/// Read observation rows: one row per observation, n numeric columns,
/// decimal point '.', UTF-8. Rejects non-finite cells, naming the row.
pub fn read_data_csv<R: Read>(reader: R, has_header: bool) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let row_no = r + 1; // 1-based data row, header excluded
        let mut row = Vec::with_capacity(record.len());
        for (c, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::DataRow {
                row: row_no,
                message: format!("column {} is not numeric: '{field}'", c + 1),
            })?;
            if !value.is_finite() {
                return Err(Error::DataRow {
                    row: row_no,
                    message: format!("column {} holds non-finite value '{field}'", c + 1),
                });
            }
            row.push(value);
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_data_csv_path(path: &Path, has_header: bool) -> Result<Vec<Vec<f64>>> {
    read_data_csv(std::fs::File::open(path)?, has_header)
}

/// Sample batch as CSV: header `y1,...,yn`, one row per point.
pub fn write_sample_csv<W: Write>(batch: &SampleBatch, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let header: Vec<String> = (1..=batch.dim).map(|k| format!("y{k}")).collect();
    w.write_record(&header)?;
    for point in &batch.points {
        w.write_record(point.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Sidecar metadata for a batch CSV, same basename with `.json`.
pub fn sample_sidecar_json(batch: &SampleBatch) -> serde_json::Value {
    serde_json::json!({
        "seed": batch.seed,
        "family": batch.family,
        "theta": batch.theta,
        "m": batch.m.get(),
        "count": batch.len(),
        "dim": batch.dim,
    })
}

/// Convergence ladder as CSV: `m, sup_error, argmax_x1..xn, elapsed_ms`.
pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let dim = rows.first().map(|r| r.argmax.len()).unwrap_or(0);
    let mut header = vec!["m".to_string(), "sup_error".to_string()];
    header.extend((1..=dim).map(|k| format!("argmax_x{k}")));
    header.push("elapsed_ms".to_string());
    w.write_record(&header)?;
    for row in rows {
        let mut record = vec![row.m.to_string(), row.sup_error.to_string()];
        record.extend(row.argmax.iter().map(|v| v.to_string()));
        record.push(row.elapsed.as_millis().to_string());
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Derivative-error table as CSV: `m, x1..xn, exact, approx, abs_error`.
pub fn write_derivative_csv<W: Write>(rows: &[DerivativeErrorRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let dim = rows.first().map(|r| r.point.len()).unwrap_or(0);
    let mut header = vec!["m".to_string()];
    header.extend((1..=dim).map(|k| format!("x{k}")));
    header.extend(["exact", "approx", "abs_error"].map(String::from));
    w.write_record(&header)?;
    for row in rows {
        let mut record = vec![row.m.to_string()];
        record.extend(row.point.iter().map(|v| v.to_string()));
        record.push(row.exact.to_string());
        record.push(row.approx.to_string());
        record.push(row.abs_error.to_string());
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Rate table as CSV: `m, value, <scaled label>`.
pub fn write_rate_csv<W: Write>(table: &RateTable, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["m", "value", table.scaling.label()])?;
    for row in &table.rows {
        w.write_record([
            row.m.to_string(),
            row.value.to_string(),
            row.scaled.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Degree;
    use crate::copula::Family;
    use crate::sampler::sample_batch;

    #[test]
    fn reads_plain_and_headered_csv() {
        let plain = "0.1,0.2\n0.3,0.4\n";
        let rows = read_data_csv(plain.as_bytes(), false).unwrap();
        assert_eq!(rows, vec![vec![0.1, 0.2], vec![0.3, 0.4]]);

        let headered = "a,b\n0.1,0.2\n0.3,0.4\n";
        let rows = read_data_csv(headered.as_bytes(), true).unwrap();
        assert_eq!(rows.len(), 2);
    }

    #[test]
    fn rejects_bad_cells_naming_the_row() {
        let with_nan = "0.1,0.2\nNaN,0.4\n";
        match read_data_csv(with_nan.as_bytes(), false) {
            Err(Error::DataRow { row, message }) => {
                assert_eq!(row, 2);
                assert!(message.contains("non-finite"));
            }
            other => panic!("expected DataRow error, got {other:?}"),
        }
        let with_text = "0.1,0.2\n0.3,widget\n";
        assert!(matches!(
            read_data_csv(with_text.as_bytes(), false),
            Err(Error::DataRow { row: 2, .. })
        ));
        let with_inf = "inf,0.2\n0.3,0.4\n";
        assert!(matches!(
            read_data_csv(with_inf.as_bytes(), false),
            Err(Error::DataRow { row: 1, .. })
        ));
    }

    #[test]
    fn sample_csv_and_sidecar_round_out() {
        let c = Family::new("clayton", Some(2.0), 2).unwrap();
        let batch = sample_batch(&c, Degree::new(3).unwrap(), 5, 9).unwrap();
        let mut buf = Vec::new();
        write_sample_csv(&batch, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("y1,y2"));
        assert_eq!(lines.count(), 5);

        let sidecar = sample_sidecar_json(&batch);
        assert_eq!(sidecar["seed"], 9);
        assert_eq!(sidecar["family"], "clayton");
        assert_eq!(sidecar["theta"], 2.0);
        assert_eq!(sidecar["m"], 3);
        assert_eq!(sidecar["count"], 5);
    }

    #[test]
    fn identical_batches_serialize_identically() {
        let c = Family::new("independence", None, 2).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_sample_csv(&sample_batch(&c, Degree::new(4).unwrap(), 50, 1).unwrap(), &mut a)
            .unwrap();
        write_sample_csv(&sample_batch(&c, Degree::new(4).unwrap(), 50, 1).unwrap(), &mut b)
            .unwrap();
        assert_eq!(a, b);
    }
}
