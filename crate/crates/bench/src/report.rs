use std::path::Path;

use serde::Serialize;
use sparse_infer::network::{DensityRow, Variant};

use crate::runner::TimingRow;
use crate::{BenchError, Result};

/// Median of the values; the mean of the two middle values for even counts.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => v[n / 2],
        _ => (v[n / 2 - 1] + v[n / 2]) / 2.0,
    }
}

/// Timing statistics of one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub variant: String,
    pub density: f64,
    pub batch: usize,
    pub workers: usize,
    pub strategy: String,
    pub median: f64,
    pub min: f64,
    /// Baseline median over this median, at the same grid point.
    pub speedup: Option<f64>,
}

pub fn summarize(rows: &[TimingRow]) -> Vec<SummaryRow> {
    let key = |r: &TimingRow| (r.variant.clone(), r.density.to_bits(), r.batch, r.workers);
    let mut groups: Vec<((String, u64, usize, usize), Vec<&TimingRow>)> = Vec::new();
    for r in rows {
        match groups.iter_mut().find(|(k, _)| *k == key(r)) {
            Some((_, g)) => g.push(r),
            None => groups.push((key(r), vec![r])),
        }
    }
    let mut out: Vec<SummaryRow> = groups
        .iter()
        .map(|(_, g)| {
            let secs: Vec<f64> = g.iter().map(|r| r.seconds).collect();
            SummaryRow {
                variant: g[0].variant.clone(),
                density: g[0].density,
                batch: g[0].batch,
                workers: g[0].workers,
                strategy: g[0].strategy.clone(),
                median: median(&secs),
                min: secs.iter().cloned().fold(f64::INFINITY, f64::min),
                speedup: None,
            }
        })
        .collect();
    let baseline = Variant::DenseBaseline.name();
    for i in 0..out.len() {
        let base = out.iter().find(|b| {
            b.variant == baseline && b.density == out[i].density && b.batch == out[i].batch && b.workers == out[i].workers
        });
        out[i].speedup = base.map(|b| b.median / out[i].median);
    }
    out
}

fn output_err(path: &Path) -> impl FnOnce(csv::Error) -> BenchError + '_ {
    move |source| BenchError::Output {
        path: path.display().to_string(),
        source,
    }
}

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(output_err(path))?;
    for r in rows {
        w.serialize(r).map_err(output_err(path))?;
    }
    w.flush().map_err(|e| output_err(path)(e.into()))?;
    Ok(())
}

/// Columns `variant,density,batch,workers,strategy,rep,seconds`.
pub fn write_timing_csv(path: &Path, rows: &[TimingRow]) -> Result<()> {
    write_rows(path, rows)
}

#[derive(Serialize)]
struct DensityRecord<'a> {
    input_density: f64,
    layer_index: usize,
    layer_kind: &'a str,
    output_density: f64,
}

/// Columns `input_density,layer_index,layer_kind,output_density`.
pub fn write_density_csv(path: &Path, rows: &[DensityRow]) -> Result<()> {
    write_rows(
        path,
        rows.iter().map(|r| DensityRecord {
            input_density: r.input_density,
            layer_index: r.layer_index,
            layer_kind: &r.layer_kind,
            output_density: r.output_density,
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(variant: &str, density: f64, seconds: f64) -> TimingRow {
        TimingRow {
            variant: variant.into(),
            density,
            batch: 1,
            workers: 1,
            strategy: "I".into(),
            rep: 0,
            seconds,
        }
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }

    #[test]
    fn speedup_is_relative_to_baseline() {
        let rows = [
            row("sparse_filter", 0.01, 1.0),
            row("sparse_filter", 0.01, 2.0),
            row("sparse_filter", 0.01, 3.0),
            row("dense_baseline", 0.01, 4.0),
            row("dense_baseline", 0.01, 4.0),
            row("dense_baseline", 0.01, 8.0),
        ];
        let s = summarize(&rows);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].median, 2.0);
        assert_eq!(s[0].min, 1.0);
        assert_eq!(s[0].speedup, Some(2.0));
        assert_eq!(s[1].speedup, Some(1.0));
    }

    #[test]
    fn csv_headers() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_timing_csv(&p, &[row("sparse_filter", 0.5, 0.25)]).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, "variant,density,batch,workers,strategy,rep,seconds\nsparse_filter,0.5,1,1,I,0,0.25\n");
        let d = dir.path().join("d.csv");
        let rows = [DensityRow {
            input_density: 0.1,
            layer_index: 0,
            layer_kind: "input".into(),
            output_density: 0.1,
        }];
        write_density_csv(&d, &rows).unwrap();
        let text = std::fs::read_to_string(&d).unwrap();
        assert_eq!(text, "input_density,layer_index,layer_kind,output_density\n0.1,0,input,0.1\n");
    }
}
