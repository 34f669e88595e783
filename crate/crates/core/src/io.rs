//! CSV ingestion/emission and range normalization.
//!
//! File layout: a header of column names, an optional second row whose first
//! cell is `#informative` followed by one `0`/`1` per feature column (in
//! order, label column skipped), then numeric data rows. The label column, if
//! named, may hold integers or arbitrary strings; strings are mapped to dense
//! ids by first appearance.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::data::{Dataset, Matrix};
use crate::error::{MwkError, Result};

/// First cell of the optional mask row.
pub const MASK_TAG: &str = "#informative";

pub fn load_csv(path: impl AsRef<Path>, label_column: Option<&str>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    read_csv(file, label_column)
}

/// Parse CSV from any reader. Error coordinates are 1-based and count data
/// rows only (header and mask row excluded).
pub fn read_csv<R: Read>(reader: R, label_column: Option<&str>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|s| s.trim().to_string()).collect();
    let label_idx = match label_column {
        Some(name) => Some(
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| MwkError::input(format!("label column {name:?} not in header")))?,
        ),
        None => None,
    };
    let width = header.len();
    let features: Vec<usize> = (0..width).filter(|&c| Some(c) != label_idx).collect();
    if features.is_empty() {
        return Err(MwkError::input("CSV has no feature columns"));
    }

    let mut mask = None;
    let mut values = Vec::new();
    let mut raw_labels = Vec::new();
    let mut row_no = 0usize;
    for record in rdr.records() {
        let record = record?;
        if mask.is_none() && row_no == 0 && record.get(0).map(str::trim) == Some(MASK_TAG) {
            mask = Some(parse_mask(&record, features.len())?);
            continue;
        }
        row_no += 1;
        if record.len() != width {
            return Err(MwkError::Parse {
                row: row_no,
                col: record.len().min(width) + 1,
                msg: format!("expected {width} cells, found {}", record.len()),
            });
        }
        for &c in &features {
            let cell = record[c].trim();
            let x: f64 = cell.parse().map_err(|_| MwkError::Parse {
                row: row_no,
                col: c + 1,
                msg: format!("non-numeric cell {cell:?}"),
            })?;
            if !x.is_finite() {
                return Err(MwkError::Parse { row: row_no, col: c + 1, msg: format!("non-finite cell {cell:?}") });
            }
            values.push(x);
        }
        if let Some(l) = label_idx {
            raw_labels.push(record[l].trim().to_string());
        }
    }
    if row_no == 0 {
        return Err(MwkError::input("CSV has no data rows"));
    }

    let names = features.iter().map(|&c| header[c].clone()).collect();
    let mut data = Dataset::new(Matrix::from_vec(row_no, features.len(), values)?)?.with_feature_names(names)?;
    if label_idx.is_some() {
        data = data.with_labels(dense_labels(&raw_labels))?;
    }
    if let Some(mask) = mask {
        data = data.with_informative(mask)?;
    }
    Ok(data)
}

fn parse_mask(record: &csv::StringRecord, m: usize) -> Result<Vec<bool>> {
    let cells: Vec<&str> = record.iter().skip(1).map(str::trim).collect();
    if cells.len() != m {
        return Err(MwkError::input(format!("mask row has {} entries for {m} features", cells.len())));
    }
    cells
        .iter()
        .enumerate()
        .map(|(j, c)| match *c {
            "1" => Ok(true),
            "0" => Ok(false),
            other => Err(MwkError::Parse { row: 0, col: j + 2, msg: format!("mask cell {other:?} is not 0/1") }),
        })
        .collect()
}

fn dense_labels(raw: &[String]) -> Vec<usize> {
    if let Ok(ints) = raw.iter().map(|s| s.parse::<usize>()).collect::<std::result::Result<Vec<_>, _>>() {
        return ints;
    }
    let mut ids = HashMap::new();
    raw.iter()
        .map(|s| {
            let next = ids.len();
            *ids.entry(s.as_str()).or_insert(next)
        })
        .collect()
}

/// Write `data` in the layout `read_csv` understands. Labels go to a trailing
/// `label` column. Numbers use the shortest representation that parses back
/// to the same double.
pub fn write_csv<W: Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(writer);
    let mut header: Vec<String> = data.feature_names().to_vec();
    if data.labels().is_some() {
        header.push("label".into());
    }
    w.write_record(&header)?;
    if let Some(mask) = data.informative() {
        let mut row = vec![MASK_TAG.to_string()];
        row.extend(mask.iter().map(|&b| if b { "1" } else { "0" }.to_string()));
        w.write_record(&row)?;
    }
    for i in 0..data.n() {
        let mut row: Vec<String> = data.row(i).iter().map(|x| format!("{x:?}")).collect();
        if let Some(labels) = data.labels() {
            row.push(labels[i].to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    write_csv(data, File::create(path)?)
}

/// Range-normalized data plus the names of dropped constant features.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalized {
    pub data: Dataset,
    pub dropped: Vec<String>,
}

/// `(x - mean) / (max - min)` per feature. Constant features are dropped and
/// reported; if every feature is constant the result is an error.
pub fn normalize_range(data: &Dataset) -> Result<Normalized> {
    let (n, m) = (data.n(), data.m());
    let mut keep = Vec::with_capacity(m);
    let mut dropped = Vec::new();
    let mut stats = Vec::with_capacity(m);
    for v in 0..m {
        let col = data.column(v);
        let (lo, hi) = col.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        if hi == lo {
            let name = data.feature_names()[v].clone();
            log::warn!("dropping constant feature {name}");
            dropped.push(name);
            continue;
        }
        keep.push(v);
        stats.push((col.iter().sum::<f64>() / n as f64, hi - lo));
    }
    if keep.is_empty() {
        return Err(MwkError::input("every feature is constant; nothing left after normalization"));
    }
    let kept = data.select_features(&keep)?;
    let mut values = kept.values().clone();
    for i in 0..n {
        for (x, &(mean, range)) in values.row_mut(i).iter_mut().zip(&stats) {
            *x = (*x - mean) / range;
        }
    }
    let mut out = Dataset::new(values)?.with_feature_names(kept.feature_names().to_vec())?;
    if let Some(l) = kept.labels() {
        out = out.with_labels(l.to_vec())?;
    }
    if let Some(mk) = kept.informative() {
        out = out.with_informative(mk.to_vec())?;
    }
    Ok(Normalized { data: out, dropped })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str, label: Option<&str>) -> Result<Dataset> {
        read_csv(s.as_bytes(), label)
    }

    #[test]
    fn plain_numeric_csv() {
        let d = parse("a,b\n1,2\n3,4\n5,6\n", None).unwrap();
        assert_eq!((d.n(), d.m()), (3, 2));
        assert_eq!(d.feature_names(), &["a", "b"]);
        assert_eq!(d.row(2), &[5.0, 6.0]);
        assert!(d.labels().is_none() && d.informative().is_none());
    }

    #[test]
    fn label_column_and_mask_row() {
        let d = parse("x,label,y\n#informative,1,0\n1,2,3\n4,0,6\n", Some("label")).unwrap();
        assert_eq!(d.m(), 2);
        assert_eq!(d.labels().unwrap(), &[2, 0]);
        assert_eq!(d.informative().unwrap(), &[true, false]);
        assert_eq!(d.row(1), &[4.0, 6.0]);

        let d = parse("x,label\n1,cat\n2,dog\n3,cat\n", Some("label")).unwrap();
        assert_eq!(d.labels().unwrap(), &[0, 1, 0]);
        assert!(parse("x\n1\n", Some("label")).is_err());
    }

    #[test]
    fn parse_errors_carry_coordinates() {
        let err = parse("a,b\n1,2\n1,2\n1,2\n1,2\n1,abc\n", None).unwrap_err();
        assert!(matches!(err, MwkError::Parse { row: 5, col: 2, .. }), "{err}");
        assert!(err.to_string().contains("row 5, column 2"));
        let err = parse("a,b\n#informative,1,1\n1,2\n3\n", None).unwrap_err();
        assert!(matches!(err, MwkError::Parse { row: 2, .. }), "{err}");
        assert!(matches!(parse("a,b\n#informative,1,x\n1,2\n", None), Err(MwkError::Parse { .. })));
        assert!(parse("a,b\n", None).is_err());
        assert!(parse("a\nNaN\n", None).is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        let rows = vec![vec![0.1, 1e-300, -3.0], vec![std::f64::consts::PI, 2.0 / 3.0, 12345.678901234567]];
        let d = Dataset::from_rows(&rows)
            .unwrap()
            .with_labels(vec![1, 0])
            .unwrap()
            .with_informative(vec![true, false, true])
            .unwrap();
        let mut buf = Vec::new();
        write_csv(&d, &mut buf).unwrap();
        let back = read_csv(buf.as_slice(), Some("label")).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let d = Dataset::from_rows(&[vec![1.5, 2.0], vec![-1.0, 0.25]]).unwrap();
        save_csv(&d, &path).unwrap();
        assert_eq!(load_csv(&path, None).unwrap(), d);
        assert!(matches!(load_csv(dir.path().join("missing.csv"), None), Err(MwkError::Io(_))));
    }

    #[test]
    fn normalize_example_and_contract() {
        let d = Dataset::from_rows(&[vec![0.0, 7.0, 1.0], vec![5.0, 7.0, 4.0], vec![10.0, 7.0, 2.0]])
            .unwrap()
            .with_informative(vec![true, false, true])
            .unwrap();
        let out = normalize_range(&d).unwrap();
        assert_eq!(out.dropped, vec!["f1".to_string()]);
        assert_eq!(out.data.feature_names(), &["f0", "f2"]);
        assert_eq!(out.data.informative().unwrap(), &[true, true]);
        assert_eq!(out.data.column(0), vec![-0.5, 0.0, 0.5]);
        for v in 0..out.data.m() {
            let c = out.data.column(v);
            let mean = c.iter().sum::<f64>() / c.len() as f64;
            let range = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - c.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(mean.abs() < 1e-12 && (range - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_is_idempotent() {
        let d = Dataset::from_rows(&[vec![0.3, -2.0], vec![1.7, 5.0], vec![-0.4, 0.1], vec![9.0, 3.3]]).unwrap();
        let once = normalize_range(&d).unwrap().data;
        let twice = normalize_range(&once).unwrap().data;
        for (a, b) in once.values().as_slice().iter().zip(twice.values().as_slice()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn all_constant_is_an_error() {
        let d = Dataset::from_rows(&[vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        assert!(normalize_range(&d).is_err());
    }
}
