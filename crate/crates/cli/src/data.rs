use std::path::Path;

use ndarray::{Array1, Array2};
use regbench::{Error, Result};

/// A numeric table read from a delimited file with a header row.
pub struct Table {
    pub feature_names: Vec<String>,
    pub response_name: String,
    pub x: Array2<f64>,
    pub y: Array1<f64>,
}

/// Reads a comma-separated file. The response is the column named
/// `response`, or the last column when `None`. Non-numeric columns other
/// than the response (a `split` column, say) are dropped with a warning.
pub fn read_table(path: &Path, response: Option<&str>) -> Result<Table> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if headers.len() < 2 {
        return Err(Error::Parse(format!("{}: need at least two columns", path.display())));
    }
    let mut rows: Vec<Vec<String>> = Vec::new();
    for rec in rdr.records() {
        rows.push(rec?.iter().map(|s| s.trim().to_string()).collect());
    }
    if rows.is_empty() {
        return Err(Error::Empty(format!("{} has no data rows", path.display())));
    }

    let numeric = |j: usize| rows.iter().all(|r| r[j].parse::<f64>().is_ok());
    let target = match response {
        Some(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("no column named `{name}`")))?,
        None => (0..headers.len())
            .rev()
            .find(|&j| numeric(j))
            .ok_or_else(|| Error::Parse("no numeric column".into()))?,
    };
    if !numeric(target) {
        return Err(Error::Parse(format!("response column `{}` is not numeric", headers[target])));
    }
    let mut features = Vec::new();
    for j in 0..headers.len() {
        if j == target {
            continue;
        }
        if numeric(j) {
            features.push(j);
        } else {
            log::warn!("dropping non-numeric column `{}`", headers[j]);
        }
    }
    if features.is_empty() {
        return Err(Error::Parse("no numeric feature columns".into()));
    }
    let parse = |r: &Vec<String>, j: usize| r[j].parse::<f64>().expect("checked numeric");
    let x = Array2::from_shape_fn((rows.len(), features.len()), |(i, k)| parse(&rows[i], features[k]));
    let y = Array1::from_shape_fn(rows.len(), |i| parse(&rows[i], target));
    Ok(Table {
        feature_names: features.iter().map(|&j| headers[j].clone()).collect(),
        response_name: headers[target].clone(),
        x,
        y,
    })
}
