use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::Write;

use super::record::RunRecord;
use crate::error::{Error, Result};
use crate::metrics::MetricsRecord;
use crate::solvers::Method;
use crate::spacegen::Hyperparameter;

const Z95: f64 = 1.959_963_984_540_054;

/// Metric value of a record, `None` for failed runs and for fit fields a
/// method does not have.
pub fn record_value(record: &RunRecord, metric: &str) -> Result<Option<f64>> {
    match metric {
        "fit_seconds" => Ok(record.is_ok().then_some(record.fit_seconds)),
        "iterations" => Ok(record.is_ok().then_some(record.iterations as f64)),
        "cv_fits" => Ok(record.is_ok().then_some(record.cv_fits as f64)),
        "elected_alpha" => Ok(record.elected_alpha),
        "alpha_max" => Ok(record.alpha_max),
        "saturated" => Ok(record.saturated.map(|s| if s { 1.0 } else { 0.0 })),
        _ => {
            let zero = MetricsRecord {
                precision: 0.0,
                recall: 0.0,
                f1: 0.0,
                rel_l2: 0.0,
                rmse_test: 0.0,
                selected_count: 0,
            };
            zero.get(metric)?;
            record.metrics.as_ref().map(|m| m.get(metric)).transpose()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: Method,
    pub keys: Vec<String>,
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Fewer than two values, so the interval is a point.
    pub degenerate_ci: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryTable {
    pub metric: String,
    pub group_by: Vec<Hyperparameter>,
    pub rows: Vec<SummaryRow>,
}

fn natural_cmp(a: &str, b: &str) -> Ordering {
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => x.total_cmp(&y),
        _ => a.cmp(b),
    }
}

/// Count, mean, median and a normal-approximation 95% interval of `metric`
/// per method and per combination of the `group_by` levels. Failed runs
/// are left out.
pub fn export_summary(
    records: &[RunRecord],
    group_by: &[Hyperparameter],
    metric: &str,
) -> Result<SummaryTable> {
    if records.is_empty() {
        return Err(Error::Empty("result store holds no records".into()));
    }
    let mut groups: HashMap<(Method, Vec<String>), Vec<f64>> = HashMap::new();
    for r in records {
        if let Some(v) = record_value(r, metric)? {
            let keys = group_by.iter().map(|h| h.level(&r.config)).collect();
            groups.entry((r.method, keys)).or_default().push(v);
        }
    }
    let mut rows: Vec<SummaryRow> = groups
        .into_iter()
        .map(|((method, keys), mut values)| {
            values.sort_by(f64::total_cmp);
            let count = values.len();
            let mean = values.iter().sum::<f64>() / count as f64;
            let median = if count % 2 == 1 {
                values[count / 2]
            } else {
                0.5 * (values[count / 2 - 1] + values[count / 2])
            };
            let (half, degenerate_ci) = if count < 2 {
                (0.0, true)
            } else {
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
                (Z95 * (var / count as f64).sqrt(), false)
            };
            SummaryRow { method, keys, count, mean, median, ci_low: mean - half, ci_high: mean + half, degenerate_ci }
        })
        .collect();
    rows.sort_by(|a, b| {
        a.method.cmp(&b.method).then_with(|| {
            a.keys
                .iter()
                .zip(&b.keys)
                .map(|(x, y)| natural_cmp(x, y))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    });
    Ok(SummaryTable { metric: metric.to_string(), group_by: group_by.to_vec(), rows })
}

/// `v` rounded to nine significant digits, printed without trailing noise.
pub fn format_sig(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.8e}").parse().unwrap_or(v);
    rounded.to_string()
}

impl SummaryTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["method".to_string()];
        header.extend(self.group_by.iter().map(|h| h.name().to_string()));
        header.extend(["count", "mean", "median", "ci_low", "ci_high", "degenerate_ci"].map(String::from));
        w.write_record(&header)?;
        for r in &self.rows {
            let mut row = vec![r.method.to_string()];
            row.extend(r.keys.iter().cloned());
            row.push(r.count.to_string());
            row.extend([r.mean, r.median, r.ci_low, r.ci_high].map(format_sig));
            row.push(r.degenerate_ci.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_digits() {
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(0.1234567891234), "0.123456789");
        assert_eq!(format_sig(123456789012.0), "123456789000");
        assert_eq!(format_sig(f64::INFINITY), "inf");
    }
}
