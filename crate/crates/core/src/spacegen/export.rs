use std::io::Write;

use super::Dataset;
use crate::error::Result;
use crate::Float;

/// Writes `x1..xp,y,split` rows with 17 significant digits. Rows keep their
/// original order; `split` is `train` or `test` (`train` for unsplit data).
pub fn write_dataset_csv<F: Float, W: Write>(dataset: &Dataset<F>, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=dataset.p()).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    header.push("split".into());
    wtr.write_record(&header)?;
    let mut in_test = vec![false; dataset.n()];
    dataset.test_idx.iter().for_each(|&i| in_test[i] = true);
    for (i, row) in dataset.x.rows().into_iter().enumerate() {
        let mut rec: Vec<String> =
            row.iter().map(|v| format!("{:.16e}", v.to_f64_lossy())).collect();
        rec.push(format!("{:.16e}", dataset.y[i].to_f64_lossy()));
        rec.push(if in_test[i] { "test" } else { "train" }.into());
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}
