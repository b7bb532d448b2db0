//! Effect sizes of the hyperparameters on paired method differences.
//!
//! For a metric and a pair of methods `(A, B)`, every `(config, seed)` of a
//! sweep gives one difference `A - B`. A one-way ANOVA per hyperparameter
//! turns those differences into an omega-squared main effect, and a
//! balanced two-way ANOVA per pair of hyperparameters gives interaction F
//! statistics.

mod anova;

use std::collections::BTreeMap;
use std::io::Write;

pub use anova::{
    classify_effect, omega_squared, two_way_interaction_f, AnovaDecomposition, EffectMagnitude,
    InteractionF, OmegaSquared,
};

use crate::error::{Error, Result};
use crate::harness::{format_sig, record_value, RunRecord};
use crate::solvers::Method;
use crate::spacegen::{Hyperparameter, SimConfig};

/// Metrics that only depend on the selected support.
const SUPPORT_METRICS: [&str; 4] = ["f1", "precision", "recall", "selected_count"];

/// Method pairs reported for `metric`. Support metrics leave out Post-Lasso
/// OLS, whose support is the Lasso support by construction.
pub fn default_pairs(metric: &str) -> Vec<(Method, Method)> {
    use Method::*;
    if SUPPORT_METRICS.contains(&metric) {
        vec![(Lasso, Ridge), (Lasso, ElasticNet), (ElasticNet, Ridge)]
    } else {
        vec![
            (Ridge, Lasso),
            (ElasticNet, Lasso),
            (PostLassoOls, Lasso),
            (Ridge, ElasticNet),
            (PostLassoOls, ElasticNet),
            (Ridge, PostLassoOls),
        ]
    }
}

pub fn pair_label(pair: (Method, Method)) -> String {
    format!("{}-{}", pair.0.short(), pair.1.short())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairDifference {
    pub config: SimConfig,
    pub seed: u64,
    pub diff: f64,
}

/// `metric(A) - metric(B)` for every `(config, seed)` where both runs
/// succeeded, sorted by config and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceTable {
    pub metric: String,
    pub pair: (Method, Method),
    pub rows: Vec<PairDifference>,
    /// Keys dropped because one of the two runs failed.
    pub skipped_failed: usize,
}

impl DifferenceTable {
    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.diff).collect()
    }

    pub fn levels(&self, h: Hyperparameter) -> Vec<String> {
        self.rows.iter().map(|r| h.level(&r.config)).collect()
    }
}

pub fn pairwise_difference_table(
    records: &[RunRecord],
    metric: &str,
    pair: (Method, Method),
) -> Result<DifferenceTable> {
    type Slot<'a> = (Option<&'a RunRecord>, Option<&'a RunRecord>);
    let mut joined: BTreeMap<(String, u64), Slot> = BTreeMap::new();
    for r in records {
        record_value(r, metric)?;
        let slot = if r.method == pair.0 {
            0
        } else if r.method == pair.1 {
            1
        } else {
            continue;
        };
        let e = joined.entry((r.config.canonical(), r.seed)).or_default();
        if slot == 0 {
            e.0 = Some(r);
        } else {
            e.1 = Some(r);
        }
    }
    let mut missing = Vec::new();
    let mut rows = Vec::new();
    let mut skipped_failed = 0;
    for ((canonical, seed), slot) in &joined {
        match slot {
            (Some(a), Some(b)) => match (record_value(a, metric)?, record_value(b, metric)?) {
                (Some(va), Some(vb)) => {
                    rows.push(PairDifference { config: a.config.clone(), seed: *seed, diff: va - vb })
                }
                _ => skipped_failed += 1,
            },
            (None, _) => missing.push(format!("{canonical} seed={seed} method={}", pair.0)),
            (_, None) => missing.push(format!("{canonical} seed={seed} method={}", pair.1)),
        }
    }
    if !missing.is_empty() {
        return Err(Error::IncompletePair { missing });
    }
    Ok(DifferenceTable { metric: metric.to_string(), pair, rows, skipped_failed })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectSizeReport {
    pub parameter: Hyperparameter,
    pub pair: (Method, Method),
    pub omega2: f64,
    pub magnitude: EffectMagnitude,
    pub negative: bool,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectRow {
    pub parameter: Hyperparameter,
    /// One cell per pair; `None` when the parameter has a single level.
    pub cells: Vec<Option<EffectSizeReport>>,
    pub average: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteractionRow {
    pub factors: (Hyperparameter, Hyperparameter),
    pub cells: Vec<Option<InteractionF<f64>>>,
    pub average_f: Option<f64>,
    pub average_eta2: Option<f64>,
}

/// Main effects (rows = hyperparameters, columns = method pairs) and the
/// strongest two-way interactions.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectTable {
    pub metric: String,
    pub pairs: Vec<(Method, Method)>,
    pub main: Vec<EffectRow>,
    pub interactions: Vec<InteractionRow>,
    pub notes: Vec<String>,
}

fn mean_of(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

/// Builds the effect-size table of `metric` over `pairs` (default pairs
/// when `None`), keeping the `top_interactions` interactions with the
/// largest average eta-squared.
pub fn effect_table(
    records: &[RunRecord],
    metric: &str,
    pairs: Option<&[(Method, Method)]>,
    top_interactions: usize,
) -> Result<EffectTable> {
    if records.is_empty() {
        return Err(Error::Empty("result store holds no records".into()));
    }
    let mut notes = Vec::new();
    let mut wanted: Vec<(Method, Method)> = pairs.map(<[_]>::to_vec).unwrap_or_else(|| default_pairs(metric));
    if SUPPORT_METRICS.contains(&metric)
        && wanted.iter().any(|p| p.0 == Method::PostLassoOls || p.1 == Method::PostLassoOls)
    {
        wanted.retain(|p| p.0 != Method::PostLassoOls && p.1 != Method::PostLassoOls);
        notes.push("Post-Lasso OLS pairs dropped: its support equals the Lasso support".into());
    }
    let present: Vec<Method> = {
        let mut m: Vec<Method> = records.iter().map(|r| r.method).collect();
        m.sort();
        m.dedup();
        m
    };
    let pairs: Vec<(Method, Method)> =
        wanted.into_iter().filter(|p| present.contains(&p.0) && present.contains(&p.1)).collect();
    if pairs.is_empty() {
        notes.push(format!(
            "no method pair available: the store holds {} method(s)",
            present.len()
        ));
        return Ok(EffectTable { metric: metric.into(), pairs, main: Vec::new(), interactions: Vec::new(), notes });
    }
    let tables = pairs
        .iter()
        .map(|&p| pairwise_difference_table(records, metric, p))
        .collect::<Result<Vec<_>>>()?;
    for t in &tables {
        if t.skipped_failed > 0 {
            notes.push(format!("{}: {} key(s) skipped after failed runs", pair_label(t.pair), t.skipped_failed));
        }
    }

    let mut main = Vec::new();
    for h in Hyperparameter::ALL {
        let cells: Vec<Option<EffectSizeReport>> = tables
            .iter()
            .map(|t| {
                omega_squared(&t.values(), &t.levels(h)).ok().map(|o| EffectSizeReport {
                    parameter: h,
                    pair: t.pair,
                    omega2: o.omega2,
                    magnitude: classify_effect(o.omega2),
                    negative: o.negative,
                    degenerate: o.degenerate,
                })
            })
            .collect();
        let average = mean_of(cells.iter().flatten().map(|c| c.omega2));
        main.push(EffectRow { parameter: h, cells, average });
    }
    main.sort_by(|a, b| b.average.unwrap_or(f64::NEG_INFINITY).total_cmp(&a.average.unwrap_or(f64::NEG_INFINITY)));

    let mut interactions = Vec::new();
    for (i, &ha) in Hyperparameter::ALL.iter().enumerate() {
        for &hb in &Hyperparameter::ALL[i + 1..] {
            let cells: Vec<Option<InteractionF<f64>>> = tables
                .iter()
                .map(|t| two_way_interaction_f(&t.values(), &t.levels(ha), &t.levels(hb)).ok())
                .collect();
            let average_f = mean_of(cells.iter().flatten().map(|c| c.f));
            let average_eta2 = mean_of(cells.iter().flatten().map(|c| c.eta2));
            if average_eta2.is_some() {
                interactions.push(InteractionRow { factors: (ha, hb), cells, average_f, average_eta2 });
            }
        }
    }
    interactions.sort_by(|a, b| b.average_eta2.unwrap_or(0.0).total_cmp(&a.average_eta2.unwrap_or(0.0)));
    interactions.truncate(top_interactions);
    Ok(EffectTable { metric: metric.into(), pairs, main, interactions, notes })
}

impl EffectTable {
    /// Two comma-separated blocks: omega-squared main effects, then the
    /// interaction F statistics. Empty cells are written as `NA`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        let opt = |v: Option<f64>| v.map(format_sig).unwrap_or_else(|| "NA".into());
        let labels: Vec<String> = self.pairs.iter().map(|&p| pair_label(p)).collect();
        let mut header = vec!["parameter".to_string()];
        header.extend(labels.iter().cloned());
        header.push("avg".into());
        w.write_record(&header)?;
        for row in &self.main {
            let mut r = vec![row.parameter.name().to_string()];
            r.extend(row.cells.iter().map(|c| opt(c.as_ref().map(|c| c.omega2))));
            r.push(opt(row.average));
            w.write_record(&r)?;
        }
        w.write_record([""])?;
        let mut header = vec!["interaction".to_string()];
        header.extend(labels.iter().cloned());
        header.extend(["avg_f".to_string(), "avg_eta2".to_string()]);
        w.write_record(&header)?;
        for row in &self.interactions {
            let mut r = vec![format!("{} x {}", row.factors.0, row.factors.1)];
            r.extend(row.cells.iter().map(|c| opt(c.as_ref().map(|c| c.f))));
            r.push(opt(row.average_f));
            r.push(opt(row.average_eta2));
            w.write_record(&r)?;
        }
        for n in &self.notes {
            w.write_record([format!("# {n}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::RunStatus;
    use crate::metrics::MetricsRecord;
    use crate::{BetaDist, Dispersion};

    fn record(n: usize, seed: u64, method: Method, f1: f64) -> RunRecord {
        let config = SimConfig {
            features_p: 16,
            rank_ratio: 1.0,
            dispersion: Dispersion::Low,
            beta_dist: BetaDist::Uniform,
            sparsity: 0.0,
            snr: 1.0,
            sample_n: n,
            seed: 0,
        };
        let mut r = RunRecord::failed(config, seed, method, String::new(), None);
        r.status = RunStatus::Ok;
        r.fail_reason = None;
        r.metrics = Some(MetricsRecord { precision: f1, recall: f1, f1, rel_l2: 0.0, rmse_test: 1.0, selected_count: 1 });
        r
    }

    #[test]
    fn shifted_metric_gives_constant_difference() {
        let mut recs = Vec::new();
        for n in [100, 1000] {
            for s in 0..3 {
                recs.push(record(n, s, Method::Lasso, 0.2 * s as f64));
                recs.push(record(n, s, Method::Ridge, 0.2 * s as f64 + 1.0));
            }
        }
        let t = pairwise_difference_table(&recs, "f1", (Method::Lasso, Method::Ridge)).unwrap();
        assert_eq!(t.rows.len(), 6);
        assert!(t.values().iter().all(|&d| (d + 1.0).abs() < 1e-15));
        let t = pairwise_difference_table(&recs, "f1", (Method::Ridge, Method::Lasso)).unwrap();
        assert!(t.values().iter().all(|&d| (d - 1.0).abs() < 1e-15));
    }

    #[test]
    fn missing_partner_is_reported() {
        let recs = vec![record(100, 0, Method::Lasso, 0.5), record(100, 1, Method::Lasso, 0.5), record(100, 1, Method::Ridge, 1.0)];
        match pairwise_difference_table(&recs, "f1", (Method::Lasso, Method::Ridge)) {
            Err(Error::IncompletePair { missing }) => {
                assert_eq!(missing.len(), 1);
                assert!(missing[0].contains("seed=0") && missing[0].contains("ridge"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn single_method_store_gives_empty_table() {
        let recs = vec![record(100, 0, Method::Lasso, 0.5)];
        let t = effect_table(&recs, "f1", None, 3).unwrap();
        assert!(t.main.is_empty());
        assert_eq!(t.notes.len(), 1);
    }

    #[test]
    fn f1_never_pairs_post_lasso() {
        assert!(default_pairs("f1").iter().all(|p| p.0 != Method::PostLassoOls && p.1 != Method::PostLassoOls));
        assert_eq!(default_pairs("rmse_test").len(), 6);
    }
}
