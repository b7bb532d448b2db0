use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Float;

/// One-way sums of squares behind an omega-squared value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnovaDecomposition<F> {
    pub ss_effect: F,
    pub ss_total: F,
    pub ms_error: F,
    pub df_effect: usize,
    pub n_total: usize,
    pub group_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaSquared<F> {
    pub decomposition: AnovaDecomposition<F>,
    pub omega2: F,
    /// Reported as computed; small negative values mean "no effect".
    pub negative: bool,
    /// Every value identical, so omega-squared is 0/0 and reported as 0.
    pub degenerate: bool,
}

fn group_indices<L: Ord + Clone>(labels: &[L]) -> BTreeMap<L, Vec<usize>> {
    let mut groups: BTreeMap<L, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        groups.entry(l.clone()).or_default().push(i);
    }
    groups
}

/// `(SS_effect - df_effect MS_error) / (SS_total + MS_error)` for `values`
/// grouped by `groups`.
pub fn omega_squared<F: Float, L: Ord + Clone>(values: &[F], groups: &[L]) -> Result<OmegaSquared<F>> {
    if values.len() != groups.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} values but {} group labels",
            values.len(),
            groups.len()
        )));
    }
    let by_group = group_indices(groups);
    let k = by_group.len();
    if k < 2 {
        return Err(Error::InvalidGrouping(format!("need at least 2 groups, got {k}")));
    }
    if let Some(small) = by_group.values().find(|g| g.len() < 2) {
        return Err(Error::InvalidGrouping(format!("a group has only {} value(s)", small.len())));
    }
    let n = values.len();
    let grand = values.iter().copied().sum::<F>() / F::from_count(n);
    let ss_total: F = values.iter().map(|&v| (v - grand) * (v - grand)).sum();
    let mut ss_effect = F::zero();
    let mut ss_within = F::zero();
    for idx in by_group.values() {
        let m = F::from_count(idx.len());
        let mean = idx.iter().map(|&i| values[i]).sum::<F>() / m;
        ss_effect += m * (mean - grand) * (mean - grand);
        ss_within += idx.iter().map(|&i| (values[i] - mean) * (values[i] - mean)).sum::<F>();
    }
    let ms_error = ss_within / F::from_count(n - k);
    let df_effect = k - 1;
    let num = ss_effect - F::from_count(df_effect) * ms_error;
    let den = ss_total + ms_error;
    let (omega2, degenerate) = if den == F::zero() { (F::zero(), true) } else { (num / den, false) };
    Ok(OmegaSquared {
        decomposition: AnovaDecomposition { ss_effect, ss_total, ms_error, df_effect, n_total: n, group_count: k },
        omega2,
        negative: omega2 < F::zero(),
        degenerate,
    })
}

/// Interaction term of a balanced two-way ANOVA.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionF<F> {
    pub f: F,
    /// `SS_interaction / SS_total`.
    pub eta2: F,
    pub ss_interaction: F,
    pub ss_error: F,
    pub ss_total: F,
    pub df_interaction: usize,
    pub df_error: usize,
    /// No within-cell variation: `f` is 0 or infinite by convention.
    pub degenerate: bool,
}

/// Interaction F statistic of a balanced design (equal count, at least 2,
/// in every cell of the `factor_a x factor_b` table).
pub fn two_way_interaction_f<F: Float, A: Ord + Clone, B: Ord + Clone>(
    values: &[F],
    factor_a: &[A],
    factor_b: &[B],
) -> Result<InteractionF<F>> {
    if values.len() != factor_a.len() || values.len() != factor_b.len() {
        return Err(Error::DimensionMismatch("values and factor labels differ in length".into()));
    }
    let a_levels: Vec<A> = group_indices(factor_a).into_keys().collect();
    let b_levels: Vec<B> = group_indices(factor_b).into_keys().collect();
    let (ra, rb) = (a_levels.len(), b_levels.len());
    if ra < 2 || rb < 2 {
        return Err(Error::UnsupportedDesign(format!("need 2+ levels per factor, got {ra} x {rb}")));
    }
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); ra * rb];
    for i in 0..values.len() {
        let ia = a_levels.binary_search(&factor_a[i]).expect("level present");
        let ib = b_levels.binary_search(&factor_b[i]).expect("level present");
        cells[ia * rb + ib].push(i);
    }
    let m = cells[0].len();
    if cells.iter().any(|c| c.len() != m) {
        return Err(Error::UnsupportedDesign("unbalanced design: cell counts differ".into()));
    }
    if m < 2 {
        return Err(Error::UnsupportedDesign("need at least 2 observations per cell".into()));
    }
    let mf = F::from_count(m);
    let cell_mean: Vec<F> =
        cells.iter().map(|c| c.iter().map(|&i| values[i]).sum::<F>() / mf).collect();
    let row_mean: Vec<F> =
        (0..ra).map(|a| (0..rb).map(|b| cell_mean[a * rb + b]).sum::<F>() / F::from_count(rb)).collect();
    let col_mean: Vec<F> =
        (0..rb).map(|b| (0..ra).map(|a| cell_mean[a * rb + b]).sum::<F>() / F::from_count(ra)).collect();
    let grand = cell_mean.iter().copied().sum::<F>() / F::from_count(ra * rb);
    let mut ss_interaction = F::zero();
    let mut ss_error = F::zero();
    for a in 0..ra {
        for b in 0..rb {
            let cm = cell_mean[a * rb + b];
            let d = cm - row_mean[a] - col_mean[b] + grand;
            ss_interaction += mf * d * d;
            ss_error += cells[a * rb + b].iter().map(|&i| (values[i] - cm) * (values[i] - cm)).sum::<F>();
        }
    }
    let ss_total: F = values.iter().map(|&v| (v - grand) * (v - grand)).sum();
    let df_interaction = (ra - 1) * (rb - 1);
    let df_error = ra * rb * (m - 1);
    let ms_int = ss_interaction / F::from_count(df_interaction);
    let ms_err = ss_error / F::from_count(df_error);
    let tiny = F::cst(1e-12) * ss_total;
    let (f, degenerate) = if ms_err <= tiny || ms_err == F::zero() {
        (if ss_interaction <= tiny { F::zero() } else { F::infinity() }, true)
    } else {
        (ms_int / ms_err, false)
    };
    let eta2 = if ss_total > F::zero() { ss_interaction / ss_total } else { F::zero() };
    Ok(InteractionF { f, eta2, ss_interaction, ss_error, ss_total, df_interaction, df_error, degenerate })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EffectMagnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

impl fmt::Display for EffectMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EffectMagnitude::Negligible => "negligible",
            EffectMagnitude::Small => "small",
            EffectMagnitude::Medium => "medium",
            EffectMagnitude::Large => "large",
        })
    }
}

/// Conventional bands: below 0.01, 0.06 and 0.14.
pub fn classify_effect(omega2: f64) -> EffectMagnitude {
    if omega2 < 0.01 {
        EffectMagnitude::Negligible
    } else if omega2 < 0.06 {
        EffectMagnitude::Small
    } else if omega2 < 0.14 {
        EffectMagnitude::Medium
    } else {
        EffectMagnitude::Large
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_values_are_degenerate() {
        let r = omega_squared(&[2.0, 2.0, 2.0, 2.0], &[0, 0, 1, 1]).unwrap();
        assert_eq!(r.omega2, 0.0);
        assert!(r.degenerate);
        assert_eq!(r.decomposition.ss_effect, 0.0);
    }

    #[test]
    fn all_between_group() {
        let r = omega_squared(&[0.0f64, 0.0, 10.0, 10.0], &["a", "a", "b", "b"]).unwrap();
        assert_eq!(r.decomposition.ms_error, 0.0);
        assert!((r.omega2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grouping_errors() {
        assert!(matches!(omega_squared(&[1.0, 2.0], &[0, 0]), Err(Error::InvalidGrouping(_))));
        assert!(matches!(omega_squared(&[1.0, 2.0, 3.0], &[0, 0, 1]), Err(Error::InvalidGrouping(_))));
    }

    #[test]
    fn additive_design_has_no_interaction() {
        let mut v = Vec::new();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..2 {
            for j in 0..3 {
                for _ in 0..2 {
                    v.push(i as f64 * 2.0 + j as f64);
                    a.push(i);
                    b.push(j);
                }
            }
        }
        let r = two_way_interaction_f(&v, &a, &b).unwrap();
        assert!(r.ss_interaction.abs() < 1e-20);
        assert_eq!(r.f, 0.0);
    }

    #[test]
    fn crossed_means_blow_up() {
        let v = [0.0f64, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0];
        let a = [0, 0, 0, 0, 1, 1, 1, 1];
        let b = [0, 0, 1, 1, 0, 0, 1, 1];
        let r = two_way_interaction_f(&v, &a, &b).unwrap();
        assert!(r.f.is_infinite());
        assert!(r.degenerate);
    }

    #[test]
    fn unbalanced_rejected() {
        let v = [0.0, 1.0, 2.0, 3.0, 4.0];
        let a = [0, 0, 1, 1, 1];
        let b = [0, 1, 0, 1, 1];
        assert!(matches!(two_way_interaction_f(&v, &a, &b), Err(Error::UnsupportedDesign(_))));
    }

    #[test]
    fn bands() {
        assert_eq!(classify_effect(0.005), EffectMagnitude::Negligible);
        assert_eq!(classify_effect(0.01), EffectMagnitude::Small);
        assert_eq!(classify_effect(0.112), EffectMagnitude::Medium);
        assert_eq!(classify_effect(0.308), EffectMagnitude::Large);
        assert_eq!(classify_effect(-0.02), EffectMagnitude::Negligible);
    }
}
