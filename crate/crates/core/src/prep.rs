//! Min-Max normalisation, Safe-signal inversion and attribute merging.

use crate::error::{Error, Result};
use crate::ingest::{Columns, ResampledTable};

/// Columns mapped onto `[0, 1]`, each with the range it was scaled from.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalisedTable {
    pub source_seconds: Vec<i64>,
    pub columns: Columns,
    ranges: Vec<(f64, f64)>,
}

impl NormalisedTable {
    /// Normalises every column of `table`. Any constant column is an error.
    pub fn from_resampled(table: &ResampledTable) -> Result<Self> {
        let mut names = Vec::new();
        let mut data = Vec::new();
        let mut ranges = Vec::new();
        for (name, values) in table.columns.iter() {
            let (norm, range) = min_max_normalise(values)
                .map_err(|e| rename_degenerate(e, name))?;
            names.push(name.to_string());
            data.push(norm);
            ranges.push(range);
        }
        Ok(NormalisedTable {
            source_seconds: table.source_seconds.clone(),
            columns: Columns::new(names, data)?,
            ranges,
        })
    }

    pub fn len(&self) -> usize {
        self.source_seconds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source_seconds.is_empty()
    }

    /// `(original_min, original_max)` the column was scaled from.
    pub fn range(&self, name: &str) -> Result<(f64, f64)> {
        self.columns
            .index_of(name)
            .map(|i| self.ranges[i])
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// Drops a column, e.g. the marker once segmentation is done.
    pub fn remove(&mut self, name: &str) -> Result<Vec<f64>> {
        let i = self
            .columns
            .index_of(name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))?;
        self.ranges.remove(i);
        self.columns.remove(name)
    }

    /// Replaces `a` and `b` with their element-wise mean, re-normalised, under
    /// `new_name` at the position `a` occupied.
    pub fn merge(&mut self, a: &str, b: &str, new_name: &str) -> Result<()> {
        if a == b {
            return Err(Error::InvalidArgument(format!("cannot merge `{a}` with itself")));
        }
        let merged = merge_columns(self.columns.get(a)?, self.columns.get(b)?)?;
        let (norm, range) =
            min_max_normalise(&merged).map_err(|e| rename_degenerate(e, new_name))?;
        if new_name != a && new_name != b && self.columns.index_of(new_name).is_some() {
            return Err(Error::Schema(format!("duplicate column name `{new_name}`")));
        }

        let ia = self.columns.index_of(a).expect("checked above");
        self.columns.replace(a, norm)?;
        self.ranges[ia] = range;
        self.remove(b)?;
        if new_name != a {
            // Rebuild to rename in place.
            let names: Vec<String> = self
                .columns
                .names()
                .iter()
                .map(|n| if n == a { new_name.to_string() } else { n.clone() })
                .collect();
            let data = (0..self.columns.width())
                .map(|i| self.columns.column(i).to_vec())
                .collect();
            self.columns = Columns::new(names, data)?;
        }
        Ok(())
    }
}

fn rename_degenerate(e: Error, name: &str) -> Error {
    match e {
        Error::DegenerateColumn(_) => Error::DegenerateColumn(name.to_string()),
        other => other,
    }
}

/// `(v - min) / (max - min)` for every value, plus the `(min, max)` used.
pub fn min_max_normalise(values: &[f64]) -> Result<(Vec<f64>, (f64, f64))> {
    if values.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} values, need at least 2",
            values.len()
        )));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > min) {
        return Err(Error::DegenerateColumn(String::new()));
    }
    let span = max - min;
    Ok((values.iter().map(|v| (v - min) / span).collect(), (min, max)))
}

pub fn invert(values: &[f64]) -> Vec<f64> {
    values.iter().map(|v| 1.0 - v).collect()
}

pub fn merge_columns(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(format!(
            "cannot merge columns of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalise_examples() {
        assert_eq!(min_max_normalise(&[5.0, 10.0, 15.0]).unwrap().0, vec![0.0, 0.5, 1.0]);
        let (n, r) = min_max_normalise(&[-10.0, 0.0, 4.03]).unwrap();
        assert_eq!((n[0], n[2]), (0.0, 1.0));
        assert_eq!(r, (-10.0, 4.03));
        assert!(matches!(
            min_max_normalise(&[3.0, 3.0, 3.0]),
            Err(Error::DegenerateColumn(_))
        ));
    }

    #[test]
    fn invert_examples() {
        let v = invert(&[0.0, 0.3, 1.0]);
        assert_eq!(v[0], 1.0);
        assert!((v[1] - 0.7).abs() < 1e-15);
        assert_eq!(v[2], 0.0);
        assert_eq!(invert(&[0.0; 3]), vec![1.0; 3]);
    }

    #[test]
    fn merge_examples() {
        let m = merge_columns(&[0.2, 0.4], &[0.4, 0.6]).unwrap();
        assert!((m[0] - 0.3).abs() < 1e-15 && (m[1] - 0.5).abs() < 1e-15);
        assert!(merge_columns(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn table_merge_replaces_pair() {
        let cols = Columns::new(
            vec!["foot GSR".into(), "hand GSR".into(), "HR".into()],
            vec![vec![0.0, 1.0, 4.0], vec![0.0, 3.0, 2.0], vec![1.0, 2.0, 3.0]],
        )
        .unwrap();
        let rt = ResampledTable {
            source_seconds: vec![0, 1, 2],
            columns: cols,
        };
        let mut t = NormalisedTable::from_resampled(&rt).unwrap();
        t.merge("foot GSR", "hand GSR", "GSR").unwrap();
        assert_eq!(t.columns.names(), &["GSR".to_string(), "HR".to_string()]);
        let g = t.columns.get("GSR").unwrap();
        // mean of [0,.25,1] and [0,1,2/3] = [0,.625,.8333], renormalised
        assert_eq!(g[0], 0.0);
        assert!((g[1] - 0.625 / (5.0 / 6.0)).abs() < 1e-12);
        assert_eq!(g[2], 1.0);
    }

    #[test]
    fn constant_column_reported_by_name() {
        let rt = ResampledTable {
            source_seconds: vec![0, 1],
            columns: Columns::new(vec!["flat".into()], vec![vec![2.0, 2.0]]).unwrap(),
        };
        match NormalisedTable::from_resampled(&rt) {
            Err(Error::DegenerateColumn(n)) => assert_eq!(n, "flat"),
            other => panic!("{other:?}"),
        }
    }

    proptest! {
        #[test]
        fn normalise_is_affine_invariant(
            xs in prop::collection::vec(-1e3f64..1e3, 2..40),
            alpha in 0.01f64..100.0,
            beta in -1e3f64..1e3,
        ) {
            let ys: Vec<f64> = xs.iter().map(|x| alpha * x + beta).collect();
            match (min_max_normalise(&xs), min_max_normalise(&ys)) {
                (Ok((a, _)), Ok((b, _))) => {
                    for (p, q) in a.iter().zip(&b) {
                        prop_assert!((p - q).abs() < 1e-9);
                    }
                }
                (Err(_), Err(_)) => {}
                // near-constant input can become exactly constant after scaling
                _ => {}
            }
        }

        #[test]
        fn normalised_values_hit_endpoints(xs in prop::collection::vec(-1e6f64..1e6, 2..40)) {
            if let Ok((n, _)) = min_max_normalise(&xs) {
                prop_assert!(n.iter().all(|v| (0.0..=1.0).contains(v)));
                prop_assert!(n.contains(&0.0));
                prop_assert!(n.contains(&1.0));
            }
        }

        #[test]
        fn merge_stays_between_inputs(
            pairs in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..40)
        ) {
            let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let m = merge_columns(&a, &b).unwrap();
            for i in 0..m.len() {
                prop_assert!(m[i] >= a[i].min(b[i]) && m[i] <= a[i].max(b[i]));
            }
            prop_assert_eq!(merge_columns(&a, &a).unwrap(), a.clone());
        }

        #[test]
        fn invert_is_an_involution(a in prop::collection::vec(0.0f64..=1.0, 1..40)) {
            let back = invert(&invert(&a));
            for (x, y) in a.iter().zip(&back) {
                prop_assert!((x - y).abs() <= 1e-15);
            }
            prop_assert!(invert(&a).iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}
