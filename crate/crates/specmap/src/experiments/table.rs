//! Append-only result rows with provenance.

use std::path::Path;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub parameter: String,
    pub metric: String,
    pub value: f64,
    pub seed: u64,
    pub config_hash: String,
}

/// Rows of `(experiment, parameter, metric, value, seed)`, each stamped with
/// the config hash that produced it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(
        &mut self,
        experiment: &str,
        parameter: String,
        metric: &str,
        value: f64,
        seed: u64,
        config_hash: &str,
    ) {
        self.rows.push(ResultRow {
            experiment: experiment.to_string(),
            parameter,
            metric: metric.to_string(),
            value,
            seed,
            config_hash: config_hash.to_string(),
        });
    }

    pub fn rows(&self) -> &[ResultRow] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Values of every row matching `metric` (and `parameter`, when given).
    pub fn values(&self, metric: &str, parameter: Option<&str>) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.metric == metric && parameter.is_none_or(|p| r.parameter == p))
            .map(|r| r.value)
            .collect()
    }

    /// Deterministic CSV rendering; float values use the shortest
    /// round-trippable form.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("experiment,parameter,metric,value,seed,config_hash\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.experiment, r.parameter, r.metric, r.value, r.seed, r.config_hash
            ));
        }
        out
    }

    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }
}

/// Median of a sample; used when aggregating per-seed rows.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty sample");
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}
