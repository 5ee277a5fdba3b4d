//! Switch error statistics per approach.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use statrs::statistics::Statistics;

use crate::error::{Error, Result};

use super::config::Approach;
use super::csv::SWITCH_HEADER;

/// Statistics of `|error|` for one approach.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproachSummary {
    pub approach: String,
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation (n − 1); 0 for a single value.
    pub std: f64,
    pub q05: f64,
    pub q25: f64,
    pub q75: f64,
    pub q95: f64,
}

/// Median `|error|` of MDTS over that of another approach.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub baseline: String,
    pub mdts_median: f64,
    pub baseline_median: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub approaches: Vec<ApproachSummary>,
    pub comparisons: Vec<Comparison>,
}

impl Summary {
    pub fn get(&self, approach: &str) -> Option<&ApproachSummary> {
        self.approaches.iter().find(|s| s.approach == approach)
    }
}

/// Quantile of sorted data by linear interpolation between order statistics
/// (`h = (n − 1)·p`).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn approach_order(name: &str) -> (usize, String) {
    let rank = name
        .parse::<Approach>()
        .map(|a| a as usize)
        .unwrap_or(Approach::ALL.len());
    (rank, name.to_string())
}

/// Summarise `(approach, error)` pairs.
pub fn summarize<'a, I>(errors: I) -> Result<Summary>
where
    I: IntoIterator<Item = (&'a str, f64)>,
{
    let mut groups: BTreeMap<(usize, String), Vec<f64>> = BTreeMap::new();
    for (approach, e) in errors {
        groups.entry(approach_order(approach)).or_default().push(e.abs());
    }
    if groups.is_empty() {
        return Err(Error::EmptyInput("summarize"));
    }
    let approaches: Vec<ApproachSummary> = groups
        .into_iter()
        .map(|((_, approach), mut v)| {
            v.sort_by(f64::total_cmp);
            let std = if v.len() > 1 { v.iter().std_dev() } else { 0.0 };
            ApproachSummary {
                approach,
                count: v.len(),
                mean: v.iter().mean(),
                median: quantile_sorted(&v, 0.5),
                std,
                q05: quantile_sorted(&v, 0.05),
                q25: quantile_sorted(&v, 0.25),
                q75: quantile_sorted(&v, 0.75),
                q95: quantile_sorted(&v, 0.95),
            }
        })
        .collect();

    let median = |name: &str| approaches.iter().find(|s| s.approach == name).map(|s| s.median);
    let comparisons = match median("MDTS") {
        Some(m) => ["UAPT", "UADT"]
            .into_iter()
            .filter_map(|b| {
                median(b).map(|bm| Comparison {
                    baseline: b.to_string(),
                    mdts_median: m,
                    baseline_median: bm,
                    ratio: m / bm,
                })
            })
            .collect(),
        None => Vec::new(),
    };
    Ok(Summary {
        approaches,
        comparisons,
    })
}

/// Read a switch error CSV and summarise it.
pub fn summarize_file(path: impl AsRef<Path>) -> Result<Summary> {
    let path = path.as_ref();
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| parse_err(0, e.to_string()))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.join(",") != SWITCH_HEADER {
        return Err(parse_err(1, format!("expected header `{SWITCH_HEADER}`")));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| parse_err(line, e.to_string()))?;
        let error: f64 = record[5]
            .parse()
            .map_err(|_| parse_err(line, format!("bad error_c `{}`", &record[5])))?;
        rows.push((record[1].to_string(), error));
    }
    summarize(rows.iter().map(|(a, e)| (a.as_str(), *e)))
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<8} {:>6} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
            "approach", "count", "mean", "median", "std", "q05", "q25", "q75", "q95"
        )?;
        for s in &self.approaches {
            writeln!(
                f,
                "{:<8} {:>6} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
                s.approach, s.count, s.mean, s.median, s.std, s.q05, s.q25, s.q75, s.q95
            )?;
        }
        for c in &self.comparisons {
            writeln!(
                f,
                "MDTS vs {:<5} median |error| {:.6} vs {:.6}, ratio {:.4}",
                c.baseline, c.mdts_median, c.baseline_median, c.ratio
            )?;
        }
        Ok(())
    }
}
