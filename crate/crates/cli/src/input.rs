//! Readers for tables written by earlier commands.

use std::path::Path;

use cumuldyn::{BacklinkDistribution, Checkpoint, CumulativenessSeries, PathCounts, PathLengthDistribution};
use num_bigint::BigUint;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

fn read_rows<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::csv(path, e))?;
    reader
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| CliError::csv(path, e))
}

pub fn read_series(path: &Path) -> CliResult<CumulativenessSeries> {
    let rows: Vec<Checkpoint> = read_rows(path)?;
    Ok(CumulativenessSeries::new(rows)?)
}

#[derive(Deserialize)]
struct BacklinkRow {
    internal: u64,
}

/// Internal backward-link counts in node order, from `backlinks.csv`.
pub fn read_backlinks(path: &Path) -> CliResult<Vec<u64>> {
    Ok(read_rows::<BacklinkRow>(path)?.into_iter().map(|r| r.internal).collect())
}

#[derive(Deserialize)]
struct HistRow {
    n: usize,
    m: usize,
    count: u64,
}

/// Histogram rows of `backlinks_hist.csv` for prefix size `n`. `None` when
/// the file has no row for `n`.
pub fn read_backlink_hist(path: &Path, n: usize) -> CliResult<Option<BacklinkDistribution>> {
    let rows: Vec<HistRow> = read_rows(path)?;
    let mut counts = Vec::new();
    let mut found = false;
    for row in rows.into_iter().filter(|r| r.n == n) {
        found = true;
        if counts.len() <= row.m {
            counts.resize(row.m + 1, 0);
        }
        counts[row.m] += row.count;
    }
    Ok(found.then(|| BacklinkDistribution::from_counts(counts)))
}

/// Checkpoint sizes listed in `backlinks_hist.csv`.
pub fn hist_sizes(path: &Path) -> CliResult<Vec<usize>> {
    let mut sizes: Vec<usize> = read_rows::<HistRow>(path)?.into_iter().map(|r| r.n).collect();
    sizes.dedup();
    Ok(sizes)
}

#[derive(Deserialize)]
struct DistRow {
    k: usize,
    count: String,
}

/// A path-length distribution file `k,count,normalized`. Integer counts are
/// read exactly; any other count is read as a float.
pub fn read_distribution(path: &Path, n: usize) -> CliResult<PathLengthDistribution> {
    let rows: Vec<DistRow> = read_rows(path)?;
    let len = rows.iter().map(|r| r.k + 1).max().unwrap_or(0);
    let exact: Option<Vec<BigUint>> = rows.iter().map(|r| r.count.parse::<BigUint>().ok()).collect();
    let counts = match exact {
        Some(values) => {
            let mut v = vec![BigUint::default(); len];
            for (row, value) in rows.iter().zip(values) {
                v[row.k] = value;
            }
            PathCounts::Exact(v)
        }
        None => {
            let mut v = vec![f64::NEG_INFINITY; len];
            for row in &rows {
                let value: f64 = row.count.parse().map_err(|_| {
                    CliError::Usage(format!("{}: k={}: invalid count {:?}", path.display(), row.k, row.count))
                })?;
                if value.is_nan() || value < 0.0 {
                    return Err(CliError::Usage(format!("{}: k={}: negative count", path.display(), row.k)));
                }
                v[row.k] = value.ln();
            }
            PathCounts::Log(v)
        }
    };
    Ok(PathLengthDistribution::from_counts(n, counts))
}
