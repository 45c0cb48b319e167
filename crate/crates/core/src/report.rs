//! Hit-log parsing and report generation: per-N divisor lists, the
//! least-divisor-per-N sequence in ascending order of `p`, and
//! `(rank, log p)` rows for plotting the superexponential growth of the
//! least divisors.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::search::{Hit, HIT_CSV_HEADER};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReportRow {
    pub p: u64,
    pub n: u32,
    pub log_p: f64,
    pub discovery_rank: usize,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    /// Divisors per N, ascending.
    pub per_n: BTreeMap<u32, Vec<u64>>,
    /// Least divisor for each N, sorted by (p, N); rank is 1-based.
    pub least_divisors: Vec<ReportRow>,
}

/// Parse a `p,N,m` hit log (header optional on the first line).
pub fn parse_hits_csv(text: &str, path: &str) -> Result<Vec<Hit>> {
    let mut hits = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || (i == 0 && line == HIT_CSV_HEADER) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::FileParse {
                path: path.to_string(),
                line: i + 1,
                reason: format!("expected 3 comma-separated fields, got {}", fields.len()),
            });
        }
        let parse_err = |what: &str, value: &str| Error::FileParse {
            path: path.to_string(),
            line: i + 1,
            reason: format!("invalid {what} value {value:?}"),
        };
        let p: u64 = fields[0].parse().map_err(|_| parse_err("p", fields[0]))?;
        let n: u32 = fields[1].parse().map_err(|_| parse_err("N", fields[1]))?;
        let m: u64 = fields[2].parse().map_err(|_| parse_err("m", fields[2]))?;
        hits.push(Hit { p, n, m });
    }
    Ok(hits)
}

pub fn build_report(hits: &[Hit]) -> Report {
    let mut per_n: BTreeMap<u32, Vec<u64>> = BTreeMap::new();
    for hit in hits {
        per_n.entry(hit.n).or_default().push(hit.p);
    }
    for ps in per_n.values_mut() {
        ps.sort_unstable();
        ps.dedup();
    }
    let mut least: Vec<(u64, u32)> = per_n.iter().map(|(&n, ps)| (ps[0], n)).collect();
    least.sort_unstable();
    let least_divisors = least
        .into_iter()
        .enumerate()
        .map(|(i, (p, n))| ReportRow {
            p,
            n,
            log_p: (p as f64).ln(),
            discovery_rank: i + 1,
        })
        .collect();
    Report {
        per_n,
        least_divisors,
    }
}

/// `(rank, log p)` rows for the least-divisor sequence.
pub fn figure_data(report: &Report) -> Vec<(usize, f64)> {
    report
        .least_divisors
        .iter()
        .map(|row| (row.discovery_rank, row.log_p))
        .collect()
}
