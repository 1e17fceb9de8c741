//! Stretch reports: per-pair rows, complementary stretch CDFs and summary
//! statistics, with deterministic CSV emission.
//!
//! Per-pair CSV columns: `scheme,seed,u,v,d,estimate,stretch,branch,via,probes`
//! with rows ordered by (scheme, seed, pair). Floats print in Rust's
//! shortest round-trip form, so a rerun with identical seeds is
//! byte-identical and a loaded CSV reproduces the summary exactly.

use std::fmt::Write as _;

use thiserror::Error;
use vicinity::graph::NodeId;

/// Relative slack for calling an estimate exact; covers cross-order float
/// summation, which is the only divergence the algorithms can produce.
pub const EXACTNESS_REL_TOL: f64 = 1e-9;

/// Complementary-CDF thresholds: 1.00, 1.05, .., 3.00.
pub fn cdf_thresholds() -> Vec<f64> {
    (0..=40).map(|i| 1.0 + 0.05 * i as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairRow {
    pub seed: u64,
    pub u: NodeId,
    pub v: NodeId,
    pub d: f64,
    pub estimate: f64,
    pub stretch: f64,
    pub branch: String,
    pub via: Option<NodeId>,
    pub probes: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub pairs: u64,
    pub fraction_exact: f64,
    pub mean_stretch: f64,
    pub max_stretch: f64,
    /// Fraction of (sub-sampled) pairs whose vicinities intersect; absent
    /// for schemes without vicinities.
    pub fraction_vicinity_intersect: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct StretchReport {
    pub scheme: String,
    /// Present only when row collection was requested.
    pub rows: Vec<PairRow>,
    /// `(threshold, fraction of pairs with stretch strictly above it)`.
    pub cdf: Vec<(f64, f64)>,
    pub summary: Summary,
    /// Pairs that violated the scheme's proven bound during self-check.
    pub bound_violations: u64,
}

/// Streaming accumulator so large experiments never hold per-pair rows
/// unless asked to.
#[derive(Debug)]
pub struct ReportAccumulator {
    scheme: String,
    thresholds: Vec<f64>,
    above: Vec<u64>,
    pairs: u64,
    exact: u64,
    stretch_sum: f64,
    stretch_max: f64,
    vic_checked: u64,
    vic_hits: u64,
    has_vicinity: bool,
    rows: Option<Vec<PairRow>>,
    violations: u64,
}

impl ReportAccumulator {
    pub fn new(scheme: &str, collect_rows: bool, has_vicinity: bool) -> Self {
        let thresholds = cdf_thresholds();
        ReportAccumulator {
            scheme: scheme.to_string(),
            above: vec![0; thresholds.len()],
            thresholds,
            pairs: 0,
            exact: 0,
            stretch_sum: 0.0,
            stretch_max: 0.0,
            vic_checked: 0,
            vic_hits: 0,
            has_vicinity,
            rows: collect_rows.then(Vec::new),
            violations: 0,
        }
    }

    pub fn record(&mut self, row: PairRow, bound_violated: bool) {
        self.pairs += 1;
        if row.estimate <= row.d * (1.0 + EXACTNESS_REL_TOL) {
            self.exact += 1;
        }
        self.stretch_sum += row.stretch;
        self.stretch_max = self.stretch_max.max(row.stretch);
        for (i, &t) in self.thresholds.iter().enumerate() {
            if row.stretch > t {
                self.above[i] += 1;
            }
        }
        if bound_violated {
            self.violations += 1;
        }
        if let Some(rows) = &mut self.rows {
            rows.push(row);
        }
    }

    pub fn record_vicinity_check(&mut self, intersected: bool) {
        self.vic_checked += 1;
        if intersected {
            self.vic_hits += 1;
        }
    }

    pub fn finish(self) -> StretchReport {
        let pairs = self.pairs.max(1) as f64;
        let cdf = self
            .thresholds
            .iter()
            .zip(&self.above)
            .map(|(&t, &c)| (t, if self.pairs == 0 { 0.0 } else { c as f64 / pairs }))
            .collect();
        StretchReport {
            scheme: self.scheme,
            rows: self.rows.unwrap_or_default(),
            cdf,
            summary: Summary {
                pairs: self.pairs,
                fraction_exact: if self.pairs == 0 { 0.0 } else { self.exact as f64 / pairs },
                mean_stretch: if self.pairs == 0 { 0.0 } else { self.stretch_sum / pairs },
                max_stretch: self.stretch_max,
                fraction_vicinity_intersect: (self.has_vicinity && self.vic_checked > 0)
                    .then(|| self.vic_hits as f64 / self.vic_checked as f64),
            },
            bound_violations: self.violations,
        }
    }
}

pub const PAIR_CSV_HEADER: &str = "scheme,seed,u,v,d,estimate,stretch,branch,via,probes";

/// Per-pair rows of several reports as one CSV document.
pub fn pairs_to_csv(reports: &[StretchReport]) -> String {
    let mut out = String::new();
    out.push_str(PAIR_CSV_HEADER);
    out.push('\n');
    for rep in reports {
        for r in &rep.rows {
            let via = r.via.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                rep.scheme, r.seed, r.u, r.v, r.d, r.estimate, r.stretch, r.branch, via, r.probes
            );
        }
    }
    out
}

/// CDF tables of several reports: `scheme,threshold,fraction_above`.
pub fn cdf_to_csv(reports: &[StretchReport]) -> String {
    let mut out = String::from("scheme,threshold,fraction_above\n");
    for rep in reports {
        for &(t, f) in &rep.cdf {
            let _ = writeln!(out, "{},{:.2},{}", rep.scheme, t, f);
        }
    }
    out
}

/// Human-readable summary, one line per scheme.
pub fn summary_text(reports: &[StretchReport]) -> String {
    let mut out = String::new();
    for rep in reports {
        let s = &rep.summary;
        let vic = s
            .fraction_vicinity_intersect
            .map(|f| format!("{f:.6}"))
            .unwrap_or_else(|| "n/a".to_string());
        let _ = writeln!(
            out,
            "scheme={} pairs={} fraction_exact={:.6} mean_stretch={:.6} max_stretch={:.6} \
             fraction_vicinity_intersect={} bound_violations={}",
            rep.scheme, s.pairs, s.fraction_exact, s.mean_stretch, s.max_stretch, vic,
            rep.bound_violations
        );
    }
    out
}

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("csv line {line}: {msg}")]
    Malformed { line: usize, msg: String },
}

/// Loads per-pair rows back from CSV, grouped by scheme in file order.
pub fn pairs_from_csv(text: &str) -> Result<Vec<(String, Vec<PairRow>)>, CsvError> {
    let mut groups: Vec<(String, Vec<PairRow>)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            if line != PAIR_CSV_HEADER {
                return Err(CsvError::Malformed { line: 1, msg: "bad header".into() });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(CsvError::Malformed { line: lineno, msg: "expected 10 fields".into() });
        }
        let parse_err = |msg: &str| CsvError::Malformed { line: lineno, msg: msg.into() };
        let row = PairRow {
            seed: f[1].parse().map_err(|_| parse_err("seed"))?,
            u: f[2].parse().map_err(|_| parse_err("u"))?,
            v: f[3].parse().map_err(|_| parse_err("v"))?,
            d: f[4].parse().map_err(|_| parse_err("d"))?,
            estimate: f[5].parse().map_err(|_| parse_err("estimate"))?,
            stretch: f[6].parse().map_err(|_| parse_err("stretch"))?,
            branch: f[7].to_string(),
            via: if f[8].is_empty() {
                None
            } else {
                Some(f[8].parse().map_err(|_| parse_err("via"))?)
            },
            probes: f[9].parse().map_err(|_| parse_err("probes"))?,
        };
        match groups.last_mut() {
            Some((scheme, rows)) if scheme == f[0] => rows.push(row),
            _ => groups.push((f[0].to_string(), vec![row])),
        }
    }
    Ok(groups)
}

/// Recomputes a summary from loaded rows (round-trip check support).
pub fn summarize_rows(scheme: &str, rows: &[PairRow]) -> StretchReport {
    let mut acc = ReportAccumulator::new(scheme, false, false);
    for r in rows {
        acc.record(r.clone(), false);
    }
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(stretch: f64) -> PairRow {
        PairRow {
            seed: 1,
            u: 0,
            v: 1,
            d: 2.0,
            estimate: 2.0 * stretch,
            stretch,
            branch: "direct_vicinity".into(),
            via: None,
            probes: 3,
        }
    }

    #[test]
    fn single_exact_pair_has_zero_complementary_mass() {
        let mut acc = ReportAccumulator::new("rear", true, true);
        acc.record(row(1.0), false);
        let rep = acc.finish();
        assert_eq!(rep.cdf[0], (1.0, 0.0));
        assert_eq!(rep.summary.fraction_exact, 1.0);
        assert!(rep.cdf.windows(2).all(|w| w[0].1 >= w[1].1));
    }

    #[test]
    fn csv_round_trip_reproduces_summary() {
        let mut acc = ReportAccumulator::new("rear", true, false);
        for s in [1.0, 1.25, 1.5, 2.0] {
            acc.record(row(s), false);
        }
        let rep = acc.finish();
        let csv = pairs_to_csv(std::slice::from_ref(&rep));
        let groups = pairs_from_csv(&csv).unwrap();
        assert_eq!(groups.len(), 1);
        let back = summarize_rows("rear", &groups[0].1);
        assert_eq!(back.summary, rep.summary);
        assert_eq!(back.cdf, rep.cdf);
    }

    #[test]
    fn summary_text_shape() {
        let mut acc = ReportAccumulator::new("tz", false, false);
        acc.record(row(1.5), false);
        let text = summary_text(&[acc.finish()]);
        assert!(text.starts_with("scheme=tz pairs=1 "));
        assert!(text.contains("fraction_vicinity_intersect=n/a"));
    }

    #[test]
    fn empty_scheme_list_is_empty_document() {
        assert_eq!(pairs_to_csv(&[]), format!("{PAIR_CSV_HEADER}\n"));
        assert_eq!(summary_text(&[]), "");
    }
}
