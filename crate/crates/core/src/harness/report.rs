//! Quartile tables and per-metric rankings over campaign records.

use super::{CampaignRecord, HarnessError};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::Write;

/// Which median wins a ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Lower,
    Higher,
    /// Smallest non-negative value first, then negatives nearest zero.
    ClosestNonNegative,
}

impl Direction {
    fn compare(self, a: f64, b: f64) -> Ordering {
        match self {
            Direction::Lower => a.total_cmp(&b),
            Direction::Higher => b.total_cmp(&a),
            Direction::ClosestNonNegative => {
                let key = |x: f64| (x < 0.0, x.abs());
                let (ka, kb) = (key(a), key(b));
                ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
            }
        }
    }
}

#[derive(Clone, Copy)]
pub struct Metric {
    pub name: &'static str,
    pub direction: Direction,
    pub value: fn(&CampaignRecord) -> Option<f64>,
}

pub const METRICS: [Metric; 9] = [
    Metric { name: "compute_time", direction: Direction::Lower, value: |r| Some(r.compute_time) },
    Metric { name: "planner_calls", direction: Direction::Lower, value: |r| Some(r.planner_calls as f64) },
    Metric { name: "route_time", direction: Direction::Higher, value: |r| Some(r.route_time) },
    Metric { name: "total_weight", direction: Direction::Higher, value: |r| Some(r.total_weight) },
    Metric { name: "completed_tasks", direction: Direction::Higher, value: |r| Some(r.completed_tasks as f64) },
    Metric { name: "route_cost", direction: Direction::Lower, value: |r| r.route_cost },
    Metric { name: "route_violation", direction: Direction::Lower, value: |r| Some(r.route_violation) },
    Metric { name: "total_cost", direction: Direction::Lower, value: |r| Some(r.total_cost) },
    Metric { name: "residual_time", direction: Direction::ClosestNonNegative, value: |r| Some(r.residual_time) },
];

/// Five-number summary with Tukey 1.5 IQR whiskers. Quartiles interpolate
/// linearly between order statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: usize,
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn quartiles(values: &[f64]) -> Option<Quartiles> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let q1 = quantile(&v, 0.25);
    let q3 = quantile(&v, 0.75);
    let iqr = q3 - q1;
    let (fence_lo, fence_hi) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside: Vec<f64> = v.iter().copied().filter(|x| (fence_lo..=fence_hi).contains(x)).collect();
    Some(Quartiles {
        count: v.len(),
        min: v[0],
        q1,
        median: quantile(&v, 0.5),
        q3,
        max: v[v.len() - 1],
        whisker_low: inside.first().copied().unwrap_or(q1),
        whisker_high: inside.last().copied().unwrap_or(q3),
        outliers: v.len() - inside.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub group_kind: String,
    pub group: String,
    pub metric: String,
    #[serde(flatten)]
    pub stats: Quartiles,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub group_kind: String,
    pub metric: String,
    pub rank: usize,
    pub group: String,
    pub median: f64,
    /// Shares its median with another group; order among ties is alphabetical.
    pub tied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub summary: Vec<SummaryRow>,
    pub rankings: Vec<RankRow>,
}

/// Orders `(group, median)` pairs best first. Returns `(group, median, tied)`.
pub fn rank_groups(direction: Direction, groups: &[(String, f64)]) -> Vec<(String, f64, bool)> {
    let mut g = groups.to_vec();
    g.sort_by(|a, b| direction.compare(a.1, b.1).then_with(|| a.0.cmp(&b.0)));
    let tied = |i: usize| {
        let same = |j: usize| direction.compare(g[i].1, g[j].1) == Ordering::Equal;
        (i > 0 && same(i - 1)) || (i + 1 < g.len() && same(i + 1))
    };
    (0..g.len()).map(|i| (g[i].0.clone(), g[i].1, tied(i))).collect()
}

type GroupKey = fn(&CampaignRecord) -> String;

const GROUPINGS: [(&str, GroupKey); 3] = [
    ("tamp", |r| r.tamp.clone()),
    ("opp", |r| r.opp.clone()),
    ("pair", |r| format!("{}+{}", r.tamp, r.opp)),
];

/// Per-metric quartiles for each route planner, path planner and pair, plus
/// best-to-worst rankings by median. Setup errors are left out.
pub fn summarize(records: &[CampaignRecord]) -> Result<Report, HarnessError> {
    let usable: Vec<&CampaignRecord> = records.iter().filter(|r| !r.is_error()).collect();
    if usable.is_empty() {
        return Err(HarnessError::EmptyCampaign);
    }
    let mut summary = Vec::new();
    let mut rankings = Vec::new();
    for (kind, key) in GROUPINGS {
        let mut groups: BTreeMap<String, Vec<&CampaignRecord>> = BTreeMap::new();
        for r in &usable {
            groups.entry(key(r)).or_default().push(r);
        }
        for m in METRICS {
            let mut medians = Vec::new();
            for (name, rs) in &groups {
                let values: Vec<f64> = rs.iter().filter_map(|r| (m.value)(r)).collect();
                if let Some(stats) = quartiles(&values) {
                    medians.push((name.clone(), stats.median));
                    summary.push(SummaryRow { group_kind: kind.into(), group: name.clone(), metric: m.name.into(), stats });
                }
            }
            for (i, (group, median, tied)) in rank_groups(m.direction, &medians).into_iter().enumerate() {
                rankings.push(RankRow { group_kind: kind.into(), metric: m.name.into(), rank: i + 1, group, median, tied });
            }
        }
    }
    Ok(Report { summary, rankings })
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "group_kind", "group", "metric", "count", "min", "q1", "median", "q3", "max", "whisker_low", "whisker_high",
        "outliers",
    ])?;
    for r in rows {
        let q = &r.stats;
        let mut rec = vec![r.group_kind.clone(), r.group.clone(), r.metric.clone(), q.count.to_string()];
        rec.extend([q.min, q.q1, q.median, q.q3, q.max, q.whisker_low, q.whisker_high].map(|v| v.to_string()));
        rec.push(q.outliers.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rankings<W: Write>(rows: &[RankRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
