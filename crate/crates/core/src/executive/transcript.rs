use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Planner {
    Tamp,
    Opp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplanReason {
    /// The last leg overran its expected time beyond tolerance.
    Overrun,
    /// Remaining time no longer covers the rest of the route.
    Deficit,
}

/// One transcript line. `clock` is mission time in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    PlanStart { clock: f64, planner: Planner, from: usize, to: usize, budget: Option<f64> },
    PlanEnd { clock: f64, planner: Planner, compute: f64, ok: bool },
    LegStart { clock: f64, from: usize, to: usize, expected: f64, snapshot: usize },
    LegEnd { clock: f64, from: usize, to: usize, realized: f64, violation: f64 },
    ReplanTrigger { clock: f64, at: usize, reason: ReplanReason },
    SnapshotSwitch { clock: f64, snapshot: usize },
    MissionEnd { clock: f64, outcome: super::Outcome, residual: f64 },
}

pub fn write_transcript<W: Write>(events: &[Event], mut out: W) -> std::io::Result<()> {
    for e in events {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
