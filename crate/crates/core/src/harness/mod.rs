//! Scenario files, Monte Carlo campaigns and their reports.

mod campaign;
mod report;
mod scenario;

pub use campaign::{
    campaign_pairs, read_records, run_campaign, run_single, write_records, write_timings, Campaign, CampaignRecord,
    CampaignSpec, TimingRecord,
};
pub use report::{
    quartiles, rank_groups, summarize, write_rankings, write_summary, Direction, Metric, Quartiles, RankRow,
    Report, SummaryRow, METRICS,
};
pub use scenario::{
    is_open_water, open_water_terrain, CurrentSnapshot, Preset, Scenario, TaskParams, NODE_COUNT_RANGE,
    SCENARIO_VERSION,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {message}")]
    Field { path: String, message: String },
    #[error("malformed file: {0}")]
    Format(String),
    #[error("campaign has no records")]
    EmptyCampaign,
    #[error(transparent)]
    Terrain(#[from] crate::terrain::TerrainError),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error(transparent)]
    Executive(#[from] crate::executive::ExecutiveError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
