//! Operating environment: classified terrain, ocean currents and obstacles.

mod cluster;
mod current;
mod grid;
mod obstacle;
mod raster;
mod synth;

pub use cluster::{cluster_map, kmeans, render_classes, ClusterConfig, ColorRaster, KMeansResult};
pub use current::{CurrentField, CurrentSample, Vortex, VortexFieldParams};
pub use grid::{CellClass, TerrainGrid};
pub use obstacle::{confidence_radius_multiplier, Obstacle, ObstacleKind, ObstacleRegion, Z98};
pub use raster::{read_class_pgm, read_ppm, write_class_pgm, write_ppm};
pub use synth::{generate_synthetic_terrain, TerrainParams};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TerrainError {
    #[error("point ({x}, {y}) lies outside the terrain")]
    OutOfBounds { x: f64, y: f64 },
    #[error("invalid terrain grid: {0}")]
    InvalidGrid(String),
    #[error("cannot form {k} clusters from {pixels} pixels")]
    DegenerateClustering { pixels: usize, k: usize },
    #[error("terrain infeasible: connected water covers {water_fraction:.3} of the area")]
    InfeasibleTerrain { water_fraction: f64 },
    #[error("invalid vortex: {0}")]
    InvalidVortex(String),
    #[error("invalid obstacle: {0}")]
    InvalidObstacle(String),
    #[error("obstacle query at negative time {0}")]
    NegativeTime(f64),
    #[error("malformed raster: {0}")]
    Raster(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
