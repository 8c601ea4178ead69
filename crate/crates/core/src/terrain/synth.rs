//! Procedural archipelago used in place of a surveyed map.

use super::{CellClass, TerrainError, TerrainGrid};
use crate::rng;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TerrainParams {
    pub width_m: f64,
    pub height_m: f64,
    pub depth_m: f64,
    pub cell_size_m: f64,
    pub island_count: usize,
    pub island_radius_mean_m: f64,
    pub island_radius_std_m: f64,
    /// Width of the Uncertain shoal band around each island.
    pub shoal_width_m: f64,
}

impl Default for TerrainParams {
    fn default() -> Self {
        Self {
            width_m: 10_000.0,
            height_m: 10_000.0,
            depth_m: 100.0,
            cell_size_m: 50.0,
            island_count: 6,
            island_radius_mean_m: 600.0,
            island_radius_std_m: 200.0,
            shoal_width_m: 100.0,
        }
    }
}

struct Island {
    cx: f64,
    cy: f64,
    radius: f64,
    harmonics: [(f64, f64); 3],
}

impl Island {
    fn boundary(&self, angle: f64) -> f64 {
        let wobble: f64 = self
            .harmonics
            .iter()
            .enumerate()
            .map(|(h, &(amp, phase))| amp * ((h as f64 + 2.0) * angle + phase).cos())
            .sum();
        self.radius * (1.0 + wobble)
    }
}

/// Islands are wobbly discs of Coast ringed by an Uncertain shoal. Water cut
/// off from the largest connected water body is filled in as Coast, so the
/// remaining water is one 4-connected region.
pub fn generate_synthetic_terrain(seed: u64, params: &TerrainParams) -> Result<TerrainGrid, TerrainError> {
    let mut grid = TerrainGrid::filled(
        params.width_m,
        params.height_m,
        params.depth_m,
        params.cell_size_m,
        CellClass::Water,
    )?;
    if params.island_count == 0 {
        return Ok(grid);
    }

    let mut rng = rng::seeded(seed);
    let radius_dist = Normal::new(params.island_radius_mean_m, params.island_radius_std_m.max(0.0))
        .map_err(|e| TerrainError::InvalidGrid(e.to_string()))?;
    let islands: Vec<Island> = (0..params.island_count)
        .map(|_| Island {
            cx: rng.random_range(0.0..params.width_m),
            cy: rng.random_range(0.0..params.height_m),
            radius: radius_dist.sample(&mut rng).max(params.cell_size_m),
            harmonics: std::array::from_fn(|_| {
                (rng.random_range(0.0..0.15), rng.random_range(0.0..TAU))
            }),
        })
        .collect();

    for r in 0..grid.rows() {
        for c in 0..grid.cols() {
            let p = grid.cell_center(c, r);
            let mut class = CellClass::Water;
            for isl in &islands {
                let (dx, dy) = (p.x - isl.cx, p.y - isl.cy);
                let edge = isl.boundary(dy.atan2(dx));
                let d = dx.hypot(dy);
                if d <= edge {
                    class = CellClass::Coast;
                    break;
                }
                if d <= edge + params.shoal_width_m {
                    class = CellClass::Uncertain;
                }
            }
            grid.set_cell(c, r, class);
        }
    }

    keep_largest_water_body(&mut grid);
    let water_fraction = grid.water_fraction();
    if water_fraction < 0.5 {
        return Err(TerrainError::InfeasibleTerrain { water_fraction });
    }
    Ok(grid)
}

fn keep_largest_water_body(grid: &mut TerrainGrid) {
    let (cols, rows) = (grid.cols(), grid.rows());
    let mut label = vec![usize::MAX; cols * rows];
    let mut sizes = Vec::new();
    for start in 0..cols * rows {
        if label[start] != usize::MAX || grid.cells()[start] != CellClass::Water {
            continue;
        }
        let id = sizes.len();
        let mut size = 0;
        let mut queue = VecDeque::from([start]);
        label[start] = id;
        while let Some(i) = queue.pop_front() {
            size += 1;
            let (c, r) = (i % cols, i / cols);
            let mut visit = |nc: usize, nr: usize| {
                let j = nr * cols + nc;
                if label[j] == usize::MAX && grid.cells()[j] == CellClass::Water {
                    label[j] = id;
                    queue.push_back(j);
                }
            };
            if c > 0 {
                visit(c - 1, r);
            }
            if c + 1 < cols {
                visit(c + 1, r);
            }
            if r > 0 {
                visit(c, r - 1);
            }
            if r + 1 < rows {
                visit(c, r + 1);
            }
        }
        sizes.push(size);
    }
    let Some(largest) = (0..sizes.len()).max_by_key(|&i| (sizes[i], std::cmp::Reverse(i))) else {
        return;
    };
    for i in 0..cols * rows {
        if label[i] != usize::MAX && label[i] != largest {
            grid.set_cell(i % cols, i / cols, CellClass::Coast);
        }
    }
}
