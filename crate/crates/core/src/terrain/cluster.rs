//! k-means segmentation of a color raster into terrain classes.

use super::{CellClass, TerrainError, TerrainGrid};
use crate::rng;
use rand::Rng;

/// An RGB raster, row-major, row 0 first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorRaster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[u8; 3]>,
}

impl ColorRaster {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self, TerrainError> {
        if pixels.len() != width * height {
            return Err(TerrainError::Raster(format!(
                "{} pixels for a {width}x{height} raster",
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, color: [u8; 3]) -> Self {
        Self { width, height, pixels: vec![color; width * height] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterConfig {
    pub k: usize,
    pub water_ref: [f64; 3],
    pub land_ref: [f64; 3],
    pub seed: u64,
    pub max_iter: usize,
    pub tolerance: f64,
    pub cell_size_m: f64,
    pub depth_m: f64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            k: 3,
            water_ref: [0.0, 0.0, 255.0],
            land_ref: [139.0, 90.0, 43.0],
            seed: 0,
            max_iter: 100,
            tolerance: 1e-6,
            cell_size_m: 50.0,
            depth_m: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub centroids: Vec<[f64; 3]>,
    pub labels: Vec<usize>,
    pub sizes: Vec<usize>,
    pub iterations: usize,
}

fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}

/// Nearest centroid; ties go to the lowest index.
fn nearest(p: &[f64; 3], centroids: &[[f64; 3]]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in centroids.iter().enumerate() {
        let d = dist2(p, c);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Lloyd iterations from seeded k-means++ centroids. Clusters may end up
/// empty when the data has fewer than `k` distinct points; an empty cluster
/// keeps its previous centroid.
pub fn kmeans(
    points: &[[f64; 3]],
    k: usize,
    seed: u64,
    max_iter: usize,
    tolerance: f64,
) -> Result<KMeansResult, TerrainError> {
    if k < 2 || points.len() < k {
        return Err(TerrainError::DegenerateClustering { pixels: points.len(), k });
    }
    let mut rng = rng::seeded(seed);
    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..points.len())]);
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut idx = points.len() - 1;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 && target < d {
                    idx = i;
                    break;
                }
                target -= d;
            }
            idx
        } else {
            rng.random_range(0..points.len())
        };
        let c = points[pick];
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(dist2(p, &c));
        }
        centroids.push(c);
    }

    let mut labels = vec![0usize; points.len()];
    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        for (l, p) in labels.iter_mut().zip(points) {
            *l = nearest(p, &centroids);
        }
        let mut sums = vec![[0.0f64; 3]; k];
        let mut counts = vec![0usize; k];
        for (l, p) in labels.iter().zip(points) {
            counts[*l] += 1;
            for d in 0..3 {
                sums[*l][d] += p[d];
            }
        }
        let mut moved = 0.0f64;
        for i in 0..k {
            if counts[i] == 0 {
                continue;
            }
            let n = counts[i] as f64;
            let next = [sums[i][0] / n, sums[i][1] / n, sums[i][2] / n];
            moved = moved.max(dist2(&next, &centroids[i]).sqrt());
            centroids[i] = next;
        }
        if moved < tolerance {
            break;
        }
    }
    for (l, p) in labels.iter_mut().zip(points) {
        *l = nearest(p, &centroids);
    }
    let mut sizes = vec![0usize; k];
    for &l in &labels {
        sizes[l] += 1;
    }
    Ok(KMeansResult { centroids, labels, sizes, iterations })
}

/// Maps cluster index to terrain class: the non-empty cluster nearest the
/// water reference is Water, the non-empty remainder nearest the land
/// reference is Coast, everything else Uncertain.
fn classify_clusters(result: &KMeansResult, cfg: &ClusterConfig) -> Vec<CellClass> {
    let k = result.centroids.len();
    let mut classes = vec![CellClass::Uncertain; k];
    let pick = |reference: &[f64; 3], taken: Option<usize>| {
        (0..k)
            .filter(|&i| result.sizes[i] > 0 && Some(i) != taken)
            .min_by(|&a, &b| {
                dist2(&result.centroids[a], reference)
                    .total_cmp(&dist2(&result.centroids[b], reference))
                    .then(a.cmp(&b))
            })
    };
    let water = pick(&cfg.water_ref, None);
    if let Some(w) = water {
        classes[w] = CellClass::Water;
    }
    if let Some(c) = pick(&cfg.land_ref, water) {
        classes[c] = CellClass::Coast;
    }
    classes
}

/// Segments a color raster into a terrain grid, one cell per pixel.
pub fn cluster_map(raster: &ColorRaster, cfg: &ClusterConfig) -> Result<TerrainGrid, TerrainError> {
    let points: Vec<[f64; 3]> = raster
        .pixels
        .iter()
        .map(|p| [p[0] as f64, p[1] as f64, p[2] as f64])
        .collect();
    let result = kmeans(&points, cfg.k, cfg.seed, cfg.max_iter, cfg.tolerance)?;
    let classes = classify_clusters(&result, cfg);
    let cells = result.labels.iter().map(|&l| classes[l]).collect();
    TerrainGrid::from_cells(raster.width, raster.height, cfg.cell_size_m, cfg.depth_m, cells)
}

/// Paints a grid with the reference colors (Uncertain as mid gray).
pub fn render_classes(grid: &TerrainGrid, cfg: &ClusterConfig) -> ColorRaster {
    let to_u8 = |c: [f64; 3]| c.map(|v| v.round().clamp(0.0, 255.0) as u8);
    let water = to_u8(cfg.water_ref);
    let land = to_u8(cfg.land_ref);
    let pixels = grid
        .cells()
        .iter()
        .map(|c| match c {
            CellClass::Water => water,
            CellClass::Coast => land,
            CellClass::Uncertain => [128, 128, 128],
        })
        .collect();
    ColorRaster { width: grid.cols(), height: grid.rows(), pixels }
}
