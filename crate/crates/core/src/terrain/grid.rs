use super::TerrainError;
use crate::geometry::{Vec2, Vec3};
use serde::{Deserialize, Serialize};

/// Legality class of one terrain cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellClass {
    Water,
    Coast,
    Uncertain,
}

impl CellClass {
    /// Raster byte: 0 = Coast, 1 = Water, 2 = Uncertain.
    pub fn to_byte(self) -> u8 {
        match self {
            CellClass::Coast => 0,
            CellClass::Water => 1,
            CellClass::Uncertain => 2,
        }
    }

    pub fn from_byte(b: u8) -> Option<CellClass> {
        match b {
            0 => Some(CellClass::Coast),
            1 => Some(CellClass::Water),
            2 => Some(CellClass::Uncertain),
            _ => None,
        }
    }
}

/// Row-major grid of cell classes over a `width_m` x `height_m` plan area.
/// Row `r` covers `y` in `[r * cell, (r + 1) * cell)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TerrainGrid {
    width_m: f64,
    height_m: f64,
    depth_m: f64,
    cell_size_m: f64,
    cols: usize,
    rows: usize,
    cells: Vec<CellClass>,
}

impl TerrainGrid {
    pub fn from_cells(
        cols: usize,
        rows: usize,
        cell_size_m: f64,
        depth_m: f64,
        cells: Vec<CellClass>,
    ) -> Result<Self, TerrainError> {
        if cols == 0 || rows == 0 {
            return Err(TerrainError::InvalidGrid("grid has no cells".into()));
        }
        if !(cell_size_m > 0.0 && cell_size_m.is_finite()) {
            return Err(TerrainError::InvalidGrid(format!("cell size {cell_size_m}")));
        }
        if !(depth_m > 0.0 && depth_m.is_finite()) {
            return Err(TerrainError::InvalidGrid(format!("depth {depth_m}")));
        }
        if cells.len() != cols * rows {
            return Err(TerrainError::InvalidGrid(format!(
                "{} cells for a {cols}x{rows} grid",
                cells.len()
            )));
        }
        Ok(Self {
            width_m: cols as f64 * cell_size_m,
            height_m: rows as f64 * cell_size_m,
            depth_m,
            cell_size_m,
            cols,
            rows,
            cells,
        })
    }

    /// Uniform grid covering at least `width_m` x `height_m`.
    pub fn filled(
        width_m: f64,
        height_m: f64,
        depth_m: f64,
        cell_size_m: f64,
        class: CellClass,
    ) -> Result<Self, TerrainError> {
        if !(width_m > 0.0 && height_m > 0.0 && cell_size_m > 0.0) {
            return Err(TerrainError::InvalidGrid("non-positive extent".into()));
        }
        let cols = (width_m / cell_size_m).ceil() as usize;
        let rows = (height_m / cell_size_m).ceil() as usize;
        Self::from_cells(cols, rows, cell_size_m, depth_m, vec![class; cols * rows])
    }

    pub fn width_m(&self) -> f64 {
        self.width_m
    }
    pub fn height_m(&self) -> f64 {
        self.height_m
    }
    pub fn depth_m(&self) -> f64 {
        self.depth_m
    }
    pub fn cell_size_m(&self) -> f64 {
        self.cell_size_m
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cells(&self) -> &[CellClass] {
        &self.cells
    }

    pub fn cell(&self, col: usize, row: usize) -> CellClass {
        self.cells[row * self.cols + col]
    }

    pub fn set_cell(&mut self, col: usize, row: usize, class: CellClass) {
        self.cells[row * self.cols + col] = class;
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= 0.0 && p.y >= 0.0 && p.x <= self.width_m && p.y <= self.height_m
    }

    /// Cell indices of an in-bounds point; the far edges belong to the last
    /// row/column.
    pub fn cell_of(&self, p: Vec2) -> Option<(usize, usize)> {
        if !self.contains(p) {
            return None;
        }
        let c = ((p.x / self.cell_size_m) as usize).min(self.cols - 1);
        let r = ((p.y / self.cell_size_m) as usize).min(self.rows - 1);
        Some((c, r))
    }

    pub fn cell_center(&self, col: usize, row: usize) -> Vec2 {
        Vec2::new(
            (col as f64 + 0.5) * self.cell_size_m,
            (row as f64 + 0.5) * self.cell_size_m,
        )
    }

    pub fn class_at(&self, p: Vec2) -> Result<CellClass, TerrainError> {
        self.cell_of(p)
            .map(|(c, r)| self.cell(c, r))
            .ok_or(TerrainError::OutOfBounds { x: p.x, y: p.y })
    }

    /// In a Water cell and within the vertical operating band.
    pub fn is_legal(&self, p: Vec3) -> bool {
        if !(p.z >= 0.0 && p.z <= self.depth_m) {
            return false;
        }
        matches!(self.class_at(p.xy()), Ok(CellClass::Water))
    }

    /// Samples the straight segment at `step_m` spacing; true if every sample
    /// is legal.
    pub fn segment_is_legal(&self, a: Vec3, b: Vec3, step_m: f64) -> bool {
        let n = ((a.distance(b) / step_m).ceil() as usize).max(1);
        (0..=n).all(|i| self.is_legal(a.lerp(b, i as f64 / n as f64)))
    }

    pub fn water_fraction(&self) -> f64 {
        let water = self.cells.iter().filter(|&&c| c == CellClass::Water).count();
        water as f64 / self.cells.len() as f64
    }

    pub fn count(&self, class: CellClass) -> usize {
        self.cells.iter().filter(|&&c| c == class).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cell() -> TerrainGrid {
        TerrainGrid::from_cells(2, 1, 100.0, 100.0, vec![CellClass::Water, CellClass::Coast])
            .unwrap()
    }

    #[test]
    fn legal_in_water_at_depth() {
        let g = two_cell();
        assert!(g.is_legal(Vec3::new(50.0, 50.0, 50.0)));
    }

    #[test]
    fn coast_is_illegal() {
        let g = two_cell();
        assert!(!g.is_legal(Vec3::new(150.0, 50.0, 50.0)));
    }

    #[test]
    fn below_depth_band_is_illegal() {
        let g = two_cell();
        assert!(!g.is_legal(Vec3::new(50.0, 50.0, g.depth_m() + 1.0)));
        assert!(!g.is_legal(Vec3::new(50.0, 50.0, -0.1)));
    }

    #[test]
    fn out_of_bounds_queries_are_rejected() {
        let g = two_cell();
        assert!(matches!(
            g.class_at(Vec2::new(-1.0, 10.0)),
            Err(TerrainError::OutOfBounds { .. })
        ));
        assert!(g.class_at(Vec2::new(201.0, 10.0)).is_err());
        assert!(!g.is_legal(Vec3::new(10.0, 101.0, 1.0)));
    }

    #[test]
    fn far_edge_resolves_to_last_cell() {
        let g = two_cell();
        assert_eq!(g.class_at(Vec2::new(200.0, 100.0)).unwrap(), CellClass::Coast);
    }

    #[test]
    fn byte_codes_round_trip() {
        for c in [CellClass::Water, CellClass::Coast, CellClass::Uncertain] {
            assert_eq!(CellClass::from_byte(c.to_byte()), Some(c));
        }
        assert_eq!(CellClass::from_byte(3), None);
    }
}
