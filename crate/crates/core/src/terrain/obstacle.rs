//! Static and moving obstacles with linearly growing position uncertainty.

use super::TerrainError;
use crate::geometry::Vec3;
use serde::{Deserialize, Serialize};

/// Radius multiplier enclosing 98% of a circular 2-D Gaussian position error
/// (inverse Rayleigh CDF).
pub const Z98: f64 = 2.797_149_622_536_537;

/// Inverse Rayleigh CDF for unit-sigma 2-D Gaussian error.
pub fn confidence_radius_multiplier(confidence: f64) -> f64 {
    (-2.0 * (1.0 - confidence).ln()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObstacleKind {
    Static,
    Moving,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub position: Vec3,
    pub radius: f64,
    pub velocity: Vec3,
    /// Growth rate of the position-error standard deviation, m/s.
    pub uncertainty_rate: f64,
    pub kind: ObstacleKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstacleRegion {
    pub center: Vec3,
    pub radius: f64,
}

impl ObstacleRegion {
    pub fn contains(&self, p: Vec3) -> bool {
        p.distance(self.center) <= self.radius
    }
}

impl Obstacle {
    pub fn fixed(position: Vec3, radius: f64, uncertainty_rate: f64) -> Result<Self, TerrainError> {
        let o = Self { position, radius, velocity: Vec3::ZERO, uncertainty_rate, kind: ObstacleKind::Static };
        o.validate()?;
        Ok(o)
    }

    pub fn moving(
        position: Vec3,
        radius: f64,
        velocity: Vec3,
        uncertainty_rate: f64,
    ) -> Result<Self, TerrainError> {
        let o = Self { position, radius, velocity, uncertainty_rate, kind: ObstacleKind::Moving };
        o.validate()?;
        Ok(o)
    }

    pub fn validate(&self) -> Result<(), TerrainError> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(TerrainError::InvalidObstacle(format!("radius {}", self.radius)));
        }
        if !(self.uncertainty_rate >= 0.0 && self.uncertainty_rate.is_finite()) {
            return Err(TerrainError::InvalidObstacle(format!(
                "uncertainty rate {}",
                self.uncertainty_rate
            )));
        }
        if !self.position.is_finite() || !self.velocity.is_finite() {
            return Err(TerrainError::InvalidObstacle("non-finite position or velocity".into()));
        }
        if self.kind == ObstacleKind::Static && self.velocity != Vec3::ZERO {
            return Err(TerrainError::InvalidObstacle("static obstacle with velocity".into()));
        }
        Ok(())
    }

    /// 98%-confidence region at mission time `t`.
    pub fn region_at(&self, t: f64) -> Result<ObstacleRegion, TerrainError> {
        if t < 0.0 || t.is_nan() {
            return Err(TerrainError::NegativeTime(t));
        }
        Ok(self.region_unchecked(t))
    }

    pub(crate) fn region_unchecked(&self, t: f64) -> ObstacleRegion {
        ObstacleRegion {
            center: self.position + self.velocity * t,
            radius: self.radius + Z98 * self.uncertainty_rate * t,
        }
    }
}
