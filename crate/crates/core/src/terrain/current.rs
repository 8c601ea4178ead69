//! Superposed Lamb-Oseen vortices as a static 2-D ocean current map.

use super::{TerrainError, TerrainGrid};
use crate::geometry::Vec2;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Below this distance from a vortex center the (removable) singularity is
/// resolved to its limit, zero velocity.
const CENTER_GUARD_M: f64 = 1e-9;

/// max over x of (1 - exp(-x^2)) / x, attained at x ~= 1.1209.
const LAMB_PEAK_FACTOR: f64 = 0.638_172_686_338_951_5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vortex {
    pub center: Vec2,
    /// Core radius, meters.
    pub radius: f64,
    /// Circulation, m^2/s; positive is counter-clockwise.
    pub strength: f64,
}

impl Vortex {
    pub fn new(center: Vec2, radius: f64, strength: f64) -> Result<Self, TerrainError> {
        let v = Self { center, radius, strength };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<(), TerrainError> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(TerrainError::InvalidVortex(format!("radius {}", self.radius)));
        }
        if !self.strength.is_finite() || !self.center.is_finite() {
            return Err(TerrainError::InvalidVortex("non-finite center or strength".into()));
        }
        Ok(())
    }

    /// Circulation giving a peak tangential speed of `speed` m/s.
    pub fn strength_for_peak_speed(radius: f64, speed: f64) -> f64 {
        TAU * radius * speed / LAMB_PEAK_FACTOR
    }

    pub fn velocity_at(&self, p: Vec2) -> Vec2 {
        let dx = p.x - self.center.x;
        let dy = p.y - self.center.y;
        let r2 = dx * dx + dy * dy;
        if r2.sqrt() < CENTER_GUARD_M {
            return Vec2::ZERO;
        }
        // 1 - exp(-r^2/l^2), written to stay accurate near the core.
        let shape = -(-r2 / (self.radius * self.radius)).exp_m1();
        let k = self.strength / (2.0 * PI * r2) * shape;
        Vec2::new(-k * dy, k * dx)
    }
}

/// Current speed and direction at a point. The field is horizontal, so the
/// elevation angle is always zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurrentSample {
    pub velocity: Vec2,
    pub speed: f64,
    pub heading: f64,
    pub elevation: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CurrentField {
    pub vortices: Vec<Vortex>,
}

/// Ranges for drawing a random vortex field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VortexFieldParams {
    pub count_min: usize,
    pub count_max: usize,
    pub radius_min_m: f64,
    pub radius_max_m: f64,
    pub peak_speed_min: f64,
    pub peak_speed_max: f64,
}

impl Default for VortexFieldParams {
    fn default() -> Self {
        Self {
            count_min: 5,
            count_max: 10,
            radius_min_m: 300.0,
            radius_max_m: 900.0,
            peak_speed_min: 0.1,
            peak_speed_max: 0.3,
        }
    }
}

impl CurrentField {
    pub fn new(vortices: Vec<Vortex>) -> Self {
        Self { vortices }
    }

    pub fn still() -> Self {
        Self::default()
    }

    pub fn current_at(&self, p: Vec2) -> Vec2 {
        self.vortices
            .iter()
            .fold(Vec2::ZERO, |acc, v| acc + v.velocity_at(p))
    }

    pub fn sample(&self, p: Vec2) -> CurrentSample {
        let velocity = self.current_at(p);
        CurrentSample {
            velocity,
            speed: velocity.norm(),
            heading: velocity.y.atan2(velocity.x),
            elevation: 0.0,
        }
    }

    /// Draws vortices with centers uniform over `[lo, hi]`.
    pub fn random<R: Rng>(rng: &mut R, lo: Vec2, hi: Vec2, params: &VortexFieldParams) -> Self {
        let count = rng.random_range(params.count_min..=params.count_max.max(params.count_min));
        let vortices = (0..count)
            .map(|_| {
                let center = Vec2::new(rng.random_range(lo.x..=hi.x), rng.random_range(lo.y..=hi.y));
                let radius = rng.random_range(params.radius_min_m..=params.radius_max_m);
                let speed = rng.random_range(params.peak_speed_min..=params.peak_speed_max);
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                Vortex { center, radius, strength: sign * Vortex::strength_for_peak_speed(radius, speed) }
            })
            .collect();
        Self { vortices }
    }

    pub fn validate_within(&self, grid: &TerrainGrid) -> Result<(), TerrainError> {
        for v in &self.vortices {
            v.validate()?;
            if !grid.contains(v.center) {
                return Err(TerrainError::InvalidVortex(format!(
                    "center ({}, {}) outside terrain",
                    v.center.x, v.center.y
                )));
            }
        }
        Ok(())
    }
}
