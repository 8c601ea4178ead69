use super::spline::ControlPolygon;
use crate::geometry::{Vec2, Vec3};
use crate::terrain::{CellClass, CurrentField, Obstacle, TerrainGrid};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

/// Ground speed floor used by the current-aware clock, m/s.
pub const MIN_GROUND_SPEED: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VehicleLimits {
    /// Cruise speed through water, m/s.
    pub cruise_speed: f64,
    pub surge_max: f64,
    pub sway_max: f64,
    /// rad/s
    pub yaw_rate_max: f64,
    pub depth_min: f64,
    pub depth_max: f64,
}

impl Default for VehicleLimits {
    fn default() -> Self {
        Self { cruise_speed: 2.0, surge_max: 2.6, sway_max: 0.5, yaw_rate_max: 0.15, depth_min: 0.0, depth_max: 100.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ViolationWeights {
    pub depth_min: f64,
    pub depth_max: f64,
    pub surge: f64,
    pub sway: f64,
    pub yaw_rate: f64,
    pub collision: f64,
}

impl Default for ViolationWeights {
    fn default() -> Self {
        Self { depth_min: 1.0, depth_max: 1.0, surge: 10.0, sway: 10.0, yaw_rate: 100.0, collision: 10.0 }
    }
}

/// How sample times are assigned along the path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeMode {
    /// Arc length over cruise speed.
    StillWater,
    /// Each arc element over the along-track ground speed (cruise plus the
    /// current's projection, floored at [`MIN_GROUND_SPEED`]).
    #[default]
    CurrentAware,
}

/// What a path is flown through: terrain, a current snapshot, obstacles, and
/// the mission clock at the first sample.
#[derive(Debug, Clone, Copy)]
pub struct Environment<'a> {
    pub grid: &'a TerrainGrid,
    pub field: &'a CurrentField,
    pub obstacles: &'a [Obstacle],
    pub clock: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    /// Seconds since the start of the leg.
    pub t: f64,
    pub position: Vec3,
    pub yaw: f64,
    pub pitch: f64,
    /// Ground-frame velocity, m/s.
    pub velocity: Vec3,
    pub surge: f64,
    pub sway: f64,
    pub yaw_rate: f64,
}

/// Unweighted violation totals over all samples. `collision` is 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ViolationBreakdown {
    pub depth_min: f64,
    pub depth_max: f64,
    pub surge: f64,
    pub sway: f64,
    pub yaw_rate: f64,
    pub collision: f64,
}

impl ViolationBreakdown {
    pub fn weighted(&self, w: &ViolationWeights) -> ViolationBreakdown {
        ViolationBreakdown {
            depth_min: w.depth_min * self.depth_min,
            depth_max: w.depth_max * self.depth_max,
            surge: w.surge * self.surge,
            sway: w.sway * self.sway,
            yaw_rate: w.yaw_rate * self.yaw_rate,
            collision: w.collision * self.collision,
        }
    }

    pub fn sum(&self) -> f64 {
        self.depth_min + self.depth_max + self.surge + self.sway + self.yaw_rate + self.collision
    }

    pub fn weighted_total(&self, w: &ViolationWeights) -> f64 {
        self.weighted(w).sum()
    }

    pub fn is_clear(&self) -> bool {
        self.sum() == 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathCandidate {
    pub polygon: ControlPolygon,
    pub samples: Vec<PathSample>,
    pub arc_length: f64,
    /// Leg duration, seconds.
    pub flight_time: f64,
    pub violations: ViolationBreakdown,
    /// Weighted violation total.
    pub violation: f64,
    pub cost: f64,
}

impl PathCandidate {
    pub fn is_violation_free(&self) -> bool {
        self.violations.is_clear()
    }
}

fn wrap_angle(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(2.0 * PI) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

/// Samples `polygon` and derives kinematic states for the given current.
pub fn spline_path(
    polygon: &ControlPolygon,
    intervals: usize,
    limits: &VehicleLimits,
    field: &CurrentField,
    mode: TimeMode,
) -> (Vec<PathSample>, f64) {
    let pts = polygon.sample(intervals.max(1));
    let m = pts.len();
    let speed = limits.cruise_speed;
    // heading of each sample from its forward difference (backward at the end)
    let dir: Vec<Vec3> = (0..m)
        .map(|k| if k + 1 < m { pts[k + 1] - pts[k] } else { pts[k] - pts[k - 1] })
        .collect();
    let mut samples = Vec::with_capacity(m);
    let mut t = 0.0;
    let mut arc = 0.0;
    for k in 0..m {
        let d = dir[k];
        let horiz = d.xy().norm();
        let yaw = if horiz > 0.0 { d.y.atan2(d.x) } else { samples.last().map_or(0.0, |s: &PathSample| s.yaw) };
        let pitch = d.z.atan2(horiz);
        let current = field.current_at(pts[k].xy());
        let heading = Vec2::new(yaw.cos(), yaw.sin());
        let velocity = Vec3::new(
            speed * pitch.cos() * heading.x + current.x,
            speed * pitch.cos() * heading.y + current.y,
            speed * pitch.sin(),
        );
        let ground = velocity.xy();
        let surge = ground.dot(heading);
        let sway = ground.dot(Vec2::new(-heading.y, heading.x));
        if k > 0 {
            let ds = pts[k].distance(pts[k - 1]);
            arc += ds;
            t += match mode {
                TimeMode::StillWater => ds / speed,
                TimeMode::CurrentAware => {
                    let along = if ds > 0.0 { current.dot((pts[k] - pts[k - 1]).xy()) / ds } else { 0.0 };
                    ds / (speed + along).max(MIN_GROUND_SPEED)
                }
            };
        }
        samples.push(PathSample { t, position: pts[k], yaw, pitch, velocity, surge, sway, yaw_rate: 0.0 });
    }
    for k in 1..m {
        let dt = samples[k].t - samples[k - 1].t;
        let dpsi = wrap_angle(samples[k].yaw - samples[k - 1].yaw);
        samples[k].yaw_rate = if dt > 0.0 { dpsi / dt } else { 0.0 };
    }
    (samples, arc)
}

/// Raw violation totals for sampled states.
pub fn path_violations(samples: &[PathSample], env: &Environment, limits: &VehicleLimits) -> ViolationBreakdown {
    let mut v = ViolationBreakdown::default();
    let mut collided = false;
    for s in samples {
        let z = s.position.z;
        v.depth_min += (z - limits.depth_min).min(0.0).abs();
        v.depth_max += (z - limits.depth_max).max(0.0);
        v.surge += (s.surge.abs() - limits.surge_max).max(0.0);
        v.sway += (s.sway.abs() - limits.sway_max).max(0.0);
        v.yaw_rate += (s.yaw_rate.abs() - limits.yaw_rate_max).max(0.0);
        if !collided {
            collided = !matches!(env.grid.class_at(s.position.xy()), Ok(CellClass::Water))
                || env.obstacles.iter().any(|o| o.region_unchecked(env.clock + s.t).contains(s.position));
        }
    }
    v.collision = if collided { 1.0 } else { 0.0 };
    v
}

/// `flight_time / reference_time + penalty * weighted violation total`.
pub fn path_cost(flight_time: f64, reference_time: f64, violations: &ViolationBreakdown, weights: &ViolationWeights, penalty: f64) -> f64 {
    flight_time / reference_time + penalty * violations.weighted_total(weights)
}

/// Writes `t, x, y, z, yaw, pitch, u, v, w` rows.
pub fn write_trajectory_csv<W: Write>(samples: &[PathSample], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "y", "z", "yaw", "pitch", "u", "v", "w"])?;
    for s in samples {
        let row = [s.t, s.position.x, s.position.y, s.position.z, s.yaw, s.pitch, s.velocity.x, s.velocity.y, s.velocity.z];
        w.write_record(row.iter().map(|x| x.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
