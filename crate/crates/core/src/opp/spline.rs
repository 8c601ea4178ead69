use super::OppError;
use crate::geometry::Vec3;
use crate::terrain::TerrainGrid;
use serde::{Deserialize, Serialize};

/// Axis-aligned search box for interior control points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corridor {
    pub lo: Vec3,
    pub hi: Vec3,
}

impl Corridor {
    /// Box around the start-goal segment, grown by `inflation * length` on
    /// every axis, then clipped to the plan area and to `[z_min, z_max]`.
    pub fn around(start: Vec3, goal: Vec3, inflation: f64, grid: &TerrainGrid, z_min: f64, z_max: f64) -> Self {
        let pad = inflation * start.distance(goal);
        let lo = Vec3::new(
            (start.x.min(goal.x) - pad).max(0.0),
            (start.y.min(goal.y) - pad).max(0.0),
            (start.z.min(goal.z) - pad).max(z_min),
        );
        let hi = Vec3::new(
            (start.x.max(goal.x) + pad).min(grid.width_m()),
            (start.y.max(goal.y) + pad).min(grid.height_m()),
            (start.z.max(goal.z) + pad).min(z_max),
        );
        Self { lo, hi: Vec3::new(hi.x.max(lo.x), hi.y.max(lo.y), hi.z.max(lo.z)) }
    }

    pub fn width(&self) -> Vec3 {
        self.hi - self.lo
    }

    pub fn clamp(&self, p: Vec3) -> Vec3 {
        Vec3::new(
            p.x.clamp(self.lo.x, self.hi.x),
            p.y.clamp(self.lo.y, self.hi.y),
            p.z.clamp(self.lo.z, self.hi.z),
        )
    }

    /// Per-coordinate bounds for `n` interior points, flattened `x, y, z`.
    pub fn bounds(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let lo = self.lo.to_array().repeat(n);
        let hi = self.hi.to_array().repeat(n);
        (lo, hi)
    }
}

/// Ordered control points; the first and last are the fixed endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlPolygon {
    points: Vec<Vec3>,
    corridor: Corridor,
}

impl ControlPolygon {
    pub fn new(start: Vec3, goal: Vec3, interior: &[Vec3], corridor: Corridor) -> Result<Self, OppError> {
        if start == goal {
            return Err(OppError::DegeneratePolygon);
        }
        let mut points = Vec::with_capacity(interior.len() + 2);
        points.push(start);
        points.extend(interior.iter().map(|&p| corridor.clamp(p)));
        points.push(goal);
        Ok(Self { points, corridor })
    }

    /// Interior points evenly spaced on the start-goal segment.
    pub fn straight(start: Vec3, goal: Vec3, n: usize, corridor: Corridor) -> Result<Self, OppError> {
        let interior: Vec<Vec3> = (1..=n).map(|i| start.lerp(goal, i as f64 / (n + 1) as f64)).collect();
        Self::new(start, goal, &interior, corridor)
    }

    /// Polygon from a flattened interior decision vector.
    pub fn from_vector(start: Vec3, goal: Vec3, x: &[f64], corridor: Corridor) -> Result<Self, OppError> {
        let interior: Vec<Vec3> = x.chunks_exact(3).map(Vec3::from_slice).collect();
        Self::new(start, goal, &interior, corridor)
    }

    pub fn to_vector(&self) -> Vec<f64> {
        self.interior().iter().flat_map(|p| p.to_array()).collect()
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn interior(&self) -> &[Vec3] {
        &self.points[1..self.points.len() - 1]
    }

    pub fn start(&self) -> Vec3 {
        self.points[0]
    }

    pub fn goal(&self) -> Vec3 {
        *self.points.last().expect("at least two points")
    }

    pub fn corridor(&self) -> Corridor {
        self.corridor
    }

    /// Sum of segment lengths of the control polygon.
    pub fn polygon_length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    /// Samples the clamped uniform B-spline (cubic, or lower when there are
    /// fewer than four points) at `intervals + 1` evenly spaced parameters.
    pub fn sample(&self, intervals: usize) -> Vec<Vec3> {
        let spline = BSpline::clamped_uniform(&self.points);
        (0..=intervals).map(|k| spline.eval(k as f64 / intervals as f64)).collect()
    }
}

struct BSpline<'a> {
    ctrl: &'a [Vec3],
    degree: usize,
    knots: Vec<f64>,
}

impl<'a> BSpline<'a> {
    fn clamped_uniform(ctrl: &'a [Vec3]) -> Self {
        let n = ctrl.len();
        let degree = 3.min(n - 1);
        let spans = n - degree;
        let mut knots = vec![0.0; degree + 1];
        knots.extend((1..spans).map(|i| i as f64 / spans as f64));
        knots.extend(std::iter::repeat_n(1.0, degree + 1));
        Self { ctrl, degree, knots }
    }

    /// de Boor evaluation at `u` in `[0, 1]`.
    fn eval(&self, u: f64) -> Vec3 {
        let p = self.degree;
        let n = self.ctrl.len();
        let u = u.clamp(0.0, 1.0);
        let k = if u >= 1.0 {
            n - 1
        } else {
            (p..n).rfind(|&i| self.knots[i] <= u).unwrap_or(p)
        };
        let mut d: Vec<Vec3> = (0..=p).map(|j| self.ctrl[j + k - p]).collect();
        for r in 1..=p {
            for j in (r..=p).rev() {
                let i = j + k - p;
                let denom = self.knots[i + p + 1 - r] - self.knots[i];
                let a = if denom > 0.0 { (u - self.knots[i]) / denom } else { 0.0 };
                d[j] = d[j - 1] * (1.0 - a) + d[j] * a;
            }
        }
        d[p]
    }
}
