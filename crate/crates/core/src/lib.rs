//! Mission-level routing and path planning for autonomous underwater vehicles.
//!
//! The crate is organized as the closed planning loop it implements:
//!
//! * [`terrain`] synthesizes and queries the operating area: a classified
//!   terrain grid, a Lamb-vortex current field and obstacles whose position
//!   uncertainty grows with time.
//! * [`graph`] places waypoints on legal water, connects them into a task
//!   graph and turns priority vectors into feasible routes.
//! * [`tamp`] scores routes against a time threshold and optimizes them with
//!   ant colony, biogeography, genetic and particle swarm searches.
//! * [`opp`] builds clamped cubic B-spline paths between waypoints, charges
//!   kinodynamic and collision violations and optimizes control points with
//!   differential evolution, firefly, biogeography and particle swarm searches.
//! * [`executive`] flies a mission: route, plan each leg, re-route when the
//!   realized leg time drifts and account the total mission cost.
//! * [`harness`] holds the scenario format and the Monte Carlo campaign and
//!   reporting machinery behind the command-line tool.
//!
//! Every stochastic component takes an explicit seed and owns its RNG, so a
//! scenario plus a seed reproduces a run exactly. With the default `parallel`
//! feature, population evaluation and campaign runs fan out over rayon; the
//! results are identical to the sequential fallback.

pub mod executive;
pub mod geometry;
pub mod graph;
pub mod harness;
pub mod opp;
pub mod par;
pub mod rng;
pub mod swarm;
pub mod tamp;
pub mod terrain;

pub use geometry::{Vec2, Vec3};
