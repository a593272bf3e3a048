//! Finite median graphs and windows into infinite ones: walls, distance,
//! medians, intervals, hulls, gates and wall chains.

pub mod fixtures;
mod ops;
mod walls;
mod window;

pub use ops::{
    distance, gate_projection, hull, interval, maximal_wall_chain, median, separating_walls,
    validate_median, ConvexSet,
};
pub use walls::{compute_walls, HalfSpaces, Wall, WallId, WallSystem};
pub use window::{MedianWindow, MedianWindowDoc};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MedianError {
    #[error("median validation needs a full graph, not a window")]
    WindowNotCheckable,
    #[error("graph is not connected")]
    Disconnected,
    #[error("wall {wall} does not separate the graph")]
    DegenerateWall { wall: usize },
    #[error("vertex {vertex} lies outside the guard radius {guard}")]
    HorizonExceeded { vertex: String, guard: u32 },
    #[error("no unique median for {0}")]
    NoMedian(String),
    #[error("vertex set is not convex: {0}")]
    NotConvex(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
}
