//! Curtains dual to geodesics in finite hyperbolic graphs, chains of them,
//! and the flip and skewer predicates with translation-length certificates.

mod action;
mod curtains;
mod hyp;
mod predicates;

pub use action::{ActionAlgebra, GraphAction, VertexMap};
pub use curtains::{
    greedy_chain, is_chain, make_curtain, project_to_geodesic, AxisProjection, ChainReport,
    Curtain, CurtainAxioms, CurtainDoc, GeodesicProjection, Side,
};
pub use hyp::{four_point_delta, HypGraph, EXHAUSTIVE_DELTA_LIMIT};
pub use predicates::{
    certify_tau, flip_then_skewer, flips, flips_side, skewer_check, skewers, Displacement,
    FlipCheck, FlipThenSkewer, TauCertificate,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CurtainError {
    #[error("the hyperbolicity constant must be at least 1")]
    InvalidConstant,
    #[error("graph is not connected")]
    Disconnected,
    #[error("vertex sequence is not a geodesic: {0}")]
    NotGeodesic(String),
    #[error("interval of {width} edges at offset {offset} does not fit strictly inside a geodesic of length {length}")]
    IntervalTooWide {
        width: u32,
        offset: u32,
        length: u32,
    },
    #[error("points at distance {distance} are closer than the required {needed}")]
    TooClose { distance: u32, needed: u32 },
    #[error("action undefined at vertex {vertex}")]
    PartialAction { vertex: u32 },
    #[error("flip precondition failed: {0}")]
    FlipPreconditionFailed(String),
    #[error("translates fail to form a chain: {0}")]
    ChainBroken(String),
    #[error("element does not skewer the curtain with m = 1")]
    NotSkewered,
}
