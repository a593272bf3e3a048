//! Vertex caps for materialized windows and enumerations.

/// Default cap on materialized vertices or enumerated elements.
pub const DEFAULT_VERTEX_CAP: usize = 2_000_000;

/// Environment variable that overrides [`DEFAULT_VERTEX_CAP`].
pub const BUDGET_ENV: &str = "CURTAINLAB_BUDGET";

/// The cap in force: `CURTAINLAB_BUDGET` when it parses, else the default.
pub fn vertex_cap() -> usize {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_VERTEX_CAP)
}
