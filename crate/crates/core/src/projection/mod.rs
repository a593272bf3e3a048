//! Domain systems with projections over ball windows: the tree of flats with
//! its flat lines and contact graph, and the contact-graph-only system of an
//! arbitrary RAAG window. Axiom sweeps, searches and the rank-one recipe.

mod recipe;
mod search;
mod system;

pub use recipe::{
    recipe_rank_one, verify_certificate, CubicalWallCertificate, DirectCertificate,
    RecipeCertificate, RecipeOptions, RecipeOutcome, RoundTrip, SeparationReport,
    SkewerCertificate, CONTACT_ROUTE_LABEL,
};
pub use search::{
    conjugate_chain, find_active_domain, find_transverse_pair, passing_up_search, relation_search,
    ActiveDomainReport, ChainLink, ConjugateChain, PassingUp, PassingUpReport,
};
pub use system::{
    instantiate_maximal_only, instantiate_tree_of_flats, BehrstockReport, BehrstockViolation,
    BgiReport, BgiViolation, Constants, Domain, DomainDoc, ProjectionSystem, ProjectionSystemDoc,
    Relation, SystemKind, DEFAULT_SEED,
};

use crate::curtain::CurtainError;
use crate::raag::RaagError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProjectionError {
    #[error("no growth: every observed ratio is zero")]
    NoGrowth,
    #[error("{0}")]
    HorizonExceeded(String),
    #[error("separation not achieved: {0}")]
    SeparationNotAchieved(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Raag(#[from] RaagError),
    #[error(transparent)]
    Curtain(#[from] CurtainError),
}
