//! Right-angled Artin groups: presentations, shortlex normal forms, balls of
//! the Salvetti universal cover and the left action on them.

mod ball;
mod presentation;

use std::collections::HashSet;

pub use ball::{build_window, build_window_with_cap, BallComplex};
pub use presentation::{shortlex_cmp, GroupElement, Letter, Presentation, PresentationDoc};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RaagError {
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("budget exceeded: {count} items against a cap of {cap}")]
    BudgetExceeded { count: usize, cap: usize },
    #[error("element {element} lies outside the guard radius {guard}")]
    HorizonExceeded { element: String, guard: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Every element that is a product of at most `m` factors from `T ∪ T⁻¹`,
/// paired with its T-length and sorted by (T-length, shortlex).
pub fn enumerate_with_lengths(
    p: &Presentation,
    t: &[GroupElement],
    m: usize,
    cap: usize,
) -> Result<Vec<(GroupElement, usize)>, RaagError> {
    if m == 0 {
        return Err(RaagError::InvalidArgument("m must be at least 1".into()));
    }
    let mut factors = Vec::with_capacity(2 * t.len());
    for g in t {
        factors.push(g.clone());
        factors.push(p.inverse(g));
    }
    let mut seen: HashSet<GroupElement> = HashSet::from([GroupElement::identity()]);
    let mut out = vec![(GroupElement::identity(), 0)];
    let mut frontier = vec![GroupElement::identity()];
    for step in 1..=m {
        let mut next = Vec::new();
        for g in &frontier {
            for f in &factors {
                let h = p.multiply(g, f);
                if seen.insert(h.clone()) {
                    next.push(h);
                }
            }
            if seen.len() > cap {
                return Err(RaagError::BudgetExceeded {
                    count: seen.len(),
                    cap,
                });
            }
        }
        next.sort_by(|a, b| a.shortlex_cmp(b));
        out.extend(next.iter().cloned().map(|g| (g, step)));
        frontier = next;
    }
    Ok(out)
}

pub fn enumerate_elements(
    p: &Presentation,
    t: &[GroupElement],
    m: usize,
) -> Result<Vec<GroupElement>, RaagError> {
    Ok(
        enumerate_with_lengths(p, t, m, crate::budget::vertex_cap())?
            .into_iter()
            .map(|(g, _)| g)
            .collect(),
    )
}
