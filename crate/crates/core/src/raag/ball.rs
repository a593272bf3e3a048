use std::collections::HashMap;
use std::sync::OnceLock;

use super::{GroupElement, Letter, Presentation, RaagError};
use crate::median::{compute_walls, MedianWindow, WallSystem};
use crate::raag::presentation::shortlex_cmp;

/// A ball of the Salvetti universal cover's 1-skeleton (the Cayley graph)
/// around the identity, as a [`MedianWindow`].
///
/// Vertex ids follow shortlex order of the normal forms, so the identity is
/// vertex 0 and the canonical (depth, id) order is shortlex.
#[derive(Debug)]
pub struct BallComplex {
    presentation: Presentation,
    window: MedianWindow,
    elements: Vec<Vec<Letter>>,
    index: HashMap<Vec<Letter>, u32>,
    walls: OnceLock<WallSystem>,
}

/// Materializes all elements of length at most `horizon`, joined by
/// generator edges. The guard radius is `horizon / 3`.
pub fn build_window(p: &Presentation, horizon: u32) -> Result<BallComplex, RaagError> {
    build_window_with_cap(p, horizon, crate::budget::vertex_cap())
}

pub fn build_window_with_cap(
    p: &Presentation,
    horizon: u32,
    cap: usize,
) -> Result<BallComplex, RaagError> {
    if horizon < 2 {
        return Err(RaagError::InvalidArgument(format!(
            "horizon must be at least 2, got {horizon}"
        )));
    }
    let mut elements: Vec<Vec<Letter>> = vec![Vec::new()];
    let mut index: HashMap<Vec<Letter>, u32> = HashMap::from([(Vec::new(), 0)]);
    let mut layer_start = 0;
    for len in 0..horizon as usize {
        let layer_end = elements.len();
        let mut next: Vec<Vec<Letter>> = Vec::new();
        for v in layer_start..layer_end {
            for l in p.letters() {
                let mut word = elements[v].clone();
                word.push(l);
                let nf = p.normal_form(&word);
                if nf.len() == len + 1 && !index.contains_key(&nf) {
                    index.insert(nf.clone(), u32::MAX);
                    next.push(nf);
                }
            }
            if index.len() > cap {
                return Err(RaagError::BudgetExceeded {
                    count: index.len(),
                    cap,
                });
            }
        }
        next.sort_unstable_by(|a, b| shortlex_cmp(a, b));
        for nf in next {
            index.insert(nf.clone(), elements.len() as u32);
            elements.push(nf);
        }
        layer_start = layer_end;
    }

    let mut edges = Vec::new();
    for (v, nf) in elements.iter().enumerate() {
        for g in 0..p.rank() {
            let mut word = nf.clone();
            word.push(Letter::new(g, false));
            if let Some(&w) = index.get(&p.normal_form(&word)) {
                edges.push((v as u32, w));
            }
        }
    }
    let labels = elements.iter().map(|nf| p.render_word(nf)).collect();
    let window = MedianWindow::new(labels, edges, 0, horizon, horizon / 3, true)
        .map_err(|e| RaagError::InvalidArgument(e.to_string()))?;
    Ok(BallComplex {
        presentation: p.clone(),
        window,
        elements,
        index,
        walls: OnceLock::new(),
    })
}

impl BallComplex {
    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn window(&self) -> &MedianWindow {
        &self.window
    }

    pub fn horizon(&self) -> u32 {
        self.window.horizon()
    }

    pub fn guard(&self) -> u32 {
        self.window.guard()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Walls of the window, computed on first use. Walls cut by the horizon
    /// are tagged degenerate rather than rejected.
    pub fn walls(&self) -> &WallSystem {
        self.walls.get_or_init(|| {
            compute_walls(&self.window).expect("wall computation on a window does not fail")
        })
    }

    pub fn element(&self, v: u32) -> GroupElement {
        self.presentation.element(&self.elements[v as usize])
    }

    pub fn normal_form_of(&self, v: u32) -> &[Letter] {
        &self.elements[v as usize]
    }

    pub fn vertex_of(&self, g: &GroupElement) -> Option<u32> {
        self.index.get(g.letters()).copied()
    }

    /// Vertex labelled `g · label(v)` when that element lies in the window.
    pub fn act_partial(&self, g: &GroupElement, v: u32) -> Option<u32> {
        self.act_word(g.letters(), v)
    }

    pub(crate) fn act_word(&self, g: &[Letter], v: u32) -> Option<u32> {
        let word: Vec<Letter> = g
            .iter()
            .chain(&self.elements[v as usize])
            .copied()
            .collect();
        let nf = self.presentation.normal_form(&word);
        if nf.len() > self.horizon() as usize {
            return None;
        }
        self.index.get(&nf).copied()
    }

    /// The guarded action: the image must lie within the guard radius.
    pub fn act_vertex(&self, g: &GroupElement, v: u32) -> Result<u32, RaagError> {
        let image = self.presentation.multiply(g, &self.element(v));
        if image.length() > self.guard() as usize {
            return Err(RaagError::HorizonExceeded {
                element: self.presentation.render(&image),
                guard: self.guard(),
            });
        }
        Ok(self.vertex_of(&image).expect("guard ball is materialized"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_group_ball_counts() {
        let p = Presentation::free(&["a", "b"]);
        let b = build_window(&p, 3).unwrap();
        assert_eq!(b.len(), 53);
        assert_eq!(b.window().graph().edge_count(), 52);
        assert_eq!(b.guard(), 1);
    }

    #[test]
    fn z2_ball_is_a_diamond() {
        let p = Presentation::new(&["x", "y"], &[("x", "y")]).unwrap();
        assert_eq!(build_window(&p, 2).unwrap().len(), 13);
    }

    #[test]
    fn identity_is_vertex_zero() {
        let p = Presentation::tree_of_flats();
        let b = build_window(&p, 3).unwrap();
        assert_eq!(b.window().label(0), "e");
        assert!(b.element(0).is_identity());
    }

    #[test]
    fn budget_is_enforced() {
        let p = Presentation::free(&["a", "b"]);
        assert!(matches!(
            build_window_with_cap(&p, 6, 100),
            Err(RaagError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn action_examples() {
        let p = Presentation::tree_of_flats();
        let b = build_window(&p, 6).unwrap();
        let g = p.parse("z x z⁻¹").unwrap();
        let v = b.vertex_of(&p.parse("z").unwrap()).unwrap();
        let w = b.act_vertex(&g, v).unwrap();
        assert_eq!(b.window().label(w), "z x");
        assert_eq!(b.act_vertex(&GroupElement::identity(), v).unwrap(), v);
        let far = p.parse("x³").unwrap();
        assert!(matches!(
            b.act_vertex(&far, v),
            Err(RaagError::HorizonExceeded { .. })
        ));
    }
}
