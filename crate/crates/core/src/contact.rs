//! Contact graphs of cube-complex windows, the action of group elements on
//! walls, and detection of product splittings.

use serde::Serialize;

use crate::curtain::{ActionAlgebra, Curtain, CurtainDoc, CurtainError, GraphAction, HypGraph};
use crate::graph::Graph;
use crate::median::{MedianWindow, WallId, WallSystem};
use crate::raag::{BallComplex, GroupElement, Letter, Presentation, RaagError};

/// Walls as nodes, joined when their carriers share a vertex (crossing walls
/// always do, through the corners of a common square).
#[derive(Debug, Clone)]
pub struct ContactGraph {
    nodes: Vec<WallId>,
    node_of_wall: Vec<Option<u32>>,
    graph: Graph,
    depth: Vec<u32>,
    labels: Vec<String>,
    excluded: usize,
}

/// Contact graph of a ball window. Walls that fail the cut check (cut up by
/// the horizon) are left out and counted in [`ContactGraph::excluded`].
pub fn build_contact_graph(b: &BallComplex) -> ContactGraph {
    build_contact_graph_of(b.window(), b.walls())
}

pub fn build_contact_graph_of(w: &MedianWindow, walls: &WallSystem) -> ContactGraph {
    let graph = w.graph();
    let mut keep = vec![true; walls.len()];
    for &d in walls.degenerate() {
        keep[d as usize] = false;
    }
    let mut node_of_wall = vec![None; walls.len()];
    let mut nodes = Vec::new();
    for wall in walls.walls() {
        if keep[wall.id as usize] {
            node_of_wall[wall.id as usize] = Some(nodes.len() as u32);
            nodes.push(wall.id);
        }
    }
    let mut edges = Vec::new();
    let mut at_vertex: Vec<u32> = Vec::new();
    for v in 0..w.len() as u32 {
        at_vertex.clear();
        at_vertex.extend(
            graph
                .incident_edges(v)
                .iter()
                .filter_map(|&e| node_of_wall[walls.wall_of_edge(e) as usize]),
        );
        at_vertex.sort_unstable();
        at_vertex.dedup();
        for i in 0..at_vertex.len() {
            for j in i + 1..at_vertex.len() {
                edges.push((at_vertex[i], at_vertex[j]));
            }
        }
    }
    let contact = Graph::from_edges(nodes.len(), edges);
    let depth = nodes.iter().map(|&id| walls.wall(id).depth).collect();
    let labels = nodes
        .iter()
        .map(|&id| {
            let (u, v) = graph.edge(walls.wall(id).edges[0]);
            let (u, v) = if (w.depth(u), u) <= (w.depth(v), v) {
                (u, v)
            } else {
                (v, u)
            };
            format!("[{}, {}]", w.label(u), w.label(v))
        })
        .collect();
    let mut cg = ContactGraph {
        nodes,
        node_of_wall,
        graph: contact,
        depth,
        labels,
        excluded: walls.len() - keep.iter().filter(|&&k| k).count(),
    };
    cg.restrict_to_main_component();
    cg
}

impl ContactGraph {
    /// Drops nodes outside the component of the shallowest node, so the
    /// result is connected.
    fn restrict_to_main_component(&mut self) {
        let n = self.nodes.len();
        if n == 0 || self.graph.is_connected() {
            return;
        }
        let (labels, _) = self.graph.components(|_| true);
        let root = (0..n).min_by_key(|&i| (self.depth[i], i)).unwrap();
        let main = labels[root];
        let kept: Vec<usize> = (0..n).filter(|&i| labels[i] == main).collect();
        let mut remap = vec![u32::MAX; n];
        for (k, &i) in kept.iter().enumerate() {
            remap[i] = k as u32;
        }
        let edges = self
            .graph
            .edges()
            .iter()
            .filter(|(a, _)| labels[*a as usize] == main)
            .map(|&(a, b)| (remap[a as usize], remap[b as usize]));
        self.graph = Graph::from_edges(kept.len(), edges.collect::<Vec<_>>());
        self.excluded += n - kept.len();
        for slot in self.node_of_wall.iter_mut() {
            *slot = slot.and_then(|i| Some(remap[i as usize]).filter(|&r| r != u32::MAX));
        }
        self.nodes = kept.iter().map(|&i| self.nodes[i]).collect();
        self.depth = kept.iter().map(|&i| self.depth[i]).collect();
        self.labels = kept.iter().map(|&i| self.labels[i].clone()).collect();
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Wall behind a node.
    pub fn wall(&self, node: u32) -> WallId {
        self.nodes[node as usize]
    }

    pub fn node(&self, wall: WallId) -> Option<u32> {
        self.node_of_wall[wall as usize]
    }

    /// Smallest basepoint distance over the wall's carrier.
    pub fn depth(&self, node: u32) -> u32 {
        self.depth[node as usize]
    }

    pub fn depths(&self) -> &[u32] {
        &self.depth
    }

    /// The shallowest edge of the wall, as `[near, far]` vertex labels.
    pub fn label(&self, node: u32) -> &str {
        &self.labels[node as usize]
    }

    /// Walls left out: cut by the horizon or outside the main component.
    pub fn excluded(&self) -> usize {
        self.excluded
    }

    /// The contact graph as a hyperbolic graph with constant `e`, with node
    /// depths as guard coordinates.
    pub fn hyp(&self, e: u32) -> Result<HypGraph, CurtainError> {
        HypGraph::with_depth(self.graph.clone(), e, self.depth.clone())
    }

    pub fn to_doc(&self) -> ContactGraphDoc {
        ContactGraphDoc {
            nodes: (0..self.len() as u32)
                .map(|i| ContactNodeDoc {
                    id: i,
                    wall: self.wall(i),
                    label: self.label(i).to_string(),
                    depth: self.depth(i),
                })
                .collect(),
            edges: self.graph.edges().iter().map(|&(a, b)| [a, b]).collect(),
            excluded: self.excluded,
        }
    }

    /// Edge list in dot syntax.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph contact {\n");
        for i in 0..self.len() as u32 {
            out.push_str(&format!("  {i} [label=\"{}\"];\n", self.label(i)));
        }
        for &(a, b) in self.graph.edges() {
            out.push_str(&format!("  {a} -- {b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContactNodeDoc {
    pub id: u32,
    pub wall: WallId,
    pub label: String,
    pub depth: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContactGraphDoc {
    pub nodes: Vec<ContactNodeDoc>,
    pub edges: Vec<[u32; 2]>,
    pub excluded: usize,
}

/// Node of the translate `g·W`, found through the first edge of `W` (in
/// depth order) whose translate lies in the window.
fn translate_by_word(b: &BallComplex, cg: &ContactGraph, g: &[Letter], node: u32) -> Option<u32> {
    let walls = b.walls();
    let graph = b.window().graph();
    let wall = walls.wall(cg.wall(node));
    let mut edges: Vec<u32> = wall.edges.clone();
    let depth = |e: u32| {
        let (u, v) = graph.edge(e);
        b.window().depth(u).max(b.window().depth(v))
    };
    edges.sort_by_key(|&e| (depth(e), e));
    for e in edges {
        let (u, v) = graph.edge(e);
        let (Some(gu), Some(gv)) = (b.act_word(g, u), b.act_word(g, v)) else {
            continue;
        };
        let image = graph
            .edge_id(gu, gv)
            .expect("the action preserves adjacency");
        return cg.node(walls.wall_of_edge(image));
    }
    None
}

/// Guarded translation: the translate must have an edge within the guard.
pub fn translate_node(
    b: &BallComplex,
    cg: &ContactGraph,
    g: &GroupElement,
    node: u32,
) -> Result<u32, RaagError> {
    let image = translate_by_word(b, cg, g.letters(), node);
    match image {
        Some(n) if cg.depth(n) < b.guard() => Ok(n),
        _ => Err(RaagError::HorizonExceeded {
            element: format!("{} · {}", b.presentation().render(g), cg.label(node)),
            guard: b.guard(),
        }),
    }
}

/// A group element acting on contact-graph nodes, defined wherever the
/// translated wall still has an edge in the window.
#[derive(Debug, Clone)]
pub struct WallAction<'a> {
    ball: &'a BallComplex,
    contact: &'a ContactGraph,
    element: GroupElement,
    inverse: GroupElement,
}

impl<'a> WallAction<'a> {
    pub fn new(ball: &'a BallComplex, contact: &'a ContactGraph, element: GroupElement) -> Self {
        let inverse = ball.presentation().inverse(&element);
        WallAction {
            ball,
            contact,
            element,
            inverse,
        }
    }

    pub fn element(&self) -> &GroupElement {
        &self.element
    }

    fn presentation(&self) -> &Presentation {
        self.ball.presentation()
    }
}

impl GraphAction for WallAction<'_> {
    fn image(&self, v: u32) -> Option<u32> {
        translate_by_word(self.ball, self.contact, self.element.letters(), v)
    }

    fn preimage(&self, v: u32) -> Option<u32> {
        translate_by_word(self.ball, self.contact, self.inverse.letters(), v)
    }
}

impl ActionAlgebra for WallAction<'_> {
    fn power(&self, m: u32) -> Self {
        WallAction::new(
            self.ball,
            self.contact,
            self.presentation().power(&self.element, m as i64),
        )
    }

    fn then(&self, next: &Self) -> Self {
        WallAction::new(
            self.ball,
            self.contact,
            self.presentation().multiply(&next.element, &self.element),
        )
    }
}

/// A group element acting on the vertices of a ball window, defined where
/// the image stays inside the horizon.
#[derive(Debug, Clone)]
pub struct VertexAction<'a> {
    ball: &'a BallComplex,
    element: GroupElement,
    inverse: GroupElement,
}

impl<'a> VertexAction<'a> {
    pub fn new(ball: &'a BallComplex, element: GroupElement) -> Self {
        let inverse = ball.presentation().inverse(&element);
        VertexAction {
            ball,
            element,
            inverse,
        }
    }

    pub fn element(&self) -> &GroupElement {
        &self.element
    }
}

impl GraphAction for VertexAction<'_> {
    fn image(&self, v: u32) -> Option<u32> {
        self.ball.act_word(self.element.letters(), v)
    }

    fn preimage(&self, v: u32) -> Option<u32> {
        self.ball.act_word(self.inverse.letters(), v)
    }
}

impl ActionAlgebra for VertexAction<'_> {
    fn power(&self, m: u32) -> Self {
        VertexAction::new(
            self.ball,
            self.ball.presentation().power(&self.element, m as i64),
        )
    }

    fn then(&self, next: &Self) -> Self {
        VertexAction::new(
            self.ball,
            self.ball
                .presentation()
                .multiply(&next.element, &self.element),
        )
    }
}

/// The curtain of a cubical wall: its carrier as the pole and the side of
/// `plus_vertex` as `k⁺`.
pub fn wall_curtain(
    ball: &BallComplex,
    wall: WallId,
    plus_vertex: u32,
) -> Result<Curtain, CurtainError> {
    let window = ball.window();
    let walls = ball.walls();
    let hs = walls.halfspaces(window, wall);
    let (plus, minus) = if hs.side_a.contains(plus_vertex as usize) {
        (&hs.side_a, &hs.side_b)
    } else {
        (&hs.side_b, &hs.side_a)
    };
    let (u, v) = window.graph().edge(walls.wall(wall).edges[0]);
    let (u, v) = if plus.contains(u as usize) {
        (v, u)
    } else {
        (u, v)
    };
    let doc = CurtainDoc {
        axis: vec![u, v],
        offset: 0,
        e: 1,
        interval: [0, 0],
        pole: walls.wall(wall).carrier.clone(),
        plus: plus.ones().map(|x| x as u32).collect(),
        minus: minus.ones().map(|x| x as u32).collect(),
    };
    Curtain::from_doc(&doc, window.len())
}

/// A splitting of the interior walls into two families that cross each
/// other completely.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductWitness {
    pub family_a: Vec<WallId>,
    pub family_b: Vec<WallId>,
    /// Labels of the shallowest edge of each wall, parallel to the families.
    pub labels_a: Vec<String>,
    pub labels_b: Vec<String>,
    /// Components of the non-crossing graph on interior walls.
    pub components: usize,
    /// Interior walls considered.
    pub interior_walls: usize,
    /// Found on a window, so evidence about the window rather than a proof
    /// about the whole complex.
    pub window_evidence: bool,
}

/// Looks for a join splitting of the walls: components of the "does not
/// cross" graph on interior walls. Two or more components give candidate
/// factors.
///
/// Interior walls are the non-degenerate walls whose carrier comes within the
/// guard radius; their crossings with each other are all visible.
pub fn detect_product(b: &BallComplex) -> Option<ProductWitness> {
    detect_product_of(b.window(), b.walls())
}

pub fn detect_product_of(w: &MedianWindow, walls: &WallSystem) -> Option<ProductWitness> {
    let degenerate: std::collections::HashSet<WallId> =
        walls.degenerate().iter().copied().collect();
    let interior: Vec<WallId> = walls
        .walls()
        .iter()
        .filter(|wall| wall.depth <= w.guard() && !degenerate.contains(&wall.id))
        .map(|wall| wall.id)
        .collect();
    let k = interior.len();
    if k < 2 {
        return None;
    }
    // BFS in the complement of the crossing graph
    let mut comp = vec![usize::MAX; k];
    let mut count = 0;
    for s in 0..k {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = count;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for v in 0..k {
                if comp[v] == usize::MAX && !walls.cross(interior[u], interior[v]) {
                    comp[v] = count;
                    stack.push(v);
                }
            }
        }
        count += 1;
    }
    if count < 2 {
        return None;
    }
    let family_a: Vec<WallId> = (0..k)
        .filter(|&i| comp[i] == 0)
        .map(|i| interior[i])
        .collect();
    let family_b: Vec<WallId> = (0..k)
        .filter(|&i| comp[i] != 0)
        .map(|i| interior[i])
        .collect();
    debug_assert!(family_a
        .iter()
        .all(|&a| family_b.iter().all(|&b| walls.cross(a, b))));
    let label = |id: WallId| {
        let (u, v) = w.graph().edge(walls.wall(id).edges[0]);
        let (u, v) = if (w.depth(u), u) <= (w.depth(v), v) {
            (u, v)
        } else {
            (v, u)
        };
        format!("[{}, {}]", w.label(u), w.label(v))
    };
    Some(ProductWitness {
        labels_a: family_a.iter().map(|&id| label(id)).collect(),
        labels_b: family_b.iter().map(|&id| label(id)).collect(),
        family_a,
        family_b,
        components: count,
        interior_walls: k,
        window_evidence: w.is_window(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::median::{compute_walls, fixtures::cube};
    use crate::raag::build_window;

    #[test]
    fn single_square() {
        let sq = cube(2);
        let ws = compute_walls(&sq).unwrap();
        let cg = build_contact_graph_of(&sq, &ws);
        assert_eq!(cg.len(), 2);
        assert_eq!(cg.graph().edge_count(), 1);
    }

    #[test]
    fn translate_examples() {
        let p = Presentation::free(&["a", "b"]);
        let b = build_window(&p, 6).unwrap();
        let cg = build_contact_graph(&b);
        let wall_of = |u: &str, v: &str| {
            let (u, v) = (b.window().vertex(u).unwrap(), b.window().vertex(v).unwrap());
            let e = b.window().graph().edge_id(u, v).unwrap();
            cg.node(b.walls().wall_of_edge(e)).unwrap()
        };
        let a = p.parse("a").unwrap();
        let n = wall_of("e", "a");
        assert_eq!(
            translate_node(&b, &cg, &GroupElement::identity(), n).unwrap(),
            n
        );
        assert_eq!(translate_node(&b, &cg, &a, n).unwrap(), wall_of("a", "a²"));
    }

    #[test]
    fn product_detection() {
        let z2 = Presentation::new(&["x", "y"], &[("x", "y")]).unwrap();
        let b = build_window(&z2, 6).unwrap();
        let w = detect_product(&b).unwrap();
        assert!(w.window_evidence);
        assert_eq!(w.components, 2);
        let f2 = Presentation::free(&["a", "b"]);
        assert!(detect_product(&build_window(&f2, 6).unwrap()).is_none());
    }
}
