//! Θ-classes of edges (walls), their carriers, half-spaces and crossings.

use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::{MedianError, MedianWindow};

/// Above this many (wall, vertex) pairs the eager cut check is skipped and
/// walls are only checked when their half-spaces are first requested.
const EAGER_CUT_CHECK_BUDGET: usize = 40_000_000;

pub type WallId = u32;

/// One Θ-class.
#[derive(Debug, Clone, Serialize)]
pub struct Wall {
    pub id: WallId,
    /// Edge ids of the class, ascending.
    pub edges: Vec<u32>,
    /// Endpoints of the class edges, in canonical vertex order.
    pub carrier: Vec<u32>,
    /// Smallest basepoint distance over the carrier.
    pub depth: u32,
}

/// The two sides of a wall. `side_a` holds the endpoint of the first class
/// edge nearest the basepoint.
#[derive(Debug, Clone)]
pub struct HalfSpaces {
    pub side_a: FixedBitSet,
    pub side_b: FixedBitSet,
    /// Removing the class edges left the graph connected.
    pub degenerate: bool,
}

impl HalfSpaces {
    /// `true` for side a, `false` for side b.
    pub fn side_of(&self, v: u32) -> bool {
        self.side_a.contains(v as usize)
    }
}

#[derive(Debug)]
pub struct WallSystem {
    walls: Vec<Wall>,
    edge_wall: Vec<WallId>,
    crossings: Vec<(WallId, WallId)>,
    degenerate: Vec<WallId>,
    cut_checked: bool,
    sides: Vec<OnceLock<HalfSpaces>>,
    dimension: OnceLock<usize>,
}

struct DisjointSets {
    parent: Vec<u32>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Partitions the edges into walls by closing the "opposite sides of a
/// 4-cycle" relation under transitivity.
///
/// On full graphs a wall that fails to disconnect is an error; on windows
/// it is recorded in [`WallSystem::degenerate`] (walls cut by the horizon).
pub fn compute_walls(g: &MedianWindow) -> Result<WallSystem, MedianError> {
    let graph = g.graph();
    let m = graph.edge_count();
    let mut sets = DisjointSets::new(m);
    // (edge, edge) pairs spanning a square, recorded once per square from
    // its smallest corner
    let mut square_pairs: Vec<(u32, u32)> = Vec::new();

    for a in 0..g.len() as u32 {
        let nb = graph.neighbors(a);
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                let (b, d) = (nb[i], nb[j]);
                for &c in common(graph.neighbors(b), graph.neighbors(d)).iter() {
                    if c == a {
                        continue;
                    }
                    let ab = graph.edge_id(a, b).unwrap();
                    let ad = graph.edge_id(a, d).unwrap();
                    let bc = graph.edge_id(b, c).unwrap();
                    let dc = graph.edge_id(d, c).unwrap();
                    sets.union(ab, dc);
                    sets.union(ad, bc);
                    if a < b && a < c && a < d {
                        square_pairs.push((ab, ad));
                    }
                }
            }
        }
    }

    let mut root_members: std::collections::HashMap<u32, Vec<u32>> = Default::default();
    for e in 0..m as u32 {
        root_members.entry(sets.find(e)).or_default().push(e);
    }
    let mut classes: Vec<Vec<u32>> = root_members.into_values().collect();
    for c in &mut classes {
        c.sort_unstable();
    }
    let class_depth = |edges: &[u32]| {
        edges
            .iter()
            .map(|&e| {
                let (u, v) = graph.edge(e);
                g.depth(u).min(g.depth(v))
            })
            .min()
            .unwrap_or(0)
    };
    classes.sort_by_key(|c| (class_depth(c), c[0]));

    let mut edge_wall = vec![0u32; m];
    let mut walls = Vec::with_capacity(classes.len());
    for (id, edges) in classes.into_iter().enumerate() {
        let mut carrier: Vec<u32> = edges
            .iter()
            .flat_map(|&e| {
                let (u, v) = graph.edge(e);
                [u, v]
            })
            .collect();
        carrier.sort_unstable();
        carrier.dedup();
        g.canonical_order(&mut carrier);
        for &e in &edges {
            edge_wall[e as usize] = id as u32;
        }
        walls.push(Wall {
            id: id as u32,
            depth: class_depth(&edges),
            edges,
            carrier,
        });
    }

    let mut crossings: Vec<(u32, u32)> = square_pairs
        .into_iter()
        .map(|(e1, e2)| {
            let (w1, w2) = (edge_wall[e1 as usize], edge_wall[e2 as usize]);
            if w1 < w2 {
                (w1, w2)
            } else {
                (w2, w1)
            }
        })
        .filter(|(a, b)| a != b)
        .collect();
    crossings.sort_unstable();
    crossings.dedup();

    let sides = (0..walls.len()).map(|_| OnceLock::new()).collect();
    let mut system = WallSystem {
        walls,
        edge_wall,
        crossings,
        degenerate: Vec::new(),
        cut_checked: false,
        sides,
        dimension: OnceLock::new(),
    };

    if system.walls.len().saturating_mul(g.len()) <= EAGER_CUT_CHECK_BUDGET {
        system.cut_checked = true;
        for w in 0..system.walls.len() as u32 {
            if system.halfspaces(g, w).degenerate {
                if !g.is_window() {
                    return Err(MedianError::DegenerateWall { wall: w as usize });
                }
                system.degenerate.push(w);
            }
        }
    }
    Ok(system)
}

fn common(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

impl WallSystem {
    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn len(&self) -> usize {
        self.walls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walls.is_empty()
    }

    pub fn wall(&self, id: WallId) -> &Wall {
        &self.walls[id as usize]
    }

    pub fn wall_of_edge(&self, edge: u32) -> WallId {
        self.edge_wall[edge as usize]
    }

    /// Walls that failed the cut check (windows only).
    pub fn degenerate(&self) -> &[WallId] {
        &self.degenerate
    }

    /// Whether every wall was checked to be a cut at construction.
    pub fn cut_checked(&self) -> bool {
        self.cut_checked
    }

    /// Crossing pairs `(a, b)` with `a < b`.
    pub fn crossings(&self) -> &[(WallId, WallId)] {
        &self.crossings
    }

    /// Two walls cross when some square has one pair of opposite edges in
    /// each.
    pub fn cross(&self, a: WallId, b: WallId) -> bool {
        let key = if a < b { (a, b) } else { (b, a) };
        self.crossings.binary_search(&key).is_ok()
    }

    /// Half-spaces of a wall, computed on first request.
    pub fn halfspaces(&self, g: &MedianWindow, id: WallId) -> &HalfSpaces {
        self.sides[id as usize].get_or_init(|| {
            let wall = &self.walls[id as usize];
            let graph = g.graph();
            let (u, v) = graph.edge(wall.edges[0]);
            let (near, far) = if (g.depth(u), u) <= (g.depth(v), v) {
                (u, v)
            } else {
                (v, u)
            };
            let edge_wall = &self.edge_wall;
            let dist = graph.bfs_restricted([near], |_| true, |e| edge_wall[e as usize] != id);
            let mut side_a = FixedBitSet::with_capacity(g.len());
            for (x, &d) in dist.iter().enumerate() {
                if d != crate::graph::UNREACHED {
                    side_a.insert(x);
                }
            }
            let degenerate = side_a.contains(far as usize);
            let mut side_b = side_a.clone();
            side_b.toggle_range(..);
            HalfSpaces {
                side_a,
                side_b,
                degenerate,
            }
        })
    }

    /// Size of the largest family of pairwise crossing walls.
    pub fn dimension(&self) -> usize {
        *self.dimension.get_or_init(|| {
            if self.walls.is_empty() {
                return 0;
            }
            let mut adj: Vec<Vec<u32>> = vec![Vec::new(); self.walls.len()];
            for &(a, b) in &self.crossings {
                adj[a as usize].push(b);
                adj[b as usize].push(a);
            }
            for list in &mut adj {
                list.sort_unstable();
            }
            max_clique(&adj)
        })
    }
}

/// Bron–Kerbosch with pivoting; the crossing graphs met here are sparse
/// with small cliques.
fn max_clique(adj: &[Vec<u32>]) -> usize {
    fn expand(adj: &[Vec<u32>], size: usize, p: Vec<u32>, mut x: Vec<u32>, best: &mut usize) {
        if p.is_empty() {
            if x.is_empty() {
                *best = (*best).max(size);
            }
            return;
        }
        if size + p.len() <= *best {
            return;
        }
        let pivot = p
            .iter()
            .chain(x.iter())
            .copied()
            .max_by_key(|&u| common(&adj[u as usize], &p).len())
            .unwrap();
        let candidates: Vec<u32> = p
            .iter()
            .copied()
            .filter(|v| adj[pivot as usize].binary_search(v).is_err())
            .collect();
        let mut p = p;
        for v in candidates {
            let nv = &adj[v as usize];
            expand(adj, size + 1, common(&p, nv), common(&x, nv), best);
            p.retain(|&w| w != v);
            let pos = x.binary_search(&v).unwrap_or_else(|e| e);
            x.insert(pos, v);
        }
    }
    let mut best = 1;
    let all: Vec<u32> = (0..adj.len() as u32).collect();
    expand(adj, 0, all, Vec::new(), &mut best);
    best
}
