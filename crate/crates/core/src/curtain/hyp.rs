use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::CurtainError;
use crate::graph::{Graph, UNREACHED};

/// Graphs up to this many vertices get an exhaustive four-point scan; larger
/// ones are scanned exhaustively over a seeded sample of vertices.
pub const EXHAUSTIVE_DELTA_LIMIT: usize = 60;

/// Sample size for the four-point scan on large graphs.
const DELTA_SAMPLE: usize = 48;

/// A finite connected graph together with the hyperbolicity constant `E` in
/// force for curtain constructions.
///
/// `depth` is the distance of each vertex from a basepoint of the ambient
/// window (or from vertex 0 for plain graphs); guards are stated in it.
#[derive(Debug, Clone)]
pub struct HypGraph {
    graph: Graph,
    e: u32,
    depth: Vec<u32>,
}

impl HypGraph {
    pub fn new(graph: Graph, e: u32) -> Result<Self, CurtainError> {
        let depth = if graph.vertex_count() == 0 {
            Vec::new()
        } else {
            graph.bfs(0)
        };
        Self::with_depth(graph, e, depth)
    }

    /// `depth` supplies the window depth of each vertex, which predicates
    /// use to decide which vertices are trusted.
    pub fn with_depth(graph: Graph, e: u32, depth: Vec<u32>) -> Result<Self, CurtainError> {
        if e == 0 {
            return Err(CurtainError::InvalidConstant);
        }
        if !graph.is_connected() {
            return Err(CurtainError::Disconnected);
        }
        assert_eq!(depth.len(), graph.vertex_count(), "one depth per vertex");
        Ok(HypGraph { graph, e, depth })
    }

    /// Builds with `E = max(1, ceil(δ))` for the four-point δ estimate.
    pub fn estimated(graph: Graph, seed: u64) -> Result<Self, CurtainError> {
        if !graph.is_connected() {
            return Err(CurtainError::Disconnected);
        }
        let (twice_delta, _) = four_point_delta(&graph, seed);
        Self::new(graph, twice_delta.div_ceil(2).max(1))
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn len(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn depth(&self, v: u32) -> u32 {
        self.depth[v as usize]
    }

    /// Whether `v` is within `guard` (always true for `None`).
    pub fn in_scope(&self, v: u32, guard: Option<u32>) -> bool {
        guard.is_none_or(|g| self.depth[v as usize] <= g)
    }

    pub fn distance(&self, a: u32, b: u32) -> u32 {
        self.graph.distance(a, b).unwrap_or(UNREACHED)
    }

    /// Whether `path` is a geodesic: consecutive vertices adjacent and the
    /// endpoints at distance `len - 1`.
    pub fn check_geodesic(&self, path: &[u32]) -> Result<(), CurtainError> {
        if path.is_empty() {
            return Err(CurtainError::NotGeodesic("empty path".into()));
        }
        if let Some(&v) = path.iter().find(|&&v| v as usize >= self.len()) {
            return Err(CurtainError::NotGeodesic(format!(
                "vertex {v} out of range"
            )));
        }
        for w in path.windows(2) {
            if !self.graph.has_edge(w[0], w[1]) {
                return Err(CurtainError::NotGeodesic(format!(
                    "{} and {} are not adjacent",
                    w[0], w[1]
                )));
            }
        }
        let d = self.distance(path[0], *path.last().unwrap());
        if d as usize != path.len() - 1 {
            return Err(CurtainError::NotGeodesic(format!(
                "endpoints are at distance {d} but the path has length {}",
                path.len() - 1
            )));
        }
        Ok(())
    }
}

/// Twice the four-point δ: for each quadruple the three pair sums
/// `S1 ≥ S2 ≥ S3` give `S1 - S2`; the maximum over scanned quadruples is
/// returned together with whether the scan was exhaustive.
pub fn four_point_delta(graph: &Graph, seed: u64) -> (u32, bool) {
    let n = graph.vertex_count();
    if n < 4 {
        return (0, true);
    }
    let (points, exhaustive) = if n <= EXHAUSTIVE_DELTA_LIMIT {
        ((0..n as u32).collect::<Vec<_>>(), true)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut all: Vec<u32> = (0..n as u32).collect();
        all.shuffle(&mut rng);
        let mut pts: Vec<u32> = all[..DELTA_SAMPLE.min(n)].to_vec();
        // double sweeps reach far-apart points, where thin-triangle defects
        // tend to be largest
        for &start in all.iter().take(4) {
            let d = graph.bfs(start);
            let far = argmax(&d);
            let d2 = graph.bfs(far);
            pts.push(far);
            pts.push(argmax(&d2));
        }
        pts.sort_unstable();
        pts.dedup();
        (pts, false)
    };
    let rows: Vec<Vec<u32>> = points.iter().map(|&p| graph.bfs(p)).collect();
    let k = points.len();
    let d = |i: usize, j: usize| rows[i][points[j] as usize];
    let mut best = 0;
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                for e in c + 1..k {
                    let mut s = [d(a, b) + d(c, e), d(a, c) + d(b, e), d(a, e) + d(b, c)];
                    s.sort_unstable();
                    best = best.max(s[2] - s[1]);
                }
            }
        }
    }
    (best, exhaustive)
}

fn argmax(d: &[u32]) -> u32 {
    d.iter()
        .enumerate()
        .filter(|(_, &x)| x != UNREACHED)
        .max_by_key(|(i, &x)| (x, std::cmp::Reverse(*i)))
        .map(|(i, _)| i as u32)
        .unwrap_or(0)
}
