//! Standard small median graphs and a seeded generator of random ones.

use rand::seq::SliceRandom;
use rand::Rng;

use super::MedianWindow;

/// The d-cube with bit-string labels ("000", "100", ...).
pub fn cube(d: u32) -> MedianWindow {
    let n = 1u32 << d;
    let label = |v: u32| {
        (0..d)
            .map(|i| if v >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    };
    let labels = (0..n).map(label).collect();
    let mut edges = Vec::new();
    for v in 0..n {
        for i in 0..d {
            let w = v ^ (1 << i);
            if v < w {
                edges.push((v, w));
            }
        }
    }
    MedianWindow::full(labels, edges, 0).expect("cube is connected")
}

/// Path on `n` vertices labelled "0".."n-1".
pub fn path(n: u32) -> MedianWindow {
    MedianWindow::full(
        (0..n).map(|i| i.to_string()).collect(),
        (1..n).map(|i| (i - 1, i)),
        0,
    )
    .expect("path is connected")
}

/// `w × h` grid with labels "i,j", `0 <= i < w`, `0 <= j < h`.
pub fn grid(w: u32, h: u32) -> MedianWindow {
    let id = |i: u32, j: u32| i * h + j;
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    for i in 0..w {
        for j in 0..h {
            labels.push(format!("{i},{j}"));
            if i + 1 < w {
                edges.push((id(i, j), id(i + 1, j)));
            }
            if j + 1 < h {
                edges.push((id(i, j), id(i, j + 1)));
            }
        }
    }
    MedianWindow::full(labels, edges, 0).expect("grid is connected")
}

/// Cycle on `n` vertices (median only for n = 4).
pub fn cycle(n: u32) -> MedianWindow {
    MedianWindow::full(
        (0..n).map(|i| i.to_string()).collect(),
        (0..n).map(|i| (i, (i + 1) % n)),
        0,
    )
    .expect("cycle is connected")
}

/// Plain adjacency description used while assembling random graphs.
#[derive(Debug, Clone)]
struct Skeleton {
    n: u32,
    edges: Vec<(u32, u32)>,
}

impl Skeleton {
    fn tree(rng: &mut impl Rng, n: u32) -> Self {
        let edges = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
        Skeleton { n, edges }
    }

    fn product(&self, other: &Skeleton) -> Self {
        let id = |a: u32, b: u32| a * other.n + b;
        let mut edges = Vec::new();
        for &(a, a2) in &self.edges {
            for b in 0..other.n {
                edges.push((id(a, b), id(a2, b)));
            }
        }
        for a in 0..self.n {
            for &(b, b2) in &other.edges {
                edges.push((id(a, b), id(a, b2)));
            }
        }
        Skeleton {
            n: self.n * other.n,
            edges,
        }
    }

    /// A random down-set of the grid `[0, side)^dim`. Planar down-sets are
    /// median; from dimension 3 on they need not be (a cube missing its top
    /// corner is not), so callers stick to `dim = 2`.
    fn staircase(rng: &mut impl Rng, dim: usize, side: u32, cap: u32) -> Self {
        let mut cells: Vec<Vec<u32>> = vec![vec![0; dim]];
        let mut present = std::collections::HashSet::new();
        present.insert(vec![0u32; dim]);
        for _ in 0..cap * 4 {
            if cells.len() as u32 >= cap {
                break;
            }
            let base = cells[rng.gen_range(0..cells.len())].clone();
            let axis = rng.gen_range(0..dim);
            let mut next = base.clone();
            next[axis] += 1;
            if next[axis] >= side || present.contains(&next) {
                continue;
            }
            // all lower covers must exist for the result to stay a down-set
            let closed = (0..dim).all(|k| {
                if next[k] == 0 {
                    return true;
                }
                let mut lower = next.clone();
                lower[k] -= 1;
                present.contains(&lower)
            });
            if closed {
                present.insert(next.clone());
                cells.push(next);
            }
        }
        let index: std::collections::HashMap<Vec<u32>, u32> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i as u32))
            .collect();
        let mut edges = Vec::new();
        for (i, c) in cells.iter().enumerate() {
            for k in 0..dim {
                let mut up = c.clone();
                up[k] += 1;
                if let Some(&j) = index.get(&up) {
                    edges.push((i as u32, j));
                }
            }
        }
        Skeleton {
            n: cells.len() as u32,
            edges,
        }
    }

    /// Glues `other` onto `self` by identifying one vertex of each (a gated
    /// amalgam along a point).
    fn glue(&self, other: &Skeleton, at_self: u32, at_other: u32) -> Self {
        let map = |v: u32| -> u32 {
            if v == at_other {
                at_self
            } else if v < at_other {
                self.n + v
            } else {
                self.n + v - 1
            }
        };
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(a, b)| (map(a), map(b))));
        Skeleton {
            n: self.n + other.n - 1,
            edges,
        }
    }

    /// Glues along an edge: `(s0, s1)` in `self` is identified with
    /// `(o0, o1)` in `other`. Edges are convex, hence gated.
    fn glue_edge(&self, other: &Skeleton, s: (u32, u32), o: (u32, u32)) -> Self {
        let mut next = self.n;
        let map: Vec<u32> = (0..other.n)
            .map(|v| {
                if v == o.0 {
                    s.0
                } else if v == o.1 {
                    s.1
                } else {
                    next += 1;
                    next - 1
                }
            })
            .collect();
        let mut edges = self.edges.clone();
        edges.extend(
            other
                .edges
                .iter()
                .map(|&(a, b)| (map[a as usize], map[b as usize])),
        );
        edges.iter_mut().for_each(|e| {
            if e.0 > e.1 {
                *e = (e.1, e.0)
            }
        });
        edges.sort_unstable();
        edges.dedup();
        Skeleton { n: next, edges }
    }
}

fn random_piece(rng: &mut impl Rng, budget: u32) -> Skeleton {
    let budget = budget.max(2);
    match rng.gen_range(0..4) {
        0 => {
            let n = rng.gen_range(2..=budget.min(40));
            Skeleton::tree(rng, n)
        }
        1 => {
            let a = rng.gen_range(2..=6u32);
            let b = rng.gen_range(2..=(budget / a).clamp(2, 8));
            Skeleton::tree(rng, a).product(&Skeleton::tree(rng, b))
        }
        2 => Skeleton::staircase(rng, 2, 8, budget.min(40)),
        _ => {
            let t = rng.gen_range(2..=3u32);
            let cells = (budget / t).clamp(3, 20);
            Skeleton::staircase(rng, 2, 6, cells).product(&Skeleton::tree(rng, t))
        }
    }
}

/// A random finite median graph with at most `max_vertices` vertices, built
/// from trees, products of trees and planar staircases (alone or times a
/// short tree) glued along vertices and edges.
pub fn random_median_graph(rng: &mut impl Rng, max_vertices: u32) -> MedianWindow {
    let max_vertices = max_vertices.max(4);
    let mut g = random_piece(rng, max_vertices);
    while g.n > max_vertices {
        g = random_piece(rng, max_vertices);
    }
    let pieces = rng.gen_range(0..4);
    for _ in 0..pieces {
        let room = max_vertices.saturating_sub(g.n);
        if room < 3 {
            break;
        }
        let piece = random_piece(rng, room);
        if piece.n > room {
            continue;
        }
        g = if rng.gen_bool(0.5) && !piece.edges.is_empty() && !g.edges.is_empty() {
            let s = *g.edges.choose(rng).unwrap();
            let o = *piece.edges.choose(rng).unwrap();
            if g.n + piece.n - 2 > max_vertices {
                continue;
            }
            g.glue_edge(&piece, s, o)
        } else {
            let at = rng.gen_range(0..g.n);
            let at2 = rng.gen_range(0..piece.n);
            g.glue(&piece, at, at2)
        };
    }
    let labels = (0..g.n).map(|i| format!("v{i}")).collect();
    let base = rng.gen_range(0..g.n);
    MedianWindow::full(labels, g.edges, base).expect("glued pieces stay connected")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sizes_respect_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let g = random_median_graph(&mut rng, 120);
            assert!(g.len() <= 120);
        }
    }

    #[test]
    fn fixtures_have_expected_sizes() {
        assert_eq!(cube(3).len(), 8);
        assert_eq!(grid(4, 4).graph().edge_count(), 24);
        assert_eq!(path(5).graph().edge_count(), 4);
    }
}
