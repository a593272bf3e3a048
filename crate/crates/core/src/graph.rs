//! Compact undirected simple graphs in CSR form plus the breadth-first
//! searches every other module leans on.

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;

/// Sentinel distance for vertices a search never reached.
pub const UNREACHED: u32 = u32::MAX;

/// Undirected simple graph with sorted adjacency lists.
///
/// Each undirected edge has a stable id (its index in [`Graph::edges`]),
/// shared by both adjacency slots.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    slot_edge: Vec<u32>,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    /// Builds a graph on `n` vertices. Loops are dropped and parallel edges
    /// merged; edge ids follow the sorted `(min, max)` order.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut list: Vec<(u32, u32)> = edges
            .into_iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        list.sort_unstable();
        list.dedup();

        let mut degree = vec![0usize; n];
        for &(a, b) in &list {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; offsets[n]];
        let mut slot_edge = vec![0u32; offsets[n]];
        for (id, &(a, b)) in list.iter().enumerate() {
            let sa = fill[a as usize];
            targets[sa] = b;
            slot_edge[sa] = id as u32;
            fill[a as usize] += 1;
            let sb = fill[b as usize];
            targets[sb] = a;
            slot_edge[sb] = id as u32;
            fill[b as usize] += 1;
        }
        // Edges were inserted in sorted order, so only the slots written
        // through the `b` side can be out of order.
        for v in 0..n {
            let (lo, hi) = (offsets[v], offsets[v + 1]);
            let mut pairs: Vec<(u32, u32)> = targets[lo..hi]
                .iter()
                .copied()
                .zip(slot_edge[lo..hi].iter().copied())
                .collect();
            pairs.sort_unstable();
            for (k, (t, e)) in pairs.into_iter().enumerate() {
                targets[lo + k] = t;
                slot_edge[lo + k] = e;
            }
        }
        Graph {
            offsets,
            targets,
            slot_edge,
            edges: list,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge(&self, id: u32) -> (u32, u32) {
        self.edges[id as usize]
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Edge ids incident to `v`, aligned with [`Graph::neighbors`].
    pub fn incident_edges(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.slot_edge[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.neighbors(v).len()
    }

    pub fn edge_id(&self, a: u32, b: u32) -> Option<u32> {
        let nb = self.neighbors(a);
        nb.binary_search(&b).ok().map(|k| self.incident_edges(a)[k])
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Single-source BFS distances.
    pub fn bfs(&self, source: u32) -> Vec<u32> {
        self.bfs_multi(std::iter::once(source))
    }

    /// Multi-source BFS distances.
    pub fn bfs_multi(&self, sources: impl IntoIterator<Item = u32>) -> Vec<u32> {
        self.bfs_restricted(sources, |_| true, |_| true)
    }

    /// BFS that only enters vertices accepted by `vertex_ok` and only uses
    /// edges accepted by `edge_ok` (by edge id).
    pub fn bfs_restricted(
        &self,
        sources: impl IntoIterator<Item = u32>,
        vertex_ok: impl Fn(u32) -> bool,
        edge_ok: impl Fn(u32) -> bool,
    ) -> Vec<u32> {
        let mut dist = vec![UNREACHED; self.vertex_count()];
        let mut queue = VecDeque::new();
        for s in sources {
            if dist[s as usize] == UNREACHED && vertex_ok(s) {
                dist[s as usize] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for (&w, &e) in self.neighbors(u).iter().zip(self.incident_edges(u)) {
                if dist[w as usize] == UNREACHED && edge_ok(e) && vertex_ok(w) {
                    dist[w as usize] = du + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Distance between two vertices, stopping as soon as `target` is settled.
    pub fn distance(&self, source: u32, target: u32) -> Option<u32> {
        if source == target {
            return Some(0);
        }
        let mut dist = vec![UNREACHED; self.vertex_count()];
        let mut queue = VecDeque::from([source]);
        dist[source as usize] = 0;
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for &w in self.neighbors(u) {
                if dist[w as usize] == UNREACHED {
                    dist[w as usize] = du + 1;
                    if w == target {
                        return Some(du + 1);
                    }
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// A shortest path from `source` to `target`. Among shortest paths the
    /// one preferring smaller vertex ids at each step from the source side is
    /// returned, so the result is deterministic.
    pub fn shortest_path(&self, source: u32, target: u32) -> Option<Vec<u32>> {
        let to_target = self.bfs(target);
        if to_target[source as usize] == UNREACHED {
            return None;
        }
        let mut path = vec![source];
        let mut cur = source;
        while cur != target {
            let d = to_target[cur as usize];
            cur = *self
                .neighbors(cur)
                .iter()
                .find(|&&w| to_target[w as usize] + 1 == d)
                .expect("bfs layering is consistent");
            path.push(cur);
        }
        Some(path)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        n == 0 || self.bfs(0).iter().all(|&d| d != UNREACHED)
    }

    /// Connected components as a label per vertex plus the component count.
    pub fn components(&self, vertex_ok: impl Fn(u32) -> bool) -> (Vec<u32>, usize) {
        let n = self.vertex_count();
        let mut label = vec![UNREACHED; n];
        let mut count = 0u32;
        for s in 0..n as u32 {
            if label[s as usize] != UNREACHED || !vertex_ok(s) {
                continue;
            }
            label[s as usize] = count;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in self.neighbors(u) {
                    if label[w as usize] == UNREACHED && vertex_ok(w) {
                        label[w as usize] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (label, count as usize)
    }

    /// Vertices whose BFS distance from `source` is finite, as a bitset.
    pub fn reachable(&self, source: u32, vertex_ok: impl Fn(u32) -> bool) -> FixedBitSet {
        let dist = self.bfs_restricted([source], vertex_ok, |_| true);
        let mut set = FixedBitSet::with_capacity(self.vertex_count());
        for (v, &d) in dist.iter().enumerate() {
            if d != UNREACHED {
                set.insert(v);
            }
        }
        set
    }
}

/// Set of nodes as a bitset sized to the owning graph.
pub fn bitset_from(n: usize, members: impl IntoIterator<Item = u32>) -> FixedBitSet {
    let mut set = FixedBitSet::with_capacity(n);
    for m in members {
        set.insert(m as usize);
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: u32) -> Graph {
        Graph::from_edges(n as usize, (0..n).map(|i| (i, (i + 1) % n)))
    }

    #[test]
    fn adjacency_is_sorted_and_edge_ids_are_shared() {
        let g = Graph::from_edges(4, [(3, 0), (0, 1), (2, 1), (1, 0), (2, 2)]);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.neighbors(0), &[1, 3]);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.edge_id(0, 1), g.edge_id(1, 0));
        assert!(g.edge_id(0, 2).is_none());
    }

    #[test]
    fn bfs_on_cycle() {
        let g = cycle(6);
        assert_eq!(g.bfs(0), vec![0, 1, 2, 3, 2, 1]);
        assert_eq!(g.distance(0, 3), Some(3));
        assert_eq!(g.shortest_path(0, 3), Some(vec![0, 1, 2, 3]));
    }

    #[test]
    fn components_respect_filter() {
        let g = cycle(6);
        let (_, count) = g.components(|v| v != 0 && v != 3);
        assert_eq!(count, 2);
        assert!(g.is_connected());
    }
}
