use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::{MedianError, MedianWindow, WallId, WallSystem};

/// Checks the unique-median property over every vertex triple.
pub fn validate_median(g: &MedianWindow) -> Result<bool, MedianError> {
    if g.is_window() {
        return Err(MedianError::WindowNotCheckable);
    }
    let n = g.len();
    let rows: Vec<Vec<u32>> = (0..n as u32).map(|v| g.distances_from(v)).collect();
    let interval_row = |x: usize| -> Vec<FixedBitSet> {
        (0..n)
            .map(|y| {
                let dxy = rows[x][y];
                let mut set = FixedBitSet::with_capacity(n);
                for m in 0..n {
                    if rows[x][m] + rows[m][y] == dxy {
                        set.insert(m);
                    }
                }
                set
            })
            .collect()
    };
    for x in 0..n {
        let ix = interval_row(x);
        for y in x..n {
            let iy = interval_row(y);
            for z in y..n {
                let mut meet = ix[y].clone();
                meet.intersect_with(&ix[z]);
                meet.intersect_with(&iy[z]);
                if meet.count_ones(..) != 1 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn guarded(g: &MedianWindow, vs: &[u32]) -> Result<(), MedianError> {
    vs.iter().try_for_each(|&v| g.check_guard(v))
}

pub fn distance(g: &MedianWindow, x: u32, y: u32) -> Result<u32, MedianError> {
    guarded(g, &[x, y])?;
    Ok(g.raw_distance(x, y))
}

/// Vertices on some geodesic from `x` to `y`, in canonical order.
pub fn interval(g: &MedianWindow, x: u32, y: u32) -> Result<Vec<u32>, MedianError> {
    guarded(g, &[x, y])?;
    let (dx, dy) = (g.distances_from(x), g.distances_from(y));
    let d = dx[y as usize];
    let mut out: Vec<u32> = (0..g.len() as u32)
        .filter(|&v| dx[v as usize] + dy[v as usize] == d)
        .collect();
    g.canonical_order(&mut out);
    Ok(out)
}

/// Walls crossed by a geodesic from `x` to `y`, listed in the order the
/// geodesic crosses them. A geodesic in a median graph crosses each wall at
/// most once, and crosses exactly the walls separating its endpoints.
fn walls_along(g: &MedianWindow, walls: &WallSystem, x: u32, y: u32) -> Vec<WallId> {
    let graph = g.graph();
    let path = graph.shortest_path(x, y).expect("windows are connected");
    path.windows(2)
        .map(|p| walls.wall_of_edge(graph.edge_id(p[0], p[1]).unwrap()))
        .collect()
}

/// Walls with `x` and `y` on opposite sides, in wall-index order.
pub fn separating_walls(
    g: &MedianWindow,
    walls: &WallSystem,
    x: u32,
    y: u32,
) -> Result<Vec<WallId>, MedianError> {
    guarded(g, &[x, y])?;
    // odd crossing count along any path is the separation criterion
    let mut parity = std::collections::BTreeMap::new();
    for w in walls_along(g, walls, x, y) {
        *parity.entry(w).or_insert(0u32) += 1;
    }
    Ok(parity
        .into_iter()
        .filter(|&(_, c)| c % 2 == 1)
        .map(|(w, _)| w)
        .collect())
}

pub fn median(g: &MedianWindow, x: u32, y: u32, z: u32) -> Result<u32, MedianError> {
    guarded(g, &[x, y, z])?;
    let (dx, dy, dz) = (
        g.distances_from(x),
        g.distances_from(y),
        g.distances_from(z),
    );
    let (xy, yz, xz) = (dx[y as usize], dy[z as usize], dx[z as usize]);
    let mut found = None;
    for m in 0..g.len() {
        if dx[m] + dy[m] == xy && dy[m] + dz[m] == yz && dx[m] + dz[m] == xz {
            if found.is_some() {
                found = None;
                break;
            }
            found = Some(m as u32);
        }
    }
    found.ok_or_else(|| {
        MedianError::NoMedian(format!("({}, {}, {})", g.label(x), g.label(y), g.label(z)))
    })
}

/// An interval-closed vertex set together with the number of productive
/// J-rounds that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvexSet {
    /// Members in canonical order.
    pub members: Vec<u32>,
    /// J applications that added at least one vertex before the fixed point.
    pub rounds: u32,
    #[serde(skip)]
    set: FixedBitSet,
}

impl ConvexSet {
    /// Wraps an arbitrary vertex set after checking it is interval-closed.
    pub fn from_members(g: &MedianWindow, members: &[u32]) -> Result<Self, MedianError> {
        guarded(g, members)?;
        let set = crate::graph::bitset_from(g.len(), members.iter().copied());
        let mut sorted: Vec<u32> = set.ones().map(|v| v as u32).collect();
        g.canonical_order(&mut sorted);
        let cs = ConvexSet {
            members: sorted,
            rounds: 0,
            set,
        };
        if let Some((a, b)) = cs.escaping_pair(g) {
            return Err(MedianError::NotConvex(format!(
                "a geodesic from {} to {} leaves the set",
                g.label(a),
                g.label(b)
            )));
        }
        Ok(cs)
    }

    pub fn contains(&self, v: u32) -> bool {
        self.set.contains(v as usize)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Re-checks interval closure pair by pair.
    pub fn certify(&self, g: &MedianWindow) -> bool {
        self.escaping_pair(g).is_none()
    }

    fn escaping_pair(&self, g: &MedianWindow) -> Option<(u32, u32)> {
        let rows: Vec<Vec<u32>> = self.members.iter().map(|&m| g.distances_from(m)).collect();
        for i in 0..self.members.len() {
            for j in i + 1..self.members.len() {
                let d = rows[i][self.members[j] as usize];
                let leaves =
                    (0..g.len()).any(|v| rows[i][v] + rows[j][v] == d && !self.set.contains(v));
                if leaves {
                    return Some((self.members[i], self.members[j]));
                }
            }
        }
        None
    }
}

/// Smallest interval-closed superset of `ys`, by iterating
/// J(Y) = union of intervals between members of Y.
pub fn hull(g: &MedianWindow, ys: &[u32]) -> Result<ConvexSet, MedianError> {
    guarded(g, ys)?;
    let n = g.len();
    let mut set = crate::graph::bitset_from(n, ys.iter().copied());
    let mut members: Vec<u32> = set.ones().map(|v| v as u32).collect();
    let mut rows: Vec<Vec<u32>> = members.iter().map(|&m| g.distances_from(m)).collect();
    let mut rounds = 0;
    loop {
        let mut next = set.clone();
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                let d = rows[i][members[j] as usize];
                for v in 0..n {
                    if rows[i][v] + rows[j][v] == d {
                        next.insert(v);
                    }
                }
            }
        }
        if next == set {
            break;
        }
        rounds += 1;
        let fresh: Vec<u32> = next.difference(&set).map(|v| v as u32).collect();
        if g.is_window() {
            if let Some(&v) = fresh.iter().find(|&&v| g.depth(v) >= g.horizon()) {
                return Err(MedianError::HorizonExceeded {
                    vertex: g.label(v).to_string(),
                    guard: g.guard(),
                });
            }
        }
        for v in fresh {
            members.push(v);
            rows.push(g.distances_from(v));
        }
        set = next;
    }
    g.canonical_order(&mut members);
    Ok(ConvexSet {
        members,
        rounds,
        set,
    })
}

/// Nearest vertex of the convex set `y` to `x`.
///
/// The result `p` is checked against the wall characterization: every wall
/// separating `x` from `p` also separates `x` from all of `y`. Since
/// distance counts separating walls, this is the same as `p` lying on a
/// geodesic from `x` to each member of `y`.
pub fn gate_projection(g: &MedianWindow, y: &ConvexSet, x: u32) -> Result<u32, MedianError> {
    guarded(g, &[x])?;
    if y.contains(x) {
        return Ok(x);
    }
    let dx = g.distances_from(x);
    let best = y
        .members
        .iter()
        .map(|&m| dx[m as usize])
        .min()
        .ok_or_else(|| MedianError::NotConvex("empty set has no gate".into()))?;
    let nearest: Vec<u32> = y
        .members
        .iter()
        .copied()
        .filter(|&m| dx[m as usize] == best)
        .collect();
    if nearest.len() != 1 {
        return Err(MedianError::NotConvex(format!(
            "{} vertices tie for nearest to {}",
            nearest.len(),
            g.label(x)
        )));
    }
    let p = nearest[0];
    let dp = g.distances_from(p);
    if let Some(&bad) = y
        .members
        .iter()
        .find(|&&m| dx[m as usize] != best + dp[m as usize])
    {
        return Err(MedianError::NotConvex(format!(
            "gate {} is not on a geodesic from {} to {}",
            g.label(p),
            g.label(x),
            g.label(bad)
        )));
    }
    Ok(p)
}

/// A longest chain among the walls separating `x` from `y`, in the order a
/// geodesic from `x` meets them.
///
/// Two separating walls that do not cross are nested, and nesting is
/// transitive along the geodesic, so chains are exactly the pairwise
/// non-crossing subsequences; the longest one comes from a DP over
/// geodesic positions.
pub fn maximal_wall_chain(
    g: &MedianWindow,
    walls: &WallSystem,
    x: u32,
    y: u32,
) -> Result<Vec<WallId>, MedianError> {
    guarded(g, &[x, y])?;
    let seq = walls_along(g, walls, x, y);
    if seq.is_empty() {
        return Ok(Vec::new());
    }
    let k = seq.len();
    let mut best = vec![1usize; k];
    let mut prev = vec![usize::MAX; k];
    for j in 0..k {
        for i in 0..j {
            if !walls.cross(seq[i], seq[j]) && best[i] + 1 > best[j] {
                best[j] = best[i] + 1;
                prev[j] = i;
            }
        }
    }
    let mut end = (0..k)
        .max_by_key(|&j| (best[j], std::cmp::Reverse(j)))
        .unwrap();
    let mut chain = vec![seq[end]];
    while prev[end] != usize::MAX {
        end = prev[end];
        chain.push(seq[end]);
    }
    chain.reverse();
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::median::compute_walls;
    use crate::median::fixtures::{cube, cycle, grid, path};

    #[test]
    fn median_validation_examples() {
        assert!(validate_median(&cube(3)).unwrap());
        assert!(!validate_median(&cycle(5)).unwrap());
        assert!(validate_median(&grid(4, 4)).unwrap());
    }

    #[test]
    fn cube_distances_and_walls() {
        let q = cube(3);
        let ws = compute_walls(&q).unwrap();
        let (a, b) = (q.vertex("000").unwrap(), q.vertex("111").unwrap());
        assert_eq!(distance(&q, a, b).unwrap(), 3);
        assert_eq!(distance(&q, a, a).unwrap(), 0);
        assert_eq!(separating_walls(&q, &ws, a, b).unwrap().len(), 3);
        let c = q.vertex("100").unwrap();
        assert_eq!(separating_walls(&q, &ws, a, c).unwrap().len(), 1);
        assert_eq!(maximal_wall_chain(&q, &ws, a, b).unwrap().len(), 1);
    }

    #[test]
    fn cube_median_is_coordinatewise() {
        let q = cube(3);
        let v = |s| q.vertex(s).unwrap();
        assert_eq!(median(&q, v("100"), v("010"), v("001")).unwrap(), v("000"));
        assert_eq!(median(&q, v("110"), v("110"), v("001")).unwrap(), v("110"));
    }

    #[test]
    fn hull_examples() {
        let q = cube(3);
        let v = |s| q.vertex(s).unwrap();
        let h = hull(&q, &[v("100"), v("010")]).unwrap();
        let mut want = vec![v("000"), v("100"), v("010"), v("110")];
        q.canonical_order(&mut want);
        assert_eq!(h.members, want);
        assert_eq!(h.rounds, 1);
        assert_eq!(hull(&q, &[v("101")]).unwrap().members, vec![v("101")]);
    }

    #[test]
    fn gate_examples() {
        let q = cube(3);
        let v = |s| q.vertex(s).unwrap();
        // third coordinate zero
        let bottom =
            ConvexSet::from_members(&q, &[v("000"), v("100"), v("010"), v("110")]).unwrap();
        assert_eq!(gate_projection(&q, &bottom, v("111")).unwrap(), v("110"));
        assert_eq!(gate_projection(&q, &bottom, v("100")).unwrap(), v("100"));

        let gr = grid(5, 5);
        let col: Vec<u32> = (0..5)
            .map(|j| gr.vertex(&format!("0,{j}")).unwrap())
            .collect();
        let col = ConvexSet::from_members(&gr, &col).unwrap();
        let x = gr.vertex("3,2").unwrap();
        assert_eq!(
            gate_projection(&gr, &col, x).unwrap(),
            gr.vertex("0,2").unwrap()
        );
    }

    #[test]
    fn non_convex_sets_are_rejected() {
        let q = cube(3);
        let v = |s| q.vertex(s).unwrap();
        assert!(matches!(
            ConvexSet::from_members(&q, &[v("000"), v("110")]),
            Err(MedianError::NotConvex(_))
        ));
    }

    #[test]
    fn path_chain_takes_every_wall() {
        let p = path(5);
        let ws = compute_walls(&p).unwrap();
        assert_eq!(maximal_wall_chain(&p, &ws, 0, 4).unwrap().len(), 4);
    }
}
