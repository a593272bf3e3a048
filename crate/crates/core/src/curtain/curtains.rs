use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::{CurtainError, HypGraph};
use crate::graph::{bitset_from, UNREACHED};

/// Nearest-point projections of every vertex onto a fixed geodesic, stored
/// as a bitmask of axis positions per vertex so that curtains at any offset
/// can be read off without further searches.
#[derive(Debug, Clone)]
pub struct AxisProjection {
    axis: Vec<u32>,
    e: u32,
    dmin: Vec<u32>,
    words: usize,
    mask: Vec<u64>,
}

impl AxisProjection {
    pub fn new(g: &HypGraph, axis: &[u32]) -> Result<Self, CurtainError> {
        g.check_geodesic(axis)?;
        let n = g.len();
        let words = axis.len().div_ceil(64);
        let mut dmin = vec![UNREACHED; n];
        let mut mask = vec![0u64; n * words];
        for (i, &a) in axis.iter().enumerate() {
            let d = g.graph().bfs(a);
            let (w, bit) = (i / 64, 1u64 << (i % 64));
            for v in 0..n {
                if d[v] < dmin[v] {
                    dmin[v] = d[v];
                    mask[v * words..(v + 1) * words].fill(0);
                    mask[v * words + w] = bit;
                } else if d[v] == dmin[v] {
                    mask[v * words + w] |= bit;
                }
            }
        }
        Ok(AxisProjection {
            axis: axis.to_vec(),
            e: g.e(),
            dmin,
            words,
            mask,
        })
    }

    pub fn axis(&self) -> &[u32] {
        &self.axis
    }

    /// Distance from `x` to the axis.
    pub fn distance_to_axis(&self, x: u32) -> u32 {
        self.dmin[x as usize]
    }

    /// Axis positions nearest to `x`, ascending.
    pub fn positions(&self, x: u32) -> Vec<usize> {
        (0..self.axis.len())
            .filter(|&i| self.mask[x as usize * self.words + i / 64] >> (i % 64) & 1 == 1)
            .collect()
    }

    /// Whether some nearest point of `x` has position in `lo..=hi`.
    pub fn hits(&self, x: u32, lo: usize, hi: usize) -> bool {
        if lo > hi {
            return false;
        }
        let row = &self.mask[x as usize * self.words..(x as usize + 1) * self.words];
        (lo / 64..=hi / 64).any(|w| {
            let from = if w == lo / 64 { lo % 64 } else { 0 };
            let to = if w == hi / 64 { hi % 64 } else { 63 };
            let width = to - from + 1;
            let m = if width == 64 {
                u64::MAX
            } else {
                ((1u64 << width) - 1) << from
            };
            row[w] & m != 0
        })
    }

    /// The curtain whose interval covers positions `offset..=offset + 6E`.
    pub fn curtain(&self, offset: u32) -> Result<Curtain, CurtainError> {
        let width = 6 * self.e;
        let length = (self.axis.len() - 1) as u32;
        if offset == 0 || offset + width >= length {
            return Err(CurtainError::IntervalTooWide {
                width,
                offset,
                length,
            });
        }
        let (lo, hi) = (offset as usize, (offset + width) as usize);
        let n = self.dmin.len();
        let mut pole = FixedBitSet::with_capacity(n);
        let mut plus = FixedBitSet::with_capacity(n);
        let mut minus = FixedBitSet::with_capacity(n);
        for v in 0..n as u32 {
            if self.hits(v, lo, hi) {
                pole.insert(v as usize);
            }
            if self.hits(v, hi + 1, self.axis.len() - 1) {
                plus.insert(v as usize);
            }
            if self.hits(v, 0, lo - 1) {
                minus.insert(v as usize);
            }
        }
        Ok(Curtain {
            axis: self.axis.clone(),
            offset,
            e: self.e,
            pole,
            plus,
            minus,
        })
    }
}

/// Nearest points of `x` on a geodesic, with their spread along it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeodesicProjection {
    pub points: Vec<u32>,
    /// Distance between the extreme nearest points.
    pub diameter: u32,
    /// The spread exceeds `E`, which a hyperbolic graph should not allow.
    pub exceeds_e: bool,
}

pub fn project_to_geodesic(
    g: &HypGraph,
    axis: &[u32],
    x: u32,
) -> Result<GeodesicProjection, CurtainError> {
    g.check_geodesic(axis)?;
    let d = g.graph().bfs(x);
    let best = axis.iter().map(|&a| d[a as usize]).min().unwrap();
    let idx: Vec<usize> = (0..axis.len())
        .filter(|&i| d[axis[i] as usize] == best)
        .collect();
    let diameter = (idx[idx.len() - 1] - idx[0]) as u32;
    Ok(GeodesicProjection {
        points: idx.iter().map(|&i| axis[i]).collect(),
        diameter,
        exceeds_e: diameter > g.e(),
    })
}

/// Which half-space of a curtain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Vertices projecting after the interval.
    Plus,
    /// Vertices projecting before the interval.
    Minus,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }
}

/// A curtain `h = π_α⁻¹(I)` for an interval `I` of `6E` edges strictly inside
/// the axis `α`, with half-spaces `h⁺` (projecting after `I`) and `h⁻`
/// (projecting before `I`). A vertex belongs to a set as soon as one of its
/// nearest points on `α` lies in the corresponding segment, so `h` may
/// overlap either half-space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curtain {
    axis: Vec<u32>,
    offset: u32,
    e: u32,
    pole: FixedBitSet,
    plus: FixedBitSet,
    minus: FixedBitSet,
}

pub fn make_curtain(g: &HypGraph, axis: &[u32], offset: u32) -> Result<Curtain, CurtainError> {
    let width = 6 * g.e();
    let length = axis.len().saturating_sub(1) as u32;
    if length < width + 2 {
        return Err(CurtainError::IntervalTooWide {
            width,
            offset,
            length,
        });
    }
    AxisProjection::new(g, axis)?.curtain(offset)
}

/// Results of checking the curtain axioms on a concrete graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurtainAxioms {
    /// `h ∪ h⁺ ∪ h⁻` is every vertex.
    pub covers: bool,
    /// `h⁺ ∩ h⁻ = ∅`.
    pub sides_disjoint: bool,
    /// Smallest distance between a vertex of `h⁺` and one of `h⁻`.
    pub side_distance: Option<u32>,
    /// `side_distance > 3E` (vacuous when a side is empty).
    pub separated: bool,
    /// No path from `h⁺` to `h⁻` avoids `h`.
    pub path_crossing: bool,
}

impl CurtainAxioms {
    pub fn all_hold(&self) -> bool {
        self.covers && self.sides_disjoint && self.separated && self.path_crossing
    }
}

impl Curtain {
    pub fn axis(&self) -> &[u32] {
        &self.axis
    }

    pub fn offset(&self) -> u32 {
        self.offset
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    /// Axis positions `(a, b)` bounding the interval.
    pub fn interval(&self) -> (u32, u32) {
        (self.offset, self.offset + 6 * self.e)
    }

    pub fn pole(&self) -> &FixedBitSet {
        &self.pole
    }

    pub fn plus(&self) -> &FixedBitSet {
        &self.plus
    }

    pub fn minus(&self) -> &FixedBitSet {
        &self.minus
    }

    pub fn side(&self, s: Side) -> &FixedBitSet {
        match s {
            Side::Plus => &self.plus,
            Side::Minus => &self.minus,
        }
    }

    /// Half-space minus the pole.
    pub fn strict_side(&self, s: Side) -> FixedBitSet {
        let mut out = self.side(s).clone();
        out.difference_with(&self.pole);
        out
    }

    pub fn in_pole(&self, v: u32) -> bool {
        self.pole.contains(v as usize)
    }

    pub fn in_side(&self, s: Side, v: u32) -> bool {
        self.side(s).contains(v as usize)
    }

    pub fn axioms(&self, g: &HypGraph) -> CurtainAxioms {
        let n = g.len();
        let mut union = self.pole.clone();
        union.union_with(&self.plus);
        union.union_with(&self.minus);
        let covers = union.count_ones(..) == n;
        let sides_disjoint = self.plus.is_disjoint(&self.minus);

        let graph = g.graph();
        let side_distance = if self.plus.is_clear() || self.minus.is_clear() {
            None
        } else {
            let d = graph.bfs_multi(self.plus.ones().map(|v| v as u32));
            self.minus.ones().map(|v| d[v]).min()
        };
        let separated = side_distance.is_none_or(|d| d > 3 * self.e);

        let start = self.strict_side(Side::Plus);
        let reach = graph.bfs_restricted(
            start.ones().map(|v| v as u32),
            |v| !self.pole.contains(v as usize),
            |_| true,
        );
        let path_crossing = self.minus.ones().all(|v| reach[v] == UNREACHED);
        CurtainAxioms {
            covers,
            sides_disjoint,
            side_distance,
            separated,
            path_crossing,
        }
    }

    /// Whether this curtain separates the vertex sets `a` and `b`: one lies
    /// in `h⁻ \ h` and the other in `h⁺ \ h`.
    pub fn separates(&self, a: &FixedBitSet, b: &FixedBitSet) -> bool {
        let (minus, plus) = (self.strict_side(Side::Minus), self.strict_side(Side::Plus));
        (a.is_subset(&minus) && b.is_subset(&plus)) || (a.is_subset(&plus) && b.is_subset(&minus))
    }

    pub fn to_doc(&self) -> CurtainDoc {
        let list = |s: &FixedBitSet| s.ones().map(|v| v as u32).collect();
        CurtainDoc {
            axis: self.axis.clone(),
            offset: self.offset,
            e: self.e,
            interval: [self.interval().0, self.interval().1],
            pole: list(&self.pole),
            plus: list(&self.plus),
            minus: list(&self.minus),
        }
    }

    /// Restores a curtain from its stored vertex lists for a graph with `n`
    /// vertices.
    pub fn from_doc(doc: &CurtainDoc, n: usize) -> Result<Self, CurtainError> {
        let max = doc
            .pole
            .iter()
            .chain(&doc.plus)
            .chain(&doc.minus)
            .chain(&doc.axis)
            .copied()
            .max()
            .unwrap_or(0);
        if max as usize >= n {
            return Err(CurtainError::NotGeodesic(format!(
                "vertex {max} out of range"
            )));
        }
        Ok(Curtain {
            axis: doc.axis.clone(),
            offset: doc.offset,
            e: doc.e,
            pole: bitset_from(n, doc.pole.iter().copied()),
            plus: bitset_from(n, doc.plus.iter().copied()),
            minus: bitset_from(n, doc.minus.iter().copied()),
        })
    }
}

/// Stored form of a curtain with explicit vertex lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurtainDoc {
    pub axis: Vec<u32>,
    pub offset: u32,
    pub e: u32,
    pub interval: [u32; 2],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pole: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub plus: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub minus: Vec<u32>,
}

impl CurtainDoc {
    /// Drops the vertex lists, keeping what is needed to rebuild the
    /// curtain from its axis.
    pub fn compact(mut self) -> Self {
        self.pole.clear();
        self.plus.clear();
        self.minus.clear();
        self
    }
}

/// First place a sequence of curtains fails to be a chain, if any.
fn chain_violation(curtains: &[Curtain]) -> Option<String> {
    for i in 0..curtains.len().saturating_sub(1) {
        let (a, b) = (&curtains[i], &curtains[i + 1]);
        if !a.pole.is_disjoint(&b.pole) {
            return Some(format!("curtains {i} and {} overlap", i + 1));
        }
        let inside = |c: &Curtain, s: &FixedBitSet| {
            s.is_subset(&c.strict_side(Side::Plus)) || s.is_subset(&c.strict_side(Side::Minus))
        };
        if !inside(a, &b.pole) || !inside(b, &a.pole) {
            return Some(format!("curtains {i} and {} are not nested", i + 1));
        }
    }
    for i in 1..curtains.len().saturating_sub(1) {
        if !curtains[i].separates(&curtains[i - 1].pole, &curtains[i + 1].pole) {
            return Some(format!("curtain {i} does not separate its neighbours"));
        }
    }
    None
}

/// Each curtain separates its neighbours, and consecutive curtains are
/// disjoint and lie in strict half-spaces of each other.
pub fn is_chain(curtains: &[Curtain]) -> bool {
    chain_violation(curtains).is_none()
}

pub(crate) fn check_chain(curtains: &[Curtain]) -> Result<(), CurtainError> {
    match chain_violation(curtains) {
        Some(msg) => Err(CurtainError::ChainBroken(msg)),
        None => Ok(()),
    }
}

/// A greedy chain together with the quantities its guarantees are about.
#[derive(Debug, Clone)]
pub struct ChainReport {
    pub curtains: Vec<Curtain>,
    pub distance: u32,
    pub e: u32,
}

impl ChainReport {
    pub fn len(&self) -> usize {
        self.curtains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curtains.is_empty()
    }

    /// `d(x, y) ≥ E·|c|`.
    pub fn distance_bound_holds(&self) -> bool {
        self.distance as u64 >= self.e as u64 * self.len() as u64
    }

    /// `|c| ≥ floor((d − 2E) / 8E)`.
    pub fn cardinality_bound(&self) -> u32 {
        self.distance.saturating_sub(2 * self.e) / (8 * self.e)
    }
}

/// Curtains along a geodesic from `x` to `y` with intervals starting at
/// positions `1, 1 + 8E, 1 + 16E, …`, so consecutive intervals are `2E`
/// apart. The result is checked to be a chain separating `x` from `y`.
pub fn greedy_chain(g: &HypGraph, x: u32, y: u32) -> Result<ChainReport, CurtainError> {
    let e = g.e();
    let axis = g
        .graph()
        .shortest_path(x, y)
        .ok_or(CurtainError::Disconnected)?;
    let d = (axis.len() - 1) as u32;
    if d < 8 * e + 2 {
        return Err(CurtainError::TooClose {
            distance: d,
            needed: 8 * e + 2,
        });
    }
    let proj = AxisProjection::new(g, &axis)?;
    let mut curtains = Vec::new();
    let mut offset = 1;
    while offset + 6 * e < d {
        curtains.push(proj.curtain(offset)?);
        offset += 8 * e;
    }
    check_chain(&curtains)?;
    let (xs, ys) = (bitset_from(g.len(), [x]), bitset_from(g.len(), [y]));
    if let Some(i) = curtains.iter().position(|c| !c.separates(&xs, &ys)) {
        return Err(CurtainError::ChainBroken(format!(
            "curtain {i} does not separate the endpoints"
        )));
    }
    Ok(ChainReport {
        curtains,
        distance: d,
        e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn path(n: u32) -> HypGraph {
        HypGraph::new(Graph::from_edges(n as usize, (1..n).map(|i| (i - 1, i))), 1).unwrap()
    }

    #[test]
    fn path_curtain_is_the_middle_block() {
        let g = path(20);
        let axis: Vec<u32> = (0..20).collect();
        let c = make_curtain(&g, &axis, 5).unwrap();
        assert_eq!(
            c.pole().ones().collect::<Vec<_>>(),
            (5..=11).collect::<Vec<_>>()
        );
        assert_eq!(
            c.minus().ones().collect::<Vec<_>>(),
            (0..5).collect::<Vec<_>>()
        );
        assert_eq!(
            c.plus().ones().collect::<Vec<_>>(),
            (12..20).collect::<Vec<_>>()
        );
        assert!(c.axioms(&g).all_hold());
        let shifted = make_curtain(&g, &axis, 6).unwrap();
        assert_eq!(
            shifted.pole().ones().collect::<Vec<_>>(),
            (6..=12).collect::<Vec<_>>()
        );
    }

    #[test]
    fn interval_must_fit() {
        let g = path(8);
        let axis: Vec<u32> = (0..8).collect();
        assert!(matches!(
            make_curtain(&g, &axis, 1),
            Err(CurtainError::IntervalTooWide { .. })
        ));
    }

    #[test]
    fn chain_examples() {
        let g = path(40);
        let axis: Vec<u32> = (0..40).collect();
        let a = make_curtain(&g, &axis, 2).unwrap();
        let b = make_curtain(&g, &axis, 20).unwrap();
        let c = make_curtain(&g, &axis, 5).unwrap();
        assert!(is_chain(std::slice::from_ref(&a)));
        assert!(is_chain(&[a.clone(), b]));
        assert!(!is_chain(&[a, c]));
    }

    #[test]
    fn greedy_chain_on_paths() {
        let g = path(40);
        let r = greedy_chain(&g, 0, 39).unwrap();
        assert!(r.len() >= 4);
        assert!(r.distance_bound_holds());
        let g = path(11);
        assert_eq!(greedy_chain(&g, 0, 10).unwrap().len(), 1);
        assert!(matches!(
            greedy_chain(&g, 0, 9),
            Err(CurtainError::TooClose { .. })
        ));
    }

    #[test]
    fn projection_onto_a_point_of_the_axis() {
        let g = path(6);
        let axis: Vec<u32> = (0..6).collect();
        let p = project_to_geodesic(&g, &axis, 3).unwrap();
        assert_eq!(p.points, vec![3]);
        assert_eq!(p.diameter, 0);
    }
}
