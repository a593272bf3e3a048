//! Flip and skewer predicates, decided on the vertices within a guard.
//!
//! Proper containment `a(S) ⊊ T` is checked as: every guarded vertex of `S`
//! has a defined image in `T`, and some guarded `y ∈ T` has a defined
//! preimage outside `S` (a witness that `y` is not hit). Disjointness
//! `a(h) ∩ h = ∅` is checked through both images and preimages of guarded
//! pole vertices.

use fixedbitset::FixedBitSet;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{ActionAlgebra, Curtain, CurtainDoc, CurtainError, GraphAction, HypGraph, Side};

/// Outcome of one containment-plus-disjointness check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipCheck {
    /// Half-space mapped.
    pub source: Side,
    /// Half-space it must land in.
    pub target: Side,
    pub contained: bool,
    pub disjoint: bool,
    /// A guarded vertex of the target outside the image of the source.
    pub strict_witness: Option<u32>,
    pub holds: bool,
    /// Guard radius the check was restricted to; `None` means every vertex.
    pub guard: Option<u32>,
    /// Number of guarded vertices examined.
    pub examined: usize,
}

fn scoped<'a>(
    g: &'a HypGraph,
    set: &'a FixedBitSet,
    guard: Option<u32>,
) -> impl Iterator<Item = u32> + 'a {
    set.ones()
        .map(|v| v as u32)
        .filter(move |&v| g.in_scope(v, guard))
}

fn check_map<A: GraphAction + ?Sized>(
    g: &HypGraph,
    a: &A,
    c: &Curtain,
    source: &FixedBitSet,
    target: &FixedBitSet,
    sides: (Side, Side),
    guard: Option<u32>,
) -> Result<FlipCheck, CurtainError> {
    let mut examined = 0;
    let mut contained = true;
    for v in scoped(g, source, guard) {
        examined += 1;
        let w = a
            .image(v)
            .ok_or(CurtainError::PartialAction { vertex: v })?;
        if !target.contains(w as usize) {
            contained = false;
            break;
        }
    }
    let mut disjoint = true;
    for v in scoped(g, c.pole(), guard) {
        examined += 1;
        let w = a
            .image(v)
            .ok_or(CurtainError::PartialAction { vertex: v })?;
        let back = a.preimage(v);
        if c.in_pole(w) || back.is_some_and(|u| c.in_pole(u)) {
            disjoint = false;
            break;
        }
    }
    let strict_witness = scoped(g, target, guard)
        .find(|&y| a.preimage(y).is_some_and(|u| !source.contains(u as usize)));
    Ok(FlipCheck {
        source: sides.0,
        target: sides.1,
        contained,
        disjoint,
        strict_witness,
        holds: contained && disjoint && strict_witness.is_some(),
        guard,
        examined,
    })
}

/// Whether `a` flips the given half-space: `a(h^s) ⊊ h^{-s}` and
/// `a(h) ∩ h = ∅`.
pub fn flips_side<A: GraphAction + ?Sized>(
    g: &HypGraph,
    a: &A,
    c: &Curtain,
    side: Side,
    guard: Option<u32>,
) -> Result<FlipCheck, CurtainError> {
    check_map(
        g,
        a,
        c,
        c.side(side),
        c.side(side.opposite()),
        (side, side.opposite()),
        guard,
    )
}

/// Whether `a` flips `h⁺`.
pub fn flips<A: GraphAction + ?Sized>(
    g: &HypGraph,
    a: &A,
    c: &Curtain,
    guard: Option<u32>,
) -> Result<FlipCheck, CurtainError> {
    flips_side(g, a, c, Side::Plus, guard)
}

/// `a(h⁺) ⊊ h⁺` and `a(h) ∩ h = ∅`.
pub fn skewer_check<A: GraphAction + ?Sized>(
    g: &HypGraph,
    a: &A,
    c: &Curtain,
    guard: Option<u32>,
) -> Result<FlipCheck, CurtainError> {
    check_map(g, a, c, c.plus(), c.plus(), (Side::Plus, Side::Plus), guard)
}

/// Least `m ≤ m_max` such that `a^m` skewers `h⁺`.
pub fn skewers<A: ActionAlgebra>(
    g: &HypGraph,
    a: &A,
    c: &Curtain,
    m_max: u32,
    guard: Option<u32>,
) -> Result<Option<u32>, CurtainError> {
    for m in 1..=m_max {
        if skewer_check(g, &a.power(m), c, guard)?.holds {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// `d(x, w^i x)` for one pole vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Displacement {
    pub x: u32,
    pub i: u32,
    pub distance: u32,
}

/// Evidence that `w` translates along a chain of curtains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauCertificate {
    pub curtain: CurtainDoc,
    pub element: String,
    pub iterations: u32,
    pub chain_verified: bool,
    /// Conservative lower bound on the stable translation length: `E` once
    /// the chain is verified.
    pub tau_lower: Ratio<u64>,
    /// `E(k+1)/k`, the bound the chain gives at `i = k`.
    pub chain_bound: Ratio<u64>,
    /// Displacements of the first guarded pole vertex whose orbit stays in
    /// the window.
    pub observed: Vec<Displacement>,
    /// Smallest `d(x, w^i x) / i` over every guarded pole vertex and `i ≤ k`
    /// with `w^i x` defined.
    pub min_observed_ratio: Option<Ratio<u64>>,
    /// `d(x, w^i x) ≥ E(i+1)` held for every measured pair.
    pub displacement_bound_holds: bool,
    /// Number of `(x, i)` pairs measured.
    pub measured: usize,
    pub guard: Option<u32>,
}

/// Certifies that `{h, wh, …, w^k h}` is a chain and measures displacements.
///
/// Since `w^i h` separates `w^{i-1} h` from `w^{i+1} h` exactly when `h`
/// separates `w⁻¹h` from `wh`, the chain condition for every length is
/// checked on that single triple.
pub fn certify_tau<A: ActionAlgebra>(
    g: &HypGraph,
    w: &A,
    label: &str,
    c: &Curtain,
    k: u32,
    guard: Option<u32>,
) -> Result<TauCertificate, CurtainError> {
    if k == 0 {
        return Err(CurtainError::ChainBroken(
            "need at least one translate".into(),
        ));
    }
    if !skewer_check(g, w, c, guard)?.holds {
        return Err(CurtainError::NotSkewered);
    }
    let n = g.len();
    let mut forward = FixedBitSet::with_capacity(n);
    let mut backward = FixedBitSet::with_capacity(n);
    for v in scoped(g, c.pole(), guard) {
        forward.insert(
            w.image(v)
                .ok_or(CurtainError::PartialAction { vertex: v })? as usize,
        );
        if let Some(u) = w.preimage(v) {
            backward.insert(u as usize);
        }
    }
    let chain_verified =
        c.separates(&backward, &forward) && forward.is_subset(&c.strict_side(Side::Plus));

    let e = g.e() as u64;
    let powers: Vec<A> = (1..=k).map(|i| w.power(i)).collect();
    let mut observed = Vec::new();
    let mut min_ratio: Option<Ratio<u64>> = None;
    let mut bound_holds = true;
    let mut measured = 0;
    for x in scoped(g, c.pole(), guard) {
        let targets: Vec<Option<u32>> = powers.iter().map(|p| p.image(x)).collect();
        if targets.iter().all(Option::is_none) {
            continue;
        }
        let d = g.graph().bfs(x);
        let mut row = Vec::new();
        for (i, t) in targets.iter().enumerate() {
            let Some(t) = *t else { continue };
            let i = i as u32 + 1;
            let dist = d[t as usize];
            measured += 1;
            bound_holds &= dist as u64 >= e * (i as u64 + 1);
            let r = Ratio::new(dist as u64, i as u64);
            min_ratio = Some(min_ratio.map_or(r, |m| m.min(r)));
            row.push(Displacement {
                x,
                i,
                distance: dist,
            });
        }
        if observed.is_empty() && row.len() == k as usize {
            observed = row;
        }
    }
    Ok(TauCertificate {
        curtain: c.to_doc(),
        element: label.to_string(),
        iterations: k,
        chain_verified,
        tau_lower: if chain_verified {
            Ratio::from_integer(e)
        } else {
            Ratio::from_integer(0)
        },
        chain_bound: Ratio::new(e * (k as u64 + 1), k as u64),
        observed,
        min_observed_ratio: min_ratio,
        displacement_bound_holds: bound_holds,
        measured,
        guard,
    })
}

/// Flip checks for both sides plus the skewer certificate of the product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipThenSkewer {
    /// `g1(h⁺) ⊊ h⁻`.
    pub first_flip: FlipCheck,
    /// `g2(h⁻) ⊊ h⁺`.
    pub second_flip: FlipCheck,
    /// `g2 g1 (h ∪ h⁺) ⊊ h⁺` on the guarded vertices.
    pub containment: bool,
    pub containment_witness: Option<u32>,
    pub tau: TauCertificate,
}

/// With `g1` flipping `h⁺` and `g2` flipping `h⁻`, checks that `w = g2 g1`
/// (apply `g1` first) maps `h ∪ h⁺` properly into `h⁺` and certifies its
/// translation length with `k` translates.
pub fn flip_then_skewer<A: ActionAlgebra>(
    g: &HypGraph,
    g1: &A,
    g2: &A,
    label: &str,
    c: &Curtain,
    k: u32,
    guard: Option<u32>,
) -> Result<FlipThenSkewer, CurtainError> {
    let first_flip = flips_side(g, g1, c, Side::Plus, guard)?;
    let second_flip = flips_side(g, g2, c, Side::Minus, guard)?;
    if !first_flip.holds || !second_flip.holds {
        return Err(CurtainError::FlipPreconditionFailed(format!(
            "first element flips h+: {}, second flips h-: {}",
            first_flip.holds, second_flip.holds
        )));
    }
    let w = g1.then(g2);
    let mut source = c.pole().clone();
    source.union_with(c.plus());
    let check = check_map(g, &w, c, &source, c.plus(), (Side::Plus, Side::Plus), guard)?;
    let tau = certify_tau(g, &w, label, c, k, guard)?;
    Ok(FlipThenSkewer {
        first_flip,
        second_flip,
        containment: check.contained && check.strict_witness.is_some(),
        containment_witness: check.strict_witness,
        tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curtain::{make_curtain, VertexMap};
    use crate::graph::Graph;

    /// Path on positions `-r..=r`, vertex `i` is position `i - r`.
    fn line(r: i64) -> (HypGraph, Vec<u32>) {
        let n = (2 * r + 1) as usize;
        let g = Graph::from_edges(n, (1..n as u32).map(|i| (i - 1, i)));
        let depth: Vec<u32> = (0..n as i64)
            .map(|i| (i - r).unsigned_abs() as u32)
            .collect();
        (
            HypGraph::with_depth(g, 1, depth).unwrap(),
            (0..n as u32).collect(),
        )
    }

    fn reflection(r: i64, center2: i64) -> VertexMap {
        // position p maps to center2 - p
        let n = (2 * r + 1) as usize;
        VertexMap::from_fn(n, |v| {
            let p = v as i64 - r;
            let q = center2 - p;
            (q.abs() <= r).then(|| (q + r) as u32)
        })
    }

    fn shift(r: i64, s: i64) -> VertexMap {
        let n = (2 * r + 1) as usize;
        VertexMap::from_fn(n, |v| {
            let q = v as i64 - r + s;
            (q.abs() <= r).then(|| (q + r) as u32)
        })
    }

    #[test]
    fn identity_neither_flips_nor_skewers() {
        let (g, axis) = line(20);
        let c = make_curtain(&g, &axis, 17).unwrap();
        let id = VertexMap::identity(g.len());
        assert!(!flips(&g, &id, &c, None).unwrap().holds);
        assert_eq!(skewers(&g, &id, &c, 5, None).unwrap(), None);
    }

    #[test]
    fn reflections_flip_and_compose_to_a_translation() {
        let r = 40;
        let (g, axis) = line(r);
        // interval covers positions -3..=3
        let c = make_curtain(&g, &axis, (r - 3) as u32).unwrap();
        let guard = Some(12);
        let before = reflection(r, -10);
        let after = reflection(r, 10);
        assert!(
            flips_side(&g, &before, &c, Side::Plus, guard)
                .unwrap()
                .holds
        );
        assert!(
            flips_side(&g, &after, &c, Side::Minus, guard)
                .unwrap()
                .holds
        );
        let out = flip_then_skewer(&g, &before, &after, "t", &c, 3, guard).unwrap();
        assert!(out.containment);
        assert!(out.tau.chain_verified);
        assert!(out.tau.displacement_bound_holds);
        assert_eq!(out.tau.tau_lower, Ratio::from_integer(1));
        // the same reflection cannot flip both sides
        assert!(matches!(
            flip_then_skewer(&g, &before, &before, "t", &c, 3, guard),
            Err(CurtainError::FlipPreconditionFailed(_))
        ));
    }

    #[test]
    fn shift_skewers_at_a_small_power() {
        let r = 60;
        let (g, axis) = line(r);
        let c = make_curtain(&g, &axis, (r - 3) as u32).unwrap();
        let s = shift(r, 1);
        let m = skewers(&g, &s, &c, 9, Some(20)).unwrap();
        assert_eq!(m, Some(7));
        let t = shift(r, 9);
        let cert = certify_tau(&g, &t, "s^9", &c, 3, Some(20)).unwrap();
        assert!(cert.chain_verified);
        let d: Vec<u32> = cert.observed.iter().map(|o| o.distance).collect();
        assert_eq!(d, vec![9, 18, 27]);
    }
}
