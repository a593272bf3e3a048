//! Seeded corpora shared by the curtain property tests and the acceptance
//! suite.

#![allow(dead_code)]

use curtainlab_core::contact::{build_contact_graph, wall_curtain, VertexAction};
use curtainlab_core::curtain::{
    flip_then_skewer, flips_side, four_point_delta, greedy_chain, make_curtain, ActionAlgebra,
    Curtain, CurtainError, HypGraph, Side, VertexMap,
};
use curtainlab_core::graph::Graph;
use curtainlab_core::median::fixtures::random_median_graph;
use curtainlab_core::median::WallId;
use curtainlab_core::raag::{build_window, enumerate_elements, BallComplex, Presentation};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 7;

pub fn path_graph(n: u32, e: u32) -> HypGraph {
    HypGraph::new(Graph::from_edges(n as usize, (1..n).map(|i| (i - 1, i))), e).unwrap()
}

/// Path on positions `-r..=r`; vertex `i` sits at position `i - r` and its
/// depth is `|i - r|`.
pub fn centred_line(r: i64, e: u32) -> HypGraph {
    let n = (2 * r + 1) as usize;
    let g = Graph::from_edges(n, (1..n as u32).map(|i| (i - 1, i)));
    let depth = (0..n as i64)
        .map(|i| (i - r).unsigned_abs() as u32)
        .collect();
    HypGraph::with_depth(g, e, depth).unwrap()
}

pub fn e_of(graph: &Graph) -> u32 {
    four_point_delta(graph, SEED).0.div_ceil(2).max(1)
}

pub fn free_ball(horizon: u32) -> BallComplex {
    build_window(&Presentation::free(&["a", "b"]), horizon).unwrap()
}

pub fn tof_ball(horizon: u32) -> BallComplex {
    build_window(&Presentation::tree_of_flats(), horizon).unwrap()
}

/// The ball's own graph (a tree for a free group) with window depths.
pub fn ball_hyp(b: &BallComplex, e: u32) -> HypGraph {
    HypGraph::with_depth(b.window().graph().clone(), e, b.window().depths().to_vec()).unwrap()
}

pub struct CurtainSample {
    pub kind: &'static str,
    pub graph: usize,
    pub curtain: Curtain,
}

pub struct CurtainCorpus {
    pub graphs: Vec<HypGraph>,
    pub samples: Vec<CurtainSample>,
}

fn random_axis_curtains(
    rng: &mut ChaCha8Rng,
    g: &HypGraph,
    gi: usize,
    kind: &'static str,
    count: usize,
    out: &mut Vec<CurtainSample>,
) {
    let n = g.len() as u32;
    let e = g.e();
    let mut made = 0;
    while made < count {
        let x = rng.gen_range(0..n);
        let d = g.graph().bfs(x);
        let far: Vec<u32> = (0..n).filter(|&y| d[y as usize] >= 6 * e + 2).collect();
        let Some(&y) = far.choose(rng) else { continue };
        let axis = g.graph().shortest_path(x, y).unwrap();
        let len = axis.len() as u32 - 1;
        let offset = rng.gen_range(1..len - 6 * e);
        out.push(CurtainSample {
            kind,
            graph: gi,
            curtain: make_curtain(g, &axis, offset).unwrap(),
        });
        made += 1;
    }
}

/// 200 curtains: 80 on paths, 60 on free-group tree windows and 60 on
/// contact graphs of tree-of-flats windows.
pub fn curtain_corpus() -> CurtainCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut graphs = Vec::new();
    let mut samples = Vec::new();

    let mut paths = Vec::new();
    for &(n, e) in &[
        (10, 1),
        (14, 1),
        (20, 1),
        (27, 1),
        (22, 2),
        (30, 2),
        (35, 1),
        (45, 3),
    ] {
        let gi = graphs.len();
        let g = path_graph(n, e);
        let axis: Vec<u32> = (0..n).collect();
        for offset in 1..(n - 1).saturating_sub(6 * e) {
            paths.push(CurtainSample {
                kind: "path",
                graph: gi,
                curtain: make_curtain(&g, &axis, offset).unwrap(),
            });
        }
        graphs.push(g);
    }
    paths.shuffle(&mut rng);
    paths.truncate(80);
    samples.extend(paths);

    for (horizon, count) in [(5, 40), (7, 20)] {
        let gi = graphs.len();
        let g = ball_hyp(&free_ball(horizon), 1);
        random_axis_curtains(&mut rng, &g, gi, "tree", count, &mut samples);
        graphs.push(g);
    }

    for (horizon, count) in [(5, 30), (6, 30)] {
        let gi = graphs.len();
        let cg = build_contact_graph(&tof_ball(horizon));
        let g = cg.hyp(e_of(cg.graph())).unwrap();
        random_axis_curtains(&mut rng, &g, gi, "contact", count, &mut samples);
        graphs.push(g);
    }
    assert_eq!(samples.len(), 200);
    CurtainCorpus { graphs, samples }
}

pub struct ChainSample {
    pub kind: &'static str,
    pub distance: u32,
    pub e: u32,
    /// `None` when the endpoints are closer than a single curtain allows.
    pub length: Option<usize>,
}

/// Greedy chains between seeded endpoint pairs on paths, trees, contact
/// graphs and random median graphs.
pub fn chain_corpus() -> Vec<ChainSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut graphs: Vec<(&'static str, HypGraph)> = Vec::new();
    for &(n, e) in &[(9, 1), (12, 1), (40, 1), (41, 2), (77, 3), (100, 1)] {
        graphs.push(("path", path_graph(n, e)));
    }
    graphs.push(("tree", ball_hyp(&free_ball(7), 1)));
    let cg = build_contact_graph(&tof_ball(6));
    graphs.push(("contact", cg.hyp(e_of(cg.graph())).unwrap()));
    for _ in 0..20 {
        let w = random_median_graph(&mut rng, 200);
        let g = w.graph().clone();
        let e = e_of(&g);
        graphs.push(("median", HypGraph::new(g, e).unwrap()));
    }
    let mut out = Vec::new();
    for (kind, g) in &graphs {
        let n = g.len() as u32;
        let mut pairs = vec![(0, n - 1)];
        for _ in 0..6 {
            pairs.push((rng.gen_range(0..n), rng.gen_range(0..n)));
            // and a far pair, so that most graphs contribute real chains
            let x = rng.gen_range(0..n);
            let d = g.graph().bfs(x);
            let y = (0..n).max_by_key(|&y| (d[y as usize], y)).unwrap();
            pairs.push((x, y));
        }
        for (x, y) in pairs {
            let distance = g.distance(x, y);
            let length = match greedy_chain(g, x, y) {
                Ok(r) => Some(r.len()),
                Err(CurtainError::TooClose { .. }) => None,
                Err(e) => panic!("{kind}: {e}"),
            };
            out.push(ChainSample {
                kind,
                distance,
                e: g.e(),
                length,
            });
        }
    }
    out
}

#[derive(Debug, Default, Clone, Copy)]
pub struct FlipTally {
    /// Pairs where both flips hold.
    pub instances: usize,
    /// Of those, pairs where containment, the chain and the displacement
    /// bound all hold.
    pub sound: usize,
}

impl FlipTally {
    pub fn add(&mut self, o: FlipTally) {
        self.instances += o.instances;
        self.sound += o.sound;
    }
}

/// Runs flip-then-skewer on every pair `(g1, g2)` where `g1` flips `h⁺` and
/// `g2` flips `h⁻`, with three translates. Flips are decided on the largest
/// guard each element is defined on (`reach`); a flip seen only on a small
/// guard can fail further out. The composite is checked on `pair_guard`.
pub fn flip_pairs<A: ActionAlgebra>(
    g: &HypGraph,
    c: &Curtain,
    acts: &[A],
    reach: impl Fn(&A) -> u32,
    pair_guard: impl Fn(&A, &A) -> u32,
) -> FlipTally {
    let holds = |a: &A, s: Side| {
        flips_side(g, a, c, s, Some(reach(a)))
            .map(|f| f.holds)
            .unwrap_or(false)
    };
    let plus: Vec<&A> = acts.iter().filter(|a| holds(a, Side::Plus)).collect();
    let minus: Vec<&A> = acts.iter().filter(|a| holds(a, Side::Minus)).collect();
    let mut t = FlipTally::default();
    for g1 in &plus {
        for g2 in &minus {
            t.instances += 1;
            let guard = Some(pair_guard(g1, g2));
            let ok = match flip_then_skewer(g, *g1, *g2, "w", c, 3, guard) {
                Ok(r) => r.containment && r.tau.chain_verified && r.tau.displacement_bound_holds,
                Err(_) => false,
            };
            t.sound += ok as usize;
        }
    }
    t
}

fn reflection(r: i64, center2: i64) -> VertexMap {
    let n = (2 * r + 1) as usize;
    VertexMap::from_fn(n, |v| {
        let q = center2 - (v as i64 - r);
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

/// Flip-then-skewer over lines with reflections and shifts around a centred
/// curtain, and over cubical wall curtains near the basepoint of a
/// free-group window and a tree-of-flats window.
pub fn flip_corpus() -> Vec<(&'static str, FlipTally)> {
    let mut out = Vec::new();

    let mut lines = FlipTally::default();
    for e in 1..=2u32 {
        let r = 80;
        let g = centred_line(r, e);
        let axis: Vec<u32> = (0..g.len() as u32).collect();
        let half = 3 * e as i64;
        let c = make_curtain(&g, &axis, (r - half) as u32).unwrap();
        let mut acts: Vec<VertexMap> = (-24..=24).map(|c2| reflection(r, c2)).collect();
        acts.extend((-6..=6).map(|s| shift(r, s)));
        lines.add(flip_pairs(&g, &c, &acts, |_| 16, |_, _| 16));
    }
    out.push(("line", lines));

    // cubical walls next to the basepoint, each side taken as the plus side
    for (kind, ball, len) in [
        ("tree", free_ball(10), 3),
        ("tree of flats", tof_ball(7), 3),
    ] {
        let p = ball.presentation();
        let gens: Vec<_> = p
            .generators()
            .iter()
            .map(|x| p.generator(x).unwrap())
            .collect();
        let elements = enumerate_elements(p, &gens, len).unwrap();
        let g = ball_hyp(&ball, 1);
        let acts: Vec<VertexAction> = elements
            .iter()
            .map(|x| VertexAction::new(&ball, x.clone()))
            .collect();
        let h = ball.horizon();
        let reach = |a: &VertexAction| h - a.element().length() as u32;
        let pair = |a: &VertexAction, b: &VertexAction| {
            h - (a.element().length() + b.element().length()) as u32
        };
        let graph = ball.window().graph();
        let mut tally = FlipTally::default();
        let mut walls: Vec<WallId> = graph
            .edges()
            .iter()
            .filter(|&&(u, v)| ball.window().depth(u).max(ball.window().depth(v)) <= 1)
            .map(|&(u, v)| ball.walls().wall_of_edge(graph.edge_id(u, v).unwrap()))
            .collect();
        walls.sort_unstable();
        walls.dedup();
        for k in walls {
            let (u, v) = graph.edge(ball.walls().wall(k).edges[0]);
            for side in [u, v] {
                let c = wall_curtain(&ball, k, side).unwrap();
                tally.add(flip_pairs(&g, &c, &acts, reach, pair));
            }
        }
        out.push((kind, tally));
    }
    out
}
