//! Contact graphs of RAAG windows checked against direct wall/edge oracles.

use std::collections::BTreeSet;

use curtainlab_core::contact::{build_contact_graph, detect_product, translate_node, ContactGraph};
use curtainlab_core::median::WallId;
use curtainlab_core::raag::{build_window, BallComplex, Presentation};

fn wall_node(b: &BallComplex, cg: &ContactGraph, u: &str, v: &str) -> u32 {
    let (u, v) = (b.window().vertex(u).unwrap(), b.window().vertex(v).unwrap());
    let e = b.window().graph().edge_id(u, v).unwrap();
    cg.node(b.walls().wall_of_edge(e)).unwrap()
}

/// The generator labelling the edges of a wall.
fn wall_generator(b: &BallComplex, w: WallId) -> String {
    let p = b.presentation();
    let gens: BTreeSet<usize> = b
        .walls()
        .wall(w)
        .edges
        .iter()
        .map(|&e| {
            let (u, v) = b.window().graph().edge(e);
            let step = p.multiply(&p.inverse(&b.element(u)), &b.element(v));
            assert_eq!(step.length(), 1);
            step.letters()[0].generator()
        })
        .collect();
    assert_eq!(gens.len(), 1, "a wall carries one generator");
    p.generators()[*gens.iter().next().unwrap()].clone()
}

#[test]
fn free_group_contact_graph_is_the_line_graph() {
    let b = build_window(&Presentation::free(&["a", "b"]), 5).unwrap();
    let cg = build_contact_graph(&b);
    let g = b.window().graph();
    assert_eq!(cg.len(), g.edge_count());
    for i in 0..cg.len() as u32 {
        let (a, c) = g.edge(b.walls().wall(cg.wall(i)).edges[0]);
        for j in i + 1..cg.len() as u32 {
            let (x, y) = g.edge(b.walls().wall(cg.wall(j)).edges[0]);
            let touch = a == x || a == y || c == x || c == y;
            assert_eq!(cg.graph().has_edge(i, j), touch);
        }
    }
}

#[test]
fn generator_axes_embed_isometrically() {
    let b = build_window(&Presentation::free(&["a", "b"]), 8).unwrap();
    let cg = build_contact_graph(&b);
    let guard = b.guard() as i64;
    for gen in ["a", "b"] {
        let power = |k: i64| match k {
            0 => "e".to_string(),
            1 => gen.to_string(),
            k => format!("{gen}^{k}"),
        };
        let p = b.presentation();
        let label = |k: i64| p.render(&p.parse(&power(k)).unwrap());
        let nodes: Vec<u32> = (-guard..guard)
            .map(|k| wall_node(&b, &cg, &label(k), &label(k + 1)))
            .collect();
        let d = cg.graph().bfs(nodes[0]);
        for (i, &n) in nodes.iter().enumerate() {
            assert_eq!(d[n as usize], i as u32);
        }
        assert!(nodes.len() as u32 > b.guard());
    }
}

#[test]
fn z2_visible_walls_are_within_two() {
    let p = Presentation::new(&["a", "b"], &[("a", "b")]).unwrap();
    let b = build_window(&p, 8).unwrap();
    let cg = build_contact_graph(&b);
    let visible: Vec<u32> = (0..cg.len() as u32)
        .filter(|&n| cg.depth(n) <= b.guard())
        .collect();
    assert!(visible.len() >= 8);
    for &n in &visible {
        let d = cg.graph().bfs(n);
        assert!(visible.iter().all(|&m| d[m as usize] <= 2));
    }
}

#[test]
fn tree_of_flats_translation() {
    let b = build_window(&Presentation::tree_of_flats(), 8).unwrap();
    let cg = build_contact_graph(&b);
    let z = b.presentation().parse("z").unwrap();
    let n = wall_node(&b, &cg, "e", "x");
    assert_eq!(
        translate_node(&b, &cg, &z, n).unwrap(),
        wall_node(&b, &cg, "z", "z x")
    );
    let far = b.presentation().parse("z^5").unwrap();
    assert!(translate_node(&b, &cg, &far, n).is_err());
}

#[test]
fn products_split_by_join_factor() {
    let p = Presentation::new(&["a", "b", "t"], &[("a", "t"), ("b", "t")]).unwrap();
    let b = build_window(&p, 6).unwrap();
    let w = detect_product(&b).unwrap();
    assert!(w.window_evidence);
    let (ga, gb) = (gens_of(&b, &w.family_a), gens_of(&b, &w.family_b));
    let t = BTreeSet::from(["t".to_string()]);
    let ab = BTreeSet::from(["a".to_string(), "b".to_string()]);
    assert!(
        (ga == ab && gb == t) || (ga == t && gb == ab),
        "{ga:?} / {gb:?}"
    );
    for &x in &w.family_a {
        for &y in &w.family_b {
            assert!(b.walls().cross(x, y));
        }
    }

    let z2 = Presentation::new(&["a", "b"], &[("a", "b")]).unwrap();
    let b = build_window(&z2, 6).unwrap();
    let w = detect_product(&b).unwrap();
    let mut fams = [gens_of(&b, &w.family_a), gens_of(&b, &w.family_b)];
    fams.sort();
    assert_eq!(
        fams,
        [BTreeSet::from(["a".into()]), BTreeSet::from(["b".into()])]
    );

    assert!(detect_product(&build_window(&Presentation::tree_of_flats(), 6).unwrap()).is_none());
}

fn gens_of(b: &BallComplex, fam: &[WallId]) -> BTreeSet<String> {
    fam.iter().map(|&k| wall_generator(b, k)).collect()
}

#[test]
fn exports_are_deterministic() {
    let b = build_window(&Presentation::tree_of_flats(), 3).unwrap();
    let (c1, c2) = (build_contact_graph(&b), build_contact_graph(&b));
    assert_eq!(c1.to_dot(), c2.to_dot());
    let doc = c1.to_doc();
    assert_eq!(doc.nodes.len(), c1.len());
    assert_eq!(doc.edges.len(), c1.graph().edge_count());
}
