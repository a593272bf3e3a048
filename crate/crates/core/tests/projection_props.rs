//! Tree-of-flats projection system, searches and the recipe on small
//! windows.

use std::sync::OnceLock;

use curtainlab_core::projection::{
    conjugate_chain, find_active_domain, find_transverse_pair, passing_up_search, recipe_rank_one,
    relation_search, verify_certificate, Domain, ProjectionError, ProjectionSystem,
    ProjectionSystemDoc, RecipeCertificate, RecipeOptions, Relation, DEFAULT_SEED,
};
use curtainlab_core::raag::{build_window, GroupElement, Presentation};
use num_rational::Ratio;

fn tof() -> &'static ProjectionSystem {
    static S: OnceLock<ProjectionSystem> = OnceLock::new();
    S.get_or_init(|| ProjectionSystem::tree_of_flats(7, DEFAULT_SEED).unwrap())
}

fn el(s: &ProjectionSystem, w: &str) -> GroupElement {
    s.presentation().parse(w).unwrap()
}

fn half() -> Ratio<u64> {
    Ratio::new(1, 2)
}

#[test]
fn small_horizon_is_rejected() {
    assert!(matches!(
        ProjectionSystem::tree_of_flats(5, DEFAULT_SEED),
        Err(ProjectionError::InvalidArgument(_))
    ));
    let s = ProjectionSystem::tree_of_flats(6, DEFAULT_SEED).unwrap();
    assert!(s.domains().len() > 2 * 3);
}

#[test]
fn relations_follow_the_flats() {
    let s = tof();
    let d = s.domains();
    let mut seen = [0usize; 5];
    for (i, u) in d.iter().enumerate() {
        for v in d.iter().skip(i + 1) {
            let r = s.relation(u, v);
            seen[r as usize] += 1;
            match (u, v) {
                (Domain::Maximal, _) => assert_eq!(r, Relation::Contains),
                (
                    Domain::Line {
                        root: a,
                        generator: g,
                    },
                    Domain::Line {
                        root: b,
                        generator: h,
                    },
                ) => {
                    let same_flat = a == b;
                    let want = match (same_flat, g == h) {
                        (true, true) => Relation::Equal,
                        (true, false) => Relation::Orthogonal,
                        (false, _) => Relation::Transverse,
                    };
                    assert_eq!(r, want);
                }
                _ => unreachable!("the maximal domain comes first"),
            }
        }
    }
    assert_eq!(seen[Relation::Equal as usize], 0);
    // pairwise non-transverse families have at most N members
    assert!(s.constants().complexity >= 3);
}

#[test]
fn axiom_sweeps_are_clean_and_notice_planted_rho() {
    let s = tof();
    let samples = s.guard_samples();
    assert!(s.verify_behrstock(&samples).unwrap().violations.is_empty());
    let pairs = s.bgi_pairs();
    let all = s.verify_bgi_all(&pairs).unwrap();
    assert!(all.violations.is_empty());
    assert!(all.checked > 0);

    let mut bad = ProjectionSystem::tree_of_flats(7, DEFAULT_SEED).unwrap();
    let x = bad.presentation().generator_index("x").unwrap();
    let z = el(&bad, "z");
    let (u, v) = (bad.line(&GroupElement::identity(), x), bad.line(&z, x));
    bad.plant_rho_line(&u, &v, 5);
    bad.plant_rho_line(&v, &u, 5);
    assert!(!bad
        .verify_behrstock(&samples)
        .unwrap()
        .violations
        .is_empty());

    // ρ of a line in S moved to a far node: geodesics through the real one
    // now qualify and project onto long stretches of the line
    let i = bad.index_of(&u).unwrap();
    let far = (0..bad.contact().len() as u32)
        .max_by_key(|&n| bad.contact().depth(n))
        .unwrap();
    bad.plant_rho_s(i, vec![far]);
    let r = bad.verify_bgi(i, bad.maximal(), &pairs).unwrap();
    assert!(!r.violations.is_empty());
    assert!(matches!(
        s.verify_bgi(bad.maximal(), i, &pairs),
        Err(ProjectionError::InvalidArgument(_))
    ));
}

#[test]
fn active_domains() {
    let s = tof();
    let x = find_active_domain(s, &el(s, "x"), None, half()).unwrap();
    assert_eq!(x.domain, "x-line at e");
    assert_eq!(x.growth_ratio, Ratio::from_integer(1));
    assert!(x.passes_threshold);
    let z = find_active_domain(s, &el(s, "z"), None, half()).unwrap();
    assert_eq!(z.domain, "S");
    assert!(matches!(
        find_active_domain(s, &GroupElement::identity(), None, half()),
        Err(ProjectionError::NoGrowth)
    ));
    assert!(matches!(
        find_active_domain(s, &el(s, "x"), Some(100), half()),
        Err(ProjectionError::HorizonExceeded(_))
    ));
}

#[test]
fn transverse_pair_from_the_x_line() {
    let s = tof();
    let t: Vec<_> = ["x", "y", "z"].iter().map(|g| el(s, g)).collect();
    let x = s.presentation().generator_index("x").unwrap();
    let u = s.line(&GroupElement::identity(), x);
    let (b, bu) = find_transverse_pair(s, &t, &u, s.constants().complexity)
        .unwrap()
        .unwrap();
    assert_eq!(b, el(s, "z"));
    assert_eq!(s.relation(&u, &bu), Relation::Transverse);
    assert!(find_transverse_pair(s, &t, &Domain::Maximal, 3).is_err());
    // x and y fix the flat at e, so they alone never leave it
    assert!(find_transverse_pair(s, &t[..2], &u, 3).unwrap().is_none());
}

#[test]
fn conjugate_chain_edge_cases() {
    let s = tof();
    let (a, b) = (el(s, "x"), el(s, "z"));
    let x = s.presentation().generator_index("x").unwrap();
    let u = s.line(&GroupElement::identity(), x);
    let one = conjugate_chain(s, &a, &b, &u, 1, 1, 1, 8).unwrap();
    assert_eq!(one.domain_values, vec![u.clone(), s.translate(&b, &u)]);
    assert!(one.pairwise_transverse);
    assert!(matches!(
        conjugate_chain(s, &a, &b, &u, 1, 10_000, 3, 8),
        Err(ProjectionError::SeparationNotAchieved(_))
    ));
    let few = passing_up_search(s, &one.domain_values, &el(s, "x^-2"), &el(s, "z x^2"), 0, 0);
    assert!(few.found.is_none());
}

#[test]
fn relation_search_on_the_tree_of_flats() {
    let s = tof();
    let p = s.presentation();
    let (x, y) = (el(s, "x"), el(s, "y"));
    assert_eq!(
        relation_search(p, &x, &y, 4, 100_000).unwrap().as_deref(),
        Some("g1 g2 g1⁻¹ g2⁻¹")
    );
    assert_eq!(
        relation_search(p, &x, &el(s, "z"), 4, 100_000).unwrap(),
        None
    );
    assert!(matches!(
        relation_search(p, &x, &el(s, "z"), 8, 50),
        Err(ProjectionError::BudgetExceeded(_))
    ));
}

#[test]
fn system_document_round_trip() {
    let s = tof();
    let doc = s.to_doc();
    let text = serde_json::to_string(&doc).unwrap();
    let back: ProjectionSystemDoc = serde_json::from_str(&text).unwrap();
    let rebuilt = ProjectionSystem::from_doc(&back).unwrap();
    assert_eq!(rebuilt.constants(), s.constants());
    assert_eq!(serde_json::to_string(&rebuilt.to_doc()).unwrap(), text);
}

#[test]
fn free_group_recipe_certifies_a_generator() {
    let p = Presentation::free(&["a", "b"]);
    let s = ProjectionSystem::maximal_only(build_window(&p, 10).unwrap(), DEFAULT_SEED).unwrap();
    let t: Vec<_> = ["a", "b"].iter().map(|g| p.parse(g).unwrap()).collect();
    let out = recipe_rank_one(&s, &t, &RecipeOptions::default()).unwrap();
    let cert = out.certificate.expect("F₂ is rank one");
    assert_eq!(cert.a, "a");
    assert_eq!(cert.element_w, "a");
    assert!(cert.m.unwrap() <= 16);
    let direct = cert.direct.as_ref().unwrap();
    assert!(direct.skewer.holds && direct.tau.chain_verified);
    let text = serde_json::to_string(&cert).unwrap();
    let back: RecipeCertificate = serde_json::from_str(&text).unwrap();
    assert!(verify_certificate(&back).unwrap().all_match);
}

#[test]
fn product_recipes_return_none() {
    for (gens, pairs) in [
        (vec!["a", "b", "t"], vec![("a", "t"), ("b", "t")]),
        (vec!["a", "b"], vec![("a", "b")]),
    ] {
        let p = Presentation::new(&gens, &pairs).unwrap();
        let s = ProjectionSystem::maximal_only(build_window(&p, 6).unwrap(), DEFAULT_SEED).unwrap();
        let t: Vec<_> = gens.iter().map(|g| p.parse(g).unwrap()).collect();
        let out = recipe_rank_one(&s, &t, &RecipeOptions::default()).unwrap();
        assert!(out.certificate.is_none());
        assert!(out.product.is_some());
    }
}
