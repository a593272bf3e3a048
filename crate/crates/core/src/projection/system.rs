use std::collections::{HashMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ProjectionError;
use crate::budget::vertex_cap;
use crate::contact::{build_contact_graph, ContactGraph};
use crate::curtain::{four_point_delta, HypGraph};
use crate::graph::{Graph, UNREACHED};
use crate::raag::{
    build_window_with_cap, BallComplex, GroupElement, Letter, Presentation, PresentationDoc,
};

/// Default seed for sampled sweeps.
pub const DEFAULT_SEED: u64 = 7;

/// Geodesic pairs sampled for the bounded-geodesic-image sweep.
const BGI_PAIRS: usize = 48;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Domain {
    /// The contact graph of the window.
    Maximal,
    /// The `generator`-line of the flat `root·⟨x, y⟩`; `root` has no
    /// trailing flat letters.
    Line {
        root: GroupElement,
        generator: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Equal,
    /// The first domain is nested in the second.
    Nested,
    /// The second domain is nested in the first.
    Contains,
    Orthogonal,
    Transverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    TreeOfFlats,
    MaximalOnly,
}

/// Measured constants. `lambda` is one more than the largest defect seen by
/// the sweeps (and at least the largest ρ diameter); `e = max(k, complexity
/// · lambda)`; `e_window` is the curtain constant of the contact graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constants {
    pub lambda: u32,
    pub k: u32,
    pub complexity: u32,
    pub e: u32,
    pub e_window: u32,
    /// Twice the four-point δ of the contact graph and whether the scan was
    /// exhaustive.
    pub twice_delta: u32,
    pub delta_exhaustive: bool,
    pub rho_diameter: u32,
    pub behrstock_defect: u32,
    pub bgi_defect: u32,
    pub lipschitz_defect: u32,
}

pub struct ProjectionSystem {
    ball: BallComplex,
    contact: ContactGraph,
    hyp: HypGraph,
    kind: SystemKind,
    flat: Vec<usize>,
    domains: Vec<Domain>,
    index: HashMap<Domain, usize>,
    rho_s: Vec<Vec<u32>>,
    /// Hand-set values of `ρ` between lines, replacing the computed ones.
    planted: HashMap<(Domain, Domain), i64>,
    constants: Constants,
    seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BehrstockViolation {
    pub x: String,
    pub u: String,
    pub v: String,
    pub d_u: u64,
    pub d_v: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BehrstockReport {
    pub lambda: u32,
    pub samples: usize,
    pub transverse_pairs: usize,
    pub checked: usize,
    /// Largest `min(d_U, d_V)` over all checked instances.
    pub max_defect: u64,
    pub violations: Vec<BehrstockViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BgiViolation {
    pub u: String,
    pub x: String,
    pub y: String,
    pub distance_to_rho: u32,
    pub diameter: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BgiReport {
    pub lambda: u32,
    pub domains: usize,
    pub geodesics: usize,
    /// Geodesic-domain instances meeting the distance precondition.
    pub checked: usize,
    /// Instances excluded because the geodesic comes within `lambda` of ρ.
    pub vacuous: usize,
    pub max_diameter: u64,
    pub violations: Vec<BgiViolation>,
}

/// A contact geodesic between two complex points with the complex points
/// realizing it.
struct SampledGeodesic {
    x: u32,
    y: u32,
    nodes: Vec<u32>,
    points: Vec<u32>,
}

pub fn instantiate_tree_of_flats(horizon: u32) -> Result<ProjectionSystem, ProjectionError> {
    ProjectionSystem::tree_of_flats(horizon, DEFAULT_SEED)
}

pub fn instantiate_maximal_only(ball: BallComplex) -> Result<ProjectionSystem, ProjectionError> {
    ProjectionSystem::maximal_only(ball, DEFAULT_SEED)
}

impl ProjectionSystem {
    /// Tree-of-flats system on the ball of radius `horizon`: the two lines
    /// of each flat whose root lies within the guard, and the contact graph.
    pub fn tree_of_flats(horizon: u32, seed: u64) -> Result<Self, ProjectionError> {
        if horizon < 6 {
            return Err(ProjectionError::InvalidArgument(format!(
                "the tree of flats needs horizon at least 6, got {horizon}"
            )));
        }
        let p = Presentation::tree_of_flats();
        let ball = build_window_with_cap(&p, horizon, vertex_cap())?;
        let flat = vec![p.generator_index("x")?, p.generator_index("y")?];
        Self::assemble(ball, SystemKind::TreeOfFlats, flat, seed)
    }

    /// The system with the contact graph as its only domain.
    pub fn maximal_only(ball: BallComplex, seed: u64) -> Result<Self, ProjectionError> {
        Self::assemble(ball, SystemKind::MaximalOnly, Vec::new(), seed)
    }

    fn assemble(
        ball: BallComplex,
        kind: SystemKind,
        flat: Vec<usize>,
        seed: u64,
    ) -> Result<Self, ProjectionError> {
        let contact = build_contact_graph(&ball);
        let (twice_delta, delta_exhaustive) = four_point_delta(contact.graph(), seed);
        let e_window = twice_delta.div_ceil(2).max(1);
        let hyp = contact.hyp(e_window)?;
        let mut s = ProjectionSystem {
            ball,
            contact,
            hyp,
            kind,
            flat,
            domains: vec![Domain::Maximal],
            index: HashMap::new(),
            rho_s: vec![Vec::new()],
            planted: HashMap::new(),
            constants: Constants {
                lambda: 1,
                k: 1,
                complexity: 1,
                e: 1,
                e_window,
                twice_delta,
                delta_exhaustive,
                rho_diameter: 0,
                behrstock_defect: 0,
                bgi_defect: 0,
                lipschitz_defect: 0,
            },
            seed,
        };
        if kind == SystemKind::TreeOfFlats {
            let guard = s.ball.guard();
            let mut roots: Vec<GroupElement> = (0..s.ball.len() as u32)
                .filter(|&v| s.ball.window().depth(v) <= guard)
                .map(|v| s.ball.element(v))
                .filter(|g| {
                    g.letters()
                        .last()
                        .is_none_or(|l| !s.flat.contains(&l.generator()))
                })
                .collect();
            roots.sort_by(|a, b| a.shortlex_cmp(b));
            for r in roots {
                for &gen in &s.flat.clone() {
                    let d = Domain::Line {
                        root: r.clone(),
                        generator: gen,
                    };
                    let rho = s.rho_s_of(&d);
                    s.domains.push(d);
                    s.rho_s.push(rho);
                }
            }
            s.constants.complexity = 3;
        }
        s.index = s
            .domains
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, d)| (d, i))
            .collect();
        s.measure_constants();
        Ok(s)
    }

    pub fn ball(&self) -> &BallComplex {
        &self.ball
    }

    pub fn contact(&self) -> &ContactGraph {
        &self.contact
    }

    /// The contact graph with its curtain constant.
    pub fn hyp(&self) -> &HypGraph {
        &self.hyp
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn presentation(&self) -> &Presentation {
        self.ball.presentation()
    }

    pub fn constants(&self) -> &Constants {
        &self.constants
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Replaces λ (for instance by a frozen value read from a document).
    pub fn set_lambda(&mut self, lambda: u32) {
        self.constants.lambda = lambda;
        self.constants.k = lambda;
        self.constants.e = lambda.max(self.constants.complexity * lambda);
    }

    /// Instantiated domains: `S` first, then lines by (root shortlex,
    /// generator).
    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn domain(&self, i: usize) -> &Domain {
        &self.domains[i]
    }

    pub fn index_of(&self, d: &Domain) -> Option<usize> {
        self.index.get(d).copied()
    }

    /// Whether the generator spans flats together with its partner.
    pub fn is_flat_generator(&self, generator: usize) -> bool {
        self.flat.contains(&generator)
    }

    pub fn maximal(&self) -> usize {
        0
    }

    pub fn label(&self, d: &Domain) -> String {
        match d {
            Domain::Maximal => "S".into(),
            Domain::Line { root, generator } => format!(
                "{}-line at {}",
                self.presentation().generators()[*generator],
                self.presentation().render(root)
            ),
        }
    }

    /// The line of the flat through `g`.
    pub fn line(&self, g: &GroupElement, generator: usize) -> Domain {
        let mut w = g.letters().to_vec();
        while w.last().is_some_and(|l| self.flat.contains(&l.generator())) {
            w.pop();
        }
        Domain::Line {
            root: self.presentation().element(&w),
            generator,
        }
    }

    /// `g·U`.
    pub fn translate(&self, g: &GroupElement, d: &Domain) -> Domain {
        match d {
            Domain::Maximal => Domain::Maximal,
            Domain::Line { root, generator } => {
                self.line(&self.presentation().multiply(g, root), *generator)
            }
        }
    }

    pub fn relation(&self, a: &Domain, b: &Domain) -> Relation {
        match (a, b) {
            _ if a == b => Relation::Equal,
            (Domain::Line { .. }, Domain::Maximal) => Relation::Nested,
            (Domain::Maximal, Domain::Line { .. }) => Relation::Contains,
            (Domain::Line { root: r1, .. }, Domain::Line { root: r2, .. }) => {
                if r1 == r2 {
                    Relation::Orthogonal
                } else {
                    Relation::Transverse
                }
            }
            _ => unreachable!("a single maximal domain"),
        }
    }

    /// Coordinate of the gate of `v` on the flat of a line.
    pub fn pi_line(&self, d: &Domain, v: &[Letter]) -> i64 {
        let Domain::Line { root, generator } = d else {
            panic!("pi_line on the maximal domain");
        };
        let p = self.presentation();
        let word: Vec<Letter> = p.inverse(root).letters().iter().chain(v).copied().collect();
        p.normal_form(&word)
            .iter()
            .take_while(|l| self.flat.contains(&l.generator()))
            .filter(|l| l.generator() == *generator)
            .map(|l| if l.is_inverse() { -1 } else { 1 })
            .sum()
    }

    /// Walls whose carrier contains the vertex.
    pub fn pi_s(&self, v: u32) -> Vec<u32> {
        let walls = self.ball.walls();
        let mut out: Vec<u32> = self
            .ball
            .window()
            .graph()
            .incident_edges(v)
            .iter()
            .filter_map(|&e| self.contact.node(walls.wall_of_edge(e)))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `ρ^U_V` for transverse lines: the coordinate of the gate of `U`'s flat
    /// on `V`'s flat.
    pub fn rho_line(&self, u: &Domain, v: &Domain) -> i64 {
        if let Some(&r) = self.planted.get(&(u.clone(), v.clone())) {
            return r;
        }
        let Domain::Line { root, .. } = u else {
            panic!("rho_line from the maximal domain");
        };
        self.pi_line(v, root.letters())
    }

    /// `ρ^U_S`: the walls crossing the line, as far as the window shows them.
    pub fn rho_s_of(&self, d: &Domain) -> Vec<u32> {
        if let Some(&i) = self.index.get(d) {
            return self.rho_s[i].clone();
        }
        let Domain::Line { root, generator } = d else {
            return Vec::new();
        };
        let p = self.presentation();
        let step = p.element(&[Letter::new(*generator, false)]);
        let graph = self.ball.window().graph();
        let mut out = Vec::new();
        for dir in [1i64, -1] {
            let mut i = if dir == 1 { 0 } else { -1 };
            loop {
                let a = p.multiply(root, &p.power(&step, i));
                let b = p.multiply(&a, &step);
                let (Some(u), Some(v)) = (self.ball.vertex_of(&a), self.ball.vertex_of(&b)) else {
                    break;
                };
                let e = graph.edge_id(u, v).expect("adjacent elements");
                if let Some(n) = self.contact.node(self.ball.walls().wall_of_edge(e)) {
                    out.push(n);
                }
                i += dir;
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn rho_s(&self, i: usize) -> &[u32] {
        &self.rho_s[i]
    }

    /// Overrides `ρ^U_V` between two lines, for checking that the sweeps
    /// notice a bad value.
    pub fn plant_rho_line(&mut self, u: &Domain, v: &Domain, value: i64) {
        self.planted.insert((u.clone(), v.clone()), value);
    }

    /// Overrides `ρ^U_S` for domain `i`.
    pub fn plant_rho_s(&mut self, i: usize, nodes: Vec<u32>) {
        assert!(i != self.maximal(), "the maximal domain has no ρ in itself");
        self.rho_s[i] = nodes;
    }

    /// Distance between node sets of the contact graph, if connected within
    /// `radius`.
    pub fn set_distance(&self, a: &[u32], b: &[u32], radius: u32) -> Option<u32> {
        nearest(self.contact.graph(), a, b, radius).map(|(d, _)| d)
    }

    /// A contact geodesic from `a` to `b` (first node in `a`, last in `b`).
    pub fn geodesic(&self, a: &[u32], b: &[u32]) -> Option<Vec<u32>> {
        nearest(self.contact.graph(), a, b, UNREACHED).map(|(_, path)| path)
    }

    /// Diameter of a node set in the contact graph.
    pub fn diameter(&self, set: &[u32]) -> u32 {
        let graph = self.contact.graph();
        let mut best = 0;
        for &s in set {
            let others: HashSet<u32> = set.iter().copied().collect();
            best = best.max(farthest_of(graph, s, &others));
        }
        best
    }

    /// Line domains transverse pairs, as index pairs `(i, j)` with `i < j`.
    fn transverse_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.domains.len();
        let mut out = Vec::new();
        for i in 1..n {
            for j in i + 1..n {
                if self.relation(&self.domains[i], &self.domains[j]) == Relation::Transverse {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Vertices within the guard, in vertex order.
    pub fn guard_samples(&self) -> Vec<u32> {
        let guard = self.ball.guard();
        (0..self.ball.len() as u32)
            .filter(|&v| self.ball.window().depth(v) <= guard)
            .collect()
    }

    /// Seeded pairs of guard-sphere vertices for the geodesic sweep.
    pub fn bgi_pairs(&self) -> Vec<(u32, u32)> {
        let guard = self.ball.guard();
        let sphere: Vec<u32> = (0..self.ball.len() as u32)
            .filter(|&v| self.ball.window().depth(v) == guard)
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut pairs = Vec::new();
        for _ in 0..BGI_PAIRS {
            let two: Vec<&u32> = sphere.choose_multiple(&mut rng, 2).collect();
            if two.len() == 2 {
                pairs.push((*two[0], *two[1]));
            }
        }
        pairs
    }

    fn check_samples(&self, samples: &[u32]) -> Result<(), ProjectionError> {
        for &x in samples {
            if x as usize >= self.ball.len() || self.ball.window().depth(x) > self.ball.guard() {
                return Err(ProjectionError::HorizonExceeded(format!(
                    "sample {x} lies outside the guard radius {}",
                    self.ball.guard()
                )));
            }
        }
        Ok(())
    }

    /// For every transverse pair `(U, V)` and sample `x` with
    /// `d_U(π_U(x), ρ^V_U) > λ`, checks `d_V(π_V(x), ρ^U_V) < λ` (both
    /// orders).
    pub fn verify_behrstock(&self, samples: &[u32]) -> Result<BehrstockReport, ProjectionError> {
        self.check_samples(samples)?;
        Ok(self.behrstock_with(samples, self.constants.lambda))
    }

    fn behrstock_with(&self, samples: &[u32], lambda: u32) -> BehrstockReport {
        let pairs = self.transverse_pairs();
        let table: Vec<Vec<i64>> = self
            .domains
            .iter()
            .map(|d| match d {
                Domain::Maximal => Vec::new(),
                _ => samples
                    .iter()
                    .map(|&x| self.pi_line(d, self.ball.normal_form_of(x)))
                    .collect(),
            })
            .collect();
        let lambda64 = lambda as u64;
        let mut violations = Vec::new();
        let mut max_defect = 0;
        let mut checked = 0;
        for &(i, j) in &pairs {
            let (u, v) = (&self.domains[i], &self.domains[j]);
            let rho_vu = self.rho_line(v, u);
            let rho_uv = self.rho_line(u, v);
            for (k, &x) in samples.iter().enumerate() {
                checked += 1;
                let d_u = table[i][k].abs_diff(rho_vu);
                let d_v = table[j][k].abs_diff(rho_uv);
                max_defect = max_defect.max(d_u.min(d_v));
                let bad =
                    (d_u > lambda64 && d_v >= lambda64) || (d_v > lambda64 && d_u >= lambda64);
                if bad {
                    violations.push(BehrstockViolation {
                        x: self.ball.window().label(x).to_string(),
                        u: self.label(u),
                        v: self.label(v),
                        d_u,
                        d_v,
                    });
                }
            }
        }
        BehrstockReport {
            lambda,
            samples: samples.len(),
            transverse_pairs: pairs.len(),
            checked,
            max_defect,
            violations,
        }
    }

    fn sample_geodesics(&self, pairs: &[(u32, u32)]) -> Vec<SampledGeodesic> {
        let walls = self.ball.walls();
        pairs
            .iter()
            .filter_map(|&(x, y)| {
                let nodes = self.geodesic(&self.pi_s(x), &self.pi_s(y))?;
                let mut points = vec![x];
                for w in nodes.windows(2) {
                    let a: HashSet<u32> = walls
                        .wall(self.contact.wall(w[0]))
                        .carrier
                        .iter()
                        .copied()
                        .collect();
                    let shared = walls
                        .wall(self.contact.wall(w[1]))
                        .carrier
                        .iter()
                        .copied()
                        .find(|v| a.contains(v))
                        .expect("adjacent walls have touching carriers");
                    points.push(shared);
                }
                points.push(y);
                Some(SampledGeodesic {
                    x,
                    y,
                    nodes,
                    points,
                })
            })
            .collect()
    }

    /// For each line `U` and sampled contact geodesic `γ` between complex
    /// points with `d_S(ρ^U_S, γ) > λ`, checks that the complex points
    /// realizing `γ` project to a set of diameter at most `λ` in `U`.
    pub fn verify_bgi(
        &self,
        u: usize,
        v: usize,
        pairs: &[(u32, u32)],
    ) -> Result<BgiReport, ProjectionError> {
        if self.relation(&self.domains[u], &self.domains[v]) != Relation::Nested {
            return Err(ProjectionError::InvalidArgument(format!(
                "{} is not nested in {}",
                self.label(&self.domains[u]),
                self.label(&self.domains[v])
            )));
        }
        self.check_samples(&pairs.iter().flat_map(|&(a, b)| [a, b]).collect::<Vec<_>>())?;
        let geodesics = self.sample_geodesics(pairs);
        Ok(self.bgi_with(&[u], &geodesics, self.constants.lambda))
    }

    /// The sweep over every line domain.
    pub fn verify_bgi_all(&self, pairs: &[(u32, u32)]) -> Result<BgiReport, ProjectionError> {
        self.check_samples(&pairs.iter().flat_map(|&(a, b)| [a, b]).collect::<Vec<_>>())?;
        let geodesics = self.sample_geodesics(pairs);
        let lines: Vec<usize> = (1..self.domains.len()).collect();
        Ok(self.bgi_with(&lines, &geodesics, self.constants.lambda))
    }

    fn bgi_with(&self, lines: &[usize], geodesics: &[SampledGeodesic], lambda: u32) -> BgiReport {
        let graph = self.contact.graph();
        let mut report = BgiReport {
            lambda,
            domains: lines.len(),
            geodesics: geodesics.len(),
            checked: 0,
            vacuous: 0,
            max_diameter: 0,
            violations: Vec::new(),
        };
        for &i in lines {
            let d = &self.domains[i];
            let near = bounded_bfs(graph, &self.rho_s[i], lambda);
            for g in geodesics {
                if g.nodes.iter().any(|n| near.contains_key(n)) {
                    report.vacuous += 1;
                    continue;
                }
                report.checked += 1;
                let coords: Vec<i64> = g
                    .points
                    .iter()
                    .map(|&p| self.pi_line(d, self.ball.normal_form_of(p)))
                    .collect();
                let diam = (coords.iter().max().unwrap() - coords.iter().min().unwrap()) as u64;
                report.max_diameter = report.max_diameter.max(diam);
                if diam > lambda as u64 {
                    let dist = self
                        .set_distance(&self.rho_s[i], &g.nodes, UNREACHED)
                        .unwrap_or(UNREACHED);
                    report.violations.push(BgiViolation {
                        u: self.label(d),
                        x: self.ball.window().label(g.x).to_string(),
                        y: self.ball.window().label(g.y).to_string(),
                        distance_to_rho: dist,
                        diameter: diam,
                    });
                }
            }
        }
        report
    }

    /// Largest `d_U(π_U(u), π_U(v))` over edges `uv` within the guard.
    fn lipschitz_defect(&self, samples: &[u32]) -> u32 {
        let set: HashSet<u32> = samples.iter().copied().collect();
        let graph = self.ball.window().graph();
        let mut worst = 0u64;
        for &(u, v) in graph.edges() {
            if !set.contains(&u) || !set.contains(&v) {
                continue;
            }
            for d in &self.domains[1..] {
                let a = self.pi_line(d, self.ball.normal_form_of(u));
                let b = self.pi_line(d, self.ball.normal_form_of(v));
                worst = worst.max(a.abs_diff(b));
            }
            let (pu, pv) = (self.pi_s(u), self.pi_s(v));
            if !pu.iter().any(|n| pv.contains(n)) {
                worst =
                    worst.max(self.set_distance(&pu, &pv, UNREACHED).unwrap_or(UNREACHED) as u64);
            }
        }
        worst as u32
    }

    /// Sweeps every axiom instance on the guard ball, sets λ to one more
    /// than the largest defect (and at least the ρ diameters), then checks
    /// that both sweeps are clean for that λ.
    fn measure_constants(&mut self) {
        let samples = self.guard_samples();
        let rho_diameter = self.rho_s[1..]
            .iter()
            .map(|r| self.diameter(r))
            .max()
            .unwrap_or(0);
        let behrstock = self.behrstock_with(&samples, u32::MAX);
        let lipschitz = self.lipschitz_defect(&samples);
        let lambda0 = (behrstock.max_defect as u32 + 1)
            .max(rho_diameter)
            .max(lipschitz)
            .max(1);
        let geodesics = self.sample_geodesics(&self.bgi_pairs());
        let lines: Vec<usize> = (1..self.domains.len()).collect();
        let bgi = self.bgi_with(&lines, &geodesics, lambda0);
        let lambda = lambda0.max(bgi.max_diameter as u32);
        self.constants.rho_diameter = rho_diameter;
        self.constants.behrstock_defect = behrstock.max_defect as u32;
        self.constants.bgi_defect = bgi.max_diameter as u32;
        self.constants.lipschitz_defect = lipschitz;
        self.set_lambda(lambda);
    }

    pub fn to_doc(&self) -> ProjectionSystemDoc {
        let domains = self
            .domains
            .iter()
            .enumerate()
            .map(|(i, d)| DomainDoc {
                id: i,
                label: self.label(d),
                root: match d {
                    Domain::Line { root, .. } => Some(self.presentation().render(root)),
                    Domain::Maximal => None,
                },
                generator: match d {
                    Domain::Line { generator, .. } => {
                        Some(self.presentation().generators()[*generator].clone())
                    }
                    Domain::Maximal => None,
                },
                rho_s: self.rho_s[i].clone(),
            })
            .collect();
        let mut relations = Vec::new();
        let mut rho = Vec::new();
        for i in 0..self.domains.len() {
            for j in i + 1..self.domains.len() {
                let r = self.relation(&self.domains[i], &self.domains[j]);
                relations.push((i, j, r));
                if r == Relation::Transverse {
                    rho.push((i, j, self.rho_line(&self.domains[i], &self.domains[j])));
                    rho.push((j, i, self.rho_line(&self.domains[j], &self.domains[i])));
                }
            }
        }
        ProjectionSystemDoc {
            kind: self.kind,
            presentation: self.presentation().to_doc(),
            horizon: self.ball.horizon(),
            guard: self.ball.guard(),
            seed: self.seed,
            vertices: self.ball.len(),
            walls: self.ball.walls().len(),
            contact_nodes: self.contact.len(),
            contact_edges: self.contact.graph().edge_count(),
            constants: self.constants.clone(),
            domains,
            relations,
            rho_lines: rho,
        }
    }

    /// Rebuilds the system a document describes and freezes the stored λ.
    pub fn from_doc(doc: &ProjectionSystemDoc) -> Result<Self, ProjectionError> {
        let p = Presentation::from_doc(&doc.presentation)?;
        let mut s = match doc.kind {
            SystemKind::TreeOfFlats => {
                if p.to_doc() != Presentation::tree_of_flats().to_doc() {
                    return Err(ProjectionError::InvalidArgument(
                        "a tree-of-flats system needs the presentation x, y, z with x, y commuting"
                            .into(),
                    ));
                }
                Self::tree_of_flats(doc.horizon, doc.seed)?
            }
            SystemKind::MaximalOnly => Self::maximal_only(
                build_window_with_cap(&p, doc.horizon, vertex_cap())?,
                doc.seed,
            )?,
        };
        if s.domains.len() != doc.domains.len() {
            return Err(ProjectionError::InvalidArgument(format!(
                "document lists {} domains, the rebuilt system has {}",
                doc.domains.len(),
                s.domains.len()
            )));
        }
        s.set_lambda(doc.constants.lambda);
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainDoc {
    pub id: usize,
    pub label: String,
    pub root: Option<String>,
    pub generator: Option<String>,
    pub rho_s: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionSystemDoc {
    pub kind: SystemKind,
    pub presentation: PresentationDoc,
    pub horizon: u32,
    pub guard: u32,
    pub seed: u64,
    pub vertices: usize,
    pub walls: usize,
    pub contact_nodes: usize,
    pub contact_edges: usize,
    pub constants: Constants,
    pub domains: Vec<DomainDoc>,
    pub relations: Vec<(usize, usize, Relation)>,
    /// `(U, V, ρ^U_V)` for transverse lines.
    pub rho_lines: Vec<(usize, usize, i64)>,
}

/// Multi-source BFS from `from` that stops at the first node of `to`;
/// returns the distance and a path.
fn nearest(graph: &Graph, from: &[u32], to: &[u32], radius: u32) -> Option<(u32, Vec<u32>)> {
    let targets: HashSet<u32> = to.iter().copied().collect();
    let mut parent: HashMap<u32, u32> = HashMap::new();
    let mut queue = VecDeque::new();
    for &s in from {
        if parent.insert(s, s).is_none() {
            queue.push_back((s, 0));
        }
    }
    while let Some((u, d)) = queue.pop_front() {
        if targets.contains(&u) {
            let mut path = vec![u];
            let mut cur = u;
            while parent[&cur] != cur {
                cur = parent[&cur];
                path.push(cur);
            }
            path.reverse();
            return Some((d, path));
        }
        if d >= radius {
            continue;
        }
        for &w in graph.neighbors(u) {
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(w) {
                e.insert(u);
                queue.push_back((w, d + 1));
            }
        }
    }
    None
}

/// Distances up to `radius` from a node set.
fn bounded_bfs(graph: &Graph, from: &[u32], radius: u32) -> HashMap<u32, u32> {
    let mut dist: HashMap<u32, u32> = from.iter().map(|&s| (s, 0)).collect();
    let mut frontier: Vec<u32> = from.to_vec();
    for d in 1..=radius {
        let mut next = Vec::new();
        for &u in &frontier {
            for &w in graph.neighbors(u) {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                    e.insert(d);
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    dist
}

/// Distance from `s` to the farthest member of `targets`.
fn farthest_of(graph: &Graph, s: u32, targets: &HashSet<u32>) -> u32 {
    let mut seen: HashSet<u32> = HashSet::from([s]);
    let mut frontier = vec![s];
    let mut remaining = targets.len() - usize::from(targets.contains(&s));
    let mut d = 0;
    while remaining > 0 && !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for &u in &frontier {
            for &w in graph.neighbors(u) {
                if seen.insert(w) {
                    if targets.contains(&w) {
                        remaining -= 1;
                    }
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    if remaining > 0 {
        UNREACHED
    } else {
        d
    }
}
