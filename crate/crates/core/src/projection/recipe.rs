use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::search::{
    conjugate_chain, find_active_domain, find_transverse_pair, passing_up_search,
    ActiveDomainReport, ConjugateChain, PassingUpReport,
};
use super::system::{Domain, ProjectionSystem};
use super::ProjectionError;
use crate::budget::vertex_cap;
use crate::contact::{
    build_contact_graph, detect_product, wall_curtain, ProductWitness, VertexAction, WallAction,
};
use crate::curtain::{
    certify_tau, flip_then_skewer, skewer_check, AxisProjection, CurtainError, FlipCheck,
    FlipThenSkewer, HypGraph, TauCertificate,
};
use crate::graph::UNREACHED;
use crate::median::WallId;
use crate::raag::{
    build_window_with_cap, BallComplex, GroupElement, Presentation, PresentationDoc,
};

/// Name of the route that needs a contact-graph curtain flipped by both
/// factors.
pub const CONTACT_ROUTE_LABEL: &str = "contact-graph flip";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecipeOptions {
    pub threshold: Ratio<u64>,
    pub m_max: u32,
    /// Translates used by `certify_tau`.
    pub iterations: u32,
    pub chain_length: usize,
    pub s_max: u32,
    /// Cap on predicate evaluations.
    pub budget: usize,
}

impl Default for RecipeOptions {
    fn default() -> Self {
        RecipeOptions {
            threshold: Ratio::new(1, 2),
            m_max: 64,
            iterations: 3,
            chain_length: 3,
            s_max: 64,
            budget: 100_000,
        }
    }
}

/// A power of one element skewering a contact-graph curtain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkewerCertificate {
    pub element: String,
    pub power: u32,
    /// Contact-graph depth up to which the predicates were evaluated.
    pub guard: u32,
    pub skewer: FlipCheck,
    pub tau: TauCertificate,
}

/// The active domain is the maximal one, so the element is certified
/// directly.
pub type DirectCertificate = SkewerCertificate;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub b: String,
    pub u: String,
    pub gu: String,
    /// `d_S(ρ^U_S, ρ^{gU}_S)` in the window, if both are visible.
    pub measured: Option<u32>,
    pub needed: u64,
    pub achieved: bool,
    pub chain: Option<ConjugateChain>,
    pub passing_up: Option<PassingUpReport>,
}

/// `w = g2 g1` flips a cubical wall: `g1 = g a^m g⁻¹` moves `k⁺` into
/// `k⁻`, `a^m` moves it back, and `w k⁺ ⊊ k⁺`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubicalWallCertificate {
    pub wall: WallId,
    /// The wall's shallowest edge, `k⁺` holding the first endpoint.
    pub edge: [String; 2],
    pub contact_node: Option<u32>,
    /// Vertex depth up to which the predicates were evaluated.
    pub guard: u32,
    pub flip_then_skewer: FlipThenSkewer,
    /// Whether the wall is a node of the pole of the contact-graph curtain
    /// recorded in the certificate.
    pub inside_contact_curtain: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecipeCertificate {
    pub presentation: PresentationDoc,
    pub horizon: u32,
    pub seed: u64,
    pub e_window: u32,
    pub a: String,
    pub active: ActiveDomainReport,
    pub g: Option<String>,
    pub m: Option<u32>,
    /// `a^m (g a^m g⁻¹)` on the flip route, `a` on the direct route.
    pub element_w: String,
    pub direct: Option<DirectCertificate>,
    pub separation: Option<SeparationReport>,
    /// Flip-then-skewer on a contact-graph curtain, if one was found.
    pub contact_flip: Option<FlipThenSkewer>,
    pub contact_flip_failure: Option<String>,
    /// A contact-graph skewer for a power of `w`.
    pub contact_skewer: Option<SkewerCertificate>,
    pub cubical: Option<CubicalWallCertificate>,
    pub attempts: usize,
    /// Every bound is relative to the window.
    pub window_relative: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecipeOutcome {
    pub certificate: Option<RecipeCertificate>,
    pub product: Option<ProductWitness>,
    pub reason: Option<String>,
}

struct Budget {
    used: usize,
    cap: usize,
}

impl Budget {
    fn spend(&mut self) -> Result<(), ProjectionError> {
        self.used += 1;
        if self.used > self.cap {
            return Err(ProjectionError::BudgetExceeded(format!(
                "more than {} predicate evaluations",
                self.cap
            )));
        }
        Ok(())
    }
}

/// Contact axis through `π_S(w^{-J})` and `π_S(w^J)` for the largest `J`
/// keeping both in the window.
fn orbit_axis(s: &ProjectionSystem, w: &GroupElement) -> Option<Vec<u32>> {
    let len = w.length() as u32;
    if len == 0 {
        return None;
    }
    let j = (s.ball().horizon() / len) as i64;
    if j == 0 {
        return None;
    }
    let p = s.presentation();
    let b = s.ball();
    let from = b.vertex_of(&p.power(w, -j))?;
    let to = b.vertex_of(&p.power(w, j))?;
    s.geodesic(&s.pi_s(from), &s.pi_s(to))
}

/// Least power (then offset) of `w` skewering a curtain on its orbit axis,
/// with a verified chain.
fn contact_skewer(
    s: &ProjectionSystem,
    w: &GroupElement,
    opts: &RecipeOptions,
    budget: &mut Budget,
) -> Result<Option<SkewerCertificate>, ProjectionError> {
    let Some(axis) = orbit_axis(s, w) else {
        return Ok(None);
    };
    let hyp = s.hyp();
    let proj = AxisProjection::new(hyp, &axis)?;
    let p = s.presentation();
    let horizon = s.ball().horizon() as i64;
    for power in 1..=opts.m_max {
        let wp = p.power(w, power as i64);
        let guard = horizon - wp.length() as i64 - 1;
        if guard < 0 {
            break;
        }
        let guard = guard as u32;
        let act = WallAction::new(s.ball(), s.contact(), wp.clone());
        for offset in 1.. {
            let c = match proj.curtain(offset) {
                Ok(c) => c,
                Err(CurtainError::IntervalTooWide { .. }) => break,
                Err(e) => return Err(e.into()),
            };
            budget.spend()?;
            let Ok(check) = skewer_check(hyp, &act, &c, Some(guard)) else {
                continue;
            };
            if !check.holds {
                continue;
            }
            let label = p.render(&wp);
            let Ok(mut tau) = certify_tau(hyp, &act, &label, &c, opts.iterations, Some(guard))
            else {
                continue;
            };
            if tau.chain_verified {
                tau.curtain = tau.curtain.compact();
                return Ok(Some(SkewerCertificate {
                    element: p.render(w),
                    power,
                    guard,
                    skewer: check,
                    tau,
                }));
            }
        }
    }
    Ok(None)
}

fn window_hyp(ball: &BallComplex) -> Result<HypGraph, CurtainError> {
    HypGraph::with_depth(
        ball.window().graph().clone(),
        1,
        ball.window().depths().to_vec(),
    )
}

/// The first wall on the way from the flat of `U` to the flat of `gU`, with
/// `k⁺` on the side of `U`.
fn separating_wall(s: &ProjectionSystem, u: &Domain, gu: &Domain) -> Option<(WallId, u32)> {
    let (Domain::Line { root: r1, .. }, Domain::Line { root: r2, .. }) = (u, gu) else {
        return None;
    };
    let p = s.presentation();
    let ball = s.ball();
    // the gate of the far flat on the near one, then one step towards it
    let rel = p.multiply(&p.inverse(r1), r2);
    let lead = rel
        .letters()
        .iter()
        .take_while(|l| s.is_flat_generator(l.generator()))
        .count();
    let next = *rel.letters().get(lead)?;
    let gate = p.multiply(r1, &p.element(&rel.letters()[..lead]));
    let beyond = p.multiply(&gate, &p.element(&[next]));
    let (a, b) = (ball.vertex_of(&gate)?, ball.vertex_of(&beyond)?);
    let e = ball.window().graph().edge_id(a, b)?;
    Some((ball.walls().wall_of_edge(e), a))
}

/// Runs the rank-one recipe: active domain, then either a direct
/// contact-graph certificate or a transverse translate, a flip search and
/// flip-then-skewer certificates.
pub fn recipe_rank_one(
    s: &ProjectionSystem,
    t: &[GroupElement],
    opts: &RecipeOptions,
) -> Result<RecipeOutcome, ProjectionError> {
    if t.is_empty() {
        return Err(ProjectionError::InvalidArgument(
            "T must be nonempty".into(),
        ));
    }
    if let Some(w) = detect_product(s.ball()) {
        return Ok(RecipeOutcome {
            certificate: None,
            product: Some(w),
            reason: Some(
                "the walls split as a product; the maximal domain has bounded diameter".into(),
            ),
        });
    }
    let mut budget = Budget {
        used: 0,
        cap: opts.budget,
    };
    let p = s.presentation();

    let mut active = None;
    let mut last_err = ProjectionError::NoGrowth;
    for a in t {
        match find_active_domain(s, a, None, opts.threshold) {
            Ok(r) if r.passes_threshold => {
                active = Some((a.clone(), r));
                break;
            }
            Ok(_) => {}
            Err(e) => last_err = e,
        }
    }
    let Some((a, active)) = active else {
        return Err(last_err);
    };
    let u = active.domain_value.clone().expect("set by the search");

    let mut cert = RecipeCertificate {
        presentation: p.to_doc(),
        horizon: s.ball().horizon(),
        seed: s.seed(),
        e_window: s.constants().e_window,
        a: p.render(&a),
        active,
        g: None,
        m: None,
        element_w: p.render(&a),
        direct: None,
        separation: None,
        contact_flip: None,
        contact_flip_failure: None,
        contact_skewer: None,
        cubical: None,
        attempts: 0,
        window_relative: true,
    };

    if u == Domain::Maximal {
        let direct = contact_skewer(s, &a, opts, &mut budget)?;
        cert.attempts = budget.used;
        return Ok(match direct {
            Some(d) => {
                cert.m = Some(d.power);
                cert.direct = Some(d);
                RecipeOutcome {
                    certificate: Some(cert),
                    product: None,
                    reason: None,
                }
            }
            None => RecipeOutcome {
                certificate: None,
                product: None,
                reason: Some(format!(
                    "no power up to {} of {} skewers a contact curtain",
                    opts.m_max, cert.a
                )),
            },
        });
    }

    let e = s.constants().e_window as u64;
    let Some((b, bu)) = find_transverse_pair(s, t, &u, s.constants().complexity)? else {
        return Ok(RecipeOutcome {
            certificate: None,
            product: None,
            reason: Some(format!(
                "no translate of {} is transverse to it",
                s.label(&u)
            )),
        });
    };
    let needed = 30 * e;
    let measure = |d: &Domain| {
        let (r1, r2) = (s.rho_s_of(&u), s.rho_s_of(d));
        if r1.is_empty() || r2.is_empty() {
            None
        } else {
            s.set_distance(&r1, &r2, UNREACHED)
        }
    };
    let mut g = b.clone();
    let mut gu = bu.clone();
    let mut separation = SeparationReport {
        b: p.render(&b),
        u: s.label(&u),
        gu: s.label(&bu),
        measured: measure(&bu),
        needed,
        achieved: measure(&bu).is_some_and(|d| d as u64 > needed),
        chain: None,
        passing_up: None,
    };
    if !separation.achieved {
        if let Ok(chain) = conjugate_chain(s, &a, &b, &u, 1, 10 * e, opts.chain_length, opts.s_max)
        {
            let k = (10 * e + 1) as i64;
            let x = p.power(&a, -k);
            let y = p.multiply(
                chain.translators.last().expect("nonempty chain"),
                &p.power(&a, k),
            );
            separation.passing_up = Some(passing_up_search(
                s,
                &chain.domain_values,
                &x,
                &y,
                10 * e,
                needed,
            ));
            for (d, h) in chain.domain_values.iter().zip(&chain.translators).skip(1) {
                if let Some(m) = measure(d).filter(|&m| m as u64 > needed) {
                    g = h.clone();
                    gu = d.clone();
                    separation.gu = s.label(d);
                    separation.measured = Some(m);
                    separation.achieved = true;
                    break;
                }
            }
            separation.chain = Some(chain);
        }
    }
    cert.g = Some(p.render(&g));
    cert.separation = Some(separation);

    // contact-graph curtain between ρ^{gU}_S and ρ^U_S with 6E margins
    let margins = 18 * e;
    let route = match s.geodesic(&s.rho_s_of(&gu), &s.rho_s_of(&u)) {
        None => Err("the ρ sets of U and gU are not both visible in the window".to_string()),
        Some(path) if ((path.len() - 1) as u64) < margins => Err(format!(
            "the contact geodesic from ρ^gU_S to ρ^U_S has length {}, a curtain with 6E margins needs {margins}",
            path.len() - 1
        )),
        Some(path) => Ok(path),
    };

    let wall = separating_wall(s, &u, &gu);
    let wall_hyp = window_hyp(s.ball())?;
    let horizon = s.ball().horizon() as i64;
    let mut chosen = None;
    for m in 1..=opts.m_max {
        let am = p.power(&a, m as i64);
        let g1 = p.conjugate(&g, &am);
        let w = p.multiply(&am, &g1);
        let label = p.render(&w);
        let contact_guard = horizon - w.length() as i64 - 1;
        let cube_guard = horizon - w.length() as i64;
        if contact_guard < 0 && cube_guard < 1 {
            break;
        }

        let mut axes = Vec::new();
        if let Ok(path) = &route {
            axes.push((path.clone(), Some(6 * e as u32)));
        }
        if let Some(axis) = orbit_axis(s, &w) {
            axes.push((axis, None));
        }
        if contact_guard >= 0 {
            let f = WallAction::new(s.ball(), s.contact(), g1.clone());
            let s2 = WallAction::new(s.ball(), s.contact(), am.clone());
            'axes: for (axis, fixed) in axes {
                let proj = AxisProjection::new(s.hyp(), &axis)?;
                let offsets: Vec<u32> = match fixed {
                    Some(o) => vec![o],
                    None => (1..axis.len() as u32).collect(),
                };
                for offset in offsets {
                    let Ok(c) = proj.curtain(offset) else { break };
                    budget.spend()?;
                    let guard = Some(contact_guard as u32);
                    if let Ok(mut fts) =
                        flip_then_skewer(s.hyp(), &f, &s2, &label, &c, opts.iterations, guard)
                    {
                        if fts.containment && fts.tau.chain_verified {
                            fts.tau.curtain = fts.tau.curtain.compact();
                            cert.contact_flip = Some(fts);
                            break 'axes;
                        }
                    }
                }
            }
        }

        if let (Some((k, near)), true) = (wall, cube_guard >= 1) {
            budget.spend()?;
            let c = wall_curtain(s.ball(), k, near)?;
            let f = VertexAction::new(s.ball(), g1.clone());
            let s2 = VertexAction::new(s.ball(), am.clone());
            let guard = Some(cube_guard as u32);
            if let Ok(mut fts) =
                flip_then_skewer(&wall_hyp, &f, &s2, &label, &c, opts.iterations, guard)
            {
                if fts.containment && fts.tau.chain_verified {
                    fts.tau.curtain = fts.tau.curtain.compact();
                    let window = s.ball().window();
                    cert.cubical = Some(CubicalWallCertificate {
                        wall: k,
                        edge: [
                            window.label(c.axis()[1]).to_string(),
                            window.label(c.axis()[0]).to_string(),
                        ],
                        contact_node: s.contact().node(k),
                        guard: cube_guard as u32,
                        flip_then_skewer: fts,
                        inside_contact_curtain: None,
                    });
                }
            }
        }
        if cert.contact_flip.is_some() || cert.cubical.is_some() {
            chosen = Some((m, w, label));
            break;
        }
    }
    let mut flip_failure = route.as_ref().err().cloned();
    if let Some((m, w, label)) = &chosen {
        cert.m = Some(*m);
        cert.element_w = label.clone();
        cert.contact_skewer = contact_skewer(s, w, opts, &mut budget)?;
    }
    if cert.contact_flip.is_some() {
        flip_failure = None;
    } else if flip_failure.is_none() {
        flip_failure = Some(format!(
            "no contact-graph curtain is flipped by both factors for m up to {}",
            cert.m.unwrap_or(opts.m_max)
        ));
    }
    cert.contact_flip_failure = flip_failure.map(|f| format!("{CONTACT_ROUTE_LABEL}: {f}"));
    if let Some(cub) = cert.cubical.as_mut() {
        let pole = cert
            .contact_flip
            .as_ref()
            .map(|f| &f.tau.curtain)
            .or(cert.contact_skewer.as_ref().map(|k| &k.tau.curtain));
        if let (Some(doc), Some(node)) = (pole, cub.contact_node) {
            let c = AxisProjection::new(s.hyp(), &doc.axis)?.curtain(doc.offset)?;
            cub.inside_contact_curtain = Some(c.in_pole(node));
        }
    }
    cert.attempts = budget.used;
    let emitted = cert.cubical.is_some() || cert.contact_flip.is_some();
    Ok(RecipeOutcome {
        reason: (!emitted)
            .then(|| "no flip-then-skewer certificate found within the window".to_string()),
        certificate: emitted.then_some(cert),
        product: None,
    })
}

/// Outcome of re-running every stored check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundTrip {
    pub checks: Vec<(String, bool)>,
    pub all_match: bool,
}

/// Rebuilds the window a certificate names and re-runs each stored check,
/// comparing the outcomes field by field.
pub fn verify_certificate(cert: &RecipeCertificate) -> Result<RoundTrip, ProjectionError> {
    let p = Presentation::from_doc(&cert.presentation)?;
    let ball = build_window_with_cap(&p, cert.horizon, vertex_cap())?;
    let contact = build_contact_graph(&ball);
    let hyp = contact.hyp(cert.e_window)?;
    let mut checks = Vec::new();

    let recheck_skewer = |k: &SkewerCertificate,
                          name: &str,
                          checks: &mut Vec<(String, bool)>|
     -> Result<(), ProjectionError> {
        let w = p.parse(&k.element)?;
        let wp = p.power(&w, k.power as i64);
        let act = WallAction::new(&ball, &contact, wp.clone());
        let c = AxisProjection::new(&hyp, &k.tau.curtain.axis)?.curtain(k.tau.curtain.offset)?;
        let skewer = skewer_check(&hyp, &act, &c, Some(k.guard))?;
        checks.push((format!("{name} skewer"), skewer == k.skewer));
        let mut tau = certify_tau(
            &hyp,
            &act,
            &k.tau.element,
            &c,
            k.tau.iterations,
            Some(k.guard),
        )?;
        tau.curtain = tau.curtain.compact();
        checks.push((format!("{name} tau"), tau == k.tau));
        Ok(())
    };
    if let Some(d) = &cert.direct {
        recheck_skewer(d, "direct", &mut checks)?;
    }
    if let Some(k) = &cert.contact_skewer {
        recheck_skewer(k, "contact", &mut checks)?;
    }
    let factors = |w_label: &str| -> Result<(GroupElement, GroupElement), ProjectionError> {
        let a = p.parse(&cert.a)?;
        let g = p.parse(cert.g.as_deref().unwrap_or("e"))?;
        let m = cert
            .m
            .ok_or_else(|| ProjectionError::InvalidArgument("certificate has no m".into()))?;
        let am = p.power(&a, m as i64);
        let g1 = p.conjugate(&g, &am);
        let w = p.multiply(&am, &g1);
        if p.render(&w) != w_label {
            return Err(ProjectionError::InvalidArgument(format!(
                "stored element {w_label} is not a^m g a^m g⁻¹ = {}",
                p.render(&w)
            )));
        }
        Ok((g1, am))
    };
    if let Some(f) = &cert.contact_flip {
        let (g1, am) = factors(&f.tau.element)?;
        let c = AxisProjection::new(&hyp, &f.tau.curtain.axis)?.curtain(f.tau.curtain.offset)?;
        let guard = f.tau.guard;
        let mut again = flip_then_skewer(
            &hyp,
            &WallAction::new(&ball, &contact, g1),
            &WallAction::new(&ball, &contact, am),
            &f.tau.element,
            &c,
            f.tau.iterations,
            guard,
        )?;
        again.tau.curtain = again.tau.curtain.compact();
        checks.push(("contact flip-then-skewer".into(), again == *f));
    }
    if let Some(cub) = &cert.cubical {
        let (g1, am) = factors(&cub.flip_then_skewer.tau.element)?;
        let near = ball
            .window()
            .vertex(&cub.edge[0])
            .map_err(|e| ProjectionError::InvalidArgument(e.to_string()))?;
        let c = wall_curtain(&ball, cub.wall, near)?;
        let wall_hyp = window_hyp(&ball)?;
        let mut again = flip_then_skewer(
            &wall_hyp,
            &VertexAction::new(&ball, g1),
            &VertexAction::new(&ball, am),
            &cub.flip_then_skewer.tau.element,
            &c,
            cub.flip_then_skewer.tau.iterations,
            Some(cub.guard),
        )?;
        again.tau.curtain = again.tau.curtain.compact();
        checks.push((
            "cubical flip-then-skewer".into(),
            again == cub.flip_then_skewer,
        ));
    }
    let all_match = !checks.is_empty() && checks.iter().all(|(_, ok)| *ok);
    Ok(RoundTrip { checks, all_match })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubical_wall_curtain_sides() {
        let p = Presentation::tree_of_flats();
        let ball = build_window_with_cap(&p, 4, vertex_cap()).unwrap();
        let (e, z) = (
            ball.window().vertex("e").unwrap(),
            ball.window().vertex("z").unwrap(),
        );
        let edge = ball.window().graph().edge_id(e, z).unwrap();
        let k = ball.walls().wall_of_edge(edge);
        let c = wall_curtain(&ball, k, e).unwrap();
        assert!(c.in_side(crate::curtain::Side::Plus, e));
        assert!(c.in_side(crate::curtain::Side::Minus, z));
        assert!(c.in_pole(e) && c.in_pole(z));
    }
}
