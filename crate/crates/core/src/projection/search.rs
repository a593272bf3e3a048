use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::system::{Domain, ProjectionSystem, Relation};
use super::ProjectionError;
use crate::contact::WallAction;
use crate::curtain::GraphAction;
use crate::graph::UNREACHED;
use crate::raag::{enumerate_with_lengths, GroupElement, Presentation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveDomainReport {
    pub element: String,
    pub domain: String,
    #[serde(skip)]
    pub domain_value: Option<Domain>,
    /// Largest observed `d_U(x, a^i x) / i` over `1 ≤ i ≤ k`.
    pub growth_ratio: Ratio<u64>,
    pub threshold: Ratio<u64>,
    pub passes_threshold: bool,
    pub k: u32,
    /// `(i, d_U(x, a^i x))` on the chosen domain.
    pub observed: Vec<(u32, u64)>,
}

/// Displacements `d_U(x, a^i x)` for `1 ≤ i ≤ k`. On a line `x = π_U(e)`;
/// on `S` the smallest displacement of a node `x ∈ π_S(e)`, so that a wall
/// fixed by `a` shows no growth.
fn displacements(s: &ProjectionSystem, d: &Domain, a: &GroupElement, k: u32) -> Vec<(u32, u64)> {
    let p = s.presentation();
    let e = GroupElement::identity();
    match d {
        Domain::Maximal => {
            let b = s.ball();
            let start = s.pi_s(b.vertex_of(&e).expect("identity is in the window"));
            (1..=k)
                .map(|i| {
                    let act = WallAction::new(b, s.contact(), p.power(a, i as i64));
                    let dist = start
                        .iter()
                        .filter_map(|&n| {
                            let m = act.image(n)?;
                            s.set_distance(&[n], &[m], UNREACHED)
                        })
                        .min()
                        .unwrap_or(UNREACHED);
                    (i, dist as u64)
                })
                .collect()
        }
        _ => {
            let base = s.pi_line(d, e.letters());
            (1..=k)
                .map(|i| {
                    (
                        i,
                        s.pi_line(d, p.power(a, i as i64).letters()).abs_diff(base),
                    )
                })
                .collect()
        }
    }
}

/// The instantiated domain on which `a` shows the largest growth ratio,
/// ties going to the earlier domain. `k` defaults to `guard / |a|`.
pub fn find_active_domain(
    s: &ProjectionSystem,
    a: &GroupElement,
    k: Option<u32>,
    threshold: Ratio<u64>,
) -> Result<ActiveDomainReport, ProjectionError> {
    let guard = s.ball().guard();
    let len = a.length() as u32;
    if len == 0 {
        return Err(ProjectionError::NoGrowth);
    }
    let k = k.unwrap_or(guard / len).max(1);
    if len * k > guard {
        return Err(ProjectionError::HorizonExceeded(format!(
            "{} to the power {k} leaves the guard radius {guard}",
            s.presentation().render(a)
        )));
    }
    let mut best: Option<(Ratio<u64>, usize, Vec<(u32, u64)>)> = None;
    for (i, d) in s.domains().iter().enumerate() {
        let obs = displacements(s, d, a, k);
        let ratio = obs
            .iter()
            .map(|&(j, dist)| Ratio::new(dist, j as u64))
            .max()
            .unwrap_or_default();
        if best.as_ref().is_none_or(|(r, _, _)| ratio > *r) {
            best = Some((ratio, i, obs));
        }
    }
    let (ratio, i, observed) = best.expect("the maximal domain is always present");
    if ratio == Ratio::from_integer(0) {
        return Err(ProjectionError::NoGrowth);
    }
    Ok(ActiveDomainReport {
        element: s.presentation().render(a),
        domain: s.label(s.domain(i)),
        domain_value: Some(s.domain(i).clone()),
        growth_ratio: ratio,
        threshold,
        passes_threshold: ratio > threshold,
        k,
        observed,
    })
}

/// The first `b` (by T-length, then shortlex) among products of at most
/// `n + 1` elements of `T ∪ T⁻¹` with `bU ⋔ U`.
pub fn find_transverse_pair(
    s: &ProjectionSystem,
    t: &[GroupElement],
    u: &Domain,
    n: u32,
) -> Result<Option<(GroupElement, Domain)>, ProjectionError> {
    if *u == Domain::Maximal {
        return Err(ProjectionError::InvalidArgument(
            "the maximal domain has no transverse translates".into(),
        ));
    }
    let candidates = enumerate_with_lengths(
        s.presentation(),
        t,
        n as usize + 1,
        crate::budget::vertex_cap(),
    )?;
    for (b, _) in candidates {
        let bu = s.translate(&b, u);
        if s.relation(u, &bu) == Relation::Transverse {
            return Ok(Some((b, bu)));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLink {
    /// Index of the domain where the separation is measured.
    pub at: usize,
    /// Power `s` used to build the next domain.
    pub power: u32,
    /// `d_{U_i}(ρ^{U_{i-1}}, ρ^{U_{i+1}})`.
    pub separation: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjugateChain {
    pub domains: Vec<String>,
    #[serde(skip)]
    pub domain_values: Vec<Domain>,
    /// `h_i` with `U_i = h_i U_0`.
    #[serde(skip)]
    pub translators: Vec<GroupElement>,
    pub elements: Vec<String>,
    pub links: Vec<ChainLink>,
    pub k1: u64,
    /// Consecutive domains transverse with ρ-separation above `4E`.
    pub consecutive_hypothesis: bool,
    /// Every pair of domains transverse, re-checked one pair at a time.
    pub pairwise_transverse: bool,
}

/// `U_0 = U`, `U_1 = bU`, `g_1 = b a^M b⁻¹`, then `U_{i+1} = g_i^s U_{i-1}`
/// and `g_{i+1} = g_i^s a^M g_i^{-s}` with `s ≤ s_max` least such that the
/// ρ-separation in `U_i` exceeds `k1`.
#[allow(clippy::too_many_arguments)]
pub fn conjugate_chain(
    s: &ProjectionSystem,
    a: &GroupElement,
    b: &GroupElement,
    u: &Domain,
    big_m: u32,
    k1: u64,
    p_len: usize,
    s_max: u32,
) -> Result<ConjugateChain, ProjectionError> {
    let pres: &Presentation = s.presentation();
    let bu = s.translate(b, u);
    if *u == Domain::Maximal || s.relation(u, &bu) != Relation::Transverse {
        return Err(ProjectionError::InvalidArgument(format!(
            "{} and its translate by {} are not transverse",
            s.label(u),
            pres.render(b)
        )));
    }
    if p_len == 0 {
        return Err(ProjectionError::InvalidArgument(
            "the chain needs P at least 1".into(),
        ));
    }
    let am = pres.power(a, big_m as i64);
    let mut domains = vec![u.clone(), bu];
    let mut translators = vec![GroupElement::identity(), b.clone()];
    let mut elements = vec![pres.conjugate(b, &am)];
    let mut links = Vec::new();
    for i in 1..p_len {
        let g = &elements[i - 1];
        let (prev, here) = (&domains[i - 1], &domains[i]);
        let from = s.rho_line(prev, here);
        let mut found = None;
        for power in 1..=s_max {
            let cand = s.translate(&pres.power(g, power as i64), prev);
            if s.relation(&cand, here) != Relation::Transverse {
                continue;
            }
            let sep = s.rho_line(&cand, here).abs_diff(from);
            if sep > k1 {
                found = Some((power, cand, sep));
                break;
            }
        }
        let Some((power, cand, sep)) = found else {
            return Err(ProjectionError::SeparationNotAchieved(format!(
                "no power up to {s_max} of {} separates by more than {k1} in {}",
                pres.render(g),
                s.label(here)
            )));
        };
        links.push(ChainLink {
            at: i,
            power,
            separation: sep,
        });
        let gs = pres.power(g, power as i64);
        elements.push(pres.conjugate(&gs, &am));
        domains.push(cand);
        translators.push(pres.multiply(&gs, &translators[i - 1]));
    }
    let four_e = 4 * s.constants().e_window as u64;
    let consecutive_hypothesis = domains
        .windows(2)
        .all(|w| s.relation(&w[0], &w[1]) == Relation::Transverse)
        && links.iter().all(|l| l.separation > four_e);
    let mut pairwise_transverse = true;
    for i in 0..domains.len() {
        for j in i + 1..domains.len() {
            pairwise_transverse &= s.relation(&domains[i], &domains[j]) == Relation::Transverse;
        }
    }
    Ok(ConjugateChain {
        domains: domains.iter().map(|d| s.label(d)).collect(),
        domain_values: domains,
        translators,
        elements: elements.iter().map(|g| pres.render(g)).collect(),
        links,
        k1,
        consecutive_hypothesis,
        pairwise_transverse,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassingUp {
    pub w: String,
    pub triple: [usize; 3],
    /// Pairwise `d_W(ρ^{U_i}_W, ρ^{U_j}_W)` for the triple.
    pub separations: [u32; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassingUpReport {
    pub found: Option<PassingUp>,
    pub k1: u64,
    pub k2: u64,
    /// Whether `d_U(x, y) > K1` for each input domain.
    pub relevant: Vec<bool>,
    /// Input domains whose ρ in the candidate cannot be read off the window.
    pub unavailable: Vec<usize>,
    /// `(i, j, d_W(ρ^{U_i}_W, ρ^{U_j}_W))` for the measured pairs.
    pub separations: Vec<(usize, usize, u32)>,
    /// Best triple by its smallest pairwise separation.
    pub best_triple: Option<([usize; 3], u32)>,
}

/// `d_U(x, y)` for group elements; on the maximal domain both must lie in
/// the window.
fn domain_distance(
    s: &ProjectionSystem,
    d: &Domain,
    x: &GroupElement,
    y: &GroupElement,
) -> Option<u64> {
    match d {
        Domain::Maximal => {
            let b = s.ball();
            let (vx, vy) = (b.vertex_of(x)?, b.vertex_of(y)?);
            s.set_distance(&s.pi_s(vx), &s.pi_s(vy), UNREACHED)
                .map(u64::from)
        }
        _ => Some(
            s.pi_line(d, x.letters())
                .abs_diff(s.pi_line(d, y.letters())),
        ),
    }
}

/// Searches the instantiated domains for a `W` nesting at least three of
/// the inputs with pairwise ρ-separation above `k2`; the first hit in
/// domain order is returned.
pub fn passing_up_search(
    s: &ProjectionSystem,
    domains: &[Domain],
    x: &GroupElement,
    y: &GroupElement,
    k1: u64,
    k2: u64,
) -> PassingUpReport {
    let relevant = domains
        .iter()
        .map(|d| domain_distance(s, d, x, y).is_some_and(|v| v > k1))
        .collect();
    let mut report = PassingUpReport {
        found: None,
        k1,
        k2,
        relevant,
        unavailable: Vec::new(),
        separations: Vec::new(),
        best_triple: None,
    };
    if domains.len() < 3 {
        return report;
    }
    for w in s.domains() {
        let nested: Vec<usize> = (0..domains.len())
            .filter(|&i| s.relation(&domains[i], w) == Relation::Nested)
            .collect();
        if nested.len() < 3 {
            continue;
        }
        let rho: Vec<(usize, Vec<u32>)> = nested
            .iter()
            .map(|&i| (i, s.rho_s_of(&domains[i])))
            .collect();
        report.unavailable = rho
            .iter()
            .filter(|(_, r)| r.is_empty())
            .map(|&(i, _)| i)
            .collect();
        let avail: Vec<&(usize, Vec<u32>)> = rho.iter().filter(|(_, r)| !r.is_empty()).collect();
        let mut sep = vec![vec![0u32; domains.len()]; domains.len()];
        for a in 0..avail.len() {
            for b in a + 1..avail.len() {
                let d = s
                    .set_distance(&avail[a].1, &avail[b].1, UNREACHED)
                    .unwrap_or(UNREACHED);
                let (i, j) = (avail[a].0, avail[b].0);
                sep[i][j] = d;
                sep[j][i] = d;
                report.separations.push((i, j, d));
            }
        }
        for a in 0..avail.len() {
            for b in a + 1..avail.len() {
                for c in b + 1..avail.len() {
                    let (i, j, k) = (avail[a].0, avail[b].0, avail[c].0);
                    let trio = [sep[i][j], sep[i][k], sep[j][k]];
                    let low = *trio.iter().min().unwrap();
                    if report.best_triple.as_ref().is_none_or(|(_, m)| low > *m) {
                        report.best_triple = Some(([i, j, k], low));
                    }
                    if report.found.is_none() && low as u64 > k2 {
                        report.found = Some(PassingUp {
                            w: s.label(w),
                            triple: [i, j, k],
                            separations: trio,
                        });
                    }
                }
            }
        }
        if report.found.is_some() {
            break;
        }
    }
    report
}

/// A nontrivial relator among `g1, g2` whose length as a reduced word in
/// `g1^±1, g2^±1` is at most `max_len`; the shortest one, then the first in
/// the letter order `g1, g1⁻¹, g2, g2⁻¹`.
pub fn relation_search(
    p: &Presentation,
    g1: &GroupElement,
    g2: &GroupElement,
    max_len: u32,
    cap: usize,
) -> Result<Option<String>, ProjectionError> {
    let gens = [g1.clone(), p.inverse(g1), g2.clone(), p.inverse(g2)];
    let names = ["g1", "g1⁻¹", "g2", "g2⁻¹"];
    let mut layer: Vec<(Vec<usize>, GroupElement)> = vec![(Vec::new(), GroupElement::identity())];
    let mut visited = 0usize;
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (word, g) in &layer {
            for (l, f) in gens.iter().enumerate() {
                if word.last().is_some_and(|&last| last ^ 1 == l) {
                    continue;
                }
                visited += 1;
                if visited > cap {
                    return Err(ProjectionError::BudgetExceeded(format!(
                        "relation search visited more than {cap} words"
                    )));
                }
                let h = p.multiply(g, f);
                let mut w = word.clone();
                w.push(l);
                if h.is_identity() {
                    return Ok(Some(
                        w.iter().map(|&i| names[i]).collect::<Vec<_>>().join(" "),
                    ));
                }
                next.push((w, h));
            }
        }
        layer = next;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_search_examples() {
        let p = Presentation::free(&["a", "b"]);
        let a = p.parse("a").unwrap();
        let b = p.parse("b").unwrap();
        assert_eq!(
            relation_search(&p, &a, &a, 4, 1000).unwrap().as_deref(),
            Some("g1 g2⁻¹")
        );
        assert_eq!(relation_search(&p, &a, &b, 6, 10_000).unwrap(), None);
        let z2 = Presentation::new(&["x", "y"], &[("x", "y")]).unwrap();
        let (x, y) = (z2.parse("x").unwrap(), z2.parse("y").unwrap());
        assert_eq!(
            relation_search(&z2, &x, &y, 4, 1000).unwrap().as_deref(),
            Some("g1 g2 g1⁻¹ g2⁻¹")
        );
    }
}
