use std::collections::VecDeque;

use curtainlab_core::curtain::{four_point_delta, make_curtain, HypGraph};
use curtainlab_core::median::fixtures::random_median_graph;
use curtainlab_core::median::{
    compute_walls, distance, separating_walls, validate_median, MedianWindow,
};
use curtainlab_core::projection::{verify_certificate, RecipeCertificate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::commands::{emit, load_system, Manifest};
use crate::error::CliError;
use crate::target::{self, load_target};
use crate::{Common, Status, Suite};

/// Counterexamples kept per report.
const KEEP: usize = 20;

pub struct Request {
    pub suite: Suite,
    pub target: Option<String>,
    pub random: Option<usize>,
    pub max_vertices: u32,
    pub curtain: Option<String>,
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::MedianOracle => "median-oracle",
        Suite::CurtainAxioms => "curtain-axioms",
        Suite::Behrstock => "behrstock",
        Suite::Bgi => "bgi",
        Suite::RecipeRoundtrip => "recipe-roundtrip",
    }
}

fn needs_target(r: &Request) -> Result<&str, CliError> {
    r.target
        .as_deref()
        .ok_or_else(|| CliError::input(format!("{} needs a target", suite_name(r.suite))))
}

pub fn run(c: &Common, r: &Request) -> Result<Status, CliError> {
    let (params, result) = match r.suite {
        Suite::MedianOracle => median_oracle(c, r)?,
        Suite::CurtainAxioms => curtain_axioms(c, r)?,
        Suite::Behrstock => {
            let s = load_system(c, needs_target(r)?)?;
            let rep = s.verify_behrstock(&s.guard_samples())?;
            let pass = rep.violations.is_empty();
            (
                json!({}),
                json!({ "pass": pass, "lambda": rep.lambda, "report": rep }),
            )
        }
        Suite::Bgi => {
            let s = load_system(c, needs_target(r)?)?;
            let rep = s.verify_bgi_all(&s.bgi_pairs())?;
            let pass = rep.violations.is_empty();
            (
                json!({}),
                json!({ "pass": pass, "lambda": rep.lambda, "report": rep }),
            )
        }
        Suite::RecipeRoundtrip => {
            let file = needs_target(r)?;
            let v = target::parse_value(file, &target::read(file)?)?;
            let body = match v.get("result") {
                Some(res) => res.get("certificate").cloned().unwrap_or(Value::Null),
                None => v,
            };
            if body.is_null() {
                return Err(CliError::input(format!("{file} holds no certificate")));
            }
            let cert: RecipeCertificate = serde_json::from_value(body)
                .map_err(|e| CliError::input(format!("{file}: not a certificate: {e}")))?;
            let rt = verify_certificate(&cert)?;
            (
                json!({}),
                json!({ "pass": rt.all_match, "checks": rt.checks }),
            )
        }
    };
    let pass = result["pass"].as_bool() == Some(true);
    let inputs = r.target.iter().chain(&r.curtain).cloned().collect();
    emit(
        c,
        Manifest::new(
            c,
            &format!("verify {}", suite_name(r.suite)),
            inputs,
            params,
        ),
        result,
    )?;
    Ok(if pass { Status::Pass } else { Status::Fail })
}

fn bfs(g: &MedianWindow, s: u32) -> Vec<u32> {
    let mut d = vec![u32::MAX; g.len()];
    d[s as usize] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for &w in g.graph().neighbors(u) {
            if d[w as usize] == u32::MAX {
                d[w as usize] = d[u as usize] + 1;
                q.push_back(w);
            }
        }
    }
    d
}

/// Distance, separating-wall count and plain BFS agree on every pair.
fn check_pairs(
    g: &MedianWindow,
    graph_ref: Value,
    bad: &mut Vec<Value>,
    failures: &mut usize,
) -> Result<u64, CliError> {
    let ws = compute_walls(g)?;
    let mut pairs = 0;
    for x in 0..g.len() as u32 {
        let d = bfs(g, x);
        for y in 0..g.len() as u32 {
            pairs += 1;
            let lib = distance(g, x, y)?;
            let sep = separating_walls(g, &ws, x, y)?.len() as u32;
            if lib != d[y as usize] || sep != d[y as usize] {
                *failures += 1;
                if bad.len() < KEEP {
                    bad.push(json!({
                        "graph": graph_ref,
                        "x": g.label(x),
                        "y": g.label(y),
                        "bfs": d[y as usize],
                        "distance": lib,
                        "separating_walls": sep,
                    }));
                }
            }
        }
    }
    Ok(pairs)
}

fn median_oracle(c: &Common, r: &Request) -> Result<(Value, Value), CliError> {
    let mut bad = Vec::new();
    let mut failures = 0;
    let mut pairs = 0;
    let params;
    let mut graphs = 0;
    if let Some(name) = &r.target {
        let g = target::load_graph(name, None)?;
        // the triple check is cubic, so it is only run on a named input
        if !validate_median(&g)? {
            failures += 1;
            bad.push(json!({ "graph": name, "unique_medians": false }));
        }
        pairs = check_pairs(&g, json!(name), &mut bad, &mut failures)?;
        graphs = 1;
        params = json!({});
    } else {
        let n = r.random.unwrap_or(50);
        let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
        for i in 0..n {
            let g = random_median_graph(&mut rng, r.max_vertices);
            // a graph is reproduced by (seed, index, max_vertices)
            let reference = json!({ "seed": c.seed, "index": i, "max_vertices": r.max_vertices });
            pairs += check_pairs(&g, reference, &mut bad, &mut failures)?;
            graphs += 1;
        }
        params = json!({ "random": n, "max_vertices": r.max_vertices });
    }
    let result = json!({
        "pass": failures == 0,
        "graphs": graphs,
        "pairs": pairs,
        "failures": failures,
        "counterexamples": bad,
    });
    Ok((params, result))
}

fn curtain_axioms(c: &Common, r: &Request) -> Result<(Value, Value), CliError> {
    let name = needs_target(r)?;
    let t = load_target(name, c.horizon)?;
    let w = t.window();
    let e =
        c.e.unwrap_or_else(|| four_point_delta(w.graph(), c.seed).0.div_ceil(2).max(1));
    let mut failures = 0;
    let mut bad = Vec::new();
    let mut checked = 0;
    if let Some(file) = &r.curtain {
        let v = target::parse_value(file, &target::read(file)?)?;
        let doc = v
            .get("result")
            .and_then(|r| r.get("curtain"))
            .cloned()
            .unwrap_or(v);
        let doc = serde_json::from_value(doc)
            .map_err(|e| CliError::input(format!("{file}: not a curtain: {e}")))?;
        let k = curtainlab_core::curtain::Curtain::from_doc(&doc, w.len())?;
        let g = HypGraph::with_depth(w.graph().clone(), k.e(), w.depths().to_vec())?;
        let ax = k.axioms(&g);
        checked = 1;
        if !ax.all_hold() {
            failures = 1;
            bad.push(json!({ "curtain": file, "axioms": ax }));
        }
        let result = json!({ "pass": failures == 0, "checked": checked, "failures": failures, "counterexamples": bad });
        return Ok((json!({}), result));
    }
    let g = HypGraph::with_depth(w.graph().clone(), e, w.depths().to_vec())?;
    let n = w.len() as u32;
    let want = r.random.unwrap_or(100);
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let mut attempts = 0;
    while checked < want && attempts < 50 * want {
        attempts += 1;
        let x = rng.gen_range(0..n);
        let y = rng.gen_range(0..n);
        let Some(axis) = w.graph().shortest_path(x, y) else {
            continue;
        };
        let len = axis.len() as u32 - 1;
        if len < 6 * e + 2 {
            continue;
        }
        let offset = rng.gen_range(1..len - 6 * e);
        let k = make_curtain(&g, &axis, offset)?;
        let ax = k.axioms(&g);
        checked += 1;
        if !ax.all_hold() {
            failures += 1;
            if bad.len() < KEEP {
                bad.push(
                    json!({ "x": w.label(x), "y": w.label(y), "offset": offset, "axioms": ax }),
                );
            }
        }
    }
    if checked == 0 {
        return Err(CliError::input(format!(
            "{name} has no geodesic long enough for a curtain at E = {e}"
        )));
    }
    let result = json!({
        "pass": failures == 0,
        "e": e,
        "checked": checked,
        "failures": failures,
        "counterexamples": bad,
    });
    Ok((json!({ "random": want }), result))
}
