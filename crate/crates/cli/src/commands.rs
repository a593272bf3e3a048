use std::io::Write;
use std::path::Path;

use clap::Subcommand;
use curtainlab_core::contact::{
    build_contact_graph, build_contact_graph_of, detect_product_of, wall_curtain, VertexAction,
};
use curtainlab_core::curtain::{
    flips_side, four_point_delta, make_curtain, skewer_check, ActionAlgebra, Curtain, CurtainDoc,
    CurtainError, HypGraph, Side,
};
use curtainlab_core::median::{distance, gate_projection, hull, separating_walls};
use curtainlab_core::projection::{
    recipe_rank_one, ProjectionSystem, ProjectionSystemDoc, RecipeOptions,
};
use curtainlab_core::raag::{build_window, Presentation};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::target::{self, load_target, ComplexDoc, Target};
use crate::{Common, Status};

#[derive(Subcommand, Debug)]
pub enum Query {
    /// Graph distance between two vertices.
    Dist { x: String, y: String },
    /// All walls, or the walls separating two vertices.
    Walls { vertices: Vec<String> },
    /// Convex hull of a vertex set.
    Hull {
        #[arg(required = true)]
        vertices: Vec<String>,
    },
    /// Gate of `x` in the hull of a vertex set.
    Gate {
        x: String,
        #[arg(required = true)]
        set: Vec<String>,
    },
    /// Contact graph size and hyperbolicity estimate.
    Contact,
    /// Curtain dual to the middle of a geodesic, or the curtain of a wall.
    Curtain {
        x: String,
        y: String,
        /// Start of the 6E interval on the geodesic from x to y.
        #[arg(long)]
        offset: Option<u32>,
        /// Take the wall of the edge x–y, with y on the plus side.
        #[arg(long)]
        wall: bool,
    },
    /// Whether an element flips either side of a stored curtain.
    Flips {
        #[arg(long)]
        element: String,
        #[arg(long)]
        curtain: String,
    },
    /// Least power of an element skewering a stored curtain.
    Skewers {
        #[arg(long)]
        element: String,
        #[arg(long)]
        curtain: String,
        #[arg(long, default_value_t = 32)]
        max_power: u32,
    },
    /// Join splitting of the walls, if any.
    Product,
}

/// Echo of the invocation, stored in every document.
#[derive(Serialize)]
pub struct Manifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub parameters: Value,
    pub seed: u64,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(c: &Common, command: &str, inputs: Vec<String>, parameters: Value) -> Self {
        let mut params = json!({ "horizon": c.horizon });
        if let (Value::Object(p), Value::Object(extra)) = (&mut params, parameters) {
            for (k, v) in extra {
                p.insert(k, v);
            }
            for (k, v) in [("guard", c.guard), ("E", c.e)] {
                if let Some(v) = v {
                    p.insert(k.into(), json!(v));
                }
            }
            if let Some(b) = c.budget {
                p.insert("budget".into(), json!(b));
            }
        }
        Manifest {
            command: command.to_string(),
            inputs,
            parameters: params,
            seed: c.seed,
            outputs: c.out.iter().cloned().collect(),
        }
    }
}

/// Documents are JSON with sorted keys (serde_json's default map).
pub fn render(v: &impl Serialize) -> Result<String, CliError> {
    let v = serde_json::to_value(v).map_err(|e| CliError::input(e.to_string()))?;
    Ok(serde_json::to_string_pretty(&v).expect("values serialize") + "\n")
}

pub fn write(path: &Path, v: &impl Serialize) -> Result<(), CliError> {
    std::fs::write(path, render(v)?)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

/// Prints `{manifest, result}` and writes it to `--out` when given.
pub fn emit(c: &Common, manifest: Manifest, result: Value) -> Result<(), CliError> {
    let doc = json!({ "manifest": manifest, "result": result });
    let text = render(&doc)?;
    if let Some(out) = &c.out {
        std::fs::write(out, &text)
            .map_err(|e| CliError::input(format!("cannot write {out}: {e}")))?;
    }
    out(&text)
}

/// Writes a document to stdout; a reader that has gone away is not an error.
pub fn out(text: &str) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    match stdout
        .write_all(text.as_bytes())
        .and_then(|_| stdout.flush())
    {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("documents serialize")
}

pub fn build(c: &Common, raag: Option<&str>, graph: Option<&str>) -> Result<Status, CliError> {
    let dir = Path::new(c.out.as_deref().unwrap_or("."));
    std::fs::create_dir_all(dir)?;
    let complex = dir.join("complex.json");
    let mut outputs = vec![complex.display().to_string()];
    let (input, summary) = if let Some(name) = graph {
        let w = target::load_graph(name, c.guard)?;
        let walls = curtainlab_core::median::compute_walls(&w)?;
        write(
            &complex,
            &ComplexDoc::Median {
                window: target::input_of(&w),
            },
        )?;
        let summary = json!({
            "kind": "median",
            "vertices": w.len(),
            "edges": w.graph().edge_count(),
            "walls": walls.len(),
            "dimension": walls.dimension(),
            "guard": w.guard(),
            "is_window": w.is_window(),
        });
        (name, summary)
    } else {
        let name = raag.expect("clap requires one input");
        let p = target::load_presentation(name)?;
        if let Some(g) = c.guard {
            if g != c.horizon / 3 {
                return Err(CliError::input(format!(
                    "RAAG windows use guard horizon / 3 = {}, got --guard {g}",
                    c.horizon / 3
                )));
            }
        }
        let tof = p.to_doc() == Presentation::tree_of_flats().to_doc();
        let system = if tof && c.horizon < 6 {
            None
        } else if tof {
            Some(ProjectionSystem::tree_of_flats(c.horizon, c.seed)?)
        } else {
            Some(ProjectionSystem::maximal_only(
                build_window(&p, c.horizon)?,
                c.seed,
            )?)
        };
        let ball_owned;
        let ball = match &system {
            Some(s) => s.ball(),
            None => {
                ball_owned = build_window(&p, c.horizon)?;
                &ball_owned
            }
        };
        write(
            &complex,
            &ComplexDoc::Raag {
                presentation: p.to_doc(),
                horizon: c.horizon,
            },
        )?;
        let mut summary = json!({
            "kind": "raag",
            "vertices": ball.len(),
            "edges": ball.window().graph().edge_count(),
            "walls": ball.walls().len(),
            "horizon": ball.horizon(),
            "guard": ball.guard(),
        });
        if let Some(s) = &system {
            let path = dir.join("system.json");
            write(&path, &s.to_doc())?;
            outputs.push(path.display().to_string());
            summary["system"] = json!({
                "kind": s.kind(),
                "domains": s.domains().len(),
                "contact_nodes": s.contact().len(),
                "constants": s.constants(),
            });
        } else {
            summary["system"] =
                json!({ "skipped": "the tree-of-flats system needs horizon at least 6" });
        }
        (name, summary)
    };
    let mut m = Manifest::new(c, "build", vec![input.to_string()], json!({}));
    m.outputs = outputs;
    let doc = json!({ "manifest": m, "result": summary });
    out(&render(&doc)?)?;
    Ok(Status::Pass)
}

fn hyp_of(t: &Target, e: u32) -> Result<HypGraph, CliError> {
    let w = t.window();
    Ok(HypGraph::with_depth(
        w.graph().clone(),
        e,
        w.depths().to_vec(),
    )?)
}

fn curtain_error(t: &Target, e: CurtainError) -> CliError {
    match e {
        CurtainError::PartialAction { vertex } => CliError::input(format!(
            "the action leaves the window at vertex {}; lower --guard",
            t.label(vertex)
        )),
        e => e.into(),
    }
}

fn load_curtain(t: &Target, file: &str) -> Result<Curtain, CliError> {
    let v = target::parse_value(file, &target::read(file)?)?;
    let n = t.window().len();
    let body = match v.get("result") {
        Some(r) => {
            if let Some(stored) = r.get("vertices").and_then(Value::as_u64) {
                if stored as usize != n {
                    return Err(CliError::input(format!(
                        "{file} was made on a window with {stored} vertices, this one has {n}"
                    )));
                }
            }
            r.get("curtain").cloned().unwrap_or(Value::Null)
        }
        None => v,
    };
    let doc: CurtainDoc = serde_json::from_value(body)
        .map_err(|e| CliError::input(format!("{file}: not a curtain document: {e}")))?;
    Ok(Curtain::from_doc(&doc, n)?)
}

pub fn query(c: &Common, name: &str, q: &Query) -> Result<Status, CliError> {
    let t = load_target(name, c.horizon)?;
    let mut inputs = vec![name.to_string()];
    let (kind, params, result) = match q {
        Query::Dist { x, y } => {
            let d = distance(t.window(), t.vertex(x)?, t.vertex(y)?)?;
            ("dist", json!({ "x": x, "y": y }), json!(d))
        }
        Query::Walls { vertices } => match vertices.as_slice() {
            [] => {
                let ws = t.walls();
                let g = t.window().graph();
                let list: Vec<Value> = ws
                    .walls()
                    .iter()
                    .map(|w| {
                        let (a, b) = g.edge(w.edges[0]);
                        json!({ "id": w.id, "depth": w.depth, "edges": w.edges.len(), "edge": [t.label(a), t.label(b)] })
                    })
                    .collect();
                let r = json!({ "count": ws.len(), "dimension": ws.dimension(), "crossings": ws.crossings().len(), "walls": list });
                ("walls", json!({}), r)
            }
            [x, y] => {
                let sep = separating_walls(t.window(), t.walls(), t.vertex(x)?, t.vertex(y)?)?;
                (
                    "walls",
                    json!({ "x": x, "y": y }),
                    json!({ "count": sep.len(), "walls": sep }),
                )
            }
            _ => return Err(CliError::input("walls takes no vertices or exactly two")),
        },
        Query::Hull { vertices } => {
            let ys = vertices
                .iter()
                .map(|v| t.vertex(v))
                .collect::<Result<Vec<_>, _>>()?;
            let h = hull(t.window(), &ys)?;
            let members: Vec<String> = h.members.iter().map(|&v| t.label(v)).collect();
            let r = json!({ "size": members.len(), "rounds": h.rounds, "members": members });
            ("hull", json!({ "vertices": vertices }), r)
        }
        Query::Gate { x, set } => {
            let ys = set
                .iter()
                .map(|v| t.vertex(v))
                .collect::<Result<Vec<_>, _>>()?;
            let h = hull(t.window(), &ys)?;
            let p = gate_projection(t.window(), &h, t.vertex(x)?)?;
            ("gate", json!({ "x": x, "set": set }), json!(t.label(p)))
        }
        Query::Contact => {
            let cg = match &t {
                Target::Raag { ball } => build_contact_graph(ball),
                Target::Median { window, walls } => build_contact_graph_of(window, walls),
            };
            let (twice_delta, exhaustive) = four_point_delta(cg.graph(), c.seed);
            let r = json!({
                "nodes": cg.len(),
                "edges": cg.graph().edge_count(),
                "excluded_walls": cg.excluded(),
                "twice_delta": twice_delta,
                "delta_exhaustive": exhaustive,
            });
            ("contact", json!({}), r)
        }
        Query::Curtain { x, y, offset, wall } => {
            let (u, v) = (t.vertex(x)?, t.vertex(y)?);
            let curtain = if *wall {
                let ball = t.ball()?;
                let edge = t
                    .window()
                    .graph()
                    .edge_id(u, v)
                    .ok_or_else(|| CliError::input(format!("{x} and {y} are not adjacent")))?;
                wall_curtain(ball, ball.walls().wall_of_edge(edge), v)
                    .map_err(|e| curtain_error(&t, e))?
            } else {
                let e = c.e.unwrap_or_else(|| {
                    four_point_delta(t.window().graph(), c.seed)
                        .0
                        .div_ceil(2)
                        .max(1)
                });
                let g = hyp_of(&t, e)?;
                let axis = t
                    .window()
                    .graph()
                    .shortest_path(u, v)
                    .ok_or_else(|| CliError::input("no path between the endpoints"))?;
                let len = axis.len() as u32 - 1;
                let offset = offset.unwrap_or(len.saturating_sub(6 * e) / 2);
                make_curtain(&g, &axis, offset)?
            };
            let g = hyp_of(&t, curtain.e())?;
            let r = json!({
                "vertices": t.window().len(),
                "e": curtain.e(),
                "curtain": curtain.to_doc(),
                "axioms": curtain.axioms(&g),
            });
            (
                "curtain",
                json!({ "x": x, "y": y, "offset": offset, "wall": wall }),
                r,
            )
        }
        Query::Flips { element, curtain } => {
            inputs.push(curtain.clone());
            let ball = t.ball()?;
            let k = load_curtain(&t, curtain)?;
            let g = hyp_of(&t, k.e())?;
            let el = ball.presentation().parse(element)?;
            let guard = match c.guard {
                Some(gd) => gd,
                None => ball
                    .horizon()
                    .checked_sub(el.length() as u32)
                    .ok_or_else(|| {
                        CliError::input(format!(
                            "{element} is longer than the horizon {}",
                            ball.horizon()
                        ))
                    })?,
            };
            let a = VertexAction::new(ball, el.clone());
            let plus = flips_side(&g, &a, &k, Side::Plus, Some(guard))
                .map_err(|e| curtain_error(&t, e))?;
            let minus = flips_side(&g, &a, &k, Side::Minus, Some(guard))
                .map_err(|e| curtain_error(&t, e))?;
            let r = json!({
                "element": ball.presentation().render(&el),
                "guard": guard,
                "flips_plus": plus.holds,
                "flips_minus": minus.holds,
                "plus": plus,
                "minus": minus,
            });
            ("flips", json!({ "element": element }), r)
        }
        Query::Skewers {
            element,
            curtain,
            max_power,
        } => {
            inputs.push(curtain.clone());
            let ball = t.ball()?;
            let k = load_curtain(&t, curtain)?;
            let g = hyp_of(&t, k.e())?;
            let el = ball.presentation().parse(element)?;
            let a = VertexAction::new(ball, el.clone());
            let mut found = None;
            let mut tried = Vec::new();
            for m in 1..=*max_power {
                // without --guard, each power is checked wherever it is defined
                let reach = ball.horizon() as i64 - m as i64 * el.length() as i64;
                let guard = match c.guard {
                    Some(gd) => gd,
                    None if reach >= 0 => reach as u32,
                    None => break,
                };
                let check = skewer_check(&g, &a.power(m), &k, Some(guard))
                    .map_err(|e| curtain_error(&t, e))?;
                tried.push(json!({ "m": m, "guard": guard, "holds": check.holds }));
                if check.holds {
                    found = Some(m);
                    break;
                }
            }
            let r = json!({
                "element": ball.presentation().render(&el),
                "m": found,
                "powers": tried,
            });
            (
                "skewers",
                json!({ "element": element, "max_power": max_power }),
                r,
            )
        }
        Query::Product => {
            let r = match detect_product_of(t.window(), t.walls()) {
                Some(w) => json!({
                    "families": [w.labels_a, w.labels_b],
                    "wall_ids": [w.family_a, w.family_b],
                    "components": w.components,
                    "interior_walls": w.interior_walls,
                    "window_evidence": w.window_evidence,
                }),
                None => Value::Null,
            };
            ("product", json!({}), r)
        }
    };
    emit(
        c,
        Manifest::new(c, &format!("query {kind}"), inputs, params),
        result,
    )?;
    Ok(Status::Pass)
}

/// A projection system from a stored document, or built for a target.
pub fn load_system(c: &Common, name: &str) -> Result<ProjectionSystem, CliError> {
    if Path::new(name).is_file() {
        let text = target::read(name)?;
        let v = target::parse_value(name, &text)?;
        if v.get("domains").is_some() {
            let doc: ProjectionSystemDoc = target::parse_as(name, &text)?;
            return Ok(ProjectionSystem::from_doc(&doc)?);
        }
    }
    let (p, horizon) = match load_target(name, c.horizon)? {
        Target::Raag { ball } => (ball.presentation().clone(), ball.horizon()),
        Target::Median { .. } => {
            return Err(CliError::input("projection systems need a RAAG window"))
        }
    };
    if p.to_doc() == Presentation::tree_of_flats().to_doc() {
        Ok(ProjectionSystem::tree_of_flats(horizon, c.seed)?)
    } else {
        Ok(ProjectionSystem::maximal_only(
            build_window(&p, horizon)?,
            c.seed,
        )?)
    }
}

pub fn recipe(c: &Common, name: &str, set: &[String]) -> Result<Status, CliError> {
    let s = load_system(c, name)?;
    let t = set
        .iter()
        .map(|g| s.presentation().parse(g))
        .collect::<Result<Vec<_>, _>>()?;
    let out = recipe_rank_one(&s, &t, &RecipeOptions::default())?;
    let m = Manifest::new(c, "recipe", vec![name.to_string()], json!({ "set": set }));
    emit(c, m, to_value(&out))?;
    Ok(Status::Pass)
}
