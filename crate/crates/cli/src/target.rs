//! Loading the things commands operate on: named fixtures, input files and
//! the documents `build` writes.

use std::path::Path;

use curtainlab_core::median::fixtures::{cube, grid, path};
use curtainlab_core::median::{compute_walls, MedianWindow, WallSystem};
use curtainlab_core::raag::{build_window, BallComplex, Presentation, PresentationDoc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// Explicit graph input. Without `horizon` the graph is taken as complete.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphInput {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
    #[serde(default)]
    pub basepoint: Option<String>,
    #[serde(default)]
    pub horizon: Option<u32>,
    #[serde(default)]
    pub guard: Option<u32>,
    #[serde(default)]
    pub is_window: Option<bool>,
}

/// What `build` writes for a complex.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ComplexDoc {
    Median {
        window: GraphInput,
    },
    Raag {
        presentation: PresentationDoc,
        horizon: u32,
    },
}

pub enum Target {
    Median {
        window: MedianWindow,
        walls: WallSystem,
    },
    Raag {
        ball: BallComplex,
    },
}

pub fn read(file: &str) -> Result<String, CliError> {
    std::fs::read_to_string(file).map_err(|e| CliError::input(format!("cannot read {file}: {e}")))
}

/// Parses `text` as `T`, reporting syntax and shape errors with a position.
pub fn parse_as<T: DeserializeOwned>(file: &str, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::parse(file, &e))
}

pub fn parse_value(file: &str, text: &str) -> Result<Value, CliError> {
    parse_as(file, text)
}

pub fn window_from_input(input: &GraphInput, guard: Option<u32>) -> Result<MedianWindow, CliError> {
    let index = |l: &str| {
        input
            .vertices
            .iter()
            .position(|v| v == l)
            .map(|i| i as u32)
            .ok_or_else(|| CliError::input(format!("edge names unknown vertex {l}")))
    };
    let mut edges = Vec::with_capacity(input.edges.len());
    for [a, b] in &input.edges {
        edges.push((index(a)?, index(b)?));
    }
    let base = match &input.basepoint {
        Some(b) => index(b)?,
        None => 0,
    };
    let full = MedianWindow::full(input.vertices.clone(), edges.clone(), base)?;
    let is_window = input.is_window.unwrap_or(input.horizon.is_some()) || guard.is_some();
    if !is_window {
        return Ok(full);
    }
    let horizon = input.horizon.unwrap_or(full.horizon());
    let guard = guard.or(input.guard).unwrap_or(horizon / 3);
    Ok(MedianWindow::new(
        input.vertices.clone(),
        edges,
        base,
        horizon,
        guard,
        true,
    )?)
}

pub fn input_of(w: &MedianWindow) -> GraphInput {
    let d = w.to_doc();
    GraphInput {
        vertices: d.vertices,
        edges: d.edges,
        basepoint: Some(d.basepoint),
        horizon: d.is_window.then_some(d.horizon),
        guard: d.is_window.then_some(d.guard),
        is_window: Some(d.is_window),
    }
}

/// Named presentations: `tof`, `f2`, `f2xz`, `z2`.
pub fn named_presentation(name: &str) -> Option<Presentation> {
    let p = match name {
        "tof" => Presentation::tree_of_flats(),
        "f2" => Presentation::free(&["a", "b"]),
        "f2xz" => Presentation::new(&["a", "b", "t"], &[("a", "t"), ("b", "t")]).ok()?,
        "z2" => Presentation::new(&["a", "b"], &[("a", "b")]).ok()?,
        _ => return None,
    };
    Some(p)
}

/// Named graphs: `q<d>` cubes, `path<n>`, `grid<w>x<h>`.
pub fn named_graph(name: &str) -> Option<MedianWindow> {
    let num = |s: &str| s.parse::<u32>().ok();
    if let Some(d) = name.strip_prefix('q').and_then(num) {
        return (1..=12).contains(&d).then(|| cube(d));
    }
    if let Some(n) = name.strip_prefix("path").and_then(num) {
        return (n >= 1).then(|| path(n));
    }
    let (w, h) = name.strip_prefix("grid")?.split_once('x')?;
    let (w, h) = (num(w)?, num(h)?);
    (w >= 1 && h >= 1).then(|| grid(w, h))
}

fn exists(name: &str) -> bool {
    Path::new(name).is_file()
}

fn median(window: MedianWindow) -> Result<Target, CliError> {
    let walls = compute_walls(&window)?;
    Ok(Target::Median { window, walls })
}

fn raag(p: &Presentation, horizon: u32) -> Result<Target, CliError> {
    Ok(Target::Raag {
        ball: build_window(p, horizon)?,
    })
}

pub fn load_presentation(name: &str) -> Result<Presentation, CliError> {
    if exists(name) {
        let doc: PresentationDoc = parse_as(name, &read(name)?)?;
        return Ok(Presentation::from_doc(&doc)?);
    }
    named_presentation(name)
        .ok_or_else(|| CliError::input(format!("no presentation file or name {name}")))
}

pub fn load_graph(name: &str, guard: Option<u32>) -> Result<MedianWindow, CliError> {
    if exists(name) {
        let input: GraphInput = parse_as(name, &read(name)?)?;
        return window_from_input(&input, guard);
    }
    let w = named_graph(name)
        .ok_or_else(|| CliError::input(format!("no graph file or name {name}")))?;
    match guard {
        Some(_) => window_from_input(&input_of(&w), guard),
        None => Ok(w),
    }
}

/// A target given on the command line: a named fixture, a document written
/// by `build`, a presentation file or a graph file. `horizon` applies to
/// presentations that do not carry one.
pub fn load_target(name: &str, horizon: u32) -> Result<Target, CliError> {
    if !exists(name) {
        if let Some(w) = named_graph(name) {
            return median(w);
        }
        if let Some(p) = named_presentation(name) {
            return raag(&p, horizon);
        }
        return Err(CliError::input(format!("no target file or name {name}")));
    }
    let text = read(name)?;
    let v = parse_value(name, &text)?;
    if v.get("kind").is_some() {
        match parse_as::<ComplexDoc>(name, &text)? {
            ComplexDoc::Median { window } => median(window_from_input(&window, None)?),
            ComplexDoc::Raag {
                presentation,
                horizon,
            } => raag(&Presentation::from_doc(&presentation)?, horizon),
        }
    } else if v.get("generators").is_some() {
        let doc: PresentationDoc = parse_as(name, &text)?;
        raag(&Presentation::from_doc(&doc)?, horizon)
    } else {
        let input: GraphInput = parse_as(name, &text)?;
        median(window_from_input(&input, None)?)
    }
}

impl Target {
    pub fn window(&self) -> &MedianWindow {
        match self {
            Target::Median { window, .. } => window,
            Target::Raag { ball } => ball.window(),
        }
    }

    pub fn walls(&self) -> &WallSystem {
        match self {
            Target::Median { walls, .. } => walls,
            Target::Raag { ball } => ball.walls(),
        }
    }

    pub fn ball(&self) -> Result<&BallComplex, CliError> {
        match self {
            Target::Raag { ball } => Ok(ball),
            Target::Median { .. } => Err(CliError::input("this query needs a RAAG window")),
        }
    }

    /// Vertex named on the command line: a label for graphs, a word for RAAG
    /// windows.
    pub fn vertex(&self, name: &str) -> Result<u32, CliError> {
        match self {
            Target::Median { window, .. } => Ok(window.vertex(name)?),
            Target::Raag { ball } => {
                let g = ball.presentation().parse(name)?;
                ball.vertex_of(&g).ok_or_else(|| {
                    CliError::input(format!(
                        "element {} lies outside the window of horizon {}",
                        ball.presentation().render(&g),
                        ball.horizon()
                    ))
                })
            }
        }
    }

    pub fn label(&self, v: u32) -> String {
        self.window().label(v).to_string()
    }
}
