use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::MedianError;
use crate::graph::{Graph, UNREACHED};

/// Graphs up to this size keep an all-pairs distance table once asked for one.
const DISTANCE_TABLE_LIMIT: usize = 2048;

/// A finite median graph, or a finite ball inside an infinite one.
///
/// Vertices are dense indices with opaque string labels. When `is_window`
/// is set, only vertices within `guard` of the basepoint are valid inputs
/// for the exact operations.
#[derive(Debug)]
pub struct MedianWindow {
    labels: Vec<String>,
    index: HashMap<String, u32>,
    graph: Graph,
    basepoint: u32,
    horizon: u32,
    guard: u32,
    is_window: bool,
    depth: Vec<u32>,
    table: OnceLock<Vec<u16>>,
}

/// On-disk form of a [`MedianWindow`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MedianWindowDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
    pub basepoint: String,
    pub horizon: u32,
    pub guard: u32,
    pub is_window: bool,
}

impl MedianWindow {
    pub fn new(
        labels: Vec<String>,
        edges: impl IntoIterator<Item = (u32, u32)>,
        basepoint: u32,
        horizon: u32,
        guard: u32,
        is_window: bool,
    ) -> Result<Self, MedianError> {
        let n = labels.len();
        if n == 0 {
            return Err(MedianError::InvalidWindow("no vertices".into()));
        }
        if basepoint as usize >= n {
            return Err(MedianError::InvalidWindow("basepoint out of range".into()));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i as u32).is_some() {
                return Err(MedianError::InvalidWindow(format!("duplicate vertex {l}")));
            }
        }
        let mut raw = Vec::new();
        for (a, b) in edges {
            if a as usize >= n || b as usize >= n {
                return Err(MedianError::InvalidWindow(
                    "edge endpoint out of range".into(),
                ));
            }
            if a == b {
                return Err(MedianError::InvalidWindow(format!(
                    "loop at {}",
                    labels[a as usize]
                )));
            }
            raw.push((a, b));
        }
        let graph = Graph::from_edges(n, raw);
        let depth = graph.bfs(basepoint);
        if depth.contains(&UNREACHED) {
            return Err(MedianError::Disconnected);
        }
        if is_window && guard > horizon {
            return Err(MedianError::InvalidWindow(format!(
                "guard {guard} exceeds horizon {horizon}"
            )));
        }
        Ok(MedianWindow {
            labels,
            index,
            graph,
            basepoint,
            horizon,
            guard,
            is_window,
            depth,
            table: OnceLock::new(),
        })
    }

    /// A complete finite median graph: horizon and guard both equal the
    /// eccentricity of the basepoint.
    pub fn full(
        labels: Vec<String>,
        edges: impl IntoIterator<Item = (u32, u32)>,
        basepoint: u32,
    ) -> Result<Self, MedianError> {
        let mut w = Self::new(labels, edges, basepoint, 0, 0, false)?;
        let ecc = w.depth.iter().copied().max().unwrap_or(0);
        w.horizon = ecc;
        w.guard = ecc;
        Ok(w)
    }

    pub fn from_doc(doc: &MedianWindowDoc) -> Result<Self, MedianError> {
        let labels = doc.vertices.clone();
        let lookup: HashMap<&str, u32> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i as u32))
            .collect();
        let find = |l: &str| {
            lookup
                .get(l)
                .copied()
                .ok_or_else(|| MedianError::UnknownVertex(l.to_string()))
        };
        let mut edges = Vec::with_capacity(doc.edges.len());
        for [a, b] in &doc.edges {
            edges.push((find(a)?, find(b)?));
        }
        let base = find(&doc.basepoint)?;
        if doc.is_window {
            Self::new(labels, edges, base, doc.horizon, doc.guard, true)
        } else {
            let mut w = Self::full(labels, edges, base)?;
            // keep explicitly stated radii when they are consistent
            if doc.horizon >= w.horizon {
                w.horizon = doc.horizon;
            }
            w.guard = w.horizon;
            Ok(w)
        }
    }

    pub fn to_doc(&self) -> MedianWindowDoc {
        MedianWindowDoc {
            vertices: self.labels.clone(),
            edges: self
                .graph
                .edges()
                .iter()
                .map(|&(a, b)| {
                    [
                        self.labels[a as usize].clone(),
                        self.labels[b as usize].clone(),
                    ]
                })
                .collect(),
            basepoint: self.labels[self.basepoint as usize].clone(),
            horizon: self.horizon,
            guard: self.guard,
            is_window: self.is_window,
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn basepoint(&self) -> u32 {
        self.basepoint
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    pub fn is_window(&self) -> bool {
        self.is_window
    }

    /// Distance from the basepoint.
    pub fn depth(&self, v: u32) -> u32 {
        self.depth[v as usize]
    }

    pub fn depths(&self) -> &[u32] {
        &self.depth
    }

    pub fn label(&self, v: u32) -> &str {
        &self.labels[v as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex(&self, label: &str) -> Result<u32, MedianError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| MedianError::UnknownVertex(label.to_string()))
    }

    pub fn try_vertex(&self, label: &str) -> Option<u32> {
        self.index.get(label).copied()
    }

    /// Rejects vertices outside the guard ball of a window.
    pub fn check_guard(&self, v: u32) -> Result<(), MedianError> {
        if self.is_window && self.depth(v) > self.guard {
            return Err(MedianError::HorizonExceeded {
                vertex: self.label(v).to_string(),
                guard: self.guard,
            });
        }
        Ok(())
    }

    /// Vertices ordered by (basepoint distance, index).
    pub fn canonical_order(&self, members: &mut [u32]) {
        members.sort_unstable_by_key(|&v| (self.depth(v), v));
    }

    /// BFS distances from `v` to every vertex of the (window) graph.
    pub fn distances_from(&self, v: u32) -> Vec<u32> {
        match self.table() {
            Some(t) => {
                let n = self.len();
                t[v as usize * n..(v as usize + 1) * n]
                    .iter()
                    .map(|&d| d as u32)
                    .collect()
            }
            None => self.graph.bfs(v),
        }
    }

    pub(crate) fn table(&self) -> Option<&Vec<u16>> {
        let n = self.len();
        if n > DISTANCE_TABLE_LIMIT {
            return None;
        }
        Some(self.table.get_or_init(|| {
            let mut t = vec![0u16; n * n];
            for v in 0..n {
                for (w, d) in self.graph.bfs(v as u32).into_iter().enumerate() {
                    t[v * n + w] = d as u16;
                }
            }
            t
        }))
    }

    /// Graph distance without guard checks.
    pub(crate) fn raw_distance(&self, a: u32, b: u32) -> u32 {
        match self.table() {
            Some(t) => t[a as usize * self.len() + b as usize] as u32,
            None => self.graph.distance(a, b).unwrap_or(UNREACHED),
        }
    }
}
