//! Weighted-graph substrate: exact shortest paths with canonical geodesics,
//! Gromov products, four-point hyperbolicity estimation and quasi-centres.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::LENGTH_TOL;

/// Vertex-count cap for exhaustive four-point scans (override with
/// [`WeightedGraph::four_point_delta_with_cap`]).
pub const DEFAULT_EXACT_DELTA_CAP: usize = 400;

/// Pool size for sampled four-point scans.  Quadruples are drawn from a seeded
/// pool of at most this many vertices so that only pool-sized all-pairs data is
/// needed; on graphs at most this large the pool is the whole vertex set.
pub const DELTA_SAMPLE_POOL: usize = 512;

/// An immutable, connected, undirected graph with strictly positive edge
/// lengths.  Vertices are `0..vertex_count`.  Parallel edges are collapsed to
/// the lightest one at construction.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    adj: Vec<Vec<(u32, f64)>>,
    edges: Vec<(u32, u32, f64)>,
    labels: Vec<Option<String>>,
}

impl WeightedGraph {
    pub fn new(vertex_count: usize, edges: &[(u32, u32, f64)]) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::Input("graph must have at least one vertex".into()));
        }
        let n = vertex_count;
        let mut canon: Vec<(u32, u32, f64)> = Vec::with_capacity(edges.len());
        for &(u, v, w) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::Input(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::Input(format!("self-loop at vertex {u}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Input(format!(
                    "edge ({u}, {v}) has non-positive or non-finite weight {w}"
                )));
            }
            canon.push((u.min(v), u.max(v), w));
        }
        canon.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
        // keep the lightest copy of a parallel edge
        canon.dedup_by(|next, prev| next.0 == prev.0 && next.1 == prev.1);

        let mut adj = vec![Vec::new(); n];
        for &(u, v, w) in &canon {
            adj[u as usize].push((v, w));
            adj[v as usize].push((u, w));
        }
        for nbrs in &mut adj {
            nbrs.sort_by(|a, b| a.0.cmp(&b.0));
        }

        let g = WeightedGraph {
            adj,
            edges: canon,
            labels: vec![None; n],
        };
        if !g.is_connected() {
            return Err(Error::Input("graph is not connected".into()));
        }
        Ok(g)
    }

    pub fn with_labels(mut self, labels: Vec<Option<String>>) -> Result<Self> {
        if labels.len() != self.vertex_count() {
            return Err(Error::Input("label vector length mismatch".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edges(&self) -> &[(u32, u32, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, v: u32) -> &[(u32, f64)] {
        &self.adj[v as usize]
    }

    pub fn label(&self, v: u32) -> Option<&str> {
        self.labels[v as usize].as_deref()
    }

    /// Weight of the edge `{u, v}`, if present.
    pub fn edge_weight(&self, u: u32, v: u32) -> Option<f64> {
        self.adj[u as usize]
            .binary_search_by(|probe| probe.0.cmp(&v))
            .ok()
            .map(|i| self.adj[u as usize][i].1)
    }

    pub fn is_unit_weight(&self) -> bool {
        self.edges.iter().all(|&(_, _, w)| (w - 1.0).abs() <= 1e-12)
    }

    fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adj[u as usize] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }

    fn check_vertex(&self, v: u32) -> Result<()> {
        if (v as usize) < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::Input(format!(
                "unknown vertex id {v} (graph has {} vertices)",
                self.vertex_count()
            )))
        }
    }

    /// Dijkstra from a single source; returns exact distances to all vertices.
    pub fn distances_from(&self, source: u32) -> Vec<f64> {
        self.distances_from_set(std::slice::from_ref(&source))
    }

    /// Multi-source Dijkstra: distance from each vertex to the nearest source.
    pub fn distances_from_set(&self, sources: &[u32]) -> Vec<f64> {
        let n = self.vertex_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
        for &s in sources {
            if dist[s as usize] > 0.0 {
                dist[s as usize] = 0.0;
                heap.push(HeapEntry { dist: 0.0, vertex: s });
            }
        }
        while let Some(HeapEntry { dist: d, vertex: u }) = heap.pop() {
            if d > dist[u as usize] {
                continue;
            }
            for &(v, w) in &self.adj[u as usize] {
                let nd = d + w;
                if nd < dist[v as usize] {
                    dist[v as usize] = nd;
                    heap.push(HeapEntry { dist: nd, vertex: v });
                }
            }
        }
        dist
    }

    /// Exact distance between two vertices.
    pub fn distance(&self, u: u32, v: u32) -> Result<f64> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Ok(0.0);
        }
        // early-exit Dijkstra
        let n = self.vertex_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut heap = BinaryHeap::new();
        dist[u as usize] = 0.0;
        heap.push(HeapEntry { dist: 0.0, vertex: u });
        while let Some(HeapEntry { dist: d, vertex: x }) = heap.pop() {
            if x == v {
                return Ok(d);
            }
            if d > dist[x as usize] {
                continue;
            }
            for &(y, w) in &self.adj[x as usize] {
                let nd = d + w;
                if nd < dist[y as usize] {
                    dist[y as usize] = nd;
                    heap.push(HeapEntry { dist: nd, vertex: y });
                }
            }
        }
        unreachable!("graph is connected by construction")
    }

    /// Exact shortest path with deterministic tie-breaking: among all
    /// geodesics from `u` to `v`, returns the lexicographically smallest
    /// vertex-id sequence.
    pub fn shortest_path(&self, u: u32, v: u32) -> Result<(f64, Vec<u32>)> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Ok((0.0, vec![u]));
        }
        let to_target = self.distances_from(v);
        let total = to_target[u as usize];
        let mut path = vec![u];
        let mut cur = u;
        while cur != v {
            // Greedy step: the smallest-id neighbour that stays on a geodesic.
            // Neighbour lists are sorted by id, so the first admissible hit is
            // the lexicographic choice.
            let mut next = None;
            for &(w, len) in &self.adj[cur as usize] {
                if (to_target[cur as usize] - len - to_target[w as usize]).abs() <= LENGTH_TOL {
                    next = Some(w);
                    break;
                }
            }
            cur = next.expect("geodesic step must exist on a connected graph");
            path.push(cur);
        }
        Ok((total, path))
    }

    /// Gromov product (x|y) with respect to `o`:
    /// `(d(o,x) + d(o,y) - d(x,y)) / 2`.
    pub fn gromov_product(&self, o: u32, x: u32, y: u32) -> Result<f64> {
        self.check_vertex(o)?;
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        let from_o = self.distances_from(o);
        let dxy = self.distance(x, y)?;
        Ok((from_o[x as usize] + from_o[y as usize] - dxy) / 2.0)
    }

    /// All-pairs distance matrix, row-major.
    pub fn all_pairs(&self) -> Vec<f64> {
        let n = self.vertex_count();
        let rows: Vec<Vec<f64>> = (0..n as u32)
            .into_par_iter()
            .map(|s| self.distances_from(s))
            .collect();
        let mut flat = Vec::with_capacity(n * n);
        for row in rows {
            flat.extend_from_slice(&row);
        }
        flat
    }

    /// Four-point hyperbolicity constant.
    pub fn four_point_delta(&self, mode: DeltaMode) -> Result<DeltaEstimate> {
        self.four_point_delta_with_cap(mode, DEFAULT_EXACT_DELTA_CAP)
    }

    pub fn four_point_delta_with_cap(&self, mode: DeltaMode, cap: usize) -> Result<DeltaEstimate> {
        let n = self.vertex_count();
        match mode {
            DeltaMode::Exact => {
                if n > cap {
                    return Err(Error::Resource(format!(
                        "exact four-point scan needs vertex_count <= {cap}, got {n}"
                    )));
                }
                let d = self.all_pairs();
                let delta = (0..n)
                    .into_par_iter()
                    .map(|i| {
                        let mut best = 0.0f64;
                        for j in (i + 1)..n {
                            for k in (j + 1)..n {
                                for l in (k + 1)..n {
                                    let e = quad_excess(&d, n, i, j, k, l);
                                    if e > best {
                                        best = e;
                                    }
                                }
                            }
                        }
                        best
                    })
                    .reduce(|| 0.0, f64::max);
                Ok(DeltaEstimate {
                    delta,
                    method: DeltaMethod::Exact,
                    sample_count: n * (n - 1) * (n - 2) * (n - 3) / 24,
                    seed: 0,
                })
            }
            DeltaMode::Sampled { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                // Seeded pool of sources so the all-pairs data stays small.
                let pool: Vec<u32> = if n <= DELTA_SAMPLE_POOL {
                    (0..n as u32).collect()
                } else {
                    let mut ids: Vec<u32> = (0..n as u32).collect();
                    for i in 0..DELTA_SAMPLE_POOL {
                        let j = rng.random_range(i..n);
                        ids.swap(i, j);
                    }
                    ids.truncate(DELTA_SAMPLE_POOL);
                    ids.sort_unstable();
                    ids
                };
                let p = pool.len();
                let rows: Vec<Vec<f64>> = pool
                    .par_iter()
                    .map(|&s| {
                        let full = self.distances_from(s);
                        pool.iter().map(|&t| full[t as usize]).collect()
                    })
                    .collect();
                let mut d = Vec::with_capacity(p * p);
                for row in rows {
                    d.extend_from_slice(&row);
                }
                let quads: Vec<[usize; 4]> = (0..count)
                    .map(|_| {
                        [
                            rng.random_range(0..p),
                            rng.random_range(0..p),
                            rng.random_range(0..p),
                            rng.random_range(0..p),
                        ]
                    })
                    .collect();
                let delta = quads
                    .par_iter()
                    .map(|&[i, j, k, l]| quad_excess(&d, p, i, j, k, l))
                    .reduce(|| 0.0, f64::max);
                Ok(DeltaEstimate {
                    delta,
                    method: DeltaMethod::Sampled,
                    sample_count: count,
                    seed,
                })
            }
        }
    }

    /// Quasi-centre of the triangle on `x`, `y`, `z`: the vertex of the three
    /// canonical geodesic sides minimising the maximal distance to the sides,
    /// together with that maximum.  Ties break to the smallest vertex id.
    pub fn quasi_centre(&self, x: u32, y: u32, z: u32) -> Result<(u32, f64)> {
        let (_, gxy) = self.shortest_path(x, y)?;
        let (_, gyz) = self.shortest_path(y, z)?;
        let (_, gzx) = self.shortest_path(z, x)?;
        let dxy = self.distances_from_set(&gxy);
        let dyz = self.distances_from_set(&gyz);
        let dzx = self.distances_from_set(&gzx);
        let mut union: Vec<u32> = gxy.iter().chain(&gyz).chain(&gzx).copied().collect();
        union.sort_unstable();
        union.dedup();
        let mut best = (u32::MAX, f64::INFINITY);
        for &p in &union {
            let e = dxy[p as usize].max(dyz[p as usize]).max(dzx[p as usize]);
            if e < best.1 - LENGTH_TOL {
                best = (p, e);
            }
        }
        Ok(best)
    }

    /// Serialise in the line-oriented text format
    /// (`v <count>` / `e <u> <v> <w>` / `l <v> <tag>`).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "v {}", self.vertex_count()).unwrap();
        for &(u, v, w) in &self.edges {
            writeln!(out, "e {u} {v} {w:.17}").unwrap();
        }
        for (v, label) in self.labels.iter().enumerate() {
            if let Some(tag) = label {
                writeln!(out, "l {v} {tag}").unwrap();
            }
        }
        out
    }

    /// Parse the text format produced by [`WeightedGraph::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut vertex_count: Option<usize> = None;
        let mut edges = Vec::new();
        let mut labels: Vec<(u32, String)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::Input(format!("line {}: {msg}", lineno + 1));
            let mut it = line.split_whitespace();
            match it.next() {
                Some("v") => {
                    let n: usize = it
                        .next()
                        .ok_or_else(|| bad("missing vertex count"))?
                        .parse()
                        .map_err(|_| bad("bad vertex count"))?;
                    vertex_count = Some(n);
                }
                Some("e") => {
                    let u: u32 = it
                        .next()
                        .ok_or_else(|| bad("missing edge endpoint"))?
                        .parse()
                        .map_err(|_| bad("bad edge endpoint"))?;
                    let v: u32 = it
                        .next()
                        .ok_or_else(|| bad("missing edge endpoint"))?
                        .parse()
                        .map_err(|_| bad("bad edge endpoint"))?;
                    let w: f64 = it
                        .next()
                        .ok_or_else(|| bad("missing edge weight"))?
                        .parse()
                        .map_err(|_| bad("bad edge weight"))?;
                    edges.push((u, v, w));
                }
                Some("l") => {
                    let v: u32 = it
                        .next()
                        .ok_or_else(|| bad("missing label vertex"))?
                        .parse()
                        .map_err(|_| bad("bad label vertex"))?;
                    let rest = it.collect::<Vec<_>>().join(" ");
                    if rest.is_empty() {
                        return Err(bad("missing label text"));
                    }
                    labels.push((v, rest));
                }
                _ => return Err(bad("unknown record type")),
            }
        }
        let n = vertex_count.ok_or_else(|| Error::Input("missing `v` record".into()))?;
        let g = WeightedGraph::new(n, &edges)?;
        let mut label_vec = vec![None; n];
        for (v, tag) in labels {
            if v as usize >= n {
                return Err(Error::Input(format!("label for unknown vertex {v}")));
            }
            label_vec[v as usize] = Some(tag);
        }
        g.with_labels(label_vec)
    }
}

/// Excess of the four-point condition on one quadruple: half the gap between
/// the largest and the middle pairing of `d(w,x)+d(y,z)`, `d(w,y)+d(x,z)`,
/// `d(w,z)+d(x,y)`.
#[inline]
fn quad_excess(d: &[f64], n: usize, i: usize, j: usize, k: usize, l: usize) -> f64 {
    let s1 = d[i * n + j] + d[k * n + l];
    let s2 = d[i * n + k] + d[j * n + l];
    let s3 = d[i * n + l] + d[j * n + k];
    let hi = s1.max(s2).max(s3);
    let lo = s1.min(s2).min(s3);
    let mid = s1 + s2 + s3 - hi - lo;
    (hi - mid) / 2.0
}

#[derive(Clone, Copy, Debug)]
pub enum DeltaMode {
    Exact,
    Sampled { count: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMethod {
    Exact,
    Sampled,
}

/// Result of a four-point scan.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DeltaEstimate {
    pub delta: f64,
    pub method: DeltaMethod,
    pub sample_count: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    vertex: u32,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, tie-broken by vertex id for determinism
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Path graph on `n` vertices with unit weights.
pub fn path_graph(n: usize) -> WeightedGraph {
    let edges: Vec<(u32, u32, f64)> = (0..n - 1).map(|i| (i as u32, i as u32 + 1, 1.0)).collect();
    WeightedGraph::new(n, &edges).expect("path graph is valid")
}

/// Cycle graph on `n >= 3` vertices with unit weights.
pub fn cycle_graph(n: usize) -> WeightedGraph {
    let mut edges: Vec<(u32, u32, f64)> =
        (0..n - 1).map(|i| (i as u32, i as u32 + 1, 1.0)).collect();
    edges.push((n as u32 - 1, 0, 1.0));
    WeightedGraph::new(n, &edges).expect("cycle graph is valid")
}

/// `w x h` grid with unit weights; vertex `(col, row)` has id `row * w + col`.
pub fn grid_graph(w: usize, h: usize) -> WeightedGraph {
    let mut edges = Vec::new();
    for row in 0..h {
        for col in 0..w {
            let id = (row * w + col) as u32;
            if col + 1 < w {
                edges.push((id, id + 1, 1.0));
            }
            if row + 1 < h {
                edges.push((id, id + w as u32, 1.0));
            }
        }
    }
    WeightedGraph::new(w * h, &edges).expect("grid graph is valid")
}
