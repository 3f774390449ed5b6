//! Cusped spaces: a base graph with a truncated horoball glued onto each
//! peripheral vertex subset.
//!
//! Each peripheral's horoball is built over its graph approximation: members
//! become vertices, and two members are joined when their base distance is at
//! most the smallest threshold making the approximation connected (for Cayley
//! cosets this is the generator step of the peripheral word).  Level 0 of the
//! horoball is identified with the peripheral subset itself, so level-0
//! horizontal edges live in the cusped graph alongside the base edges.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::group::PeripheralStructure;

/// Where a cusped vertex came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Base,
    Horoball {
        peripheral: usize,
        base_vertex: u32,
        level: u32,
    },
}

/// One glued horoball.
#[derive(Clone, Debug)]
pub struct PeripheralBlock {
    /// Index of the generating subgroup in the presentation (or input order).
    pub subgroup: usize,
    /// Representative tag carried over from the peripheral structure.
    pub rep: String,
    /// Sorted base vertex ids of the peripheral subset.
    pub base_vertices: Vec<u32>,
    /// Glued horoball depth.
    pub depth: u32,
    /// Connection threshold of the graph approximation.
    pub threshold: f64,
    /// Edges of the graph approximation, as local indices into `base_vertices`.
    pub local_edges: Vec<(u32, u32)>,
    /// First cusped vertex id of the level >= 1 interior.
    offset: u32,
}

impl PeripheralBlock {
    pub fn local_index(&self, base_vertex: u32) -> Option<usize> {
        self.base_vertices.binary_search(&base_vertex).ok()
    }
}

/// Busemann approximation value at a vertex.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BusemannValue {
    pub value: f64,
    pub proxy_level: u32,
}

/// A finite cusped-space model.
#[derive(Debug)]
pub struct CuspedSpace {
    pub graph: WeightedGraph,
    pub base: WeightedGraph,
    pub basepoint: u32,
    pub depth: u32,
    pub peripherals: Vec<PeripheralBlock>,
    pub provenance: Vec<Provenance>,
    /// Per peripheral: base-graph distance from every base vertex to the set.
    base_dist_to_peripheral: Vec<Vec<f64>>,
    from_basepoint: OnceLock<Vec<f64>>,
    parabolic_proxies: Vec<OnceLock<u32>>,
}

impl CuspedSpace {
    /// Glue a depth-`depth` horoball onto every peripheral subset of `base`.
    ///
    /// Peripheral sets of the same subgroup must be disjoint; sets of
    /// different subgroups may share base vertices.  Every set needs at least
    /// two vertices.  With no peripherals the cusped space is the base graph.
    pub fn build(
        base: &WeightedGraph,
        peripherals: &PeripheralStructure,
        depth: u32,
    ) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Input("horoball depth must be >= 1".into()));
        }
        let nb = base.vertex_count();
        for set in &peripherals.sets {
            if set.vertices.len() < 2 {
                return Err(Error::Input(format!(
                    "peripheral {:?} has fewer than two vertices",
                    set.rep
                )));
            }
            for &v in &set.vertices {
                if v as usize >= nb {
                    return Err(Error::Input(format!(
                        "peripheral {:?} references unknown vertex {v}",
                        set.rep
                    )));
                }
            }
        }
        // same-subgroup sets must be pairwise disjoint
        {
            let mut owner: Vec<std::collections::HashMap<usize, usize>> = vec![];
            let _ = &mut owner;
            let mut seen: std::collections::HashMap<(usize, u32), usize> =
                std::collections::HashMap::new();
            for (i, set) in peripherals.sets.iter().enumerate() {
                for &v in &set.vertices {
                    if let Some(&j) = seen.get(&(set.subgroup, v)) {
                        return Err(Error::Input(format!(
                            "peripheral sets {j} and {i} of subgroup {} overlap at vertex {v}",
                            set.subgroup
                        )));
                    }
                    seen.insert((set.subgroup, v), i);
                }
            }
        }

        let mut edges: Vec<(u32, u32, f64)> = base.edges().to_vec();
        let mut blocks = Vec::with_capacity(peripherals.sets.len());
        let mut provenance = vec![Provenance::Base; nb];
        let mut labels: Vec<Option<String>> = (0..nb)
            .map(|v| base.label(v as u32).map(|s| s.to_string()))
            .collect();
        let mut next_id = nb as u32;
        let mut base_dist_to_peripheral = Vec::with_capacity(peripherals.sets.len());

        for (pid, set) in peripherals.sets.iter().enumerate() {
            let mut members = set.vertices.clone();
            members.sort_unstable();
            members.dedup();
            let k = members.len();

            // pairwise base distances among members
            let mut pair = vec![0.0f64; k * k];
            for (i, &m) in members.iter().enumerate() {
                let row = base.distances_from(m);
                for (j, &mm) in members.iter().enumerate() {
                    pair[i * k + j] = row[mm as usize];
                }
            }
            // bottleneck threshold: largest edge of a minimax spanning tree
            let threshold = {
                let mut in_tree = vec![false; k];
                let mut best = vec![f64::INFINITY; k];
                in_tree[0] = true;
                best.iter_mut()
                    .enumerate()
                    .for_each(|(j, b)| *b = pair[j]);
                let mut bottleneck = 0.0f64;
                for _ in 1..k {
                    let mut pick = usize::MAX;
                    let mut pick_d = f64::INFINITY;
                    for j in 0..k {
                        if !in_tree[j] && best[j] < pick_d {
                            pick_d = best[j];
                            pick = j;
                        }
                    }
                    in_tree[pick] = true;
                    bottleneck = bottleneck.max(pick_d);
                    for j in 0..k {
                        if !in_tree[j] {
                            best[j] = best[j].min(pair[pick * k + j]);
                        }
                    }
                }
                bottleneck
            };

            let mut local_edges = Vec::new();
            for i in 0..k {
                for j in (i + 1)..k {
                    if pair[i * k + j] <= threshold + 1e-9 {
                        local_edges.push((i as u32, j as u32));
                    }
                }
            }

            let offset = next_id;
            next_id += (k as u32) * depth;
            let id_of = |local: usize, level: u32| -> u32 {
                if level == 0 {
                    members[local]
                } else {
                    offset + (local as u32) * depth + (level - 1)
                }
            };
            // vertical edges
            for (local, &m) in members.iter().enumerate() {
                for level in 0..depth {
                    edges.push((id_of(local, level), id_of(local, level + 1), 1.0));
                }
                for level in 1..=depth {
                    provenance.push(Provenance::Horoball {
                        peripheral: pid,
                        base_vertex: m,
                        level,
                    });
                    labels.push(Some(format!("h{pid}:{m}:{level}")));
                }
            }
            // horizontal edges at every level, length e^{-level}
            for &(i, j) in &local_edges {
                for level in 0..=depth {
                    edges.push((
                        id_of(i as usize, level),
                        id_of(j as usize, level),
                        (-(level as f64)).exp(),
                    ));
                }
            }
            base_dist_to_peripheral.push(base.distances_from_set(&members));
            blocks.push(PeripheralBlock {
                subgroup: set.subgroup,
                rep: set.rep.clone(),
                base_vertices: members,
                depth,
                threshold,
                local_edges,
                offset,
            });
        }

        // provenance was pushed member-major per block but ids are laid out
        // member-major too; lengths must agree
        debug_assert_eq!(provenance.len(), next_id as usize);

        let graph = WeightedGraph::new(next_id as usize, &edges)?.with_labels(labels)?;
        let proxies = (0..blocks.len()).map(|_| OnceLock::new()).collect();
        Ok(CuspedSpace {
            graph,
            base: base.clone(),
            basepoint: 0,
            depth,
            peripherals: blocks,
            provenance,
            base_dist_to_peripheral,
            from_basepoint: OnceLock::new(),
            parabolic_proxies: proxies,
        })
    }

    pub fn base_vertex_count(&self) -> usize {
        self.base.vertex_count()
    }

    pub fn is_base_vertex(&self, v: u32) -> bool {
        (v as usize) < self.base.vertex_count()
    }

    /// Cusped vertex id of `(base_vertex, level)` in peripheral `pid`.
    pub fn horoball_vertex(&self, pid: usize, base_vertex: u32, level: u32) -> Option<u32> {
        let block = self.peripherals.get(pid)?;
        if level > block.depth {
            return None;
        }
        let local = block.local_index(base_vertex)?;
        Some(if level == 0 {
            base_vertex
        } else {
            block.offset + (local as u32) * block.depth + (level - 1)
        })
    }

    /// Cusped distances from the basepoint (cached).
    pub fn from_basepoint(&self) -> &[f64] {
        self.from_basepoint
            .get_or_init(|| self.graph.distances_from(self.basepoint))
    }

    /// Base-graph distance from every base vertex to peripheral `pid`.
    pub fn base_dist_to_peripheral(&self, pid: usize) -> &[f64] {
        &self.base_dist_to_peripheral[pid]
    }

    /// Cusped distance from the basepoint to the peripheral subset.
    pub fn cusped_dist_to_peripheral(&self, pid: usize) -> f64 {
        let from_o = self.from_basepoint();
        self.peripherals[pid]
            .base_vertices
            .iter()
            .map(|&v| from_o[v as usize])
            .fold(f64::INFINITY, f64::min)
    }

    /// Finite proxy for the parabolic point of peripheral `pid`: the deepest
    /// vertex over the member nearest the geodesic from the basepoint to the
    /// horoball apex.
    pub fn parabolic_proxy(&self, pid: usize) -> u32 {
        *self.parabolic_proxies[pid].get_or_init(|| {
            let block = &self.peripherals[pid];
            let from_o = self.from_basepoint();
            let entry = *block
                .base_vertices
                .iter()
                .min_by(|&&a, &&b| {
                    from_o[a as usize]
                        .total_cmp(&from_o[b as usize])
                        .then(a.cmp(&b))
                })
                .expect("peripheral is nonempty");
            let apex = self
                .horoball_vertex(pid, entry, block.depth)
                .expect("entry is a member");
            let (_, geodesic) = self
                .graph
                .shortest_path(self.basepoint, apex)
                .expect("valid vertices");
            let to_geodesic = self.graph.distances_from_set(&geodesic);
            let nearest = *block
                .base_vertices
                .iter()
                .min_by(|&&a, &&b| {
                    to_geodesic[a as usize]
                        .total_cmp(&to_geodesic[b as usize])
                        .then(a.cmp(&b))
                })
                .expect("peripheral is nonempty");
            self.horoball_vertex(pid, nearest, block.depth)
                .expect("nearest is a member")
        })
    }

    /// Finite Busemann approximation at `x` for peripheral `pid`:
    /// `d(x, a_N) - d(o, a_N)` with `a_N` the parabolic proxy.
    pub fn busemann_estimate(&self, pid: usize, x: u32) -> Result<BusemannValue> {
        if pid >= self.peripherals.len() {
            return Err(Error::Input(format!("unknown peripheral {pid}")));
        }
        let a_n = self.parabolic_proxy(pid);
        let from_proxy = self.graph.distances_from(a_n);
        let value = from_proxy[x as usize] - from_proxy[self.basepoint as usize];
        Ok(BusemannValue {
            value,
            proxy_level: self.peripherals[pid].depth,
        })
    }

    /// Export with provenance tags as vertex labels.
    pub fn to_text(&self) -> String {
        self.graph.to_text()
    }
}
