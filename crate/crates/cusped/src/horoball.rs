//! Truncated combinatorial horoballs.
//!
//! Over a connected unit-weight base graph `Γ`, the horoball has vertices
//! `(v, n)` for levels `0..=N`, vertical edges of length 1 and horizontal
//! edges of length `e^{-n}` at level `n`.  Distances in the truncation are
//! computed both combinatorially (Dijkstra on the built graph) and via the
//! one-dimensional minimisation
//! `min_t 2(t - max(m,n)) + |m - n| + e^{-t} d_Γ(x,y)`,
//! which the up-across-down shape of horoball geodesics makes exact.

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// `ρ = 2e/(e-1)`: the horizontal length below which climbing no longer pays.
pub const RHO: f64 = 2.0 * std::f64::consts::E / (std::f64::consts::E - 1.0);

/// A truncated horoball over a base graph.
///
/// Vertex `(v, level)` has id `v * (depth + 1) + level` (v-major, level-minor),
/// so level 0 is combinatorially the base graph.
#[derive(Clone, Debug)]
pub struct TruncatedHoroball {
    graph: WeightedGraph,
    base_vertex_count: usize,
    depth: u32,
}

impl TruncatedHoroball {
    /// Build the truncation at `depth >= 1` over a connected graph whose
    /// edges all have length one.
    pub fn build(base: &WeightedGraph, depth: u32) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Input("horoball depth must be >= 1".into()));
        }
        if !base.is_unit_weight() {
            return Err(Error::Input(
                "horoball base must have unit edge weights".into(),
            ));
        }
        let nb = base.vertex_count();
        let levels = depth as usize + 1;
        let mut edges = Vec::with_capacity(nb * depth as usize + base.edges().len() * levels);
        let id = |v: u32, n: u32| v * (depth + 1) + n;
        for v in 0..nb as u32 {
            for n in 0..depth {
                edges.push((id(v, n), id(v, n + 1), 1.0));
            }
        }
        for &(u, v, _) in base.edges() {
            for n in 0..=depth {
                edges.push((id(u, n), id(v, n), (-(n as f64)).exp()));
            }
        }
        Ok(TruncatedHoroball {
            graph: WeightedGraph::new(nb * levels, &edges)?,
            base_vertex_count: nb,
            depth,
        })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn base_vertex_count(&self) -> usize {
        self.base_vertex_count
    }

    pub fn vertex_id(&self, v: u32, level: u32) -> u32 {
        debug_assert!((v as usize) < self.base_vertex_count && level <= self.depth);
        v * (self.depth + 1) + level
    }

    pub fn base_of(&self, id: u32) -> u32 {
        id / (self.depth + 1)
    }

    pub fn level_of(&self, id: u32) -> u32 {
        id % (self.depth + 1)
    }
}

/// Closed-form horoball distance estimate
/// `2 ln(d e^{-max(m,n)} + 1) + |m - n|` (natural logarithm).
pub fn distance_estimate(d_base: f64, m: u32, n: u32) -> Result<f64> {
    if !(d_base.is_finite() && d_base >= 0.0) {
        return Err(Error::Input(format!(
            "base distance must be a nonnegative real, got {d_base}"
        )));
    }
    let hi = m.max(n) as f64;
    Ok(2.0 * (d_base * (-hi).exp() + 1.0).ln() + m.abs_diff(n) as f64)
}

/// Exact truncated-horoball distance between `(x, m)` and `(y, n)` with
/// `d_Γ(x, y) = d_base`: the minimum over integer levels
/// `max(m,n) <= t <= depth` of `2(t - max(m,n)) + |m - n| + e^{-t} d_base`,
/// together with the minimising level (smallest on ties).
pub fn distance_exact(d_base: f64, m: u32, n: u32, depth: u32) -> Result<(f64, u32)> {
    if !(d_base.is_finite() && d_base >= 0.0) {
        return Err(Error::Input(format!(
            "base distance must be a nonnegative real, got {d_base}"
        )));
    }
    let lo = m.max(n);
    if depth < lo {
        return Err(Error::Input(format!(
            "truncation depth {depth} is above level max({m}, {n})"
        )));
    }
    let vertical = m.abs_diff(n) as f64;
    let mut best = (f64::INFINITY, lo);
    for t in lo..=depth {
        let value = 2.0 * (t - lo) as f64 + vertical + (-(t as f64)).exp() * d_base;
        if value < best.0 - 1e-12 {
            best = (value, t);
        }
    }
    Ok(best)
}

/// The proof's ceiling choice `t = max(max(m,n), ceil(ln(d/ρ)))`; used only as
/// a cross-check against the integer minimisation.
pub fn proof_t_ceiling(d_base: f64, m: u32, n: u32) -> u32 {
    let lo = m.max(n);
    if d_base <= RHO {
        return lo;
    }
    lo.max((d_base / RHO).ln().ceil() as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_graph, grid_graph, path_graph};
    use crate::LENGTH_TOL;

    #[test]
    fn single_edge_depth_one_structure() {
        let base = path_graph(2);
        let h = TruncatedHoroball::build(&base, 1).unwrap();
        assert_eq!(h.graph().vertex_count(), 4);
        let mut weights: Vec<f64> = h.graph().edges().iter().map(|e| e.2).collect();
        weights.sort_by(f64::total_cmp);
        let expected = [(-1.0f64).exp(), 1.0, 1.0, 1.0];
        assert_eq!(weights.len(), expected.len());
        for (w, e) in weights.iter().zip(expected) {
            assert!((w - e).abs() <= 1e-12);
        }
    }

    #[test]
    fn vertex_count_formula() {
        let base = path_graph(2);
        for depth in 1..=5 {
            let h = TruncatedHoroball::build(&base, depth).unwrap();
            assert_eq!(h.graph().vertex_count(), 2 * (depth as usize + 1));
        }
    }

    #[test]
    fn six_cycle_depth_three_edge_audit() {
        let base = cycle_graph(6);
        let h = TruncatedHoroball::build(&base, 3).unwrap();
        assert_eq!(h.graph().vertex_count(), 24);
        let vertical = h
            .graph()
            .edges()
            .iter()
            .filter(|&&(u, v, _)| h.base_of(u) == h.base_of(v))
            .count();
        let horizontal = h.graph().edges().len() - vertical;
        // |E_vert| = |V_base| * depth, |E_horiz| = |E_base| * (depth + 1)
        assert_eq!(vertical, 6 * 3);
        assert_eq!(horizontal, 6 * 4);
    }

    #[test]
    fn rejects_non_unit_base_and_zero_depth() {
        let base = path_graph(3);
        assert!(TruncatedHoroball::build(&base, 0).is_err());
        let heavy = WeightedGraph::new(2, &[(0, 1, 2.0)]).unwrap();
        assert!(matches!(
            TruncatedHoroball::build(&heavy, 2),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn estimate_vertical_case() {
        assert!((distance_estimate(0.0, 2, 5).unwrap() - 3.0).abs() <= LENGTH_TOL);
    }

    #[test]
    fn estimate_substitutions() {
        // d = 8, levels 0: 2 ln 9
        let v = distance_estimate(8.0, 0, 0).unwrap();
        assert!((v - 2.0 * 9.0f64.ln()).abs() <= LENGTH_TOL);
        assert!((v - 4.39444915).abs() <= 1e-6);
        // d = e^3 - 1 at levels 3: the e^{-3} term survives the substitution
        let d = 3.0f64.exp() - 1.0;
        let v = distance_estimate(d, 3, 3).unwrap();
        let expected = 2.0 * (2.0 - (-3.0f64).exp()).ln();
        assert!((v - expected).abs() <= LENGTH_TOL);
    }

    #[test]
    fn estimate_rejects_negative() {
        assert!(distance_estimate(-1.0, 0, 0).is_err());
    }

    #[test]
    fn exact_vertical_geodesic() {
        for (m, n) in [(0u32, 4u32), (2, 2), (3, 7)] {
            let (v, t) = distance_exact(0.0, m, n, 9).unwrap();
            assert_eq!(v, m.abs_diff(n) as f64);
            assert_eq!(t, m.max(n));
        }
    }

    #[test]
    fn exact_small_examples() {
        let (v, t) = distance_exact(8.0, 0, 0, 2).unwrap();
        assert!((v - (2.0 + 8.0 * (-1.0f64).exp())).abs() <= LENGTH_TOL);
        assert!((v - 4.94303553).abs() <= 1e-6);
        assert_eq!(t, 1);
        let (v, t) = distance_exact(1.0, 0, 0, 6).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(t, 0);
    }

    #[test]
    fn exact_depth_validation() {
        assert!(distance_exact(1.0, 3, 1, 2).is_err());
    }

    #[test]
    fn proof_ceiling_matches_integer_minimiser_when_untruncated() {
        for d in [1.0, 2.0, 3.0, 5.0, 8.0, 13.0, 40.0, 200.0, 1234.0] {
            let (_, t_star) = distance_exact(d, 0, 0, 40).unwrap();
            let t_proof = proof_t_ceiling(d, 0, 0);
            assert!(
                t_star.abs_diff(t_proof) <= 1,
                "d={d}: integer minimiser {t_star} vs proof ceiling {t_proof}"
            );
        }
    }

    /// Oracle agreement: Dijkstra distance in the built truncation equals the
    /// integer minimisation, for every vertex pair.
    fn assert_oracle_agreement(base: &WeightedGraph, depth: u32) {
        let h = TruncatedHoroball::build(base, depth).unwrap();
        let base_d = base.all_pairs();
        let nb = base.vertex_count();
        let g = h.graph();
        for x in 0..nb as u32 {
            for m in 0..=depth {
                let from = g.distances_from(h.vertex_id(x, m));
                for y in 0..nb as u32 {
                    for n in 0..=depth {
                        let d_base = base_d[x as usize * nb + y as usize];
                        let (expected, _) = distance_exact(d_base, m, n, depth).unwrap();
                        let got = from[h.vertex_id(y, n) as usize];
                        assert!(
                            (expected - got).abs() <= LENGTH_TOL,
                            "pair ({x},{m})-({y},{n}): formula {expected} vs graph {got}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn oracle_agreement_small_models() {
        assert_oracle_agreement(&path_graph(14), 4);
        assert_oracle_agreement(&cycle_graph(9), 3);
        assert_oracle_agreement(&grid_graph(4, 3), 3);
    }

    #[test]
    fn estimate_gap_bounded() {
        // |exact - estimate| <= 2 + rho + 2 ln rho < 8 on a wide range
        let cap = 2.0 + RHO + 2.0 * RHO.ln();
        assert!(cap < 8.0);
        for d in 0..400u32 {
            for m in 0..6u32 {
                for n in 0..6u32 {
                    let depth = m.max(n) + 8;
                    let (exact, _) = distance_exact(d as f64, m, n, depth).unwrap();
                    let est = distance_estimate(d as f64, m, n).unwrap();
                    assert!(
                        (exact - est).abs() <= 8.0,
                        "d={d} m={m} n={n}: exact {exact} vs estimate {est}"
                    );
                }
            }
        }
    }

    #[test]
    fn exact_monotone_and_stabilises_in_depth() {
        for d_base in [1.0f64, 7.0, 29.0, 150.0] {
            let mut prev = f64::INFINITY;
            let stable_depth = (d_base.ln().ceil() as u32).max(1) + 1;
            let mut at_stable = None;
            for depth in 1..=stable_depth + 6 {
                let (v, _) = distance_exact(d_base, 0, 1, depth).unwrap();
                assert!(v <= prev + 1e-12, "not monotone at depth {depth}");
                prev = v;
                if depth == stable_depth {
                    at_stable = Some(v);
                }
            }
            assert!((prev - at_stable.unwrap()).abs() <= 1e-12);
        }
    }
}
