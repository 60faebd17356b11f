//! Finite rooted conductance networks and their path-metric geometry.
//!
//! A [`Network`] is an explicit finite truncation of a (possibly infinite)
//! rooted network. Vertices are dense ids `0..n`, edges keep their insertion
//! order (parallel edges and self-loops allowed), and every vertex carries a
//! boundary flag marking places where the truncation cut off neighbours.
//!
//! Distances always use the unweighted path metric over *all* edges, including
//! those with conductance zero; random walks and electrical quantities only see
//! the positive-conductance part.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sentinel for "not reachable" in integer distance arrays.
pub const UNREACHED: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub conductance: f64,
}

impl Edge {
    pub fn new(u: usize, v: usize, conductance: f64) -> Self {
        Edge { u, v, conductance }
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    /// The endpoint opposite to `x`.
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Compressed adjacency: for each vertex the list of `(neighbour, edge id)`.
/// Self-loops appear once in the list of their vertex.
#[derive(Clone, Debug)]
struct Adjacency {
    offsets: Vec<usize>,
    entries: Vec<(usize, usize)>,
}

impl Adjacency {
    fn build(n: usize, edges: &[Edge]) -> Self {
        let mut degree = vec![0usize; n];
        for e in edges {
            degree[e.u] += 1;
            if !e.is_loop() {
                degree[e.v] += 1;
            }
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut fill = offsets.clone();
        let mut entries = vec![(0usize, 0usize); offsets[n]];
        for (id, e) in edges.iter().enumerate() {
            entries[fill[e.u]] = (e.v, id);
            fill[e.u] += 1;
            if !e.is_loop() {
                entries[fill[e.v]] = (e.u, id);
                fill[e.v] += 1;
            }
        }
        Adjacency { offsets, entries }
    }

    fn of(&self, v: usize) -> &[(usize, usize)] {
        &self.entries[self.offsets[v]..self.offsets[v + 1]]
    }
}

/// A finite rooted network with nonnegative edge conductances.
#[derive(Clone, Debug)]
pub struct Network {
    n: usize,
    edges: Vec<Edge>,
    root: usize,
    boundary: Vec<bool>,
    adjacency: Adjacency,
    vertex_conductance: Vec<f64>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.root == other.root
            && self.boundary == other.boundary
            && self.edges.len() == other.edges.len()
            && self.edges.iter().zip(&other.edges).all(|(a, b)| {
                a.u == b.u && a.v == b.v && a.conductance.to_bits() == b.conductance.to_bits()
            })
    }
}

impl Network {
    /// Builds and validates a network.
    ///
    /// `boundary` lists the vertex ids flagged as truncation boundary.
    pub fn new(n: usize, edges: Vec<Edge>, root: usize, boundary: &[usize]) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("network must have at least one vertex"));
        }
        if root >= n {
            return Err(Error::input(format!("root {root} out of range for {n} vertices")));
        }
        for (id, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(Error::input(format!(
                    "edge {id} = ({}, {}) references a vertex outside 0..{n}",
                    e.u, e.v
                )));
            }
            if !e.conductance.is_finite() || e.conductance < 0.0 {
                return Err(Error::input(format!(
                    "edge {id} has invalid conductance {}",
                    e.conductance
                )));
            }
        }
        let mut flags = vec![false; n];
        for &b in boundary {
            if b >= n {
                return Err(Error::input(format!("boundary vertex {b} out of range")));
            }
            flags[b] = true;
        }
        let edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| Edge {
                // normalise -0.0 so serialization is canonical
                conductance: e.conductance + 0.0,
                ..e
            })
            .collect();
        let adjacency = Adjacency::build(n, &edges);
        let mut vertex_conductance = vec![0.0; n];
        for e in &edges {
            vertex_conductance[e.u] += e.conductance;
            if !e.is_loop() {
                vertex_conductance[e.v] += e.conductance;
            }
        }
        let net = Network {
            n,
            edges,
            root,
            boundary: flags,
            adjacency,
            vertex_conductance,
        };
        net.check_structure()?;
        Ok(net)
    }

    fn check_structure(&self) -> Result<()> {
        if !(self.vertex_conductance[self.root] > 0.0) {
            return Err(Error::Structural(format!(
                "root {} has no incident edge of positive conductance",
                self.root
            )));
        }
        let dist = self.distances_from(&[self.root]);
        for v in 0..self.n {
            if dist[v] == UNREACHED && !self.adjacency.of(v).is_empty() {
                return Err(Error::Structural(format!(
                    "vertex {v} has incident edges but is disconnected from the root"
                )));
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Same graph re-rooted at `root`.
    pub fn with_root(&self, root: usize) -> Result<Network> {
        Network::new(self.n, self.edges.clone(), root, &self.boundary_vertices())
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.boundary[v]).collect()
    }

    /// `c_v`: total conductance of edges at `v` (a self-loop counts once).
    pub fn vertex_conductance(&self, v: usize) -> f64 {
        self.vertex_conductance[v]
    }

    pub fn vertex_conductances(&self) -> &[f64] {
        &self.vertex_conductance
    }

    pub fn total_conductance(&self) -> f64 {
        self.vertex_conductance.iter().sum()
    }

    /// `(neighbour, edge id)` pairs at `v`, including zero-conductance edges.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        self.adjacency.of(v)
    }

    /// Number of incident edge slots at `v` (self-loops count once).
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency.of(v).len()
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(Error::input(format!(
                "vertex {v} out of range for a network with {} vertices",
                self.n
            )))
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_vertices(&self, set: &[usize], what: &str) -> Result<()> {
        if set.is_empty() {
            return Err(Error::input(format!("{what} must be nonempty")));
        }
        set.iter().try_for_each(|&v| self.check_vertex(v))
    }

    /// Multi-source BFS distances in the unweighted path metric.
    pub fn distances_from(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![UNREACHED; self.n];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] == UNREACHED {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(x) = queue.pop_front() {
            let d = dist[x] + 1;
            for &(y, _) in self.adjacency.of(x) {
                if dist[y] == UNREACHED {
                    dist[y] = d;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// `B(center, radius)` in BFS order (center first).
    pub fn graph_ball(&self, center: usize, radius: usize) -> Result<Vec<usize>> {
        self.check_vertex(center)?;
        let mut search = BallSearch::new(self.n);
        Ok(search
            .ball(self, center, radius)
            .iter()
            .map(|&(v, _)| v)
            .collect())
    }

    /// `vol(center, R) = Σ_{y ∈ B(center,R)} c_y`.
    pub fn volume(&self, center: usize, radius: usize) -> Result<f64> {
        self.check_vertex(center)?;
        let mut search = BallSearch::new(self.n);
        Ok(search.volume(self, center, radius))
    }

    /// Distance from `center` to the nearest boundary-flagged vertex.
    pub fn distance_to_boundary(&self, center: usize) -> usize {
        let mut search = BallSearch::new(self.n);
        search.distance_to_boundary(self, center)
    }

    /// Distance from every vertex to the boundary set (`UNREACHED` when there
    /// are no boundary vertices in its component).
    pub fn boundary_distances(&self) -> Vec<usize> {
        self.distances_from(&self.boundary_vertices())
    }

    /// Fails with a contamination error when a boundary vertex lies within
    /// `radius` of `center`. Such a query would see an incomplete
    /// neighbourhood and return a biased value.
    pub fn ensure_interior(&self, center: usize, radius: usize) -> Result<()> {
        self.check_vertex(center)?;
        let mut search = BallSearch::new(self.n);
        if let Some(b) = search.boundary_within(self, center, radius) {
            return Err(Error::Contamination {
                center,
                radius,
                boundary_vertex: b,
            });
        }
        Ok(())
    }

    /// Shortest-path pseudometric `dist_ω(S, T)`; `+∞` when no path exists.
    pub fn weighted_distance(&self, w: &EdgeWeight, sources: &[usize], targets: &[usize]) -> Result<f64> {
        self.check_vertices(sources, "source set")?;
        self.check_vertices(targets, "target set")?;
        self.check_weight(w)?;
        let mut is_target = vec![false; self.n];
        for &t in targets {
            is_target[t] = true;
        }
        let dist = self.dijkstra(w, sources, Some(&is_target));
        Ok(targets
            .iter()
            .map(|&t| dist[t])
            .fold(f64::INFINITY, f64::min))
    }

    /// `dist_ω(S, ·)` to every vertex (`+∞` where unreachable).
    pub fn weighted_distances_from(&self, w: &EdgeWeight, sources: &[usize]) -> Result<Vec<f64>> {
        self.check_vertices(sources, "source set")?;
        self.check_weight(w)?;
        Ok(self.dijkstra(w, sources, None))
    }

    pub(crate) fn check_weight(&self, w: &EdgeWeight) -> Result<()> {
        if w.len() != self.edges.len() {
            return Err(Error::input(format!(
                "edge weight has {} entries, network has {} edges",
                w.len(),
                self.edges.len()
            )));
        }
        Ok(())
    }

    fn dijkstra(&self, w: &EdgeWeight, sources: &[usize], stop_at: Option<&[bool]>) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.n];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s] = 0.0;
            heap.push(HeapItem(0.0, s));
        }
        while let Some(HeapItem(d, x)) = heap.pop() {
            if d > dist[x] {
                continue;
            }
            if let Some(targets) = stop_at {
                if targets[x] {
                    break;
                }
            }
            for &(y, id) in self.adjacency.of(x) {
                let nd = d + w.values[id];
                if nd < dist[y] {
                    dist[y] = nd;
                    heap.push(HeapItem(nd, y));
                }
            }
        }
        dist
    }

    /// Induced subnetwork on `B(root, radius)`. Vertices at distance exactly
    /// `radius` are flagged as boundary (in addition to inherited flags).
    pub fn truncate_to_ball(&self, radius: usize) -> Result<Truncation> {
        if radius < 1 {
            return Err(Error::input("truncation radius must be at least 1"));
        }
        let dist = self.distances_from(&[self.root]);
        self.induced(|v| dist[v] <= radius, |v| dist[v] == radius)
    }

    /// Induced subnetwork on the vertices selected by `keep`, relabelled in
    /// increasing original id order.
    pub(crate) fn induced(
        &self,
        keep: impl Fn(usize) -> bool,
        extra_boundary: impl Fn(usize) -> bool,
    ) -> Result<Truncation> {
        let mut old_to_new = vec![None; self.n];
        let mut new_to_old = Vec::new();
        for v in 0..self.n {
            if keep(v) {
                old_to_new[v] = Some(new_to_old.len());
                new_to_old.push(v);
            }
        }
        let root = old_to_new[self.root]
            .ok_or_else(|| Error::Structural("root is not part of the induced subnetwork".into()))?;
        let mut edges = Vec::new();
        let mut edge_map = Vec::new();
        for (id, e) in self.edges.iter().enumerate() {
            if let (Some(u), Some(v)) = (old_to_new[e.u], old_to_new[e.v]) {
                edges.push(Edge::new(u, v, e.conductance));
                edge_map.push(id);
            }
        }
        let boundary: Vec<usize> = new_to_old
            .iter()
            .enumerate()
            .filter(|&(_, &old)| self.boundary[old] || extra_boundary(old))
            .map(|(new, _)| new)
            .collect();
        let network = Network::new(new_to_old.len(), edges, root, &boundary).map_err(|e| match e {
            Error::Structural(msg) => Error::Structural(format!("after truncation: {msg}")),
            other => other,
        })?;
        Ok(Truncation {
            network,
            old_to_new,
            new_to_old,
            edge_map,
        })
    }

    /// Largest BFS distance from the root.
    pub fn root_eccentricity(&self) -> usize {
        self.distances_from(&[self.root])
            .into_iter()
            .filter(|&d| d != UNREACHED)
            .max()
            .unwrap_or(0)
    }
}

/// Result of [`Network::truncate_to_ball`]: the subnetwork plus the relabelling.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub network: Network,
    pub old_to_new: Vec<Option<usize>>,
    pub new_to_old: Vec<usize>,
    /// Original edge id of every edge of the subnetwork.
    pub edge_map: Vec<usize>,
}

#[derive(PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// Reusable BFS workspace for repeated ball queries on one network. Uses epoch
/// stamps so a query costs O(|ball|) rather than O(n).
#[derive(Clone, Debug)]
pub struct BallSearch {
    stamp: Vec<u32>,
    epoch: u32,
    found: Vec<(usize, usize)>,
}

impl BallSearch {
    pub fn new(n: usize) -> Self {
        BallSearch {
            stamp: vec![0; n],
            epoch: 0,
            found: Vec::new(),
        }
    }

    fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
    }

    /// `(vertex, distance)` pairs of `B(center, radius)` in BFS order.
    pub fn ball(&mut self, net: &Network, center: usize, radius: usize) -> &[(usize, usize)] {
        self.next_epoch();
        self.found.clear();
        self.stamp[center] = self.epoch;
        self.found.push((center, 0));
        let mut head = 0;
        while head < self.found.len() {
            let (x, d) = self.found[head];
            head += 1;
            if d == radius {
                continue;
            }
            for &(y, _) in net.neighbors(x) {
                if self.stamp[y] != self.epoch {
                    self.stamp[y] = self.epoch;
                    self.found.push((y, d + 1));
                }
            }
        }
        &self.found
    }

    pub fn volume(&mut self, net: &Network, center: usize, radius: usize) -> f64 {
        let vc = net.vertex_conductances();
        self.ball(net, center, radius).iter().map(|&(v, _)| vc[v]).sum()
    }

    /// Some boundary vertex within `radius` of `center`, if any.
    pub fn boundary_within(&mut self, net: &Network, center: usize, radius: usize) -> Option<usize> {
        self.ball(net, center, radius)
            .iter()
            .find(|&&(v, _)| net.is_boundary(v))
            .map(|&(v, _)| v)
    }

    pub fn distance_to_boundary(&mut self, net: &Network, center: usize) -> usize {
        self.ball(net, center, UNREACHED - 1)
            .iter()
            .find(|&&(v, _)| net.is_boundary(v))
            .map_or(UNREACHED, |&(_, d)| d)
    }
}

/// Nonnegative per-edge weight `ω`, indexed like the owning network's edges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeWeight {
    pub values: Vec<f64>,
}

impl EdgeWeight {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::input(format!("edge weight {i} is invalid: {v}")));
        }
        Ok(EdgeWeight { values })
    }

    pub fn constant(net: &Network, value: f64) -> Self {
        EdgeWeight {
            values: vec![value; net.edge_count()],
        }
    }

    pub fn zeros(net: &Network) -> Self {
        Self::constant(net, 0.0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `‖ω‖²_{ℓ²(c)} = Σ_e c(e) ω(e)²`.
    pub fn l2_mass(&self, net: &Network) -> f64 {
        net.edges()
            .iter()
            .zip(&self.values)
            .map(|(e, w)| e.conductance * w * w)
            .sum()
    }
}

/// Annulus `B(center, inner) ↔ B̄(center, outer)`; a ball is the case
/// `inner == outer`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annulus {
    pub center: usize,
    pub inner: usize,
    pub outer: usize,
}

impl Annulus {
    pub fn new(center: usize, inner: usize, outer: usize) -> Result<Self> {
        if inner > outer {
            return Err(Error::input(format!(
                "annulus inner radius {inner} exceeds outer radius {outer}"
            )));
        }
        Ok(Annulus { center, inner, outer })
    }

    pub fn ball(center: usize, radius: usize) -> Self {
        Annulus {
            center,
            inner: radius,
            outer: radius,
        }
    }

    pub fn is_ball(&self) -> bool {
        self.inner == self.outer
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Network {
        let edges = (0..n - 1).map(|i| Edge::new(i, i + 1, 1.0)).collect();
        Network::new(n, edges, 0, &[]).unwrap()
    }

    fn cycle4() -> Network {
        let edges = (0..4).map(|i| Edge::new(i, (i + 1) % 4, 1.0)).collect();
        Network::new(4, edges, 0, &[]).unwrap()
    }

    #[test]
    fn ball_on_path() {
        let net = path(4);
        let mut b = net.graph_ball(0, 1).unwrap();
        b.sort();
        assert_eq!(b, vec![0, 1]);
        assert_eq!(net.graph_ball(2, 0).unwrap(), vec![2]);
        assert!(matches!(net.graph_ball(9, 1), Err(Error::Input(_))));
    }

    #[test]
    fn volumes() {
        let net = path(3);
        assert_eq!(net.volume(1, 1).unwrap(), 4.0);
        assert_eq!(cycle4().volume(2, 1).unwrap(), 6.0);
    }

    #[test]
    fn self_loop_counts_once() {
        let net = Network::new(2, vec![Edge::new(0, 1, 1.0), Edge::new(1, 1, 0.5)], 0, &[]).unwrap();
        assert_eq!(net.vertex_conductance(1), 1.5);
        assert_eq!(net.degree(1), 2);
    }

    #[test]
    fn weighted_distance_cases() {
        let net = path(3);
        let w = EdgeWeight::new(vec![0.5, 2.0]).unwrap();
        assert_eq!(net.weighted_distance(&w, &[0], &[2]).unwrap(), 2.5);
        assert_eq!(net.weighted_distance(&EdgeWeight::zeros(&net), &[0], &[2]).unwrap(), 0.0);
        assert_eq!(net.weighted_distance(&w, &[0, 1], &[1]).unwrap(), 0.0);
        assert!(net.weighted_distance(&w, &[], &[1]).is_err());
        let split = Network::new(3, vec![Edge::new(0, 1, 1.0)], 0, &[]).unwrap();
        let inf = split
            .weighted_distance(&EdgeWeight::constant(&split, 1.0), &[0], &[2])
            .unwrap();
        assert!(inf.is_infinite());
    }

    #[test]
    fn invalid_networks_rejected() {
        assert!(matches!(
            Network::new(2, vec![Edge::new(0, 1, -1.0)], 0, &[]),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            Network::new(2, vec![Edge::new(0, 1, 0.0)], 0, &[]),
            Err(Error::Structural(_))
        ));
        assert!(matches!(
            Network::new(4, vec![Edge::new(0, 1, 1.0), Edge::new(2, 3, 1.0)], 0, &[]),
            Err(Error::Structural(_))
        ));
        assert!(Network::new(3, vec![Edge::new(0, 1, 1.0)], 0, &[]).is_ok());
    }

    #[test]
    fn zero_conductance_edges_count_for_distance() {
        let net = Network::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 0.0)], 0, &[]).unwrap();
        assert_eq!(net.distances_from(&[0])[2], 2);
        assert_eq!(net.vertex_conductance(2), 0.0);
    }

    #[test]
    fn truncation_of_segment() {
        // Z-segment [-10, 10], vertex i ↔ position i - 10, root at 10.
        let edges = (0..20).map(|i| Edge::new(i, i + 1, 1.0)).collect();
        let net = Network::new(21, edges, 10, &[0, 20]).unwrap();
        let t = net.truncate_to_ball(3).unwrap();
        assert_eq!(t.network.vertex_count(), 7);
        assert_eq!(t.network.root(), 3);
        assert_eq!(t.network.boundary_vertices(), vec![0, 6]);
        assert_eq!(t.new_to_old[0], 7);
        let whole = net.truncate_to_ball(50).unwrap();
        assert_eq!(whole.network.vertex_count(), 21);
        assert_eq!(whole.network.boundary_vertices(), vec![0, 20]);
    }

    #[test]
    fn contamination_guard() {
        let edges = (0..20).map(|i| Edge::new(i, i + 1, 1.0)).collect();
        let net = Network::new(21, edges, 10, &[0, 20]).unwrap();
        assert!(net.ensure_interior(10, 9).is_ok());
        assert!(matches!(
            net.ensure_interior(10, 10),
            Err(Error::Contamination { center: 10, radius: 10, .. })
        ));
        assert_eq!(net.distance_to_boundary(10), 10);
    }
}
