//! Benchmark network families.
//!
//! Every constructor is deterministic given its parameters (and seed, for the
//! random families). Vertex ids follow lexicographic order of the natural
//! coordinates, so serialized output is byte-stable.

use std::collections::{BTreeSet, HashMap};

use ndarray::Array2;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Edge, Network};
use crate::rng::{substream, tag};

/// `√(π/2)`, the critical GFF coupling.
pub const GAMMA_C: f64 = 1.253_314_137_315_500_3;

/// Volume growth exponent of the GFF-conductance lattice at coupling `γ`.
pub fn gff_fractal_dimension(gamma: f64) -> f64 {
    let t = gamma / GAMMA_C;
    if t <= 1.0 {
        2.0 + 2.0 * t * t
    } else {
        4.0 * t
    }
}

pub const DEFAULT_VERTEX_CAP: usize = 8_000_000;
pub const DEFAULT_MAX_RETRIES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Path,
    Cycle,
    #[serde(rename = "lattice")]
    LatticeZd,
    #[serde(rename = "tree")]
    TreeBAry,
    #[serde(rename = "gasket")]
    SierpinskiGasket,
    #[serde(rename = "gff")]
    GffLattice,
    #[serde(rename = "percolation")]
    BernoulliPercolationCluster,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "path" => Family::Path,
            "cycle" => Family::Cycle,
            "lattice" | "lattice_zd" | "grid" => Family::LatticeZd,
            "tree" | "tree_b_ary" => Family::TreeBAry,
            "gasket" | "sierpinski_gasket" => Family::SierpinskiGasket,
            "gff" | "gff_lattice" => Family::GffLattice,
            "percolation" | "bernoulli_percolation_cluster" => Family::BernoulliPercolationCluster,
            other => return Err(Error::input(format!("unknown family \"{other}\""))),
        })
    }
}

/// Full description of a generated network, echoed as provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    /// Lattice dimension `d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Half-width `N` (paths, boxes) or vertex count (cycles).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    /// Gasket level `L`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branching: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_cap")]
    pub vertex_cap: usize,
    #[serde(default = "default_retries")]
    pub max_retries: usize,
}

fn default_cap() -> usize {
    DEFAULT_VERTEX_CAP
}

fn default_retries() -> usize {
    DEFAULT_MAX_RETRIES
}

impl GeneratorSpec {
    pub fn new(family: Family) -> Self {
        GeneratorSpec {
            family,
            dim: None,
            size: None,
            level: None,
            branching: None,
            depth: None,
            gamma: None,
            p: None,
            seed: 0,
            vertex_cap: DEFAULT_VERTEX_CAP,
            max_retries: DEFAULT_MAX_RETRIES,
        }
    }

    pub fn path(half_width: usize) -> Self {
        GeneratorSpec {
            size: Some(half_width),
            ..Self::new(Family::Path)
        }
    }

    pub fn cycle(n: usize) -> Self {
        GeneratorSpec {
            size: Some(n),
            ..Self::new(Family::Cycle)
        }
    }

    pub fn lattice(dim: usize, half_width: usize) -> Self {
        GeneratorSpec {
            dim: Some(dim),
            size: Some(half_width),
            ..Self::new(Family::LatticeZd)
        }
    }

    pub fn tree(branching: usize, depth: usize) -> Self {
        GeneratorSpec {
            branching: Some(branching),
            depth: Some(depth),
            ..Self::new(Family::TreeBAry)
        }
    }

    pub fn gasket(level: usize) -> Self {
        GeneratorSpec {
            level: Some(level),
            ..Self::new(Family::SierpinskiGasket)
        }
    }

    pub fn gff(half_width: usize, gamma: f64, seed: u64) -> Self {
        GeneratorSpec {
            size: Some(half_width),
            gamma: Some(gamma),
            seed,
            ..Self::new(Family::GffLattice)
        }
    }

    pub fn percolation(half_width: usize, p: f64, seed: u64) -> Self {
        GeneratorSpec {
            size: Some(half_width),
            p: Some(p),
            seed,
            ..Self::new(Family::BernoulliPercolationCluster)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn need<T: Copy>(value: Option<T>, name: &str, family: Family) -> Result<T> {
        value.ok_or_else(|| Error::input(format!("family {family:?} needs parameter \"{name}\"")))
    }

    pub fn build(&self) -> Result<Network> {
        let f = self.family;
        match f {
            Family::Path => {
                let n = Self::need(self.size, "size", f)?;
                check_cap(2 * n + 1, self.vertex_cap)?;
                gen_path(n)
            }
            Family::Cycle => {
                let n = Self::need(self.size, "size", f)?;
                check_cap(n, self.vertex_cap)?;
                gen_cycle(n)
            }
            Family::LatticeZd => gen_lattice_capped(
                self.dim.unwrap_or(2),
                Self::need(self.size, "size", f)?,
                self.vertex_cap,
            ),
            Family::TreeBAry => {
                let b = Self::need(self.branching, "branching", f)?;
                let depth = Self::need(self.depth, "depth", f)?;
                check_cap(tree_size(b, depth)?, self.vertex_cap)?;
                gen_tree(b, depth)
            }
            Family::SierpinskiGasket => gen_gasket(Self::need(self.level, "level", f)?),
            Family::GffLattice => {
                let n = Self::need(self.size, "size", f)?;
                check_cap((2 * n + 1).pow(2), self.vertex_cap)?;
                gen_gff_lattice(n, Self::need(self.gamma, "gamma", f)?, self.seed)
            }
            Family::BernoulliPercolationCluster => {
                let n = Self::need(self.size, "size", f)?;
                check_cap((2 * n + 1).pow(2), self.vertex_cap)?;
                gen_percolation_cluster_with(n, Self::need(self.p, "p", f)?, self.seed, self.max_retries)
            }
        }
    }

    pub fn provenance(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("spec serializes")
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::Resource(format!(
            "network would have {n} vertices, above the cap of {cap}"
        )));
    }
    Ok(())
}

/// Segment `[−N, N]` of `Z`; id `i` is position `i − N`, so the root is `N`.
pub fn gen_path(half_width: usize) -> Result<Network> {
    if half_width < 1 {
        return Err(Error::input("path half-width N must be at least 1"));
    }
    let n = 2 * half_width + 1;
    let edges = (0..n - 1).map(|i| Edge::new(i, i + 1, 1.0)).collect();
    Network::new(n, edges, half_width, &[0, n - 1])
}

pub fn gen_cycle(n: usize) -> Result<Network> {
    if n < 3 {
        return Err(Error::input("cycle needs at least 3 vertices"));
    }
    let edges = (0..n).map(|i| Edge::new(i, (i + 1) % n, 1.0)).collect();
    Network::new(n, edges, 0, &[])
}

pub fn gen_lattice(dim: usize, half_width: usize) -> Result<Network> {
    gen_lattice_capped(dim, half_width, DEFAULT_VERTEX_CAP)
}

fn gen_lattice_capped(dim: usize, half_width: usize, cap: usize) -> Result<Network> {
    if !(1..=3).contains(&dim) {
        return Err(Error::input(format!("lattice dimension must be 1, 2 or 3, got {dim}")));
    }
    if half_width < 1 {
        return Err(Error::input("lattice half-width N must be at least 1"));
    }
    let side = 2 * half_width + 1;
    let n = side
        .checked_pow(dim as u32)
        .ok_or_else(|| Error::Resource("lattice size overflows".into()))?;
    check_cap(n, cap)?;
    let lattice = BoxLattice { dim, side };
    let mut edges = Vec::with_capacity(dim * n);
    let mut boundary = Vec::new();
    let mut coords = vec![0; dim];
    for v in 0..n {
        lattice.coords(v, &mut coords);
        if coords.iter().any(|&c| c == 0 || c == side - 1) {
            boundary.push(v);
        }
        for axis in 0..dim {
            if coords[axis] + 1 < side {
                edges.push(Edge::new(v, v + lattice.stride(axis), 1.0));
            }
        }
    }
    Network::new(n, edges, lattice.center(), &boundary)
}

/// Row-major box `{0..side}^dim`, last axis fastest.
#[derive(Clone, Copy, Debug)]
struct BoxLattice {
    dim: usize,
    side: usize,
}

impl BoxLattice {
    fn stride(&self, axis: usize) -> usize {
        self.side.pow((self.dim - 1 - axis) as u32)
    }

    fn coords(&self, mut v: usize, out: &mut [usize]) {
        for axis in (0..self.dim).rev() {
            out[axis] = v % self.side;
            v /= self.side;
        }
    }

    fn center(&self) -> usize {
        let h = self.side / 2;
        (0..self.dim).map(|a| h * self.stride(a)).sum()
    }
}

fn tree_size(b: usize, depth: usize) -> Result<usize> {
    let mut total: usize = 0;
    let mut level: usize = 1;
    for _ in 0..=depth {
        total = total
            .checked_add(level)
            .ok_or_else(|| Error::Resource("tree size overflows".into()))?;
        level = level.saturating_mul(b);
    }
    Ok(total)
}

/// Complete `b`-ary tree of the given depth in BFS order, leaves flagged.
pub fn gen_tree(b: usize, depth: usize) -> Result<Network> {
    if b < 1 || depth < 1 {
        return Err(Error::input("tree needs branching ≥ 1 and depth ≥ 1"));
    }
    let n = tree_size(b, depth)?;
    let first_leaf = n - b.pow(depth as u32);
    let edges = (1..n).map(|v| Edge::new((v - 1) / b, v, 1.0)).collect();
    let leaves: Vec<usize> = (first_leaf..n).collect();
    Network::new(n, edges, 0, &leaves)
}

/// Level-`L` Sierpiński gasket graph.
///
/// Vertices are the points `(i, j)`, `i + j ≤ 2^L`, of the triangular lattice
/// that belong to the gasket; ids follow lexicographic order so the root
/// corner `(0, 0)` is id 0. The corners `(2^L, 0)` and `(0, 2^L)` are flagged.
pub fn gen_gasket(level: usize) -> Result<Network> {
    if level > 10 {
        return Err(Error::input(format!("gasket level must be at most 10, got {level}")));
    }
    let top = 1i64 << level;
    // offsets of the 3^L unit triangles
    let mut offsets = vec![(0i64, 0i64)];
    for k in 0..level {
        let s = 1i64 << k;
        let mut next = Vec::with_capacity(offsets.len() * 3);
        for &(i, j) in &offsets {
            next.push((i, j));
            next.push((i + s, j));
            next.push((i, j + s));
        }
        offsets = next;
    }
    let mut points = BTreeSet::new();
    for &(i, j) in &offsets {
        points.insert((i, j));
        points.insert((i + 1, j));
        points.insert((i, j + 1));
    }
    let id: HashMap<(i64, i64), usize> = points.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let mut edges = Vec::with_capacity(3 * offsets.len());
    for &(i, j) in &offsets {
        let a = id[&(i, j)];
        let b = id[&(i + 1, j)];
        let c = id[&(i, j + 1)];
        edges.push(Edge::new(a, b, 1.0));
        edges.push(Edge::new(a, c, 1.0));
        edges.push(Edge::new(b, c, 1.0));
    }
    edges.sort_by_key(|e| (e.u.min(e.v), e.u.max(e.v)));
    let boundary = [id[&(top, 0)], id[&(0, top)]];
    Network::new(points.len(), edges, id[&(0, 0)], &boundary)
}

/// Expected vertex count `(3^{L+1} + 3)/2` of the level-`L` gasket.
pub fn gasket_vertex_count(level: usize) -> usize {
    (3usize.pow(level as u32 + 1) + 3) / 2
}

/// Orthonormal discrete sine basis `φ_k(i) = √(2/(m+1)) sin(π k i/(m+1))`,
/// `i, k = 1..m`, stored as `Φ[i−1, k−1]`.
fn sine_basis(m: usize) -> Array2<f64> {
    let scale = (2.0 / (m as f64 + 1.0)).sqrt();
    Array2::from_shape_fn((m, m), |(i, k)| {
        scale * (std::f64::consts::PI * ((i + 1) * (k + 1)) as f64 / (m as f64 + 1.0)).sin()
    })
}

/// Zero-boundary discrete GFF on the box `[−N, N]²`, in lattice id order.
///
/// The covariance is the visit-count Green kernel of simple random walk
/// killed on leaving the box, `4 (4I − A)⁻¹`. Sampled exactly through the
/// sine eigenbasis of the Dirichlet Laplacian.
pub fn sample_gff_box(half_width: usize, seed: u64) -> Result<Vec<f64>> {
    if half_width < 1 {
        return Err(Error::input("GFF half-width N must be at least 1"));
    }
    let m = 2 * half_width + 1;
    let phi = sine_basis(m);
    let theta: Vec<f64> = (1..=m)
        .map(|k| 2.0 * (std::f64::consts::PI * k as f64 / (m as f64 + 1.0)).cos())
        .collect();
    let mut rng = substream(seed, tag::GENERATOR, 0);
    let mut coeff = Array2::<f64>::zeros((m, m));
    for k in 0..m {
        for l in 0..m {
            let lambda = 4.0 - theta[k] - theta[l];
            if !(lambda > 0.0) {
                return Err(Error::numerical("non-positive Dirichlet eigenvalue in GFF sampler", lambda));
            }
            let z: f64 = rng.sample(StandardNormal);
            coeff[(k, l)] = (4.0 / lambda).sqrt() * z;
        }
    }
    let field = phi.dot(&coeff).dot(&phi.t());
    Ok(field.iter().copied().collect())
}

/// Box lattice with conductances `exp(γ(η_u + η_v))` built from a field
/// sample `η` (lattice id order); the field is re-centred so that `η` vanishes
/// at the origin.
pub fn gff_network_from_field(half_width: usize, gamma: f64, field: &[f64]) -> Result<(Network, Vec<f64>)> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::input(format!("gamma must be a positive finite number, got {gamma}")));
    }
    let base = gen_lattice(2, half_width)?;
    if field.len() != base.vertex_count() {
        return Err(Error::input("GFF field length does not match the box"));
    }
    let origin = base.root();
    let shift = field[origin];
    let eta: Vec<f64> = field.iter().map(|&x| x - shift).collect();
    let edges = base
        .edges()
        .iter()
        .map(|e| Edge::new(e.u, e.v, (gamma * (eta[e.u] + eta[e.v])).exp()))
        .collect();
    let net = Network::new(base.vertex_count(), edges, origin, &base.boundary_vertices())?;
    Ok((net, eta))
}

/// GFF-conductance lattice on `[−N, N]²`, root at the origin, faces flagged.
pub fn gen_gff_lattice(half_width: usize, gamma: f64, seed: u64) -> Result<Network> {
    if half_width < 2 {
        return Err(Error::input("GFF half-width N must be at least 2"));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::input(format!("gamma must be a positive finite number, got {gamma}")));
    }
    let field = sample_gff_box(half_width, seed)?;
    Ok(gff_network_from_field(half_width, gamma, &field)?.0)
}

pub fn gen_percolation_cluster(half_width: usize, p: f64, seed: u64) -> Result<Network> {
    gen_percolation_cluster_with(half_width, p, seed, DEFAULT_MAX_RETRIES)
}

/// Open cluster of the origin under Bernoulli(`p`) bond percolation on
/// `[−N, N]²`, resampled until the cluster has at least two vertices.
/// Cluster vertices on the box faces are flagged.
pub fn gen_percolation_cluster_with(half_width: usize, p: f64, seed: u64, max_retries: usize) -> Result<Network> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::input(format!("percolation parameter p must lie in (0, 1], got {p}")));
    }
    let lattice = gen_lattice(2, half_width)?;
    let n = lattice.vertex_count();
    for attempt in 0..max_retries.max(1) {
        let mut rng = substream(seed, tag::GENERATOR, attempt as u64);
        let open: Vec<bool> = lattice.edges().iter().map(|_| rng.random::<f64>() < p).collect();
        let mut seen = vec![false; n];
        let root = lattice.root();
        seen[root] = true;
        let mut stack = vec![root];
        let mut size = 1;
        while let Some(x) = stack.pop() {
            for &(y, id) in lattice.neighbors(x) {
                if open[id] && !seen[y] {
                    seen[y] = true;
                    size += 1;
                    stack.push(y);
                }
            }
        }
        if size < 2 {
            continue;
        }
        let cut = lattice.induced(|v| seen[v], |_| false)?;
        // drop closed edges between cluster vertices
        let keep_edges: Vec<Edge> = cut
            .edge_map
            .iter()
            .zip(cut.network.edges())
            .filter(|(&old, _)| open[old])
            .map(|(_, e)| *e)
            .collect();
        return Network::new(
            cut.network.vertex_count(),
            keep_edges,
            cut.network.root(),
            &cut.network.boundary_vertices(),
        );
    }
    Err(Error::Resource(format!(
        "percolation: root cluster was isolated in all {max_retries} attempts"
    )))
}
