//! Random walks on `G₊`: ensemble simulation of exit times and running
//! maxima, exact heat kernels, restricted walks and the Markov-type ratio.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{EdgeWeight, Network, UNREACHED};
use crate::rng::{substream, tag, Rng};

/// Per-vertex alias tables over the positive-conductance neighbours.
#[derive(Clone, Debug)]
pub struct TransitionSampler {
    offsets: Vec<usize>,
    target: Vec<usize>,
    prob: Vec<f64>,
    alias: Vec<usize>,
}

impl TransitionSampler {
    pub fn new(net: &Network) -> Self {
        let n = net.vertex_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut target = Vec::new();
        let mut prob = Vec::new();
        let mut alias = Vec::new();
        offsets.push(0);
        let mut small = Vec::new();
        let mut large = Vec::new();
        for x in 0..n {
            let base = target.len();
            let mut weights = Vec::new();
            for &(y, id) in net.neighbors(x) {
                let c = net.edge(id).conductance;
                if c > 0.0 {
                    target.push(y);
                    weights.push(c);
                }
            }
            let k = weights.len();
            let total: f64 = weights.iter().sum();
            let mut scaled: Vec<f64> = weights.iter().map(|w| w * k as f64 / total).collect();
            let mut local_alias: Vec<usize> = (0..k).collect();
            small.clear();
            large.clear();
            for (i, &s) in scaled.iter().enumerate() {
                if s < 1.0 {
                    small.push(i);
                } else {
                    large.push(i);
                }
            }
            while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
                small.pop();
                local_alias[s] = l;
                scaled[l] -= 1.0 - scaled[s];
                if scaled[l] < 1.0 {
                    large.pop();
                    small.push(l);
                }
            }
            for &i in small.iter().chain(large.iter()) {
                scaled[i] = 1.0;
            }
            prob.extend_from_slice(&scaled);
            alias.extend(local_alias.iter().map(|&a| base + a));
            offsets.push(target.len());
        }
        TransitionSampler {
            offsets,
            target,
            prob,
            alias,
        }
    }

    /// One step of the walk from `x`; vertices with `c_x = 0` stay put.
    #[inline]
    pub fn step(&self, x: usize, rng: &mut Rng) -> usize {
        let (lo, hi) = (self.offsets[x], self.offsets[x + 1]);
        if lo == hi {
            return x;
        }
        let slot = lo + rng.random_range(0..hi - lo);
        if rng.random::<f64>() < self.prob[slot] {
            self.target[slot]
        } else {
            self.target[self.alias[slot]]
        }
    }
}

/// Row `p(x, ·)` of the transition kernel, merged over parallel edges.
pub fn transition_row(net: &Network, x: usize) -> Vec<(usize, f64)> {
    let cx = net.vertex_conductance(x);
    let mut row: Vec<(usize, f64)> = Vec::new();
    if cx <= 0.0 {
        return row;
    }
    for &(y, id) in net.neighbors(x) {
        let c = net.edge(id).conductance;
        if c <= 0.0 {
            continue;
        }
        match row.iter_mut().find(|(z, _)| *z == y) {
            Some(entry) => entry.1 += c / cx,
            None => row.push((y, c / cx)),
        }
    }
    row.sort_by_key(|&(y, _)| y);
    row
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Start {
    Root,
    Vertex(usize),
    /// `X₀ ∼ π_S` for the given set.
    StationaryRestricted(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub n_steps: u64,
    pub n_walkers: usize,
    pub seed: u64,
    pub start: Start,
}

impl WalkConfig {
    pub fn new(n_steps: u64, n_walkers: usize, seed: u64) -> Self {
        WalkConfig {
            n_steps,
            n_walkers,
            seed,
            start: Start::Root,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_steps < 1 || self.n_walkers < 1 {
            return Err(Error::input("walks need n_steps ≥ 1 and n_walkers ≥ 1"));
        }
        Ok(())
    }
}

/// Dyadic scales `2^k` from `lo` up to `hi` (inclusive).
pub fn dyadic_grid(lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut s = lo.max(1).next_power_of_two();
    while s <= hi {
        out.push(s);
        s *= 2;
    }
    out
}

/// Per-scale samples, one entry per walker; `None` marks a censored or
/// unresolved trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleSamples {
    pub scale: u64,
    pub samples: Vec<Option<u64>>,
}

impl ScaleSamples {
    pub fn resolved(&self) -> impl Iterator<Item = u64> + '_ {
        self.samples.iter().filter_map(|s| *s)
    }

    pub fn count_resolved(&self) -> usize {
        self.samples.iter().filter(|s| s.is_some()).count()
    }

    pub fn count_censored(&self) -> usize {
        self.samples.len() - self.count_resolved()
    }

    pub fn censor_frac(&self) -> f64 {
        self.count_censored() as f64 / self.samples.len().max(1) as f64
    }

    /// Mean and standard error of the resolved samples (of `f(sample)`).
    pub fn mean_with(&self, f: impl Fn(u64) -> f64) -> (f64, f64) {
        let xs: Vec<f64> = self.resolved().map(f).collect();
        mean_stderr(&xs)
    }
}

pub(crate) fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let k = xs.len();
    if k == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / k as f64;
    if k < 2 {
        return (mean, f64::INFINITY);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1) as f64;
    (mean, (var / k as f64).sqrt())
}

/// Ensemble summaries of walks from a fixed start.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkStats {
    pub start: usize,
    pub n_steps: u64,
    pub n_walkers: usize,
    pub seed: u64,
    /// `σ_R` per radius.
    pub sigma: Vec<ScaleSamples>,
    /// `𝓜_n` per time.
    pub max_disp: Vec<ScaleSamples>,
}

impl WalkStats {
    /// Checks `𝓜_n ≥ 1{σ_R ≤ n}·R` for every walker and every pair of grid
    /// points resolved by that walker; returns the number of violations.
    pub fn elementary_violations(&self) -> usize {
        let mut bad = 0;
        for w in 0..self.n_walkers {
            for s in &self.sigma {
                let Some(sig) = s.samples[w] else { continue };
                for m in &self.max_disp {
                    if let Some(md) = m.samples[w] {
                        if sig <= m.scale && md < s.scale {
                            bad += 1;
                        }
                    }
                }
            }
        }
        bad
    }
}

struct Trajectory {
    sigma: Vec<Option<u64>>,
    max_disp: Vec<Option<u64>>,
}

#[allow(clippy::too_many_arguments)]
fn run_walker(
    net: &Network,
    sampler: &TransitionSampler,
    dist: &[usize],
    start: usize,
    r_grid: &[u64],
    n_grid: &[u64],
    n_steps: u64,
    rng: &mut Rng,
) -> Trajectory {
    let mut sigma = vec![None; r_grid.len()];
    let mut max_disp = vec![None; n_grid.len()];
    let mut next_r = 0;
    let mut next_n = 0;
    let mut x = start;
    let mut running_max = 0u64;
    let mut t = 0u64;
    loop {
        // record quantities resolved at time t (position x is exact)
        let d = dist[x] as u64;
        running_max = running_max.max(d);
        while next_r < r_grid.len() && d > r_grid[next_r] {
            sigma[next_r] = Some(t);
            next_r += 1;
        }
        while next_n < n_grid.len() && n_grid[next_n] == t {
            max_disp[next_n] = Some(running_max);
            next_n += 1;
        }
        let done = next_r == r_grid.len() && next_n == n_grid.len();
        // the kernel at a flagged vertex is truncated: stop before using it
        if done || t >= n_steps || net.is_boundary(x) {
            break;
        }
        x = sampler.step(x, rng);
        t += 1;
    }
    Trajectory { sigma, max_disp }
}

fn sample_stationary(net: &Network, set: &[usize], rng: &mut Rng) -> Result<usize> {
    let total: f64 = set.iter().map(|&v| net.vertex_conductance(v)).sum();
    if !(total > 0.0) {
        return Err(Error::input("stationary start needs positive conductance on S"));
    }
    let mut u = rng.random::<f64>() * total;
    for &v in set {
        u -= net.vertex_conductance(v);
        if u < 0.0 {
            return Ok(v);
        }
    }
    Ok(*set.iter().rev().find(|&&v| net.vertex_conductance(v) > 0.0).unwrap())
}

fn start_vertex(net: &Network, start: &Start, rng: &mut Rng) -> Result<usize> {
    match start {
        Start::Root => Ok(net.root()),
        Start::Vertex(v) => {
            net.check_vertex(*v)?;
            Ok(*v)
        }
        Start::StationaryRestricted(set) => {
            net.check_vertices(set, "S")?;
            sample_stationary(net, set, rng)
        }
    }
}

/// Simulates independent walks and records `σ_R` on `r_grid` and `𝓜_n` on
/// `n_grid`, both measured from the starting vertex.
///
/// A walker stops at the first boundary-flagged vertex; scales it had not
/// resolved by then are censored. Scales still unresolved after `n_steps`
/// are censored as well.
pub fn simulate_walks(net: &Network, cfg: &WalkConfig, r_grid: &[u64], n_grid: &[u64]) -> Result<WalkStats> {
    cfg.validate()?;
    for grid in [r_grid, n_grid] {
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::input("measurement grids must be strictly increasing"));
        }
    }
    if matches!(cfg.start, Start::StationaryRestricted(_)) {
        return Err(Error::input(
            "exit times are measured from a fixed vertex; use restricted_walk for stationary starts",
        ));
    }
    let mut probe = substream(cfg.seed, tag::WALK, 0);
    let start = start_vertex(net, &cfg.start, &mut probe)?;
    if net.vertex_conductance(start) <= 0.0 {
        return Err(Error::input(format!("start vertex {start} has zero conductance")));
    }
    let sampler = TransitionSampler::new(net);
    let dist = net.distances_from(&[start]);
    let trajectories: Vec<Trajectory> = (0..cfg.n_walkers)
        .into_par_iter()
        .map(|w| {
            let mut rng = substream(cfg.seed, tag::WALK, w as u64);
            run_walker(net, &sampler, &dist, start, r_grid, n_grid, cfg.n_steps, &mut rng)
        })
        .collect();
    let sigma = r_grid
        .iter()
        .enumerate()
        .map(|(k, &r)| ScaleSamples {
            scale: r,
            samples: trajectories.iter().map(|t| t.sigma[k]).collect(),
        })
        .collect();
    let max_disp = n_grid
        .iter()
        .enumerate()
        .map(|(k, &n)| ScaleSamples {
            scale: n,
            samples: trajectories.iter().map(|t| t.max_disp[k]).collect(),
        })
        .collect();
    Ok(WalkStats {
        start,
        n_steps: cfg.n_steps,
        n_walkers: cfg.n_walkers,
        seed: cfg.seed,
        sigma,
        max_disp,
    })
}

pub const DEFAULT_HEAT_KERNEL_CAP: usize = 200_000;

/// Exact return probabilities `p_t(ρ, ρ)` for `t ≤ 2·n_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatKernel {
    pub root: usize,
    pub n_max: usize,
    /// `p_t(ρ, ρ)` for `t = 0..=2·n_max`.
    pub return_prob: Vec<f64>,
    /// `Gr_t(ρ, ρ) = Σ_{s≤t} p_s(ρ, ρ)` for `t = 0..=2·n_max`.
    pub green: Vec<f64>,
}

impl HeatKernel {
    pub fn p_2n(&self, n: usize) -> f64 {
        self.return_prob[2 * n]
    }

    pub fn gr(&self, t: usize) -> f64 {
        self.green[t]
    }
}

/// Computes `p_t(ρ, ρ)` by pushing the point mass at `ρ` through the
/// transition operator.
///
/// Only `B(ρ, n_max)` is tracked: mass that leaves it cannot return by time
/// `2·n_max`, so it is accumulated separately and conservation is checked on
/// the sum. Requires `n_max` below the distance from `ρ` to the truncation
/// boundary.
pub fn heat_kernel_exact(net: &Network, n_max: usize, vertex_cap: usize) -> Result<HeatKernel> {
    let root = net.root();
    let all_dist = net.distances_from(&[root]);
    if let Some(b) = (0..net.vertex_count()).find(|&v| net.is_boundary(v) && all_dist[v] <= n_max) {
        return Err(Error::Contamination {
            center: root,
            radius: n_max,
            boundary_vertex: b,
        });
    }
    let ball: Vec<usize> = (0..net.vertex_count()).filter(|&v| all_dist[v] <= n_max).collect();
    if ball.len() > vertex_cap {
        return Err(Error::Resource(format!(
            "heat kernel needs {} vertices, above the cap of {vertex_cap}; use Monte-Carlo walks instead",
            ball.len()
        )));
    }
    let mut local = vec![UNREACHED; net.vertex_count()];
    for (i, &v) in ball.iter().enumerate() {
        local[v] = i;
    }
    // local CSR kernel; UNREACHED target means "left the ball"
    let mut row_ptr = vec![0];
    let mut cols = Vec::new();
    let mut probs = Vec::new();
    for &x in &ball {
        for (y, p) in transition_row(net, x) {
            cols.push(local[y]);
            probs.push(p);
        }
        row_ptr.push(cols.len());
    }
    let m = ball.len();
    let r = local[root];
    let mut cur = vec![0.0; m];
    let mut next = vec![0.0; m];
    cur[r] = 1.0;
    let mut escaped = 0.0;
    let steps = 2 * n_max;
    let mut return_prob = Vec::with_capacity(steps + 1);
    return_prob.push(1.0);
    for _ in 0..steps {
        next.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..m {
            let mass = cur[i];
            if mass == 0.0 {
                continue;
            }
            for k in row_ptr[i]..row_ptr[i + 1] {
                let j = cols[k];
                if j == UNREACHED {
                    escaped += mass * probs[k];
                } else {
                    next[j] += mass * probs[k];
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
        let total: f64 = cur.iter().sum::<f64>() + escaped;
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::numerical("heat kernel lost probability mass", (total - 1.0).abs()));
        }
        return_prob.push(cur[r]);
    }
    for n in 1..=n_max {
        let (prev, now) = (return_prob[2 * n - 2], return_prob[2 * n]);
        if now > prev * (1.0 + 1e-12) + 1e-300 {
            return Err(Error::numerical(
                format!("even return probabilities increased at 2n = {}", 2 * n),
                now - prev,
            ));
        }
    }
    let green = return_prob
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    Ok(HeatKernel {
        root,
        n_max,
        return_prob,
        green,
    })
}

/// The walk restricted to `S`: the full kernel is sampled and moves leaving
/// `S` are replaced by holding, so a restricted trajectory driven by the same
/// random stream coincides with the unrestricted one until it first tries to
/// leave `S`.
pub struct RestrictedWalk<'a> {
    net: &'a Network,
    sampler: TransitionSampler,
    in_set: Vec<bool>,
    set: Vec<usize>,
}

impl<'a> RestrictedWalk<'a> {
    pub fn new(net: &'a Network, set: &[usize]) -> Result<Self> {
        net.check_vertices(set, "S")?;
        let mut in_set = vec![false; net.vertex_count()];
        for &v in set {
            in_set[v] = true;
        }
        let mut set: Vec<usize> = set.to_vec();
        set.sort_unstable();
        set.dedup();
        let mass: f64 = set.iter().map(|&v| net.vertex_conductance(v)).sum();
        if !(mass > 0.0) {
            return Err(Error::input("c(E(S)) = 0: the restricted walk is undefined"));
        }
        Ok(RestrictedWalk {
            net,
            sampler: TransitionSampler::new(net),
            in_set,
            set,
        })
    }

    pub fn set(&self) -> &[usize] {
        &self.set
    }

    pub fn contains(&self, v: usize) -> bool {
        self.in_set[v]
    }

    /// Stationary law `π_S(x) ∝ c_x` on `S` (normalised to a probability).
    pub fn stationary(&self) -> Vec<(usize, f64)> {
        let total: f64 = self.set.iter().map(|&v| self.net.vertex_conductance(v)).sum();
        self.set
            .iter()
            .map(|&v| (v, self.net.vertex_conductance(v) / total))
            .collect()
    }

    /// Exact kernel row of the restricted chain at `x ∈ S`.
    pub fn kernel_row(&self, x: usize) -> Vec<(usize, f64)> {
        let mut hold = 0.0;
        let mut row: Vec<(usize, f64)> = Vec::new();
        for (y, p) in transition_row(self.net, x) {
            if self.in_set[y] && y != x {
                row.push((y, p));
            } else {
                hold += p;
            }
        }
        if hold > 0.0 || row.is_empty() {
            row.push((x, hold.max(if row.is_empty() { 1.0 } else { 0.0 })));
        }
        row.sort_by_key(|&(y, _)| y);
        row
    }

    #[inline]
    pub fn step(&self, x: usize, rng: &mut Rng) -> usize {
        let y = self.sampler.step(x, rng);
        if self.in_set[y] {
            y
        } else {
            x
        }
    }

    pub fn sample_start(&self, start: &Start, rng: &mut Rng) -> Result<usize> {
        let x = match start {
            Start::StationaryRestricted(_) => sample_stationary(self.net, &self.set, rng)?,
            other => start_vertex(self.net, other, rng)?,
        };
        if !self.in_set[x] {
            return Err(Error::input(format!("start vertex {x} is not in S")));
        }
        Ok(x)
    }

    /// One trajectory `Z_0..Z_n` per walker.
    pub fn trajectories(&self, cfg: &WalkConfig) -> Result<Vec<Vec<usize>>> {
        cfg.validate()?;
        (0..cfg.n_walkers)
            .into_par_iter()
            .map(|w| {
                let mut rng = substream(cfg.seed, tag::RESTRICTED, w as u64);
                let mut x = self.sample_start(&cfg.start, &mut rng)?;
                let mut path = Vec::with_capacity(cfg.n_steps as usize + 1);
                path.push(x);
                for _ in 0..cfg.n_steps {
                    x = self.step(x, &mut rng);
                    path.push(x);
                }
                Ok(path)
            })
            .collect()
    }

    /// Unrestricted and restricted trajectories from the same start and the
    /// same random stream, `n` steps each.
    pub fn coupled(&self, start: usize, n: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
        let mut rng = substream(seed, tag::RESTRICTED, u64::MAX);
        let (mut x, mut z) = (start, start);
        let mut free = vec![x];
        let mut restricted = vec![z];
        for _ in 0..n {
            let u = self.sampler.step(x, &mut rng);
            let v = if x == z { u } else { self.sampler.step(z, &mut rng) };
            x = u;
            z = if self.in_set[v] { v } else { z };
            free.push(x);
            restricted.push(z);
        }
        (free, restricted)
    }
}

/// Trajectories of the walk restricted to `S`.
pub fn restricted_walk(net: &Network, set: &[usize], cfg: &WalkConfig) -> Result<Vec<Vec<usize>>> {
    RestrictedWalk::new(net, set)?.trajectories(cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovTypeRatio {
    pub n: usize,
    pub ratio: f64,
    pub stderr: f64,
}

/// Empirical `E[max_{t≤n} dist_ω(Z₀,Z_t)²] / (n·E[dist_ω(Z₀,Z₁)²])` for the
/// stationary walk restricted to `S`. Numerator and denominator use the same
/// trajectories, so `n = 1` gives exactly 1.
pub fn markov_type_ratio(
    net: &Network,
    set: &[usize],
    metric: &EdgeWeight,
    n: usize,
    walkers: usize,
    seed: u64,
) -> Result<MarkovTypeRatio> {
    net.check_weight(metric)?;
    if n < 1 || walkers < 2 {
        return Err(Error::input("markov type ratio needs n ≥ 1 and at least 2 walkers"));
    }
    if metric.values.iter().all(|&w| w == 0.0) {
        return Err(Error::input("metric is identically zero"));
    }
    let walk = RestrictedWalk::new(net, set)?;
    let cfg = WalkConfig {
        n_steps: n as u64,
        n_walkers: walkers,
        seed: crate::rng::derive_seed(seed, tag::MARKOV_TYPE),
        start: Start::StationaryRestricted(set.to_vec()),
    };
    let paths = walk.trajectories(&cfg)?;
    // one Dijkstra per distinct start
    let mut starts: Vec<usize> = paths.iter().map(|p| p[0]).collect();
    starts.sort_unstable();
    starts.dedup();
    let tables: Vec<Vec<f64>> = starts
        .par_iter()
        .map(|&s| net.weighted_distances_from(metric, &[s]))
        .collect::<Result<_>>()?;
    let (mut num, mut den) = (Vec::with_capacity(walkers), Vec::with_capacity(walkers));
    for p in &paths {
        let d = &tables[starts.binary_search(&p[0]).unwrap()];
        let first = d[p[1]] * d[p[1]];
        let max = p.iter().map(|&z| d[z] * d[z]).fold(0.0, f64::max);
        num.push(max);
        den.push(first);
    }
    let (mn, _) = mean_stderr(&num);
    let (md, _) = mean_stderr(&den);
    if !(md > 0.0) {
        return Err(Error::input("E[dist(Z₀,Z₁)²] = 0 for this metric and set"));
    }
    let ratio = mn / (n as f64 * md);
    // delta method on the ratio of means
    let resid: Vec<f64> = num
        .iter()
        .zip(&den)
        .map(|(a, b)| a - ratio * n as f64 * b)
        .collect();
    let (_, se) = mean_stderr(&resid);
    Ok(MarkovTypeRatio {
        n,
        ratio,
        stderr: se / (n as f64 * md),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_gasket, gen_lattice, gen_path};
    use crate::network::Edge;

    #[test]
    fn kernel_rows_sum_to_one() {
        let net = Network::new(
            3,
            vec![Edge::new(0, 1, 1.0), Edge::new(0, 1, 2.0), Edge::new(1, 2, 0.5), Edge::new(1, 1, 0.5), Edge::new(2, 0, 0.0)],
            0,
            &[],
        )
        .unwrap();
        for x in 0..3 {
            let s: f64 = transition_row(&net, x).iter().map(|p| p.1).sum();
            assert!((s - 1.0).abs() < 1e-15);
        }
        assert_eq!(transition_row(&net, 0), vec![(1, 1.0)]);
    }

    #[test]
    fn alias_sampler_matches_kernel() {
        let net = Network::new(
            4,
            vec![Edge::new(0, 1, 1.0), Edge::new(0, 2, 2.0), Edge::new(0, 3, 5.0), Edge::new(0, 0, 2.0)],
            0,
            &[],
        )
        .unwrap();
        let sampler = TransitionSampler::new(&net);
        let mut rng = substream(1, tag::WALK, 0);
        let mut counts = [0usize; 4];
        let trials = 200_000;
        for _ in 0..trials {
            counts[sampler.step(0, &mut rng)] += 1;
        }
        for (v, want) in [(0, 0.2), (1, 0.1), (2, 0.2), (3, 0.5)] {
            let f = counts[v] as f64 / trials as f64;
            let sd = (want * (1.0 - want) / trials as f64).sqrt();
            assert!((f - want).abs() < 4.0 * sd, "{v}: {f} vs {want}");
        }
    }

    #[test]
    fn unit_network_first_step_displacement_is_one() {
        let net = gen_lattice(2, 4).unwrap();
        let stats = simulate_walks(&net, &WalkConfig::new(1, 200, 3), &[], &[1]).unwrap();
        assert!(stats.max_disp[0].resolved().all(|m| m == 1));
    }

    #[test]
    fn censoring_marks_boundary_hits() {
        let net = gen_path(3).unwrap();
        let stats = simulate_walks(&net, &WalkConfig::new(10_000, 500, 9), &[1, 2, 4], &[]).unwrap();
        // radius 4 lies beyond the boundary at distance 3
        assert_eq!(stats.sigma[2].count_resolved(), 0);
        assert_eq!(stats.sigma[1].count_censored(), 0);
        assert_eq!(stats.elementary_violations(), 0);
    }

    #[test]
    fn walks_are_deterministic() {
        let net = gen_gasket(4).unwrap();
        let cfg = WalkConfig::new(5000, 64, 5);
        let a = simulate_walks(&net, &cfg, &[2, 4], &[4, 8]).unwrap();
        let b = simulate_walks(&net, &cfg, &[2, 4], &[4, 8]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn heat_kernel_on_z() {
        let net = gen_path(40).unwrap();
        let hk = heat_kernel_exact(&net, 30, DEFAULT_HEAT_KERNEL_CAP).unwrap();
        assert!((hk.p_2n(1) - 0.5).abs() < 1e-15);
        assert!((hk.p_2n(2) - 0.375).abs() < 1e-15);
        assert_eq!(hk.return_prob[1], 0.0);
        assert!(heat_kernel_exact(&net, 40, DEFAULT_HEAT_KERNEL_CAP).is_err());
        assert!(matches!(heat_kernel_exact(&net, 10, 5), Err(Error::Resource(_))));
    }

    #[test]
    fn restricted_single_vertex_stays() {
        let net = gen_path(3).unwrap();
        let mut cfg = WalkConfig::new(50, 3, 1);
        cfg.start = Start::Vertex(3);
        let paths = restricted_walk(&net, &[3], &cfg).unwrap();
        assert!(paths.iter().all(|p| p.iter().all(|&v| v == 3)));
    }

    #[test]
    fn restricted_kernel_rows() {
        let net = gen_path(3).unwrap();
        let walk = RestrictedWalk::new(&net, &[2, 3]).unwrap();
        assert_eq!(walk.kernel_row(2), vec![(2, 0.5), (3, 0.5)]);
        let pi = walk.stationary();
        assert!((pi.iter().map(|p| p.1).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coupling_agrees_until_exit() {
        let net = gen_lattice(2, 6).unwrap();
        let set = net.graph_ball(net.root(), 3).unwrap();
        let walk = RestrictedWalk::new(&net, &set).unwrap();
        for seed in 0..20 {
            let (free, restricted) = walk.coupled(net.root(), 200, seed);
            let exit = free.iter().position(|&v| !walk.contains(v)).unwrap_or(free.len());
            assert_eq!(&free[..exit], &restricted[..exit]);
        }
    }

    #[test]
    fn markov_type_ratio_at_one_step_is_one() {
        let net = gen_path(20).unwrap();
        let set = net.graph_ball(net.root(), 10).unwrap();
        let r = markov_type_ratio(&net, &set, &EdgeWeight::constant(&net, 1.0), 1, 500, 2).unwrap();
        assert_eq!(r.ratio, 1.0);
        assert!(markov_type_ratio(&net, &set, &EdgeWeight::zeros(&net), 4, 500, 2).is_err());
    }
}
