//! Randomized constructions: approximate nets, controlled-geometry
//! classification, stretching weights and exponential-clock partitions.
//!
//! Real radii such as `R^{1+ε}` are turned into graph radii by flooring.

use rand::Rng as _;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{BallSearch, EdgeWeight, Network, UNREACHED};
use crate::resistance::{annular_modulus_with, SolveOptions};
use crate::rng::{substream, tag};

fn floor_radius(x: f64) -> usize {
    (x + 1e-9).floor().max(0.0) as usize
}

/// `R^{1+ε}`.
pub fn outer_scale(r: usize, epsilon: f64) -> f64 {
    (r as f64).powf(1.0 + epsilon)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::input(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Approximate nets

/// Edge-selection probabilities of the approximate net `U_{R,R'}(λ)`.
#[derive(Clone, Debug)]
pub struct NetSampler {
    pub scale: usize,
    pub epsilon: f64,
    /// `R' = 5 R^{1+ε}`.
    pub r_prime: f64,
    /// `γ_{R,R'}(e)`; NaN for edges outside the evaluated region.
    gamma: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetSample {
    pub scale: usize,
    pub r_prime: f64,
    pub lambda: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub marked: Vec<bool>,
    /// `U_{R,R'}(λ)`: endpoints of marked edges, sorted.
    pub selected: Vec<usize>,
}

impl NetSampler {
    /// Evaluates `γ_{R,R'}` on every edge.
    pub fn new(net: &Network, scale: usize, epsilon: f64) -> Result<Self> {
        Self::build(net, scale, epsilon, None)
    }

    /// Evaluates `γ_{R,R'}` only on edges with an endpoint in
    /// `B(center, radius)`; other edges are never marked.
    pub fn within(net: &Network, scale: usize, epsilon: f64, center: usize, radius: usize) -> Result<Self> {
        net.check_vertex(center)?;
        Self::build(net, scale, epsilon, Some((center, radius)))
    }

    fn build(net: &Network, scale: usize, epsilon: f64, region: Option<(usize, usize)>) -> Result<Self> {
        check_epsilon(epsilon)?;
        if scale < 2 {
            return Err(Error::input(format!("net scale R must be at least 2, got {scale}")));
        }
        let n = net.vertex_count();
        let r_prime = 5.0 * outer_scale(scale, epsilon);
        let reach = floor_radius(2.0 * r_prime);
        let in_region: Vec<bool> = match region {
            None => vec![true; n],
            Some((c, rad)) => net.distances_from(&[c]).into_iter().map(|d| d <= rad).collect(),
        };
        let mut search = BallSearch::new(n);
        // vol(y, R), computed on demand
        let mut vol = vec![f64::NAN; n];
        let mut best = vec![f64::NAN; n];
        let mut ball = Vec::new();
        for x in 0..n {
            if !in_region[x] {
                continue;
            }
            ball.clear();
            ball.extend(search.ball(net, x, reach).iter().map(|&(v, _)| v));
            let mut m: f64 = 0.0;
            for &y in &ball {
                if vol[y].is_nan() {
                    vol[y] = search.volume(net, y, scale);
                }
                m = m.max(vol[y]);
            }
            best[x] = m;
        }
        let gamma = net
            .edges()
            .iter()
            .map(|e| match (in_region[e.u], in_region[e.v]) {
                (false, false) => f64::NAN,
                _ => {
                    // an endpoint outside the region still needs its own maximum
                    let mu = if best[e.u].is_nan() { max_vol_near(net, &mut search, e.u, reach, scale) } else { best[e.u] };
                    let mv = if best[e.v].is_nan() { max_vol_near(net, &mut search, e.v, reach, scale) } else { best[e.v] };
                    mu.max(mv)
                }
            })
            .collect();
        Ok(NetSampler {
            scale,
            epsilon,
            r_prime,
            gamma,
        })
    }

    pub fn gamma(&self, edge: usize) -> f64 {
        self.gamma[edge]
    }

    /// `Pr[u_e = 1] = min(1, λ c(e)/γ(e))`.
    pub fn probability(&self, net: &Network, edge: usize, lambda: f64) -> f64 {
        let g = self.gamma[edge];
        if g.is_nan() || g <= 0.0 {
            return 0.0;
        }
        (lambda * net.edge(edge).conductance / g).min(1.0)
    }

    pub fn sample(&self, net: &Network, lambda: f64, seed: u64) -> Result<NetSample> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::input(format!("lambda must be finite and nonnegative, got {lambda}")));
        }
        let mut rng = substream(seed, tag::NET_SAMPLE, self.scale as u64);
        let mut marked = Vec::with_capacity(net.edge_count());
        let mut hit = vec![false; net.vertex_count()];
        for (id, e) in net.edges().iter().enumerate() {
            // one uniform per edge regardless of region keeps marks region-independent
            let u: f64 = rng.random();
            let on = u < self.probability(net, id, lambda);
            if on {
                hit[e.u] = true;
                hit[e.v] = true;
            }
            marked.push(on);
        }
        Ok(NetSample {
            scale: self.scale,
            r_prime: self.r_prime,
            lambda,
            epsilon: self.epsilon,
            seed,
            marked,
            selected: (0..net.vertex_count()).filter(|&v| hit[v]).collect(),
        })
    }

    /// Exact `Pr[x ∈ U]`.
    pub fn inclusion_probability(&self, net: &Network, x: usize, lambda: f64) -> f64 {
        let miss: f64 = net
            .neighbors(x)
            .iter()
            .map(|&(_, id)| 1.0 - self.probability(net, id, lambda))
            .product();
        1.0 - miss
    }

    /// `λ c_x / max{vol(y, R) : y ∈ B(x, R')}`.
    pub fn inclusion_bound(&self, net: &Network, x: usize, lambda: f64) -> Result<f64> {
        let mut search = BallSearch::new(net.vertex_count());
        let m = max_vol_near(net, &mut search, x, floor_radius(self.r_prime), self.scale);
        Ok(lambda * net.vertex_conductance(x) / m)
    }

    /// Exact `Pr[d(x, U) > r] = Π_{e ∈ E(B(x,r))} (1 − p_e)`.
    pub fn miss_probability(&self, net: &Network, x: usize, r: usize, lambda: f64) -> f64 {
        let ball = net.graph_ball(x, r).unwrap_or_default();
        let mut seen = vec![false; net.edge_count()];
        let mut prod = 1.0;
        for v in ball {
            for &(_, id) in net.neighbors(v) {
                if !seen[id] {
                    seen[id] = true;
                    prod *= (1.0 - self.probability(net, id, lambda)).max(0.0);
                }
            }
        }
        prod
    }

    /// `exp(−λ vol(x, r)/vol(x, 3R'))`.
    pub fn miss_bound(&self, net: &Network, x: usize, r: usize, lambda: f64) -> Result<f64> {
        let far = floor_radius(3.0 * self.r_prime);
        Ok((-lambda * net.volume(x, r)? / net.volume(x, far)?).exp())
    }
}

fn max_vol_near(net: &Network, search: &mut BallSearch, x: usize, reach: usize, scale: usize) -> f64 {
    let ball: Vec<usize> = search.ball(net, x, reach).iter().map(|&(v, _)| v).collect();
    ball.into_iter().map(|y| search.volume(net, y, scale)).fold(0.0, f64::max)
}

/// Samples `U_{R,R'}(λ)` with `R' = 5R^{1+ε}`; fails if the truncation
/// boundary lies within `3R'` of the root.
pub fn sample_net(net: &Network, scale: usize, epsilon: f64, lambda: f64, seed: u64) -> Result<NetSample> {
    let sampler = NetSampler::new(net, scale, epsilon)?;
    net.ensure_interior(net.root(), floor_radius(3.0 * sampler.r_prime))?;
    sampler.sample(net, lambda, seed)
}

// ---------------------------------------------------------------------------
// Controlled geometry

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    In,
    Out,
    /// The required balls reach the truncation boundary.
    Unknown,
}

impl Membership {
    pub fn holds(self) -> bool {
        self == Membership::In
    }
}

/// Evaluated terms of the two inequalities defining `𝒮(ε, R)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SCheck {
    pub status: Membership,
    /// `(1 + vol(x,5a))/vol(x,R)² · M(x,2R,a)`, if evaluated.
    pub modulus_term: Option<f64>,
    /// `R^{−d*+2ε}`.
    pub modulus_bound: f64,
    /// `vol(x,R−1)/vol(x,15a)`, if evaluated.
    pub volume_ratio: Option<f64>,
    /// `d* R^{−2ε} log R`.
    pub volume_bound: f64,
}

/// Evaluated terms of the inequality defining `𝒮′(ε, R)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SPrimeCheck {
    pub status: Membership,
    /// `(1 + vol(z,4a))/(max_{y∈B(z,R)} vol(y,R))² · M(z,R,2a)`.
    pub modulus_term: Option<f64>,
    pub modulus_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryClass {
    pub vertex: usize,
    pub epsilon: f64,
    pub scale: usize,
    pub d_star: f64,
    pub s: SCheck,
    pub s_prime: SPrimeCheck,
}

/// Reusable evaluator of `𝒮` and `𝒮′` membership at one scale.
pub struct GeometryProbe<'a> {
    net: &'a Network,
    epsilon: f64,
    scale: usize,
    d_star: f64,
    a: f64,
    opts: SolveOptions,
    search: BallSearch,
}

impl<'a> GeometryProbe<'a> {
    pub fn new(net: &'a Network, epsilon: f64, scale: usize, d_star: f64, opts: SolveOptions) -> Result<Self> {
        check_epsilon(epsilon)?;
        if scale < 2 {
            return Err(Error::input(format!("scale R must be at least 2, got {scale}")));
        }
        if !d_star.is_finite() {
            return Err(Error::input("d_star must be finite"));
        }
        Ok(GeometryProbe {
            net,
            epsilon,
            scale,
            d_star,
            a: outer_scale(scale, epsilon),
            opts,
            search: BallSearch::new(net.vertex_count()),
        })
    }

    fn bound(&self) -> f64 {
        (self.scale as f64).powf(-self.d_star + 2.0 * self.epsilon)
    }

    /// Membership of `(G, x)` in `𝒮(ε, R)`; cheap volume test first.
    pub fn s(&mut self, x: usize) -> Result<SCheck> {
        let r = self.scale;
        let a = self.a;
        let mut out = SCheck {
            status: Membership::Unknown,
            modulus_term: None,
            modulus_bound: self.bound(),
            volume_ratio: None,
            volume_bound: self.d_star * (r as f64).powf(-2.0 * self.epsilon) * (r as f64).ln(),
        };
        let far = floor_radius(15.0 * a);
        if self.search.boundary_within(self.net, x, far).is_some() {
            return Ok(out);
        }
        let ratio = self.search.volume(self.net, x, r - 1) / self.search.volume(self.net, x, far);
        out.volume_ratio = Some(ratio);
        if !(ratio >= out.volume_bound) {
            out.status = Membership::Out;
            return Ok(out);
        }
        let outer = floor_radius(a);
        let m = if 2 * r >= outer {
            f64::INFINITY
        } else {
            annular_modulus_with(self.net, x, 2 * r, outer, &self.opts, &mut self.search)?.value
        };
        let v5 = self.search.volume(self.net, x, floor_radius(5.0 * a));
        let vr = self.search.volume(self.net, x, r);
        let term = (1.0 + v5) / (vr * vr) * m;
        out.modulus_term = Some(term);
        out.status = if term <= out.modulus_bound {
            Membership::In
        } else {
            Membership::Out
        };
        Ok(out)
    }

    /// Membership of `z` in `𝒮′(ε, R)`, plus the extremal weight of
    /// `M(z, R, 2a)` when `z` is a member.
    pub fn s_prime(&mut self, z: usize) -> Result<(SPrimeCheck, Option<EdgeWeight>)> {
        let r = self.scale;
        let a = self.a;
        let outer = floor_radius(2.0 * a);
        let mut out = SPrimeCheck {
            status: Membership::Unknown,
            modulus_term: None,
            modulus_bound: self.bound(),
        };
        let need = floor_radius(4.0 * a).max(2 * r).max(outer + 1);
        if self.search.boundary_within(self.net, z, need).is_some() {
            return Ok((out, None));
        }
        if r >= outer {
            out.modulus_term = Some(f64::INFINITY);
            out.status = Membership::Out;
            return Ok((out, None));
        }
        let v4 = self.search.volume(self.net, z, floor_radius(4.0 * a));
        let near: Vec<usize> = self.search.ball(self.net, z, r).iter().map(|&(v, _)| v).collect();
        let vmax = near
            .into_iter()
            .map(|y| self.search.volume(self.net, y, r))
            .fold(0.0, f64::max);
        let m = annular_modulus_with(self.net, z, r, outer, &self.opts, &mut self.search)?;
        let term = (1.0 + v4) / (vmax * vmax) * m.value;
        out.modulus_term = Some(term);
        if term <= out.modulus_bound {
            out.status = Membership::In;
            Ok((out, Some(m.extremal)))
        } else {
            out.status = Membership::Out;
            Ok((out, None))
        }
    }
}

/// Evaluates both `𝒮(ε,R)` and `𝒮′(ε,R)` at `x`.
///
/// Fails with a contamination error when the balls involved reach the
/// truncation boundary.
pub fn classify_geometry(net: &Network, x: usize, epsilon: f64, scale: usize, d_star: f64) -> Result<GeometryClass> {
    net.check_vertex(x)?;
    let mut probe = GeometryProbe::new(net, epsilon, scale, d_star, SolveOptions::default())?;
    let s = probe.s(x)?;
    let (s_prime, _) = probe.s_prime(x)?;
    if s.status == Membership::Unknown || s_prime.status == Membership::Unknown {
        let radius = floor_radius(15.0 * outer_scale(scale, epsilon));
        let boundary_vertex = net
            .graph_ball(x, radius)?
            .into_iter()
            .find(|&v| net.is_boundary(v))
            .unwrap_or(x);
        return Err(Error::Contamination {
            center: x,
            radius,
            boundary_vertex,
        });
    }
    Ok(GeometryClass {
        vertex: x,
        epsilon,
        scale,
        d_star,
        s,
        s_prime,
    })
}

// ---------------------------------------------------------------------------
// Stretching weights

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[derive(Default)]
pub struct ScaleWeightOptions {
    /// Defaults to `R^{2ε}`.
    pub lambda: Option<f64>,
    /// Only evaluate the weight on edges inside `B(ρ, radius)`.
    pub radius: Option<usize>,
    pub solve: SolveOptions,
}


#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleWeight {
    pub scale: usize,
    pub epsilon: f64,
    pub d_star: f64,
    pub lambda: f64,
    pub weight: EdgeWeight,
    pub selected: Vec<usize>,
    /// Selected centres that passed the `𝒮′` gate.
    pub gated_centers: Vec<usize>,
    pub root_in_s: Membership,
    /// `min{dist_ω(ρ, x) : d(ρ, x) ≥ 3R^{1+ε}}`, evaluated when the root is in `𝒮`.
    pub separation: Option<f64>,
    pub radius: Option<usize>,
}

/// Smallest evaluation radius around the root for which the separation
/// argument only uses evaluated edges.
pub fn min_weight_radius(scale: usize, epsilon: f64) -> usize {
    scale + floor_radius(2.0 * outer_scale(scale, epsilon)) + 2
}

/// The scale-`R` weight `ω_R = ω̂ + ω̃`.
///
/// Post-condition: if the root is in `𝒮(ε,R)` then `dist_ω(ρ,x) ≥ 1` for
/// every `x` with `d(ρ,x) ≥ 3R^{1+ε}`.
pub fn build_scale_weight(
    net: &Network,
    scale: usize,
    epsilon: f64,
    d_star: f64,
    opts: &ScaleWeightOptions,
    seed: u64,
) -> Result<ScaleWeight> {
    check_epsilon(epsilon)?;
    let a = outer_scale(scale, epsilon);
    let lambda = opts.lambda.unwrap_or_else(|| (scale as f64).powf(2.0 * epsilon));
    let root = net.root();
    let n = net.vertex_count();
    let root_dist = net.distances_from(&[root]);
    let outer = floor_radius(2.0 * a);
    if let Some(rad) = opts.radius {
        let need = min_weight_radius(scale, epsilon);
        if rad < need {
            return Err(Error::input(format!(
                "weight radius {rad} is below the minimum {need} for R = {scale}"
            )));
        }
    }
    let active = |v: usize| opts.radius.is_none_or(|rad| root_dist[v] <= rad);

    // centres that can influence the region, and vertices whose coverage matters
    let sampler = match opts.radius {
        None => NetSampler::new(net, scale, epsilon)?,
        Some(rad) => NetSampler::within(net, scale, epsilon, root, rad + outer + scale + 2)?,
    };
    let sample = sampler.sample(net, lambda, seed)?;

    let mut probe = GeometryProbe::new(net, epsilon, scale, d_star, opts.solve)?;
    let mut hat = vec![0.0; net.edge_count()];
    let mut gated = Vec::new();
    for &z in &sample.selected {
        if let Some(rad) = opts.radius {
            if root_dist[z] > rad + outer + 1 {
                continue;
            }
        }
        let (check, extremal) = probe.s_prime(z)?;
        if check.status == Membership::In {
            let w = extremal.expect("member centres carry their extremal weight");
            for (h, x) in hat.iter_mut().zip(&w.values) {
                *h += x;
            }
            gated.push(z);
        }
    }

    let to_u = if sample.selected.is_empty() {
        vec![UNREACHED; n]
    } else {
        net.distances_from(&sample.selected)
    };
    let mut s_cache: Vec<Option<Membership>> = vec![None; n];
    let mut member = |v: usize, probe: &mut GeometryProbe| -> Result<bool> {
        if s_cache[v].is_none() {
            s_cache[v] = Some(probe.s(v)?.status);
        }
        Ok(s_cache[v] == Some(Membership::In))
    };
    let mut values = vec![0.0; net.edge_count()];
    for (id, e) in net.edges().iter().enumerate() {
        if !(active(e.u) && active(e.v)) {
            continue;
        }
        let uncovered = to_u[e.u] > scale || to_u[e.v] > scale;
        let tilde = if uncovered && (member(e.u, &mut probe)? || member(e.v, &mut probe)?) {
            1.0
        } else {
            0.0
        };
        values[id] = hat[id] + tilde;
    }
    let root_in_s = match s_cache[root] {
        Some(m) => m,
        None => probe.s(root)?.status,
    };
    let weight = EdgeWeight { values };

    let mut separation = None;
    if root_in_s == Membership::In {
        let far = (3.0 * a - 1e-9).ceil() as usize;
        let dist = net.weighted_distances_from(&weight, &[root])?;
        let min = (0..n)
            .filter(|&x| root_dist[x] != UNREACHED && root_dist[x] >= far)
            .map(|x| dist[x])
            .fold(f64::INFINITY, f64::min);
        if min < 1.0 - 1e-9 {
            return Err(Error::numerical(
                format!("scale weight separation violated at R = {scale}: dist = {min}"),
                min,
            ));
        }
        separation = Some(min);
    }
    Ok(ScaleWeight {
        scale,
        epsilon,
        d_star,
        lambda,
        weight,
        selected: sample.selected,
        gated_centers: gated,
        root_in_s,
        separation,
        radius: opts.radius,
    })
}

/// `E[ω(X₀,X₁)² | X₀ = ρ] = Σ_{e∋ρ} c(e)/c_ρ · ω(e)²`.
pub fn root_second_moment(net: &Network, weight: &EdgeWeight) -> f64 {
    let root = net.root();
    let c = net.vertex_conductance(root);
    net.neighbors(root)
        .iter()
        .map(|&(_, id)| net.edge(id).conductance / c * weight.values[id] * weight.values[id])
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleSummary {
    pub k: u32,
    pub scale: usize,
    pub coefficient: f64,
    pub lambda: f64,
    pub selected: usize,
    pub gated_centers: usize,
    pub root_in_s: Membership,
    pub separation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiscaleWeight {
    pub epsilon: f64,
    pub d_star: f64,
    pub k_max: u32,
    pub weight: EdgeWeight,
    pub scales: Vec<ScaleSummary>,
    /// `(R, dist_ω(ρ, B̄(ρ, R)))` on dyadic `R`.
    pub profile: Vec<(usize, f64)>,
}

/// `ω = (Σ_{k ≤ k_max} 2^{k(d*−4ε)}/k² · ω_{2^k}²)^{1/2}`.
///
/// Post-condition, for every scale whose root gate held: `dist_ω(ρ,x) ≥
/// k⁻¹ 2^{k(d*−4ε)/2}` whenever `d(ρ,x) ≥ 3·2^{k(1+ε)}`.
pub fn build_multiscale_weight(
    net: &Network,
    epsilon: f64,
    d_star: f64,
    k_max: u32,
    seed: u64,
    opts: &ScaleWeightOptions,
) -> Result<MultiscaleWeight> {
    check_epsilon(epsilon)?;
    if k_max < 1 {
        return Err(Error::input("k_max must be at least 1"));
    }
    let root = net.root();
    let top = outer_scale(1 << k_max, epsilon);
    net.ensure_interior(root, (3.0 * top).ceil() as usize)?;
    let mut sq = vec![0.0; net.edge_count()];
    let mut scales = Vec::new();
    for k in 1..=k_max {
        let scale = 1usize << k;
        let coefficient = 2f64.powf(k as f64 * (d_star - 4.0 * epsilon)) / (k * k) as f64;
        let scale_opts = ScaleWeightOptions {
            radius: opts.radius.map(|r| r.max(min_weight_radius(scale, epsilon))),
            ..opts.clone()
        };
        let w = build_scale_weight(net, scale, epsilon, d_star, &scale_opts, crate::rng::derive_seed(seed, tag::SCALE ^ k as u64))?;
        for (s, x) in sq.iter_mut().zip(&w.weight.values) {
            *s += coefficient * x * x;
        }
        scales.push(ScaleSummary {
            k,
            scale,
            coefficient,
            lambda: w.lambda,
            selected: w.selected.len(),
            gated_centers: w.gated_centers.len(),
            root_in_s: w.root_in_s,
            separation: w.separation,
        });
    }
    let weight = EdgeWeight {
        values: sq.into_iter().map(f64::sqrt).collect(),
    };
    let dist = net.weighted_distances_from(&weight, &[root])?;
    let hops = net.distances_from(&[root]);
    for s in &scales {
        if s.root_in_s != Membership::In {
            continue;
        }
        let far = (3.0 * outer_scale(s.scale, epsilon) - 1e-9).ceil() as usize;
        let floor = s.coefficient.sqrt();
        let min = (0..net.vertex_count())
            .filter(|&x| hops[x] != UNREACHED && hops[x] >= far)
            .map(|x| dist[x])
            .fold(f64::INFINITY, f64::min);
        if min < floor * (1.0 - 1e-9) {
            return Err(Error::numerical(
                format!("multiscale separation violated at k = {}: {min} < {floor}", s.k),
                min,
            ));
        }
    }
    let ecc = hops.iter().filter(|&&d| d != UNREACHED).max().copied().unwrap_or(0);
    let mut profile = Vec::new();
    let mut r = 1;
    while r < ecc {
        let d = (0..net.vertex_count())
            .filter(|&x| hops[x] != UNREACHED && hops[x] > r)
            .map(|x| dist[x])
            .fold(f64::INFINITY, f64::min);
        profile.push((r, d));
        r *= 2;
    }
    Ok(MultiscaleWeight {
        epsilon,
        d_star,
        k_max,
        weight,
        scales,
        profile,
    })
}

// ---------------------------------------------------------------------------
// Exponential-clock partitions

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub delta: f64,
    /// The uniform radius drawn from `[Δ/4, Δ/2)`.
    pub radius: f64,
    /// `ℓ(x)`: the vertex of `B(x, R)` with the smallest clock.
    pub labels: Vec<usize>,
    /// `ξ_Δ(e) = 1{ℓ(x) = ℓ(y)}`.
    pub kept: Vec<bool>,
    /// Connected component id of each vertex in the kept-edge subgraph.
    pub cluster: Vec<usize>,
}

impl Partition {
    pub fn cluster_of(&self, v: usize) -> Vec<usize> {
        let id = self.cluster[v];
        (0..self.cluster.len()).filter(|&x| self.cluster[x] == id).collect()
    }

    pub fn cluster_count(&self) -> usize {
        self.cluster.iter().max().map_or(0, |m| m + 1)
    }

    /// Largest `d^G` diameter over all clusters.
    pub fn max_cluster_diameter(&self, net: &Network) -> usize {
        let mut search = BallSearch::new(net.vertex_count());
        let mut worst = 0;
        for x in 0..net.vertex_count() {
            let id = self.cluster[x];
            for &(y, d) in search.ball(net, x, UNREACHED - 1) {
                if self.cluster[y] == id {
                    worst = worst.max(d);
                }
            }
        }
        worst
    }

    /// Whether `B(center, r) ⊆ K(center)`.
    pub fn captures(&self, net: &Network, center: usize, r: usize) -> bool {
        let id = self.cluster[center];
        net.graph_ball(center, r)
            .map(|b| b.into_iter().all(|v| self.cluster[v] == id))
            .unwrap_or(false)
    }
}

fn patched_rates(net: &Network, mu: &[f64]) -> Result<Vec<f64>> {
    if mu.len() != net.vertex_count() {
        return Err(Error::input(format!(
            "μ has {} entries for {} vertices",
            mu.len(),
            net.vertex_count()
        )));
    }
    mu.iter()
        .enumerate()
        .map(|(i, &m)| {
            if !m.is_finite() || m < 0.0 {
                Err(Error::input(format!("μ({i}) = {m} is not a valid rate")))
            } else if m == 0.0 {
                Ok(1.0)
            } else {
                Ok(m)
            }
        })
        .collect()
}

/// Exponential-clock partition with diameter parameter `Δ` and rates `μ`
/// (zero rates are replaced by 1).
pub fn exp_clock_partition(net: &Network, delta: f64, mu: &[f64], seed: u64) -> Result<Partition> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::input(format!("Δ must be positive and finite, got {delta}")));
    }
    let rates = patched_rates(net, mu)?;
    let n = net.vertex_count();
    let mut rng = substream(seed, tag::PARTITION, 0);
    let radius = delta / 4.0 + rng.random::<f64>() * (delta / 4.0);
    let clocks: Vec<f64> = rates
        .iter()
        .map(|&m| {
            let e: f64 = rng.sample(Exp1);
            e / m
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| clocks[x].total_cmp(&clocks[y]).then(x.cmp(&y)));
    // claiming balls in clock order gives each vertex the argmin over B(x, R)
    let ball_radius = radius.floor() as usize;
    let mut labels = vec![UNREACHED; n];
    let mut remaining = n;
    let mut search = BallSearch::new(n);
    for &v in &order {
        if remaining == 0 {
            break;
        }
        for &(y, _) in search.ball(net, v, ball_radius) {
            if labels[y] == UNREACHED {
                labels[y] = v;
                remaining -= 1;
            }
        }
    }
    let kept: Vec<bool> = net.edges().iter().map(|e| labels[e.u] == labels[e.v]).collect();
    let mut cluster = vec![UNREACHED; n];
    let mut next = 0;
    for s in 0..n {
        if cluster[s] != UNREACHED {
            continue;
        }
        cluster[s] = next;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &(y, id) in net.neighbors(x) {
                if kept[id] && cluster[y] == UNREACHED {
                    cluster[y] = next;
                    stack.push(y);
                }
            }
        }
        next += 1;
    }
    Ok(Partition {
        delta,
        radius,
        labels,
        kept,
        cluster,
    })
}

/// `(16r/Δ)(1 + log(μ(B(ρ, 5Δ/8))/μ(B(ρ, Δ/8))))`.
pub fn capture_bound(net: &Network, center: usize, r: usize, delta: f64, mu: &[f64]) -> Result<f64> {
    let rates = patched_rates(net, mu)?;
    let mass = |radius: f64| -> Result<f64> {
        Ok(net
            .graph_ball(center, floor_radius(radius))?
            .into_iter()
            .map(|v| rates[v])
            .sum())
    };
    let ratio = mass(5.0 * delta / 8.0)? / mass(delta / 8.0)?;
    Ok(16.0 * r as f64 / delta * (1.0 + ratio.ln()))
}

/// How often each index holds the smallest of independent exponential
/// clocks with the given rates, over `draws` races.
pub fn exp_race_counts(mu: &[f64], draws: usize, seed: u64) -> Result<Vec<u64>> {
    if mu.is_empty() || mu.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
        return Err(Error::input("rates must be positive and finite"));
    }
    let mut rng = substream(seed, tag::PARTITION, 1);
    let mut counts = vec![0u64; mu.len()];
    for _ in 0..draws {
        let mut best = (f64::INFINITY, 0);
        for (i, &m) in mu.iter().enumerate() {
            let e: f64 = rng.sample(Exp1);
            let b = e / m;
            if b < best.0 {
                best = (b, i);
            }
        }
        counts[best.1] += 1;
    }
    Ok(counts)
}
