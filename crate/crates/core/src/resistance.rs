//! Electrical-network engine.
//!
//! Harmonic potentials (Dirichlet principle), effective resistance, discrete
//! modulus with its extremal weight, annular modulus, Green kernels and
//! hitting probabilities. Everything reduces to one sparse SPD solve on the
//! reduced Laplacian of the positive-conductance subgraph.
//!
//! Two numerically distinct routes are kept for the resistance/modulus pair:
//! `effective_resistance` is the reciprocal of the Dirichlet energy of the
//! potential, while `Modulus::value` is the total current entering the one-set.
//! They agree exactly only for an exact harmonic function, so their product is
//! a real check on the solve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pcg, CsrMatrix};
use crate::network::{BallSearch, EdgeWeight, Network, UNREACHED};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Relative residual target of the iterative solve.
    pub tol: f64,
    /// Iteration cap as a multiple of the number of unknowns.
    pub max_iter_factor: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iter_factor: 20,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolveOptions {
            tol,
            ..Default::default()
        }
    }
}

/// Harmonic extension with boundary values 0 on `zero_set` and 1 on `one_set`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Potential {
    pub values: Vec<f64>,
    pub zero_set: Vec<usize>,
    pub one_set: Vec<usize>,
    /// Dirichlet energy `Σ_e c(e)|∇g(e)|²`.
    pub energy: f64,
    /// Net current entering the one-set.
    pub current: f64,
    /// Vertices in positive-conductance components that touch neither set.
    /// They carry the value 0 and are not part of the solve.
    pub excluded: Vec<usize>,
    pub residual: f64,
    pub iterations: usize,
}

impl Potential {
    /// Recomputes `𝓔(g)` from the stored values.
    pub fn recompute_energy(&self, net: &Network) -> f64 {
        dirichlet_energy(net, &self.values)
    }

    /// Largest normalised harmonicity defect `|Σ_v c(u,v)(g(v) − g(u))| / c_u`
    /// over vertices outside both sets.
    pub fn harmonic_defect(&self, net: &Network) -> f64 {
        let mut fixed = vec![false; net.vertex_count()];
        for &v in self.zero_set.iter().chain(&self.one_set).chain(&self.excluded) {
            fixed[v] = true;
        }
        (0..net.vertex_count())
            .filter(|&u| !fixed[u] && net.vertex_conductance(u) > 0.0)
            .map(|u| {
                let flux: f64 = net
                    .neighbors(u)
                    .iter()
                    .map(|&(v, id)| net.edge(id).conductance * (self.values[v] - self.values[u]))
                    .sum();
                (flux / net.vertex_conductance(u)).abs()
            })
            .fold(0.0, f64::max)
    }
}

pub fn dirichlet_energy(net: &Network, values: &[f64]) -> f64 {
    net.edges()
        .iter()
        .map(|e| {
            let d = values[e.u] - values[e.v];
            e.conductance * d * d
        })
        .sum()
}

/// Unknowns of a reduced Dirichlet problem and the map back to global ids.
struct Reduced {
    unknowns: Vec<usize>,
    local: Vec<usize>,
}

impl Reduced {
    fn new(n: usize, unknowns: Vec<usize>) -> Self {
        let mut local = vec![UNREACHED; n];
        for (i, &v) in unknowns.iter().enumerate() {
            local[v] = i;
        }
        Reduced { unknowns, local }
    }

    /// Assembles and solves `L_U x = b + source` where `fixed(v)` gives the
    /// Dirichlet value of a non-unknown neighbour (`None`: edge ignored).
    fn solve(
        &self,
        net: &Network,
        fixed: impl Fn(usize) -> Option<f64>,
        source: &[f64],
        opts: &SolveOptions,
        what: &str,
    ) -> Result<(Vec<f64>, f64, usize)> {
        let m = self.unknowns.len();
        let mut rows = Vec::with_capacity(m);
        let mut rhs = source.to_vec();
        for (i, &u) in self.unknowns.iter().enumerate() {
            let mut row = Vec::with_capacity(net.degree(u) + 1);
            let mut diag = 0.0;
            for &(v, id) in net.neighbors(u) {
                let c = net.edge(id).conductance;
                if c <= 0.0 || v == u {
                    continue;
                }
                let j = self.local[v];
                if j != UNREACHED {
                    diag += c;
                    row.push((j, -c));
                } else if let Some(value) = fixed(v) {
                    diag += c;
                    rhs[i] += c * value;
                }
            }
            row.push((i, diag));
            rows.push(row);
        }
        let a = CsrMatrix::from_rows(rows);
        let out = pcg(&a, &rhs, opts.tol, (opts.max_iter_factor * m).max(100));
        if !out.converged {
            return Err(Error::numerical(
                format!(
                    "{what}: conjugate gradient did not reach tol {:.1e} in {} iterations ({} unknowns)",
                    opts.tol, out.iterations, m
                ),
                out.residual,
            ));
        }
        Ok((out.x, out.residual, out.iterations))
    }
}

/// Result of a harmonic extension restricted to a vertex domain.
struct Extension {
    /// Global-size values; 0 outside the domain.
    values: Vec<f64>,
    excluded: Vec<usize>,
    residual: f64,
    iterations: usize,
}

/// Solves the Dirichlet problem on `domain` with `boundary(v)` giving fixed
/// values; edges leaving the domain are ignored.
fn harmonic_extension(
    net: &Network,
    in_domain: &[bool],
    domain: &[usize],
    boundary: &[Option<f64>],
    opts: &SolveOptions,
    what: &str,
) -> Result<Extension> {
    let n = net.vertex_count();
    // vertices reachable from a fixed vertex through positive edges in the domain
    let mut active = vec![false; n];
    let mut stack: Vec<usize> = domain.iter().copied().filter(|&v| boundary[v].is_some()).collect();
    for &v in &stack {
        active[v] = true;
    }
    while let Some(x) = stack.pop() {
        for &(y, id) in net.neighbors(x) {
            if in_domain[y] && !active[y] && net.edge(id).conductance > 0.0 {
                active[y] = true;
                stack.push(y);
            }
        }
    }
    let mut unknowns = Vec::new();
    let mut excluded = Vec::new();
    for &v in domain {
        if boundary[v].is_none() {
            if active[v] {
                unknowns.push(v);
            } else {
                excluded.push(v);
            }
        }
    }
    let reduced = Reduced::new(n, unknowns);
    let source = vec![0.0; reduced.unknowns.len()];
    let (x, residual, iterations) = reduced.solve(
        net,
        |v| if in_domain[v] { boundary[v] } else { None },
        &source,
        opts,
        what,
    )?;
    let mut values = vec![0.0; n];
    for &v in domain {
        if let Some(b) = boundary[v] {
            values[v] = b;
        }
    }
    for (i, &v) in reduced.unknowns.iter().enumerate() {
        values[v] = x[i];
    }
    Ok(Extension {
        values,
        excluded,
        residual,
        iterations,
    })
}

fn check_disjoint(net: &Network, zero_set: &[usize], one_set: &[usize]) -> Result<Vec<Option<f64>>> {
    net.check_vertices(zero_set, "zero set")?;
    net.check_vertices(one_set, "one set")?;
    let mut boundary = vec![None; net.vertex_count()];
    for &s in zero_set {
        boundary[s] = Some(0.0);
    }
    for &t in one_set {
        if boundary[t].is_some() {
            return Err(Error::input(format!(
                "zero and one sets must be disjoint; vertex {t} is in both"
            )));
        }
        boundary[t] = Some(1.0);
    }
    Ok(boundary)
}

/// Current entering `one_set` (edges with both endpoints in the domain).
fn inflow(net: &Network, values: &[f64], one_set: &[usize], in_domain: &[bool]) -> f64 {
    one_set
        .iter()
        .map(|&t| {
            net.neighbors(t)
                .iter()
                .filter(|&&(v, _)| in_domain[v])
                .map(|&(v, id)| net.edge(id).conductance * (values[t] - values[v]))
                .sum::<f64>()
        })
        .sum()
}

fn energy_on(net: &Network, values: &[f64], in_domain: &[bool]) -> f64 {
    net.edges()
        .iter()
        .filter(|e| in_domain[e.u] && in_domain[e.v])
        .map(|e| {
            let d = values[e.u] - values[e.v];
            e.conductance * d * d
        })
        .sum()
}

/// The harmonic potential with `g|S ≡ 0`, `g|T ≡ 1`.
pub fn solve_potential(net: &Network, zero_set: &[usize], one_set: &[usize], opts: &SolveOptions) -> Result<Potential> {
    let boundary = check_disjoint(net, zero_set, one_set)?;
    let n = net.vertex_count();
    let in_domain = vec![true; n];
    let domain: Vec<usize> = (0..n).collect();
    let ext = harmonic_extension(net, &in_domain, &domain, &boundary, opts, "potential")?;
    let energy = energy_on(net, &ext.values, &in_domain);
    let current = inflow(net, &ext.values, one_set, &in_domain);
    Ok(Potential {
        values: ext.values,
        zero_set: zero_set.to_vec(),
        one_set: one_set.to_vec(),
        energy,
        current,
        excluded: ext.excluded,
        residual: ext.residual,
        iterations: ext.iterations,
    })
}

/// `R_eff(S ↔ T) = 1/𝓔(g)`; `+∞` when the sets are not joined by
/// positive-conductance paths.
pub fn effective_resistance(net: &Network, zero_set: &[usize], one_set: &[usize], opts: &SolveOptions) -> Result<f64> {
    let p = solve_potential(net, zero_set, one_set, opts)?;
    Ok(reciprocal(p.energy))
}

fn reciprocal(x: f64) -> f64 {
    if x > 0.0 {
        1.0 / x
    } else {
        f64::INFINITY
    }
}

/// Discrete modulus together with its extremal weight.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Modulus {
    /// `Mod(S ↔ T)`, computed as the current through the network.
    pub value: f64,
    /// `R_eff(S ↔ T) = 1/𝓔(g)`, from the energy.
    #[serde(with = "crate::io::float_or_inf")]
    pub reff: f64,
    /// `ω*(e) = |g(x) − g(y)|`.
    pub extremal: EdgeWeight,
    pub residual: f64,
}

fn gradient_weight(net: &Network, values: &[f64], in_domain: &[bool]) -> EdgeWeight {
    EdgeWeight {
        values: net
            .edges()
            .iter()
            .map(|e| {
                if in_domain[e.u] && in_domain[e.v] {
                    (values[e.u] - values[e.v]).abs()
                } else {
                    0.0
                }
            })
            .collect(),
    }
}

/// Discrepancy allowed between the current and the energy given the solve
/// residual: `𝓔(g) − I = Σ_free g_x r_x` exactly, bounded here a posteriori.
fn duality_slack(energy: f64, residual: f64, rhs_scale: f64, unknowns: usize, tol: f64) -> f64 {
    if energy <= 0.0 {
        return 0.0;
    }
    10.0 * tol + 2.0 * residual * rhs_scale * (unknowns.max(1) as f64).sqrt() / energy + 1e-12
}

fn rhs_scale(net: &Network, one_set: &[usize]) -> f64 {
    one_set.iter().map(|&t| net.vertex_conductance(t)).sum::<f64>().max(1e-300)
}

fn check_modulus_postconditions(
    net: &Network,
    m: &Modulus,
    energy: f64,
    zero_set: &[usize],
    one_set: &[usize],
    slack: f64,
) -> Result<()> {
    if energy > 0.0 {
        let product = m.value * m.reff;
        if (product - 1.0).abs() > slack {
            return Err(Error::numerical(
                format!("modulus × resistance = {product:.15} deviates from 1"),
                m.residual,
            ));
        }
    }
    let dist = net.weighted_distance(&m.extremal, zero_set, one_set)?;
    if dist < 1.0 - 1e-9 {
        return Err(Error::numerical(
            format!("extremal weight is not admissible: dist = {dist}"),
            m.residual,
        ));
    }
    let mass = m.extremal.l2_mass(net);
    if (mass - energy).abs() > 1e-9 * energy.max(1e-300) + 1e-15 {
        return Err(Error::numerical(
            format!("extremal mass {mass} differs from energy {energy}"),
            m.residual,
        ));
    }
    Ok(())
}

/// `Mod(S ↔ T)` and the extremal weight `ω* = |∇g|`.
pub fn modulus(net: &Network, zero_set: &[usize], one_set: &[usize], opts: &SolveOptions) -> Result<Modulus> {
    let p = solve_potential(net, zero_set, one_set, opts)?;
    let in_domain = vec![true; net.vertex_count()];
    let m = Modulus {
        value: p.current,
        reff: reciprocal(p.energy),
        extremal: gradient_weight(net, &p.values, &in_domain),
        residual: p.residual,
    };
    let unknowns = net.vertex_count() - zero_set.len() - one_set.len() - p.excluded.len();
    let slack = duality_slack(p.energy, p.residual, rhs_scale(net, one_set), unknowns, opts.tol);
    check_modulus_postconditions(net, &m, p.energy, zero_set, one_set, slack)?;
    Ok(m)
}

/// `M(x, r, R) = Mod(B(x,r) ↔ B̄(x,R))`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnnularModulus {
    pub center: usize,
    pub inner: usize,
    pub outer: usize,
    pub value: f64,
    #[serde(with = "crate::io::float_or_inf")]
    pub reff: f64,
    /// Extremal weight on the whole edge index space (zero outside the ball).
    pub extremal: EdgeWeight,
    pub residual: f64,
}

/// Annular modulus, computed on the induced subgraph `B(x, R+1)`.
///
/// Fails with a contamination error if a boundary vertex lies within `R` of
/// `x`, and with an input error if nothing lies outside `B(x, R)`.
pub fn annular_modulus(net: &Network, x: usize, inner: usize, outer: usize, opts: &SolveOptions) -> Result<AnnularModulus> {
    let mut search = BallSearch::new(net.vertex_count());
    annular_modulus_with(net, x, inner, outer, opts, &mut search)
}

pub(crate) fn annular_modulus_with(
    net: &Network,
    x: usize,
    inner: usize,
    outer: usize,
    opts: &SolveOptions,
    search: &mut BallSearch,
) -> Result<AnnularModulus> {
    net.check_vertex(x)?;
    if inner >= outer {
        return Err(Error::input(format!(
            "annulus needs inner < outer, got r = {inner}, R = {outer}"
        )));
    }
    let ball: Vec<(usize, usize)> = search.ball(net, x, outer + 1).to_vec();
    if let Some(&(b, _)) = ball.iter().find(|&&(v, d)| d <= outer && net.is_boundary(v)) {
        return Err(Error::Contamination {
            center: x,
            radius: outer,
            boundary_vertex: b,
        });
    }
    let n = net.vertex_count();
    let mut in_domain = vec![false; n];
    let mut boundary = vec![None; n];
    let mut one_set = Vec::new();
    let mut zero_set = Vec::new();
    for &(v, d) in &ball {
        in_domain[v] = true;
        if d <= inner {
            boundary[v] = Some(0.0);
            zero_set.push(v);
        } else if d == outer + 1 {
            boundary[v] = Some(1.0);
            one_set.push(v);
        }
    }
    if one_set.is_empty() {
        return Err(Error::input(format!(
            "B̄({x}, {outer}) is empty: the ball covers the whole component"
        )));
    }
    let domain: Vec<usize> = ball.iter().map(|&(v, _)| v).collect();
    let ext = harmonic_extension(net, &in_domain, &domain, &boundary, opts, "annular modulus")?;
    let energy = energy_on(net, &ext.values, &in_domain);
    let current = inflow(net, &ext.values, &one_set, &in_domain);
    let extremal = gradient_weight(net, &ext.values, &in_domain);
    let m = Modulus {
        value: current,
        reff: reciprocal(energy),
        extremal,
        residual: ext.residual,
    };
    let unknowns = domain.len() - zero_set.len() - one_set.len() - ext.excluded.len();
    let slack = duality_slack(energy, ext.residual, rhs_scale(net, &one_set), unknowns, opts.tol);
    check_modulus_postconditions(net, &m, energy, &zero_set, &one_set, slack)?;
    Ok(AnnularModulus {
        center: x,
        inner,
        outer,
        value: m.value,
        reff: m.reff,
        extremal: m.extremal,
        residual: m.residual,
    })
}

/// `R_eff(B(x, r) ↔ B̄(x, R))` with the same guards as [`annular_modulus`];
/// `r = 0` gives the point-to-complement resistance.
pub fn ball_resistance(net: &Network, x: usize, inner: usize, outer: usize, opts: &SolveOptions) -> Result<f64> {
    Ok(annular_modulus(net, x, inner, outer, opts)?.reff)
}

/// Green kernel `g_S(x, ·)`: expected visits before the walk leaves `S`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GreenKernel {
    pub source: usize,
    pub killed_off: Vec<usize>,
    pub values: Vec<f64>,
    pub residual: f64,
}

impl GreenKernel {
    pub fn at(&self, y: usize) -> f64 {
        self.values[y]
    }
}

/// Green kernel killed on exiting `S`, via `g_S(x, y) = c_y · (L_S⁻¹)(x, y)`.
///
/// Post-condition: `g_S(x, x) = c_x · R_eff(x ↔ V ∖ S)`.
pub fn green_kernel(net: &Network, x: usize, set: &[usize], opts: &SolveOptions) -> Result<GreenKernel> {
    net.check_vertices(set, "killing set S")?;
    let n = net.vertex_count();
    let mut in_set = vec![false; n];
    for &v in set {
        in_set[v] = true;
    }
    if !in_set[x] {
        return Err(Error::input(format!("source {x} must lie in S")));
    }
    let outside: Vec<usize> = (0..n).filter(|&v| !in_set[v]).collect();
    if outside.is_empty() {
        return Err(Error::input("V ∖ S is empty: the walk is never killed"));
    }
    // positive-conductance component of x inside S
    let mut seen = vec![false; n];
    seen[x] = true;
    let mut comp = vec![x];
    let mut head = 0;
    let mut killed = false;
    while head < comp.len() {
        let u = comp[head];
        head += 1;
        for &(v, id) in net.neighbors(u) {
            if net.edge(id).conductance <= 0.0 {
                continue;
            }
            if !in_set[v] {
                killed = true;
            } else if !seen[v] {
                seen[v] = true;
                comp.push(v);
            }
        }
    }
    if !killed {
        return Err(Error::input(format!(
            "the walk from {x} never leaves S through a positive-conductance edge"
        )));
    }
    comp.sort_unstable();
    let reduced = Reduced::new(n, comp);
    let mut source = vec![0.0; reduced.unknowns.len()];
    source[reduced.local[x]] = 1.0;
    let (u, residual, _) = reduced.solve(net, |v| if in_set[v] { None } else { Some(0.0) }, &source, opts, "green kernel")?;
    let mut values = vec![0.0; n];
    for (i, &v) in reduced.unknowns.iter().enumerate() {
        values[v] = net.vertex_conductance(v) * u[i];
    }
    let g = GreenKernel {
        source: x,
        killed_off: set.to_vec(),
        values,
        residual,
    };

    let reff = effective_resistance(net, &[x], &outside, opts)?;
    let expected = net.vertex_conductance(x) * reff;
    let tol = 1e3 * opts.tol.max(1e-13);
    if (g.values[x] - expected).abs() > tol * expected {
        return Err(Error::numerical(
            format!(
                "green kernel g(x,x) = {} but c_x·R_eff = {expected}",
                g.values[x]
            ),
            residual,
        ));
    }
    Ok(g)
}

/// `Q(y) = Pr_y[τ_ρ < τ_{B̄(ρ,R)}]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HittingProbability {
    pub root: usize,
    pub radius: usize,
    pub values: Vec<f64>,
    pub energy: f64,
    #[serde(with = "crate::io::float_or_inf")]
    pub reff: f64,
}

/// Hitting probability of `ρ` before leaving `B(ρ, R)`.
///
/// Post-conditions: `Q(y) = (c_ρ/c_y)·g_B(ρ,y)/g_B(ρ,ρ)` on the ball and
/// `𝓔(Q) = 1/R_eff(ρ ↔ B̄(ρ,R))`, the latter computed through the current.
pub fn hitting_probability(net: &Network, rho: usize, radius: usize, opts: &SolveOptions) -> Result<HittingProbability> {
    net.check_vertex(rho)?;
    let mut search = BallSearch::new(net.vertex_count());
    let ball: Vec<(usize, usize)> = search.ball(net, rho, radius + 1).to_vec();
    if let Some(&(b, _)) = ball.iter().find(|&&(v, d)| d <= radius && net.is_boundary(v)) {
        return Err(Error::Contamination {
            center: rho,
            radius,
            boundary_vertex: b,
        });
    }
    let n = net.vertex_count();
    let mut in_domain = vec![false; n];
    let mut boundary = vec![None; n];
    let mut outer = Vec::new();
    let mut inside = Vec::new();
    for &(v, d) in &ball {
        in_domain[v] = true;
        if d == radius + 1 {
            boundary[v] = Some(0.0);
            outer.push(v);
        } else {
            inside.push(v);
        }
    }
    if outer.is_empty() {
        return Err(Error::input(format!("B̄({rho}, {radius}) is empty")));
    }
    boundary[rho] = Some(1.0);
    let domain: Vec<usize> = ball.iter().map(|&(v, _)| v).collect();
    let ext = harmonic_extension(net, &in_domain, &domain, &boundary, opts, "hitting probability")?;
    let energy = energy_on(net, &ext.values, &in_domain);
    // current leaving ρ towards the outer sphere
    let current = -inflow(net, &ext.values, &outer, &in_domain);
    let slack = duality_slack(energy, ext.residual, net.vertex_conductance(rho), domain.len(), opts.tol);
    if energy > 0.0 && (current / energy - 1.0).abs() > slack {
        return Err(Error::numerical(
            format!("𝓔(Q) = {energy} but 1/R_eff = {current}"),
            ext.residual,
        ));
    }

    let green = green_kernel(net, rho, &inside, opts)?;
    let c_rho = net.vertex_conductance(rho);
    let g_rr = green.values[rho];
    let check_tol = 1e4 * opts.tol.max(1e-13);
    for &v in &inside {
        let c_v = net.vertex_conductance(v);
        if c_v <= 0.0 {
            continue;
        }
        let via_green = c_rho / c_v * green.values[v] / g_rr;
        if (via_green - ext.values[v]).abs() > check_tol {
            return Err(Error::numerical(
                format!(
                    "hitting probability at {v}: harmonic {} vs Green-kernel identity {via_green}",
                    ext.values[v]
                ),
                ext.residual,
            ));
        }
    }
    let mut values = vec![0.0; n];
    for &v in &inside {
        values[v] = ext.values[v];
    }
    Ok(HittingProbability {
        root: rho,
        radius,
        values,
        energy,
        reff: reciprocal(current),
    })
}
