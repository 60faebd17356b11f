//! End-to-end measurement of every scaling series on generated networks,
//! pooled over environments, and the resulting exponent report.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{
    fit_exponent, resistance_series, ExponentReport, Estimate, Fit, FitSet, ScaleSeries, SeriesKind, Statistic,
    Window, DEFAULT_DELTA,
};
use crate::generators::{Family, GeneratorSpec};
use crate::network::Network;
use crate::resistance::SolveOptions;
use crate::rng::{derive_seed, tag};
use crate::walks::{dyadic_grid, heat_kernel_exact, simulate_walks, ScaleSamples, WalkConfig, DEFAULT_HEAT_KERNEL_CAP};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateConfig {
    pub generator: GeneratorSpec,
    /// Independent environments; forced to 1 for deterministic families.
    pub environments: usize,
    pub seed: u64,
    pub walkers: usize,
    /// Radii for volumes, resistances and exit times.
    pub r_window: Window,
    /// Times for displacement and return probabilities.
    pub n_window: Window,
    pub delta: f64,
    /// Step cap per walker; defaults to `16·R_max^{2.5}`.
    pub max_steps: Option<u64>,
    pub heat_kernel_cap: usize,
    pub volumes: bool,
    pub resistances: bool,
    pub walks: bool,
    pub heat_kernel: bool,
    pub solve: SolveOptions,
}

fn is_random(f: Family) -> bool {
    matches!(f, Family::GffLattice | Family::BernoulliPercolationCluster)
}

impl EstimateConfig {
    /// Family-appropriate windows for the given generator.
    pub fn new(generator: GeneratorSpec) -> Result<Self> {
        let half = |g: &GeneratorSpec| g.size.unwrap_or(0) as u64;
        let (r, n) = match generator.family {
            Family::Path => {
                let top = 512.min(half(&generator).saturating_sub(1));
                ((16, top), (16, top))
            }
            Family::Cycle => {
                let top = half(&generator) / 4;
                ((4, top), (4, top))
            }
            Family::LatticeZd => {
                let top = half(&generator).saturating_sub(1);
                ((32.min(top), 256.min(top)), (16.min(top), 256.min(top)))
            }
            Family::TreeBAry => {
                let top = generator.depth.unwrap_or(0) as u64 / 2;
                ((2, top), (2, top))
            }
            Family::SierpinskiGasket => {
                let side = 1u64 << generator.level.unwrap_or(0).min(40);
                let top = 128.min(side / 2);
                ((4, top), (4, top))
            }
            Family::GffLattice | Family::BernoulliPercolationCluster => {
                let top = half(&generator) / 2;
                ((4, top), (4, top))
            }
        };
        let window = |(lo, hi): (u64, u64)| {
            Window::new(lo, hi).map_err(|_| {
                Error::input(format!(
                    "network is too small for default window [{lo}, {hi}]; pass explicit windows"
                ))
            })
        };
        Ok(EstimateConfig {
            environments: if is_random(generator.family) { 20 } else { 1 },
            seed: generator.seed,
            walkers: 4096,
            r_window: window(r)?,
            n_window: window(n)?,
            delta: DEFAULT_DELTA,
            max_steps: None,
            heat_kernel_cap: DEFAULT_HEAT_KERNEL_CAP,
            volumes: true,
            resistances: true,
            walks: true,
            heat_kernel: true,
            solve: SolveOptions::default(),
            generator,
        })
    }

    fn environment_count(&self) -> usize {
        if is_random(self.generator.family) {
            self.environments.max(1)
        } else {
            1
        }
    }
}

/// All series measured on one environment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSeries {
    pub seed: u64,
    pub vertex_count: usize,
    pub series: Vec<ScaleSeries>,
    /// Radii dropped because the truncation boundary was within reach.
    pub contaminated: Vec<u64>,
    pub elementary_violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurements {
    pub config: EstimateConfig,
    pub environments: Vec<EnvironmentSeries>,
    /// Per-scale geometric mean over environments.
    pub pooled: Vec<ScaleSeries>,
    /// Per-scale arithmetic mean over environments.
    pub annealed: Vec<ScaleSeries>,
}

fn walk_series(
    samples: &[ScaleSamples],
    kind: SeriesKind,
    stats: &[Statistic],
) -> Result<Vec<ScaleSeries>> {
    let mut out = Vec::new();
    for &st in stats {
        let mut scale = Vec::new();
        let mut value = Vec::new();
        let mut stderr = Vec::new();
        let mut censor = Vec::new();
        for s in samples {
            let (v, se) = match st {
                Statistic::Typical => {
                    let (m, se) = s.mean_with(|x| (x.max(1) as f64).ln());
                    (m.exp(), m.exp() * se)
                }
                Statistic::Mean => s.mean_with(|x| x as f64),
                Statistic::MeanSquare => s.mean_with(|x| (x * x) as f64),
                Statistic::Exact => unreachable!("walk series are sampled"),
            };
            scale.push(s.scale);
            value.push(if v.is_finite() { v } else { f64::NAN });
            stderr.push(se);
            censor.push(s.censor_frac());
        }
        out.push(ScaleSeries::with_errors(kind, st, scale, value, stderr, censor)?);
    }
    Ok(out)
}

fn measure_environment(cfg: &EstimateConfig, net: &Network, env_seed: u64) -> Result<EnvironmentSeries> {
    let root = net.root();
    let reach = net.distance_to_boundary(root) as u64;
    let r_grid: Vec<u64> = dyadic_grid(cfg.r_window.lo, cfg.r_window.hi);
    let n_grid: Vec<u64> = dyadic_grid(cfg.n_window.lo, cfg.n_window.hi);
    let mut series = Vec::new();
    let mut contaminated: Vec<u64> = r_grid.iter().copied().filter(|&r| r >= reach).collect();
    let safe_r: Vec<u64> = r_grid.iter().copied().filter(|&r| r < reach).collect();

    if cfg.volumes {
        let dist = net.distances_from(&[root]);
        let mut vol = vec![0.0; safe_r.len()];
        for (v, &d) in dist.iter().enumerate() {
            for (k, &r) in safe_r.iter().enumerate() {
                if (d as u64) <= r {
                    vol[k] += net.vertex_conductance(v);
                }
            }
        }
        series.push(ScaleSeries::new(SeriesKind::Volume, Statistic::Exact, safe_r.clone(), vol)?);
    }
    if cfg.resistances {
        let rs = resistance_series(net, cfg.delta, &safe_r, &cfg.solve)?;
        contaminated.extend(rs.contaminated.iter().copied());
        series.push(rs.annulus);
        series.push(rs.point);
    }
    let mut elementary_violations = 0;
    if cfg.walks {
        let r_hi = safe_r.last().copied().unwrap_or(1) as f64;
        let n_hi = n_grid.last().copied().unwrap_or(1);
        let cap = cfg.max_steps.unwrap_or_else(|| ((16.0 * r_hi.powf(2.5)) as u64).max(n_hi));
        let wc = WalkConfig::new(cap, cfg.walkers, derive_seed(env_seed, tag::WALK));
        let stats = simulate_walks(net, &wc, &safe_r, &n_grid)?;
        elementary_violations = stats.elementary_violations();
        series.extend(walk_series(&stats.sigma, SeriesKind::Sigma, &[Statistic::Typical, Statistic::Mean])?);
        series.extend(walk_series(
            &stats.max_disp,
            SeriesKind::Maxdisp,
            &[Statistic::Mean, Statistic::MeanSquare],
        )?);
    }
    if cfg.heat_kernel {
        let ns: Vec<u64> = n_grid.iter().copied().filter(|&n| n < reach).collect();
        if let Some(&n_max) = ns.last() {
            let hk = heat_kernel_exact(net, n_max as usize, cfg.heat_kernel_cap)?;
            let p = ns.iter().map(|&n| hk.p_2n(n as usize)).collect();
            series.push(ScaleSeries::new(SeriesKind::ReturnProb, Statistic::Exact, ns, p)?);
        }
    }
    contaminated.sort_unstable();
    contaminated.dedup();
    Ok(EnvironmentSeries {
        seed: env_seed,
        vertex_count: net.vertex_count(),
        series,
        contaminated,
        elementary_violations,
    })
}

/// Combines matching series across environments on their common scales.
fn pool(envs: &[EnvironmentSeries], annealed: bool) -> Result<Vec<ScaleSeries>> {
    let Some(first) = envs.first() else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for proto in &first.series {
        let matching: Vec<&ScaleSeries> = envs
            .iter()
            .filter_map(|e| e.series.iter().find(|s| s.kind == proto.kind && s.statistic == proto.statistic))
            .collect();
        let scales: Vec<u64> = proto
            .scale
            .iter()
            .copied()
            .filter(|s| matching.iter().all(|m| m.scale.contains(s)))
            .collect();
        let k = matching.len() as f64;
        let mut value = Vec::new();
        let mut stderr = Vec::new();
        let mut censor = Vec::new();
        for &s in &scales {
            let pts: Vec<(f64, f64, f64)> = matching
                .iter()
                .map(|m| {
                    let i = m.scale.iter().position(|&x| x == s).unwrap();
                    (m.value[i], m.stderr[i], m.censor_frac[i])
                })
                .collect();
            censor.push(pts.iter().map(|p| p.2).sum::<f64>() / k);
            if matching.len() == 1 {
                value.push(pts[0].0);
                stderr.push(pts[0].1);
                continue;
            }
            if annealed {
                let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
                let (m, se) = crate::walks::mean_stderr(&xs);
                value.push(m);
                stderr.push(se);
            } else {
                let logs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
                let (m, se) = crate::walks::mean_stderr(&logs);
                value.push(m.exp());
                stderr.push(m.exp() * se);
            }
        }
        out.push(ScaleSeries::with_errors(
            proto.kind,
            proto.statistic,
            scales,
            value,
            stderr,
            censor,
        )?);
    }
    Ok(out)
}

/// Measures every enabled series on each environment and pools them.
pub fn measure(cfg: &EstimateConfig) -> Result<Measurements> {
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(Error::input(format!("δ must lie in (0, 1), got {}", cfg.delta)));
    }
    if cfg.walks && cfg.walkers < 1 {
        return Err(Error::input("walkers must be at least 1"));
    }
    let count = cfg.environment_count();
    let run = |i: usize| -> Result<EnvironmentSeries> {
        let env_seed = if count == 1 { cfg.seed } else { derive_seed(cfg.seed, i as u64) };
        let net = cfg.generator.clone().with_seed(env_seed).build()?;
        measure_environment(cfg, &net, env_seed)
    };
    let environments: Vec<EnvironmentSeries> = if count == 1 {
        vec![run(0)?]
    } else {
        (0..count).into_par_iter().map(run).collect::<Result<_>>()?
    };
    Ok(Measurements {
        pooled: pool(&environments, false)?,
        annealed: pool(&environments, true)?,
        environments,
        config: cfg.clone(),
    })
}

fn find(series: &[ScaleSeries], kind: SeriesKind, st: Statistic) -> Result<&ScaleSeries> {
    series
        .iter()
        .find(|s| s.kind == kind && s.statistic == st)
        .ok_or_else(|| Error::Estimation(format!("no {kind:?} series was measured")))
}

const REPORTED: [(SeriesKind, Statistic); 8] = [
    (SeriesKind::Volume, Statistic::Exact),
    (SeriesKind::Sigma, Statistic::Typical),
    (SeriesKind::Sigma, Statistic::Mean),
    (SeriesKind::Maxdisp, Statistic::Mean),
    (SeriesKind::Maxdisp, Statistic::MeanSquare),
    (SeriesKind::ReturnProb, Statistic::Exact),
    (SeriesKind::ReffAnnulus, Statistic::Exact),
    (SeriesKind::ReffPoint, Statistic::Exact),
];

fn fit_all(label: String, series: &[ScaleSeries]) -> FitSet {
    FitSet {
        label,
        fits: REPORTED
            .iter()
            .filter_map(|&(k, st)| find(series, k, st).ok().and_then(|s| fit_exponent(s, None).ok()))
            .collect(),
    }
}

impl Measurements {
    /// Fit of a pooled series.
    pub fn fit(&self, kind: SeriesKind, st: Statistic) -> Result<Fit> {
        fit_exponent(find(&self.pooled, kind, st)?, None)
    }

    /// Fit of an annealed-pooled series.
    pub fn fit_annealed(&self, kind: SeriesKind, st: Statistic) -> Result<Fit> {
        fit_exponent(find(&self.annealed, kind, st)?, None)
    }

    /// Fits of each environment separately.
    pub fn per_environment(&self, kind: SeriesKind, st: Statistic) -> Vec<Result<Fit>> {
        self.environments
            .iter()
            .map(|e| find(&e.series, kind, st).and_then(|s| fit_exponent(s, None)))
            .collect()
    }

    pub fn report(&self) -> Result<ExponentReport> {
        let get = |k, st| self.fit(k, st).map(|f| Estimate::from(&f));
        let mut report = ExponentReport::from_estimates(
            get(SeriesKind::Volume, Statistic::Exact)?,
            get(SeriesKind::Sigma, Statistic::Typical)?,
            get(SeriesKind::Maxdisp, Statistic::Mean)?,
            get(SeriesKind::ReturnProb, Statistic::Exact)?,
            get(SeriesKind::ReffAnnulus, Statistic::Exact)?,
            get(SeriesKind::ReffPoint, Statistic::Exact)?,
            self.config.delta,
        );
        report.d_w_annealed = get(SeriesKind::Sigma, Statistic::Mean).ok();
        report.beta_annealed = get(SeriesKind::Maxdisp, Statistic::MeanSquare).ok();
        report.refresh();
        report.series = self.pooled.clone();
        if self.environments.len() > 1 {
            report.annealed_pooled = Some(fit_all("annealed".into(), &self.annealed));
            report.per_environment = self
                .environments
                .iter()
                .map(|e| fit_all(format!("seed {}", e.seed), &e.series))
                .collect();
        }
        report.provenance = serde_json::json!({
            "version": env!("CARGO_PKG_VERSION"),
            "seed": self.config.seed,
            "config": self.config,
        });
        Ok(report)
    }
}

/// Measures and fits all exponents for the configured family.
pub fn estimate(cfg: &EstimateConfig) -> Result<ExponentReport> {
    measure(cfg)?.report()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_gasket_report_is_complete() {
        let mut cfg = EstimateConfig::new(GeneratorSpec::gasket(6)).unwrap();
        cfg.walkers = 256;
        cfg.r_window = Window::new(2, 16).unwrap();
        cfg.n_window = Window::new(2, 16).unwrap();
        let r = estimate(&cfg).unwrap();
        assert_eq!(r.schema, 1);
        assert!((r.d_f.estimate - 1.585).abs() < 0.2);
        assert!(r.d_w_annealed.is_some() && r.beta_annealed.is_some());
        let again = estimate(&cfg).unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap(), serde_json::to_string(&again).unwrap());
    }

    #[test]
    fn random_family_pools_environments() {
        let mut cfg = EstimateConfig::new(GeneratorSpec::gff(40, 0.3, 1)).unwrap();
        cfg.environments = 3;
        cfg.walks = false;
        cfg.heat_kernel = false;
        let m = measure(&cfg).unwrap();
        assert_eq!(m.environments.len(), 3);
        let fits = m.per_environment(SeriesKind::Volume, Statistic::Exact);
        assert_eq!(fits.len(), 3);
        let mean: f64 = fits.iter().map(|f| f.as_ref().unwrap().exponent).sum::<f64>() / 3.0;
        let pooled = m.fit(SeriesKind::Volume, Statistic::Exact).unwrap();
        assert!((pooled.exponent - mean).abs() < 1e-9);
    }
}
