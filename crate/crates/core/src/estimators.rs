//! Exponent fitting, Einstein-relation verdicts and unimodularity
//! diagnostics.

use std::fmt::Write as _;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::GeneratorSpec;
use crate::network::{BallSearch, Network};
use crate::resistance::{annular_modulus_with, SolveOptions};
use crate::rng::{derive_seed, substream, tag, Rng};
use crate::structures::exp_clock_partition;
use crate::walks::{mean_stderr, TransitionSampler};

/// Scales whose censored fraction exceeds this are not fitted.
pub const MAX_CENSOR_FRAC: f64 = 0.05;
pub const DEFAULT_DELTA: f64 = 0.25;
pub const REPORT_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    Volume,
    Sigma,
    Maxdisp,
    ReturnProb,
    ReffPoint,
    ReffAnnulus,
}

/// How a per-scale value summarizes its samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// Computed exactly; no sampling error.
    Exact,
    /// Geometric mean `exp E[log X]`.
    Typical,
    Mean,
    /// `E[X²]`.
    MeanSquare,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleSeries {
    pub kind: SeriesKind,
    pub statistic: Statistic,
    pub scale: Vec<u64>,
    pub value: Vec<f64>,
    pub stderr: Vec<f64>,
    pub censor_frac: Vec<f64>,
}

impl ScaleSeries {
    pub fn new(kind: SeriesKind, statistic: Statistic, scale: Vec<u64>, value: Vec<f64>) -> Result<Self> {
        let k = scale.len();
        Self::with_errors(kind, statistic, scale, value, vec![0.0; k], vec![0.0; k])
    }

    pub fn with_errors(
        kind: SeriesKind,
        statistic: Statistic,
        scale: Vec<u64>,
        value: Vec<f64>,
        stderr: Vec<f64>,
        censor_frac: Vec<f64>,
    ) -> Result<Self> {
        let k = scale.len();
        if value.len() != k || stderr.len() != k || censor_frac.len() != k {
            return Err(Error::input(format!("{kind:?} series columns have different lengths")));
        }
        if scale.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::input(format!("{kind:?} series scales must be strictly increasing")));
        }
        if let Some(&s) = scale.first() {
            if s == 0 {
                return Err(Error::input(format!("{kind:?} series scales must be positive")));
            }
        }
        Ok(ScaleSeries {
            kind,
            statistic,
            scale,
            value,
            stderr,
            censor_frac,
        })
    }

    pub fn len(&self) -> usize {
        self.scale.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scale.is_empty()
    }

    /// `scale,value,stderr,censor_frac` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scale,value,stderr,censor_frac\n");
        for i in 0..self.len() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                self.scale[i],
                crate::io::format_f64(self.value[i]),
                crate::io::format_f64(self.stderr[i]),
                crate::io::format_f64(self.censor_frac[i])
            );
        }
        out
    }

    /// Same kind and statistic, values multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        ScaleSeries {
            value: self.value.iter().map(|v| v * factor).collect(),
            stderr: self.stderr.iter().map(|s| s * factor.abs()).collect(),
            ..self.clone()
        }
    }
}

/// Inclusive range of scales.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: u64,
    pub hi: u64,
}

impl Window {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo == 0 || lo > hi {
            return Err(Error::input(format!("invalid fitting window [{lo}, {hi}]")));
        }
        Ok(Window { lo, hi })
    }

    pub fn contains(&self, s: u64) -> bool {
        self.lo <= s && s <= self.hi
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub kind: SeriesKind,
    pub statistic: Statistic,
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    /// The exponent read off the slope (e.g. `−2·slope` for return probabilities).
    pub exponent: f64,
    pub exponent_stderr: f64,
    pub scales_used: [u64; 2],
    pub n_points: usize,
    /// Scales in the window dropped for censoring or non-positive values.
    pub dropped: Vec<u64>,
}

fn exponent_of(kind: SeriesKind, statistic: Statistic, slope: f64, se: f64) -> (f64, f64) {
    match kind {
        SeriesKind::ReturnProb => (-2.0 * slope, 2.0 * se),
        SeriesKind::Maxdisp => {
            let power = if statistic == Statistic::MeanSquare { 2.0 } else { 1.0 };
            (power / slope, power * se / (slope * slope))
        }
        _ => (slope, se),
    }
}

/// OLS of `log value` on `log scale` over the window.
///
/// The slope error combines the regression residual with the per-point
/// standard errors propagated through the fit.
pub fn fit_exponent(series: &ScaleSeries, window: Option<Window>) -> Result<Fit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ses = Vec::new();
    let mut used = Vec::new();
    let mut dropped = Vec::new();
    for i in 0..series.len() {
        let s = series.scale[i];
        if window.is_some_and(|w| !w.contains(s)) {
            continue;
        }
        let v = series.value[i];
        if !(v > 0.0) || !v.is_finite() || series.censor_frac[i] > MAX_CENSOR_FRAC {
            dropped.push(s);
            continue;
        }
        xs.push((s as f64).ln());
        ys.push(v.ln());
        ses.push(if series.stderr[i].is_finite() { series.stderr[i] / v } else { 0.0 });
        used.push(s);
    }
    let k = xs.len();
    if k < 3 {
        return Err(Error::Estimation(format!(
            "{:?} series has {k} usable scales in window {}; need at least 3",
            series.kind,
            window.map_or("(all)".to_string(), |w| format!("[{}, {}]", w.lo, w.hi))
        )));
    }
    let (slope, se, intercept) = ols(&xs, &ys, &ses);
    let (exponent, exponent_stderr) = exponent_of(series.kind, series.statistic, slope, se);
    Ok(Fit {
        kind: series.kind,
        statistic: series.statistic,
        slope,
        slope_stderr: se,
        intercept,
        exponent,
        exponent_stderr,
        scales_used: [used[0], used[k - 1]],
        n_points: k,
        dropped,
    })
}

fn ols(xs: &[f64], ys: &[f64], ses: &[f64]) -> (f64, f64, f64) {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    let residual_var = if k > 2.0 { ssr / (k - 2.0) / sxx } else { 0.0 };
    let propagated: f64 = xs.iter().zip(ses).map(|(x, s)| ((x - mx) / sxx * s).powi(2)).sum();
    (slope, (residual_var + propagated).sqrt(), intercept)
}

/// Coefficient of determination of `value ≈ a + b log(scale)` over the window.
pub fn log_linear_r2(series: &ScaleSeries, window: Option<Window>) -> f64 {
    let pts: Vec<(f64, f64)> = (0..series.len())
        .filter(|&i| window.is_none_or(|w| w.contains(series.scale[i])) && series.value[i].is_finite())
        .map(|i| ((series.scale[i] as f64).ln(), series.value[i]))
        .collect();
    if pts.len() < 3 {
        return f64::NAN;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if syy == 0.0 {
        return 1.0;
    }
    sxy * sxy / (sxx * syy)
}

// ---------------------------------------------------------------------------
// Resistance exponents

/// Annulus and point-to-complement resistances at each scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResistanceSeries {
    pub delta: f64,
    pub annulus: ScaleSeries,
    pub point: ScaleSeries,
    /// Scales dropped because the balls reached the truncation boundary.
    pub contaminated: Vec<u64>,
}

/// Inner radius `⌊R^{1−δ}⌋` of the annulus at scale `R`.
pub fn inner_radius(scale: u64, delta: f64) -> usize {
    ((scale as f64).powf(1.0 - delta) + 1e-9).floor() as usize
}

/// `R_eff(B(ρ,R^{1−δ}) ↔ B̄(ρ,R))` and `R_eff(ρ ↔ B̄(ρ,R))` at each scale.
pub fn resistance_series(net: &Network, delta: f64, scales: &[u64], opts: &SolveOptions) -> Result<ResistanceSeries> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::input(format!("δ must lie in (0, 1), got {delta}")));
    }
    let root = net.root();
    let mut search = BallSearch::new(net.vertex_count());
    let mut kept = Vec::new();
    let mut ann = Vec::new();
    let mut pt = Vec::new();
    let mut contaminated = Vec::new();
    for &r in scales {
        let outer = r as usize;
        let inner = inner_radius(r, delta);
        if inner >= outer {
            return Err(Error::input(format!("scale {r} is too small for δ = {delta}")));
        }
        let a = match annular_modulus_with(net, root, inner, outer, opts, &mut search) {
            Err(Error::Contamination { .. }) => {
                contaminated.push(r);
                continue;
            }
            other => other?,
        };
        let p = annular_modulus_with(net, root, 0, outer, opts, &mut search)?;
        kept.push(r);
        ann.push(a.reff);
        pt.push(p.reff);
    }
    Ok(ResistanceSeries {
        delta,
        annulus: ScaleSeries::new(SeriesKind::ReffAnnulus, Statistic::Exact, kept.clone(), ann)?,
        point: ScaleSeries::new(SeriesKind::ReffPoint, Statistic::Exact, kept, pt)?,
        contaminated,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaEstimate {
    pub delta: f64,
    pub zeta_tilde: Fit,
    pub zeta_0: Fit,
    pub series: ResistanceSeries,
    /// Quality of `R_eff(ρ ↔ B̄(ρ,R)) ≈ a + b log R`; near 1 signals
    /// logarithmic growth.
    pub point_log_linear_r2: f64,
}

/// Slopes of the annulus and point resistances against `R`.
pub fn estimate_zeta(net: &Network, delta: f64, scales: &[u64], opts: &SolveOptions) -> Result<ZetaEstimate> {
    let series = resistance_series(net, delta, scales, opts)?;
    if series.annulus.len() < 3 {
        return Err(Error::Estimation(format!(
            "only {} of {} scales are free of truncation effects (dropped {:?})",
            series.annulus.len(),
            scales.len(),
            series.contaminated
        )));
    }
    Ok(ZetaEstimate {
        delta,
        zeta_tilde: fit_exponent(&series.annulus, None)?,
        zeta_0: fit_exponent(&series.point, None)?,
        point_log_linear_r2: log_linear_r2(&series.point, None),
        series,
    })
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
    pub scales_used: [u64; 2],
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            estimate: value,
            stderr: 0.0,
            scales_used: [0, 0],
        }
    }
}

impl From<&Fit> for Estimate {
    fn from(f: &Fit) -> Self {
        Estimate {
            estimate: f.exponent,
            stderr: f.exponent_stderr,
            scales_used: f.scales_used,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub slack: f64,
}

/// Fits of one environment, or of the pooled ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitSet {
    pub label: String,
    pub fits: Vec<Fit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub schema: u32,
    pub d_f: Estimate,
    /// Typical exit-time exponent.
    pub d_w: Estimate,
    pub beta: Estimate,
    pub d_s: Estimate,
    pub zeta_tilde: Estimate,
    pub zeta_0: Estimate,
    /// Exponent of `E[σ_R | G]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_w_annealed: Option<Estimate>,
    /// Exponent from `E[𝓜_n² | G]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_annealed: Option<Estimate>,
    pub delta: f64,
    /// `(d_w − d_f − ζ̃, d_s − 2d_f/d_w)`.
    pub einstein_residuals: [f64; 2],
    pub inequality_chain: Vec<InequalityCheck>,
    /// Pooled series (per-scale geometric mean over environments).
    #[serde(default)]
    pub series: Vec<ScaleSeries>,
    /// Fits on the annealed pooling (per-scale arithmetic mean over environments).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annealed_pooled: Option<FitSet>,
    #[serde(default)]
    pub per_environment: Vec<FitSet>,
    #[serde(default)]
    pub provenance: serde_json::Value,
}

impl ExponentReport {
    /// A report with the residuals and chain computed from the estimates.
    pub fn from_estimates(
        d_f: Estimate,
        d_w: Estimate,
        beta: Estimate,
        d_s: Estimate,
        zeta_tilde: Estimate,
        zeta_0: Estimate,
        delta: f64,
    ) -> Self {
        let mut r = ExponentReport {
            schema: REPORT_SCHEMA,
            d_f,
            d_w,
            beta,
            d_s,
            zeta_tilde,
            zeta_0,
            d_w_annealed: None,
            beta_annealed: None,
            delta,
            einstein_residuals: [0.0; 2],
            inequality_chain: Vec::new(),
            series: Vec::new(),
            annealed_pooled: None,
            per_environment: Vec::new(),
            provenance: serde_json::Value::Null,
        };
        r.refresh();
        r
    }

    /// Recomputes the residuals and the inequality chain.
    pub fn refresh(&mut self) {
        self.einstein_residuals = einstein_residuals(self);
        self.inequality_chain = inequality_chain(self);
    }
}

pub fn einstein_residuals(r: &ExponentReport) -> [f64; 2] {
    [
        r.d_w.estimate - r.d_f.estimate - r.zeta_tilde.estimate,
        r.d_s.estimate - 2.0 * r.d_f.estimate / r.d_w.estimate,
    ]
}

fn quad(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Every inequality of the chain, evaluated at the point estimates with
/// upper and lower exponents identified. Slack is 3× the propagated stderr.
pub fn inequality_chain(r: &ExponentReport) -> Vec<InequalityCheck> {
    let df = r.d_f;
    let dw = r.d_w;
    let b = r.beta;
    let ds = r.d_s;
    let zt = r.zeta_tilde;
    let z0 = r.zeta_0;
    let ba = r.beta_annealed.unwrap_or(b);
    let dwa = r.d_w_annealed.unwrap_or(dw);
    let check = |name: &str, lhs: f64, rhs: f64, se: f64| {
        let slack = 3.0 * se;
        InequalityCheck {
            name: name.to_string(),
            lhs,
            rhs,
            satisfied: lhs <= rhs + slack,
            slack,
        }
    };
    let (lo, hi) = (b.estimate.min(dw.estimate), b.estimate.max(dw.estimate));
    let ratio = 2.0 * df.estimate / dw.estimate;
    let ratio_se = ratio * quad(&[df.stderr / df.estimate, dw.stderr / dw.estimate]);
    let lb = 2.0 * (1.0 - z0.estimate / dw.estimate);
    let lb_se = 2.0 * (z0.estimate / dw.estimate).abs() * quad(&[z0.stderr / z0.estimate.abs().max(1e-300), dw.stderr / dw.estimate]);
    vec![
        check(
            "relation-mt",
            df.estimate + zt.estimate,
            ba.estimate,
            quad(&[df.stderr, zt.stderr, ba.stderr]),
        ),
        check("bc1", ba.estimate, b.estimate, quad(&[ba.stderr, b.stderr])),
        check("relation-easy", b.estimate, lo, quad(&[b.stderr, dw.stderr])),
        check("relation-easy2", hi, dw.estimate, quad(&[b.stderr, dw.stderr])),
        check("bc2", dw.estimate, dwa.estimate, quad(&[dw.stderr, dwa.stderr])),
        check(
            "relation-commute",
            dwa.estimate,
            df.estimate + z0.estimate,
            quad(&[dwa.stderr, df.stderr, z0.stderr]),
        ),
        check("relation-ds-lb", lb, ds.estimate, quad(&[lb_se, ds.stderr])),
        check("relation-ds-ub", ds.estimate, ratio, quad(&[ds.stderr, ratio_se])),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualCheck {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub passed: bool,
    pub residuals: Vec<ResidualCheck>,
    pub chain: Vec<InequalityCheck>,
}

/// Compares both Einstein residuals to `tol` (default: 3× their propagated
/// stderr) and re-evaluates the inequality chain from the estimates.
pub fn verify_einstein(report: &ExponentReport, tol: Option<f64>) -> Verdict {
    let [r1, r2] = einstein_residuals(report);
    let df = report.d_f;
    let dw = report.d_w;
    let t1 = tol.unwrap_or_else(|| 3.0 * quad(&[dw.stderr, df.stderr, report.zeta_tilde.stderr]));
    let ratio = 2.0 * df.estimate / dw.estimate;
    let t2 = tol.unwrap_or_else(|| {
        3.0 * quad(&[
            report.d_s.stderr,
            ratio * quad(&[df.stderr / df.estimate, dw.stderr / dw.estimate]),
        ])
    });
    let residuals = vec![
        ResidualCheck {
            name: "d_w - d_f - zeta_tilde".into(),
            value: r1,
            tol: t1,
            passed: r1.abs() <= t1 + 1e-12,
        },
        ResidualCheck {
            name: "d_s - 2 d_f / d_w".into(),
            value: r2,
            tol: t2,
            passed: r2.abs() <= t2 + 1e-12,
        },
    ];
    let chain = inequality_chain(report);
    Verdict {
        passed: residuals.iter().all(|r| r.passed) && chain.iter().all(|c| c.satisfied),
        residuals,
        chain,
    }
}

// ---------------------------------------------------------------------------
// Electrical bounds on walk quantities

/// `R_eff(ρ ↔ B̄(ρ,R)) · vol(ρ,R)`, an upper bound on `E[σ_R]`.
pub fn commute_bound(net: &Network, scale: usize, opts: &SolveOptions) -> Result<f64> {
    let root = net.root();
    let mut search = BallSearch::new(net.vertex_count());
    let m = annular_modulus_with(net, root, 0, scale, opts, &mut search)?;
    Ok(m.reff * search.volume(net, root, scale))
}

/// Exact `E[σ_R]` from the root: total Green-kernel mass of `B(ρ,R)`.
pub fn expected_exit_time(net: &Network, scale: usize, opts: &SolveOptions) -> Result<f64> {
    let root = net.root();
    net.ensure_interior(root, scale)?;
    let ball = net.graph_ball(root, scale)?;
    let g = crate::resistance::green_kernel(net, root, &ball, opts)?;
    Ok(ball.iter().map(|&y| g.at(y)).sum())
}

// ---------------------------------------------------------------------------
// Mass-transport diagnostics

/// Transport functionals with finite support.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Transport {
    /// `F(ρ,x) = c_ρ 1{d(ρ,x) = 1}`.
    Neighbor,
    /// `F(x,y) = c_x c_y / c(K) · 1{y ∈ K(x)} · 1{x interior to K(x)}` for the
    /// exponential-clock partition with rates `c` and diameter `delta`.
    ClusterMass { delta: f64 },
}

impl Transport {
    pub fn support_radius(&self) -> usize {
        match self {
            Transport::Neighbor => 1,
            Transport::ClusterMass { delta } => delta.ceil() as usize,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MtpDiagnostic {
    pub functional: Transport,
    pub n_seeds: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_stderr: f64,
    pub rhs_stderr: f64,
    /// Mean of the paired differences over its standard error.
    pub z_score: f64,
}

fn sample_by_conductance(net: &Network, rng: &mut Rng) -> usize {
    let total = net.total_conductance();
    let mut u = rng.random::<f64>() * total;
    for (v, &c) in net.vertex_conductances().iter().enumerate() {
        u -= c;
        if u < 0.0 {
            return v;
        }
    }
    (0..net.vertex_count()).rev().find(|&v| net.vertex_conductance(v) > 0.0).unwrap_or(0)
}

fn environment(spec: &GeneratorSpec, seed: u64, i: usize) -> Result<Network> {
    let net = spec.clone().with_seed(derive_seed(seed, i as u64)).build()?;
    if !(net.total_conductance() > 0.0) {
        return Err(Error::Structural("environment has no positive conductance".into()));
    }
    Ok(net)
}

fn transport_sides(net: &Network, f: Transport, rho: usize, partition_seed: u64) -> Result<(f64, f64)> {
    let c = net.vertex_conductances();
    match f {
        Transport::Neighbor => {
            let mut seen = std::collections::BTreeSet::new();
            for &(y, _) in net.neighbors(rho) {
                if y != rho {
                    seen.insert(y);
                }
            }
            let out = seen.len() as f64;
            let back: f64 = seen.iter().map(|&y| c[y]).sum::<f64>() / c[rho];
            Ok((out, back))
        }
        Transport::ClusterMass { delta } => {
            let p = exp_clock_partition(net, delta, c, partition_seed)?;
            let interior = |x: usize| net.neighbors(x).iter().all(|&(_, id)| p.kept[id]);
            let members = p.cluster_of(rho);
            let mass: f64 = members.iter().map(|&v| c[v]).sum();
            let out = if interior(rho) { 1.0 } else { 0.0 };
            let back = members.iter().filter(|&&x| interior(x)).map(|&x| c[x]).sum::<f64>() / mass;
            Ok((out, back))
        }
    }
}

/// Monte-Carlo estimates of `E[(1/c_ρ) Σ_x F(ρ,x)]` and the transposed sum
/// over independent environments with `ρ` drawn proportionally to `c`.
pub fn mtp_diagnostic(spec: &GeneratorSpec, f: Transport, n_seeds: usize, seed: u64) -> Result<MtpDiagnostic> {
    if n_seeds < 2 {
        return Err(Error::input("MTP diagnostic needs at least 2 seeds"));
    }
    let pairs: Vec<(f64, f64)> = (0..n_seeds)
        .into_par_iter()
        .map(|i| -> Result<(f64, f64)> {
            let net = environment(spec, seed, i)?;
            let radius = f.support_radius();
            if net.distance_to_boundary(net.root()) <= radius {
                return Err(Error::input(format!(
                    "transport support radius {radius} exceeds the truncation around the root"
                )));
            }
            let mut rng = substream(seed, tag::MTP, i as u64);
            let rho = sample_by_conductance(&net, &mut rng);
            transport_sides(&net, f, rho, derive_seed(seed ^ tag::PARTITION, i as u64))
        })
        .collect::<Result<_>>()?;
    let lhs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let rhs: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let diff: Vec<f64> = pairs.iter().map(|p| p.0 - p.1).collect();
    let (l, ls) = mean_stderr(&lhs);
    let (r, rs) = mean_stderr(&rhs);
    let (d, ds) = mean_stderr(&diff);
    Ok(MtpDiagnostic {
        functional: f,
        n_seeds,
        lhs: l,
        rhs: r,
        lhs_stderr: ls,
        rhs_stderr: rs,
        z_score: z(d, ds),
    })
}

fn z(mean: f64, se: f64) -> f64 {
    if se > 0.0 {
        mean / se
    } else if mean == 0.0 {
        0.0
    } else {
        mean.signum() * f64::INFINITY
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwapTest {
    pub n_seeds: usize,
    /// Mean of `log(c_{X₁}/c_{X₀})`.
    pub mean: f64,
    pub stderr: f64,
    pub z_score: f64,
}

/// Reversibility check: with `ρ ∼ c` and one walk step, `log(c_{X₁}/c_{X₀})`
/// is antisymmetric under the swap, so its mean is zero.
pub fn swap_test(spec: &GeneratorSpec, n_seeds: usize, seed: u64) -> Result<SwapTest> {
    if n_seeds < 2 {
        return Err(Error::input("swap test needs at least 2 seeds"));
    }
    let d: Vec<f64> = (0..n_seeds)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let net = environment(spec, seed, i)?;
            let mut rng = substream(seed, tag::MTP, (1 << 32) + i as u64);
            let x0 = sample_by_conductance(&net, &mut rng);
            let x1 = TransitionSampler::new(&net).step(x0, &mut rng);
            Ok((net.vertex_conductance(x1) / net.vertex_conductance(x0)).ln())
        })
        .collect::<Result<_>>()?;
    let (mean, stderr) = mean_stderr(&d);
    Ok(SwapTest {
        n_seeds,
        mean,
        stderr,
        z_score: z(mean, stderr),
    })
}
