use std::path::Path;

use serde_json::{json, Value};

use exponent_lab::estimators::{mtp_diagnostic, swap_test, verify_einstein, Transport};
use exponent_lab::io::{network_from_json, network_to_json};
use exponent_lab::pipeline::{self, EstimateConfig};
use exponent_lab::resistance::annular_modulus;
use exponent_lab::structures::{build_multiscale_weight, ScaleWeightOptions};
use exponent_lab::walks::{dyadic_grid, simulate_walks, ScaleSamples, Start, WalkConfig};
use exponent_lab::{Error, ExponentReport, Network, Result, ScaleSeries, SolveOptions, Window};

use crate::output::{emit, pretty, provenance, write_atomic};
use crate::{
    CsvArgs, EstimateArgs, Functional, GenerateArgs, MtpArgs, ResistArgs, StretchArgs, VerifyArgs, WalkArgs,
};

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_net(path: &Path) -> Result<(Network, Value)> {
    let (net, prov) = network_from_json(&read(path)?)?;
    Ok((net, prov.unwrap_or(Value::Null)))
}

fn load_report(path: &Path) -> Result<ExponentReport> {
    Ok(serde_json::from_str(&read(path)?)?)
}

pub fn generate(a: &GenerateArgs) -> Result<()> {
    let spec = a.generator.spec(a.seed);
    let net = spec.build()?;
    let mut prov = provenance("generate", Some(a.seed), a);
    prov["generator"] = spec.provenance();
    emit(a.out.as_deref(), &network_to_json(&net, Some(&prov)))
}

pub fn resist(a: &ResistArgs) -> Result<()> {
    let (net, input) = load_net(&a.net)?;
    let center = match a.center.as_str() {
        "root" => net.root(),
        s => s
            .parse::<usize>()
            .map_err(|_| Error::Input(format!("center must be a vertex id or \"root\", got \"{s}\"")))?,
    };
    if center >= net.vertex_count() {
        return Err(Error::Input(format!(
            "center vertex {center} is out of range for a network with {} vertices",
            net.vertex_count()
        )));
    }
    let opts = a.tol.map(SolveOptions::with_tol).unwrap_or_default();
    let m = annular_modulus(&net, center, a.inner, a.outer, &opts)?;
    if !a.json {
        let line = format!(
            "center={center} r={} R={} reff={} modulus={} residual={:.3e}\n",
            a.inner, a.outer, m.reff, m.value, m.residual
        );
        return emit(a.out.as_deref(), &line);
    }
    let mut prov = provenance("resist", None, a);
    prov["input"] = input;
    let doc = json!({
        "center": center,
        "r": a.inner,
        "R": a.outer,
        "reff": if m.reff.is_finite() { json!(m.reff) } else { json!("inf") },
        "modulus": m.value,
        "residual": m.residual,
        "provenance": prov,
    });
    emit(a.out.as_deref(), &pretty(&doc)?)
}

fn summarize(samples: &[ScaleSamples], raw: bool) -> Vec<Value> {
    samples
        .iter()
        .map(|s| {
            let (mean, stderr) = s.mean_with(|x| x as f64);
            let mut v = json!({
                "scale": s.scale,
                "resolved": s.count_resolved(),
                "censored": s.count_censored(),
                "censor_frac": s.censor_frac(),
                "mean": mean,
                "stderr": stderr,
            });
            if raw {
                v["samples"] = json!(s.samples);
            }
            v
        })
        .collect()
}

pub fn walk(a: &WalkArgs) -> Result<()> {
    let (net, input) = load_net(&a.net)?;
    let mut cfg = WalkConfig::new(a.steps, a.walkers, a.seed);
    if let Some(v) = a.start {
        cfg.start = Start::Vertex(v);
    }
    let r_max = a.r_max.unwrap_or(net.root_eccentricity() as u64).max(1);
    let n_max = a.n_max.unwrap_or(a.steps).max(1);
    let stats = simulate_walks(&net, &cfg, &dyadic_grid(1, r_max), &dyadic_grid(1, n_max))?;
    let mut prov = provenance("walk", Some(a.seed), a);
    prov["input"] = input;
    let doc = json!({
        "start": stats.start,
        "n_steps": stats.n_steps,
        "n_walkers": stats.n_walkers,
        "sigma": summarize(&stats.sigma, a.raw),
        "max_disp": summarize(&stats.max_disp, a.raw),
        "elementary_violations": stats.elementary_violations(),
        "provenance": prov,
    });
    emit(a.out.as_deref(), &pretty(&doc)?)
}

pub fn stretch(a: &StretchArgs) -> Result<()> {
    let (net, input) = load_net(&a.net)?;
    let opts = ScaleWeightOptions {
        lambda: a.lambda,
        ..Default::default()
    };
    let w = build_multiscale_weight(&net, a.eps, a.dstar, a.kmax, a.seed, &opts)?;
    let mut prov = provenance("stretch", Some(a.seed), a);
    prov["input"] = input;
    let doc = json!({
        "values": w.weight.values,
        "l2_mass": w.weight.l2_mass(&net),
        "scales": w.scales,
        "profile": w.profile,
        "provenance": prov,
    });
    emit(a.out.as_deref(), &pretty(&doc)?)
}

fn window(v: &Option<Vec<u64>>, name: &str) -> Result<Option<Window>> {
    match v.as_deref() {
        None => Ok(None),
        Some([lo, hi]) => Window::new(*lo, *hi)
            .map(Some)
            .map_err(|e| Error::Input(format!("{name}: {e}"))),
        Some(_) => Err(Error::Input(format!("{name} needs exactly two values lo,hi"))),
    }
}

fn series_file_name(s: &ScaleSeries) -> String {
    let name = |v: Value| v.as_str().map(str::to_owned).unwrap_or_default();
    format!(
        "{}_{}.csv",
        name(serde_json::to_value(s.kind).unwrap_or_default()),
        name(serde_json::to_value(s.statistic).unwrap_or_default())
    )
}

fn write_csvs(dir: &Path, series: &[ScaleSeries]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for s in series {
        write_atomic(&dir.join(series_file_name(s)), &s.to_csv())?;
    }
    Ok(())
}

pub fn estimate(a: &EstimateArgs) -> Result<()> {
    let mut cfg = EstimateConfig::new(a.generator.spec(a.seed))?;
    cfg.seed = a.seed;
    if let Some(n) = a.environments {
        cfg.environments = n;
    }
    if let Some(n) = a.walkers {
        cfg.walkers = n;
    }
    if let Some(w) = window(&a.r_window, "r-window")? {
        cfg.r_window = w;
    }
    if let Some(w) = window(&a.n_window, "n-window")? {
        cfg.n_window = w;
    }
    if let Some(d) = a.delta {
        cfg.delta = d;
    }
    if a.max_steps.is_some() {
        cfg.max_steps = a.max_steps;
    }
    if let Some(c) = a.heat_kernel_cap {
        cfg.heat_kernel_cap = c;
    }
    log::info!("estimating on {:?} with {} environments", cfg.generator.family, cfg.environments);
    let mut report = pipeline::estimate(&cfg)?;
    let core = std::mem::take(&mut report.provenance);
    let mut prov = provenance("estimate", Some(a.seed), a);
    prov["estimate_config"] = core["config"].clone();
    report.provenance = prov;
    if let Some(dir) = &a.csv_dir {
        write_csvs(dir, &report.series)?;
    }
    emit(a.out.as_deref(), &pretty(&report)?)
}

pub fn verify(a: &VerifyArgs) -> Result<()> {
    let report = load_report(&a.report)?;
    let verdict = verify_einstein(&report, a.tol);
    let mut prov = provenance("verify", None, a);
    prov["input"] = report.provenance.clone();
    let doc = json!({
        "passed": verdict.passed,
        "residuals": verdict.residuals,
        "chain": verdict.chain,
        "provenance": prov,
    });
    emit(a.out.as_deref(), &pretty(&doc)?)
}

pub fn mtp_check(a: &MtpArgs) -> Result<()> {
    let spec = a.generator.spec(a.seed);
    let f = match a.functional {
        Functional::Neighbor => Transport::Neighbor,
        Functional::ClusterMass => Transport::ClusterMass { delta: a.cluster_delta },
    };
    let diag = mtp_diagnostic(&spec, f, a.seeds, a.seed)?;
    let swap = if a.swap { Some(swap_test(&spec, a.seeds, a.seed)?) } else { None };
    let doc = json!({
        "diagnostic": diag,
        "swap": swap,
        "provenance": provenance("mtp-check", Some(a.seed), a),
    });
    emit(a.out.as_deref(), &pretty(&doc)?)
}

pub fn csv(a: &CsvArgs) -> Result<()> {
    let report = load_report(&a.report)?;
    if report.series.is_empty() {
        return Err(Error::Input(format!("{} holds no scale series", a.report.display())));
    }
    write_csvs(&a.out_dir, &report.series)
}
