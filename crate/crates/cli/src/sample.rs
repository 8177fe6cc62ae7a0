//! Parallel chain driver for the `sample` command.
//!
//! Chains run on scoped threads, one per chain. Each chain is a pure function of its
//! index, so results are assembled in chain order and output is identical for
//! identical inputs, whatever the thread scheduling.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::thread;
use std::time::Instant;

use elstat_core::gas::{
    run_chain_with, ChainState, CovarianceAccumulator, Ensemble, GasModel, RadialHistogram, SamplerConfig,
    SecondMoments, MIN_CONFIGURATIONS,
};
use elstat_core::quad::MeanVar;
use elstat_core::Complex64;
use serde_json::{json, Value};

use crate::output::num;
use crate::spec::PlanarStat;
use crate::{CliError, CliResult};

/// Histogram bins used for the support estimates.
const DENSITY_BINS: usize = 400;

#[derive(Debug, Clone)]
pub struct SampleRequest {
    pub model: GasModel,
    pub sweeps: u64,
    pub seed: u64,
    pub chains: usize,
    pub sampler: SamplerConfig,
    pub out: Option<PathBuf>,
    /// Optional pair of linear statistics whose covariance is estimated.
    pub statistics: Option<(PlanarStat, PlanarStat)>,
}

struct ChainOutput {
    state: ChainState,
    rows: Vec<(u64, Complex64)>,
    abs2: MeanVar,
    hist: Option<RadialHistogram>,
    moments: SecondMoments,
    cov: CovarianceAccumulator,
}

fn planar(model: &GasModel) -> bool {
    matches!(model.ensemble(), Ensemble::Ginibre | Ensemble::Elliptic { .. } | Ensemble::Induced { .. })
}

/// Radius comfortably beyond the expected support.
fn histogram_radius(model: &GasModel) -> f64 {
    let n = model.n() as f64;
    match model.ensemble() {
        Ensemble::Elliptic { tau } => 2.0 * (1.0 + tau) * n.sqrt(),
        Ensemble::Induced { alpha } => 2.0 * ((1.0 + alpha) * n).sqrt(),
        _ => 2.0 * n.sqrt(),
    }
    .max(4.0)
}

fn run_one(req: &SampleRequest, chain: usize) -> CliResult<ChainOutput> {
    let keep_rows = req.out.is_some();
    let mut rows = Vec::new();
    let mut abs2 = MeanVar::default();
    let mut hist = if planar(&req.model) { Some(RadialHistogram::new(histogram_radius(&req.model), DENSITY_BINS)?) } else { None };
    let mut moments = SecondMoments::default();
    let mut cov = CovarianceAccumulator::default();
    let config = req.sampler.with_chain(chain as u64);
    let state = run_chain_with(&req.model, req.sweeps, req.seed, &config, |sweep, pos| {
        if keep_rows {
            rows.extend(pos.iter().map(|&z| (sweep, z)));
        }
        abs2.push(pos.iter().map(|z| z.norm_sqr()).sum::<f64>() / pos.len() as f64);
        if let Some(h) = hist.as_mut() {
            h.push(pos);
        }
        moments.push(pos);
        if let Some((f, g)) = &req.statistics {
            cov.push(pos.iter().map(|&z| f.eval(z)).sum(), pos.iter().map(|&z| g.eval(z)).sum());
        }
    })?;
    Ok(ChainOutput { state, rows, abs2, hist, moments, cov })
}

fn write_csv(path: &PathBuf, outputs: &[ChainOutput], n: usize) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["chain", "sweep", "particle", "re", "im"]).map_err(io)?;
    for (chain, out) in outputs.iter().enumerate() {
        for (k, (sweep, z)) in out.rows.iter().enumerate() {
            w.write_record([
                chain.to_string(),
                sweep.to_string(),
                (k % n).to_string(),
                format!("{:.16e}", z.re),
                format!("{:.16e}", z.im),
            ])
            .map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn across(values: impl Iterator<Item = f64>) -> (f64, Option<f64>) {
    let mut mv = MeanVar::default();
    for v in values {
        mv.push(v);
    }
    let se = (mv.count() >= 2).then(|| mv.stderr());
    (mv.mean(), se)
}

/// Run all chains and build the summary record.
pub fn run_sample(req: &SampleRequest) -> CliResult<Value> {
    if req.chains == 0 {
        return Err(CliError::arg("at least one chain is required"));
    }
    let start = Instant::now();
    let results: Vec<CliResult<ChainOutput>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..req.chains).map(|c| scope.spawn(move || run_one(req, c))).collect();
        handles.into_iter().map(|h| h.join().expect("sampler thread panicked")).collect()
    });
    let outputs = results.into_iter().collect::<CliResult<Vec<_>>>()?;

    if let Some(path) = &req.out {
        write_csv(path, &outputs, req.model.n())?;
    }

    let n = req.model.n() as f64;
    let mut estimates = serde_json::Map::new();
    let mut stderr = serde_json::Map::new();
    let (acc, acc_se) = across(outputs.iter().map(|o| o.state.acceptance_rate));
    estimates.insert("acceptance_rate".into(), num(acc));
    stderr.insert("acceptance_rate".into(), acc_se.map_or(Value::Null, num));
    let (m2, m2_se) = across(outputs.iter().map(|o| o.abs2.mean()));
    estimates.insert("mean_abs2".into(), num(m2));
    // a single chain falls back to the naive within-chain error
    let m2_se = m2_se.unwrap_or_else(|| outputs[0].abs2.stderr());
    stderr.insert("mean_abs2".into(), num(m2_se));
    estimates.insert("step_scale".into(), Value::Array(outputs.iter().map(|o| num(o.state.step_scale)).collect()));
    estimates.insert("energy_per_particle".into(), Value::Array(outputs.iter().map(|o| num(o.state.energy / n)).collect()));

    let retained: usize = outputs.iter().map(|o| o.abs2.count() as usize).sum();
    if retained >= MIN_CONFIGURATIONS {
        if let Some(mut pooled) = outputs[0].hist.clone() {
            for o in &outputs[1..] {
                pooled.merge(o.hist.as_ref().expect("all chains share the ensemble"))?;
            }
            let d = pooled.finish()?;
            let sq = n.sqrt();
            estimates.insert(
                "density".into(),
                json!({
                    "edge_quantile": num(d.quantile_edge),
                    "edge_half_density": d.half_density_edge.map_or(Value::Null, num),
                    "bulk_density": d.mean_density(0.2 * sq, 0.8 * sq).map_or(Value::Null, num),
                    "overflow_fraction": num(d.overflow_fraction),
                }),
            );
            let mut mom = outputs[0].moments;
            for o in &outputs[1..] {
                mom.merge(&o.moments);
            }
            let (a, b) = mom.semi_axes()?;
            estimates.insert("semi_axes".into(), json!([num(a), num(b)]));
        }
    }
    if req.statistics.is_some() {
        let per_chain = outputs.iter().map(|o| o.cov.covariance()).collect::<Result<Vec<_>, _>>()?;
        let (c, se) = across(per_chain.iter().copied());
        estimates.insert("covariance".into(), num(c));
        stderr.insert("covariance".into(), se.map_or(Value::Null, num));
    }

    Ok(json!({
        "estimates": Value::Object(estimates),
        "stderr": Value::Object(stderr),
        "chains": outputs.iter().map(|o| json!({
            "chain": o.state.chain,
            "sweeps": o.state.sweep_count,
            "accepted": o.state.accepted,
            "proposed": o.state.proposed,
            "acceptance_rate": num(o.state.acceptance_rate),
        })).collect::<Vec<_>>(),
        "retained_configurations": retained,
        "runtime_ms": start.elapsed().as_millis() as u64,
    }))
}
