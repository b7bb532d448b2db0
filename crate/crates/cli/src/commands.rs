use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use regbench::advisor::{advise, compute_diagnostics};
use regbench::analysis::effect_table;
use regbench::errorcontrol::{
    construct_gaussian_knockoffs, knockoff_filter, stability_select, StabilityConfig,
};
use regbench::harness::{export_summary, run_sweep, Preset, ResultStore, RunRecord};
use regbench::rng::{child_rng, Stream};
use regbench::spacegen::{simulate, write_dataset_csv};
use regbench::{CvPlan, Error, Result, SimConfig, SolverOptions};
use serde_json::json;

use crate::config::FileConfig;
use crate::data::read_table;
use crate::{Cli, Command, ReportTable, SimArgs};

const STORE_FILE: &str = "results.jsonl";
const OUT_ENV: &str = "REGBENCH_OUT";

/// Flags resolved against the config file and the environment.
struct Context {
    out: PathBuf,
    seed: u64,
    workers: usize,
    alpha_grid: Option<Vec<f64>>,
    file: FileConfig,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let out = std::env::var_os(OUT_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .or_else(|| cli.out.clone())
            .or_else(|| file.out.clone())
            .unwrap_or_else(|| PathBuf::from("regbench-out"));
        let workers = cli
            .workers
            .or(file.workers)
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
        if workers == 0 {
            return Err(Error::InvalidConfig("--workers must be at least 1".into()));
        }
        Ok(Context {
            out,
            seed: cli.seed.or(file.seed).unwrap_or(0),
            workers,
            alpha_grid: cli.alpha_grid.clone().map(|g| g.0).or_else(|| file.alpha_grid.clone()),
            file,
        })
    }

    fn store(&self) -> ResultStore {
        ResultStore::new(self.out.join(STORE_FILE))
    }

    fn plan(&self, n: usize) -> CvPlan {
        let plan = CvPlan::paper(n);
        match &self.alpha_grid {
            Some(grid) => plan.with_alpha_grid(grid.clone()),
            None => plan,
        }
    }

    fn create(&self, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
        fs::create_dir_all(&self.out)?;
        let path = self.out.join(name);
        let file = File::create(&path)?;
        Ok((path, BufWriter::new(file)))
    }

    fn write_json(&self, name: &str, value: &serde_json::Value) -> Result<PathBuf> {
        let (path, mut w) = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(path)
    }

    fn load_records(&self) -> Result<Vec<RunRecord>> {
        let store = self.store();
        if !store.path().exists() {
            return Err(Error::Empty(format!("no result store at {}", store.path().display())));
        }
        let records = store.load()?;
        if records.is_empty() {
            return Err(Error::Empty(format!("{} holds no records", store.path().display())));
        }
        Ok(records)
    }
}

fn sim_config(args: &SimArgs, seed: u64) -> SimConfig {
    SimConfig {
        features_p: args.p,
        rank_ratio: args.rank_ratio,
        dispersion: args.dispersion,
        beta_dist: args.beta,
        sparsity: args.sparsity,
        snr: args.snr,
        sample_n: args.n,
        seed,
    }
}

pub fn dispatch(cli: Cli) -> Result<()> {
    let ctx = Context::new(&cli)?;
    match cli.command {
        Command::Generate(args) => generate(&ctx, &args),
        Command::Run { preset } => run(&ctx, preset),
        Command::Analyze { metric, group_by } => analyze(&ctx, &metric, &group_by),
        Command::Knockoff { sim, q } => knockoff(&ctx, &sim, q),
        Command::Stability { data, response, pi_thr, m_iters } => {
            stability(&ctx, &data, response.as_deref(), pi_thr, m_iters)
        }
        Command::Advise { data, objective, prior, response } => {
            advise_cmd(&ctx, &data, objective, prior, response.as_deref())
        }
        Command::Report { table, top } => report(&ctx, table, top),
    }
}

fn generate(ctx: &Context, args: &SimArgs) -> Result<()> {
    let sim = simulate(&sim_config(args, ctx.seed))?;
    let (data_path, mut w) = ctx.create("dataset.csv")?;
    write_dataset_csv(&sim.dataset, &mut w)?;
    w.flush()?;
    let truth = json!({
        "config": sim.config,
        "canonical": sim.config.canonical(),
        "beta": sim.truth.beta.to_vec(),
        "support": sim.truth.support,
        "eigenvalues": sim.covariance.spectrum.lambdas,
        "kappa": sim.covariance.spectrum.kappa,
        "signal_variance": sim.truth.signal_sigma2,
        "noise_variance": sim.truth.noise_sigma2,
        "dataset_hash": sim.dataset.content_hash(),
    });
    let truth_path = ctx.write_json("truth.json", &truth)?;
    println!("wrote {} and {}", data_path.display(), truth_path.display());
    Ok(())
}

fn run(ctx: &Context, preset: Option<Preset>) -> Result<()> {
    let preset = preset.or(ctx.file.preset).unwrap_or(Preset::Desk);
    let mut spec = ctx.file.grid_spec(preset)?;
    spec.base_seed = ctx.seed;
    if let Some(grid) = &ctx.alpha_grid {
        spec.cv.alpha_grid = grid.clone();
    }
    let store = ctx.store();
    let report = run_sweep(&spec, &store, ctx.workers)?;
    println!(
        "planned {} runs: {} already done, {} written ({} failed) -> {}",
        report.planned,
        report.already_done,
        report.written,
        report.failed,
        store.path().display()
    );
    Ok(())
}

fn analyze(ctx: &Context, metric: &str, group_by: &[regbench::Hyperparameter]) -> Result<()> {
    let records = ctx.load_records()?;
    let table = export_summary(&records, group_by, metric)?;
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    let (path, mut w) = ctx.create(&format!("summary_{metric}.csv"))?;
    w.write_all(&buf)?;
    w.flush()?;
    print!("{}", String::from_utf8_lossy(&buf));
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn knockoff(ctx: &Context, args: &SimArgs, q: f64) -> Result<()> {
    let sim = simulate(&sim_config(args, ctx.seed))?;
    let x = sim.dataset.train_x();
    let y = sim.dataset.train_y();
    let xk = construct_gaussian_knockoffs(x.view(), &sim.covariance, &mut child_rng(ctx.seed, Stream::Knockoffs))?;
    let result = knockoff_filter(
        x.view(),
        xk.view(),
        y.view(),
        q,
        &ctx.plan(x.nrows()),
        &SolverOptions::default(),
        &mut child_rng(ctx.seed, Stream::CrossValidation),
    )?;
    let truth = &sim.truth.support;
    let false_hits = result.selected.iter().filter(|j| !truth.contains(j)).count();
    let true_hits = result.selected.len() - false_hits;
    let fdp = if result.selected.is_empty() { 0.0 } else { false_hits as f64 / result.selected.len() as f64 };
    let power = if truth.is_empty() { 0.0 } else { true_hits as f64 / truth.len() as f64 };
    let tau = if result.tau.is_finite() { json!(result.tau) } else { json!("inf") };
    let value = json!({
        "config": sim.config.canonical(),
        "q": q,
        "tau": tau,
        "selected": result.selected,
        "w_stats": result.w_stats,
        "elected_alpha": result.elected_alpha,
        "saturated": result.saturated,
        "true_support": truth,
        "false_discovery_proportion": fdp,
        "power": power,
    });
    let path = ctx.write_json("knockoff.json", &value)?;
    println!(
        "selected {} feature(s) at q = {q}: {:?} (FDP {fdp:.3}, power {power:.3}) -> {}",
        result.selected.len(),
        result.selected,
        path.display()
    );
    Ok(())
}

fn stability(ctx: &Context, data: &Path, response: Option<&str>, pi_thr: f64, m_iters: usize) -> Result<()> {
    let table = read_table(data, response)?;
    let mut cfg = StabilityConfig { threshold: pi_thr, iterations: m_iters, ..StabilityConfig::default() };
    if let Some(grid) = &ctx.alpha_grid {
        cfg.lambda_grid = grid.clone();
    }
    let result = stability_select(table.x.view(), table.y.view(), &cfg, &mut child_rng(ctx.seed, Stream::Stability))?;
    let names: Vec<&str> = result.stable_set.iter().map(|&j| table.feature_names[j].as_str()).collect();
    let max_probs = result.max_probs();
    let value = json!({
        "response": table.response_name,
        "features": table.feature_names,
        "lambda_grid": result.lambda_grid,
        "iterations": result.iterations,
        "threshold": result.threshold,
        "max_selection_probability": max_probs.to_vec(),
        "selection_probs": result.selection_probs.rows().into_iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
        "stable_set": names,
        "notes": result.notes,
    });
    let path = ctx.write_json("stability.json", &value)?;
    println!("stable set at pi_thr = {pi_thr}: {names:?}");
    for note in &result.notes {
        println!("note: {note}");
    }
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn advise_cmd(
    ctx: &Context,
    data: &Path,
    objective: regbench::advisor::Objective,
    prior: regbench::advisor::SparsityPrior,
    response: Option<&str>,
) -> Result<()> {
    let table = read_table(data, response)?;
    let n = table.x.nrows();
    let diag = compute_diagnostics(
        table.x.view(),
        table.y.view(),
        &ctx.plan(n),
        &mut child_rng(ctx.seed, Stream::CrossValidation),
    )?;
    let rec = advise(&diag, objective, prior);
    println!("objective:      {objective}");
    println!("recommendation: {}", rec.method);
    println!("regime:         {}", rec.regime);
    println!("n = {}, p = {}, n/p = {:.2}", diag.n, diag.p, diag.n_over_p);
    println!("kappa(X) = {:.4e}", diag.kappa_design);
    println!(
        "LassoCV alpha = {:.4e} (alpha_max {:.4e}, saturated: {})",
        diag.elected_alpha, diag.alpha_max, diag.saturated
    );
    println!("why: {}", rec.rationale);
    for c in &rec.caveats {
        println!("caveat: {c}");
    }
    for note in &diag.notes {
        println!("note: {note}");
    }
    let path = ctx.write_json("advice.json", &json!({ "diagnostics": diag, "recommendation": rec }))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn report(ctx: &Context, table: ReportTable, top: usize) -> Result<()> {
    let records = ctx.load_records()?;
    let metrics: Vec<&str> = match table {
        ReportTable::F1 => vec!["f1"],
        ReportTable::L2 => vec!["rel_l2"],
        ReportTable::Rmse => vec!["rmse_test"],
        ReportTable::Timing => vec![],
        ReportTable::All => vec!["f1", "rel_l2", "rmse_test"],
    };
    for metric in metrics {
        let effects = effect_table(&records, metric, None, top)?;
        let (path, mut w) = ctx.create(&format!("effects_{metric}.csv"))?;
        effects.write_csv(&mut w)?;
        w.flush()?;
        println!("{metric}: {} pair(s), {} interaction(s) -> {}", effects.pairs.len(), effects.interactions.len(), path.display());
        for note in &effects.notes {
            println!("  note: {note}");
        }
    }
    if matches!(table, ReportTable::Timing | ReportTable::All) {
        let timing = export_summary(&records, &[], "fit_seconds")?;
        let (path, mut w) = ctx.create("timing.csv")?;
        timing.write_csv(&mut w)?;
        w.flush()?;
        for row in &timing.rows {
            println!("  {:<16} mean {:.4}s  median {:.4}s  (n = {})", row.method.to_string(), row.mean, row.median, row.count);
        }
        println!("timing -> {}", path.display());
    }
    Ok(())
}
