use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};

use dpdp_core::experiments::{
    delivery_density, deltas_table, grid_search, replication_table, report_from_tables, run_batch, summary_table,
    AggregateReport, Cell, KpiReport, Table,
};
use dpdp_core::policy::DEFAULT_BIG_M;
use dpdp_core::{
    generate_scenario, read_scenario, run_episode, write_scenario, CfaParams, EpisodeOptions, PolicyKind, PolicySpec,
    ScenarioConfig,
};

use crate::config::FileConfig;
use crate::{Common, Failure, OutFormat, PolicyArgs};

type CmdResult = Result<(), Failure>;

fn usage<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Usage(e.into())
}

fn runtime<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Runtime(e.into())
}

fn load(common: &Common) -> Result<FileConfig, Failure> {
    let mut cfg = FileConfig::load(common.config.as_deref()).map_err(usage)?;
    if let Some(n) = common.replications {
        cfg.replications = n;
    }
    if let Some(s) = common.seed_base {
        cfg.seed_base = s;
    }
    cfg.scenario.validate().map_err(|e| usage(anyhow!("scenario: {e}")))?;
    if cfg.replications == 0 {
        return Err(usage(anyhow!("replications must be at least 1")));
    }
    Ok(cfg)
}

fn parse_policy(name: &str, engine: CfaParams) -> anyhow::Result<PolicySpec> {
    let kind = match name {
        "cfa" => PolicyKind::Cfa,
        "dsp" => PolicyKind::Dsp { big_m: DEFAULT_BIG_M },
        _ => match name.strip_prefix("liml-").map(str::parse::<usize>) {
            Some(Ok(m)) => return Ok(PolicySpec { engine, ..PolicySpec::liml(m, 0.0) }),
            _ => bail!("unknown policy {name:?}; expected cfa, dsp or liml-<m>"),
        },
    };
    Ok(PolicySpec { kind, engine })
}

fn apply_policy(cfg: &mut FileConfig, args: &PolicyArgs) -> Result<(), Failure> {
    if let Some(name) = &args.policy {
        cfg.policy = parse_policy(name, cfg.policy.engine.clone()).map_err(usage)?;
    }
    if let PolicyKind::Liml { .. } = cfg.policy.kind {
        // The limited-length policies are defined by a dominating urgency weight.
        cfg.policy.engine.beta = dpdp_core::policy::LIML_BETA;
    }
    if let Some(a) = args.alpha {
        cfg.policy.engine.alpha = a;
    }
    if let Some(b) = args.beta {
        cfg.policy.engine.beta = b;
    }
    cfg.policy.validate().map_err(|e| usage(anyhow!("policy: {e}")))
}

fn write_table(table: &Table, dir: &Path, name: &str, format: OutFormat) -> Result<PathBuf, Failure> {
    let path = dir.join(format!("{name}.{}", format.ext()));
    table.write_to(&path).with_context(|| format!("writing {}", path.display())).map_err(runtime)?;
    Ok(path)
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())).map_err(runtime)
}

fn print_summary(r: &AggregateReport) {
    println!(
        "{}: replications={} penalty_per_request={:.4} (se {:.4}) pct_late={:.3} mean_lateness_min={:.3} total_travel_min={:.2}",
        r.label,
        r.replications(),
        r.penalty_per_request.mean,
        r.penalty_per_request.std_error,
        r.pct_late.mean,
        r.mean_lateness_min.mean,
        r.total_travel_min.mean
    );
}

pub fn generate(common: &Common, out: &Path) -> CmdResult {
    let cfg = load(common)?;
    create_dir(out)?;
    for i in 0..cfg.replications as u64 {
        let seed = cfg.seed_base + i;
        let s = generate_scenario(&ScenarioConfig { seed, ..cfg.scenario.clone() });
        let path = out.join(format!("scenario_{seed}.txt"));
        fs::write(&path, write_scenario(&s)).with_context(|| format!("writing {}", path.display())).map_err(runtime)?;
    }
    println!("wrote {} scenarios to {}", cfg.replications, out.display());
    Ok(())
}

fn write_report(report: &AggregateReport, out: &Path, format: OutFormat) -> CmdResult {
    create_dir(out)?;
    write_table(&replication_table(report), out, "replications", format)?;
    write_table(&deltas_table(report), out, "deltas", format)?;
    write_table(&summary_table(std::slice::from_ref(report)), out, "summary", format)?;
    Ok(())
}

pub fn run(
    common: &Common,
    policy: &PolicyArgs,
    scenario: Option<&Path>,
    trace: Option<&Path>,
    out: &Path,
    format: OutFormat,
) -> CmdResult {
    let mut cfg = load(common)?;
    apply_policy(&mut cfg, policy)?;
    let report = match scenario {
        None => run_batch(&cfg.experiment()).map_err(runtime)?,
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(runtime)?;
            let s = read_scenario(&text).with_context(|| format!("parsing {}", path.display())).map_err(usage)?;
            let mut p = cfg.policy.build_traced(&s.config, s.config.seed, trace.is_some());
            let log = run_episode(&s, p.as_mut(), &EpisodeOptions::default()).map_err(runtime)?;
            if let Some(t) = trace {
                let mut text = String::from(dpdp_core::EpochTrace::HEADER);
                text.push('\n');
                for line in p.take_trace() {
                    text.push_str(&line.to_string());
                    text.push('\n');
                }
                fs::write(t, text).with_context(|| format!("writing {}", t.display())).map_err(runtime)?;
            }
            AggregateReport::from_rows(cfg.policy.label(), vec![KpiReport::from_log(&log, s.config.speed)])
        }
    };
    write_report(&report, out, format)?;
    print_summary(&report);
    Ok(())
}

pub fn tune(
    common: &Common,
    policy: &PolicyArgs,
    alphas: Option<Vec<f64>>,
    betas: Option<Vec<f64>>,
    out: &Path,
    format: OutFormat,
) -> CmdResult {
    let mut cfg = load(common)?;
    apply_policy(&mut cfg, policy)?;
    let alphas = alphas.unwrap_or_else(|| cfg.tune.alphas.clone());
    let betas = betas.unwrap_or_else(|| cfg.tune.betas.clone());
    if alphas.is_empty() || betas.is_empty() {
        return Err(usage(anyhow!("alpha and beta grids must be non-empty")));
    }
    let result = grid_search(&cfg.experiment(), &alphas, &betas).map_err(runtime)?;
    create_dir(out)?;
    write_table(&result.surface_table(), out, "surface", format)?;
    let (a, b) = result.best_pair();
    println!("best alpha={a} beta={b}");
    print_summary(result.best_report());
    Ok(())
}

fn read_table(dir: &Path, name: &str) -> Result<Table, Failure> {
    for ext in ["csv", "jsonl"] {
        let path = dir.join(format!("{name}.{ext}"));
        if path.exists() {
            return Table::read_from(&path).with_context(|| format!("reading {}", path.display())).map_err(runtime);
        }
    }
    Err(runtime(anyhow!("no {name}.csv or {name}.jsonl in {}", dir.display())))
}

fn label_of(dir: &Path) -> Result<String, Failure> {
    let summary = read_table(dir, "summary")?;
    match summary.rows.first().and_then(|r| summary.column_index("policy").map(|k| &r[k])) {
        Some(Cell::Text(s)) => Ok(s.clone()),
        _ => Ok(dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()),
    }
}

pub fn report(inputs: &[PathBuf], bin_s: Option<f64>, config: Option<&Path>, out: &Path, format: OutFormat) -> CmdResult {
    let cfg = FileConfig::load(config).map_err(usage)?;
    let bin_s = bin_s.unwrap_or(cfg.report.bin_s);
    if !(bin_s > 0.0) {
        return Err(usage(anyhow!("bin width must be positive")));
    }
    let mut reports = Vec::new();
    for dir in inputs {
        let label = label_of(dir)?;
        let r = report_from_tables(&label, &read_table(dir, "replications")?, &read_table(dir, "deltas")?)
            .map_err(|e| runtime(anyhow!("{}: {e}", dir.display())))?;
        reports.push(r);
    }
    let mut density = Table::new(["policy", "bin_center_min", "density"]);
    for r in &reports {
        for b in delivery_density(&r.pooled_deltas(), bin_s) {
            density.push(vec![r.label.clone().into(), b.center_min.into(), b.density.into()]);
        }
    }
    create_dir(out)?;
    write_table(&summary_table(&reports), out, "summary", format)?;
    write_table(&density, out, "density", format)?;
    for r in &reports {
        print_summary(r);
    }
    Ok(())
}
