use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use skis::evaluator::bench::{
    bench_ie, bench_im, default_delta, ground_truth, IeConfig, ImConfig, TruthConfig,
};
use skis::evaluator::{exact_influence, monte_carlo_influence_parallel};
use skis::graph::generate::preferential_attachment;
use skis::graph::load_edge_list;
use skis::maximizer::greedy;
use skis::oracle::{estimate_influence, normalize_seeds};
use skis::{
    fixtures, DiffusionModel, DssaConfig, GammaTable, GrowthPolicy, NodeId, ProbabilisticGraph,
    QueryRecord, RngStream, Sketch, SkisError,
};

use crate::args::*;
use crate::error::{CliError, CliResult};

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Build(args) => build(args),
        Command::Estimate(args) => estimate(args),
        Command::Maximize(args) => maximize(args),
        Command::Groundtruth(args) => groundtruth(args),
        Command::Bench(BenchCommand::Ie(args)) => bench_ie_cmd(args),
        Command::Bench(BenchCommand::Im(args)) => bench_im_cmd(args),
        Command::Generate(args) => generate(args),
    }
}

fn workers(run: &RunArgs) -> usize {
    run.workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1)
}

fn load_graph(args: &GraphArgs, seed: u64) -> CliResult<Option<ProbabilisticGraph>> {
    if let Some(name) = &args.fixture {
        return Ok(Some(fixtures::find(name)?.load()?));
    }
    let Some(path) = &args.graph else {
        return Ok(None);
    };
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let graph = load_edge_list(BufReader::new(file), args.model, args.weights, seed).map_err(
        |e| match e {
            SkisError::Io(io) => CliError::io(path, io),
            other => CliError::from(other),
        },
    )?;
    Ok(Some(graph))
}

fn require_graph(args: &GraphArgs, seed: u64) -> CliResult<ProbabilisticGraph> {
    load_graph(args, seed)?.ok_or_else(|| CliError::usage("--graph or --fixture is required"))
}

fn read_sketch(path: &Path) -> CliResult<Sketch> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(Sketch::read_from(BufReader::new(file))?)
}

fn parse_set(text: &str) -> CliResult<Vec<NodeId>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<NodeId>()
                .map_err(|_| CliError::usage(format!("bad node id {t:?}")))
        })
        .collect()
}

fn seed_sets(args: &SeedSetArgs) -> CliResult<Vec<Vec<NodeId>>> {
    let mut sets = Vec::new();
    for text in &args.seeds {
        sets.push(parse_set(text)?);
    }
    if let Some(path) = &args.seed_file {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        for line in BufReader::new(file).lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            sets.push(parse_set(line)?);
        }
    }
    if sets.is_empty() {
        return Err(CliError::usage(
            "no seed sets given (use --seeds or --seed-file)",
        ));
    }
    if sets.iter().any(|s| s.is_empty()) {
        return Err(CliError::usage("empty seed set"));
    }
    Ok(sets)
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::io(p, e))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    let line = serde_json::to_string(value).map_err(|e| CliError::usage(e.to_string()))?;
    writeln!(out, "{line}")?;
    Ok(())
}

#[derive(Serialize)]
struct BuildStats {
    kind: skis::SketchKind,
    #[serde(rename = "T")]
    samples: usize,
    total_entries: usize,
    #[serde(rename = "Gamma")]
    gamma_total: f64,
    build_seconds: f64,
    bytes: u64,
}

fn build(args: BuildArgs) -> CliResult<()> {
    let graph = require_graph(&args.graph, args.run.seed)?;
    let n = graph.node_count();
    let policy = match (args.h, args.count) {
        (_, Some(count)) => GrowthPolicy::FixedCount(count),
        (Some(h), None) => GrowthPolicy::total_size_h(h, n)?,
        (None, None) => GrowthPolicy::total_size_h(5.0, n)?,
    };
    let gamma = GammaTable::compute(&graph);
    let started = Instant::now();
    let sketch = Sketch::build(
        &graph,
        &gamma,
        args.kind,
        policy,
        args.run.seed,
        workers(&args.run),
    )?;
    let build_seconds = started.elapsed().as_secs_f64();

    let file = File::create(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let mut w = BufWriter::new(file);
    sketch.write_to(&mut w)?;
    w.flush()?;
    drop(w);
    let bytes = std::fs::metadata(&args.out)?.len();

    let stats = BuildStats {
        kind: sketch.kind(),
        samples: sketch.len(),
        total_entries: sketch.total_entries(),
        gamma_total: sketch.gamma_total(),
        build_seconds,
        bytes,
    };
    print_json(&mut *output(None)?, &stats)
}

fn estimate(args: EstimateArgs) -> CliResult<()> {
    let sketch = read_sketch(&args.sketch)?;
    if let Some(graph) = load_graph(&args.graph, 0)? {
        if graph.content_hash() != sketch.graph_hash() || graph.node_count() != sketch.node_count()
        {
            return Err(SkisError::Incompatible(format!(
                "sketch was built from a different graph (hash {:016x}, graph {:016x})",
                sketch.graph_hash(),
                graph.content_hash()
            ))
            .into());
        }
    }
    let sets = seed_sets(&args.sets)?;
    let mut out = output(None)?;
    for set in sets {
        let est = estimate_influence(&sketch, &set)?;
        let normalized = normalize_seeds(&set, sketch.node_count())?;
        print_json(&mut *out, &QueryRecord::new(normalized, &est))?;
    }
    out.flush()?;
    Ok(())
}

fn maximize(args: MaximizeArgs) -> CliResult<()> {
    let mut out = output(None)?;
    match args.algo {
        Algo::Greedy => {
            let path = args
                .sketch
                .as_deref()
                .ok_or_else(|| CliError::usage("--algo greedy requires --sketch"))?;
            let sketch = read_sketch(path)?;
            print_json(&mut *out, &greedy(&sketch, args.k)?)?;
        }
        Algo::Dssa => {
            let graph = require_graph(&args.graph, args.run.seed)?;
            let gamma = GammaTable::compute(&graph);
            let config = DssaConfig {
                k: args.k,
                epsilon: args.epsilon,
                delta: args
                    .delta
                    .unwrap_or_else(|| default_delta(graph.node_count())),
                seed: args.run.seed,
                workers: workers(&args.run),
                kind: args.kind,
                lambda2_override: None,
            };
            print_json(&mut *out, &skis::maximizer::dssa(&graph, &gamma, &config)?)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn groundtruth(args: GroundtruthArgs) -> CliResult<()> {
    let graph = require_graph(&args.graph, args.run.seed)?;
    let sets = seed_sets(&args.sets)?;
    let workers = workers(&args.run);
    let delta = args
        .delta
        .unwrap_or_else(|| default_delta(graph.node_count()));
    let truth = TruthConfig {
        allow_exact: !args.mc,
        mc_epsilon: args.epsilon,
        mc_delta: Some(delta),
    };
    let mut out = output(args.out.as_deref())?;
    writeln!(out, "seed_set,value,method,epsilon,delta,samples_used")?;
    for (i, set) in sets.iter().enumerate() {
        let seed = RngStream::derive_seed(args.run.seed, i as u64);
        let t = if args.exact {
            exact_influence(&graph, set)?
        } else if args.mc {
            monte_carlo_influence_parallel(&graph, set, args.epsilon, delta, seed, workers)?
        } else {
            ground_truth(&graph, set, &truth, seed, workers)?
        };
        let method = serde_json::to_value(t.method).map_err(|e| CliError::usage(e.to_string()))?;
        let normalized = normalize_seeds(set, graph.node_count())?;
        let ids: Vec<String> = normalized.iter().map(|v| v.to_string()).collect();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            ids.join(" "),
            t.value,
            method.as_str().unwrap_or_default(),
            t.epsilon,
            t.delta,
            t.samples_used
        )?;
    }
    out.flush()?;
    Ok(())
}

fn bench_ie_cmd(args: BenchIeArgs) -> CliResult<()> {
    let graph = require_graph(&args.graph, args.run.seed)?;
    let config = IeConfig {
        hs: args.hs.clone(),
        kinds: args.kinds.clone(),
        seed_set_sizes: args.sizes.clone(),
        query_count: args.queries,
        truth: TruthConfig {
            allow_exact: true,
            mc_epsilon: args.truth_epsilon,
            mc_delta: args.truth_delta,
        },
        seed: args.run.seed,
        workers: workers(&args.run),
    };
    let report = bench_ie(&graph, &config)?;
    report.write_csv(output(args.out.as_deref())?)?;
    if let Some(path) = &args.summary {
        report.write_summary_csv(output(Some(path))?)?;
    }
    Ok(())
}

fn bench_im_cmd(args: BenchImArgs) -> CliResult<()> {
    let graph = require_graph(&args.graph, args.run.seed)?;
    let mut config = ImConfig::new(
        args.k.clone(),
        args.budgets.clone(),
        args.trials,
        args.run.seed,
    );
    config.algorithms = args.algorithms.clone();
    config.truth = TruthConfig::monte_carlo(args.truth_epsilon, args.truth_delta);
    config.dssa_epsilon = args.dssa_epsilon;
    config.workers = workers(&args.run);
    let report = bench_im(&graph, &config)?;
    report.write_csv(output(args.out.as_deref())?)?;
    Ok(())
}

fn generate(args: GenerateArgs) -> CliResult<()> {
    let mut rng = RngStream::new(args.seed, 0);
    let graph = preferential_attachment(args.nodes, args.m, DiffusionModel::IC, &mut rng)?;
    let mut out = output(args.out.as_deref())?;
    for (u, v, _) in graph.edges() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()?;
    Ok(())
}
