use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sparse_bench::{
    run_bench, run_density_study, write_density_csv, write_timing_csv, BenchConfig, BenchError, SummaryRow,
    DEFAULT_DENSITIES,
};
use sparse_infer::layers::{ForwardStrategy, Strategy};
use sparse_infer::network::{BenchmarkNet, Variant, DESK_INPUT, DESK_SCALE, FULL_INPUT};

/// Density, batch and worker sweeps for the sparse inference engine.
///
/// Without a subcommand, runs the timing benchmark.
#[derive(Parser, Debug)]
#[command(name = "sparse-bench", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    #[command(flatten)]
    bench: SweepArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Time forward passes over the density/batch/worker grid.
    Bench(SweepArgs),
    /// Record layer-by-layer densities of sparse-input runs, with and
    /// without activations.
    Density(SweepArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Auto,
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// vgg16_desk, vgg16_desk_noact, yolo_desk or yolo_desk_nobn.
    #[arg(long, default_value = "vgg16_desk", value_parser = parse_net)]
    net: BenchmarkNet,

    /// Channel width multiplier in (0, 1] [default: 0.25, or 1 with --full-scale].
    #[arg(long)]
    scale: Option<f64>,

    /// sparse_filter, sparse_input or dense_baseline [default: sparse_filter;
    /// sparse_input for the density study].
    #[arg(long, value_parser = parse_variant)]
    variant: Option<Variant>,

    /// Densities in percent.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_DENSITIES.map(|d| d * 100.0))]
    density: Vec<f64>,

    /// Batch sizes.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    batch: Vec<usize>,

    /// Worker counts.
    #[arg(long, value_delimiter = ',', default_value = "1", env = "SPARSE_INFER_WORKERS")]
    workers: Vec<usize>,

    #[arg(long, value_enum, default_value = "auto")]
    strategy: StrategyArg,

    /// Largest batch run with strategy 1 under --strategy auto.
    #[arg(long, default_value_t = 4)]
    threshold: usize,

    /// Timed repetitions per grid point (at least 3).
    #[arg(long, default_value_t = 3)]
    reps: usize,

    /// Untimed runs before each grid point (at least 1).
    #[arg(long, default_value_t = 1)]
    warmup: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// FSNW weight file; random weights are used otherwise.
    #[arg(long)]
    weights: Option<PathBuf>,

    #[arg(long)]
    timing_csv: Option<PathBuf>,

    #[arg(long)]
    density_csv: Option<PathBuf>,

    /// Full-width networks on 224x224 inputs.
    #[arg(long)]
    full_scale: bool,
}

fn parse_net(s: &str) -> Result<BenchmarkNet, String> {
    s.parse().map_err(|e: sparse_infer::Error| e.to_string())
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: sparse_infer::Error| e.to_string())
}

impl SweepArgs {
    fn config(&self, default_variant: Variant) -> BenchConfig {
        let (scale, input_size) = if self.full_scale {
            (self.scale.unwrap_or(1.0), FULL_INPUT)
        } else {
            (self.scale.unwrap_or(DESK_SCALE), DESK_INPUT)
        };
        let strategy = match self.strategy {
            StrategyArg::Auto => ForwardStrategy::Auto {
                threshold: self.threshold,
            },
            StrategyArg::One => ForwardStrategy::Fixed(Strategy::I),
            StrategyArg::Two => ForwardStrategy::Fixed(Strategy::II),
        };
        BenchConfig {
            net: self.net,
            scale,
            input_size,
            variant: self.variant.unwrap_or(default_variant),
            densities: self.density.iter().map(|d| d / 100.0).collect(),
            batches: self.batch.clone(),
            workers: self.workers.clone(),
            strategy,
            reps: self.reps,
            warmup: self.warmup,
            seed: self.seed,
            weights: self.weights.clone(),
            timing_csv: self.timing_csv.clone(),
            density_csv: self.density_csv.clone(),
        }
    }
}

fn print_summary(rows: &[SummaryRow]) {
    println!(
        "{:<15} {:>8} {:>6} {:>8} {:>9} {:>12} {:>12} {:>8}",
        "variant", "density", "batch", "workers", "strategy", "median_s", "min_s", "speedup"
    );
    for r in rows {
        let speedup = r.speedup.map_or_else(|| "-".to_string(), |s| format!("{s:.2}x"));
        println!(
            "{:<15} {:>7}% {:>6} {:>8} {:>9} {:>12.6} {:>12.6} {:>8}",
            r.variant,
            r.density * 100.0,
            r.batch,
            r.workers,
            r.strategy,
            r.median,
            r.min,
            speedup
        );
    }
}

/// `dir/name.csv` -> `dir/name_<suffix>.csv`.
fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{suffix}"),
    };
    path.with_file_name(name)
}

fn bench(cfg: &BenchConfig) -> Result<(), BenchError> {
    let report = run_bench(cfg)?;
    print_summary(&report.summary);
    if let Some(path) = &cfg.timing_csv {
        write_timing_csv(path, &report.rows)?;
    }
    if let (Some(path), Some(rows)) = (&cfg.density_csv, &report.densities) {
        write_density_csv(path, rows)?;
    }
    Ok(())
}

fn density(cfg: &BenchConfig) -> Result<(), BenchError> {
    let study = run_density_study(cfg)?;
    let mut tables = vec![(study.net, &study.rows)];
    if let Some((kind, rows)) = &study.ablated {
        tables.push((*kind, rows));
    }
    for (net, rows) in &tables {
        println!("{net}");
        println!("{:>8} {:>6} {:<11} {:>8}", "input", "layer", "kind", "density");
        for r in rows.iter() {
            println!(
                "{:>7}% {:>6} {:<11} {:>8.4}",
                r.input_density * 100.0,
                r.layer_index,
                r.layer_kind,
                r.output_density
            );
        }
    }
    if let Some(path) = &cfg.density_csv {
        write_density_csv(path, &study.rows)?;
        if let Some((kind, rows)) = &study.ablated {
            write_density_csv(&suffixed(path, kind.name()), rows)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        None => bench(&cli.bench.config(Variant::SparseFilter)),
        Some(Command::Bench(args)) => bench(&args.config(Variant::SparseFilter)),
        Some(Command::Density(args)) => density(&args.config(Variant::SparseInput)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sparse-bench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
