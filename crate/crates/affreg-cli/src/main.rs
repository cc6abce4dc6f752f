use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use affreg::harness::{
    generate_distortion, register, run_battery, save_pointset_with_header, save_transform,
    DistortionKind, DistortionSpec, ExperimentSpec, RegisterConfig,
};

/// Estimate 2-D affine transforms aligning point-sets with an elitist
/// real-coded genetic algorithm.
#[derive(Parser)]
#[command(name = "affreg", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Align a deformed point-set to a static one with a single GA run.
    Register {
        /// Static (reference) point-set file.
        #[arg(long = "static")]
        static_path: PathBuf,
        /// Deformed point-set file to align.
        #[arg(long = "deformed")]
        deformed_path: PathBuf,
        #[arg(long, default_value_t = 120)]
        pop_size: usize,
        #[arg(long, default_value_t = 500)]
        generations: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Freeze the match order across generations (noise-free objective).
        #[arg(long)]
        fixed_order: bool,
        /// Directory for the recovered transform and warped point-set.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run seeded GA batteries over several population sizes and write
    /// convergence CSVs plus per-run transforms.
    Battery {
        #[arg(long = "static")]
        static_path: PathBuf,
        #[arg(long = "deformed")]
        deformed_path: PathBuf,
        /// Comma-separated population sizes.
        #[arg(long, value_delimiter = ',', default_value = "30,60,120,240,480")]
        pop_sizes: Vec<usize>,
        /// Independent runs per population size; run i uses base-seed + i.
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, default_value_t = 500)]
        generations: usize,
        #[arg(long)]
        base_seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Apply a known affine distortion (optionally with Gaussian jitter) to
    /// a point-set, producing a synthetic deformed set and its ground truth.
    Distort {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Rotation in radians, counter-clockwise.
        #[arg(long, default_value_t = 0.0)]
        rotation: f64,
        #[arg(long, default_value_t = 0.0)]
        tx: f64,
        #[arg(long, default_value_t = 0.0)]
        ty: f64,
        /// Per-coordinate Gaussian noise applied after the affine map.
        #[arg(long, default_value_t = 0.0)]
        noise_sigma: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output path for the distorted point-set.
        #[arg(long)]
        out: PathBuf,
        /// Optional output path for the ground-truth transform.
        #[arg(long)]
        truth_out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            // 1 for unreadable or malformed data, 2 for invalid settings.
            ExitCode::from(if err.is_data_error() { 1 } else { 2 })
        }
    }
}

fn dispatch(command: Command) -> affreg::Result<()> {
    match command {
        Command::Register {
            static_path,
            deformed_path,
            pop_size,
            generations,
            seed,
            fixed_order,
            out_dir,
        } => {
            let config = RegisterConfig {
                population_size: pop_size,
                generations,
                seed,
                fixed_order,
                out_dir: Some(out_dir.clone()),
            };
            let outcome = register(&static_path, &deformed_path, &config)?;
            println!("final fitness: {:.6}", outcome.fitness());
            if let Some(rmse) = outcome.rmse_by_index {
                println!("rmse (index correspondence): {rmse:.6}");
            }
            println!("transform: {}", out_dir.join("transform.txt").display());
            println!("warped:    {}", out_dir.join("warped.txt").display());
            Ok(())
        }
        Command::Battery {
            static_path,
            deformed_path,
            pop_sizes,
            runs,
            generations,
            base_seed,
            out_dir,
        } => {
            let spec = ExperimentSpec {
                static_path,
                deformed_path,
                population_sizes: pop_sizes,
                generations,
                runs_per_size: runs,
                base_seed,
                output_dir: out_dir.clone(),
            };
            let summary = run_battery(&spec)?;
            println!("pop_size  runs  mean_best     min_best      max_best");
            for row in &summary.rows {
                println!(
                    "{:>8}  {:>4}  {:<12.6}  {:<12.6}  {:<12.6}",
                    row.pop_size,
                    row.runs,
                    row.mean_best_fitness,
                    row.min_best_fitness,
                    row.max_best_fitness
                );
            }
            println!("outputs under {}", out_dir.display());
            Ok(())
        }
        Command::Distort {
            input,
            scale,
            rotation,
            tx,
            ty,
            noise_sigma,
            seed,
            out,
            truth_out,
        } => {
            let s = affreg::harness::load_pointset(&input)?;
            let spec = DistortionSpec {
                kind: if noise_sigma > 0.0 {
                    DistortionKind::PerturbedAffine
                } else {
                    DistortionKind::Affine
                },
                scale,
                rotation,
                tx,
                ty,
                noise_sigma,
                seed,
            };
            let (deformed, truth) = generate_distortion(&s, &spec)?;
            let header = vec![format!(
                "input={} scale={scale} rotation={rotation} tx={tx} ty={ty} noise_sigma={noise_sigma} seed={seed}",
                input.display()
            )];
            save_pointset_with_header(&deformed, &out, &header)?;
            println!("distorted {} points -> {}", deformed.len(), out.display());
            if let Some(truth_path) = truth_out {
                save_transform(&truth, &truth_path, &header)?;
                println!("ground truth -> {}", truth_path.display());
            }
            Ok(())
        }
    }
}
