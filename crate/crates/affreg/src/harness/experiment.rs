//! Experiment drivers: single registration runs and multi-run batteries with
//! CSV convergence traces.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ga::{self, GaConfig, RunRecord};
use crate::geometry::{rmse_by_index, AffineParams, PointSet};
use crate::harness::io::{fmt_f64, load_pointset, save_pointset_with_header, save_transform};

/// A battery of seeded GA runs over several population sizes on one
/// static/deformed pair. Run `i` of every size uses seed `base_seed + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub static_path: PathBuf,
    pub deformed_path: PathBuf,
    pub population_sizes: Vec<usize>,
    pub generations: usize,
    pub runs_per_size: usize,
    pub base_seed: u64,
    pub output_dir: PathBuf,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            static_path: PathBuf::new(),
            deformed_path: PathBuf::new(),
            population_sizes: vec![30, 60, 120, 240, 480],
            generations: 500,
            runs_per_size: 100,
            base_seed: 1,
            output_dir: PathBuf::from("battery-out"),
        }
    }
}

impl ExperimentSpec {
    fn validate(&self) -> Result<()> {
        if self.runs_per_size == 0 {
            return Err(Error::InvalidConfig("runs per size must be at least 1".into()));
        }
        if self.population_sizes.is_empty() {
            return Err(Error::InvalidConfig("no population sizes given".into()));
        }
        for &size in &self.population_sizes {
            self.ga_config(size, 0).validate()?;
        }
        Ok(())
    }

    fn ga_config(&self, population_size: usize, run: usize) -> GaConfig {
        GaConfig {
            population_size,
            generations: self.generations,
            seed: self.base_seed.wrapping_add(run as u64),
            ..GaConfig::default()
        }
    }
}

/// Aggregate of the final best fitnesses for one population size.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub pop_size: usize,
    pub runs: usize,
    pub mean_best_fitness: f64,
    pub min_best_fitness: f64,
    pub max_best_fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatterySummary {
    pub rows: Vec<SummaryRow>,
}

/// Execute the battery and write, under `spec.output_dir`:
///
/// * `convergence.csv` -- header `pop_size,run,generation,best_fitness`, one
///   row per (size, run, generation), generation counted from 1;
/// * `transforms/p<size>_r<run>.txt` -- each run's recovered transform;
/// * `warped_best_p<size>.txt` -- the deformed set warped by the best run of
///   that size;
/// * `summary.csv` -- mean/min/max final best fitness per size.
///
/// Population sizes are processed in ascending order (duplicates dropped);
/// within one size, runs with the `parallel` feature execute concurrently,
/// but all outputs are ordered by (size, run) and the battery is
/// byte-reproducible from an identical spec.
pub fn run_battery(spec: &ExperimentSpec) -> Result<BatterySummary> {
    spec.validate()?;
    let s = load_pointset(&spec.static_path)?;
    let d = load_pointset(&spec.deformed_path)?;

    let mut sizes = spec.population_sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();

    let transforms_dir = spec.output_dir.join("transforms");
    create_dir(&transforms_dir)?;

    let provenance = vec![
        format!(
            "static={} deformed={}",
            spec.static_path.display(),
            spec.deformed_path.display()
        ),
        format!(
            "base_seed={} generations={} runs_per_size={} (seed of run i = base_seed + i)",
            spec.base_seed, spec.generations, spec.runs_per_size
        ),
    ];

    let csv_path = spec.output_dir.join("convergence.csv");
    let mut csv = BufWriter::new(fs::File::create(&csv_path).map_err(|source| Error::Io {
        path: csv_path.clone(),
        source,
    })?);
    let io_err = |source| Error::Io {
        path: csv_path.clone(),
        source,
    };
    for line in &provenance {
        writeln!(csv, "# {line}").map_err(io_err)?;
    }
    writeln!(csv, "pop_size,run,generation,best_fitness").map_err(io_err)?;

    let mut summary_rows = Vec::with_capacity(sizes.len());
    for &size in &sizes {
        let records = run_batch(spec, &s, &d, size)?;

        for (run, record) in records.iter().enumerate() {
            for (generation, fitness) in record.best_fitness_per_generation.iter().enumerate() {
                writeln!(csv, "{size},{run},{},{}", generation + 1, fmt_f64(*fitness))
                    .map_err(io_err)?;
            }
        }
        csv.flush().map_err(io_err)?;

        let mut best_run = 0;
        let mut final_fitnesses = Vec::with_capacity(records.len());
        for (run, record) in records.iter().enumerate() {
            let fitness = record.final_best.fitness;
            if fitness < records[best_run].final_best.fitness {
                best_run = run;
            }
            final_fitnesses.push(fitness);

            let mut header = provenance.clone();
            header.push(format!(
                "pop_size={size} run={run} seed={} final_fitness={}",
                record.seed,
                fmt_f64(fitness)
            ));
            save_transform(
                &record.final_best.genes,
                transforms_dir.join(format!("p{size:03}_r{run:03}.txt")),
                &header,
            )?;
        }

        let best = &records[best_run];
        let mut header = provenance.clone();
        header.push(format!(
            "pop_size={size} best_run={best_run} seed={} final_fitness={}",
            best.seed,
            fmt_f64(best.final_best.fitness)
        ));
        save_pointset_with_header(
            &best.final_best.genes.warp(&d),
            spec.output_dir.join(format!("warped_best_p{size:03}.txt")),
            &header,
        )?;

        summary_rows.push(SummaryRow {
            pop_size: size,
            runs: final_fitnesses.len(),
            mean_best_fitness: final_fitnesses.iter().sum::<f64>() / final_fitnesses.len() as f64,
            min_best_fitness: final_fitnesses.iter().copied().fold(f64::INFINITY, f64::min),
            max_best_fitness: final_fitnesses
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max),
        });
    }
    drop(csv);

    let summary = BatterySummary { rows: summary_rows };
    write_summary(&summary, &spec.output_dir.join("summary.csv"), &provenance)?;
    Ok(summary)
}

fn run_batch(spec: &ExperimentSpec, s: &PointSet, d: &PointSet, size: usize) -> Result<Vec<RunRecord>> {
    let run_one = |run: usize| ga::run(s, d, &spec.ga_config(size, run));
    #[cfg(feature = "parallel")]
    {
        (0..spec.runs_per_size).into_par_iter().map(run_one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..spec.runs_per_size).map(run_one).collect()
    }
}

fn write_summary(summary: &BatterySummary, path: &Path, provenance: &[String]) -> Result<()> {
    let mut out = String::new();
    for line in provenance {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str("pop_size,runs,mean_best_fitness,min_best_fitness,max_best_fitness\n");
    for row in &summary.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.pop_size,
            row.runs,
            fmt_f64(row.mean_best_fitness),
            fmt_f64(row.min_best_fitness),
            fmt_f64(row.max_best_fitness)
        ));
    }
    fs::write(path, out).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Settings for a single registration run.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisterConfig {
    pub population_size: usize,
    pub generations: usize,
    pub seed: u64,
    pub fixed_order: bool,
    /// When set, the recovered transform and warped set are written here.
    pub out_dir: Option<PathBuf>,
}

impl Default for RegisterConfig {
    fn default() -> Self {
        RegisterConfig {
            population_size: 120,
            generations: 500,
            seed: 1,
            fixed_order: false,
            out_dir: None,
        }
    }
}

/// Result of a single registration run.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisterOutcome {
    pub record: RunRecord,
    /// The deformed set under the recovered transform.
    pub warped: PointSet,
    /// Index-correspondence RMSE against the static set, when cardinalities
    /// match (meaningful for synthetic data with known correspondence).
    pub rmse_by_index: Option<f64>,
}

impl RegisterOutcome {
    pub fn params(&self) -> &AffineParams {
        &self.record.final_best.genes
    }

    pub fn fitness(&self) -> f64 {
        self.record.final_best.fitness
    }
}

/// Run one GA registration of `deformed_path` onto `static_path`.
pub fn register<P: AsRef<Path>, Q: AsRef<Path>>(
    static_path: P,
    deformed_path: Q,
    config: &RegisterConfig,
) -> Result<RegisterOutcome> {
    let static_path = static_path.as_ref();
    let deformed_path = deformed_path.as_ref();

    let ga_config = GaConfig {
        population_size: config.population_size,
        generations: config.generations,
        seed: config.seed,
        fixed_order: config.fixed_order,
        ..GaConfig::default()
    };
    ga_config.validate()?;

    let s = load_pointset(static_path)?;
    let d = load_pointset(deformed_path)?;
    let record = ga::run(&s, &d, &ga_config)?;
    let warped = record.final_best.genes.warp(&d);
    let rmse = rmse_by_index(&warped, &s);

    if let Some(dir) = &config.out_dir {
        create_dir(dir)?;
        let mut header = vec![
            format!(
                "static={} deformed={}",
                static_path.display(),
                deformed_path.display()
            ),
            format!(
                "pop_size={} generations={} seed={} fixed_order={}",
                config.population_size, config.generations, config.seed, config.fixed_order
            ),
            format!("final_fitness={}", fmt_f64(record.final_best.fitness)),
        ];
        if let Some(rmse) = rmse {
            header.push(format!("rmse_by_index={}", fmt_f64(rmse)));
        }
        save_transform(&record.final_best.genes, dir.join("transform.txt"), &header)?;
        save_pointset_with_header(&warped, dir.join("warped.txt"), &header)?;
    }

    Ok(RegisterOutcome {
        record,
        warped,
        rmse_by_index: rmse,
    })
}
