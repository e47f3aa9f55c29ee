//! Ensemble driver: deterministic blocks of trajectories run in parallel.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{
    checkpoint_steps, edge_energy_fraction, wigner_validity_warning, IntegrateError,
    PropagationOptions, Propagator, TrajectoryRecord, Workspace,
};
use crate::grid::Representation;
use crate::noise::{sample_initial_field, stream, NoiseSpec, Purpose};
use crate::observables::{imaginary_ratio, Accumulator, EnsembleResult, Observation, Observer};

/// Trajectories per work unit. Blocks are merged in index order, so the
/// result does not depend on how many threads ran them.
const BLOCK: usize = 32;

#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    pub propagator: Propagator,
    pub noise: NoiseSpec,
    /// Coherent amplitude `⟨φ⟩` at ζ = 0.
    pub mean_field: Vec<Complex64>,
    pub options: PropagationOptions,
    /// Modes for quadrature measurements, each with `Σ|LO|²Δτ = 1`.
    pub local_oscillators: Vec<Vec<Complex64>>,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Largest tolerated fraction of diverged trajectories.
    pub divergence_threshold: f64,
    /// Keep full checkpoint records of this many lowest-index trajectories.
    pub keep_fields: usize,
}

impl EnsembleConfig {
    pub fn new(propagator: Propagator, noise: NoiseSpec, mean_field: Vec<Complex64>) -> Self {
        EnsembleConfig {
            propagator,
            noise,
            mean_field,
            options: PropagationOptions::default(),
            local_oscillators: Vec::new(),
            threads: None,
            divergence_threshold: 0.01,
            keep_fields: 0,
        }
    }
}

struct BlockOutput {
    acc: Accumulator,
    diverged: Vec<(u64, f64)>,
    kept: Vec<TrajectoryRecord>,
}

fn run_block(
    config: &EnsembleConfig,
    observer: &Observer,
    zetas: &[f64],
    range: std::ops::Range<usize>,
) -> Result<BlockOutput, IntegrateError> {
    let grid = config.propagator.grid();
    let mut ws = Workspace::new(grid);
    let mut scratch = observer.scratch();
    let mut acc = Accumulator::new(grid, zetas, config.local_oscillators.len());
    let mut diverged = Vec::new();
    let mut kept = Vec::new();
    for t in range {
        let trajectory = t as u64;
        let mut rng = stream(grid.master_seed, trajectory, 0, Purpose::InitialField);
        let initial = sample_initial_field(&config.mean_field, &config.noise, &mut rng)?;
        let keep = t < config.keep_fields;
        let mut observations: Vec<Observation> = Vec::with_capacity(zetas.len());
        let mut snapshots = Vec::new();
        let outcome = config.propagator.propagate_with(
            initial,
            &config.noise,
            trajectory,
            &config.options,
            &mut ws,
            |_, state| {
                observations.push(observer.observe(state, &mut scratch));
                if keep {
                    snapshots.push(state.clone());
                }
            },
        );
        match outcome {
            Ok((_, diagnostics)) => {
                acc.push(&observations);
                if keep {
                    kept.push(TrajectoryRecord {
                        trajectory,
                        snapshots,
                        diagnostics,
                    });
                }
            }
            Err(IntegrateError::Overflow { zeta, .. }) => {
                log::debug!("trajectory {trajectory} diverged at ζ = {zeta}");
                diverged.push((trajectory, zeta));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(BlockOutput {
        acc,
        diverged,
        kept,
    })
}

/// Runs `trajectory_count` trajectories and accumulates their observables.
///
/// Trajectory `t` draws its initial noise from stream `(seed, t, 0)` and its
/// step noise from `(seed, t, n)`, so any subset of trajectories can be
/// reproduced alone.
pub fn run_ensemble(
    config: &EnsembleConfig,
    trajectory_count: usize,
) -> Result<EnsembleResult, IntegrateError> {
    if trajectory_count == 0 {
        return Err(IntegrateError::NoTrajectories);
    }
    let grid = config.propagator.grid().clone();
    if config.noise.representation() != grid.representation {
        return Err(IntegrateError::Representation {
            state: config.noise.representation(),
            run: grid.representation,
        });
    }
    if config.mean_field.len() != grid.modes {
        return Err(IntegrateError::Length {
            expected: grid.modes,
            got: config.mean_field.len(),
        });
    }
    let steps = checkpoint_steps(&grid, &config.options.checkpoints)?;
    let zetas: Vec<f64> = steps.iter().map(|&s| s as f64 * grid.dzeta).collect();
    let observer = Observer::new(
        &grid,
        config.noise.photon_number(),
        config.local_oscillators.clone(),
    )
    .map_err(|e| IntegrateError::Checkpoints(e.to_string()))?;

    let mut warnings: Vec<String> = config.propagator.warnings().to_vec();
    if grid.representation == Representation::Wigner {
        if let Some(w) =
            wigner_validity_warning(&config.mean_field, &grid, config.noise.photon_number())
        {
            warnings.push(w);
        }
    }

    let ranges: Vec<std::ops::Range<usize>> = (0..trajectory_count)
        .step_by(BLOCK)
        .map(|start| start..(start + BLOCK).min(trajectory_count))
        .collect();
    let work = || {
        ranges
            .par_iter()
            .map(|r| run_block(config, &observer, &zetas, r.clone()))
            .collect::<Vec<_>>()
    };
    let blocks = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| IntegrateError::ThreadPool(e.to_string()))?
            .install(work),
        None => work(),
    };

    let mut acc = Accumulator::new(&grid, &zetas, config.local_oscillators.len());
    let mut diverged = Vec::new();
    let mut kept = Vec::new();
    for block in blocks {
        let block = block?;
        acc.merge(&block.acc);
        diverged.extend(block.diverged);
        kept.extend(block.kept);
    }
    let completed = acc.count() as usize;
    let fraction = diverged.len() as f64 / trajectory_count as f64;
    if completed == 0 || fraction > config.divergence_threshold {
        return Err(IntegrateError::TooManyDivergences {
            diverged: diverged.len(),
            total: trajectory_count,
            threshold: config.divergence_threshold,
        });
    }
    if !diverged.is_empty() {
        warnings.push(format!(
            "{} of {trajectory_count} trajectories diverged and were excluded",
            diverged.len()
        ));
    }

    let mut result = EnsembleResult {
        representation: grid.representation,
        grid,
        photon_number: config.noise.photon_number(),
        local_oscillators: config.local_oscillators.clone(),
        moments: acc.checkpoints,
        trajectory_count: completed,
        diverged_count: diverged.len(),
        diverged,
        kept,
        warnings,
    };
    for (i, c) in result.moments.iter().enumerate() {
        let mean: Vec<Complex64> = c.field.iter().map(|m| m.mean).collect();
        let edge = edge_energy_fraction(&mean);
        if edge > 1e-4 {
            result.warnings.push(format!(
                "checkpoint {i} (ζ = {}): {:.2e} of the mean-field energy lies within 5% of the window edges",
                c.zeta, edge
            ));
        }
    }
    if result.representation == Representation::PositiveP && result.trajectory_count > 1 {
        for i in 0..result.moments.len() {
            let ratio = imaginary_ratio(&result, i).unwrap_or(0.0);
            if ratio > 4.0 {
                result.warnings.push(format!(
                    "checkpoint {i}: imaginary part of a positive-P moment is {ratio:.1} standard errors from zero"
                ));
            }
        }
    }
    for w in &result.warnings {
        log::warn!("{w}");
    }
    Ok(result)
}
