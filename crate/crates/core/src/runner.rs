//! Seeded, parallel experiment harness over the four algorithm
//! configurations. Every trial is verified (sortedness, permutation, tally
//! consistency) before its count enters the aggregate.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::engine::{
    quickxsort, Alpha, BufferedSorter, ContractViolation, QuickXOptions, RunStats, SamplePolicy,
    SamplingScheme,
};
use crate::heap::ExternalHeapsort;
use crate::instrument::{elements_from_keys, verify_run, CountedElement, Tally};
use crate::merge::{MergeX, MergeXConfig};
use crate::theory::{CostModelParams, XModel};

/// The benchmarked algorithm configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    /// QuickMergesort, top-down merging, alpha = 1/2.
    QuickMergesortTD,
    /// QuickMergesort, bottom-up merging, alpha = 1/2.
    QuickMergesortBU,
    /// QuickMergesort, top-down, run under the alpha = 1 discipline
    /// (X always sorts the smaller segment).
    QuickMergesortAlpha1,
    /// QuickHeapsort (external Heapsort, alpha = 1).
    QuickHeapsort,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::QuickMergesortTD,
        Algorithm::QuickMergesortBU,
        Algorithm::QuickMergesortAlpha1,
        Algorithm::QuickHeapsort,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::QuickMergesortTD => "quickmergesort-td",
            Algorithm::QuickMergesortBU => "quickmergesort-bu",
            Algorithm::QuickMergesortAlpha1 => "quickmergesort-alpha1",
            Algorithm::QuickHeapsort => "quickheapsort",
        }
    }

    pub fn alpha(&self) -> Alpha {
        match self {
            Algorithm::QuickMergesortTD | Algorithm::QuickMergesortBU => Alpha::HALF,
            Algorithm::QuickMergesortAlpha1 | Algorithm::QuickHeapsort => Alpha::ONE,
        }
    }

    pub fn x_model(&self) -> XModel {
        match self {
            Algorithm::QuickMergesortTD | Algorithm::QuickMergesortAlpha1 => XModel::MergeTD,
            Algorithm::QuickMergesortBU => XModel::MergeBU,
            Algorithm::QuickHeapsort => XModel::ExtHeap,
        }
    }

    /// Cost-model parameters for this configuration at sampling t.
    pub fn cost_params(&self, t: usize) -> CostModelParams {
        let (_, b, _) = self.x_model().coefficients();
        CostModelParams {
            a: 1.0,
            b,
            epsilon: 1.0,
            alpha: self.alpha(),
            t,
        }
    }

    pub fn sorter(&self) -> AnySorter {
        match self {
            Algorithm::QuickMergesortTD => AnySorter::Merge(MergeX::new(MergeXConfig::top_down())),
            Algorithm::QuickMergesortBU => AnySorter::Merge(MergeX::new(MergeXConfig::bottom_up())),
            Algorithm::QuickMergesortAlpha1 => {
                AnySorter::Merge(MergeX::new(MergeXConfig::top_down_alpha_one()))
            }
            Algorithm::QuickHeapsort => AnySorter::Heap(ExternalHeapsort),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quickmergesort-td" | "qms-td" => Ok(Algorithm::QuickMergesortTD),
            "quickmergesort-bu" | "qms-bu" => Ok(Algorithm::QuickMergesortBU),
            "quickmergesort-alpha1" | "qms-a1" => Ok(Algorithm::QuickMergesortAlpha1),
            "quickheapsort" | "qhs" => Ok(Algorithm::QuickHeapsort),
            other => Err(format!(
                "unknown algorithm {other:?} (expected quickmergesort-td, \
                 quickmergesort-bu, quickmergesort-alpha1 or quickheapsort)"
            )),
        }
    }
}

/// Static dispatch over the two buffered sorter families.
#[derive(Clone, Copy, Debug)]
pub enum AnySorter {
    Merge(MergeX),
    Heap(ExternalHeapsort),
}

impl BufferedSorter for AnySorter {
    fn alpha(&self) -> Alpha {
        match self {
            AnySorter::Merge(m) => m.alpha(),
            AnySorter::Heap(h) => h.alpha(),
        }
    }

    fn sort_with_buffer(
        &self,
        segment: &mut [CountedElement],
        buffer: &mut [CountedElement],
        buffer_below: bool,
        tally: &mut Tally,
    ) -> Result<(), ContractViolation> {
        match self {
            AnySorter::Merge(m) => m.sort_with_buffer(segment, buffer, buffer_below, tally),
            AnySorter::Heap(h) => h.sort_with_buffer(segment, buffer, buffer_below, tally),
        }
    }
}

/// One experiment cell: an algorithm at one (n, t), repeated.
#[derive(Clone, Copy, Debug)]
pub struct TrialConfig {
    pub algorithm: Algorithm,
    pub n: usize,
    pub t: usize,
    pub trials: u64,
    pub seed: u64,
    pub base_threshold: usize,
    pub verify: bool,
}

impl TrialConfig {
    pub fn new(algorithm: Algorithm, n: usize, t: usize, trials: u64, seed: u64) -> Self {
        TrialConfig {
            algorithm,
            n,
            t,
            trials,
            seed,
            base_threshold: QuickXOptions::default().base_threshold,
            verify: true,
        }
    }
}

/// Aggregate of one experiment cell. Comparison sums are exact integers so
/// the aggregation order cannot change the result.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialSummary {
    pub trials: u64,
    pub total: u128,
    pub mean: f64,
    pub stddev: f64,
    pub min: u64,
    pub max: u64,
}

impl TrialSummary {
    /// (mean - n lg n) / n, the observed linear-term coefficient.
    pub fn normalized_linear(&self, n: usize) -> f64 {
        let nf = n as f64;
        let lead = if n > 1 { nf * nf.log2() } else { 0.0 };
        (self.mean - lead) / nf
    }
}

#[derive(Clone, Debug)]
pub enum RunnerError {
    /// A trial produced unsorted output, lost elements or misreported its
    /// tally.
    VerificationFailed { trial: u64, details: String },
}

impl fmt::Display for RunnerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunnerError::VerificationFailed { trial, details } => {
                write!(f, "trial {trial} failed verification: {details}")
            }
        }
    }
}

impl std::error::Error for RunnerError {}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Per-trial generator, derived deterministically from the master seed.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(master_seed ^ splitmix64(trial)))
}

/// Runs one trial and returns its stats, after verifying the run.
pub fn run_one(cfg: &TrialConfig, trial: u64) -> Result<RunStats, RunnerError> {
    let mut rng = trial_rng(cfg.seed, trial);
    let mut keys: Vec<u64> = (0..cfg.n as u64).collect();
    keys.shuffle(&mut rng);
    let mut data = elements_from_keys(&keys);
    let before = if cfg.verify { data.clone() } else { Vec::new() };

    let scheme = SamplingScheme::new(cfg.t, SamplePolicy::PseudoRandomPositions);
    let opts = QuickXOptions {
        base_threshold: cfg.base_threshold,
        verify: cfg.verify,
    };
    let stats = quickxsort(&mut data, scheme, &cfg.algorithm.sorter(), opts, &mut rng);

    if cfg.verify {
        let verdict = verify_run(&before, &data, &stats.tally(), stats.comparisons());
        if !verdict.passed() {
            let details = verdict
                .violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ");
            return Err(RunnerError::VerificationFailed { trial, details });
        }
    }
    Ok(stats)
}

/// Runs all trials of the cell in parallel and aggregates exactly.
pub fn run_trials(cfg: &TrialConfig) -> Result<TrialSummary, RunnerError> {
    assert!(cfg.trials >= 1, "a cell needs at least one trial");
    let counts: Vec<u64> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_one(cfg, trial).map(|s| s.comparisons()))
        .collect::<Result<_, _>>()?;

    let total: u128 = counts.iter().map(|&c| c as u128).sum();
    let mean = total as f64 / cfg.trials as f64;
    let stddev = if cfg.trials > 1 {
        let ss: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - mean;
                d * d
            })
            .sum();
        (ss / (cfg.trials - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(TrialSummary {
        trials: cfg.trials,
        total,
        mean,
        stddev,
        min: *counts.iter().min().expect("at least one trial"),
        max: *counts.iter().max().expect("at least one trial"),
    })
}
