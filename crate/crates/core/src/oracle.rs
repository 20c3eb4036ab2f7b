//! Ground-truth generators: the exact cost recurrence for the driver, exact
//! expected Mergesort cost, exact Insertionsort averages, and exhaustive
//! enumeration of the real implementation over all permutations at tiny n.
//!
//! The recurrence uses the exact subproblem-size law and the same
//! side-assignment rule as the engine, so for QuickMergesort its values must
//! agree with enumeration as exact rationals.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::engine::{
    assign_sides, quickxsort, BufferedSorter, QuickXOptions, SamplePolicy, SamplingScheme, Side,
};
use crate::engine::Alpha;
use crate::instrument::CountedElement;
use crate::merge::MergeVariant;
use crate::theory::{rational, subproblem_size_pmf, ExactRational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    /// Recurrence evaluated below the base regime boundary.
    BaseRegime { n: usize, threshold: usize },
    /// A lookup table does not cover a required size.
    MissingEntry { table: &'static str, need: usize, have: usize },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::BaseRegime { n, threshold } => {
                write!(f, "size {n} is in the base regime (threshold {threshold})")
            }
            OracleError::MissingEntry { table, need, have } => {
                write!(f, "{table} table covers {have} sizes, {need} required")
            }
        }
    }
}

impl std::error::Error for OracleError {}

/// Exact expected Insertionsort comparisons for sizes 0..=n_max.
///
/// Inserting into a sorted prefix of j elements costs j/2 + 1 - 1/(j+1) on
/// average (the smallest element stops after j comparisons, not j+1).
pub fn insertion_sort_avg_table(n_max: usize) -> Vec<ExactRational> {
    let mut table = Vec::with_capacity(n_max + 1);
    let mut acc = BigRational::zero();
    table.push(acc.clone());
    for j in 0..n_max {
        if j >= 1 {
            acc += rational(j as i64, 2) + BigRational::one()
                - rational(1, j as i64 + 1);
        }
        table.push(acc.clone());
    }
    table
}

/// Expected comparisons of merging random adjacent runs of sizes p and q:
/// p + q - p/(q+1) - q/(p+1).
pub fn merge_toll(p: usize, q: usize) -> ExactRational {
    let (p, q) = (p as i64, q as i64);
    rational(p + q, 1) - rational(p, q + 1) - rational(q, p + 1)
}

/// Exact expected comparisons of the buffered Mergesort on a random
/// permutation, for sizes 0..=n_max.
///
/// Top-down: em(n) = em(floor(n/2)) + em(ceil(n/2)) + merge_toll.
/// Bottom-up: sum of merge tolls over the width-doubling pass structure.
pub fn mergesort_avg_table(n_max: usize, variant: MergeVariant) -> Vec<ExactRational> {
    match variant {
        MergeVariant::TopDown => {
            let mut em = vec![BigRational::zero(); n_max + 1];
            for n in 2..=n_max {
                let p = n / 2;
                let q = n - p;
                em[n] = &em[p] + &em[q] + merge_toll(p, q);
            }
            em
        }
        MergeVariant::BottomUp => (0..=n_max).map(bottom_up_avg).collect(),
    }
}

fn bottom_up_avg(m: usize) -> ExactRational {
    let mut cost = BigRational::zero();
    let mut width = 1;
    while width < m {
        let mut start = 0;
        while start + width < m {
            let end = (start + 2 * width).min(m);
            cost += merge_toll(width, end - start - width);
            start = end;
        }
        width *= 2;
    }
    cost
}

/// f64 variant of the top-down table, for the large-size recurrence.
pub fn mergesort_td_avg_f64(n_max: usize) -> Vec<f64> {
    let mut em = vec![0.0f64; n_max + 1];
    for n in 2..=n_max {
        let p = n / 2;
        let q = n - p;
        let toll =
            (p + q) as f64 - p as f64 / (q + 1) as f64 - q as f64 / (p + 1) as f64;
        em[n] = em[p] + em[q] + toll;
    }
    em
}

/// Expected cost table for the driver: c, the X table and base table it was
/// built from, and the scheme parameters.
#[derive(Clone, Debug)]
pub struct RecurrenceTable {
    pub c: Vec<ExactRational>,
    pub x: Vec<ExactRational>,
    pub base: Vec<ExactRational>,
    pub t: usize,
    pub alpha: Alpha,
}

impl RecurrenceTable {
    pub fn threshold(&self) -> usize {
        self.base.len() - 1
    }
}

/// True when the driver recurses on the below-pivot segment.
fn recurses_left(j1: usize, j2: usize, alpha: Alpha) -> bool {
    let (_, recurse) = assign_sides(j1, j2, alpha);
    recurse == Side::Left
}

/// Expected toll of one round at size n: (n - k) partition comparisons, the
/// expected sample-sort cost, and the expected X cost of whichever segment
/// is not recursed on.
pub fn toll_t(
    n: usize,
    x_table: &[ExactRational],
    t: usize,
    alpha: Alpha,
) -> Result<ExactRational, OracleError> {
    let k = 2 * t + 1;
    if n < k {
        return Err(OracleError::BaseRegime { n, threshold: k - 1 });
    }
    if x_table.len() < n {
        return Err(OracleError::MissingEntry {
            table: "x",
            need: n,
            have: x_table.len(),
        });
    }
    let sample = insertion_sort_avg_table(k).pop().expect("nonempty table");
    let mut toll = rational((n - k) as i64, 1) + sample;
    let pmf = subproblem_size_pmf(n, t);
    for j1 in t..=n - 1 - t {
        let j2 = n - 1 - j1;
        let x_cost = if recurses_left(j1, j2, alpha) {
            &x_table[j2]
        } else {
            &x_table[j1]
        };
        toll += &pmf[j1] * x_cost;
    }
    Ok(toll)
}

/// Solves c[n] = toll(n) + E[c(recursed segment size)] bottom-up, exactly.
///
/// Sizes covered by `base_table` take their value from it directly; that
/// table must reach at least max over the driver's base regime,
/// max(base_threshold, k - 1).
pub fn solve_recurrence(
    n_max: usize,
    x_table: &[ExactRational],
    base_table: &[ExactRational],
    t: usize,
    alpha: Alpha,
) -> Result<RecurrenceTable, OracleError> {
    let k = 2 * t + 1;
    if base_table.len() < k {
        return Err(OracleError::MissingEntry {
            table: "base",
            need: k,
            have: base_table.len(),
        });
    }
    if x_table.len() < n_max {
        return Err(OracleError::MissingEntry {
            table: "x",
            need: n_max,
            have: x_table.len(),
        });
    }
    let threshold = base_table.len() - 1;
    let mut c = vec![BigRational::zero(); n_max + 1];
    for n in 0..=n_max.min(threshold) {
        c[n] = base_table[n].clone();
    }
    for n in threshold + 1..=n_max {
        let mut value = toll_t(n, x_table, t, alpha)?;
        let pmf = subproblem_size_pmf(n, t);
        for j1 in t..=n - 1 - t {
            let j2 = n - 1 - j1;
            let rec = if recurses_left(j1, j2, alpha) { j1 } else { j2 };
            value += &pmf[j1] * &c[rec];
        }
        c[n] = value;
    }
    Ok(RecurrenceTable {
        c,
        x: x_table[..x_table.len().min(n_max + 1)].to_vec(),
        base: base_table.to_vec(),
        t,
        alpha,
    })
}

/// f64 version of [`solve_recurrence`] for sizes where exact rationals are
/// no longer practical. Same structure, same side assignment.
pub fn solve_recurrence_f64(
    n_max: usize,
    x_table: &[f64],
    base_table: &[f64],
    t: usize,
    alpha: Alpha,
) -> Vec<f64> {
    let k = 2 * t + 1;
    assert!(base_table.len() >= k, "base table must cover the sample");
    assert!(x_table.len() >= n_max, "x table must cover all sizes");
    let threshold = base_table.len() - 1;
    let sample = insertion_sort_avg_table(k)
        .pop()
        .unwrap()
        .to_f64()
        .expect("small rational");

    let mut c = vec![0.0f64; n_max + 1];
    for n in 0..=n_max.min(threshold) {
        c[n] = base_table[n];
    }
    for n in threshold + 1..=n_max {
        let pmf = crate::theory::beta_binomial_pmf_f64(n - k, (t + 1) as f64, (t + 1) as f64);
        let mut value = (n - k) as f64 + sample;
        for j1 in t..=n - 1 - t {
            let j2 = n - 1 - j1;
            let (x_cost, rec) = if recurses_left(j1, j2, alpha) {
                (x_table[j2], c[j1])
            } else {
                (x_table[j1], c[j2])
            };
            value += pmf[j1 - t] * (x_cost + rec);
        }
        c[n] = value;
    }
    c
}

fn factorial_u64(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Exact average comparison count of the real driver over all n!
/// permutations, with DeterministicPrefix sampling so every run is a
/// deterministic function of the permutation.
///
/// Blocks of permutations (fixed first element) run in parallel.
pub fn exhaustive_avg<X>(n: usize, x: &X, t: usize, base_threshold: usize) -> ExactRational
where
    X: BufferedSorter + Sync + ?Sized,
{
    assert!(n <= 9, "exhaustive enumeration is for tiny sizes");
    if n <= 1 {
        return BigRational::zero();
    }
    let scheme = SamplingScheme::new(t, SamplePolicy::DeterministicPrefix);
    let opts = QuickXOptions {
        base_threshold,
        verify: true,
    };
    let total: u64 = (0..n as u64)
        .into_par_iter()
        .map(|first| {
            use itertools::Itertools;
            let rest: Vec<u64> = (0..n as u64).filter(|&v| v != first).collect();
            let mut block = 0u64;
            let len = rest.len();
            for tail in rest.into_iter().permutations(len) {
                let mut keys = Vec::with_capacity(n);
                keys.push(first);
                keys.extend(tail);
                let mut data: Vec<CountedElement> = keys
                    .iter()
                    .enumerate()
                    .map(|(i, &key)| CountedElement::new(key, i as u32))
                    .collect();
                let mut rng = deterministic_rng();
                let stats = quickxsort(&mut data, scheme, x, opts, &mut rng);
                assert!(data.windows(2).all(|w| w[0].key <= w[1].key));
                block += stats.comparisons();
            }
            block
        })
        .sum();
    rational(total as i64, factorial_u64(n) as i64)
}

/// Exact average comparisons of a buffered sorter alone over all m! inputs.
/// Used to tabulate X costs that have no simple recurrence.
pub fn enumerated_x_avg<X>(m: usize, x: &X, buffer_below: bool) -> ExactRational
where
    X: BufferedSorter + Sync + ?Sized,
{
    assert!(m <= 9, "exhaustive enumeration is for tiny sizes");
    if m <= 1 {
        return BigRational::zero();
    }
    use itertools::Itertools;
    let offset = if buffer_below { m as u64 } else { 0 };
    let mut total = 0u64;
    for perm in (0..m as u64).permutations(m) {
        let mut seg: Vec<CountedElement> = perm
            .iter()
            .enumerate()
            .map(|(i, &key)| CountedElement::new(key + offset, i as u32))
            .collect();
        let buf_base = if buffer_below { 0 } else { m as u64 };
        let mut buf: Vec<CountedElement> = (0..m as u64)
            .map(|i| CountedElement::new(buf_base + i, 1000 + i as u32))
            .collect();
        let mut tally = crate::instrument::Tally::new();
        x.sort_with_buffer(&mut seg, &mut buf, buffer_below, &mut tally)
            .expect("full-size buffer");
        total += tally.total();
    }
    rational(total as i64, factorial_u64(m) as i64)
}

fn deterministic_rng() -> impl rand::Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(0)
}
