//! The generic QuickXsort driver.
//!
//! Per round: sample the pivot as the median of k = 2t+1 elements, partition
//! the remaining n - k elements around it (exactly n - k comparisons), decide
//! which segment the secondary sorter X gets and which one is recursed on,
//! run X with the other segment as swap buffer, then loop on the recursive
//! segment. Only one segment per round is recursed on, so the driver itself
//! needs O(1) space.

use std::fmt;

use rand::Rng;

use crate::instrument::{
    counting_less, same_multiset, Channel, CountedElement, Tally,
};

/// Buffer ratio of a secondary sorter, as an exact small rational.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Alpha {
    pub num: u32,
    pub den: u32,
}

impl Alpha {
    pub const HALF: Alpha = Alpha { num: 1, den: 2 };
    pub const ONE: Alpha = Alpha { num: 1, den: 1 };

    /// floor(alpha * m): the buffer size X may demand for a segment of size m.
    pub fn buffer_need(&self, m: usize) -> usize {
        m * self.num as usize / self.den as usize
    }

    /// `j <= (n-1) / (1 + alpha)` without rounding.
    fn within_even_split(&self, j: usize, n: usize) -> bool {
        // j * (num + den) <= (n - 1) * den
        (j as u128) * (self.num as u128 + self.den as u128) <= (n as u128 - 1) * self.den as u128
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == self.den {
            write!(f, "1")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// How the pivot sample positions are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplePolicy {
    /// k positions drawn from the supplied random source.
    PseudoRandomPositions,
    /// Always positions 0..k-1. Makes the whole sort a deterministic function
    /// of the input permutation, which the exhaustive oracle requires.
    DeterministicPrefix,
}

/// Pivot sampling scheme: sample size k = 2t+1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplingScheme {
    pub t: usize,
    pub policy: SamplePolicy,
}

impl SamplingScheme {
    pub fn new(t: usize, policy: SamplePolicy) -> Self {
        SamplingScheme { t, policy }
    }

    pub fn k(&self) -> usize {
        2 * self.t + 1
    }
}

/// Contract violation in one of the engine operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContractViolation {
    SegmentShorterThanSample { len: usize, k: usize },
    BufferTooSmall { need: usize, have: usize },
    EmptyHeap,
}

impl fmt::Display for ContractViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContractViolation::SegmentShorterThanSample { len, k } => {
                write!(f, "segment of length {len} cannot supply a sample of {k}")
            }
            ContractViolation::BufferTooSmall { need, have } => {
                write!(f, "buffer of {have} elements, {need} required")
            }
            ContractViolation::EmptyHeap => write!(f, "delete-top on an empty heap"),
        }
    }
}

impl std::error::Error for ContractViolation {}

/// Which physical side of the pivot a segment lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Result of one partitioning round, sides not yet assigned.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartitionOutcome {
    /// Size of the below-pivot segment.
    pub j1: usize,
    /// Size of the above-pivot segment.
    pub j2: usize,
    /// Final index of the pivot within the partitioned segment.
    pub pivot_pos: usize,
}

/// Exact comparison tallies and structural counters for one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub sample_comparisons: u64,
    pub partition_comparisons: u64,
    pub x_comparisons: u64,
    pub base_case_comparisons: u64,
    /// Number of partitioning rounds; the driver loop never nests deeper.
    pub max_recursion_depth: u32,
}

impl RunStats {
    /// Total comparisons; by construction the sum of the sub-tallies.
    pub fn comparisons(&self) -> u64 {
        self.sample_comparisons
            + self.partition_comparisons
            + self.x_comparisons
            + self.base_case_comparisons
    }

    pub fn tally(&self) -> Tally {
        Tally {
            sample: self.sample_comparisons,
            partition: self.partition_comparisons,
            x: self.x_comparisons,
            base: self.base_case_comparisons,
        }
    }

    fn from_tally(tally: Tally, depth: u32) -> Self {
        RunStats {
            sample_comparisons: tally.sample,
            partition_comparisons: tally.partition,
            x_comparisons: tally.x,
            base_case_comparisons: tally.base,
            max_recursion_depth: depth,
        }
    }
}

/// A sorting method X that sorts a segment using external buffer space of
/// floor(alpha * m) elements, touched only by swaps.
///
/// After `sort_with_buffer` returns, the segment is sorted ascending and the
/// buffer holds the same multiset of elements as before the call.
/// `buffer_below` is true when every buffer element precedes every segment
/// element in sort order (the buffer is the below-pivot segment).
pub trait BufferedSorter {
    fn alpha(&self) -> Alpha;

    fn sort_with_buffer(
        &self,
        segment: &mut [CountedElement],
        buffer: &mut [CountedElement],
        buffer_below: bool,
        tally: &mut Tally,
    ) -> Result<(), ContractViolation>;
}

/// Insertionsort with counting; used for base cases and pivot samples.
///
/// Sorted input costs exactly n-1 comparisons.
pub fn insertion_sort(xs: &mut [CountedElement], tally: &mut Tally, channel: Channel) {
    for i in 1..xs.len() {
        let mut j = i;
        while j > 0 && counting_less(&xs[j], &xs[j - 1], tally, channel) {
            xs.swap(j - 1, j);
            j -= 1;
        }
    }
}

/// Selects the pivot as the median of k sample elements and rearranges the
/// segment so that the partition pass touches exactly n - k elements.
///
/// Layout afterwards: the t below-median sample elements sit sorted at
/// positions 0..t, the pivot at position t, and the t above-median sample
/// elements occupy the last t positions. Returns the pivot index (always t)
/// and the comparisons spent Insertionsorting the sample.
pub fn select_pivot<R: Rng + ?Sized>(
    segment: &mut [CountedElement],
    scheme: SamplingScheme,
    rng: &mut R,
    tally: &mut Tally,
) -> Result<(usize, u64), ContractViolation> {
    let n = segment.len();
    let k = scheme.k();
    let t = scheme.t;
    if n < k {
        return Err(ContractViolation::SegmentShorterThanSample { len: n, k });
    }

    if scheme.policy == SamplePolicy::PseudoRandomPositions {
        // Partial Fisher-Yates: sample positions into the prefix.
        for i in 0..k {
            let j = rng.gen_range(i..n);
            segment.swap(i, j);
        }
    }

    let before = tally.sample;
    insertion_sort(&mut segment[..k], tally, Channel::Sample);
    let sample_cost = tally.sample - before;

    // Move the t above-median sample elements out of the partition range.
    // A rotation stays correct when the sample prefix and the tail overlap
    // (segments only slightly longer than k).
    segment[t + 1..].rotate_left(t);

    Ok((t, sample_cost))
}

/// Partitions the non-sample elements around the pivot left by
/// [`select_pivot`]. Consumes exactly n - k comparisons.
///
/// Expects the select_pivot layout: pivot at index t, small samples before
/// it, large samples in the final t slots. A single left-to-right pass moves
/// below-pivot elements behind a store pointer, then the pivot is swapped
/// into its final place.
pub fn partition_around(
    segment: &mut [CountedElement],
    t: usize,
    tally: &mut Tally,
) -> PartitionOutcome {
    let n = segment.len();
    let pivot = segment[t];
    let mut store = t + 1;
    for p in t + 1..n - t {
        if counting_less(&segment[p], &pivot, tally, Channel::Partition) {
            segment.swap(p, store);
            store += 1;
        }
    }
    segment.swap(t, store - 1);
    PartitionOutcome {
        j1: store - 1,
        j2: n - store,
        pivot_pos: store - 1,
    }
}

/// Decides which segment X sorts and which one is recursed on.
///
/// If both segments fit under (n-1)/(1+alpha), X sorts the larger one (on a
/// tie, the second); otherwise the smaller one, because only the larger
/// segment offers enough buffer space.
pub fn assign_sides(j1: usize, j2: usize, alpha: Alpha) -> (Side, Side) {
    let n = j1 + j2 + 1;
    let recurse = if !alpha.within_even_split(j1, n) {
        Side::Left
    } else if !alpha.within_even_split(j2, n) {
        Side::Right
    } else if j1 <= j2 {
        Side::Left
    } else {
        Side::Right
    };
    (recurse.other(), recurse)
}

/// Driver options.
#[derive(Clone, Copy, Debug)]
pub struct QuickXOptions {
    /// Segments of size <= max(base_threshold, k-1) go straight to
    /// Insertionsort.
    pub base_threshold: usize,
    /// Check the per-round invariants (exact n-k partition count, buffer
    /// multiset preservation) on every round; panics on violation.
    pub verify: bool,
}

impl Default for QuickXOptions {
    fn default() -> Self {
        QuickXOptions {
            base_threshold: 16,
            verify: false,
        }
    }
}

impl QuickXOptions {
    pub fn with_base_threshold(base_threshold: usize) -> Self {
        QuickXOptions {
            base_threshold,
            ..Default::default()
        }
    }
}

/// Sorts `data` ascending with QuickXsort and returns the exact tallies.
///
/// The recursion is a loop: each round partitions, hands one segment to X
/// with the other as buffer, and continues on the remaining segment.
pub fn quickxsort<X, R>(
    data: &mut [CountedElement],
    scheme: SamplingScheme,
    x: &X,
    opts: QuickXOptions,
    rng: &mut R,
) -> RunStats
where
    X: BufferedSorter + ?Sized,
    R: Rng + ?Sized,
{
    let k = scheme.k();
    let threshold = opts.base_threshold.max(k - 1);
    let alpha = x.alpha();
    let mut tally = Tally::new();
    let mut rounds: u32 = 0;

    let (mut lo, mut hi) = (0usize, data.len());
    loop {
        let n = hi - lo;
        if n <= threshold {
            insertion_sort(&mut data[lo..hi], &mut tally, Channel::Base);
            break;
        }
        rounds += 1;

        let seg = &mut data[lo..hi];
        let (pivot_idx, _) = select_pivot(seg, scheme, rng, &mut tally)
            .expect("segment above threshold is long enough to sample");
        debug_assert_eq!(pivot_idx, scheme.t);

        let partition_before = tally.partition;
        let outcome = partition_around(seg, scheme.t, &mut tally);
        if opts.verify {
            assert_eq!(
                tally.partition - partition_before,
                (n - k) as u64,
                "partition round must cost exactly n - k comparisons"
            );
            assert_eq!(outcome.j1 + outcome.j2, n - 1);
        }

        let (x_side, _) = assign_sides(outcome.j1, outcome.j2, alpha);
        let (left, rest) = seg.split_at_mut(outcome.pivot_pos);
        let right = &mut rest[1..];

        let (x_seg, buffer, buffer_below) = match x_side {
            Side::Left => (left, right, false),
            Side::Right => (right, left, true),
        };
        if opts.verify {
            assert!(
                buffer.len() >= alpha.buffer_need(x_seg.len()),
                "buffer side must offer floor(alpha * m) elements"
            );
        }

        let snapshot = if opts.verify { buffer.to_vec() } else { Vec::new() };
        x.sort_with_buffer(x_seg, buffer, buffer_below, &mut tally)
            .expect("engine provides a sufficient buffer");
        if opts.verify {
            assert!(
                same_multiset(&snapshot, buffer),
                "X must return the buffer as a permutation of its prior contents"
            );
            assert!(
                x_seg.windows(2).all(|w| w[0].key <= w[1].key),
                "X must sort its segment"
            );
        }

        match x_side {
            Side::Left => lo += outcome.pivot_pos + 1,
            Side::Right => hi = lo + outcome.pivot_pos,
        }
    }

    RunStats::from_tally(tally, rounds)
}
