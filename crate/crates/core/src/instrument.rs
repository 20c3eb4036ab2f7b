//! Comparison counting and structural verification shared by all sorters.
//!
//! Elements carry an opaque id next to their key so that tests can check
//! permutation (multiset) equality after a sort. The only way to order two
//! elements is [`counting_compare`], which charges exactly one comparison to
//! the chosen channel.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

/// A totally ordered key plus a unique tag for permutation checking.
///
/// The tag never participates in comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountedElement {
    pub key: u64,
    pub id: u32,
}

impl CountedElement {
    pub fn new(key: u64, id: u32) -> Self {
        CountedElement { key, id }
    }
}

/// Builds elements keyed by the given values, ids in input order.
pub fn elements_from_keys(keys: &[u64]) -> Vec<CountedElement> {
    keys.iter()
        .enumerate()
        .map(|(i, &k)| CountedElement::new(k, i as u32))
        .collect()
}

/// Cost channel a comparison is charged to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    /// Sorting the pivot sample.
    Sample,
    /// Element-vs-pivot comparisons during partitioning.
    Partition,
    /// Comparisons spent inside the secondary sorter X.
    X,
    /// Insertionsort base cases.
    Base,
}

/// Per-run comparison tally, split by channel.
///
/// Threaded through calls rather than kept in ambient state so that
/// concurrent runs never share counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub sample: u64,
    pub partition: u64,
    pub x: u64,
    pub base: u64,
}

impl Tally {
    pub fn new() -> Self {
        Tally::default()
    }

    /// Charge one comparison to `channel`.
    #[inline]
    pub fn charge(&mut self, channel: Channel) {
        match channel {
            Channel::Sample => self.sample += 1,
            Channel::Partition => self.partition += 1,
            Channel::X => self.x += 1,
            Channel::Base => self.base += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.sample + self.partition + self.x + self.base
    }
}

/// Compares two elements by key and charges one comparison.
#[inline]
pub fn counting_compare(
    a: &CountedElement,
    b: &CountedElement,
    tally: &mut Tally,
    channel: Channel,
) -> Ordering {
    tally.charge(channel);
    a.key.cmp(&b.key)
}

/// `a < b` with counting; the common case in the sorting loops.
#[inline]
pub fn counting_less(
    a: &CountedElement,
    b: &CountedElement,
    tally: &mut Tally,
    channel: Channel,
) -> bool {
    counting_compare(a, b, tally, channel) == Ordering::Less
}

/// `a <= b` with counting.
#[inline]
pub fn counting_le(
    a: &CountedElement,
    b: &CountedElement,
    tally: &mut Tally,
    channel: Channel,
) -> bool {
    counting_compare(a, b, tally, channel) != Ordering::Greater
}

/// One violated property found by [`verify_run`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NotSorted { index: usize },
    NotPermutation,
    TallyInconsistent { channel_sum: u64, total: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotSorted { index } => write!(f, "output not sorted at index {index}"),
            Violation::NotPermutation => write!(f, "output is not a permutation of the input"),
            Violation::TallyInconsistent { channel_sum, total } => {
                write!(f, "channel sum {channel_sum} != reported total {total}")
            }
        }
    }
}

/// Result of verifying one sorting run.
#[derive(Clone, Debug, Default)]
pub struct Verdict {
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks sortedness, multiset equality via ids, and tally consistency.
///
/// `reported_total` is the stats' headline comparison count; it must equal
/// the sum of the per-channel tallies.
pub fn verify_run(
    before: &[CountedElement],
    after: &[CountedElement],
    tally: &Tally,
    reported_total: u64,
) -> Verdict {
    let mut verdict = Verdict::default();

    for i in 1..after.len() {
        if after[i - 1].key > after[i].key {
            verdict.violations.push(Violation::NotSorted { index: i });
            break;
        }
    }

    if !same_multiset(before, after) {
        verdict.violations.push(Violation::NotPermutation);
    }

    let channel_sum = tally.total();
    if channel_sum != reported_total {
        verdict.violations.push(Violation::TallyInconsistent {
            channel_sum,
            total: reported_total,
        });
    }

    verdict
}

/// Multiset equality over (key, id) pairs.
pub fn same_multiset(a: &[CountedElement], b: &[CountedElement]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut counts: HashMap<(u64, u32), i64> = HashMap::with_capacity(a.len());
    for e in a {
        *counts.entry((e.key, e.id)).or_insert(0) += 1;
    }
    for e in b {
        let c = counts.entry((e.key, e.id)).or_insert(0);
        *c -= 1;
        if *c < 0 {
            return false;
        }
    }
    true
}
