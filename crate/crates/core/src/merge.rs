//! Mergesort as the buffered sorter X.
//!
//! The merge moves the smaller of the two adjacent runs into the buffer by
//! swaps and merges it back into the vacated slots, so a buffer of
//! floor(m/2) elements suffices for a segment of size m. Elements enter and
//! leave the buffer only by swaps; no comparison ever touches a resident
//! buffer element except those of the moved run.

use crate::engine::{Alpha, BufferedSorter, ContractViolation};
use crate::instrument::{counting_le, counting_less, Channel, CountedElement, Tally};

/// Recursion structure of the Mergesort driver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MergeVariant {
    TopDown,
    BottomUp,
}

/// Declared buffer ratio.
///
/// `Half` is the natural mode for the smaller-run-moves merge. `One`
/// declares alpha = 1, the simplified discipline in which the engine always
/// hands Mergesort the smaller segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaMode {
    Half,
    One,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MergeXConfig {
    pub variant: MergeVariant,
    pub alpha_mode: AlphaMode,
}

impl MergeXConfig {
    pub fn top_down() -> Self {
        MergeXConfig {
            variant: MergeVariant::TopDown,
            alpha_mode: AlphaMode::Half,
        }
    }

    pub fn bottom_up() -> Self {
        MergeXConfig {
            variant: MergeVariant::BottomUp,
            alpha_mode: AlphaMode::Half,
        }
    }

    pub fn top_down_alpha_one() -> Self {
        MergeXConfig {
            variant: MergeVariant::TopDown,
            alpha_mode: AlphaMode::One,
        }
    }

    pub fn alpha(&self) -> Alpha {
        match self.alpha_mode {
            AlphaMode::Half => Alpha::HALF,
            AlphaMode::One => Alpha::ONE,
        }
    }
}

/// Mergesort instance usable as the engine's X.
#[derive(Clone, Copy, Debug)]
pub struct MergeX {
    pub cfg: MergeXConfig,
}

impl MergeX {
    pub fn new(cfg: MergeXConfig) -> Self {
        MergeX { cfg }
    }
}

impl BufferedSorter for MergeX {
    fn alpha(&self) -> Alpha {
        self.cfg.alpha()
    }

    fn sort_with_buffer(
        &self,
        segment: &mut [CountedElement],
        buffer: &mut [CountedElement],
        _buffer_below: bool,
        tally: &mut Tally,
    ) -> Result<(), ContractViolation> {
        sort_segment(segment, buffer, self.cfg, tally).map(|_| ())
    }
}

/// Merges the sorted runs `area[..split]` and `area[split..]` in place,
/// using `buffer` as swap space for the smaller run.
///
/// Returns the comparison count of this merge. Ties go to the first run.
pub fn merge_with_buffer(
    area: &mut [CountedElement],
    split: usize,
    buffer: &mut [CountedElement],
    tally: &mut Tally,
) -> Result<u64, ContractViolation> {
    let n1 = split;
    let n2 = area.len() - split;
    let need = n1.min(n2);
    if buffer.len() < need {
        return Err(ContractViolation::BufferTooSmall {
            need,
            have: buffer.len(),
        });
    }
    let before = tally.x;
    if n1 <= n2 {
        merge_forward(area, split, buffer, tally);
    } else {
        merge_backward(area, split, buffer, tally);
    }
    Ok(tally.x - before)
}

/// First run is the shorter one: move it to the buffer, merge left to right
/// into the vacated prefix.
fn merge_forward(
    area: &mut [CountedElement],
    split: usize,
    buffer: &mut [CountedElement],
    tally: &mut Tally,
) {
    let n1 = split;
    let n = area.len();
    for i in 0..n1 {
        std::mem::swap(&mut area[i], &mut buffer[i]);
    }
    let mut i1 = 0; // next element of run 1, in buffer
    let mut i2 = split; // next element of run 2, in place
    let mut o = 0; // output slot
    while i1 < n1 && i2 < n {
        if counting_le(&buffer[i1], &area[i2], tally, Channel::X) {
            std::mem::swap(&mut area[o], &mut buffer[i1]);
            i1 += 1;
        } else {
            area.swap(o, i2);
            i2 += 1;
        }
        o += 1;
    }
    while i1 < n1 {
        std::mem::swap(&mut area[o], &mut buffer[i1]);
        i1 += 1;
        o += 1;
    }
    // Run 1 exhausted first: the tail of run 2 is already in place.
}

/// Symmetric variant for a shorter second run: move it to the buffer and
/// merge right to left into the vacated suffix.
fn merge_backward(
    area: &mut [CountedElement],
    split: usize,
    buffer: &mut [CountedElement],
    tally: &mut Tally,
) {
    let n = area.len();
    let n2 = n - split;
    for i in 0..n2 {
        std::mem::swap(&mut area[split + i], &mut buffer[i]);
    }
    let mut i1 = split; // elements remaining of run 1, in place
    let mut i2 = n2; // elements remaining of run 2, in buffer
    let mut o = n; // one past the next output slot
    while i1 > 0 && i2 > 0 {
        o -= 1;
        if counting_less(&buffer[i2 - 1], &area[i1 - 1], tally, Channel::X) {
            area.swap(o, i1 - 1);
            i1 -= 1;
        } else {
            std::mem::swap(&mut area[o], &mut buffer[i2 - 1]);
            i2 -= 1;
        }
    }
    while i2 > 0 {
        o -= 1;
        std::mem::swap(&mut area[o], &mut buffer[i2 - 1]);
        i2 -= 1;
    }
}

/// Sorts `segment` with the configured Mergesort, using `buffer` as swap
/// space. Returns the comparison count.
pub fn sort_segment(
    segment: &mut [CountedElement],
    buffer: &mut [CountedElement],
    cfg: MergeXConfig,
    tally: &mut Tally,
) -> Result<u64, ContractViolation> {
    let need = segment.len() / 2;
    if buffer.len() < need {
        return Err(ContractViolation::BufferTooSmall {
            need,
            have: buffer.len(),
        });
    }
    let before = tally.x;
    match cfg.variant {
        MergeVariant::TopDown => top_down(segment, buffer, tally)?,
        MergeVariant::BottomUp => bottom_up(segment, buffer, tally)?,
    }
    Ok(tally.x - before)
}

fn top_down(
    segment: &mut [CountedElement],
    buffer: &mut [CountedElement],
    tally: &mut Tally,
) -> Result<(), ContractViolation> {
    let m = segment.len();
    if m <= 1 {
        return Ok(());
    }
    let mid = m / 2;
    top_down(&mut segment[..mid], buffer, tally)?;
    top_down(&mut segment[mid..], buffer, tally)?;
    merge_with_buffer(segment, mid, buffer, tally)?;
    Ok(())
}

fn bottom_up(
    segment: &mut [CountedElement],
    buffer: &mut [CountedElement],
    tally: &mut Tally,
) -> Result<(), ContractViolation> {
    let m = segment.len();
    let mut width = 1;
    while width < m {
        let mut start = 0;
        while start + width < m {
            let end = (start + 2 * width).min(m);
            merge_with_buffer(&mut segment[start..end], width, buffer, tally)?;
            start = end;
        }
        width *= 2;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instrument::{elements_from_keys, same_multiset, CountedElement};
    use itertools::Itertools;

    fn buf(keys: &[u64]) -> Vec<CountedElement> {
        keys.iter()
            .enumerate()
            .map(|(i, &k)| CountedElement::new(k, 1000 + i as u32))
            .collect()
    }

    fn keys(xs: &[CountedElement]) -> Vec<u64> {
        xs.iter().map(|e| e.key).collect()
    }

    #[test]
    fn merge_interleaved() {
        let mut area = elements_from_keys(&[1, 3, 2, 4]);
        let mut b = buf(&[9, 9]);
        let before = b.clone();
        let mut tally = Tally::new();
        let c = merge_with_buffer(&mut area, 2, &mut b, &mut tally).unwrap();
        assert_eq!(keys(&area), vec![1, 2, 3, 4]);
        assert_eq!(c, 3);
        assert!(same_multiset(&before, &b));
    }

    #[test]
    fn merge_empty_first_run() {
        let mut area = elements_from_keys(&[2, 4]);
        let mut b = buf(&[]);
        let mut tally = Tally::new();
        let c = merge_with_buffer(&mut area, 0, &mut b, &mut tally).unwrap();
        assert_eq!(c, 0);
        assert_eq!(keys(&area), vec![2, 4]);
    }

    #[test]
    fn merge_first_run_exhausts() {
        let mut area = elements_from_keys(&[1, 2, 3, 4]);
        let mut b = buf(&[7, 7]);
        let mut tally = Tally::new();
        let c = merge_with_buffer(&mut area, 2, &mut b, &mut tally).unwrap();
        assert_eq!(c, 2);
        assert_eq!(keys(&area), vec![1, 2, 3, 4]);
    }

    #[test]
    fn merge_insufficient_buffer_is_error() {
        let mut area = elements_from_keys(&[1, 3, 2, 4]);
        let mut b = buf(&[9]);
        let mut tally = Tally::new();
        assert!(merge_with_buffer(&mut area, 2, &mut b, &mut tally).is_err());
    }

    #[test]
    fn merge_shorter_second_run() {
        let mut area = elements_from_keys(&[1, 4, 6, 2, 3]);
        let mut b = buf(&[0, 0]);
        let before = b.clone();
        let mut tally = Tally::new();
        merge_with_buffer(&mut area, 3, &mut b, &mut tally).unwrap();
        assert_eq!(keys(&area), vec![1, 2, 3, 4, 6]);
        assert!(same_multiset(&before, &b));
    }

    #[test]
    fn sort_trivial_sizes() {
        for cfg in [MergeXConfig::top_down(), MergeXConfig::bottom_up()] {
            let mut seg = elements_from_keys(&[5]);
            let mut b = buf(&[]);
            let mut tally = Tally::new();
            assert_eq!(sort_segment(&mut seg, &mut b, cfg, &mut tally).unwrap(), 0);

            let mut seg = elements_from_keys(&[5, 2]);
            let mut b = buf(&[9]);
            let mut tally = Tally::new();
            assert_eq!(sort_segment(&mut seg, &mut b, cfg, &mut tally).unwrap(), 1);
            assert_eq!(keys(&seg), vec![2, 5]);
        }
    }

    #[test]
    fn top_down_m4_average_is_14_thirds() {
        // Average over all 4! inputs, times 24: expect 24 * 14/3 = 112.
        let mut total = 0u64;
        for perm in (0u64..4).permutations(4) {
            let mut seg = elements_from_keys(&perm);
            let mut b = buf(&[0, 0]);
            let mut tally = Tally::new();
            total += sort_segment(&mut seg, &mut b, MergeXConfig::top_down(), &mut tally).unwrap();
            assert_eq!(keys(&seg), vec![0, 1, 2, 3]);
        }
        assert_eq!(total, 112);
    }

    #[test]
    fn sorts_and_preserves_buffer_random() {
        use rand::seq::SliceRandom;
        let mut rng = rand::thread_rng();
        for cfg in [
            MergeXConfig::top_down(),
            MergeXConfig::bottom_up(),
            MergeXConfig::top_down_alpha_one(),
        ] {
            for _ in 0..50 {
                let m = rng.gen_range(1..200usize);
                let mut ks: Vec<u64> = (0..m as u64).collect();
                ks.shuffle(&mut rng);
                let mut seg = elements_from_keys(&ks);
                let mut b = buf(&vec![999; m / 2 + 1]);
                let before = b.clone();
                let mut tally = Tally::new();
                sort_segment(&mut seg, &mut b, cfg, &mut tally).unwrap();
                assert!(seg.windows(2).all(|w| w[0].key <= w[1].key));
                assert!(same_multiset(&before, &b));
            }
        }
    }

    #[test]
    fn top_down_average_upper_bound() {
        // Average over random inputs stays below n lg n - 1.24 n + 2.
        use rand::seq::SliceRandom;
        let mut rng = rand::thread_rng();
        for &m in &[64usize, 100, 256, 500] {
            let trials = 300;
            let mut total = 0u64;
            for _ in 0..trials {
                let mut ks: Vec<u64> = (0..m as u64).collect();
                ks.shuffle(&mut rng);
                let mut seg = elements_from_keys(&ks);
                let mut b = buf(&vec![0; m / 2]);
                let mut tally = Tally::new();
                total +=
                    sort_segment(&mut seg, &mut b, MergeXConfig::top_down(), &mut tally).unwrap();
            }
            let mean = total as f64 / trials as f64;
            let bound = (m as f64) * (m as f64).log2() - 1.24 * m as f64 + 2.0;
            assert!(mean <= bound + 0.05 * m as f64, "m={m}: {mean} vs {bound}");
        }
    }

    use rand::Rng;
}
