//! Balanced partitions of `{1, ..., 2n}`, their difference counts `M_k`, and
//! exhaustive computation of `M(n) = min over partitions of max_k M_k`.
//!
//! A partition is stored as a bitmask of width `2n`: bit `e - 1` set means `e`
//! belongs to the `a` part.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::{self, ratio};
use crate::stepfn::StepFunction;

pub const DEFAULT_CAP: u32 = 12;

/// Largest `n` whose `2n` elements fit in a `u64` mask.
pub const MAX_N: u32 = 32;

fn full_mask(n: u32) -> u64 {
    u64::MAX >> (64 - 2 * n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    n: u32,
    mask: u64,
}

impl Partition {
    /// `mask` must have exactly `n` bits set, all below bit `2n`.
    pub fn new(n: u32, mask: u64) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::Argument(format!(
                "n must lie in 1..={MAX_N}, got {n}"
            )));
        }
        if mask & !full_mask(n) != 0 {
            return Err(Error::Argument(format!(
                "mask {mask:#x} has elements beyond {}",
                2 * n
            )));
        }
        if mask.count_ones() != n {
            return Err(Error::Argument(format!(
                "mask {mask:#x} selects {} elements, expected {n}",
                mask.count_ones()
            )));
        }
        Ok(Self { n, mask })
    }

    /// Builds the partition whose `a` part is `elements` (1-based).
    pub fn from_elements(n: u32, elements: &[u32]) -> Result<Self> {
        let mut mask = 0u64;
        for &e in elements {
            if e == 0 || e > 2 * n {
                return Err(Error::Argument(format!(
                    "element {e} outside 1..={}",
                    2 * n
                )));
            }
            mask |= 1 << (e - 1);
        }
        Self::new(n, mask)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn contains(&self, e: u32) -> bool {
        e >= 1 && e <= 2 * self.n && self.mask >> (e - 1) & 1 == 1
    }

    pub fn a_elements(&self) -> Vec<u32> {
        (1..=2 * self.n).filter(|&e| self.contains(e)).collect()
    }

    pub fn b_elements(&self) -> Vec<u32> {
        (1..=2 * self.n).filter(|&e| !self.contains(e)).collect()
    }

    /// Swaps the roles of the two parts.
    pub fn complement(&self) -> Self {
        Self {
            n: self.n,
            mask: self.mask ^ full_mask(self.n),
        }
    }

    /// Reflects elements `i ↦ 2n + 1 - i`.
    pub fn mirror(&self) -> Self {
        Self {
            n: self.n,
            mask: mirror_mask(self.mask, self.n),
        }
    }
}

fn mirror_mask(mask: u64, n: u32) -> u64 {
    mask.reverse_bits() >> (64 - 2 * n)
}

/// Representative of `{mask, complement}` that contains element 1.
fn canonical(mask: u64, n: u32) -> u64 {
    if mask & 1 == 1 {
        mask
    } else {
        mask ^ full_mask(n)
    }
}

/// `M_k` for `k ∈ {-(2n-1), ..., 2n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceCounts {
    n: u32,
    counts: Vec<u64>,
    max_count: u64,
}

impl DifferenceCounts {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// `M_k`; zero outside the stored range.
    pub fn get(&self, k: i64) -> u64 {
        let offset = 2 * self.n as i64 - 1;
        if k.abs() > offset {
            0
        } else {
            self.counts[(k + offset) as usize]
        }
    }

    /// `(k, M_k)` ascending in `k`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        let offset = 2 * self.n as i64 - 1;
        self.counts
            .iter()
            .enumerate()
            .map(move |(idx, &c)| (idx as i64 - offset, c))
    }

    pub fn max_count(&self) -> u64 {
        self.max_count
    }

    /// `Σ_k M_k`, always `n²`.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

// M_k for k > 0 counts a = b + k: a-bits that sit k above a b-bit.
fn count_at(a: u64, b: u64, k: i64) -> u64 {
    if k >= 0 {
        (a & (b << k)).count_ones() as u64
    } else {
        (b & (a << -k)).count_ones() as u64
    }
}

pub fn difference_counts(p: &Partition) -> DifferenceCounts {
    let n = p.n;
    let a = p.mask;
    let b = a ^ full_mask(n);
    let offset = 2 * n as i64 - 1;
    let counts: Vec<u64> = (-offset..=offset).map(|k| count_at(a, b, k)).collect();
    let max_count = counts.iter().copied().max().unwrap_or(0);
    DifferenceCounts {
        n,
        counts,
        max_count,
    }
}

fn max_count_of(mask: u64, n: u32) -> u64 {
    let b = mask ^ full_mask(n);
    (1..2 * n as i64)
        .map(|k| count_at(mask, b, k).max(count_at(mask, b, -k)))
        .max()
        .unwrap_or(0)
}

/// Masks below `2^width` with `ones` bits set, increasing (Gosper's hack).
fn combinations(width: u32, ones: u32) -> impl Iterator<Item = u64> {
    debug_assert!(width < 64);
    let limit = 1u64 << width;
    let first = if ones == 0 {
        Some(0)
    } else if ones > width {
        None
    } else {
        Some((1u64 << ones) - 1)
    };
    std::iter::successors(first, move |&x| {
        if x == 0 {
            return None;
        }
        let c = x & x.wrapping_neg();
        let r = x + c;
        let next = (((r ^ x) >> 2) / c) | r;
        (next < limit).then_some(next)
    })
}

/// All masks of width `width` (≤ 64) with `ones` bits, split by highest set bit.
fn masks_par(width: u32, ones: u32) -> impl ParallelIterator<Item = u64> {
    let zero = (ones == 0).then_some(0u64);
    let tops = if ones == 0 || ones > width {
        0..0
    } else {
        ones - 1..width
    };
    rayon::iter::once(zero).flatten().chain(
        tops.into_par_iter()
            .flat_map_iter(move |t| combinations(t, ones - 1).map(move |rest| rest | 1 << t)),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pruning {
    /// Every balanced mask.
    None,
    /// Only masks containing element 1 that are no larger than their mirror image.
    Symmetry,
}

/// `M(n)` with a canonical witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinOverlap {
    pub n: u32,
    pub value: u64,
    /// Smallest optimal mask containing element 1.
    pub witness: Partition,
}

fn check_cap(n: u32, cap: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Argument("n must be positive".into()));
    }
    let limit = cap.min(MAX_N);
    if n > limit {
        return Err(Error::Capacity { n, cap: limit });
    }
    Ok(())
}

/// Exhaustive `M(n)` with swap and mirror symmetry pruning.
pub fn min_over_partitions(n: u32, cap: u32) -> Result<MinOverlap> {
    min_over_partitions_with(n, cap, Pruning::Symmetry)
}

pub fn min_over_partitions_with(n: u32, cap: u32, pruning: Pruning) -> Result<MinOverlap> {
    check_cap(n, cap)?;
    // (max count, canonical mask): the minimum picks M(n) and then the smallest
    // optimal mask containing 1, whichever enumeration produced it.
    let best = match pruning {
        Pruning::None => masks_par(2 * n, n)
            .map(|mask| (max_count_of(mask, n), canonical(mask, n)))
            .min(),
        Pruning::Symmetry => masks_par(2 * n - 1, n - 1)
            .map(|rest| (rest << 1) | 1)
            .filter(|&mask| mask <= canonical(mirror_mask(mask, n), n))
            .map(|mask| (max_count_of(mask, n), mask))
            .min(),
    };
    let (value, mask) = best.expect("at least one balanced partition");
    Ok(MinOverlap {
        n,
        value,
        witness: Partition::new(n, mask)?,
    })
}

/// The `2n`-step indicator function of the `a` part: step `i` is 1 iff `i + 1 ∈ a`.
///
/// Its shift values satisfy `n · g[-k] = M_k`.
pub fn partition_to_stepfn(p: &Partition) -> StepFunction {
    let values = (1..=2 * p.n)
        .map(|e| ratio(p.contains(e) as i64, 1))
        .collect();
    StepFunction::new(values).expect("indicator of n of 2n steps has unit integral")
}

/// CSV rows `n,M,M_over_n,witness_hex`.
pub fn to_csv(rows: &[MinOverlap]) -> String {
    let mut out = String::from("n,M,M_over_n,witness_hex\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:#x}",
            row.n,
            row.value,
            rational::to_decimal(&ratio(row.value as i64, row.n as i64), 12),
            row.witness.mask()
        );
    }
    out
}
