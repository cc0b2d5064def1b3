//! Exact pick distributions for a single label selection.
//!
//! Both calculators work in rational arithmetic so that results can be
//! compared exactly (the flatness property and "sums to one" checks).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Label = u64;

/// Default cap on the size of the enumerated draw space.
pub const DEFAULT_OUTCOME_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PickDistribution {
    probs: BTreeMap<Label, BigRational>,
}

impl PickDistribution {
    pub fn exact(&self, label: Label) -> BigRational {
        self.probs.get(&label).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn prob(&self, label: Label) -> f64 {
        self.probs.get(&label).map_or(0.0, to_f64)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, f64)> + '_ {
        self.probs.iter().map(|(&l, p)| (l, to_f64(p)))
    }

    pub fn exact_iter(&self) -> impl Iterator<Item = (Label, &BigRational)> {
        self.probs.iter().map(|(&l, p)| (l, p))
    }

    /// Largest single-label probability.
    pub fn max(&self) -> BigRational {
        self.probs.values().max().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total(&self) -> BigRational {
        self.probs.values().fold(BigRational::zero(), |a, p| a + p)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

fn to_f64(p: &BigRational) -> f64 {
    p.to_f64().unwrap_or(f64::NAN)
}

fn ratio(num: u128, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Distribution of `l_src^pos` for uniform `src` over the sequences and
/// uniform `pos` over positions: the frequency of each label in the union of
/// the sequences. Sequences must share one length.
pub fn uniform_pick_distribution<S: AsRef<[Label]>>(sequences: &[S]) -> Result<PickDistribution> {
    let Some(first) = sequences.first() else {
        return Err(Error::InvalidParameter("need at least one sequence".into()));
    };
    let m = first.as_ref().len();
    if m == 0 {
        return Err(Error::InvalidParameter("sequences must be non-empty".into()));
    }
    if sequences.iter().any(|s| s.as_ref().len() != m) {
        return Err(Error::InvalidParameter("sequences have different lengths".into()));
    }
    let mut counts: BTreeMap<Label, u128> = BTreeMap::new();
    for s in sequences {
        for &l in s.as_ref() {
            *counts.entry(l).or_default() += 1;
        }
    }
    let total = (sequences.len() * m) as u128;
    Ok(PickDistribution { probs: counts.into_iter().map(|(l, c)| (l, ratio(c, total))).collect() })
}

/// Exact distribution of the plurality winner when every voter submits one
/// uniform draw from its sequence and ties are broken uniformly. Enumerates
/// the full draw space, refusing when it exceeds `cap` outcomes.
pub fn voting_distribution<S: AsRef<[Label]>>(sequences: &[S], cap: u128) -> Result<PickDistribution> {
    if sequences.is_empty() {
        return Err(Error::InvalidParameter("need at least one voter".into()));
    }
    let mut outcomes: u128 = 1;
    for s in sequences {
        let len = s.as_ref().len() as u128;
        if len == 0 {
            return Err(Error::InvalidParameter("voter with an empty sequence".into()));
        }
        outcomes = outcomes.saturating_mul(len);
    }
    if outcomes > cap {
        return Err(Error::EnumerationTooLarge { outcomes, cap });
    }

    // Each voter reduces to (label, multiplicity) pairs; an outcome's weight
    // is the product of the chosen multiplicities.
    let voters: Vec<Vec<(Label, u128)>> = sequences
        .iter()
        .map(|s| {
            let mut m: BTreeMap<Label, u128> = BTreeMap::new();
            for &l in s.as_ref() {
                *m.entry(l).or_default() += 1;
            }
            m.into_iter().collect()
        })
        .collect();

    // wins[label][k] = total weight of outcomes where label ties k-ways for first
    let n = voters.len();
    let mut wins: BTreeMap<Label, Vec<u128>> = BTreeMap::new();
    let mut choice = vec![0usize; n];
    let mut tally: Vec<(Label, usize)> = Vec::with_capacity(n);
    loop {
        tally.clear();
        let mut weight: u128 = 1;
        for (v, &c) in voters.iter().zip(&choice) {
            let (label, mult) = v[c];
            weight *= mult;
            match tally.iter_mut().find(|(l, _)| *l == label) {
                Some(e) => e.1 += 1,
                None => tally.push((label, 1)),
            }
        }
        let top = tally.iter().map(|e| e.1).max().unwrap_or(0);
        let k = tally.iter().filter(|e| e.1 == top).count();
        for &(label, c) in &tally {
            if c == top {
                let row = wins.entry(label).or_insert_with(|| vec![0; n + 1]);
                row[k] += weight;
            }
        }

        // odometer increment
        let mut i = 0;
        loop {
            if i == n {
                let probs = wins
                    .into_iter()
                    .map(|(label, row)| {
                        let mut p = BigRational::zero();
                        for (k, &w) in row.iter().enumerate() {
                            if w > 0 {
                                p += ratio(w, outcomes * k as u128);
                            }
                        }
                        (label, p)
                    })
                    .collect();
                return Ok(PickDistribution { probs });
            }
            choice[i] += 1;
            if choice[i] < voters[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// True when the distribution sums to exactly one.
pub fn sums_to_one(d: &PickDistribution) -> bool {
    d.total() == BigRational::one()
}
