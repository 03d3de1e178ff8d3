//! Partitions and Q-index normalization.
//!
//! - [`StrictPartition`]: strictly decreasing positive parts, the basis index set.
//! - [`normalize`]: reduces an arbitrary index vector `v` to `coefficient * Q_sp`.
//! - [`enumerate_strict`]: every strict partition up to a weight, in canonical order.
//! - [`StandardForm`]: the arrangement of parts by residue mod 3.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// A strict partition. Ordered by weight, then decreasing-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct StrictPartition {
    parts: Vec<u32>,
}

impl StrictPartition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        let ok = parts.iter().all(|&p| p > 0) && parts.windows(2).all(|w| w[0] > w[1]);
        if ok {
            Ok(StrictPartition { parts })
        } else {
            Err(Error::NotStrict(parts.iter().map(|&p| p as i64).collect()))
        }
    }

    pub fn from_slice(parts: &[i64]) -> Result<Self> {
        if parts.iter().any(|&p| p <= 0 || p > u32::MAX as i64) {
            return Err(Error::NotStrict(parts.to_vec()));
        }
        Self::new(parts.iter().map(|&p| p as u32).collect())
    }

    pub fn empty() -> Self {
        StrictPartition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn weight(&self) -> u64 {
        self.parts.iter().map(|&p| p as u64).sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn to_vec(&self) -> Vec<i64> {
        self.parts.iter().map(|&p| p as i64).collect()
    }

    /// The partition `2λ`.
    pub fn doubled(&self) -> StrictPartition {
        StrictPartition {
            parts: self.parts.iter().map(|&p| 2 * p).collect(),
        }
    }
}

impl Ord for StrictPartition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| other.parts.cmp(&self.parts))
    }
}

impl PartialOrd for StrictPartition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<Vec<i64>> for StrictPartition {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        Self::from_slice(&v)
    }
}

impl From<StrictPartition> for Vec<i64> {
    fn from(sp: StrictPartition) -> Vec<i64> {
        sp.to_vec()
    }
}

impl fmt::Display for StrictPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Reduces `Q_v` to `coefficient * Q_sp` with `coefficient` in {-2,-1,0,1,2}.
///
/// A single negative part `v_i` is matched against the unique later part equal
/// to `-v_i`; the pair is removed with factor `(-1)^(j-i-1+v_j) * 2`. Without a
/// unique match the result is zero. The remaining non-negative parts are then
/// sorted, every transposition of two parts that are not both zero giving -1.
pub fn normalize(v: &[i64]) -> Result<(i64, StrictPartition)> {
    let negatives: Vec<usize> = (0..v.len()).filter(|&i| v[i] < 0).collect();
    if negatives.len() > 1 {
        return Err(Error::MoreThanOneNegativePart(v.to_vec()));
    }
    let mut coefficient = 1i64;
    let rest: Vec<i64> = match negatives.first() {
        None => v.to_vec(),
        Some(&i) => {
            let target = -v[i];
            let mut matches = (i + 1..v.len()).filter(|&k| v[k] == target);
            let j = match (matches.next(), matches.next()) {
                (Some(j), None) => j,
                _ => return Ok((0, StrictPartition::empty())),
            };
            let exponent = (j - i - 1) as i64 + target;
            coefficient = if exponent % 2 == 0 { 2 } else { -2 };
            v.iter()
                .enumerate()
                .filter(|&(k, _)| k != i && k != j)
                .map(|(_, &x)| x)
                .collect()
        }
    };
    let mut inversions = 0usize;
    for a in 0..rest.len() {
        for b in a + 1..rest.len() {
            match rest[a].cmp(&rest[b]) {
                Ordering::Less => inversions += 1,
                Ordering::Equal if rest[a] > 0 => return Ok((0, StrictPartition::empty())),
                _ => {}
            }
        }
    }
    if inversions % 2 == 1 {
        coefficient = -coefficient;
    }
    let mut parts: Vec<u32> = rest.iter().filter(|&&x| x > 0).map(|&x| x as u32).collect();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    Ok((coefficient, StrictPartition { parts }))
}

/// Strict partitions of exactly `n`, in decreasing-lexicographic order.
pub fn strict_partitions_of(n: u32) -> Vec<StrictPartition> {
    fn go(remaining: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<StrictPartition>) {
        if remaining == 0 {
            out.push(StrictPartition {
                parts: current.clone(),
            });
            return;
        }
        for first in (1..=remaining.min(max_part)).rev() {
            // The remaining parts are distinct and below `first`.
            if first * (first + 1) / 2 < remaining {
                break;
            }
            current.push(first);
            go(remaining - first, first - 1, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// All strict partitions of weight at most `max_weight`, in canonical order.
pub fn enumerate_strict(max_weight: u32) -> Vec<StrictPartition> {
    (0..=max_weight).flat_map(strict_partitions_of).collect()
}

/// Parts grouped by residue mod 3: `3k`, `3m+1`, `3n+2`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct StandardForm {
    pub ks: Vec<i64>,
    pub ms: Vec<i64>,
    pub ns: Vec<i64>,
}

impl StandardForm {
    pub fn p(&self) -> usize {
        self.ks.len()
    }

    pub fn q(&self) -> usize {
        self.ms.len()
    }

    pub fn r(&self) -> usize {
        self.ns.len()
    }

    /// The sequence `(3k_1,..,3k_p, 3m_1+1,..,3m_q+1, 3n_1+2,..,3n_r+2)`.
    pub fn parts(&self) -> Vec<i64> {
        let ks = self.ks.iter().map(|k| 3 * k);
        let ms = self.ms.iter().map(|m| 3 * m + 1);
        let ns = self.ns.iter().map(|n| 3 * n + 2);
        ks.chain(ms).chain(ns).collect()
    }

    /// Stably rearranges non-negative parts into standard form and returns
    /// the sign of the rearranging permutation.
    pub fn arrange(v: &[i64]) -> (StandardForm, i64) {
        debug_assert!(v.iter().all(|&x| x >= 0));
        let mut inversions = 0usize;
        for a in 0..v.len() {
            for b in a + 1..v.len() {
                if v[a].rem_euclid(3) > v[b].rem_euclid(3) {
                    inversions += 1;
                }
            }
        }
        let mut sf = StandardForm::default();
        for &x in v {
            match x.rem_euclid(3) {
                0 => sf.ks.push(x / 3),
                1 => sf.ms.push(x / 3),
                _ => sf.ns.push(x / 3),
            }
        }
        (sf, if inversions.is_multiple_of(2) { 1 } else { -1 })
    }

    /// Reads a sequence that is already laid out in standard form.
    pub fn from_arranged(v: &[i64]) -> Result<StandardForm> {
        if v.iter().any(|&x| x < 0) {
            return Err(Error::HypothesisViolated(format!(
                "{v:?} has a negative part"
            )));
        }
        if v.windows(2).any(|w| w[0] % 3 > w[1] % 3) {
            return Err(Error::HypothesisViolated(format!(
                "{v:?} is not in standard form"
            )));
        }
        Ok(Self::arrange(v).0)
    }
}

/// Standard form of a strict partition, with the sign of the rearrangement.
pub fn standard_form(sp: &StrictPartition) -> (StandardForm, i64) {
    StandardForm::arrange(&sp.to_vec())
}
