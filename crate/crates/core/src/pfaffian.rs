//! Pfaffians of skew-symmetric matrices over any commutative ring.
//!
//! Expansion runs along the first remaining row and is memoized on the
//! subset of surviving indices, so no division is ever needed.

use crate::error::{Error, Result};
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::ops::{Add, Mul, Sub};

/// A skew-symmetric matrix storing only the strict upper triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix<T> {
    dim: usize,
    upper: Vec<T>,
}

impl<T: Clone> SkewMatrix<T> {
    /// Builds the matrix from `f(i, j)` evaluated for `i < j`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut upper = Vec::with_capacity(dim * dim.saturating_sub(1) / 2);
        for i in 0..dim {
            for j in i + 1..dim {
                upper.push(f(i, j));
            }
        }
        SkewMatrix { dim, upper }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(i, j)` for `i < j`.
    pub fn upper(&self, i: usize, j: usize) -> &T {
        assert!(i < j && j < self.dim);
        // Rows before i contribute (dim-1) + (dim-2) + ... + (dim-i) entries.
        let row_start = i * (2 * self.dim - i - 1) / 2;
        &self.upper[row_start + (j - i - 1)]
    }
}

/// `Pf(m)`, with `Pf` of the empty matrix equal to 1.
pub fn pfaffian<T>(m: &SkewMatrix<T>) -> Result<T>
where
    T: Clone + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    if m.dim() % 2 == 1 {
        return Err(Error::OddDimension(m.dim()));
    }
    assert!(m.dim() <= 64, "pfaffian dimension {} exceeds 64", m.dim());
    let full = if m.dim() == 64 {
        u64::MAX
    } else {
        (1u64 << m.dim()) - 1
    };
    let mut memo = HashMap::new();
    Ok(pf_subset(m, full, &mut memo))
}

fn pf_subset<T>(m: &SkewMatrix<T>, mask: u64, memo: &mut HashMap<u64, T>) -> T
where
    T: Clone + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    if mask == 0 {
        return T::one();
    }
    if let Some(v) = memo.get(&mask) {
        return v.clone();
    }
    let i = mask.trailing_zeros() as usize;
    let rest = mask & !(1u64 << i);
    let mut total = T::zero();
    let mut plus = true;
    let mut scan = rest;
    while scan != 0 {
        let j = scan.trailing_zeros() as usize;
        scan &= scan - 1;
        let a = m.upper(i, j);
        if !a.is_zero() {
            let minor = pf_subset(m, rest & !(1u64 << j), memo);
            let term = a.clone() * minor;
            total = if plus { total + term } else { total - term };
        }
        plus = !plus;
    }
    memo.insert(mask, total.clone());
    total
}
