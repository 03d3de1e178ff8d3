//! Closed-form values of `Q_lambda` at `t_k = delta_{k,1}` and at `t_k = delta_{k,3}/3`.
//!
//! `A_lambda` denotes the second specialization. Every function accepts raw
//! index vectors and normalizes them first, so zero and negative parts are
//! handled by the same sign rules as the polynomials themselves.

use crate::error::Result;
use crate::partition::{normalize, standard_form, StandardForm, StrictPartition};
use crate::poly::{int, rat, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// `n!! = n (n-2) ...`, with `n!! = 1` for `n <= 0`.
pub fn double_factorial(n: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut x = n;
    while x > 1 {
        acc *= x;
        x -= 2;
    }
    acc
}

/// `x_[[k]] = x (x-2) ... (x-2k+2)`; the empty product is 1.
pub fn double_falling(x: i64, k: u32) -> BigInt {
    (0..k as i64).fold(BigInt::one(), |acc, i| acc * (x - 2 * i))
}

fn factorial(n: i64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * i)
}

fn big(x: BigInt) -> Rational {
    Rational::from_integer(x)
}

fn pow(base: &Rational, e: u64) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= base;
    }
    acc
}

/// `Q_v(delta_{k,1})`: `(2^|l| / l!) prod_{i<j} (l_i - l_j)/(l_i + l_j)` after normalization.
pub fn hook_eval(v: &[i64]) -> Result<Rational> {
    let (c, sp) = normalize(v)?;
    if c == 0 {
        return Ok(Rational::zero());
    }
    Ok(hook_strict(&sp) * int(c))
}

fn hook_strict(sp: &StrictPartition) -> Rational {
    let parts = sp.to_vec();
    let mut value = big(BigInt::from(2).pow(sp.weight() as u32));
    for &x in &parts {
        value /= big(factorial(x));
    }
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            value *= rat(parts[i] - parts[j], parts[i] + parts[j]);
        }
    }
    value
}

/// `A_v = Q_v(delta_{k,3}/3)` through the standard-form closed form.
pub fn a_const(v: &[i64]) -> Result<Rational> {
    let (c, sp) = normalize(v)?;
    if c == 0 {
        return Ok(Rational::zero());
    }
    Ok(a_strict(&sp) * int(c))
}

/// `A_sp` for a strict partition.
pub fn a_strict(sp: &StrictPartition) -> Rational {
    let (sf, sign) = standard_form(sp);
    a_standard(&sf) * int(sign)
}

/// The closed form for a partition already arranged in standard form.
pub fn a_standard(sf: &StandardForm) -> Rational {
    let (ks, ms, ns) = (&sf.ks, &sf.ms, &sf.ns);
    if ms.len() != ns.len() {
        return Rational::zero();
    }
    let r = ns.len() as i64;
    let weight: i64 = sf.parts().iter().sum();
    let mut value = pow(&rat(2, 3), (weight / 3) as u64) * big(BigInt::from(2).pow(r as u32));
    if (r * (r - 1) / 2) % 2 == 1 {
        value = -value;
    }
    for &x in ks.iter().chain(ms).chain(ns) {
        value /= big(factorial(x));
    }
    for i in 0..ks.len() {
        for j in i + 1..ks.len() {
            value *= rat(ks[i] - ks[j], ks[i] + ks[j]);
        }
    }
    for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            value *= int((ms[i] - ms[j]) * (ns[i] - ns[j]));
        }
    }
    for &m in ms {
        for &n in ns {
            value /= int(m + n + 1);
        }
    }
    value
}

/// `Q_sp(delta_{k,1}) / Q_{2 sp}(delta_{k,1}) = prod (2 sp_j - 1)!!`.
pub fn ratio_dfact(sp: &StrictPartition) -> Rational {
    big(sp
        .parts()
        .iter()
        .map(|&x| double_factorial(2 * x as i64 - 1))
        .product())
}

/// `A_{2 sp}` from `A_sp` through the doubling formula.
pub fn a_double(sp: &StrictPartition) -> Rational {
    if !sp.weight().is_multiple_of(3) {
        return Rational::zero();
    }
    let (sf, _) = standard_form(sp);
    let mut value = a_strict(sp) * pow(&rat(1, 3), sp.weight() / 3);
    if sf.r() % 2 == 1 {
        value = -value;
    }
    let denom: BigInt = sf
        .ks
        .iter()
        .map(|&k| double_factorial(2 * k - 1))
        .product::<BigInt>()
        * sf.ms
            .iter()
            .map(|&m| double_factorial(2 * m - 1))
            .product::<BigInt>()
        * sf.ns
            .iter()
            .map(|&n| double_factorial(2 * n + 1))
            .product::<BigInt>();
    value / big(denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(parts: &[u32]) -> StrictPartition {
        StrictPartition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn double_products() {
        assert_eq!(double_falling(7, 3), BigInt::from(105));
        assert_eq!(double_falling(-4, 0), BigInt::from(1));
        assert_eq!(double_falling(5, 4), BigInt::from(-15));
        assert_eq!(double_factorial(-1), BigInt::from(1));
        assert_eq!(double_factorial(5), BigInt::from(15));
        assert_eq!(double_factorial(6), BigInt::from(48));
    }

    #[test]
    fn hook_examples() {
        assert_eq!(hook_eval(&[1]).unwrap(), int(2));
        assert_eq!(hook_eval(&[2, 1]).unwrap(), rat(4, 3));
        assert_eq!(hook_eval(&[]).unwrap(), int(1));
        assert_eq!(hook_eval(&[1, 2]).unwrap(), rat(-4, 3));
    }

    #[test]
    fn a_examples() {
        assert_eq!(a_const(&[3]).unwrap(), rat(2, 3));
        assert_eq!(a_const(&[6]).unwrap(), rat(2, 9));
        assert_eq!(a_const(&[1, 2]).unwrap(), rat(4, 3));
        assert_eq!(a_const(&[2, 1]).unwrap(), rat(-4, 3));
        assert_eq!(a_const(&[4]).unwrap(), int(0));
        assert_eq!(a_const(&[]).unwrap(), int(1));
        assert_eq!(a_const(&[0]).unwrap(), int(1));
        assert_eq!(a_const(&[-1, 1]).unwrap(), int(-2));
        assert_eq!(a_const(&[2, -2]).unwrap(), int(0));
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(ratio_dfact(&sp(&[1])), int(1));
        assert_eq!(ratio_dfact(&sp(&[3])), int(15));
        assert_eq!(ratio_dfact(&sp(&[2, 1])), int(3));
        for p in [sp(&[3]), sp(&[2, 1]), sp(&[4, 2, 1])] {
            let q = hook_strict(&p) / hook_strict(&p.doubled());
            assert_eq!(ratio_dfact(&p), q, "{p}");
        }
    }

    #[test]
    fn doubling_examples() {
        assert_eq!(a_double(&sp(&[3])), rat(2, 9));
        assert_eq!(a_double(&sp(&[1])), int(0));
        assert_eq!(a_double(&sp(&[2, 1])), rat(4, 9));
        assert_eq!(a_const(&[4, 2]).unwrap(), rat(4, 9));
    }
}
