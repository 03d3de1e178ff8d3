//! Sparse exact polynomials in the odd variables `t_1, t_3, t_5, ...`.
//!
//! - [`Monomial`]: sorted `(index, exponent)` pairs, graded by `deg t_k = k`.
//! - [`OddPoly`]: map from monomial to nonzero rational coefficient.
//! - [`HbarSeries`]: finitely many polynomial slices indexed by a power of `hbar`,
//!   with a global truncation on the graded t-degree.
//!
//! Rationals serialize as canonical strings such as `"3"` or `"-5/2"`.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n / d`, reduced. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn format_rational(x: &Rational) -> String {
    x.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Serde adapter storing a [`Rational`] as its canonical string.
pub mod rational_string {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }
}

/// A monomial `prod t_k^{e_k}` over odd `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    // Field order gives the graded ordering: degree first, then exponents.
    degree: u32,
    exps: Vec<(u32, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(k: u32) -> Self {
        assert!(k % 2 == 1, "even variable index {k}");
        Monomial {
            degree: k,
            exps: vec![(k, 1)],
        }
    }

    /// Builds a monomial from `(index, exponent)` pairs in any order.
    pub fn from_pairs(pairs: &[(u32, u32)]) -> Result<Self> {
        let mut map: BTreeMap<u32, u32> = BTreeMap::new();
        for &(k, e) in pairs {
            if k % 2 == 0 {
                return Err(Error::InvalidOddIndex(k as i64));
            }
            if e > 0 {
                *map.entry(k).or_insert(0) += e;
            }
        }
        let exps: Vec<(u32, u32)> = map.into_iter().collect();
        let degree = exps.iter().map(|&(k, e)| k * e).sum();
        Ok(Monomial { degree, exps })
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, k: u32) -> u32 {
        match self.exps.binary_search_by_key(&k, |&(i, _)| i) {
            Ok(pos) => self.exps[pos].1,
            Err(_) => 0,
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut a, mut b) = (0, 0);
        while a < self.exps.len() && b < other.exps.len() {
            let (ka, ea) = self.exps[a];
            let (kb, eb) = other.exps[b];
            if ka == kb {
                exps.push((ka, ea + eb));
                a += 1;
                b += 1;
            } else if ka < kb {
                exps.push((ka, ea));
                a += 1;
            } else {
                exps.push((kb, eb));
                b += 1;
            }
        }
        exps.extend_from_slice(&self.exps[a..]);
        exps.extend_from_slice(&other.exps[b..]);
        Monomial {
            degree: self.degree + other.degree,
            exps,
        }
    }

    /// Multiplies by `t_k^e` (`e` may be negative as long as the result is valid).
    fn shifted(&self, k: u32, e: i64) -> Option<Monomial> {
        let mut exps = self.exps.clone();
        match exps.binary_search_by_key(&k, |&(i, _)| i) {
            Ok(pos) => {
                let new = exps[pos].1 as i64 + e;
                if new < 0 {
                    return None;
                }
                if new == 0 {
                    exps.remove(pos);
                } else {
                    exps[pos].1 = new as u32;
                }
            }
            Err(pos) => {
                if e < 0 {
                    return None;
                }
                if e > 0 {
                    exps.insert(pos, (k, e as u32));
                }
            }
        }
        let degree = (self.degree as i64 + k as i64 * e) as u32;
        Some(Monomial { degree, exps })
    }

    /// Inner product of the monomial with itself: `prod e_k! / (2k)^{e_k}`.
    pub fn self_pairing(&self) -> Rational {
        let mut out = Rational::one();
        for &(k, e) in &self.exps {
            for i in 1..=e {
                out *= rat(i as i64, 2 * k as i64);
            }
        }
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "1");
        }
        for (i, &(k, e)) in self.exps.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "t{k}")?;
            } else {
                write!(f, "t{k}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial in the odd variables with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct OddPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl OddPoly {
    pub fn zero() -> Self {
        OddPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_term(Monomial::one(), c)
    }

    /// The variable `t_k`.
    pub fn var(k: u32) -> Self {
        Self::from_term(Monomial::var(k), Rational::one())
    }

    pub fn from_term(m: Monomial, c: Rational) -> Self {
        let mut p = OddPoly::zero();
        p.add_term(m, c);
        p
    }

    /// Convenience constructor: `c * prod t_k^{e}` from pairs.
    pub fn term(pairs: &[(u32, u32)], c: Rational) -> Self {
        Self::from_term(Monomial::from_pairs(pairs).expect("odd indices"), c)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one())
    }

    /// Highest graded degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Lowest graded degree, `None` for the zero polynomial.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::degree)
    }

    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    pub fn homogeneous_part(&self, d: u32) -> OddPoly {
        self.filter(|m| m.degree() == d)
    }

    pub fn truncated(&self, max_degree: u32) -> OddPoly {
        self.filter(|m| m.degree() <= max_degree)
    }

    fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> OddPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| keep(m))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        OddPoly { terms }
    }

    pub fn scale(&self, c: &Rational) -> OddPoly {
        if c.is_zero() {
            return OddPoly::zero();
        }
        let terms = self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect();
        OddPoly { terms }
    }

    pub fn add_scaled(&mut self, other: &OddPoly, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            self.add_term(m.clone(), x * c);
        }
    }

    /// Product with every term of degree above `max_degree` dropped.
    pub fn mul_truncated(&self, other: &OddPoly, max_degree: Option<u32>) -> OddPoly {
        let mut out = OddPoly::zero();
        for (ma, ca) in &self.terms {
            if max_degree.is_some_and(|d| ma.degree() > d) {
                break;
            }
            for (mb, cb) in &other.terms {
                let deg = ma.degree() + mb.degree();
                if max_degree.is_some_and(|d| deg > d) {
                    break;
                }
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// `d/dt_k`.
    pub fn partial(&self, k: u32) -> OddPoly {
        let mut out = OddPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(k);
            if e > 0 {
                let m2 = m.shifted(k, -1).expect("exponent present");
                out.add_term(m2, c * int(e as i64));
            }
        }
        out
    }

    /// `t_k * p`.
    pub fn mul_by_t(&self, k: u32) -> OddPoly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.shifted(k, 1).expect("raising"), c.clone()))
            .collect();
        OddPoly { terms }
    }

    /// `sum_k c(k) t_k d/dt_{k+shift}` over odd `k >= 1`, skipping `k` for which
    /// `c(k)` returns `None`.
    pub fn shift_operator(&self, shift: i64, c: impl Fn(u32) -> Option<Rational>) -> OddPoly {
        let mut out = OddPoly::zero();
        for (m, coef) in &self.terms {
            for &(j, e) in m.pairs() {
                let k = j as i64 - shift;
                if k < 1 {
                    continue;
                }
                let Some(ck) = c(k as u32) else { continue };
                let lowered = m.shifted(j, -1).expect("exponent present");
                let raised = lowered.shifted(k as u32, 1).expect("raising");
                out.add_term(raised, coef * ck * int(e as i64));
            }
        }
        out
    }

    /// Evaluates with `t_k = assignment[k]`; unlisted variables are zero.
    pub fn evaluate(&self, assignment: &BTreeMap<u32, Rational>) -> Rational {
        let mut total = Rational::zero();
        'terms: for (m, c) in &self.terms {
            let mut v = c.clone();
            for &(k, e) in m.pairs() {
                match assignment.get(&k) {
                    Some(x) if !x.is_zero() => v *= x.pow(e as i32),
                    _ => continue 'terms,
                }
            }
            total += v;
        }
        total
    }

    /// `sum_n p^n / n!` truncated at `max_degree`.
    pub fn exp_truncated(&self, max_degree: u32) -> Result<OddPoly> {
        if !self.constant_term().is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let mut result = OddPoly::one();
        let mut power = OddPoly::one();
        let mut n = 1i64;
        loop {
            power = power
                .mul_truncated(self, Some(max_degree))
                .scale(&rat(1, n));
            if power.is_zero() {
                return Ok(result);
            }
            result += &power;
            n += 1;
        }
    }
}

pub fn add(p: &OddPoly, q: &OddPoly) -> OddPoly {
    p + q
}

pub fn mul(p: &OddPoly, q: &OddPoly, max_degree: Option<u32>) -> OddPoly {
    p.mul_truncated(q, max_degree)
}

pub fn scale(p: &OddPoly, c: &Rational) -> OddPoly {
    p.scale(c)
}

pub fn partial(p: &OddPoly, k: u32) -> OddPoly {
    p.partial(k)
}

pub fn mul_by_t(p: &OddPoly, k: u32) -> OddPoly {
    p.mul_by_t(k)
}

pub fn exp_truncated(p: &OddPoly, max_degree: u32) -> Result<OddPoly> {
    p.exp_truncated(max_degree)
}

pub fn evaluate(p: &OddPoly, assignment: &BTreeMap<u32, Rational>) -> Rational {
    p.evaluate(assignment)
}

impl fmt::Display for OddPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i > 0 {
                write!(f, " {sign} ")?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let a = c.abs();
            match (a.is_one(), m.is_one()) {
                (true, true) => write!(f, "1")?,
                (true, false) => write!(f, "{m}")?,
                (false, true) => write!(f, "{a}")?,
                (false, false) => write!(f, "{a}*{m}")?,
            }
        }
        Ok(())
    }
}

impl<'a> AddAssign<&'a OddPoly> for OddPoly {
    fn add_assign(&mut self, rhs: &'a OddPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<'a> SubAssign<&'a OddPoly> for OddPoly {
    fn sub_assign(&mut self, rhs: &'a OddPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl<'a> Add<&'a OddPoly> for &'a OddPoly {
    type Output = OddPoly;
    fn add(self, rhs: &'a OddPoly) -> OddPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a OddPoly> for &'a OddPoly {
    type Output = OddPoly;
    fn sub(self, rhs: &'a OddPoly) -> OddPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> Mul<&'a OddPoly> for &'a OddPoly {
    type Output = OddPoly;
    fn mul(self, rhs: &'a OddPoly) -> OddPoly {
        self.mul_truncated(rhs, None)
    }
}

impl Add for OddPoly {
    type Output = OddPoly;
    fn add(mut self, rhs: OddPoly) -> OddPoly {
        self += &rhs;
        self
    }
}

impl Sub for OddPoly {
    type Output = OddPoly;
    fn sub(mut self, rhs: OddPoly) -> OddPoly {
        self -= &rhs;
        self
    }
}

impl Mul for OddPoly {
    type Output = OddPoly;
    fn mul(self, rhs: OddPoly) -> OddPoly {
        self.mul_truncated(&rhs, None)
    }
}

impl Neg for OddPoly {
    type Output = OddPoly;
    fn neg(self) -> OddPoly {
        let terms = self.terms.into_iter().map(|(m, c)| (m, -c)).collect();
        OddPoly { terms }
    }
}

impl Zero for OddPoly {
    fn zero() -> Self {
        OddPoly::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for OddPoly {
    fn one() -> Self {
        OddPoly::one()
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    monomial: Vec<(u32, u32)>,
    #[serde(with = "rational_string")]
    coeff: Rational,
}

impl Serialize for OddPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(m, c)| TermJson {
                monomial: m.exps.clone(),
                coeff: c.clone(),
            })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for OddPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<TermJson>::deserialize(d)?;
        let mut p = OddPoly::zero();
        for t in terms {
            let m = Monomial::from_pairs(&t.monomial).map_err(D::Error::custom)?;
            p.add_term(m, t.coeff);
        }
        Ok(p)
    }
}

/// Polynomial slices indexed by an integer power of `hbar`.
///
/// Equality compares slices and truncation; the grading flag is derived data.
#[derive(Clone, Debug)]
pub struct HbarSeries {
    slices: BTreeMap<i64, OddPoly>,
    truncation: u32,
    kw_graded: bool,
}

impl PartialEq for HbarSeries {
    fn eq(&self, other: &Self) -> bool {
        self.truncation == other.truncation && self.slices == other.slices
    }
}

impl Eq for HbarSeries {}

impl HbarSeries {
    pub fn new(truncation: u32) -> Self {
        HbarSeries {
            slices: BTreeMap::new(),
            truncation,
            kw_graded: false,
        }
    }

    /// The series `1`.
    pub fn one(truncation: u32) -> Self {
        let mut s = Self::new(truncation);
        s.add_to_slice(0, &OddPoly::one());
        s
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn kw_graded(&self) -> bool {
        self.kw_graded
    }

    /// Marks the series as KW-graded after checking that the slice at `hbar^a`
    /// is homogeneous of degree `3a`.
    pub fn mark_kw_graded(&mut self) -> bool {
        let ok = self
            .slices
            .iter()
            .all(|(&a, p)| a >= 0 && p.is_homogeneous(3 * a as u32));
        self.kw_graded = ok;
        ok
    }

    pub fn slice(&self, a: i64) -> Option<&OddPoly> {
        self.slices.get(&a)
    }

    pub fn slice_or_zero(&self, a: i64) -> OddPoly {
        self.slices.get(&a).cloned().unwrap_or_default()
    }

    pub fn slices(&self) -> impl Iterator<Item = (i64, &OddPoly)> {
        self.slices.iter().map(|(&a, p)| (a, p))
    }

    pub fn orders(&self) -> Vec<i64> {
        self.slices.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.slices.is_empty()
    }

    /// Adds `p` (truncated) into the slice at `hbar^a`.
    pub fn add_to_slice(&mut self, a: i64, p: &OddPoly) {
        let p = p.truncated(self.truncation);
        if p.is_zero() {
            return;
        }
        let entry = self.slices.entry(a).or_default();
        *entry += &p;
        if entry.is_zero() {
            self.slices.remove(&a);
        }
        self.kw_graded = false;
    }

    /// The slice at `hbar^{a + a_shift}` receives `f(slice at hbar^a)`.
    pub fn map_shift(&self, a_shift: i64, f: impl Fn(&OddPoly) -> OddPoly) -> HbarSeries {
        let mut out = HbarSeries::new(self.truncation);
        for (&a, p) in &self.slices {
            out.add_to_slice(a + a_shift, &f(p));
        }
        out
    }

    pub fn with_truncation(&self, truncation: u32) -> HbarSeries {
        let mut out = HbarSeries::new(truncation);
        for (&a, p) in &self.slices {
            out.add_to_slice(a, p);
        }
        out
    }

    pub fn add(&self, other: &HbarSeries) -> HbarSeries {
        let mut out = self.clone();
        out.truncation = self.truncation.min(other.truncation);
        out = out.with_truncation(out.truncation);
        for (&a, p) in &other.slices {
            out.add_to_slice(a, p);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> HbarSeries {
        self.map_shift(0, |p| p.scale(c))
    }

    pub fn sub(&self, other: &HbarSeries) -> HbarSeries {
        self.add(&other.scale(&int(-1)))
    }

    /// Product with `hbar` exponents adding and t-degree truncated.
    pub fn mul(&self, other: &HbarSeries) -> HbarSeries {
        let d = self.truncation.min(other.truncation);
        let mut out = HbarSeries::new(d);
        for (&a, p) in &self.slices {
            for (&b, q) in &other.slices {
                out.add_to_slice(a + b, &p.mul_truncated(q, Some(d)));
            }
        }
        out
    }

    /// `log` of a series whose `hbar^0` slice is `1` and whose other slices
    /// sit at positive orders without constant terms.
    pub fn log(&self) -> Result<HbarSeries> {
        let mut x = self.clone();
        let one = HbarSeries::one(self.truncation);
        x = x.sub(&one);
        if x.slices.keys().any(|&a| a <= 0) {
            return Err(Error::HypothesisViolated(
                "log needs hbar^0 slice equal to 1 and no negative orders".into(),
            ));
        }
        if x.slices.values().any(|p| !p.constant_term().is_zero()) {
            return Err(Error::NonzeroConstantTerm);
        }
        let mut result = HbarSeries::new(self.truncation);
        let mut power = x.clone();
        let mut n = 1i64;
        while !power.is_zero() {
            let c = if n % 2 == 1 { rat(1, n) } else { rat(-1, n) };
            result = result.add(&power.scale(&c));
            power = power.mul(&x);
            n += 1;
        }
        Ok(result)
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct SliceJson {
    pub hbar_order: i64,
    pub poly: OddPoly,
}

impl HbarSeries {
    pub(crate) fn to_json_slices(&self) -> Vec<SliceJson> {
        self.slices
            .iter()
            .map(|(&a, p)| SliceJson {
                hbar_order: a,
                poly: p.clone(),
            })
            .collect()
    }

    pub(crate) fn from_json_slices(truncation: u32, slices: Vec<SliceJson>) -> HbarSeries {
        let mut s = HbarSeries::new(truncation);
        for sl in slices {
            s.add_to_slice(sl.hbar_order, &sl.poly);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(k: u32) -> OddPoly {
        OddPoly::var(k)
    }

    fn c(n: i64, d: i64) -> OddPoly {
        OddPoly::constant(rat(n, d))
    }

    #[test]
    fn ring_examples() {
        let two_t1 = t(1).scale(&int(2));
        assert!(add(&two_t1, &two_t1.scale(&int(-1))).is_zero());
        assert!(mul(&t(1), &t(1), Some(1)).is_zero());
        let two_t1_sq = OddPoly::term(&[(1, 2)], int(2));
        assert_eq!(
            mul(&two_t1, &two_t1_sq, None),
            OddPoly::term(&[(1, 3)], int(4))
        );
    }

    #[test]
    fn calculus_examples() {
        let q3 = OddPoly::term(&[(3, 1)], int(2)) + OddPoly::term(&[(1, 3)], rat(4, 3));
        assert_eq!(q3.partial(3), c(2, 1));
        assert!(t(5).partial(3).is_zero());
        assert_eq!(OddPoly::one().mul_by_t(7), t(7));
    }

    #[test]
    fn exp_examples() {
        assert_eq!(OddPoly::zero().exp_truncated(5).unwrap(), OddPoly::one());
        let e = t(1).scale(&int(2)).exp_truncated(2).unwrap();
        let want = OddPoly::one() + t(1).scale(&int(2)) + OddPoly::term(&[(1, 2)], int(2));
        assert_eq!(e, want);
        let e = t(3).scale(&int(2)).exp_truncated(6).unwrap();
        let want = OddPoly::one() + t(3).scale(&int(2)) + OddPoly::term(&[(3, 2)], int(2));
        assert_eq!(e, want);
        assert_eq!(
            OddPoly::one().exp_truncated(3),
            Err(Error::NonzeroConstantTerm)
        );
    }

    #[test]
    fn evaluation_examples() {
        let at = |pairs: &[(u32, Rational)]| pairs.iter().cloned().collect::<BTreeMap<_, _>>();
        assert_eq!(t(1).scale(&int(2)).evaluate(&at(&[(1, int(1))])), int(2));
        let q3 = OddPoly::term(&[(3, 1)], int(2)) + OddPoly::term(&[(1, 3)], rat(4, 3));
        assert_eq!(q3.evaluate(&at(&[(3, rat(1, 3))])), rat(2, 3));
        assert_eq!(t(5).evaluate(&at(&[(1, int(1))])), int(0));
    }

    #[test]
    fn shift_examples() {
        let mut s = HbarSeries::new(10);
        s.add_to_slice(0, &c(3, 1));
        assert_eq!(s.map_shift(0, |p| p.clone()), s);
        let shifted = s.map_shift(-1, |p| p.scale(&int(2)));
        assert_eq!(shifted.orders(), vec![-1]);
        assert_eq!(shifted.slice(-1), Some(&c(6, 1)));
        let d = HbarSeries::one(10).map_shift(-1, |p| p.partial(1));
        assert!(d.is_zero());
    }

    #[test]
    fn self_pairing_values() {
        assert_eq!(Monomial::var(1).self_pairing(), rat(1, 2));
        let m = Monomial::from_pairs(&[(1, 2), (3, 1)]).unwrap();
        assert_eq!(m.self_pairing(), rat(2, 4) * rat(1, 6));
    }

    #[test]
    fn rational_strings() {
        assert_eq!(format_rational(&int(3)), "3");
        assert_eq!(format_rational(&rat(-5, 2)), "-5/2");
        assert_eq!(parse_rational("-10/4").unwrap(), rat(-5, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn polynomial_json() {
        let p = OddPoly::term(&[(1, 3)], rat(4, 3)) + OddPoly::term(&[(3, 1)], int(-4));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(
            s,
            r#"[{"monomial":[[1,3]],"coeff":"4/3"},{"monomial":[[3,1]],"coeff":"-4"}]"#
        );
        let back: OddPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn log_inverts_exp() {
        // log(exp(hbar * x)) for x = t1^3/6 + t3/8.
        let x = OddPoly::term(&[(1, 3)], rat(1, 6)) + OddPoly::term(&[(3, 1)], rat(1, 8));
        let mut hx = HbarSeries::new(9);
        hx.add_to_slice(1, &x);
        let mut e = HbarSeries::one(9);
        let mut power = HbarSeries::one(9);
        for n in 1..=3 {
            power = power.mul(&hx).scale(&rat(1, n));
            e = e.add(&power);
        }
        assert_eq!(e.log().unwrap(), hx);
    }
}
