//! Residual evaluators for the A-value identities.
//!
//! Every evaluator builds its residual from raw values of [`a_const`] so the
//! checks stay independent of each other. Indices follow the standard form
//! `(3k_1..3k_p, 3m_1+1..3m_q+1, 3n_1+2..3n_r+2)`: the `i`-th `k`-part sits at
//! position `i`, the `i`-th `m`-part at `p+i`, the `i`-th `n`-part at `p+q+i`.
//! Inputs outside an identity's hypotheses are rejected with
//! [`Error::HypothesisViolated`] rather than evaluated.

use crate::error::{Error, Result};
use crate::partition::StandardForm;
use crate::poly::{int, rat, rational_string, Rational};
use crate::special::{a_const, double_factorial, double_falling};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// One identity evaluated at one input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub input: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pivot: Option<usize>,
    #[serde(with = "rational_string")]
    pub residual: Rational,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl IdentityReport {
    pub fn new(
        identity: Identity,
        input: Vec<i64>,
        pivot: Option<usize>,
        residual: Rational,
    ) -> Self {
        let pass = residual.is_zero();
        IdentityReport {
            identity: identity.name().to_string(),
            input,
            pivot,
            residual,
            pass,
            error: None,
        }
    }

    /// A report for an input that could not be evaluated; never a pass.
    pub fn failed(
        identity: Identity,
        input: Vec<i64>,
        pivot: Option<usize>,
        error: &Error,
    ) -> Self {
        IdentityReport {
            identity: identity.name().to_string(),
            input,
            pivot,
            residual: Rational::zero(),
            pass: false,
            error: Some(error.to_string()),
        }
    }
}

/// The identity families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Identity {
    RecWeight,
    RecPfaffian,
    Even1,
    Ni1,
    Qi1,
    MultT1,
    MultT3,
    Phi1,
    Phi2,
    Phi3,
    Phi2Prime,
    Psi1,
    Psi2,
    M1,
    M2,
    M3,
    M4,
    M5,
    M6,
    M7,
    TripleSum,
    TripleSumWeighted,
    Phi,
    Psi,
    PhiRecombination,
    PsiRecombination,
}

impl Identity {
    pub const ALL: [Identity; 26] = [
        Identity::RecWeight,
        Identity::RecPfaffian,
        Identity::Even1,
        Identity::Ni1,
        Identity::Qi1,
        Identity::MultT1,
        Identity::MultT3,
        Identity::Phi1,
        Identity::Phi2,
        Identity::Phi3,
        Identity::Phi2Prime,
        Identity::Psi1,
        Identity::Psi2,
        Identity::M1,
        Identity::M2,
        Identity::M3,
        Identity::M4,
        Identity::M5,
        Identity::M6,
        Identity::M7,
        Identity::TripleSum,
        Identity::TripleSumWeighted,
        Identity::Phi,
        Identity::Psi,
        Identity::PhiRecombination,
        Identity::PsiRecombination,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::RecWeight => "rec-weight",
            Identity::RecPfaffian => "rec-pfaffian",
            Identity::Even1 => "even1",
            Identity::Ni1 => "ni1",
            Identity::Qi1 => "qi1",
            Identity::MultT1 => "mult-t1",
            Identity::MultT3 => "mult-t3",
            Identity::Phi1 => "phi1",
            Identity::Phi2 => "phi2",
            Identity::Phi3 => "phi3",
            Identity::Phi2Prime => "phi2-prime",
            Identity::Psi1 => "psi1",
            Identity::Psi2 => "psi2",
            Identity::M1 => "m1",
            Identity::M2 => "m2",
            Identity::M3 => "m3",
            Identity::M4 => "m4",
            Identity::M5 => "m5",
            Identity::M6 => "m6",
            Identity::M7 => "m7",
            Identity::TripleSum => "triple-sum",
            Identity::TripleSumWeighted => "triple-sum-weighted",
            Identity::Phi => "phi",
            Identity::Psi => "psi",
            Identity::PhiRecombination => "phi-recombination",
            Identity::PsiRecombination => "psi-recombination",
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Identity::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown identity `{s}`")))
    }
}

fn a(v: &[i64]) -> Result<Rational> {
    a_const(v)
}

fn sign(e: i64) -> Rational {
    if e.rem_euclid(2) == 0 {
        int(1)
    } else {
        int(-1)
    }
}

fn bump(v: &[i64], changes: &[(usize, i64)]) -> Vec<i64> {
    let mut w = v.to_vec();
    for &(i, d) in changes {
        w[i] += d;
    }
    w
}

fn without(v: &[i64], drop: &[usize]) -> Vec<i64> {
    v.iter()
        .enumerate()
        .filter(|(i, _)| !drop.contains(i))
        .map(|(_, &x)| x)
        .collect()
}

fn with(v: &[i64], extra: &[i64]) -> Vec<i64> {
    let mut w = v.to_vec();
    w.extend_from_slice(extra);
    w
}

fn big(x: num_bigint::BigInt) -> Rational {
    Rational::from_integer(x)
}

fn falling(x: i64, k: u32) -> Rational {
    big(double_falling(x, k))
}

/// `(2/3)^k / k!`.
fn two_thirds(k: i64) -> Rational {
    let mut acc = Rational::one();
    for j in 1..=k {
        acc *= rat(2, 3 * j);
    }
    acc
}

fn violated(msg: impl Into<String>) -> Error {
    Error::HypothesisViolated(msg.into())
}

fn non_negative(v: &[i64]) -> Result<()> {
    if v.iter().any(|&x| x < 0) {
        return Err(violated(format!("{v:?} has a negative part")));
    }
    Ok(())
}

fn positive(v: &[i64]) -> Result<()> {
    if v.iter().any(|&x| x <= 0) {
        return Err(violated(format!("{v:?} is not positive")));
    }
    Ok(())
}

fn distinct(v: &[i64]) -> Result<()> {
    let mut w = v.to_vec();
    w.sort_unstable();
    if w.windows(2).any(|p| p[0] == p[1]) {
        return Err(violated(format!("{v:?} has repeated parts")));
    }
    Ok(())
}

/// A sequence laid out in standard form, with 0-based positions for each class.
struct Layout {
    v: Vec<i64>,
    sf: StandardForm,
}

impl Layout {
    fn new(v: &[i64]) -> Result<Layout> {
        Ok(Layout {
            v: v.to_vec(),
            sf: StandardForm::from_arranged(v)?,
        })
    }

    fn strict(v: &[i64]) -> Result<Layout> {
        positive(v)?;
        distinct(v)?;
        Layout::new(v)
    }

    fn p(&self) -> usize {
        self.sf.p()
    }
    fn q(&self) -> usize {
        self.sf.q()
    }
    fn r(&self) -> usize {
        self.sf.r()
    }
    fn l(&self) -> usize {
        self.v.len()
    }
    fn k(&self, i: usize) -> i64 {
        self.sf.ks[i]
    }
    fn m(&self, i: usize) -> i64 {
        self.sf.ms[i]
    }
    fn n(&self, i: usize) -> i64 {
        self.sf.ns[i]
    }
    fn kpos(&self, i: usize) -> usize {
        i
    }
    fn mpos(&self, i: usize) -> usize {
        self.p() + i
    }
    fn npos(&self, i: usize) -> usize {
        self.p() + self.q() + i
    }
}

/// `(|l|/2) A_l - sum_i A_{l - 3e_i}`.
pub fn rec_weight(v: &[i64]) -> Result<Rational> {
    non_negative(v)?;
    let weight: i64 = v.iter().sum();
    let mut res = rat(weight, 2) * a(v)?;
    for i in 0..v.len() {
        res -= a(&bump(v, &[(i, -3)]))?;
    }
    Ok(res)
}

/// Pads odd-length input with a trailing zero.
pub fn zero_padded(v: &[i64]) -> Vec<i64> {
    if v.len() % 2 == 1 {
        with(v, &[0])
    } else {
        v.to_vec()
    }
}

/// `A_l - (-1)^{j-1} sum_{i != j} (-1)^{i~(j)} A_(l_j, l_i) A_{l without j, i}` for the
/// 1-based pivot `j` on an even-length weakly positive sequence.
pub fn rec_pfaffian_pivot(v: &[i64], j: usize) -> Result<Rational> {
    non_negative(v)?;
    if v.len() % 2 == 1 {
        return Err(Error::OddLengthWithoutZeroPad(v.to_vec()));
    }
    let l = v.len();
    if j == 0 || j > l {
        return Err(violated(format!("pivot {j} outside 1..={l}")));
    }
    let zeros: Vec<usize> = (0..l).filter(|&i| v[i] == 0).collect();
    if zeros.len() > 2 {
        return Err(violated(format!("{v:?} has more than two zero parts")));
    }
    if zeros.len() == 2 && j == l && v[l - 1] == 0 {
        return Err(violated(format!("pivot on the padding zero of {v:?}")));
    }
    let mut expansion = Rational::zero();
    for i in 1..=l {
        if i == j {
            continue;
        }
        let tilde = if i < j { i - 1 } else { i } as i64;
        let pair = a(&[v[j - 1], v[i - 1]])?;
        if pair.is_zero() {
            continue;
        }
        expansion += sign(tilde) * pair * a(&without(v, &[j - 1, i - 1]))?;
    }
    Ok(a(v)? - sign(j as i64 - 1) * expansion)
}

/// The pivot-1 recursion, padding odd-length input with a zero.
pub fn rec_pfaffian(v: &[i64]) -> Result<Rational> {
    rec_pfaffian_pivot(&zero_padded(v), 1)
}

/// `sum (-1)^{i+1} A_(l_i) A_{l without i}` on positive even-length input.
pub fn even1(v: &[i64]) -> Result<Rational> {
    positive(v)?;
    if v.len() % 2 == 1 {
        return Err(violated(format!("{v:?} has odd length")));
    }
    let mut res = Rational::zero();
    for i in 0..v.len() {
        res += sign(i as i64) * a(&[v[i]])? * a(&without(v, &[i]))?;
    }
    Ok(res)
}

/// `sum_{i<=r} A_{l - e_{i+p+q}}`.
pub fn ni1(v: &[i64]) -> Result<Rational> {
    let s = Layout::new(v)?;
    let mut res = Rational::zero();
    for i in 0..s.r() {
        res += a(&bump(v, &[(s.npos(i), -1)]))?;
    }
    Ok(res)
}

/// `sum_{i<=q} A_{l + e_{i+p}}`.
pub fn qi1(v: &[i64]) -> Result<Rational> {
    let s = Layout::new(v)?;
    let mut res = Rational::zero();
    for i in 0..s.q() {
        res += a(&bump(v, &[(s.mpos(i), 1)]))?;
    }
    Ok(res)
}

/// `A_(l,1) + 2 sum A_{l + e_i}`.
pub fn mult_t1(v: &[i64]) -> Result<Rational> {
    non_negative(v)?;
    let mut res = a(&with(v, &[1]))?;
    for i in 0..v.len() {
        res += int(2) * a(&bump(v, &[(i, 1)]))?;
    }
    Ok(res)
}

/// `A_(l,2,1) - 2 sum A_{l + 3e_i} - A_(l,3) + 2 A_l`.
pub fn mult_t3(v: &[i64]) -> Result<Rational> {
    non_negative(v)?;
    let mut res = a(&with(v, &[2, 1]))? - a(&with(v, &[3]))? + int(2) * a(v)?;
    for i in 0..v.len() {
        res -= int(2) * a(&bump(v, &[(i, 3)]))?;
    }
    Ok(res)
}

pub fn phi1(v: &[i64]) -> Result<Rational> {
    let s = Layout::strict(v)?;
    let mut res = Rational::zero();
    for i in 0..s.r() {
        for j in 0..s.r() {
            if i != j {
                res += a(&bump(v, &[(s.npos(i), -1), (s.npos(j), -1)]))?;
            }
        }
    }
    Ok(res)
}

pub fn phi2(v: &[i64]) -> Result<Rational> {
    let s = Layout::strict(v)?;
    let (p, q) = (s.p(), s.q());
    let kd = |i: usize| int(6 * s.k(i) - 1);
    let md = |i: usize| int(6 * s.m(i) + 1);
    let mut res = Rational::zero();
    for i in 0..p {
        for j in 0..p {
            if i != j {
                res += a(&bump(v, &[(s.kpos(i), -1), (s.kpos(j), -1)]))? / (kd(i) * kd(j));
            }
        }
    }
    for i in 0..q {
        for j in 0..q {
            if i != j {
                res += a(&bump(v, &[(s.mpos(i), -1), (s.mpos(j), -1)]))? / (md(i) * md(j));
            }
        }
    }
    for i in 0..p {
        for j in 0..q {
            res -= int(2) * a(&bump(v, &[(s.kpos(i), -1), (s.mpos(j), -1)]))? / (kd(i) * md(j));
        }
    }
    for i in 0..q {
        res += a(&bump(v, &[(s.mpos(i), -2)]))? / md(i);
        res -= rat(1, 4) * a(&bump(v, &[(s.mpos(i), 1)]))?;
    }
    Ok(res)
}

pub fn phi3(v: &[i64]) -> Result<Rational> {
    let s = Layout::strict(v)?;
    let (p, q, r) = (s.p(), s.q(), s.r());
    let mut res = Rational::zero();
    for j in 0..r {
        for i in 0..p {
            res +=
                rat(2, 3) * a(&bump(v, &[(s.kpos(i), -1), (s.npos(j), -1)]))? / int(6 * s.k(i) - 1);
        }
        for i in 0..q {
            res -=
                rat(2, 3) * a(&bump(v, &[(s.mpos(i), -1), (s.npos(j), -1)]))? / int(6 * s.m(i) + 1);
        }
    }
    for i in 0..p {
        let k = s.k(i);
        res -= rat(2 * k - 1, 6 * k - 1) * a(&bump(v, &[(s.kpos(i), -2)]))?;
        res += rat(6 * k + 1, 12) * a(&bump(v, &[(s.kpos(i), 1)]))?;
    }
    for i in 0..r {
        res += rat(1, 3) * a(&bump(v, &[(s.npos(i), -2)]))?;
        res -= rat(6 * s.n(i) + 5, 12) * a(&bump(v, &[(s.npos(i), 1)]))?;
    }
    res += rat(1, 24) * a(&with(v, &[1]))?;
    Ok(res)
}

pub fn phi2_prime(v: &[i64]) -> Result<Rational> {
    let s = Layout::strict(v)?;
    let (p, q) = (s.p(), s.q());
    let mut res = Rational::zero();
    for i in 0..q {
        let mi = s.m(i);
        let outer = sign(i as i64 + 1) * two_thirds(mi) / int(6 * mi + 1);
        let mut inner = Rational::zero();
        for j in 0..q {
            if j != i {
                let w = without(&bump(v, &[(s.mpos(j), -1)]), &[s.mpos(i)]);
                inner += a(&w)? / int(6 * s.m(j) + 1);
            }
        }
        for j in 0..p {
            let w = without(&bump(v, &[(s.kpos(j), -1)]), &[s.mpos(i)]);
            inner -= a(&w)? / int(6 * s.k(j) - 1);
        }
        res += outer * inner;
    }
    Ok(res)
}

pub fn psi1(v: &[i64]) -> Result<Rational> {
    let s = Layout::strict(v)?;
    let mut res = rat(105, 32) * a(&with(v, &[5, 2]))?;
    for i in 0..s.q() {
        let m = s.m(i);
        res += rat(9, 2) * int(m + 1) * falling(6 * m + 7, 2) * a(&bump(v, &[(s.mpos(i), 4)]))?;
        res -=
            rat(1, 16) * falling(6 * m + 13, 5) / int(2 * m + 3) * a(&bump(v, &[(s.mpos(i), 7)]))?;
    }
    Ok(res)
}

pub fn psi2(v: &[i64]) -> Result<Rational> {
    let s = Layout::strict(v)?;
    let (p, q, r, l) = (s.p(), s.q(), s.r(), s.l());
    let mut res = Rational::zero();
    for i in 0..p {
        let ki = s.k(i);
        let mut inner = Rational::zero();
        for j in 0..p {
            if j != i {
                inner += int(s.k(j)) * a(&bump(v, &[(s.kpos(i), 3), (s.kpos(j), 1)]))?;
            }
        }
        for j in 0..r {
            inner -= int(s.n(j) + 1) * a(&bump(v, &[(s.kpos(i), 3), (s.npos(j), 1)]))?;
        }
        res += int(6) * falling(6 * ki + 5, 3) / int(2 * ki + 1) * inner;
    }
    for j in 0..r {
        let mut inner = Rational::zero();
        for i in 0..q {
            inner += falling(6 * s.m(i) + 7, 2) * a(&bump(v, &[(s.mpos(i), 3), (s.npos(j), 1)]))?;
        }
        for i in 0..r {
            if i != j {
                inner +=
                    falling(6 * s.n(i) + 7, 2) * a(&bump(v, &[(s.npos(i), 3), (s.npos(j), 1)]))?;
            }
        }
        res -= int(18) * int(s.n(j) + 1) * inner;
    }
    for j in 0..p {
        let mut inner = Rational::zero();
        for i in 0..q {
            inner += falling(6 * s.m(i) + 7, 2) * a(&bump(v, &[(s.mpos(i), 3), (s.kpos(j), 1)]))?;
        }
        for i in 0..r {
            inner += falling(6 * s.n(i) + 7, 2) * a(&bump(v, &[(s.npos(i), 3), (s.kpos(j), 1)]))?;
        }
        res += int(18) * int(s.k(j)) * inner;
    }
    for i in 0..p {
        let k = s.k(i);
        let pos = s.kpos(i);
        res += rat(1, 2) * int(18 * k * k + 45 * k + 26) * falling(6 * k + 5, 3) / int(2 * k + 1)
            * a(&bump(v, &[(pos, 4)]))?;
        res += int(6) * int(9 * k + 4) * a(&with(&bump(v, &[(pos, 1)]), &[3]))?;
        for j in 0..l {
            res += int(3) * int(6 * k + 1) * a(&bump(v, &[(pos, 1), (j, 3)]))?;
        }
        res -= int(3) * int(6 * k + 1) * a(&bump(v, &[(pos, 1)]))?;
        res -= rat(1, 48) * falling(6 * k + 13, 7) / int((2 * k + 3) * (2 * k + 1))
            * a(&bump(v, &[(pos, 7)]))?;
    }
    for i in 0..r {
        let n = s.n(i);
        let pos = s.npos(i);
        res -= rat(3, 2)
            * int(18 * n * n + 69 * n + 68)
            * falling(6 * n + 7, 2)
            * a(&bump(v, &[(pos, 4)]))?;
        res -= int(6) * int(9 * n + 5) * a(&with(&bump(v, &[(pos, 1)]), &[3]))?;
        for j in 0..l {
            res -= int(3) * int(6 * n + 5) * a(&bump(v, &[(pos, 1), (j, 3)]))?;
        }
        res += int(3) * int(6 * n + 5) * a(&bump(v, &[(pos, 1)]))?;
        res += rat(1, 48) * falling(6 * n + 17, 7) / int((2 * n + 5) * (2 * n + 3))
            * a(&bump(v, &[(pos, 7)]))?;
    }
    res += int(120) * a(&with(v, &[4]))?;
    res -= rat(15015, 32) * a(&with(v, &[7]))?;
    res += rat(1155, 32) * a(&with(v, &[6, 1]))?;
    res += rat(525, 32) * a(&with(v, &[4, 3]))?;
    Ok(res)
}

fn positive_layout(v: &[i64]) -> Result<Layout> {
    positive(v)?;
    Layout::new(v)
}

pub fn m1(v: &[i64]) -> Result<Rational> {
    let s = positive_layout(v)?;
    let mut res = Rational::zero();
    for i in 0..s.r() {
        let ni = s.n(i);
        let drop = s.npos(i);
        let mut inner = Rational::zero();
        for j in 0..s.p() {
            inner += int(s.k(j)) * a(&without(&bump(v, &[(s.kpos(j), 1)]), &[drop]))?;
        }
        for j in 0..s.r() {
            if j != i {
                inner -= int(s.n(j) + 1) * a(&without(&bump(v, &[(s.npos(j), 1)]), &[drop]))?;
            }
        }
        res += sign(i as i64 + 1) * two_thirds(ni) * inner;
    }
    Ok(res)
}

pub fn m2(v: &[i64]) -> Result<Rational> {
    let s = positive_layout(v)?;
    let mut res = Rational::zero();
    for i in 0..s.r() {
        let ni = s.n(i);
        let drop = s.npos(i);
        let mut inner = Rational::zero();
        for j in 0..s.p() {
            inner += a(&without(&bump(v, &[(s.kpos(j), 1)]), &[drop]))?;
        }
        for j in 0..s.r() {
            if j != i {
                inner += a(&without(&bump(v, &[(s.npos(j), 1)]), &[drop]))?;
            }
        }
        res += sign(i as i64 + 1) * two_thirds(ni) / int(ni + 1) * inner;
    }
    Ok(res)
}

fn m34(v: &[i64], weighted: bool) -> Result<Rational> {
    let s = positive_layout(v)?;
    let p = s.p();
    if p <= 1 || p % 2 == 0 {
        return Err(violated(format!("{v:?} needs p > 1 odd, has p = {p}")));
    }
    let mut res = Rational::zero();
    for i in 0..p {
        let ki = s.k(i);
        let weight = if weighted {
            int((6 * ki + 5) * (6 * ki + 1))
        } else {
            int(1)
        };
        for j in 0..p {
            if i != j {
                let w = without(&bump(v, &[(s.kpos(i), 3)]), &[s.kpos(j)]);
                res += sign(j as i64 + 1) * weight.clone() * two_thirds(s.k(j)) * a(&w)?;
            }
        }
    }
    Ok(res)
}

pub fn m3(v: &[i64]) -> Result<Rational> {
    m34(v, true)
}

pub fn m4(v: &[i64]) -> Result<Rational> {
    m34(v, false)
}

pub fn m5(v: &[i64]) -> Result<Rational> {
    let s = positive_layout(v)?;
    let p = s.p();
    if p % 2 == 0 {
        return Err(violated(format!("{v:?} needs p odd, has p = {p}")));
    }
    let mut res = Rational::zero();
    for i in 0..p {
        let pos = s.kpos(i);
        let inner = a(&without(&with(v, &[3]), &[pos]))? - rat(2, 3) * a(&without(v, &[pos]))?;
        res += sign(i as i64 + 1) * two_thirds(s.k(i)) * inner;
    }
    Ok(res)
}

pub fn m6(v: &[i64]) -> Result<Rational> {
    let s = positive_layout(v)?;
    let p = s.p();
    if p % 2 == 1 {
        return Err(violated(format!("{v:?} needs p even, has p = {p}")));
    }
    let mut res = Rational::zero();
    for i in 0..p {
        let pos = s.kpos(i);
        res += sign(i as i64) * a(&without(v, &[pos]))? * a(&[3 * s.k(i) + 3])?;
        res += a(&bump(v, &[(pos, 3)]))?;
    }
    Ok(res)
}

pub fn m7(v: &[i64]) -> Result<Rational> {
    let s = positive_layout(v)?;
    let p = s.p();
    if p % 2 == 1 {
        return Err(violated(format!("{v:?} needs p even, has p = {p}")));
    }
    let mut res = Rational::zero();
    for i in 0..p {
        let k = s.k(i);
        let pos = s.kpos(i);
        let rest = a(&without(v, &[pos]))?;
        let bracket = sign(i as i64) * rest.clone() * a(&[3 * k + 3])? - a(&bump(v, &[(pos, 3)]))?;
        res += int(6 * k * k + 6 * k + 1) * bracket;
        res += sign(i as i64) * a(&[3 * k, 3])? * rest;
    }
    Ok(res)
}

/// Sum identities over the orderings of positions `a < b < c` with values `k_a, k_b, k_c`;
/// returns the residuals of the plain and the `(6k+5)(6k+1)`-weighted sums.
pub fn triple_sum_identities(positions: [i64; 3], ks: [i64; 3]) -> Result<(Rational, Rational)> {
    let [a0, b0, c0] = positions;
    if !(0 < a0 && a0 < b0 && b0 < c0) {
        return Err(violated(format!(
            "positions {positions:?} must satisfy 0 < a < b < c"
        )));
    }
    if ks.iter().any(|&k| k < 0) {
        return Err(violated(format!("values {ks:?} must be non-negative")));
    }
    let k_of = |x: i64| ks[positions.iter().position(|&y| y == x).unwrap()];
    let perms = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut plain = Rational::zero();
    let mut weighted = Rational::zero();
    for perm in perms {
        let (i, j, m) = (positions[perm[0]], positions[perm[1]], positions[perm[2]]);
        let i_tilde = if i < j { i - 1 } else { i };
        let m_tilde = m - (i > m) as i64 - (j < m) as i64;
        let s = sign(j + i_tilde + m_tilde);
        let (ki, km) = (k_of(i), k_of(m));
        let base = rat(ki + 1 - km, (ki + 1) * (ki + 1 + km));
        weighted += s.clone() * int((6 * ki + 5) * (6 * ki + 1)) * base.clone();
        plain += s * base;
    }
    Ok((plain, weighted))
}

/// `Phi(mu)` on a permutation of a strict partition.
pub fn phi(v: &[i64]) -> Result<Rational> {
    positive(v)?;
    distinct(v)?;
    let two: Vec<i64> = v.iter().map(|x| 2 * x).collect();
    let l = v.len();
    let mut res = rat(1, 8) * a(&with(&two, &[2]))?;
    for i in 0..l {
        let di = int(2 * v[i] - 1);
        for j in 0..l {
            if i != j {
                res += a(&bump(&two, &[(i, -2), (j, -2)]))? / (di.clone() * int(2 * v[j] - 1));
            }
        }
        res -= a(&bump(&two, &[(i, -4)]))? / di;
        res += rat(2 * v[i] + 1, 4) * a(&bump(&two, &[(i, 2)]))?;
    }
    Ok(res)
}

/// `Psi(mu)` on a permutation of a strict partition.
pub fn psi(v: &[i64]) -> Result<Rational> {
    positive(v)?;
    distinct(v)?;
    let two: Vec<i64> = v.iter().map(|x| 2 * x).collect();
    let l = v.len();
    let mut res = int(105) * a(&with(&two, &[8]))? - rat(15, 2) * a(&with(&two, &[6, 2]))?;
    let mut tail = Rational::zero();
    for i in 0..l {
        let mi = v[i];
        for j in 0..l {
            if i != j {
                res +=
                    int(2 * v[j] + 1) * falling(2 * mi + 5, 3) * a(&bump(&two, &[(i, 6), (j, 2)]))?;
            }
        }
        res += rat(1, 2) * int(mi + 4) * falling(2 * mi + 7, 4) * a(&bump(&two, &[(i, 8)]))?;
        res += rat(1, 2) * falling(2 * mi + 5, 3) * a(&with(&bump(&two, &[(i, 6)]), &[2]))?;
        res += rat(15, 2) * int(2 * mi + 1) * a(&with(&bump(&two, &[(i, 2)]), &[6]))?;
        res -= rat(3, 2) * int(2 * mi + 1) * a(&with(&bump(&two, &[(i, 2)]), &[4, 2]))?;
        tail += falling(2 * mi + 13, 7) * a(&bump(&two, &[(i, 14)]))?;
    }
    for r in 0..4i64 {
        let c = sign(r) * big(double_factorial(2 * r - 1) * double_factorial(13 - 2 * r)) / int(2);
        tail += c * a(&with(&two, &[14 - 2 * r, 2 * r]))?;
    }
    Ok(res - rat(1, 16) * tail)
}

/// `(-1)^r / (prod (2k-1)!! prod (2m-1)!! prod (2n+1)!!)`, the part of the
/// doubling factor shared by the `Phi` and `Psi` reductions.
fn doubling_prefactor(s: &Layout) -> Rational {
    let denom =
        s.sf.ks
            .iter()
            .map(|&k| double_factorial(2 * k - 1))
            .product::<num_bigint::BigInt>()
            * s.sf
                .ms
                .iter()
                .map(|&m| double_factorial(2 * m - 1))
                .product::<num_bigint::BigInt>()
            * s.sf
                .ns
                .iter()
                .map(|&n| double_factorial(2 * n + 1))
                .product::<num_bigint::BigInt>();
    sign(s.r() as i64) / big(denom)
}

fn third_power(e: i64) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= rat(1, 3);
    }
    acc
}

/// `Phi(mu) - c (delta_{r,q+4} Phi_1/9 + delta_{r,q-2} Phi_2 + delta_{r,q+1} Phi_3)`.
pub fn phi_recombination(v: &[i64]) -> Result<Rational> {
    let s = Layout::strict(v)?;
    let total = phi(v)?;
    let weight: i64 = v.iter().sum();
    if weight % 3 != 2 {
        return Ok(total);
    }
    let (q, r) = (s.q() as i64, s.r() as i64);
    let mut parts = Rational::zero();
    if r == q + 4 {
        parts += phi1(v)? / int(9);
    }
    if r == q - 2 {
        parts += phi2(v)?;
    }
    if r == q + 1 {
        parts += phi3(v)?;
    }
    Ok(total - doubling_prefactor(&s) * third_power((weight - 2) / 3) * parts)
}

/// `Psi(mu) - c (-3 delta_{r+2,q} Psi_1 + delta_{r,q+1} Psi_2)`.
pub fn psi_recombination(v: &[i64]) -> Result<Rational> {
    let s = Layout::strict(v)?;
    let total = psi(v)?;
    let weight: i64 = v.iter().sum();
    if weight % 3 != 2 {
        return Ok(total);
    }
    let (q, r) = (s.q() as i64, s.r() as i64);
    let mut parts = Rational::zero();
    if r + 2 == q {
        parts -= int(3) * psi1(v)?;
    }
    if r == q + 1 {
        parts += psi2(v)?;
    }
    Ok(total - doubling_prefactor(&s) * third_power((weight + 4) / 3) * parts)
}

/// Evaluates one identity on one input. `rec-pfaffian` uses the pivot-1 form;
/// the triple-sum identities read `input` as `[a, b, c, k_a, k_b, k_c]`.
pub fn residual(identity: Identity, input: &[i64]) -> Result<Rational> {
    match identity {
        Identity::RecWeight => rec_weight(input),
        Identity::RecPfaffian => rec_pfaffian(input),
        Identity::Even1 => even1(input),
        Identity::Ni1 => ni1(input),
        Identity::Qi1 => qi1(input),
        Identity::MultT1 => mult_t1(input),
        Identity::MultT3 => mult_t3(input),
        Identity::Phi1 => phi1(input),
        Identity::Phi2 => phi2(input),
        Identity::Phi3 => phi3(input),
        Identity::Phi2Prime => phi2_prime(input),
        Identity::Psi1 => psi1(input),
        Identity::Psi2 => psi2(input),
        Identity::M1 => m1(input),
        Identity::M2 => m2(input),
        Identity::M3 => m3(input),
        Identity::M4 => m4(input),
        Identity::M5 => m5(input),
        Identity::M6 => m6(input),
        Identity::M7 => m7(input),
        Identity::TripleSum | Identity::TripleSumWeighted => {
            let [a0, b0, c0, ka, kb, kc]: [i64; 6] = input
                .try_into()
                .map_err(|_| violated(format!("triple-sum input {input:?} needs six entries")))?;
            let (plain, weighted) = triple_sum_identities([a0, b0, c0], [ka, kb, kc])?;
            Ok(if identity == Identity::TripleSum {
                plain
            } else {
                weighted
            })
        }
        Identity::Phi => phi(input),
        Identity::Psi => psi(input),
        Identity::PhiRecombination => phi_recombination(input),
        Identity::PsiRecombination => psi_recombination(input),
    }
}

/// Non-increasing sequences with parts in `min_part..=max_part` and length at most `max_len`.
pub fn multisets(min_part: i64, max_part: i64, max_len: usize) -> Vec<Vec<i64>> {
    fn go(top: i64, min_part: i64, left: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        out.push(cur.clone());
        if left == 0 {
            return;
        }
        for x in (min_part..=top).rev() {
            cur.push(x);
            go(x, min_part, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(max_part, min_part, max_len, &mut Vec::new(), &mut out);
    out
}

/// Strictly decreasing sequences with parts in `1..=max_part` and length at most `max_len`.
pub fn strict_sets(max_part: i64, max_len: usize) -> Vec<Vec<i64>> {
    multisets(1, max_part, max_len)
        .into_iter()
        .filter(|v| v.windows(2).all(|w| w[0] > w[1]))
        .collect()
}

fn arranged(v: &[i64]) -> Vec<i64> {
    StandardForm::arrange(v).0.parts()
}

fn p_of(v: &[i64]) -> usize {
    v.iter().filter(|&&x| x % 3 == 0).count()
}

/// The enumerated inputs on which `identity` is asserted, for parts up to
/// `max_part` and length up to `max_len`.
pub fn enumerate_inputs(identity: Identity, max_part: i64, max_len: usize) -> Vec<Vec<i64>> {
    use Identity::*;
    match identity {
        RecWeight | MultT1 | MultT3 => multisets(0, max_part, max_len),
        RecPfaffian => multisets(0, max_part, max_len)
            .into_iter()
            .filter(|v| v.iter().filter(|&&x| x == 0).count() <= 1)
            .collect(),
        Even1 => multisets(1, max_part, max_len)
            .into_iter()
            .filter(|v| v.len() % 2 == 0)
            .collect(),
        Ni1 | Qi1 => multisets(0, max_part, max_len)
            .iter()
            .map(|v| arranged(v))
            .collect(),
        Phi1 | Phi2 | Phi3 | Phi2Prime | Psi1 | Psi2 | Phi | Psi | PhiRecombination
        | PsiRecombination => strict_sets(max_part, max_len)
            .iter()
            .map(|v| arranged(v))
            .collect(),
        M1 | M2 => multisets(1, max_part, max_len)
            .iter()
            .map(|v| arranged(v))
            .collect(),
        M3 | M4 => positive_arranged_with(max_part, max_len, |p| p > 1 && p % 2 == 1),
        M5 => positive_arranged_with(max_part, max_len, |p| p % 2 == 1),
        M6 | M7 => positive_arranged_with(max_part, max_len, |p| p % 2 == 0),
        TripleSum | TripleSumWeighted => {
            let mut out = Vec::new();
            for c in 3..=max_len.max(3) as i64 + 1 {
                for b in 2..c {
                    for a0 in 1..b {
                        for ka in 0..=max_part.min(6) {
                            for kb in 0..=max_part.min(6) {
                                for kc in 0..=max_part.min(6) {
                                    out.push(vec![a0, b, c, ka, kb, kc]);
                                }
                            }
                        }
                    }
                }
            }
            out
        }
    }
}

fn positive_arranged_with(
    max_part: i64,
    max_len: usize,
    keep: impl Fn(usize) -> bool,
) -> Vec<Vec<i64>> {
    multisets(1, max_part, max_len)
        .iter()
        .filter(|v| keep(p_of(v)))
        .map(|v| arranged(v))
        .collect()
}

/// `count` seeded random inputs with parts up to 30 and length up to 6,
/// shuffled within whatever ordering freedom the identity allows.
pub fn random_inputs(identity: Identity, count: usize, seed: u64) -> Vec<Vec<i64>> {
    use Identity::*;
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed ^ (identity as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let len = rng.gen_range(0..=6usize);
        let candidate: Option<Vec<i64>> = match identity {
            RecWeight | MultT1 | MultT3 => Some((0..len).map(|_| rng.gen_range(0..=30)).collect()),
            RecPfaffian => {
                let mut v: Vec<i64> = (0..len).map(|_| rng.gen_range(1..=30)).collect();
                if !v.is_empty() && rng.gen_bool(0.3) {
                    v[0] = 0;
                }
                v.shuffle(&mut rng);
                Some(v)
            }
            Even1 => {
                let len = len - len % 2;
                Some((0..len).map(|_| rng.gen_range(1..=30)).collect())
            }
            Ni1 | Qi1 => Some(shuffled_within_classes(
                (0..len).map(|_| rng.gen_range(0..=30)).collect(),
                &mut rng,
            )),
            Phi1 | Phi2 | Phi3 | Phi2Prime | Psi1 | Psi2 | Phi | Psi | PhiRecombination
            | PsiRecombination => {
                let mut pool: Vec<i64> = (1..=30).collect();
                pool.shuffle(&mut rng);
                Some(shuffled_within_classes(pool[..len].to_vec(), &mut rng))
            }
            M1 | M2 | M3 | M4 | M5 | M6 | M7 => {
                let v = shuffled_within_classes(
                    (0..len).map(|_| rng.gen_range(1..=30)).collect(),
                    &mut rng,
                );
                let p = p_of(&v);
                let ok = match identity {
                    M3 | M4 => p > 1 && p % 2 == 1,
                    M5 => p % 2 == 1,
                    M6 | M7 => p.is_multiple_of(2),
                    _ => true,
                };
                ok.then_some(v)
            }
            TripleSum | TripleSumWeighted => {
                let mut pos: Vec<i64> = (1..=40).collect();
                pos.shuffle(&mut rng);
                let mut abc = pos[..3].to_vec();
                abc.sort_unstable();
                let ks: Vec<i64> = (0..3).map(|_| rng.gen_range(0..=30)).collect();
                Some([abc, ks].concat())
            }
        };
        if let Some(v) = candidate {
            out.push(v);
        }
    }
    out
}

/// Standard form arrangement with each residue class in random order.
fn shuffled_within_classes(v: Vec<i64>, rng: &mut impl Rng) -> Vec<i64> {
    let mut classes: [Vec<i64>; 3] = Default::default();
    for x in v {
        classes[x.rem_euclid(3) as usize].push(x);
    }
    for c in classes.iter_mut() {
        c.shuffle(rng);
    }
    classes.concat()
}

/// Reports for `identity` on each input, in input order. `rec-pfaffian` is
/// expanded over every admissible pivot.
pub fn check_inputs(identity: Identity, inputs: &[Vec<i64>]) -> Vec<IdentityReport> {
    inputs
        .par_iter()
        .flat_map_iter(|v| reports_for(identity, v))
        .collect()
}

fn reports_for(identity: Identity, v: &[i64]) -> Vec<IdentityReport> {
    if identity != Identity::RecPfaffian {
        return vec![match residual(identity, v) {
            Ok(res) => IdentityReport::new(identity, v.to_vec(), None, res),
            Err(e) => IdentityReport::failed(identity, v.to_vec(), None, &e),
        }];
    }
    let padded = zero_padded(v);
    let excluded = padded.len() != v.len() && v.contains(&0);
    (1..=padded.len())
        .filter(|&j| !(excluded && j == padded.len()))
        .map(|j| match rec_pfaffian_pivot(&padded, j) {
            Ok(res) => IdentityReport::new(identity, v.to_vec(), Some(j), res),
            Err(e) => IdentityReport::failed(identity, v.to_vec(), Some(j), &e),
        })
        .collect()
}

/// Enumerated family plus `random` seeded instances.
pub fn check_family(
    identity: Identity,
    max_part: i64,
    max_len: usize,
    random: usize,
    seed: u64,
) -> Vec<IdentityReport> {
    let mut inputs = enumerate_inputs(identity, max_part, max_len);
    inputs.extend(random_inputs(identity, random, seed));
    check_inputs(identity, &inputs)
}
