//! The Kontsevich-Witten tau-function: the Q-expansion formula, an independent
//! solve of the Virasoro constraints, intersection numbers and the
//! hypergeometric structure of the expansion.

use crate::error::{Error, Result};
use crate::partition::{enumerate_strict, standard_form, StrictPartition};
use crate::poly::{int, rat, rational_string, HbarSeries, OddPoly, Rational, SliceJson};
use crate::schur_q::{expand_in_q_basis, q_strict};
use crate::special::{a_strict, double_factorial, ratio_dfact};
use crate::virasoro::{l_regular, VirasoroIndex};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "MM")]
    Mm,
    #[serde(rename = "KW-oracle")]
    KwOracle,
}

/// A KW-graded series with `hbar^0` slice `1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauSeries {
    pub series: HbarSeries,
    pub provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct TauJson {
    degree: u32,
    provenance: Provenance,
    series: Vec<SliceJson>,
}

impl Serialize for TauSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TauJson {
            degree: self.series.truncation(),
            provenance: self.provenance,
            series: self.series.to_json_slices(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TauSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = TauJson::deserialize(d)?;
        let mut series = HbarSeries::from_json_slices(j.degree, j.series);
        series.mark_kw_graded();
        Ok(TauSeries {
            series,
            provenance: j.provenance,
        })
    }
}

impl TauSeries {
    pub fn degree(&self) -> u32 {
        self.series.truncation()
    }

    /// `hbar^0` slice equal to 1 and the `hbar^a` slice homogeneous of degree `3a`.
    pub fn is_well_formed(&self) -> bool {
        self.series.kw_graded() && self.series.slice(0) == Some(&OddPoly::one())
    }

    pub fn log(&self) -> Result<HbarSeries> {
        self.series.log()
    }
}

/// The coefficient of `hbar^{|lambda|/3} Q_lambda` in the Q-expansion formula.
pub fn tau_mm_coefficient(lambda: &StrictPartition) -> Rational {
    let w = lambda.weight();
    if !w.is_multiple_of(3) {
        return Rational::zero();
    }
    let mut c = a_strict(&lambda.doubled()) * ratio_dfact(lambda);
    for _ in 0..w / 3 {
        c /= int(16);
    }
    for _ in 0..lambda.len() {
        c /= int(2);
    }
    c
}

/// `sum_lambda (hbar/16)^{|lambda|/3} 2^{-l} (Q_lambda(1)/Q_{2 lambda}(1)) A_{2 lambda} Q_lambda(t)`
/// over strict `|lambda| <= degree`.
pub fn build_tau_mm(degree: u32) -> TauSeries {
    let terms: Vec<(i64, OddPoly)> = enumerate_strict(degree)
        .into_par_iter()
        .filter_map(|lambda| {
            let c = tau_mm_coefficient(&lambda);
            (!c.is_zero()).then(|| ((lambda.weight() / 3) as i64, q_strict(&lambda).scale(&c)))
        })
        .collect();
    let mut series = HbarSeries::new(degree);
    for (a, p) in terms {
        series.add_to_slice(a, &p);
    }
    series.mark_kw_graded();
    TauSeries {
        series,
        provenance: Provenance::Mm,
    }
}

/// Solves `L_m tau = 0` order by order. At `hbar^{a-1}` the constraint reads
/// `d_{2m+3} tau_a = 2 L_m^{reg} tau_{a-1}`, which fixes every first derivative
/// of the degree-`3a` slice; the slice itself follows from the weighted Euler
/// identity `3a tau_a = sum k t_k d_k tau_a`.
pub fn build_tau_kw(degree: u32) -> Result<TauSeries> {
    let mut series = HbarSeries::one(degree);
    let mut prev = OddPoly::one();
    let mut a = 1i64;
    while 3 * a <= degree as i64 {
        let top = 3 * a;
        let grads: Vec<(u32, OddPoly)> = (-1..)
            .take_while(|m| 2 * m + 3 <= top)
            .collect::<Vec<i64>>()
            .into_par_iter()
            .map(|m| {
                let k = (2 * m + 3) as u32;
                let idx = VirasoroIndex::new(m).expect("m >= -1");
                (k, l_regular(idx, &prev).scale(&int(2)))
            })
            .collect();
        let mut slice = OddPoly::zero();
        for (k, g) in &grads {
            slice += &g.mul_by_t(*k).scale(&int(*k as i64));
        }
        slice = slice.scale(&rat(1, top));
        if grads.iter().any(|(k, g)| slice.partial(*k) != *g) {
            return Err(Error::InconsistentSystem { order: a });
        }
        series.add_to_slice(a, &slice);
        prev = slice;
        a += 1;
    }
    series.mark_kw_graded();
    Ok(TauSeries {
        series,
        provenance: Provenance::KwOracle,
    })
}

/// An intersection number `<tau_{k_1} ... tau_{k_n}>_g`; the genus is absent
/// when no genus satisfies the dimension constraint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correlator {
    pub ks: Vec<u32>,
    pub genus: Option<u32>,
    #[serde(with = "rational_string")]
    pub value: Rational,
}

/// Reads `<prod tau_k>_g` off `log tau` at `hbar^{2g-2+n}`.
pub fn extract_correlator(tau: &TauSeries, ks: &[u32]) -> Result<Correlator> {
    let mut sorted = ks.to_vec();
    sorted.sort_unstable_by(|x, y| y.cmp(x));
    let n = sorted.len() as i64;
    let total: i64 = sorted.iter().map(|&k| k as i64).sum();
    let zero = |genus| Correlator {
        ks: sorted.clone(),
        genus,
        value: Rational::zero(),
    };
    if (total - n + 3) % 3 != 0 || total - n + 3 < 0 {
        return Ok(zero(None));
    }
    let g = (total - n + 3) / 3;
    let order = 2 * g - 2 + n;
    if order <= 0 {
        return Ok(zero(Some(g as u32)));
    }
    if 3 * order > tau.degree() as i64 {
        return Err(Error::TruncationInsufficient {
            needed: 3 * order as u32,
            have: tau.degree(),
        });
    }
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for &k in &sorted {
        *counts.entry(k).or_insert(0) += 1;
    }
    let pairs: Vec<(u32, u32)> = counts.iter().map(|(&k, &e)| (2 * k + 1, e)).collect();
    let mono = crate::poly::Monomial::from_pairs(&pairs)?;
    let log = tau.series.with_truncation(3 * order as u32).log()?;
    let mut value = log.slice_or_zero(order).coeff(&mono);
    for (&k, &e) in &counts {
        for i in 1..=e {
            value *= int(i as i64);
            value /= Rational::from_integer(double_factorial(2 * k as i64 + 1));
        }
    }
    Ok(Correlator {
        ks: sorted,
        genus: Some(g as u32),
        value,
    })
}

/// A coefficient where two series differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Difference {
    pub monomial: Vec<(u32, u32)>,
    pub hbar_order: i64,
    #[serde(with = "rational_string")]
    pub coeff_a: Rational,
    #[serde(with = "rational_string")]
    pub coeff_b: Rational,
}

/// Every coefficient of degree at most `degree` where `a` and `b` differ.
pub fn compare_tau(a: &TauSeries, b: &TauSeries, degree: u32) -> Result<Vec<Difference>> {
    let have = a.degree().min(b.degree());
    if have < degree {
        return Err(Error::TruncationInsufficient {
            needed: degree,
            have,
        });
    }
    let (sa, sb) = (
        a.series.with_truncation(degree),
        b.series.with_truncation(degree),
    );
    let diff = sa.sub(&sb);
    let mut out = Vec::new();
    for (order, p) in diff.slices() {
        for (m, _) in p.terms() {
            out.push(Difference {
                monomial: m.pairs().to_vec(),
                hbar_order: order,
                coeff_a: sa.slice_or_zero(order).coeff(m),
                coeff_b: sb.slice_or_zero(order).coeff(m),
            });
        }
    }
    Ok(out)
}

/// A finite sum of `c hbar^a w^b` with `b in {0, 1, 2}` and `w^3 = -hbar/16`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HbarValue {
    terms: BTreeMap<(i64, u8), Rational>,
}

impl HbarValue {
    pub fn term(hbar: i64, omega: u8, c: Rational) -> Self {
        let mut v = HbarValue::default();
        v.add_term(hbar, omega, c);
        v
    }

    pub fn one() -> Self {
        Self::term(0, 0, Rational::one())
    }

    /// `w`.
    pub fn omega() -> Self {
        Self::term(0, 1, Rational::one())
    }

    fn add_term(&mut self, hbar: i64, omega: u8, c: Rational) {
        let (hbar, omega, c) = if omega >= 3 {
            (hbar + 1, omega - 3, c * rat(-1, 16))
        } else {
            (hbar, omega, c)
        };
        if c.is_zero() {
            return;
        }
        let e = self
            .terms
            .entry((hbar, omega))
            .or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(hbar, omega));
        }
    }

    pub fn mul(&self, other: &HbarValue) -> HbarValue {
        let mut out = HbarValue::default();
        for (&(a, b), c) in &self.terms {
            for (&(x, y), d) in &other.terms {
                out.add_term(a + x, b + y, c * d);
            }
        }
        out
    }

    pub fn sub(&self, other: &HbarValue) -> HbarValue {
        let mut out = self.clone();
        for (&(a, b), c) in &other.terms {
            out.add_term(a, b, -c.clone());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of `hbar^a` when the value is a single such term.
    pub fn as_hbar_power(&self) -> Option<(i64, Rational)> {
        match self.terms.iter().collect::<Vec<_>>()[..] {
            [] => Some((0, Rational::zero())),
            [(&(a, 0), c)] => Some((a, c.clone())),
            _ => None,
        }
    }
}

#[derive(Serialize)]
struct HbarTermJson {
    hbar: i64,
    omega: u8,
    #[serde(with = "rational_string")]
    coeff: Rational,
}

impl Serialize for HbarValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.terms
            .iter()
            .map(|(&(hbar, omega), c)| HbarTermJson {
                hbar,
                omega,
                coeff: c.clone(),
            })
            .collect::<Vec<_>>()
            .serialize(s)
    }
}

/// The pair `(c1, c2)` with `c1 c2 = -hbar/16`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CChoice {
    pub c1: HbarValue,
    pub c2: HbarValue,
}

impl CChoice {
    pub fn new(c1: HbarValue, c2: HbarValue) -> Result<Self> {
        if c1.mul(&c2) != HbarValue::term(1, 0, rat(-1, 16)) {
            return Err(Error::ConstraintViolation);
        }
        Ok(CChoice { c1, c2 })
    }

    /// `c1 = 1`, `c2 = -hbar/16`.
    pub fn unit() -> Self {
        CChoice {
            c1: HbarValue::one(),
            c2: HbarValue::term(1, 0, rat(-1, 16)),
        }
    }

    /// `c1 = w`, `c2 = w^2`.
    pub fn cube_root() -> Self {
        CChoice {
            c1: HbarValue::omega(),
            c2: HbarValue::term(0, 2, Rational::one()),
        }
    }
}

/// `theta_lambda`, a rational multiple of `hbar^{|lambda|/3}`.
pub fn theta(lambda: &StrictPartition) -> Result<HbarValue> {
    let (sf, _) = standard_form(lambda);
    if sf.q() != sf.r() {
        return Err(Error::HypothesisViolated(format!("{lambda} has q != r")));
    }
    let dfact = |n: i64| Rational::from_integer(double_factorial(n));
    let mut c = if sf.r() % 2 == 1 { int(-1) } else { int(1) };
    for _ in 0..lambda.weight() / 3 {
        c /= int(48);
    }
    for &k in &sf.ks {
        c *= dfact(6 * k - 1) / dfact(2 * k - 1);
    }
    for &m in &sf.ms {
        c *= dfact(6 * m + 1) / dfact(2 * m - 1);
    }
    for &n in &sf.ns {
        c *= dfact(6 * n + 3) / dfact(2 * n + 1);
    }
    Ok(HbarValue::term((lambda.weight() / 3) as i64, 0, c))
}

fn eta_part(part: u32, choice: &CChoice) -> HbarValue {
    let k = (part / 3) as i64;
    let (lead, offsets) = match part % 3 {
        0 => (HbarValue::one(), (1, 5)),
        1 => (choice.c1.clone(), (-1, 1)),
        _ => (choice.c2.clone(), (-1, 1)),
    };
    let c: BigInt = (1..=k)
        .map(|j| BigInt::from((6 * j - offsets.0) * (6 * j - offsets.1)))
        .product();
    let mut factor = Rational::from_integer(c);
    for _ in 0..k {
        factor /= int(16);
    }
    lead.mul(&HbarValue::term(k, 0, factor))
}

/// `eta_lambda = prod eta_(lambda_i)`.
pub fn eta(lambda: &StrictPartition, choice: &CChoice) -> HbarValue {
    lambda
        .parts()
        .iter()
        .fold(HbarValue::one(), |acc, &p| acc.mul(&eta_part(p, choice)))
}

/// `theta_lambda - eta_lambda` for a partition with `q = r`.
pub fn hypergeometric_check(lambda: &StrictPartition, choice: &CChoice) -> Result<HbarValue> {
    Ok(theta(lambda)?.sub(&eta(lambda, choice)))
}

/// Strict partitions of weight at most `max_weight` with `q = r`.
pub fn contributing_partitions(max_weight: u32) -> Vec<StrictPartition> {
    enumerate_strict(max_weight)
        .into_iter()
        .filter(|sp| {
            let (sf, _) = standard_form(sp);
            sf.q() == sf.r()
        })
        .collect()
}

/// One coefficient of the diagonal form: the `Q_lambda(t/2)` coefficient of
/// `tau_MM(t/2)` against `theta_lambda 2^{-l} Q_lambda(t*/2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalEntry {
    pub partition: StrictPartition,
    pub hbar_order: i64,
    #[serde(with = "rational_string")]
    pub expected: Rational,
    #[serde(with = "rational_string")]
    pub actual: Rational,
}

/// Expands each slice of `tau` in the Q-basis and lists every strict `lambda`
/// with `|lambda| <= degree(tau)` divisible by 3. Rescaling `t -> t/2` on both
/// the series and the basis leaves these coefficients unchanged.
pub fn diagonal_form_check(tau: &TauSeries) -> Vec<DiagonalEntry> {
    let expansions: BTreeMap<i64, _> = tau
        .series
        .slices()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(a, p)| (a, expand_in_q_basis(p)))
        .collect();
    enumerate_strict(tau.degree())
        .into_iter()
        .filter(|sp| sp.weight() % 3 == 0)
        .map(|sp| {
            let a = (sp.weight() / 3) as i64;
            let expected = match theta(&sp) {
                Ok(th) => {
                    let (_, c) = th.as_hbar_power().expect("theta is a pure hbar power");
                    let mut v = c * a_strict(&sp);
                    for _ in 0..sp.len() {
                        v /= int(2);
                    }
                    v
                }
                Err(_) => Rational::zero(),
            };
            let actual = expansions
                .get(&a)
                .map(|e| e.get(&sp))
                .unwrap_or_else(Rational::zero);
            DiagonalEntry {
                partition: sp,
                hbar_order: a,
                expected,
                actual,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(parts: &[u32]) -> StrictPartition {
        StrictPartition::new(parts.to_vec()).unwrap()
    }

    fn first_slice() -> OddPoly {
        OddPoly::term(&[(1, 3)], rat(1, 6)) + OddPoly::term(&[(3, 1)], rat(1, 8))
    }

    #[test]
    fn mm_examples() {
        assert_eq!(build_tau_mm(0).series, HbarSeries::one(0));
        let tau = build_tau_mm(3);
        assert_eq!(tau.series.slice_or_zero(1), first_slice());
        assert!(tau.is_well_formed());
        assert_eq!(tau_mm_coefficient(&sp(&[3])), rat(5, 48));
        assert_eq!(tau_mm_coefficient(&sp(&[2, 1])), rat(1, 48));
        assert_eq!(tau_mm_coefficient(&sp(&[4])), int(0));
    }

    #[test]
    fn kw_examples() {
        let tau = build_tau_kw(6).unwrap();
        assert_eq!(tau.series.slice_or_zero(1), first_slice());
        assert!(tau.is_well_formed());
        assert_eq!(compare_tau(&tau, &build_tau_mm(6), 6).unwrap(), vec![]);
    }

    #[test]
    fn correlators() {
        let tau = build_tau_kw(9).unwrap();
        assert_eq!(extract_correlator(&tau, &[0, 0, 0]).unwrap().value, int(1));
        let c = extract_correlator(&tau, &[1]).unwrap();
        assert_eq!((c.genus, c.value), (Some(1), rat(1, 24)));
        assert_eq!(extract_correlator(&tau, &[4]).unwrap().value, rat(1, 1152));
        assert_eq!(
            extract_correlator(&tau, &[1, 0, 0, 0]).unwrap().value,
            int(1)
        );
        assert_eq!(extract_correlator(&tau, &[1, 1]).unwrap().value, rat(1, 24));
        let none = extract_correlator(&tau, &[2]).unwrap();
        assert_eq!((none.genus, none.value), (None, int(0)));
        assert_eq!(
            extract_correlator(&tau, &[7]),
            Err(Error::TruncationInsufficient {
                needed: 15,
                have: 9
            })
        );
    }

    #[test]
    fn compare_detects_perturbation() {
        let a = build_tau_mm(6);
        let mut b = a.clone();
        b.series
            .add_to_slice(2, &OddPoly::term(&[(1, 1), (5, 1)], rat(1, 7)));
        let diff = compare_tau(&a, &b, 6).unwrap();
        assert_eq!(diff.len(), 1);
        assert_eq!(diff[0].hbar_order, 2);
        assert!(compare_tau(&a, &a, 9).is_err());
    }

    #[test]
    fn theta_eta_examples() {
        let th = theta(&sp(&[3])).unwrap();
        assert_eq!(th, HbarValue::term(1, 0, rat(5, 16)));
        assert_eq!(eta(&sp(&[3]), &CChoice::unit()), th);
        assert_eq!(theta(&StrictPartition::empty()).unwrap(), HbarValue::one());
        for choice in [CChoice::unit(), CChoice::cube_root()] {
            assert!(hypergeometric_check(&sp(&[2, 1]), &choice)
                .unwrap()
                .is_zero());
        }
        assert!(theta(&sp(&[4])).is_err());
        assert_eq!(
            CChoice::new(HbarValue::one(), HbarValue::one()),
            Err(Error::ConstraintViolation)
        );
        assert!(CChoice::new(HbarValue::omega(), HbarValue::term(0, 2, int(1))).is_ok());
    }

    #[test]
    fn diagonal_small() {
        for e in diagonal_form_check(&build_tau_mm(6)) {
            assert_eq!(e.expected, e.actual, "{}", e.partition);
        }
    }

    #[test]
    fn json_round_trip() {
        let tau = build_tau_mm(6);
        let text = serde_json::to_string(&tau).unwrap();
        let back: TauSeries = serde_json::from_str(&text).unwrap();
        assert_eq!(back, tau);
        assert!(back.is_well_formed());
        assert!(text.starts_with(r#"{"degree":6,"provenance":"MM","series":[{"hbar_order":0"#));
    }
}
