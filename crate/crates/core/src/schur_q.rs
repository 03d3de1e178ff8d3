//! Schur Q-polynomials and calculus in the Q-basis.
//!
//! - `q_k` from `sum q_k z^k = exp(2 sum t_{2j+1} z^{2j+1})`.
//! - `Q_lambda` as the Pfaffian of `M_(lambda_i, lambda_j)`, zero-padded to even length.
//! - [`QExpansion`]: a polynomial written in the basis `{Q_lambda}` of strict partitions.
//! - Closed-form basis actions of `d/dt_r`, `t_r`, the `L'` operators and the
//!   adjoints of `L_{-1}` and `L_2`.
//!
//! The process-wide [`QEngine`] caches `q_k`, matrix entries, `Q_lambda` and
//! per-degree change-of-basis data; cache hits never change results.

use crate::error::{Error, Result};
use crate::partition::{normalize, strict_partitions_of, StrictPartition};
use crate::pfaffian::{pfaffian, SkewMatrix};
use crate::poly::{int, rat, rational_string, Monomial, OddPoly, Rational};
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

/// A finite linear combination of `Q_lambda` over strict partitions.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct QExpansion {
    coeffs: BTreeMap<StrictPartition, Rational>,
}

impl QExpansion {
    pub fn new() -> Self {
        QExpansion::default()
    }

    pub fn single(sp: StrictPartition, c: Rational) -> Self {
        let mut e = QExpansion::new();
        e.add_term(sp, c);
        e
    }

    pub fn add_term(&mut self, sp: StrictPartition, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(sp) {
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

    /// Adds `c * Q_v` after normalizing the index vector `v`.
    pub fn add_index(&mut self, v: &[i64], c: &Rational) -> Result<()> {
        let (k, sp) = normalize(v)?;
        if k != 0 {
            self.add_term(sp, c * int(k));
        }
        Ok(())
    }

    pub fn get(&self, sp: &StrictPartition) -> Rational {
        self.coeffs.get(sp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&StrictPartition, &Rational)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> QExpansion {
        let mut out = QExpansion::new();
        for (sp, x) in &self.coeffs {
            out.add_term(sp.clone(), x * c);
        }
        out
    }

    pub fn add(&self, other: &QExpansion) -> QExpansion {
        let mut out = self.clone();
        for (sp, x) in &other.coeffs {
            out.add_term(sp.clone(), x.clone());
        }
        out
    }

    pub fn sub(&self, other: &QExpansion) -> QExpansion {
        self.add(&other.scale(&int(-1)))
    }

    /// `sum c_lambda Q_lambda` as a polynomial.
    pub fn to_poly(&self) -> OddPoly {
        let mut out = OddPoly::zero();
        for (sp, c) in &self.coeffs {
            out.add_scaled(&q_strict(sp), c);
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct QTermJson {
    partition: StrictPartition,
    #[serde(with = "rational_string")]
    coeff: Rational,
}

impl Serialize for QExpansion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<QTermJson> = self
            .coeffs
            .iter()
            .map(|(p, c)| QTermJson {
                partition: p.clone(),
                coeff: c.clone(),
            })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QExpansion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<QTermJson>::deserialize(d)?;
        let mut e = QExpansion::new();
        for t in terms {
            if t.coeff.is_zero() {
                return Err(D::Error::custom("zero coefficient in expansion"));
            }
            e.add_term(t.partition, t.coeff);
        }
        Ok(e)
    }
}

/// Inverse change of basis for one degree: each monomial written in `Q_lambda`.
struct DegreeBasis {
    monomials: HashMap<Monomial, Vec<(StrictPartition, Rational)>>,
}

/// Caches shared by every Q-polynomial computation.
#[derive(Default)]
pub struct QEngine {
    q: RwLock<Vec<Arc<OddPoly>>>,
    entries: RwLock<HashMap<(u32, u32), Arc<OddPoly>>>,
    strict: RwLock<HashMap<StrictPartition, Arc<OddPoly>>>,
    bases: RwLock<HashMap<u32, Arc<DegreeBasis>>>,
}

/// The process-wide engine.
pub fn engine() -> &'static QEngine {
    static ENGINE: OnceLock<QEngine> = OnceLock::new();
    ENGINE.get_or_init(QEngine::default)
}

impl QEngine {
    /// `q_0, ..., q_max_degree`, extended through `k q_k = sum_j 2 j t_j q_{k-j}`.
    pub fn gen_q(&self, max_degree: u32) -> Vec<Arc<OddPoly>> {
        {
            let q = self.q.read().unwrap();
            if q.len() > max_degree as usize {
                return q[..=max_degree as usize].to_vec();
            }
        }
        let mut q = self.q.write().unwrap();
        if q.is_empty() {
            q.push(Arc::new(OddPoly::one()));
        }
        while q.len() <= max_degree as usize {
            let k = q.len();
            let mut next = OddPoly::zero();
            for j in (1..=k).step_by(2) {
                let term = q[k - j].mul_by_t(j as u32);
                next.add_scaled(&term, &rat(2 * j as i64, k as i64));
            }
            q.push(Arc::new(next));
        }
        q[..=max_degree as usize].to_vec()
    }

    pub fn q(&self, k: u32) -> Arc<OddPoly> {
        self.gen_q(k)[k as usize].clone()
    }

    /// `M_(r,s) = q_r q_s + 2 sum_{i=1}^s (-1)^i q_{r+i} q_{s-i}`, `M_(0,0) = 0`.
    pub fn m_entry(&self, r: u32, s: u32) -> Arc<OddPoly> {
        if let Some(v) = self.entries.read().unwrap().get(&(r, s)) {
            return v.clone();
        }
        let value = if r == 0 && s == 0 {
            OddPoly::zero()
        } else {
            let q = self.gen_q(r + s);
            let mut acc = &*q[r as usize] * &*q[s as usize];
            for i in 1..=s {
                let c = if i % 2 == 0 { int(2) } else { int(-2) };
                acc.add_scaled(&(&*q[(r + i) as usize] * &*q[(s - i) as usize]), &c);
            }
            acc
        };
        let value = Arc::new(value);
        self.entries.write().unwrap().insert((r, s), value.clone());
        value
    }

    /// `Q_lambda` for a strict partition.
    pub fn q_strict(&self, sp: &StrictPartition) -> Arc<OddPoly> {
        if let Some(v) = self.strict.read().unwrap().get(sp) {
            return v.clone();
        }
        let mut parts: Vec<u32> = sp.parts().to_vec();
        if parts.len() % 2 == 1 {
            parts.push(0);
        }
        let matrix = SkewMatrix::from_fn(parts.len(), |i, j| {
            (*self.m_entry(parts[i], parts[j])).clone()
        });
        let value = Arc::new(pfaffian(&matrix).expect("even dimension"));
        self.strict
            .write()
            .unwrap()
            .insert(sp.clone(), value.clone());
        value
    }

    fn degree_basis(&self, d: u32) -> Arc<DegreeBasis> {
        if let Some(b) = self.bases.read().unwrap().get(&d) {
            return b.clone();
        }
        let basis = Arc::new(self.build_degree_basis(d));
        self.bases.write().unwrap().insert(d, basis.clone());
        basis
    }

    /// Gauss-Jordan inversion of the matrix of `Q_lambda` in monomials of degree `d`.
    fn build_degree_basis(&self, d: u32) -> DegreeBasis {
        let parts = strict_partitions_of(d);
        let polys: Vec<Arc<OddPoly>> = parts.iter().map(|p| self.q_strict(p)).collect();
        let mut monomials: Vec<Monomial> = Vec::new();
        for p in &polys {
            for (m, _) in p.terms() {
                if !monomials.contains(m) {
                    monomials.push(m.clone());
                }
            }
        }
        monomials.sort();
        let n = parts.len();
        assert_eq!(monomials.len(), n, "Q-basis of degree {d} is not square");
        let col: HashMap<&Monomial, usize> =
            monomials.iter().enumerate().map(|(i, m)| (m, i)).collect();
        // Row lambda of `a` holds the coefficients of Q_lambda; `inv` starts as identity.
        let mut a: Vec<Vec<Rational>> = vec![vec![Rational::zero(); n]; n];
        for (row, p) in polys.iter().enumerate() {
            for (m, c) in p.terms() {
                a[row][col[m]] = c.clone();
            }
        }
        let mut inv: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        // Row operations: afterwards row i of `inv` expresses monomial i in Q's.
        for c in 0..n {
            let pivot = (c..n)
                .find(|&r| !a[r][c].is_zero())
                .expect("Q-basis is invertible");
            a.swap(c, pivot);
            inv.swap(c, pivot);
            let scale = a[c][c].clone();
            for x in a[c].iter_mut() {
                *x /= scale.clone();
            }
            for x in inv[c].iter_mut() {
                *x /= scale.clone();
            }
            for r in 0..n {
                if r != c && !a[r][c].is_zero() {
                    let f = a[r][c].clone();
                    for k in 0..n {
                        let v = &a[c][k] * &f;
                        a[r][k] -= v;
                        let w = &inv[c][k] * &f;
                        inv[r][k] -= w;
                    }
                }
            }
        }
        let mut map = HashMap::new();
        for (i, m) in monomials.into_iter().enumerate() {
            let combo = (0..n)
                .filter(|&j| !inv[i][j].is_zero())
                .map(|j| (parts[j].clone(), inv[i][j].clone()))
                .collect();
            map.insert(m, combo);
        }
        DegreeBasis { monomials: map }
    }

    pub fn expand_in_q_basis(&self, p: &OddPoly) -> QExpansion {
        let mut out = QExpansion::new();
        for (m, c) in p.terms() {
            let basis = self.degree_basis(m.degree());
            for (sp, x) in &basis.monomials[m] {
                out.add_term(sp.clone(), c * x);
            }
        }
        out
    }
}

pub fn gen_q(max_degree: u32) -> Vec<OddPoly> {
    engine()
        .gen_q(max_degree)
        .iter()
        .map(|q| (**q).clone())
        .collect()
}

pub fn m_entry(r: u32, s: u32) -> OddPoly {
    (*engine().m_entry(r, s)).clone()
}

pub fn q_strict(sp: &StrictPartition) -> Arc<OddPoly> {
    engine().q_strict(sp)
}

/// `Q_v` for an index vector with at most one negative part.
pub fn q_poly(v: &[i64]) -> Result<OddPoly> {
    let (k, sp) = normalize(v)?;
    if k == 0 {
        return Ok(OddPoly::zero());
    }
    Ok(q_strict(&sp).scale(&int(k)))
}

/// The pairing with `<t^a, t^b> = delta_{a,b} prod a_r! / (2r)^{a_r}`.
pub fn inner_product(p: &OddPoly, q: &OddPoly) -> Rational {
    let (small, large) = if p.len() <= q.len() { (p, q) } else { (q, p) };
    let mut total = Rational::zero();
    for (m, c) in small.terms() {
        let d = large.coeff(m);
        if !d.is_zero() {
            total += c * d * m.self_pairing();
        }
    }
    total
}

/// Expansion in the Q-basis by inverting the change of basis degree by degree.
pub fn expand_in_q_basis(p: &OddPoly) -> QExpansion {
    engine().expand_in_q_basis(p)
}

/// Expansion through the pairing: the coefficient of `Q_lambda` is `2^{-l} <p, Q_lambda>`.
pub fn expand_by_pairing(p: &OddPoly) -> QExpansion {
    let mut degrees: Vec<u32> = p.terms().map(|(m, _)| m.degree()).collect();
    degrees.dedup();
    let mut out = QExpansion::new();
    for d in degrees {
        let part = p.homogeneous_part(d);
        for sp in strict_partitions_of(d) {
            let c = inner_product(&part, &q_strict(&sp));
            out.add_term(sp.clone(), c * rat(1, 1i64 << sp.len()));
        }
    }
    out
}

fn check_odd(r: u32) -> Result<()> {
    if r % 2 == 1 {
        Ok(())
    } else {
        Err(Error::InvalidOddIndex(r as i64))
    }
}

fn shifted(v: &[i64], i: usize, delta: i64) -> Vec<i64> {
    let mut w = v.to_vec();
    w[i] += delta;
    w
}

fn appended(v: &[i64], extra: &[i64]) -> Vec<i64> {
    let mut w = v.to_vec();
    w.extend_from_slice(extra);
    w
}

/// `(1/2) dQ_v/dt_r = sum_i Q_{v - r e_i}`.
pub fn half_derivative_basis(v: &[i64], r: u32) -> Result<QExpansion> {
    check_odd(r)?;
    let mut out = QExpansion::new();
    for i in 0..v.len() {
        out.add_index(&shifted(v, i, -(r as i64)), &Rational::one())?;
    }
    Ok(out)
}

/// `r t_r Q_v = sum_i Q_{v + r e_i} + Q_(v,r)/2 + sum_{k=1}^{r-1} (-1)^{r-k}/4 Q_(v,k,r-k)`.
pub fn multiply_tr_basis(v: &[i64], r: u32) -> Result<QExpansion> {
    check_odd(r)?;
    let r = r as i64;
    let mut out = QExpansion::new();
    for i in 0..v.len() {
        out.add_index(&shifted(v, i, r), &Rational::one())?;
    }
    out.add_index(&appended(v, &[r]), &rat(1, 2))?;
    for k in 1..r {
        let sign = if (r - k) % 2 == 0 { 1 } else { -1 };
        out.add_index(&appended(v, &[k, r - k]), &rat(sign, 4))?;
    }
    Ok(out)
}

/// `L'_1 Q_v = sum (v_i - 1) Q_{v - 2e_i}` and `L'_2 Q_v = sum (v_i - 2) Q_{v - 4e_i}`.
pub fn l_prime_action(which: u8, v: &[i64]) -> Result<QExpansion> {
    let (shift, offset) = match which {
        1 => (2, 1),
        2 => (4, 2),
        _ => return Err(Error::HypothesisViolated(format!("no operator L'_{which}"))),
    };
    let mut out = QExpansion::new();
    for i in 0..v.len() {
        out.add_index(&shifted(v, i, -shift), &int(v[i] - offset))?;
    }
    Ok(out)
}

/// `(L'_2)^perp Q_v = sum (v_i + 2) Q_{v + 4e_i} + Q_(v,4) - Q_(v,3,1)/2`.
pub fn l2_prime_adjoint_basis(v: &[i64]) -> Result<QExpansion> {
    let mut out = QExpansion::new();
    for i in 0..v.len() {
        out.add_index(&shifted(v, i, 4), &int(v[i] + 2))?;
    }
    out.add_index(&appended(v, &[4]), &Rational::one())?;
    out.add_index(&appended(v, &[3, 1]), &rat(-1, 2))?;
    Ok(out)
}

/// `(L_m)^perp Q_v` for `m` in {-1, 2}, split as (`hbar^0` part, `hbar^{-1}` part).
pub fn adjoint_virasoro_basis(m: i64, v: &[i64]) -> Result<(QExpansion, QExpansion)> {
    let l = v.len();
    let one = Rational::one();
    let mut regular = QExpansion::new();
    let mut singular = QExpansion::new();
    match m {
        -1 => {
            for i in 0..l {
                for j in 0..l {
                    if i != j {
                        let w = shifted(&shifted(v, i, -1), j, -1);
                        regular.add_index(&w, &rat(-1, 4))?;
                    }
                }
                regular.add_index(&shifted(v, i, -2), &rat(2 * v[i] - 3, 4))?;
                singular.add_index(&shifted(v, i, 1), &-one.clone())?;
            }
            singular.add_index(&appended(v, &[1]), &rat(-1, 2))?;
        }
        2 => {
            let half = rat(1, 2);
            for i in 0..l {
                for j in 0..l {
                    if i != j {
                        regular.add_index(&shifted(&shifted(v, i, 3), j, 1), &one)?;
                    }
                }
                regular.add_index(&shifted(v, i, 4), &rat(v[i] + 4, 2))?;
                regular.add_index(&appended(&shifted(v, i, 3), &[1]), &half)?;
                regular.add_index(&appended(&shifted(v, i, 1), &[3]), &half)?;
                regular.add_index(&appended(&shifted(v, i, 1), &[2, 1]), &-half.clone())?;
                singular.add_index(&shifted(v, i, 7), &-one.clone())?;
            }
            regular.add_index(&appended(v, &[4]), &one)?;
            regular.add_index(&appended(v, &[3, 1]), &-half.clone())?;
            for r in 0..4 {
                let c = if r % 2 == 0 { rat(-1, 2) } else { rat(1, 2) };
                singular.add_index(&appended(v, &[7 - r, r]), &c)?;
            }
        }
        _ => {
            return Err(Error::HypothesisViolated(format!(
                "closed-form adjoint only for m = -1 or 2, got {m}"
            )))
        }
    }
    Ok((regular, singular))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(parts: &[u32]) -> StrictPartition {
        StrictPartition::new(parts.to_vec()).unwrap()
    }

    fn expansion(terms: &[(&[u32], Rational)]) -> QExpansion {
        let mut e = QExpansion::new();
        for (p, c) in terms {
            e.add_term(sp(p), c.clone());
        }
        e
    }

    fn t1_cubed() -> OddPoly {
        OddPoly::term(&[(1, 3)], int(1))
    }

    fn q21() -> OddPoly {
        OddPoly::term(&[(1, 3)], rat(4, 3)) + OddPoly::term(&[(3, 1)], int(-4))
    }

    #[test]
    fn generating_polynomials() {
        let q = gen_q(3);
        assert_eq!(q[0], OddPoly::one());
        assert_eq!(q[1], OddPoly::term(&[(1, 1)], int(2)));
        assert_eq!(q[2], OddPoly::term(&[(1, 2)], int(2)));
        assert_eq!(
            q[3],
            OddPoly::term(&[(3, 1)], int(2)) + OddPoly::term(&[(1, 3)], rat(4, 3))
        );
    }

    #[test]
    fn generating_polynomials_match_exponential() {
        // exp(2 sum t_j) has q_k as its homogeneous degree-k part.
        let d = 15;
        let mut arg = OddPoly::zero();
        for j in (1..=d).step_by(2) {
            arg += &OddPoly::var(j).scale(&int(2));
        }
        let e = arg.exp_truncated(d).unwrap();
        for (k, qk) in gen_q(d).iter().enumerate() {
            assert_eq!(*qk, e.homogeneous_part(k as u32), "q_{k}");
        }
    }

    #[test]
    fn matrix_entries() {
        assert!(m_entry(0, 0).is_zero());
        assert_eq!(m_entry(1, 0), OddPoly::term(&[(1, 1)], int(2)));
        assert_eq!(m_entry(2, 1), q21());
        for r in 0..7 {
            for s in 0..7 {
                assert_eq!(m_entry(r, s), -m_entry(s, r), "M({r},{s})");
            }
        }
    }

    #[test]
    fn q_polynomials() {
        assert_eq!(q_poly(&[1]).unwrap(), OddPoly::term(&[(1, 1)], int(2)));
        assert_eq!(q_poly(&[2, 1]).unwrap(), q21());
        assert_eq!(q_poly(&[1, 2]).unwrap(), -q21());
        assert_eq!(q_poly(&[]).unwrap(), OddPoly::one());
        for p in crate::partition::enumerate_strict(12) {
            assert!(q_strict(&p).is_homogeneous(p.weight() as u32), "{p}");
        }
    }

    #[test]
    fn pairing_examples() {
        let t1 = OddPoly::var(1);
        assert_eq!(inner_product(&t1, &t1), rat(1, 2));
        assert_eq!(inner_product(&q21(), &q21()), int(4));
        assert_eq!(inner_product(&q_poly(&[3]).unwrap(), &q21()), int(0));
    }

    #[test]
    fn expansion_examples() {
        let two_t1 = OddPoly::term(&[(1, 1)], int(2));
        assert_eq!(expand_in_q_basis(&two_t1), expansion(&[(&[1], int(1))]));
        let e = expand_in_q_basis(&t1_cubed());
        assert_eq!(e, expansion(&[(&[3], rat(1, 2)), (&[2, 1], rat(1, 4))]));
        assert_eq!(e.to_poly(), t1_cubed());
        assert_eq!(expand_by_pairing(&t1_cubed()), e);
        assert!(expand_in_q_basis(&OddPoly::zero()).is_zero());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            half_derivative_basis(&[3], 3).unwrap(),
            expansion(&[(&[], int(1))])
        );
        assert!(half_derivative_basis(&[1], 3).unwrap().is_zero());
        assert_eq!(
            half_derivative_basis(&[2, 1], 1).unwrap(),
            expansion(&[(&[2], int(1))])
        );
        assert!(half_derivative_basis(&[2], 2).is_err());
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(
            multiply_tr_basis(&[2], 1).unwrap(),
            expansion(&[(&[3], int(1)), (&[2, 1], rat(1, 2))])
        );
        // 3 t_3 = Q_(3)/2 - Q_(2,1)/2.
        let e = multiply_tr_basis(&[], 3).unwrap();
        assert_eq!(e, expansion(&[(&[3], rat(1, 2)), (&[2, 1], rat(-1, 2))]));
        assert_eq!(e.to_poly(), OddPoly::var(3).scale(&int(3)));
        assert_eq!(
            multiply_tr_basis(&[1], 1).unwrap(),
            expansion(&[(&[2], int(1))])
        );
    }

    #[test]
    fn l_prime_examples() {
        assert_eq!(
            l_prime_action(1, &[3]).unwrap(),
            expansion(&[(&[1], int(2))])
        );
        assert!(l_prime_action(1, &[1]).unwrap().is_zero());
        assert!(l_prime_action(2, &[2, 1]).unwrap().is_zero());
        // Length drop: Q_(-1,1) = -2.
        assert_eq!(
            l_prime_action(2, &[3, 1]).unwrap(),
            expansion(&[(&[], int(-2))])
        );
    }

    #[test]
    fn adjoint_examples() {
        let (reg, sing) = adjoint_virasoro_basis(-1, &[]).unwrap();
        assert!(reg.is_zero());
        assert_eq!(sing, expansion(&[(&[1], rat(-1, 2))]));
        let (reg, _) = adjoint_virasoro_basis(-1, &[3]).unwrap();
        assert_eq!(reg.get(&sp(&[1])), rat(3, 4));
        let (reg, _) = adjoint_virasoro_basis(2, &[]).unwrap();
        assert_eq!(reg, expansion(&[(&[4], int(1)), (&[3, 1], rat(-1, 2))]));
        assert!(adjoint_virasoro_basis(0, &[]).is_err());
    }

    #[test]
    fn expansion_json() {
        let e = expansion(&[(&[2, 1], rat(3, 8)), (&[3], rat(1, 4))]);
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(
            s,
            r#"[{"partition":[3],"coeff":"1/4"},{"partition":[2,1],"coeff":"3/8"}]"#
        );
        let back: QExpansion = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }
}
