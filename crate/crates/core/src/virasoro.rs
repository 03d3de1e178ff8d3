//! Virasoro operators acting on `hbar`-graded series.
//!
//! `L_m = 1/4 sum_{a+b=2m} d_a d_b + 1/2 sum_k k t_k d_{k+2m} - 1/(2 hbar) d_{2m+3}
//!        + t_1^2/4 [m = -1] + 1/16 [m = 0]`, the quadratic sum over ordered pairs of
//! odd positive indices.

use crate::error::{Error, Result};
use crate::partition::StrictPartition;
use crate::poly::{int, rat, HbarSeries, OddPoly, Rational};
use crate::schur_q::{inner_product, q_strict};
use crate::special::ratio_dfact;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

pub use crate::identities::{phi, psi};

/// An index `m >= -1` of a Virasoro operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VirasoroIndex(i64);

impl VirasoroIndex {
    pub fn new(m: i64) -> Result<Self> {
        if m < -1 {
            return Err(Error::IndexBelowMinusOne(m));
        }
        Ok(VirasoroIndex(m))
    }

    pub fn get(self) -> i64 {
        self.0
    }
}

/// The `hbar^0` part of `L_m` applied to `p`, without truncation.
pub fn l_regular(m: VirasoroIndex, p: &OddPoly) -> OddPoly {
    let m = m.get();
    let mut out = OddPoly::zero();
    let quarter = rat(1, 4);
    for a in (1..2 * m).step_by(2) {
        let b = 2 * m - a;
        out.add_scaled(&p.partial(a as u32).partial(b as u32), &quarter);
    }
    out += &p.shift_operator(2 * m, |k| (k as i64 + 2 * m >= 1).then(|| rat(k as i64, 2)));
    match m {
        -1 => out.add_scaled(&p.mul_by_t(1).mul_by_t(1), &quarter),
        0 => out.add_scaled(p, &rat(1, 16)),
        _ => {}
    }
    out
}

/// `L_m s`. The `hbar^0` part keeps the order of each slice; `-d_{2m+3}/2`
/// lowers it by one. Output slices are truncated at the input's degree bound.
pub fn apply_l(m: VirasoroIndex, s: &HbarSeries) -> HbarSeries {
    let k = (2 * m.get() + 3) as u32;
    let mut out = HbarSeries::new(s.truncation());
    let pieces: Vec<(i64, OddPoly, OddPoly)> = s
        .slices()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(a, p)| (a, l_regular(m, p), p.partial(k).scale(&rat(-1, 2))))
        .collect();
    for (a, regular, singular) in pieces {
        out.add_to_slice(a, &regular);
        out.add_to_slice(a - 1, &singular);
    }
    out
}

/// `L'_1 p = sum k t_k d_{k+2} p + d_1^2 p / 4` and `L'_2 p = sum k t_k d_{k+4} p + d_1 d_3 p / 2`.
pub fn l_prime_direct(which: u8, p: &OddPoly) -> Result<OddPoly> {
    let (shift, extra) = match which {
        1 => (2, p.partial(1).partial(1).scale(&rat(1, 4))),
        2 => (4, p.partial(1).partial(3).scale(&rat(1, 2))),
        _ => return Err(Error::HypothesisViolated(format!("no operator L'_{which}"))),
    };
    Ok(p.shift_operator(shift, |k| Some(int(k as i64))) + extra)
}

/// `(L'_2)^perp p = sum (k+4) t_{k+4} d_k p + 6 t_1 t_3 p`.
pub fn l2_prime_adjoint_direct(p: &OddPoly) -> OddPoly {
    p.shift_operator(-4, |k| (k >= 5).then(|| int(k as i64)))
        + p.mul_by_t(1).mul_by_t(3).scale(&int(6))
}

/// `(L_m)^perp p` from the adjoint rules `d_k^perp = 2k t_k`, `t_k^perp = d_k / 2k`,
/// split as (`hbar^0` part, `hbar^{-1}` part).
pub fn l_adjoint_direct(m: VirasoroIndex, p: &OddPoly) -> (OddPoly, OddPoly) {
    let m = m.get();
    let mut regular = OddPoly::zero();
    for a in (1..2 * m).step_by(2) {
        let b = 2 * m - a;
        regular.add_scaled(&p.mul_by_t(a as u32).mul_by_t(b as u32), &int(a * b));
    }
    regular += &p.shift_operator(-2 * m, |j| {
        let k = j as i64 - 2 * m;
        (k >= 1).then(|| rat(j as i64, 2))
    });
    match m {
        -1 => regular.add_scaled(&p.partial(1).partial(1), &rat(1, 16)),
        0 => regular.add_scaled(p, &rat(1, 16)),
        _ => {}
    }
    let k = (2 * m + 3) as u32;
    let singular = p.mul_by_t(k).scale(&int(-(2 * m + 3)));
    (regular, singular)
}

/// `(L_k L_m - L_m L_k - (k-m) L_{k+m}) s`, computed exactly: the working
/// truncation leaves room for the degree raised by two operator applications.
pub fn bracket_check(k: VirasoroIndex, m: VirasoroIndex, s: &HbarSeries) -> Result<HbarSeries> {
    let wide = s.with_truncation(s.truncation() + 4);
    let km = apply_l(k, &apply_l(m, &wide));
    let mk = apply_l(m, &apply_l(k, &wide));
    let mut res = km.sub(&mk);
    if k != m {
        let sum = VirasoroIndex::new(k.get() + m.get())?;
        res = res.sub(&apply_l(sum, &wide).scale(&int(k.get() - m.get())));
    }
    Ok(res)
}

/// The residual of `L_m tau = 0` on the orders whose inputs are complete.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintResidual {
    pub m: i64,
    pub reliable_hbar_orders: Vec<i64>,
    pub residual_slices: BTreeMap<i64, OddPoly>,
}

impl ConstraintResidual {
    pub fn is_zero(&self) -> bool {
        self.residual_slices.values().all(OddPoly::is_zero)
    }
}

/// Slices of `L_m tau` at orders `a >= -1` with `3(a+1) <= D`.
pub fn constraint_residual(m: VirasoroIndex, tau: &HbarSeries) -> ConstraintResidual {
    let d = tau.truncation() as i64;
    let out = apply_l(m, tau);
    let reliable: Vec<i64> = (-1..).take_while(|a| 3 * (a + 1) <= d).collect();
    let residual_slices = reliable
        .iter()
        .filter_map(|&a| out.slice(a).map(|p| (a, p.clone())))
        .collect();
    ConstraintResidual {
        m: m.get(),
        reliable_hbar_orders: reliable,
        residual_slices,
    }
}

/// Both sides of the pairing formula, keyed by `hbar` order; only nonzero entries are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingCheck {
    pub m: i64,
    pub mu: StrictPartition,
    pub lhs: BTreeMap<i64, Rational>,
    pub rhs: BTreeMap<i64, Rational>,
}

impl PairingCheck {
    pub fn agrees(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// `<L_m tau, Q_mu>` order by order against the closed forms through `Phi`
/// (`m = -1`) and `Psi` (`m = 2`).
pub fn pairing_theorem_check(
    m: i64,
    mu: &StrictPartition,
    tau: &HbarSeries,
) -> Result<PairingCheck> {
    let w = mu.weight() as i64;
    let (scale, offset, value) = match m {
        -1 => (rat(-1, 4), -2, phi(&mu.to_vec())?),
        2 => (Rational::one(), 4, psi(&mu.to_vec())?),
        _ => {
            return Err(Error::HypothesisViolated(format!(
                "pairing formula only for m = -1 or 2, got {m}"
            )))
        }
    };
    // Output terms of degree |mu| come from input degrees |mu|+2m and |mu|+2m+3.
    let needed = [w + 2 * m, w + 2 * m + 3]
        .into_iter()
        .filter(|&d| d >= 0 && (!tau.kw_graded() || d % 3 == 0))
        .max();
    if let Some(needed) = needed {
        if needed > tau.truncation() as i64 {
            return Err(Error::TruncationInsufficient {
                needed: needed as u32,
                have: tau.truncation(),
            });
        }
    }
    let q = q_strict(mu);
    let out = apply_l(VirasoroIndex::new(m)?, tau);
    let mut lhs = BTreeMap::new();
    for (a, p) in out.slices() {
        let v = inner_product(&p.homogeneous_part(w as u32), &q);
        if !v.is_zero() {
            lhs.insert(a, v);
        }
    }
    let mut rhs = BTreeMap::new();
    if (w + offset) % 3 == 0 && w + offset >= 0 {
        let order = (w + offset) / 3;
        let mut v = scale * ratio_dfact(mu) * value;
        for _ in 0..order {
            v *= rat(1, 16);
        }
        if !v.is_zero() {
            rhs.insert(order, v);
        }
    }
    Ok(PairingCheck {
        m,
        mu: mu.clone(),
        lhs,
        rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(m: i64) -> VirasoroIndex {
        VirasoroIndex::new(m).unwrap()
    }

    fn series(d: u32, slices: &[(i64, OddPoly)]) -> HbarSeries {
        let mut s = HbarSeries::new(d);
        for (a, p) in slices {
            s.add_to_slice(*a, p);
        }
        s
    }

    #[test]
    fn index_bounds() {
        assert!(matches!(
            VirasoroIndex::new(-2),
            Err(Error::IndexBelowMinusOne(-2))
        ));
        assert_eq!(idx(3).get(), 3);
    }

    #[test]
    fn apply_examples() {
        let one = HbarSeries::one(6);
        assert_eq!(
            apply_l(idx(0), &one),
            series(6, &[(0, OddPoly::constant(rat(1, 16)))])
        );
        assert_eq!(
            apply_l(idx(-1), &one),
            series(6, &[(0, OddPoly::term(&[(1, 2)], rat(1, 4)))])
        );
        let t7 = series(9, &[(0, OddPoly::var(7))]);
        let out = apply_l(idx(2), &t7);
        assert_eq!(out.slice_or_zero(-1), OddPoly::constant(rat(-1, 2)));
        assert_eq!(out.slice_or_zero(0), OddPoly::var(3).scale(&rat(3, 2)));
    }

    #[test]
    fn operator_forms_on_small_inputs() {
        // L_2 acting on t_1 t_3 through its cross term d_1 d_3 / 2.
        let p = OddPoly::term(&[(1, 1), (3, 1)], int(1));
        assert_eq!(l_regular(idx(2), &p), OddPoly::constant(rat(1, 2)));
        assert_eq!(
            l_prime_direct(1, &OddPoly::var(3)).unwrap(),
            OddPoly::var(1)
        );
        assert_eq!(
            l2_prime_adjoint_direct(&OddPoly::one()),
            OddPoly::term(&[(1, 1), (3, 1)], int(6))
        );
        let (reg, sing) = l_adjoint_direct(idx(-1), &OddPoly::one());
        assert!(reg.is_zero());
        assert_eq!(sing, OddPoly::var(1).scale(&int(-1)));
    }

    #[test]
    fn brackets_vanish() {
        let p = OddPoly::term(&[(3, 1), (5, 1)], int(1))
            + OddPoly::term(&[(1, 3), (3, 1)], rat(-2, 7))
            + OddPoly::term(&[(1, 1), (7, 1)], rat(5, 3));
        let s = series(
            9,
            &[(0, p.clone()), (1, p.mul_by_t(1)), (-1, OddPoly::var(9))],
        );
        for k in -1..=2 {
            for m in -1..=2 {
                assert!(
                    bracket_check(idx(k), idx(m), &s).unwrap().is_zero(),
                    "k={k} m={m}"
                );
            }
        }
        let s = series(9, &[(0, OddPoly::term(&[(3, 1), (5, 1)], int(1)))]);
        assert!(bracket_check(idx(0), idx(1), &s).unwrap().is_zero());
        assert!(bracket_check(idx(-1), idx(-1), &s).unwrap().is_zero());
    }

    #[test]
    fn adjoint_through_pairing() {
        let tau = series(
            8,
            &[
                (
                    0,
                    OddPoly::term(&[(1, 2), (3, 1)], rat(2, 3)) + OddPoly::var(5),
                ),
                (
                    1,
                    OddPoly::term(&[(1, 1), (7, 1)], rat(-1, 4)) + OddPoly::term(&[(1, 8)], int(3)),
                ),
            ],
        );
        for m in [-1, 2] {
            let out = apply_l(idx(m), &tau.with_truncation(20));
            for mu in crate::partition::enumerate_strict(8) {
                let q = q_strict(&mu);
                let (reg, sing) = l_adjoint_direct(idx(m), &q);
                for a in -1..=1 {
                    let lhs = inner_product(&out.slice_or_zero(a), &q);
                    let rhs = inner_product(&tau.slice_or_zero(a), &reg)
                        + inner_product(&tau.slice_or_zero(a + 1), &sing);
                    assert_eq!(lhs, rhs, "m={m} mu={mu} a={a}");
                }
            }
        }
    }

    #[test]
    fn constraint_window() {
        let r = constraint_residual(idx(-1), &HbarSeries::one(9));
        assert_eq!(r.reliable_hbar_orders, vec![-1, 0, 1, 2]);
        assert!(!r.is_zero());
    }
}
