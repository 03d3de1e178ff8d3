//! One PASS/FAIL line per acceptance criterion; exits nonzero on any failure.

use num_traits::Zero;
use rayon::prelude::*;
use schurq::identities::{check_family, phi, psi, Identity};
use schurq::partition::{enumerate_strict, StrictPartition};
use schurq::poly::{int, rat, Rational};
use schurq::schur_q::{
    adjoint_virasoro_basis, half_derivative_basis, inner_product, l2_prime_adjoint_basis,
    l_prime_action, multiply_tr_basis, q_poly, q_strict,
};
use schurq::special::{a_const, hook_eval};
use schurq::tau::{
    build_tau_kw, build_tau_mm, compare_tau, contributing_partitions, diagonal_form_check,
    extract_correlator, hypergeometric_check, tau_mm_coefficient, CChoice,
};
use schurq::virasoro::{
    bracket_check, constraint_residual, l2_prime_adjoint_direct, l_prime_direct,
    pairing_theorem_check, VirasoroIndex,
};
use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

type Outcome = Result<String, String>;

fn at(k: u32, value: Rational) -> BTreeMap<u32, Rational> {
    BTreeMap::from([(k, value)])
}

fn orthogonality() -> Outcome {
    let parts = enumerate_strict(10);
    let bad: Vec<String> = parts
        .par_iter()
        .flat_map_iter(|l| {
            let ql = q_strict(l);
            parts.iter().filter_map(move |m| {
                let expected = if l == m { int(1 << l.len()) } else { int(0) };
                (inner_product(&ql, &q_strict(m)) != expected).then(|| format!("<{l},{m}>"))
            })
        })
        .collect();
    if bad.is_empty() {
        Ok(format!("{} pairs", parts.len() * parts.len()))
    } else {
        Err(format!("{} mismatches, first {}", bad.len(), bad[0]))
    }
}

fn special_values() -> Outcome {
    let third = at(3, rat(1, 3));
    let one = at(1, int(1));
    let a_bad: Vec<StrictPartition> = enumerate_strict(18)
        .into_par_iter()
        .filter(|sp| q_strict(sp).evaluate(&third) != a_const(&sp.to_vec()).unwrap())
        .collect();
    let h_bad: Vec<StrictPartition> = enumerate_strict(12)
        .into_par_iter()
        .filter(|sp| q_strict(sp).evaluate(&one) != hook_eval(&sp.to_vec()).unwrap())
        .collect();
    match (a_bad.first(), h_bad.first()) {
        (None, None) => Ok(format!(
            "{} closed-form and {} hook values",
            enumerate_strict(18).len(),
            enumerate_strict(12).len()
        )),
        (Some(sp), _) => Err(format!("closed form differs at {sp}")),
        (_, Some(sp)) => Err(format!("hook formula differs at {sp}")),
    }
}

fn index_vectors(max_part: i64, max_len: usize) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|v: &Vec<i64>| {
                (0..=max_part).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn basis_calculus() -> Outcome {
    let inputs = index_vectors(6, 4);
    let cases: Vec<(Vec<i64>, u32)> = inputs
        .iter()
        .flat_map(|v| [1, 3, 5, 7].map(|r| (v.clone(), r)))
        .collect();
    let bad: Vec<String> = cases
        .par_iter()
        .filter_map(|(v, r)| {
            let q = q_poly(v).unwrap();
            let deriv = q.partial(*r).scale(&rat(1, 2));
            let mult = q.mul_by_t(*r).scale(&int(*r as i64));
            let ok = half_derivative_basis(v, *r).unwrap().to_poly() == deriv
                && multiply_tr_basis(v, *r).unwrap().to_poly() == mult;
            (!ok).then(|| format!("{v:?} r={r}"))
        })
        .collect();
    if bad.is_empty() {
        Ok(format!("{} (vector, r) cases", cases.len()))
    } else {
        Err(format!("{} mismatches, first {}", bad.len(), bad[0]))
    }
}

fn l_prime() -> Outcome {
    let parts = enumerate_strict(10);
    let bad: Vec<String> = parts
        .par_iter()
        .filter_map(|sp| {
            let v = sp.to_vec();
            let q = q_strict(sp);
            let ok = (1..=2).all(|w| {
                l_prime_action(w, &v).unwrap().to_poly() == l_prime_direct(w, &q).unwrap()
            }) && l2_prime_adjoint_basis(&v).unwrap().to_poly()
                == l2_prime_adjoint_direct(&q);
            (!ok).then(|| sp.to_string())
        })
        .collect();
    if bad.is_empty() {
        Ok(format!("{} partitions, three operators", parts.len()))
    } else {
        Err(format!("{} mismatches, first {}", bad.len(), bad[0]))
    }
}

fn identity_suite() -> Outcome {
    let mut total = 0;
    let mut failures = Vec::new();
    for id in Identity::ALL {
        let reports = check_family(id, 12, 5, 200, 0);
        total += reports.len();
        if let Some(r) = reports.iter().find(|r| !r.pass) {
            failures.push(format!("{id} at {:?}", r.input));
        }
    }
    if failures.is_empty() {
        Ok(format!(
            "{} families, {total} instances",
            Identity::ALL.len()
        ))
    } else {
        Err(failures.join("; "))
    }
}

fn phi_psi() -> Outcome {
    let parts = enumerate_strict(20);
    let bad: Vec<String> = parts
        .par_iter()
        .filter_map(|sp| {
            let v = sp.to_vec();
            let ok = phi(&v) == Ok(int(0)) && psi(&v) == Ok(int(0));
            (!ok).then(|| sp.to_string())
        })
        .collect();
    if bad.is_empty() {
        Ok(format!("{} partitions", parts.len()))
    } else {
        Err(format!("{} nonzero, first {}", bad.len(), bad[0]))
    }
}

fn virasoro() -> Outcome {
    let tau = build_tau_mm(12);
    let idx = |m| VirasoroIndex::new(m).unwrap();
    for m in -1..=3 {
        let r = constraint_residual(idx(m), &tau.series);
        if !r.is_zero() {
            return Err(format!(
                "L_{m} residual at orders {:?}",
                r.residual_slices.keys().collect::<Vec<_>>()
            ));
        }
    }
    for k in -1..=2 {
        for m in -1..=2 {
            if !bracket_check(idx(k), idx(m), &tau.series)
                .unwrap()
                .is_zero()
            {
                return Err(format!("bracket ({k},{m})"));
            }
        }
    }
    Ok("5 constraints, 16 brackets at degree 12".into())
}

fn main_theorem() -> Outcome {
    let mm = build_tau_mm(12);
    let kw = build_tau_kw(12).map_err(|e| e.to_string())?;
    let diff = compare_tau(&mm, &kw, 12).map_err(|e| e.to_string())?;
    if !diff.is_empty() {
        return Err(format!("{} differing coefficients", diff.len()));
    }
    for (ks, value) in [
        (vec![0, 0, 0], int(1)),
        (vec![1], rat(1, 24)),
        (vec![4], rat(1, 1152)),
    ] {
        let c = extract_correlator(&kw, &ks).map_err(|e| e.to_string())?;
        if c.value != value {
            return Err(format!("<{ks:?}> = {}", c.value));
        }
    }
    Ok("series agree through degree 12, three correlators".into())
}

fn hypergeometric() -> Outcome {
    let parts = contributing_partitions(12);
    for sp in &parts {
        for choice in [CChoice::unit(), CChoice::cube_root()] {
            if !hypergeometric_check(sp, &choice)
                .map_err(|e| e.to_string())?
                .is_zero()
            {
                return Err(format!("theta != eta at {sp}"));
            }
        }
    }
    let diagonal = diagonal_form_check(&build_tau_mm(12));
    if let Some(e) = diagonal.iter().find(|e| e.expected != e.actual) {
        return Err(format!("diagonal coefficient at {}", e.partition));
    }
    Ok(format!(
        "{} partitions, {} diagonal coefficients",
        parts.len(),
        diagonal.len()
    ))
}

/// `<L_m tau_MM, Q_mu>` at `hbar^a` through the adjoint in the Q-basis, term by term.
fn adjoint_pairing(m: i64, mu: &StrictPartition) -> (BTreeMap<i64, Rational>, usize) {
    let (regular, singular) = adjoint_virasoro_basis(m, &mu.to_vec()).unwrap();
    let mut sums: BTreeMap<i64, Rational> = BTreeMap::new();
    let mut terms = 0;
    for (part, shift) in [(&regular, 0), (&singular, 1)] {
        for (lambda, c) in part.iter() {
            let coeff = tau_mm_coefficient(lambda);
            if coeff.is_zero() {
                continue;
            }
            terms += 1;
            let order = (lambda.weight() / 3) as i64 - shift;
            *sums.entry(order).or_insert_with(Rational::zero) += c * coeff * int(1 << lambda.len());
        }
    }
    sums.retain(|_, v| !v.is_zero());
    (sums, terms)
}

fn pairing() -> Outcome {
    let tau = build_tau_mm(12);
    let mut terms = 0;
    let mut cases = 0;
    for m in [-1, 2] {
        for mu in enumerate_strict(6) {
            let check = pairing_theorem_check(m, &mu, &tau.series)
                .map_err(|e| format!("m={m} {mu}: {e}"))?;
            if !check.agrees() {
                return Err(format!("m={m} mu={mu}: {:?} vs {:?}", check.lhs, check.rhs));
            }
            let (adjoint, n) = adjoint_pairing(m, &mu);
            if adjoint != check.lhs {
                return Err(format!("m={m} mu={mu}: adjoint path gives {adjoint:?}"));
            }
            terms += n;
            cases += 1;
        }
    }
    Ok(format!("{cases} cases, {terms} cancelling adjoint terms"))
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, orthogonality),
        (2, special_values),
        (3, basis_calculus),
        (4, l_prime),
        (5, identity_suite),
        (6, phi_psi),
        (7, virasoro),
        (8, main_theorem),
        (9, hypergeometric),
        (10, pairing),
    ];
    let mut failed = 0;
    for (n, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS ({detail}; {secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n}: FAIL ({detail}; {secs:.1}s)");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
