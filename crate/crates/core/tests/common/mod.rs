#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use standpoint::ast::{precisification_labels, Formula, StandpointExpr};
use standpoint::semantics::Structure;

pub const ATOMS: [&str; 2] = ["p", "q"];
pub const STANDPOINTS: [&str; 2] = ["s", "t"];

pub fn exprs() -> Vec<StandpointExpr> {
    vec![
        StandpointExpr::Star,
        StandpointExpr::named("s"),
        StandpointExpr::named("t"),
    ]
}

/// Core-syntax leaves over two atoms and two standpoint symbols plus `*`.
pub fn leaves() -> Vec<Formula> {
    let mut out = vec![Formula::True, Formula::False];
    out.extend(ATOMS.iter().map(|a| Formula::atom(*a)));
    for l in exprs() {
        for r in exprs() {
            out.push(Formula::sharper(l.clone(), r));
        }
    }
    out
}

/// Every core formula (true, false, atoms, sharpenings, ¬, ∧, □) of depth at
/// most `depth`, where a leaf has depth 1. Conjunctions are taken up to
/// commutativity.
pub fn corpus(depth: usize) -> Vec<Formula> {
    let mut level = leaves();
    for _ in 1..depth {
        let prev = level;
        let mut next = leaves();
        next.extend(prev.iter().map(|f| Formula::not(f.clone())));
        for i in 0..prev.len() {
            for j in i..prev.len() {
                next.push(Formula::and(prev[i].clone(), prev[j].clone()));
            }
        }
        for e in exprs() {
            next.extend(prev.iter().map(|f| Formula::boxed(e.clone(), f.clone())));
        }
        level = next;
    }
    level
}

pub fn random_expr(rng: &mut impl Rng, symbols: &[&str], depth: usize) -> StandpointExpr {
    if depth == 0 || rng.gen_bool(0.6) {
        return if rng.gen_bool(0.2) {
            StandpointExpr::Star
        } else {
            StandpointExpr::named(symbols[rng.gen_range(0..symbols.len())])
        };
    }
    let l = random_expr(rng, symbols, depth - 1);
    let r = random_expr(rng, symbols, depth - 1);
    match rng.gen_range(0..3) {
        0 => StandpointExpr::union(l, r),
        1 => StandpointExpr::inter(l, r),
        _ => StandpointExpr::diff(l, r),
    }
}

/// A random formula with exactly `nodes` formula nodes, using the full
/// syntax (Or, Implies and Diamond included).
pub fn random_formula(
    rng: &mut impl Rng,
    atoms: &[&str],
    symbols: &[&str],
    nodes: usize,
) -> Formula {
    if nodes <= 1 {
        return match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            2 => Formula::sharper(random_expr(rng, symbols, 1), random_expr(rng, symbols, 1)),
            _ => Formula::atom(atoms[rng.gen_range(0..atoms.len())]),
        };
    }
    if nodes == 2 || rng.gen_bool(0.4) {
        let body = random_formula(rng, atoms, symbols, nodes - 1);
        return match rng.gen_range(0..3) {
            0 => Formula::not(body),
            1 => Formula::boxed(random_expr(rng, symbols, 1), body),
            _ => Formula::diamond(random_expr(rng, symbols, 1), body),
        };
    }
    let left = rng.gen_range(1..nodes - 1);
    let l = random_formula(rng, atoms, symbols, left);
    let r = random_formula(rng, atoms, symbols, nodes - 1 - left);
    match rng.gen_range(0..3) {
        0 => Formula::and(l, r),
        1 => Formula::or(l, r),
        _ => Formula::implies(l, r),
    }
}

fn random_subset(rng: &mut impl Rng, n: usize) -> BTreeSet<usize> {
    (0..n).filter(|_| rng.gen_bool(0.5)).collect()
}

pub fn random_structure(
    rng: &mut impl Rng,
    atoms: &[&str],
    symbols: &[&str],
    n: usize,
) -> Structure {
    let sigma: BTreeMap<String, BTreeSet<usize>> = symbols
        .iter()
        .map(|s| (s.to_string(), random_subset(rng, n)))
        .collect();
    let delta: BTreeMap<String, BTreeSet<usize>> = atoms
        .iter()
        .map(|a| (a.to_string(), random_subset(rng, n)))
        .collect();
    Structure::new(precisification_labels(n), sigma, delta).unwrap()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}
