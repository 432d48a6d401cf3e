//! Shared generators and oracles for the integration suites.
//!
//! Random games and utilities use integer data so that value differences are
//! either exactly zero or far larger than any tolerance; the containment
//! and set-equality suites rely on this to be deterministic at 500 cases.

// Each integration target compiles its own copy of this module and uses a
// different subset of it.
#![allow(dead_code)]

use monfg::game::Monfg;
use monfg::utility::UtilityExpr;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random scalar or vector game with integer payoffs in `[lo, hi]`.
pub fn rand_game(
    rng: &mut ChaCha8Rng,
    players: usize,
    max_actions: usize,
    objectives: usize,
    lo: i32,
    hi: i32,
) -> Monfg {
    let action_counts: Vec<usize> =
        (0..players).map(|_| rng.gen_range(1..=max_actions)).collect();
    let cells: usize = action_counts.iter().product();
    let payoffs = (0..players)
        .map(|_| {
            (0..cells)
                .map(|_| {
                    (0..objectives)
                        .map(|_| rng.gen_range(lo..=hi) as f64)
                        .collect()
                })
                .collect()
        })
        .collect();
    Monfg::new(action_counts, objectives, payoffs).expect("generated game is valid")
}

fn rand_leaf(rng: &mut ChaCha8Rng, d: usize) -> UtilityExpr {
    if rng.gen_range(0..3) == 0 {
        UtilityExpr::Const(rng.gen_range(-3..=3) as f64)
    } else {
        UtilityExpr::Var(rng.gen_range(0..d))
    }
}

/// Arbitrary utility over `d` objectives with small integer constants, so
/// that utilities of integer payoff vectors are integers.
pub fn rand_utility(rng: &mut ChaCha8Rng, d: usize, depth: usize) -> UtilityExpr {
    if depth == 0 {
        return rand_leaf(rng, d);
    }
    match rng.gen_range(0..8) {
        0 | 1 => UtilityExpr::Add(vec![
            rand_utility(rng, d, depth - 1),
            rand_utility(rng, d, depth - 1),
        ]),
        2 => UtilityExpr::Sub(
            Box::new(rand_utility(rng, d, depth - 1)),
            Box::new(rand_utility(rng, d, depth - 1)),
        ),
        3 => UtilityExpr::Mul(vec![
            rand_utility(rng, d, depth - 1),
            rand_utility(rng, d, depth - 1),
        ]),
        4 => UtilityExpr::Max(vec![
            rand_utility(rng, d, depth - 1),
            rand_utility(rng, d, depth - 1),
        ]),
        5 => UtilityExpr::Min(vec![
            rand_utility(rng, d, depth - 1),
            rand_utility(rng, d, depth - 1),
        ]),
        6 => UtilityExpr::Neg(Box::new(rand_utility(rng, d, depth - 1))),
        _ => UtilityExpr::Pow(Box::new(rand_leaf(rng, d)), rng.gen_range(0..=2)),
    }
}

fn linear_form(rng: &mut ChaCha8Rng, d: usize) -> UtilityExpr {
    UtilityExpr::Add(
        (0..d)
            .map(|o| {
                UtilityExpr::Mul(vec![
                    UtilityExpr::Const(rng.gen_range(-3..=3) as f64),
                    UtilityExpr::Var(o),
                ])
            })
            .collect(),
    )
}

fn convex_quadratic(rng: &mut ChaCha8Rng, d: usize, min_coeff: i32) -> UtilityExpr {
    let mut terms: Vec<UtilityExpr> = (0..d)
        .map(|o| {
            UtilityExpr::Mul(vec![
                UtilityExpr::Const(rng.gen_range(min_coeff..=2).max(0) as f64),
                UtilityExpr::Pow(Box::new(UtilityExpr::Var(o)), 2),
            ])
        })
        .collect();
    terms.push(linear_form(rng, d));
    UtilityExpr::Add(terms)
}

/// Quasiconvex utility: a linear form, a max of linear forms, or a
/// nonnegative combination of squared coordinates plus a linear form
/// (convex, hence quasiconvex). Integer coefficients throughout.
pub fn quasiconvex_utility(rng: &mut ChaCha8Rng, d: usize) -> UtilityExpr {
    match rng.gen_range(0..3) {
        0 => linear_form(rng, d),
        1 => UtilityExpr::Max(
            (0..rng.gen_range(2..=3)).map(|_| linear_form(rng, d)).collect(),
        ),
        _ => convex_quadratic(rng, d, 0),
    }
}

/// Strictly convex utility: positive-definite diagonal quadratic plus a
/// linear form.
pub fn strictly_convex_utility(rng: &mut ChaCha8Rng, d: usize) -> UtilityExpr {
    convex_quadratic(rng, d, 1)
}

/// Independently coded pure-equilibrium checker used as the enumeration
/// oracle: walks joint actions with a mixed-radix counter and indexes the
/// payoff tensors through hand-computed strides.
pub fn brute_force_psne(nfg: &Monfg, tol: f64) -> Vec<Vec<usize>> {
    assert_eq!(nfg.num_objectives(), 1);
    let n = nfg.num_players();
    let counts = nfg.action_counts();
    // strides[j] = product of the action counts after player j.
    let mut strides = vec![1usize; n];
    for j in (0..n.saturating_sub(1)).rev() {
        strides[j] = strides[j + 1] * counts[j + 1];
    }
    let payoff = |i: usize, a: &[usize]| -> f64 {
        let idx: usize = a.iter().zip(&strides).map(|(&aj, &s)| aj * s).sum();
        nfg.payoff_tensor(i)[idx][0]
    };
    let mut out = Vec::new();
    let mut a = vec![0usize; n];
    loop {
        let mut is_ne = true;
        'players: for i in 0..n {
            let base = payoff(i, &a);
            for alt in 0..counts[i] {
                if alt == a[i] {
                    continue;
                }
                let mut dev = a.clone();
                dev[i] = alt;
                if payoff(i, &dev) > base + tol {
                    is_ne = false;
                    break 'players;
                }
            }
        }
        if is_ne {
            out.push(a.clone());
        }
        // Mixed-radix increment, last player fastest.
        let mut j = n;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            a[j] += 1;
            if a[j] < counts[j] {
                break;
            }
            a[j] = 0;
        }
    }
}
