//! The small benchmark games used throughout the test suite and shipped as
//! JSON fixtures in the repository's `games/` directory.

use crate::game::Monfg;

fn build(action_counts: Vec<usize>, d: usize, payoffs: Vec<Vec<Vec<f64>>>) -> Monfg {
    Monfg::new(action_counts, d, payoffs).expect("hand-written game is valid")
}

/// The prisoner's dilemma. Actions: 0 = Cooperate, 1 = Defect.
pub fn prisoners_dilemma() -> Monfg {
    build(
        vec![2, 2],
        1,
        vec![
            vec![vec![-1.0], vec![-3.0], vec![0.0], vec![-2.0]],
            vec![vec![-1.0], vec![0.0], vec![-3.0], vec![-2.0]],
        ],
    )
}

/// A 2x2 game with two-objective payoffs where each cell splits one unit of
/// payoff per objective between the players.
pub fn objective_split() -> Monfg {
    build(
        vec![2, 2],
        2,
        vec![
            vec![
                vec![1.0, 1.0],
                vec![0.0, 1.0],
                vec![1.0, 0.0],
                vec![0.0, 0.0],
            ],
            vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 1.0],
            ],
        ],
    )
}

/// The shared-gym scheduling game. Actions: 0 = Cardio, 1 = Lifting;
/// objectives: cardiovascular health and strength.
pub fn gym() -> Monfg {
    build(
        vec![2, 2],
        2,
        vec![
            vec![
                vec![4.0, 1.0],
                vec![5.0, 1.0],
                vec![1.0, 4.0],
                vec![1.0, 3.0],
            ],
            vec![
                vec![4.0, 1.0],
                vec![1.0, 4.0],
                vec![5.0, 1.0],
                vec![1.0, 3.0],
            ],
        ],
    )
}

/// Utility expressions paired with [`gym`]: a quadratic preference for the
/// first objective, and a balanced product of both.
pub fn gym_utilities() -> [&'static str; 2] {
    ["(+ (pow p1 2) p2)", "(* p1 p2)"]
}

/// A symmetric 2x2 game that, combined with the strictly convex utility of
/// [`no_ne_utilities`], admits no Nash equilibrium under SER.
pub fn no_ne_under_ser() -> Monfg {
    build(
        vec![2, 2],
        2,
        vec![
            vec![
                vec![2.0, 0.0],
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, 2.0],
            ],
            vec![
                vec![1.0, 0.0],
                vec![0.0, 2.0],
                vec![2.0, 0.0],
                vec![0.0, 1.0],
            ],
        ],
    )
}

/// The strictly convex utility (same for both players) used with
/// [`no_ne_under_ser`].
pub fn no_ne_utilities() -> [&'static str; 2] {
    ["(+ (pow p1 2) (pow p2 2))", "(+ (pow p1 2) (pow p2 2))"]
}

/// A symmetric 2x2 game whose ESR and SER equilibrium sets are disjoint when
/// paired with [`mismatch_utilities`]: the trade-off game has the single pure
/// equilibrium (0, 0), while under SER only mixed equilibria exist.
pub fn ser_esr_mismatch() -> Monfg {
    build(
        vec![2, 2],
        2,
        vec![
            vec![
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, 1.0],
                vec![-10.0, 0.0],
            ],
            vec![
                vec![1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, 1.0],
                vec![-10.0, 0.0],
            ],
        ],
    )
}

/// The non-quasiconvex utility (same for both players) used with
/// [`ser_esr_mismatch`].
pub fn mismatch_utilities() -> [&'static str; 2] {
    [
        "(+ (* 0.1 p1) (* (max 0 p1) (max 0 p2)))",
        "(+ (* 0.1 p1) (* (max 0 p1) (max 0 p2)))",
    ]
}
