//! Scalar value of a strategy profile under the ESR or SER criterion.
//!
//! ESR applies the utility to each pure payoff vector and takes the
//! expectation; SER applies the utility to the expected payoff vector. The
//! two coincide on pure profiles and for linear utilities.

use thiserror::Error;

use crate::game::{ActionProfile, GameError, Monfg, StrategyProfile};
use crate::utility::{UtilityError, UtilityExpr};

/// Default absolute tolerance for scalar comparisons across the toolkit.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum CriteriaError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Utility(#[from] UtilityError),
    #[error("expected {expected} utility functions, got {got}")]
    UtilityArityMismatch { got: usize, expected: usize },
}

/// Which side of the expectation the utility function is applied on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// Expected scalarised returns: expectation of per-outcome utilities.
    Esr,
    /// Scalarised expected returns: utility of the expected payoff vector.
    Ser,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::Esr => "ESR",
            Criterion::Ser => "SER",
        }
    }

    pub fn from_name(name: &str) -> Option<Criterion> {
        match name {
            "ESR" => Some(Criterion::Esr),
            "SER" => Some(Criterion::Ser),
            _ => None,
        }
    }
}

/// One criterion per player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlendedAssignment {
    criteria: Vec<Criterion>,
}

impl BlendedAssignment {
    pub fn new(criteria: Vec<Criterion>) -> Self {
        Self { criteria }
    }

    pub fn all(criterion: Criterion, num_players: usize) -> Self {
        Self {
            criteria: vec![criterion; num_players],
        }
    }

    pub fn criteria(&self) -> &[Criterion] {
        &self.criteria
    }

    pub fn player(&self, i: usize) -> Criterion {
        self.criteria[i]
    }

    pub fn num_players(&self) -> usize {
        self.criteria.len()
    }
}

/// Expected value over joint actions of the scalarised pure payoffs.
pub fn esr_value(
    game: &Monfg,
    u: &UtilityExpr,
    s: &StrategyProfile,
    i: usize,
) -> Result<f64, CriteriaError> {
    if s.num_players() != game.num_players() {
        return Err(GameError::ProfileLengthMismatch {
            got: s.num_players(),
            expected: game.num_players(),
        }
        .into());
    }
    for j in 0..game.num_players() {
        if s.player(j).num_actions() != game.num_actions(j) {
            return Err(GameError::StrategyLengthMismatch {
                got: s.player(j).num_actions(),
                expected: game.num_actions(j),
            }
            .into());
        }
    }
    let mut total = 0.0;
    for a in game.joint_action_profiles() {
        let mut weight = 1.0;
        for (j, &aj) in a.actions().iter().enumerate() {
            weight *= s.player(j).probs()[aj];
        }
        if weight == 0.0 {
            continue;
        }
        let payoff = game.pure_payoff_vector(&a, i)?;
        total += weight * u.eval(payoff)?;
    }
    Ok(total)
}

/// Utility of the expected payoff vector.
pub fn ser_value(
    game: &Monfg,
    u: &UtilityExpr,
    s: &StrategyProfile,
    i: usize,
) -> Result<f64, CriteriaError> {
    let expected = game.expected_payoff_vector(s, i)?;
    Ok(u.eval(&expected)?)
}

/// Dispatches to [`esr_value`] or [`ser_value`].
pub fn value(
    game: &Monfg,
    u: &UtilityExpr,
    s: &StrategyProfile,
    i: usize,
    criterion: Criterion,
) -> Result<f64, CriteriaError> {
    match criterion {
        Criterion::Esr => esr_value(game, u, s, i),
        Criterion::Ser => ser_value(game, u, s, i),
    }
}

/// Scalarised value of a pure action profile: `u_i(p_i(a))`.
pub fn pure_value(
    game: &Monfg,
    u: &UtilityExpr,
    a: &ActionProfile,
    i: usize,
) -> Result<f64, CriteriaError> {
    Ok(u.eval(game.pure_payoff_vector(a, i)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{pure_profile, MixedStrategy, Monfg};
    use crate::utility::parse_utility;

    fn two_day_commute() -> Monfg {
        // One chance player over two outcomes (0,2) and (2,0).
        Monfg::new(
            vec![2],
            2,
            vec![vec![vec![0.0, 2.0], vec![2.0, 0.0]]],
        )
        .unwrap()
    }

    #[test]
    fn esr_and_ser_differ_under_product_utility() {
        let game = two_day_commute();
        let u = parse_utility("(* p1 p2)").unwrap();
        let s = StrategyProfile::new(vec![MixedStrategy::uniform(2)]);
        assert_eq!(esr_value(&game, &u, &s, 0).unwrap(), 0.0);
        assert_eq!(ser_value(&game, &u, &s, 0).unwrap(), 1.0);
        assert_eq!(value(&game, &u, &s, 0, Criterion::Esr).unwrap(), 0.0);
        assert_eq!(value(&game, &u, &s, 0, Criterion::Ser).unwrap(), 1.0);
    }

    #[test]
    fn esr_on_pure_profile_is_pure_utility() {
        let game = crate::games::gym();
        let u = parse_utility(crate::games::gym_utilities()[0]).unwrap();
        for a in game.joint_action_profiles() {
            let s = pure_profile(&a, game.action_counts());
            let esr = esr_value(&game, &u, &s, 0).unwrap();
            let direct = pure_value(&game, &u, &a, 0).unwrap();
            assert_eq!(esr, direct);
        }
    }

    #[test]
    fn ser_gym_uniform_athlete() {
        let game = crate::games::gym();
        let u = parse_utility(crate::games::gym_utilities()[1]).unwrap();
        let s = StrategyProfile::new(vec![MixedStrategy::pure(0, 2), MixedStrategy::uniform(2)]);
        assert_eq!(ser_value(&game, &u, &s, 1).unwrap(), 6.25);
    }

    #[test]
    fn ser_mismatch_game_mix_against_pure() {
        // Against an opponent playing the first action
        // deterministically, the (11/20, 9/20) mix yields SER 0.3025.
        let game = crate::games::ser_esr_mismatch();
        let u = parse_utility(crate::games::mismatch_utilities()[0]).unwrap();
        let s = StrategyProfile::new(vec![
            MixedStrategy::new(vec![11.0 / 20.0, 9.0 / 20.0]).unwrap(),
            MixedStrategy::pure(0, 2),
        ]);
        assert!((ser_value(&game, &u, &s, 0).unwrap() - 0.3025).abs() < 1e-12);
    }

    #[test]
    fn esr_mismatch_game_both_mixing() {
        let game = crate::games::ser_esr_mismatch();
        let u = parse_utility(crate::games::mismatch_utilities()[0]).unwrap();
        let mix = MixedStrategy::new(vec![11.0 / 20.0, 9.0 / 20.0]).unwrap();
        let s = StrategyProfile::new(vec![mix.clone(), mix]);
        // Four-cell hand sum: (121/400)(0.1) + 0 + 0 + (81/400)(-1).
        let expected = 121.0 / 400.0 * 0.1 - 81.0 / 400.0;
        assert!((esr_value(&game, &u, &s, 0).unwrap() - expected).abs() < 1e-12);
        assert!((expected - -0.17225).abs() < 1e-12);
    }

    #[test]
    fn linear_utility_criteria_agree() {
        let game = crate::games::gym();
        let u = crate::utility::linear_utility(&[0.3, 0.7]);
        let s = StrategyProfile::new(vec![
            MixedStrategy::new(vec![0.2, 0.8]).unwrap(),
            MixedStrategy::new(vec![0.6, 0.4]).unwrap(),
        ]);
        for i in 0..2 {
            let esr = esr_value(&game, &u, &s, i).unwrap();
            let ser = ser_value(&game, &u, &s, i).unwrap();
            assert!((esr - ser).abs() <= DEFAULT_TOL);
        }
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let game = crate::games::gym();
        let u = parse_utility("p1").unwrap();
        let s = StrategyProfile::new(vec![MixedStrategy::uniform(2)]);
        assert!(esr_value(&game, &u, &s, 0).is_err());
        assert!(ser_value(&game, &u, &s, 0).is_err());
    }
}
