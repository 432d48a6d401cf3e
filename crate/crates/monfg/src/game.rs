//! Games, strategies and expected vector payoffs.
//!
//! A [`Monfg`] stores one dense payoff tensor per player in row-major
//! joint-action order (the last player's action index varies fastest). A
//! single-objective game is the degenerate case `num_objectives == 1`, so the
//! trade-off reduction can reuse the same representation.

use thiserror::Error;

/// Tolerance for validating that a probability vector sums to one.
pub const SIMPLEX_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GameError {
    #[error("player index {player} out of range (game has {num_players} players)")]
    PlayerOutOfRange { player: usize, num_players: usize },
    #[error("action profile {profile:?} invalid for action counts {action_counts:?}")]
    InvalidActionProfile {
        profile: Vec<usize>,
        action_counts: Vec<usize>,
    },
    #[error("probability {value} is negative")]
    NegativeProbability { value: f64 },
    #[error("probabilities sum to {sum}, expected 1")]
    ProbabilitiesDoNotSumToOne { sum: f64 },
    #[error("strategy has {got} entries, player has {expected} actions")]
    StrategyLengthMismatch { got: usize, expected: usize },
    #[error("profile has {got} strategies, game has {expected} players")]
    ProfileLengthMismatch { got: usize, expected: usize },
    #[error("game must have at least one player")]
    NoPlayers,
    #[error("player {player} has zero actions")]
    EmptyActionSet { player: usize },
    #[error("game must have at least one objective")]
    NoObjectives,
    #[error("payoff tensor for player {player} has {got} entries, expected {expected}")]
    PayoffTensorShape {
        player: usize,
        got: usize,
        expected: usize,
    },
    #[error("payoff vector for player {player} at joint action {index} has length {got}, expected {expected}")]
    PayoffVectorLength {
        player: usize,
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("non-finite payoff for player {player} at joint action {index}")]
    NonFinitePayoff { player: usize, index: usize },
}

/// A joint pure action, one action index per player.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionProfile(pub Vec<usize>);

impl ActionProfile {
    pub fn actions(&self) -> &[usize] {
        &self.0
    }
}

/// A probability distribution over one player's actions.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy {
    probs: Vec<f64>,
}

impl MixedStrategy {
    /// Validates non-negativity and a unit sum within [`SIMPLEX_SUM_TOL`],
    /// then renormalizes so downstream arithmetic sees an exact simplex point.
    pub fn new(probs: Vec<f64>) -> Result<Self, GameError> {
        if probs.is_empty() {
            return Err(GameError::StrategyLengthMismatch {
                got: 0,
                expected: 1,
            });
        }
        for &p in &probs {
            if !(p >= 0.0) {
                return Err(GameError::NegativeProbability { value: p });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_SUM_TOL {
            return Err(GameError::ProbabilitiesDoNotSumToOne { sum });
        }
        let probs = probs.into_iter().map(|p| p / sum).collect();
        Ok(Self { probs })
    }

    /// The degenerate distribution playing `action` with probability one.
    pub fn pure(action: usize, num_actions: usize) -> Self {
        let mut probs = vec![0.0; num_actions];
        probs[action] = 1.0;
        Self { probs }
    }

    /// Uniform distribution over `num_actions` actions.
    pub fn uniform(num_actions: usize) -> Self {
        Self {
            probs: vec![1.0 / num_actions as f64; num_actions],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_actions(&self) -> usize {
        self.probs.len()
    }

    /// Actions played with strictly positive probability.
    pub fn support(&self) -> Vec<usize> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(a, _)| a)
            .collect()
    }
}

/// One mixed strategy per player.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    strategies: Vec<MixedStrategy>,
}

impl StrategyProfile {
    pub fn new(strategies: Vec<MixedStrategy>) -> Self {
        Self { strategies }
    }

    pub fn strategies(&self) -> &[MixedStrategy] {
        &self.strategies
    }

    pub fn player(&self, i: usize) -> &MixedStrategy {
        &self.strategies[i]
    }

    /// Returns a copy with player `i`'s strategy replaced.
    pub fn with_player(&self, i: usize, strategy: MixedStrategy) -> Self {
        let mut strategies = self.strategies.clone();
        strategies[i] = strategy;
        Self { strategies }
    }

    pub fn num_players(&self) -> usize {
        self.strategies.len()
    }
}

/// A finite n-player game with d-objective vectorial payoffs.
///
/// `payoffs[i]` holds player i's payoff vector for every joint action in
/// row-major order. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Monfg {
    action_counts: Vec<usize>,
    num_objectives: usize,
    payoffs: Vec<Vec<Vec<f64>>>,
}

impl Monfg {
    pub fn new(
        action_counts: Vec<usize>,
        num_objectives: usize,
        payoffs: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self, GameError> {
        if action_counts.is_empty() {
            return Err(GameError::NoPlayers);
        }
        if let Some(player) = action_counts.iter().position(|&m| m == 0) {
            return Err(GameError::EmptyActionSet { player });
        }
        if num_objectives == 0 {
            return Err(GameError::NoObjectives);
        }
        let n = action_counts.len();
        if payoffs.len() != n {
            return Err(GameError::PayoffTensorShape {
                player: payoffs.len().min(n),
                got: payoffs.len(),
                expected: n,
            });
        }
        let num_joint: usize = action_counts.iter().product();
        for (player, tensor) in payoffs.iter().enumerate() {
            if tensor.len() != num_joint {
                return Err(GameError::PayoffTensorShape {
                    player,
                    got: tensor.len(),
                    expected: num_joint,
                });
            }
            for (index, vector) in tensor.iter().enumerate() {
                if vector.len() != num_objectives {
                    return Err(GameError::PayoffVectorLength {
                        player,
                        index,
                        got: vector.len(),
                        expected: num_objectives,
                    });
                }
                if vector.iter().any(|v| !v.is_finite()) {
                    return Err(GameError::NonFinitePayoff { player, index });
                }
            }
        }
        Ok(Self {
            action_counts,
            num_objectives,
            payoffs,
        })
    }

    pub fn num_players(&self) -> usize {
        self.action_counts.len()
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn num_actions(&self, player: usize) -> usize {
        self.action_counts[player]
    }

    pub fn num_objectives(&self) -> usize {
        self.num_objectives
    }

    pub fn num_joint_actions(&self) -> usize {
        self.action_counts.iter().product()
    }

    pub fn payoff_tensor(&self, player: usize) -> &[Vec<f64>] {
        &self.payoffs[player]
    }

    /// Row-major flat index of a joint action.
    pub fn joint_index(&self, a: &ActionProfile) -> Result<usize, GameError> {
        self.validate_profile(a)?;
        let mut index = 0;
        for (j, &aj) in a.actions().iter().enumerate() {
            index = index * self.action_counts[j] + aj;
        }
        Ok(index)
    }

    fn validate_profile(&self, a: &ActionProfile) -> Result<(), GameError> {
        let valid = a.actions().len() == self.num_players()
            && a.actions()
                .iter()
                .zip(&self.action_counts)
                .all(|(&aj, &mj)| aj < mj);
        if valid {
            Ok(())
        } else {
            Err(GameError::InvalidActionProfile {
                profile: a.actions().to_vec(),
                action_counts: self.action_counts.clone(),
            })
        }
    }

    fn validate_player(&self, i: usize) -> Result<(), GameError> {
        if i < self.num_players() {
            Ok(())
        } else {
            Err(GameError::PlayerOutOfRange {
                player: i,
                num_players: self.num_players(),
            })
        }
    }

    fn validate_strategy_profile(&self, s: &StrategyProfile) -> Result<(), GameError> {
        if s.num_players() != self.num_players() {
            return Err(GameError::ProfileLengthMismatch {
                got: s.num_players(),
                expected: self.num_players(),
            });
        }
        for (j, strategy) in s.strategies().iter().enumerate() {
            if strategy.num_actions() != self.action_counts[j] {
                return Err(GameError::StrategyLengthMismatch {
                    got: strategy.num_actions(),
                    expected: self.action_counts[j],
                });
            }
        }
        Ok(())
    }

    /// The stored payoff vector for player `i` at joint action `a`.
    pub fn pure_payoff_vector(&self, a: &ActionProfile, i: usize) -> Result<&[f64], GameError> {
        self.validate_player(i)?;
        let index = self.joint_index(a)?;
        Ok(&self.payoffs[i][index])
    }

    /// Expected payoff vector of a mixed strategy profile for player `i`:
    /// the sum over joint actions of the payoff vector weighted by the
    /// product of per-player probabilities.
    pub fn expected_payoff_vector(
        &self,
        s: &StrategyProfile,
        i: usize,
    ) -> Result<Vec<f64>, GameError> {
        self.validate_player(i)?;
        self.validate_strategy_profile(s)?;
        let mut expected = vec![0.0; self.num_objectives];
        for (index, a) in self.joint_action_profiles().enumerate() {
            let mut weight = 1.0;
            for (j, &aj) in a.actions().iter().enumerate() {
                weight *= s.player(j).probs()[aj];
            }
            if weight == 0.0 {
                continue;
            }
            for (o, value) in self.payoffs[i][index].iter().enumerate() {
                expected[o] += weight * value;
            }
        }
        Ok(expected)
    }

    /// All joint action profiles in row-major order, each exactly once.
    pub fn joint_action_profiles(&self) -> JointActionIter<'_> {
        JointActionIter {
            action_counts: &self.action_counts,
            current: Some(vec![0; self.action_counts.len()]),
        }
    }
}

/// Row-major iterator over joint actions; the last player varies fastest.
pub struct JointActionIter<'a> {
    action_counts: &'a [usize],
    current: Option<Vec<usize>>,
}

impl Iterator for JointActionIter<'_> {
    type Item = ActionProfile;

    fn next(&mut self) -> Option<ActionProfile> {
        let current = self.current.take()?;
        let result = ActionProfile(current.clone());
        let mut next = current;
        for j in (0..next.len()).rev() {
            next[j] += 1;
            if next[j] < self.action_counts[j] {
                self.current = Some(next);
                return Some(result);
            }
            next[j] = 0;
        }
        // Wrapped around: enumeration is complete.
        Some(result)
    }
}

/// The degenerate profile where every player plays their component of `a`.
pub fn pure_profile(a: &ActionProfile, action_counts: &[usize]) -> StrategyProfile {
    let strategies = a
        .actions()
        .iter()
        .zip(action_counts)
        .map(|(&aj, &mj)| MixedStrategy::pure(aj, mj))
        .collect();
    StrategyProfile::new(strategies)
}
