//! Trade-off reduction, exhaustive PSNE enumeration, epsilon-NE verification
//! and simplex search for best responses and small-game mixed equilibria.

mod search;

pub use search::{
    best_response, search_mixed_ne_2p, verify_ne, BestResponseResult, MixedSearchConfig,
    SearchConfig, SearchMetadata, VerificationReport,
};

use thiserror::Error;

use crate::criteria::{pure_value, BlendedAssignment, Criterion, CriteriaError, DEFAULT_TOL};
use crate::game::{ActionProfile, GameError, Monfg};
use crate::utility::{
    default_box, falsify_shape, Shape, ShapeCounterexample, UtilityError, UtilityExpr,
    DEFAULT_SHAPE_TRIALS,
};

#[derive(Debug, Error, PartialEq)]
pub enum EquilibriumError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Utility(#[from] UtilityError),
    #[error("expected {expected} utility functions, got {got}")]
    UtilityArityMismatch { got: usize, expected: usize },
    #[error("expected a single-objective game, got {objectives} objectives")]
    NotScalar { objectives: usize },
    #[error("unsupported input: {0}")]
    Unsupported(String),
}

impl From<CriteriaError> for EquilibriumError {
    fn from(e: CriteriaError) -> Self {
        match e {
            CriteriaError::Game(e) => EquilibriumError::Game(e),
            CriteriaError::Utility(e) => EquilibriumError::Utility(e),
            CriteriaError::UtilityArityMismatch { got, expected } => {
                EquilibriumError::UtilityArityMismatch { got, expected }
            }
        }
    }
}

/// The scalar game induced by composing each player's utility with their
/// vectorial payoff function. Retains the source game and utilities so
/// SER-side checks can be run against the original payoffs.
#[derive(Debug, Clone)]
pub struct TradeOffGame {
    nfg: Monfg,
    source: Monfg,
    utilities: Vec<UtilityExpr>,
}

impl TradeOffGame {
    /// The induced single-objective game.
    pub fn nfg(&self) -> &Monfg {
        &self.nfg
    }

    pub fn source(&self) -> &Monfg {
        &self.source
    }

    pub fn utilities(&self) -> &[UtilityExpr] {
        &self.utilities
    }
}

/// Composes utilities with payoffs cell by cell: the trade-off payoff for
/// player i at joint action a is `u_i(p_i(a))`. Joint-action order is
/// preserved.
pub fn reduce_monfg(game: &Monfg, utilities: &[UtilityExpr]) -> Result<TradeOffGame, EquilibriumError> {
    if utilities.len() != game.num_players() {
        return Err(EquilibriumError::UtilityArityMismatch {
            got: utilities.len(),
            expected: game.num_players(),
        });
    }
    for u in utilities {
        if u.min_dimension() > game.num_objectives() {
            return Err(UtilityError::VariableOutOfRange {
                var: u.min_dimension(),
                dim: game.num_objectives(),
            }
            .into());
        }
    }
    let mut payoffs = Vec::with_capacity(game.num_players());
    for (i, u) in utilities.iter().enumerate() {
        let mut tensor = Vec::with_capacity(game.num_joint_actions());
        for a in game.joint_action_profiles() {
            tensor.push(vec![pure_value(game, u, &a, i)?]);
        }
        payoffs.push(tensor);
    }
    let nfg = Monfg::new(game.action_counts().to_vec(), 1, payoffs)?;
    Ok(TradeOffGame {
        nfg,
        source: game.clone(),
        utilities: utilities.to_vec(),
    })
}

/// Whether a PSNE set is known-complete for the enumerated game or a
/// certified subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completeness {
    All,
    Sample,
}

/// Lexicographically sorted pure strategy Nash equilibria.
#[derive(Debug, Clone, PartialEq)]
pub struct PsneSet {
    pub profiles: Vec<ActionProfile>,
    pub completeness: Completeness,
}

/// Exhaustive PSNE enumeration over a scalar game: a profile is retained
/// when no player gains more than `tol` by a unilateral pure deviation.
/// Weak inequalities, so payoff ties yield equilibria.
pub fn compute_all_psne(nfg: &Monfg, tol: f64) -> Result<PsneSet, EquilibriumError> {
    if nfg.num_objectives() != 1 {
        return Err(EquilibriumError::NotScalar {
            objectives: nfg.num_objectives(),
        });
    }
    let mut profiles = Vec::new();
    for a in nfg.joint_action_profiles() {
        if is_psne(nfg, &a, tol)? {
            profiles.push(a);
        }
    }
    // Row-major enumeration is already lexicographic.
    Ok(PsneSet {
        profiles,
        completeness: Completeness::All,
    })
}

fn is_psne(nfg: &Monfg, a: &ActionProfile, tol: f64) -> Result<bool, EquilibriumError> {
    for i in 0..nfg.num_players() {
        let current = nfg.pure_payoff_vector(a, i)?[0];
        for alt in 0..nfg.num_actions(i) {
            let mut deviated = a.clone();
            deviated.0[i] = alt;
            let deviation = nfg.pure_payoff_vector(&deviated, i)?[0];
            if current < deviation - tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// First PSNE in lexicographic order, or `None` when the game has none.
pub fn compute_sample_psne(nfg: &Monfg, tol: f64) -> Result<Option<ActionProfile>, EquilibriumError> {
    if nfg.num_objectives() != 1 {
        return Err(EquilibriumError::NotScalar {
            objectives: nfg.num_objectives(),
        });
    }
    for a in nfg.joint_action_profiles() {
        if is_psne(nfg, &a, tol)? {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

/// How much SER-side checking [`psne_monfg`] performs on top of the
/// trade-off enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsneMode {
    /// Trust the quasiconvexity assumption after a falsification pass; the
    /// trade-off PSNE set is returned for every criterion assignment, with a
    /// warning when a utility fails the quasiconvexity probe.
    TrustedQuasiconvex,
    /// Additionally filter candidates through an all-SER epsilon-NE check;
    /// retained profiles are certified SER equilibria up to search quality.
    VerifiedSer,
}

/// A utility that failed the quasiconvexity probe over the default box.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiconvexityWarning {
    pub player: usize,
    pub counterexample: ShapeCounterexample,
}

#[derive(Debug, Clone)]
pub struct PsneConfig {
    /// Tie tolerance for the pure-deviation check.
    pub tol: f64,
    /// Certification threshold for the verified-SER filter.
    pub epsilon: f64,
    /// Sampling budget for the quasiconvexity probe.
    pub shape_trials: usize,
    pub seed: u64,
    pub search: SearchConfig,
}

impl Default for PsneConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            epsilon: 1e-6,
            shape_trials: DEFAULT_SHAPE_TRIALS,
            seed: 0,
            search: SearchConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PsneAnalysis {
    pub psne: PsneSet,
    pub warnings: Vec<QuasiconvexityWarning>,
    /// Per-profile verification reports, present in verified-SER mode for
    /// the candidates that were retained.
    pub reports: Vec<(ActionProfile, VerificationReport)>,
}

/// PSNE of an MONFG via trade-off reduction.
///
/// The trade-off PSNE set is exact for ESR. Its validity for SER and for
/// blended assignments rests on every utility being quasiconvex; the probe
/// attaches a warning when that assumption is falsified. Verified-SER mode
/// instead certifies each candidate directly with a search-based all-SER
/// deviation check.
pub fn psne_monfg(
    game: &Monfg,
    utilities: &[UtilityExpr],
    mode: PsneMode,
    cfg: &PsneConfig,
) -> Result<PsneAnalysis, EquilibriumError> {
    let reduced = reduce_monfg(game, utilities)?;
    let esr_set = compute_all_psne(reduced.nfg(), cfg.tol)?;

    let domain = default_box(game);
    let mut warnings = Vec::new();
    for (player, u) in utilities.iter().enumerate() {
        if let Some(counterexample) = falsify_shape(
            u,
            Shape::Quasiconvex,
            &domain,
            cfg.shape_trials,
            cfg.seed,
            cfg.tol,
        )? {
            warnings.push(QuasiconvexityWarning {
                player,
                counterexample,
            });
        }
    }

    match mode {
        PsneMode::TrustedQuasiconvex => Ok(PsneAnalysis {
            psne: esr_set,
            warnings,
            reports: Vec::new(),
        }),
        PsneMode::VerifiedSer => {
            let assignment = BlendedAssignment::all(Criterion::Ser, game.num_players());
            let mut profiles = Vec::new();
            let mut reports = Vec::new();
            for a in esr_set.profiles {
                let s = crate::game::pure_profile(&a, game.action_counts());
                let report =
                    verify_ne(game, utilities, &s, &assignment, cfg.epsilon, &cfg.search)?;
                if report.is_epsilon_ne {
                    profiles.push(a.clone());
                    reports.push((a, report));
                }
            }
            Ok(PsneAnalysis {
                psne: PsneSet {
                    profiles,
                    completeness: Completeness::All,
                },
                warnings,
                reports,
            })
        }
    }
}
